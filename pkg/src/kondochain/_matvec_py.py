"""Pure-numpy spin-exchange matvec kernel (fallback backend).

Same contract as the compiled version in ``_matvec_cy``: accumulate H @ v
into ``out`` for a list of sigma.sigma bonds, matrix-free over a sorted
sector config array.
"""

import numpy as np


def apply_bonds(configs, bits_a, bits_b, strengths, v, out):
    """out += H v for bonds strengths[k] * sigma.sigma on bit pairs (a, b).

    Diagonal: +/- strength for parallel/antiparallel spins; antiparallel
    configurations additionally scatter 2*strength onto the spin-exchanged
    configuration (located by binary search, as configs is sorted).
    """
    for a, b, w in zip(bits_a, bits_b, strengths):
        mask = (1 << int(a)) | (1 << int(b))
        parallel = ((configs >> int(a)) & 1) == ((configs >> int(b)) & 1)
        out += np.where(parallel, w, -w) * v
        src = np.flatnonzero(~parallel)
        dst = np.searchsorted(configs, configs[src] ^ mask)
        out[dst] += (2.0 * w) * v[src]
    return out
