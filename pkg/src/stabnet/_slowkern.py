"""Pure-numpy implementation of the merge-candidate kernel.

Used when the compiled extension is unavailable (or forced off via the
STABNET_PURE_PYTHON environment variable).  Loops over times rather than
materialising the full (s, r, c) temporary so memory stays O(r*c).
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def min_candidate(
    e_sub: np.ndarray, a_row: np.ndarray, a_col: np.ndarray, qv: np.ndarray
) -> np.ndarray:
    """min over t of qv[t] + 2*(e[t, i, j] - a_row[i]*a_col[j]), shape (r, c)."""
    aa = 2.0 * np.outer(a_row, a_col)
    out = qv[0] + 2.0 * e_sub[0] - aa
    for t in range(1, e_sub.shape[0]):
        np.minimum(out, qv[t] + 2.0 * e_sub[t] - aa, out=out)
    return out
