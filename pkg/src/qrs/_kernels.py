"""Kernel backend selection.

QRS_BACKEND=auto   use numba when importable, else the numpy fallback (default)
QRS_BACKEND=numba  require numba, fail loudly if it is missing
QRS_BACKEND=numpy  force the pure-numpy fallback

Both backends are bit-identical; the flag only trades compilation latency
against throughput.
"""
from __future__ import annotations

import os

_choice = os.environ.get("QRS_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"QRS_BACKEND must be one of auto/numba/numpy, got {_choice!r}"
    )

if _choice == "numpy":
    from . import _kernels_numpy as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl

        BACKEND = "numba"
    except ImportError:
        if _choice == "numba":
            raise
        from . import _kernels_numpy as _impl

        BACKEND = "numpy"

radical_inverse = _impl.radical_inverse
sobol_integers = _impl.sobol_integers
star_disc_exact_nd = _impl.star_disc_exact_nd
corner_deviations = _impl.corner_deviations
fisher_yates_head = _impl.fisher_yates_head
weighted_draw = _impl.weighted_draw
coverage_trials = _impl.coverage_trials
jet_act_fwd = _impl.jet_act_fwd
jet_act_bwd = _impl.jet_act_bwd
