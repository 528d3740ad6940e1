"""Kernel backend selection.

Imports the compiled extension when available, falling back to the numpy
implementations. ``ROLLMC_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("ROLLMC_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME

batch_interval_sums = _impl.batch_interval_sums
football_loglik = _impl.football_loglik
football_mh_chain = _impl.football_mh_chain
lgm_gibbs_chain = _impl.lgm_gibbs_chain


def backend_name() -> str:
    """Name of the active kernel backend ("cython" or "python")."""
    return BACKEND
