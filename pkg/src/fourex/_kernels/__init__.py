"""Backend selection for the tridiagonal eigen-kernels.

The compiled Cython kernels are used when importable; setting
FOUREX_PURE=1 in the environment forces the NumPy fallback.  Both
backends implement the same bisection arithmetic, so eigenvalues agree
bitwise; eigenvectors agree to the convergence tolerance.
"""

import os

from . import pure

if os.environ.get("FOUREX_PURE"):
    _impl = pure
else:
    try:
        from . import _ctridiag as _impl
    except ImportError:
        _impl = pure


def active():
    """The backend module currently in use."""
    return _impl


def name():
    """'compiled' or 'pure'."""
    return "pure" if _impl is pure else "compiled"


def get(which=None):
    """Fetch a backend by name; None means the active one.

    Raises ImportError if the compiled backend is requested but was not
    built.
    """
    if which is None:
        return _impl
    if which == "pure":
        return pure
    if which == "compiled":
        from . import _ctridiag

        return _ctridiag
    raise ValueError(f"unknown backend {which!r}")
