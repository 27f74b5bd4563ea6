"""Arithmetic kernel with a compiled backend and a pure-Python fallback.

The compiled Cython module is preferred when built; set SYMCANON_BACKEND=py
to force the pure fallback or SYMCANON_BACKEND=cy to require the extension.
"""

import os

_choice = os.environ.get("SYMCANON_BACKEND", "").lower()

if _choice in ("py", "pure", "python"):
    from symcanon._core import corepy as _impl

    BACKEND = "pure"
elif _choice in ("cy", "compiled", "cython"):
    from symcanon._core import _corecy as _impl  # type: ignore[attr-defined]

    BACKEND = "compiled"
elif _choice == "":
    try:
        from symcanon._core import _corecy as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from symcanon._core import corepy as _impl

        BACKEND = "pure"
else:
    raise RuntimeError(f"unknown SYMCANON_BACKEND value: {_choice!r}")

NVARS = _impl.NVARS
VAR_NAMES = _impl.VAR_NAMES
VAR_H = _impl.VAR_H
VAR_L2 = _impl.VAR_L2
VAR_ALPHA = _impl.VAR_ALPHA
VAR_BETA = _impl.VAR_BETA
VAR_GAMMA = _impl.VAR_GAMMA

Rational = _impl.Rational
GaussRational = _impl.GaussRational
ParamPoly = _impl.ParamPoly

RAT_ZERO = _impl.RAT_ZERO
RAT_ONE = _impl.RAT_ONE
GAUSS_ZERO = _impl.GAUSS_ZERO
GAUSS_ONE = _impl.GAUSS_ONE
GAUSS_I = _impl.GAUSS_I

encode_exponents = _impl.encode_exponents
decode_key = _impl.decode_key
key_degree = _impl.key_degree
key_divides = _impl.key_divides
grlex_key = _impl.grlex_key
