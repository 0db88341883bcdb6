"""Scalar backends and run configuration.

Two realizations of the ground field are supported and selected per run:

* ``"exact"`` -- complex numbers with rational real and imaginary parts
  (:class:`QQc`), stored in numpy object arrays.  All arithmetic is exact;
  equality is literal equality.  Only admissible when every structure
  constant of the input data is rational.
* ``"float"`` -- ``numpy.complex128``; equality is tolerance based.

All matrix helpers in :mod:`defectgraph.linalg` dispatch on the mode stored
in a :class:`RunConfig`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = ["QQc", "ToleranceConfig", "RunConfig", "approx_eq"]


class QQc:
    """A complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x) -> "QQc":
        if isinstance(x, QQc):
            return x
        if isinstance(x, (int, Fraction)):
            return QQc(x)
        if isinstance(x, float):
            if not float(x).is_integer():
                raise TypeError(f"refusing to coerce non-integral float {x!r} to exact scalar")
            return QQc(int(x))
        if isinstance(x, complex):
            raise TypeError("cannot coerce complex float to exact scalar")
        raise TypeError(f"cannot coerce {type(x)} to QQc")

    @staticmethod
    def _try(x):
        try:
            return QQc.coerce(x)
        except TypeError:
            return None

    def __add__(self, other):
        other = QQc._try(other)
        if other is None:
            return NotImplemented
        return QQc(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QQc(-self.re, -self.im)

    def __sub__(self, other):
        o = QQc._try(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = QQc._try(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        other = QQc._try(other)
        if other is None:
            return NotImplemented
        return QQc(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = QQc._try(other)
        if other is None:
            return NotImplemented
        den = other.re * other.re + other.im * other.im
        if den == 0:
            raise ZeroDivisionError("division by zero QQc")
        return QQc((self.re * other.re + self.im * other.im) / den,
                   (self.im * other.re - self.re * other.im) / den)

    def __rtruediv__(self, other):
        o = QQc._try(other)
        if o is None:
            return NotImplemented
        return o / self

    def conj(self):
        return QQc(self.re, -self.im)

    def __eq__(self, other):
        try:
            other = QQc.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __abs__(self):
        return abs(complex(self))

    def __complex__(self):
        return float(self.re) + 1j * float(self.im)

    def __repr__(self):
        if self.im == 0:
            return f"{self.re}"
        return f"({self.re}+{self.im}j)"


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances. ``eq_tol`` gates scalar equality in float mode,
    ``rank_tol`` is the singular-value cutoff for rank decisions."""

    eq_tol: float = 1e-9
    rank_tol: float = 1e-8

    def __post_init__(self):
        if not (0 < self.eq_tol < 1 and 0 < self.rank_tol < 1):
            raise ValueError("tolerances must lie in (0, 1)")


@dataclass(frozen=True)
class RunConfig:
    """Run-wide configuration: scalar mode, tolerances and the seed used for
    all sampled checks (recorded in reports for reproducibility)."""

    scalar_mode: str = "float"
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)
    seed: int = 0

    def __post_init__(self):
        if self.scalar_mode not in ("exact", "float"):
            raise ValueError(f"unknown scalar mode {self.scalar_mode!r}")

    @property
    def exact(self) -> bool:
        return self.scalar_mode == "exact"

    # -- scalar constructors -------------------------------------------------

    def scalar(self, re, im=0):
        if self.exact:
            return QQc(re, im)
        return complex(re) + 1j * complex(im)

    def from_json_pair(self, val):
        """Scalars in JSON files are either a number or a ``[re, im]`` pair
        (rational parts as ints or strings like ``"1/2"``)."""
        if isinstance(val, (list, tuple)):
            re, im = val
        else:
            re, im = val, 0
        if self.exact:
            return QQc(Fraction(re) if not isinstance(re, str) else Fraction(re),
                       Fraction(im) if not isinstance(im, str) else Fraction(im))
        re = float(Fraction(re)) if isinstance(re, str) else float(re)
        im = float(Fraction(im)) if isinstance(im, str) else float(im)
        return re + 1j * im

    @property
    def zero(self):
        return QQc(0) if self.exact else 0j

    @property
    def one(self):
        return QQc(1) if self.exact else 1 + 0j

    @property
    def dtype(self):
        return object if self.exact else np.complex128

    def coerce(self, x):
        return QQc.coerce(x) if self.exact else complex(x)


def approx_eq(a, b, cfg: RunConfig) -> bool:
    """Scalar equality: exact in exact mode, relative-tolerance in float mode
    (``|a-b| <= eq_tol * max(1, |a|, |b|)``)."""
    if cfg.exact:
        return QQc.coerce(a) == QQc.coerce(b)
    a, b = complex(a), complex(b)
    return abs(a - b) <= cfg.tol.eq_tol * max(1.0, abs(a), abs(b))
