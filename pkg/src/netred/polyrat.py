"""Real-coefficient polynomials and rational functions of the Laplace variable.

Coefficients are stored in ascending order, ``coeffs[k]`` multiplies ``s**k``.
Every value is immutable; arithmetic returns new objects.

Common factors between numerator and denominator are found from polynomial
roots (companion-matrix eigenvalues) rather than a floating-point GCD, and
each cancellation is accepted only if the function value is unchanged at a
handful of probe points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import PoleAtPoint, ZeroFunction

EPS_CANCEL = 1e-9
POLE_TOL = 1e-14
PROBE_TOL = 1e-7
# Fixed off-axis points; far from the real/imaginary axes where poles usually sit.
_PROBES = (0.37 + 1.13j, -0.61 + 0.79j, 1.21 - 0.43j)
_TRIM = 64 * np.finfo(float).eps


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.size == 0:
        return np.zeros(1)
    scale = np.max(np.abs(c))
    if scale == 0.0:
        return np.zeros(1)
    k = c.size
    while k > 1 and abs(c[k - 1]) <= _TRIM * scale:
        k -= 1
    return c[:k].copy()


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with ascending real coefficients; ``[0.0]`` is the zero polynomial."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        arr = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=float)
        if arr.ndim != 1:
            raise ValueError("polynomial coefficients must be one-dimensional")
        if arr.size == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        if not np.all(np.isfinite(arr)):
            raise ValueError("polynomial coefficients must be finite")
        object.__setattr__(self, "coeffs", tuple(float(x) for x in _trim(arr)))

    @property
    def c(self) -> np.ndarray:
        return np.array(self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    @property
    def lead(self) -> float:
        return self.coeffs[-1]

    def __call__(self, s):
        # Horner, highest coefficient first
        acc = 0.0 * s
        for a in reversed(self.coeffs):
            acc = acc * s + a
        return acc

    def magnitude_at(self, s) -> float:
        """Sum of |c_k| |s|^k, the natural scale for judging ``p(s)`` against zero."""
        r = abs(s)
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = acc * r + abs(a)
        return acc

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.roots(self.coeffs[::-1]).astype(complex)

    def __add__(self, other: Polynomial) -> Polynomial:
        return Polynomial(P.polyadd(self.c, other.c))

    def __mul__(self, other: Polynomial | float) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(P.polymul(self.c, other.c))
        return Polynomial(self.c * float(other))

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


ONE = Polynomial([1.0])
ZERO = Polynomial([0.0])


@dataclass(frozen=True)
class RationalFunction:
    """Ratio ``num/den`` of real polynomials.

    The constructor only checks that ``den`` is nonzero; use :func:`rf_simplify`
    (or any arithmetic operation, which simplifies its result) for the canonical
    form with monic denominator.
    """

    num: Polynomial
    den: Polynomial = ONE

    def __post_init__(self):
        if not isinstance(self.num, Polynomial):
            object.__setattr__(self, "num", Polynomial(self.num))
        if not isinstance(self.den, Polynomial):
            object.__setattr__(self, "den", Polynomial(self.den))
        if self.den.is_zero():
            raise ZeroFunction("denominator is the zero polynomial")

    @classmethod
    def const(cls, k: float) -> RationalFunction:
        return cls(Polynomial([k]), ONE)

    @classmethod
    def from_coeffs(cls, num: Sequence[float], den: Sequence[float] = (1.0,)) -> RationalFunction:
        return rf_simplify(cls(Polynomial(num), Polynomial(den)))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_proper(self) -> bool:
        return self.num.degree <= self.den.degree

    def __call__(self, s0):
        return rf_eval(self, s0)

    def __add__(self, other):
        return rf_add(self, _as_rf(other))

    __radd__ = __add__

    def __mul__(self, other):
        return rf_mul(self, _as_rf(other))

    __rmul__ = __mul__

    def reciprocal(self) -> RationalFunction:
        return rf_reciprocal(self)

    def to_json(self) -> dict:
        return {"num": list(self.num.coeffs), "den": list(self.den.coeffs)}

    @classmethod
    def from_json(cls, obj: dict) -> RationalFunction:
        return cls.from_coeffs(obj["num"], obj.get("den", [1.0]))

    def structurally_equal(self, other: RationalFunction) -> bool:
        return self.num.coeffs == other.num.coeffs and self.den.coeffs == other.den.coeffs


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    return RationalFunction.const(float(x))


def rf_eval(r: RationalFunction, s0: complex, pole_tol: float = POLE_TOL) -> complex:
    """Value of ``r`` at ``s0`` by Horner evaluation of both polynomials."""
    d = r.den(s0)
    if abs(d) <= pole_tol * r.den.magnitude_at(s0):
        raise PoleAtPoint(f"s0={s0!r} is a pole (|den|={abs(d):.3e})")
    return r.num(s0) / d


def _common_factor(p: Polynomial, q: Polynomial, eps: float) -> Polynomial:
    """Product of the linear/quadratic factors whose roots ``p`` and ``q`` share."""
    pr, qr = list(p.roots()), list(q.roots())
    f = ONE
    for z in qr:
        if z.imag < -1e-12 * max(1.0, abs(z)):
            continue
        if not pr:
            break
        dist = [abs(z - r) for r in pr]
        k = int(np.argmin(dist))
        if dist[k] > eps * max(1.0, abs(z)):
            continue
        pr.pop(k)
        if abs(z.imag) > 1e-12 * max(1.0, abs(z)):
            dist = [abs(np.conj(z) - r) for r in pr]
            if not dist:
                continue
            pr.pop(int(np.argmin(dist)))
        f = f * _factor_for(z)
    return f


def _exact_quotient(p: Polynomial, f: Polynomial, tol: float = 1e-9) -> Polynomial | None:
    q, rem = P.polydiv(p.c, f.c)
    if np.max(np.abs(rem)) > tol * np.max(np.abs(p.c)):
        return None
    return Polynomial(q)


def rf_add(a: RationalFunction, b: RationalFunction, eps_cancel: float = EPS_CANCEL) -> RationalFunction:
    """Sum over a common denominator.

    Factors shared by the two denominators enter the common denominator once,
    so repeated aggregation of similar terms does not manufacture multiple
    poles that later have to be cancelled against clustered zeros.
    """
    if a.den.coeffs == b.den.coeffs:
        return rf_simplify(RationalFunction(a.num + b.num, a.den), eps_cancel)
    f = _common_factor(a.den, b.den, eps_cancel)
    if f.degree > 0:
        a_rest = _exact_quotient(a.den, f)
        b_rest = _exact_quotient(b.den, f)
        if a_rest is not None and b_rest is not None:
            num = a.num * b_rest + b.num * a_rest
            return rf_simplify(RationalFunction(num, a.den * b_rest), eps_cancel)
    num = a.num * b.den + b.num * a.den
    return rf_simplify(RationalFunction(num, a.den * b.den), eps_cancel)


def rf_mul(a: RationalFunction, b: RationalFunction, eps_cancel: float = EPS_CANCEL) -> RationalFunction:
    return rf_simplify(RationalFunction(a.num * b.num, a.den * b.den), eps_cancel)


def rf_reciprocal(a: RationalFunction, eps_cancel: float = EPS_CANCEL) -> RationalFunction:
    if a.num.is_zero():
        raise ZeroFunction("cannot take the reciprocal of the zero function")
    return rf_simplify(RationalFunction(a.den, a.num), eps_cancel)


def _shares_root(z: complex, other_roots: np.ndarray, eps: float) -> bool:
    return bool(other_roots.size) and np.min(np.abs(other_roots - z)) <= eps * max(1.0, abs(z))


def _factor_for(z: complex) -> Polynomial:
    if abs(z.imag) <= 1e-12 * max(1.0, abs(z)):
        return Polynomial([-z.real, 1.0])
    return Polynomial([abs(z) ** 2, -2.0 * z.real, 1.0])


def _divide(p: Polynomial, f: Polynomial) -> Polynomial:
    q, _ = P.polydiv(p.c, f.c)
    return Polynomial(q)


def _agrees(orig: RationalFunction, cand: RationalFunction) -> bool:
    checked = 0
    for s in _PROBES:
        try:
            v0 = rf_eval(orig, s)
            v1 = rf_eval(cand, s)
        except PoleAtPoint:
            continue
        checked += 1
        if abs(v1 - v0) > PROBE_TOL * max(abs(v0), 1e-300):
            return False
    return checked > 0


def _monic(num: Polynomial, den: Polynomial) -> RationalFunction:
    lead = den.lead
    if lead == 1.0:
        return RationalFunction(num, den)
    d = den.c / lead
    d[-1] = 1.0  # exact, so a second pass is a no-op
    return RationalFunction(Polynomial(num.c / lead), Polynomial(d))


def rf_simplify(a: RationalFunction, eps_cancel: float = EPS_CANCEL) -> RationalFunction:
    """Cancel common factors and rescale so the denominator is monic.

    A root ``z`` of the numerator is treated as shared when a denominator root
    lies within ``eps_cancel * max(1, |z|)``. The corresponding real linear or
    conjugate quadratic factor is divided out of both polynomials, and the
    result is kept only if it matches the input at three probe points.
    """
    if a.num.is_zero():
        return RationalFunction(ZERO, ONE)
    num, den = a.num, a.den
    rejected: list[complex] = []
    while num.degree >= 1 and den.degree >= 1:
        zr = num.roots()
        pr = den.roots()
        found = None
        for z in sorted(zr, key=lambda r: (abs(r), r.imag)):
            if z.imag < 0 and abs(z.imag) > 1e-12 * max(1.0, abs(z)):
                continue  # handled through its conjugate
            if any(abs(z - r) <= 1e-12 * max(1.0, abs(z)) for r in rejected):
                continue
            if _shares_root(z, pr, eps_cancel):
                found = z
                break
        if found is None:
            break
        f = _factor_for(found)
        cand_num, cand_den = _divide(num, f), _divide(den, f)
        if cand_den.is_zero() or not _agrees(a, RationalFunction(cand_num, cand_den)):
            rejected.append(found)
            continue
        num, den = cand_num, cand_den
    return _monic(num, den)


def poles(r: RationalFunction) -> np.ndarray:
    return r.den.roots()


def zeros(r: RationalFunction) -> np.ndarray:
    return r.num.roots()


def integrator() -> RationalFunction:
    """The transfer function 1/s."""
    return RationalFunction(ONE, Polynomial([0.0, 1.0]))
