"""Order-4 ODEs in theta = z d/dz and their Frobenius period basis.

An operator L = sum_k a_k(z) theta^k with polynomial coefficients and a
quadruple indicial root at z = 0 (maximal unipotent monodromy) has a
four-dimensional solution space with log degrees 0..3.  The basis is
normalized so that

    omega_0 = 1 + O(z)            (holomorphic, no logs)
    omega_k = omega_0 log^k z / k! + lower log-degree corrections,

where every correction series vanishes at z = 0.  This normalization is
unique and is solved term by term over exact rationals.

The recurrence works in the jet ring Q[lam]/(lam^4): the coefficient
functions c_n(lam) of the deformed solution z^lam * sum c_n(lam) z^n are
carried to third order in lam, and the four basis elements are read off
as the lam-Taylor coefficients of z^lam * sum c_n(lam) z^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, NotMUM, ResonanceFailure
from .series import LogSeries, format_rational, parse_rational

Poly = tuple[Fraction, ...]  # ascending z-coefficients

_JET_LEN = 4  # work modulo lam^4


def _poly(coeffs) -> Poly:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _poly_at_zero(p: Poly) -> Fraction:
    return p[0] if p else Fraction(0)


# jets: tuples of 4 Fractions, coefficients of lam^0..lam^3
def _jet_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _jet_scale(u, c):
    return tuple(a * c for a in u)


def _jet_mul(u, v):
    out = [Fraction(0)] * _JET_LEN
    for i in range(_JET_LEN):
        if u[i] == 0:
            continue
        for j in range(_JET_LEN - i):
            out[i + j] += u[i] * v[j]
    return tuple(out)


def _jet_inv_quartic(n: int, lead: Fraction):
    """Inverse of lead*(lam+n)^4 in Q[lam]/(lam^4), n >= 1."""
    if n == 0 or lead == 0:
        raise ResonanceFailure("recurrence pivot vanished")
    nf = Fraction(n)
    base = (nf ** -4, -4 * nf ** -5, 10 * nf ** -6, -20 * nf ** -7)
    return _jet_scale(base, 1 / lead)


@dataclass(frozen=True)
class PFOperator:
    """L = sum_{k=0}^{4} a_k(z) theta^k, normalized to a_4(0) = 1."""

    coefficients: tuple[Poly, Poly, Poly, Poly, Poly]
    singular_radius: Fraction

    def __post_init__(self):
        if len(self.coefficients) != 5:
            raise DomainError("operator must have theta-degree exactly 4")
        coeffs = tuple(_poly(c) for c in self.coefficients)
        lead = _poly_at_zero(coeffs[4])
        if lead == 0:
            raise NotMUM("a_4(0) = 0; operator is singular at z = 0")
        if lead != 1:
            coeffs = tuple(tuple(c / lead for c in p) for p in coeffs)
        object.__setattr__(self, "coefficients", coeffs)
        radius = Fraction(self.singular_radius)
        if radius <= 0:
            raise DomainError("singular_radius must be positive")
        object.__setattr__(self, "singular_radius", radius)

    @property
    def z_degree(self) -> int:
        return max((len(p) - 1 for p in self.coefficients if p), default=0)

    def indicial_polynomial(self) -> Poly:
        """Coefficients of the indicial polynomial at z = 0."""
        return _poly(_poly_at_zero(p) for p in self.coefficients)

    def is_mum(self) -> bool:
        return self.indicial_polynomial() == (Fraction(0),) * 4 + (Fraction(1),)

    def _theta_poly_jet(self, j: int, shift: int):
        """Jet of P_j(lam + shift) where P_j(x) = sum_k a_k[j] x^k."""
        res = (Fraction(0),) * _JET_LEN
        xpow = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        x = (Fraction(shift), Fraction(1), Fraction(0), Fraction(0))
        for k in range(5):
            p = self.coefficients[k]
            if j < len(p) and p[j] != 0:
                res = _jet_add(res, _jet_scale(xpow, p[j]))
            if k < 4:
                xpow = _jet_mul(xpow, x)
        return res

    def apply(self, s: LogSeries) -> LogSeries:
        """Apply the operator to a series, truncation preserved."""
        result = LogSeries.zero(order=s.order)
        power = s
        for k in range(5):
            if k > 0:
                power = power.theta()
            for j, c in enumerate(self.coefficients[k]):
                if c != 0:
                    result = result + c * power.shift(j)
        return result

    def to_json(self) -> dict:
        return {
            "coefficients": [[format_rational(c) for c in p]
                             for p in self.coefficients],
            "singular_radius": format_rational(self.singular_radius),
        }

    @classmethod
    def from_json(cls, obj) -> "PFOperator":
        coeffs = tuple(_poly(parse_rational(c) for c in p)
                       for p in obj["coefficients"])
        if len(coeffs) != 5:
            raise DomainError("operator JSON must list a_0..a_4")
        return cls(coeffs, parse_rational(obj["singular_radius"]))


def apply_operator(op: PFOperator, s: LogSeries) -> LogSeries:
    return op.apply(s)


def check_mum(op: PFOperator) -> tuple[bool, Poly]:
    """Whether the indicial polynomial at 0 is lam^4, and the polynomial."""
    ind = op.indicial_polynomial()
    return ind == (Fraction(0),) * 4 + (Fraction(1),), ind


@dataclass(frozen=True)
class PeriodBasis:
    """Normalized Frobenius basis omega_0..omega_3 at the MUM point."""

    omegas: tuple[LogSeries, LogSeries, LogSeries, LogSeries]
    operator: PFOperator
    order: Fraction

    @property
    def omega0(self) -> LogSeries:
        return self.omegas[0]

    @property
    def omega1(self) -> LogSeries:
        return self.omegas[1]

    @property
    def sigma1(self) -> LogSeries:
        """Log-free correction in omega_1 = omega_0 log z + sigma_1.

        This is the series entering the mirror map z exp(sigma1/omega0);
        it has no constant term by the basis normalization.
        """
        return self.omegas[1] - self.omegas[0] * LogSeries.log_z()


def frobenius_solve(op: PFOperator, order: int) -> PeriodBasis:
    """Solve for the unique normalized period basis modulo z^order."""
    ok, ind = check_mum(op)
    if not ok:
        pretty = " + ".join(f"{format_rational(c)}*lam^{k}"
                            for k, c in enumerate(ind) if c != 0) or "0"
        raise NotMUM(f"indicial polynomial is {pretty}, not lam^4")
    n_terms = math.ceil(Fraction(order))
    if n_terms < 1:
        raise DomainError("order must be at least 1")
    maxj = op.z_degree
    jets = [(Fraction(1), Fraction(0), Fraction(0), Fraction(0))]
    for n in range(1, n_terms):
        acc = (Fraction(0),) * _JET_LEN
        for j in range(1, min(n, maxj) + 1):
            pj = op._theta_poly_jet(j, n - j)
            acc = _jet_add(acc, _jet_mul(pj, jets[n - j]))
        inv = _jet_inv_quartic(n, Fraction(1))
        jets.append(_jet_scale(_jet_mul(acc, inv), Fraction(-1)))
    # f_i(z) = sum_n c_{n,i} z^n; omega_k = sum_{j<=k} f_{k-j} log^j z / j!
    order = Fraction(order)
    omegas = []
    for k in range(4):
        terms = {}
        for j in range(k + 1):
            fac = Fraction(1, math.factorial(j))
            for n in range(n_terms):
                c = jets[n][k - j]
                if c != 0:
                    key = (Fraction(n), j)
                    terms[key] = terms.get(key, Fraction(0)) + fac * c
        omegas.append(LogSeries(terms, order=order))
    return PeriodBasis(tuple(omegas), op, order)
