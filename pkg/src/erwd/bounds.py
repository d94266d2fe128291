"""Closed-form bounds on the expansion and the high-dimensional certificates.

Everything here is elementary arithmetic on Green's function values
G_{d-1}^{*n}(0) taken from a ``GreensTable``.  The structural constants

    E_i(d) = (d/(d-1))^(i+1) G_{d-1}^{*(i+1)} - 1
    a_d    = d G_{d-1}^{*2} / (d-1)^2
    eps(d) = 2d G_{d-1} G_{d-1}^{*3} / (d-1)^4 + E_1(d) G_{d-1}^{*2} / (d (d-1)^2)

control the expansion geometrically.  The total coefficient mass with
N interaction insertions is bounded by (beta+mu) E_0(d)/d for N = 1 and by
(beta+mu)^N G_{d-1} E_1(d) a_d^(N-2) / (d (d-1)) for N >= 2, summable
whenever (beta+mu) a_d < 1.  Three numeric certificates follow:

    continuity_d6:    2 a_d < 1           (valid from d = 6)
    positivity_d9:    2 E_0 + 4 G_{d-1} E_1 / ((d-1)(1 - 2 a_d)) < 1
    monotonicity_d12: sum of the three derivative bounds < 1

where the derivative bounds (rho, chi, gamma below) are evaluated at the
worst case beta = mu = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import DivergenceError, DomainError
from .greens import GreensTable, published_bounds_table

__all__ = [
    "StructuralConstants",
    "structural_constants",
    "PiBoundTotals",
    "pi_bound_totals",
    "pi_bound_order",
    "pi_bound_from_order",
    "DerivativeBounds",
    "derivative_bound_totals",
    "positivity_certificate_value",
    "CertificateVerdict",
    "certificates",
    "BoundReport",
    "bound_report",
    "default_greens_table",
]

_default_table = GreensTable()


def default_greens_table() -> GreensTable:
    """Shared table filled lazily by the integral route."""
    return _default_table


def _g(greens: GreensTable | None, d: int, n: int) -> float:
    if greens is None:
        return _default_table.ensure_integral(d, n).value
    entry = greens.get(d, n)
    if entry is None:
        raise DomainError(
            f"greens table lacks the (d={d}, n={n}) entry needed here"
        )
    return entry.value


@dataclass(frozen=True)
class StructuralConstants:
    d: int
    E0: float
    E1: float
    a_d: float
    epsilon_d: float  # inf when d < 8 (needs a finite third convolution power)


def structural_constants(d: int, greens: GreensTable | None = None) -> StructuralConstants:
    """E_0, E_1, a_d and eps(d) from Green's values in dimension d - 1.

    Requires d >= 6 (below that G_{d-1}^{*2} diverges and none of the
    geometric machinery exists).  eps(d) is set to inf for d in {6, 7}.
    """
    if d < 6:
        raise DivergenceError(
            f"structural constants undefined for d={d}: G_{d - 1}^(*2)(0) "
            "is finite only when d - 1 > 4"
        )
    g1 = _g(greens, d - 1, 1)
    g2 = _g(greens, d - 1, 2)
    r = d / (d - 1)
    E0 = r * g1 - 1.0
    E1 = r * r * g2 - 1.0
    a_d = d * g2 / (d - 1) ** 2
    if d - 1 > 6:
        g3 = _g(greens, d - 1, 3)
        epsilon_d = 2 * d * g1 * g3 / (d - 1) ** 4 + E1 * g2 / (d * (d - 1) ** 2)
    else:
        epsilon_d = math.inf
    return StructuralConstants(d=d, E0=E0, E1=E1, a_d=a_d, epsilon_d=epsilon_d)


class PiBoundTotals(NamedTuple):
    N1_term: float
    tail_total: float


def pi_bound_order(
    d: int, N: int, beta: float, mu: float, greens: GreensTable | None = None
) -> float:
    """Upper bound on the total coefficient mass at insertion order N."""
    if N < 1:
        raise DomainError(f"order N must be >= 1, got {N}")
    sc = structural_constants(d, greens)
    s = beta + mu
    if N == 1:
        return s * sc.E0 / d
    g1 = _g(greens, d - 1, 1)
    return s**N * g1 * sc.E1 * sc.a_d ** (N - 2) / (d * (d - 1))


def pi_bound_from_order(
    d: int, M: int, beta: float, mu: float, greens: GreensTable | None = None
) -> float:
    """Upper bound on the coefficient mass summed over all orders N >= M."""
    if M < 1:
        raise DomainError(f"order M must be >= 1, got {M}")
    sc = structural_constants(d, greens)
    s = beta + mu
    if s == 0:
        return 0.0
    ratio = s * sc.a_d
    if ratio >= 1:
        raise DivergenceError(
            f"(beta+mu) a_d = {ratio:.6f} >= 1: the geometric tail diverges"
        )
    g1 = _g(greens, d - 1, 1)
    geo = s**max(M, 2) * g1 * sc.E1 * sc.a_d ** (max(M, 2) - 2) / (d * (d - 1) * (1 - ratio))
    if M == 1:
        return s * sc.E0 / d + geo
    return geo


def pi_bound_totals(
    d: int, beta: float, mu: float, greens: GreensTable | None = None
) -> PiBoundTotals:
    """(order-1 term, closed-form total over orders >= 2)."""
    n1 = pi_bound_order(d, 1, beta, mu, greens)
    if beta + mu == 0:
        return PiBoundTotals(N1_term=0.0, tail_total=0.0)
    return PiBoundTotals(N1_term=n1, tail_total=pi_bound_from_order(d, 2, beta, mu, greens))


@dataclass(frozen=True)
class DerivativeBounds:
    rho_total: float
    chi_total: float
    gamma_total: float

    @property
    def grand_total(self) -> float:
        return self.rho_total + self.chi_total + self.gamma_total


def derivative_bound_totals(d: int, greens: GreensTable | None = None) -> DerivativeBounds:
    """The three derivative-control sums at the worst case beta = mu = 1.

    Requires 2 a_d < 1 and d >= 8 (eps(d) finite); their grand total below 1
    is the strict-monotonicity certificate.
    """
    sc = structural_constants(d, greens)
    if not math.isfinite(sc.epsilon_d):
        raise DivergenceError(
            f"derivative bounds need eps(d) finite, i.e. d - 1 > 6; got d={d}"
        )
    if 2 * sc.a_d >= 1:
        raise DomainError(
            f"hypothesis 2 a_d < 1 violated at d={d}: 2 a_d = {2 * sc.a_d:.6f}"
        )
    g1 = _g(greens, d - 1, 1)
    g2 = _g(greens, d - 1, 2)
    g3 = _g(greens, d - 1, 3)
    one = 1.0 - 2.0 * sc.a_d
    rho = 2.0 * sc.E0 / d + 4.0 * g1 * sc.E1 / (d * (d - 1) * one)
    chi = sc.E0 + 2.0 * g1 * sc.E1 * (2.0 - 2.0 * sc.a_d) / ((d - 1) * one**2)
    gamma = (
        2.0 * d * g2 / (d - 1) ** 2
        + 4.0 * sc.epsilon_d * d / one
        + 16.0 * d * sc.E1 * g1 * g3 / ((d - 1) ** 4 * one**2)
    )
    return DerivativeBounds(rho_total=rho, chi_total=chi, gamma_total=gamma)


def positivity_certificate_value(d: int, greens: GreensTable | None = None) -> float:
    """d times the full-drive coefficient mass bound: d (N1 + tail) at beta=mu=1.

    Equals 2 E_0 + 4 G_{d-1} E_1 / ((d-1)(1 - 2 a_d)); below 1 it certifies
    that the expansion correction cannot overturn the first-order drift.
    """
    totals = pi_bound_totals(d, 1.0, 1.0, greens)
    return d * (totals.N1_term + totals.tail_total)


@dataclass(frozen=True)
class CertificateVerdict:
    name: str
    passed: bool
    value: float | None
    margin: float | None
    detail: str

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.value is None:
            return f"{self.name}: {status} ({self.detail})"
        return f"{self.name}: {status} value={self.value:.6g} margin={self.margin:.6g}"


def _verdict(name: str, compute) -> CertificateVerdict:
    try:
        value = compute()
    except (DivergenceError, DomainError) as exc:
        return CertificateVerdict(name=name, passed=False, value=None, margin=None,
                                  detail=str(exc))
    return CertificateVerdict(
        name=name,
        passed=value < 1.0,
        value=value,
        margin=1.0 - value,
        detail="strict inequality value < 1",
    )


def certificates(d: int, greens: GreensTable | None = None) -> dict[str, CertificateVerdict]:
    """The three certificate verdicts at dimension d, with margins.

    Small d yields failing verdicts carrying a divergence note instead of
    raising; the certificates are genuinely high-dimensional.
    """
    return {
        "continuity_d6": _verdict(
            "continuity_d6", lambda: 2.0 * structural_constants(d, greens).a_d
        ),
        "positivity_d9": _verdict(
            "positivity_d9", lambda: positivity_certificate_value(d, greens)
        ),
        "monotonicity_d12": _verdict(
            "monotonicity_d12", lambda: derivative_bound_totals(d, greens).grand_total
        ),
    }


@dataclass
class BoundReport:
    d: int
    beta: float
    mu: float
    E0: float = math.inf
    E1: float = math.inf
    a_d: float = math.inf
    epsilon_d: float = math.inf
    pi_total_N1: float = math.inf
    pi_total_tail: float = math.inf
    rho_total: float = math.inf
    chi_total: float = math.inf
    gamma_total: float = math.inf
    certificates: dict[str, CertificateVerdict] = field(default_factory=dict)
    divergent: list[str] = field(default_factory=list)

    @property
    def grand_total(self) -> float:
        return self.rho_total + self.chi_total + self.gamma_total

    def to_dict(self) -> dict:
        def f(x: float):
            return x if math.isfinite(x) else "divergent"

        return {
            "d": self.d,
            "beta": self.beta,
            "mu": self.mu,
            "E0": f(self.E0),
            "E1": f(self.E1),
            "a_d": f(self.a_d),
            "epsilon_d": f(self.epsilon_d),
            "pi_total_N1": f(self.pi_total_N1),
            "pi_total_tail": f(self.pi_total_tail),
            "rho_total": f(self.rho_total),
            "chi_total": f(self.chi_total),
            "gamma_total": f(self.gamma_total),
            "grand_total": f(self.grand_total),
            "divergent": sorted(self.divergent),
            "certificates": {
                name: {
                    "passed": v.passed,
                    "value": v.value,
                    "margin": v.margin,
                    "detail": v.detail,
                }
                for name, v in self.certificates.items()
            },
        }


def bound_report(
    d: int, beta: float = 1.0, mu: float = 1.0, greens: GreensTable | None = None
) -> BoundReport:
    """Assemble every bound and certificate, marking divergent pieces."""
    report = BoundReport(d=d, beta=beta, mu=mu)
    try:
        sc = structural_constants(d, greens)
        report.E0, report.E1, report.a_d = sc.E0, sc.E1, sc.a_d
        report.epsilon_d = sc.epsilon_d
        if not math.isfinite(sc.epsilon_d):
            report.divergent.append("epsilon_d")
    except (DivergenceError, DomainError) as exc:
        report.divergent.extend(["E0", "E1", "a_d", "epsilon_d", str(exc)])
    try:
        totals = pi_bound_totals(d, beta, mu, greens)
        report.pi_total_N1, report.pi_total_tail = totals
    except (DivergenceError, DomainError):
        report.divergent.append("pi_totals")
    try:
        der = derivative_bound_totals(d, greens)
        report.rho_total = der.rho_total
        report.chi_total = der.chi_total
        report.gamma_total = der.gamma_total
    except (DivergenceError, DomainError):
        report.divergent.append("derivative_totals")
    report.certificates = certificates(d, greens)
    return report


def grand_total_with_published(d: int = 12) -> float:
    """Grand derivative total evaluated on the published upper bounds."""
    return derivative_bound_totals(d, published_bounds_table()).grand_total
