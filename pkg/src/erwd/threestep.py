"""Exact three-step law of the walk, in rational arithmetic.

For an arbitrary cookie environment the distribution of the first
coordinate after three steps has a closed form: each displacement
k in {-3,...,3} is a polynomial in the per-site step weights

    up(x)   = 1 - mu + (beta + mu) * I(cookie at x)    (rightward factor)
    down(x) = 1 + mu - (beta + mu) * I(cookie at x)    (leftward factor)

divided by (2d)^3, where sites visited *during* the three steps switch to
the no-cookie branch online.  ``three_step_distribution`` evaluates that
closed form; ``brute_force_three_step`` independently enumerates all
(2d)^3 paths.  Both are exact (``fractions.Fraction``), and their
agreement is a test oracle, not an assumption.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import DomainError
from .model import CookieField, LatticePoint, WalkParams, unit_displacements

__all__ = [
    "ThreeStepLaw",
    "three_step_distribution",
    "brute_force_three_step",
    "monotonicity_in_cookie",
    "CookieMonotonicityReport",
]


@dataclass
class ThreeStepLaw:
    """Law of the first coordinate after three steps; exact rationals."""

    probs: dict[int, Fraction]
    mean_first_coord: Fraction

    def prob(self, k: int) -> Fraction:
        return self.probs.get(k, Fraction(0))

    def upper_tail(self, j: int) -> Fraction:
        """P(displacement >= j)."""
        return sum((p for k, p in self.probs.items() if k >= j), Fraction(0))

    def cdf(self) -> list[Fraction]:
        """Cumulative probabilities for k = -3..3 (length 7, last entry 1)."""
        acc = Fraction(0)
        out = []
        for k in range(-3, 4):
            acc += self.prob(k)
            out.append(acc)
        return out


def _add(a: LatticePoint, b: LatticePoint) -> LatticePoint:
    return tuple(x + y for x, y in zip(a, b))


def _as_law(scaled: dict[int, Fraction], d: int) -> ThreeStepLaw:
    den = Fraction((2 * d) ** 3)
    probs = {k: v / den for k, v in scaled.items()}
    total = sum(probs.values())
    if total != 1:
        raise AssertionError(f"three-step law does not normalize: sum = {total}")
    mean = sum((Fraction(k) * p for k, p in probs.items()), Fraction(0))
    return ThreeStepLaw(probs=probs, mean_first_coord=mean)


def three_step_distribution(params: WalkParams, field: CookieField | None = None) -> ThreeStepLaw:
    """Closed-form law of the first coordinate after three steps.

    ``field`` lists the initially eaten sites (default: full cookies).  The
    mass at displacement 0 is computed as one minus the six explicit terms.
    """
    params.require_walk_dimension()
    d = params.d
    beta, mu = Fraction(params.beta), Fraction(params.mu)
    eaten = field.visited if field is not None else set()

    def up(x: LatticePoint) -> Fraction:
        return 1 - mu + (beta + mu) * (0 if x in eaten else 1)

    def down(x: LatticePoint) -> Fraction:
        return 1 + mu - (beta + mu) * (0 if x in eaten else 1)

    origin: LatticePoint = (0,) * d
    e1 = tuple([1] + [0] * (d - 1))
    me1 = tuple([-1] + [0] * (d - 1))
    perp = [s for s in unit_displacements(d) if s[0] == 0]
    q = 2 * d - 2  # number of orthogonal directions

    # two-step orthogonal excursions from a site that do not return to it;
    # kept as a multiset because distinct step pairs can land on one site
    perp2 = [_add(u, v) for u in perp for v in perp if _add(u, v) != origin]

    scaled: dict[int, Fraction] = {}
    scaled[3] = up(origin) * up(e1) * up(_add(e1, e1))
    scaled[-3] = down(origin) * down(me1) * down(_add(me1, me1))
    # |k| = 2: one orthogonal step at the end, in the middle, or at the start
    scaled[2] = (
        up(origin) * up(e1) * q
        + up(origin) * sum(up(_add(e1, u)) for u in perp)
        + sum(up(u) * up(_add(u, e1)) for u in perp)
    )
    scaled[-2] = (
        down(origin) * down(me1) * q
        + down(origin) * sum(down(_add(me1, u)) for u in perp)
        + sum(down(u) * down(_add(u, me1)) for u in perp)
    )
    # k = +1: net one right step; self-revisits inside the block use the
    # eaten branch regardless of the initial field (1 -+ mu factors)
    scaled[1] = (
        up(origin) * up(e1) * down(_add(e1, e1))
        + up(origin) * down(e1) * (1 - mu)
        + down(origin) * up(me1) * (1 - mu)
        + up(origin) * q * q
        + sum(up(u) for u in perp) * q
        + q * (1 - mu)
        + sum(up(v) for v in perp2)
    )
    scaled[-1] = (
        down(origin) * down(me1) * up(_add(me1, me1))
        + down(origin) * up(me1) * (1 + mu)
        + up(origin) * down(e1) * (1 + mu)
        + down(origin) * q * q
        + sum(down(u) for u in perp) * q
        + q * (1 + mu)
        + sum(down(v) for v in perp2)
    )
    scaled[0] = Fraction((2 * d) ** 3) - sum(scaled.values())
    return _as_law(scaled, d)


def brute_force_three_step(params: WalkParams, field: CookieField | None = None) -> ThreeStepLaw:
    """Independent oracle: enumerate all (2d)^3 three-step paths exactly."""
    params.require_walk_dimension()
    d = params.d
    beta, mu = Fraction(params.beta), Fraction(params.mu)
    eaten = field.visited if field is not None else set()
    steps = unit_displacements(d)
    origin: LatticePoint = (0,) * d
    scaled: dict[int, Fraction] = {k: Fraction(0) for k in range(-3, 4)}
    for s1, s2, s3 in product(steps, repeat=3):
        pos = origin
        seen: set[LatticePoint] = set()
        w = Fraction(1)
        for s in (s1, s2, s3):
            fresh = pos not in seen and pos not in eaten
            a = beta if fresh else -mu
            w *= 1 + a * s[0]
            seen.add(pos)
            pos = _add(pos, s)
        scaled[pos[0]] += w
    return _as_law(scaled, d)


@dataclass
class CookieMonotonicityReport:
    """Effect of one cookie on the three-step sign probabilities.

    ``delta_positive`` = P(displacement > 0 | cookie at x) - P(... | no cookie),
    and similarly ``delta_negative`` for displacement < 0.  Adding a cookie
    can only help the walk move right, so the first is >= 0 and the second
    <= 0; both are checked exactly.
    """

    site: LatticePoint
    p_positive_with: Fraction
    p_positive_without: Fraction
    p_negative_with: Fraction
    p_negative_without: Fraction

    @property
    def delta_positive(self) -> Fraction:
        return self.p_positive_with - self.p_positive_without

    @property
    def delta_negative(self) -> Fraction:
        return self.p_negative_with - self.p_negative_without


def monotonicity_in_cookie(
    params: WalkParams, field: CookieField | None, x: LatticePoint
) -> CookieMonotonicityReport:
    """Compare the three-step sign probabilities with and without a cookie at x.

    All other sites keep the state given by ``field``.  Sites farther than
    graph distance 2 from the origin are never stepped *from* within three
    steps, so their cookie cannot matter and both deltas are zero.
    """
    params.require_walk_dimension()
    x = tuple(x)
    if len(x) != params.d:
        raise DomainError(f"site {x!r} has dimension {len(x)}, expected {params.d}")
    base = field.visited if field is not None else set()

    with_cookie = CookieField(base - {x})
    without_cookie = CookieField(base | {x})
    law_with = three_step_distribution(params, with_cookie)
    law_without = three_step_distribution(params, without_cookie)

    report = CookieMonotonicityReport(
        site=x,
        p_positive_with=law_with.upper_tail(1),
        p_positive_without=law_without.upper_tail(1),
        p_negative_with=1 - law_with.upper_tail(0),
        p_negative_without=1 - law_without.upper_tail(0),
    )
    assert report.delta_positive >= 0, (
        f"P(>0) decreased when adding a cookie at {x}: {report.delta_positive}"
    )
    assert report.delta_negative <= 0, (
        f"P(<0) increased when adding a cookie at {x}: {report.delta_negative}"
    )
    return report
