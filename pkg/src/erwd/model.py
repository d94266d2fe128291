"""Excited random walk with opposing drifts: exact step law and seeded sampling.

The walk lives on the d-dimensional integer lattice.  Every site initially
holds a cookie.  When the walk sits at a site that still has its cookie
(a "fresh" site, never visited before), the next nearest-neighbour step is
biased by +beta/d along the first coordinate; at a site whose cookie is
already eaten the bias is -mu/d.  Steps orthogonal to the first coordinate
always have probability 1/(2d).  The origin is fresh at time 0, so the
very first step always uses the beta branch.

This module is the slow, transparent reference implementation: walks are
explicit Python objects, one step at a time.  The Monte Carlo estimator
uses a compiled twin of the same process (see ``_kernels``) whose law is
tested against this one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

from .errors import BudgetError, DomainError
from .rng import Pcg32

LatticePoint = tuple[int, ...]

# run_walk packs coordinates into 21-bit fields for hashing, so walks are
# capped at a coordinate range of +-(2^20 - 1)
MAX_STEPS = (1 << 20) - 1


@dataclass(frozen=True)
class WalkParams:
    """Model parameters: dimension d, fresh-site bias beta, stale-site bias mu.

    beta and mu may be any real type in [0, 1] (floats for simulation,
    ``fractions.Fraction`` for the exact enumeration routines).
    d >= 1 suffices for the step kernel; the walk routines require d >= 2.
    """

    d: int
    beta: Real
    mu: Real

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.d!r}")
        for name, val in (("beta", self.beta), ("mu", self.mu)):
            if not isinstance(val, Real):
                raise DomainError(f"{name} must be a real number, got {type(val).__name__}")
            if not 0 <= val <= 1:
                raise DomainError(f"{name} must lie in [0, 1], got {val!r}")

    def require_walk_dimension(self) -> None:
        if self.d < 2:
            raise DomainError(
                f"d={self.d} unsupported here: the three-step identities and the "
                "walk routines need at least 2(d-1) >= 2 orthogonal directions"
            )


class CookieField:
    """Cookie environment: a finite set of sites whose cookie has been eaten.

    Every site outside ``visited`` still holds its cookie.  Membership is an
    exact set lookup.
    """

    __slots__ = ("visited",)

    def __init__(self, visited: Iterable[LatticePoint] = ()):
        self.visited: set[LatticePoint] = set(map(tuple, visited))

    def has_cookie(self, site: LatticePoint) -> bool:
        return site not in self.visited

    def eat(self, site: LatticePoint) -> None:
        self.visited.add(site)

    def copy(self) -> "CookieField":
        return CookieField(self.visited)

    def __contains__(self, site: LatticePoint) -> bool:
        return site in self.visited

    def __len__(self) -> int:
        return len(self.visited)

    def __repr__(self) -> str:
        return f"CookieField(eaten={len(self.visited)} sites)"


def unit_displacements(d: int) -> list[LatticePoint]:
    """The 2d unit steps, ordered +e1, -e1, +e2, -e2, ..."""
    out = []
    for axis in range(d):
        for sign in (1, -1):
            e = [0] * d
            e[axis] = sign
            out.append(tuple(e))
    return out


@dataclass
class StepDistribution:
    """One-step law of the walk at a site with the given cookie state."""

    probs: dict[LatticePoint, Fraction]

    def prob(self, step: LatticePoint) -> Fraction:
        return self.probs.get(tuple(step), Fraction(0))

    def as_floats(self) -> dict[LatticePoint, float]:
        return {s: float(p) for s, p in self.probs.items()}


def step_distribution(params: WalkParams, has_cookie: bool) -> StepDistribution:
    """Exact one-step law: drift +beta (cookie) or -mu (no cookie) on the e1 axis.

    p(+e1) = (1 + a)/(2d), p(-e1) = (1 - a)/(2d) with a = beta or -mu, and
    1/(2d) for each of the 2(d-1) orthogonal steps.
    """
    d = params.d
    a = Fraction(params.beta) if has_cookie else -Fraction(params.mu)
    inv2d = Fraction(1, 2 * d)
    probs: dict[LatticePoint, Fraction] = {}
    for step in unit_displacements(d):
        probs[step] = (1 + a * step[0]) * inv2d
    return StepDistribution(probs)


@dataclass
class Trajectory:
    """A sampled walk: start site, unit steps, and the running first coordinate.

    ``first_coord_path[t]`` is the first coordinate after t steps, so the
    list has length ``len(steps) + 1`` and starts at ``start[0]``.
    """

    start: LatticePoint
    steps: list[LatticePoint]
    first_coord_path: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.first_coord_path:
            x = self.start[0]
            path = [x]
            for s in self.steps:
                x += s[0]
                path.append(x)
            self.first_coord_path = path

    @property
    def n_steps(self) -> int:
        return len(self.steps)

    @property
    def endpoint(self) -> LatticePoint:
        pos = list(self.start)
        for s in self.steps:
            for i, c in enumerate(s):
                pos[i] += c
        return tuple(pos)

    def positions(self) -> list[LatticePoint]:
        out = [self.start]
        pos = list(self.start)
        for s in self.steps:
            for i, c in enumerate(s):
                pos[i] += c
            out.append(tuple(pos))
        return out


def _draw_step(params: WalkParams, has_cookie: bool, u: float) -> LatticePoint:
    """Map one uniform in [0,1) to a step; same bin layout as the fast kernel."""
    d = params.d
    a = float(params.beta) if has_cookie else -float(params.mu)
    v = u * (2 * d)
    e = [0] * d
    if v < 1.0 + a:
        e[0] = 1
    elif v < 2.0:
        e[0] = -1
    else:
        b = int(v) - 2  # 0 .. 2d-3, safe: v < 2d
        axis = 1 + (b >> 1)
        e[axis] = -1 if (b & 1) else 1
    return tuple(e)


def sample_step(
    params: WalkParams,
    cookie_field: CookieField,
    position: LatticePoint,
    rng: Pcg32,
) -> LatticePoint:
    """Draw one step from the current site and mark the site as visited.

    The step uses the cookie state of ``position`` *before* the move (the
    origin therefore always steps with the beta branch on a fresh field).
    ``cookie_field`` and ``rng`` are updated in place; the new position is
    returned.
    """
    has_cookie = cookie_field.has_cookie(position)
    step = _draw_step(params, has_cookie, rng.uniform())
    cookie_field.eat(position)
    return tuple(p + s for p, s in zip(position, step))


def run_walk(params: WalkParams, n_steps: int, seed: int) -> Trajectory:
    """Sample a full trajectory of ``n_steps`` steps from a fresh environment."""
    params.require_walk_dimension()
    if n_steps < 0:
        raise DomainError(f"n_steps must be >= 0, got {n_steps}")
    if n_steps > MAX_STEPS:
        raise BudgetError(
            f"n_steps={n_steps} exceeds the supported maximum {MAX_STEPS} "
            "(coordinate packing range)"
        )
    rng = Pcg32(seed)
    fld = CookieField()
    origin: LatticePoint = (0,) * params.d
    pos = origin
    steps: list[LatticePoint] = []
    first = [0]
    for _ in range(n_steps):
        new = sample_step(params, fld, pos, rng)
        steps.append(tuple(n - p for n, p in zip(new, pos)))
        first.append(new[0])
        pos = new
    return Trajectory(start=origin, steps=steps, first_coord_path=first)


def path_probability(params: WalkParams, steps: Sequence[LatticePoint]) -> Fraction:
    """Exact probability of observing the given step sequence from time 0.

    Product of the one-step kernels with the visited set grown online;
    the independent check used by the empirical-law tests.
    """
    params.require_walk_dimension()
    fld = CookieField()
    pos: LatticePoint = (0,) * params.d
    prob = Fraction(1)
    for s in steps:
        dist = step_distribution(params, fld.has_cookie(pos))
        p = dist.prob(s)
        if p == 0:
            return Fraction(0)
        prob *= p
        fld.eat(pos)
        pos = tuple(a + b for a, b in zip(pos, s))
    return prob
