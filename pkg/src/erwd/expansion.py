"""Interaction-expansion coefficients of the walk, by exhaustive enumeration.

The walk's law differs from a Markov chain only through the cookie memory.
Expanding that memory one interaction at a time writes the velocity as

    v1 = beta/d + sum_{m>=2} sum_{N=1}^{m-1} (drift of the order-N,
                                              length-m coefficient)

where the order-N coefficient pi_m^(N)(x, y) sums over decompositions of a
length-m history into N+1 sub-walks: a single biased step from the origin,
then N sub-walks of j_1, ..., j_N kernel steps (j_l >= 0, sum j_l =
m - N - 1), each terminated by one interaction step whose weight is a
*difference* of kernels.  Each sub-walk's kernel carries the memory of the
previous sub-walk only: a site is fresh for sub-walk n unless it appears
in sub-walk n-1 (before its last point) or earlier in sub-walk n itself.

The interaction weight from site x with step s is

    -(beta + mu) (s . e1) / (2d)   if x was visited by the previous
                                   sub-walk's interior but not by the
                                   current one's,
    0                              otherwise,

so entries exist only for |y - x| = 1 and the two signs cancel in the sum
over y (coefficients are drift corrections, not probabilities).

Everything here is plain double-precision enumeration over the full path
tree with compensated accumulation; the closed-form bounds in ``bounds``
are verified against these sums in the tests, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Iterator, Sequence

from .bounds import pi_bound_from_order, pi_bound_order
from .errors import BudgetError, DomainError
from .greens import GreensTable
from .model import LatticePoint, WalkParams, unit_displacements

__all__ = [
    "ExpansionCoefficient",
    "expansion_coefficient",
    "delta_weight",
    "TruncatedSpeed",
    "partial_speed",
]

WORK_BUDGET_DEFAULT = 10**9


@dataclass
class ExpansionCoefficient:
    """One (m, N) coefficient: signed values per (x, y) site pair."""

    m: int
    N: int
    value_by_displacement: dict[tuple[LatticePoint, LatticePoint], float]

    @property
    def abs_total(self) -> float:
        return sum(abs(v) for v in self.value_by_displacement.values())

    @property
    def signed_drift(self) -> float:
        return sum(
            (y[0] - x[0]) * v for (x, y), v in self.value_by_displacement.items()
        )

    def sum_over_targets(self) -> dict[LatticePoint, float]:
        """Sum of values per interaction-start site x (zero in exact arithmetic)."""
        out: dict[LatticePoint, float] = {}
        for (x, _y), v in self.value_by_displacement.items():
            out[x] = out.get(x, 0.0) + v
        return out


def delta_weight(
    params: WalkParams,
    history_prev: Sequence[LatticePoint],
    history_cur: Sequence[LatticePoint],
    step: LatticePoint,
) -> float:
    """Kernel difference at the end of ``history_cur`` for the given step.

    ``history_prev`` is the previous sub-walk's full path; its last point
    must equal ``history_cur``'s first.  Returns the difference between the
    step weight with the concatenated memory and with ``history_cur``'s own
    memory alone.  Magnitude is (beta+mu)/(2d) or zero.
    """
    prev = [tuple(p) for p in history_prev]
    cur = [tuple(p) for p in history_cur]
    if not prev or not cur:
        raise DomainError("histories must be non-empty paths")
    if prev[-1] != cur[0]:
        raise DomainError(
            f"histories are not concatenable: previous ends at {prev[-1]}, "
            f"current starts at {cur[0]}"
        )
    step = tuple(step)
    if sum(abs(c) for c in step) != 1 or len(step) != params.d:
        raise DomainError(f"step {step!r} is not a unit lattice displacement")
    x = cur[-1]
    beta, mu = float(params.beta), float(params.mu)
    inv2d = 1.0 / (2 * params.d)
    fresh_without = x not in set(cur[:-1])
    fresh_with = fresh_without and x not in set(prev[:-1])
    a_with = beta if fresh_with else -mu
    a_without = beta if fresh_without else -mu
    return (a_with - a_without) * step[0] * inv2d


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _KahanMap:
    """Per-key compensated summation."""

    __slots__ = ("data",)

    def __init__(self):
        self.data: dict = {}

    def add(self, key, value: float) -> None:
        s, c = self.data.get(key, (0.0, 0.0))
        y = value - c
        t = s + y
        c = (t - s) - y
        self.data[key] = (t, c)

    def totals(self) -> dict:
        return {k: s for k, (s, c) in self.data.items() if s != 0.0}


def expansion_coefficient(
    params: WalkParams, m: int, N: int, budget: int = WORK_BUDGET_DEFAULT
) -> ExpansionCoefficient:
    """Enumerate the order-N coefficient over all length-m histories.

    Returns the zero coefficient when m < N + 1 (no valid decomposition).
    The work guard uses the coarse overcount (2d)^m * C(m, N).
    """
    params.require_walk_dimension()
    if N < 1:
        raise DomainError(f"insertion order N must be >= 1, got {N}")
    if m < 0:
        raise DomainError(f"history length m must be >= 0, got {m}")
    if m < N + 1:
        return ExpansionCoefficient(m=m, N=N, value_by_displacement={})
    d = params.d
    work = (2 * d) ** m * comb(m, N)
    if work > budget:
        raise BudgetError(
            f"expansion_coefficient(d={d}, m={m}, N={N}) needs ~{work:.2e} "
            f"work units, over the budget {budget:.0e}"
        )

    beta, mu = float(params.beta), float(params.mu)
    steps = unit_displacements(d)
    e1, me1 = steps[0], steps[1]
    inv2d = 1.0 / (2 * d)
    delta_mag = (beta + mu) * inv2d
    sums = _KahanMap()
    origin: LatticePoint = (0,) * d

    def run_sub_walk(n: int, js: tuple[int, ...], prev_interior: frozenset,
                     cur: list[LatticePoint], counts: dict, w: float) -> None:
        # walk j kernel steps, then place the interaction step
        j = js[n - 1]

        def extend(i: int, w2: float) -> None:
            q = cur[-1]
            if i == j:
                # interaction step from q: nonzero only if q is new to this
                # sub-walk but appeared in the previous one's interior
                if counts[q] == 1 and q in prev_interior:
                    for s, sign in ((e1, 1.0), (me1, -1.0)):
                        y = (q[0] + s[0],) + q[1:]
                        dw = -sign * delta_mag * w2
                        if n == N:
                            sums.add((q, y), dw)
                        else:
                            nxt_interior = frozenset(counts)
                            cur2 = [y]
                            counts2 = {y: 1}
                            run_sub_walk(n + 1, js, nxt_interior, cur2, counts2, dw)
                return
            fresh = counts[q] == 1 and q not in prev_interior
            a = beta if fresh else -mu
            for s in steps:
                w3 = w2 * (1.0 + a * s[0]) * inv2d
                if w3 == 0.0:
                    continue
                p = tuple(qc + sc for qc, sc in zip(q, s))
                cur.append(p)
                counts[p] = counts.get(p, 0) + 1
                extend(i + 1, w3)
                counts[p] -= 1
                if counts[p] == 0:
                    del counts[p]
                cur.pop()

        extend(0, w)

    for js in _compositions(m - N - 1, N):
        for s0 in steps:
            w0 = (1.0 + beta * s0[0]) * inv2d
            if w0 == 0.0:
                continue
            first = tuple(s0)
            run_sub_walk(1, js, frozenset((origin,)), [first], {first: 1}, w0)

    return ExpansionCoefficient(m=m, N=N, value_by_displacement=sums.totals())


@dataclass
class TruncatedSpeed:
    """beta/d plus all enumerated drift corrections, with a rigorous tail.

    ``tail_bound`` covers everything not enumerated: for each order
    N < m_max the closed-form order bound minus the mass actually computed
    (clipped at zero), plus the closed-form total over orders >= m_max.
    The true velocity lies within [value - tail_bound, value + tail_bound]
    whenever the expansion converges, i.e. (beta+mu) a_d < 1.
    """

    value: float
    tail_bound: float
    m_max: int
    drift_by_term: dict[tuple[int, int], float] = field(default_factory=dict)
    computed_abs_by_order: dict[int, float] = field(default_factory=dict)
    bound_by_order: dict[int, float] = field(default_factory=dict)

    def interval(self) -> tuple[float, float]:
        return (self.value - self.tail_bound, self.value + self.tail_bound)


def partial_speed(
    params: WalkParams,
    m_max: int,
    greens: GreensTable | None = None,
    budget: int = WORK_BUDGET_DEFAULT,
) -> TruncatedSpeed:
    """Velocity from all coefficients with m <= m_max, plus a tail bound."""
    params.require_walk_dimension()
    if params.d < 6:
        raise DomainError(
            f"the closed-form tail is only available for d >= 6, got d={params.d}"
        )
    if m_max < 1:
        raise DomainError(f"m_max must be >= 1, got {m_max}")
    beta, mu = float(params.beta), float(params.mu)
    value = beta / params.d
    if beta + mu == 0.0:
        return TruncatedSpeed(value=0.0, tail_bound=0.0, m_max=m_max)

    # convergence gate (raises DivergenceError when (beta+mu) a_d >= 1)
    pi_bound_from_order(params.d, 1, beta, mu, greens)

    drift_by_term: dict[tuple[int, int], float] = {}
    computed_abs: dict[int, float] = {}
    for m in range(2, m_max + 1):
        for N in range(1, m):
            coeff = expansion_coefficient(params, m, N, budget=budget)
            drift_by_term[(m, N)] = coeff.signed_drift
            value += coeff.signed_drift
            computed_abs[N] = computed_abs.get(N, 0.0) + coeff.abs_total

    bound_by_order: dict[int, float] = {}
    tail = 0.0
    for N in range(1, m_max):
        bound_by_order[N] = pi_bound_order(params.d, N, beta, mu, greens)
        tail += max(0.0, bound_by_order[N] - computed_abs.get(N, 0.0))
    tail += pi_bound_from_order(params.d, max(m_max, 2), beta, mu, greens) if m_max >= 2 \
        else pi_bound_from_order(params.d, 1, beta, mu, greens)
    return TruncatedSpeed(
        value=value,
        tail_bound=tail,
        m_max=m_max,
        drift_by_term=drift_by_term,
        computed_abs_by_order=computed_abs,
        bound_by_order=bound_by_order,
    )
