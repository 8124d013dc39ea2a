"""Empirical certification of perfect secrecy by exhaustive counting.

The security claim for every scheme is exact: the tuple of shares seen
by any l colluding servers has a distribution (over the uniform random
keys) that is *identical* for every value of the secret inputs.  Over a
tiny field this is checkable by brute force: enumerate every input and
every key assignment, histogram the colluders' view, and compare
histograms with integer equality — no sampling, no tolerance.

A verdict of "perfect" means total-variation distance exactly 0 on
every collusion set.  The boundary audit repeats the check with sets of
size l+1, where a sound scheme is *expected* to leak; it serves as a
negative control that the auditor can actually detect leakage.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .errors import AuditBudgetError
from .field import PrimeField, smallest_prime_above
from .linalg import FieldMatrix
from .schemes import (
    ALIGNED,
    ONE_SIDED,
    SchemePlan,
    encode_with_keys,
    plan_aligned_8_1,
    plan_fully_secure,
    plan_one_sided,
)

DEFAULT_BUDGET = 10_000_000

# A view is whatever one server receives, flattened to something
# hashable; a colluder observation is the tuple of views over the set.
ViewMap = Callable[[object, object], Sequence[object]]


@dataclass(frozen=True)
class SetVerdict:
    """Outcome for one collusion set."""

    indices: tuple[int, ...]
    verdict: str  # "perfect" | "leaky"
    max_tv: Fraction
    witness: Optional[tuple[str, str]]  # distinguishable input pair, if leaky


@dataclass(frozen=True)
class AuditReport:
    scheme_id: str
    field_size: int
    dims: str
    collusion_size: int
    negative_control: bool
    states_per_set: int
    set_verdicts: tuple[SetVerdict, ...]

    @property
    def sets_checked(self) -> int:
        return len(self.set_verdicts)

    @property
    def all_perfect(self) -> bool:
        return all(v.verdict == "perfect" for v in self.set_verdicts)

    @property
    def any_leaky(self) -> bool:
        return any(v.verdict == "leaky" for v in self.set_verdicts)

    @property
    def max_tv(self) -> Fraction:
        return max((v.max_tv for v in self.set_verdicts), default=Fraction(0))

    def passed(self) -> bool:
        """Did the audit meet its expectation?

        Ordinary audits expect perfect secrecy; the boundary audit
        (negative control) expects at least one leaky set.
        """
        if self.negative_control:
            return self.any_leaky
        return self.all_perfect

    def to_text(self) -> str:
        expect = "leaky (negative control)" if self.negative_control else "perfect"
        lines = [
            f"audit {self.scheme_id} q={self.field_size} dims {self.dims}",
            f"collusion size {self.collusion_size}, {self.sets_checked} sets, "
            f"{self.states_per_set} states per set, expecting {expect}",
        ]
        for v in self.set_verdicts:
            idx = ",".join(str(i) for i in v.indices)
            line = f"  set {{{idx}}}: {v.verdict} tv={v.max_tv}"
            if v.witness is not None:
                line += f" witness: {v.witness[0]} vs {v.witness[1]}"
            lines.append(line)
        lines.append(f"result: {'PASS' if self.passed() else 'FAIL'}")
        return "\n".join(lines) + "\n"

    def to_records(self) -> str:
        """Machine-readable: one 'indices;verdict;tv' line per set."""
        return "".join(
            f"{','.join(str(i) for i in v.indices)};{v.verdict};{v.max_tv}\n"
            for v in self.set_verdicts
        )


def _tv_distance(h1: Counter, h2: Counter, total: int) -> Fraction:
    keys = set(h1) | set(h2)
    diff = sum(abs(h1.get(k, 0) - h2.get(k, 0)) for k in keys)
    return Fraction(diff, 2 * total)


def audit_views(
    view_map: ViewMap,
    secrets: Callable[[], Iterator],
    keys: Callable[[], Iterator],
    n_secrets: int,
    n_keys: int,
    n_servers: int,
    collusion_size: int,
    *,
    scheme_id: str,
    field_size: int,
    dims: str,
    budget: int = DEFAULT_BUDGET,
    negative_control: bool = False,
    stop_at_first_leak: bool = False,
    describe: Callable[[object], str] = repr,
) -> AuditReport:
    """Exact-counting audit engine over an arbitrary share map.

    ``view_map(secret, key)`` must return the per-server views; secrets
    and keys are factories of fresh iterators so nothing large is held
    in memory.  Distribution equality is checked against the first
    secret's histogram (equality is transitive), and the largest
    total-variation distance seen is reported exactly.

    A "perfect" verdict always rests on the complete enumeration.  With
    ``stop_at_first_leak`` (used by the negative control, which only
    has to demonstrate that leakage exists) the engine returns as soon
    as one set distinguishes one input pair.
    """
    states = n_secrets * n_keys
    if collusion_size > 0 and states > budget:
        raise AuditBudgetError(states=states, budget=budget)

    verdicts = []
    sets = (itertools.combinations(range(1, n_servers + 1), collusion_size)
            if collusion_size > 0 else ())  # no colluders, nothing to check
    for indices in sets:
        base_hist: Optional[Counter] = None
        base_secret = None
        max_tv = Fraction(0)
        witness = None
        for secret in secrets():
            hist: Counter = Counter()
            for key in keys():
                views = view_map(secret, key)
                hist[tuple(views[i - 1] for i in indices)] += 1
            if base_hist is None:
                base_hist, base_secret = hist, secret
                continue
            tv = _tv_distance(base_hist, hist, n_keys)
            if tv > max_tv:
                max_tv = tv
                witness = (describe(base_secret), describe(secret))
                if stop_at_first_leak:
                    break
        verdicts.append(
            SetVerdict(
                indices=indices,
                verdict="perfect" if max_tv == 0 else "leaky",
                max_tv=max_tv,
                witness=witness,
            )
        )
        if stop_at_first_leak and max_tv > 0:
            break
    return AuditReport(
        scheme_id=scheme_id,
        field_size=field_size,
        dims=dims,
        collusion_size=collusion_size,
        negative_control=negative_control,
        states_per_set=states,
        set_verdicts=tuple(verdicts),
    )


# -- enumeration helpers ---------------------------------------------------


def iter_matrices(field: PrimeField, rows: int, cols: int) -> Iterator[FieldMatrix]:
    for combo in itertools.product(range(field.modulus), repeat=rows * cols):
        yield FieldMatrix(field, rows, cols, combo)


def _iter_tuples(field: PrimeField, shape: tuple[int, int], count: int) -> Iterator[tuple]:
    if count == 0:
        yield ()
        return
    gens = [iter_matrices(field, *shape) for _ in range(count)]
    yield from itertools.product(*gens)


def _count_matrices(field: PrimeField, rows: int, cols: int) -> int:
    return field.modulus ** (rows * cols)


def _block_shape(rows: int, cols: int, parts: int, axis_rows: bool) -> tuple[int, int]:
    if axis_rows:
        padded = rows + (-rows % parts)
        return (padded // parts, cols)
    padded = cols + (-cols % parts)
    return (rows, padded // parts)


def _describe_matrix(m) -> str:
    if isinstance(m, tuple):
        return "(" + ", ".join(_describe_matrix(x) for x in m) + ")"
    return str(m.to_rows())


# -- plan-driven audits ----------------------------------------------------


def audit_one_sided(plan: SchemePlan, a_shape: tuple[int, int],
                    budget: int = DEFAULT_BUDGET,
                    collusion_size: Optional[int] = None,
                    stop_at_first_leak: bool = False) -> AuditReport:
    """Exhaustively check that any l shares of A reveal nothing about A.

    Enumerates every A of the given shape and every key assignment; B
    plays no role in the one-sided shares.
    """
    if plan.kind != ONE_SIDED:
        raise ValueError("plan is not one-sided; use audit_fully_secure")
    size = plan.n_colluding if collusion_size is None else collusion_size
    field = plan.field
    m, n = a_shape
    key_shape = _block_shape(m, n, plan.a_parts, True)
    dummy_b = FieldMatrix.zeros(field, n, 1)

    def view_map(a, a_keys):
        ss = encode_with_keys(plan, a, dummy_b, a_keys)
        return [s.a.entries for s in ss.shares]

    n_secrets = _count_matrices(field, m, n)
    n_keys = _count_matrices(field, *key_shape) ** plan.n_a_keys
    return audit_views(
        view_map,
        lambda: iter_matrices(field, m, n),
        lambda: _iter_tuples(field, key_shape, plan.n_a_keys),
        n_secrets,
        n_keys,
        plan.n_servers,
        size,
        scheme_id=f"{plan.kind}(N={plan.n_servers},l={plan.n_colluding})",
        field_size=field.modulus,
        dims=f"A={m}x{n}",
        budget=budget,
        negative_control=size > plan.n_colluding,
        stop_at_first_leak=stop_at_first_leak,
        describe=_describe_matrix,
    )


def audit_fully_secure(plan: SchemePlan, a_shape: tuple[int, int],
                       b_shape: tuple[int, int],
                       budget: int = DEFAULT_BUDGET,
                       collusion_size: Optional[int] = None,
                       stop_at_first_leak: bool = False) -> AuditReport:
    """Exhaustively check that any l pairs (A-share, B-share) reveal
    nothing about (A, B).  Works for any plan that encodes both sides."""
    if plan.kind == ONE_SIDED:
        raise ValueError("plan is one-sided; use audit_one_sided")
    size = plan.n_colluding if collusion_size is None else collusion_size
    field = plan.field
    (m, n), (n2, p) = a_shape, b_shape
    if n != n2:
        raise ValueError(f"A cols {n} must equal B rows {n2}")
    a_key_shape = _block_shape(m, n, plan.a_parts, True)
    b_key_shape = _block_shape(n, p, plan.b_parts, False)

    def view_map(secret, key):
        a, b = secret
        a_keys, b_keys = key
        ss = encode_with_keys(plan, a, b, a_keys, b_keys)
        return [(s.a.entries, s.b.entries) for s in ss.shares]

    def secrets():
        return itertools.product(
            iter_matrices(field, m, n), iter_matrices(field, n, p)
        )

    def keys():
        return itertools.product(
            _iter_tuples(field, a_key_shape, plan.n_a_keys),
            _iter_tuples(field, b_key_shape, plan.n_b_keys),
        )

    n_secrets = _count_matrices(field, m, n) * _count_matrices(field, n, p)
    n_keys = (
        _count_matrices(field, *a_key_shape) ** plan.n_a_keys
        * _count_matrices(field, *b_key_shape) ** plan.n_b_keys
    )
    return audit_views(
        view_map,
        secrets,
        keys,
        n_secrets,
        n_keys,
        plan.n_servers,
        size,
        scheme_id=f"{plan.kind}(N={plan.n_servers},l={plan.n_colluding})",
        field_size=field.modulus,
        dims=f"A={m}x{n},B={n}x{p}",
        budget=budget,
        negative_control=size > plan.n_colluding,
        stop_at_first_leak=stop_at_first_leak,
        describe=_describe_matrix,
    )


def audit_plan(plan: SchemePlan, a_shape: tuple[int, int],
               b_shape: Optional[tuple[int, int]] = None,
               budget: int = DEFAULT_BUDGET,
               collusion_size: Optional[int] = None,
               stop_at_first_leak: bool = False) -> AuditReport:
    """Dispatch to the right audit for the plan's scheme kind."""
    if plan.kind == ONE_SIDED:
        return audit_one_sided(plan, a_shape, budget, collusion_size,
                               stop_at_first_leak)
    if b_shape is None:
        raise ValueError("two-sided audit needs b_shape")
    return audit_fully_secure(plan, a_shape, b_shape, budget, collusion_size,
                              stop_at_first_leak)


def _with_distinct_points(plan: SchemePlan) -> SchemePlan:
    """The same scheme over the smallest field giving N distinct points.

    Leakage at collusion size l+1 comes from l+1 *distinct* evaluations
    over-constraining the l keys.  Audit-scale plans over q <= N reuse
    points, which makes extra colluders clones of existing ones and
    would let the negative control pass vacuously; lifting the field
    restores the boundary the control is supposed to demonstrate.
    """
    if len(set(plan.eval_points)) == plan.n_servers:
        return plan
    field = PrimeField(smallest_prime_above(plan.n_servers))
    if plan.kind == ONE_SIDED:
        return plan_one_sided(plan.n_servers, plan.n_colluding, field)
    if plan.kind == ALIGNED:
        return plan_aligned_8_1(field)
    return plan_fully_secure(plan.n_servers, plan.n_colluding, field,
                             r_override=plan.a_parts)


def audit_collusion_count_boundary(plan: SchemePlan, a_shape: tuple[int, int],
                                   b_shape: Optional[tuple[int, int]] = None,
                                   budget: int = DEFAULT_BUDGET) -> AuditReport:
    """Negative control: rerun the audit with collusion sets one larger
    than the scheme protects against.  A sound scheme and a sound
    auditor must both show up as 'leaky' here.

    Plans whose points repeat (tiny audit fields) are lifted to the
    smallest field with N distinct points first; see
    _with_distinct_points for why.
    """
    lifted = _with_distinct_points(plan)
    return audit_plan(lifted, a_shape, b_shape, budget,
                      collusion_size=plan.n_colluding + 1,
                      stop_at_first_leak=True)
