"""The three encoders/decoders for secure distributed multiplication.

All of them hide data blocks inside evaluations of a matrix polynomial:

* one-sided: only A is private.  A is split row-wise into N-l blocks
  which become the low-degree coefficients; l uniform random key
  matrices occupy the high degrees.  Any l shares are l evaluations of
  a polynomial with l independent uniform keys, hence independent of
  the data.  Servers multiply their share by the public B.

* fully-secure (degree-separated): both A and B are private.  A is
  split into r row blocks, B into r column blocks, and the two
  encoding polynomials use exponent ladders 1 and (r+l) so that every
  product term A_j B_j' (and every key cross term) lands on its own
  degree of the answer polynomial.

* aligned: a hand-crafted 8-server, 1-colluding instance showing that
  undesired cross terms may share degrees with each other (never with
  a desired product), which lowers the total degree and lifts the rate
  from 4/9 to 1/2.

Decoding is polynomial interpolation of the desired degrees followed by
block reassembly.  Keys are drawn fresh on every encode call and never
reused; reuse across jobs would correlate shares and break the
one-shot security model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    ConfigurationError,
    DimensionError,
    FeasibilityError,
    InsufficientAnswersError,
)
from .field import PrimeField, default_points
from .interp import EvaluationSet, interpolate_subset
from .linalg import (
    COL_WISE,
    ROW_WISE,
    FieldMatrix,
    PartitionSpec,
    crop,
    pad_cols,
    pad_rows,
    partition,
    scalar_axpy,
    stack,
)

ONE_SIDED = "one-sided"
FULLY_SECURE = "fully-secure"
ALIGNED = "aligned"

_KINDS = (ONE_SIDED, FULLY_SECURE, ALIGNED)


@dataclass(frozen=True)
class SchemeParams:
    """Server count N, collusion bound l, and the per-server points x_i.

    Points must be nonzero (a zero point would hand a server a raw data
    block).  They must also be distinct for the scheme to decode;
    audit-scale instances over tiny fields may relax distinctness since
    the leakage audit only ever encodes.
    """

    n_servers: int
    n_colluding: int
    scheme_kind: str
    field: PrimeField
    eval_points: tuple[int, ...]
    allow_repeated_points: bool = False

    def __post_init__(self):
        if self.scheme_kind not in _KINDS:
            raise ValueError(f"unknown scheme kind {self.scheme_kind!r}")
        n, ell = self.n_servers, self.n_colluding
        if n < 1:
            raise ValueError("need at least one server")
        if ell < 0 or ell >= n:
            raise ValueError(f"collusion bound must satisfy 0 <= l < N, got l={ell}, N={n}")
        if not self.allow_repeated_points and self.field.modulus <= n:
            raise FeasibilityError(
                f"field of size {self.field.modulus} cannot supply {n} "
                "distinct nonzero evaluation points"
            )
        pts = tuple(p % self.field.modulus for p in self.eval_points)
        if len(pts) != n:
            raise ValueError(f"need {n} evaluation points, got {len(pts)}")
        if any(p == 0 for p in pts):
            raise ValueError("evaluation points must be nonzero")
        if not self.allow_repeated_points and len(set(pts)) != n:
            raise ValueError("evaluation points must be distinct")
        object.__setattr__(self, "eval_points", pts)


@dataclass(frozen=True)
class SchemePlan:
    """A fully-resolved encoding: block counts, per-term exponents, and
    which answer degrees carry the desired product blocks.

    Exponent lists hold data-block exponents first, then key exponents.
    desired_degrees maps an answer degree to the (row-block, col-block)
    grid cell it decodes into (1-based).
    """

    params: SchemeParams
    a_parts: int
    b_parts: int
    a_exponents: tuple[int, ...]
    b_exponents: tuple[int, ...]
    desired_degrees: tuple[tuple[int, tuple[int, int]], ...]
    total_degree: int

    @property
    def kind(self) -> str:
        return self.params.scheme_kind

    @property
    def field(self) -> PrimeField:
        return self.params.field

    @property
    def n_servers(self) -> int:
        return self.params.n_servers

    @property
    def n_colluding(self) -> int:
        return self.params.n_colluding

    @property
    def eval_points(self) -> tuple[int, ...]:
        return self.params.eval_points

    @property
    def n_a_keys(self) -> int:
        return len(self.a_exponents) - self.a_parts

    @property
    def n_b_keys(self) -> int:
        return len(self.b_exponents) - self.b_parts

    @property
    def encodes_b(self) -> bool:
        return self.kind != ONE_SIDED

    def answers_needed(self) -> int:
        return self.total_degree + 1


def r_floor(n: int, ell: int) -> int:
    """Largest split count r with (r+l)^2 <= N (always executable)."""
    return math.isqrt(n) - ell


def r_ceil(n: int, ell: int) -> int:
    """Split count from rounding sqrt(N) up; needs (r+l)^2 evaluations,
    which exceeds N whenever N is not a perfect square."""
    s = math.isqrt(n)
    if s * s < n:
        s += 1
    return s - ell


def _resolve_points(field: PrimeField, n: int,
                    eval_points: Optional[Sequence[int]],
                    allow_repeated: bool) -> Sequence[int]:
    if eval_points is not None:
        return eval_points
    if not allow_repeated and field.modulus <= n:
        raise FeasibilityError(
            f"field of size {field.modulus} cannot supply {n} distinct "
            "nonzero evaluation points"
        )
    return default_points(field, n, allow_repeated)


def plan_one_sided(n: int, ell: int, field: PrimeField,
                   eval_points: Optional[Sequence[int]] = None,
                   allow_repeated_points: bool = False) -> SchemePlan:
    """A split into N-l row blocks at degrees 0..N-l-1, keys above them.

    Shares are evaluations of a degree-(N-1) polynomial; servers multiply
    by the public B; the desired blocks A_j B sit at degrees 0..N-l-1.
    Rate (N-l)/N, which is optimal for this model.
    """
    params = SchemeParams(
        n, ell, ONE_SIDED, field,
        tuple(_resolve_points(field, n, eval_points, allow_repeated_points)),
        allow_repeated_points,
    )
    a_parts = n - ell
    a_exponents = tuple(range(n))  # data 0..N-l-1, keys N-l..N-1
    desired = tuple((j, (j + 1, 1)) for j in range(a_parts))
    return SchemePlan(
        params=params,
        a_parts=a_parts,
        b_parts=1,
        a_exponents=a_exponents,
        b_exponents=(0,),  # the single public-B term, never encoded
        desired_degrees=desired,
        total_degree=n - 1,
    )


def plan_fully_secure(n: int, ell: int, field: PrimeField,
                      eval_points: Optional[Sequence[int]] = None,
                      r_override: Optional[int] = None,
                      allow_repeated_points: bool = False) -> SchemePlan:
    """Degree-separated scheme: r row blocks of A, r column blocks of B.

    A-side exponents step by 1, B-side exponents step by (r+l), so each
    of the (r+l)^2 product terms owns one degree and the answer
    polynomial has degree (r+l)^2 - 1.  Feasibility therefore demands
    N >= (r+l)^2; by default r is the largest value satisfying that.
    """
    if r_override is not None:
        r = r_override
    else:
        r = r_floor(n, ell)
    if r < 1:
        raise FeasibilityError(
            f"no valid split count: N={n} supports no r >= 1 with (r+{ell})^2 <= N"
        )
    needed = (r + ell) ** 2
    if needed > n:
        raise FeasibilityError(
            f"r={r}, l={ell} needs {needed} answers but only N={n} servers exist"
        )
    params = SchemeParams(
        n, ell, FULLY_SECURE, field,
        tuple(_resolve_points(field, n, eval_points, allow_repeated_points)),
        allow_repeated_points,
    )
    step = r + ell
    a_exponents = tuple(range(r)) + tuple(r + k for k in range(ell))
    b_exponents = tuple(j * step for j in range(r)) + tuple(
        (k + r) * step for k in range(ell)
    )
    desired = tuple(
        (j + jp * step, (j + 1, jp + 1))
        for jp in range(r)
        for j in range(r)
    )
    return SchemePlan(
        params=params,
        a_parts=r,
        b_parts=r,
        a_exponents=a_exponents,
        b_exponents=b_exponents,
        desired_degrees=desired,
        total_degree=step * step - 1,
    )


def plan_aligned_8_1(field: PrimeField,
                     eval_points: Optional[Sequence[int]] = None,
                     allow_repeated_points: bool = False) -> SchemePlan:
    """The 8-server, 1-colluding aligned instance.

    A-side exponents {0,1,2} (A_1, A_2, K_A); B-side {0,3,5}
    (B_1, B_2, K_B).  The four products A_j B_j' land alone on degrees
    {0,1,3,4}; the cross terms K_A B_2 and A_1 K_B share degree 5.
    Total degree 7, so 8 answers suffice: rate 1/2 instead of the
    degree-separated 4/9.
    """
    n, ell = 8, 1
    if eval_points is not None and len(eval_points) != n:
        raise ConfigurationError(
            f"the aligned scheme is fixed at N={n}, got {len(eval_points)} points"
        )
    params = SchemeParams(
        n, ell, ALIGNED, field,
        tuple(_resolve_points(field, n, eval_points, allow_repeated_points)),
        allow_repeated_points,
    )
    return SchemePlan(
        params=params,
        a_parts=2,
        b_parts=2,
        a_exponents=(0, 1, 2),
        b_exponents=(0, 3, 5),
        desired_degrees=((0, (1, 1)), (1, (2, 1)), (3, (1, 2)), (4, (2, 2))),
        total_degree=7,
    )


# -- plan validation -----------------------------------------------------


def _term_labels(prefix: str, parts: int, n_keys: int) -> list[str]:
    return [f"{prefix}{j}" for j in range(1, parts + 1)] + [
        f"K{prefix}{k}" for k in range(1, n_keys + 1)
    ]


@dataclass(frozen=True)
class PlanValidation:
    """Verdict of the structural exponent-plan check."""

    valid: bool
    failures: tuple[str, ...]
    rate: Fraction


def validate_exponent_plan(plan: SchemePlan) -> PlanValidation:
    """Check that a plan decodes and that its keys actually mask.

    Confirms (a) every desired product block owns its answer degree
    exclusively, (b) each key term appears once per side, so every
    share mixes in every key with a nonzero coefficient (points are
    nonzero), and (c) the answer polynomial fits the server count.
    Undesired terms may share degrees with each other.
    """
    failures: list[str] = []
    a_labels = _term_labels("A", plan.a_parts, plan.n_a_keys)
    b_labels = _term_labels("B", plan.b_parts, plan.n_b_keys)

    for side, labels, exps in (("A", a_labels, plan.a_exponents),
                               ("B", b_labels, plan.b_exponents)):
        seen: dict[int, str] = {}
        for label, e in zip(labels, exps):
            if e < 0:
                failures.append(f"{label} has negative exponent {e}")
            if e in seen:
                failures.append(
                    f"{side}-side terms {seen[e]} and {label} share exponent {e}"
                )
            else:
                seen[e] = label

    if plan.kind == ONE_SIDED:
        if plan.n_a_keys != plan.n_colluding:
            failures.append(
                f"one-sided plan needs {plan.n_colluding} A-side keys, "
                f"has {plan.n_a_keys}"
            )
        if plan.n_b_keys != 0:
            failures.append("one-sided plan must not encode B")
    else:
        for side, got in (("A", plan.n_a_keys), ("B", plan.n_b_keys)):
            if got != plan.n_colluding:
                failures.append(
                    f"{side}-side needs {plan.n_colluding} keys, has {got}"
                )

    # degree map over all product terms
    degree_terms: dict[int, list[tuple[str, bool]]] = {}
    for ai, (alab, ae) in enumerate(zip(a_labels, plan.a_exponents)):
        a_is_data = ai < plan.a_parts
        for bi, (blab, be) in enumerate(zip(b_labels, plan.b_exponents)):
            b_is_data = bi < plan.b_parts
            degree_terms.setdefault(ae + be, []).append(
                (f"{alab}*{blab}", a_is_data and b_is_data)
            )

    desired_map = dict(plan.desired_degrees)
    for degree, (j, jp) in plan.desired_degrees:
        expected = f"{a_labels[j - 1]}*{b_labels[jp - 1]}"
        terms = degree_terms.get(degree, [])
        if len(terms) != 1:
            names = " and ".join(t for t, _ in terms) or "nothing"
            failures.append(
                f"desired degree {degree} must hold exactly {expected}, "
                f"found: {names}"
            )
        elif terms[0][0] != expected:
            failures.append(
                f"degree {degree} carries {terms[0][0]}, expected {expected}"
            )

    # data products not claimed as desired still must not be silently lost
    for degree, terms in degree_terms.items():
        for name, is_data in terms:
            if is_data and degree not in desired_map:
                failures.append(
                    f"data product {name} at degree {degree} is not decoded"
                )

    max_degree = max(degree_terms) if degree_terms else 0
    if max_degree != plan.total_degree:
        failures.append(
            f"total_degree {plan.total_degree} but exponents reach {max_degree}"
        )
    if plan.total_degree + 1 > plan.n_servers:
        failures.append(
            f"degree {plan.total_degree} needs {plan.total_degree + 1} answers, "
            f"only {plan.n_servers} servers"
        )

    rate = Fraction(plan.a_parts * plan.b_parts, plan.total_degree + 1)
    return PlanValidation(valid=not failures, failures=tuple(failures), rate=rate)


def achievable_rate(plan: SchemePlan) -> Fraction:
    """Desired blocks per answer, read structurally off the plan."""
    return Fraction(len(plan.desired_degrees), plan.total_degree + 1)


# -- encoding / serving / decoding ----------------------------------------


@dataclass(frozen=True)
class Share:
    """What one server receives: an encoded A block, and an encoded B
    block unless B is public."""

    a: FieldMatrix
    b: Optional[FieldMatrix] = None


@dataclass(frozen=True)
class ShareSet:
    """Everything the encoder produced for one job.

    Keys never leave the user's side; they are retained here so audits
    and reference tests can verify the share structure.
    """

    plan: SchemePlan
    shares: tuple[Share, ...]
    public_b: Optional[FieldMatrix]
    a_keys: tuple[FieldMatrix, ...]
    b_keys: tuple[FieldMatrix, ...]
    logical_shape: tuple[int, int, int]  # (m, n, p) before padding


@dataclass(frozen=True)
class AnswerSet:
    """Per-server answers Z_i keyed by 1-based server index, plus the
    logical (unpadded) output shape the decoder must crop to."""

    answers: dict[int, FieldMatrix]
    output_rows: int
    output_cols: int

    def __post_init__(self):
        shapes = {z.shape for z in self.answers.values()}
        if len(shapes) > 1:
            raise DimensionError(f"answers disagree on shape: {sorted(shapes)}")


def _combine(terms: Sequence[FieldMatrix], exponents: Sequence[int],
             x: int, field: PrimeField) -> FieldMatrix:
    """sum_t terms[t] * x^exponents[t]."""
    acc = FieldMatrix.zeros(field, *terms[0].shape)
    for t, e in zip(terms, exponents):
        acc = scalar_axpy(acc, field.pow(x, e), t)
    return acc


def encode_with_keys(plan: SchemePlan, a: FieldMatrix, b: FieldMatrix,
                     a_keys: Sequence[FieldMatrix],
                     b_keys: Sequence[FieldMatrix] = ()) -> ShareSet:
    """Deterministic encode with caller-supplied key matrices.

    The exhaustive auditor drives this directly to enumerate the key
    space; ordinary callers use encode(), which draws keys uniformly.
    """
    field = plan.field
    if a.field != field or b.field != field:
        raise ConfigurationError("inputs must live in the plan's field")
    if a.cols != b.rows:
        raise DimensionError(
            f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}"
        )
    m, n, p = a.rows, a.cols, b.cols

    a_pad = pad_rows(a, plan.a_parts)
    a_blocks = partition(a_pad, PartitionSpec(ROW_WISE, plan.a_parts))
    block_shape = a_blocks[0].shape
    if len(a_keys) != plan.n_a_keys:
        raise ConfigurationError(f"plan needs {plan.n_a_keys} A keys, got {len(a_keys)}")
    for k in a_keys:
        if k.shape != block_shape:
            raise DimensionError(f"A key shape {k.shape} != block shape {block_shape}")
    a_terms = list(a_blocks) + list(a_keys)

    if plan.encodes_b:
        b_pad = pad_cols(b, plan.b_parts)
        b_blocks = partition(b_pad, PartitionSpec(COL_WISE, plan.b_parts))
        b_shape = b_blocks[0].shape
        if len(b_keys) != plan.n_b_keys:
            raise ConfigurationError(
                f"plan needs {plan.n_b_keys} B keys, got {len(b_keys)}"
            )
        for k in b_keys:
            if k.shape != b_shape:
                raise DimensionError(f"B key shape {k.shape} != block shape {b_shape}")
        b_terms = list(b_blocks) + list(b_keys)
        shares = tuple(
            Share(
                a=_combine(a_terms, plan.a_exponents, x, field),
                b=_combine(b_terms, plan.b_exponents, x, field),
            )
            for x in plan.eval_points
        )
        public_b = None
    else:
        if b_keys:
            raise ConfigurationError("one-sided scheme takes no B keys")
        shares = tuple(
            Share(a=_combine(a_terms, plan.a_exponents, x, field))
            for x in plan.eval_points
        )
        public_b = b

    return ShareSet(
        plan=plan,
        shares=shares,
        public_b=public_b,
        a_keys=tuple(a_keys),
        b_keys=tuple(b_keys),
        logical_shape=(m, n, p),
    )


def encode(plan: SchemePlan, a: FieldMatrix, b: FieldMatrix, rng) -> ShareSet:
    """Encode a job, drawing fresh i.i.d. uniform keys from rng."""
    field = plan.field
    a_pad_rows = a.rows + (-a.rows % plan.a_parts)
    block_shape = (a_pad_rows // plan.a_parts, a.cols)
    a_keys = [
        FieldMatrix.random(field, *block_shape, rng) for _ in range(plan.n_a_keys)
    ]
    b_keys: list[FieldMatrix] = []
    if plan.encodes_b:
        b_pad_cols = b.cols + (-b.cols % plan.b_parts)
        b_shape = (b.rows, b_pad_cols // plan.b_parts)
        b_keys = [
            FieldMatrix.random(field, *b_shape, rng) for _ in range(plan.n_b_keys)
        ]
    return encode_with_keys(plan, a, b, a_keys, b_keys)


def server_compute(share: Share, public_b: Optional[FieldMatrix] = None) -> FieldMatrix:
    """What an honest server does: multiply its encoded matrices."""
    if share.b is not None:
        return share.a @ share.b
    if public_b is None:
        raise ConfigurationError("one-sided share needs the public matrix B")
    return share.a @ public_b


def decode(plan: SchemePlan, answers: AnswerSet) -> FieldMatrix:
    """Interpolate the desired degrees and reassemble the product AB.

    Needs answers from at least total_degree+1 servers; extra answers
    are ignored (lowest server indices win).
    """
    need = plan.answers_needed()
    if len(answers.answers) < need:
        raise InsufficientAnswersError(needed=need, got=len(answers.answers))
    chosen = sorted(answers.answers)[:need]
    ev = EvaluationSet(
        plan.field,
        [plan.eval_points[i - 1] for i in chosen],
        [answers.answers[i] for i in chosen],
    )
    blocks = interpolate_subset(ev, [d for d, _ in plan.desired_degrees])
    grid = {cell: blk for (_, cell), blk in zip(plan.desired_degrees, blocks)}
    rows = [
        stack([grid[(j, jp)] for jp in range(1, plan.b_parts + 1)], COL_WISE)
        for j in range(1, plan.a_parts + 1)
    ]
    full = stack(rows, ROW_WISE)
    return crop(full, answers.output_rows, answers.output_cols)


# -- flat text serialization ----------------------------------------------


def plan_to_text(plan: SchemePlan) -> str:
    """Flat text record: one key=value line per field."""
    lines = [
        f"scheme={plan.kind}",
        f"n={plan.n_servers}",
        f"ell={plan.n_colluding}",
        f"modulus={plan.field.modulus}",
        "points=" + " ".join(str(p) for p in plan.eval_points),
        f"a_parts={plan.a_parts}",
        f"b_parts={plan.b_parts}",
        "a_exponents=" + " ".join(str(e) for e in plan.a_exponents),
        "b_exponents=" + " ".join(str(e) for e in plan.b_exponents),
        "desired=" + " ".join(
            f"{d}:{j},{jp}" for d, (j, jp) in plan.desired_degrees
        ),
        f"total_degree={plan.total_degree}",
    ]
    return "\n".join(lines) + "\n"


def plan_from_text(text: str) -> SchemePlan:
    fields: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        fields[key] = value
    try:
        points = tuple(int(p) for p in fields["points"].split())
        params = SchemeParams(
            n_servers=int(fields["n"]),
            n_colluding=int(fields["ell"]),
            scheme_kind=fields["scheme"],
            field=PrimeField(int(fields["modulus"])),
            eval_points=points,
            allow_repeated_points=len(set(points)) != len(points),
        )
        desired = tuple(
            (int(part.split(":")[0]),
             tuple(int(v) for v in part.split(":")[1].split(",")))
            for part in fields["desired"].split()
        )
        return SchemePlan(
            params=params,
            a_parts=int(fields["a_parts"]),
            b_parts=int(fields["b_parts"]),
            a_exponents=tuple(int(e) for e in fields["a_exponents"].split()),
            b_exponents=tuple(int(e) for e in fields["b_exponents"].split()),
            desired_degrees=desired,
            total_degree=int(fields["total_degree"]),
        )
    except KeyError as exc:
        raise ValueError(f"plan record missing field {exc}") from exc
