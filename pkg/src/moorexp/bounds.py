"""Thresholds, case analysis and the combined verdict for an exponent set.

Every comparison that involves a real logarithm or root is carried out on
exact integers or :class:`fractions.Fraction` values, with irrational
quantities bracketed from the safe side.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb, gcd, isqrt
from typing import Sequence

from .fq_linalg import gaussian_binomial
from .moore import (EngineDisagreement, ExponentSet, MooreVerdict, moore_check_kernel,
                    normalize)

DEFAULT_ENGINE_BUDGET = 2 * 10**8
ROOT_SCALE = 10**40

# (n, condition on q, exponent sets); matched up to shift mod n only
SPORADIC = (
    ("sporadic_n7", 7, lambda q: q % 2 == 1, ((0, 1, 3), (0, 1, 2, 5))),
    ("sporadic_n8", 8, lambda q: q % 3 == 1, ((0, 1, 3), (0, 1, 2, 3, 6))),
)


def _as_exps(I) -> tuple[int, ...]:
    return tuple(I.exps) if isinstance(I, ExponentSet) else tuple(sorted(I))


def _integer_ap(exps: Sequence[int]) -> bool:
    if len(exps) <= 2:
        return True
    d = exps[1] - exps[0]
    return d > 0 and all(b - a == d for a, b in zip(exps, exps[1:]))


def ap_step_mod(exps: Sequence[int], n: int) -> int | None:
    """Some d with I + s = {0, d, ..., (k-1)d} mod n for a shift s, or None.

    Prefers a step coprime to n, then the smallest.
    """
    k = len(exps)
    target = {e % n for e in exps}
    if len(target) != k:
        raise ValueError("exponents are not distinct mod n")
    found = []
    for d in range(1, n) if n > 1 else [1]:
        prog = [(t * d) % n for t in range(k)]
        if len(set(prog)) != k:
            continue
        for s in range(n):
            if {(p + s) % n for p in prog} == target:
                found.append(d)
                break
    if not found:
        return None
    coprime = [d for d in found if gcd(d, n) == 1]
    return min(coprime) if coprime else min(found)


def is_arithmetic_progression(I, n: int | None = None) -> bool:
    """With n: some shift mod n is {0, d, ..., (k-1)d} mod n.  Without n: I
    itself is an integer progression."""
    exps = _as_exps(I)
    if n is None:
        return _integer_ap(exps)
    return ap_step_mod(exps, n) is not None


def classify_case(I, q: int) -> str:
    """Which of the four hypothesis collections (a)-(d) holds, or 'none'."""
    exps = _as_exps(I)
    if exps[0] != 0:
        raise ValueError("I must be normalized (minimum 0)")
    k = len(exps)
    if k < 3:
        raise ValueError("case analysis needs k >= 3")
    if _integer_ap(exps):
        raise ValueError(f"{list(exps)} is an arithmetic progression")
    i1, i2 = exps[1], exps[2]
    if i2 != 2 * i1:
        return "a"
    if k > 3:
        if q >= 7:
            return "b"
        if q in (3, 4, 5) and i1 > 1:
            return "c"
        if q == 2 and i1 > 2:
            return "d"
    return "none"


@dataclass(frozen=True)
class CurveThreshold:
    N: int
    j_neq_2i: bool


def curve_threshold(I) -> CurveThreshold:
    exps = _as_exps(I)
    if len(exps) != 3 or exps[0] != 0:
        raise ValueError("curve threshold needs a normalized I = {0, i, j}")
    _, i, j = exps
    return CurveThreshold(4 * j + 2, j != 2 * i)


def general_threshold(q: int, I) -> int:
    """Smallest n with n > (13/3) i_top + log_q(13 * 2^(10/3)).

    ``I`` is an exponent set with k > 3, or directly the top exponent i_top.
    The test is q^(3n) > 13^3 * 2^10 * q^(13 i_top), exact.
    """
    if isinstance(I, int):
        top = I
    else:
        exps = _as_exps(I)
        if len(exps) <= 3:
            raise ValueError("general threshold needs k > 3")
        top = exps[-1]
    if q < 2:
        raise ValueError("q must be >= 2")
    rhs = 13**3 * 2**10 * q ** (13 * top)
    n = (13 * top) // 3
    while q ** (3 * n) <= rhs:
        n += 1
    while n > 0 and q ** (3 * (n - 1)) > rhs:
        n -= 1
    return n


@dataclass(frozen=True)
class BezoutGap:
    tau: Fraction
    b_tau: Fraction
    two_ninths_d2: Fraction
    gap: Fraction
    d: int

    def to_json(self) -> dict:
        return {"tau": str(self.tau), "b_tau": str(self.b_tau),
                "two_ninths_d2": str(self.two_ninths_d2), "gap": str(self.gap),
                "gap_float": float(self.gap), "gap_positive": self.gap > 0,
                "tau_le_b_tau": self.tau <= self.b_tau, "d": self.d}


def bezout_gap(q: int, k: int, i1: int, ik2: int, ik1: int) -> BezoutGap:
    """Intersection budget tau, its closed-form upper bound B_tau, and (2/9)d^2 - B_tau."""
    if k <= 3 or not 0 < i1 < ik2 < ik1:
        raise ValueError(f"need k > 3 and 0 < i1 < ik2 < ik1, got k={k}, {i1}, {ik2}, {ik1}")
    Q = Fraction(q)
    sq = (Q**i1 + 1) ** 2 / 4
    tau = ((Q ** (2 * (ik1 - i1)) - Q ** (2 * (ik1 - i1 - 1))) * Q**i1
           + Q ** (2 * (ik1 - i1 - 1)) * sq
           + (Q ** (ik1 - ik2) + 1) * sq)
    b_tau = (Q ** (2 * ik1) * (1 / Q**i1 * (1 - 1 / Q**2)
                               + (Q**i1 + 1) ** 2 / (4 * Q ** (2 * i1 + 2))
                               + 1 / (4 * Q ** (2 * k - 5))
                               + 1 / Q ** (2 * k - 4))
             + sq)
    d = q**ik1 + q**ik2 - q ** (k - 1) - q ** (k - 2)
    two_ninths = Fraction(2, 9) * d * d
    return BezoutGap(tau, b_tau, two_ninths, two_ninths - b_tau, d)


def case2_realizable(k: int, i1: int, ik2: int, ik1: int) -> bool:
    """Some non-progression I = {0, i1, 2 i1, ..., ik2, ik1} of size k exists."""
    if k < 4 or not 0 < i1 < ik2 < ik1:
        return False
    if k == 4:
        return ik2 == 2 * i1 and ik1 != 3 * i1
    slots = ik2 - 2 * i1 - 1          # free values strictly between 2 i1 and ik2
    if slots < k - 5:
        return False
    if ik2 == (k - 2) * i1 and ik1 == (k - 1) * i1:
        return comb(slots, k - 5) > 1  # the progression is one completion among several
    return True


def _hypothesis_grid(q: int, i1: int) -> bool:
    return q >= 7 or (q in (3, 4, 5) and i1 > 1) or (q == 2 and i1 > 2)


@dataclass
class BezoutSweep:
    cells: int
    gap_failures: list[tuple[int, ...]]          # hypothesis grid, gap <= 0
    tau_failures: list[tuple[int, ...]]          # tau > B_tau anywhere
    realizable_gap_failures: list[tuple[int, ...]]
    realizable_tau_failures: list[tuple[int, ...]]

    def to_json(self) -> dict:
        return {k: (v if isinstance(v, int) else [list(c) for c in v])
                for k, v in asdict(self).items()}


def bezout_sweep(qs: Sequence[int] = range(2, 10), ks: Sequence[int] = (4, 5, 6),
                 top: int = 12) -> BezoutSweep:
    """Evaluate the gap on every (q, k, i1, ik2, ik1) with i1 < ik2 < ik1 <= top."""
    out = BezoutSweep(0, [], [], [], [])
    for q in qs:
        for k in ks:
            for ik1 in range(3, top + 1):
                for ik2 in range(2, ik1):
                    for i1 in range(1, ik2):
                        g = bezout_gap(q, k, i1, ik2, ik1)
                        cell = (q, k, i1, ik2, ik1)
                        real = case2_realizable(k, i1, ik2, ik1)
                        out.cells += 1
                        if g.gap <= 0 and _hypothesis_grid(q, i1):
                            out.gap_failures.append(cell)
                            if real:
                                out.realizable_gap_failures.append(cell)
                        if g.tau > g.b_tau:
                            out.tau_failures.append(cell)
                            if real:
                                out.realizable_tau_failures.append(cell)
    return out


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _icbrt_ceil(x: int) -> int:
    """Least r with r^3 >= x (Newton iteration from above)."""
    if x <= 0:
        return 0
    r = 1 << (x.bit_length() // 3 + 1)
    while True:
        nxt = (2 * r + x // (r * r)) // 3
        if nxt >= r:
            break
        r = nxt
    while r**3 < x:
        r += 1
    return r


def _isqrt_ceil(x: int) -> int:
    r = isqrt(x)
    return r if r * r == x else r + 1


@dataclass(frozen=True)
class ZahidThresholds:
    t0: Fraction     # upper bracket of (1/4)(alpha + sqrt(alpha^2 + 4 beta))^2
    t1: Fraction     # exact (3f^4 - 4f^3 + 5f^2) / 2

    def min_field_size(self) -> tuple[int, int]:
        """Least integers strictly above t0 and t1."""
        return int(self.t0) + 1, int(self.t1) + 1


def zahid_thresholds(f: int, e: int) -> ZahidThresholds:
    if f < 1 or e < 1:
        raise ValueError("f and e must be >= 1")
    S = ROOT_SCALE
    alpha = (f - 1) * (f - 2)
    # beta scaled by S, rounded up: 5 f^(13/3) = 5 f^4 * cbrt(f)
    cbrt_up = _icbrt_ceil(f * S**3)                     # >= cbrt(f) * S
    beta_s = 5 * f**4 * cbrt_up + f * (f + e - 1) * S
    # sqrt(alpha^2 + 4 beta) * S, rounded up
    root_s = _isqrt_ceil(alpha * alpha * S * S + 4 * beta_s * S)
    t0 = Fraction((alpha * S + root_s) ** 2, 4 * S * S)
    t1 = Fraction(3 * f**4 - 4 * f**3 + 5 * f**2, 2)
    return ZahidThresholds(t0, t1)


def known_family(q: int, n: int, I) -> str:
    exps = _as_exps(I)
    if len(exps) == 1:
        return "gabidulin"
    d = ap_step_mod(exps, n)
    if d is not None and gcd(d, n) == 1:
        return "gabidulin"
    canon = normalize(exps, n).canonical().exps
    for name, nn, cond, sets in SPORADIC:
        if n == nn and cond(q):
            if any(normalize(s, n).canonical().exps == canon for s in sets):
                return name
    return "none"


def _min_n_above(q: int, t: Fraction) -> int:
    n = 1
    while q**n <= t:
        n += 1
    return n


@dataclass
class BoundsReport:
    q: int
    n: int | None
    exps: tuple[int, ...]
    is_ap: bool
    case: str | None
    curve_threshold: int | None = None
    curve_j_neq_2i: bool | None = None
    curve_gcd_trigger: bool | None = None
    general_threshold: int | None = None
    zahid_f: int | None = None
    zahid_e: int | None = None
    zahid0_threshold: Fraction | None = None
    zahid1_threshold: Fraction | None = None
    zahid0_min_n: int | None = None
    zahid1_min_n: int | None = None
    bezout: BezoutGap | None = None
    known_family: str | None = None

    def to_json(self) -> dict:
        out = {
            "q": self.q, "n": self.n, "I": list(self.exps), "is_ap": self.is_ap,
            "case": self.case, "curve_threshold": self.curve_threshold,
            "curve_j_neq_2i": self.curve_j_neq_2i,
            "curve_gcd_trigger": self.curve_gcd_trigger,
            "general_threshold": self.general_threshold,
            "zahid_f": self.zahid_f, "zahid_e": self.zahid_e,
            "zahid0_threshold_upper": None if self.zahid0_threshold is None
            else str(_ceil_div(self.zahid0_threshold.numerator, self.zahid0_threshold.denominator)),
            "zahid1_threshold": None if self.zahid1_threshold is None else str(self.zahid1_threshold),
            "zahid0_min_n": self.zahid0_min_n, "zahid1_min_n": self.zahid1_min_n,
            "known_family": self.known_family,
        }
        if self.bezout is not None:
            out.update(self.bezout.to_json())
        return out


def bounds_report(q: int, I, n: int | None = None) -> BoundsReport:
    exps = normalize(_as_exps(I), n).exps
    k = len(exps)
    rep = BoundsReport(q, n, exps, is_arithmetic_progression(exps, n), None)
    if k >= 3 and not _integer_ap(exps):
        rep.case = classify_case(exps, q)
    if k == 3:
        ct = curve_threshold(exps)
        rep.curve_threshold, rep.curve_j_neq_2i = ct.N, ct.j_neq_2i
        if n is not None:
            rep.curve_gcd_trigger = gcd(n, exps[1], exps[2]) > 1
    if k > 3:
        rep.general_threshold = general_threshold(q, exps)
        rep.bezout = bezout_gap(q, k, exps[1], exps[-2], exps[-1])
    if k >= 2:
        e = sum(q**t for t in range(k))
        f = sum(q**t for t in exps) - e
        if f >= 1:
            z = zahid_thresholds(f, e)
            rep.zahid_f, rep.zahid_e = f, e
            rep.zahid0_threshold, rep.zahid1_threshold = z.t0, z.t1
            rep.zahid0_min_n = _min_n_above(q, z.t0)
            rep.zahid1_min_n = _min_n_above(q, z.t1)
    if n is not None:
        rep.known_family = known_family(q, n, exps)
    return rep


# -- combined verdict --------------------------------------------------------------


@dataclass
class TheoremClaim:
    theorem: str          # "curve" or "general"
    representative: tuple[int, ...]
    threshold: int | None
    trigger: str          # "threshold" or "gcd"
    case: str | None = None

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "representative": list(self.representative),
                "threshold": self.threshold, "trigger": self.trigger, "case": self.case}


@dataclass
class FinalVerdict:
    verdict: str
    q: int
    n: int
    exps: tuple[int, ...]
    known_family: str
    theorem: TheoremClaim | None = None
    engine: MooreVerdict | None = None
    engine_work_estimate: int = 0
    notes: list[str] = field(default_factory=list)


def theorem_claim(q: int, n: int, I) -> TheoremClaim | None:
    """A non-Moore claim from the curve or general threshold theorems, if
    some shift representative of I satisfies every hypothesis."""
    base = normalize(_as_exps(I), n)
    k = base.k
    for rep in sorted({s.exps for s in base.shifts()}):
        if k == 3:
            _, i, j = rep
            if j == 2 * i:
                continue
            if gcd(n, i, j) > 1:
                return TheoremClaim("curve", rep, 4 * j + 2, "gcd")
            if n > 4 * j + 2:
                return TheoremClaim("curve", rep, 4 * j + 2, "threshold")
        elif k > 3:
            if _integer_ap(rep):
                continue
            case = classify_case(rep, q)
            if case == "none":
                continue
            N = general_threshold(q, rep)
            if n >= N:
                return TheoremClaim("general", rep, N, "threshold", case)
    return None


def final_verdict(q: int, n: int, I, budget: int = DEFAULT_ENGINE_BUDGET,
                  jobs: int = 1, ctx=None) -> FinalVerdict:
    from .gf_tower import field_for

    base = normalize(_as_exps(I), n)
    exps = base.exps
    fam = known_family(q, n, exps)
    claim = theorem_claim(q, n, exps)
    k = len(exps)
    work = gaussian_binomial(q, n, k - 1) if k > 1 else 0
    out = FinalVerdict("undecided_budget", q, n, exps, fam, claim, None, work)
    if fam != "none" and claim is not None:
        raise EngineDisagreement(f"{fam} set {exps} also matches a non-Moore theorem")
    if work <= budget:
        ctx = ctx or field_for(q, n)
        v = moore_check_kernel(ctx, exps, jobs=jobs)
        out.engine = v
        if fam != "none" and not v.is_moore:
            raise EngineDisagreement(f"known family {fam} refuted by witness for {exps}")
        if claim is not None and v.is_moore:
            raise EngineDisagreement(f"theorem claim {claim} contradicted by exhaustion")
    else:
        out.notes.append(f"{work} pencils exceed the engine budget of {budget}")
    if fam != "none":
        out.verdict = "moore_known_family"
    elif claim is not None:
        out.verdict = "not_moore_by_theorem"
    elif out.engine is not None:
        out.verdict = "moore_by_exhaustion" if out.engine.is_moore else "not_moore_with_witness"
    return out
