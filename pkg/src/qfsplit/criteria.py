"""Decision procedures for quasi-F-split heights, with re-verifiable certificates.

For a regular sequence f'_1, ..., f'_m in the maximal ideal of S = F_p[x], set
f := f'_1⋯f'_m and

    I_1 := (f^{p−1}) + ((f'_1)^p, ..., (f'_m)^p),
    I_{n+1} := θ(F_*I_n ∩ Ker u) + I_1,       θ(F_*a) := u(F_*(Δ₁(f^{p−1})·a)).

The height of S/(f'_i) is the first n with I_n ⊄ m^{[p]} (infinite if none).
Three engines compute it:

* `height_graded_cy` — for homogeneous systems whose degrees sum to the
  anticanonical degree.  Tracks t_n := u^{n−1}(F^{n−1}_* f_n) for
  f_n := f^{p−1}·Δ₁(f^{p−1})^{p^{n−2}+⋯+1} through the one-step recursion
  t_{n+1} = θ(F_* t_n); the height is the first n whose t_n has a nonzero
  (x_1⋯x_N)^{p−1} coefficient.  Degrees stay bounded, so this is fast.
* `height_local` — the I_n chain itself, via module syzygies for the kernel
  intersection.  Works for any input; extracts chain certificates.
* `qfs_decide` — the fixed-point iteration for the smallest ideal I_∞ with
  I_∞ ⊇ θ(F_*I_∞ ∩ Ker u) + (I^{[p]} : I); quasi-F-split iff I_∞ ⊄ m^{[p]}.

`height` orchestrates all of them plus the quick non-splitting tests.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence, Union

from .rings import (
    Grading,
    HomogeneityError,
    Polynomial,
    PolynomialRing,
    RingError,
    check_homogeneous,
)
from .witt import delta1
from .frobenius import (
    bracket_power,
    in_max_ideal_frobenius_power,
    iterated_u,
    theta,
    u_map,
)
from .groebner import (
    Budget,
    BudgetExceededError,
    Ideal,
    colon_ideal,
    frobenius_module_intersect_keru,
    ideal_equal,
    ideal_membership,
)

DEFAULT_N_MAX = 32

# verdict strings
FINITE = "Finite"
INFINITE = "Infinite"
LOWER_BOUND = "LowerBound"
UNKNOWN = "Unknown"

# certificate kinds
COEFFICIENT_WITNESS = "CoefficientWitness"
CHAIN_WITNESS = "ChainWitness"
I_INFTY_STABILIZED = "IInftyStabilized"
NON_QFS = "NonQFS"
FIXED_POINT_ENCLOSURE = "FixedPointEnclosure"

# NonQFS tags (each names the verified containment)
TAG_FPM2 = "f^(p-2) in m^[p]"
TAG_PRODUCT = "(f^(p-2), I^[p]) * f^(p*(p-2)) * delta1(f) in m^[p^2]"
TAG_I_INFTY = "I_infinity in m^[p]"


@dataclass(frozen=True)
class ChainStep:
    """One transition record: w ∈ I_l ∩ Ker u together with θ(F_*w)."""

    element: Polynomial
    image: Polynomial


@dataclass
class Certificate:
    """A tagged bundle of evidence; `data` holds only what re-verification needs.

    Kinds and payloads:
      CoefficientWitness  {level, coefficient, grading}
      ChainWitness        {chain} (strict θ-chain) and/or {levels, escape}
      IInftyStabilized    {generators, iterations}
      NonQFS              {tag, ...containment details}
      FixedPointEnclosure {generators}
    """

    kind: str
    data: dict[str, Any]


@dataclass
class HeightResult:
    """Outcome of a height computation.

    verdict: Finite | Infinite | LowerBound | Unknown.  `n` is the height for
    Finite, the exhausted cutoff for LowerBound, None otherwise.  LowerBound
    means every test up to the cutoff stayed inside m^{[p]} (resp. m^{[p^n]});
    Unknown records a budget abort in `diagnostics`.
    """

    verdict: str
    n: Optional[int]
    certificate: Optional[Certificate]
    steps: int = 0
    wall_time_ms: float = 0.0
    route: str = ""
    diagnostics: tuple[str, ...] = ()

    def is_finite(self) -> bool:
        return self.verdict == FINITE


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _as_gen_list(arg: Union[Ideal, Polynomial, Sequence[Polynomial]]) -> list[Polynomial]:
    if isinstance(arg, Ideal):
        return list(arg.gens)
    if isinstance(arg, Polynomial):
        return [arg]
    return list(arg)


def _product(gens: Sequence[Polynomial], ring: PolynomialRing) -> Polynomial:
    f = ring.one
    for g in gens:
        f = f * g
    return f


def _dedupe(polys: Iterable[Polynomial]) -> list[Polynomial]:
    out: list[Polynomial] = []
    seen: set[Polynomial] = set()
    for g in polys:
        if g and g not in seen:
            seen.add(g)
            out.append(g)
    return out


def _fedder_ideal_gens(gens: Sequence[Polynomial], ring: PolynomialRing) -> list[Polynomial]:
    """Generators of I_1 = (f^{p−1}) + ((f'_i)^p) for f = Π f'_i."""
    p = ring.field.p
    f = _product(gens, ring)
    return _dedupe([f ** (p - 1)] + [g.pth_power() for g in gens])


def _top_residue(ring: PolynomialRing) -> tuple[int, ...]:
    return (ring.field.p - 1,) * ring.nvars


def _escapes(gens: Sequence[Polynomial]) -> Optional[Polynomial]:
    """First generator outside m^{[p]}, if any (monomial-ideal test)."""
    for g in gens:
        if g and not in_max_ideal_frobenius_power(g, 1):
            return g
    return None


def result_to_json(res: HeightResult) -> dict[str, Any]:
    """The documented report shape: {verdict, n, certificate, steps, wall_time_ms}."""
    return {
        "verdict": res.verdict,
        "n": res.n,
        "certificate": certificate_to_json(res.certificate),
        "steps": res.steps,
        "wall_time_ms": res.wall_time_ms,
        "route": res.route,
        "diagnostics": list(res.diagnostics),
    }


def certificate_to_json(cert: Optional[Certificate]) -> Optional[dict[str, Any]]:
    if cert is None:
        return None
    return {"kind": cert.kind, "data": _jsonify(cert.data)}


def _jsonify(value: Any) -> Any:
    if isinstance(value, Polynomial):
        return str(value)
    if isinstance(value, Ideal):
        return [str(g) for g in value.gens]
    if isinstance(value, ChainStep):
        return {"element": str(value.element), "theta_image": str(value.image)}
    if isinstance(value, dict):
        return {k: _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    return value


# ---------------------------------------------------------------------------
# Fedder test (height 1)
# ---------------------------------------------------------------------------


def fedder_fsplit(I: Union[Ideal, Polynomial, Sequence[Polynomial]]) -> bool:
    """F-splitting test: I_1 ⊄ m^{[p]}.

    Since every (f'_i)^p lies in the monomial ideal m^{[p]} (the generators
    sit in m), only f^{p−1} can escape, and membership in a monomial ideal is
    a per-term check — no Groebner basis is needed.  Callers are responsible
    for the generators forming a regular sequence in m.
    """
    gens = _as_gen_list(I)
    if not gens:
        return True
    ring = gens[0].ring
    p = ring.field.p
    f = _product(gens, ring)
    return not in_max_ideal_frobenius_power(f ** (p - 1), 1)


# ---------------------------------------------------------------------------
# graded Calabi–Yau engine
# ---------------------------------------------------------------------------


def graded_cy_applicable(f_list: Sequence[Polynomial], g: Grading) -> Optional[str]:
    """None if the graded engine's preconditions hold, else the reason they fail."""
    if not f_list:
        return "empty polynomial system"
    ring = f_list[0].ring
    if g.nvars != ring.nvars:
        return f"grading has {g.nvars} columns but the ring has {ring.nvars} variables"
    total = tuple(0 for _ in g.rows)
    for fp in f_list:
        try:
            d = check_homogeneous(fp, g)
        except HomogeneityError as exc:
            return str(exc)
        total = tuple(a + b for a, b in zip(total, d))
    anticanonical = g.total_of_variables()
    if total != anticanonical:
        return (
            f"degree sum {total} differs from the sum of variable degrees "
            f"{anticanonical}; the coefficient criterion needs them equal"
        )
    return None


def height_graded_cy(
    f_list: Sequence[Polynomial],
    g: Grading,
    n_max: int = DEFAULT_N_MAX,
    budget: Optional[Budget] = None,
) -> HeightResult:
    """Height of a homogeneous system with Σ deg(f'_i) = Σ deg(x_i).

    In that case f_n := f^{p−1}·Δ₁(f^{p−1})^{p^{n−2}+⋯+1} is homogeneous of
    the degree whose only monomial outside m^{[p^n]} is (x_1⋯x_N)^{p^n−1}, so
    sht = first n with that coefficient nonzero.  The coefficient is read off
    t_n := u^{n−1}(F^{n−1}_* f_n), computed by t_1 = f^{p−1} and
    t_{n+1} = θ(F_* t_n): the (x_1⋯x_N)^{p−1} coefficient of t_n equals the
    target coefficient of f_n, and deg t_n never exceeds (p−1)·N.
    """
    f_list = [f for f in f_list]
    reason = graded_cy_applicable(f_list, g)
    if reason is not None:
        raise RingError(f"graded engine not applicable: {reason}")
    if budget is None:
        budget = Budget()
    t0 = time.perf_counter()
    ring = f_list[0].ring
    p = ring.field.p
    top = _top_residue(ring)
    f = _product(f_list, ring)
    t = f ** (p - 1)
    delta: Optional[Polynomial] = None
    diagnostics: list[str] = []
    for n in range(1, n_max + 1):
        budget.tick()
        c = t.coefficient_of(top)
        if c:
            cert = Certificate(
                COEFFICIENT_WITNESS,
                {"level": n, "coefficient": c, "grading": [list(r) for r in g.rows]},
            )
            return HeightResult(
                FINITE, n, cert,
                steps=budget.steps,
                wall_time_ms=(time.perf_counter() - t0) * 1000,
                route="graded-cy",
            )
        if t.is_zero():
            diagnostics.append(
                f"theta orbit vanished at level {n}; every later coefficient is zero"
            )
            break
        if delta is None:
            delta = delta1(f ** (p - 1))
        t = theta(t, delta)
    return HeightResult(
        LOWER_BOUND, n_max, None,
        steps=budget.steps,
        wall_time_ms=(time.perf_counter() - t0) * 1000,
        route="graded-cy",
        diagnostics=tuple(diagnostics),
    )


def graded_cy_coefficient(
    f_list: Sequence[Polynomial], n: int, budget: Optional[Budget] = None
) -> int:
    """The (x_1⋯x_N)^{p^n−1} coefficient of f_n, by capped multiplication.

    Independent of the θ-orbit route: forms Δ₁(f^{p−1})^{p^{n−2}+⋯+1} by
    binary powering with every exponent capped at p^n−1 (sound, since
    exponents only grow and the target stays within the cap).  Used to
    re-verify CoefficientWitness certificates.
    """
    if n < 1:
        raise RingError("level must be >= 1")
    ring = f_list[0].ring
    p = ring.field.p
    q = p**n
    cap = (q - 1,) * ring.nvars
    f = _product(f_list, ring)
    base = f ** (p - 1)
    if n == 1:
        return base.coefficient_of(cap)
    delta = delta1(base)
    exp = (p ** (n - 1) - 1) // (p - 1)  # p^{n−2} + ... + p + 1
    acc = ring.one
    sq = delta
    e = exp
    while True:
        if budget is not None:
            budget.tick()
        if e & 1:
            acc = acc.capped_mul(sq, cap)
        e >>= 1
        if not e:
            break
        sq = sq.capped_mul(sq, cap)
    return base.capped_mul(acc, cap).coefficient_of(cap)


def verify_coefficient_witness(
    f_list: Sequence[Polynomial],
    cert: Certificate,
    budget: Optional[Budget] = None,
) -> bool:
    """Recompute the witnessed coefficient by the capped route and compare."""
    if cert.kind != COEFFICIENT_WITNESS:
        return False
    n = cert.data["level"]
    claimed = cert.data["coefficient"]
    if claimed == 0:
        return False
    return graded_cy_coefficient(f_list, n, budget) == claimed


# ---------------------------------------------------------------------------
# local engine: the I_n chain
# ---------------------------------------------------------------------------


def _theta_images(
    pool: Sequence[Polynomial],
    delta: Polynomial,
    ring: PolynomialRing,
    budget: Budget,
) -> list[ChainStep]:
    """θ(F_* (I ∩ Ker u)) for I = (pool), one record per intersection generator."""
    inter = frobenius_module_intersect_keru(Ideal(ring, pool), budget)
    out = []
    for gen in inter:
        img = theta(gen.element, delta)
        out.append(ChainStep(gen.element, img))
    return out


def local_chain_ideals(
    I: Ideal, n_max: int, budget: Optional[Budget] = None
) -> list[Ideal]:
    """The ideals I_1, ..., I_k (k ≤ n_max), stopping early on stabilization."""
    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    delta = delta1(f ** (p - 1))
    i1 = _fedder_ideal_gens(I.gens, ring)
    out = [Ideal(ring, i1)]
    for _ in range(1, n_max):
        steps = _theta_images(out[-1].gens, delta, ring, budget)
        nxt = Ideal(ring, _dedupe(i1 + [s.image for s in steps]))
        # containment in m^{[p]} is an ideal invariant, so differing escape
        # status settles inequality without a Groebner comparison
        same_side = (_escapes(out[-1].gens) is None) == (_escapes(nxt.gens) is None)
        if same_side and ideal_equal(out[-1], nxt, budget):
            break
        out.append(nxt)
    return out


def height_local(
    I: Ideal,
    n_max: int = DEFAULT_N_MAX,
    budget: Optional[Budget] = None,
) -> HeightResult:
    """Height via the I_n chain; certificates as θ-chains.

    Returns Finite(n) at the first I_n ⊄ m^{[p]} with a ChainWitness: a
    strict chain g_1, ..., g_n (θ(F_*g_l) = g_{l+1}, found by orbit search)
    when one exists, always the levelled transition records.  If the chain
    stabilizes with every generator inside m^{[p]}, the stabilized ideal is a
    fixed-point enclosure proving the height infinite.  Budget aborts return
    Unknown with diagnostics.
    """
    if budget is None:
        budget = Budget()
    t0 = time.perf_counter()

    def finish(verdict, n, cert, route="local-chain", diagnostics=()):
        return HeightResult(
            verdict, n, cert,
            steps=budget.steps,
            wall_time_ms=(time.perf_counter() - t0) * 1000,
            route=route,
            diagnostics=tuple(diagnostics),
        )

    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    i1 = _fedder_ideal_gens(I.gens, ring)
    delta = delta1(f ** (p - 1))
    levels: list[list[ChainStep]] = []
    current = Ideal(ring, i1)
    try:
        for n in range(1, n_max + 1):
            esc = _escapes(current.gens)
            if esc is not None:
                cert_data: dict[str, Any] = {
                    "levels": [list(lv) for lv in levels],
                    "escape": esc,
                    "escape_level": n,
                }
                chain = _strict_chain_search(i1, delta, n, ring, budget)
                if chain is not None:
                    cert_data["chain"] = chain
                return finish(FINITE, n, Certificate(CHAIN_WITNESS, cert_data))
            if n == n_max:
                break
            steps = _theta_images(current.gens, delta, ring, budget)
            nxt = Ideal(ring, _dedupe(i1 + [s.image for s in steps]))
            # an escaping I_{n+1} cannot equal I_n ⊆ m^{[p]}, so only pay for
            # the Groebner comparison when the next level stays inside
            if _escapes(nxt.gens) is None and ideal_equal(current, nxt, budget):
                # I_{n+1} = I_n ⊆ m^{[p]}: the chain is stuck below m^{[p]} forever
                cert = Certificate(
                    FIXED_POINT_ENCLOSURE, {"generators": list(current.gens)}
                )
                return finish(
                    INFINITE, None, cert,
                    diagnostics=(f"I_n stabilized inside m^[p] at level {n}",),
                )
            levels.append(steps)
            current = nxt
    except BudgetExceededError as exc:
        return finish(
            UNKNOWN, None, None,
            diagnostics=(f"budget exhausted after {exc.steps} steps",),
        )
    return finish(LOWER_BOUND, n_max, None)


def _strict_chain_search(
    i1_gens: Sequence[Polynomial],
    delta: Polynomial,
    n: int,
    ring: PolynomialRing,
    budget: Budget,
    max_candidates: int = 20000,
) -> Optional[list[Polynomial]]:
    """Look for a strict chain g_1 → ... → g_n with g_1 a monomial multiple
    of an I_1 generator.

    Monomial multipliers up to p^{n−1}−1 per exponent suffice to reach every
    chain whose level-l element is a monomial times a θ-orbit value (the
    multiplier's exponents divide by p along the orbit).  Returns None when
    the search space is exhausted or too large; the levelled records in the
    certificate still re-verify in that case.
    """
    p = ring.field.p
    if n == 1:
        for g in i1_gens:
            if not in_max_ideal_frobenius_power(g, 1):
                return [g]
        return None
    bound = p ** (n - 1)  # exclusive per-variable multiplier bound
    if bound ** ring.nvars * len(i1_gens) > max_candidates:
        bound = max(p, int(max_candidates ** (1.0 / ring.nvars)))
    mults = sorted(
        itertools.product(range(bound), repeat=ring.nvars), key=sum
    )
    for mu in mults:
        for g in i1_gens:
            budget.tick()
            cand = g.mul_term(mu)
            chain = [cand]
            ok = True
            for _ in range(n - 1):
                cur = chain[-1]
                if not u_map(cur).is_zero():
                    ok = False
                    break
                chain.append(theta(cur, delta))
            if ok and len(chain) == n and not in_max_ideal_frobenius_power(chain[-1], 1):
                return chain
    return None


# ---------------------------------------------------------------------------
# the I_∞ fixed point
# ---------------------------------------------------------------------------


def qfs_decide(
    I: Ideal, budget: Optional[Budget] = None
) -> tuple[bool, Certificate]:
    """Quasi-F-splitness via the smallest fixed point I_∞.

    Iterates J_0 = (I^{[p]} : I), J_{k+1} = J_k + θ(F_*J_k ∩ Ker u) until the
    chain stabilizes; the limit is the smallest ideal containing (I^{[p]}:I)
    and closed under θ(F_*· ∩ Ker u), and the ring is quasi-F-split exactly
    when it is not contained in m^{[p]}.  Raises BudgetExceededError when the
    step budget runs out.
    """
    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    delta = delta1(f ** (p - 1))
    if len(I.gens) <= 1:
        # (f^p) : (f) = (f^{p−1}) in a domain
        J = Ideal(ring, [f ** (p - 1)])
    else:
        J = colon_ideal(bracket_power(I, 1), I, budget)
    iterations = 0
    while True:
        budget.tick()
        steps = _theta_images(J.gens, delta, ring, budget)
        nxt = Ideal(ring, _dedupe(list(J.gens) + [s.image for s in steps]))
        iterations += 1
        if ideal_equal(J, nxt, budget):
            break
        J = nxt
    gens = list(J.groebner(budget))
    cert = Certificate(
        I_INFTY_STABILIZED, {"generators": gens, "iterations": iterations}
    )
    return _escapes(gens) is not None, cert


def enclosure_closure(
    I: Ideal,
    seed: Sequence[Polynomial] = (),
    budget: Optional[Budget] = None,
) -> Ideal:
    """Smallest ideal containing I_1 and ``seed`` closed under θ(F_*· ∩ Ker u).

    Useful for completing a hand-guessed trap ideal into one that
    verify_infinity_certificate accepts: the closure always satisfies the
    containment conditions, so the only remaining question is whether it
    stays inside m^{[p]}.  With an empty seed this is the I_∞ of qfs_decide.
    """
    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    delta = delta1(f ** (p - 1))
    J = Ideal(ring, _dedupe(list(seed) + _fedder_ideal_gens(I.gens, ring)))
    while True:
        budget.tick()
        steps = _theta_images(J.gens, delta, ring, budget)
        nxt = Ideal(ring, _dedupe(list(J.gens) + [s.image for s in steps]))
        if ideal_equal(J, nxt, budget):
            return Ideal(ring, list(J.groebner(budget)))
        J = nxt


# ---------------------------------------------------------------------------
# quick non-quasi-F-split tests
# ---------------------------------------------------------------------------


def non_qfs_quick(f_list: Sequence[Polynomial]) -> Optional[Certificate]:
    """Sufficient conditions for infinite height, checked per-monomial only.

    (1) for p ≥ 3: f^{p−2} ∈ m^{[p]}  (at p = 2, f^0 = 1 never qualifies);
    (2) f^{p−1} ∈ m^{[p]} and every generator of
        (f^{p−2}, I^{[p]})·f^{p(p−2)}·Δ₁(f) lies in m^{[p²]}.

    Returns the first satisfied condition's certificate, else None.
    """
    gens = _as_gen_list(f_list)
    if not gens:
        return None
    ring = gens[0].ring
    p = ring.field.p
    f = _product(gens, ring)
    if p >= 3 and in_max_ideal_frobenius_power(f ** (p - 2), 1):
        return Certificate(NON_QFS, {"tag": TAG_FPM2, "element": f ** (p - 2)})
    if not in_max_ideal_frobenius_power(f ** (p - 1), 1):
        return None  # F-split, certainly not infinite
    d1 = delta1(f)
    scale = f ** (p * (p - 2)) * d1
    factors = [f ** (p - 2)] + [g.pth_power() for g in gens]
    products = [b * scale for b in factors]
    if all(in_max_ideal_frobenius_power(q, 2) for q in products if q):
        return Certificate(
            NON_QFS,
            {"tag": TAG_PRODUCT, "generators": list(products)},
        )
    return None


# ---------------------------------------------------------------------------
# certificate verification
# ---------------------------------------------------------------------------


def verify_witness_chain(
    I: Ideal,
    chain: Sequence[Polynomial],
    budget: Optional[Budget] = None,
    reasons: Optional[list[str]] = None,
) -> bool:
    """Check a strict θ-chain: g_1 ∈ I_1, u(F_*g_l) = 0 and θ(F_*g_l) = g_{l+1}
    for every step, and g_last ∉ m^{[p]}.

    A passing chain certifies height ≤ len(chain): membership g_l ∈ I_l
    follows inductively from I_{l+1} = θ(F_*I_l ∩ Ker u) + I_1."""

    def fail(msg: str) -> bool:
        if reasons is not None:
            reasons.append(msg)
        return False

    if not chain:
        return fail("empty chain")
    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    i1 = Ideal(ring, _fedder_ideal_gens(I.gens, ring))
    if not ideal_membership(chain[0], i1, budget):
        return fail(f"step 1: {chain[0]} is not in I_1")
    delta = delta1(f ** (p - 1))
    for l in range(len(chain) - 1):
        g = chain[l]
        if not u_map(g).is_zero():
            return fail(f"step {l + 1}: u(F_*g) = {u_map(g)} is nonzero")
        img = theta(g, delta)
        if img != chain[l + 1]:
            return fail(
                f"step {l + 1}: theta image {img} differs from recorded {chain[l + 1]}"
            )
    if in_max_ideal_frobenius_power(chain[-1], 1):
        return fail(f"final element {chain[-1]} lies in m^[p]")
    return True


def verify_witness_levels(
    I: Ideal,
    cert: Certificate,
    budget: Optional[Budget] = None,
    reasons: Optional[list[str]] = None,
) -> bool:
    """Re-verify a levelled ChainWitness.

    Rebuilds the generator pools from I_1: each level-l record (w, image) must
    satisfy w ∈ (pool_l), u(F_*w) = 0 and θ(F_*w) = image; the next pool is
    I_1's generators plus the images.  The escape element must belong to the
    final pool's ideal and lie outside m^{[p]}."""

    def fail(msg: str) -> bool:
        if reasons is not None:
            reasons.append(msg)
        return False

    if cert.kind != CHAIN_WITNESS:
        return fail(f"expected a {CHAIN_WITNESS} certificate, got {cert.kind}")
    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    i1 = _fedder_ideal_gens(I.gens, ring)
    delta = delta1(f ** (p - 1))
    pool = list(i1)
    levels: Sequence[Sequence[ChainStep]] = cert.data.get("levels", ())
    for l, records in enumerate(levels, start=1):
        pool_ideal = Ideal(ring, pool)
        images = []
        for rec in records:
            if not ideal_membership(rec.element, pool_ideal, budget):
                return fail(f"level {l}: {rec.element} is not in I_{l}")
            if not u_map(rec.element).is_zero():
                return fail(f"level {l}: u(F_*{rec.element}) is nonzero")
            img = theta(rec.element, delta)
            if img != rec.image:
                return fail(
                    f"level {l}: theta image {img} differs from recorded {rec.image}"
                )
            images.append(rec.image)
        pool = _dedupe(i1 + images)
    esc = cert.data.get("escape")
    if esc is None:
        return fail("certificate has no escape element")
    if not ideal_membership(esc, Ideal(ring, pool), budget):
        return fail(f"escape element {esc} is not in the final level's ideal")
    if in_max_ideal_frobenius_power(esc, 1):
        return fail(f"escape element {esc} lies in m^[p]")
    if cert.data.get("escape_level") != len(levels) + 1:
        return fail("escape level disagrees with the number of recorded levels")
    return True


def verify_infinity_certificate(
    I: Ideal,
    J: Ideal,
    budget: Optional[Budget] = None,
    reasons: Optional[list[str]] = None,
) -> bool:
    """True iff J ⊇ θ(F_*J ∩ Ker u) + I_1 and J ⊆ m^{[p]}.

    Such a J traps the whole I_n chain: I_1 ⊆ J and inductively
    I_{n+1} = θ(F_*I_n ∩ Ker u) + I_1 ⊆ J, so no I_n escapes m^{[p]} and the
    height is infinite."""

    def fail(msg: str) -> bool:
        if reasons is not None:
            reasons.append(msg)
        return False

    if budget is None:
        budget = Budget()
    ring = I.ring
    p = ring.field.p
    f = _product(I.gens, ring)
    delta = delta1(f ** (p - 1))
    for g in J.gens:
        if not in_max_ideal_frobenius_power(g, 1):
            return fail(f"generator {g} of J escapes m^[p]")
    for g in _fedder_ideal_gens(I.gens, ring):
        if not ideal_membership(g, J, budget):
            return fail(f"I_1 generator {g} is not in J")
    for step in _theta_images(J.gens, delta, ring, budget):
        if not ideal_membership(step.image, J, budget):
            return fail(f"theta image {step.image} (of {step.element}) is not in J")
    return True


def verify_certificate(
    I: Ideal,
    cert: Certificate,
    grading: Optional[Grading] = None,
    budget: Optional[Budget] = None,
    reasons: Optional[list[str]] = None,
) -> bool:
    """Dispatch re-verification on the certificate kind."""
    if cert.kind == COEFFICIENT_WITNESS:
        ok = verify_coefficient_witness(list(I.gens), cert, budget)
        if not ok and reasons is not None:
            reasons.append("recomputed coefficient disagrees with the certificate")
        return ok
    if cert.kind == CHAIN_WITNESS:
        if "chain" in cert.data:
            return verify_witness_chain(I, cert.data["chain"], budget, reasons)
        return verify_witness_levels(I, cert, budget, reasons)
    if cert.kind in (I_INFTY_STABILIZED, FIXED_POINT_ENCLOSURE):
        J = Ideal(I.ring, cert.data["generators"])
        return verify_infinity_certificate(I, J, budget, reasons)
    if cert.kind == NON_QFS:
        fresh = non_qfs_quick(list(I.gens))
        ok = fresh is not None and fresh.data["tag"] == cert.data["tag"]
        if not ok and reasons is not None:
            reasons.append("quick test no longer fires with the recorded tag")
        return ok
    if reasons is not None:
        reasons.append(f"unknown certificate kind {cert.kind}")
    return False


# ---------------------------------------------------------------------------
# fiber products
# ---------------------------------------------------------------------------


def joint_ring_of(a: PolynomialRing, b: PolynomialRing) -> PolynomialRing:
    """F_p[x-block, y-block] for two rings over the same prime field."""
    if a.field != b.field:
        raise RingError("fiber products need a common prime field")
    overlap = set(a.variables) & set(b.variables)
    if overlap:
        raise RingError(f"variable blocks overlap: {sorted(overlap)}")
    return PolynomialRing(a.field, a.variables + b.variables)


def embed_left(f: Polynomial, joint: PolynomialRing) -> Polynomial:
    pad = joint.nvars - f.ring.nvars
    return Polynomial(joint, {e + (0,) * pad: c for e, c in f.terms.items()})


def embed_right(f: Polynomial, joint: PolynomialRing) -> Polynomial:
    pad = joint.nvars - f.ring.nvars
    return Polynomial(joint, {(0,) * pad + e: c for e, c in f.terms.items()})


def product_witness(
    gs: Sequence[Polynomial],
    h: Polynomial,
    n: int,
    fx: Optional[Polynomial] = None,
    fy: Optional[Polynomial] = None,
) -> list[Polynomial]:
    """Combined splitting witnesses for a fiber product, in the joint ring.

    gs is a length-n chain for the first factor (caller-verified against its
    own ideal; the u-conditions are checked here), h an element of the second
    factor's ring whose iterate u^{n−1}(F^{n−1}_*h) escapes m^{[p]} — e.g.
    f_Y^{p−1} for an F-split second factor.  The blocks must be disjoint.

    With the factor equations fx, fy supplied the result is the strict
    θ-chain of the joint hypersurface: w₁ = g₁·h and w_{l+1} = θ(F_*w_l),
    which verify_witness_chain accepts against (fx, fy).  The driving
    identity (blocks disjoint, u(F_*g_l) = 0) is

        θ(F_*(g ⊗ b)) = θ_X(F_*g) ⊗ f_Y^{p−1}·u_Y(F_*b),

    so the second tensor factor runs through u-iterates of h scaled by
    f_Y^{p−1}.  Without fx, fy the raw tensor pairs g_i ⊗ u^{i−1}(F^{i−1}_*h)
    are returned; they witness the same height bound but only through the
    level conditions of the general theory, not as a literal θ-chain.
    """
    if n < 1 or len(gs) != n:
        raise RingError(f"need a chain of length n = {n}, got {len(gs)}")
    ring_x = gs[0].ring
    ring_y = h.ring
    joint = joint_ring_of(ring_x, ring_y)
    p = joint.field.p
    for l, g in enumerate(gs[:-1], start=1):
        if not u_map(g).is_zero():
            raise RingError(f"chain element {l} has nonzero u-image")
    survivor = iterated_u(h, n - 1)
    if survivor.is_zero() or in_max_ideal_frobenius_power(survivor, 1):
        raise RingError(
            "u^{n-1}(F^{n-1}_*h) lies in m^[p]; h does not witness height <= n-1... "
            "choose h with a surviving Frobenius iterate"
        )
    if fx is not None and fy is not None:
        big_f = embed_left(fx, joint) * embed_right(fy, joint)
        delta = delta1(big_f ** (p - 1))
        out = [embed_left(gs[0], joint) * embed_right(h, joint)]
        for _ in range(n - 1):
            out.append(theta(out[-1], delta))
        if in_max_ideal_frobenius_power(out[-1], 1):
            raise RingError(
                f"product chain collapses: final element {out[-1]} lies in m^[p]"
            )
        return out
    out = []
    for i, g in enumerate(gs, start=1):
        w = iterated_u(h, i - 1)
        out.append(embed_left(g, joint) * embed_right(w, joint))
    return out


# ---------------------------------------------------------------------------
# orchestrator
# ---------------------------------------------------------------------------


def height(
    system: Union[Ideal, Polynomial, Sequence[Polynomial]],
    grading: Optional[Grading] = None,
    n_max: int = DEFAULT_N_MAX,
    strategy: str = "auto",
    budget: Optional[Budget] = None,
    cross_check: bool = False,
) -> HeightResult:
    """Compute the quasi-F-split height, trying the cheapest route first.

    auto strategy: (a) the F-split monomial test; (b) the graded engine when
    its degree conditions hold (with the given grading, else the standard
    one); (c) the quick infinite-height tests; (d) the I_n chain up to n_max;
    (e) the I_∞ fixed point to separate Infinite from LowerBound.  Forced
    strategies: "graded", "local", "qfs".  With cross_check, the graded and
    local routes are both run and must agree.
    """
    gens = _as_gen_list(system)
    if not gens:
        raise RingError("height needs at least one polynomial")
    ring = gens[0].ring
    I = system if isinstance(system, Ideal) else Ideal(ring, gens)
    if budget is None:
        budget = Budget()
    t0 = time.perf_counter()

    def finish(res: HeightResult) -> HeightResult:
        res.steps = budget.steps
        res.wall_time_ms = (time.perf_counter() - t0) * 1000
        if cross_check and res.verdict in (FINITE, INFINITE):
            _assert_route_agreement(I, gens, grading, res, n_max, budget)
        return res

    if strategy == "local":
        return finish(height_local(I, n_max, budget))
    if strategy == "graded":
        g = grading if grading is not None else Grading.standard(ring.nvars)
        return finish(height_graded_cy(gens, g, n_max, budget))
    if strategy == "qfs":
        try:
            qfs, cert = qfs_decide(I, budget)
        except BudgetExceededError as exc:
            return finish(
                HeightResult(
                    UNKNOWN, None, None, route="i-infinity",
                    diagnostics=(f"budget exhausted after {exc.steps} steps",),
                )
            )
        if qfs:
            return finish(
                HeightResult(
                    LOWER_BOUND, 1, cert, route="i-infinity",
                    diagnostics=("quasi-F-split; height finite but not computed",),
                )
            )
        return finish(HeightResult(INFINITE, None, cert, route="i-infinity"))
    if strategy != "auto":
        raise RingError(f"unknown strategy {strategy!r}")

    # (a) F-split?
    if fedder_fsplit(gens):
        p = ring.field.p
        f = _product(gens, ring)
        cert = Certificate(CHAIN_WITNESS, {"chain": [f ** (p - 1)]})
        return finish(HeightResult(FINITE, 1, cert, route="fedder"))

    # (b) graded engine
    graded_result: Optional[HeightResult] = None
    g = grading if grading is not None else Grading.standard(ring.nvars)
    if graded_cy_applicable(gens, g) is None:
        graded_result = height_graded_cy(gens, g, n_max, budget)
        if graded_result.verdict == FINITE:
            return finish(graded_result)

    # (c) quick infinite-height tests
    quick = non_qfs_quick(gens)
    if quick is not None:
        return finish(HeightResult(INFINITE, None, quick, route="quick-tests"))

    # (d) the local chain — unless the graded engine already exhausted n_max,
    # in which case only the Infinite/LowerBound separation remains
    if graded_result is None:
        local = height_local(I, n_max, budget)
        if local.verdict in (FINITE, INFINITE):
            return finish(local)
        if local.verdict == UNKNOWN:
            return finish(local)

    # (e) I_∞ separates Infinite from LowerBound
    try:
        qfs, cert = qfs_decide(I, budget)
    except BudgetExceededError as exc:
        return finish(
            HeightResult(
                UNKNOWN, None, None, route="i-infinity",
                diagnostics=(f"budget exhausted after {exc.steps} steps",),
            )
        )
    if not qfs:
        return finish(HeightResult(INFINITE, None, cert, route="i-infinity"))
    return finish(
        HeightResult(
            LOWER_BOUND, n_max, cert, route="i-infinity",
            diagnostics=(
                f"quasi-F-split (I_infinity escapes m^[p]) but no level <= {n_max} "
                "escaped; the height is finite and exceeds the cutoff",
            ),
        )
    )


def _assert_route_agreement(
    I: Ideal,
    gens: Sequence[Polynomial],
    grading: Optional[Grading],
    res: HeightResult,
    n_max: int,
    budget: Budget,
) -> None:
    """Test-build hook: when the graded engine applies, the local chain must
    reproduce the verdict exactly."""
    g = grading if grading is not None else Grading.standard(I.ring.nvars)
    if graded_cy_applicable(list(gens), g) is not None:
        return
    graded = height_graded_cy(list(gens), g, n_max, budget)
    local = height_local(I, n_max, budget)
    if (graded.verdict, graded.n) != (local.verdict, local.n):
        raise AssertionError(
            f"route disagreement: graded {graded.verdict}({graded.n}) "
            f"vs local {local.verdict}({local.n})"
        )
