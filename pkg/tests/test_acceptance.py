"""Acceptance gate: every criterion at its stated tolerance and time budget.

Each test prints one pass/fail line.  Tolerances are exact cyclotomic
equality unless a p-adic precision is stated; the time bounds are the stated
wall-clock budgets.
"""

import json
import random
import time
from fractions import Fraction as F

import pytest

from iwasawalab.arith import (
    CLASS_NUMBER_ONE_DISCS,
    legendre_symbol,
    padic_ring_for_conductor,
)
from iwasawalab.chargroup import (
    FinAbGroup,
    GaloisAction,
    GroupAutomorphism,
    GroupChar,
    GroupHom,
    SemidirectGroup,
    char_table,
)
from iwasawalab.cli import RunConfig, canonical_body_bytes, run_suites
from iwasawalab.cmlattice import scan_discriminant, smallest_split_prime
from iwasawalab.descent import (
    DModel,
    hom_description,
    integral_descent_check,
    invert_values,
)
from iwasawalab.epsilon import (
    PSI_MINUS_X,
    PSI_X,
    epsilon_factor,
    local_char_table,
    verify_sigma_delta,
)
from iwasawalab.grpring import (
    CYCLO,
    Measure,
    PadicCoeffs,
    assemble_from_components,
    convolve,
    eval_char,
    eval_rep,
    extend_trivially,
    idempotent_split,
    is_unit,
    pushforward,
    random_measure,
    synthetic_interpolation_check,
)
from iwasawalab.reps import (
    classify_irreps,
    induce,
    inner_product_fast,
    inner_product_with_char_fast,
)
from iwasawalab.symratio import (
    Relation,
    SymExpr,
    build_char_interpolation_rhs,
    build_period_correction,
    build_rep_interpolation_rhs,
    expected_period_ratio,
    gamma_ratio,
    period_correction_inverse,
    reduce_ratio,
)


class Budget:
    def __init__(self, name, seconds):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, exc_type, *_):
        elapsed = time.perf_counter() - self.t0
        status = "PASS" if exc_type is None else "FAIL"
        print(f"{status} {self.name} ({elapsed:.2f}s / budget {self.seconds}s)")
        if exc_type is None:
            assert elapsed < self.seconds, (
                f"{self.name} exceeded its {self.seconds}s budget: {elapsed:.2f}s")
        return False


def _level1_ctx(k=2):
    from iwasawalab.symratio import RatioContext

    g = FinAbGroup((5, 5))
    g.add_inertia_chain("p", [[(1, 0)]])
    g.add_inertia_chain("pbar", [[(0, 1)]])
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    return RatioContext(sg, k=k, trivial_nebentypus=(k == 2))


def test_criterion_01_epsilon_duality():
    with Budget("criterion-01 epsilon duality (62 characters, exact)", 30):
        count = 0
        for p in (5, 7):
            for chi in local_char_table(p, 2):
                lhs = epsilon_factor(chi.bar(), PSI_X) * epsilon_factor(chi, PSI_MINUS_X)
                assert lhs == p ** chi.n
                count += 1
        assert count == 62


def test_criterion_02_gauss_sigma_lemma():
    with Budget("criterion-02 gauss-sum lemma (all admissible triples, exact)", 60):
        pairs = 0
        for p in (5, 7):
            for d in CLASS_NUMBER_ONE_DISCS:
                if d % p == 0 or legendre_symbol(-d, p) != 1:
                    continue
                pairs += 1
                for chi in local_char_table(p, 2):
                    if chi.n >= 1:
                        assert verify_sigma_delta(chi, d).holds
        assert pairs == 5  # (5,4),(5,11),(5,19),(7,3),(7,19)


def test_criterion_03_elliptic_ratio_chains():
    with Budget("criterion-03 level-1 ratio chains reduce (exact symbolic)", 10):
        ctx = _level1_ctx()
        lom = build_period_correction(ctx)
        assert convolve(lom, period_correction_inverse(ctx)) == \
            Measure.delta(ctx.sg, lom.ring)
        type_b = type_a = 0
        for rho in ctx.reps:
            dual = rho.contragredient()
            num = SymExpr(ctx.rel, 1)
            for chix in dual.restriction():
                num = num * build_char_interpolation_rhs(
                    ctx, ctx.idx_of(chix), "elliptic-pbar")
            den = build_rep_interpolation_rhs(ctx, rho, "elliptic")
            result, _ = reduce_ratio(ctx, num, den)
            assert result.is_monomial(), f"residual symbols: {result.render()}"
            assert result == expected_period_ratio(ctx, rho)
            # the closing identity: ratio equals the period-correction value
            assert result == eval_rep(lom, rho)
            if rho.kind == "induced":
                type_b += 1
            else:
                type_a += 1
        assert type_b == 10 and type_a == 10


def test_criterion_04_weight_k_suite():
    with Budget("criterion-04 weight-k gamma grid and both propositions", 20):
        from math import factorial
        for k in range(2, 7):
            for j in range(-3, 1):
                if not (0 < k - 1 + j):
                    continue
                rel = Relation(k, False)
                assert gamma_ratio(k, j, rel) == SymExpr(
                    rel, F(factorial(-j), factorial(k - 2 + j)),
                    {"2pi": k - 2 + 2 * j})
        for k in (3, 5):
            ctx = _level1_ctx(k)
            samples = [r for r in ctx.reps if r.kind == "linear"][:2] + \
                      [r for r in ctx.reps if r.kind == "induced"][:2]
            for j in (0, -1, -2):
                if not (0 < k - 1 + j):
                    continue
                for variant in ("weightk-1", "weightk-2"):
                    for rho in samples:
                        num = SymExpr(ctx.rel, 1)
                        for chix in rho.restriction():
                            num = num * build_char_interpolation_rhs(
                                ctx, ctx.idx_of(chix), variant, j)
                        den = build_rep_interpolation_rhs(ctx, rho, variant, j)
                        result, _ = reduce_ratio(ctx, num, den)
                        assert result.is_monomial()
                        assert result == expected_period_ratio(ctx, rho)


def test_criterion_05_extended_measure():
    with Budget("criterion-05 extended-measure lemma (100 per ring)", 10):
        rng = random.Random(11)
        g = FinAbGroup((5,))
        sg = SemidirectGroup(g, GroupAutomorphism.inversion(g))
        chi = GroupChar(g, (1,))
        rho = induce(sg, chi)
        plus = classify_irreps(sg)[0]
        for ring in (CYCLO, PadicCoeffs(padic_ring_for_conductor(5, 5, 8))):
            for _ in range(100):
                f = random_measure(g, ring, rng, density=0.6)
                ext = extend_trivially(f, sg)
                assert eval_rep(ext, rho) == \
                    eval_char(f, chi) * eval_char(f, sg.conjugate_char(chi))
                assert eval_rep(ext, plus) == eval_char(f, plus.chi)


def test_criterion_06_idempotent_decomposition():
    with Budget("criterion-06 idempotent split/assemble (100 random)", 10):
        rng = random.Random(12)
        big = FinAbGroup((4, 25))
        part = FinAbGroup((25,))
        thetas = char_table(FinAbGroup((4,)))
        for _ in range(100):
            f = random_measure(big, CYCLO, rng, density=0.25)
            comps = idempotent_split(f, (0,))
            assert assemble_from_components(comps, big, (0,)) == f
            comps2 = {t.exponents: random_measure(part, CYCLO, rng, density=0.3)
                      for t in thetas}
            f2 = assemble_from_components(comps2, big, (0,))
            assert idempotent_split(f2, (0,)) == comps2
        small = FinAbGroup((4, 5))
        homt = GroupHom(big, small, ((1, 0), (0, 1)))
        inner = GroupHom(part, FinAbGroup((5,)), ((1,),))
        ft = random_measure(big, CYCLO, rng, density=0.2)
        lhs = {k: pushforward(m, inner) for k, m in idempotent_split(ft, (0,)).items()}
        assert lhs == idempotent_split(pushforward(ft, homt), (0,))


def test_criterion_07_period_correction_unit():
    with Budget("criterion-07 period-correction unit (50 pairs, precision 10)", 5):
        ctx = _level1_ctx()
        lom_sym = build_period_correction(ctx)
        assert convolve(lom_sym, period_correction_inverse(ctx)) == \
            Measure.delta(ctx.sg, lom_sym.ring)
        ring = PadicCoeffs(padic_ring_for_conductor(5, 5, 10))
        g = FinAbGroup((5,))
        sg = SemidirectGroup(g, GroupAutomorphism.inversion(g))
        irreps = classify_irreps(sg)
        half = ring.from_fraction(F(1, 2))
        e0, c0 = (g.identity(), 0), (g.identity(), 1)
        rng = random.Random(13)
        for _ in range(50):
            a = ring.from_int(1 + rng.randrange(4) + 5 * rng.randrange(5 ** 6))
            b = ring.from_int(1 + rng.randrange(4) + 5 * rng.randrange(5 ** 6))
            lom = Measure(sg, ring, {e0: (a + b) * half, c0: (a - b) * half})
            ok, inv = is_unit(lom)
            assert ok and convolve(lom, inv) == Measure.delta(sg, ring)
            for rho in irreps:
                want = a * b if rho.kind == "induced" else (a if rho.sign == 1 else b)
                assert eval_rep(lom, rho) == want


def test_criterion_08_lattice_lemma():
    with Budget("criterion-08 period-lattice scans (nine discriminants)", 10):
        for d in CLASS_NUMBER_ONE_DISCS:
            p = smallest_split_prime(d)
            report = scan_discriminant(d, p, "maximal")
            if d % 4 == 3:
                assert report.empty_scan  # documented outcome
            else:
                assert not report.empty_scan
                assert report.all_stable_pass


def test_criterion_09_fix_lemma_descent():
    with Budget("criterion-09 integral descent (100 vectors, precision 12)", 30):
        rng = random.Random(14)
        plan = [(1, 60, 4), (2, 30, 4), (3, 10, 2)]
        total = 0
        for expo, count, f_deg in plan:
            n = 5 ** expo
            gen_model = DModel(5, expo, precision=12 + expo, unram_degree=f_deg)
            G = FinAbGroup((n,))
            action = GaloisAction(((2,),)) if n == 5 else \
                GaloisAction(((_unit_gen(n),),))
            for _ in range(count):
                f0 = Measure(G, gen_model.coeffs,
                             {(rng.randrange(n),): gen_model.coeffs.from_int(
                                 1 + rng.randrange(5 ** 4)) for _ in range(6)})
                vv = hom_description(f0)
                assert vv.check_equivariance(gen_model, action)
                assert all(gen_model.in_L_part(v) for v in vv.values.values())
                back = invert_values(vv, gen_model.coeffs)
                check_model = DModel(5, expo,
                                     precision=back.ring.ring.precision,
                                     unram_degree=f_deg)
                verdict = integral_descent_check(back, check_model)
                assert verdict.hypothesis_holds and verdict.conclusion_holds
                total += 1
            viol_model = DModel(5, expo, precision=12, unram_degree=f_deg)
            beta = viol_model.random_non_O_unit(rng)
            bad = Measure.delta(G, viol_model.coeffs).scale(beta)
            verdict = integral_descent_check(bad, viol_model)
            assert not verdict.hypothesis_holds and verdict.vacuous
            assert verdict.bad_values
        assert total == 100


def _unit_gen(n):
    from iwasawalab.arith import primitive_root
    return primitive_root(n)


def test_criterion_10_representation_suite():
    with Budget("criterion-10 representation suite (towers up to order 500)", 30):
        towers = []
        g = FinAbGroup((5, 5))
        towers.append(SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1)))
        g1 = FinAbGroup((5,))
        towers.append(SemidirectGroup(g1, GroupAutomorphism.inversion(g1)))
        g2 = FinAbGroup((25,))
        towers.append(SemidirectGroup(g2, GroupAutomorphism.inversion(g2)))
        g3 = FinAbGroup((4, 25))
        towers.append(SemidirectGroup(g3, GroupAutomorphism.inversion(g3)))
        for sg in towers:
            assert sg.order() <= 500
            irreps = classify_irreps(sg)
            assert sum(r.dimension ** 2 for r in irreps) == sg.order()
            table = char_table(sg.base)
            inductions = [induce(sg, chi) for chi in table]
            for rho in irreps:
                assert inner_product_fast(rho, rho) == 1
                for chi, ind in zip(table, inductions):
                    assert inner_product_with_char_fast(rho, chi) == \
                        inner_product_fast(rho, ind)


def test_criterion_11_synthetic_pipeline():
    with Budget("criterion-11 synthetic construction pipeline (20 runs)", 20):
        result = synthetic_interpolation_check(5, 11, 20, random.Random(15))
        assert result.checks >= 20 * 4 * 4
        assert not result.failures


def test_criterion_12_deterministic_reports():
    with Budget("criterion-12 byte-identical verify report bodies", 60):
        config = RunConfig(suites=("epsilon", "ratio", "lattice", "reps", "measure"))
        body1, side1 = run_suites(config)
        body2, side2 = run_suites(config)
        assert canonical_body_bytes(body1) == canonical_body_bytes(body2)
        assert side1["body_sha256"] == side2["body_sha256"]
        assert body1["summary"]["failures"] == 0
        assert body1["summary"]["errors"] == 0
