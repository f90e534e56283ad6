"""Finite-level Galois-descent tests."""

import random

import pytest

from iwasawalab.chargroup import (
    FinAbGroup,
    GaloisAction,
    GroupAutomorphism,
    GroupChar,
    GroupHom,
    SemidirectGroup,
    char_table,
)
from iwasawalab.descent import (
    DescentError,
    DModel,
    det_gamma,
    det_map,
    ev_kernel_check,
    ev_of,
    hom_description,
    integral_descent_check,
    invert_values,
    twist_invariant_family_from_unit,
    unit_descent_search,
)
from iwasawalab.grpring import (
    CYCLO,
    Measure,
    convolve,
    eval_rep,
    is_unit,
    random_measure,
    twist,
)
from iwasawalab.reps import classify_irreps


def _model(k, precision=12, f=4):
    return DModel(5, k, precision=precision, unram_degree=f)


def test_hom_description_spec_examples():
    model = _model(1)
    G = FinAbGroup((5,))
    ring = model.coeffs
    d = hom_description(Measure.delta(G, ring))
    assert all(v == model.ring.one() for v in d.values.values())
    g = (2,)
    dg = hom_description(Measure.delta(G, ring, g))
    for chi, v in dg.values.items():
        assert v == ring.from_cyclo(chi.value(g))


def test_hom_invert_roundtrip_100_random_vectors():
    model = DModel(5, 1, precision=10, unram_degree=2)
    G = FinAbGroup((5,))
    ring = model.coeffs
    rng = random.Random(0)
    for _ in range(100):
        f = random_measure(G, ring, rng, density=0.7, span=30)
        v = hom_description(f)
        back = invert_values(v, ring)
        lowered = Measure(G, back.ring,
                          {g: c.reduce_precision(back.ring.ring.precision)
                           for g, c in f.coeffs.items()})
        assert back == lowered


def test_hom_description_is_ring_map():
    model = DModel(5, 1, precision=8, unram_degree=2)
    G = FinAbGroup((5,))
    ring = model.coeffs
    rng = random.Random(1)
    for _ in range(100):
        f, g = (random_measure(G, ring, rng, density=0.5) for _ in range(2))
        hf, hg = hom_description(f), hom_description(g)
        hfg = hom_description(convolve(f, g))
        assert all(hfg.values[c] == hf.values[c] * hg.values[c] for c in hf.values)


def test_equivariance_check():
    model = DModel(5, 2, precision=10, unram_degree=2)
    G = FinAbGroup((25,))
    rng = random.Random(2)
    f = random_measure(G, model.coeffs, rng, density=0.5)
    v = hom_description(f)
    assert v.check_equivariance(model, GaloisAction(((2,),)))
    # break equivariance at one character
    chi1 = GroupChar(G, (1,))
    v.values[chi1] = v.values[chi1] + model.ring.from_int(1)
    assert not v.check_equivariance(model, GaloisAction(((2,),)))


def test_integral_descent_forward_direction():
    model = _model(2)
    big = DModel(5, 2, precision=14, unram_degree=4)
    G = FinAbGroup((25,))
    rng = random.Random(3)
    f = random_measure(G, big.coeffs, rng, density=0.6, span=40)
    back = invert_values(hom_description(f), big.coeffs)
    verdict = integral_descent_check(back, _model(2, precision=12))
    assert verdict.hypothesis_holds and verdict.conclusion_holds
    assert verdict.lemma_respected


def test_integral_descent_violation_is_vacuous_with_witness():
    model = _model(1, precision=10)
    G = FinAbGroup((5,))
    rng = random.Random(4)
    c = model.random_non_O_unit(rng)
    f = Measure.delta(G, model.coeffs).scale(c)
    verdict = integral_descent_check(f, model)
    assert not verdict.hypothesis_holds
    assert verdict.vacuous
    assert verdict.bad_values  # the augmentation value c itself


def test_integral_descent_torsion_guard():
    model = _model(1)
    bad = FinAbGroup((3,))  # 3 does not divide p - 1 = 4
    with pytest.raises(DescentError):
        integral_descent_check(Measure.delta(bad, model.coeffs), model)
    mixed = FinAbGroup((10,))
    with pytest.raises(DescentError):
        integral_descent_check(Measure.delta(mixed, model.coeffs), model)


def test_det_map_multiplicative_and_requires_unit():
    g = FinAbGroup((5,))
    sg = SemidirectGroup(g, GroupAutomorphism.inversion(g))
    irreps = classify_irreps(sg)
    model = DModel(5, 1, precision=10, unram_degree=1)
    ring = model.coeffs
    rng = random.Random(5)
    elements = sg.elements()
    checked = 0
    for _ in range(100):
        # certifiable units: scaled group elements, or measures supported on
        # the abelian base with unit augmentation
        def unit():
            if rng.random() < 0.5:
                x = elements[rng.randrange(len(elements))]
                return Measure.delta(sg, ring, x).scale(ring.from_int(1 + rng.randrange(4)))
            m = random_measure(sg.base, ring, rng, density=0.6)
            from iwasawalab.grpring import extend_trivially
            return extend_trivially(m, sg)

        u, v = unit(), unit()
        try:
            du, dv = det_map(u, irreps), det_map(v, irreps)
        except DescentError:
            continue
        # the product may escape every abelian subgroup, so its det values
        # are computed directly; multiplicativity is the point being tested
        prod = convolve(u, v)
        assert all(eval_rep(prod, rho) == du[i] * dv[i]
                   for i, rho in enumerate(irreps))
        checked += 1
    assert checked >= 30
    with pytest.raises(DescentError):
        det_map(Measure.delta(sg, ring).scale(ring.from_int(5)), irreps)


def test_det_constant_on_character_functions():
    # Ind chi and Ind chi^c share the character, so dets agree
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    from iwasawalab.reps import induce
    chi = GroupChar(g, (1, 2))
    rng = random.Random(6)
    for _ in range(10):
        f = random_measure(sg, CYCLO, rng, density=0.2)
        assert eval_rep(f, induce(sg, chi)) == eval_rep(f, induce(sg, sg.conjugate_char(chi)))


def test_commuting_square_ev_det():
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    gamma_hom = GroupHom(g, FinAbGroup((5,)), ((1, 1),))
    rng = random.Random(7)
    irreps = classify_irreps(sg)
    for _ in range(20):
        f = random_measure(sg, CYCLO, rng, density=0.2)
        for rho in irreps[::4]:
            assert ev_of(det_gamma(f, rho, gamma_hom)) == eval_rep(f, rho)


def test_det_gamma_twist_invariance():
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    gamma_hom = GroupHom(g, FinAbGroup((5,)), ((1, 1),))
    rng = random.Random(8)
    irreps = classify_irreps(sg)
    f = random_measure(sg, CYCLO, rng, density=0.3)
    for chi_g in char_table(gamma_hom.target):
        pulled = gamma_hom.pullback_char(chi_g)
        for rho in irreps[::6]:
            lhs = det_gamma(f, rho.tensor_char(pulled), gamma_hom)
            rhs = twist(det_gamma(f, rho, gamma_hom), chi_g.inverse())
            assert lhs == rhs


def test_ev_kernel_trivial_family_passes():
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    gamma_hom = GroupHom(g, FinAbGroup((5,)), ((1, 1),))
    fam = twist_invariant_family_from_unit(sg, gamma_hom, Measure.delta(sg, CYCLO))
    rep = ev_kernel_check(sg, gamma_hom, fam, CYCLO)
    assert rep.twist_invariant and rep.all_ev_trivial and rep.kernel_trivial


def test_ev_kernel_detects_nontrivial_family():
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    gamma_hom = GroupHom(g, FinAbGroup((5,)), ((1, 1),))
    u = Measure.delta(sg, CYCLO, ((1, 0), 0))  # pr(g) = 1 != 0
    fam = twist_invariant_family_from_unit(sg, gamma_hom, u)
    rep = ev_kernel_check(sg, gamma_hom, fam, CYCLO)
    assert rep.twist_invariant
    assert not rep.all_ev_trivial
    assert rep.witness is not None and rep.witness[1] == "ev"


def test_ev_kernel_randomly_generated_families_levels_5_and_25():
    # level p: dense random units; level p^2: sparse (delta-type) units keep
    # the exhaustive Fourier check tractable while exercising the same logic
    rng = random.Random(9)
    for n, dense in ((5, True), (25, False)):
        g = FinAbGroup((n, n))
        sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
        gamma_hom = GroupHom(g, FinAbGroup((n,)), ((1, 1),))
        for _ in (0, 1):
            if dense:
                u = random_measure(sg, CYCLO, rng, density=0.3)
            else:
                x = ((rng.randrange(n), rng.randrange(n)), 0)
                u = Measure.delta(sg, CYCLO, x)
            fam = twist_invariant_family_from_unit(sg, gamma_hom, u)
            rep = ev_kernel_check(sg, gamma_hom, fam, CYCLO)
            assert rep.twist_invariant
            if rep.all_ev_trivial:
                assert rep.kernel_trivial


def test_ev_kernel_flags_broken_invariance():
    g = FinAbGroup((5, 5))
    sg = SemidirectGroup(g, GroupAutomorphism.swap(g, 0, 1))
    gamma_hom = GroupHom(g, FinAbGroup((5,)), ((1, 1),))
    fam = twist_invariant_family_from_unit(sg, gamma_hom, Measure.delta(sg, CYCLO))
    fam[3] = fam[3] + Measure.delta(gamma_hom.target, CYCLO, (2,))
    rep = ev_kernel_check(sg, gamma_hom, fam, CYCLO)
    assert not rep.twist_invariant
    assert rep.witness is not None


def test_unit_descent_search_reports():
    model = DModel(5, 1, precision=10, unram_degree=2)
    g = FinAbGroup((5,))
    sg = SemidirectGroup(g, GroupAutomorphism.inversion(g))
    ring = model.coeffs
    # already over O
    u0 = Measure.delta(sg, ring, ((2,), 0)).scale(ring.from_int(3))
    r0 = unit_descent_search(u0, model, sg)
    assert r0.found and r0.candidate == u0
    # non-invariant D-coefficients are rejected up front
    rng = random.Random(10)
    beta_unit = model.random_non_O_unit(rng)
    uD = Measure.delta(sg, ring).scale(beta_unit)
    with pytest.raises(DescentError):
        unit_descent_search(uD, model, sg)
    # genuine D-coefficients with invariant det: u * frob(u) has norm-type det
    u1 = Measure.delta(sg, ring).scale(beta_unit)
    u1 = u1 + Measure.delta(sg, ring, ((1,), 0)).scale(ring.from_int(5))
    conj = Measure(sg, ring, {x: model.ring.frobenius(c) for x, c in u1.coeffs.items()})
    norm_u = convolve(u1, conj)
    ok, _ = is_unit(norm_u)
    if ok:
        r1 = unit_descent_search(norm_u, model, sg)
        assert r1.invariant
        assert r1.found or r1.searched > 0  # outcome is data either way
