"""Paraproducts, the dyadic shift, commutators, and the six-term expansion."""

import numpy as np
import pytest

import oracles
from dyadbloom import (
    DyadicGrid,
    DyadicInterval,
    InadmissibleLevelError,
    StepFunction,
    Weight,
    commutator_shift,
    expansion_terms,
    haar_function,
    haar_shift,
    is_admissible,
    paraproduct,
    paraproduct_adjoint,
    project_admissible,
    remainder_closed_form,
)
from dyadbloom.grid import analyze_leaves


def _pair(depth, seed, admissible=True):
    r = np.random.default_rng(seed)
    grid = DyadicGrid(depth)
    b = StepFunction(grid, r.standard_normal(grid.n_leaves))
    f = StepFunction(grid, r.standard_normal(grid.n_leaves))
    if admissible:
        return project_admissible(b), project_admissible(f)
    return b, f


def test_paraproduct_matches_oracle():
    for seed in range(4):
        b, f = _pair(4, 200 + seed, admissible=False)
        want = oracles.paraproduct_oracle(b.values, f.values, 4)
        got = paraproduct(b, f).values
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)


def test_paraproduct_adjoint_matches_oracle():
    for seed in range(4):
        b, f = _pair(4, 210 + seed, admissible=False)
        want = oracles.paraproduct_adjoint_oracle(b.values, f.values, 4)
        got = paraproduct_adjoint(b, f).values
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)


def test_paraproduct_output_is_mean_free():
    b, f = _pair(6, 3, admissible=False)
    assert abs(paraproduct(b, f).integral()) <= 1e-15


def test_adjointness_in_plain_l2():
    # <Pi_b f, g> = <f, Pi*_b g> for every pair, no weights involved
    r = np.random.default_rng(77)
    grid = DyadicGrid(5)
    for _ in range(5):
        b = StepFunction(grid, r.standard_normal(grid.n_leaves))
        f = StepFunction(grid, r.standard_normal(grid.n_leaves))
        g = StepFunction(grid, r.standard_normal(grid.n_leaves))
        lhs = float((paraproduct(b, f).values * g.values).mean())
        rhs = float((f.values * paraproduct_adjoint(b, g).values).mean())
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-13)


def test_product_decomposition_is_an_identity():
    # b g = <b><g> + Pi_b g + Pi_g b + Pi*_b g for arbitrary step functions
    for seed in range(5):
        b, g = _pair(5, 300 + seed, admissible=False)
        lhs = (b * g).values
        rhs = (
            b.integral() * g.integral()
            + paraproduct(b, g).values
            + paraproduct(g, b).values
            + paraproduct_adjoint(b, g).values
        )
        scale = max(1.0, float(np.abs(lhs).max()))
        assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_shift_matches_spectrum_oracle():
    for seed in range(4):
        _, f = _pair(5, 400 + seed)
        want = oracles.shift_oracle(f.values, 5)
        got = haar_shift(f).values
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)


def test_shift_of_root_haar_is_quarter_pattern(grid2):
    h = haar_function(grid2, grid2.root)
    np.testing.assert_array_equal(haar_shift(h).values, [-1.0, 1.0, 1.0, -1.0])


def test_shift_kills_constants(grid4):
    c = StepFunction.constant(grid4, 5.5)
    assert np.all(haar_shift(c).values == 0.0)


def test_shift_is_isometry_on_admissible_mean_free():
    for seed in range(5):
        _, f = _pair(6, 500 + seed)
        f0 = f - f.integral()
        assert haar_shift(f0).l2_norm() == pytest.approx(f0.l2_norm(), rel=1e-13)


def test_shift_strict_mode_rejects_deepest_level():
    grid = DyadicGrid(3)
    bad = haar_function(grid, DyadicInterval(2, 1))
    with pytest.raises(InadmissibleLevelError) as exc:
        haar_shift(bad)
    assert exc.value.level == 2
    assert exc.value.max_abs > 0


def test_shift_truncate_mode_flags_and_projects():
    grid = DyadicGrid(3)
    bad = haar_function(grid, DyadicInterval(2, 1))
    out, truncated = haar_shift(bad, mode="truncate", return_flag=True)
    assert truncated
    assert np.all(out.values == 0.0)
    good = haar_function(grid, grid.root)
    out2, flag2 = haar_shift(good, mode="truncate", return_flag=True)
    assert not flag2
    np.testing.assert_array_equal(out2.values, haar_shift(good).values)


def test_admissibility_projection():
    b, _ = _pair(5, 9, admissible=False)
    assert not is_admissible(b)
    p = project_admissible(b)
    assert is_admissible(p)
    # idempotent up to resynthesis ulps, and levels <= depth-2 are untouched
    np.testing.assert_allclose(project_admissible(p).values, p.values, rtol=0, atol=1e-14)
    _, cb = analyze_leaves(b.values, 5)
    _, cp = analyze_leaves(p.values, 5)
    for k in range(4):
        np.testing.assert_allclose(cp[k], cb[k], rtol=0, atol=1e-13)
    assert np.abs(cp[4]).max() <= 1e-13


def test_commutator_definition():
    # [b, T]f = b(Tf) - T(bf), checked against the direct composition
    for seed in range(4):
        b, f = _pair(5, 600 + seed)
        direct = b * haar_shift(f) - haar_shift(b * f, mode="truncate")
        got = commutator_shift(b, f)
        np.testing.assert_allclose(got.values, direct.values, rtol=0, atol=1e-12)


def test_commutator_worked_example(grid2):
    h = haar_function(grid2, grid2.root)
    np.testing.assert_array_equal(commutator_shift(h, h).values, [1.0, -1.0, 1.0, -1.0])


def test_constant_symbol_commutes(grid4):
    _, f = _pair(4, 11)
    # power-of-two constant: both compositions stay exact, commutator is 0.0
    c2 = StepFunction.constant(grid4, 2.0)
    assert np.all(commutator_shift(c2, f).values == 0.0)
    # generic constant: the two compositions round in different orders
    c = StepFunction.constant(grid4, 2.5)
    assert np.abs(commutator_shift(c, f).values).max() <= 1e-14


def test_six_term_expansion_reproduces_commutator():
    for depth in (4, 5, 6):
        for seed in range(3):
            b, f = _pair(depth, 700 + seed)
            terms = expansion_terms(b, f)
            scale = max(1.0, float(np.abs(terms.commutator.values).max()))
            assert terms.residual() <= 1e-12 * scale


def test_expansion_signs_are_the_unique_working_ones():
    # negating the first four terms breaks the identity by an O(1) amount,
    # so a sign regression cannot hide inside the tolerance
    b, f = _pair(5, 909)
    terms = expansion_terms(b, f)
    scale = max(1.0, float(np.abs(terms.commutator.values).max()))
    assert terms.sign_flipped_residual() > 0.05 * scale


def test_remainder_closed_form_equals_two_term_difference():
    for seed in range(4):
        b, f = _pair(5, 800 + seed)
        terms = expansion_terms(b, f)
        rem = remainder_closed_form(b, f)
        assert np.abs(rem.values - terms.remainder().values).max() <= 1e-12


def test_remainder_quarter_pattern_oracle():
    # Sigma bhat(I) fhat(I) |I|^{-1} (+1,-1,+1,-1) on the quarters of I
    depth = 4
    b, f = _pair(depth, 77)
    _, cb = analyze_leaves(b.values, depth)
    _, cf = analyze_leaves(f.values, depth)
    n = 1 << depth
    want = np.zeros(n)
    for k in range(depth - 1):
        for j in range(1 << k):
            s = cb[k][j] * cf[k][j] * (1 << k)
            width = n >> (k + 2)
            base = j * (n >> k)
            want[base : base + width] += s
            want[base + width : base + 2 * width] -= s
            want[base + 2 * width : base + 3 * width] += s
            want[base + 3 * width : base + 4 * width] -= s
    got = remainder_closed_form(b, f).values
    np.testing.assert_allclose(got, want, rtol=0, atol=1e-13)


def test_remainder_energy_identity():
    # lambda-weighted square-function energy of the remainder equals
    # Sigma bhat^2 fhat^2 <lambda>_I / |I|
    r = np.random.default_rng(5150)
    depth = 5
    grid = DyadicGrid(depth)
    lam = Weight(StepFunction(grid, np.exp(r.uniform(-1, 1, grid.n_leaves))))
    b, f = _pair(depth, 81)
    rem = remainder_closed_form(b, f)
    _, cr = analyze_leaves(rem.values, depth)
    n = grid.n_leaves
    sq = np.zeros(n)
    for k in range(depth):
        sq += np.repeat(cr[k] ** 2 * (1 << k), n >> k)
    measured = float((sq * lam.values).mean())
    _, cb = analyze_leaves(b.values, depth)
    _, cf = analyze_leaves(f.values, depth)
    predicted = sum(
        float((cb[k] ** 2 * cf[k] ** 2 * (1 << k) * lam.averages_at_level(k)).sum())
        for k in range(depth - 1)
    )
    assert measured == pytest.approx(predicted, rel=1e-11)


def test_expansion_strict_mode_requires_admissible_inputs():
    b, f = _pair(4, 13, admissible=False)
    with pytest.raises(InadmissibleLevelError):
        expansion_terms(b, f)
    with pytest.raises(InadmissibleLevelError):
        commutator_shift(b, f)
