import numpy as np
import pytest
from numpy.polynomial import polynomial as P

import shocklab as sl
from shocklab.errors import EqualStates, NotBurgers, WrongOrder
from shocklab.fluxes import is_burgers


def test_eval_flux_burgers_values(burgers2):
    assert np.allclose(sl.eval_flux(burgers2, 1.0), [1.0, 1.0])
    assert np.allclose(sl.eval_flux(burgers2, 0.0, order=1), [0.0, 0.0])
    assert np.allclose(sl.eval_flux(sl.burgers_flux(3), 2.0), [4.0, 8.0, 16.0])


def test_eval_flux_rejects_bad_order(burgers2):
    with pytest.raises(ValueError):
        sl.eval_flux(burgers2, 1.0, order=3)


def test_flux_requires_coefficients():
    with pytest.raises(ValueError):
        sl.Flux(((),))
    with pytest.raises(ValueError):
        sl.Flux(())


def test_derivative_of_constant_component_is_zero():
    f = sl.Flux(((5.0,), (1.0, 2.0)))
    assert np.allclose(f.value(3.0, order=2), [0.0, 0.0])


def test_make_shock_pair_symmetric(burgers2):
    p = sl.make_shock_pair(burgers2, 1.0, -1.0)
    assert np.allclose(p.velocity, [0.0, 1.0])
    assert p.reduced.coeffs == ((0.0, 0.0, 1.0), (0.0, -1.0, 0.0, 1.0))
    assert np.allclose(p.f_bar, [1.0, 0.0])


def test_make_shock_pair_one_zero(burgers2):
    p = sl.make_shock_pair(burgers2, 1.0, 0.0)
    assert np.allclose(p.velocity, [1.0, 1.0])
    assert p.reduced.coeffs == ((0.0, -1.0, 1.0), (0.0, -1.0, 0.0, 1.0))


def test_make_shock_pair_errors(burgers2):
    with pytest.raises(EqualStates):
        sl.make_shock_pair(burgers2, 0.5, 0.5)
    with pytest.raises(WrongOrder):
        sl.make_shock_pair(burgers2, -1.0, 1.0)


def test_pair_invariants_random(burgers2, rng):
    for _ in range(50):
        lo, hi = np.sort(rng.uniform(-2, 2, 2))
        if hi - lo < 1e-3:
            continue
        p = sl.make_shock_pair(burgers2, hi, lo)
        scale = max(1.0, float(np.max(np.abs(p.f_bar))))
        assert np.max(np.abs(p.reduced.value(p.u_plus) - p.f_bar)) <= 1e-12 * scale
        lhs = p.velocity * (p.u_plus - p.u_minus)
        rhs = burgers2.value(p.u_plus) - burgers2.value(p.u_minus)
        assert np.max(np.abs(lhs - rhs)) <= 1e-14 * max(1.0, np.max(np.abs(rhs)))


def test_normal_speed(pair11):
    assert sl.normal_speed(pair11, [1.0, 0.0]) == 0.0
    assert sl.normal_speed(pair11, [0.0, 1.0]) == 1.0
    assert sl.normal_speed(pair11, [0.0, 0.0]) == 0.0


def test_oleinik_admissible_direction(pair11):
    res = sl.oleinik_admissible(pair11, [1.0, 0.0])
    assert res.admissible
    assert res.worst_violation == 0.0
    assert res.lax_margins == (2.0, 2.0)


def test_oleinik_inadmissible_direction(pair11):
    res = sl.oleinik_admissible(pair11, [0.0, 1.0])
    assert not res.admissible
    # max of s^3 - s over (-1, 1) is 2/(3 sqrt 3) ~ 0.385, found near s = -0.577
    assert res.worst_violation >= 0.37


def test_oleinik_zero_direction(pair11):
    res = sl.oleinik_admissible(pair11, [0.0, 0.0])
    assert res.admissible
    assert res.lax_margins == (0.0, 0.0)


def test_oleinik_homogeneity(pair11, rng):
    for _ in range(30):
        xi = rng.normal(size=2)
        c = rng.uniform(0.1, 10)
        a = sl.oleinik_admissible(pair11, xi)
        b = sl.oleinik_admissible(pair11, c * xi)
        assert a.admissible == b.admissible


def test_oleinik_convexity(pair11, rng):
    found = 0
    while found < 25:
        xi1, xi2 = rng.normal(size=(2, 2))
        if (sl.oleinik_admissible(pair11, xi1).admissible
                and sl.oleinik_admissible(pair11, xi2).admissible):
            assert sl.oleinik_admissible(pair11, xi1 + xi2).admissible
            found += 1


def test_oleinik_exact_mode_matches_dense_sampling(pair11, rng):
    for _ in range(20):
        xi = rng.normal(size=2)
        fast = sl.oleinik_admissible(pair11, xi, exact=True)
        dense = sl.oleinik_admissible(pair11, xi, n_samples=20000)
        assert fast.admissible == dense.admissible
        assert abs(fast.worst_violation - dense.worst_violation) <= 1e-6


def test_lax_margins_nonnegative_when_admissible(pair11, rng):
    for _ in range(200):
        xi = rng.normal(size=2)
        res = sl.oleinik_admissible(pair11, xi)
        if res.admissible:
            assert res.lax_margins[0] >= -1e-12
            assert res.lax_margins[1] >= -1e-12


def test_nondegeneracy_burgers(burgers2):
    assert sl.check_nondegeneracy(burgers2).passed


def test_nondegeneracy_affine_flux_fails():
    affine = sl.Flux(((0.0, 1.0), (0.0, 1.0)))
    res = sl.check_nondegeneracy(affine)
    assert not res.passed
    tau, xi = res.failures[0]
    # the certificate must annihilate tau + f'(s).xi identically
    coeffs = np.array([tau + xi[0] + xi[1]])
    assert np.max(np.abs(coeffs)) <= 1e-12


def test_nondegeneracy_classic_burgers_1d():
    f = sl.Flux(((0.0, 0.0, 0.5),))
    assert sl.check_nondegeneracy(f).passed


def test_normalization_at_zero():
    n = sl.burgers_normalization(0.0, 3)
    assert np.allclose(n.matrix, np.eye(3))
    assert np.allclose(n.shift, np.zeros(3))


def test_normalization_d2():
    n = sl.burgers_normalization(1.0, 2)
    assert np.allclose(n.matrix, [[1.0, 0.0], [3.0, 1.0]])
    assert np.allclose(n.shift, [2.0, 3.0])
    assert np.allclose(np.diag(n.matrix), 1.0)
    assert n.matrix[0, 1] == 0.0


def test_normalization_d1_galilean():
    c = 0.7
    n = sl.burgers_normalization(c, 1)
    assert np.allclose(n.matrix, [[1.0]])
    assert np.allclose(n.shift, [2.0 * c])
    # transformed entropy shock: u = 1 for x < t, 0 beyond (speed 1 for f = s^2);
    # the shifted state must be the shock between 1-c and -c with speed 1-2c

    def u(t, x):
        return np.where(np.asarray(x)[..., 0] < t, 1.0, 0.0)

    v = n.transform(u)
    t = 0.8
    speed = 1.0 - 2.0 * c
    xs = np.linspace(-3, 3, 101)[:, None]
    expected = np.where(xs[:, 0] < speed * t, 1.0 - c, -c)
    assert np.array_equal(v(t, xs), expected)


def test_normalization_requires_burgers(burgers2):
    not_burgers = sl.Flux(((0.0, 1.0), (0.0, 0.0, 1.0)))
    with pytest.raises(NotBurgers):
        sl.burgers_normalization(1.0, flux=not_burgers)
    assert sl.burgers_normalization(0.5, flux=burgers2).d == 2
    assert is_burgers(burgers2)


def test_normalization_needs_dimension_or_flux():
    with pytest.raises(ValueError):
        sl.burgers_normalization(1.0)
