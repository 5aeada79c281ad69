import math

import numpy as np
import pytest
from scipy.integrate import quad

from hyperbox.beta_models import (ModelError, cumulative_G, hyperuniformity_check,
                                  make_model, mixture_model, perturbation_tail_model,
                                  power_law_mixture_model, pyramidal_model,
                                  sine2_model, tail_F, user_model, zero_model)

CATALOG_1D = [
    pyramidal_model(1), pyramidal_model(4),
    mixture_model({1: 0.5, 2: 0.5}),
    power_law_mixture_model(0.5),
    sine2_model(),
    perturbation_tail_model(0.75),
    perturbation_tail_model(0.25, scale=2.0),
]


def test_make_model_dispatch_and_validation():
    assert make_model({"kind": "pyramidal", "m": 4, "d": 1}).kind == "pyramidal"
    assert make_model({"kind": "mixture", "a": 0.5, "d": 2}).d == 2
    assert make_model({"kind": "poisson"}).kind == "zero"
    with pytest.raises(ModelError):
        make_model({"kind": "nope"})
    with pytest.raises(ModelError):
        pyramidal_model(0)
    with pytest.raises(ModelError):
        pyramidal_model(1.5)
    with pytest.raises(ModelError):
        mixture_model({1: 0.5, 2: 0.6})      # unnormalized
    with pytest.raises(ModelError):
        mixture_model({1: -0.5, 2: 1.5})     # negative weight
    with pytest.raises(ModelError):
        perturbation_tail_model(1.0)         # outside (0,1)


def test_density_values():
    assert pyramidal_model(1).density(0.0) == -1.0
    s2 = sine2_model()
    assert s2.density(0.5) == pytest.approx(-4 / math.pi ** 2, rel=1e-14)
    assert s2.density(0.0) == -1.0


def test_mixture_mass_preserved():
    m = mixture_model({1: 0.5, 2: 0.5})
    assert hyperuniformity_check(m) == (pytest.approx(-1.0, abs=1e-12), True)


def test_tail_values():
    assert tail_F(pyramidal_model(2), 1.0) == pytest.approx(-0.125, abs=1e-14)
    assert tail_F(pyramidal_model(1), -5.0) == pytest.approx(-1.0, abs=1e-14)


def test_tail_vanishes_at_infinity():
    # decay at the rate each entry actually has: compactly supported entries
    # are exactly zero past the support, sine2 decays like 1/x, power-law
    # entries like x^{a-1} (slow decay is the whole point of those models)
    x = 1e6
    assert tail_F(pyramidal_model(4), x) == 0.0
    assert tail_F(mixture_model({1: 0.5, 2: 0.5}), x) == 0.0
    assert abs(tail_F(sine2_model(), x)) < 1e-6
    for a in (0.3, 0.5):
        bound = 10.0 * x ** (a - 1.0)
        assert 0.0 < abs(tail_F(power_law_mixture_model(a), x)) < bound
    for s in (0.25, 0.75):
        model = perturbation_tail_model(s, scale=2.0)
        val = abs(tail_F(model, x * 2.0))
        assert 0.0 < val < 10.0 * x ** (-s)


def test_cumulative_values():
    for m in (1, 3, 7):
        model = pyramidal_model(m)
        assert cumulative_G(model, m) == pytest.approx(m / 6.0, rel=1e-14)
        assert cumulative_G(model, 10.0 * m) == pytest.approx(m / 6.0, rel=1e-14)
    assert cumulative_G(pyramidal_model(2), 0.0) == 0.0
    # sine2 log slope: G(2y) - G(y) -> log(2)/(2 pi^2)
    s2 = sine2_model()
    for y in (1e3, 1e5):
        slope = (cumulative_G(s2, 2 * y) - cumulative_G(s2, y)) / math.log(2.0)
        assert slope == pytest.approx(1.0 / (2 * math.pi ** 2), rel=1e-6)


def test_sine2_against_quadrature():
    s2 = sine2_model()

    def dens(x):
        return (math.sin(math.pi * x) / (math.pi * x)) ** 2 if x else 1.0

    for x in (0.3, 1.0, 2.5):
        ref = -quad(dens, x, 500.0, limit=2000)[0] - 1.0 / (math.pi ** 2 * 500.0) / 2
        # analytic tail of the quadrature remainder ~ 1/(2 pi^2 x) at 500
        assert tail_F(s2, x) == pytest.approx(ref, abs=1e-4)
    ref_mass = 2 * quad(dens, 0.0, 2000.0, limit=4000)[0]
    assert ref_mass == pytest.approx(1.0, abs=1e-3)
    assert hyperuniformity_check(s2) == (-1.0, True)


def test_hyperuniformity_examples():
    assert hyperuniformity_check(pyramidal_model(3, d=2)) == (pytest.approx(-1.0), True)
    mass, flag = hyperuniformity_check(zero_model())
    assert mass == 0.0 and flag is False


def test_hyper_sym_identity_1d():
    for model in CATALOG_1D:
        for x in (0.1, 0.5, 1.0, 2.0, 10.0):
            assert tail_F(model, x) + tail_F(model, -x) == pytest.approx(-1.0, abs=1e-8)


def test_quadrant_identity_2d():
    for model in (pyramidal_model(2, d=2), power_law_mixture_model(0.4, d=2),
                  mixture_model({1: 0.25, 3: 0.75}, d=2)):
        for x1 in (0.3, 1.0, 4.0):
            for x2 in (0.5, 2.0):
                total = (tail_F(model, (x1, x2)) + tail_F(model, (-x1, x2))
                         + tail_F(model, (x1, -x2)) + tail_F(model, (-x1, -x2)))
                assert total == pytest.approx(-1.0, abs=1e-7)


def test_mixture_tail_exponent():
    for a in (0.3, 0.5, 0.7):
        model = power_law_mixture_model(a)
        ys = 2.0 ** np.arange(4, 15)
        gs = np.array([cumulative_G(model, y) for y in ys])
        slope = np.polyfit(np.log(ys), np.log(gs), 1)[0]
        assert abs(slope - a) < 0.05


def test_cumulative_monotone():
    ys = np.linspace(0.0, 30.0, 121)
    for model in CATALOG_1D:
        gs = np.array([cumulative_G(model, y) for y in ys])
        assert np.all(np.diff(gs) >= -1e-12)


def test_2d_orientations_differ():
    model = power_law_mixture_model(0.5, d=2)
    gp = cumulative_G(model, (100.0, 100.0), "+")
    gm = cumulative_G(model, (100.0, 100.0), "-")
    assert gp < 0 and gm < 0 and abs(gm) > abs(gp)
    with pytest.raises(ModelError):
        cumulative_G(model, (10.0, 10.0), "x")


def test_power_law_tail_is_exact():
    # explicit-cap model with a huge cap vs zeta-tail model with a small cap
    a = 0.5
    small = power_law_mixture_model(a, m_explicit=512)
    big = power_law_mixture_model(a, m_explicit=2 ** 15)
    for y in (10.0, 100.0, 500.0):
        assert cumulative_G(small, y) == pytest.approx(cumulative_G(big, y), rel=1e-10)
    for x in (5.0, 300.0, 5000.0):
        assert tail_F(small, x) == pytest.approx(tail_F(big, x), rel=1e-9, abs=1e-15)


def test_user_model_quadrature():
    # triangular density supported on [-2, 2] with mass -1: the m=2 pyramid
    dens = lambda x: -max(0.0, 2.0 - abs(x)) / 4.0  # noqa: E731
    um = user_model(dens, support_radius=2.0)
    ref = pyramidal_model(2)
    for x in (0.0, 0.5, 1.5):
        assert tail_F(um, x) == pytest.approx(tail_F(ref, x), abs=1e-8)
    assert cumulative_G(um, 3.0) == pytest.approx(cumulative_G(ref, 3.0), rel=1e-7)
    mass, hyper = hyperuniformity_check(um)
    assert hyper and mass == pytest.approx(-1.0, abs=1e-7)
