import math

import pytest

from dmqkd.decoy import (
    SWEEP_CSV_HEADER,
    binary_entropy,
    bound_e1,
    bound_y0,
    bound_y1,
    cutoff_loss,
    rate_at_loss,
    secure_key_rate,
    sweep_csv_lines,
    sweep_loss,
)
from dmqkd.errors import ConfigurationError, DegenerateDecoyError, UndefinedBoundError
from dmqkd.linksim import DecoyIntensities, GainQber, LinkParams


class TestBinaryEntropy:
    def test_endpoints(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0
        assert binary_entropy(0.5) == 1.0

    def test_known_value(self):
        assert binary_entropy(0.033) == pytest.approx(0.2092204778691527, rel=1e-12)

    def test_symmetry(self):
        assert binary_entropy(0.2) == pytest.approx(binary_entropy(0.8))

    def test_domain(self):
        with pytest.raises(ConfigurationError):
            binary_entropy(-0.1)
        with pytest.raises(ConfigurationError):
            binary_entropy(1.1)


class TestBounds:
    def test_y0_with_true_vacuum_reads_the_gain(self):
        assert bound_y0(0.01, 3e-8, 0.16, 0.0) == pytest.approx(3e-8)

    def test_y0_clamped_at_zero(self):
        assert bound_y0(0.5, 0.0, 0.16, 0.015) == 0.0

    def test_y0_degenerate(self):
        with pytest.raises(DegenerateDecoyError):
            bound_y0(0.01, 0.01, 0.16, 0.16)

    def test_y1_clamped(self):
        assert 0.0 <= bound_y1(0.9, 0.8, 0.7, 0.4, 0.16, 0.015, 0.0) <= 1.0

    def test_y1_bad_intensities(self):
        with pytest.raises(ConfigurationError):
            bound_y1(0.01, 0.005, 0.001, 0.4, 0.3, 0.2, 0.0)

    def test_e1_undefined_for_zero_yield(self):
        with pytest.raises(UndefinedBoundError):
            bound_e1(1e-4, 1e-8, 0.16, 0.015, 0.0)

    def test_e1_clamped_to_half(self):
        assert bound_e1(0.5, 0.0, 0.16, 0.015, 1e-6) == 0.5

    def test_e1_degenerate(self):
        with pytest.raises(DegenerateDecoyError):
            bound_e1(1e-4, 1e-8, 0.16, 0.16, 0.01)


class TestSecureKeyRate:
    def test_default_operating_point(self):
        b = rate_at_loss(15.0, LinkParams(), DecoyIntensities())
        assert b.q_mu == pytest.approx(0.008815322890016408, rel=1e-12)
        assert b.e_mu == pytest.approx(0.03300158927814369, rel=1e-12)
        assert b.y0_l == 0.0
        assert b.y1_l == pytest.approx(0.02116514292622537, rel=1e-12)
        assert b.e1_u == pytest.approx(0.040989997662225136, rel=1e-12)
        assert b.q1_l == pytest.approx(0.00567496783226331, rel=1e-12)
        assert b.r_per_pulse == pytest.approx(0.0017291808961597973, rel=1e-12)
        assert b.r_bps == pytest.approx(576393.6320532657, rel=1e-12)

    def test_rate_zero_at_extreme_loss(self):
        assert rate_at_loss(60.0, LinkParams(), DecoyIntensities()).r_bps == 0.0

    def test_vanishing_yield_sets_e1_to_half(self):
        # A signal gain far above what the decoy gains support drives the
        # single-photon yield bound to its zero clamp.
        b = secure_key_rate(
            GainQber(0.9, 0.033),
            GainQber(1e-6, 0.033),
            GainQber(1e-6, 0.033),
            LinkParams(),
            DecoyIntensities(),
        )
        assert b.y1_l == 0.0 and b.e1_u == 0.5 and b.r_bps == 0.0

    def test_rate_decreases_with_loss(self):
        params, intens = LinkParams(), DecoyIntensities()
        rates = [rate_at_loss(db, params, intens).r_bps for db in range(0, 61, 5)]
        assert all(a >= b for a, b in zip(rates, rates[1:]))
        assert rates[0] > 0.0


class TestSweep:
    def test_inclusive_endpoints(self):
        points = sweep_loss(0.0, 60.0, 1.0, LinkParams(), DecoyIntensities())
        assert len(points) == 61
        assert points[0].loss_db == 0.0 and points[-1].loss_db == 60.0

    def test_single_point(self):
        points = sweep_loss(15.0, 15.0, 1.0, LinkParams(), DecoyIntensities())
        assert len(points) == 1

    def test_empty_when_inverted(self):
        assert sweep_loss(20.0, 10.0, 1.0, LinkParams(), DecoyIntensities()) == []

    def test_bad_step(self):
        with pytest.raises(ConfigurationError):
            sweep_loss(0.0, 10.0, 0.0, LinkParams(), DecoyIntensities())

    def test_cutoff(self):
        points = sweep_loss(0.0, 60.0, 1.0, LinkParams(), DecoyIntensities())
        cutoff = cutoff_loss(points)
        assert cutoff is not None
        for p in points:
            if p.loss_db <= cutoff:
                continue
            assert p.breakdown.r_bps == 0.0

    def test_cutoff_none_when_rate_never_positive(self):
        points = sweep_loss(59.0, 60.0, 1.0, LinkParams(), DecoyIntensities())
        assert cutoff_loss(points) is None

    def test_csv_lines(self):
        points = sweep_loss(10.0, 12.0, 1.0, LinkParams(), DecoyIntensities())
        lines = sweep_csv_lines(points)
        assert lines[0] == SWEEP_CSV_HEADER
        assert len(lines) == 4
        first = lines[1].split(",")
        assert float(first[0]) == 10.0
        assert len(first) == len(SWEEP_CSV_HEADER.split(","))


def test_bounds_sound_on_a_simple_honest_channel():
    """Spot check of the bound inequalities against the true photon yields."""
    eta, y0, e_det = 0.02, 3e-8, 0.033
    mu, nu, omega = 0.4, 0.16, 0.015

    def gain(lam):
        sig = 1.0 - math.exp(-eta * lam)
        return y0 + sig, 0.5 * y0 + e_det * sig

    q_mu, _ = gain(mu)
    q_nu, eq_nu = gain(nu)
    q_om, eq_om = gain(omega)
    y0_l = bound_y0(q_nu, q_om, nu, omega)
    y1_l = bound_y1(q_mu, q_nu, q_om, mu, nu, omega, y0_l)
    y1_true = y0 + eta
    e1_true = (0.5 * y0 + e_det * eta) / y1_true
    assert y0_l <= y0 + 1e-15
    assert 0.0 < y1_l <= y1_true + 1e-15
    assert bound_e1(eq_nu, eq_om, nu, omega, y1_l) >= e1_true - 1e-15
