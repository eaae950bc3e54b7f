import math

import numpy as np
import pytest

from dmqkd.encoding import EncodingSymbol, PhasePair, encode_symbol
from dmqkd.errors import SampleSizeError
from dmqkd.photonics import TWO_PI, Phase
from dmqkd.secprops import (
    BB84_SYMBOLS,
    axial_uniformity_p,
    circular_uniformity_stat,
    leakage_phases,
    mutual_information_bits,
    r_bin_amplitude,
    run_verification,
    sample_phi_erp,
    sample_phi_lr,
)

SIGNAL_TABLE = {"signal": 1.0}


class TestRBinAmplitude:
    def test_identical_across_bb84_encodings(self):
        rng = np.random.default_rng(11)
        pairs = [encode_symbol(sym, SIGNAL_TABLE) for sym in BB84_SYMBOLS]
        for _ in range(500):
            phi1 = rng.uniform(0.0, TWO_PI)
            phi_rf = rng.uniform(0.0, TWO_PI)
            amps = [r_bin_amplitude(pp, phi1, phi_rf, 1.0) for pp in pairs]
            assert max(abs(z - amps[0]) for z in amps[1:]) < 1e-12

    def test_distinguishable_outside_the_protocol_set(self):
        # A pair violating phi12 + phi23 = pi mod 2*pi gives a different R bin.
        legal = encode_symbol(EncodingSymbol("Z", 0), SIGNAL_TABLE)
        rogue = PhasePair(Phase(0.3), Phase(0.6))
        assert abs(r_bin_amplitude(legal, 0.1, 0.2, 1.0) - r_bin_amplitude(rogue, 0.1, 0.2, 1.0)) > 1e-3


class TestLeakagePhases:
    def test_values(self):
        pp = encode_symbol(EncodingSymbol("Z", 0), SIGNAL_TABLE)  # (0, pi)
        lp = leakage_phases(pp, phi_rp=1.0, phi_rf=0.0)
        assert float(lp.phi_lr) == pytest.approx(math.pi / 2.0)
        assert float(lp.phi_erp) == pytest.approx(0.5)

    def test_sum_reduced_before_halving(self):
        pp = PhasePair(Phase(0.0), Phase(math.pi))
        lp = leakage_phases(pp, phi_rp=0.0, phi_rf=3.0 * math.pi / 2.0)
        # 3*pi/2 + pi reduces to pi/2 first, then halves to pi/4.
        assert float(lp.phi_lr) == pytest.approx(math.pi / 4.0)

    def test_axial_range(self):
        rng = np.random.default_rng(6)
        pairs = [encode_symbol(sym, SIGNAL_TABLE) for sym in BB84_SYMBOLS]
        for _ in range(200):
            pp = pairs[int(rng.integers(0, 4))]
            lp = leakage_phases(pp, rng.uniform(0, TWO_PI), rng.uniform(0, TWO_PI))
            assert 0.0 <= float(lp.phi_lr) < math.pi
            assert 0.0 <= float(lp.phi_erp) < math.pi


class TestUniformityStats:
    def test_equally_spaced_angles_are_maximally_uniform(self):
        samples = np.linspace(0.0, TWO_PI, 1000, endpoint=False)
        z, p = circular_uniformity_stat(samples)
        assert z == pytest.approx(0.0, abs=1e-12)
        assert p == 1.0

    def test_concentrated_angles_rejected(self):
        rng = np.random.default_rng(1)
        _, p = circular_uniformity_stat(rng.normal(0.0, 0.2, size=1000) % TWO_PI)
        assert p < 1e-6

    def test_sample_size_floor(self):
        with pytest.raises(SampleSizeError):
            circular_uniformity_stat([0.1] * 99)

    def test_axial_uniform_half_circle(self):
        # Uniform on [0, pi) is the axial null; the plain circular test would
        # reject it, the doubled-angle test must not.
        rng = np.random.default_rng(2)
        samples = rng.uniform(0.0, math.pi, size=50_000)
        assert axial_uniformity_p(samples) > 0.01
        _, p_plain = circular_uniformity_stat(samples)
        assert p_plain < 1e-6


class TestMutualInformation:
    def test_independent_near_zero(self):
        rng = np.random.default_rng(3)
        bits = rng.integers(0, 2, size=100_000)
        phases = rng.uniform(0.0, TWO_PI, size=100_000)
        assert mutual_information_bits(bits, phases) < 0.001

    def test_deterministic_coupling_near_one_bit(self):
        rng = np.random.default_rng(4)
        bits = rng.integers(0, 2, size=100_000)
        phases = np.where(bits == 0, 1.0, 4.0)
        assert mutual_information_bits(bits, phases) > 0.99


class TestSamplers:
    def test_outputs_cover_the_axial_range(self):
        rng = np.random.default_rng(5)
        lr = sample_phi_lr(math.pi, 10_000, rng)
        erp = sample_phi_erp(math.pi / 2.0, 10_000, rng)
        for arr in (lr, erp):
            assert arr.min() >= 0.0 and arr.max() < math.pi
            assert axial_uniformity_p(arr) > 0.001

    def test_deterministic_given_rng_state(self):
        a = sample_phi_lr(0.0, 1000, np.random.default_rng(9))
        b = sample_phi_lr(0.0, 1000, np.random.default_rng(9))
        assert np.array_equal(a, b)


class TestRunVerification:
    def test_all_properties_pass(self):
        report = run_verification(seed=0)
        assert report["all_passed"] is True
        assert len(report["properties"]) == 11

    def test_negative_control_is_detected(self):
        report = run_verification(seed=0)
        control = report["properties"][-1]
        assert control["name"] == "negative_control_nonuniform_detected"
        assert control["passed"] is True
        assert control["p_value"] < 0.01

    def test_report_is_deterministic(self):
        assert run_verification(seed=3) == run_verification(seed=3)

    def test_report_is_json_friendly(self):
        import json

        json.dumps(run_verification(seed=1))
