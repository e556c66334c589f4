"""Tests for the detector signal/noise and state-discrimination model."""

import json
import math
import random

import numpy as np
import pytest

from ionoptics.detection import (
    PRESETS,
    DetectorModel,
    MeasurementScenario,
    ber_analytic,
    ber_monte_carlo,
    gain_threshold_for_shot_limit,
    load_detectors,
    min_integration_time,
    readout_budget,
    signal_and_noise_electrons,
    snr,
    thermal_noise_electrons,
)

FLUX = 1e6  # photons/s at the detector, bright state


def scenario(t_m, flux_bright=FLUX, flux_dark=0.0):
    return MeasurementScenario(flux_bright=flux_bright, t_m=t_m, flux_dark=flux_dark)


# ---------------------------------------------------------------- presets

def test_preset_table_golden():
    assert set(PRESETS) == {"uvpc", "pmt", "ccd", "emccd", "apd"}
    uvpc = PRESETS["uvpc"]
    assert (uvpc.eta, uvpc.gain_m, uvpc.enf_f) == (0.65, 3e4, 1.0)
    assert (uvpc.dark_rate, uvpc.capacitance_f) == (2e4, 1e-12)
    pmt = PRESETS["pmt"]
    assert (pmt.eta, pmt.gain_m, pmt.enf_f, pmt.dark_rate) == (0.10, 1e6, 1.5, 500.0)
    ccd = PRESETS["ccd"]
    assert (ccd.gain_m, ccd.capacitance_f) == (1.0, 0.1e-12)
    assert ccd.frame_rate_range_fps == (60.0, 15000.0)
    emccd = PRESETS["emccd"]
    assert (emccd.gain_m, emccd.enf_f, emccd.pixel_latency_s) == (100.0, 2.0, 50e-6)
    assert emccd.capacitance_f == 0.1e-12
    apd = PRESETS["apd"]
    assert (apd.eta, apd.gain_m, apd.enf_f, apd.capacitance_f) == (0.50, 100.0, 10.0, 1e-12)


def test_detector_validation():
    ok = dict(name="x", eta=0.5, gain_m=10.0, enf_f=1.2,
              dark_rate=100.0, capacitance_f=1e-12)
    DetectorModel(**ok)
    for field, bad in [("eta", 0.0), ("eta", 1.5), ("gain_m", 0.5),
                       ("enf_f", 0.9), ("dark_rate", -1.0),
                       ("capacitance_f", 0.0), ("pixel_latency_s", -1e-6)]:
        with pytest.raises(ValueError):
            DetectorModel(**{**ok, field: bad})
    with pytest.raises(ValueError):
        DetectorModel(**ok, frame_rate_range_fps=(100.0, 50.0))


def test_scenario_validation():
    with pytest.raises(ValueError):
        MeasurementScenario(flux_bright=-1.0, t_m=1e-4)
    with pytest.raises(ValueError):
        MeasurementScenario(flux_bright=1e6, t_m=0.0)
    with pytest.raises(ValueError):
        MeasurementScenario(flux_bright=1e6, t_m=1e-4, temperature_k=0.0)


def test_load_detectors_overrides_and_extends(tmp_path):
    assert load_detectors(None) == PRESETS
    doc = [
        {"name": "uvpc", "eta": 0.5, "gain": 1e4, "enf": 1.1,
         "dark_cps": 1e4, "cap_farad": 2e-12},
        {"name": "custom", "eta": 0.9, "gain": 1.0, "enf": 1.0,
         "dark_cps": 10.0, "cap_farad": 1e-13, "pixel_latency_s": 1e-6,
         "frame_rate_range_fps": [10, 100], "pixels": 4},
    ]
    path = tmp_path / "detectors.json"
    path.write_text(json.dumps({"detectors": doc}))
    table = load_detectors(path)
    assert table["uvpc"].eta == 0.5 and table["uvpc"].capacitance_f == 2e-12
    assert table["pmt"] == PRESETS["pmt"]
    assert table["custom"].frame_rate_range_fps == (10.0, 100.0)
    assert table["custom"].pixels == 4
    # a bare list works too
    assert load_detectors(doc)["custom"].eta == 0.9


def test_load_detectors_rejects_malformed():
    with pytest.raises(ValueError, match="missing field"):
        load_detectors([{"name": "x", "eta": 0.5}])
    with pytest.raises(ValueError, match="list"):
        load_detectors({"nope": 1})
    with pytest.raises(ValueError, match="object"):
        load_detectors([42])


# ---------------------------------------------------------------- noise floor

def test_thermal_noise_floor_values():
    # sqrt(4 k_B T C)/e at room temperature
    assert thermal_noise_electrons(300.0, 1e-12) == pytest.approx(
        803.3815812177799, rel=1e-12)
    assert thermal_noise_electrons(300.0, 1e-12) == pytest.approx(804, abs=1.0)
    assert thermal_noise_electrons(300.0, 0.1e-12) == pytest.approx(
        254.0515626875734, rel=1e-12)
    assert thermal_noise_electrons(300.0, 0.1e-12) == pytest.approx(254, abs=0.5)


def test_thermal_noise_square_root_scaling():
    base = thermal_noise_electrons(300.0, 1e-12)
    assert thermal_noise_electrons(300.0, 4e-12) == pytest.approx(2 * base, rel=1e-12)
    assert thermal_noise_electrons(1200.0, 1e-12) == pytest.approx(2 * base, rel=1e-12)
    with pytest.raises(ValueError):
        thermal_noise_electrons(0.0, 1e-12)
    with pytest.raises(ValueError):
        thermal_noise_electrons(300.0, -1e-12)


def test_gain_threshold_values():
    assert gain_threshold_for_shot_limit(1.0) == pytest.approx(803.38, abs=0.01)
    assert gain_threshold_for_shot_limit(1.0) == pytest.approx(800, rel=0.01)
    assert gain_threshold_for_shot_limit(5.0) == pytest.approx(160.676, abs=0.01)
    assert gain_threshold_for_shot_limit(800.0) == pytest.approx(1.00423, abs=1e-4)
    # reciprocal scaling
    rng = random.Random(20260825)
    for _ in range(20):
        p = 10 ** rng.uniform(-1, 3)
        assert gain_threshold_for_shot_limit(p) * p == pytest.approx(
            gain_threshold_for_shot_limit(1.0), rel=1e-12)
    with pytest.raises(ValueError):
        gain_threshold_for_shot_limit(0.0)


# ---------------------------------------------------------------- snr

def test_snr_uvpc_reference_point():
    value = snr(PRESETS["uvpc"], scenario(100e-6))
    assert value == pytest.approx(5.615129740892346, rel=1e-10)
    assert value == pytest.approx(5.6, rel=0.01)


def test_snr_components_reference_point():
    s, n = signal_and_noise_electrons(PRESETS["uvpc"], scenario(100e-6))
    # 65 primary electrons at gain 3e4
    assert s == pytest.approx(65 * 3e4, rel=1e-12)
    thermal = thermal_noise_electrons(300.0, 1e-12) ** 2
    shot = 2 * 65 * (3e4) ** 2
    dark = (2e4 * 100e-6 * 3e4) ** 2
    assert n == pytest.approx(math.sqrt(thermal + shot + dark), rel=1e-12)


def test_snr_background_limited_saturation():
    uvpc = PRESETS["uvpc"]
    asymptote = uvpc.eta * FLUX / uvpc.dark_rate  # 32.5
    # crossover where the dark term overtakes shot noise, then 1000x beyond
    crossover = 2 * uvpc.eta * FLUX * uvpc.enf_f / uvpc.dark_rate ** 2
    value = snr(uvpc, scenario(1000 * crossover))
    assert asymptote == pytest.approx(32.5, rel=1e-12)
    assert value < asymptote
    assert value == pytest.approx(asymptote, rel=0.01)


def test_snr_monotone_in_integration_time():
    for name, det in PRESETS.items():
        times = [10 ** e for e in np.linspace(-6, -1, 40)]
        values = [snr(det, scenario(t)) for t in times]
        assert all(b > a for a, b in zip(values, values[1:])), name


def test_snr_large_gain_removes_capacitance_dependence():
    base = dict(name="x", eta=0.5, gain_m=1e12, enf_f=2.0,
                dark_rate=1e3, capacitance_f=1e-12)
    a = snr(DetectorModel(**base), scenario(1e5))
    b = snr(DetectorModel(**{**base, "capacitance_f": 100e-12}), scenario(1e5))
    assert a == pytest.approx(b, rel=1e-9)


def test_snr_parameter_monotonicity():
    rng = random.Random(7)
    for _ in range(40):
        det = dict(
            name="x",
            eta=rng.uniform(0.1, 0.8),
            gain_m=10 ** rng.uniform(0, 5),
            enf_f=rng.uniform(1.0, 5.0),
            dark_rate=10 ** rng.uniform(1, 5),
            capacitance_f=10 ** rng.uniform(-13, -12),
        )
        sc = scenario(10 ** rng.uniform(-5, -3), flux_bright=10 ** rng.uniform(4, 7))
        base = snr(DetectorModel(**det), sc)
        assert snr(DetectorModel(**{**det, "eta": min(1.0, det["eta"] * 1.2)}), sc) > base
        assert snr(DetectorModel(**{**det, "gain_m": det["gain_m"] * 2}), sc) > base
        assert snr(DetectorModel(**{**det, "enf_f": det["enf_f"] * 1.5}), sc) < base
        assert snr(DetectorModel(**{**det, "dark_rate": det["dark_rate"] * 2}), sc) < base
        assert snr(DetectorModel(**{**det, "capacitance_f": det["capacitance_f"] * 4}), sc) < base
        brighter = MeasurementScenario(flux_bright=sc.flux_bright * 2, t_m=sc.t_m)
        assert snr(DetectorModel(**det), brighter) > base


def test_snr_requires_positive_flux():
    with pytest.raises(ValueError):
        snr(PRESETS["uvpc"], MeasurementScenario(flux_bright=0.0, t_m=1e-4))


# ---------------------------------------------------------------- analytic BER

def test_ber_analytic_reference_points_at_50us():
    # frozen from a dense-threshold-scan evaluation of the Gaussian model
    expected = {
        "uvpc": 6.361735e-07,
        "emccd": 1.324239e-03,
        "pmt": 2.738611e-02,
        "apd": 1.496955e-01,
        "ccd": 4.745028e-01,
    }
    for name, want in expected.items():
        got = ber_analytic(PRESETS[name], scenario(50e-6))
        assert got.ber == pytest.approx(want, rel=1e-4), name
        assert 0.0 <= got.ber <= 0.5


def test_ber_analytic_uvpc_low_error_at_50us():
    result = ber_analytic(PRESETS["uvpc"], scenario(50e-6))
    assert result.ber < 1e-3
    assert result.snr == pytest.approx(snr(PRESETS["uvpc"], scenario(50e-6)), rel=1e-12)


def test_ber_indistinguishable_states():
    same = MeasurementScenario(flux_bright=1e5, t_m=1e-4, flux_dark=1e5)
    assert ber_analytic(PRESETS["uvpc"], same).ber == 0.5
    worse = MeasurementScenario(flux_bright=1e4, t_m=1e-4, flux_dark=1e5)
    assert ber_analytic(PRESETS["uvpc"], worse).ber == 0.5


def test_ber_threshold_sits_between_state_means():
    for name, det in PRESETS.items():
        r = ber_analytic(det, scenario(50e-6))
        mean_dark = det.gain_m * det.dark_rate * 50e-6
        mean_bright = det.gain_m * (det.eta * FLUX + det.dark_rate) * 50e-6
        assert mean_dark < r.threshold_e < mean_bright, name


def test_ber_monotone_in_integration_time():
    for name, det in PRESETS.items():
        times = [10 ** e for e in np.linspace(-6, -3, 25)]
        values = [ber_analytic(det, scenario(t)).ber for t in times]
        for a, b in zip(values, values[1:]):
            assert b <= a * (1 + 1e-9) + 1e-15, name


def test_ber_curve_family_ordering_at_short_times():
    # the high-gain low-noise devices separate states first; the
    # unity-gain device is worst until its thermal floor is overcome
    for t_m in (10e-6, 50e-6):
        bers = {name: ber_analytic(det, scenario(t_m)).ber
                for name, det in PRESETS.items()}
        assert bers["uvpc"] < bers["emccd"]
        assert bers["ccd"] == max(bers.values())
    assert ber_analytic(PRESETS["ccd"], scenario(10e-6)).ber > 0.4


def test_ber_optimizer_matches_dense_scan_oracle():
    # global-minimum check against a brute-force threshold scan
    rng = random.Random(20260825)
    checked = 0
    while checked < 50:
        det = DetectorModel(
            name="x",
            eta=rng.uniform(0.1, 0.9),
            gain_m=10 ** rng.uniform(0, 4),
            enf_f=rng.uniform(1.0, 5.0),
            dark_rate=10 ** rng.uniform(1, 5),
            capacitance_f=10 ** rng.uniform(-13, -12),
        )
        flux_bright = 10 ** rng.uniform(4, 7)
        sc = MeasurementScenario(
            flux_bright=flux_bright,
            t_m=10 ** rng.uniform(-5, -3),
            flux_dark=flux_bright * rng.uniform(0.0, 0.5),
        )
        got = ber_analytic(det, sc)
        mean_dark = det.gain_m * (det.eta * sc.flux_dark + det.dark_rate) * sc.t_m
        mean_bright = det.gain_m * (det.eta * sc.flux_bright + det.dark_rate) * sc.t_m
        thermal = thermal_noise_electrons(300.0, det.capacitance_f)
        sd = math.sqrt(det.gain_m ** 2 * det.enf_f * (mean_dark / det.gain_m) + thermal ** 2)
        sb = math.sqrt(det.gain_m ** 2 * det.enf_f * (mean_bright / det.gain_m) + thermal ** 2)

        def ber_at(theta):
            p_dark = 0.5 * math.erfc((theta - mean_dark) / sd / math.sqrt(2))
            p_bright = 0.5 * math.erfc((mean_bright - theta) / sb / math.sqrt(2))
            return 0.5 * (p_dark + p_bright)

        dense = min(
            ber_at(mean_dark + (mean_bright - mean_dark) * i / 20000)
            for i in range(20001)
        )
        assert got.ber <= dense * (1 + 1e-9) + 1e-15
        checked += 1


# ---------------------------------------------------------------- Monte Carlo

def test_monte_carlo_matches_exact_poisson_point():
    # unity gain, no excess noise, no darks, negligible capacitance:
    # only a bright-state n=0 draw can fall below 0.5 electrons, so
    # BER = exp(-mu)/2 exactly
    det = DetectorModel("ideal", eta=1.0, gain_m=1.0, enf_f=1.0,
                        dark_rate=0.0, capacitance_f=1e-30)
    sc = MeasurementScenario(flux_bright=10.0, t_m=1.0)
    exact = 0.5 * math.exp(-10.0)
    assert exact == pytest.approx(2.27e-5, rel=1e-3)
    r = ber_monte_carlo(det, sc, threshold_e=0.5, trials=2_000_000, seed=7)
    assert r.ci_low <= exact <= r.ci_high
    assert r.errors_dark == 0
    assert r.ber == pytest.approx(exact, rel=0.25)


def test_monte_carlo_indistinguishable_states():
    det = PRESETS["uvpc"]
    sc = MeasurementScenario(flux_bright=1e5, t_m=1e-4, flux_dark=1e5)
    r = ber_monte_carlo(det, sc, threshold_e=det.gain_m * 1e5 * 0.65 * 1e-4,
                        trials=100_000, seed=13)
    assert r.ci_low <= 0.5 <= r.ci_high + 0.01
    assert r.ber == pytest.approx(0.5, abs=0.01)


def test_monte_carlo_is_deterministic_per_seed():
    det = PRESETS["emccd"]
    sc = scenario(30e-6)
    a = ber_monte_carlo(det, sc, threshold_e=500.0, trials=50_000, seed=42)
    b = ber_monte_carlo(det, sc, threshold_e=500.0, trials=50_000, seed=42)
    c = ber_monte_carlo(det, sc, threshold_e=500.0, trials=50_000, seed=43)
    assert a == b
    assert (a.ber, a.bright_mean) != (c.ber, c.bright_mean)


def test_monte_carlo_moments_match_model():
    # sample mean and variance against M·mu and M²F·mu + kTC floor,
    # within 3 standard errors estimated from the samples themselves
    trials = 200_000
    for i, (name, det) in enumerate(sorted(PRESETS.items())):
        sc = scenario(50e-6)
        thermal = thermal_noise_electrons(300.0, det.capacitance_f)
        mu = (det.eta * FLUX + det.dark_rate) * sc.t_m
        want_mean = det.gain_m * mu
        want_var = det.gain_m ** 2 * det.enf_f * mu + thermal ** 2
        r = ber_monte_carlo(det, sc, threshold_e=want_mean / 2,
                            trials=trials, seed=100 + i)
        se_mean = math.sqrt(r.bright_var / trials)
        assert abs(r.bright_mean - want_mean) < 3 * se_mean, name
        # SE of the sample variance from the fourth central moment
        rng = np.random.default_rng(100 + i)
        n = rng.poisson(mu, size=trials).astype(np.float64)
        x = det.gain_m * n
        if det.enf_f > 1.0:
            x = x + det.gain_m * np.sqrt((det.enf_f - 1.0) * n) * rng.standard_normal(trials)
        x = x + thermal * rng.standard_normal(trials)
        m4 = float(np.mean((x - x.mean()) ** 4))
        se_var = math.sqrt(max(m4 - r.bright_var ** 2, 0.0) / trials)
        assert abs(r.bright_var - want_var) < 3 * se_var, name


def test_monte_carlo_confirms_analytic_ber_where_gaussian_holds():
    # operating points whose dominant error channel is thermal- or
    # moderate-count-driven, where the Gaussian model is trustworthy;
    # agreement within the 95% interval or a factor of two. The uvpc
    # and pmt presets reach measurable error rates only with sub-unity
    # dark-count means, where the discrete Poisson tail dwarfs any
    # Gaussian fit; they are covered by the bound checks below instead.
    points = {"emccd": 30e-6, "apd": 300e-6, "ccd": 1e-3}
    for name, t_m in sorted(points.items()):
        det = PRESETS[name]
        analytic = ber_analytic(det, scenario(t_m))
        mc = ber_monte_carlo(det, scenario(t_m), analytic.threshold_e,
                             trials=200_000, seed=20260825)
        in_ci = mc.ci_low <= analytic.ber <= mc.ci_high
        within_2x = mc.ber > 0 and 0.5 <= analytic.ber / mc.ber <= 2.0
        assert in_ci or within_2x, (name, analytic.ber, mc.ber)


def test_monte_carlo_uvpc_50us_confirms_low_error():
    # ground truth for the headline operating point: the exact-Poisson
    # sampler confirms sub-1e-3 error at the analytically chosen
    # threshold, though its discrete dark tail (mean 1 count) sits well
    # above the Gaussian extrapolation
    det = PRESETS["uvpc"]
    analytic = ber_analytic(det, scenario(50e-6))
    mc = ber_monte_carlo(det, scenario(50e-6), analytic.threshold_e,
                         trials=300_000, seed=5)
    assert mc.ci_high < 1e-3
    assert analytic.ber < mc.ci_high
    assert mc.ber > analytic.ber  # the Gaussian tail is optimistic here


def test_monte_carlo_pmt_150us_confirms_percent_level_error():
    det = PRESETS["pmt"]
    analytic = ber_analytic(det, scenario(150e-6))
    mc = ber_monte_carlo(det, scenario(150e-6), analytic.threshold_e,
                         trials=200_000, seed=5)
    assert analytic.ber < 2e-3
    assert mc.ci_high < 2e-2  # low-count skew costs about a decade here


def test_monte_carlo_randomized_agreement_with_analytic():
    # moderate-count scenarios where the Gaussian approximation should
    # hold well; demand factor-two agreement (most land within a few %)
    rng = random.Random(20260825)
    kept = 0
    attempts = 0
    while kept < 8 and attempts < 200:
        attempts += 1
        mu_dark = rng.uniform(100.0, 400.0)
        ratio = rng.uniform(1.25, 2.2)
        t_m = 10 ** rng.uniform(-5, -3)
        eta = rng.uniform(0.3, 0.9)
        det = DetectorModel(
            name="x", eta=eta, gain_m=10 ** rng.uniform(0, 3),
            enf_f=rng.uniform(1.0, 3.0), dark_rate=mu_dark / t_m,
            capacitance_f=rng.choice([1e-13, 1e-12]),
        )
        flux_bright = mu_dark * (ratio - 1.0) / (eta * t_m)
        sc = MeasurementScenario(flux_bright=flux_bright, t_m=t_m)
        analytic = ber_analytic(det, sc)
        if not 3e-4 <= analytic.ber <= 0.2:
            continue
        kept += 1
        mc = ber_monte_carlo(det, sc, analytic.threshold_e,
                             trials=300_000, seed=1000 + kept)
        assert mc.ber > 0
        assert 0.5 <= analytic.ber / mc.ber <= 2.0, (analytic.ber, mc.ber)
    assert kept == 8


def test_monte_carlo_rejects_bad_trials():
    with pytest.raises(ValueError):
        ber_monte_carlo(PRESETS["uvpc"], scenario(1e-4), 100.0, trials=0, seed=1)


# ---------------------------------------------------------------- timing

def test_min_integration_time_reference_points():
    t_uvpc = min_integration_time(PRESETS["uvpc"], FLUX)
    t_emccd = min_integration_time(PRESETS["emccd"], FLUX)
    t_ccd = min_integration_time(PRESETS["ccd"], FLUX)
    assert t_uvpc == pytest.approx(19.67e-6, rel=1e-3)
    assert t_emccd == pytest.approx(52.22e-6, rel=1e-3)
    # the two best devices reach low error within tens of microseconds
    assert 25e-6 <= t_emccd <= 100e-6
    assert t_uvpc <= t_emccd
    assert t_ccd > 10 * t_emccd
    assert t_ccd == pytest.approx(2.430e-3, rel=1e-3)
    assert min_integration_time(PRESETS["pmt"], FLUX) == pytest.approx(150.2e-6, rel=1e-3)
    assert min_integration_time(PRESETS["apd"], FLUX) == pytest.approx(279.1e-6, rel=1e-3)


def test_min_integration_time_is_a_tight_bracket():
    det = PRESETS["emccd"]
    t = min_integration_time(det, FLUX)
    assert ber_analytic(det, scenario(t)).ber <= 1e-3
    assert ber_analytic(det, scenario(t / 1.01)).ber > 1e-3


def test_min_integration_time_trivial_target_hits_grid_floor():
    t = min_integration_time(PRESETS["uvpc"], FLUX, target_ber=0.49)
    assert t == pytest.approx(1e-7, rel=1e-12)


def test_min_integration_time_unreachable_returns_none():
    hopeless = DetectorModel("hopeless", eta=0.01, gain_m=1.0, enf_f=1.0,
                             dark_rate=1e6, capacitance_f=1e-12)
    assert min_integration_time(hopeless, 100.0) is None


def test_min_integration_time_validates_target():
    for bad in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(ValueError):
            min_integration_time(PRESETS["uvpc"], FLUX, target_ber=bad)


# ---------------------------------------------------------------- readout

def test_readout_budget_per_pixel_latency():
    r = readout_budget(PRESETS["emccd"], zones=1, t_m=1e-4)
    assert r.added_latency_s == pytest.approx(50e-6, rel=1e-12)
    assert readout_budget(PRESETS["emccd"], zones=10, t_m=1e-4).added_latency_s == (
        pytest.approx(500e-6, rel=1e-12))
    assert readout_budget(PRESETS["uvpc"], zones=5, t_m=1e-4).added_latency_s == 0.0


def test_readout_budget_frame_rate_feasibility():
    # 100 zones at 100 us needs 10 kHz frames, but 100 binned pixels
    # cut the 15 kfps cap to 150 fps
    r = readout_budget(PRESETS["ccd"], zones=100, t_m=100e-6)
    assert r.required_frame_rate_hz == pytest.approx(1e4, rel=1e-12)
    assert r.achievable_frame_rate_hz == pytest.approx(150.0, rel=1e-12)
    assert not r.frame_rate_ok
    ok = readout_budget(PRESETS["ccd"], zones=1, t_m=1e-3)
    assert ok.frame_rate_ok and ok.achievable_frame_rate_hz == 15000.0
    # no frame-rate metadata: unconstrained
    free = readout_budget(PRESETS["uvpc"], zones=100, t_m=1e-6)
    assert free.frame_rate_ok and free.achievable_frame_rate_hz is None


def test_readout_budget_validation():
    with pytest.raises(ValueError):
        readout_budget(PRESETS["ccd"], zones=0, t_m=1e-4)
    with pytest.raises(ValueError):
        readout_budget(PRESETS["ccd"], zones=1, t_m=0.0)
