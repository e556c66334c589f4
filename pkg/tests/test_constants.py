import math
import pathlib
import re

import pytest

from ionoptics.constants import (
    CONSTANTS,
    AngularFrequency,
    Dimensionless,
    Frequency,
    IntensityClass,
    Length,
    angular_frequency_from_wavelength,
    wavelength_from_angular_frequency,
)


def test_defining_constants_are_exact_si_values():
    assert CONSTANTS.c == 2.99792458e8
    assert CONSTANTS.h == 6.62607015e-34
    assert CONSTANTS.e == 1.602176634e-19
    assert CONSTANTS.k_b == 1.380649e-23
    assert CONSTANTS.eps0 == 8.8541878128e-12


def test_hbar_is_h_over_two_pi():
    assert CONSTANTS.hbar == pytest.approx(CONSTANTS.h / (2 * math.pi), rel=1e-12)
    assert CONSTANTS.hbar * 2 * math.pi == pytest.approx(CONSTANTS.h, rel=1e-12)


def test_constants_positive():
    for value in (CONSTANTS.c, CONSTANTS.h, CONSTANTS.e, CONSTANTS.k_b, CONSTANTS.eps0):
        assert value > 0


@pytest.mark.parametrize("cls", [Length, Frequency, AngularFrequency, Dimensionless])
def test_quantities_reject_nan_and_inf(cls):
    for bad in (float("nan"), float("inf"), float("-inf")):
        with pytest.raises(ValueError):
            cls(bad)


@pytest.mark.parametrize("cls", [Length, Frequency, AngularFrequency])
def test_nonnegative_quantities_reject_negatives(cls):
    with pytest.raises(ValueError):
        cls(-1.0)
    assert cls(0.0) == 0.0


def test_dimensionless_allows_negative():
    assert Dimensionless(-0.5) == -0.5


def test_quantities_behave_as_floats():
    w = Length(2e-6)
    assert isinstance(w, float)
    assert w * 2 == 4e-6


def test_angular_frequency_of_313nm_uv_line():
    # 2 pi c / lambda for the Be+ cooling wavelength
    assert angular_frequency_from_wavelength(313e-9) == pytest.approx(6.018056e15, rel=1e-6)


def test_angular_frequency_halves_when_wavelength_doubles():
    w1 = angular_frequency_from_wavelength(313e-9)
    w2 = angular_frequency_from_wavelength(626e-9)
    assert w2 == pytest.approx(w1 / 2, rel=1e-12)


def test_wavelength_frequency_round_trip():
    import random

    rng = random.Random(1234)
    for _ in range(100):
        lam = 10 ** rng.uniform(-8, -4)  # 10 nm .. 100 um
        back = wavelength_from_angular_frequency(angular_frequency_from_wavelength(lam))
        assert back == pytest.approx(lam, rel=1e-12)


@pytest.mark.parametrize("fn", [angular_frequency_from_wavelength, wavelength_from_angular_frequency])
def test_conversions_reject_nonpositive(fn):
    for bad in (0.0, -1.0, float("nan")):
        with pytest.raises(ValueError):
            fn(bad)


def test_intensity_classes_ordered_and_documented():
    mild, modest, extreme = IntensityClass.MILD, IntensityClass.MODEST, IntensityClass.EXTREME
    assert mild.rank < modest.rank < extreme.rank
    assert mild.approx_power_range_w[0] == pytest.approx(1e-6)
    assert extreme.approx_power_range_w[1] is None
    # the documentation ranges tile upward without overlap
    assert mild.approx_power_range_w[1] == modest.approx_power_range_w[0]
    assert modest.approx_power_range_w[1] == extreme.approx_power_range_w[0]


def test_physical_constant_literals_live_only_in_constants_module():
    """Guards the single-source rule for physical constants."""
    src_root = pathlib.Path(__file__).resolve().parents[1] / "src" / "ionoptics"
    patterns = re.compile(
        r"2\.99792458|6\.62607015|1\.0545718|8\.8541878|1\.380649|1\.602176634"
    )
    offenders = []
    for path in src_root.rglob("*.py"):
        if path.name == "constants.py":
            continue
        if patterns.search(path.read_text()):
            offenders.append(str(path))
    assert offenders == []
