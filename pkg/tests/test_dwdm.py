import io

import numpy as np
import pytest

from icsrs.dwdm import (
    ChannelError,
    ChannelPlan,
    ClassicalChannel,
    DetuningRangeError,
    Direction,
    ProfileFormatError,
    RamanEfficiencyProfile,
    aggregate_icsrs,
    aggregate_icsrs_factored,
    channel_noise,
    eta_lookup,
    flat_profile,
    load_profile,
    parse_profile,
    single_channel_plan,
)
from icsrs.raman import backward_icsrs, forward_icsrs
from icsrs.units import thz_to_nm

ETA = 6e-9


@pytest.fixture
def grid16():
    return ChannelPlan.frequency_grid(193.5, 200.0, 8, 8, power=1.0)


def test_frequency_grid(grid16):
    assert len(grid16) == 16
    assert float(grid16.quantum_wavelength) == pytest.approx(thz_to_nm(193.5))
    lams = [float(c.wavelength) for c in grid16.channels]
    assert lams == sorted(lams, reverse=True)  # ascending frequency
    assert all(c.direction is Direction.CO for c in grid16.channels)
    grid16.check_c_band()


def test_plan_validation():
    with pytest.raises(ValueError, match="share wavelength"):
        ChannelPlan(1550, [ClassicalChannel(1530, 1.0), ClassicalChannel(1530, 2.0)])
    with pytest.raises(ValueError, match="quantum wavelength"):
        ChannelPlan(1550, [ClassicalChannel(1550, 1.0)])
    with pytest.raises(ValueError, match="C-band"):
        ChannelPlan(1310, [ClassicalChannel(1550, 1.0)]).check_c_band()
    with pytest.raises(ValueError):
        ClassicalChannel(1530, 1.0, "sideways")


def test_union_requires_same_quantum_wavelength():
    a = single_channel_plan(1550, 1530, 1.0)
    b = single_channel_plan(1550, 1540, 1.0, Direction.COUNTER)
    assert len(a.union(b)) == 2
    with pytest.raises(ValueError):
        a.union(single_channel_plan(1551, 1540, 1.0))


def test_profile_interpolation():
    prof = RamanEfficiencyProfile((-10.0, 0.0, 10.0), (1e-9, 3e-9, 2e-9))
    assert prof.eta_at(-10.0) == 1e-9
    assert prof.eta_at(10.0) == 2e-9
    assert prof.eta_at(0.0) == 3e-9
    assert prof.eta_at(-5.0) == pytest.approx(2e-9, rel=1e-15)
    assert prof.eta_at(2.5) == pytest.approx(2.75e-9, rel=1e-15)
    # detuning is quantum minus classical
    assert eta_lookup(prof, 1540.0, 1545.0) == pytest.approx(2.5e-9, rel=1e-12)
    with pytest.raises(DetuningRangeError):
        prof.eta_at(10.5)


def test_profile_construction_errors():
    with pytest.raises(ValueError):
        RamanEfficiencyProfile((0.0,), (1e-9,))
    with pytest.raises(ValueError):
        RamanEfficiencyProfile((0.0, 0.0), (1e-9, 1e-9))
    with pytest.raises(ValueError):
        RamanEfficiencyProfile((0.0, 1.0), (1e-9, -1e-9))


def test_bundled_profiles():
    flat = load_profile("flat")
    assert flat.eta_at(-150.0) == ETA
    assert flat == flat_profile()
    illus = load_profile("illustrative")
    assert illus.span == (-40.0, 40.0)


def test_load_from_path_and_stream(tmp_path):
    p = tmp_path / "prof.csv"
    p.write_text("detuning_nm,eta\n-5, 1e-9\n5, 3e-9  # comment\n")
    prof = load_profile(p)
    assert prof.eta_at(0.0) == pytest.approx(2e-9)
    assert load_profile(io.StringIO(p.read_text())).etas == prof.etas


@pytest.mark.parametrize(
    "text, line, match",
    [
        ("-5 1e-9\n5 2e-9 3\n", 2, "2 columns"),
        ("-5 1e-9\nfoo bar\n", 2, "non-numeric"),
        ("# hdr\n\n-5 1e-9\n5 -2e-9\n", 4, "negative"),
        ("-5 1e-9\n5 2e-9\n5 2e-9\n", 3, "not above"),
    ],
)
def test_profile_errors_carry_line_numbers(text, line, match):
    with pytest.raises(ProfileFormatError, match=match) as info:
        parse_profile(text, "bad.txt")
    assert info.value.line == line
    assert f"bad.txt:{line}" in str(info.value)


def test_empty_and_single_row_profiles():
    with pytest.raises(ProfileFormatError, match="no data"):
        parse_profile("# nothing here\n")
    with pytest.raises(ProfileFormatError, match="two rows"):
        parse_profile("0 1e-9\n")


def test_load_profile_rejects_other_types():
    with pytest.raises(TypeError):
        load_profile(42)


def test_single_channel_matches_closed_form(fig4_link):
    co = single_channel_plan(1550, 1530, 1.0)
    counter = single_channel_plan(1550, 1530, 1.0, Direction.COUNTER)
    prof = flat_profile()
    assert aggregate_icsrs(co, fig4_link, prof) == forward_icsrs(fig4_link, 1.0, ETA)
    assert aggregate_icsrs(counter, fig4_link, prof) == backward_icsrs(fig4_link, 1.0, ETA)


def test_sixteen_channels_flat_is_sixteen_singles(grid16, fig4_link):
    total = aggregate_icsrs(grid16, fig4_link, flat_profile())
    assert total == pytest.approx(16 * forward_icsrs(fig4_link, 1.0, ETA), rel=1e-14)


def test_additivity(grid16, fig4_link):
    prof = load_profile("illustrative")
    lower = ChannelPlan(grid16.quantum_wavelength, grid16.channels[:8])
    upper = ChannelPlan(grid16.quantum_wavelength, grid16.channels[8:])
    parts = aggregate_icsrs(lower, fig4_link, prof) + aggregate_icsrs(upper, fig4_link, prof)
    assert aggregate_icsrs(grid16, fig4_link, prof) == pytest.approx(parts, rel=1e-14)
    assert aggregate_icsrs(lower.union(upper), fig4_link, prof) == pytest.approx(parts, rel=1e-14)


def test_factored_equivalence(fig4_link):
    prof = load_profile("illustrative")
    rng = np.random.default_rng(7)
    for _ in range(20):
        freqs = 193.5 + np.setdiff1d(rng.integers(-20, 21, size=12), [0]) * 0.2
        chans = [ClassicalChannel(thz_to_nm(f), float(rng.uniform(0.01, 10)),
                                  ("co", "counter")[int(rng.integers(2))]) for f in freqs]
        plan = ChannelPlan(thz_to_nm(193.5), chans)
        direct = aggregate_icsrs(plan, fig4_link, prof)
        assert aggregate_icsrs_factored(plan, fig4_link, prof) == pytest.approx(direct, rel=1e-12)


def test_factored_rejects_per_channel_attenuation(fig4_link):
    plan = ChannelPlan(1550, [ClassicalChannel(1530, 1.0, alpha_c=0.06)])
    with pytest.raises(ValueError):
        aggregate_icsrs_factored(plan, fig4_link, flat_profile())


def test_per_channel_attenuation_override(fig4_link):
    plan = ChannelPlan(1550, [ClassicalChannel(1530, 1.0, alpha_c=0.06)])
    expected = forward_icsrs(fig4_link.replace(alpha_c=0.06), 1.0, ETA)
    assert aggregate_icsrs(plan, fig4_link, flat_profile()) == expected


def test_power_scaling(grid16, fig4_link):
    prof = load_profile("illustrative")
    base = aggregate_icsrs(grid16, fig4_link, prof)
    assert aggregate_icsrs(grid16.scaled(3.5), fig4_link, prof) == pytest.approx(3.5 * base, rel=1e-14)
    assert aggregate_icsrs(grid16.with_power(0.0), fig4_link, prof) == 0.0


def test_channel_noise_order(grid16, fig4_link):
    prof = load_profile("illustrative")
    per = channel_noise(grid16, fig4_link, prof)
    assert len(per) == 16
    assert sum(per) == pytest.approx(aggregate_icsrs(grid16, fig4_link, prof), rel=1e-15)


def test_channel_error_names_channel(fig4_link):
    plan = ChannelPlan(1550, [ClassicalChannel(1545, 1.0), ClassicalChannel(1480, 1.0)])
    with pytest.raises(ChannelError) as info:
        aggregate_icsrs(plan, fig4_link, load_profile("illustrative"))
    assert info.value.index == 1
    assert "1480.000 nm" in str(info.value)
