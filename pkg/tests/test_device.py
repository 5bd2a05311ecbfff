import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikegate.device import REFERENCE_PARAMS, DeviceParams, new_device
from spikegate.errors import ComplianceError, ParameterError, ZeroingError

from conftest import OR_READS, XOR_READS, oracle_read

volts = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False).filter(lambda v: abs(v) > 1e-6)


def test_oracle_matches_frozen_values():
    enc_or = {0: 0.01, 1: 0.2}
    enc_xor = {0: -0.1, 1: 0.1}
    for bits, expect in OR_READS.items():
        assert oracle_read(enc_or[bits[0]], enc_or[bits[1]]) == pytest.approx(expect, rel=1e-15)
    for bits, expect in XOR_READS.items():
        assert oracle_read(enc_xor[bits[0]], enc_xor[bits[1]]) == pytest.approx(expect, rel=1e-15)


def test_new_device_is_pristine():
    d = new_device(REFERENCE_PARAMS, seed=42)
    assert (d.u, d.s, d.v_applied, d.t) == (0.0, 0.0, 0.0, 0.0)
    assert d.is_zeroed()


@pytest.mark.parametrize(
    "field,value",
    [("tau_u", 0.0), ("tau_s", -1.0), ("kappa", 0.0), ("g_dc", -1e-9), ("noise_sigma", -1.0), ("zero_hold", 0.0), ("tau_u", math.nan)],
)
def test_invalid_params_rejected(field, value):
    with pytest.raises(ParameterError):
        DeviceParams(**{field: value})


def test_advance_accommodation_one_step():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.v_applied = 0.2
    d.advance(0.02)
    assert d.u == pytest.approx(0.2 * (1 - math.exp(-1)), rel=1e-14)
    assert d.u == pytest.approx(0.12642, abs=1e-5)
    assert d.t == pytest.approx(0.02)


def test_advance_transient_decay():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.s = 4.0e-8
    d.advance(0.02)
    assert d.s == pytest.approx(4.0e-8 * math.exp(-20 / 7), rel=1e-14)
    assert d.s == pytest.approx(2.297e-9, rel=1e-3)


def test_advance_fixed_point():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.u = d.v_applied = 0.1
    for dt in (0.02, 1.0, 7.5):
        d.advance(dt)
        assert d.u == 0.1


@pytest.mark.parametrize("dt", [0.0, -0.02])
def test_advance_rejects_nonpositive(dt):
    with pytest.raises(ValueError):
        new_device().advance(dt)


def test_apply_from_rest():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.apply_voltage(0.2)
    assert d.s == pytest.approx(4.0e-8, rel=1e-15)


def test_apply_after_one_step_gives_smaller_negative_spike():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.apply_voltage(0.2)
    d.advance(0.02)
    d.apply_voltage(0.01)
    assert d.s == pytest.approx(2.0e-7 * (0.01 - 0.2 * (1 - math.exp(-1))), rel=1e-13)
    assert d.s == pytest.approx(-2.328e-8, rel=1e-3)
    assert abs(d.s) < 2.0e-7 * (0.2 - 0.01)


def test_apply_same_voltage_keeps_transient():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.apply_voltage(0.1)
    d.advance(0.02)
    before = d.s
    d.apply_voltage(0.1)
    assert d.s == before


def test_compliance_limit():
    d = new_device()
    with pytest.raises(ComplianceError):
        d.apply_voltage(10.5)
    d.apply_voltage(-10.0)


def test_sample_current_from_rest():
    d = new_device(REFERENCE_PARAMS.noiseless())
    assert d.sample_current() == 0.0
    d.apply_voltage(0.1)
    assert d.sample_current() == pytest.approx(3.0e-8, rel=1e-15)


def test_sample_current_does_not_touch_state():
    d = new_device(REFERENCE_PARAMS, seed=3)
    d.apply_voltage(0.1)
    state = (d.u, d.s, d.v_applied, d.t)
    d.sample_current()
    assert (d.u, d.s, d.v_applied, d.t) == state


def test_sampling_deterministic_per_seed():
    a, b = new_device(REFERENCE_PARAMS, 7), new_device(REFERENCE_PARAMS, 7)
    for dev in (a, b):
        dev.apply_voltage(0.1)
    assert [a.sample_current() for _ in range(5)] == [b.sample_current() for _ in range(5)]
    c = new_device(REFERENCE_PARAMS, 8)
    c.apply_voltage(0.1)
    assert c.sample_current() != new_device(REFERENCE_PARAMS, 7).sample_current()


def test_noise_statistics():
    d = new_device(REFERENCE_PARAMS, 11)
    samples = np.array([d.sample_current() for _ in range(4000)])
    assert abs(samples.mean()) < 4 * 2e-10 / math.sqrt(4000)
    assert samples.std() == pytest.approx(2e-10, rel=0.05)


def test_zero_after_or_row():
    d = new_device(REFERENCE_PARAMS.noiseless())
    for v in (0.0, 0.2, 0.2):
        d.advance(0.02)
        d.apply_voltage(v)
    d.zero()
    assert abs(d.u) < 1e-6 and abs(d.s) < 1e-12
    # the residual is u * exp(-4 / 0.02), far below tolerance
    assert abs(d.u) <= 0.2 * math.exp(-200) * 1.0001


def test_zero_pristine_is_noop():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.zero()
    assert (d.u, d.s, d.v_applied) == (0.0, 0.0, 0.0)


def test_zero_failure_reports_residuals():
    d = new_device(DeviceParams(tau_u=10.0, noise_sigma=0.0))
    d.apply_voltage(1.0)
    d.advance(5.0)
    with pytest.raises(ZeroingError) as info:
        d.zero()
    assert info.value.u > 1e-6
    assert "residual" in str(info.value)


def test_zero_idempotent():
    d = new_device(REFERENCE_PARAMS.noiseless())
    d.apply_voltage(0.3)
    d.advance(0.02)
    d.zero()
    once = (d.u, d.s)
    d.zero()
    assert abs(d.u - once[0]) < 1e-6 and abs(d.s - once[1]) < 1e-12


@given(v=volts)
def test_spike_linearity_from_rest(v):
    p = REFERENCE_PARAMS.noiseless()
    d = new_device(p)
    d.apply_voltage(v)
    assert math.isclose(d.sample_current(), (p.kappa + p.g_dc) * v, rel_tol=1e-15)
    d2 = new_device(p)
    d2.apply_voltage(v / 2)
    assert d2.sample_current() * 2 == d.sample_current()


@given(v0=volts, v=volts, steps=st.integers(2, 40))
def test_transient_decays_monotonically(v0, v, steps):
    p = REFERENCE_PARAMS.noiseless()
    d = new_device(p)
    d.apply_voltage(v0)
    d.advance(0.02)
    d.apply_voltage(v)
    excess = []
    for _ in range(steps):
        excess.append(abs(d.sample_current() - p.g_dc * v))
        d.advance(0.02)
    assert all(b <= a for a, b in zip(excess, excess[1:]))


@settings(max_examples=60)
@given(levels=st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=30), dt=st.sampled_from([0.001, 0.02, 0.3]))
def test_accommodation_bounded_by_applied(levels, dt):
    d = new_device(REFERENCE_PARAMS.noiseless())
    vmax = 0.0
    for v in levels:
        d.advance(dt)
        d.apply_voltage(v)
        vmax = max(vmax, abs(v))
        assert abs(d.u) <= vmax + 1e-15


@given(v=st.floats(0.01, 5.0), k=st.integers(1, 30))
def test_downward_spike_grows_with_dwell(v, k):
    p = REFERENCE_PARAMS.noiseless()

    def down_spike(n):
        d = new_device(p)
        d.apply_voltage(v)
        for _ in range(n):
            d.advance(0.02)
        d.apply_voltage(0.0)
        return abs(d.s)

    assert down_spike(k + 1) > down_spike(k) or math.isclose(down_spike(k + 1), p.kappa * v, rel_tol=1e-12)
