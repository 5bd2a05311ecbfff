"""Exit criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py`` for the per-criterion summary.
"""
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spikegate.batch import batch_truth_table
from spikegate.device import REFERENCE_PARAMS, new_device
from spikegate.experiments import V_A_GRID, exp_noncommutative, exp_square_wave
from spikegate.gates import OR, XOR, check_race_hazard, run_gate, run_not, truth_table
from spikegate.instrument import Trace, record, replay_port, simulated_port
from spikegate.waveform import encode_bits

from conftest import oracle_read

QUIET = REFERENCE_PARAMS.noiseless()
SIGMA = REFERENCE_PARAMS.noise_sigma
BITS = [(0, 0), (0, 1), (1, 0), (1, 1)]


@pytest.mark.acceptance(1, "OR truth table at 18 nA, reads within 2% of oracle, < 1 s")
def test_or_truth_table():
    start = time.perf_counter()
    report = truth_table(simulated_port(QUIET), OR)
    elapsed = time.perf_counter() - start
    published = [1.11e-9, 58.7e-9, -22.3e-9, 22.3e-9]
    for r, want in zip(report.results, published):
        assert r.output == OR.truth[r.bits]
        assert r.i_read == pytest.approx(want, rel=0.02)
        enc = OR.encoding
        assert r.i_read == pytest.approx(oracle_read(enc[r.bits[0]], enc[r.bits[1]]), rel=1e-12)
    assert OR.threshold == 1.8e-8
    assert report.passed
    assert elapsed < 1.0


@pytest.mark.acceptance(2, "XOR truth table at 12.5 nA, reads within 2% of oracle")
def test_xor_truth_table():
    report = truth_table(simulated_port(QUIET), XOR)
    published = [-11.15e-9, 42.6e-9, -42.6e-9, 11.15e-9]
    for r, want in zip(report.results, published):
        assert r.output == XOR.truth[r.bits]
        assert r.i_read == pytest.approx(want, rel=0.02)
    assert XOR.threshold == 1.25e-8
    assert report.passed


@pytest.mark.acceptance(3, "XOR 7-run reproducibility, 28/28 for >= 99.9% of 1000 seeds, < 10 s")
def test_xor_reproducibility():
    seeds = range(1000)
    start = time.perf_counter()
    scalar_pass = [truth_table(simulated_port(REFERENCE_PARAMS, s), XOR, repeats=7).passed for s in seeds]
    scalar_elapsed = time.perf_counter() - start

    start = time.perf_counter()
    bt = batch_truth_table(XOR, seeds=seeds, repeats=7)
    batch_elapsed = time.perf_counter() - start

    assert np.mean(scalar_pass) >= 0.999
    assert bt.pass_rate() >= 0.999
    assert np.array_equal(bt.n_correct == 28, np.array(scalar_pass))
    assert scalar_elapsed < 10.0
    assert batch_elapsed < 10.0


@pytest.mark.acceptance(4, "NOT gate: not(0)=1, not(1)=0, seeded and noise-free")
def test_not_gate():
    for a in (0, 1):
        assert run_not(simulated_port(QUIET), a).output == 1 - a
        for seed in range(20):
            assert run_not(simulated_port(REFERENCE_PARAMS, seed), a).output == 1 - a


@pytest.mark.acceptance(5, "non-commutative sum matches kappa*(1-exp(-dt/tau_u))*(v_b-v_a) within 1e-12 A")
def test_noncommutative():
    res = exp_noncommutative(simulated_port(QUIET), QUIET)
    assert len(res.table) == 13
    c = 1.0 - math.exp(-0.02 / QUIET.tau_u)
    for row, v_a in zip(res.table, V_A_GRID):
        assert abs(row["difference"] - QUIET.kappa * c * (0.12 - v_a)) <= 1e-12
        if v_a < 0.12:
            assert row["difference"] > 0
        else:
            assert row["difference"] == 0.0


@pytest.mark.acceptance(6, "shortened pulse spike = (1-exp(-1)) x full spike, +/-1%")
def test_shortened_pulse():
    res = exp_square_wave(simulated_port(QUIET), QUIET)
    ratio = res.summary["shortened_spike_A"] / res.summary["full_cycle_spike_A"]
    assert ratio == pytest.approx(1 - math.exp(-1), rel=0.01)
    noisy = exp_square_wave(simulated_port(REFERENCE_PARAMS, 4), REFERENCE_PARAMS)
    assert noisy.summary["ratio"] == pytest.approx(1 - math.exp(-1), rel=0.01)


@pytest.mark.acceptance(7, "zeroing residuals below 1e-6 V / 1e-12 A; repeat runs agree within 3 sigma")
def test_zeroing():
    d = new_device(REFERENCE_PARAMS, 0)
    for v in (0.0, 0.2, 0.2):
        d.advance(0.02)
        d.apply_voltage(v)
    d.zero()
    assert abs(d.u) < 1e-6 and abs(d.s) < 1e-12

    port = simulated_port(REFERENCE_PARAMS, 0)
    first = run_gate(port, OR, 1, 0)
    second = run_gate(port, OR, 1, 0)
    assert abs(first.i_read - second.i_read) < 3 * SIGMA

    port = simulated_port(QUIET)
    assert run_gate(port, XOR, 0, 1).i_read == run_gate(port, XOR, 0, 1).i_read


@pytest.mark.acceptance(8, "race hazard: 4 s idle flips OR(1,0) to 0; gaps > 3 tau_u flagged")
def test_race_hazard():
    res = run_gate(simulated_port(QUIET), OR, 1, 0, gap_steps=200, idle_level=0.0)
    assert res.output == 0 and not res.correct
    assert res.i_read == pytest.approx(3e-9, rel=0.01)
    assert not check_race_hazard(OR, 200, REFERENCE_PARAMS).ok
    window_steps = 3 * REFERENCE_PARAMS.tau_u / 0.02
    for gap in range(1, 12):
        assert check_race_hazard(OR, gap, REFERENCE_PARAMS).ok == (gap <= window_steps + 1e-9)


@pytest.mark.acceptance(9, "properties: linearity, decay, boundedness, determinism, record/replay")
@settings(max_examples=40, deadline=None)
@given(
    v=st.floats(-5, 5, allow_nan=False).filter(lambda x: abs(x) > 1e-6),
    levels=st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=12),
    seed=st.integers(0, 2**31),
    bits=st.sampled_from(BITS),
)
def test_properties(v, levels, seed, bits):
    p = QUIET
    d = new_device(p)
    d.apply_voltage(v)
    assert math.isclose(d.sample_current(), (p.kappa + p.g_dc) * v, rel_tol=1e-15)

    excess = []
    for _ in range(10):
        d.advance(0.02)
        excess.append(abs(d.sample_current() - p.g_dc * v))
    assert all(b <= a for a, b in zip(excess, excess[1:]))

    d = new_device(p)
    vmax = 0.0
    for lvl in levels:
        d.advance(0.02)
        d.apply_voltage(lvl)
        vmax = max(vmax, abs(lvl))
        assert abs(d.u) <= vmax + 1e-15

    wave = encode_bits(XOR.encoding, *bits)
    a = record(simulated_port(REFERENCE_PARAMS, seed), wave)
    b = record(simulated_port(REFERENCE_PARAMS, seed), wave)
    assert a == b

    live = run_gate(simulated_port(REFERENCE_PARAMS, seed), OR, *bits)
    again = run_gate(replay_port(live.trace), OR, *bits)
    assert (again.output, again.i_read) == (live.output, live.i_read)
    from_csv = run_gate(replay_port(Trace.from_csv(_as_file(live.trace))), OR, *bits)
    assert from_csv.output == live.output


def _as_file(trace):
    import io

    return io.StringIO(trace.to_csv())
