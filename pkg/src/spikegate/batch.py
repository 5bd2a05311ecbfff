"""Many seeded devices driven through one schedule at once.

A schedule is captured by running ordinary port-level code (``run_gate``,
``truth_table``, ``record``...) against a :class:`ScheduleBuilder`, which logs
what it is asked to do instead of measuring anything. The batch kernels then
replay that exact sequence for every seed, with noise drawn from each seed's
generator in the same order :class:`~spikegate.device.DeviceState` would.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from spikegate import _kernels
from spikegate.device import TIMESTEP, DeviceParams, REFERENCE_PARAMS
from spikegate.gates import XOR, GateSpec, TruthTableReport, truth_table
from spikegate.instrument import steps_in


@dataclass(frozen=True)
class Schedule:
    volts: np.ndarray
    pre_hold: np.ndarray  # extra seconds held before the event's step, 0 if none
    timestep: float = TIMESTEP

    def __len__(self):
        return len(self.volts)


class ScheduleBuilder:
    """A port that only writes down set_level/elapse calls."""

    def __init__(self, timestep: float = TIMESTEP):
        self.timestep = timestep
        self.step = -1
        self._volts: list[float] = []
        self._pre: list[float] = []
        self._pending = 0.0
        self._read = True

    def set_level(self, volts: float) -> None:
        if not self._read:
            raise ValueError("every set_level must be followed by exactly one read")
        self._volts.append(float(volts))
        self._pre.append(self._pending)
        self._pending = 0.0
        self._read = False
        self.step += 1

    def read(self) -> float:
        if self._read:
            raise ValueError("read() without a fresh set_level")
        self._read = True
        return math.nan

    def elapse(self, seconds: float) -> None:
        if self._pending:
            raise ValueError("back-to-back elapse calls are not representable")
        self.step += steps_in(seconds, self.timestep)
        self._pending = float(seconds)

    def schedule(self) -> Schedule:
        return Schedule(np.array(self._volts, dtype=np.float64), np.array(self._pre, dtype=np.float64), self.timestep)


def simulate(
    params: DeviceParams,
    schedule: Schedule,
    seeds,
    use_numba: bool | None = None,
) -> np.ndarray:
    """Currents of shape (len(seeds), len(schedule)) for devices starting from rest."""
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.int64))
    n, m = len(seeds), len(schedule)
    if use_numba is None:
        kernel = _kernels.drive
    elif use_numba:
        if not _kernels.HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        kernel = _kernels.drive_numba
    else:
        kernel = _kernels.drive_numpy

    noise = np.zeros((n, m))
    if params.noise_sigma > 0:
        for b, seed in enumerate(seeds):
            noise[b] = np.random.default_rng(int(seed)).normal(0.0, params.noise_sigma, size=m)

    dt = schedule.timestep
    has_pre = schedule.pre_hold > 0
    pre_cu = np.array([1.0 - math.exp(-h / params.tau_u) if h > 0 else 0.0 for h in schedule.pre_hold])
    pre_es = np.array([math.exp(-h / params.tau_s) if h > 0 else 1.0 for h in schedule.pre_hold])
    cu = 1.0 - math.exp(-dt / params.tau_u)
    es = math.exp(-dt / params.tau_s)

    u = np.zeros(n)
    s = np.zeros(n)
    va = np.zeros(n)
    out = np.empty((n, m))
    kernel(u, s, va, schedule.volts, has_pre, pre_cu, pre_es, cu, es, params.kappa, params.g_dc, noise, out)
    return out


@dataclass(frozen=True)
class BatchTruthTable:
    seeds: np.ndarray
    i_read: np.ndarray  # (n_seeds, n_runs)
    expected: np.ndarray  # (n_runs,)
    threshold: float

    @property
    def outputs(self) -> np.ndarray:
        return (np.abs(self.i_read) > self.threshold).astype(np.int64)

    @property
    def n_correct(self) -> np.ndarray:
        return (self.outputs == self.expected).sum(axis=1)

    @property
    def margins(self) -> np.ndarray:
        rel = np.abs(self.i_read) / self.threshold - 1.0
        return np.where(self.expected == 1, rel, -rel)

    def pass_rate(self) -> float:
        return float(np.mean(self.n_correct == self.expected.size))


def truth_table_schedule(gate: GateSpec, repeats: int, timestep: float = TIMESTEP, **kwargs) -> tuple[Schedule, TruthTableReport]:
    builder = ScheduleBuilder(timestep)
    report = truth_table(builder, gate, repeats=repeats, **kwargs)
    return builder.schedule(), report


def batch_truth_table(
    gate: GateSpec = XOR,
    seeds=range(1000),
    repeats: int = 7,
    params: DeviceParams = REFERENCE_PARAMS,
    use_numba: bool | None = None,
    **kwargs,
) -> BatchTruthTable:
    """``truth_table(simulated_port(params, seed), gate, repeats)`` for every seed at once."""
    schedule, report = truth_table_schedule(gate, repeats, **kwargs)
    currents = simulate(params, schedule, seeds, use_numba=use_numba)
    reads = report.trace.read_indices()
    expected = np.array([r.expected for r in report.results], dtype=np.int64)
    return BatchTruthTable(np.asarray(list(seeds)), currents[:, reads], expected, gate.threshold)
