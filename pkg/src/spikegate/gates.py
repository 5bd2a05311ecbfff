"""Single-device temporal logic gates.

Two input bits are sent as voltage levels one sample apart. The current
measured at the instant the second level is applied is compared, by
magnitude, against a threshold to give the output bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from spikegate.device import TIMESTEP, ZERO_HOLD, DeviceParams, REFERENCE_PARAMS
from spikegate.errors import CalibrationError, ParameterError
from spikegate.instrument import SourceMeasurePort, Trace, TraceRecorder
from spikegate.waveform import Annotation, encode_bits

OR_THRESHOLD = 1.8e-8  # A, quoted in the OR gate text
OR_THRESHOLD_CAPTION = 5e-9  # A, quoted in the OR figure caption
XOR_THRESHOLD = 1.25e-8  # A

OR_TRUTH = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1}
XOR_TRUTH = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
NOT_TRUTH = {(0,): 1, (1,): 0}

COMPARATORS = ("magnitude",)


@dataclass(frozen=True)
class GateSpec:
    name: str
    encoding: Mapping[int, float]
    threshold: float
    truth: Mapping[tuple, int]
    comparator: str = "magnitude"

    def __post_init__(self):
        if not self.threshold > 0:
            raise ParameterError(f"threshold must be positive, got {self.threshold!r}")
        if set(self.encoding) != {0, 1}:
            raise ParameterError(f"encoding must map bits 0 and 1, got keys {sorted(self.encoding)}")
        if self.comparator not in COMPARATORS:
            raise ParameterError(f"unknown comparator {self.comparator!r}")
        object.__setattr__(self, "encoding", MappingProxyType(dict(self.encoding)))
        object.__setattr__(self, "truth", MappingProxyType(dict(self.truth)))

    @property
    def arity(self) -> int:
        return len(next(iter(self.truth)))

    @property
    def injective(self) -> bool:
        return self.encoding[0] != self.encoding[1]

    def decide(self, i_read: float) -> int:
        return int(abs(i_read) > self.threshold)

    def with_threshold(self, threshold: float) -> GateSpec:
        return GateSpec(self.name, dict(self.encoding), threshold, dict(self.truth), self.comparator)

    def with_encoding(self, encoding: Mapping[int, float]) -> GateSpec:
        return GateSpec(self.name, dict(encoding), self.threshold, dict(self.truth), self.comparator)


OR = GateSpec("or", {0: 0.01, 1: 0.2}, OR_THRESHOLD, OR_TRUTH)
XOR = GateSpec("xor", {0: -0.1, 1: 0.1}, XOR_THRESHOLD, XOR_TRUTH)
NOT = GateSpec("not", {0: -0.1, 1: 0.1}, XOR_THRESHOLD, NOT_TRUTH)

PRESETS = MappingProxyType({"or": OR, "xor": XOR, "not": NOT})


def get_gate(name: str) -> GateSpec:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise KeyError(f"unknown gate {name!r}; choose from {', '.join(PRESETS)}") from None


@dataclass(frozen=True)
class GateResult:
    bits: tuple[int, ...]
    output: int
    expected: int
    i_read: float
    margin: float
    trace: Trace = field(repr=False)

    @property
    def correct(self) -> bool:
        return self.output == self.expected


def margin_for(i_read: float, threshold: float, expected: int) -> float:
    """Relative distance of ``|i_read|`` from the threshold, positive when the decision is right."""
    rel = abs(i_read) / threshold - 1.0
    return rel if expected else -rel


def zero_port(rec: TraceRecorder, hold: float = ZERO_HOLD) -> None:
    rec.sample(0.0, Annotation.ZEROING)
    rec.elapse(hold)


def run_gate(
    port: SourceMeasurePort,
    gate: GateSpec,
    b1,
    b2,
    *,
    zero_first: bool = True,
    zero_hold: float = ZERO_HOLD,
    gap_steps: int = 1,
    idle_level: float | None = None,
) -> GateResult:
    """Zero the device, send the two bits and decode the read sample."""
    if isinstance(gate, str):
        gate = get_gate(gate)
    wave = encode_bits(gate.encoding, b1, b2, gap_steps=gap_steps, idle_level=idle_level, timestep=port.timestep)
    bits = (int(b1), int(b2))
    rec = TraceRecorder(port)
    if zero_first:
        zero_port(rec, zero_hold)
    currents = rec.drive(wave)
    i_read = currents[wave.read_events()[0].step]
    expected = _expected(gate, bits)
    return GateResult(bits, gate.decide(i_read), expected, i_read, margin_for(i_read, gate.threshold, expected), rec.trace())


def _expected(gate: GateSpec, bits: tuple[int, ...]) -> int:
    if gate.arity == 1:
        # single-input gates are driven with a fixed leading '1'
        return gate.truth[(bits[1],)]
    return gate.truth[bits]


def run_not(port: SourceMeasurePort, a, **kwargs) -> GateResult:
    """NOT a, computed as XOR(1, a) with the read taken at ``a``."""
    return run_gate(port, NOT, 1, a, **kwargs)


def input_rows(gate: GateSpec) -> list[tuple[int, int]]:
    if gate.arity == 1:
        return [(1, a) for (a,) in sorted(gate.truth)]
    return sorted(gate.truth)


@dataclass
class TruthTableReport:
    gate: GateSpec
    repeats: int
    results: list[GateResult]

    @property
    def n_correct(self) -> int:
        return sum(r.correct for r in self.results)

    @property
    def n_total(self) -> int:
        return len(self.results)

    @property
    def passed(self) -> bool:
        return self.n_correct == self.n_total

    @property
    def min_margin(self) -> float:
        return min(r.margin for r in self.results)

    def row_min_margins(self) -> dict[tuple[int, ...], float]:
        out: dict[tuple[int, ...], float] = {}
        for r in self.results:
            out[r.bits] = min(out.get(r.bits, math.inf), r.margin)
        return out

    def worst_row(self) -> tuple[int, ...]:
        margins = self.row_min_margins()
        return min(margins, key=margins.get)

    @property
    def trace(self) -> Trace:
        return Trace.concat(r.trace for r in self.results)


def truth_table(port: SourceMeasurePort, gate: GateSpec, repeats: int = 1, **kwargs) -> TruthTableReport:
    """Run every input row ``repeats`` times, zeroing before each run."""
    if repeats < 1:
        raise ValueError(f"repeats must be >= 1, got {repeats}")
    results = []
    for _ in range(repeats):
        for b1, b2 in input_rows(gate):
            results.append(run_gate(port, gate, b1, b2, **kwargs))
    return TruthTableReport(gate, repeats, results)


@dataclass(frozen=True)
class Calibration:
    threshold: float
    max_zero: float
    min_one: float


def calibrate_threshold(port: SourceMeasurePort, gate: GateSpec, trials: int = 1, **kwargs) -> Calibration:
    """Midpoint between the largest '0' read and the smallest '1' read, by magnitude."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    report = truth_table(port, gate, repeats=trials, **kwargs)
    zeros = [abs(r.i_read) for r in report.results if r.expected == 0]
    ones = [abs(r.i_read) for r in report.results if r.expected == 1]
    max_zero, min_one = max(zeros), min(ones)
    if not max_zero < min_one:
        raise CalibrationError(max_zero, min_one)
    return Calibration(0.5 * (max_zero + min_one), max_zero, min_one)


@dataclass(frozen=True)
class RaceHazardReport:
    ok: bool
    gap_s: float
    window_s: float
    memory_fraction: float

    def __str__(self):
        if self.ok:
            return f"ok: gap {self.gap_s:g} s within {self.window_s:g} s memory window"
        return (
            f"violation: gap {self.gap_s:g} s exceeds {self.window_s:g} s memory window; "
            f"only {self.memory_fraction:.3g} of the first bit's memory remains"
        )


def check_race_hazard(
    gate: GateSpec,
    gap_steps: int,
    params: DeviceParams = REFERENCE_PARAMS,
    timestep: float = TIMESTEP,
) -> RaceHazardReport:
    """The second bit must land within three accommodation time constants of the first."""
    if gap_steps < 1:
        raise ValueError(f"bits must be time-separated, gap_steps={gap_steps}")
    gap = gap_steps * timestep
    window = 3.0 * params.tau_u
    ok = gap <= window * (1 + 1e-12)
    return RaceHazardReport(ok, gap, window, math.exp(-gap / params.tau_u))
