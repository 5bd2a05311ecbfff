"""Virtual source-measure unit, traces, and record/replay.

Gate logic and experiments only talk to a :class:`SourceMeasurePort`, so the
simulated device can be swapped for a replay of stored data (or, one day, a
hardware driver) without touching them.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Protocol, runtime_checkable

import numpy as np

from spikegate.device import TIMESTEP, DeviceParams, REFERENCE_PARAMS, new_device
from spikegate.errors import RecordError, ReplayDivergence
from spikegate.waveform import Annotation, Waveform

CSV_HEADER = ("step", "t_s", "v_V", "i_A", "annotation")
_ANNOTATIONS = frozenset(a.value for a in Annotation)


@dataclass(frozen=True, eq=False)
class Trace:
    """Sampled (step, t, v, i, annotation) series.

    ``i`` is NaN where no current was measured (serialized waveforms).
    """

    step: np.ndarray
    v: np.ndarray
    i: np.ndarray
    annotation: tuple[str, ...]
    timestep: float = TIMESTEP

    def __post_init__(self):
        step = np.asarray(self.step, dtype=np.int64)
        v = np.asarray(self.v, dtype=np.float64)
        i = np.asarray(self.i, dtype=np.float64)
        ann = tuple(str(a) for a in self.annotation)
        if not (len(step) == len(v) == len(i) == len(ann)):
            raise ValueError("trace columns differ in length")
        if len(step) > 1 and np.any(np.diff(step) <= 0):
            raise ValueError("trace steps must increase strictly")
        if len(step) and step[0] < 0:
            raise ValueError("trace steps must be non-negative")
        bad = set(ann) - _ANNOTATIONS
        if bad:
            raise ValueError(f"unknown annotation(s): {sorted(bad)}")
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "annotation", ann)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[int, float, float, str]], timestep: float = TIMESTEP) -> Trace:
        rows = list(rows)
        if not rows:
            return cls.empty(timestep)
        step, v, i, ann = zip(*rows)
        return cls(np.array(step), np.array(v), np.array(i), ann, timestep)

    @classmethod
    def empty(cls, timestep: float = TIMESTEP) -> Trace:
        return cls(np.zeros(0, np.int64), np.zeros(0), np.zeros(0), (), timestep)

    @classmethod
    def concat(cls, traces: Iterable[Trace]) -> Trace:
        traces = [t for t in traces]
        if not traces:
            return cls.empty()
        return cls(
            np.concatenate([t.step for t in traces]),
            np.concatenate([t.v for t in traces]),
            np.concatenate([t.i for t in traces]),
            tuple(a for t in traces for a in t.annotation),
            traces[0].timestep,
        )

    @property
    def t(self) -> np.ndarray:
        return self.step * self.timestep

    def __len__(self):
        return len(self.step)

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            self.timestep == other.timestep
            and self.annotation == other.annotation
            and np.array_equal(self.step, other.step)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.i, other.i, equal_nan=True)
        )

    def read_indices(self) -> np.ndarray:
        return np.array([k for k, a in enumerate(self.annotation) if a == "read"], dtype=np.int64)

    def to_csv(self, path: str | os.PathLike | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for k in range(len(self)):
            cur = "" if math.isnan(self.i[k]) else f"{self.i[k]:.12g}"
            w.writerow([int(self.step[k]), f"{self.step[k] * self.timestep:.12g}", f"{self.v[k]:.12g}", cur, self.annotation[k]])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source: str | os.PathLike | io.TextIOBase, timestep: float | None = None) -> Trace:
        """Parse a trace CSV (path or open file). The timestep is inferred from t_s/step."""
        if hasattr(source, "read"):
            text = source.read()
        else:
            with open(source, newline="") as fh:
                text = fh.read()
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ValueError(f"bad trace header {header!r}; expected {','.join(CSV_HEADER)}")
        rows, times = [], []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != 5:
                raise ValueError(f"line {lineno}: expected 5 fields, got {len(rec)}")
            step, t_s, v, i, ann = rec
            rows.append((int(step), float(v), float(i) if i.strip() else math.nan, ann.strip()))
            times.append(float(t_s))
        if timestep is None:
            timestep = TIMESTEP
            for (step, *_), t_s in zip(rows, times):
                if step > 0:
                    timestep = float(f"{t_s / step:.10g}")
                    break
        for (step, *_), t_s in zip(rows, times):
            if not math.isclose(t_s, step * timestep, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"t_s={t_s} at step {step} is off the {timestep} s grid")
        return cls.from_rows(rows, timestep)


@runtime_checkable
class SourceMeasurePort(Protocol):
    """Source a voltage, measure a current.

    ``set_level`` moves to the next sample step and applies the level;
    ``read`` returns the first measurement after that change; ``elapse``
    holds the current level for a grid-aligned number of seconds.
    ``step`` is the index of the latest sample.
    """

    timestep: float
    step: int

    def set_level(self, volts: float) -> None: ...

    def read(self) -> float: ...

    def elapse(self, seconds: float) -> None: ...


def steps_in(seconds: float, timestep: float) -> int:
    n = round(seconds / timestep)
    if n < 1 or not math.isclose(n * timestep, seconds, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"{seconds} s is not a positive multiple of the {timestep} s step")
    return n


class SimulatedPort:
    def __init__(self, params: DeviceParams = REFERENCE_PARAMS, seed: int = 0, timestep: float = TIMESTEP):
        self.device = new_device(params, seed)
        self.timestep = timestep
        self.step = -1

    @property
    def params(self) -> DeviceParams:
        return self.device.params

    def set_level(self, volts: float) -> None:
        self.device.advance(self.timestep)
        self.device.apply_voltage(volts)
        self.step += 1

    def read(self) -> float:
        return self.device.sample_current()

    def elapse(self, seconds: float) -> None:
        n = steps_in(seconds, self.timestep)
        self.device.advance(seconds)
        self.step += n


def simulated_port(params: DeviceParams = REFERENCE_PARAMS, seed: int = 0, timestep: float = TIMESTEP) -> SimulatedPort:
    return SimulatedPort(params, seed, timestep)


class ReplayPort:
    """Serves recorded currents back, checking that it is driven exactly as recorded."""

    def __init__(self, trace: Trace, v_tol: float = 1e-12):
        if len(trace) == 0:
            raise ReplayDivergence(0, "trace is empty, nothing to replay")
        self.trace = trace
        self.timestep = trace.timestep
        self.v_tol = v_tol
        self.step = int(trace.step[0]) - 1
        self._next = 0
        self._current: int | None = None

    def set_level(self, volts: float) -> None:
        self.step += 1
        if self._next >= len(self.trace):
            raise ReplayDivergence(self.step, "trace exhausted")
        k = self._next
        rec_step = int(self.trace.step[k])
        if rec_step != self.step:
            raise ReplayDivergence(self.step, f"recorded sample is at step {rec_step}")
        rec_v = float(self.trace.v[k])
        if abs(rec_v - volts) > self.v_tol:
            raise ReplayDivergence(self.step, f"set_level({volts!r}) but trace holds {rec_v!r} V")
        self._next += 1
        self._current = k

    def read(self) -> float:
        if self._current is None:
            raise ReplayDivergence(self.step, "read() before any set_level()")
        i = float(self.trace.i[self._current])
        if math.isnan(i):
            raise ReplayDivergence(self.step, "trace has no current at this step")
        return i

    def elapse(self, seconds: float) -> None:
        self.step += steps_in(seconds, self.timestep)

    @property
    def exhausted(self) -> bool:
        return self._next >= len(self.trace)


def replay_port(trace: Trace) -> ReplayPort:
    return ReplayPort(trace)


class TraceRecorder:
    """Drives a port one sample at a time and logs what it saw."""

    def __init__(self, port: SourceMeasurePort):
        self.port = port
        self.rows: list[tuple[int, float, float, str]] = []

    def sample(self, volts: float, annotation=Annotation.PLAIN) -> float:
        self.port.set_level(volts)
        i = self.port.read()
        self.rows.append((self.port.step, volts, i, str(annotation)))
        return i

    def elapse(self, seconds: float) -> None:
        self.port.elapse(seconds)

    def drive(self, waveform: Waveform) -> list[float]:
        return [self.sample(v, ann) for v, ann in waveform.levels()]

    def trace(self) -> Trace:
        return Trace.from_rows(self.rows, self.port.timestep)


def record(port: SourceMeasurePort, waveform: Waveform) -> Trace:
    """Drive ``waveform`` through ``port`` logging every step."""
    if waveform is None or len(waveform) == 0:
        raise ValueError("cannot record an empty waveform")
    rec = TraceRecorder(port)
    try:
        rec.drive(waveform)
    except Exception as exc:
        raise RecordError(f"recording stopped after {len(rec.rows)} samples: {exc}", rec.trace()) from exc
    return rec.trace()
