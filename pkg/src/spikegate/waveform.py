"""Stepped voltage waveforms on the instrument sampling grid.

Times are held as integer step counts; seconds only appear at I/O.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from spikegate.device import TIMESTEP


class Annotation(str, Enum):
    BIT1 = "bit1"
    BIT2 = "bit2"
    READ = "read"
    ZEROING = "zeroing"
    PLAIN = "plain"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class VoltageEvent:
    step: int
    v: float
    annotation: Annotation = Annotation.PLAIN

    def t(self, timestep: float = TIMESTEP) -> float:
        return self.step * timestep


@dataclass(frozen=True)
class Waveform:
    """Sequence of held voltage levels.

    Each event's level is held until the next event. ``duration_steps`` is the
    total number of sampled steps; it defaults to one past the last event.
    """

    events: tuple[VoltageEvent, ...]
    timestep: float = TIMESTEP
    duration_steps: int | None = None

    def __post_init__(self):
        events = tuple(self.events)
        object.__setattr__(self, "events", events)
        if not events:
            raise ValueError("waveform must contain at least one event")
        if events[0].step != 0:
            raise ValueError("first event must sit at step 0")
        for a, b in zip(events, events[1:]):
            if b.step <= a.step:
                raise ValueError(f"event steps must increase strictly: {a.step} -> {b.step}")
        n = events[-1].step + 1
        if self.duration_steps is None:
            object.__setattr__(self, "duration_steps", n)
        elif self.duration_steps < n:
            raise ValueError(f"duration_steps={self.duration_steps} ends before last event")

    def __len__(self):
        return len(self.events)

    def levels(self) -> list[tuple[float, Annotation]]:
        """Per-step (voltage, annotation) for every sampled step.

        Steps between events inherit the held level; they are annotated
        ``plain`` unless they belong to a zeroing interval.
        """
        out = []
        idx = 0
        held = self.events[0]
        for step in range(self.duration_steps):
            if idx < len(self.events) and self.events[idx].step == step:
                held = self.events[idx]
                idx += 1
                out.append((held.v, held.annotation))
            else:
                ann = Annotation.ZEROING if held.annotation is Annotation.ZEROING else Annotation.PLAIN
                out.append((held.v, ann))
        return out

    def read_events(self) -> list[VoltageEvent]:
        return [e for e in self.events if e.annotation is Annotation.READ]

    def to_csv(self) -> str:
        """Events in the trace CSV schema, current column left empty."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "t_s", "v_V", "i_A", "annotation"])
        for e in self.events:
            w.writerow([e.step, f"{e.t(self.timestep):.12g}", f"{e.v:.12g}", "", e.annotation.value])
        return buf.getvalue()


def _as_bit(b) -> int:
    if b in (0, 1) and not isinstance(b, float):
        return int(b)
    if b in ("0", "1"):
        return int(b)
    raise ValueError(f"unknown bit value {b!r}")


def encode_bits(
    encoding: Mapping[int, float],
    b1,
    b2,
    gap_steps: int = 1,
    idle_level: float | None = None,
    timestep: float = TIMESTEP,
) -> Waveform:
    """Two bits as time-separated voltage levels.

    0 V baseline at step 0, first bit at step 1, second bit (the read) at
    step ``1 + gap_steps``. By default the first bit's level is held across
    the gap; with ``idle_level`` the first bit lasts one step and the source
    returns to ``idle_level`` until the second bit.
    """
    if gap_steps < 1:
        raise ValueError(f"gap_steps must be >= 1, got {gap_steps}")
    v1 = encoding[_as_bit(b1)]
    v2 = encoding[_as_bit(b2)]
    events = [VoltageEvent(0, 0.0), VoltageEvent(1, v1, Annotation.BIT1)]
    if idle_level is not None and gap_steps > 1:
        events.append(VoltageEvent(2, idle_level))
    events.append(VoltageEvent(1 + gap_steps, v2, Annotation.READ))
    return Waveform(tuple(events), timestep)


def square_wave(
    amplitude: float,
    high_steps: int,
    low_steps: int,
    cycles: int,
    shortened_cycle: int | None = None,
    timestep: float = TIMESTEP,
) -> Waveform:
    """0 -> amplitude -> 0 pulses; cycle ``shortened_cycle`` (1-based) is high for one step."""
    if cycles < 1:
        raise ValueError("square wave needs at least one cycle")
    if high_steps < 1 or low_steps < 1:
        raise ValueError("high_steps and low_steps must be >= 1")
    if shortened_cycle is not None and not 1 <= shortened_cycle <= cycles:
        raise ValueError(f"shortened_cycle {shortened_cycle} outside 1..{cycles}")
    events = [VoltageEvent(0, 0.0)]
    step = 1
    for k in range(1, cycles + 1):
        high = 1 if k == shortened_cycle else high_steps
        events.append(VoltageEvent(step, amplitude))
        step += high
        events.append(VoltageEvent(step, 0.0))
        step += low_steps
    return Waveform(tuple(events), timestep, duration_steps=step)


def falling_edges(wave: Waveform) -> list[VoltageEvent]:
    """High-to-low transitions of a ``square_wave`` waveform, one per cycle."""
    return list(wave.events[2::2])


def pair_sweep(v_b: float, v_a_values: Sequence[float], timestep: float = TIMESTEP) -> list[Waveform]:
    """For each v_a: (0 -> v_a -> v_b) followed by (0 -> v_b -> v_a), one step apart."""
    out = []
    for v_a in v_a_values:
        if v_a > v_b:
            raise ValueError(f"v_a={v_a} exceeds v_b={v_b}")
        for first, second in ((v_a, v_b), (v_b, v_a)):
            out.append(
                Waveform(
                    (
                        VoltageEvent(0, 0.0),
                        VoltageEvent(1, first, Annotation.BIT1),
                        VoltageEvent(2, second, Annotation.BIT2),
                    ),
                    timestep,
                )
            )
    return out
