"""Spiking-memristor simulator and single-device temporal logic gates."""
from spikegate.device import REFERENCE_PARAMS, TIMESTEP, ZERO_HOLD, DeviceParams, DeviceState, new_device
from spikegate.gates import (
    NOT,
    OR,
    OR_THRESHOLD,
    OR_THRESHOLD_CAPTION,
    PRESETS,
    XOR,
    XOR_THRESHOLD,
    GateResult,
    GateSpec,
    calibrate_threshold,
    check_race_hazard,
    run_gate,
    run_not,
    truth_table,
)
from spikegate.instrument import ReplayPort, SimulatedPort, SourceMeasurePort, Trace, record, replay_port, simulated_port
from spikegate.waveform import Annotation, VoltageEvent, Waveform, encode_bits, pair_sweep, square_wave

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "DeviceParams",
    "DeviceState",
    "GateResult",
    "GateSpec",
    "NOT",
    "OR",
    "OR_THRESHOLD",
    "OR_THRESHOLD_CAPTION",
    "PRESETS",
    "REFERENCE_PARAMS",
    "ReplayPort",
    "SimulatedPort",
    "SourceMeasurePort",
    "TIMESTEP",
    "Trace",
    "VoltageEvent",
    "Waveform",
    "XOR",
    "XOR_THRESHOLD",
    "ZERO_HOLD",
    "calibrate_threshold",
    "check_race_hazard",
    "encode_bits",
    "new_device",
    "pair_sweep",
    "record",
    "replay_port",
    "run_gate",
    "run_not",
    "simulated_port",
    "square_wave",
    "truth_table",
]
