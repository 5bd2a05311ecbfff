"""INI configuration.

Precedence, lowest first: built-in reference values, the config file,
command-line flags. Recognised sections::

    [device]          any DeviceParams field, e.g. kappa = 2e-7
    [gate.or]         threshold, v0, v1 (also gate.xor, gate.not)
    [run]             seed
"""
from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass, field

from spikegate.device import DeviceParams, REFERENCE_PARAMS
from spikegate.errors import ParameterError
from spikegate.gates import PRESETS, GateSpec

_DEVICE_FIELDS = {f.name for f in dataclasses.fields(DeviceParams)}
_GATE_KEYS = {"threshold", "v0", "v1"}


@dataclass
class Settings:
    params: DeviceParams = REFERENCE_PARAMS
    gates: dict[str, GateSpec] = field(default_factory=lambda: dict(PRESETS))
    seed: int = 0


def load_settings(path: str | os.PathLike | None = None) -> Settings:
    settings = Settings()
    if path is None:
        return settings
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)

    for section in cp.sections():
        items = dict(cp.items(section))
        if section == "device":
            unknown = set(items) - _DEVICE_FIELDS
            if unknown:
                raise ParameterError(f"[device]: unknown key(s) {sorted(unknown)}")
            settings.params = settings.params.with_overrides(**{k: _float(section, k, v) for k, v in items.items()})
        elif section.startswith("gate."):
            name = section[len("gate."):]
            if name not in settings.gates:
                raise ParameterError(f"[{section}]: unknown gate {name!r}")
            unknown = set(items) - _GATE_KEYS
            if unknown:
                raise ParameterError(f"[{section}]: unknown key(s) {sorted(unknown)}")
            gate = settings.gates[name]
            if "threshold" in items:
                gate = gate.with_threshold(_float(section, "threshold", items["threshold"]))
            if "v0" in items or "v1" in items:
                enc = dict(gate.encoding)
                for bit in (0, 1):
                    key = f"v{bit}"
                    if key in items:
                        enc[bit] = _float(section, key, items[key])
                gate = gate.with_encoding(enc)
            settings.gates[name] = gate
        elif section == "run":
            for k, v in items.items():
                if k != "seed":
                    raise ParameterError(f"[run]: unknown key {k!r}")
                try:
                    settings.seed = int(v)
                except ValueError:
                    raise ParameterError(f"[run] seed: not an integer: {v!r}") from None
        else:
            raise ParameterError(f"unknown config section [{section}]")
    return settings


def _float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParameterError(f"[{section}] {key}: not a number: {raw!r}") from None
