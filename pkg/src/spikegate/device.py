"""Phenomenological model of a single spiking memristor.

The measured current is the sum of a DC conduction term, a transient spike
amplitude and Gaussian read noise::

    i = g_dc * V + s + noise

Every change of the applied voltage resets the transient to
``kappa * (V_new - u)``, where ``u`` is an accommodation voltage that relaxes
towards the applied voltage with time constant ``tau_u``. The transient decays
with ``tau_s``. The accommodation voltage is the device's short-term memory:
a spike that follows closely on an earlier voltage change is measured against
a partially-adjusted ``u`` and comes out smaller (or larger) than the same
voltage step taken from rest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from spikegate.errors import ComplianceError, ParameterError, ZeroingError

TIMESTEP = 0.02  # s, instrument sampling interval
ZERO_HOLD = 4.0  # s at 0 V to erase memory


@dataclass(frozen=True)
class DeviceParams:
    kappa: float = 2.0e-7  # A/V
    tau_u: float = 0.02  # s
    tau_s: float = 0.007  # s
    g_dc: float = 1.0e-7  # S
    noise_sigma: float = 2.0e-10  # A
    zero_hold: float = ZERO_HOLD  # s
    eps_u: float = 1e-6  # V
    eps_s: float = 1e-12  # A
    compliance: float = 10.0  # V

    def __post_init__(self):
        checks = [
            ("kappa", self.kappa > 0),
            ("tau_u", self.tau_u > 0),
            ("tau_s", self.tau_s > 0),
            ("g_dc", self.g_dc >= 0),
            ("noise_sigma", self.noise_sigma >= 0),
            ("zero_hold", self.zero_hold > 0),
            ("eps_u", self.eps_u > 0),
            ("eps_s", self.eps_s > 0),
            ("compliance", self.compliance > 0),
        ]
        for name, ok in checks:
            value = getattr(self, name)
            if not ok or not math.isfinite(value):
                raise ParameterError(f"invalid {name}={value!r}")

    def noiseless(self) -> DeviceParams:
        return replace(self, noise_sigma=0.0)

    def with_overrides(self, **overrides) -> DeviceParams:
        return replace(self, **overrides)


REFERENCE_PARAMS = DeviceParams()


@dataclass
class DeviceState:
    """Mutable dynamical state of one device.

    ``u`` is the accommodation voltage (V), ``s`` the live transient (A),
    ``v_applied`` the held source voltage (V) and ``t`` the clock (s).
    """

    params: DeviceParams
    rng: np.random.Generator = field(repr=False)
    u: float = 0.0
    s: float = 0.0
    v_applied: float = 0.0
    t: float = 0.0

    def advance(self, dt: float) -> None:
        """Hold ``v_applied`` for ``dt`` seconds. Noise never enters the state."""
        if not dt > 0:
            raise ValueError(f"dt must be positive, got {dt!r}")
        p = self.params
        self.u += (self.v_applied - self.u) * (1.0 - math.exp(-dt / p.tau_u))
        self.s *= math.exp(-dt / p.tau_s)
        self.t += dt

    def apply_voltage(self, v_new: float) -> None:
        if not abs(v_new) <= self.params.compliance:
            raise ComplianceError(
                f"|{v_new!r} V| exceeds compliance {self.params.compliance} V"
            )
        if v_new != self.v_applied:
            # a fresh voltage change replaces the live transient
            self.s = self.params.kappa * (v_new - self.u)
        self.v_applied = v_new

    def sample_current(self) -> float:
        p = self.params
        noise = self.rng.normal(0.0, p.noise_sigma) if p.noise_sigma > 0 else 0.0
        return p.g_dc * self.v_applied + self.s + noise

    def zero(self) -> None:
        """Take the device to 0 V for ``zero_hold`` seconds and check the memory is gone."""
        p = self.params
        self.apply_voltage(0.0)
        self.advance(p.zero_hold)
        if not (abs(self.u) < p.eps_u and abs(self.s) < p.eps_s):
            raise ZeroingError(self.u, self.s, p.eps_u, p.eps_s)

    def is_zeroed(self) -> bool:
        p = self.params
        return abs(self.u) < p.eps_u and abs(self.s) < p.eps_s


def new_device(params: DeviceParams = REFERENCE_PARAMS, seed: int = 0) -> DeviceState:
    if not isinstance(params, DeviceParams):
        raise ParameterError(f"expected DeviceParams, got {type(params).__name__}")
    return DeviceState(params=params, rng=np.random.default_rng(seed))
