"""Interface-variable models built on top of the D-Q admittance.

The rectangular admittance maps bus voltage deviations to current
injections. Replacing the interface variables with polar quantities turns
it into, successively:

* ``J(s)``   -- (phi, V_n) in, (P, Q) out, via the operating-point
  interface matrices E, C, F;
* ``J_dp(s)`` -- bus frequency deviation instead of phase angle on the
  angle channels, realized by appending one integrator per bus;
* ``J_df(s)`` -- frequency deviation and normalized-magnitude derivative
  on all channels, appending 2n integrators.

The static low-frequency counterparts N_p(s) and N_df(s) are rational
wrappers around the load-flow Jacobian with the same channel filters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dqstamp import StateMeta, StateSpace
from .powerflow import JacobianLF, OperatingPoint

__all__ = [
    "DegenerateOperatingPointError",
    "PoleAtOriginError",
    "interface_matrices",
    "build_j_of_s",
    "build_jdp",
    "build_jdf",
    "RationalLF",
    "build_np",
    "build_ndf",
    "residue_at_origin",
]


class DegenerateOperatingPointError(ValueError):
    """Some quiescent |V| is zero, so the interface map is singular."""


class PoleAtOriginError(ValueError):
    """Evaluation at s = 0 requested on a model with its pole there."""


def interface_matrices(op: OperatingPoint) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Operating-point matrices (E, C, F) linking rectangular and polar ports.

    E maps current deviations to power deviations, C carries the operating
    injections into the feedthrough, and F maps (phi, V_n) deviations to
    (v_D, v_Q) deviations. Each is 2n x 2n, built from per-bus diagonals.
    """
    if np.any(op.vm <= 0.0):
        raise DegenerateOperatingPointError("operating point has |V| = 0 at some bus")
    vd = np.diag(op.v_d)
    vq = np.diag(op.v_q)
    idm = np.diag(op.i_d)
    iqm = np.diag(op.i_q)
    e = np.block([[vd, vq], [-vq, vd]])
    c = np.block([[idm, iqm], [iqm, -idm]])
    f = np.block([[vq, vd], [-vd, vq]])
    return e, c, f


def build_j_of_s(ydq: StateSpace, op: OperatingPoint) -> StateSpace:
    """Power-polar model J(s): inputs (phi, V_n), outputs (P, Q)."""
    if ydq.bus_ids != op.bus_ids:
        raise ValueError("admittance model and operating point bus orders differ")
    e, c, f = interface_matrices(op)
    labels_in = tuple(f"phi:{i}" for i in op.bus_ids) + tuple(f"Vn:{i}" for i in op.bus_ids)
    labels_out = tuple(f"P:{i}" for i in op.bus_ids) + tuple(f"Q:{i}" for i in op.bus_ids)
    return StateSpace(
        a=ydq.a.copy(),
        b=ydq.b @ f,
        c=e @ ydq.c,
        d=(e @ ydq.d + c) @ f,
        input_labels=labels_in,
        output_labels=labels_out,
        state_meta=ydq.state_meta,
        bus_ids=op.bus_ids,
    )


def _append_integrators(
    j: StateSpace, tau: float, channels: np.ndarray, channel_tag: str
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, tuple[StateMeta, ...], tuple[int, ...]]:
    """Realize J(s) with (1 + s tau)/s inserted on the selected input channels.

    Each filtered channel input u becomes x_int + tau*u where x_int
    integrates u, which appends len(channels) exact zero poles.
    """
    nx = j.n_states
    k = len(channels)
    b_f = j.b[:, channels]
    d_f = j.d[:, channels]
    a = np.zeros((nx + k, nx + k))
    a[:nx, :nx] = j.a
    a[:nx, nx:] = b_f
    b = np.zeros((nx + k, j.n_inputs))
    b[:nx, :] = j.b.copy()
    b[:nx, channels] = tau * b_f
    b[nx:, channels] = np.eye(k)
    c = np.hstack([j.c, d_f])
    d = j.d.copy()
    d[:, channels] = tau * d_f
    meta = j.state_meta + tuple(
        StateMeta("integrator", 0.0, f"int:{channel_tag}:{i}") for i in range(k)
    )
    integrators = tuple(range(nx, nx + k))
    return a, b, c, d, meta, integrators


def build_jdp(j: StateSpace, tau: float) -> StateSpace:
    """Frequency-deviation model J_dp(s) = J(s) diag(((1+s tau)/s) I, I)."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    n = j.n_inputs // 2
    a, b, c, d, meta, integ = _append_integrators(j, tau, np.arange(n), "omega")
    labels_in = tuple(f"omega:{i}" for i in j.bus_ids) + j.input_labels[n:]
    return StateSpace(
        a=a,
        b=b,
        c=c,
        d=d,
        input_labels=labels_in,
        output_labels=j.output_labels,
        state_meta=meta,
        bus_ids=j.bus_ids,
        integrator_states=integ,
    )


def build_jdf(j: StateSpace, tau: float) -> StateSpace:
    """Derivative model J_df(s) = J(s) (1+s tau)/s on all channels."""
    if tau <= 0:
        raise ValueError("tau must be > 0")
    n = j.n_inputs // 2
    a, b, c, d, meta, integ = _append_integrators(j, tau, np.arange(2 * n), "all")
    labels_in = tuple(f"omega:{i}" for i in j.bus_ids) + tuple(f"dVn:{i}" for i in j.bus_ids)
    return StateSpace(
        a=a,
        b=b,
        c=c,
        d=d,
        input_labels=labels_in,
        output_labels=j.output_labels,
        state_meta=meta,
        bus_ids=j.bus_ids,
        integrator_states=integ,
    )


@dataclass(frozen=True)
class RationalLF:
    """Low-frequency rational model: J_LF with (1+s tau)/s channel filters.

    kind "dp" filters only the angle channels (N_p), kind "df" all
    channels (N_df). Both have a simple pole at the origin.
    """

    jlf: JacobianLF
    tau: float
    kind: str  # "dp" | "df"

    def __post_init__(self) -> None:
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        if self.kind not in ("dp", "df"):
            raise ValueError(f"unknown RationalLF kind {self.kind!r}")

    @property
    def n_ports(self) -> int:
        return 2 * self.jlf.n_bus

    def tf(self, s: complex) -> np.ndarray:
        s = complex(s)
        if s == 0:
            raise PoleAtOriginError("model has a simple pole at s = 0; use residue_at_origin")
        gain = (1.0 + s * self.tau) / s
        full = self.jlf.full().astype(complex)
        if self.kind == "df":
            out = full * gain
        else:
            n = self.jlf.n_bus
            out = full.copy()
            out[:, :n] *= gain
        if s.imag == 0.0:
            return out.real
        return out


def build_np(jlf: JacobianLF, tau: float) -> RationalLF:
    """N_p(s): J_LF with the (1+s tau)/s filter on the angle channels only."""
    return RationalLF(jlf=jlf, tau=tau, kind="dp")


def build_ndf(jlf: JacobianLF, tau: float) -> RationalLF:
    """N_df(s) = J_LF (1+s tau)/s on every channel."""
    return RationalLF(jlf=jlf, tau=tau, kind="df")


def residue_at_origin(model: RationalLF) -> np.ndarray:
    """Residue of the simple origin pole: lim_{s->0} s * N(s).

    For the angle-filtered model only the angle columns survive the limit,
    giving [[J11, 0], [J21, 0]]; for the all-channel model it is J_LF.
    """
    n = model.jlf.n_bus
    if model.kind == "df":
        return model.jlf.full()
    res = np.zeros((2 * n, 2 * n))
    res[:n, :n] = model.jlf.j11
    res[n:, :n] = model.jlf.j21
    return res
