"""AC power flow and the unreduced low-frequency Jacobian J_LF.

Conventions: the synchronous frame is aligned so that v_D = |V| sin(phi)
and v_Q = |V| cos(phi); complex phasors are carried as v_Q + j v_D so the
usual phasor algebra applies with the bus angle phi. Currents are
injections into the network (i = Y_bus v). J_LF is the full 2n x 2n
sensitivity of every bus (P, Q) to every bus (phi, V_n), with no slack
rows or columns removed; V_n is the voltage magnitude normalized by its
quiescent value, so the magnitude columns of the textbook polar Jacobian
are scaled by |V|_o.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netcase import NetworkCase

__all__ = [
    "OperatingPoint",
    "JacobianLF",
    "PowerFlowError",
    "ConsistencyError",
    "build_ybus",
    "solve_powerflow",
    "build_jlf_analytic",
    "decouple",
    "symmetric_part_eigenvalues",
]


class PowerFlowError(RuntimeError):
    """Newton iteration failed; carries the final mismatch."""

    def __init__(self, message: str, mismatch: float):
        super().__init__(f"{message} (final max mismatch {mismatch:.3e} pu)")
        self.mismatch = mismatch


class ConsistencyError(ValueError):
    """Operating point does not solve the case it was paired with."""


@dataclass(frozen=True)
class OperatingPoint:
    """Per-bus quiescent voltages, network-injected currents and powers."""

    bus_ids: tuple[int, ...]
    vm: np.ndarray  # |V|_o
    phi: np.ndarray  # rad
    v_d: np.ndarray
    v_q: np.ndarray
    i_d: np.ndarray
    i_q: np.ndarray
    p: np.ndarray
    q: np.ndarray

    @property
    def n_bus(self) -> int:
        return len(self.bus_ids)

    def voltage_phasor(self) -> np.ndarray:
        """Complex V as v_Q + j v_D."""
        return self.v_q + 1j * self.v_d

    def validate(self, atol: float = 1e-10) -> None:
        if np.any(self.vm <= 0):
            raise ValueError("operating point has a zero |V|")
        if not np.allclose(self.vm, np.hypot(self.v_d, self.v_q), atol=atol):
            raise ValueError("|V| inconsistent with (v_D, v_Q)")
        p = self.v_d * self.i_d + self.v_q * self.i_q
        q = self.v_d * self.i_q - self.v_q * self.i_d
        if np.max(np.abs(p - self.p)) > atol or np.max(np.abs(q - self.q)) > atol:
            raise ValueError("P/Q inconsistent with voltage-current products")


def build_ybus(case: NetworkCase) -> np.ndarray:
    """Complex nodal admittance matrix at nominal frequency, shunts included."""
    n = case.n_bus
    idx = {bus_id: i for i, bus_id in enumerate(case.bus_ids)}
    y = np.zeros((n, n), dtype=complex)
    for br in case.branches:
        k, m = idx[br.from_bus], idx[br.to_bus]
        ys = 1.0 / complex(br.r, br.x)
        a = br.ratio
        y[k, k] += ys / a**2
        y[m, m] += ys
        y[k, m] -= ys / a
        y[m, k] -= ys / a
        y[k, k] += 1j * br.b_line / 2.0
        y[m, m] += 1j * br.b_line / 2.0
    for i, bus in enumerate(case.buses):
        y[i, i] += complex(bus.g_shunt, bus.b_shunt)
    return y


def _injection_targets(case: NetworkCase) -> tuple[np.ndarray, np.ndarray, list[int], list[int], int]:
    """Scheduled P/Q arrays plus PV/PQ index lists and the slack index."""
    n = case.n_bus
    p = np.zeros(n)
    q = np.zeros(n)
    pv: list[int] = []
    slack = -1
    for inj in case.injections:
        i = case.bus_index(inj.bus)
        if inj.kind == "slack":
            slack = i
        elif inj.kind == "pv":
            p[i] = inj.p
            pv.append(i)
        else:
            p[i] = inj.p
            q[i] = inj.q
    # Buses without any injection entry are zero-injection PQ buses.
    pq = sorted(set(range(n)) - set(pv) - {slack})
    return p, q, pv, pq, slack


def solve_powerflow(
    case: NetworkCase,
    tol: float = 1e-10,
    max_iter: int = 50,
) -> OperatingPoint:
    """Newton-Raphson power flow from a flat start.

    Converges to max|mismatch| < tol (well below the 1e-8 contract);
    raises PowerFlowError on divergence or a singular iteration matrix.
    """
    n = case.n_bus
    y = build_ybus(case)
    p_sched, q_sched, pv, pq, slack = _injection_targets(case)

    vm = np.ones(n)
    phi = np.zeros(n)
    for inj in case.injections:
        if inj.vset is not None:
            vm[case.bus_index(inj.bus)] = inj.vset

    ang_idx = [i for i in range(n) if i != slack]
    mag_idx = list(pq)
    mismatch = np.inf
    for _ in range(max_iter):
        v = vm * np.exp(1j * phi)
        s = v * np.conj(y @ v)
        dp = p_sched - s.real
        dq = q_sched - s.imag
        rhs = np.concatenate([dp[ang_idx], dq[mag_idx]])
        mismatch = float(np.max(np.abs(rhs))) if rhs.size else 0.0
        if mismatch < tol:
            break
        j11, j12, j21, j22 = _jacobian_blocks(y, v, s)
        jac = np.block(
            [
                [j11[np.ix_(ang_idx, ang_idx)], j12[np.ix_(ang_idx, mag_idx)]],
                [j21[np.ix_(mag_idx, ang_idx)], j22[np.ix_(mag_idx, mag_idx)]],
            ]
        )
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError as exc:
            raise PowerFlowError(f"singular power-flow Jacobian: {exc}", mismatch) from exc
        phi[ang_idx] += step[: len(ang_idx)]
        # Magnitude corrections are in normalized V_n, so they scale |V|.
        vm[mag_idx] *= 1.0 + step[len(ang_idx):]
    else:
        raise PowerFlowError(f"no convergence after {max_iter} iterations", mismatch)
    if mismatch > 1e-8:
        raise PowerFlowError("converged loop exited above the mismatch contract", mismatch)

    v = vm * np.exp(1j * phi)
    i = y @ v
    # Zero-injection buses carry exactly zero device current.
    injected = {case.bus_index(inj.bus) for inj in case.injections}
    for k in range(n):
        if k not in injected:
            i[k] = 0.0
    s = v * np.conj(i)
    return OperatingPoint(
        bus_ids=case.bus_ids,
        vm=vm,
        phi=phi,
        v_d=v.imag.copy(),
        v_q=v.real.copy(),
        i_d=i.imag.copy(),
        i_q=i.real.copy(),
        p=s.real.copy(),
        q=s.imag.copy(),
    )


def _jacobian_blocks(
    y: np.ndarray, v: np.ndarray, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Polar Jacobian blocks d(P,Q)/d(phi,V_n) with supplied diagonal P,Q.

    The off-diagonal entries are the textbook trigonometric forms from the
    admittance matrix; the diagonal entries fold in the operating-point
    injections (P, Q), which is exactly what the interface-matrix route
    (E Y(0) + C) F produces at s = 0.
    """
    n = len(v)
    vm = np.abs(v)
    phi = np.angle(v)
    g = y.real
    b = y.imag
    dphi = phi[:, None] - phi[None, :]
    vv = vm[:, None] * vm[None, :]
    cos = np.cos(dphi)
    sin = np.sin(dphi)
    h = vv * (g * sin - b * cos)  # dP/dphi off-diagonal form
    m = vv * (g * cos + b * sin)  # dP/d|V| * |V| off-diagonal form
    j11 = h.copy()
    j12 = m.copy()
    j21 = -m.copy()
    j22 = h.copy()
    dg = np.arange(n)
    j11[dg, dg] = -s.imag - b.diagonal() * vm**2
    j12[dg, dg] = s.real + g.diagonal() * vm**2
    j21[dg, dg] = s.real - g.diagonal() * vm**2
    j22[dg, dg] = s.imag - b.diagonal() * vm**2
    return j11, j12, j21, j22


@dataclass(frozen=True)
class JacobianLF:
    """Unreduced low-frequency Jacobian in (phi, V_n) -> (P, Q) block form."""

    j11: np.ndarray
    j12: np.ndarray
    j21: np.ndarray
    j22: np.ndarray
    bus_ids: tuple[int, ...]

    @property
    def n_bus(self) -> int:
        return len(self.bus_ids)

    def full(self) -> np.ndarray:
        return np.block([[self.j11, self.j12], [self.j21, self.j22]])

    def symmetric_part(self) -> np.ndarray:
        full = self.full()
        return full + full.T


def build_jlf_analytic(
    case: NetworkCase,
    op: OperatingPoint,
    check_operating_point: bool = True,
    mismatch_tol: float = 1e-6,
) -> JacobianLF:
    """Unreduced load-flow Jacobian of `case` at the operating point `op`.

    All 2n rows and columns are kept (no slack deletion), V_n columns are
    the d/d|V| columns scaled by |V|_o, and shunt/line-charging susceptance
    is included. The diagonal terms use the operating point's own P_o, Q_o,
    so the matrix equals the s = 0 evaluation of the interface-variable
    model built from the same operating point even when `op` was solved on
    a different (unsimplified) network; pass check_operating_point=False
    for that frozen-operating-point usage, otherwise an inconsistent pair
    raises ConsistencyError.
    """
    if op.bus_ids != case.bus_ids:
        raise ConsistencyError("operating point bus set does not match the case")
    y = build_ybus(case)
    v = op.voltage_phasor()
    if check_operating_point:
        worst = float(np.max(np.abs(v * np.conj(y @ v) - (op.p + 1j * op.q))))
        if worst > mismatch_tol:
            raise ConsistencyError(
                f"operating point does not solve this case (power mismatch {worst:.3e} pu); "
                "pass check_operating_point=False to evaluate a simplified network at a "
                "frozen operating point"
            )
    s = op.p + 1j * op.q
    j11, j12, j21, j22 = _jacobian_blocks(y, v, s)
    return JacobianLF(j11=j11, j12=j12, j21=j21, j22=j22, bus_ids=case.bus_ids)


def decouple(j: JacobianLF) -> JacobianLF:
    """Zero the off-diagonal blocks (the decoupled load-flow approximation)."""
    n = j.n_bus
    return JacobianLF(
        j11=j.j11.copy(),
        j12=np.zeros((n, n)),
        j21=np.zeros((n, n)),
        j22=j.j22.copy(),
        bus_ids=j.bus_ids,
    )


def symmetric_part_eigenvalues(j: JacobianLF, snap: float = 1e-9) -> np.ndarray:
    """Sorted eigenvalues of J_LF + J_LF^T, tiny values snapped to 0 for display."""
    eigs = np.sort(np.linalg.eigvalsh(j.symmetric_part()))
    eigs[np.abs(eigs) < snap] = 0.0
    return eigs
