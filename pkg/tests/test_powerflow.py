"""Newton power flow and the unreduced load-flow Jacobian."""

import math

import numpy as np
import pytest

from dqpassivity import (
    Branch,
    Bus,
    ConsistencyError,
    Injection,
    NetworkCase,
    PowerFlowError,
    SystemParams,
    VariantFlags,
    build_jlf_analytic,
    build_ybus,
    decouple,
    derive_variant,
    solve_powerflow,
)
from conftest import random_solved_case, two_bus_case


def test_two_bus_lossless_closed_form():
    # P = V1 V2 sin(delta) / X with both magnitudes pinned to 1.
    case = two_bus_case(r=0.0, x=0.1, load_p=-0.5, load_kind="pv", vset=1.0)
    op = solve_powerflow(case)
    delta = float(op.phi[0] - op.phi[1])
    assert delta == pytest.approx(math.asin(0.05), abs=1e-9)
    assert op.vm == pytest.approx([1.0, 1.0])


def test_ieee9_converges_and_matches_textbook_flows(ieee9, ieee9_op):
    op = ieee9_op
    y = build_ybus(ieee9)
    v = op.voltage_phasor()
    mism = np.max(np.abs(v * np.conj(y @ v) - (op.p + 1j * op.q)))
    assert mism < 1e-8
    # Slack generation lands in the textbook region.
    assert op.p[ieee9.bus_index(4)] == pytest.approx(0.716, abs=5e-3)
    # Determinism across runs.
    op2 = solve_powerflow(ieee9)
    assert np.array_equal(op.vm, op2.vm)
    assert np.array_equal(op.phi, op2.phi)


def test_flat_start_is_exact_for_zero_injection():
    case = NetworkCase(
        system=SystemParams(),
        buses=(Bus(id=1), Bus(id=2), Bus(id=3)),
        branches=(
            Branch(from_bus=1, to_bus=2, r=0.01, x=0.1),
            Branch(from_bus=2, to_bus=3, r=0.01, x=0.1),
        ),
        injections=(Injection(bus=1, kind="slack", vset=1.0),),
    )
    op = solve_powerflow(case)
    assert np.array_equal(op.vm, np.ones(3))
    assert np.array_equal(op.phi, np.zeros(3))


def test_operating_point_invariants(ieee9_op):
    ieee9_op.validate()
    assert np.all(np.hypot(ieee9_op.v_d, ieee9_op.v_q) > 0)


def test_angle_convention(ieee9_op):
    # v_D = |V| sin(phi), v_Q = |V| cos(phi)
    assert np.allclose(ieee9_op.v_d, ieee9_op.vm * np.sin(ieee9_op.phi))
    assert np.allclose(ieee9_op.v_q, ieee9_op.vm * np.cos(ieee9_op.phi))


def test_zero_injection_buses_have_exact_zero_current(ieee9, ieee9_op):
    for bus in (1, 2, 3):
        k = ieee9.bus_index(bus)
        assert ieee9_op.i_d[k] == 0.0
        assert ieee9_op.i_q[k] == 0.0
        assert ieee9_op.p[k] == 0.0


def test_divergence_raises():
    case = two_bus_case(r=0.0, x=0.1, load_p=-100.0)
    with pytest.raises(PowerFlowError):
        solve_powerflow(case)


def test_null_vector(ieee9, ieee9_op):
    j = build_jlf_analytic(ieee9, ieee9_op).full()
    null = np.concatenate([np.ones(9), np.zeros(9)])
    assert np.max(np.abs(j @ null)) < 1e-10


def test_null_vector_random_cases():
    rng = np.random.default_rng(21)
    for _ in range(4):
        case, op = random_solved_case(rng)
        j = build_jlf_analytic(case, op).full()
        n = case.n_bus
        null = np.concatenate([np.ones(n), np.zeros(n)])
        assert np.max(np.abs(j @ null)) < 1e-10


def _fd_jacobian(case, op, h=1e-6):
    """Central finite differences of the nodal power equations in (phi, V_n)."""
    y = build_ybus(case)
    n = case.n_bus

    def power(phi, vn):
        v = (op.vm * vn) * np.exp(1j * phi)
        s = v * np.conj(y @ v)
        return np.concatenate([s.real, s.imag])

    cols = []
    for k in range(2 * n):
        phi_p, vn_p = op.phi.copy(), np.ones(n)
        phi_m, vn_m = op.phi.copy(), np.ones(n)
        if k < n:
            phi_p[k] += h
            phi_m[k] -= h
        else:
            vn_p[k - n] += h
            vn_m[k - n] -= h
        cols.append((power(phi_p, vn_p) - power(phi_m, vn_m)) / (2 * h))
    return np.column_stack(cols)


def test_finite_difference_oracle(ieee9, ieee9_op):
    j = build_jlf_analytic(ieee9, ieee9_op).full()
    fd = _fd_jacobian(ieee9, ieee9_op)
    assert np.max(np.abs(j - fd)) < 1e-5


def test_finite_difference_oracle_random():
    rng = np.random.default_rng(22)
    case, op = random_solved_case(rng)
    j = build_jlf_analytic(case, op).full()
    assert np.max(np.abs(j - _fd_jacobian(case, op))) < 1e-5


def test_lossless_jacobian_symmetry(ieee9):
    lossless = derive_variant(ieee9, VariantFlags(lossless=True))
    op = solve_powerflow(lossless)
    j = build_jlf_analytic(lossless, op)
    assert np.max(np.abs(j.j11 - j.j11.T)) < 1e-10
    assert np.max(np.abs(j.full() - j.full().T)) < 1e-10


def test_consistency_check(ieee9, ieee9_op):
    lossless = derive_variant(ieee9, VariantFlags(lossless=True))
    with pytest.raises(ConsistencyError, match="frozen"):
        build_jlf_analytic(lossless, ieee9_op)
    # The frozen-operating-point evaluation is available explicitly.
    j = build_jlf_analytic(lossless, ieee9_op, check_operating_point=False)
    assert j.full().shape == (18, 18)


def test_decouple(ieee9, ieee9_op):
    j = build_jlf_analytic(ieee9, ieee9_op)
    d = decouple(j)
    assert np.linalg.norm(d.j12) == 0.0
    assert np.linalg.norm(d.j21) == 0.0
    assert np.array_equal(d.j11, j.j11)
    d2 = decouple(d)
    assert np.array_equal(d2.full(), d.full())


def test_decoupled_lossless_nob_is_psd(ieee9):
    flags = VariantFlags(lossless=True, no_shunt_b=True)
    variant = derive_variant(ieee9, flags)
    op = solve_powerflow(variant)
    j = decouple(build_jlf_analytic(variant, op))
    full = j.full()
    assert np.max(np.abs(full - full.T)) < 1e-10
    assert np.min(np.linalg.eigvalsh(full + full.T)) > -1e-9
