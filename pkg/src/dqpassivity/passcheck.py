"""Passivity conditions, dissipation simulation and model classification.

A square LTI model is tested against the three frequency-domain
positive-real conditions: no right-half-plane poles; G(jw) + G^H(jw)
positive semi-definite on the imaginary axis away from poles; and
first-order imaginary-axis poles whose residues are PSD Hermitian. The
necessary time-domain consequence D + D^T >= 0 is checked separately as a
cheap certificate: a trace of zero with a nonzero matrix already proves
indefiniteness.

`classify_model` runs the applicable subset of these checks for the four
interface-variable formulations and the lossless / no-shunt-B / decoupled
simplifications, and folds in Q-V regulation contributions where they can
rescue a low-frequency failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .dqstamp import (
    ParasiticConfig,
    SingularFrequencyError,
    StateSpace,
    assemble_ydq,
    eval_tf,
)
from .netcase import NetworkCase, VariantFlags, derive_variant
from .passivate import RegulationSet, apply_qv_contribution, min_eig_excluding_uniform_angle
from .polarmodels import build_j_of_s, build_jdf, build_jdp, build_ndf, build_np, residue_at_origin
from .powerflow import OperatingPoint, build_jlf_analytic, decouple, solve_powerflow

__all__ = [
    "SweepGrid",
    "ImaginaryAxisPole",
    "PoleReport",
    "SweepReport",
    "FeedthroughReport",
    "ResidueReport",
    "DissipationReport",
    "MultisineInput",
    "PassivityVerdict",
    "SimulationUnstableError",
    "hermitian_min_eig",
    "embedded_eigenvalues",
    "check_poles",
    "sweep_psd",
    "check_feedthrough",
    "check_residue_psd_hermitian",
    "random_multisine",
    "simulate_dissipation",
    "classify_model",
    "classify_grid",
    "MODELS",
    "VARIANT_COLUMNS",
]

MODELS = ("I", "II", "III", "IV")

# Low-frequency variant columns in their canonical order.
VARIANT_COLUMNS = (
    ("lossy_b", VariantFlags()),
    ("lossless_b", VariantFlags(lossless=True)),
    ("lossy_nob", VariantFlags(no_shunt_b=True)),
    ("lossless_nob", VariantFlags(lossless=True, no_shunt_b=True)),
)


class SimulationUnstableError(RuntimeError):
    """Fixed-step integration would be (or became) numerically unstable."""


# ---------------------------------------------------------------------------
# Hermitian eigenvalues via the real-symmetric 2x embedding
# ---------------------------------------------------------------------------


def _embed(h: np.ndarray) -> np.ndarray:
    re = h.real
    im = h.imag
    return np.block([[re, -im], [im, re]])


def hermitian_min_eig(h: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (doubled-spectrum embedding)."""
    return float(np.min(np.linalg.eigvalsh(_embed(h))))


def embedded_eigenvalues(h: np.ndarray) -> np.ndarray:
    """Full Hermitian spectrum: each doubled value taken once, ascending."""
    doubled = np.sort(np.linalg.eigvalsh(_embed(h)))
    return doubled[::2]


# ---------------------------------------------------------------------------
# Condition 1 / 3: poles and residues
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImaginaryAxisPole:
    omega: float
    multiplicity: int
    geometric_multiplicity: int
    semisimple: bool
    residue: np.ndarray | None  # None when defective

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "multiplicity": self.multiplicity,
            "geometric_multiplicity": self.geometric_multiplicity,
            "semisimple": self.semisimple,
        }


@dataclass(frozen=True)
class PoleReport:
    passed: bool
    unstable: tuple[complex, ...]
    imaginary_axis: tuple[ImaginaryAxisPole, ...]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "unstable_poles": [[p.real, p.imag] for p in self.unstable],
            "imaginary_axis_poles": [p.to_dict() for p in self.imaginary_axis],
        }


def _structural_residue_at_zero(ss: StateSpace) -> np.ndarray:
    """Residue of the origin pole for realizations with explicit integrators.

    With states partitioned into (x, z), z the integrators driven directly
    by the inputs, A = [[Ax, Axz], [0, 0]] and the spectral projector onto
    the zero eigenspace gives residue (Cz - Cx Ax^-1 Axz) Bz exactly.
    """
    integ = list(ss.integrator_states)
    keep = [i for i in range(ss.n_states) if i not in integ]
    ax = ss.a[np.ix_(keep, keep)]
    axz = ss.a[np.ix_(keep, integ)]
    cx = ss.c[:, keep]
    cz = ss.c[:, integ]
    bz = ss.b[integ, :]
    return (cz - cx @ np.linalg.solve(ax, axz)) @ bz


def _projection_residue(ss: StateSpace, center: complex, cluster_tol: float) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eig(ss.a)
    sel = np.abs(eigvals - center) <= cluster_tol
    left = np.linalg.inv(eigvecs)[sel, :]
    projector = eigvecs[:, sel] @ left
    return ss.c @ projector @ ss.b

def check_poles(ss: StateSpace, tol: float = 1e-9, cluster_tol: float = 1e-6) -> PoleReport:
    """Condition 1 (no RHP poles) and the pole-side part of condition 3.

    Imaginary-axis eigenvalues are clustered within `cluster_tol`. A
    cluster fails condition 3 outright when defective (Jordan block); for a
    first-order (semisimple) cluster the total residue lim (s-jw)G(s) is
    attached for the PSD-Hermitian test. Exact-integrator realizations get
    the structural residue at the origin, everything else an
    eigenprojection.
    """
    if ss.n_states == 0:
        return PoleReport(passed=True, unstable=(), imaginary_axis=())
    eigs = ss.poles
    unstable = tuple(complex(z) for z in eigs[eigs.real > tol])
    on_axis = eigs[np.abs(eigs.real) <= tol]
    clusters: list[list[complex]] = []
    for z in sorted(on_axis, key=lambda z: z.imag):
        if clusters and abs(z.imag - clusters[-1][-1].imag) <= cluster_tol:
            clusters[-1].append(z)
        else:
            clusters.append([z])
    poles: list[ImaginaryAxisPole] = []
    for group in clusters:
        omega = float(np.mean([z.imag for z in group]))
        center = 1j * omega
        alg = len(group)
        sv = np.linalg.svd(ss.a - center * np.eye(ss.n_states), compute_uv=False)
        # Null directions of the cluster: standard numerical-rank cutoff,
        # widened to the cluster radius so near-coincident eigenvalues count.
        rank_tol = max(10.0 * cluster_tol, float(sv[0]) * len(sv) * np.finfo(float).eps)
        geo = int(np.sum(sv <= rank_tol))
        semisimple = geo >= alg
        residue = None
        if semisimple:
            if abs(omega) <= tol and ss.integrator_states:
                residue = _structural_residue_at_zero(ss).astype(complex)
            else:
                residue = _projection_residue(ss, center, cluster_tol)
        poles.append(
            ImaginaryAxisPole(
                omega=omega,
                multiplicity=alg,
                geometric_multiplicity=geo,
                semisimple=semisimple,
                residue=residue,
            )
        )
    return PoleReport(passed=not unstable, unstable=unstable, imaginary_axis=tuple(poles))


# ---------------------------------------------------------------------------
# Condition 2: frequency sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepGrid:
    """Logarithmic frequency grid for the imaginary-axis PSD sweep."""

    omega_min: float = 1e-2
    omega_max: float = 1e5
    points_per_decade: int = 20
    pole_exclusion: float = 1e-6

    def __post_init__(self) -> None:
        if self.omega_min <= 0 or self.omega_max <= self.omega_min:
            raise ValueError("need 0 < omega_min < omega_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be >= 1")

    def points(self, exclude: Sequence[float] = ()) -> np.ndarray:
        decades = math.log10(self.omega_max / self.omega_min)
        count = max(2, int(round(decades * self.points_per_decade)) + 1)
        omegas = np.logspace(math.log10(self.omega_min), math.log10(self.omega_max), count)
        for pole in exclude:
            omegas = omegas[np.abs(omegas - abs(pole)) > self.pole_exclusion]
        return omegas


@dataclass(frozen=True)
class SweepReport:
    passed: bool
    min_eig: float
    worst_omega: float | None  # None for static (frequency-independent) models
    n_points: int
    samples: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "min_eig": self.min_eig,
            "worst_omega": self.worst_omega,
            "n_points": self.n_points,
        }


Evaluator = Callable[[complex], np.ndarray]


def _as_evaluator(model) -> Evaluator:
    if callable(model) and not hasattr(model, "tf"):
        return model
    return model.tf


def sweep_psd(
    model,
    grid: SweepGrid | None = None,
    poles: Sequence[float] = (),
    tol: float = 1e-9,
    keep_samples: bool = False,
) -> SweepReport:
    """Condition 2: minimum eigenvalue of G(jw) + G^H(jw) across the grid.

    For real-coefficient models G^T(-jw) = G^H(jw), so sweeping w >= 0
    covers the whole axis. Pass iff the global minimum stays above -tol.
    """
    tf = _as_evaluator(model)
    grid = grid if grid is not None else SweepGrid()
    omegas = grid.points(exclude=poles)
    worst = math.inf
    worst_omega = None
    samples: list[tuple[float, float]] = []
    for w in omegas:
        try:
            g = tf(1j * w)
        except SingularFrequencyError as exc:
            raise ValueError(f"transfer matrix singular at sweep point omega={w}: {exc}") from exc
        lam = hermitian_min_eig(g + g.conj().T)
        if keep_samples:
            samples.append((float(w), lam))
        if lam < worst:
            worst = lam
            worst_omega = float(w)
    return SweepReport(
        passed=worst >= -tol,
        min_eig=worst,
        worst_omega=worst_omega,
        n_points=len(omegas),
        samples=tuple(samples),
    )


def _static_report(k: np.ndarray, tol: float) -> SweepReport:
    lam = float(np.min(np.linalg.eigvalsh(k + k.T)))
    return SweepReport(passed=lam >= -tol, min_eig=lam, worst_omega=None, n_points=1)


# ---------------------------------------------------------------------------
# Feedthrough certificate and residue check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeedthroughReport:
    trace: float
    min_eig: float
    diagonal: tuple[float, ...]
    psd: bool
    # i_Do v_Qo - i_Qo v_Do per bus (= -Q_o), the sign carrier for the
    # frequency-deviation model's diagonal; only set when an operating
    # point is supplied.
    cross_per_bus: tuple[float, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "trace": self.trace,
            "min_eig": self.min_eig,
            "diagonal": list(self.diagonal),
            "psd": self.psd,
        }
        if self.cross_per_bus is not None:
            out["cross_per_bus"] = list(self.cross_per_bus)
        return out


def check_feedthrough(
    ss: StateSpace, op: OperatingPoint | None = None, tol: float = 1e-9
) -> FeedthroughReport:
    """Necessary time-domain condition on the direct gain: D + D^T >= 0."""
    sym = ss.d + ss.d.T
    cross = None
    if op is not None:
        cross = tuple(float(v) for v in op.i_d * op.v_q - op.i_q * op.v_d)
    return FeedthroughReport(
        trace=float(np.trace(sym)),
        min_eig=float(np.min(np.linalg.eigvalsh(sym))) if sym.size else 0.0,
        diagonal=tuple(float(v) for v in np.diag(sym)),
        psd=bool(sym.size == 0 or np.min(np.linalg.eigvalsh(sym)) >= -tol),
        cross_per_bus=cross,
    )


@dataclass(frozen=True)
class ResidueReport:
    passed: bool
    hermitian_deviation: float
    min_eig: float
    omega: float | None = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "hermitian_deviation": self.hermitian_deviation,
            "min_eig": self.min_eig,
            "omega": self.omega,
        }


def check_residue_psd_hermitian(
    residue: np.ndarray, tol: float = 1e-9, omega: float | None = None
) -> ResidueReport:
    """Condition 3 residue test: Hermitian within tol (relative) and PSD."""
    r = np.asarray(residue, dtype=complex)
    norm = np.linalg.norm(r)
    dev = float(np.linalg.norm(r - r.conj().T) / norm) if norm > 0 else 0.0
    herm = 0.5 * (r + r.conj().T)
    lam = hermitian_min_eig(herm)
    return ResidueReport(
        passed=dev <= tol and lam >= -tol,
        hermitian_deviation=dev,
        min_eig=lam,
        omega=omega,
    )


# ---------------------------------------------------------------------------
# Time-domain dissipation check
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultisineInput:
    """Sum-of-sines test signal, one row of tones per input channel."""

    omegas: np.ndarray  # (k,)
    amplitudes: np.ndarray  # (n_channels, k)
    phases: np.ndarray  # (n_channels, k)

    def __call__(self, t: float) -> np.ndarray:
        return np.sum(self.amplitudes * np.sin(self.omegas * t + self.phases), axis=1)


def random_multisine(
    rng: np.random.Generator,
    n_channels: int,
    n_tones: int = 5,
    omega_range: tuple[float, float] = (10.0, 3000.0),
    amplitude: float = 0.1,
) -> MultisineInput:
    omegas = np.exp(rng.uniform(np.log(omega_range[0]), np.log(omega_range[1]), n_tones))
    return MultisineInput(
        omegas=omegas,
        amplitudes=rng.uniform(0.0, amplitude, (n_channels, n_tones)),
        phases=rng.uniform(0.0, 2.0 * np.pi, (n_channels, n_tones)),
    )


@dataclass(frozen=True)
class DissipationReport:
    min_margin: float
    t_at_min: float
    supplied: float  # integral of u^T y over the horizon
    stored_delta: float  # S(x(T)) - S(x(0))
    n_steps: int
    dt: float

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0.0

    def to_dict(self) -> dict:
        return {
            "min_margin": self.min_margin,
            "t_at_min": self.t_at_min,
            "supplied": self.supplied,
            "stored_delta": self.stored_delta,
            "n_steps": self.n_steps,
            "dt": self.dt,
        }


def simulate_dissipation(
    ss: StateSpace,
    u: Callable[[float], np.ndarray],
    t_end: float,
    dt: float,
    x0: np.ndarray | None = None,
) -> DissipationReport:
    """Integrate the model with RK4 and track the dissipation margin.

    The margin is integral(u^T y) - (S(x) - S(x0)) with S the physical
    stored energy from the state metadata; for a passive model it must
    stay non-negative up to integration error. The supplied-energy
    integral is advanced as an extra RK4 state so both sides share the
    same quadrature order.
    """
    storage = np.array([m.storage for m in ss.state_meta])
    for m in ss.state_meta:
        if m.kind not in ("inductor", "capacitor"):
            raise ValueError("dissipation accounting needs a physical (R-L-C) model")
    stable = ss.poles[ss.poles.real < 0]
    if stable.size and float(np.max(np.abs(stable))) * dt > 2.5:
        worst = float(np.max(np.abs(stable)))
        raise SimulationUnstableError(
            f"dt={dt} exceeds the explicit stability bound for the pole magnitude "
            f"{worst:.3e} rad/s; reduce the step below {2.5 / worst:.3e} s"
        )

    a, b, c, d = ss.a, ss.b, ss.c, ss.d
    x = np.zeros(ss.n_states) if x0 is None else np.asarray(x0, dtype=float).copy()
    if x.shape != (ss.n_states,):
        raise ValueError("x0 has the wrong length")

    def output(xv: np.ndarray, uv: np.ndarray) -> np.ndarray:
        return c @ xv + d @ uv

    def energy(xv: np.ndarray) -> float:
        return 0.5 * float(np.dot(storage, xv * xv))

    n_steps = int(round(t_end / dt))
    e0 = energy(x)
    supplied = 0.0
    min_margin = math.inf
    t_at_min = 0.0
    t = 0.0
    for _ in range(n_steps):
        u1 = u(t)
        u2 = u(t + 0.5 * dt)
        u3 = u(t + dt)
        k1x = a @ x + b @ u1
        k1w = float(u1 @ output(x, u1))
        x2 = x + 0.5 * dt * k1x
        k2x = a @ x2 + b @ u2
        k2w = float(u2 @ output(x2, u2))
        x3 = x + 0.5 * dt * k2x
        k3x = a @ x3 + b @ u2
        k3w = float(u2 @ output(x3, u2))
        x4 = x + dt * k3x
        k4x = a @ x4 + b @ u3
        k4w = float(u3 @ output(x4, u3))
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        supplied += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        t += dt
        if not np.all(np.isfinite(x)):
            raise SimulationUnstableError(
                f"state overflow at t={t:.4g}s; reduce the integration step"
            )
        margin = supplied - (energy(x) - e0)
        if margin < min_margin:
            min_margin = margin
            t_at_min = t
    return DissipationReport(
        min_margin=float(min_margin),
        t_at_min=float(t_at_min),
        supplied=float(supplied),
        stored_delta=float(energy(x) - e0),
        n_steps=n_steps,
        dt=dt,
    )


# ---------------------------------------------------------------------------
# Verdict assembly
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegulatedReport:
    regulation: tuple[tuple[int, float], ...]
    flipped: bool
    min_eig_excluding_structural: float | None = None
    residue: ResidueReport | None = None
    sweep: SweepReport | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "regulation": [[b, k] for b, k in self.regulation],
            "flipped": self.flipped,
        }
        if self.min_eig_excluding_structural is not None:
            out["min_eig_excluding_structural"] = self.min_eig_excluding_structural
        if self.residue is not None:
            out["residue"] = self.residue.to_dict()
        if self.sweep is not None:
            out["sweep"] = self.sweep.to_dict()
        return out


@dataclass(frozen=True)
class PassivityVerdict:
    model: str
    analysis: str
    lossless: bool
    no_shunt_b: bool
    decoupled: bool
    overall: str  # "passive" | "non-passive" | "passive-after-regulation"
    cond1: PoleReport | None = None
    cond2: SweepReport | None = None
    cond3: tuple[ResidueReport, ...] = ()
    feedthrough: FeedthroughReport | None = None
    regulated: RegulatedReport | None = None
    notes: tuple[str, ...] = ()

    @property
    def passive(self) -> bool:
        return self.overall == "passive"

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "analysis": self.analysis,
            "variant": {
                "lossless": self.lossless,
                "no_shunt_b": self.no_shunt_b,
                "decoupled": self.decoupled,
            },
            "overall": self.overall,
            "cond1_rhp_poles": self.cond1.to_dict() if self.cond1 else None,
            "cond2_sweep": self.cond2.to_dict() if self.cond2 else None,
            "cond3_residues": [r.to_dict() for r in self.cond3],
            "feedthrough": self.feedthrough.to_dict() if self.feedthrough else None,
            "regulated": self.regulated.to_dict() if self.regulated else None,
            "notes": list(self.notes),
        }


def _wideband_checks(
    ss: StateSpace,
    grid: SweepGrid,
    tol: float,
    op: OperatingPoint | None,
    keep_samples: bool = False,
) -> tuple[PoleReport, SweepReport, tuple[ResidueReport, ...], FeedthroughReport, bool]:
    poles = check_poles(ss, tol=tol)
    imag_omegas = [p.omega for p in poles.imaginary_axis]
    sweep = sweep_psd(ss, grid, poles=imag_omegas, tol=tol, keep_samples=keep_samples)
    residues: list[ResidueReport] = []
    residues_ok = True
    for p in poles.imaginary_axis:
        if not p.semisimple:
            residues.append(
                ResidueReport(passed=False, hermitian_deviation=math.inf, min_eig=-math.inf, omega=p.omega)
            )
            residues_ok = False
        else:
            rep = check_residue_psd_hermitian(p.residue, tol=tol, omega=p.omega)
            residues.append(rep)
            residues_ok = residues_ok and rep.passed
    feed = check_feedthrough(ss, op=op, tol=tol)
    ok = poles.passed and sweep.passed and residues_ok and feed.psd
    return poles, sweep, tuple(residues), feed, ok


def classify_model(
    case: NetworkCase,
    flags: VariantFlags = VariantFlags(),
    model: str = "I",
    analysis: str = "lowfreq",
    tau: float = 0.01,
    regulation: RegulationSet | None = None,
    grid: SweepGrid | None = None,
    parasitics: ParasiticConfig | None = None,
    tol: float = 1e-9,
    keep_sweep_samples: bool = False,
) -> PassivityVerdict:
    """Classify one (model, analysis, variant) combination of a network.

    The variant network is re-solved so its operating point is
    self-consistent. Low-frequency static verdicts use the raw symmetric-
    part spectrum; a supplied regulation set can flip a failing verdict to
    "passive-after-regulation", judged with the structural uniform-angle
    mode excluded (it is a right null vector of the Jacobian, persists
    under regulation, and for lossy networks sits slightly below zero in
    the symmetric part).
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if analysis not in ("wideband", "lowfreq"):
        raise ValueError(f"unknown analysis {analysis!r}")
    if flags.decoupled and analysis != "lowfreq":
        raise ValueError("the decoupled simplification applies to low-frequency models only")
    if flags.decoupled and model == "I":
        raise ValueError("the decoupled simplification does not apply to the rectangular model")
    if regulation is not None and analysis != "lowfreq":
        raise ValueError("regulation contributions apply to low-frequency models only")
    if regulation is not None and model == "I":
        raise ValueError("the rectangular model needs no regulation")

    variant = derive_variant(case, flags)
    op = solve_powerflow(variant)
    grid = grid if grid is not None else SweepGrid()
    base = dict(
        model=model,
        analysis=analysis,
        lossless=flags.lossless,
        no_shunt_b=flags.no_shunt_b,
        decoupled=flags.decoupled,
    )

    if analysis == "wideband":
        ydq = assemble_ydq(variant, parasitics)
        if model == "I":
            ss = ydq
        elif model == "II":
            ss = build_j_of_s(ydq, op)
        elif model == "III":
            ss = build_jdp(build_j_of_s(ydq, op), tau)
        else:
            ss = build_jdf(build_j_of_s(ydq, op), tau)
        poles, sweep, residues, feed, ok = _wideband_checks(
            ss, grid, tol, op if model == "III" else None, keep_sweep_samples
        )
        return PassivityVerdict(
            **base,
            overall="passive" if ok else "non-passive",
            cond1=poles,
            cond2=sweep,
            cond3=residues,
            feedthrough=feed,
        )

    # Low-frequency models.
    if model == "I":
        ydq = assemble_ydq(variant, parasitics)
        y0 = eval_tf(ydq, 0.0)
        static = _static_report(y0, tol)
        return PassivityVerdict(
            **base,
            overall="passive" if static.passed else "non-passive",
            cond2=static,
            notes=("static rectangular model Y_DQ(0)",),
        )

    jlf = build_jlf_analytic(variant, op)
    if flags.decoupled:
        jlf = decouple(jlf)

    if model == "II":
        k = jlf.full()
        static = _static_report(k, tol)
        feed = FeedthroughReport(
            trace=float(np.trace(k + k.T)),
            min_eig=static.min_eig,
            diagonal=tuple(float(v) for v in np.diag(k + k.T)),
            psd=static.passed,
        )
        regulated = None
        overall = "passive" if static.passed else "non-passive"
        if not static.passed and regulation:
            jr = apply_qv_contribution(jlf, regulation)
            lam = min_eig_excluding_uniform_angle(jr.symmetric_part())
            flipped = lam >= -tol
            regulated = RegulatedReport(
                regulation=regulation.entries,
                flipped=flipped,
                min_eig_excluding_structural=lam,
            )
            if flipped:
                overall = "passive-after-regulation"
        return PassivityVerdict(
            **base,
            overall=overall,
            cond2=static,
            feedthrough=feed,
            regulated=regulated,
            notes=("static load-flow Jacobian J_LF",),
        )

    # Models III / IV: rational low-frequency models with an origin pole.
    builder = build_np if model == "III" else build_ndf
    rational = builder(jlf, tau)
    residue = check_residue_psd_hermitian(residue_at_origin(rational), tol=tol, omega=0.0)
    sweep = sweep_psd(rational, grid, poles=[0.0], tol=tol, keep_samples=keep_sweep_samples)
    ok = residue.passed and sweep.passed
    regulated = None
    overall = "passive" if ok else "non-passive"
    if not ok and regulation:
        jr = apply_qv_contribution(jlf, regulation)
        rational_r = builder(jr, tau)
        residue_r = check_residue_psd_hermitian(residue_at_origin(rational_r), tol=tol, omega=0.0)
        sweep_r = sweep_psd(rational_r, grid, poles=[0.0], tol=tol)
        flipped = residue_r.passed and sweep_r.passed
        regulated = RegulatedReport(
            regulation=regulation.entries,
            flipped=flipped,
            residue=residue_r,
            sweep=sweep_r,
        )
        if flipped:
            overall = "passive-after-regulation"
    return PassivityVerdict(
        **base,
        overall=overall,
        cond2=sweep,
        cond3=(residue,),
        feedthrough=None,
        regulated=regulated,
    )


def classify_grid(
    case: NetworkCase,
    tau: float = 0.01,
    regulation: RegulationSet | None = None,
    grid: SweepGrid | None = None,
    parasitics: ParasiticConfig | None = None,
) -> dict[str, dict[str, str]]:
    """Verdict grid over every model and variant column.

    Returns {model: {"wideband": verdict, "<column>/coupled": verdict,
    "<column>/decoupled": verdict, ...}}; the rectangular model has a
    single verdict per column.
    """
    out: dict[str, dict[str, str]] = {}
    for model in MODELS:
        row: dict[str, str] = {}
        row["wideband"] = classify_model(
            case, VariantFlags(), model, "wideband", tau, None, grid, parasitics
        ).overall
        for name, flags in VARIANT_COLUMNS:
            if model == "I":
                row[name] = classify_model(
                    case, flags, model, "lowfreq", tau, None, grid, parasitics
                ).overall
                continue
            for coupled, dec in (("coupled", False), ("decoupled", True)):
                f = VariantFlags(flags.lossless, flags.no_shunt_b, dec)
                row[f"{name}/{coupled}"] = classify_model(
                    case, f, model, "lowfreq", tau, regulation, grid, parasitics
                ).overall
        out[model] = row
    return out
