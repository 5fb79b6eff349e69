"""Network case data model, case-file parsing and variant derivation.

A case is a balanced positive-sequence transmission network in per-unit:
buses with shunt admittance, series R-X branches with pi-model line
charging and an off-nominal turns ratio, plus slack/PV/PQ injection
specifications. Everything is immutable; variant derivation returns new
cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources

__all__ = [
    "Bus",
    "Branch",
    "Injection",
    "SystemParams",
    "NetworkCase",
    "VariantFlags",
    "CaseError",
    "CaseParseError",
    "CaseValidationError",
    "CaseTopologyError",
    "parse_case",
    "serialize_case",
    "derive_variant",
    "load_ieee9",
    "ieee9_text",
]


class CaseError(ValueError):
    """Base class for case-file and case-validation problems."""


class CaseParseError(CaseError):
    """Malformed case text; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CaseValidationError(CaseError):
    """Structurally parseable case that violates a field invariant."""


class CaseTopologyError(CaseError):
    """Branch/injection references or connectivity are broken."""


@dataclass(frozen=True)
class Bus:
    id: int
    vnom: float = 1.0
    g_shunt: float = 0.0
    b_shunt: float = 0.0


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float
    x: float
    b_line: float = 0.0
    ratio: float = 1.0


@dataclass(frozen=True)
class Injection:
    bus: int
    kind: str  # "slack" | "pv" | "pq"
    p: float | None = None
    q: float | None = None
    vset: float | None = None


@dataclass(frozen=True)
class SystemParams:
    base_mva: float = 100.0
    omega0: float = 2.0 * math.pi * 60.0


@dataclass(frozen=True)
class NetworkCase:
    system: SystemParams
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    injections: tuple[Injection, ...]
    # Optional per-bus Q-V contribution slots from the [regulation] section.
    regulation: tuple[tuple[int, float], ...] = field(default=())

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    @property
    def bus_ids(self) -> tuple[int, ...]:
        return tuple(b.id for b in self.buses)

    def bus_index(self, bus_id: int) -> int:
        try:
            return self.bus_ids.index(bus_id)
        except ValueError:
            raise CaseTopologyError(f"unknown bus id {bus_id}") from None

    def shunt_susceptance(self) -> list[float]:
        """Total shunt susceptance per bus: bus shunt plus half line charging."""
        b = [bus.b_shunt for bus in self.buses]
        for br in self.branches:
            b[self.bus_index(br.from_bus)] += br.b_line / 2.0
            b[self.bus_index(br.to_bus)] += br.b_line / 2.0
        return b


@dataclass(frozen=True)
class VariantFlags:
    """Network simplifications; `decoupled` acts only on Jacobian-level artifacts."""

    lossless: bool = False
    no_shunt_b: bool = False
    decoupled: bool = False


def validate_case(case: NetworkCase) -> None:
    """Raise if any case invariant fails."""
    ids = [b.id for b in case.buses]
    seen = set()
    for i in ids:
        if i in seen:
            raise CaseValidationError(f"duplicate bus id {i}")
        seen.add(i)
    if not case.buses:
        raise CaseValidationError("case has no buses")
    for bus in case.buses:
        if bus.vnom <= 0:
            raise CaseValidationError(f"bus {bus.id}: nominal |V| must be > 0")
        if bus.b_shunt < 0:
            raise CaseValidationError(
                f"bus {bus.id}: negative shunt susceptance is not supported"
            )
    for br in case.branches:
        for end in (br.from_bus, br.to_bus):
            if end not in seen:
                raise CaseTopologyError(
                    f"branch {br.from_bus}-{br.to_bus} references unknown bus {end}"
                )
        if br.from_bus == br.to_bus:
            raise CaseTopologyError(f"branch {br.from_bus}-{br.to_bus} is a self-loop")
        if br.r < 0:
            raise CaseValidationError(
                f"branch {br.from_bus}-{br.to_bus}: series R must be >= 0"
            )
        if br.x <= 0:
            raise CaseValidationError(
                f"branch {br.from_bus}-{br.to_bus}: series X must be > 0"
            )
        if br.b_line < 0:
            raise CaseValidationError(
                f"branch {br.from_bus}-{br.to_bus}: line charging must be >= 0"
            )
        if br.ratio <= 0:
            raise CaseValidationError(
                f"branch {br.from_bus}-{br.to_bus}: turns ratio must be > 0"
            )
    slacks = [inj for inj in case.injections if inj.kind == "slack"]
    if len(slacks) != 1:
        raise CaseValidationError(f"expected exactly one slack injection, got {len(slacks)}")
    inj_buses = set()
    for inj in case.injections:
        if inj.bus not in seen:
            raise CaseTopologyError(f"injection references unknown bus {inj.bus}")
        if inj.bus in inj_buses:
            raise CaseValidationError(f"multiple injections at bus {inj.bus}")
        inj_buses.add(inj.bus)
        if inj.kind not in ("slack", "pv", "pq"):
            raise CaseValidationError(f"injection at bus {inj.bus}: unknown kind {inj.kind!r}")
        if inj.kind == "slack" and inj.vset is None:
            raise CaseValidationError(f"slack at bus {inj.bus} needs a |V| setpoint")
        if inj.kind == "pv" and (inj.p is None or inj.vset is None):
            raise CaseValidationError(f"PV injection at bus {inj.bus} needs P and |V| setpoint")
        if inj.kind == "pq" and (inj.p is None or inj.q is None):
            raise CaseValidationError(f"PQ injection at bus {inj.bus} needs P and Q")
    for bus_id, kqv in case.regulation:
        if bus_id not in seen:
            raise CaseTopologyError(f"regulation entry references unknown bus {bus_id}")
        if kqv < 0:
            raise CaseValidationError(f"regulation at bus {bus_id}: k_qv must be >= 0")
    if case.system.omega0 <= 0 or case.system.base_mva <= 0:
        raise CaseValidationError("system base MVA and omega0 must be > 0")
    _check_connected(case)


def _check_connected(case: NetworkCase) -> None:
    if case.n_bus <= 1:
        return
    adj: dict[int, set[int]] = {b.id: set() for b in case.buses}
    for br in case.branches:
        adj[br.from_bus].add(br.to_bus)
        adj[br.to_bus].add(br.from_bus)
    start = case.buses[0].id
    seen = {start}
    stack = [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != case.n_bus:
        missing = sorted(set(case.bus_ids) - seen)
        raise CaseTopologyError(f"network graph is disconnected; unreachable buses {missing}")


# --------------------------------------------------------------------------
# Case file format: '[section]' headers with whitespace-separated rows.
#   [system]    key = value lines (base_mva, omega0)
#   [buses]     id vnom g_shunt b_shunt
#   [branches]  from to r x b_line ratio
#   [injections] bus kind p q vset      ('-' marks not-applicable)
#   [regulation] bus k_qv               (optional)
# '#' starts a comment. All quantities in per-unit on the declared base.
# --------------------------------------------------------------------------

_SECTIONS = ("system", "buses", "branches", "injections", "regulation")


def _num(token: str, what: str, line: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise CaseParseError(f"field {what}: expected a number, got {token!r}", line) from None


def _int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CaseParseError(f"field {what}: expected an integer, got {token!r}", line) from None


def _opt(token: str, what: str, line: int) -> float | None:
    return None if token == "-" else _num(token, what, line)


def parse_case(text: str) -> NetworkCase:
    """Parse case-file text into a validated NetworkCase."""
    section = None
    sys_kv: dict[str, float] = {}
    buses: list[Bus] = []
    branches: list[Branch] = []
    injections: list[Injection] = []
    regulation: list[tuple[int, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            name = line.strip("[]").strip().lower()
            if name not in _SECTIONS:
                raise CaseParseError(f"unknown section [{name}]", lineno)
            section = name
            continue
        if section is None:
            raise CaseParseError("data before any [section] header", lineno)
        if section == "system":
            if "=" not in line:
                raise CaseParseError("system entries must be 'key = value'", lineno)
            key, _, value = line.partition("=")
            key = key.strip().lower()
            if key not in ("base_mva", "omega0"):
                raise CaseParseError(f"unknown system key {key!r}", lineno)
            sys_kv[key] = _num(value.strip(), key, lineno)
            continue
        tok = line.split()
        if section == "buses":
            if len(tok) != 4:
                raise CaseParseError("bus rows need: id vnom g_shunt b_shunt", lineno)
            buses.append(
                Bus(
                    id=_int(tok[0], "bus id", lineno),
                    vnom=_num(tok[1], "vnom", lineno),
                    g_shunt=_num(tok[2], "g_shunt", lineno),
                    b_shunt=_num(tok[3], "b_shunt", lineno),
                )
            )
        elif section == "branches":
            if len(tok) != 6:
                raise CaseParseError("branch rows need: from to r x b_line ratio", lineno)
            branches.append(
                Branch(
                    from_bus=_int(tok[0], "from", lineno),
                    to_bus=_int(tok[1], "to", lineno),
                    r=_num(tok[2], "r", lineno),
                    x=_num(tok[3], "x", lineno),
                    b_line=_num(tok[4], "b_line", lineno),
                    ratio=_num(tok[5], "ratio", lineno),
                )
            )
        elif section == "injections":
            if len(tok) != 5:
                raise CaseParseError("injection rows need: bus kind p q vset", lineno)
            injections.append(
                Injection(
                    bus=_int(tok[0], "bus", lineno),
                    kind=tok[1].lower(),
                    p=_opt(tok[2], "p", lineno),
                    q=_opt(tok[3], "q", lineno),
                    vset=_opt(tok[4], "vset", lineno),
                )
            )
        elif section == "regulation":
            if len(tok) != 2:
                raise CaseParseError("regulation rows need: bus k_qv", lineno)
            regulation.append((_int(tok[0], "bus", lineno), _num(tok[1], "k_qv", lineno)))

    case = NetworkCase(
        system=SystemParams(
            base_mva=sys_kv.get("base_mva", 100.0),
            omega0=sys_kv.get("omega0", 2.0 * math.pi * 60.0),
        ),
        buses=tuple(buses),
        branches=tuple(branches),
        injections=tuple(injections),
        regulation=tuple(regulation),
    )
    validate_case(case)
    return case


def serialize_case(case: NetworkCase) -> str:
    """Render a case back into the canonical text format (parse round-trips)."""
    out = ["[system]"]
    out.append(f"base_mva = {case.system.base_mva!r}")
    out.append(f"omega0 = {case.system.omega0!r}")
    out.append("")
    out.append("[buses]")
    out.append("# id  vnom  g_shunt  b_shunt")
    for b in case.buses:
        out.append(f"{b.id}  {b.vnom!r}  {b.g_shunt!r}  {b.b_shunt!r}")
    out.append("")
    out.append("[branches]")
    out.append("# from  to  r  x  b_line  ratio")
    for br in case.branches:
        out.append(f"{br.from_bus}  {br.to_bus}  {br.r!r}  {br.x!r}  {br.b_line!r}  {br.ratio!r}")
    out.append("")
    out.append("[injections]")
    out.append("# bus  kind  p  q  vset")

    def opt(v: float | None) -> str:
        return "-" if v is None else repr(v)

    for inj in case.injections:
        out.append(f"{inj.bus}  {inj.kind}  {opt(inj.p)}  {opt(inj.q)}  {opt(inj.vset)}")
    if case.regulation:
        out.append("")
        out.append("[regulation]")
        out.append("# bus  k_qv")
        for bus_id, kqv in case.regulation:
            out.append(f"{bus_id}  {kqv!r}")
    out.append("")
    return "\n".join(out)


def derive_variant(case: NetworkCase, flags: VariantFlags) -> NetworkCase:
    """Apply lossless / no-shunt-B simplifications, returning a new case.

    The decoupled flag never alters the case; it is consumed when the
    low-frequency Jacobian is assembled.
    """
    branches = case.branches
    buses = case.buses
    if flags.lossless:
        branches = tuple(replace(br, r=0.0) for br in branches)
    if flags.no_shunt_b:
        branches = tuple(replace(br, b_line=0.0) for br in branches)
        buses = tuple(replace(b, b_shunt=0.0) for b in buses)
    return replace(case, buses=buses, branches=branches)


def ieee9_text() -> str:
    """Raw text of the bundled 9-bus fixture."""
    return resources.files("dqpassivity").joinpath("fixtures/ieee9.case").read_text()


def load_ieee9() -> NetworkCase:
    """The bundled Anderson-Fouad three-machine, nine-bus test network."""
    return parse_case(ieee9_text())
