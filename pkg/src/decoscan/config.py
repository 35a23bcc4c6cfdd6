"""Run configuration: TOML (or JSON) in, validated dataclasses out.

Catalogs are hand-authored, so the loader reports every validation failure
it can find, each tagged with its dotted key path, instead of stopping at
the first.  ``dump_config`` writes a config back out (in SI units) such that
parse -> serialize -> parse is the identity on the parsed object.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .core import (
    GasParameters,
    build_gas_parameters,
    length_to_si,
)
from .errors import ConfigError, DecoscanError
from .scattering import ComplexScatteringLength, ResonanceTerm, StateScatteringModel

SUBCOMMANDS = ("rate", "evolve", "scan", "invert", "oracle", "synth")


@dataclass(frozen=True)
class RateSettings:
    state_a: str
    state_b: str
    field: float
    eta0: float = 1.0


@dataclass(frozen=True)
class EvolveSettings:
    state_a: str
    state_b: str
    field: float
    t_max: float
    samples: int = 200
    eta0: float = 1.0
    rho_ab0: float = 1.0
    rho_aa0: float = 1.0
    rho_bb0: float = 1.0
    epsilon: float = 0.1


@dataclass(frozen=True)
class ScanSettings:
    state_a: str
    state_b: str
    field_lo: float
    field_hi: float
    base_points: int
    eta0: float = 1.0
    max_depth: int = 12
    threshold_ratio: float = 1e-2


@dataclass(frozen=True)
class InvertSettings:
    reference: str
    unknown: str
    field_lo: float
    field_hi: float
    points: int
    selection: str = "flat"      # "flat" or "smooth"
    anchor: float | None = None  # m; required for "smooth"
    eta0: float = 1.0
    noise_sigma: float = 0.0     # s^-1
    seed: int = 0
    rates_csv: str | None = None


@dataclass(frozen=True)
class OracleSettings:
    range: float                   # m
    kappa_r: float | None = None   # dimensionless well parameter
    depth: float | None = None     # J; alternative to kappa_r
    absorber_fraction: float = 0.0
    steps_per_range: int = 8000
    match_factor: float = 3.0
    momenta: tuple[float, ...] = ()


@dataclass(frozen=True)
class OutputSettings:
    directory: str = "out"
    precision: int = 17


@dataclass(frozen=True)
class RunConfig:
    gas: GasParameters
    states: dict[str, StateScatteringModel]
    output: OutputSettings = field(default_factory=OutputSettings)
    rate: RateSettings | None = None
    evolve: EvolveSettings | None = None
    scan: ScanSettings | None = None
    invert: InvertSettings | None = None
    oracle: OracleSettings | None = None


class _Reader:
    """Walks the raw mapping, collecting every failure with its key path."""

    def __init__(self, raw: dict):
        self.raw = raw
        self.failures: list[str] = []

    def fail(self, where: str, message: str) -> None:
        self.failures.append(f"{where}: {message}")

    def section(self, name: str, required: bool = False) -> dict | None:
        value = self.raw.get(name)
        if value is None:
            if required:
                self.fail(name, "required section is missing")
            return None
        if not isinstance(value, dict):
            self.fail(name, "must be a table")
            return None
        return value

    def get(self, table: dict, where: str, key: str, kind, default=...):
        if key not in table:
            if default is ...:
                self.fail(f"{where}.{key}", "required key is missing")
            return None if default is ... else default
        value = table[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool):
            self.fail(f"{where}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
            return None if default is ... else default
        return value


def _parse_gas(reader: _Reader) -> GasParameters | None:
    table = reader.section("gas", required=True)
    if table is None:
        return None
    values = {}
    for key in ("temperature", "density", "atom_mass", "particle_mass"):
        values[key] = reader.get(table, "gas", key, float)
    units = {
        "temperature_unit": reader.get(table, "gas", "temperature_unit", str, "kelvin"),
        "density_unit": reader.get(table, "gas", "density_unit", str, "per_cm3"),
        "mass_unit": reader.get(table, "gas", "mass_unit", str, "g_per_mol"),
    }
    if any(v is None for v in values.values()):
        return None
    try:
        return build_gas_parameters(
            values["temperature"],
            values["density"],
            values["atom_mass"],
            values["particle_mass"],
            **units,
        )
    except DecoscanError as exc:
        reader.fail("gas", str(exc))
        return None


def _parse_states(reader: _Reader) -> dict[str, StateScatteringModel]:
    table = reader.section("states", required=True)
    states: dict[str, StateScatteringModel] = {}
    if table is None:
        return states
    if not table:
        reader.fail("states", "at least one state is required")
    for name, body in table.items():
        where = f"states.{name}"
        if not isinstance(body, dict):
            reader.fail(where, "must be a table")
            continue
        unit = reader.get(body, where, "length_unit", str, "bohr")
        alpha = reader.get(body, where, "alpha", float)
        beta = reader.get(body, where, "beta", float)
        raw_terms = body.get("resonances", [])
        if not isinstance(raw_terms, list):
            reader.fail(f"{where}.resonances", "must be an array of tables")
            raw_terms = []
        terms = []
        ok = alpha is not None and beta is not None
        for i, raw in enumerate(raw_terms):
            term_where = f"{where}.resonances[{i}]"
            if not isinstance(raw, dict):
                reader.fail(term_where, "must be a table")
                ok = False
                continue
            position = reader.get(raw, term_where, "position", float)
            width = reader.get(raw, term_where, "width", float)
            strength = reader.get(raw, term_where, "strength", float)
            if None in (position, width, strength):
                ok = False
                continue
            terms.append((position, width, strength))
        if not ok:
            continue
        try:
            background = ComplexScatteringLength(
                length_to_si(alpha, unit), length_to_si(beta, unit)
            )
            resonances = tuple(
                ResonanceTerm(position=p, width=w, strength=length_to_si(s, unit))
                for p, w, s in terms
            )
            states[name] = StateScatteringModel(
                background=background, resonances=resonances, label=name
            )
        except DecoscanError as exc:
            reader.fail(where, str(exc))
    return states


def _check_state_ref(reader: _Reader, states: dict, where: str, name: str | None) -> None:
    if name is not None and name not in states:
        known = ", ".join(sorted(states)) or "(none)"
        reader.fail(where, f"references unknown state {name!r} (known: {known})")


def _parse_rate(reader: _Reader, states: dict) -> RateSettings | None:
    table = reader.section("rate")
    if table is None:
        return None
    state_a = reader.get(table, "rate", "state_a", str)
    state_b = reader.get(table, "rate", "state_b", str)
    field_ = reader.get(table, "rate", "field", float)
    eta0 = reader.get(table, "rate", "eta0", float, 1.0)
    _check_state_ref(reader, states, "rate.state_a", state_a)
    _check_state_ref(reader, states, "rate.state_b", state_b)
    if None in (state_a, state_b, field_):
        return None
    return RateSettings(state_a=state_a, state_b=state_b, field=field_, eta0=eta0)


def _parse_evolve(reader: _Reader, states: dict) -> EvolveSettings | None:
    table = reader.section("evolve")
    if table is None:
        return None
    state_a = reader.get(table, "evolve", "state_a", str)
    state_b = reader.get(table, "evolve", "state_b", str)
    field_ = reader.get(table, "evolve", "field", float)
    t_max = reader.get(table, "evolve", "t_max", float)
    samples = reader.get(table, "evolve", "samples", int, 200)
    eta0 = reader.get(table, "evolve", "eta0", float, 1.0)
    rho_ab0 = reader.get(table, "evolve", "rho_ab0", float, 1.0)
    rho_aa0 = reader.get(table, "evolve", "rho_aa0", float, 1.0)
    rho_bb0 = reader.get(table, "evolve", "rho_bb0", float, 1.0)
    epsilon = reader.get(table, "evolve", "epsilon", float, 0.1)
    _check_state_ref(reader, states, "evolve.state_a", state_a)
    _check_state_ref(reader, states, "evolve.state_b", state_b)
    if t_max is not None and t_max <= 0:
        reader.fail("evolve.t_max", "must be > 0")
    if samples is not None and samples < 2:
        reader.fail("evolve.samples", "must be >= 2")
    if None in (state_a, state_b, field_, t_max):
        return None
    return EvolveSettings(
        state_a=state_a,
        state_b=state_b,
        field=field_,
        t_max=t_max,
        samples=samples,
        eta0=eta0,
        rho_ab0=rho_ab0,
        rho_aa0=rho_aa0,
        rho_bb0=rho_bb0,
        epsilon=epsilon,
    )


def _parse_scan(reader: _Reader, states: dict) -> ScanSettings | None:
    table = reader.section("scan")
    if table is None:
        return None
    state_a = reader.get(table, "scan", "state_a", str)
    state_b = reader.get(table, "scan", "state_b", str)
    field_lo = reader.get(table, "scan", "field_lo", float)
    field_hi = reader.get(table, "scan", "field_hi", float)
    base_points = reader.get(table, "scan", "base_points", int)
    eta0 = reader.get(table, "scan", "eta0", float, 1.0)
    max_depth = reader.get(table, "scan", "max_depth", int, 12)
    threshold_ratio = reader.get(table, "scan", "threshold_ratio", float, 1e-2)
    _check_state_ref(reader, states, "scan.state_a", state_a)
    _check_state_ref(reader, states, "scan.state_b", state_b)
    if field_lo is not None and field_hi is not None and field_lo >= field_hi:
        reader.fail("scan.field_lo", "must be smaller than scan.field_hi")
    if base_points is not None and base_points < 16:
        reader.fail("scan.base_points", "must be >= 16")
    if None in (state_a, state_b, field_lo, field_hi, base_points):
        return None
    return ScanSettings(
        state_a=state_a,
        state_b=state_b,
        field_lo=field_lo,
        field_hi=field_hi,
        base_points=base_points,
        eta0=eta0,
        max_depth=max_depth,
        threshold_ratio=threshold_ratio,
    )


def _parse_invert(reader: _Reader, states: dict) -> InvertSettings | None:
    table = reader.section("invert")
    if table is None:
        return None
    reference = reader.get(table, "invert", "reference", str)
    unknown = reader.get(table, "invert", "unknown", str)
    field_lo = reader.get(table, "invert", "field_lo", float)
    field_hi = reader.get(table, "invert", "field_hi", float)
    points = reader.get(table, "invert", "points", int)
    selection = reader.get(table, "invert", "selection", str, "flat")
    unit = reader.get(table, "invert", "length_unit", str, "bohr")
    anchor_raw = reader.get(table, "invert", "anchor", float, None)
    eta0 = reader.get(table, "invert", "eta0", float, 1.0)
    noise_sigma = reader.get(table, "invert", "noise_sigma", float, 0.0)
    seed = reader.get(table, "invert", "seed", int, 0)
    rates_csv = reader.get(table, "invert", "rates_csv", str, None)
    _check_state_ref(reader, states, "invert.reference", reference)
    _check_state_ref(reader, states, "invert.unknown", unknown)
    if selection not in ("flat", "smooth"):
        reader.fail("invert.selection", f"must be 'flat' or 'smooth', got {selection!r}")
    if selection == "smooth" and anchor_raw is None:
        reader.fail("invert.anchor", "required when selection = 'smooth'")
    if field_lo is not None and field_hi is not None and field_lo >= field_hi:
        reader.fail("invert.field_lo", "must be smaller than invert.field_hi")
    if points is not None and points < 3:
        reader.fail("invert.points", "must be >= 3")
    anchor = None
    if anchor_raw is not None:
        try:
            anchor = length_to_si(anchor_raw, unit)
        except DecoscanError as exc:
            reader.fail("invert.anchor", str(exc))
    if None in (reference, unknown, field_lo, field_hi, points):
        return None
    return InvertSettings(
        reference=reference,
        unknown=unknown,
        field_lo=field_lo,
        field_hi=field_hi,
        points=points,
        selection=selection,
        anchor=anchor,
        eta0=eta0,
        noise_sigma=noise_sigma,
        seed=seed,
        rates_csv=rates_csv,
    )


def _parse_oracle(reader: _Reader) -> OracleSettings | None:
    table = reader.section("oracle")
    if table is None:
        return None
    unit = reader.get(table, "oracle", "length_unit", str, "bohr")
    range_raw = reader.get(table, "oracle", "range", float)
    kappa_r = reader.get(table, "oracle", "kappa_r", float, None)
    depth = reader.get(table, "oracle", "depth", float, None)
    absorber_fraction = reader.get(table, "oracle", "absorber_fraction", float, 0.0)
    steps_per_range = reader.get(table, "oracle", "steps_per_range", int, 8000)
    match_factor = reader.get(table, "oracle", "match_factor", float, 3.0)
    raw_momenta = table.get("momenta", [])
    if (kappa_r is None) == (depth is None):
        reader.fail("oracle", "exactly one of kappa_r or depth must be set")
    if not isinstance(raw_momenta, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw_momenta
    ):
        reader.fail("oracle.momenta", "must be an array of numbers")
        raw_momenta = []
    if absorber_fraction is not None and absorber_fraction < 0:
        reader.fail("oracle.absorber_fraction", "must be >= 0")
    if range_raw is None:
        return None
    try:
        range_si = length_to_si(range_raw, unit)
    except DecoscanError as exc:
        reader.fail("oracle.range", str(exc))
        return None
    return OracleSettings(
        range=range_si,
        kappa_r=kappa_r,
        depth=depth,
        absorber_fraction=absorber_fraction,
        steps_per_range=steps_per_range,
        match_factor=match_factor,
        momenta=tuple(float(v) for v in raw_momenta),
    )


def _parse_output(reader: _Reader) -> OutputSettings:
    table = reader.section("output")
    if table is None:
        return OutputSettings()
    directory = reader.get(table, "output", "directory", str, "out")
    precision = reader.get(table, "output", "precision", int, 17)
    if precision is not None and not 2 <= precision <= 17:
        reader.fail("output.precision", f"must be in [2, 17], got {precision!r}")
        precision = 17
    return OutputSettings(directory=directory, precision=precision)


def _json_reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ValueError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def parse_config_text(text: str, *, fmt: str = "toml") -> RunConfig:
    """Parse and validate config text; raises :class:`ConfigError` carrying
    every failure found."""
    try:
        if fmt == "json":
            raw = json.loads(text, object_pairs_hook=_json_reject_duplicates)
        else:
            raw = tomllib.loads(text)
    except (tomllib.TOMLDecodeError, ValueError) as exc:
        raise ConfigError([f"syntax: {exc}"]) from None
    if not isinstance(raw, dict):
        raise ConfigError(["top level must be a table"])

    reader = _Reader(raw)
    gas = _parse_gas(reader)
    states = _parse_states(reader)
    rate = _parse_rate(reader, states)
    evolve = _parse_evolve(reader, states)
    scan = _parse_scan(reader, states)
    invert = _parse_invert(reader, states)
    oracle = _parse_oracle(reader)
    output = _parse_output(reader)

    known = {"gas", "states", "rate", "evolve", "scan", "invert", "oracle", "output"}
    for key in raw:
        if key not in known:
            reader.fail(key, "unknown section")

    if reader.failures:
        raise ConfigError(reader.failures)
    assert gas is not None
    return RunConfig(
        gas=gas,
        states=states,
        output=output,
        rate=rate,
        evolve=evolve,
        scan=scan,
        invert=invert,
        oracle=oracle,
    )


def load_config(path) -> RunConfig:
    """Load a TOML config (or JSON when the file ends in .json)."""
    path = str(path)
    fmt = "json" if path.endswith(".json") else "toml"
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc}"]) from None
    try:
        return parse_config_text(text, fmt=fmt)
    except ConfigError as exc:
        raise ConfigError([f"{path}: {message}" for message in exc.failures]) from None


def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return json.dumps(value)
    raise TypeError(f"cannot serialize {value!r}")


def dump_config(config: RunConfig) -> str:
    """Serialize a config back to TOML, in SI units, such that re-parsing
    reproduces the identical object."""
    lines: list[str] = []

    def emit(section: str, pairs: list[tuple[str, object]]) -> None:
        lines.append(f"[{section}]")
        for key, value in pairs:
            if value is not None:
                lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")

    gas = config.gas
    emit(
        "gas",
        [
            ("temperature", gas.temperature),
            ("density", gas.density),
            ("atom_mass", gas.atom_mass),
            ("particle_mass", gas.particle_mass),
            ("temperature_unit", "kelvin"),
            ("density_unit", "per_m3"),
            ("mass_unit", "kg"),
        ],
    )
    for name in sorted(config.states):
        model = config.states[name]
        emit(
            f"states.{name}",
            [
                ("alpha", model.background.alpha),
                ("beta", model.background.beta),
                ("length_unit", "meter"),
            ],
        )
        for term in model.resonances:
            lines.append(f"[[states.{name}.resonances]]")
            lines.append(f"position = {_toml_value(term.position)}")
            lines.append(f"width = {_toml_value(term.width)}")
            lines.append(f"strength = {_toml_value(term.strength)}")
            lines.append("")
    if config.rate is not None:
        r = config.rate
        emit(
            "rate",
            [
                ("state_a", r.state_a),
                ("state_b", r.state_b),
                ("field", r.field),
                ("eta0", r.eta0),
            ],
        )
    if config.evolve is not None:
        e = config.evolve
        emit(
            "evolve",
            [
                ("state_a", e.state_a),
                ("state_b", e.state_b),
                ("field", e.field),
                ("t_max", e.t_max),
                ("samples", e.samples),
                ("eta0", e.eta0),
                ("rho_ab0", e.rho_ab0),
                ("rho_aa0", e.rho_aa0),
                ("rho_bb0", e.rho_bb0),
                ("epsilon", e.epsilon),
            ],
        )
    if config.scan is not None:
        s = config.scan
        emit(
            "scan",
            [
                ("state_a", s.state_a),
                ("state_b", s.state_b),
                ("field_lo", s.field_lo),
                ("field_hi", s.field_hi),
                ("base_points", s.base_points),
                ("eta0", s.eta0),
                ("max_depth", s.max_depth),
                ("threshold_ratio", s.threshold_ratio),
            ],
        )
    if config.invert is not None:
        v = config.invert
        emit(
            "invert",
            [
                ("reference", v.reference),
                ("unknown", v.unknown),
                ("field_lo", v.field_lo),
                ("field_hi", v.field_hi),
                ("points", v.points),
                ("selection", v.selection),
                ("length_unit", "meter"),
                ("anchor", v.anchor),
                ("eta0", v.eta0),
                ("noise_sigma", v.noise_sigma),
                ("seed", v.seed),
                ("rates_csv", v.rates_csv),
            ],
        )
    if config.oracle is not None:
        o = config.oracle
        pairs: list[tuple[str, object]] = [
            ("length_unit", "meter"),
            ("range", o.range),
            ("kappa_r", o.kappa_r),
            ("depth", o.depth),
            ("absorber_fraction", o.absorber_fraction),
            ("steps_per_range", o.steps_per_range),
            ("match_factor", o.match_factor),
        ]
        lines.append("[oracle]")
        for key, value in pairs:
            if value is not None:
                lines.append(f"{key} = {_toml_value(value)}")
        if o.momenta:
            body = ", ".join(_toml_value(k) for k in o.momenta)
            lines.append(f"momenta = [{body}]")
        lines.append("")
    emit(
        "output",
        [
            ("directory", config.output.directory),
            ("precision", config.output.precision),
        ],
    )
    return "\n".join(lines)
