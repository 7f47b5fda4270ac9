"""Experiment configuration: flat ``key = value`` files with dotted keys.

Example::

    # two relays, the g2 setting
    profile.n_relays = 2
    profile.sigma2_f = 1
    profile.sigma2_g = 1
    budget.rho_db = 0:2:40
    budget.max_rounds = 5
    analysis.methods = exact, direct
    analysis.l_values = 5
    sim.enabled = true
    sim.trials = 100000

Scalars given for ``profile.sigma2_f`` / ``profile.sigma2_g`` are broadcast to all relays.
SNR is written in dB and turned into linear :class:`LinkBudget` values on ingestion.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from relaylab.analysis import ChiTail, LinkBudget, OutageKind, OutageMethod
from relaylab.analysis.models import MAX_ROUNDS_LIMIT
from relaylab.constants import DEFAULT_MAX_ROUNDS, DEFAULT_RATE, DEFAULT_SEED, DEFAULT_TRIALS
from relaylab.exceptions import ConfigurationError
from relaylab.fading import NetworkProfile
from relaylab.relay_logger import get_logger
from relaylab.simulation import Combining
from relaylab.simulation.estimators import MIN_TRIALS
from relaylab.util import parse_range

logger = get_logger(__name__)

# dotted key -> ExperimentConfig field; profile.* keys are collected into the nested profile
KEYS = {
    "profile.n_relays": "n_relays",
    "profile.sigma2_f": "sigma2_f",
    "profile.sigma2_g": "sigma2_g",
    "profile.sigma2_f0": "sigma2_f0",
    "budget.rho_db": "rho_db",
    "budget.rate": "rate",
    "budget.max_rounds": "max_rounds",
    "analysis.methods": "methods",
    "analysis.chi_tail": "chi_tail",
    "analysis.l_values": "l_values",
    "analysis.rho_max": "rho_max",
    "sim.enabled": "sim_enabled",
    "sim.combining": "combining",
    "sim.trials": "trials",
    "sim.seed": "seed",
    "output.path": "output_path",
    "output.timing": "timing",
}
FIELD_KEYS = {field: key for key, field in KEYS.items()}

_PROFILE_FIELDS = {"n_relays", "sigma2_f", "sigma2_g", "sigma2_f0"}
_VARIANCE_FIELDS = {"sigma2_f", "sigma2_g"}
_RANGE_FIELDS = {"rho_db", "l_values"}


class ExperimentConfig(BaseModel):
    """A validated experiment: one relay profile swept over an SNR grid."""

    model_config = ConfigDict(frozen=True)

    profile: NetworkProfile
    rho_db: tuple[float, ...] = Field(..., min_length=1)
    rate: float = Field(DEFAULT_RATE, gt=0, allow_inf_nan=False)
    max_rounds: int = Field(DEFAULT_MAX_ROUNDS, ge=1, le=MAX_ROUNDS_LIMIT)
    methods: tuple[OutageKind, ...] = Field((OutageKind.EXACT,), min_length=1)
    chi_tail: ChiTail = ChiTail.VERBATIM
    # empty means the last round only
    l_values: tuple[int, ...] = ()
    rho_max: Optional[float] = Field(None, gt=0, le=1)
    sim_enabled: bool = False
    combining: Combining = Combining.ALAMOUTI
    trials: int = Field(DEFAULT_TRIALS, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=1 << 64)
    output_path: Optional[Path] = None
    timing: bool = False

    @field_validator("rho_db")
    @classmethod
    def check_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if len(set(v)) != len(v):
            raise ValueError("SNR grid has repeated points")
        return v

    @model_validator(mode="before")
    @classmethod
    def default_rounds(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("l_values"):
            data = {**data, "l_values": (data.get("max_rounds", DEFAULT_MAX_ROUNDS),)}
        return data

    @model_validator(mode="after")
    def check_consistency(self) -> ExperimentConfig:
        for l in self.l_values:
            if not 1 <= l <= self.max_rounds:
                raise ValueError(f"l={l} outside 1..{self.max_rounds}")
        if OutageKind.ASYMPTOTIC in self.methods and 1 in self.l_values:
            raise ValueError("the asymptotic outage is defined for l >= 2")
        if self.sim_enabled and self.trials < MIN_TRIALS:
            raise ValueError(f"simulation needs at least {MIN_TRIALS} trials, got {self.trials}")
        return self

    @property
    def budgets(self) -> list[LinkBudget]:
        return [LinkBudget.from_db(v, rate=self.rate, max_rounds=self.max_rounds) for v in self.rho_db]

    @property
    def outage_methods(self) -> list[OutageMethod]:
        return [OutageMethod(kind=kind, chi_tail=self.chi_tail) for kind in self.methods]

    def with_overrides(self, **updates: Any) -> ExperimentConfig:
        """Copy with the given fields replaced; ``None`` values leave a field untouched."""
        data = self.model_dump()
        data.update({k: v for k, v in updates.items() if v is not None})
        # l_values was filled from max_rounds; let it follow a new round limit
        if "max_rounds" in updates and "l_values" not in updates and self.l_values == (self.max_rounds,):
            data["l_values"] = ()
        return validate_config(data)

    def to_text(self) -> str:
        """Serialise to the flat key/value format; :func:`parse_config` reads it back to an equal config."""
        p = self.profile
        values = {
            "profile.n_relays": str(p.n_relays),
            "profile.sigma2_f": _format_list(p.sigma2_f),
            "profile.sigma2_g": _format_list(p.sigma2_g),
            "profile.sigma2_f0": repr(p.sigma2_f0),
            "budget.rho_db": ", ".join(repr(v) for v in self.rho_db),
            "budget.rate": repr(self.rate),
            "budget.max_rounds": str(self.max_rounds),
            "analysis.methods": ", ".join(m.value for m in self.methods),
            "analysis.chi_tail": self.chi_tail.value,
            "analysis.l_values": ", ".join(str(l) for l in self.l_values),
            "sim.enabled": str(self.sim_enabled).lower(),
            "sim.combining": self.combining.value,
            "sim.trials": str(self.trials),
            "sim.seed": str(self.seed),
            "output.timing": str(self.timing).lower(),
        }
        if self.rho_max is not None:
            values["analysis.rho_max"] = repr(self.rho_max)
        if self.output_path is not None:
            values["output.path"] = str(self.output_path)
        return "".join(f"{key} = {values[key]}\n" for key in KEYS if key in values)


def _format_list(values: tuple[float, ...]) -> str:
    if len(set(values)) == 1:
        return repr(values[0])
    return ", ".join(repr(v) for v in values)


def parse_text(text: str) -> dict[str, str]:
    """Split a config file into ``{dotted key: raw value}``; ``#`` starts a comment."""
    entries: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {number}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigurationError(f"line {number}: unknown key '{key}'")
        if key in entries:
            raise ConfigurationError(f"line {number}: duplicate key '{key}'")
        entries[key] = value
    return entries


def _to_fields(entries: dict[str, str]) -> dict[str, Any]:
    data: dict[str, Any] = {}
    profile: dict[str, Any] = {}
    for key, value in entries.items():
        field = KEYS[key]
        try:
            if field in _RANGE_FIELDS:
                parsed: Any = parse_range(value)
            elif field == "methods":
                parsed = [part.strip() for part in value.split(",") if part.strip()]
            elif field in _VARIANCE_FIELDS:
                parsed = [float(part) for part in value.split(",") if part.strip()]
                if len(parsed) == 1:
                    parsed = parsed[0]
            elif field == "n_relays":
                parsed = int(value)
            elif field == "sigma2_f0":
                parsed = float(value)
            else:
                parsed = value
        except ValueError as exc:
            raise ConfigurationError(f"{key}: {exc}") from exc
        (profile if field in _PROFILE_FIELDS else data)[field] = parsed
    if profile:
        data["profile"] = profile
    return data


def _describe(exc: ValidationError) -> str:
    lines = []
    for error in exc.errors():
        loc = [str(part) for part in error["loc"]]
        if loc and loc[0] == "profile" and len(loc) > 1:
            loc = [FIELD_KEYS.get(loc[1], loc[1]), *loc[2:]]
        elif loc:
            loc = [FIELD_KEYS.get(loc[0], loc[0]), *loc[1:]]
        where = ".".join(loc) if loc else "config"
        lines.append(f"{where}: {error['msg']}")
    return "; ".join(lines)


def validate_config(data: dict[str, Any]) -> ExperimentConfig:
    """Build an :class:`ExperimentConfig`, turning validation failures into :class:`ConfigurationError`."""
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"Invalid experiment config: {_describe(exc)}") from exc


def parse_config(text: str) -> ExperimentConfig:
    entries = parse_text(text)
    if "budget.rho_db" not in entries:
        raise ConfigurationError("budget.rho_db is required")
    entries.setdefault("profile.n_relays", "1")
    entries.setdefault("profile.sigma2_f", "1.0")
    entries.setdefault("profile.sigma2_g", "1.0")
    return validate_config(_to_fields(entries))


def load_config(path: Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"Cannot read config {path}: {exc}") from exc
    cfg = parse_config(text)
    logger.info(f"Loaded {path}: N={cfg.profile.n_relays}, {len(cfg.rho_db)} SNR points")
    return cfg
