"""Scenario configuration files.

A scenario is an INI-style file: flat ``key = value`` pairs grouped in
sections, with one ``[component.<name>]`` section per Gaussian term of the
packet. Unknown sections and keys are rejected, and every validation error
carries the line number of the offending entry.

Example::

    [scenario]
    kind = density
    detector = 0

    [component.1]
    weight = 1
    center = 1
    spread = 0.05
    origin = -10
"""

from __future__ import annotations

import configparser
import re
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigError


class ScenarioKind(str, Enum):
    DENSITY = "density"
    CURRENTS = "currents"
    MEANS = "means"
    NEGATIVE_FLUX = "negative_flux"
    SEMICLASSICAL = "semiclassical"
    BARRIER = "barrier"
    WIGNER_CHECK = "wigner_check"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ScenarioSection(_Section):
    kind: ScenarioKind
    detector: float = 0.0
    output: Optional[str] = None


class ConstantsSection(_Section):
    hbar: float = Field(1.0, gt=0)
    mass: float = Field(1.0, gt=0)


class PacketSection(_Section):
    direction: int = 1

    @field_validator("direction")
    @classmethod
    def _sign(cls, v: int) -> int:
        if v not in (1, -1):
            raise ValueError("direction must be +1 or -1")
        return v


class ComponentSection(_Section):
    weight: float
    center: float = Field(gt=0)
    spread: float = Field(gt=0)
    origin: float = 0.0


class TauSection(_Section):
    lo: Optional[float] = None
    hi: Optional[float] = None
    count: int = Field(2001, ge=2)


class BarrierSection(_Section):
    model: str = "free"
    strength: float = Field(0.0, ge=0)
    height: Optional[float] = Field(None, gt=0)
    width: Optional[float] = Field(None, gt=0)

    @field_validator("model")
    @classmethod
    def _model(cls, v: str) -> str:
        if v not in ("free", "delta", "rectangular"):
            raise ValueError("model must be one of free, delta, rectangular")
        return v


class SemiclassicalSection(_Section):
    tau: float
    scales: list[float] = Field(default_factory=lambda: [1.0, 0.5, 0.25, 0.125], min_length=1)

    _split = field_validator("scales", mode="before")(_split_list)

    @field_validator("scales")
    @classmethod
    def _positive(cls, v: list[float]) -> list[float]:
        if any(s <= 0 for s in v):
            raise ValueError("hbar scales must be positive")
        return v


class NegativeFluxSection(_Section):
    margin: float = Field(3.0, gt=0)
    periods: float = Field(1.0, gt=0)
    count: int = Field(201, ge=2)


class WignerSection(_Section):
    taus: list[float] = Field(min_length=1)

    _split = field_validator("taus", mode="before")(_split_list)


class TolerancesSection(_Section):
    p_tol: float = Field(1e-3, gt=0)
    tail_tol: float = Field(1e-8, gt=0)
    grid_min: int = Field(4096, ge=16)


class ScenarioConfig(_Section):
    scenario: ScenarioSection
    constants: ConstantsSection = ConstantsSection()
    packet: PacketSection = PacketSection()
    components: dict[str, ComponentSection] = Field(min_length=1)
    tau: TauSection = TauSection()
    barrier: Optional[BarrierSection] = None
    semiclassical: Optional[SemiclassicalSection] = None
    negative_flux: Optional[NegativeFluxSection] = None
    wigner: Optional[WignerSection] = None
    tolerances: TolerancesSection = TolerancesSection()

    def flat_items(self) -> list[tuple[str, Any]]:
        """``section.key`` pairs of the fully resolved configuration, in file order."""
        out: list[tuple[str, Any]] = []
        dumped = self.model_dump(mode="json")
        for section, body in dumped.items():
            if body is None:
                continue
            if section == "components":
                for name, comp in body.items():
                    out.extend((f"component.{name}.{k}", v) for k, v in comp.items())
                continue
            out.extend((f"{section}.{k}", v) for k, v in body.items())
        return out


_SECTIONS = {
    "scenario", "constants", "packet", "tau", "barrier",
    "semiclassical", "negative_flux", "wigner", "tolerances",
}
_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]\s*$")
_KEY_RE = re.compile(r"^\s*([^=:;#\s][^=:]*?)\s*[=:]")


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    """Map ``(section, key)`` and ``(section, None)`` to 1-based line numbers."""
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith(("#", ";")):
            continue
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), lineno)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), lineno)
    return index


def parse_config(text: str) -> ScenarioConfig:
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, inline_comment_prefixes=(";", "#"),
        default_section="__no_defaults__",
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], getattr(exc, "lineno", None)) from exc

    lines = _line_index(text)
    raw: dict[str, Any] = {"components": {}}
    for section in parser.sections():
        body = dict(parser.items(section))
        if section.startswith("component."):
            raw["components"][section.split(".", 1)[1]] = body
        elif section in _SECTIONS:
            raw[section] = body
        else:
            raise ConfigError(f"unknown section [{section}]", lines.get((section, None)), section)

    try:
        return ScenarioConfig.model_validate(raw)
    except ValidationError as exc:
        err = exc.errors()[0]
        loc = [str(part) for part in err["loc"]]
        if loc and loc[0] == "components" and len(loc) >= 2:
            section, key = f"component.{loc[1]}", (loc[2] if len(loc) > 2 else None)
        else:
            section, key = (loc[0] if loc else "?"), (loc[1] if len(loc) > 1 else None)
        line = lines.get((section, key)) or lines.get((section, None))
        field = f"{section}.{key}" if key else section
        if loc == ["components"]:
            msg = "at least one [component.<name>] section is required"
        elif err["type"] == "missing" and key is None:
            msg = f"missing required section [{section}]"
        elif err["type"] == "missing":
            msg = f"{field}: required field is missing"
        elif err["type"] == "extra_forbidden":
            msg = f"{field}: unknown key"
        else:
            msg = f"{field}: {err['msg']}"
        raise ConfigError(msg, line, field) from exc


def load_config(path: str | Path) -> ScenarioConfig:
    text = Path(path).read_text(encoding="utf-8")
    return parse_config(text)
