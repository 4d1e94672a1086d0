"""Run configuration: INI (or JSON with the same layout) to validated values.

Every key is declared in SCHEMA; unknown keys, malformed values and
violated preconditions raise ConfigError with the offending ``section.key``
and, for INI input, its line number.
"""

from __future__ import annotations

import configparser
import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

AUTO = "auto"
DERIVE = "derive"

BUNDLED_DIR = Path(__file__).parent / "configs"


class ConfigError(Exception):
    pass


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _unit_interval(v):
    return 0 <= v <= 1


def _above_one(v):
    return v > 1


@dataclass(frozen=True)
class Key:
    kind: str  # float, int, str, bool
    default: Any = None
    required: bool = False
    check: Callable[[Any], bool] | None = None
    rule: str = ""
    choices: tuple = ()
    keywords: tuple = ()  # literal tokens accepted in place of a number


def _k(kind, default=None, *, required=False, check=None, rule="", choices=(), keywords=()):
    return Key(kind, default, required, check, rule, choices, keywords)


SCHEMA: dict[str, dict[str, Key]] = {
    "sphere": {
        "radius_um": _k("float", required=True, check=_positive, rule="> 0"),
        "index": _k("float", 1.45, check=_above_one, rule="> 1"),
    },
    "mode": {
        "pol": _k("str", "TE", choices=("TE", "TM")),
        "n": _k("int", 1, check=lambda v: v >= 1, rule=">= 1"),
        "l": _k("int", AUTO, check=lambda v: v >= 1, rule=">= 1", keywords=(AUTO,)),
        "m": _k("int", AUTO, keywords=(AUTO,)),
        "polar_order": _k("int", 0, check=lambda v: 0 <= v <= 20, rule="in [0, 20]"),
        "wavelength_um": _k("float", 1.06, check=_positive, rule="> 0"),
        "volume_um3": _k("float", AUTO, check=_positive, rule="> 0", keywords=(AUTO,)),
        "radial_width_um": _k("float", 1.0, check=_positive, rule="> 0"),
    },
    "prism": {
        "name": _k("str", "prism"),
        "index": _k("float", required=True, check=_positive, rule="> 0"),
    },
    "sample": {
        "name": _k("str", "sample"),
        "index_re": _k("float", required=True, check=_positive, rule="> 0"),
        "index_im": _k("float", 0.0, check=_non_negative, rule=">= 0"),
        "mesa_width_um": _k("float", 4.0, check=_non_negative, rule=">= 0"),
        "mesa_height_nm": _k("float", 200.0, check=_non_negative, rule=">= 0"),
        "gap_nm": _k("float", 0.0, check=_non_negative, rule=">= 0"),
        "offset_y_um": _k("float", 0.0),
        "offset_z_um": _k("float", 0.0),
        "gamma_cal_GHz": _k("float", 10.0, check=_non_negative, rule=">= 0"),
        "observed_ratio": _k("float", None, check=_positive, rule="> 0"),
        "probe_wavelength_um": _k("float", 0.772, check=_positive, rule="> 0"),
    },
    "loading": {
        "intrinsic_GHz": _k("float", 0.0, check=_non_negative, rule=">= 0"),
        "prism_GHz": _k("float", required=True, check=_non_negative, rule=">= 0"),
        "sample_GHz": _k("float", required=True, check=_non_negative, rule=">= 0"),
        "tolerance": _k("float", 0.1, check=_positive, rule="> 0"),
    },
    "qd": {
        "count": _k("int", 600, check=lambda v: v >= 1, rule=">= 1"),
        "center_nm": _k("float", required=True, check=_positive, rule="> 0"),
        "inhom_fwhm_nm": _k("float", required=True, check=_positive, rule="> 0"),
        "gamma_hom_GHz": _k("float", required=True, check=_positive, rule="> 0"),
        "lifetime_ps": _k("float", 100.0, check=_positive, rule="> 0"),
        "dipole_au": _k("float", 10.0, check=_positive, rule="> 0"),
        "temperature_K": _k("float", None, check=_positive, rule="> 0"),
        "cryo_factor": _k("float", 1000.0, check=_positive, rule="> 0"),
    },
    "pump": {
        "wavelength_nm": _k("float", required=True, check=_positive, rule="> 0"),
        "absorbed_uW": _k("float", required=True, check=_non_negative, rule=">= 0"),
        # plus any number of stage_<label> = efficiency keys
    },
    "cqed": {
        "rabi_GHz": _k("float", DERIVE, check=_positive, rule="> 0", keywords=(DERIVE,)),
        "field_ratio": _k("float", 1.0, check=_unit_interval, rule="in [0, 1]"),
        "linewidth_GHz": _k("float", AUTO, check=_positive, rule="> 0", keywords=(AUTO,)),
        "rabi_convention": _k("str", "splitting", choices=("splitting", "g")),
        "coupled_dots": _k("float", AUTO, check=_positive, rule="> 0", keywords=(AUTO,)),
    },
    "llcurve": {
        "pump_min_per_s": _k("float", 1e7, check=_positive, rule="> 0"),
        "pump_max_per_s": _k("float", 1e13, check=_positive, rule="> 0"),
        "points": _k("int", 121, check=lambda v: v >= 4, rule=">= 4"),
    },
}

REQUIRED_SECTIONS = ("sphere",)
STAGE_PREFIX = "stage_"


@dataclass
class RunConfig:
    sections: dict[str, dict[str, Any]]
    source: str = "<memory>"
    stage_order: list[str] = field(default_factory=list)

    def has(self, section: str) -> bool:
        return section in self.sections

    def section(self, name: str) -> dict[str, Any]:
        try:
            return self.sections[name]
        except KeyError:
            raise ConfigError(f"{self.source}: missing required section [{name}]") from None

    def require(self, *names: str) -> None:
        missing = [n for n in names if n not in self.sections]
        if missing:
            raise ConfigError(f"{self.source}: missing required section(s): " + ", ".join(f"[{m}]" for m in missing))

    def get(self, path: str) -> Any:
        sec, key = _split_path(path)
        return self.section(sec)[key]

    def with_value(self, path: str, value: Any) -> "RunConfig":
        """Copy with one field replaced and re-validated."""
        sec, key = _split_path(path)
        spec = _key_spec(sec, key)
        if spec is None:
            raise ConfigError(f"unknown parameter {path!r}")
        new = copy.deepcopy(self)
        new.sections.setdefault(sec, _defaults(sec))
        new.sections[sec][key] = _convert(value, spec, path)
        return new

    @property
    def stages(self) -> list[tuple[str, float]]:
        pump = self.sections.get("pump", {})
        return [(name, pump[STAGE_PREFIX + name]) for name in self.stage_order]


def _split_path(path: str) -> tuple[str, str]:
    if path.count(".") != 1:
        raise ConfigError(f"parameter path must look like section.key, got {path!r}")
    sec, key = path.split(".")
    return sec, key


def _key_spec(section: str, key: str) -> Key | None:
    if section not in SCHEMA:
        return None
    if section == "pump" and key.startswith(STAGE_PREFIX) and len(key) > len(STAGE_PREFIX):
        return Key("float", None, False, _unit_interval, "in [0, 1]")
    return SCHEMA[section].get(key)


def _defaults(section: str) -> dict[str, Any]:
    return {k: spec.default for k, spec in SCHEMA[section].items()}


def _convert(raw: Any, spec: Key, where: str, name: str | None = None) -> Any:
    name = name or where
    if isinstance(raw, str):
        raw = raw.strip()
        if raw in spec.keywords:
            return raw
    try:
        if spec.kind == "float":
            if isinstance(raw, bool):
                raise ValueError
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
        elif spec.kind == "int":
            if isinstance(raw, bool):
                raise ValueError
            if isinstance(raw, float):
                if not raw.is_integer():
                    raise ValueError
                value = int(raw)
            else:
                value = int(str(raw), 10)
        elif spec.kind == "str":
            value = str(raw)
        else:  # pragma: no cover
            raise AssertionError(spec.kind)
    except (TypeError, ValueError):
        expected = spec.kind + (f" or {'/'.join(spec.keywords)}" if spec.keywords else "")
        raise ConfigError(f"{where}: cannot read {raw!r} as {expected}") from None
    if spec.choices and value not in spec.choices:
        raise ConfigError(f"{where}: {value!r} not one of {', '.join(spec.choices)}")
    if spec.check is not None and not spec.check(value):
        raise ConfigError(f"{where}: value {value!r} violates precondition ({name} {spec.rule})")
    return value


def _build(raw: dict[str, dict[str, Any]], source: str, locate: Callable[[str, str | None], str]) -> RunConfig:
    sections: dict[str, dict[str, Any]] = {}
    stage_order: list[str] = []
    for sec, items in raw.items():
        if sec not in SCHEMA:
            raise ConfigError(f"{locate(sec, None)}: unknown section [{sec}]")
        values = _defaults(sec)
        for key, value in items.items():
            spec = _key_spec(sec, key)
            if spec is None:
                raise ConfigError(f"{locate(sec, key)}: unknown key {sec}.{key}")
            values[key] = _convert(value, spec, f"{locate(sec, key)}: {sec}.{key}", f"{sec}.{key}")
            if sec == "pump" and key.startswith(STAGE_PREFIX):
                stage_order.append(key[len(STAGE_PREFIX):])
        for key, spec in SCHEMA[sec].items():
            if spec.required and key not in items:
                raise ConfigError(f"{locate(sec, None)}: missing required key {sec}.{key}")
        sections[sec] = values
    for sec in REQUIRED_SECTIONS:
        if sec not in sections:
            raise ConfigError(f"{source}: missing required section [{sec}]")
    mode = sections.get("mode")
    if mode and mode["l"] != AUTO and mode["m"] != AUTO and abs(mode["m"]) > mode["l"]:
        raise ConfigError(f"{locate('mode', 'm')}: mode.m: |m| must not exceed l")
    return RunConfig(sections, source, stage_order)


def _ini_locator(text: str, source: str):
    lines = text.splitlines()

    def locate(section: str, key: str | None) -> str:
        current = None
        for no, line in enumerate(lines, 1):
            stripped = line.strip()
            m = re.match(r"^\[([^\]]+)\]", stripped)
            if m:
                current = m.group(1).strip()
                if key is None and current == section:
                    return f"{source}:{no}"
                continue
            if key is not None and current == section:
                k = re.split(r"[=:]", stripped, maxsplit=1)[0].strip()
                if k == key:
                    return f"{source}:{no}"
        return source

    return locate


def parse_ini(text: str, source: str = "<string>") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None,
        inline_comment_prefixes=("#", ";"),
        empty_lines_in_values=False,
    )
    parser.optionxform = str  # keep key case (gamma_hom_GHz)
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        loc = f"{source}:{lineno}" if lineno else source
        raise ConfigError(f"{loc}: syntax error: {exc.message.splitlines()[0]}") from None
    raw = {sec: dict(parser.items(sec)) for sec in parser.sections()}
    return _build(raw, source, _ini_locator(text, source))


def parse_json(text: str, source: str = "<string>") -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{source}:{exc.lineno}: JSON syntax error: {exc.msg}") from None
    if not isinstance(data, dict) or not all(isinstance(v, dict) for v in data.values()):
        raise ConfigError(f"{source}: top level must map section names to objects")
    return _build(data, source, lambda sec, key: source)


def resolve_path(path: str | Path) -> Path:
    """Existing path as given, else a bundled config of that name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = BUNDLED_DIR / p.name
    if bundled.exists():
        return bundled
    raise ConfigError(f"{path}: no such config file")


def parse_config(path: str | Path) -> RunConfig:
    p = resolve_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from None
    if p.suffix.lower() == ".json":
        return parse_json(text, str(path))
    return parse_ini(text, str(path))
