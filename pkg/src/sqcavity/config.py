"""Scenario configuration files.

One scenario per file, ``key = value`` per line, ``#`` starts a comment.
Ranges are written ``start:stop:points``.  Example::

    scenario = AtomSqueezed
    g = 15
    r = 0.2
    delta_c = -22.5:22.5:301   # detuning in units of gamma

All rates and detunings are in units of ``gamma``.
"""

from __future__ import annotations

from .model import BathSpec, SystemParams
from .observables import DEFAULT_THRESHOLD
from .sweep import Scenario, ScenarioName, SweepAxis, SweepGrid, ValidationError

__all__ = ["ParseError", "ValidationError", "parse_config", "load_config", "KEYS"]

_FLOAT_KEYS = {"g", "eta", "kappa", "gamma", "r", "phi", "nbar", "threshold"}
KEYS = _FLOAT_KEYS | {"scenario", "delta_c", "r_axis", "n_max"}


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _number(text: str, line: int, kind=float):
    try:
        return kind(text)
    except ValueError:
        raise ParseError(line, f"expected {'an integer' if kind is int else 'a number'}, got {text!r}") from None


def _axis(param: str, text: str, line: int) -> SweepAxis:
    parts = [t.strip() for t in text.split(":")]
    if len(parts) != 3:
        raise ParseError(line, f"expected start:stop:points, got {text!r}")
    start, stop = _number(parts[0], line), _number(parts[1], line)
    points = _number(parts[2], line, int)
    return SweepAxis(param, start, stop, points)


def _tokenize(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(lineno, f"expected 'key = value', got {body!r}")
        key, value = (part.strip() for part in body.split("=", 1))
        key = key.lower()
        if key not in KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if not value:
            raise ParseError(lineno, f"missing value for {key!r}")
        if key in entries:
            raise ParseError(lineno, f"duplicate key {key!r} (first on line {entries[key][1]})")
        entries[key] = (value, lineno)
    return entries


def parse_config(text: str) -> Scenario:
    """Parse a configuration document into a validated :class:`Scenario`.

    Raises :class:`ParseError` for malformed lines and
    :class:`ValidationError` for documents that parse but describe an
    invalid scenario.
    """
    entries = _tokenize(text)
    values: dict = {}
    delta_axis = r_axis = None
    for key, (value, line) in entries.items():
        if key in _FLOAT_KEYS:
            values[key] = _number(value, line)
        elif key == "n_max":
            values[key] = _number(value, line, int)
        elif key == "delta_c":
            if ":" in value:
                try:
                    delta_axis = _axis("delta_c", value, line)
                except ValidationError as exc:
                    raise ValidationError(f"delta_c: {exc}") from None
            else:
                values[key] = _number(value, line)
        elif key == "r_axis":
            try:
                r_axis = _axis("r", value, line)
            except ValidationError as exc:
                raise ValidationError(f"r_axis: {exc}") from None
        else:
            values[key] = value

    if "scenario" not in values:
        raise ValidationError("missing required key 'scenario'")
    try:
        name = ScenarioName(values["scenario"])
    except ValueError:
        allowed = ", ".join(n.value for n in ScenarioName)
        raise ValidationError(f"unknown scenario {values['scenario']!r}; expected one of {allowed}") from None

    if not name.has_atom and "g" in values:
        raise ValidationError(f"{name.value} is an empty cavity and takes no g")
    if name.has_atom and not values.get("g", 0) > 0:
        raise ValidationError(f"{name.value} requires g > 0")
    if name.coherent and not values.get("eta", 0) > 0:
        raise ValidationError(f"{name.value} requires eta > 0")
    for key in ("r", "nbar"):
        if values.get(key, 0) < 0:
            raise ValidationError(f"{key} must be >= 0, got {values[key]}")
    if r_axis is not None and r_axis.start < 0:
        raise ValidationError(f"r_axis must be >= 0, got start {r_axis.start}")
    if r_axis is not None and delta_axis is None:
        raise ValidationError("r_axis needs a delta_c range for a map")

    if name.squeezed:
        if "nbar" in values:
            raise ValidationError(f"{name.value} takes r, not nbar")
        if "r" not in values and r_axis is None:
            raise ValidationError(f"{name.value} requires r")
        bath = BathSpec.squeezed(values.get("r", r_axis.start if r_axis else 0.0), values.get("phi", 0.0))
    else:
        if "phi" in values:
            raise ValidationError(f"{name.value} takes no phi")
        if "nbar" in values and "r" in values:
            raise ValidationError("give either nbar or r for a thermal bath, not both")
        if "nbar" in values:
            bath = BathSpec.thermal(values["nbar"])
        elif "r" in values:
            bath = BathSpec.squeezed(values["r"]).thermal_twin()
        elif r_axis is not None:
            bath = BathSpec.squeezed(r_axis.start).thermal_twin()
        else:
            raise ValidationError(f"{name.value} requires nbar or r")

    try:
        params = SystemParams(
            delta_c=values.get("delta_c", 0.0),
            g=values.get("g", 0.0),
            eta=values.get("eta", 0.0),
            gamma=values.get("gamma", 1.0),
            kappa=values.get("kappa", 1.0),
            bath=bath,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None

    sweep = delta_axis if r_axis is None else SweepGrid(delta_axis, r_axis)
    return Scenario(
        name=name,
        params=params,
        sweep=sweep,
        n_max=values.get("n_max", 15),
        threshold=values.get("threshold", DEFAULT_THRESHOLD),
    )


def load_config(path) -> Scenario:
    with open(path, encoding="utf-8") as handle:
        return parse_config(handle.read())
