"""Experiment configuration files.

A config is a YAML document whose physical fields are strings with an
explicit unit, e.g. ``frequency: 7.0 GHz`` or ``amplitude: 60 mphi0``.
Floats are written with ``repr`` precision, so dumping and re-reading a
config reproduces every number bit for bit.

Example::

    device:
      cavity_frequency: 6.0 GHz
      levels: 3
      cavity_cutoff: 5
      driven: q2
      transmons:
        q1: {EJ_sigma: 20.41666 GHz, Ec: 300 MHz, alpha2: -300 MHz, g0: 27 MHz, flux_bias: 0 mphi0}
        q2: {...}
    pulse: tangential
    pulses:
      tangential: {amplitude: 38.5 mphi0, t_gate: 30 ns, B: 1 rad, C: 0.25 /ns}
      sinusoidal: {amplitude: 60 mphi0, t_gate: 30 ns, nu: auto, phase: 0 rad}
    run: {n_steps: 4096, n_targets: 10000, seed: 0, threads: 1,
          variants: [full, no-sdot, constant], out: results}
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

import yaml

from .dispersive import ModelVariant
from .propagator import DEFAULT_STEPS
from .pulses import PulseSpec, default_pulse
from .transmon import Device, TransmonParams, default_device
from .units import TWO_PI

# unit -> factor into internal units, per physical quantity
UNITS = {
    "frequency": {"ghz": TWO_PI, "mhz": TWO_PI * 1e-3, "rad/ns": 1.0},
    "flux": {"mphi0": 1e-3, "phi0": 1.0},
    "time": {"ns": 1.0, "us": 1e3},
    "rate": {"/ns": 1.0, "1/ns": 1.0, "ghz": 1.0},
    "angle": {"rad": 1.0, "deg": 3.141592653589793 / 180.0},
}
_WRITE_UNIT = {"frequency": "GHz", "flux": "mphi0", "time": "ns", "rate": "/ns", "angle": "rad"}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/0-9]+)\s*$")

TRANSMON_FIELDS = {"EJ_sigma": "frequency", "Ec": "frequency", "alpha2": "frequency",
                   "g0": "frequency", "flux_bias": "flux"}
PULSE_FIELDS = {
    "tangential": {"amplitude": "flux", "t_gate": "time", "B": "angle", "C": "rate"},
    "sinusoidal": {"amplitude": "flux", "t_gate": "time", "nu": "rate", "phase": "angle"},
}
PULSE_ALIASES = {"sin": "sinusoidal", "tan": "tangential",
                 "sinusoidal": "sinusoidal", "tangential": "tangential"}


class ConfigError(ValueError):
    """Malformed or physically invalid configuration."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


# --- parsing helpers -------------------------------------------------------

def _to_python(node):
    """Plain Python data plus a {path: line} map from a composed YAML node."""
    lines = {}

    def walk(n, path):
        lines[path] = n.start_mark.line + 1
        if isinstance(n, yaml.MappingNode):
            out = {}
            for k, v in n.value:
                key = k.value
                if key in out:
                    raise ConfigError(f"duplicate key {key!r}", k.start_mark.line + 1)
                lines[path + (key,)] = k.start_mark.line + 1
                out[key] = walk(v, path + (key,))
            return out
        if isinstance(n, yaml.SequenceNode):
            return [walk(v, path + (i,)) for i, v in enumerate(n.value)]
        return yaml.safe_load(yaml.serialize(n)) if n.tag != "tag:yaml.org,2002:str" else n.value

    return walk(node, ()), lines


class _Reader:
    def __init__(self, data, lines):
        self.data, self.lines = data, lines

    def line(self, path):
        while path and path not in self.lines:
            path = path[:-1]
        return self.lines.get(path)

    def get(self, path, required=True):
        node = self.data
        for key in path:
            if not isinstance(node, dict) or key not in node:
                if required:
                    raise ConfigError(f"missing key {'.'.join(map(str, path))}", self.line(path))
                return None
            node = node[key]
        return node

    def section(self, path, allowed):
        node = self.get(path)
        if not isinstance(node, dict):
            raise ConfigError(f"{'.'.join(path)} must be a mapping", self.line(path))
        for key in node:
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in {'.'.join(path) or 'config'}",
                                  self.line(path + (key,)))
        return node

    def quantity(self, path, kind):
        raw = self.get(path)
        line = self.line(path)
        if not isinstance(raw, str):
            raise ConfigError(f"{'.'.join(path)} needs an explicit unit, e.g. '{raw} "
                              f"{_WRITE_UNIT[kind]}'", line)
        m = _QUANTITY.match(raw)
        if not m:
            raise ConfigError(f"cannot parse quantity {raw!r}", line)
        value, unit = float(m.group(1)), m.group(2).lower()
        if unit not in UNITS[kind]:
            raise ConfigError(f"unit {m.group(2)!r} is not a {kind} unit "
                              f"({', '.join(UNITS[kind])})", line)
        return value * UNITS[kind][unit]

    def integer(self, path, minimum=None):
        raw = self.get(path)
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ConfigError(f"{'.'.join(path)} must be an integer", self.line(path))
        if minimum is not None and raw < minimum:
            raise ConfigError(f"{'.'.join(path)} must be >= {minimum}", self.line(path))
        return raw


def _fmt(value: float, kind: str) -> str:
    """Preferred unit if it round-trips bit for bit, else a unit with factor 1."""
    value = float(value)
    preferred = _WRITE_UNIT[kind]
    candidates = [preferred] + [u for u, f in UNITS[kind].items() if f == 1.0]
    for unit in candidates:
        factor = UNITS[kind][unit.lower()]
        text = repr(value / factor)
        if float(text) * factor == value:
            return f"{text} {unit}"
    raise AssertionError("unit with factor 1 always round-trips")


# --- config object ---------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    """Device, both pulse shapes, the selected pulse and run settings.

    ``nu_auto`` marks a sinusoidal frequency tied to the gate time,
    nu = 1/(2 t_g), so changing t_g keeps a single rise and fall.
    """

    device: Device
    pulses: dict                       # kind -> PulseSpec
    pulse_kind: str = "tangential"
    n_steps: int = DEFAULT_STEPS
    n_targets: int = 10000
    seed: int = 0
    threads: int = 1
    variants: tuple = tuple(ModelVariant)
    out: str = "results"
    nu_auto: bool = True

    @property
    def pulse(self) -> PulseSpec:
        return self.pulses[self.pulse_kind]

    def replace(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def with_gate_time(self, t_gate: float) -> "ExperimentConfig":
        new = {}
        for kind, p in self.pulses.items():
            p = p.replace(t_gate=t_gate)
            if kind == "sinusoidal" and self.nu_auto:
                p = p.replace(nu=1.0 / (2.0 * t_gate))
            new[kind] = p
        return self.replace(pulses=new)

    # serialization

    def to_dict(self) -> dict:
        dev = self.device
        names = [f"q{m + 1}" for m in range(dev.n_systems)]
        transmons = {name: {k: _fmt(getattr(p, k), kind) for k, kind in TRANSMON_FIELDS.items()}
                     for name, p in zip(names, dev.transmons)}
        pulses = {}
        for kind, p in self.pulses.items():
            block = {}
            for key, q in PULSE_FIELDS[kind].items():
                attr = {"amplitude": "amplitude", "t_gate": "t_gate"}.get(key, key)
                block[key] = _fmt(getattr(p, attr), q)
            if kind == "sinusoidal" and self.nu_auto:
                block["nu"] = "auto"
            pulses[kind] = block
        return {
            "device": {
                "cavity_frequency": _fmt(dev.omega_r, "frequency"),
                "levels": dev.levels,
                "cavity_cutoff": dev.cavity_cutoff,
                "driven": names[dev.driven],
                "transmons": transmons,
            },
            "pulse": self.pulse_kind,
            "pulses": pulses,
            "run": {
                "n_steps": self.n_steps,
                "n_targets": self.n_targets,
                "seed": self.seed,
                "threads": self.threads,
                "variants": [v.value for v in self.variants],
                "out": self.out,
            },
        }

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=False)


def default_config() -> ExperimentConfig:
    dev = default_device()
    pulses = {kind: default_pulse(kind, dev) for kind in ("tangential", "sinusoidal")}
    return ExperimentConfig(device=dev, pulses=pulses)


def _parse_device(r: _Reader):
    sec = r.section(("device",), {"cavity_frequency", "levels", "cavity_cutoff", "driven",
                                   "transmons"})
    trans = r.section(("device", "transmons"), set(sec.get("transmons", {})))
    names = list(trans)
    if len(names) != 2:
        raise ConfigError("exactly two transmon blocks are required",
                          r.line(("device", "transmons")))
    params = []
    for name in names:
        r.section(("device", "transmons", name), set(TRANSMON_FIELDS))
        vals = {k: r.quantity(("device", "transmons", name, k), kind)
                for k, kind in TRANSMON_FIELDS.items()}
        try:
            params.append(TransmonParams(**vals))
        except ValueError as exc:
            raise ConfigError(f"transmon {name}: {exc}", r.line(("device", "transmons", name)))
    driven = r.get(("device", "driven"))
    if driven not in names:
        raise ConfigError(f"driven must name a transmon block ({', '.join(names)})",
                          r.line(("device", "driven")))
    kw = dict(omega_r=r.quantity(("device", "cavity_frequency"), "frequency"),
              levels=r.integer(("device", "levels"), 3),
              cavity_cutoff=r.integer(("device", "cavity_cutoff"), 2))
    try:
        return Device(transmons=tuple(params), driven=names.index(driven), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc), r.line(("device",)))


def _parse_pulses(r: _Reader, device: Device):
    sec = r.section(("pulses",), set(PULSE_FIELDS))
    bias = device.transmons[device.driven].flux_bias
    out, nu_auto = {}, True
    for kind in sec:
        path = ("pulses", kind)
        r.section(path, set(PULSE_FIELDS[kind]))
        kw = {}
        for key, q in PULSE_FIELDS[kind].items():
            if kind == "sinusoidal" and key == "nu" and r.get(path + (key,)) == "auto":
                continue
            kw[key] = r.quantity(path + (key,), q)
        if kind == "sinusoidal":
            nu_auto = "nu" not in kw
            kw.setdefault("nu", 1.0 / (2.0 * kw["t_gate"]))
        try:
            out[kind] = PulseSpec(kind, bias, **kw)
        except ValueError as exc:
            raise ConfigError(f"pulse {kind}: {exc}", r.line(path))
    return out, nu_auto


def loads(text: str) -> ExperimentConfig:
    """Parse a YAML config string."""
    try:
        node = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        raise ConfigError(exc.problem or str(exc), mark.line + 1 if mark else None) from None
    if node is None:
        raise ConfigError("empty config")
    data, lines = _to_python(node)
    r = _Reader(data, lines)
    r.section((), {"device", "pulse", "pulses", "run"})
    device = _parse_device(r)
    pulses, nu_auto = _parse_pulses(r, device)
    kind = PULSE_ALIASES.get(str(r.get(("pulse",))))
    if kind not in pulses:
        raise ConfigError(f"pulse must select one of {sorted(pulses)}", r.line(("pulse",)))
    r.section(("run",), {"n_steps", "n_targets", "seed", "threads", "variants", "out"})
    variants = r.get(("run", "variants"))
    if not isinstance(variants, list) or not variants:
        raise ConfigError("run.variants must be a non-empty list", r.line(("run", "variants")))
    try:
        variants = tuple(ModelVariant.parse(v) for v in variants)
    except ValueError as exc:
        raise ConfigError(str(exc), r.line(("run", "variants")))
    n_steps = r.integer(("run", "n_steps"), 64)
    if n_steps % 2:
        raise ConfigError("run.n_steps must be even", r.line(("run", "n_steps")))
    return ExperimentConfig(
        device=device, pulses=pulses, pulse_kind=kind, n_steps=n_steps,
        n_targets=r.integer(("run", "n_targets"), 1), seed=r.integer(("run", "seed"), 0),
        threads=r.integer(("run", "threads"), 1), variants=variants,
        out=str(r.get(("run", "out"))), nu_auto=nu_auto,
    )


def load(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(config: ExperimentConfig) -> str:
    return config.to_yaml()
