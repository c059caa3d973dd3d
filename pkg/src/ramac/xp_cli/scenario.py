"""Scenario files: a line-oriented ``key = value`` format with dotted sections.

Example::

    # 802.11a-like single data channel
    name = my-scenario
    model = single
    params.N = 50
    params.k = 16
    params.a = 0.5
    params.c = 0.75
    params.n = 4
    params.L = 1
    error.ber = 0.001
    error.nb = 500
    sweep.var = a
    sweep.start = 0.02
    sweep.stop = 1.0
    sweep.step = 0.02
    sim.frames = 500
    sim.replications = 30
    sim.seed = 1

Sections:

``params.*``
    Model parameters. ``model = single`` takes N, k, a, c, n, L;
    ``model = qos`` takes N, a, l, m, k_max, c1, c2, n, L1, L2.
``error.*`` / ``link.*``
    The packet error probability, given exactly one way: ``error.e``;
    or ``error.ber`` with ``error.nb``; or ``link.modulation``,
    ``link.channel``, ``link.snr_db``, ``link.nb`` (plus
    ``link.rician_k_db`` for RICIAN).
``sweep.*``
    Optional. ``var`` plus either ``start``/``stop``/``step`` or a
    comma-separated ``values`` list.
``sim.*``
    Optional simulator defaults: ``frames``, ``replications``, ``seed``.

Blank lines, lines starting with ``#`` and trailing `` # ...`` comments are
ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from ramac.analytic_qos import QosParams
from ramac.analytic_single import SingleParams
from ramac.errors import RamacError, ScenarioError
from ramac.phy_channel import Channel, LinkSpec, Modulation, bit_error_rate, packet_error_probability

MODEL_PARAMS = {
    "single": ("N", "k", "a", "c", "n", "L"),
    "qos": ("N", "a", "l", "m", "k_max", "c1", "c2", "n", "L1", "L2"),
}
INT_KEYS = {"N", "k", "n", "L", "k_max", "L1", "L2", "nb", "frames", "replications", "seed"}
ERROR_KEYS = ("e", "ber", "nb")
LINK_KEYS = ("modulation", "channel", "snr_db", "nb", "rician_k_db")
SIM_KEYS = ("frames", "replications", "seed")


def _number(key: str, raw: str) -> int | float:
    try:
        v = float(raw)
    except ValueError:
        raise ScenarioError(f"expected a number, got {raw!r}", key) from None
    if math.isnan(v):
        raise ScenarioError("NaN is not allowed", key)
    if key.rsplit(".", 1)[-1] in INT_KEYS:
        if v != int(v):
            raise ScenarioError(f"expected an integer, got {raw!r}", key)
        return int(v)
    return v


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class Sweep:
    var: str
    values: tuple[float, ...]
    start: float | None = None
    stop: float | None = None
    step: float | None = None

    @classmethod
    def from_range(cls, var: str, start: float, stop: float, step: float) -> "Sweep":
        if not step > 0:
            raise ScenarioError(f"step must be > 0, got {step}", "sweep.step")
        if start > stop:
            raise ScenarioError(f"start {start} exceeds stop {stop}", "sweep.start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        # round away accumulated float error (0.1 + 2*0.2 -> 0.5)
        values = tuple(float(f"{start + i * step:.12g}") for i in range(count))
        return cls(var, values, start, stop, step)

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        """``var=start:stop:step`` or ``var=v1,v2,...``."""
        var, sep, spec = text.partition("=")
        var = var.strip()
        if not sep or not var:
            raise ScenarioError(f"expected var=start:stop:step or var=v1,v2,..., got {text!r}", "sweep")
        if ":" in spec:
            parts = spec.split(":")
            if len(parts) != 3:
                raise ScenarioError(f"expected start:stop:step, got {spec!r}", "sweep")
            start, stop, step = (_number("sweep." + n, p) for n, p in zip(("start", "stop", "step"), parts))
            return cls.from_range(var, float(start), float(stop), float(step))
        values = tuple(float(_number("sweep.values", p)) for p in spec.split(","))
        return cls(var, values)

    def items(self) -> list[tuple[str, str]]:
        out = [("sweep.var", self.var)]
        if self.step is not None:
            out += [("sweep.start", _fmt(self.start)), ("sweep.stop", _fmt(self.stop)), ("sweep.step", _fmt(self.step))]
        else:
            out.append(("sweep.values", ", ".join(_fmt(v) for v in self.values)))
        return out


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    params: dict = field(default_factory=dict)
    error: dict = field(default_factory=dict)
    link: dict = field(default_factory=dict)
    sweep: Sweep | None = None
    sim: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    # -- validation -------------------------------------------------------

    def validate(self) -> None:
        if self.model not in MODEL_PARAMS:
            raise ScenarioError(f"unknown model {self.model!r} (expected single or qos)", "model")
        expected = MODEL_PARAMS[self.model]
        for key in self.params:
            if key not in expected:
                raise ScenarioError(f"not a parameter of the {self.model} model", f"params.{key}")
        for key in expected:
            if key not in self.params:
                raise ScenarioError("missing", f"params.{key}")
        for key in self.sim:
            if key not in SIM_KEYS:
                raise ScenarioError("unknown simulator option", f"sim.{key}")
        self._check_error_form()
        if self.sweep is not None:
            if self.sweep.var not in self.scalar_names():
                raise ScenarioError(
                    f"{self.sweep.var!r} is not a scalar parameter of this scenario", "sweep.var"
                )
            if not self.sweep.values:
                raise ScenarioError("no sweep values", "sweep.values")
            if self.sweep.var in INT_KEYS:
                for v in self.sweep.values:
                    if v != int(v):
                        raise ScenarioError(f"{self.sweep.var} must be an integer, got {v}", "sweep")
        # building the model objects runs the numeric invariants
        try:
            self.model_params()
        except ScenarioError:
            raise
        except RamacError as exc:
            raise ScenarioError(str(exc), "params") from exc

    def _check_error_form(self) -> None:
        forms = []
        if "e" in self.error:
            forms.append("error.e")
        if "ber" in self.error:
            forms.append("error.ber")
        if self.link:
            forms.append("link.*")
        if len(forms) != 1:
            raise ScenarioError(
                f"specify the packet error exactly one way (error.e | error.ber+nb | link.*), got {forms or 'none'}",
                "error",
            )
        for key in self.error:
            if key not in ERROR_KEYS:
                raise ScenarioError("unknown key", f"error.{key}")
        if "e" in self.error and "nb" in self.error:
            raise ScenarioError("error.nb only goes with error.ber", "error.nb")
        if "ber" in self.error and "nb" not in self.error:
            raise ScenarioError("missing (required with error.ber)", "error.nb")
        if self.link:
            for key in self.link:
                if key not in LINK_KEYS:
                    raise ScenarioError("unknown key", f"link.{key}")
            for key in ("modulation", "channel", "snr_db", "nb"):
                if key not in self.link:
                    raise ScenarioError("missing", f"link.{key}")
            try:
                Modulation(self.link["modulation"])
                Channel(self.link["channel"])
            except ValueError as exc:
                raise ScenarioError(str(exc), "link") from None

    def scalar_names(self) -> tuple[str, ...]:
        names = tuple(self.params)
        if "e" in self.error:
            return names + ("e",)
        if "ber" in self.error:
            return names + ("ber", "nb")
        return names + tuple(k for k in ("snr_db", "nb", "rician_k_db") if k in self.link)

    # -- resolution -------------------------------------------------------

    def with_value(self, var: str, value) -> "Scenario":
        """Copy with one scalar parameter replaced."""
        if var not in self.scalar_names():
            raise ScenarioError(f"{var!r} is not a scalar parameter of this scenario", var)
        value = _number(var, _fmt(value)) if not isinstance(value, str) else _number(var, value)
        if var in self.params:
            return replace(self, params={**self.params, var: value})
        if var in self.error:
            return replace(self, error={**self.error, var: value})
        return replace(self, link={**self.link, var: value})

    def packet_error(self) -> float:
        if "e" in self.error:
            return float(self.error["e"])
        if "ber" in self.error:
            return packet_error_probability(self.error["ber"], self.error["nb"])
        lk = self.link
        spec = LinkSpec(lk["modulation"], lk["channel"], float(lk["snr_db"]), lk.get("rician_k_db"))
        return packet_error_probability(bit_error_rate(spec), lk["nb"])

    def model_params(self) -> SingleParams | QosParams:
        try:
            e = self.packet_error()
            if self.model == "single":
                return SingleParams(e=e, **self.params)
            return QosParams(e=e, **self.params)
        except RamacError as exc:
            raise ScenarioError(str(exc), "params") from exc

    # -- text form --------------------------------------------------------

    def items(self) -> list[tuple[str, str]]:
        out = [("name", self.name), ("model", self.model)]
        out += [(f"params.{k}", _fmt(self.params[k])) for k in MODEL_PARAMS[self.model]]
        out += [(f"error.{k}", _fmt(self.error[k])) for k in ERROR_KEYS if k in self.error]
        out += [(f"link.{k}", _fmt(self.link[k])) for k in LINK_KEYS if k in self.link]
        if self.sweep is not None:
            out += self.sweep.items()
        out += [(f"sim.{k}", _fmt(self.sim[k])) for k in SIM_KEYS if k in self.sim]
        return out

    def to_text(self) -> str:
        return "".join(f"{k} = {v}\n" for k, v in self.items())


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(" #", 1)[0].split("\t#", 1)[0].strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ScenarioError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key in fields:
            raise ScenarioError(f"{source}:{lineno}: duplicate key", key)
        fields[key] = value

    def take(prefix: str) -> dict[str, str]:
        return {k[len(prefix) :]: v for k, v in fields.items() if k.startswith(prefix)}

    known_prefixes = ("params.", "error.", "link.", "sweep.", "sim.")
    for key in fields:
        if key not in ("name", "model") and not key.startswith(known_prefixes):
            raise ScenarioError("unknown key", key)
    if "model" not in fields:
        raise ScenarioError("missing", "model")

    params = {k: _number(f"params.{k}", v) for k, v in take("params.").items()}
    error = {k: _number(f"error.{k}", v) for k, v in take("error.").items()}
    link: dict = {}
    for k, v in take("link.").items():
        link[k] = v.upper() if k in ("modulation", "channel") else _number(f"link.{k}", v)
    sim = {k: _number(f"sim.{k}", v) for k, v in take("sim.").items()}

    sw = take("sweep.")
    sweep = None
    if sw:
        if "var" not in sw:
            raise ScenarioError("missing", "sweep.var")
        if "values" in sw:
            if set(sw) - {"var", "values"}:
                raise ScenarioError("use either values or start/stop/step", "sweep")
            sweep = Sweep.parse(f"{sw['var']}={sw['values']}")
        else:
            for k in ("start", "stop", "step"):
                if k not in sw:
                    raise ScenarioError("missing", f"sweep.{k}")
            unknown = set(sw) - {"var", "start", "stop", "step"}
            if unknown:
                raise ScenarioError("unknown key", f"sweep.{sorted(unknown)[0]}")
            sweep = Sweep.from_range(
                sw["var"],
                float(_number("sweep.start", sw["start"])),
                float(_number("sweep.stop", sw["stop"])),
                float(_number("sweep.step", sw["step"])),
            )
    return Scenario(
        name=fields.get("name", Path(source).stem if source != "<string>" else "scenario"),
        model=fields["model"].lower(),
        params=params,
        error=error,
        link=link,
        sweep=sweep,
        sim=sim,
    )


def load_scenario(ref: str | Path) -> Scenario:
    """Load a preset by name, or a scenario file by path."""
    from ramac.xp_cli.presets import PRESETS

    ref_s = str(ref)
    if ref_s in PRESETS:
        return parse_scenario(PRESETS[ref_s], source=ref_s)
    path = Path(ref_s)
    if not path.is_file():
        raise ScenarioError(f"no preset or scenario file named {ref_s!r} (presets: {', '.join(sorted(PRESETS))})")
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))
