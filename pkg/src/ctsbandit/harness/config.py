"""Experiment configuration: YAML loading, validation, instance building."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np
import yaml

from ..core import BanditInstance
from ..environments import (
    ConditionalBernoulli,
    IndependentBernoulli,
    MultivariateGaussian,
    equicorrelated,
    shortest_path_means,
)
from ..numerics import make_rng
from ..oracles import Enumerated, Matching, MSets, Partition, Path as PathSpace, load_edge_list, road_graph
from ..policies import make_policy

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "load_config",
    "list_presets",
    "preset_path",
    "build_instance",
    "build_policies",
    "check_compatibility",
    "instance_rng",
]

PRESET_DIR = "presets"


class ConfigError(ValueError):
    pass


def _schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("config.schema.json").read_text())


def list_presets() -> list:
    root = resources.files(__package__).joinpath(PRESET_DIR)
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def preset_path(name: str):
    return resources.files(__package__).joinpath(PRESET_DIR, f"{name}.yaml")


@dataclass
class ExperimentConfig:
    instance: dict
    policies: list
    name: str = "experiment"
    description: str = ""
    horizon: int = 10_000
    repetitions: int = 50
    master_seed: int = 0
    timing: bool = False
    couple_streams: bool = False
    redraw_instance: bool = False
    workers: int = 1
    sweep: Optional[dict] = None
    source: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        names = [p.get("name", p["kind"]) for p in self.policies]
        if len(set(names)) != len(names):
            raise ConfigError(f"policy names must be unique, got {names}")

    @classmethod
    def from_dict(cls, data: dict, source: Optional[str] = None) -> "ExperimentConfig":
        try:
            jsonschema.validate(data, _schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"{where}: {exc.message}") from None
        return cls(**copy.deepcopy(data), source=source)

    def to_dict(self) -> dict:
        out = {k: copy.deepcopy(getattr(self, k)) for k in (
            "name", "description", "horizon", "repetitions", "master_seed", "timing",
            "couple_streams", "redraw_instance", "workers", "instance", "policies")}
        if self.sweep is not None:
            out["sweep"] = copy.deepcopy(self.sweep)
        return out

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    @property
    def base_dir(self) -> Optional[Path]:
        """Directory that relative paths in the config resolve against."""
        if self.source and not self.source.startswith("preset:"):
            return Path(self.source).parent
        return None

    def policy_names(self) -> list:
        return [p.get("name", p["kind"]) for p in self.policies]

    def select_policies(self, names) -> "ExperimentConfig":
        wanted = list(names)
        known = self.policy_names()
        missing = [n for n in wanted if n not in known]
        if missing:
            raise ConfigError(f"unknown policies {missing}; config has {known}")
        return replace(self, policies=[p for p in self.policies if p.get("name", p["kind"]) in wanted])

    def expand_sweep(self) -> list:
        """(label, config) pairs, one per sweep value; a single pair without a sweep."""
        if not self.sweep:
            return [(self.name, self)]
        param = self.sweep["param"]
        out = []
        for value in self.sweep["values"]:
            inst = dict(self.instance, **{param: value})
            label = f"{self.name}_{param}={value:g}" if isinstance(value, (int, float)) else f"{self.name}_{param}={value}"
            out.append((label, replace(self, instance=inst, sweep=None)))
        return out


def load_config(path_or_preset) -> ExperimentConfig:
    """Load a YAML config from a file path or a bundled preset name."""
    path = Path(path_or_preset)
    if path.is_file():
        text, source = path.read_text(), str(path)
    elif str(path_or_preset) in list_presets():
        text, source = preset_path(str(path_or_preset)).read_text(), f"preset:{path_or_preset}"
    else:
        raise ConfigError(f"no config file or preset named {path_or_preset!r}")
    data = yaml.safe_load(text)
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    return ExperimentConfig.from_dict(data, source=source)


# --- instance construction -----------------------------------------------------

def _space(spec: dict, base_dir: Optional[Path]):
    family = spec["family"]
    if family == "matching":
        return Matching(int(spec.get("q", 4)))
    if family == "msets":
        return MSets(int(spec["n"]), int(spec["m"]))
    if family == "partition":
        return Partition(int(spec["n"]), int(spec["m"]))
    if family == "enumerated":
        return Enumerated(spec["actions"], spec.get("n"))
    if family == "shortest_path":
        graph = spec.get("graph", {})
        if "file" in graph:
            f = Path(graph["file"])
            if not f.is_absolute() and base_dir is not None:
                f = base_dir / f
            arcs = load_edge_list(f)
        else:
            arcs = road_graph(graph.get("nodes", 39), graph.get("arcs", 170), graph.get("seed", 0))
        nodes = sorted({x for a in arcs for x in a})
        return PathSpace(arcs, spec.get("source", nodes[0]), spec.get("target", nodes[-1]))
    raise ConfigError(f"unknown family {family!r}")


def build_instance(spec: dict, rng: np.random.Generator, base_dir: Optional[Path] = None) -> BanditInstance:
    """Build a :class:`BanditInstance` from an ``instance`` config block.

    Random means are drawn from ``rng``; everything else is deterministic.
    """
    space = _space(spec, base_dir)
    n = space.n
    family = spec["family"]
    default_outcomes = "bernoulli" if family == "shortest_path" else "gaussian"
    outcomes = spec.get("outcomes", default_outcomes)

    if "means" in spec:
        mu = np.asarray(spec["means"], dtype=float)
        if mu.shape != (n,):
            raise ConfigError(f"means must have {n} entries")
    elif family == "shortest_path":
        if "s" not in spec:
            raise ConfigError("shortest_path needs s")
        mu = shortest_path_means(n, float(spec["s"]), rng)
    else:
        lo, hi = spec.get("mean_range", [0.0, 1.0])
        mu = rng.uniform(lo, hi, size=n)

    prior_range = spec.get("prior_range")
    if outcomes in ("bernoulli", "conditional_bernoulli"):
        sign = int(spec.get("sign", -1 if family == "shortest_path" else 1))
        p = sign * mu
        if np.any((p < -1e-12) | (p > 1 + 1e-12)):
            raise ConfigError("Bernoulli means must lie in sign * [0, 1]")
        p = np.clip(p, 0.0, 1.0)
        if outcomes == "bernoulli":
            env = IndependentBernoulli(p, sign)
        else:
            env = ConditionalBernoulli(p, int(spec.get("s", round(p.sum()))), sign)
        gamma = 0.25 * np.eye(n)
        if prior_range is None:
            prior_range = (-1.0, 0.0) if sign < 0 else (0.0, 1.0)
    elif outcomes == "gaussian":
        gamma = equicorrelated(n, float(spec.get("c", 0.0)))
        env = MultivariateGaussian(mu, gamma)
    else:
        raise ConfigError(f"unknown outcomes {outcomes!r}")

    init = spec.get("init", "prior" if family == "shortest_path" else "cover")
    init_cover = space.initial_cover() if init == "cover" else None
    if init == "prior" and prior_range is None:
        raise ConfigError("init: prior needs a prior_range")
    return BanditInstance(space, env, env.mean, prior_range=prior_range,
                          init_cover=init_cover, gamma=gamma)


def instance_rng(config: ExperimentConfig, repetition: int) -> np.random.Generator:
    if config.redraw_instance:
        return make_rng(config.master_seed, 1, repetition)
    return make_rng(config.master_seed, 0)


def build_policies(config: ExperimentConfig) -> list:
    out = []
    for spec in config.policies:
        spec = dict(spec)
        kind = spec.pop("kind")
        name = spec.pop("name", None)
        out.append(make_policy(kind, name=name, **spec))
    return out


def check_compatibility(config: ExperimentConfig) -> None:
    """Reset every policy on the first instance so capability errors surface early."""
    for label, cfg in config.expand_sweep():
        instance = build_instance(cfg.instance, instance_rng(cfg, 0), cfg.base_dir)
        for policy in build_policies(cfg):
            try:
                policy.reset(instance)
            except Exception as exc:
                raise type(exc)(f"policy {policy.name!r} on {label}: {exc}") from exc
