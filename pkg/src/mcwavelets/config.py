"""Declarative experiment configuration.

One TOML file describes a run: domain, kernel, filter, signal, and the
experiment grid. Unknown keys anywhere are a hard error so that typos
surface instead of silently falling back to defaults. CLI overrides are
applied after parsing and take precedence.
"""

from __future__ import annotations

import tomli

from .filters import make_family
from .kernels import (Circle, CircleKernel, EuclideanBox, FiniteGraph,
                      GaussianKernel, GraphHeatKernel)
from .reference import reference_operator


class ConfigError(Exception):
    """Malformed, incomplete, or unknown configuration content."""


# section -> key -> allowed types
_SCHEMA = {
    None: {"seed": (int,)},
    "domain": {
        "type": (str,),
        "lo": (list,), "hi": (list,),
        "graph": (str,), "size": (int,), "weight": (int, float),
        "edge_list": (str,),
    },
    "kernel": {
        "type": (str,),
        "sigma": (int, float),
        "profile": (str,), "rate": (int, float), "truncation": (int,),
        "coefficients": (list,),
        "s": (int, float), "scale": (int, float),
    },
    "filter": {
        "method": (str,), "m": (int,), "gamma": (int, float),
    },
    "signal": {
        "alpha": (int, float), "budget": (int,), "h_norm": (int, float),
    },
    "experiment": {
        "n_values": (list,), "trials": (int,), "t_values": (list,),
        "tau_values": (list,), "tau": (int,), "threads": (int,),
    },
    "reference": {
        "quadrature_points": (int,),
    },
}


def _check_section(name, table, schema) -> None:
    label = name if name is not None else "top level"
    for key, value in table.items():
        if name is None and isinstance(value, dict):
            continue
        if key not in schema:
            raise ConfigError(f"unknown key {key!r} in {label}")
        if not isinstance(value, schema[key]) or isinstance(value, bool):
            names = "/".join(t.__name__ for t in schema[key])
            raise ConfigError(f"{label}.{key} must be {names}")


def validate(doc: dict) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a table")
    for section in doc:
        if isinstance(doc[section], dict) and section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
    _check_section(None, doc, _SCHEMA[None])
    for section, schema in _SCHEMA.items():
        if section is not None and section in doc:
            _check_section(section, doc[section], schema)
    return doc


def load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}")
    return validate(doc)


_OVERRIDE_SLOTS = {
    "seed": (None, "seed", int),
    "n": ("experiment", "n_values", None),  # replaces the grid with [n]
    "tau": ("experiment", "tau", int),
    "alpha": ("signal", "alpha", float),
    "method": ("filter", "method", str),
    "gamma": ("filter", "gamma", float),
    "m": ("filter", "m", int),
    "t": ("experiment", "t_values", None),  # replaces the grid with [t]
    "threads": ("experiment", "threads", int),
}


def apply_overrides(doc: dict, overrides: dict) -> dict:
    """Fold non-None CLI values into the parsed config, in place."""
    for name, value in overrides.items():
        if value is None:
            continue
        if name not in _OVERRIDE_SLOTS:
            raise ConfigError(f"unknown override {name!r}")
        section, key, cast = _OVERRIDE_SLOTS[name]
        if name == "n":
            value = [int(value)]
        elif name == "t":
            value = [float(value)]
        elif cast is not None:
            value = cast(value)
        if section is None:
            doc[key] = value
        else:
            doc.setdefault(section, {})[key] = value
    return validate(doc)


def build_domain(doc: dict):
    section = doc.get("domain", {"type": "circle"})
    kind = section.get("type")
    if kind is None:
        raise ConfigError("domain.type is required")
    if kind == "circle":
        return Circle()
    if kind == "box":
        if "lo" not in section or "hi" not in section:
            raise ConfigError("box domain needs lo and hi")
        return EuclideanBox(tuple(float(v) for v in section["lo"]),
                            tuple(float(v) for v in section["hi"]))
    if kind == "graph":
        if "edge_list" in section:
            return FiniteGraph.from_edge_list(section["edge_list"],
                                              size=section.get("size"))
        name = section.get("graph")
        size = section.get("size")
        if name is None or size is None:
            raise ConfigError("graph domain needs edge_list, or graph + size")
        builders = {"ring": FiniteGraph.ring, "path": FiniteGraph.path,
                    "complete": FiniteGraph.complete}
        if name not in builders:
            raise ConfigError(f"unknown graph builder {name!r}")
        if "weight" in section:
            return builders[name](size, weight=float(section["weight"]))
        return builders[name](size)
    raise ConfigError(f"unknown domain type {kind!r}")


def build_kernel(doc: dict):
    section = doc.get("kernel")
    if not section:
        raise ConfigError("config needs a [kernel] section")
    kind = section.get("type")
    domain = build_domain(doc)
    if kind == "circle":
        if not isinstance(domain, Circle):
            raise ConfigError("circle kernel needs the circle domain")
        if "coefficients" in section:
            return CircleKernel([float(c) for c in section["coefficients"]])
        profile = section.get("profile", "exponential")
        rate = float(section.get("rate", 1.0))
        truncation = int(section.get("truncation", 50))
        return CircleKernel.from_decay(profile=profile, rate=rate,
                                       truncation=truncation)
    if kind == "gaussian":
        if not isinstance(domain, EuclideanBox):
            raise ConfigError("gaussian kernel needs a box domain")
        return GaussianKernel(domain, sigma=float(section.get("sigma", 1.0)))
    if kind == "graph_heat":
        if not isinstance(domain, FiniteGraph):
            raise ConfigError("graph_heat kernel needs a graph domain")
        return GraphHeatKernel(domain, s=float(section.get("s", 1.0)),
                               scale=float(section.get("scale", 1.0)))
    raise ConfigError(f"unknown kernel type {kind!r}")


def build_filter(doc: dict, kappa_sq: float):
    section = doc.get("filter", {})
    method = section.get("method", "tikhonov")
    try:
        return make_family(method, kappa_sq, m=section.get("m"),
                           gamma=section.get("gamma"))
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc))


def build_reference(doc: dict, kernel):
    points = doc.get("reference", {}).get("quadrature_points", 4096)
    return reference_operator(kernel, m_q=int(points))
