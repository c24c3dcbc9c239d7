"""Scenario configuration files: a strict JSON schema and its (de)serializer.

Version "1" of the schema; unknown keys are rejected everywhere so typos
fail loudly instead of silently running defaults.
"""

from __future__ import annotations

import json

import jsonschema

from .engine import IntegratorConfig
from .ensemble import Scenario
from .exceptions import ConfigError
from .fields import (CatStateInput, GaussianWavepacket, PulseAmplitude,
                     SinglePhotonInput, VacuumInput)

SCHEMA_VERSION = "1"

_number = {"type": "number"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["version", "system", "input", "detection", "initial_bloch",
                 "integrator"],
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": ["gamma", "omega"],
            "properties": {"gamma": {"type": "number", "minimum": 0},
                           "omega": _number},
        },
        "input": {
            "type": "object",
            "additionalProperties": False,
            "required": ["type"],
            "properties": {
                "type": {"enum": ["vacuum", "single_photon", "cat"]},
                "wavepacket": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["omega_bw", "t_center"],
                    "properties": {
                        "omega_bw": {"type": "number", "exclusiveMinimum": 0},
                        "t_center": _number,
                    },
                },
                "branches": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["weight_re", "weight_im", "pulse"],
                        "properties": {
                            "weight_re": _number,
                            "weight_im": _number,
                            "pulse": {
                                "type": "array",
                                "items": {
                                    "type": "object",
                                    "additionalProperties": False,
                                    "required": ["t0", "t1", "re", "im"],
                                    "properties": {"t0": _number,
                                                   "t1": _number,
                                                   "re": _number,
                                                   "im": _number},
                                },
                            },
                        },
                    },
                },
            },
        },
        "detection": {"enum": ["homodyne", "photon_counting"]},
        "initial_bloch": {
            "type": "array", "minItems": 3, "maxItems": 3, "items": _number,
        },
        "integrator": {
            "type": "object",
            "additionalProperties": False,
            "required": ["dt", "t_final", "seed"],
            "properties": {
                "dt": {"type": "number", "exclusiveMinimum": 0},
                "t_final": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer", "minimum": 0},
                "record_stride": {"type": "integer", "minimum": 1},
            },
        },
        "ensemble": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n_trajectories"],
            "properties": {"n_trajectories": {"type": "integer",
                                              "minimum": 1}},
        },
    },
}


def _input_from_dict(d) -> object:
    kind = d["type"]
    if kind == "vacuum":
        if "wavepacket" in d or "branches" in d:
            raise ConfigError("vacuum input takes no wavepacket/branches")
        return VacuumInput()
    if kind == "single_photon":
        if "wavepacket" not in d:
            raise ConfigError("single_photon input requires a wavepacket")
        w = d["wavepacket"]
        return SinglePhotonInput(GaussianWavepacket(
            bandwidth=w["omega_bw"], t_peak=w["t_center"]))
    if "branches" not in d:
        raise ConfigError("cat input requires branches")
    weights = []
    amplitudes = []
    for b in d["branches"]:
        weights.append(complex(b["weight_re"], b["weight_im"]))
        segments = tuple((s["t0"], s["t1"], complex(s["re"], s["im"]))
                         for s in b["pulse"])
        amplitudes.append(PulseAmplitude(segments))
    return CatStateInput.from_raw(weights, amplitudes)


def _input_to_dict(inp) -> dict:
    if isinstance(inp, VacuumInput):
        return {"type": "vacuum"}
    if isinstance(inp, SinglePhotonInput):
        return {"type": "single_photon",
                "wavepacket": {"omega_bw": inp.wavepacket.bandwidth,
                               "t_center": inp.wavepacket.t_peak}}
    return {
        "type": "cat",
        "branches": [
            {"weight_re": s.real, "weight_im": s.imag,
             "pulse": [{"t0": t0, "t1": t1, "re": v.real, "im": v.imag}
                       for t0, t1, v in a.segments]}
            for s, a in zip(inp.weights, inp.amplitudes)
        ],
    }


def scenario_from_dict(data: dict) -> Scenario:
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid scenario config: {exc.message}") from exc
    integ = data["integrator"]
    try:
        cfg = IntegratorConfig(dt=integ["dt"], t_final=integ["t_final"],
                               seed=integ["seed"],
                               record_stride=integ.get("record_stride", 10))
        return Scenario(
            name=data.get("name", "custom"),
            field_input=_input_from_dict(data["input"]),
            detection=data["detection"],
            gamma=data["system"]["gamma"],
            omega=data["system"]["omega"],
            initial_bloch=tuple(data["initial_bloch"]),
            integrator=cfg,
            n_trajectories=data.get("ensemble", {}).get("n_trajectories", 50),
        )
    except (ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "name": s.name,
        "system": {"gamma": s.gamma, "omega": s.omega},
        "input": _input_to_dict(s.field_input),
        "detection": s.detection,
        "initial_bloch": list(s.initial_bloch),
        "integrator": {"dt": s.integrator.dt, "t_final": s.integrator.t_final,
                       "seed": s.integrator.seed,
                       "record_stride": s.integrator.record_stride},
        "ensemble": {"n_trajectories": s.n_trajectories},
    }


def load_scenario(path) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read scenario config {path}: {exc}") \
            from exc
    if not isinstance(data, dict):
        raise ConfigError("scenario config must be a JSON object")
    return scenario_from_dict(data)
