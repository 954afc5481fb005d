"""JSON network-spec files.

Schema::

    {"M": int, "gamma": float, "loss": float (default 0),
     "elements": [{"m": int, "mp": int, "t": float, "phi": float}, ...]}

or the same header with ``"regular": {"taus": [...], "phis": [...]}`` in
place of ``elements``. Exactly one of the two must be present. Elements
may carry an exact reflectivity ``"r"`` (= 1 - t) and the regular block a
matching list ``"refls"``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ValidationError
from .network import BeamSplitter, NetworkSpec, RegularSpec


def _number(obj, key, where, kind=float, default=None):
    if key not in obj:
        if default is not None:
            return default
        raise ValidationError(f"{where}: missing field '{key}'")
    val = obj[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(f"{where}: field '{key}' must be a number, got {val!r}")
    if kind is int and int(val) != val:
        raise ValidationError(f"{where}: field '{key}' must be an integer, got {val!r}")
    return kind(val)


def parse_spec(data: dict, degrees: bool = False) -> NetworkSpec | RegularSpec:
    if not isinstance(data, dict):
        raise ValidationError("spec must be a JSON object")
    M = _number(data, "M", "spec", int)
    gamma = _number(data, "gamma", "spec")
    loss = _number(data, "loss", "spec", default=0.0)
    has_el, has_reg = "elements" in data, "regular" in data
    if has_el == has_reg:
        raise ValidationError("spec needs exactly one of 'elements' or 'regular'")
    conv = math.radians if degrees else float
    if has_reg:
        reg = data["regular"]
        if not isinstance(reg, dict):
            raise ValidationError("'regular' must be an object")
        taus, phis, refls = reg.get("taus"), reg.get("phis"), reg.get("refls")
        if not isinstance(taus, list) or not isinstance(phis, list):
            raise ValidationError("'regular' needs lists 'taus' and 'phis'")
        if refls is not None and not isinstance(refls, list):
            raise ValidationError("'regular': 'refls' must be a list")
        return RegularSpec(M, taus, [conv(p) for p in phis], loss, gamma, refls)
    elements = {}
    if not isinstance(data["elements"], list):
        raise ValidationError("'elements' must be a list")
    for i, rec in enumerate(data["elements"]):
        where = f"elements[{i}]"
        if not isinstance(rec, dict):
            raise ValidationError(f"{where}: must be an object")
        m = _number(rec, "m", where, int)
        mp = _number(rec, "mp", where, int)
        if (m, mp) in elements:
            raise ValidationError(f"{where}: duplicate element for pair ({m}, {mp})")
        t = _number(rec, "t", where)
        phi = conv(_number(rec, "phi", where, default=0.0))
        r = _number(rec, "r", where) if "r" in rec else None
        if not (1 <= m < mp <= M):
            raise ValidationError(f"{where}: pair ({m}, {mp}) violates 1 <= m < m' <= M={M}")
        try:
            elements[(m, mp)] = BeamSplitter(t, phi, r)
        except ValidationError as exc:
            raise ValidationError(f"{where}: pair ({m}, {mp}): {exc}") from None
    return NetworkSpec(M, elements, loss, gamma)


def load_spec(path, degrees: bool = False) -> NetworkSpec | RegularSpec:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ValidationError(f"spec file not found: {path}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return parse_spec(data, degrees)


def spec_to_dict(spec: NetworkSpec | RegularSpec) -> dict:
    head = {"M": spec.M, "gamma": spec.gamma, "loss": spec.loss}
    if isinstance(spec, RegularSpec):
        head["regular"] = {"taus": list(spec.taus), "phis": list(spec.phis)}
        if spec.refls is not None:
            head["regular"]["refls"] = list(spec.refls)
    else:
        head["elements"] = []
        for (m, mp), bs in sorted(spec.elements.items()):
            rec = {"m": m, "mp": mp, "t": bs.transmissivity, "phi": bs.phase}
            if bs.reflectivity != 1.0 - bs.transmissivity:
                rec["r"] = bs.reflectivity
            head["elements"].append(rec)
    return head


def dump_spec(spec, fh) -> None:
    json.dump(spec_to_dict(spec), fh, indent=2)
    fh.write("\n")
