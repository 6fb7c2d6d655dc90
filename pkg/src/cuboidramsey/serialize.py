"""JSON forms of configurations, colourings, certificates and trial reports.

Rationals are written as JSON integers when integral and as ``"p/q"``
strings otherwise; integers beyond 2**53 become decimal strings so that any
JSON reader keeps them exact.  Vertex keys (tree addresses, product vertices)
serialize as nested integer arrays; as JSON object keys they are the compact
``json.dumps`` of that array.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Hashable

from .colouring import Certificate, Colouring
from .exact import RadicalScalar
from .geometry import Configuration
from .trees import TreeShape

SAFE_INT = 2**53


def num(x: Any) -> Any:
    """Make ints, Fractions and containers of them JSON-ready."""
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return x if abs(x) <= SAFE_INT else str(x)
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return num(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {k: num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [num(v) for v in x]
    return x


def parse_num(x: Any) -> Fraction:
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        raise ValueError(f"refusing inexact float {x}; write it as a string")
    raise ValueError(f"not a rational: {x!r}")


def parse_int(x: Any) -> int:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise ValueError(f"not an integer: {x!r}")
    return int(x)


def key_to_json(key: Hashable) -> Any:
    if isinstance(key, tuple):
        return [key_to_json(k) for k in key]
    return key


def key_from_json(obj: Any) -> Hashable:
    if isinstance(obj, list):
        return tuple(key_from_json(k) for k in obj)
    return obj


def key_to_str(key: Hashable) -> str:
    return json.dumps(key_to_json(key), separators=(",", ":"))


def key_from_str(text: str) -> Hashable:
    return key_from_json(json.loads(text))


def _params_to_json(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if k == "factors":
            out[k] = [_params_to_json(f) for f in v]
        else:
            out[k] = num(v)
    return out


def _params_from_json(params: dict) -> dict:
    out: dict[str, Any] = {}
    for k, v in params.items():
        if k == "factors":
            out[k] = [_params_from_json(f) for f in v]
        elif k in ("a2", "d2"):
            out[k] = parse_num(v)
        elif k == "b2":
            out[k] = [parse_num(x) for x in v]
        elif k in ("m", "n"):
            out[k] = [parse_int(x) for x in v]
        elif k == "h":
            out[k] = parse_int(v)
        else:
            out[k] = v
    return out


def config_to_json(c: Configuration, with_float: bool = False) -> dict:
    out: dict[str, Any] = {
        "dimension": c.dimension,
        "points": [[x.to_triples() for x in c.dense(i)] for i in range(len(c))],
        "phi": {key_to_str(k): i for k, i in c.phi.items()},
        "params": _params_to_json(c.params),
    }
    if c.shapes:
        out["shapes"] = [s.describe() for s in c.shapes]
    if c.factors:
        out["factors"] = [config_to_json(f) for f in c.factors]
    if with_float:
        out["points_float"] = [[float(f"{float(x):.17g}") for x in c.dense(i)]
                               for i in range(len(c))]
    return out


def config_from_json(d: dict) -> Configuration:
    try:
        points = []
        for row in d["points"]:
            p = {}
            for ax, triples in enumerate(row):
                x = RadicalScalar.from_triples(triples)
                if x:
                    p[ax] = x
            points.append(p)
        phi = {key_from_str(k): int(i) for k, i in d["phi"].items()}
        c = Configuration(points, phi, int(d["dimension"]),
                          params=_params_from_json(d.get("params", {})),
                          shapes=[TreeShape.from_description(s) for s in d.get("shapes", [])],
                          factors=[config_from_json(f) for f in d.get("factors", [])])
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValueError(f"malformed configuration JSON: {exc!r}") from exc
    if sorted(phi.values()) != list(range(len(points))):
        raise ValueError("phi is not a bijection onto the point indices")
    return c


def colouring_to_json(col: Colouring) -> dict:
    return {key_to_str(k): v for k, v in col.items()}


def colouring_from_json(d: dict) -> Colouring:
    if not isinstance(d, dict):
        raise ValueError("colouring JSON must be an object")
    out = {}
    for k, v in d.items():
        key = key_from_str(k)
        if isinstance(v, bool) or not isinstance(v, int) or v < 0:
            raise ValueError(f"colour id for {k} must be a nonnegative integer")
        out[key] = v
    return Colouring(out)


def certificate_to_json(cert: Certificate) -> dict:
    out = {"kind": cert.kind,
           "points": [key_to_json(p) for p in cert.points],
           "claim": {k: (num(v) if k != "sets" else [[key_to_json(x) for x in s] for s in v])
                     for k, v in cert.claim.items()}}
    if cert.labels:
        out["labels"] = [key_to_json(x) for x in cert.labels]
    return out


def certificate_from_json(d: dict) -> Certificate:
    try:
        claim = {}
        for k, v in d.get("claim", {}).items():
            if k == "d2":
                claim[k] = parse_num(v)
            elif k == "sides2":
                claim[k] = [parse_num(x) for x in v]
            elif k == "sets":
                claim[k] = [[key_from_json(x) for x in s] for s in v]
            else:
                claim[k] = v
        return Certificate(d["kind"], tuple(key_from_json(p) for p in d["points"]), claim,
                           tuple(key_from_json(x) for x in d.get("labels", [])))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed certificate JSON: {exc!r}") from exc


def dumps(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=False)
