"""Versioned fixtures: the named example curves and moment polygons."""

from __future__ import annotations

import json
from importlib import resources

from .errors import InputError
from .polyhedral import load_polytope_json, regular_subdivision
from .toric import DelzantPolygon
from .tropical import load_curve_json, tropical_hypersurface


def _load(name):
    ref = resources.files("troplag").joinpath(f"fixtures/{name}.json")
    with ref.open("r") as fh:
        return json.load(fh)


def fixture_names():
    out = []
    for ref in resources.files("troplag").joinpath("fixtures").iterdir():
        if ref.name.endswith(".json"):
            out.append(ref.name[:-5])
    return sorted(out)


def load_fixture(name):
    """Returns {"curve": TropicalComplex or None, "polygon": ... or None,
    plus the raw data}."""
    data = _load(name)
    out = {"raw": data, "curve": None, "polygon": None}
    if data.get("type") == "polytope":
        poly, nu = load_polytope_json(data)
        out["curve"] = tropical_hypersurface(regular_subdivision(poly, nu))
    elif data.get("type") == "curve":
        out["curve"] = load_curve_json(data)
    else:
        raise InputError(f"fixture {name} has unknown type")
    pg = data.get("polygon")
    if pg == "quadrant":
        out["polygon"] = DelzantPolygon.quadrant()
    elif pg is not None:
        out["polygon"] = DelzantPolygon.from_vertices(pg)
    return out


def load_curve(name):
    return load_fixture(name)["curve"]


def load_polygon(name):
    poly = load_fixture(name)["polygon"]
    if poly is None:
        raise InputError(f"fixture {name} has no polygon")
    return poly
