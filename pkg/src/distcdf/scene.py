"""
JSON scene and hazard-model files: schema validation, construction of the
geometric objects, and serialisation back to JSON.

Points are either Cartesian ``[x, y]`` / ``[x, y, z]`` or geodetic
``{lat, ns, lon, ew, depth_km}``; geodetic points are converted on a
spherical earth in the file's length unit.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from distcdf.analytic import BallSupport, DiskSupport, SegmentSupport
from distcdf.geo import EARTH_RADIUS_KM, GeodeticPoint, geodetic_to_cartesian
from distcdf.geom_core import as_point
from distcdf.mixture import DistanceDistribution, UnionSupport
from distcdf.polygon import PolygonSupport
from distcdf.psha import Gmpe, HazardQuery, MagnitudeModel, SeismicZone, UNIT_TO_KM


class SchemaError(ValueError):
    """A document that is not valid JSON or violates its schema."""


def _load_schema(name: str) -> dict:
    return json.loads(resources.files("distcdf.schemas").joinpath(name).read_text())


SCENE_SCHEMA = _load_schema("scene.schema.json")
HAZARD_SCHEMA = _load_schema("hazard.schema.json")
HAZARD_SCHEMA["$defs"] = copy.deepcopy(SCENE_SCHEMA["$defs"])


def _validate(doc, schema: dict) -> None:
    v = jsonschema.Draft202012Validator(schema)
    errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for e in errors[:10]:
            where = "/".join(str(p) for p in e.absolute_path) or "<root>"
            lines.append(f"  at {where}: {e.message}")
        raise SchemaError("schema violation:\n" + "\n".join(lines))


def read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


class _PointConverter:
    def __init__(self, units: str, earth_radius_km: float):
        self.scale = 1.0 / UNIT_TO_KM[units]  # km -> file unit
        self.R = earth_radius_km * self.scale

    def __call__(self, p) -> np.ndarray:
        if isinstance(p, dict):
            g = GeodeticPoint(p["lat"], p["ns"], p["lon"], p["ew"], p.get("depth_km", 0.0) * self.scale)
            return geodetic_to_cartesian(g, self.R)
        return as_point(p)


def build_support(spec: dict, point):
    t = spec["type"]
    if t == "disk":
        if "boundary_points" in spec:
            S1, S2 = spec["boundary_points"]
            return DiskSupport.from_boundary_points(point(spec["center"]), point(S1), point(S2))
        return DiskSupport.from_normal(point(spec["center"]), spec["radius"], spec.get("normal", (0.0, 0.0, 1.0)))
    if t == "ball":
        return BallSupport(point(spec["center"]), float(spec["radius"]))
    if t == "segment":
        return SegmentSupport(point(spec["a"]), point(spec["b"]))
    if t == "polygon":
        return PolygonSupport([point(v) for v in spec["vertices"]])
    if t == "union":
        return UnionSupport(tuple(build_support(c, point) for c in spec["components"]))
    raise SchemaError(f"unknown support type {t!r}")


@dataclass(frozen=True, eq=False)
class Scene:
    """A validated scene document and the objects built from it."""
    document: dict
    site: np.ndarray
    support: object

    @property
    def distribution(self) -> DistanceDistribution:
        return DistanceDistribution(self.site, self.support)

    @property
    def kind(self) -> str:
        return self.document["supports"][0]["type"]

    def to_dict(self) -> dict:
        return copy.deepcopy(self.document)

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2)


def parse_scene(doc: dict) -> Scene:
    _validate(doc, SCENE_SCHEMA)
    point = _PointConverter(doc["units"], doc.get("earth_radius_km", EARTH_RADIUS_KM))
    support = build_support(doc["supports"][0], point)
    return Scene(copy.deepcopy(doc), point(doc["site"]), support)


def load_scene(path) -> Scene:
    return parse_scene(read_json(path))


def _build_gmpe(spec: dict) -> Gmpe:
    if spec["type"] == "cornell":
        return Gmpe.cornell(spec["coeffs"]) if "coeffs" in spec else Gmpe.cornell()
    return Gmpe.linear(spec["coeffs"])


@dataclass(frozen=True, eq=False)
class HazardModel:
    document: dict
    query: HazardQuery

    def to_json(self) -> str:
        return json.dumps(self.document, indent=2)


def parse_hazard(doc: dict, n_m: int | None = None, n_d: int | None = None) -> HazardModel:
    _validate(doc, HAZARD_SCHEMA)
    units = doc["units"]
    point = _PointConverter(units, doc.get("earth_radius_km", EARTH_RADIUS_KM))
    zones = []
    for z in doc["zones"]:
        if not z["m_min"] < z["m_max"]:
            raise SchemaError(f"zone needs m_min < m_max, got {z['m_min']} >= {z['m_max']}")
        zones.append(SeismicZone(
            rate=float(z["rate"]),
            magnitude=MagnitudeModel(float(z["beta"]), float(z["m_min"]), float(z["m_max"])),
            geometry=build_support(z["geometry"], point),
            gmpe=_build_gmpe(z["gmpe"]),
            units=units,
        ))
    grid = doc.get("grid", {})
    query = HazardQuery(
        site=point(doc["site"]),
        horizon=float(doc["horizon_years"]),
        zones=tuple(zones),
        n_M=n_m or grid.get("n_m", 256),
        n_D=n_d or grid.get("n_d", 256),
    )
    return HazardModel(copy.deepcopy(doc), query)


def load_hazard(path, **kw) -> HazardModel:
    return parse_hazard(read_json(path), **kw)


def bundled_scenes() -> list[Path]:
    root = resources.files("distcdf.scenes")
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".json"))
