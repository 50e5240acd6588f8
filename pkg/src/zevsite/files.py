"""Readers and writers for the CSV, JSON and GeoJSON files the pipeline exchanges."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, ZevsiteError
from .geo import CandidateSite, GeoPoint, RouteProfile, build_route_profile

ROUTE_COLUMNS = ("route_id", "seq", "lat", "lon")


def _num(row, col, row_no):
    try:
        return float(row[col])
    except (TypeError, ValueError):
        raise ParseError(f"bad number {row.get(col)!r}", row_no, col) from None


def load_routes(path) -> dict[str, RouteProfile]:
    """Routes CSV: ``route_id,seq,lat,lon[,segment_multiplier]``.

    A vertex's multiplier applies to the segment that starts there; the last
    vertex's value is ignored.
    """
    rows: dict[str, list] = {}
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        missing = [c for c in ROUTE_COLUMNS if c not in (reader.fieldnames or ())]
        if missing:
            raise ParseError(f"missing columns {missing}", row=1)
        for row_no, row in enumerate(reader, start=2):
            mult = (row.get("segment_multiplier") or "").strip()
            try:
                pt = GeoPoint(_num(row, "lat", row_no), _num(row, "lon", row_no))
            except ParseError:
                raise
            except ZevsiteError as e:
                raise ParseError(str(e), row_no) from None
            rows.setdefault(row["route_id"], []).append(
                (_num(row, "seq", row_no), pt, float(mult) if mult else 1.0))
    routes = {}
    for rid in sorted(rows):
        pts = sorted(rows[rid], key=lambda r: r[0])
        routes[rid] = build_route_profile(rid, [p for _, p, _ in pts], [m for _, _, m in pts[:-1]])
    return routes


def load_sites(path) -> list[CandidateSite]:
    """Candidate sites from GeoJSON Point features (``site_id`` property) or CSV ``site_id,lat,lon``."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".geojson", ".json") or text.lstrip().startswith("{"):
        data = json.loads(text)
        sites = []
        for i, feat in enumerate(data.get("features", [])):
            geom = feat.get("geometry") or {}
            if geom.get("type") != "Point":
                raise ParseError(f"feature {i} is not a Point")
            lon, lat = geom["coordinates"][:2]
            sid = (feat.get("properties") or {}).get("site_id")
            if sid is None:
                raise ParseError(f"feature {i} has no site_id property")
            sites.append(CandidateSite(str(sid), GeoPoint(float(lat), float(lon))))
        return sites
    sites = []
    reader = csv.DictReader(io.StringIO(text))
    for row_no, row in enumerate(reader, start=2):
        sites.append(CandidateSite(row["site_id"], GeoPoint(_num(row, "lat", row_no), _num(row, "lon", row_no))))
    return sites


def candidates_geojson(sites: Sequence[CandidateSite]) -> dict:
    return {
        "type": "FeatureCollection",
        "features": [{
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [s.location.lon, s.location.lat]},
            "properties": {
                "site_id": s.site_id,
                "snaps": [{"route_id": rid, "milepost_mi": mp, "snap_distance_mi": d}
                          for rid, (mp, d) in sorted(s.snaps.items())],
            },
        } for s in sites],
    }


def load_candidates_geojson(path) -> list[CandidateSite]:
    """Inverse of :func:`candidates_geojson`, snaps included."""
    data = json.loads(Path(path).read_text())
    out = []
    for feat in data["features"]:
        lon, lat = feat["geometry"]["coordinates"][:2]
        p = feat["properties"]
        snaps = {s["route_id"]: (float(s["milepost_mi"]), float(s["snap_distance_mi"])) for s in p.get("snaps", [])}
        out.append(CandidateSite(str(p["site_id"]), GeoPoint(lat, lon), snaps))
    return out


def fmt(v):
    """Stable text form for CSV cells."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(round(v, 12) + 0.0)
    return str(v)


def csv_text(columns: Sequence[str], rows: Iterable[Mapping], comment: str | None = None) -> str:
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(r[c]) for c in columns])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
