"""Terrain file formats.

Patch CSV: comment-prefixed provenance lines, a ``x,y,z`` header, one row
per lattice point in row-major order.  Patch metadata (the synthesis
parameters and grid geometry) goes to a JSON sidecar so a patch can be
reloaded or regenerated exactly.  Asperity CSV: one row per asperity.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .params import Asperity, TerrainParams, TerrainPatch

_FLOAT_FMT = "%.17g"


def _write_provenance(fh, provenance) -> None:
    for key in sorted(provenance or {}):
        fh.write(f"# {key}: {provenance[key]}\n")


def patch_to_csv(patch: TerrainPatch, path, provenance=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        _write_provenance(fh, provenance)
        fh.write("x,y,z\n")
        for i in range(patch.ys.size):
            for j in range(patch.xs.size):
                fh.write(
                    f"{patch.xs[j]:.17g},{patch.ys[i]:.17g},{patch.heights[i, j]:.17g}\n"
                )


def write_patch_meta(patch: TerrainPatch, path, provenance=None) -> None:
    doc = {
        "params": dataclasses.asdict(patch.params),
        "spacing": patch.spacing,
        "extent": patch.extent,
    }
    if provenance:
        doc["_provenance"] = dict(provenance)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_patch(csv_path, meta_path) -> TerrainPatch:
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    params = TerrainParams(**meta["params"])
    data = np.loadtxt(csv_path, delimiter=",", comments="#", skiprows=_header_rows(csv_path))
    npts = int(round(meta["extent"] / meta["spacing"])) + 1
    heights = data[:, 2].reshape(npts, npts)
    xs = data[:npts, 0].copy()
    ys = data[::npts, 1].copy()
    return TerrainPatch(
        params=params,
        spacing=meta["spacing"],
        extent=meta["extent"],
        xs=xs,
        ys=ys,
        heights=heights,
    )


def _header_rows(path) -> int:
    """Comment lines plus the one column-name row at the top of the file."""
    count = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                count += 1
            else:
                return count + 1
    return count


def asperities_to_csv(asperities, path, provenance=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        _write_provenance(fh, provenance)
        fh.write("x,y,z,tip_radius,normal_angle\n")
        for a in asperities:
            fh.write(
                f"{a.x:.17g},{a.y:.17g},{a.z:.17g},"
                f"{a.tip_radius:.17g},{a.normal_angle:.17g}\n"
            )


def load_asperities(path) -> list:
    data = np.loadtxt(
        path, delimiter=",", comments="#", skiprows=_header_rows(path), ndmin=2
    )
    return [
        Asperity(
            x=float(r[0]),
            y=float(r[1]),
            z=float(r[2]),
            tip_radius=float(r[3]),
            normal_angle=float(r[4]),
        )
        for r in data
    ]
