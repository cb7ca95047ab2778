"""Fractal rock surface synthesis and asperity extraction."""

from .params import Asperity, TerrainParams, TerrainPatch
from .surface import (
    active_backend,
    amplitude_scale,
    available_backends,
    generate_patch,
    height_at,
    nyquist_index,
    ridge_phases,
    rms_height,
    set_backend,
)
from .asperity import extract_asperities
from .io import (
    asperities_to_csv,
    load_asperities,
    load_patch,
    patch_to_csv,
    write_patch_meta,
)

__all__ = [
    "Asperity",
    "TerrainParams",
    "TerrainPatch",
    "active_backend",
    "available_backends",
    "amplitude_scale",
    "asperities_to_csv",
    "extract_asperities",
    "generate_patch",
    "height_at",
    "load_asperities",
    "load_patch",
    "nyquist_index",
    "patch_to_csv",
    "ridge_phases",
    "rms_height",
    "set_backend",
    "write_patch_meta",
]
