"""Geometric root depth for multi-person 3D pose estimation."""

import json

from geodepth._core import (
    Camera,
    GeodepthError,
    back_project,
    derive_seed,
    evaluate,
    fuse,
    fusion_benchmark,
    generate_scene,
    geo_depth,
    geo_depth_grad,
    geo_loss,
    joint_names,
    neck_index,
    project,
    quad_coeffs,
    reg_loss,
    root_index,
)

__all__ = [
    "Camera",
    "GeodepthError",
    "back_project",
    "derive_seed",
    "evaluate",
    "fuse",
    "fusion_benchmark",
    "generate_scene",
    "geo_depth",
    "geo_depth_grad",
    "geo_loss",
    "joint_names",
    "load_scene",
    "neck_index",
    "project",
    "quad_coeffs",
    "reg_loss",
    "root_index",
]


def load_scene(path):
    """Reads a scene file and returns its JSON text, ready for evaluate()."""
    with open(path, encoding="utf-8") as f:
        return json.dumps(json.load(f))
