"""Scene files: JSON serialization of the cell tree and ring family.

Scenes are schema-validated, versioned, and self-contained: re-running a
command on the same scene with the same flags reproduces byte-identical
output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import jsonschema

from .errors import SchemaError
from .fractal import CellTree, IfsSpec, build_cells
from .geom import Rectangle
from .multitwist import Ring, RingFamily

SCHEMA_VERSION = 1


def _load_schema(name: str) -> dict:
    with resources.files("mtx.schemas").joinpath(name).open("r") as fh:
        return json.load(fh)


@dataclass
class Scene:
    alpha: float
    depth: int
    base: Rectangle
    tree: CellTree
    rings: Optional[RingFamily] = None
    params: dict = field(default_factory=dict)
    seeds: dict = field(default_factory=dict)

    @staticmethod
    def build(alpha: float, depth: int) -> "Scene":
        spec = IfsSpec(alpha)
        tree = build_cells(spec, depth)
        return Scene(alpha, depth, spec.base, tree)

    def to_json(self) -> dict:
        doc = {
            "schema": SCHEMA_VERSION,
            "alpha": self.alpha,
            "depth": self.depth,
            "base": [self.base.xmin, self.base.xmax, self.base.ymin, self.base.ymax],
            "cells": self.tree.to_json_fragment()["cells"],
            "params": self.params,
            "seeds": self.seeds,
        }
        if self.rings is not None:
            doc["rings"] = self.rings.to_json_fragment()
        return doc

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @staticmethod
    def loads(text: str) -> "Scene":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
        return Scene.from_json(doc)

    @staticmethod
    def load(path) -> "Scene":
        with open(path) as fh:
            return Scene.loads(fh.read())

    @staticmethod
    def from_json(doc: dict) -> "Scene":
        try:
            jsonschema.validate(doc, _load_schema("scene.schema.json"))
        except jsonschema.ValidationError as exc:
            raise SchemaError(f"scene schema violation: {exc.message}") from exc
        alpha, depth = doc["alpha"], doc["depth"]
        scene = Scene.build(alpha, depth)
        # cells are rebuilt from (alpha, depth); cross-check stored rectangles
        stored = {c["word"]: c["rect"] for c in doc["cells"]}
        for w in scene.tree.words():
            if w not in stored:
                raise SchemaError(f"scene is missing cell '{w}'")
            rect = scene.tree.cell(w)
            got = stored[w]
            if max(
                abs(rect.xmin - got[0]),
                abs(rect.xmax - got[1]),
                abs(rect.ymin - got[2]),
                abs(rect.ymax - got[3]),
            ) > 1e-9:
                raise SchemaError(f"stored cell '{w}' disagrees with (alpha, depth)")
        scene.params = doc.get("params", {})
        scene.seeds = doc.get("seeds", {})
        if "rings" in doc:
            rings = {}
            words = []
            for entry in doc["rings"]:
                w = entry["word"]
                words.append(w)
                rings[w] = Ring(
                    w,
                    complex(entry["center"][0], entry["center"][1]),
                    entry["r_out"],
                    entry["r_in"],
                    entry["eta"],
                )
            scene.rings = RingFamily(
                depth,
                scene.params.get("l_twist", 2.0),
                scene.params.get("margin", 0.25),
                rings,
                tuple(words),
            )
        return scene


def load_factors(path) -> dict:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(doc, _load_schema("factors.schema.json"))
    except jsonschema.ValidationError as exc:
        raise SchemaError(f"factors schema violation: {exc.message}") from exc
    return doc


def dump_factors(factors, depth_cut: int) -> str:
    doc = {
        "schema": SCHEMA_VERSION,
        "epsilon": factors.eps,
        "seed": factors.seed,
        "depth_cut": depth_cut,
        "factors": factors.to_json(),
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"
