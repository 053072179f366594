"""Bundled instances and a seeded generator of random quasi-symmetric configs."""

from __future__ import annotations

import json
import random
from importlib import resources

from .errors import InvalidInstance
from .exactlat import WeightConfig, validate_config

BUNDLED = ("gauss", "two_one_one", "squarecross", "random2x8")


def load_instance(name_or_path: str) -> dict:
    """Instance dict from a bundled name or a JSON file path."""
    if name_or_path in BUNDLED:
        text = resources.files("qsgkz.data").joinpath(f"{name_or_path}.json").read_text()
    else:
        with open(name_or_path) as fh:
            text = fh.read()
    return json.loads(text)


def config_from_instance(inst: dict) -> WeightConfig:
    return validate_config(inst["B"], inst.get("A"), name=inst.get("name", ""))


def bundled_config(name: str) -> WeightConfig:
    return config_from_instance(load_instance(name))


def corpus() -> list[WeightConfig]:
    return [bundled_config(n) for n in BUNDLED]


def _small_primitive(rng: random.Random, bound: int):
    from math import gcd

    while True:
        v = (rng.randint(-bound, bound), rng.randint(-bound, bound))
        if v != (0, 0) and gcd(abs(v[0]), abs(v[1])) == 1:
            return v


def random_quasi_symmetric(seed: int, ncols: int = 8, max_rank: int = 8, bound: int = 1) -> list[list[int]]:
    """Random saturated quasi-symmetric 2 x ncols matrix with small zonotope.

    Lines carry either the pair (v, -v) or the triple (2v, -v, -v).  Draws are
    repeated until the config validates and the chamber lattice-point count
    (the rank) is at most ``max_rank``.
    """
    from .arrangement import face_complex

    rng = random.Random(seed)
    for _ in range(10000):
        cols = []
        used = set()
        while len(cols) < ncols:
            v = _small_primitive(rng, bound)
            key = v if v > (0, 0) else (-v[0], -v[1])
            if key in used:
                continue
            room = ncols - len(cols)
            if room >= 3 and rng.random() < 0.3:
                cols += [(2 * v[0], 2 * v[1]), (-v[0], -v[1]), (-v[0], -v[1])]
            elif room >= 2:
                cols += [v, (-v[0], -v[1])]
            else:
                break
            used.add(key)
        if len(cols) != ncols:
            continue
        B = [[c[0] for c in cols], [c[1] for c in cols]]
        try:
            cfg = validate_config(B)
        except InvalidInstance:
            continue
        cx = face_complex(cfg)
        if len(cx.lattice_points(cx.chamber_classes[0])) <= max_rank:
            return B
    raise RuntimeError("no admissible random config found")
