"""Plain-text world files.

One ``key = value`` entry per line; ``#`` starts a comment; keys other than
``ground`` may repeat. Class fields take a class name or an integer id.

    format = povnav-world 1
    ground = grass
    region = x0 y0 x1 y1 class
    cylinder = x y radius height class
    wall = x0 y0 x1 y1 height class
    pedestrian = x y goal_x goal_y v_des radius [patrol]

A ``patrol`` pedestrian walks back and forth between its start and goal.
"""

from __future__ import annotations

import os

from ..segmentation import SemanticClass
from .world import Cylinder, GroundRegion, Pedestrian, Wall, World

FORMAT_TAG = "povnav-world 1"


class WorldFileError(ValueError):
    def __init__(self, source: str, line: int, message: str):
        super().__init__(f"{source}:{line}: {message}")
        self.source, self.line = source, line


def _class_id(token: str) -> int:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return int(SemanticClass[token.upper()])
    except KeyError:
        raise ValueError(f"unknown class {token!r}") from None


def _floats(tokens, n: int, what: str) -> list[float]:
    if len(tokens) < n:
        raise ValueError(f"{what} needs {n} numbers, got {len(tokens)}")
    return [float(t) for t in tokens[:n]]


def parse_world(text: str, source: str = "<world>") -> World:
    world = World()
    seen_ground = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().lower(), value.strip()
        if not sep or not key:
            raise WorldFileError(source, lineno, "expected 'key = value'")
        tok = value.split()
        try:
            if key == "format":
                if value != FORMAT_TAG:
                    raise ValueError(f"unsupported format {value!r}")
            elif key == "ground":
                if seen_ground:
                    raise ValueError("ground given twice")
                world.ground_class, seen_ground = _class_id(value), True
            elif key == "region":
                x0, y0, x1, y1 = _floats(tok, 4, "region")
                _expect_len(tok, 5, "region")
                world.regions.append(GroundRegion(x0, y0, x1, y1, _class_id(tok[4])))
            elif key == "cylinder":
                x, y, r, h = _floats(tok, 4, "cylinder")
                _expect_len(tok, 5, "cylinder")
                world.obstacles.append(Cylinder(x, y, r, h, _class_id(tok[4])))
            elif key == "wall":
                x0, y0, x1, y1, h = _floats(tok, 5, "wall")
                _expect_len(tok, 6, "wall")
                world.walls.append(Wall(x0, y0, x1, y1, h, _class_id(tok[5])))
            elif key == "pedestrian":
                x, y, gx, gy, v, r = _floats(tok, 6, "pedestrian")
                if len(tok) not in (6, 7) or (len(tok) == 7 and tok[6] != "patrol"):
                    raise ValueError("pedestrian takes 6 numbers and an optional 'patrol'")
                home = (x, y) if len(tok) == 7 else None
                world.agents.append(Pedestrian((x, y), (0.0, 0.0), (gx, gy), v, r, home=home))
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise WorldFileError(source, lineno, str(exc)) from None
    return world


def _expect_len(tok, n: int, what: str) -> None:
    if len(tok) != n:
        raise ValueError(f"{what} takes {n} fields, got {len(tok)}")


def load_world(path: str | os.PathLike) -> World:
    with open(path, encoding="utf-8") as fh:
        return parse_world(fh.read(), source=str(path))


def _cls(cid: int) -> str:
    try:
        return SemanticClass(cid).name.lower()
    except ValueError:
        return str(cid)


def dump_world(world: World) -> str:
    """Serialize static content and agent start states (velocities are not stored)."""
    lines = [f"format = {FORMAT_TAG}", f"ground = {_cls(world.ground_class)}"]
    for r in world.regions:
        lines.append(f"region = {r.x0!r} {r.y0!r} {r.x1!r} {r.y1!r} {_cls(r.class_id)}")
    for o in world.obstacles:
        lines.append(f"cylinder = {o.x!r} {o.y!r} {o.radius!r} {o.height_m!r} {_cls(o.class_id)}")
    for w in world.walls:
        lines.append(f"wall = {w.x0!r} {w.y0!r} {w.x1!r} {w.y1!r} {w.height_m!r} {_cls(w.class_id)}")
    for a in world.agents:
        px, py = (float(v) for v in a.position)
        gx, gy = (float(v) for v in a.goal)
        tail = " patrol" if a.home is not None else ""
        lines.append(f"pedestrian = {px!r} {py!r} {gx!r} {gy!r} {float(a.v_des)!r} {float(a.radius)!r}{tail}")
    return "\n".join(lines) + "\n"
