#!/usr/bin/env python3
"""Smoke test for the gad_py extension module.

Builds nothing itself: run `cargo build --release -p gad-py` (or a debug
build) first. The script locates the produced cdylib, exposes it under the
importable name gad_py, and exercises the main types and operations.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "libgad_py.so",
        REPO / "target" / "debug" / "libgad_py.so",
        REPO / "target" / "release" / "libgad_py.dylib",
        REPO / "target" / "debug" / "libgad_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("no built extension found; run: cargo build --release -p gad-py")
    stage = Path(tempfile.mkdtemp(prefix="gad_py_"))
    shutil.copy(built, stage / "gad_py.so")
    sys.path.insert(0, str(stage))
    import gad_py

    return gad_py


def check(name, condition, detail=""):
    status = "ok" if condition else "FAIL"
    print(f"  {name}: {status} {detail}")
    if not condition:
        sys.exit(1)


def main():
    gad = load_module()
    print("graph fixtures")
    d1 = gad.Graph.from_json(gad.fixture("d1"))
    check("d1 vertex count", len(d1.vertices()) == 16)
    check("d1 is a diamond graph", d1.is_diamond())
    check("d1 rank", d1.diamond_rank() == 5)
    check("d1 ungradable", not d1.is_gradable())
    check("d1 distance", d1.distance("v", "v1,2") == 2)

    d2 = gad.Graph.from_json(gad.fixture("d2"))
    found, obstruction = d2.find_signature_report()
    check("d2 gradable", d2.is_gradable())
    check("d2 has no signature", not found, obstruction)

    ex13 = gad.Graph.from_json(gad.fixture("ex13"))
    h = ex13.homology()
    check("ex13 homology", h == {2: (0, [2])}, str(h))
    check("ex13 mod 2", ex13.homology_mod(2) == {2: 1, 3: 1})
    check("ex13 duality", ex13.cohomology() == {3: (0, [2])})

    print("weights")
    check("omega(2) size", len(gad.omega(2)) == 7)
    check("admissibility", gad.is_admissible([1, 1, 1]) and not gad.is_admissible([0, 0, 3]))
    check("weight formula", gad.weight_of(2, [(0, 2)]) == [1, 1, 1])
    check("reduction", gad.reduction([1, 0, 2, 3]) == ([1], [0], [0, 1, 2]))
    check("rank formula", gad.rank_closed_form([1, 2, 1, 2]) == 2)
    table = gad.weight_table(2)
    check("table covers all matrices", sum(size for _, size, _ in table) == 8)

    component = gad.weight_component(3, [1, 2, 1, 2])
    check("component size", len(component.vertices()) == 4)
    check("component rank", component.diamond_rank() == 2)
    check("component torsion", component.homology() == {2: (0, [2])})
    check("component deformable", component.is_deformable())
    check("component chi", component.characteristic_number() == 2)

    print("round trips")
    again = gad.Graph.from_json(component.to_json())
    check("json round trip", again.homology() == component.homology())
    check("dot export", "graph {" in component.to_dot())

    print("lie algebras")
    count, rank_zero, total = gad.type_a_homology(2)
    check("component count", count == 7)
    check("rank-zero count", rank_zero == 6)
    check("total free part", total == {0: (1, []), 1: (2, []), 2: (2, []), 3: (1, [])})

    constants = {
        "symbols": ["a", "b", "g"],
        "brackets": [{"x": "a", "y": "b", "terms": [{"c": 2, "z": "g"}]}],
    }
    check("jacobi holds", gad.validate_lie_json(json.dumps(constants)) is None)
    ok, violation = gad.diamond_root_system_json(json.dumps(constants))
    check("axioms reject coefficient two", not ok and "axiom 2" in violation, violation)

    print("sweeps")
    check("nonempty iff admissible", gad.an_verify(3, "3.2"))
    check("rank sweep", gad.an_verify(2, "3.5"))

    print("smoke test passed")


if __name__ == "__main__":
    main()
