#!/usr/bin/env python3
"""Smoke test for the c2count_py extension module.

Build the module first, then run this script from anywhere:

    cargo build -p c2count-py
    python3 python/smoke.py

The script locates the built cdylib under target/, exposes it under the
importable name, and exercises every exported function.
"""

import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / profile / f"libc2count_py{ext}"
        for profile in ("release", "debug")
        for ext in (".so", ".dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p c2count-py")
    staging = Path(tempfile.mkdtemp(prefix="c2count_py_"))
    shutil.copy2(built, staging / "c2count_py.so")
    sys.path.insert(0, str(staging))
    import c2count_py

    return c2count_py


def main():
    m = load_module()

    # the documented headline example: essential DAGs on 4 nodes, indegree
    # at most 3
    assert (
        m.count("forall x forall y. true", ["R/2"], 4, essential="R", max_indegree=3)
        == "59"
    )

    # census entry points agree with the table grid
    grid = m.table(6, 5)
    assert grid[5][5] == "306117"
    assert m.essential_total(5) == "2616"
    assert m.essential_bounded(5, 2) == "1511"
    assert m.essential_by_indegree([3, 0, 1]) == "12"

    # engine and oracle agree on a quantified sentence
    formula = "forall x exists y. R(x,y)"
    assert m.count(formula, ["R/2"], 3) == m.oracle(formula, ["R/2"], 3) == "343"

    # rational weights survive the round trip exactly
    got = m.count(
        "forall x forall y. true", ["R/2"], 2, weights={"R": ("1/2", "1")}
    )
    assert Fraction(got) == Fraction(3, 2) ** 4, got

    # cardinality constraints
    assert (
        m.count("forall x forall y. true", ["U/1", "R/2"], 3, ccs=["U=1"]) == "1536"
    )

    # user errors surface as ValueError
    for bad in (
        lambda: m.count("forall x. (", ["R/2"], 2),
        lambda: m.count("forall x forall y. Q(x,y)", ["R/2"], 2),
        lambda: m.count("forall x forall y. true", ["R/2"], 2, essential="R"),
        lambda: m.essential_by_indegree([]),
    ):
        try:
            bad()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke: all checks passed")


if __name__ == "__main__":
    main()
