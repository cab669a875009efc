"""Smoke test for the extremal Python module.

Build and install the module first, for example:

    pip install maturin
    maturin develop --release -m crates/py/Cargo.toml

then run ``python python/smoke_test.py``.
"""

import math

import extremal


def main():
    tree = extremal.parse_tree("P(e,S(e,P(e,e)))")
    assert str(tree) == "P(e,S(e,P(e,e)))"
    assert tree.edge_count == 4 and tree.rank == 2
    assert tree.weights() == ["1", "1", "3/4", "3/4"]
    assert tree.dual().rank == 2

    assert [str(t) for t in extremal.enumerate(3, 2)] == ["P(e,S(e,e))"]
    assert extremal.count_classes(5, 2) == 2

    inst = extremal.Instance(tree)
    angle, cos, subset = inst.target()
    assert abs(cos - 0.5) < 1e-9, cos
    assert abs(angle - math.acos(0.5)) < 1e-8
    assert inst.check_target()
    assert inst.check_eigen([1, 2])
    report = inst.verify()
    assert report["eigen_ok"] and report["dual_ok"] and report["target_ok"], report

    flipped = extremal.Instance(tree, [True, False, True, False])
    assert extremal.symmetry_equivalent(inst.basis(), flipped.basis(), 1e-9)

    try:
        extremal.parse_tree("P(e,x)")
    except ValueError as e:
        assert "4" in str(e)
    else:
        raise AssertionError("parse error expected")

    out = extremal.accumulate(4, 2, seed=1, attempts=20)
    assert out["outcome"] == "extremal"
    assert len(out["members"]) == 1
    print("smoke test passed")


if __name__ == "__main__":
    main()
