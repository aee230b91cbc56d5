"""Smoke test for the Python bindings.

Build and install first, e.g. ``maturin build --release -m crates/python/Cargo.toml``
followed by ``pip install`` of the wheel, then run ``python python/smoke_test.py``.
"""

import math

import cavity_entangle_py as ce


def main():
    p = ce.Params.scenario("c", k=1)
    assert p.chi == 0.5 and p.k == 1 and abs(p.alpha_sq - 25.0) < 1e-12
    print(p)

    roots = ce.solve_cubic(0.0, -28.0, 0.0)
    assert all(abs(r - w) < 1e-12 for r, w in zip(roots, [-math.sqrt(28), 0.0, math.sqrt(28)]))

    m = ce.manifold(ce.Params(k=1, deformation="unity"), 0)
    assert abs(m["v1"] - math.sqrt(2)) < 1e-12 and abs(m["v2"] - math.sqrt(12)) < 1e-12

    out = ce.sweep(ce.Params.scenario("a"), t_max=25.0, steps=101)
    assert len(out["gt"]) == 101
    assert max(abs(out[k][0]) for k in ("entropy", "tangle", "concurrence")) < 1e-10
    assert max(out["entropy"]) <= math.log(3) + 1e-9

    subset = ce.sweep(ce.Params.scenario("d", k=2), steps=5, measures=["concurrence"])
    assert subset["entropy"] == [None] * 5

    small = ce.Params.scenario("e", k=2).with_alpha_sq(2.0)
    fid = ce.oracle_fidelity(small, [0.0, 1.0, 2.5, 5.0])
    assert min(fid) >= 1 - 1e-8, fid

    try:
        ce.Params(k=0)
    except ValueError as err:
        assert "k must be" in str(err)
    else:
        raise AssertionError("k = 0 accepted")

    print("mean entropy (a):", sum(out["entropy"]) / len(out["entropy"]))
    print("oracle fidelity (e, k=2):", min(fid))
    print("smoke test passed")


if __name__ == "__main__":
    main()
