"""Smoke test for the bishape extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`.
"""

import tempfile

import bishape


def main():
    pair = bishape.Diagram([4], [(1, 3), (2, 4)])
    genus, r, cycles = pair.boundary()
    assert (genus, r) == (1, 1), (genus, r)
    assert sum(len(c) for c in cycles) == 4
    assert bishape.Diagram.parse("4\n1-3 2-4") == pair
    assert bishape.Diagram.from_code(pair.code()) == pair

    stem = bishape.Diagram([8], [(1, 8), (2, 7), (3, 5), (4, 6)])
    projected, empty = stem.project()
    assert not empty and projected.is_shape()
    assert projected.genus() == stem.genus() == 1

    a = bishape.Diagram([8], [(1, 8), (2, 4), (3, 6), (5, 7)])
    assert a.shape_class() == "A"
    b = bishape.theta(a)
    assert b.arcs == [(1, 6), (2, 4), (3, 5)]
    assert bishape.theta_inv(b).code() == a.code()
    q = bishape.eta_inv(a)
    assert q.lengths == [3, 3]
    assert bishape.eta(q).code() == a.code()
    assert q.loops()["multi"] + 1 == a.loops()["multi"]

    assert bishape.kappa(5, 5) == 117123756750
    assert bishape.shape_poly(2, 1)[5:] == [21, 167, 479, 645, 416, 104]
    assert sum(bishape.shape_poly(1, 2)) == 3696
    assert bishape.w_series(0, 6)[3:] == [1, 8, 48, 256]

    shapes = bishape.enumerate_shapes(1, 1)
    assert [s.arcs for s in shapes][0] == [(1, 6), (2, 4), (3, 5)]
    assert len(shapes) == 4
    assert bishape.count_fiber(bishape.enumerate_shapes(2, 0)[0], 2) == 7

    try:
        bishape.Diagram([3], [(1, 1)])
    except ValueError:
        pass
    else:
        raise AssertionError("self-pairing accepted")
    try:
        bishape.enumerate_shapes(1, 4)
    except bishape.InfeasibleError:
        pass
    else:
        raise AssertionError("genus 4 enumeration accepted")

    with tempfile.TemporaryDirectory() as cache:
        first = bishape.Sampler(0, seed=7, cache_dir=cache)
        second = bishape.Sampler(0, seed=7, cache_dir=cache)
        draws = first.sample_many(200)
        assert draws == second.sample_many(200)
        assert {d.code() for d in draws} == {s.code() for s in bishape.enumerate_shapes(2, 0)}
        assert all(d.is_connected() and d.genus() == 0 for d in draws)
        assert first.accepted == 200

    print("ok")


if __name__ == "__main__":
    main()
