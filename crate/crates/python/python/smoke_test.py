"""Smoke test for the pymoran extension module.

Run after building, e.g. `maturin develop` in crates/python, or with the
compiled library on PYTHONPATH as pymoran.so.
"""

from fractions import Fraction
import math

import pymoran


def main():
    unit = pymoran.System("cycle: (2,{0,1}) (3,{0,1,2})")
    assert [lvl[2] for lvl in unit.levels(2)] == ["T3", "T2"]
    assert unit.levels(2)[1][5] == ["boundary-ratio"]
    assert unit.tail_radius(2) == Fraction(1, 6)

    atoms = unit.atoms(2)
    assert atoms == [Fraction(k, 6) for k in range(6)]

    lam = unit.spectrum(2)
    assert len(lam) == 6
    assert all(unit.zero_set_contains(a - b, 2) for a in lam for b in lam if a != b)
    assert unit.check_orthogonal(4) == (36 * 35 // 2, 0)
    assert abs(unit.q_sum(4, 0.37) - 1.0) < 1e-10
    assert unit.zero_set_contains("7/1") is not None
    assert unit.zero_set_contains(Fraction(1, 7)) is None

    cert = unit.certify(samples=20)
    assert cert["verdict"] == "INCONCLUSIVE" and cert["exit_code"] == 3

    alternating = pymoran.System.from_levels([], [(9, [0, 1, 2]), (4, [0, 2])])
    cert = alternating.certify(samples=50, seed=5)
    assert cert["verdict"] == "PASS", cert["report"]
    assert cert["seed"] == 5
    assert all(row["violations"] == 0 for row in cert["subsequence"])
    assert alternating.q_partial(4, 0.3, depth=30) <= 1.0 + 1e-9

    overlap = pymoran.System("preamble: (2,{0,1,2}) (2,{0,5,6})\ncycle: (2,{0,3})")
    assert overlap.certify()["verdict"] == "CONDITIONS_FAILED"
    hist = overlap.density(12, bins=256)
    assert hist["verdict"] == "not spectral by uniformity criterion"
    assert abs(hist["total_mass"] - 1.0) < 1e-12
    assert overlap.support_cover(4)[0][0] == 0
    assert overlap.tiling(4)[0] is False

    assert unit.tiling(8) == (True, "tiles by Z: yes (10000 samples, window 1)")
    assert pymoran.tiling_check([(0, Fraction(1, 2)), ("3/2", 2)], 3, 500)[0]

    L, residual, exact = pymoran.hadamard_triple(12, [0, 1, 2, 3])
    assert L == [0, 3, 6, 9] and residual < 1e-12 and exact
    assert not pymoran.is_hadamard(4, [0, 2], [0, 2])
    assert pymoran.classify_level(9, [0, 2])["class"] == "Invalid"
    assert pymoran.normalize_level(-4, [0, -2]) == (4, [2, 0])

    value, points = pymoran.f_min_points()
    assert value == -0.125 and len(points) == 8
    gmin, argmins = pymoran.f_grid_minimum(601)
    assert abs(gmin + 0.125) < 1e-3 and len(argmins) == 8
    assert 0 < pymoran.tail_constant(7) < pymoran.tail_constant(8) < 1
    re, im = pymoran.mask_eval([0, 1], 0.5)
    assert math.hypot(re, im) < 1e-15

    assert set(pymoran.examples()) >= {"unit_interval", "alternating", "nonuniform_overlap"}

    try:
        pymoran.System("cycle: (4,{0,2}")
    except pymoran.MoranError as e:
        assert "line 1" in str(e)
    else:
        raise AssertionError("malformed system accepted")

    print("pymoran smoke test: ok")


if __name__ == "__main__":
    main()
