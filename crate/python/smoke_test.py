"""Smoke test for the manin_toric extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""

import math

import manin_toric as mt


def main():
    p = mt.Polynomial("X1^2+X2^2+X3^2")
    assert p.nvars == 3 and p.degree() == "2" and p.is_elliptic()
    assert p([1.0, 2.0, 3.0]) == 14.0

    conic = mt.Problem.hypersurface([1, 1])
    assert conic.sign_count() == 2 and conic.dimension == 1

    a = mt.analyze(conic)
    assert a["iota"] == "1" and a["rho"] == 1 and a["c"] == ["1/2", "1/2"]

    g = mt.generators(mt.Problem.from_matrix([[1, 1, -2]]))
    assert g["generators"] == [[2, 0, 1], [0, 2, 1]]

    s = mt.sargos_constant(mt.Polynomial("X1^2+X2^2"))
    assert abs(s["value"] - math.pi / 4) < 1e-6

    r = mt.manin_constant(conic, sup_norm=True, prime_cutoff=5000)
    assert abs(r["constant"] - 12 / math.pi**2) < 1e-8

    r = mt.manin_constant(conic, p, prime_cutoff=5000)
    n = mt.count_points(conic, 2000.0, p)
    ratio = n["n"] / (r["constant"] * 2000.0)
    assert 0.95 < ratio < 1.05, ratio

    torus = mt.Problem.projective_torus(1)
    assert mt.count_points(torus, 5.0, sup_norm=True)["n"] == 38

    z = mt.zeta_partial(conic, [1.5], 500.0, 1.0, 1, sup_norm=True)
    assert z["probes"][0]["estimate"] > z["probes"][0]["partial"] * 0.5

    try:
        mt.Polynomial("X1^2 + + X2")
    except mt.ManinError as e:
        assert "7" in str(e)
    else:
        raise AssertionError("parse error not raised")

    print("smoke test ok")


if __name__ == "__main__":
    main()
