"""Smoke test for the mcgap_py extension module.

Build and run from the repository root:

    cargo build -p mcgap-python --release --features extension-module
    cp target/release/libmcgap_py.so python/mcgap_py.so
    python3 python/smoke_test.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import mcgap_py as mg


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    p = [[0.7, 0.3], [0.2, 0.8]]
    pi = mg.stationary_distribution(p)
    assert close(pi[0], 0.4) and close(pi[1], 0.6), pi

    x = mg.group_inverse(p)
    # (1 / (p + q)^2) [[p, -p], [-q, q]]
    expected = [[1.2, -1.2], [-0.8, 0.8]]
    assert all(close(x[i][j], expected[i][j]) for i in range(2) for j in range(2)), x

    eig = mg.symmetric_eigenvalues([[2.0, 1.0], [1.0, 2.0]])
    assert close(eig[0], 3.0) and close(eig[1], 1.0), eig

    tau = mg.tail_threshold(100_000, 5, 0.1)
    assert abs(tau - 10.868568451186) < 1e-6, tau

    model = mg.ChainModel.birth_death(2, [0.3], [0.2])
    assert close(model.gap, 0.5) and close(model.kappa(), 1.0)
    assert model.reversible

    path = model.sample_path(100_000, seed=7)
    assert path == model.sample_path(100_000, seed=7)
    est = mg.estimate(path, 0.1)
    assert est.d == 2 and est.n == 100_000
    lo, hi = est.gap_interval
    assert lo <= est.gap_hat <= hi
    assert abs(est.gap_hat - model.gap) <= est.w_hat
    report = est.to_dict()
    assert report["schema_version"] == 1
    assert math.isclose(report["gap_hat"], est.gap_hat, rel_tol=1e-15)

    try:
        mg.estimate([0, 1, 0], 1.5)
    except ValueError as e:
        assert "delta" in str(e).lower()
    else:
        raise AssertionError("delta=1.5 accepted")

    try:
        mg.ChainModel.from_matrix([[0.1, 0.6, 0.3], [0.3, 0.1, 0.6], [0.6, 0.3, 0.1]])
    except ValueError:
        pass
    else:
        raise AssertionError("non-reversible matrix accepted")

    cov = mg.run_coverage(mg.ChainModel.birth_death(2, [0.4], [0.4]), 20_000, 0.1, 20, seed=3)
    assert cov["trials"] == 20
    assert cov["coverage"]["gap"]["fraction"] >= 0.9, cov["coverage"]

    print("mcgap_py smoke test passed:", est)


if __name__ == "__main__":
    main()
