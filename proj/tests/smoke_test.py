"""Smoke tests for the python bindings."""
import math

import pymlg


def test_catalogs():
    assert len(pymlg.fixture_names()) >= 10
    assert "xi" in pymlg.symbol_names()


def test_classify():
    values = [2.0 ** (2 * j) for j in range(1, 13)]  # eps^-2
    out = pymlg.classify(values)
    assert out["tag"] == "Moderate"
    assert abs(out["exponent"] - 2.0) < 1e-9


def test_apply_multiplier():
    G = 64
    u = [complex(math.cos(5 * 2 * math.pi * m / G), math.sin(5 * 2 * math.pi * m / G))
         for m in range(G)]
    v = pymlg.apply_symbol("xi", G, 1.0, u)
    assert max(abs(v[m] - 5 * u[m]) for m in range(G)) < 1e-9


def test_wavefront_delta():
    entries = pymlg.wavefront("delta", dim=1, G=128, j_max=8)
    singular_cells = {e["cell"] for e in entries if not e["regular"]}
    assert singular_cells, "delta must be singular somewhere"
    assert all(abs(c - 2) <= 1 for c in singular_cells)


def test_compose_terms():
    terms = pymlg.compose("xi", "sin_x", 2)
    assert len(terms) == 2


if __name__ == "__main__":
    test_catalogs()
    test_classify()
    test_apply_multiplier()
    test_wavefront_delta()
    test_compose_terms()
    print("smoke ok")
