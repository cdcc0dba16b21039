"""Smoke test for the pyhnpoly extension module.

Build first with `pip install --no-build-isolation -e crates/python`, then run
`python3 python/smoke_test.py`.
"""

import json

import pyhnpoly as hn
from pyhnpoly import Bundle


def main():
    b = Bundle("O(-1) + O(1/2)^3")
    assert str(b) == "O(1/2)^3 + O(-1)"
    assert (b.rank, b.degree) == (7, 2)
    assert b.factors == [(1, 2, 3), (-1, 1, 1)]
    assert b.dual().dual() == b
    assert str(Bundle("O(1/2)") * Bundle("O(1/2)")) == "O(1)^4"
    assert Bundle("O(1)") + Bundle("O(0)") == Bundle.from_factors([(0, 1, 1), (1, 1, 1)])
    assert json.loads(b.to_json())["factors"][0]["mult"] == 3

    assert hn.quotient(Bundle("O(0)^2"), Bundle("O(1)"))[0]
    answer, mu, cond = hn.quotient(Bundle("O(0)^2"), Bundle("O(0)^3"))
    assert not answer and cond is not None and mu is not None
    assert hn.globally_generated(Bundle("O(1)"), 2)
    assert not hn.globally_generated(Bundle("O(1)"), 1)

    e, f, q = Bundle("O(0)^3"), Bundle("O(0)^2"), Bundle("O(0)")
    assert hn.c(e, f, q) == 0
    assert hn.key_inequality(e, f, q) == (0, "iv")

    steps = hn.reduce(Bundle("O(1)^2 + O(-1)^2"), Bundle("O(1)^2"), Bundle("O(1) + O(0)"))
    assert [c for _, _, c in steps] == [1, 0]

    assert "<polyline" in hn.svg([b], "right")
    report = json.loads(hn.verify(1, 1, 1))
    assert all(p["failed"] == 0 for p in report["properties"].values())

    try:
        Bundle("O(1/0)")
    except ValueError as err:
        assert "byte 4" in str(err)
    else:
        raise AssertionError("zero denominator accepted")
    print("pyhnpoly smoke test passed")


if __name__ == "__main__":
    main()
