"""Smoke test for the riffle extension module.

Build and install first, e.g. `pip install ./crates/py` or
`maturin develop -m crates/py/Cargo.toml`, then run `python python/smoke_test.py`.
"""

from fractions import Fraction
import json
import math

import riffle


def main():
    w = riffle.Permutation([2, 3, 6, 4, 1, 5])
    assert w.inverse().compose(w) == riffle.Permutation.identity(6)
    assert w.ides() == w.inverse().descent_set()
    assert riffle.lyndon_factorization([2, 3, 6, 4, 1, 5]) == [[2, 3, 6, 4], [1, 5]]
    assert riffle.Permutation.reversal(4).sign() == 1

    law = riffle.exact_law(3, "1/2", exact=True)
    assert [p for _, p in law] == [Fraction(1, 2)] + [Fraction(1, 8)] * 4 + [Fraction(0)]
    assert riffle.exact_prob([1, 2], Fraction(3, 10), exact=True) == Fraction(79, 100)

    assert riffle.separation(2, 0.3, 1, exact=True) == Fraction(29, 50)
    assert riffle.linf(3, "1/2", 1, exact=True) == 2
    assert riffle.total_variation(3, "1/2", 1, exact=True) == Fraction(1, 3)
    sep52 = riffle.separation(52, 0.5, 10)
    assert 0.7 < sep52 < 0.75, sep52
    assert sep52 <= riffle.birthday_bound(52, 0.5, 10)

    spec = riffle.spectrum(3, "1/2", exact=True)
    assert sum(m for _, _, m in spec) == 6
    assert sum(e * m for _, e, m in spec) == 3

    tail = riffle.sst_tail(2, 0.5, 6, 100_000, 1)
    assert abs(tail["tail"][3] - 0.125) < 0.01

    assert abs(riffle.big_m(52, 0.5, 15) - 0.082651) < 1e-5
    est = riffle.ell_approx(52, 0.5, 15)
    assert est["valid"]
    assert riffle.cutoff_k(52, 0.5, 0.0) == 10
    fixed = riffle.regime_prediction("fixed", 0.0)
    assert math.isclose(fixed["sep"], 1 - math.exp(-1))
    try:
        riffle.big_m(52, 0.5, 1)
    except riffle.DivergenceError:
        pass
    else:
        raise AssertionError("expected DivergenceError")
    try:
        riffle.separation(70, 0.5, 3)
    except riffle.CapacityError:
        pass
    else:
        raise AssertionError("expected CapacityError")

    out = riffle.run("simulate", n=3, theta="0.5", k=[1], trials=1000, seed=4, format="json")
    assert out == riffle.run("simulate", n=3, theta="0.5", k=[1], trials=1000, seed=4, format="json")
    doc = json.loads(out)
    assert doc["meta"]["config"]["seed"] == 4
    assert len(riffle.sample(8, 0.5, k=3, seed=2)) == 8

    print("riffle", riffle.__version__, "smoke test passed")


if __name__ == "__main__":
    main()
