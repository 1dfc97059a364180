"""Smoke test for the cvstab_py extension.

Build and install it first:  pip install --no-build-isolation -e crates/cvstab-py
"""

import json

import cvstab_py as cv


def main():
    # tableau basics: F on a qubit |0> gives a uniform Z outcome
    t = cv.Tableau.zero(1, 2)
    t.fourier(0)
    assert t.z_support(0) == (0, 1)
    outcome, prob = t.measure_z(0, seed=3)
    assert outcome in (0, 1) and prob == "1/2"

    # encoded |0> of a qubit in d=18 goes to encoded |+> under F
    zero = cv.encode_basis_state(2, 3, 0)
    zero.fourier(0)
    plus = cv.encode_basis_state(2, 3, 1)
    assert not zero.states_equal(plus)
    assert zero.z_support(0) == (0, 3)

    # half-lattice displacement resolves to d2 = 8 with outcomes 1 and 5
    c = cv.compile("code gkp d1=2\ndispq 0 1/2\nhomodyne 0\n")
    assert c.d2 == 8
    strong = c.run_strong()
    assert [(o, p) for o, p, _ in strong] == [([1], "1/2"), ([5], "1/2")]
    pairs, aborted = c.run_weak(2000, seed=1)
    counts = {tuple(o): n for o, n in pairs}
    assert aborted == 0 and set(counts) == {(1,), (5,)}
    assert abs(counts[(1,)] - 1000) < 3 * (2000 * 0.25) ** 0.5
    report = json.loads(c.verify())
    assert report["verify"]["passed"]
    assert json.loads(c.report())["schema"] == "cvstab-report/1"

    # rotation-symmetric code with a teleported Fourier gate
    r = cv.compile("code rsb d1=2 N=1 primitive=coherent:6\ninput 0 1\ntfourier 0\nphasemeas 0\n")
    assert [p for _, p, _ in r.run_strong()] == ["1/2", "1/2"]

    try:
        cv.compile("code gkp d1=2\ntgate 0\n")
    except cv.CircuitRejected as e:
        assert "tgate 0" in str(e)
    else:
        raise AssertionError("tgate was accepted")

    try:
        cv.compile("code gkp d1=2\ndispq 0 1/0\n")
    except ValueError as e:
        assert "line 2" in str(e)
    else:
        raise AssertionError("1/0 was accepted")

    min_w, volume, log_neg = cv.wigner_negativity("code gkp d1=2\n", delta=0.3)
    assert min_w < 0 and volume > 0 and log_neg > 0

    print("cvstab_py smoke test passed")


if __name__ == "__main__":
    main()
