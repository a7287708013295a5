"""Smoke test for the sgqpt_py extension module.

Build and install first:
    pip install maturin
    maturin develop --release -m crates/python/Cargo.toml
then run `python python/smoke_test.py`.
"""

import math

import sgqpt_py as sg


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


def main():
    ident = sg.su2_from_params(0.0, 0.3, 1.1)
    assert close(sg.process_fidelity(ident, sg.Unitary.identity()), 1.0)

    x = sg.su2_from_params(math.pi / 2, math.pi / 2, 0.0)
    rows = x.to_list()
    assert close(abs(rows[0][1] - 1j), 0.0), rows
    assert close(sg.process_fidelity(x, sg.Unitary.pauli("x")), 1.0)

    u = sg.haar_random_su2(7)
    assert close(abs(u.det() - 1), 0.0, 1e-12)
    assert sg.haar_random_su2(7).to_list() == u.to_list()

    q1, h, q2 = sg.decompose_to_waveplates(u)
    assert sg.infidelity(u, sg.waveplate_compose(q1, h, q2)) < 1e-8

    r = sg.bloch_rotation(u)
    for i in range(3):
        for j in range(3):
            dot = sum(r[i][k] * r[j][k] for k in range(3))
            assert close(dot, 1.0 if i == j else 0.0, 1e-12)

    run = sg.run_learning(u, 200, 1000, seed=1)
    assert len(run["infidelity"]) == 200
    assert run["infidelity"][-1] < 0.05, run["infidelity"][-1]
    assert run["shots"][-1] == 2 * 1000 * 200

    qpt = sg.qpt_trial(u, 10_000, seed=1)
    assert 0.0 <= qpt < 0.05, qpt
    try:
        sg.qpt_trial(u, 10, seed=1)
    except ValueError:
        pass
    else:
        raise AssertionError("undersized budget accepted")

    cfg = sg.preset_config("short-run")
    stats = sg.run_ensemble(cfg)
    assert stats["iteration"][-1] == 50
    assert stats["median"][-1] < 0.05
    assert sg.run_ensemble(cfg)["median"] == stats["median"]

    ks = list(range(1, 1001))
    c, beta = sg.fit_power_law(ks, [0.5 / k for k in ks], k_min=10)
    assert close(c, 0.5, 1e-9) and close(beta, -1.0, 1e-9)

    print("smoke test passed: final short-run median %.3e" % stats["median"][-1])


if __name__ == "__main__":
    main()
