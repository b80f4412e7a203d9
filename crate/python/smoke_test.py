"""Quick end-to-end check of the pynetkit bindings."""

import math

import pynetkit as nk


def main():
    assert "planar_funnel" in nk.cases()

    fid, tau, eps = nk.predict("planar_funnel", {"eps": 0.01, "Rc": 1.0, "area": math.pi})
    assert fid == "PLANAR_FUNNEL_SYMMETRIC", fid
    assert abs(tau - math.pi**2 / (2 * 0.1)) < 1e-9, tau

    _, cap, _ = nk.predict("sphere_cap", {"delta": 0.1})
    exact = 2 * math.log(1 / math.sin(0.05))
    assert abs(cap - exact) < 1e-9, (cap, exact)

    disk = nk.simulate("disk", dt=1e-4, n_paths=2000, seed=3, adaptive=False, workers=1)
    assert abs(disk["mean"] - 0.25) < 0.02, disk

    necks = nk.simulate("planar_multi_neck", {"eps": [0.05, 0.05], "ell": [1.0, 1.0]}, dt=1e-3, n_paths=400)
    assert abs(necks["p0"] + necks["p1"] - 1.0) < 1e-12

    xi, y, asym, drift = nk.solve_bleq(-4.7, -1.0, 1000.0)
    assert len(xi) == len(y) and drift < 1e-6

    assert nk.telegraph_eigen(1.0, 2.0) == 3.0
    ev = nk.network_eigen("0 1 1.0\n1 0 2.0\n")
    assert abs(ev[1] + 3.0) < 1e-12, ev

    w = nk.mobius_map(complex(0.3, 0.1), complex(0.5, 0.0))
    assert isinstance(w, complex)

    try:
        nk.predict("planar_funnel", {"eps": -1.0, "Rc": 1.0, "area": 1.0})
    except ValueError:
        pass
    else:
        raise AssertionError("negative eps accepted")

    print("pynetkit smoke test passed")


if __name__ == "__main__":
    main()
