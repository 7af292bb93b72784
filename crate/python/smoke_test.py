#!/usr/bin/env python3
"""Smoke test for the emforms_py extension module.

Builds nothing itself: run `cargo build -p emforms-py` (or --release) first,
then execute this script; it locates the cdylib in target/ and imports it.
"""

import json
import math
import os
import shutil
import sys
import tempfile


def locate_module():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = [
        os.path.join(root, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("libemforms_py.so", "emforms_py.so", "libemforms_py.dylib")
    ]
    for cand in candidates:
        if os.path.exists(cand):
            return cand
    sys.exit("build the extension first: cargo build -p emforms-py")


def import_module():
    path = locate_module()
    tmp = tempfile.mkdtemp(prefix="emforms_py_")
    shutil.copy(path, os.path.join(tmp, "emforms_py.so"))
    sys.path.insert(0, tmp)
    import emforms_py

    return emforms_py


def main():
    em = import_module()

    # exterior algebra basics
    dx = em.Covector(3, 1, [1.0, 0.0, 0.0])
    dy = em.Covector(3, 1, [0.0, 1.0, 0.0])
    dxdy = dx.wedge(dy)
    assert dxdy.coeffs == [1.0, 0.0, 0.0]
    assert dxdy.apply([[1, 0, 0], [0, 1, 0]]) == 1.0
    assert dxdy.apply([[1, 0, 0], [1, 0, 0]]) == 0.0
    assert dy.wedge(dx).coeffs == [-1.0, 0.0, 0.0]

    flux = em.mu_contract([0.0, 0.0, 2.0], parity="odd")
    assert flux.parity == "odd"
    assert em.vector_of_two_form(flux) == [0.0, 0.0, 2.0]

    # chain integration: area of the unit square, flux through it
    square = em.chain_unit_square()
    area = em.integrate(["1", "0", "0"], 2, square, depth=0)
    assert abs(area - 1.0) < 1e-12, area
    circulation = em.integrate(["0", "x", "0"], 1, boundary_of_square(em), depth=6)
    assert abs(circulation - 1.0) < 1e-6, circulation

    # scenario reproduces the half-factor law E = (v x B) / 2
    report = json.loads(em.run_scenario("translating_body", b0=3.0, v0=2.0))
    assert report["pass"], report
    assert report["residuals"]["e_field_deviation"] < 1e-6

    report = json.loads(em.run_scenario("sliding_bar", b0=1.0, v0=2.0, length=3.0))
    assert report["pass"], report
    assert math.isclose(report["emf"]["total"], -6.0, abs_tol=1e-9)
    assert math.isclose(report["emf"]["flux_rule"], -6.0, abs_tol=1e-6)

    report = json.loads(em.run_scenario("faraday_disc", b0=1.0, omega=2.0, radius=1.0))
    assert report["pass"], report
    assert math.isclose(sum(report["emf"]["concentrated"]), 1.0, abs_tol=1e-9)

    # custom verification through the spec-file format
    spec = """
[fields]
b = 0, 0, 3
e = 0, -3, 0
f = -1.5*y, 1.5*x, 0

[motion]
type = translation
velocity = 2, 0, 0
"""
    report = json.loads(em.verify_spec(spec))
    assert report["pass"], report
    assert report["residuals"]["e_vs_potentials"] < 1e-6

    print("emforms_py smoke test: all checks passed")


def boundary_of_square(em):
    # the four CCW edges of the unit square as a serialized 1-chain
    return (
        "chain dim=3 degree=1\n"
        "1 + | 0 0 0 | 1 0 0\n"
        "1 + | 1 0 0 | 1 1 0\n"
        "1 + | 1 1 0 | 0 1 0\n"
        "1 + | 0 1 0 | 0 0 0\n"
    )


if __name__ == "__main__":
    main()
