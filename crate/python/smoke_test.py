"""Smoke test for the siegel_capture_py extension module.

Build and run from the repository root:

    cargo build --release -p siegel-capture-py --features extension-module
    cp target/release/libsiegel_capture_py.so python/siegel_capture_py.so
    python3 python/smoke_test.py
"""

import json
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import siegel_capture_py as sc  # noqa: E402


def check(condition, message):
    if not condition:
        raise SystemExit(f"FAIL: {message}")
    print(f"ok   {message}")


def main():
    theta = sc.RotationNumber("golden")
    check(abs(theta.value - 0.6180339887498949) < 1e-12, f"golden rotation number {theta.value:.12f}")
    check(abs(abs(theta.multiplier) - 1.0) < 1e-12, "multiplier on the unit circle")

    levels = sc.centers(3)
    check([len(level) for level in levels] == [1, 3, 9], "center counts 1 3 9")
    check(abs(levels[0][0] - 3) < 1e-10, "level-1 center at c = 3")

    report = sc.census(2, theta="[0;(2)]")
    check([level["count"] for level in report["levels"]] == [1, 3], "silver-mean census counts")

    cls = sc.classify_parameter_c(3 + 0j)
    check(cls["boundary"]["verdict"] == "on_boundary_one", "c = 3 has 1 on the boundary")
    check(cls["free"] == {"class": "capture", "level": 1}, "free orbit captured at level 1")
    check(cls["in_capture_set"], "c = 3 in the capture set")

    check(sc.capture_level(3 + 0j) == 1, "capture level of c = 3")
    check(abs(sc.param_map_phi(3 + 0j, 1)) < 1e-8, "Φ vanishes at the center")

    lin = sc.linearization(3 + 0j)
    check(lin["residual"] < 1e-8 and lin["terms"] == 256, f"linearization residual {lin['residual']:.1e}")
    boundary = sc.siegel_boundary(3 + 0j, samples=256)
    check(len(boundary) == 256, "256 boundary samples")

    zakeri = sc.trace_zakeri(32)
    check(min(abs(z - 1) for z in zakeri) < 5e-3, "Zakeri curve passes through 1")

    ray = sc.trace_ray(3 + 0j, 1, 0.25)
    check(len(ray["path"]) > 3, "ray path traced")

    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "param.ppm")
        histogram = sc.render("param-c", out, width=8.0, res=24, threads=1)
        total = sum(histogram.values())
        check(total == 24 * 24, f"histogram covers all pixels {histogram}")
        with open(out, "rb") as f:
            check(f.read(13) == b"P6\n24 24\n255\n", "PPM header")
        with open(out + ".json") as f:
            check(json.load(f)["job"]["width"] == 24, "sidecar written")
        dyn = os.path.join(tmp, "dyn.png")
        sc.render("dyn", dyn, width=4.0, res=16, parameter=3 + 0j)
        check(os.path.getsize(dyn) > 0, "dynamical PNG written")

    try:
        sc.RotationNumber("[1;(1)]")
    except ValueError:
        check(True, "invalid rotation number raises ValueError")
    else:
        check(False, "invalid rotation number raises ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
