"""Wall-clock comparison of the compiled and interpreted DOPRI5 kernels.

Each backend runs in its own interpreter because the switch is read at
import time.  Usage::

    python3 benchmarks/bench_integrator.py [--repeat 3] [--points 4001]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = """
import json, sys, time
import numpy as np
from cavity_eit_gate._accel import backend_name
from cavity_eit_gate.model import GaussianPulse, SystemParams, kappa_from_mhz
from cavity_eit_gate.pulse import integrate

repeat, points = int(sys.argv[1]), int(sys.argv[2])
k = kappa_from_mhz(2.5)
p = SystemParams(g=10.0, kappa_A=1.0, gamma_31=0.6, gamma_32=0.6, omega_C=10.0).scaled(k)
pulse = GaussianPulse.from_fwhm(4.0, 1.0)
t0 = time.perf_counter()
rec = integrate(p, p.omega_C, pulse, n_points=points, analyze=False)
first = time.perf_counter() - t0
times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    rec = integrate(p, p.omega_C, pulse, n_points=points, analyze=False)
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": backend_name(), "first": first, "best": min(times), "steps": rec.steps,
                  "n_out": rec.n_out, "alpha_out": [rec.alpha_out.real.tolist(), rec.alpha_out.imag.tolist()]}))
"""


def run(disable, repeat, points):
    env = dict(os.environ, CAVITY_EIT_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat), str(points)], env=env, check=True, capture_output=True, text=True
    )
    return json.loads(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--points", type=int, default=4001)
    args = ap.parse_args(argv)

    jit = run(False, args.repeat, args.points)
    plain = run(True, args.repeat, args.points)
    diff = max(
        abs(complex(a, b) - complex(c, d))
        for a, b, c, d in zip(*jit["alpha_out"], *plain["alpha_out"])
    )
    print(f"{'backend':<8} {'first call (s)':>15} {'best (s)':>10} {'steps':>7}")
    for r in (jit, plain):
        print(f"{r['backend']:<8} {r['first']:>15.4f} {r['best']:>10.4f} {r['steps']:>7}")
    print(f"speed-up {plain['best'] / jit['best']:.1f}x, max |alpha_out| difference {diff:.2e}")


if __name__ == "__main__":
    main()
