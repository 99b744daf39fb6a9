#!/usr/bin/env python3
"""Re-multiply factors written by `mfact factor` and compare with the input.

usage: audit_factors.py KIND INPUT.csv FACTOR_DIR [TOL]
"""
import sys
import numpy as np

kind, input_path, out_dir = sys.argv[1:4]
tol = float(sys.argv[4]) if len(sys.argv) > 4 else 1e-10
load = lambda name: np.loadtxt(f"{out_dir}/{name}.csv", delimiter=",", ndmin=2)
a = np.loadtxt(input_path, delimiter=",", ndmin=2)
if kind == "qr":
    product = load("q") @ load("r")
elif kind == "cholesky":
    product = load("l") @ load("l").T
else:
    product = load("l") @ load("d") @ load("u")
rel = np.linalg.norm(product - a) / max(np.linalg.norm(a), np.finfo(float).tiny)
print(f"{kind}: relative error {rel:.3e} (tol {tol:g})")
sys.exit(0 if rel <= tol else 1)
