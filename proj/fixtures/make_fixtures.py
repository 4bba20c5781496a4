#!/usr/bin/env python3
# Copyright 2026 The gleason-csm Authors
# SPDX-License-Identifier: Apache-2.0
"""Regenerate the JSON fixtures in this directory.

Usage: make_fixtures.py [path/to/gleason-csm]
The binary is only needed for the corrupted chain fixture.
"""
import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent


def write(name, obj):
    (HERE / name).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def cplx(z):
    return [float(z.real), float(z.imag)]


def candidate(q, g, excluded=()):
    return {"Q": q, "excluded": sorted(excluded),
            "values": {str(k): g(k / q) for k in range(q + 1) if k not in excluded}}


rng = np.random.default_rng(20260417)

# Born frame function on C^3 with a full-rank density matrix.
a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
rho = a @ a.conj().T
rho /= np.trace(rho).real
write("born_rho.json", {"kind": "born", "field": "C", "rho": [[cplx(z) for z in row] for row in rho]})

# cos^2 to the z pole on R^3.
write("cos2_r3.json", {"kind": "born", "field": "R", "rho": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]})

# M cos^2(u,p) + m cos^2(u,q) + (1-M-m) cos^2(u,r) with p,q,r the standard axes.
write("general_form.json", {"kind": "general", "M": 0.6, "m": 0.1,
                            "axes": [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]})

# cos^4 to the z pole, tabulated on the axes of 100 random frames of R^3.
pts = np.vstack([np.linalg.qr(rng.normal(size=(3, 3)))[0].T for _ in range(100)])
write("quartic_r3.json", {"kind": "tabulated", "dim": 3, "field": "R",
                          "entries": [{"v": p.tolist(), "f": float(p[2] ** 4)} for p in pts]})

# Frame function on R^2 that is not a quadratic form: f(t) + f(t + pi/2) = 1
# holds for every t, but the cos 6t term has no quadratic counterpart.
entries = []
for k in range(36):
    t = k * math.pi / 36
    entries.append({"v": [math.cos(t), math.sin(t)], "f": 0.5 + 0.3 * math.cos(2 * t) + 0.15 * math.cos(6 * t)})
write("qubit_classical_r2.json", {"kind": "tabulated", "dim": 2, "field": "R", "entries": entries})

# Scalar lemma candidates.
write("identity_q60.json", candidate(60, lambda x: x))
write("x_squared_q60.json", candidate(60, lambda x: x * x))
write("sqrt_x_q60.json", candidate(60, math.sqrt))
g0 = candidate(60, lambda x: x)
g0["values"]["0"] = 0.01
write("g0_offset_q60.json", g0)
write("sin_perturbed_q60.json", candidate(60, lambda x: x + 0.001 * math.sin(2 * math.pi * x)))
write("identity_excluded_q42.json", candidate(42, lambda x: x, excluded=(6,)))

# Measurement chain plans.
s = 1 / math.sqrt(2)
z_basis = {"dim": 2, "field": "R", "label": "Z", "vectors": [[1.0, 0.0], [0.0, 1.0]]}
x_basis = {"dim": 2, "field": "R", "label": "X", "vectors": [[s, s], [s, -s]]}
write("chain_qubit_zxz.json", {"field": "R", "dim": 2,
                               "initial": {"vector": [1.0, 0.0], "context": "Z", "sector": 0},
                               "steps": [{"context": x_basis}, {"context": z_basis}]})

b = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
u = np.linalg.qr(rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))[0]
std3 = {"dim": 3, "field": "C", "label": "E", "vectors": [[cplx(z) for z in col] for col in np.eye(3, dtype=complex).T]}
write("chain_qutrit.json", {
    "field": "C", "dim": 3,
    "initial": {"vector": [cplx(z) for z in [1, 0, 0]], "context": "E", "sector": 0},
    "steps": [
        {"context": {"dim": 3, "field": "C", "label": "B", "vectors": [[cplx(z) for z in col] for col in b.T]}},
        {"context": std3, "unitary": [[cplx(z) for z in row] for row in u]},
        {"context": std3},
    ]})

# cos^2 tabulated on the vertices of a descent chain, with the lowest vertex
# raised by 0.05 so the chain is no longer monotone.
if len(sys.argv) > 1:
    out = subprocess.run([sys.argv[1], "piron-demo", "--hu", "0.6", "--hv", "0.5", "--dphi", "90"],
                         check=True, capture_output=True, text=True).stdout
    rows = list(csv.DictReader(io.StringIO(out)))
    ents = []
    for i, r in enumerate(rows):
        v = [float(r["x"]), float(r["y"]), float(r["z"])]
        f = v[2] ** 2 + (0.05 if i == len(rows) - 1 else 0.0)
        ents.append({"v": v, "f": f})
    write("cos2_bumped_chain.json", {"kind": "tabulated", "dim": 3, "field": "R", "entries": ents})
