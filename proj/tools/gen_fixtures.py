#!/usr/bin/env python3
"""Independent reference traces for the bundled scenarios.

Built with numpy/scipy only (dense expm, explicit Fourier matrix), so it
shares no code with the C++ engine. Writes scenarios/expected/<name>.csv with
columns step,t,<observables>.

    python3 tools/gen_fixtures.py [--out scenarios/expected]
"""

import argparse
import pathlib

import numpy as np
from scipy.linalg import expm


def canonical_pair(n, eps, hbar):
    labels = np.arange(-n, n)
    q = np.diag(labels * eps).astype(complex)
    # Column k+n is the momentum eigenvector with momentum k*pi*hbar/(n*eps).
    f = np.exp(1j * np.pi * np.outer(labels, labels) / n) / np.sqrt(2 * n)
    p = f @ np.diag(labels * np.pi * hbar / (n * eps)) @ f.conj().T
    return q, 0.5 * (p + p.conj().T)


def gaussian(n, eps, hbar, centre, width, k):
    x = np.arange(-n, n) * eps
    v = np.exp(-0.5 * ((x - centre) / width) ** 2) * np.exp(1j * k * x / hbar)
    return v / np.linalg.norm(v)


def evolve(h, psi, observables, tau, steps, hbar):
    """Schroedinger evolution psi_{m+1} = U^dagger psi_m with U = exp(i tau H / hbar)."""
    u_dag = expm(1j * tau * h / hbar).conj().T
    rows = []
    for m in range(steps + 1):
        rows.append([m, m * tau] + [np.real(np.vdot(psi, o @ psi)) for o in observables])
        psi = u_dag @ psi
    return rows


def rabi():
    omega, tau, steps = 1.0, 2 * np.pi / 1000, 1000
    # |psi(t)> = cos(wt/2)|0> - i sin(wt/2)|1>, hence <sz> = cos wt, <sy> = -sin wt.
    rows = [[m, m * tau, np.cos(omega * m * tau), -np.sin(omega * m * tau)] for m in range(steps + 1)]
    return ["sz", "sy"], rows


def oscillator():
    n, eps, hbar, m, w = 16, 0.25, 1.0, 1.0, 1.0
    q, p = canonical_pair(n, eps, hbar)
    h = p @ p / (2 * m) + (m * w * w / 2) * q @ q
    psi = gaussian(n, eps, hbar, 1.0, 1.0, 0.0)
    return ["position", "momentum", "energy"], evolve(h, psi, [q, p, h], 1e-3, 500, hbar)


def free_particle():
    n, eps, hbar, m = 16, 0.5, 1.0, 1.0
    q, p = canonical_pair(n, eps, hbar)
    h = p @ p / (2 * m)
    psi = gaussian(n, eps, hbar, -2.0, 1.0, 2.0)
    return ["position", "momentum", "energy"], evolve(h, psi, [q, p, h], 5e-3, 400, hbar)


def temporal_abscissa():
    n, eps, tau, steps = 8, 0.1, 0.1, 20
    # H = P with tau = epsilon shifts the basis by one site per step, so <T>
    # starting from label 0 is the wrapped label m times tau.
    rows = []
    for m in range(steps + 1):
        label = (m + n) % (2 * n) - n
        rows.append([m, m * tau, label * eps])
    return ["time"], rows


def write(path, columns, rows):
    with open(path, "w") as f:
        f.write(",".join(["step", "t"] + columns) + "\n")
        for r in rows:
            f.write(",".join([str(r[0])] + ["%.16e" % v for v in r[1:]]) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "scenarios" / "expected"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, fn in [("rabi", rabi), ("oscillator", oscillator), ("free_particle", free_particle),
                     ("temporal_abscissa", temporal_abscissa)]:
        cols, rows = fn()
        write(out / f"{name}.csv", cols, rows)
        print(f"{name}: {len(rows)} rows")


if __name__ == "__main__":
    main()
