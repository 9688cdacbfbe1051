"""Oscillator levels against the angular parameter alpha, closed form and oracle.

    python scripts/alpha_sweep.py --out alpha_sweep.png
"""

import argparse
import csv
import sys

import numpy as np

from fvo import oracle, spectra
from fvo.spacetime import QuantumNumbers, SpacetimeParams


def sweep(alphas, j, chi, K, n_levels):
    rows = []
    for alpha in alphas:
        spec = spectra.ScenarioSpec(
            "oscillator", SpacetimeParams(alpha, chi), QuantumNumbers(j=j, K=K, omega=1.0)
        )
        fd = oracle.oscillator_levels(spec, n_levels).eigenvalues
        for n in range(n_levels):
            rows.append((alpha, n, spectra.kgo_energy(spec, n)[0], fd[n]))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--chi", type=float, default=0.0)
    ap.add_argument("--K", type=float, default=0.0)
    ap.add_argument("--levels", type=int, default=3)
    ap.add_argument("--points", type=int, default=15)
    ap.add_argument("--out", default=None, help="png path; needs matplotlib")
    args = ap.parse_args()

    alphas = np.linspace(0.3, 1.0, args.points)
    rows = sweep(alphas, args.j, args.chi, args.K, args.levels)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["alpha", "n", "E_closed", "E_oracle", "rel_err"])
    for alpha, n, e, fd in rows:
        w.writerow([f"{alpha:.4f}", n, f"{e:.12f}", f"{fd:.12f}", f"{abs(fd - e) / e:.2e}"])

    if args.out:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        data = np.array(rows)
        for n in range(args.levels):
            sel = data[:, 1] == n
            ax.plot(data[sel, 0], data[sel, 2], label=f"n={n}")
            ax.plot(data[sel, 0], data[sel, 3], "k.", ms=3)
        ax.set_xlabel(r"$\alpha$")
        ax.set_ylabel(r"$E_+$")
        ax.set_title(f"j={args.j}, chi={args.chi}, K={args.K}; dots: oracle")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
