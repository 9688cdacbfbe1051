"""Allowed frequencies of the oscillator plus Coulomb problem, checked by the oracle.

For each truncation order n the root finder returns every omega at which the
Heun series terminates; the oracle is then run at that omega on both energy
branches.
"""

import argparse
from dataclasses import replace

from fvo import oracle, spectra
from fvo.spacetime import QuantumNumbers, SpacetimeParams


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=0.2)
    ap.add_argument("--j", type=int, default=1)
    ap.add_argument("--alpha", type=float, default=1.0)
    ap.add_argument("--chi", type=float, default=0.0)
    ap.add_argument("--K", type=float, default=0.0)
    ap.add_argument("--n-max", type=int, default=4)
    args = ap.parse_args()

    spec = spectra.ScenarioSpec(
        "oscillator_coulomb",
        SpacetimeParams(args.alpha, args.chi),
        QuantumNumbers(j=args.j, K=args.K, omega=1.0, lam=args.lam),
    )
    print(f"{'n':>2} {'omega':>14} {'E':>14} {'oracle E+':>14} {'oracle E-':>14} {'nodes+':>6} {'nodes-':>6}")
    for n in range(1, args.n_max + 1):
        for level in spectra.fvo_coulomb_quantization(spec, n):
            at = replace(spec, qn=replace(spec.qn, omega=level.omega_used))
            out = []
            for branch in (1, -1):
                k = spectra.heun_node_count(level, branch)
                out.append((oracle.nonlinear_eigensolve(at, k, branch=branch).eigenvalues[0], k))
            print(
                f"{n:2d} {level.omega_used:14.10f} {level.E_plus:14.10f} "
                f"{out[0][0]:14.10f} {out[1][0]:14.10f} {out[0][1]:6d} {out[1][1]:6d}"
            )


if __name__ == "__main__":
    main()
