"""Photon blockade building up with on-site interaction strength.

At zero interaction the driven lattice is a displaced vacuum: g2_cm = 1
exactly, whatever the detuning.  Raising the Kerr shift U detunes the
two-photon manifold away from the drive and the common-mode correlation
falls toward the hard-core plateau.  The sweep runs the zero-flux lattice
at the detuning where the hard-core correlation is deepest.
"""

import argparse

import numpy as np

from photonfqh import run_mode


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="demo_output/interaction_sweep")
    args = ap.parse_args()

    u_list = [0.0, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0, "hardcore"]
    cfg = {
        "nx": 6, "ny": 6, "nphi": 0, "nmax": 2,
        "u": "hardcore",            # sets the basis cap scan baseline
        "kappa": 0.002, "beta": 0.01,
        "delta": -4.0,
        "u_list": u_list,
        "observables": ["n_tot", "g2_cm"],
        "plot": True,
    }
    flagged = run_mode("sweep-interaction", cfg, args.out)
    print(f"run finished, {flagged} flagged rows, results in {args.out}/")

    data = np.genfromtxt(f"{args.out}/results.csv", delimiter=",", names=True,
                         encoding="utf-8")
    print(f"{'U/J':>10s} {'g2_cm':>12s}")
    for u, g2 in zip(data["UJ"], data["g2_cm"]):
        label = "hardcore" if np.isinf(u) else f"{u:10.3g}"
        print(f"{label:>10s} {g2:12.5e}")
    g_hc = data["g2_cm"][-1]
    g_big = data["g2_cm"][-2]
    print("g2_cm falls monotonically from 1 (coherent) onto the hard-core plateau;")
    print(f"at U = 100J the residual distance to the plateau is "
          f"{abs(g_big - g_hc):.1e} ({abs(g_big / g_hc - 1):.1%} of a value that "
          f"is itself only {g_hc:.1e}).")


if __name__ == "__main__":
    main()
