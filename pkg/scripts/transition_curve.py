"""Sweep the general value A_T from the weak to the strong regime and write a CSV.

    python3 scripts/transition_curve.py --theta 0.7 --points 101 --out transition.csv
"""

import argparse
import csv
import math
import sys

import numpy as np

from kdtransition import fourier_basis, observable, pure_state, rotated_qubit_basis, sigma_z
from kdtransition.dynamics import transition_sweep
from kdtransition.io import fmt
from kdtransition.pointer import PointerConfig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--theta", type=float, default=0.7, help="postselection angle in units of pi (qubit)")
    ap.add_argument("--points", type=int, default=101)
    ap.add_argument("--qutrit", action="store_true", help="use the unequal-gap qutrit example with a t grid instead")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    if args.qutrit:
        rho, A, F = pure_state([1, 1j, -1]), observable([-1.0, 0.0, 1.0]), fourier_basis(3)
        pts = transition_sweep(rho, A, F, 0, t_grid=np.linspace(0, 5, args.points), pointer=PointerConfig(1.0, 1.0))
    else:
        rho, A, F = pure_state([1, 1]), sigma_z(), rotated_qubit_basis(args.theta * math.pi)
        pts = transition_sweep(rho, A, F, 0, f_grid=np.linspace(1, 0, args.points))

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["F", "t", "re_AT", "im_AT", "abs_AT", "N_t", "max_interp_residual"])
    for p in pts:
        w.writerow([fmt(p.F), fmt(p.t), fmt(p.A_T.real), fmt(p.A_T.imag), fmt(abs(p.A_T)), fmt(p.N_t), fmt(p.max_interp_residual)])
    if args.out:
        fh.close()


if __name__ == "__main__":
    main()
