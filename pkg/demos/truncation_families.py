"""Diagonal operator families: orthogonality holds only in the limit.

At every finite truncation N the pencil ``T_N + lam A_N`` has a norm
below ``||T_N||`` for some lam, but the gap (the truncation defect) tends
to zero.  The witness sequence then shows ``||A x_n||`` shrinking.

Run with ``python3 demos/truncation_families.py``.
"""

from bjortho import OperatorSpec, truncation_defect
from bjortho.theorems import witness_general


def main():
    for fam in ("example23", "example25"):
        print(f"{fam}: N, ||T_N||, min pencil norm, defect")
        for N in (10, 100, 1000, 10_000):
            d = truncation_defect(OperatorSpec.family(fam + "_T", N),
                                  OperatorSpec.family(fam + "_A", N))
            print(f"  {N:>6}  {d.norm_T:.6f}  {d.min_value:.6f}  {d.delta:.3e}")
        g = witness_general(OperatorSpec.family(fam + "_T", 50),
                            OperatorSpec.family(fam + "_A", 50), n_max=50)
        print(f"  witness: condition (a) detected = {g.condition_a}, "
              f"inf ||A x_n|| over 50 steps = {g.trace[-1]:.3e}\n")


if __name__ == "__main__":
    main()
