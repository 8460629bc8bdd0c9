"""Operators on Euclidean spaces: orthogonality, strong orthogonality and smoothness.

Run with ``python3 demos/hilbert_and_smoothness.py``.
"""

import numpy as np

from bjortho import OperatorSpec, SpaceSpec, attainment_set, op_bj_direct, op_strong_bj
from bjortho.smoothness import (necessary_smoothness_probe, orthogonal_direction,
                                right_additivity_probe, sufficient_smoothness)
from bjortho.theorems import hilbert_equivalence_probe


def main():
    L2 = SpaceSpec(2, 2)
    I2 = OperatorSpec.identity(L2)
    D = OperatorSpec(np.diag([1.0, -1.0]), L2, L2)

    # The identity attains its norm everywhere; D is orthogonal to it through x = (1, 1)/sqrt(2).
    print("I vs diag(1, -1)")
    print(f"  bj = {op_bj_direct(I2, D).holds}, strong = {op_strong_bj(I2, D).holds}")
    r = hilbert_equivalence_probe(I2, D)
    print(f"  probe: {r.status}, witness = {np.round(r.witness, 6)}, <Tx, Ax> = {r.inner:.1e}")

    # A rank-one split of the identity breaks right additivity, so I is not smooth.
    rep = necessary_smoothness_probe(I2)
    print(f"\nidentity smoothness: {rep.necessary_verdict}")
    j = rep.james_decomposition
    both = op_bj_direct(I2, j["A1"]).holds and op_bj_direct(I2, j["A2"]).holds
    print(f"  I is orthogonal to A1 and to A2: {both}; "
          f"to A1 + A2 = I: {op_bj_direct(I2, j['A1'] + j['A2']).holds}")

    # diag(2, 1) attains its norm only at +-e1 and is smooth.
    T = OperatorSpec(np.diag([2.0, 1.0]), L2, L2)
    att = attainment_set(T)
    print(f"\ndiag(2, 1): attains at a sign pair = {att.is_sign_pair}, "
          f"sufficient smoothness = {sufficient_smoothness(T).sufficient_verdict}")
    A = orthogonal_direction(T, OperatorSpec(np.ones((2, 2)), L2, L2))
    print(f"  projected direction A = {np.round(A.matrix, 4).tolist()}, bj = {op_bj_direct(T, A).holds}")
    add = right_additivity_probe(T, trials=50, seed=1, smooth=True)
    print(f"  right additivity: {add.passes}/{add.trials} random pairs")


if __name__ == "__main__":
    main()
