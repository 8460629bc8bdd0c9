"""Vector orthogonality in l_p^2 for a few exponents.

Run with ``python3 demos/vectors_tour.py``.
"""

import numpy as np

from bjortho import (INF, SpaceSpec, is_bj_orthogonal, is_strongly_bj_orthogonal,
                     minimal_eps_minus, minimal_eps_plus, norm_derivative_minus,
                     norm_derivative_plus)


def main():
    x, y = np.array([1.0, 1.0]), np.array([1.0, -1.0])
    print("x = (1, 1), y = (1, -1)")
    for p in (1.0, 1.5, 2.0, 3.0, INF):
        S = SpaceSpec(p, 2)
        bj = is_bj_orthogonal(S, x, y)
        strong = is_strongly_bj_orthogonal(S, x, y)
        print(f"  p={p:<4} bj={bj.holds!s:<5} strong={strong.holds!s:<5} "
              f"D+={norm_derivative_plus(S, x, y):+.4f} D-={norm_derivative_minus(S, x, y):+.4f}")

    # On the l_inf square a corner point is not smooth, so many directions qualify.
    S = SpaceSpec(INF, 2)
    print("\nl_inf, x = (1, 1): which unit directions y are orthogonal?")
    for theta in np.linspace(0, np.pi, 9)[:-1]:
        y = np.array([np.cos(theta), np.sin(theta)])
        print(f"  theta={theta:.3f} holds={is_bj_orthogonal(S, (1, 1), y).holds}")

    # Approximate orthogonality: the smallest eps for which x lies in each eps-part.
    S = SpaceSpec(3, 2)
    x, y = np.array([1.0, 0.2]), np.array([0.3, 1.0])
    print(f"\nl_3, x = {x}, y = {y}: eps+ = {minimal_eps_plus(S, x, y):.4f}, "
          f"eps- = {minimal_eps_minus(S, x, y):.4f}")


if __name__ == "__main__":
    main()
