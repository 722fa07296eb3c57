"""The retarded Green's function against a direct solve.

The free 1D kernel is ``(c/2) J_0(c sqrt(c^2t^2 - x^2))`` inside the
forward light cone and zero outside. Convolving it with a smooth forcing
should reproduce the Klein-Gordon solver's retarded solution.
"""

import numpy as np

from nrlimit.free_kg import greens_1d
from nrlimit.harness import greens_check

if __name__ == "__main__":
    c = 2.0
    t = np.array([0.5, 1.0, 2.0])
    print("kernel on the axis x = 0:", ", ".join(f"{g:.4f}" for g in greens_1d(t, 0.0, c)))
    print("kernel outside the cone (t=1, x=3):", greens_1d(1.0, 3.0, c))
    chk = greens_check(c)
    print(f"relative L2 gap, convolution vs solver: {chk.rel_l2:.4f}")
