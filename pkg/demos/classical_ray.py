"""The repelled branch follows its classical ray.

In the limiting equation for the minus branch the example1 well acts as a
barrier. Starting at rest at the origin, the packet slides off the barrier.
Its peak follows the solution of Hamilton's equations for that branch.
"""

import numpy as np

from nrlimit.coeffs import example1
from nrlimit.core import make_grid
from nrlimit.harness import cauchy_branches, classical_trajectory

if __name__ == "__main__":
    g = make_grid(-10, 10, 2001, 0, 1.5, 7)
    phi = np.exp(-(g.x**2))
    br = cauchy_branches(example1().frozen(), g, phi, np.zeros(g.nx))
    peak = g.x[np.argmax(np.abs(br.v[-1].data) ** 2, axis=1)]
    path = classical_trajectory(-1, example1(), 0.0, 0.0, (0.0, 1.5))
    ray = np.interp(g.t, path.times, path.positions)
    print("   t    packet peak   classical ray")
    for t, p, r in zip(g.t, peak, ray):
        print(f"{t:5.2f}   {p:10.3f}   {r:12.3f}")
