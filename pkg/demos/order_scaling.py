"""Fit error-scaling exponents from exact simulations.

Each channel-alpha error norm should scale as eps^(d_alpha+1) once eps is
small. For each sequence below a random bath is fixed, the experiment runs
over a geometric epsilon grid, and channel norms are fitted log-log.

The last case is informational: with an odd inner order and a deep outer
layer, the z channel empirically decays two orders faster than the
conservative analytic claim. The package exposes this stronger claim as an
opt-in "numeric-footnote" mode, and the fitted slope here is the numerical
evidence for it.
"""

import numpy as np

from ddbound.qdd_bounds import decoupling_orders
from ddbound.simulator import BathSpec, fit_scaling


def report(n1, n2, bath, eps_grid=None, mode="analytic"):
    fit = fit_scaling(n1, n2, bath, eps_grid=eps_grid)
    d = decoupling_orders(n1, n2, mode)
    print(f"QDD({n1},{n2}), {mode} claimed orders (x:{d.d_x}, y:{d.d_y}, z:{d.d_z}):")
    for ch in ("x", "y", "z"):
        slope = fit.slopes[ch]
        expect = d.for_channel(ch) + 1
        if slope is None:
            print(f"  {ch}: below numerical floor over this window")
        else:
            print(f"  {ch}: fitted {slope:5.2f}, claimed >= {expect}")
    print()


if __name__ == "__main__":
    bath = BathSpec(
        dim=8, seed=97, norms={"0": 1.0, "x": 0.4, "y": 0.4, "z": 0.4}
    )
    report(1, 1, bath)
    report(2, 2, bath)
    # stronger-than-claimed z suppression needs a larger window to resolve
    report(1, 4, bath, eps_grid=np.geomspace(0.02, 0.2, 8))
    report(1, 4, bath, eps_grid=np.geomspace(0.02, 0.2, 8), mode="numeric-footnote")
    report(3, 9, bath, eps_grid=np.geomspace(0.3, 1.5, 8), mode="numeric-footnote")
    print(
        "(3,9) needs a wide window before its z channel clears the floor, so\n"
        "the x and y fits there sag slightly below their asymptotic slopes;\n"
        "the z channel still decays visibly faster than even the footnote claim"
    )
