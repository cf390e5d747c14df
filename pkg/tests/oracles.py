"""Independent reference implementations used only by the tests."""
import numpy as np
from scipy.optimize import linprog


def transport_lp(v, v_ref, dx, periodic=False):
    """Earth mover's distance between the masses dx*v and dx*v_ref at cell centres.

    Solved as a transport linear program on the positive and negative parts
    of the difference; the periodic cost is the circular distance.
    """
    d = dx * (np.asarray(v, float) - np.asarray(v_ref, float))
    n = d.size
    x = dx * np.arange(n)
    cost = np.abs(x[:, None] - x[None, :])
    if periodic:
        cost = np.minimum(cost, n * dx - cost)
    src = np.clip(d, 0, None)
    dst = np.clip(-d, 0, None)
    a_eq = np.zeros((2 * n, n * n))
    for i in range(n):
        a_eq[i, i * n:(i + 1) * n] = 1.0
        a_eq[n + i, i::n] = 1.0
    res = linprog(cost.ravel(), A_eq=a_eq, b_eq=np.concatenate([src, dst]),
                  bounds=(0, None), method="highs-ds")
    if not res.success:
        raise RuntimeError(res.message)
    return res.fun
