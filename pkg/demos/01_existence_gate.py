"""
Where irreducible metrics stop existing
=======================================

Walk along the symmetric family (t, t, t) and watch the monodromy lose its
invariant Hermitian form as L(t) crosses 1.
"""

import numpy as np

from conemetric import Divisor, compute_monodromy, trace_condition_value, unitarize
from conemetric.errors import NotUnitarizable

# L is 1 at t = -2/3 and grows quickly below it
for t in np.linspace(-0.75, -0.55, 9):
    d = Divisor((t, t, t))
    L = trace_condition_value(d)
    try:
        u = unitarize(compute_monodromy(d))
        worst = max(np.max(np.abs(x @ x.conj().T - np.eye(2))) for x in u.U)
        verdict = f"unitary, residual {worst:.1e}"
    except NotUnitarizable as exc:
        verdict = f"no metric ({exc})"
    print(f"t = {t:+.3f}  L = {L:.4f}  {verdict}")
