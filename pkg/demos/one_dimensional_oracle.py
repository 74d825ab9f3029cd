# %% [markdown]
# The couple (|.|, M|.|) on the annulus 1 <= |z| <= e.
#
# Any Laurent polynomial f with f(s) = 1, s = e^theta, satisfies
# 1 <= sup_{|z|=1}|f|^(1-theta) sup_{|z|=e}|f|^theta (three circles), so
# the annulus norm of 1 is at least M^theta.  Below, the conic solver and the
# smoothed first-order solver both approach that bound from above.

# %%
import math
import warnings

from interplab import AnnulusSpec, Couple, JSpaceSpec, PseudolatticeSpec, WindowProblem, \
    annulus_norm, stafney_sweep

warnings.simplefilter("ignore", UserWarning)
FC = PseudolatticeSpec("FC")

for M in (2.0, math.e, 10.0):
    c = Couple.scalar(1.0, M)
    for theta in (0.25, 0.5, 0.75):
        sweep = stafney_sweep(WindowProblem(c, JSpaceSpec.same(FC, theta=theta), [1.0], 0),
                              windows=[0, 4, 8, 20])
        conic = sweep[-1][1]
        first = annulus_norm(c, [1.0], AnnulusSpec(theta=theta), 20, starts=("delta",))
        print(f"M={M:6.3f} theta={theta:4}  M^theta={M ** theta:.6f}  "
              f"conic={conic.value:.6f} (lower {conic.lower:.6f})  first-order={first.value:.6f}")

# %% [markdown]
# When log M is an integer k, f(z) = (z/s)^k attains the bound exactly.
# Otherwise z^(log M) is not single valued on the annulus and the
# polynomial optimum stays slightly above M^theta; the excess is well below
# 1e-3 for M in {2, 10}.
