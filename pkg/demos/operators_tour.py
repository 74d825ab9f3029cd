# %% [markdown]
# Coefficient-level operators: the null corrector, division by (z - s),
# the differentiation operators and Fejer means.

# %%
import numpy as np

from interplab import FinSeq, LaurentPoly
from interplab.laurent import evaluate, fejer_sum, fejer_tail_bound
from interplab.couple import WeightedLp
from interplab.seqops import diff_op, divide_at_zero, multiply_by_linear, null_corrector

rng = np.random.default_rng(7)
h = FinSeq(-2, rng.normal(size=(5, 2)) + 1j * rng.normal(size=(5, 2)))
s = np.exp(0.4) * np.exp(0.3j)

# %%
r = null_corrector(h, s)
print("sum s^n r_n =", evaluate(r, s))
g = divide_at_zero(multiply_by_linear(h, s), s)
print("division round trip error:", (g - h).mass())

# %%
d = diff_op(0, 0.6, h)
print(f"D_0 kept {len(d.seq)} entries (radius {d.radius}), dropped tail mass {d.dropped:.1e}")

# %% [markdown]
# Fejer means converge uniformly on both boundary circles; the error is
# bounded by sum_n min(1, |n|/(N+1)) r^n ||b_n||.

# %%
space = WeightedLp(2, (1.0, 1.0))
t = np.exp(2j * np.pi * np.arange(512) / 512)
for radius in (1.0, np.e):
    for N in (2, 8, 32, 128):
        err = space.evaluate(fejer_sum(h, N, radius * t) - LaurentPoly(h)(radius * t)).max()
        print(f"r={radius:.3f} N={N:4d} error={err:.3e} bound={fejer_tail_bound(h, N, radius, space):.3e}")
