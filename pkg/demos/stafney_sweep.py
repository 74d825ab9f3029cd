# %% [markdown]
# Finite-support representations and how fast they approach the norm.
#
# Pick a random 2-d couple and a vector x, then watch the windowed
# infimum over representations supported on -N..N decrease with N.

# %%
import math
import warnings

import numpy as np

from interplab import JSpaceSpec, PseudolatticeSpec, WindowProblem, stafney_sweep
from interplab.audit import random_couple

warnings.simplefilter("ignore", UserWarning)
rng = np.random.default_rng(2024)
couple = random_couple(rng, 2)
x = rng.normal(size=2) + 1j * rng.normal(size=2)
print(couple)

# %%
windows = [0, 2, 5, 10, 15, 20, 25, 30, 40]
for theta in (0.25, 0.5):
    for p in (1, 2, 16):
        spec = JSpaceSpec.same(PseudolatticeSpec.lp(p), theta=theta)
        sweep = stafney_sweep(WindowProblem(couple, spec, x, 0), windows=windows)
        vals = [rep.value for _, rep in sweep]
        print(f"theta={theta:<5} p={p:<3}", " ".join(f"{v:.6f}" for v in vals))

# %% [markdown]
# For p = 1 nothing is gained by spreading x out, so N = 0 is optimal.
# For large p the optimal representation has a geometric tail on both
# sides, decaying like exp(-theta |n|) on one side and exp(-(1-theta) n)
# on the other; at theta = 0.25 the tail is long and the value at N = 20
# is still a few parts in a thousand above the limit.

# %%
spec = JSpaceSpec.same(PseudolatticeSpec.lp(16), theta=0.25)
rep = stafney_sweep(WindowProblem(couple, spec, x, 0), windows=[40])[0][1]
mass = np.linalg.norm(rep.contributions.window(-40, 40), axis=1)
for n in range(-40, 11, 5):
    print(f"n={n:4d}  |c_n| = {mass[n + 40]:.2e}")
