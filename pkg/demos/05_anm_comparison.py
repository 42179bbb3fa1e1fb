"""Entropy scoring versus mode regression on additive-noise chains.

Data comes from X_i = (f(parent) + N) mod n with uniform noise on
{-1, 0, 1}. The mode-regression baseline assumes exactly this shape yet
the uniform noise window leaves its fitted mode unidentified, while the
coupling score needs no additive structure at all.
"""

import numpy as np

from entcause import (anm_baseline, anm_scm, enumerate_discover, line_graph,
                      make_rng, sample, shd, stable_seed)

truth = line_graph(4)
skeleton = truth.skeleton()

for n_samples in (100, 1000, 10_000):
    enum_shd, base_shd = [], []
    for rep in range(10):
        rng = make_rng(stable_seed("demo-anm", n_samples, rep))
        scm = anm_scm(truth, 10, 1, rng)
        data = sample(scm, n_samples, rng)
        best, _, _ = enumerate_discover(data, skeleton)
        enum_shd.append(shd(best, truth))
        base_shd.append(shd(anm_baseline(data, skeleton), truth))
    print(f"n={n_samples:6d}  enumeration mean SHD {np.mean(enum_shd):.2f}"
          f"  mode-regression mean SHD {np.mean(base_shd):.2f}")
