"""Semi-synthetic discovery from a declared Bayesian network.

Parse a bundled network file, draw ancestral samples, then try to
recover the orientation of its skeleton from the samples alone.
"""

import importlib.resources

from entcause import (bn_sample, bn_truth, enumerate_discover, make_rng,
                      read_bif, shd, stable_seed)

path = importlib.resources.files("entcause").joinpath("data", "cancer.bif")
net = read_bif(path)
truth = bn_truth(net)
print("network:", ", ".join(net.names))
print("true edges:",
      sorted((truth.names[a], truth.names[b]) for a, b in truth.edges))

data = bn_sample(net, 20_000, make_rng(stable_seed("demo-bif")))
best, _, _ = enumerate_discover(data, truth.skeleton())
print("recovered edges:",
      sorted((best.names[a], best.names[b]) for a, b in best.edges))
print("SHD against the declared network:", shd(best, truth))
