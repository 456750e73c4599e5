"""
Degree-preserving null samples
==============================

The null model keeps every citing paper's out-degree and every source's
in-degree by shuffling the cited end of the edge list. Self-loops and
repeated pairs created by the shuffle are dropped afterwards.
"""

from collections import Counter

import numpy as np

from corecite import CitationNetwork, configuration_sample, null_ensemble, null_indicators, project_coupling
from corecite.community import Partition

net = CitationNetwork.from_edges([
    ("p1", "s1"), ("p2", "s1"), ("p3", "s1"),
    ("p3", "s2"), ("p4", "s2"),
    ("p1", "p4"),
])

sample = configuration_sample(net, seed=42)
print("original:", net.edges)
print("shuffled:", sample.edges, "dropped:", sample.dropped)

# Before simplification the cited endpoints are an exact permutation.
print("in-degrees kept:", Counter(sample.raw_cited.tolist()) == Counter(net.edge_arrays[1].tolist()))

# %%
# How often does the shuffle collide?
# -----------------------------------

drops = np.array([s.dropped for s in null_ensemble(net, 2000, master_seed=7)])
print(f"mean dropped edges per sample: {drops.mean():.3f}")

# %%
# Expected within-community pairs of a source
# -------------------------------------------
#
# With the partition {p1, p2} | {p3, p4}, s1's three citers form one
# within pair (p1, p2) and two between pairs. The null says what a source
# of the same in-degree would see by chance.

coupling = project_coupling(net)
part = Partition.from_labels(coupling, {"p1": 0, "p2": 0, "p3": 1, "p4": 1})
null = null_indicators(net, "s1", part, sample_count=5000, master_seed=1)
print(f"observed within share 1/3, null within share {null.chi / (null.chi + null.phi):.3f}")
