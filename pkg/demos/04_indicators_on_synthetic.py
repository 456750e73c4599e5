"""
Local and global action of planted core sources
===============================================

A synthetic network has four fields and five planted sources: two cited
only inside one field, one cited evenly by all fields and two that split
their citers between two fields. The within indicator separates local from
global action and the bridging indicator singles out the pair bridges.
"""

from corecite import (
    SynthSpec,
    ensemble_indicators,
    generate,
    indicator_correlations,
    indicator_summary,
    partition_ensemble,
    project_coupling,
    select_core,
    top_k,
)

res = generate(SynthSpec(seed=11))
net = res.network
coupling = project_coupling(net)
ensemble = partition_ensemble(coupling, count=10, master_seed=11)

# With only about 800 cited sources the default 0.995 quantile keeps five of
# them, so a wider core makes the rankings more informative.
core = select_core(net, 0.95)
records = ensemble_indicators(net, coupling, core, ensemble, sample_count=100, master_seed=11)
print(f"{len(core)} core sources, threshold {core.threshold}")

print(f"{'source':28s} {'within':>8s} {'topical':>8s} {'bridging':>8s} {'a*':>8s}")
for r in sorted(records, key=lambda r: r.source):
    if r.source in res.roles:
        cells = [f"{v:8.3f}" if v is not None else "       -" for v in (r.within, r.topicality, r.bridging, r.a_star)]
        print(f"{r.source:28s} {' '.join(cells)}")

# %%
# Rankings and summaries
# ----------------------

for name in ("within", "between", "bridging"):
    print(name, [r.source for r in top_k(records, name, 3)])

summary = indicator_summary(records, ensemble.mean_modularity)
for name, stats in summary["indicators"].items():
    print(f"{name:10s} mean {stats['mean']:+.3f} median {stats['median']:+.3f} (n={stats['n']})")

corr = indicator_correlations(records)
print("pearson within/in-degree:", round(corr.get("within", "in_degree"), 3))
