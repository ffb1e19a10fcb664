"""Generate the synthetic benchmarks and print their summary statistics.
Vertex connectivity is skipped by default since it dominates the runtime."""

from graphpse.datasets import STATS_COLUMNS, dataset_stats, gen_csl, gen_tri

columns = [c for c in STATS_COLUMNS if c != "vertex_connectivity"]
bundles = {
    "CSL": gen_csl(),
    "TRI": gen_tri(200, 20, seed=0),
    "TRIX": gen_tri(50, 100, seed=0),
}
print("dataset  " + "  ".join(f"{c[:10]:>10}" for c in columns))
for name, b in bundles.items():
    s = dataset_stats(b, columns)
    print(f"{name:<8} " + "  ".join(f"{s[c]:>10.3f}" for c in columns))
