"""Export ROC curves for external plotting and compare two rules.

Writes one CSV per rule (threshold,far,frr) into ./roc_out/ and prints
the achievable true-accept rate of each rule at a few false-accept
levels.  Feed the CSVs to any plotting tool.
"""

from pathlib import Path

from choqfuse import (
    FusionRule,
    LambdaMeasure,
    choquet_fuse_batch,
    evaluate_scores,
    rule_fuse_batch,
    synthetic_dataset,
    write_roc_csv,
)

data = synthetic_dataset()
out = Path("roc_out")
out.mkdir(exist_ok=True)

measure = LambdaMeasure((0.411, 0.547, 0.362))
reports = {
    "choquet": evaluate_scores(
        choquet_fuse_batch(data.client_scores, measure),
        choquet_fuse_batch(data.impostor_scores, measure),
    ),
    "mean": evaluate_scores(
        rule_fuse_batch(data.client_scores, FusionRule("mean")),
        rule_fuse_batch(data.impostor_scores, FusionRule("mean")),
    ),
}

for name, report in reports.items():
    path = out / f"roc_{name}.csv"
    write_roc_csv(report, path)
    print(f"wrote {path} ({report.thresholds.size} grid points)")

print()
print("best true-accept rate at capped false-accept levels:")
print(f"{'FAR cap':>8s} {'choquet':>9s} {'mean':>9s}")
for cap in (0.0, 1 / 30, 2 / 30, 0.1, 0.2):
    row = [cap]
    for report in reports.values():
        tpr = 1.0 - report.frr_curve
        row.append(tpr[report.far_curve <= cap + 1e-12].max())
    print(f"{row[0]:8.3f} {row[1]:9.3f} {row[2]:9.3f}")
