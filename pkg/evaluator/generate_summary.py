#!/usr/bin/env python3
"""
generate_summary.py - recounts study aggregates from the emitted records.

Reads models.csv and pairs.csv from a study output directory and derives
every aggregate again from the raw columns: AUC predicates from the exact
AUC fractions, dominance and superiority from the per-direction flags, AUC
gaps from the two models' exact AUCs. The study harness compares this
recount with its own counts before it writes the report.

    python evaluator/generate_summary.py results/study
"""

import csv
import json
import sys
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Sequence

import click


def _flag(row: Dict, column: str) -> bool:
    return row[column] == "1"


def _read_rows(path: Path) -> List[Dict]:
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return list(csv.DictReader(f))


def recount(models_csv: Path, pairs_csv: Path, gaps: Sequence[float]) -> Dict:
    models = _read_rows(models_csv)
    pairs = _read_rows(pairs_csv)

    auc = {row['model_id']: Fraction(row['auc_exact']) for row in models}
    holds = [row for row in models if _flag(row, 'condition1')]

    def within(rows, predicate):
        return sum(1 for row in rows if predicate(row))

    model_counts = {
        "total_models": len(models),
        "count_auc_gt_half": within(models, lambda r: auc[r['model_id']] > Fraction(1, 2)),
        "count_no_points_below_bisector": within(models, lambda r: _flag(r, 'no_points_below_bisector')),
        "count_strictly_above": within(models, lambda r: _flag(r, 'strictly_above_bisector')),
        "count_auc_ge_08": within(models, lambda r: auc[r['model_id']] >= Fraction(4, 5)),
        "count_condition1_holds": len(holds),
        "condition1_within": {
            "auc_gt_half": within(holds, lambda r: auc[r['model_id']] > Fraction(1, 2)),
            "no_points_below_bisector": within(holds, lambda r: _flag(r, 'no_points_below_bisector')),
            "strictly_above": within(holds, lambda r: _flag(r, 'strictly_above_bisector')),
            "auc_ge_08": within(holds, lambda r: auc[r['model_id']] >= Fraction(4, 5)),
            "strictly_above_and_auc_ge_08": within(
                holds, lambda r: _flag(r, 'strictly_above_bisector') and auc[r['model_id']] >= Fraction(4, 5)),
        },
    }

    def dominated(r):
        return _flag(r, 'a_dominates_b') or _flag(r, 'b_dominates_a')

    def condition2(r):
        return ((_flag(r, 'a_dominates_b') and _flag(r, 'a_superior'))
                or (_flag(r, 'b_dominates_a') and _flag(r, 'b_superior')))

    def gap(r):
        return abs(auc[r['model_a']] - auc[r['model_b']])

    by_gap = []
    for g in gaps:
        bound = Fraction(str(g))
        wide = [r for r in pairs if gap(r) > bound]
        by_gap.append({"gap": g,
                       "dominance_count": within(wide, dominated),
                       "condition2_count": within(wide, condition2)})

    pair_counts = {
        "total_comparisons": len(pairs),
        "dominance_count": within(pairs, dominated),
        "condition2_count": within(pairs, condition2),
        "condition2_without_dominance": within(
            pairs, lambda r: (_flag(r, 'a_superior') or _flag(r, 'b_superior')) and not dominated(r)),
        "by_auc_gap": by_gap,
    }

    models_per_dataset = Counter(row['dataset'] for row in models)
    pairs_per_dataset = Counter(row['dataset'] for row in pairs)
    expected_pairs = {name: d * (d - 1) // 2 for name, d in models_per_dataset.items()}

    return {
        "models": model_counts,
        "pairs": pair_counts,
        "pairs_per_dataset": dict(pairs_per_dataset),
        "expected_pairs_per_dataset": {k: v for k, v in expected_pairs.items() if v},
    }


def _differences(prefix: str, reported, recounted) -> List[str]:
    if isinstance(reported, dict) and isinstance(recounted, dict):
        out = []
        for key in sorted(set(reported) | set(recounted)):
            out.extend(_differences(f"{prefix}.{key}", reported.get(key), recounted.get(key)))
        return out
    if isinstance(reported, list) and isinstance(recounted, list) and len(reported) == len(recounted):
        out = []
        for i, (a, b) in enumerate(zip(reported, recounted)):
            out.extend(_differences(f"{prefix}[{i}]", a, b))
        return out
    if reported != recounted:
        return [f"{prefix}: reported {reported!r}, recount {recounted!r}"]
    return []


def audit_study(report, models_csv: Path, pairs_csv: Path, gaps: Sequence[float]) -> List[str]:
    """Differences between a StudyReport's aggregates and the recount of its records"""
    counted = recount(models_csv, pairs_csv, gaps)
    mismatches = _differences("models", report.model_counts, counted["models"])
    mismatches += _differences("pairs", report.pair_counts, counted["pairs"])
    if counted["pairs_per_dataset"] != counted["expected_pairs_per_dataset"]:
        mismatches.append("pairs per dataset differ from d(d-1)/2")
    return mismatches


@click.command()
@click.argument('study_dir', type=click.Path(exists=True, file_okay=False))
@click.option('--gap', 'gaps', multiple=True, type=float, default=(0.2,), show_default=True,
              help='AUC-gap threshold (repeatable)')
def main(study_dir, gaps):
    """Recount the aggregates of a finished study from its CSV records."""
    study_dir = Path(study_dir)
    counted = recount(study_dir / "models.csv", study_dir / "pairs.csv", list(gaps))

    report_path = study_dir / "study_report.json"
    if report_path.exists():
        report = json.loads(report_path.read_text(encoding="utf-8"))
        mismatches = _differences("models", report["models"], counted["models"])
        mismatches += _differences("pairs", report["pairs"], counted["pairs"])
    else:
        mismatches = []

    click.echo(json.dumps({"models": counted["models"], "pairs": counted["pairs"]},
                          indent=2, ensure_ascii=False))
    click.echo("=" * 70)
    if mismatches:
        click.echo(f"{len(mismatches)} mismatch(es) with {report_path.name}:")
        for line in mismatches:
            click.echo(f"  • {line}")
        sys.exit(1)
    click.echo("Recount matches the reported aggregates.")


if __name__ == '__main__':
    main()
