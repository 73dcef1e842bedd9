#!/usr/bin/env python3
"""
Synthetic Collection Builder
Writes feature-file collections for studies and tests

Each dataset is a CSV with one column per code metric plus `label`.
Faulty modules shift every metric by a per-dataset effect size, so some
feature combinations separate the classes well, some barely, and a few
(negative effects) rank modules the wrong way round.
"""

import itertools
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import click
import numpy as np
import yaml

FEATURE_NAMES = ("loc", "wmc", "cbo", "rfc", "lcom")
MIN_PER_CLASS = 3


class SyntheticCollection:
    """Builds a reproducible collection of defect datasets"""

    def __init__(self, output_dir: str = "./synthetic", seed: int = 7,
                 n_datasets: int = 10, features: Sequence[str] = FEATURE_NAMES,
                 min_modules: int = 30, max_modules: int = 60):
        if min_modules < 2 * MIN_PER_CLASS or max_modules < min_modules:
            raise ValueError("module counts must satisfy 6 <= min_modules <= max_modules")
        self.output_dir = Path(output_dir)
        self.rng = np.random.default_rng(seed)
        self.n_datasets = n_datasets
        self.features = tuple(features)
        self.min_modules = min_modules
        self.max_modules = max_modules
        self.written: List[Dict] = []

    def generate_dataset(self):
        """(rows, labels) for one dataset"""
        n = int(self.rng.integers(self.min_modules, self.max_modules + 1))
        prevalence = float(self.rng.uniform(0.15, 0.45))
        n_faulty = int(np.clip(round(n * prevalence), MIN_PER_CLASS, n - MIN_PER_CLASS))
        labels = np.zeros(n, dtype=int)
        labels[self.rng.choice(n, size=n_faulty, replace=False)] = 1

        effects = self.rng.uniform(-0.5, 2.0, size=len(self.features))
        noise = self.rng.normal(0.0, 1.0, size=(n, len(self.features)))
        rows = noise + labels[:, None] * effects[None, :]
        return np.round(rows, 6), labels

    def write_dataset(self, name: str, rows: np.ndarray, labels: np.ndarray) -> Path:
        path = self.output_dir / f"{name}.csv"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(",".join(self.features + ("label",)) + "\n")
            for row, label in zip(rows, labels):
                f.write(",".join(f"{v:.6f}" for v in row) + f",{int(label)}\n")
        return path

    def write_external_scores(self, name: str, labels: np.ndarray, scorer_dir: Path,
                              combination_size: int) -> int:
        """Perfectly separating 0/1 score files, one per feature combination"""
        scorer_dir.mkdir(parents=True, exist_ok=True)
        count = 0
        for combo in itertools.combinations(self.features, combination_size):
            path = scorer_dir / f"{name}__{'+'.join(combo)}.csv"
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write("score,label\n")
                for label in labels:
                    f.write(f"{float(label)!r},{int(label)}\n")
            count += 1
        return count

    def build(self, perfect_scorer_dir: Optional[Path] = None, combination_size: int = 3) -> List[Dict]:
        print(f"Building {self.n_datasets} synthetic dataset(s) in {self.output_dir}")
        print("=" * 70)
        for index in range(1, self.n_datasets + 1):
            name = f"synthetic{index:02d}"
            rows, labels = self.generate_dataset()
            path = self.write_dataset(name, rows, labels)
            entry = {'dataset': name, 'path': str(path), 'n': len(labels), 'faulty': int(labels.sum())}
            if perfect_scorer_dir is not None:
                entry['score_files'] = self.write_external_scores(
                    name, labels, perfect_scorer_dir, combination_size)
            self.written.append(entry)
            print(f"✓ {name}: {entry['n']} modules, {entry['faulty']} faulty")
        return self.written

    def write_study_config(self, path: Path, output_dir: str = "results/study",
                           combination_size: int = 3, perfect_scorer_dir: Optional[Path] = None) -> Path:
        """Study file whose relative paths resolve against its own directory"""
        base = path.parent.resolve()

        def rel(p: Path) -> str:
            p = p.resolve()
            try:
                return str(p.relative_to(base))
            except ValueError:
                return str(p)

        scorers = [{'name': 'blr', 'kind': 'builtin'}]
        if perfect_scorer_dir is not None:
            scorers.append({'name': 'perfect', 'kind': 'external', 'directory': rel(perfect_scorer_dir)})
        study = {
            'datasets': [rel(Path(entry['path'])) for entry in self.written],
            'combination_size': combination_size,
            'scorers': scorers,
            'auc_gap_thresholds': [0.2],
            'output_dir': output_dir,
        }
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            yaml.safe_dump(study, f, sort_keys=False)
        return path

    def print_summary(self):
        total = sum(entry['n'] for entry in self.written)
        faulty = sum(entry['faulty'] for entry in self.written)
        print("\n" + "=" * 70)
        print("Collection Summary:")
        print(f"  Datasets: {len(self.written)}")
        print(f"  Modules: {total}")
        if total:
            print(f"  Faulty: {faulty} ({100.0 * faulty / total:.1f}%)")


@click.command()
@click.argument('output_dir', type=click.Path(file_okay=False), default='./synthetic')
@click.option('--seed', type=int, default=7, show_default=True)
@click.option('--datasets', 'n_datasets', type=click.IntRange(min=1), default=10, show_default=True)
@click.option('--combination-size', type=click.IntRange(1, len(FEATURE_NAMES)), default=3, show_default=True)
@click.option('--perfect-scores', is_flag=True, help='Also write a perfectly separating external scorer')
@click.option('--study-file', type=click.Path(dir_okay=False), help='Write a study configuration here')
def main(output_dir, seed, n_datasets, combination_size, perfect_scores, study_file):
    """Write a synthetic defect-dataset collection to OUTPUT_DIR."""
    collection = SyntheticCollection(output_dir, seed=seed, n_datasets=n_datasets)
    scorer_dir = Path(output_dir) / "perfect_scores" if perfect_scores else None
    collection.build(scorer_dir, combination_size)
    if study_file:
        path = collection.write_study_config(Path(study_file), combination_size=combination_size,
                                             perfect_scorer_dir=scorer_dir)
        print(f"\nStudy configuration saved to: {path}")
    collection.print_summary()


if __name__ == '__main__':
    sys.exit(main())
