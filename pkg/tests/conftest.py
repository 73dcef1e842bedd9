"""Shared builders and exact oracles for the test suite"""

import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Sequence, Tuple

import pytest

REPO_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(REPO_ROOT))

from analyzer.core_metrics import ScoredDataset  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
GOLDENS = Path(__file__).parent / "goldens"

# dense-grid resolution: scores are k/32, grid points j/GRID
SCORE_DENOMINATOR = 32
GRID = 512


def dataset(positives: Sequence[float], negatives: Sequence[float], name: str = "") -> ScoredDataset:
    scores = list(positives) + list(negatives)
    labels = [True] * len(positives) + [False] * len(negatives)
    return ScoredDataset.from_pairs(scores, labels, name)


def random_dyadic_dataset(rng: random.Random, max_n: int = 12) -> Tuple[ScoredDataset, List[int], List[bool]]:
    """Dataset with scores k/32 and both classes; also returns the raw k values and labels"""
    n = rng.randint(2, max_n)
    labels = [True, False] + [rng.random() < 0.5 for _ in range(n - 2)]
    rng.shuffle(labels)
    ks = [rng.randint(0, SCORE_DENOMINATOR) for _ in range(n)]
    ds = ScoredDataset.from_pairs([k / SCORE_DENOMINATOR for k in ks], labels)
    return ds, ks, labels


def mann_whitney(ds: ScoredDataset) -> Fraction:
    """P(score of a random positive > score of a random negative), ties count 1/2"""
    pos = [i.score for i in ds.items if i.label]
    neg = [i.score for i in ds.items if not i.label]
    wins = 0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 2
            elif p == q:
                wins += 1
    return Fraction(wins, 2 * len(pos) * len(neg))


def grid_rates(ks: Sequence[int], labels: Sequence[bool], j: int) -> Tuple[int, int, int, int]:
    """(TP, AP, FP, AN) at t = j/GRID by direct counting on integers"""
    scale = GRID // SCORE_DENOMINATOR
    tp = sum(1 for k, l in zip(ks, labels) if l and k * scale > j)
    fp = sum(1 for k, l in zip(ks, labels) if not l and k * scale > j)
    ap = sum(1 for l in labels if l)
    return tp, ap, fp, len(labels) - ap


def grid_points():
    return range(1, GRID)


def assert_matches_golden(name: str, document: str):
    """Compare byte for byte against tests/goldens/<name>"""
    path = GOLDENS / name
    if not path.exists():
        pytest.fail(f"golden file {name} is missing from {GOLDENS}")
    assert document == path.read_text(encoding="utf-8")


@pytest.fixture
def separable_pair() -> ScoredDataset:
    return dataset([0.9], [0.1], "pair")


@pytest.fixture
def uniform_half() -> ScoredDataset:
    return dataset([0.5, 0.5], [0.5, 0.5], "uniform")


@pytest.fixture
def perfect() -> ScoredDataset:
    return dataset([1.0, 1.0], [0.0, 0.0], "perfect")


@pytest.fixture
def four_point() -> ScoredDataset:
    return dataset([0.9, 0.8], [0.3, 0.2], "four-point")


@pytest.fixture
def dominant_not_superior() -> Tuple[ScoredDataset, ScoredDataset]:
    """A ranks perfectly with low scores; B ranks worse but keeps TPR=1 at t=0.5"""
    return (dataset([0.4, 0.35], [0.1, 0.05], "A"),
            dataset([0.9, 0.6], [0.7, 0.2], "B"))


@pytest.fixture
def above_bisector_not_better() -> ScoredDataset:
    """AUC 0.875, strictly above the bisector, yet TPR(0.5)=0 < 0.5"""
    return dataset([0.40, 0.30, 0.20, 0.12], [0.25, 0.10, 0.05, 0.02], "low-scores")
