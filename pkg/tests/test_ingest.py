import pytest

from analyzer.errors import EvaluationError, IngestError
from analyzer.logistic_scorer import FeatureDataset
from conftest import FIXTURES, dataset
from evaluator.ingest import (
    feature_columns,
    ingest,
    read_features,
    read_score_file,
    read_scores,
    write_scores,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_valid_score_file():
    ds = ingest(FIXTURES / "perfect.csv", "scores")
    assert ds.n == 4
    assert ds.ap == 2
    assert ds.name == "perfect"
    assert ds.scores == [0.9, 0.8, 0.2, 0.1]


def test_ids_are_kept_in_file_order():
    _, ids = read_score_file(FIXTURES / "perfect.csv")
    assert ids == ["Parser.java", "Lexer.java", "Util.java", "Main.java"]


def test_bad_label_names_the_line():
    with pytest.raises(IngestError) as info:
        read_scores(FIXTURES / "bad_label.csv")
    assert info.value.line == 3
    assert "label must be 0 or 1" in str(info.value)
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("row, message", [
    ("1.5,1", "outside"),
    ("abc,1", "not a number"),
    ("nan,1", "not finite"),
    (",1", "missing value"),
    ("0.5,1,7", "more cells"),
    ("0.5", "fewer cells"),
])
def test_malformed_score_rows(tmp_path, row, message):
    path = write(tmp_path / "bad.csv", f"score,label\n0.2,0\n{row}\n")
    with pytest.raises(IngestError, match=message) as info:
        read_scores(path)
    assert info.value.line == 3


def test_empty_file(tmp_path):
    with pytest.raises(IngestError, match="empty file"):
        read_scores(write(tmp_path / "empty.csv", ""))
    with pytest.raises(IngestError, match="empty file"):
        read_scores(write(tmp_path / "header_only.csv", "score,label\n"))


def test_missing_columns(tmp_path):
    with pytest.raises(IngestError, match="missing column"):
        read_scores(write(tmp_path / "x.csv", "prob,label\n0.2,1\n"))


def test_missing_file(tmp_path):
    with pytest.raises(IngestError, match="cannot open"):
        read_scores(tmp_path / "nope.csv")


def test_feature_file():
    ds = ingest(FIXTURES / "metrics.csv", "features")
    assert isinstance(ds, FeatureDataset)
    assert ds.feature_names == ("loc", "churn")
    assert ds.n == 12 and ds.ap == 5
    assert feature_columns(FIXTURES / "metrics.csv") == ["loc", "churn"]


def test_feature_subset_and_custom_label(tmp_path):
    path = write(tmp_path / "f.csv", "a,b,faulty\n1,2,0\n3,4,1\n5,6,0\n")
    ds = read_features(path, label_column="faulty", features=["b"])
    assert ds.feature_names == ("b",)
    assert ds.rows.tolist() == [[2.0], [4.0], [6.0]]
    with pytest.raises(IngestError, match="unknown feature"):
        read_features(path, label_column="faulty", features=["c"])
    with pytest.raises(IngestError, match="missing label column"):
        read_features(path)


def test_feature_file_missing_cell_is_rejected(tmp_path):
    path = write(tmp_path / "f.csv", "a,b,label\n1,2,0\n3,,1\n")
    with pytest.raises(IngestError, match="missing value in column 'b'") as info:
        read_features(path, features=["a"])
    assert info.value.line == 3


def test_unknown_format():
    with pytest.raises(EvaluationError, match="unknown ingestion format"):
        ingest(FIXTURES / "perfect.csv", "parquet")


def test_written_scores_read_back(tmp_path):
    ds = dataset([0.1 + 0.2, 2 / 3], [1e-12, 0.0], "roundtrip")
    path = write_scores(ds, tmp_path / "out" / "scores.csv", ids=["a", "b", "c", "d"])
    back, ids = read_score_file(path)
    assert back.scores == ds.scores and back.labels == ds.labels
    assert ids == ["a", "b", "c", "d"]
