"""
Unit tests for record builders, normalization and the JSON/CSV writers
"""

import pytest

from riskgap.bound_calc import cluster_bounds, compose_bounds
from riskgap.cluster_pipeline import cluster_property_test
from riskgap.exceptions import InvalidInputError
from riskgap.grid import GridSpec
from riskgap.manifold_pipeline import manifold_property_test
from riskgap.records import (
    build_alpha_record,
    build_manifold_record,
    build_selection_record,
    cluster_record,
    manifold_record,
    model_record,
    normalize_record,
    read_csv,
    read_json,
    write_csv,
    write_json,
)
from riskgap.report_generator import ReportGenerator


def test_cluster_record_from_result():
    """Test the cluster-test record shape."""
    g = GridSpec(n=2, q=10)
    record = cluster_record(cluster_property_test(g, [(0.05, 0.05), (0.95, 0.95)]))
    assert record["kind"] == "cluster_test"
    assert record["regions"] == [[[0, 0]], [[9, 9]]]
    assert record["gamma"] == pytest.approx(0.1 / 2 ** 0.5)


def test_manifold_record_from_result():
    """Test that arc offsets run parallel to the path."""
    g = GridSpec(n=2, q=10)
    result = manifold_property_test(g, [(0.15, 0.55), (0.25, 0.55), (0.35, 0.55)], 1.0)
    record = manifold_record(result)
    assert record["path"] == [[1, 5], [2, 5], [3, 5]]
    assert record["arc_offsets"] == pytest.approx([0.0, 0.1, 0.2])
    with pytest.raises(InvalidInputError):
        build_manifold_record(passed=True, path=[(0, 0)], arc_offsets=[], path_length=0.0,
                              r_a_hat=0.0, n=2, q=10, gamma_len=1.0)


def test_normalize_record():
    """Test kind validation and key order."""
    record = normalize_record({"t_star": 0.1, "kind": "alpha", "alpha": 0.2})
    assert list(record) == ["alpha", "kind", "t_star"]
    with pytest.raises(InvalidInputError):
        normalize_record({"kind": "scan"})
    with pytest.raises(InvalidInputError):
        normalize_record([("kind", "alpha")])


def test_json_and_csv_files(tmp_path):
    """Test that a bound report survives both file formats."""
    report = cluster_bounds(n=2, s=0.1, k=2, m_u=100_000, m_l=100, delta=0.05, beta=0.2)
    record = model_record("bound_report", report)
    write_json(record, tmp_path / "r.json")
    write_csv(record, tmp_path / "r.csv")
    assert read_json(tmp_path / "r.json") == normalize_record(record)
    assert read_csv(tmp_path / "r.csv") == read_json(tmp_path / "r.json")
    assert (tmp_path / "r.csv").read_text().splitlines()[0] == "field,value"


def test_read_errors_name_the_line(tmp_path):
    """Test parse errors of record files."""
    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{\n  "kind": "alpha",\n  oops\n}\n')
    with pytest.raises(InvalidInputError, match="line 3"):
        read_json(bad_json)
    bad_csv = tmp_path / "bad.csv"
    bad_csv.write_text('field,value\nkind,"""alpha"""\nalpha,not-json\n')
    with pytest.raises(InvalidInputError, match="line 3"):
        read_csv(bad_csv)
    header = tmp_path / "header.csv"
    header.write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError, match="line 1"):
        read_csv(header)
    spaced = tmp_path / "spaced.csv"
    spaced.write_text('field,value\n\nkind,"""alpha"""\n\nalpha,not-json\n')
    with pytest.raises(InvalidInputError, match="line 5"):
        read_csv(spaced)


def test_report_summary_text():
    """Test the console summary for each kind of record."""
    alpha = ReportGenerator(build_alpha_record(k=10, delta=0.05, m_l=100, alpha=0.29, t_star=0.037))
    text = alpha.get_summary_text()
    assert "riskgap alpha" in text
    assert "0.29" in text

    selection = ReportGenerator(build_selection_record(
        winner="clusters", bound=0.12, bounds=[("identity", 1.0), ("clusters", 0.12)],
        hypothesis_learner="erm_linear",
    ))
    summary = selection._get_summary()
    assert summary["winner"] == "clusters"
    assert summary["identity"] == 1.0


def test_bound_summary_shows_verdict():
    """Test that a bound report with condition verdicts summarizes them."""
    report = cluster_bounds(n=2, s=0.1, k=2, m_u=100_000, m_l=100, delta=0.05, beta=0.2, eps_E=0.4)
    risks = {"R_a_hat": 0.0, "R_B_hat": 0.0, "R_C_hat": 0.0, "R_E_hat": 0.2}
    report = report.model_copy(update={"verdict": compose_bounds(report, risks, 20_000)})
    record = model_record("bound_report", report)
    assert record["verdict"]["upper_holds"] is True
    summary = ReportGenerator(record)._get_summary()
    assert summary["upper_holds"] is True
    assert summary["gap_holds"] is False

    plain = ReportGenerator(model_record("bound_report", cluster_bounds(
        n=2, s=0.1, k=2, m_u=100_000, m_l=100, delta=0.05, beta=0.2)))
    assert "upper_holds" not in plain._get_summary()


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
