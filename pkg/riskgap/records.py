"""Shared record shapes for everything the toolkit writes out.

Each record is a plain dict with a ``kind`` field, so JSON and CSV files can
be read back without knowing which command produced them.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd

from riskgap.exceptions import InvalidInputError

RECORD_KINDS = ("cluster_test", "manifold_test", "bound_report", "validation_report", "selection", "alpha")


def _cell(c: Sequence[int]) -> List[int]:
    return [int(v) for v in c]


def build_cluster_record(
    *,
    passed: bool,
    k: int,
    regions: Sequence[Sequence[Sequence[int]]],
    r_a_hat: Optional[float],
    n: int,
    q: int,
    gamma: float,
) -> Dict[str, Any]:
    """Create a cluster-test record; regions are sorted cell lists."""

    return {
        "kind": "cluster_test",
        "passed": bool(passed),
        "k": int(k),
        "regions": [sorted(_cell(c) for c in region) for region in regions],
        "r_a_hat": None if r_a_hat is None else float(r_a_hat),
        "n": int(n),
        "q": int(q),
        "gamma": float(gamma),
    }


def build_manifold_record(
    *,
    passed: bool,
    path: Sequence[Sequence[int]],
    arc_offsets: Sequence[float],
    path_length: float,
    r_a_hat: Optional[float],
    n: int,
    q: int,
    gamma_len: float,
    expansions: int = 0,
) -> Dict[str, Any]:
    """Create a manifold-test record; ``arc_offsets`` runs parallel to ``path``."""

    if len(path) != len(arc_offsets):
        raise InvalidInputError(f"{len(arc_offsets)} arc offsets for a path of {len(path)} cells")
    return {
        "kind": "manifold_test",
        "passed": bool(passed),
        "path": [_cell(c) for c in path],
        "arc_offsets": [float(v) for v in arc_offsets],
        "path_length": float(path_length),
        "r_a_hat": None if r_a_hat is None else float(r_a_hat),
        "n": int(n),
        "q": int(q),
        "gamma_len": float(gamma_len),
        "expansions": int(expansions),
    }


def build_selection_record(*, winner: str, bound: float, bounds: Sequence[Sequence[Any]],
                           hypothesis_learner: str) -> Dict[str, Any]:
    return {
        "kind": "selection",
        "winner": winner,
        "bound": float(bound),
        "hypothesis_learner": hypothesis_learner,
        "bounds": [{"name": name, "bound": float(value)} for name, value in bounds],
    }


def build_alpha_record(*, k: float, delta: float, m_l: int, alpha: float, t_star: float) -> Dict[str, Any]:
    return {"kind": "alpha", "k": float(k), "delta": float(delta), "m_l": int(m_l),
            "alpha": float(alpha), "t_star": float(t_star)}


def cluster_record(result) -> Dict[str, Any]:
    return build_cluster_record(
        passed=result.passed, k=result.k, regions=[sorted(r) for r in result.regions],
        r_a_hat=result.r_a_hat, n=result.grid.n, q=result.grid.q, gamma=result.grid.gamma,
    )


def manifold_record(result) -> Dict[str, Any]:
    return build_manifold_record(
        passed=result.passed, path=result.path,
        arc_offsets=[result.arc_offset[c] for c in result.path],
        path_length=result.path_length, r_a_hat=result.r_a_hat, n=result.grid.n, q=result.grid.q,
        gamma_len=result.gamma_len, expansions=result.expansions,
    )


def model_record(kind: str, model) -> Dict[str, Any]:
    """Record for a pydantic report (BoundReport, ValidationReport)."""
    return {"kind": kind, **model.model_dump()}


def normalize_record(record: Dict[str, Any]) -> Dict[str, Any]:
    """Check an incoming record and return it with keys in canonical (sorted) order."""

    if not isinstance(record, dict):
        raise InvalidInputError("a record must be a mapping")
    kind = record.get("kind")
    if kind not in RECORD_KINDS:
        raise InvalidInputError(f"unknown record kind '{kind}'")
    return {key: record[key] for key in sorted(record)}


def write_json(record: Dict[str, Any], path) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(normalize_record(record), f, indent=2, sort_keys=True)
        f.write("\n")


def read_json(path) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            return normalize_record(json.load(f))
    except json.JSONDecodeError as e:
        raise InvalidInputError(f"{path}: line {e.lineno}: {e.msg}") from e


def write_csv(record: Dict[str, Any], path) -> None:
    """Two columns, ``field,value``; each value is JSON-encoded."""
    record = normalize_record(record)
    frame = pd.DataFrame(
        {"field": list(record), "value": [json.dumps(v, sort_keys=True) for v in record.values()]}
    )
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")


def csv_line_numbers(path) -> Callable[[int], int]:
    """Map a data row (-1 for the header) to its 1-based file line, counting blank lines the reader skips."""
    with open(path, "r") as f:
        lines = [i + 1 for i, text in enumerate(f) if text.strip()]

    def line_of(row: int) -> int:
        return lines[row + 1] if row + 1 < len(lines) else row + 2

    return line_of


def read_csv(path) -> Dict[str, Any]:
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    line_of = csv_line_numbers(path)
    if list(frame.columns) != ["field", "value"]:
        raise InvalidInputError(f"{path}: line {line_of(-1)}: expected header field,value")
    record = {}
    for row, (field, value) in enumerate(zip(frame["field"], frame["value"])):
        try:
            record[field] = json.loads(value)
        except json.JSONDecodeError:
            raise InvalidInputError(f"{path}: line {line_of(row)}: value is not valid JSON") from None
    return normalize_record(record)
