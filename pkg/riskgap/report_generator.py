"""
Report Generator - Write records as JSON or CSV and render console summaries
"""

from typing import Any, Dict

from riskgap.records import normalize_record, write_csv, write_json


def _fmt(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


class ReportGenerator:
    """Generate reports from a single toolkit record."""

    def __init__(self, record: Dict[str, Any]):
        self.record = normalize_record(record)

    def generate_json(self, output_path: str):
        write_json(self.record, output_path)

    def generate_csv(self, output_path: str):
        write_csv(self.record, output_path)

    def _get_summary(self) -> Dict[str, Any]:
        """Headline fields per record kind."""
        r = self.record
        kind = r["kind"]
        if kind == "cluster_test":
            return {"passed": r["passed"], "k": r["k"], "gamma": r["gamma"]}
        if kind == "manifold_test":
            return {"passed": r["passed"], "cells": len(r["path"]), "path_length": r["path_length"],
                    "gamma_len": r["gamma_len"]}
        if kind == "bound_report":
            summary = {"example": r["example"], "applicable": r["applicable"], "eps_A": r["eps_A"],
                       "alpha_term": r["alpha_term"], "eps_max_Z": r["eps_max_Z"], "eps_min": r["eps_min"],
                       "delta_R_lower": r["delta_R_lower"], "r": r["r"], "vacuous": r["vacuous"]}
            verdict = r.get("verdict")
            if verdict:
                summary.update(upper_holds=verdict["upper_holds"], gap_holds=verdict["gap_holds"])
            return summary
        if kind == "validation_report":
            summary = {"trials": r["trials"], "test_pass_count": r["test_pass_count"],
                       "vacuous_count": r["vacuous_count"],
                       "condition_failures": r.get("condition_failure_count", 0)}
            for name, rate in r["rates"].items():
                summary[name] = f"{rate['count']}/{rate['eligible']} [{rate['low']:.4f}, {rate['high']:.4f}]"
            return summary
        if kind == "selection":
            summary = {"winner": r["winner"], "bound": r["bound"]}
            summary.update({entry["name"]: entry["bound"] for entry in r["bounds"]})
            return summary
        return {"alpha": r["alpha"], "t_star": r["t_star"]}

    def get_summary_text(self) -> str:
        """Generate text summary for console output."""
        lines = [
            "=" * 60,
            f"riskgap {self.record['kind'].replace('_', ' ')}",
            "=" * 60,
        ]
        for key, value in self._get_summary().items():
            lines.append(f"  {key:<24}{_fmt(value)}")
        lines.append("=" * 60)
        return "\n".join(lines) + "\n"
