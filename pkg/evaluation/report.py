"""
Verification Report Generator.
Creates human-readable and structured reports from verification results.
"""

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Tuple

sys.path.insert(0, str(Path(__file__).parent.parent))

from evaluation.metrics import CONSISTENCY, REFERENCE


class ReportGenerator:
    """
    Generates verification reports as text or JSON.

    Output carries no timestamps, so identical runs give identical reports.
    """

    def __init__(self, results: Dict[str, Any]):
        """
        Initialize the report generator.

        Args:
            results: Verification results dictionary from VerificationRunner
        """
        self.results = results

    @property
    def checks(self) -> list:
        return list(self.results.get("checks", []))

    def check_records(self) -> List[Dict[str, Any]]:
        """Checks as {name, pass, detail} in run order."""
        return [c.to_record() for c in self.checks]

    def generate_text_report(self) -> str:
        """
        Generate a human-readable text report.

        Returns:
            Formatted text report
        """
        lines = []
        lines.append("=" * 70)
        lines.append("VERIFICATION REPORT")
        lines.append("=" * 70)
        summary = self.results.get("summary", {})
        for kind in (CONSISTENCY, REFERENCE):
            counts = summary.get(kind, {})
            if counts.get("total"):
                lines.append(f"{kind.capitalize()} checks: {counts['passed']}/{counts['total']} passed")
        lines.append("")

        for kind, title in ((CONSISTENCY, "CONSISTENCY CHECKS"), (REFERENCE, "REFERENCE CHECKS (informational)")):
            subset = [c for c in self.checks if c.kind == kind]
            if not subset:
                continue
            lines.append(title)
            lines.append("-" * 70)
            for check in subset:
                mark = "PASS" if check.passed else "FAIL"
                lines.append(f"[{mark}] {check.name}: {check.detail}")
            lines.append("")

        localization = self.results.get("localization", [])
        if localization:
            lines.append("CROSS-TERM LOCALIZATION")
            lines.append("-" * 70)
            for entry in localization:
                lines.append(
                    f"d={entry['d']} q={entry['q']} xi={entry['xi']}: "
                    f"published − oracle = {entry['gap']:+.6f}, "
                    f"cross-term prediction = {entry['predicted_gap']:+.6f}, "
                    f"gap with cross term removed = {entry['gap_without_cross_term']:+.1e}"
                )
            lines.append("")

        rational = self.results.get("rational_forms", [])
        if rational:
            lines.append("RATIONAL FILTERED VALUES")
            lines.append("-" * 70)
            for entry in rational:
                lines.append(f"d={entry['d']}: max deviation {entry['max_deviation']:.3e} over {entry['cells']} cells")
            lines.append("")

        lines.append("FINDINGS")
        lines.append("-" * 70)
        findings = self._generate_findings()
        if findings:
            for i, finding in enumerate(findings, 1):
                lines.append(f"{i}. {finding}")
        else:
            lines.append("Every check passed.")

        lines.append("")
        lines.append("=" * 70)

        return "\n".join(lines)

    def generate_json_report(self, output_path: str = None) -> str:
        """
        Generate a JSON report.

        Args:
            output_path: Optional path to save JSON file

        Returns:
            JSON string representation
        """
        report_data = {
            "configuration": self.results.get("configuration", {}),
            "summary": self.results.get("summary", {}),
            "checks": self.check_records(),
            "localization": self.results.get("localization", []),
            "rational_forms": self.results.get("rational_forms", []),
        }

        json_str = json.dumps(report_data, indent=2, default=str)

        if output_path:
            output_file = Path(output_path)
            output_file.parent.mkdir(parents=True, exist_ok=True)
            with open(output_file, "w", encoding="utf-8", newline="\n") as f:
                f.write(json_str + "\n")

        return json_str

    def _generate_findings(self) -> List[str]:
        """Failed consistency checks, reference misses and the cross-term gap."""
        findings = []
        for check in self.checks:
            if check.passed:
                continue
            if check.kind == CONSISTENCY:
                findings.append(f"Consistency check '{check.name}' failed: {check.detail}.")
            else:
                findings.append(f"Published value not reproduced for '{check.name}': {check.detail}.")

        gaps = [e for e in self.results.get("localization", []) if abs(e["gap"]) > 1e-8]
        if gaps:
            worst = max(gaps, key=lambda e: abs(e["gap"]))
            findings.append(
                f"The published closed form differs from the density matrix by up to {abs(worst['gap']):.4f} "
                f"(d={worst['d']}); the difference is carried by the pure/noise cross term alone."
            )
        return findings

    def save_report(self, output_dir: str = "verification_reports") -> Tuple[str, str]:
        """
        Save both text and JSON reports to files.

        Args:
            output_dir: Directory to save reports
        """
        output_path = Path(output_dir)
        output_path.mkdir(parents=True, exist_ok=True)

        text_file = output_path / "verification_report.txt"
        with open(text_file, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.generate_text_report() + "\n")

        json_file = output_path / "verification_report.json"
        self.generate_json_report(str(json_file))

        return str(text_file), str(json_file)
