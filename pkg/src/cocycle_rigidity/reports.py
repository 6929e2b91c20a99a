"""Run reports: machine-readable line records plus a human summary.

Record lines have a fixed field order and 17-significant-digit decimals, so a
rerun with the same scenario and seed is byte-identical.  Timestamps appear
only in the human-readable text header.
"""

from __future__ import annotations

import os
import time


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


class Report:
    def __init__(self, verb, scenario_text=""):
        self.verb = verb
        self.scenario_text = scenario_text
        self.rows = []

    def data(self, name, params, value):
        self.rows.append(("data", name, params, _fmt(value), "", ""))

    def check(self, name, params, residual, tol):
        ok = residual <= tol
        self.rows.append(
            ("check", name, params, _fmt(float(residual)), _fmt(float(tol)), "pass" if ok else "fail")
        )
        return ok

    @property
    def passed(self):
        return all(row[5] != "fail" for row in self.rows)

    def records(self):
        lines = [f"# records/1 verb={self.verb}"]
        for row in self.rows:
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    def text(self):
        stamp = time.strftime("%Y-%m-%d %H:%M:%S")
        lines = [f"{self.verb} report ({stamp})", "=" * 40]
        for kind, name, params, value, tol, status in self.rows:
            if kind == "data":
                lines.append(f"  {name} [{params}] = {value}")
            else:
                lines.append(f"  {name} [{params}]: residual {value} vs tol {tol} -> {status}")
        lines.append("")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines) + "\n"

    def write(self, outdir):
        os.makedirs(outdir, exist_ok=True)
        rec_path = os.path.join(outdir, f"{self.verb}.records")
        with open(rec_path, "w") as fh:
            fh.write(self.records())
        with open(os.path.join(outdir, f"{self.verb}.txt"), "w") as fh:
            fh.write(self.text())
        return rec_path
