"""
Reports Module
CSV table, JSON archive and timing sidecar for experiment runs, written atomically
"""

import json
import logging
import os
import tempfile
from typing import Dict, List, Optional, Sequence

import pandas as pd

from harness.fitting import ExponentFit
from harness.moments import MomentReport
from numtheory.gauss_sums import gauss_G, tau_bruteforce, tau_from_G
from utils.config import CODE_VERSION

logger = logging.getLogger(__name__)

# Bump when CSV_COLUMNS or the archive layout changes
REPORT_SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "schema_version", "code_version", "family", "X", "l", "alpha_re", "alpha_im", "weight",
    "d_count", "empirical_re", "empirical_im", "term1_re", "term1_im", "term2_re", "term2_im",
    "deviation_re", "deviation_im", "wall_time", "lvalue_time", "error",
]


def write_atomic(path: str, text: str) -> None:
    """
    Write text to path through a temporary file in the same directory

    Args:
        path (str): Destination
        text (str): Content
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle = tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=directory,
                                         prefix=".tmp-", delete=False)
    try:
        with handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(handle.name, path)
    except Exception:
        if os.path.exists(handle.name):
            os.remove(handle.name)
        raise


def _component(value: Optional[complex], part: str) -> Optional[float]:
    if value is None:
        return None
    return getattr(complex(value), part)


def report_row(report: MomentReport) -> Dict[str, object]:
    predicted = report.predicted
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "code_version": report.code_version,
        "family": report.family,
        "X": report.X,
        "l": report.l,
        "alpha_re": report.alpha.real,
        "alpha_im": report.alpha.imag,
        "weight": report.weight,
        "d_count": report.d_count,
        "empirical_re": _component(report.empirical, "real"),
        "empirical_im": _component(report.empirical, "imag"),
        "term1_re": _component(predicted.term1 if predicted else None, "real"),
        "term1_im": _component(predicted.term1 if predicted else None, "imag"),
        "term2_re": _component(predicted.term2 if predicted else None, "real"),
        "term2_im": _component(predicted.term2 if predicted else None, "imag"),
        "deviation_re": _component(report.deviation, "real"),
        "deviation_im": _component(report.deviation, "imag"),
        "wall_time": report.wall_time,
        "lvalue_time": report.lvalue_time,
        "error": report.error,
    }


def reports_frame(reports: Sequence[MomentReport]) -> pd.DataFrame:
    """One row per report, columns in CSV_COLUMNS order"""
    return pd.DataFrame([report_row(r) for r in reports], columns=CSV_COLUMNS)


def archive_payload(reports: Sequence[MomentReport], fits: Sequence[ExponentFit]) -> Dict[str, object]:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "code_version": CODE_VERSION,
        "reports": [r.to_dict() for r in reports],
        "fits": [f.to_dict() for f in fits],
    }


def write_reports(reports: Sequence[MomentReport], fits: Sequence[ExponentFit],
                  out: str) -> Dict[str, str]:
    """
    Write <out>.csv, <out>.json and <out>.timings.json

    The JSON archive leaves out wall-clock fields so equal runs give equal files.

    Args:
        reports: Moment reports in run order
        fits: Exponent fits
        out (str): Output path prefix

    Returns:
        Dict[str, str]: Paths written, keyed by "csv", "json", "timings"
    """
    paths = {"csv": f"{out}.csv", "json": f"{out}.json", "timings": f"{out}.timings.json"}

    write_atomic(paths["csv"], reports_frame(reports).to_csv(index=False))
    write_atomic(paths["json"], json.dumps(archive_payload(reports, fits), indent=2,
                                           sort_keys=True) + "\n")
    timings = [{"family": r.family, "X": r.X, "l": r.l, "alpha": [r.alpha.real, r.alpha.imag],
                "wall_time": r.wall_time, "lvalue_time": r.lvalue_time} for r in reports]
    write_atomic(paths["timings"], json.dumps(timings, indent=2) + "\n")

    logger.info("Wrote %d reports to %s", len(reports), paths["json"])
    return paths


def load_archive(path: str) -> Dict[str, object]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def archive_reports_frame(archive: Dict[str, object]) -> pd.DataFrame:
    """Flatten the reports of a JSON archive into a table for display"""
    rows: List[Dict[str, object]] = []
    for report in archive.get("reports", []):
        predicted = report.get("predicted") or {}
        deviation = report.get("deviation")
        rows.append({
            "family": report["family"],
            "X": report["X"],
            "l": report["l"],
            "alpha": complex(*report["alpha"]),
            "weight": report["weight"],
            "d_count": report["d_count"],
            "empirical": complex(*report["empirical"]) if report.get("empirical") else None,
            "term1": complex(*predicted["term1"]) if predicted else None,
            "term2": complex(*predicted["term2"]) if predicted else None,
            "deviation": complex(*deviation) if deviation else None,
            "error": report.get("error"),
        })
    return pd.DataFrame(rows)


GAUSS_COLUMNS = ["n", "q", "chi", "tau_re", "tau_im", "G_re", "G_im", "tau_from_G_re",
                 "tau_from_G_im", "G_exact"]


def gauss_table(n_values: Sequence[int], q_values: Sequence[int], chi: str = "jacobi") -> pd.DataFrame:
    """
    Brute-force tau(chi, q) over an n by q grid, with G(chi_n, q) for the Jacobi character

    Args:
        n_values: Odd positive n
        q_values: Frequencies
        chi (str): "jacobi", "twisted" or "psi:<j>"

    Returns:
        pd.DataFrame: One row per (n, q), columns in GAUSS_COLUMNS order
    """
    rows = []
    for n in n_values:
        for q in q_values:
            tau = tau_bruteforce(n, chi, q).value
            row = {"n": n, "q": q, "chi": chi, "tau_re": tau.real, "tau_im": tau.imag}
            if chi == "jacobi":
                G = gauss_G(n, q)
                from_G = tau_from_G(n, q)
                row.update({"G_re": G.value.real, "G_im": G.value.imag,
                            "tau_from_G_re": from_G.real, "tau_from_G_im": from_G.imag,
                            "G_exact": G.exact_form})
            rows.append(row)
    return pd.DataFrame(rows, columns=GAUSS_COLUMNS)
