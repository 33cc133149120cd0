"""
Moment Lab - Report Browser
Streamlit dashboard for experiment archives and main-term predictions
"""

import glob
import os

import pandas as pd
import streamlit as st

from analysis.predictor import central_breakdown, predict_all_moduli, predict_primitive
from analysis.weights import WEIGHTS
from harness.experiment import fit_groups
from harness.moments import MomentReport
from harness.reports import archive_reports_frame, load_archive
from utils.errors import MomentLabError

# Page configuration
st.set_page_config(
    page_title="Moment Lab",
    page_icon="📈",
    layout="wide",
    initial_sidebar_state="expanded"
)

# Session state initialization
if 'selected_archive' not in st.session_state:
    st.session_state.selected_archive = None
if 'last_prediction' not in st.session_state:
    st.session_state.last_prediction = None

# Constants
REPORTS_DIR = "reports"


def find_archives(reports_dir=REPORTS_DIR):
    """JSON archives under the reports directory, newest first"""
    paths = [p for p in glob.glob(os.path.join(reports_dir, "**", "*.json"), recursive=True)
             if not p.endswith(".timings.json")]
    return sorted(paths, key=os.path.getmtime, reverse=True)


def display_complex_table(frame):
    """Show complex columns as text so the table renders"""
    shown = frame.copy()
    for column in shown.columns:
        if shown[column].map(lambda v: isinstance(v, complex)).any():
            shown[column] = shown[column].map(lambda v: "" if v is None or pd.isna(v) else f"{v:.10g}")
    st.dataframe(shown, use_container_width=True)


def display_archive(path):
    """Reports table and exponent fits for one archive"""
    try:
        archive = load_archive(path)
    except (OSError, ValueError) as e:
        st.error(f"Error loading archive {os.path.basename(path)}: {e}")
        return

    st.caption(f"schema {archive.get('schema_version')} · code {archive.get('code_version')}")
    frame = archive_reports_frame(archive)
    if frame.empty:
        st.info("Archive holds no reports")
        return

    failed = frame["error"].notna().sum()
    col1, col2, col3 = st.columns(3)
    with col1:
        st.metric("Reports", len(frame))
    with col2:
        st.metric("Failed cells", int(failed))
    with col3:
        st.metric("Families", ", ".join(sorted(frame["family"].unique())))

    st.subheader("Moments")
    display_complex_table(frame)

    st.subheader("Exponent fits")
    reports = [MomentReport.from_dict(r) for r in archive.get("reports", [])]
    fits = fit_groups(reports)
    if not fits:
        st.info("No (l, alpha) group has three successful reports with distinct X")
        return
    rows = []
    for fit in fits:
        rows.append({
            "l": fit.labels.get("l"),
            "alpha": fit.labels.get("alpha"),
            "family": fit.labels.get("family"),
            "points": len(fit.points),
            "delta_hat": fit.delta_hat,
            "r_squared": fit.r_squared,
            "target": fit.target_exponent,
            "rh": fit.rh_exponent,
        })
    st.dataframe(pd.DataFrame(rows), use_container_width=True)


def display_prediction_form():
    """Main-term breakdown for a chosen (X, l, alpha, family)"""
    with st.form("predict_form"):
        col1, col2 = st.columns(2)
        with col1:
            X = st.number_input("X", min_value=1.0, value=1000.0, step=100.0)
            l = st.number_input("l (odd, square-free)", min_value=1, value=1, step=2)
            family = st.selectbox("Family", ["primitive", "all", "central"])
        with col2:
            alpha_re = st.number_input("Re alpha", value=0.1, step=0.01, format="%.4f")
            alpha_im = st.number_input("Im alpha", value=0.0, step=0.1, format="%.4f")
            weight = st.selectbox("Weight", sorted(WEIGHTS))

        if st.form_submit_button("📐 Predict", type="primary"):
            alpha = complex(alpha_re, alpha_im)
            try:
                with st.spinner("Evaluating Euler products..."):
                    if family == "all":
                        breakdown = predict_all_moduli(X, int(l), alpha, weight)
                    elif family == "central":
                        breakdown = central_breakdown(X, int(l), weight)
                    else:
                        breakdown = predict_primitive(X, int(l), alpha, weight)
                st.session_state.last_prediction = breakdown.to_dict()
            except MomentLabError as e:
                st.session_state.last_prediction = None
                st.error(str(e))

    if st.session_state.last_prediction:
        st.json(st.session_state.last_prediction)


def main():
    st.title("📈 Moment Lab")
    st.markdown("Twisted first moments of quadratic Dirichlet L-functions")

    # Sidebar
    with st.sidebar:
        st.header("Archives")
        reports_dir = st.text_input("Reports directory", value=REPORTS_DIR)
        archives = find_archives(reports_dir)
        if archives:
            st.session_state.selected_archive = st.selectbox(
                "Archive", archives, format_func=lambda p: os.path.relpath(p, reports_dir)
            )
        else:
            st.session_state.selected_archive = None
            st.info("No archives found. Run `python momentlab.py moment` first.")

    tab_reports, tab_predict = st.tabs(["Reports", "Predict"])
    with tab_reports:
        if st.session_state.selected_archive:
            display_archive(st.session_state.selected_archive)
        else:
            st.info("Select an archive in the sidebar")
    with tab_predict:
        display_prediction_form()


if __name__ == "__main__":
    main()
