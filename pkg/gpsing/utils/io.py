# gpsing/utils/io.py

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np

from gpsing.algorithms.profile.ground_state import GroundStateW
from gpsing.common.errors import IOFailure, ProfileMissing, UsageError
from gpsing.common.problem import derived_constants
from gpsing.common.radial_grid import RadialField, build_grid
from gpsing.experiments.asymptotics import ScalingReport
from gpsing.utils.general import __version__, params_hash, set_filepath, to_jsonable

logger = logging.getLogger(__name__)

PLOT_KINDS = ("profile", "ratio", "trap_mass", "decay")


def _provenance(config: Optional[dict]) -> Dict[str, Any]:
    return {"version": __version__, "config": config or {}}


def _text_header(config: Optional[dict], extra: Optional[dict] = None, columns: str = "") -> str:
    lines = [f"gpsing {__version__}", "config: " + json.dumps(to_jsonable(config or {}), sort_keys=True)]
    if extra is not None:
        lines.append("meta: " + json.dumps(to_jsonable(extra), sort_keys=True))
    if columns:
        lines.append(columns)
    return "\n".join(lines)


def write_json(payload: dict, path: str) -> str:
    try:
        with open(set_filepath(path), "w", encoding="utf-8") as f:
            json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc
    return path


def write_columns(path: str, columns: List[np.ndarray], header: str) -> str:
    """Space-separated columns with a '#' header."""
    try:
        np.savetxt(set_filepath(path), np.column_stack(columns), fmt="%.17g", header=header)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc
    return path


def field_to_dict(u: RadialField) -> dict:
    return {"grid": u.grid.spec(), "values": u.values.tolist()}


def field_from_dict(data: dict) -> RadialField:
    spec = data["grid"]
    grid = build_grid(spec["N"], spec["rmax"], spec["nodes"], spec["grading"])
    return RadialField(grid, np.asarray(data["values"], dtype=float))


def save_field(u: RadialField, path: str, fmt: str = "json", config: Optional[dict] = None,
               meta: Optional[dict] = None) -> str:
    """
    Writes a field as JSON {grid, values, meta, version, config} or as two plain columns (r, u) whose header
    records the grid.
    """
    if fmt == "json":
        payload = field_to_dict(u)
        payload.update(_provenance(config))
        payload["meta"] = meta or {}
        return write_json(payload, path)
    header = _text_header(config, {"grid": u.grid.spec(), **(meta or {})}, "r value")
    return write_columns(path, [u.r, u.values], header)


def load_field(path: str) -> RadialField:
    """Reads a field written by save_field in either format."""
    try:
        if path.endswith(".json"):
            with open(path, encoding="utf-8") as f:
                return field_from_dict(json.load(f))
        grid_spec = None
        with open(path, encoding="utf-8") as f:
            for line in f:
                if not line.startswith("#"):
                    break
                if line.startswith("# meta: "):
                    grid_spec = json.loads(line[len("# meta: "):]).get("grid")
        data = np.loadtxt(path, ndmin=2)
    except OSError as exc:
        raise IOFailure(f"cannot read {path}: {exc}") from exc
    if grid_spec is None:
        raise UsageError(f"{path} does not record its grid")
    return field_from_dict({"grid": grid_spec, "values": data[:, 1]})


def save_profile(profile: GroundStateW, out_dir: str, fmt: str = "json", config: Optional[dict] = None) -> str:
    """Writes w with its header (N, p, b, a_star, w0, Pohozaev residuals, decay, method) and diagnostics."""
    meta = dict(profile.header())
    meta["diagnostics"] = profile.diagnostics
    extension = "json" if fmt == "json" else "dat"
    path = os.path.join(out_dir, f"wprofile_{params_hash(profile.params.as_dict())}.{extension}")
    return save_field(profile.profile, path, "json" if fmt == "json" else "plain", config, meta)


def save_minimizer(result, out_dir: str, fmt: str = "json", config: Optional[dict] = None) -> str:
    """Writes the minimizer summary {params, energy_parts, mu, iters, el_residual} and the field u_M."""
    key = params_hash({**result.params.as_dict(), "potential": result.potential.label()})
    if fmt == "json":
        payload = result.summary()
        payload["field"] = field_to_dict(result.u)
        payload.update(_provenance(config))
        return write_json(payload, os.path.join(out_dir, f"minimizer_{key}.json"))
    return save_field(result.u, os.path.join(out_dir, f"minimizer_{key}.dat"), "plain", config, result.summary())


def save_report(report: ScalingReport, out_dir: str, fmt: str = "csv", config: Optional[dict] = None) -> str:
    """
    Writes a sweep report. CSV keeps the fixed column header, so its provenance goes to a sibling .meta.json;
    JSON embeds it.
    """
    report.metadata.update(_provenance(config))
    key = _report_key(report)
    if fmt == "json":
        return report.to_json(set_filepath(os.path.join(out_dir, f"sweep_{key}.json")))
    if fmt == "csv":
        path = report.to_csv(set_filepath(os.path.join(out_dir, f"sweep_{key}.csv")))
        write_json({"metadata": report.metadata, "trends": report.trends()},
                   os.path.join(out_dir, f"sweep_{key}.meta.json"))
        return path
    frame = report.to_frame()
    header = _text_header(config, columns=" ".join(frame.columns))
    return write_columns(os.path.join(out_dir, f"sweep_{key}.dat"),
                         [frame[column].to_numpy(dtype=float) for column in frame.columns], header)


def _report_key(report: ScalingReport) -> str:
    return params_hash({
        "N": report.params.N, "p": report.params.p, "b": report.params.b,
        "potential": report.potential, "M_list": [row.M for row in report.rows],
    })


def emit_plot_data(report: ScalingReport, kind: str, out_dir: str, profile: Optional[GroundStateW] = None,
                   config: Optional[dict] = None) -> str:
    """
    Writes one plain two-or-three column series {kind}_{params-hash}.dat.

        profile     r, w_k(r) of the last converged row, w(r) / sqrt(a_star)
        ratio       M, I(M) / (M / a_star)^{beta_energy}, -lambda0
        trap_mass   M, int V u_M^2
        decay       r, -log w_k(r) of the last converged row on the fit window

    Raises:
        UsageError: For an unknown kind or a report without converged rows.
        ProfileMissing: For kind "profile" without w.
        IOFailure: If the file cannot be written.
    """
    if kind not in PLOT_KINDS:
        raise UsageError(f"unknown plot kind {kind!r}; choose from {list(PLOT_KINDS)}")
    rows = report.converged_rows
    if not rows:
        raise UsageError("the report has no converged rows to plot")
    path = os.path.join(out_dir, f"{kind}_{_report_key(report)}.dat")
    last = rows[-1]

    if kind == "profile":
        if profile is None:
            raise ProfileMissing("plot kind 'profile' needs the ground state w")
        if last.w_k is None:
            raise UsageError("the report rows do not carry w_k")
        target = profile.normalized_profile
        return write_columns(path, [target.r, last.w_k.values, target.values],
                             _text_header(config, {"M": last.M}, "r w_k w/sqrt(a_star)"))
    if kind == "ratio":
        M = np.array([row.M for row in rows])
        limit = np.full_like(M, -derived_constants(report.params).lambda0)
        return write_columns(path, [M, np.array([row.ratio for row in rows]), limit],
                             _text_header(config, columns="M ratio -lambda0"))
    if kind == "trap_mass":
        return write_columns(path, [np.array([row.M for row in rows]), np.array([row.trap_mass for row in rows])],
                             _text_header(config, columns="M trap_mass"))

    if last.w_k is None:
        raise UsageError("the report rows do not carry w_k")
    rmax = last.w_k.grid.rmax
    r = last.w_k.r
    window = (r >= 0.4 * rmax) & (r <= 0.7 * rmax) & (last.w_k.values > 0)
    return write_columns(path, [r[window], -np.log(last.w_k.values[window])],
                         _text_header(config, {"M": last.M}, "r -log(w_k)"))
