"""Render figures from persisted run artifacts.

Three figure kinds:

  cauchy    -- log-log scatter of the pairwise difference norms against the
               parameter gap |d sigma| + |d rho0| at the final checkpoint,
               with a least-squares line and the fitted slope annotated.
  energy    -- E_total(t) from an energy CSV with the fitted logarithmic
               bound -c1 ln(c2 - c3 t) overlaid (constants from summary.json).
  interface -- interface positions reconstructed from (theta, L) snapshots
               of a trajectory stream.

Inputs are validated against the versioned headers; a missing or renamed
column raises MissingColumn naming it.  Rendering is deterministic (Agg
backend, pinned style) and never mutates its inputs.
"""

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

ENERGY_FORMAT = "hydroelastic-energy-v1"
PAIRS_FORMAT = "hydroelastic-pairs-v1"

STYLE = {
    "figure.figsize": (6.0, 4.2),
    "figure.dpi": 130,
    "savefig.dpi": 130,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
}

KINDS = ("cauchy", "energy", "interface")


class MissingColumn(Exception):
    """A required column or key is absent from an input artifact."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: dict          # role -> path; roles per kind (see render)
    out: Path

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


@dataclass
class RenderResult:
    out: Path
    annotations: dict = field(default_factory=dict)


def _read_versioned_csv(path, expected_format, required):
    path = Path(path)
    with open(path) as fh:
        first = fh.readline().strip()
        if first != f"# format={expected_format}":
            raise MissingColumn(f"{path}: expected format line '# format={expected_format}'")
        reader = csv.DictReader(fh)
        for col in required:
            if col not in (reader.fieldnames or []):
                raise MissingColumn(f"{path}: missing column {col!r}")
        rows = list(reader)
    return rows


def _load_json(path, required_keys=()):
    with open(path) as fh:
        data = json.load(fh)
    for key in required_keys:
        if key not in data:
            raise MissingColumn(f"{path}: missing key {key!r}")
    return data


def _fit_line(x, y):
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def _render_cauchy(spec):
    rows = _read_versioned_csv(
        spec.inputs["pairs"], PAIRS_FORMAT,
        ["checkpoint_time", "sigma_i", "rho0_i", "sigma_j", "rho0_j", "difference_norm"],
    )
    t_final = max(float(r["checkpoint_time"]) for r in rows)
    gaps, dists = [], []
    for r in rows:
        if float(r["checkpoint_time"]) != t_final or not r["difference_norm"]:
            continue
        gap = abs(float(r["sigma_i"]) - float(r["sigma_j"])) + abs(float(r["rho0_i"]) - float(r["rho0_j"]))
        d = float(r["difference_norm"])
        if gap > 0 and d > 0:
            gaps.append(gap)
            dists.append(d)
    if len(gaps) < 3:
        raise MissingColumn(f"{spec.inputs['pairs']}: fewer than 3 usable rows at t = {t_final}")
    slope, intercept = _fit_line(np.log(gaps), np.log(dists))

    annotations = {"slope": slope, "checkpoint_time": t_final}
    if "summary" in spec.inputs:
        summary = _load_json(spec.inputs["summary"], required_keys=("slope",))
        annotations["summary_slope"] = summary["slope"]

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.loglog(gaps, dists, "o", ms=5, label="pairwise difference at final time")
        gg = np.array([min(gaps), max(gaps)])
        ax.loglog(gg, np.exp(intercept) * gg**slope, "-", lw=1.2,
                  label=f"fit: slope = {slope:.3f}")
        ax.set_xlabel(r"parameter gap $|\Delta\sigma| + |\Delta\rho_0|$")
        ax.set_ylabel(r"$\|\Delta\theta\|_2 + \|\Delta\gamma\|_{3/2}$")
        ax.set_title("Cauchy rate toward the vanishing-elasticity limit")
        ax.annotate(f"slope = {slope:.3f}", xy=(0.05, 0.9), xycoords="axes fraction")
        ax.legend(loc="lower right")
        fig.tight_layout()
        fig.savefig(spec.out)
        plt.close(fig)
    return RenderResult(out=Path(spec.out), annotations=annotations)


def _render_energy(spec):
    rows = _read_versioned_csv(spec.inputs["energy"], ENERGY_FORMAT, ["time", "E_total"])
    t = np.array([float(r["time"]) for r in rows])
    e = np.array([float(r["E_total"]) for r in rows])
    summary = _load_json(spec.inputs["summary"])
    fit = summary.get("energy_fit")
    if not fit or not all(k in fit for k in ("c1", "c2", "c3")):
        raise MissingColumn(f"{spec.inputs['summary']}: missing key 'energy_fit.c1/c2/c3'")
    c1, c2, c3 = fit["c1"], fit["c2"], fit["c3"]

    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.plot(t, e, "o-", ms=3, lw=1.0, label=r"$E_{total}(t)$")
        tt = np.linspace(t[0], t[-1], 300)
        ax.plot(tt, -c1 * np.log(c2 - c3 * tt), "--", lw=1.2,
                label=rf"bound $-c_1\ln(c_2 - c_3 t)$")
        ax.set_xlabel("t")
        ax.set_ylabel("energy")
        ax.set_title("Total energy against its fitted logarithmic bound")
        ax.legend()
        fig.tight_layout()
        fig.savefig(spec.out)
        plt.close(fig)
    return RenderResult(out=Path(spec.out),
                        annotations={"c1": c1, "c2": c2, "c3": c3, "max_E": float(e.max())})


def _iter_snapshots(path):
    with open(path) as fh:
        for line in fh:
            rec = json.loads(line)
            if rec.get("kind") == "snapshot":
                yield rec


def _render_interface(spec):
    snaps = list(_iter_snapshots(spec.inputs["trajectory"]))
    if not snaps:
        raise MissingColumn(f"{spec.inputs['trajectory']}: no snapshot records")
    for key in ("time", "L", "theta"):
        if key not in snaps[0]:
            raise MissingColumn(f"{spec.inputs['trajectory']}: snapshot missing {key!r}")
    picks = snaps if len(snaps) <= 5 else [snaps[i] for i in
                                           np.linspace(0, len(snaps) - 1, 5).astype(int)]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for rec in picks:
            theta = np.array([float.fromhex(v) for v in rec["theta"]])
            L = float.fromhex(rec["L"])
            time = float.fromhex(rec["time"])
            n = theta.size
            h = 2 * math.pi / n
            s_a = L / (2 * math.pi)
            # cumulative trapezoid of the unit tangent scaled by s_alpha
            dx = s_a * np.cos(theta)
            dy = s_a * np.sin(theta)
            x = np.concatenate([[0.0], np.cumsum(0.5 * (dx[1:] + dx[:-1]) * h)])
            y = np.concatenate([[0.0], np.cumsum(0.5 * (dy[1:] + dy[:-1]) * h)])
            ax.plot(x, y, lw=1.1, label=f"t = {time:.3g}")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title("Interface snapshots")
        ax.legend(fontsize=8)
        ax.set_aspect("equal", adjustable="datalim")
        fig.tight_layout()
        fig.savefig(spec.out)
        plt.close(fig)
    return RenderResult(out=Path(spec.out), annotations={"snapshots": len(picks)})


_RENDERERS = {"cauchy": _render_cauchy, "energy": _render_energy, "interface": _render_interface}


def render(spec):
    """Render one figure; returns RenderResult with the annotated values."""
    return _RENDERERS[spec.kind](spec)
