"""Energy functionals, the logarithmic bound fit, and difference norms.

The total energy combines quadratic functionals of (theta, gamma) at Sobolev
index s (default 4, the smallest integer above 7/2):

    E0 = 1/2 int theta^2 + gamma^2
    E1 = (L^2 abar / 4 pi^2) int (d^s theta)^2
    E2 = 1/2 int (d^{s-2} gamma) (H d^{s-1} gamma)
    E3 = (tau L / (pi (rho1+rho2)) + sigma abar L^2 / (8 pi^2)) int (d^{s-1} theta)^2
    E4 = (pi atilde / L) int (H d^{s-1} gamma)^2
    E5 = 1/2 int w Lambda(w),  w = sqrt((theta_a^2+1)/2) d^{s-3} gamma
    E6 = (atilde pi / 2L) int (theta_a^2+1) (H d^{s-2} gamma)^2
    E7 = (L atilde / pi) int V_W^2 (d^{s-1} theta)^2

    E_total = E0 + sigma E1 + E2 + E3 + E5 + (2 pi rho0 / L)(E4 + E6 + E7)

E2 and E5 are reported signed; only E_total carries the nonnegativity claim.
The admissible bound is E_total(t) <= -c1 ln(c2 - c3 t) with c1 > 0,
0 < c2 < 1, c3 > 0; ``fit_log_bound`` finds the least-squares-closest bound
among those that majorize the series (a plain least-squares fit would leave
residuals straddling zero and report spurious violations).
"""

import csv
from dataclasses import dataclass

import numpy as np

from . import geometry, spectral
from .errors import GridMismatch, InfeasibleFit

_TWO_PI = 2.0 * np.pi

ENERGY_CSV_FORMAT = "hydroelastic-energy-v1"
ENERGY_CSV_COLUMNS = ["time", "E0", "E1", "E2", "E3", "E4", "E5", "E6", "E7",
                      "E_total", "chord_arc_min", "closure_defect"]

#: search bounds for the log-bound fit; a series no admissible curve can
#: majorize within these caps is reported as infeasible
C1_CAP = 1e12
C2_RANGE = (1e-6, 1.0 - 1e-6)


@dataclass(frozen=True)
class EnergyReport:
    time: float
    E0: float
    E1: float
    E2: float
    E3: float
    E4: float
    E5: float
    E6: float
    E7: float
    E_total: float
    chord_arc_min: float
    closure_defect: float
    sobolev_index_s: int

    def components(self):
        return (self.E0, self.E1, self.E2, self.E3, self.E4, self.E5, self.E6, self.E7)


def energy_report(state, params, s=4, ops=None):
    """Evaluate E0..E7, E_total and the two admissibility monitors."""
    if s < 4:
        raise ValueError("the energy machinery needs integer s >= 4")
    from .evolution import Assembly  # deferred: diagnostics <-> evolution

    asm = Assembly(state, params, ops=ops)
    th, ga, L = state.theta, state.gamma, state.L
    H, D = spectral.hilbert, spectral.derivative
    integ = spectral.integral
    theta_a = asm.theta_a
    abar = params.abar(L)
    atilde = params.atilde

    ds_th = D(th, s)
    ds1_th = D(th, s - 1)
    h_ds1_ga = H(D(ga, s - 1))
    h_ds2_ga = H(D(ga, s - 2))

    e0 = float(0.5 * integ(th**2 + ga**2))
    e1 = float((L**2 * abar / (4.0 * np.pi**2)) * integ(ds_th**2))
    e2 = float(0.5 * integ(D(ga, s - 2) * h_ds1_ga))
    e3 = float((params.tau * L * atilde / np.pi + params.sigma * abar * L**2 / (8.0 * np.pi**2))
               * integ(ds1_th**2))
    e4 = float((np.pi * atilde / L) * integ(h_ds1_ga**2))
    w = np.sqrt((theta_a**2 + 1.0) / 2.0) * D(ga, s - 3)
    e5 = float(0.5 * integ(w * spectral.fractional_lambda(w, 1.0)))
    e6 = float((atilde * np.pi / (2.0 * L)) * integ((theta_a**2 + 1.0) * h_ds2_ga**2))
    e7 = float((L * atilde / np.pi) * integ(asm.v_w**2 * ds1_th**2))

    total = e0 + params.sigma * e1 + e2 + e3 + e5 + (_TWO_PI * params.rho0 / L) * (e4 + e6 + e7)
    zd = geometry.reconstruct_zd(state)
    return EnergyReport(
        time=state.time, E0=e0, E1=e1, E2=e2, E3=e3, E4=e4, E5=e5, E6=e6, E7=e7,
        E_total=total,
        chord_arc_min=geometry.chord_arc_min(zd),
        closure_defect=geometry.closure_defect(th),
        sobolev_index_s=s,
    )


def difference_norm(a, b):
    """||theta_a - theta_b||_2 + ||gamma_a - gamma_b||_{3/2}."""
    if a.n != b.n:
        raise GridMismatch(f"states on different grids: {a.n} vs {b.n}")
    return spectral.sobolev_norm(a.theta - b.theta, 2.0) + spectral.sobolev_norm(
        a.gamma - b.gamma, 1.5
    )


# ---------------------------------------------------------------------------
# Logarithmic bound fit
# ---------------------------------------------------------------------------

def _fit_objective(c2, q, t, e, t_max):
    """Smallest majorizing c1 at (c2, c3 = q c2/t_max) and its squared slack.
    Returns (c1, c3, slack), or None when the cell is inadmissible."""
    c3 = q * c2 / t_max if t_max > 0 else q * c2
    u = -np.log(c2 - c3 * t)
    if np.any(u <= 0):
        return None
    c1 = float(np.max(e / u))
    c1 = max(c1, 1e-30)
    if c1 > C1_CAP:
        return None
    slack = float(np.sum((c1 * u - e) ** 2))
    return c1, c3, slack


def fit_log_bound(series):
    """Fit (c1, c2, c3) of the bound -c1 ln(c2 - c3 t) over an energy series.

    The fit minimizes the least-squares distance among admissible curves that
    stay at or above every sample (zooming grid search on (c2, c3) with the
    closed-form minimal majorizing c1 per cell).  Returns
    (c1, c2, c3, max_violation) where max_violation is the clamped maximum of
    E - bound; InfeasibleFit is raised when no admissible majorant exists
    within the documented caps.
    """
    series = [(float(t), float(e)) for t, e in series]
    if not series:
        raise ValueError("empty series")
    t = np.array([p[0] for p in series])
    e = np.array([p[1] for p in series])
    if np.any(np.diff(t) < 0):
        raise ValueError("series times must be nondecreasing")
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(e))):
        raise InfeasibleFit("series contains non-finite values")
    t_max = float(t[-1])

    lo2, hi2 = C2_RANGE
    lo_q, hi_q = 1e-6, 1.0 - 1e-6
    best = None
    centers = (0.5 * (lo2 + hi2), 0.5 * (lo_q + hi_q))
    half = (0.5 * (hi2 - lo2), 0.5 * (hi_q - lo_q))
    grid = 25
    for _ in range(24):
        c2s = np.linspace(max(lo2, centers[0] - half[0]), min(hi2, centers[0] + half[0]), grid)
        qs = np.linspace(max(lo_q, centers[1] - half[1]), min(hi_q, centers[1] + half[1]), grid)
        local_best = None
        for c2 in c2s:
            for q in qs:
                res = _fit_objective(c2, q, t, e, t_max)
                if res is None:
                    continue
                c1, c3, slack = res
                if local_best is None or slack < local_best[0]:
                    local_best = (slack, c1, c2, c3, q)
        if local_best is None:
            break
        if best is None or local_best[0] <= best[0]:
            best = local_best
        centers = (best[2], best[4])
        half = (half[0] * 0.35, half[1] * 0.35)
    if best is None:
        raise InfeasibleFit("no admissible logarithmic majorant within the search caps")
    _, c1, c2, c3, _ = best
    bound = -c1 * np.log(c2 - c3 * t)
    max_violation = float(max(0.0, np.max(e - bound)))
    return c1, c2, c3, max_violation


# ---------------------------------------------------------------------------
# CSV persistence (versioned header; consumed by the report path and figures)
# ---------------------------------------------------------------------------

def write_energy_csv(reports, path):
    with open(path, "w", newline="") as fh:
        fh.write(f"# format={ENERGY_CSV_FORMAT}\n")
        writer = csv.writer(fh)
        writer.writerow(ENERGY_CSV_COLUMNS)
        for r in reports:
            vals = [r.time, *r.components(), r.E_total, r.chord_arc_min, r.closure_defect]
            writer.writerow([repr(float(v)) for v in vals])


def read_energy_csv(path):
    with open(path) as fh:
        first = fh.readline().strip()
        if first != f"# format={ENERGY_CSV_FORMAT}":
            raise ValueError(f"unrecognized energy CSV format line: {first!r}")
        reader = csv.DictReader(fh)
        rows = []
        for row in reader:
            rows.append({k: float(v) for k, v in row.items()})
        return rows
