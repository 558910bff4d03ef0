"""Invariant suites run by ``quenchtherm verify``."""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dynamics, protocol, records, sds, solver, state


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


def _check(name, cond, detail=""):
    return Check(name, bool(cond), detail)


def suite_core_state():
    out = []
    bw = np.linspace(0.05, 50, 400)
    worst = max(abs(r.x * r.x - r.z * r.z - 1) for r in map(state.thermal_r, bw))
    out.append(_check("thermal curve X^2 - Z^2 = 1", worst <= 1e-12, f"max deviation {worst:.3g}"))
    rel = max(
        abs(state.mean_energy(state.thermal_r(b)) / (0.5 / math.tanh(b / 2)) - 1) for b in bw
    )
    out.append(_check("thermal mean energy closed form", rel <= 1e-10, f"max rel error {rel:.3g}"))
    cov = state.r_to_covariance(state.reduce_to_r(state.QuadraticForm(1, 1, 0)))
    out.append(_check("ground state vacuum covariance", abs(cov.sxx - 0.5) < 1e-15 and abs(cov.spp - 0.5) < 1e-15 and cov.sxp == 0))
    r = state.thermal_r(math.log(4))
    out.append(_check("thermal_r(log 4) = (17/15, 0, -8/15)", r.distance(state.RVector(17 / 15, 0, -8 / 15)) < 1e-15))
    return out


def suite_dynamics(draws: int = 100, points: int = 1000, seed: int = 2024):
    rng = np.random.default_rng(seed)
    worst_oracle = 0.0
    worst_det = 0.0
    worst_cons = 0.0
    for _ in range(draws):
        w = rng.uniform(0.2, 5.0)
        k = rng.uniform(-w * w / 2 + 0.01, 5.0)
        tau = rng.uniform(0.1, 3.0)
        stage = dynamics.Stage.from_tilde(w, k, tau)
        traj = dynamics.evolve_schedule(dynamics.Schedule([stage]), points - 1)
        x, y, z = dynamics.analytic_r(traj.t, w, k)
        worst_oracle = max(worst_oracle, np.abs(x - traj.x).max(), np.abs(y - traj.y).max(), np.abs(z - traj.z).max())
        worst_det = max(worst_det, np.abs(traj.det * 16 - 1).max())
        w_p, w_m = dynamics.normal_mode_frequencies(stage)
        for freq in (w_p, w_m):
            b, bd = dynamics.b_plus_analytic(traj.t, freq)
            inv = bd * bd + freq * freq * b * b + 1.0 / (b * b)
            worst_cons = max(worst_cons, np.abs(inv / inv[0] - 1).max())
    out = [
        _check("analytic vs covariance oracle", worst_oracle <= 1e-9, f"max |dR| {worst_oracle:.3g} over {draws} draws"),
        _check("global purity det = 1/16", worst_det <= 1e-10, f"max rel deviation {worst_det:.3g}"),
        _check("Ermakov first integral", worst_cons <= 1e-9, f"max rel drift {worst_cons:.3g}"),
    ]
    # second derivative by central differences
    w, h = 0.7, 1e-4
    t = np.linspace(0.1, 10, 200)
    b0, _ = dynamics.b_plus_analytic(t, w)
    bp, _ = dynamics.b_plus_analytic(t + h, w)
    bm, _ = dynamics.b_plus_analytic(t - h, w)
    ermakov = (bp - 2 * b0 + bm) / (h * h) + w * w * b0 - 1 / b0**3
    out.append(_check("Ermakov equation residual", np.abs(ermakov).max() <= 1e-6, f"max {np.abs(ermakov).max():.3g}"))
    plan = protocol.thermalize_plan(sds.SdsIndex(0, 1), tail_periods=10)
    traj = dynamics.evolve_schedule(plan.schedule, 200, plan.tail_periods)
    tail = traj.stage == -1
    tail[0] = False
    i_tau = traj.index_of(plan.schedule.duration)
    drift = max(np.abs(traj.x[tail] - traj.x[i_tau]).max(), np.abs(traj.y[tail] - traj.y[i_tau]).max(), np.abs(traj.z[tail] - traj.z[i_tau]).max())
    out.append(_check("post-protocol stationarity", drift <= 1e-9, f"max drift {drift:.3g}"))
    return out


def suite_sds(max_index: int = 50):
    worst_ch = worst_ident = worst_deg = 0.0
    for l in range(max_index + 1):
        for n in range(max_index + 1):
            if l == n:
                continue
            sp = sds.sds_params((l, n))
            eta = (2 * n + 1) / (2 * l + 1)
            b2 = 2 * sp.beta_eg
            lhs_c = (eta**4 + 6 * eta**2 + 1) / (eta**2 - 1) ** 2
            lhs_s = 4 * (eta**2 + 1) / (sp.omega_prime**2 * (eta**2 - 1) ** 2)
            worst_ch = max(worst_ch, abs(lhs_c / math.cosh(b2) - 1), abs(lhs_s / math.sinh(b2) - 1))
            worst_ident = max(
                worst_ident,
                abs(sp.omega_prime**2 * eta - 1),
                abs(math.tanh(sp.beta_eg / 2) - min(eta, 1 / eta)),
                # relative: omega'^2 + 2k cancels on the l > n branch
                abs(sp.tau * 4 * sp.omega_prime / (2 * l + 1) - 1),
                abs(sp.tau * 4 * math.sqrt(sp.omega_prime**2 + 2 * sp.coupling) / (2 * n + 1) - 1),
            )
            tw = sds.sds_params((n, l))
            worst_deg = max(
                worst_deg,
                abs(tw.omega_prime * sp.omega_prime - 1),
                abs(tw.coupling + sp.coupling),
                abs(tw.tau - sp.tau),
                abs(tw.beta_eg - sp.beta_eg),
                abs(tw.u_thermal - sp.u_thermal),
            )
    out = [
        _check("cosh/sinh thermalization identities", worst_ch <= 1e-10, f"max rel {worst_ch:.3g}"),
        _check("eta / omega' / tau identities", worst_ident <= 1e-12, f"max {worst_ident:.3g}"),
        _check("l <-> n degeneracy", worst_deg <= 1e-12, f"max {worst_deg:.3g}"),
    ]
    rng = np.random.default_rng(7)
    mismatches = 0
    for _ in range(20):
        b = rng.uniform(0.3, 4.0)
        tol = 10 ** rng.uniform(-3, -1.5)
        first = sds.approx_search(b, tol, limit=1)[0]
        oracle = sds.brute_force_search(b, tol, 4 * (2 * first.index.n + 3))
        mismatches += oracle is None or oracle.index != first.index
    out.append(_check("search matches brute force", mismatches == 0, f"{mismatches} mismatches of 20"))
    empty = sum(not sds.approx_search(b, 1e-4, limit=1) for b in rng.uniform(0.1, 10, 100))
    out.append(_check("SDS density (rel_tol 1e-4)", empty == 0, f"{empty} empty of 100"))
    return out


def suite_solver(max_index: int = 20):
    worst = 0.0
    for l in range(max_index + 1):
        for n in range(max_index + 1):
            if l != n:
                p = solver.ParameterVector.from_index((l, n))
                worst = max(worst, float(np.abs(solver.residual(p, sds.beta_of_index((l, n)))).max()))
    out = [_check("residual vanishes on the SDS", worst <= 1e-9, f"max {worst:.3g}")]
    worst_fd = 0.0
    for b in np.linspace(0.1, 10, 50):
        h = 1e-6
        fd = (np.array(state.thermal_r(2 * (b + h)).as_tuple()) - np.array(state.thermal_r(2 * (b - h)).as_tuple())) / (2 * h)
        worst_fd = max(worst_fd, np.abs(fd - solver.dthermal_dbeta(b)).max())
    out.append(_check("dthermal_dbeta vs finite differences", worst_fd <= 1e-6, f"max {worst_fd:.3g}"))
    exps = []
    for idx in [(0, 1), (1, 0), (1, 3), (2, 5), (11, 12)]:
        beta = sds.beta_of_index(idx)
        norms = []
        for d in (1e-2, 1e-3):
            pc = solver.perturbative_correction(idx, d)
            norms.append(float(np.linalg.norm(solver.residual(pc, beta + d))))
        exps.append(math.log10(norms[0] / norms[1]))
    ok = all(1.7 <= e <= 2.3 for e in exps)
    out.append(_check("perturbative residual is O(dbeta^2)", ok, "exponents " + ", ".join(f"{e:.2f}" for e in exps)))
    failures = []
    for l in range(11):
        for n in range(11):
            if l == n:
                continue
            p = solver.ParameterVector.from_index((l, n))
            seed = solver.ParameterVector.from_array(p.as_array() * 1.01)
            rep = solver.newton_solve(sds.beta_of_index((l, n)), seed, tol=1e-12, max_iter=50)
            if not (rep.converged and np.abs(rep.solution.as_array() - p.as_array()).max() <= 1e-8):
                failures.append(f"({l},{n})")
    detail = f"{len(failures)} failures of 110" + (": " + " ".join(failures) if failures else "")
    out.append(_check("Newton recovers 1%-perturbed SDS roots", not failures, detail))
    return out


def suite_protocol(max_index: int = 20):
    worst_period = worst_twin = worst_u = 0.0
    for l in range(max_index + 1):
        for n in range(l + 1, max_index + 1):
            plan = protocol.cool_to_ground_plan((l, n))
            worst_period = max(worst_period, dynamics.final_r(plan.schedule).distance(state.GROUND))
            a = dynamics.evolve_schedule(protocol.thermalize_plan((l, n)).schedule, 200)
            b = dynamics.evolve_schedule(protocol.thermalize_plan((n, l)).schedule, 200)
            worst_twin = max(worst_twin, np.abs(a.x - b.x).max(), np.abs(a.y - b.y).max(), np.abs(a.z - b.z).max())
            u = a.energy[-1] / 0.5
            worst_u = max(worst_u, abs(u - sds.sds_params((l, n)).u_thermal))
    out = [
        _check("periodicity: 2 tau returns to ground", worst_period <= 1e-9, f"max {worst_period:.3g}"),
        _check("degenerate twins share R(t)", worst_twin <= 1e-10, f"max {worst_twin:.3g}"),
        _check("U(tau) equals the SDS thermal energy", worst_u <= 1e-9, f"max {worst_u:.3g}"),
    ]
    rng = np.random.default_rng(11)
    pool = [(l, n) for l in range(13) for n in range(13) if l != n]
    worst_seq = 0.0
    for _ in range(60):
        i, f = (pool[j] for j in rng.choice(len(pool), 2))
        plan = protocol.heat_cool_plan(i, f)
        end = dynamics.final_r(plan.schedule)
        worst_seq = max(worst_seq, end.distance(protocol.thermal_target(sds.beta_of_index(f))))
    out.append(_check("heating/cooling composition", worst_seq <= 1e-9, f"max {worst_seq:.3g} over 60 pairs"))
    return out


def suite_cli_io():
    rec = records.RunRecord("check", {"beta_eg": math.pi}, {"values": [1 / 3, math.e, 1e-300, -0.1]})
    back = records.RunRecord.from_json(rec.to_json())
    out = [_check("run record round trip", back == rec)]
    traj = dynamics.evolve_schedule(protocol.thermalize_plan((0, 1)).schedule, 5)
    header, rows = records.read_trajectory_csv(io.StringIO(records.trajectory_csv(traj)))
    out.append(_check("CSV schema", tuple(header) == records.TRAJECTORY_COLUMNS and len(rows) == len(traj)))
    return out


SUITES = {
    "core_state": suite_core_state,
    "dynamics": suite_dynamics,
    "sds": suite_sds,
    "solver": suite_solver,
    "protocol": suite_protocol,
    "cli_io": suite_cli_io,
}


def run(scope: str = "all") -> dict[str, list[Check]]:
    if scope == "all":
        names = list(SUITES)
    elif scope in SUITES:
        names = [scope]
    else:
        raise KeyError(scope)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda name: SUITES[name](), names))
    return dict(zip(names, results))
