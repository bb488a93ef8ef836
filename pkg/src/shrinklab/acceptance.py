"""Exit criteria of the laboratory, runnable from tests and ``shrinklab verify-all``.

Every criterion returns a list of :class:`Check`; ``margin`` is the slack by
which the check passes (negative when it fails).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .flow import FlowConfig, InstabilityError, eq4_residual, run, self_similar_profile
from .geometry import compute_geometry, identity_report
from .grid import Paraboloid, Plane, ScalarField, Sinusoid, SphereCap, discretize, interior_mask, make_grid, scaled_margin
from .newton import DirichletProblem, cross_validate, solve
from .shooting import Classification, ShootingProblem, integrate
from .weighted import (
    CutoffFamily,
    cutoff_energy,
    flatness_certificate,
    graph_volume,
    lemma2_check,
    lemma3_check,
    random_bumps,
    stability_sides,
)


@dataclass
class Check:
    name: str
    passed: bool
    margin: float
    citation: str
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.margin = float(self.margin)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "pass": bool(self.passed),
            "margin": float(self.margin),
            "citation": self.citation,
            "detail": self.detail,
        }


def _upper(name: str, value: float, limit: float, citation: str, **detail) -> Check:
    return Check(name, value <= limit, limit - value, citation, {"value": value, "limit": limit, **detail})


def _within(name: str, value: float, lo: float, hi: float, citation: str, **detail) -> Check:
    return Check(name, lo <= value <= hi, min(value - lo, hi - value), citation, {"value": value, "range": [lo, hi], **detail})


def _timed(name: str, seconds: float, limit: float, citation: str) -> Check:
    return _upper(name, seconds, limit, citation, unit="s")


# -- 1 -------------------------------------------------------------------------


def _cap_reports(m_base: int = 161, margin: int = 10, half_width: float = 1.2):
    spec = make_grid(2, half_width, m_base)
    fine = spec.refined()
    coarse_rep = identity_report(discretize(SphereCap(2), spec), margin)
    fine_rep = identity_report(discretize(SphereCap(2), fine), scaled_margin(fine, margin, m_base))
    return spec, coarse_rep, fine_rep


def criterion_1() -> list[Check]:
    t0 = time.perf_counter()
    _, coarse, fine = _cap_reports()
    elapsed = time.perf_counter() - t0
    tag = "shrinker-equation"
    return [
        _upper("c1.sup_S", coarse.shrinker_sup, 5e-3, tag),
        _within("c1.sup_S_ratio", coarse.shrinker_sup / fine.shrinker_sup, 3.4, 4.6, tag),
        _timed("c1.runtime", elapsed, 5.0, tag),
    ]


def criterion_2() -> list[Check]:
    spec = make_grid(2, 1.2, 161)
    geom = compute_geometry(discretize(SphereCap(2), spec))
    mask = interior_mask(spec, 10)
    r = math.sqrt(4.0)
    h_err = float(np.max(np.abs(geom.H[mask] / (2.0 / r) - 1.0)))
    a_err = float(np.max(np.abs(geom.a_norm_sq[mask] / (2.0 / r**2) - 1.0)))
    tag = "normal-form"
    return [_upper("c2.H_rel_err", h_err, 0.01, tag), _upper("c2.A2_rel_err", a_err, 0.02, tag)]


def criterion_3() -> list[Check]:
    _, coarse, fine = _cap_reports()
    out = []
    for key, tag in (("lf", "stability-operator"), ("lh", "stability-operator"), ("eq2", "log-density-identity")):
        c = getattr(coarse, f"{key}_l2")
        f = getattr(fine, f"{key}_l2")
        out.append(_upper(f"c3.{key}_l2", c, 5e-2, tag))
        out.append(Check(f"c3.{key}_ratio", c / f >= 3.0, c / f - 3.0, tag, {"value": c / f, "min": 3.0}))
    return out


# -- 4 -------------------------------------------------------------------------


def criterion_4() -> list[Check]:
    tag = "rigidity"
    t0 = time.perf_counter()
    out = []
    worst_dev = 0.0
    all_line = True
    for b in (-2.0, -1.0, 0.0, 0.5, 2.0):
        tr = integrate(ShootingProblem(0.0, b, 8.0))
        all_line &= tr.classification is Classification.LINE
        worst_dev = max(worst_dev, tr.line_deviation if tr.line_deviation is not None else math.inf)
    out.append(Check("c4.lines", all_line and worst_dev < 1e-7, 1e-7 - worst_dev, tag, {"max_deviation": worst_dev}))
    worst_shift = 0.0
    all_blow = True
    for a in (-1.0, -0.1, 0.1, 1.0):
        p = ShootingProblem(a, 0.0, 20.0)
        tr, tr_tight = integrate(p), integrate(p.tightened())
        ok = tr.classification is Classification.GRADIENT_BLOWUP and tr_tight.classification is Classification.GRADIENT_BLOWUP
        all_blow &= ok
        if ok:
            worst_shift = max(worst_shift, abs(tr.blowup_x - tr_tight.blowup_x) / abs(tr_tight.blowup_x))
        else:
            worst_shift = math.inf
    out.append(Check("c4.blowups", all_blow and worst_shift < 0.01, 0.01 - worst_shift, tag, {"max_rel_shift": worst_shift}))
    out.append(_timed("c4.runtime", time.perf_counter() - t0, 2.0, tag))
    return out


# -- 5 -------------------------------------------------------------------------

STABILITY_CONTEXTS = (("plane", Plane([0.7, -0.4]), 3.0), ("sphere_cap", SphereCap(2), 1.2))


def criterion_5(seed: int = 2024) -> list[Check]:
    tag = "weighted-stability"
    out = []
    for name, prof, half in STABILITY_CONTEXTS:
        bumps = random_bumps(20, 2, half, seed=seed)
        reps = {}
        for m in (81, 161):
            geom = compute_geometry(discretize(prof, make_grid(2, half, m)))
            reps[m] = [stability_sides(geom, b) for b in bumps]
        min_margin = min(r.margin for r in reps[81] + reps[161])
        change = max(abs(a.margin - b.margin) / abs(b.margin) for a, b in zip(reps[81], reps[161]))
        out.append(Check(f"c5.{name}.margin", min_margin >= -1e-9, min_margin + 1e-9, tag, {"min_margin": min_margin}))
        out.append(_upper(f"c5.{name}.resolution_change", change, 0.05, tag))
    return out


# -- 6 -------------------------------------------------------------------------


def criterion_6(nodes: int = 191, half_width: float = 9.5) -> list[Check]:
    tag = "cutoff-decay"
    family = CutoffFamily(tuple(float(j) for j in range(1, 9)))
    spec = make_grid(2, half_width, nodes)
    tilted = cutoff_energy(compute_geometry(discretize(Plane([0.3, 0.1]), spec)), family).values
    diffs = np.diff(tilted[2:])
    flat = cutoff_energy(compute_geometry(discretize(Plane(0.0), spec)), family).values
    exact = [4.0 * math.pi * (math.exp(-r * r / 4) - math.exp(-((r + 1) ** 2) / 4)) for r in family.radii]
    rel = max(abs(v / e - 1.0) for v, e in zip(flat, exact))
    return [
        Check("c6.monotone", bool(np.all(diffs < 0)), float(-diffs.max()), tag, {"values": list(tilted)}),
        _upper("c6.decay", tilted[-1] / tilted[0], 1e-5, tag),
        _upper("c6.flat_oracle_rel_err", rel, 0.02, tag),
    ]


# -- 7 -------------------------------------------------------------------------


def criterion_7() -> list[Check]:
    out = []
    spec = make_grid(2, 4.5, 181)
    for name, prof in (("flat", Plane(0.0)), ("tilted", Plane(1.0))):
        u = discretize(prof, spec)
        geom = compute_geometry(u)
        for R in (1.5, 2.0, 4.0):
            vol = graph_volume(geom, R)
            out.append(_upper(f"c7.{name}.R{R:g}.volume_rel_err", abs(vol / (math.pi * R * R) - 1.0), 0.01, "volume-growth"))
            rep = lemma2_check(geom, R)
            out.append(Check(f"c7.{name}.R{R:g}.area_bound", rep.passed and rep.bound > rep.volume, rep.bound - rep.volume, "volume-growth"))
        for rep in lemma3_check(u, (1.5, 2.0, 4.0)):
            out.append(Check(f"c7.{name}.R{rep.R:g}.height_bound", rep.passed and rep.margin > 0, rep.margin, "height-growth"))
    # a non-shrinker must violate the linear bound once R exceeds C1
    big = make_grid(2, 26.0, 105)
    para = ScalarField(big, big.points()[..., 0] ** 2)
    reps = lemma3_check(para, (2.0, 25.0))
    c1 = reps[0].c1
    teeth = reps[0].passed and not reps[1].passed and reps[1].R > c1
    out.append(Check("c7.teeth", teeth, -reps[1].margin, "height-growth", {"c1": c1, "lhs": reps[1].lhs, "rhs": reps[1].rhs}))
    return out


# -- 8 -------------------------------------------------------------------------

FLOW_SPACING = 0.05


def _flow(box_factor: float):
    cfg = FlowConfig.create(1, 2.0, FLOW_SPACING, rho=2.0, box_factor=box_factor)
    return cfg, run(cfg, Sinusoid(0.5, 0.4, 1.0))


def criterion_8() -> list[Check]:
    tag = "barrier-comparison"
    t0 = time.perf_counter()
    try:
        cfg, log = _flow(2.5)
        _, log_big = _flow(5.0)
    except InstabilityError as exc:
        return [Check("c8.stable", False, -1.0, "rescaled-flow", {"error": str(exc)})]
    elapsed = time.perf_counter() - t0
    clear = min(log.min_clearance, log_big.min_clearance)
    small = dict(zip(np.round(log.final.w.spec.axis, 9), log.final.w.values))
    large = dict(zip(np.round(log_big.final.w.spec.axis, 9), log_big.final.w.values))
    keys = [x for x in small if abs(x) <= cfg.R + 1e-9]
    diff = max(abs(small[x] - large[x]) for x in keys)
    scale = max(abs(large[x]) for x in keys)
    return [
        Check("c8.stable", True, 1.0, "rescaled-flow"),
        Check("c8.clearance", clear > 0, clear, tag, {"steps": len(log.rows) - 1}),
        _upper("c8.box_doubling_rel_change", diff / scale, 0.01, "rescaled-flow"),
        _timed("c8.runtime", elapsed, 30.0, "rescaled-flow"),
    ]


# -- 9 -------------------------------------------------------------------------


def criterion_9() -> list[Check]:
    tag = "rescaled-flow"
    spec = make_grid(2, 1.2, 161)
    plane = Plane([0.8, -0.3])
    exact = discretize(plane, spec).values
    R = 2.0
    worst = 0.0
    for t in np.linspace(0.0, R * R, 9):
        w = self_similar_profile(plane, R, float(t), spec).values
        worst = max(worst, float(np.max(np.abs(w - exact))))
    mask = interior_mask(spec, 10)
    res = float(np.max(np.abs(eq4_residual(SphereCap(2), R, 1.0, spec).values[mask])))
    return [_upper("c9.linear_invariance", worst, 1e-12, tag), _upper("c9.sphere_eq4", res, 5e-3, tag)]


# -- 10 / 11 -------------------------------------------------------------------


def criterion_10() -> list[Check]:
    tag = "shrinker-equation"
    spec = make_grid(2, 1.0, 81)
    plane = Plane([0.5, -1.0])
    sol, _ = solve(DirichletProblem.from_profile(plane, spec))
    lin_err = float(np.max(np.abs(sol.values - discretize(plane, spec).values)))
    reps = {}
    cap_err = None
    for m, margin in ((81, 8), (161, 16)):
        s = make_grid(2, 1.0, m)
        cap, _ = solve(DirichletProblem.from_profile(SphereCap(2), s))
        if m == 81:
            cap_err = float(np.max(np.abs(cap.values - discretize(SphereCap(2), s).values)))
        reps[m] = cross_validate(cap, margin)
    out = [_upper("c10.linear", lin_err, 1e-6, tag), _upper("c10.sphere_cap", cap_err, 5e-3, tag)]
    for key in ("lf_l2", "lh_l2", "eq2_l2"):
        ratio = getattr(reps[81], key) / getattr(reps[161], key)
        out.append(_within(f"c10.{key}_ratio", ratio, 3.0, 5.0, "stability-operator"))
    return out


def criterion_11() -> list[Check]:
    tag = "rigidity"
    out = []
    plane = Plane([0.4, 0.9])
    for L in (1.0, 2.0, 4.0):
        spec = make_grid(2, L, 81)
        sol, _ = solve(DirichletProblem.from_profile(plane, spec))
        cert = flatness_certificate(compute_geometry(sol))
        out.append(Check(f"c11.L{L:g}.flat", cert.flat and cert.a_mass < 1e-6, 1e-6 - cert.a_mass, tag, cert.to_dict()))
    cap = flatness_certificate(compute_geometry(discretize(SphereCap(2), make_grid(2, 1.2, 161))))
    out.append(Check("c11.sphere_cap.not_flat", not cap.flat, cap.a_mass, tag, cap.to_dict()))
    para = flatness_certificate(compute_geometry(discretize(Paraboloid(1.0), make_grid(2, 1.0, 81))))
    out.append(Check("c11.paraboloid.not_flat", not para.flat, para.a_mass, tag, para.to_dict()))
    return out


CRITERIA: dict[int, Callable[[], list[Check]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
}


def run_all() -> list[Check]:
    checks = []
    for k in sorted(CRITERIA):
        checks.extend(CRITERIA[k]())
    return checks
