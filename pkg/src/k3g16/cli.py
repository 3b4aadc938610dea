"""Pipeline orchestration: staged runs, persistence, and certificates.

A run is a pure function of (prime, rng_seed, stages, budgets): every stage
draws from per-purpose seeded streams, so two runs with the same config
emit byte-identical certificate files.  Stage outputs are serialized into
the certificate as plain integer arrays, and a saved state file can be
reloaded to resume the remaining stages without redoing earlier ones.
"""

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, fields

import numpy as np

from . import chow, cover, discrim, kummer, mukai, syzygy, t1, trivector, xquad
from .ffla import Subspace, matmul_mod, normalize_point, rank, rng_stream
from .mukai import AlphaTensor, Seed
from .multilinear import Trivector
from .report import check, note
from .syzygy import SymplecticPhi, SyzygySpace, s_prime_at
from .xquad import QuadricSystem, Ruling, XPoint

CERT_FORMAT = "k3g16-certificate"
STATE_FORMAT = "k3g16-state"
FORMAT_VERSION = 1

STAGES = (
    "quadrics",
    "syzygy",
    "cover",
    "trivectors",
    "orthogonality",
    "degrees",
    "kummer",
    "chow",
    "plucker",
    "probes",
)

DEPS = {
    "quadrics": (),
    "syzygy": ("quadrics",),
    "cover": ("quadrics", "syzygy"),
    "trivectors": ("quadrics", "syzygy"),
    "orthogonality": ("quadrics", "syzygy", "trivectors"),
    "degrees": ("quadrics", "syzygy", "trivectors"),
    "kummer": ("quadrics", "syzygy"),
    "chow": (),
    "plucker": ("quadrics",),
    "probes": ("quadrics", "syzygy", "trivectors"),
}

# stages whose failures flip the exit code; probes are observational
MANDATORY = tuple(s for s in STAGES if s != "probes")


class StateError(RuntimeError):
    """A state or certificate file cannot be used."""


@dataclass
class Budgets:
    points: int = 20  # surface points sampled in the quadrics stage
    retries: int = 8  # seed regeneration attempts
    degree_cap: int = 40  # Hilbert-plateau degree cap for slice degrees
    anchors: int = 3  # rank-6 anchors requested for the branch-cover stage
    secancy: int = 30  # line searches for the tangent-splitting probe

    def serialize(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @staticmethod
    def deserialize(data: dict) -> "Budgets":
        names = {f.name for f in fields(Budgets)}
        return Budgets(**{k: int(v) for k, v in data.items() if k in names})


@dataclass
class RunConfig:
    p: int = 101
    rng_seed: int = 0
    stages: tuple = STAGES
    budgets: Budgets = field(default_factory=Budgets)
    out: str = "k3g16-cert.json"

    def serialize(self) -> dict:
        return {
            "p": self.p,
            "rng_seed": self.rng_seed,
            "stages": list(self.stages),
            "budgets": self.budgets.serialize(),
        }


def _canon(obj):
    """Coerce a value into deterministic, JSON-portable form."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        v = int(obj)
        return str(v) if abs(v) > 2**53 else v
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, np.ndarray):
        return [_canon(x) for x in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_canon(x) for x in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(_canon(x) for x in obj)
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _combine_status(statuses: list[str]) -> str:
    if "fail" in statuses:
        return "fail"
    if "inconclusive" in statuses:
        return "inconclusive"
    if "skipped" in statuses:
        return "skipped"
    return "pass"


def merge_reports(reports: list[list[dict]]) -> list[dict]:
    """Fold per-sample reports into one record per check id.

    Equal values collapse to a scalar; diverging values are kept as the
    full list so the certificate stays honest about what was seen.
    """
    order: list[str] = []
    acc: dict[str, dict] = {}
    for rep in reports:
        for c in rep:
            cid = c["id"]
            if cid not in acc:
                acc[cid] = {
                    "id": cid,
                    "stage": c["stage"],
                    "statuses": [c["status"]],
                    "values": [c["value"]],
                    "expected": c["expected"],
                }
                order.append(cid)
            else:
                a = acc[cid]
                a["statuses"].append(c["status"])
                a["values"].append(c["value"])
                if c["expected"] != a["expected"]:
                    a["statuses"].append("fail")
    out = []
    for cid in order:
        a = acc[cid]
        vals = a["values"]
        value = vals[0] if all(v == vals[0] for v in vals) else vals
        out.append(
            {
                "id": cid,
                "stage": a["stage"],
                "status": _combine_status(a["statuses"]),
                "value": value,
                "expected": a["expected"],
            }
        )
    return out


class PipelineState:
    """Everything a run accumulates: checks, artifacts, and live objects."""

    def __init__(self, p: int, rng_seed: int, budgets: Budgets):
        self.p = p
        self.rng_seed = rng_seed
        self.budgets = budgets
        self.stages_done: list[str] = []
        self.stages_failed: list[str] = []
        self.checks: list[dict] = []
        self.artifacts: dict = {}
        self.timings: dict[str, float] = {}
        self.cache: dict = {}

    def add(self, report: list[dict], stage: str) -> None:
        for c in report:
            self.checks.append(
                {
                    "id": c["id"],
                    "stage": stage,
                    "status": c["status"],
                    "value": _canon(c["value"]),
                    "expected": _canon(c["expected"]),
                }
            )

    def failed(self) -> list[dict]:
        return [c for c in self.checks if c["status"] == "fail"]


# ---------------------------------------------------------------------------
# object accessors: cache -> artifacts -> error


def _need(state: PipelineState, key: str):
    if key not in state.artifacts:
        raise StateError(f"artifact '{key}' missing; run its stage first")
    return state.artifacts[key]


def _seed(state: PipelineState) -> Seed:
    if "seed" not in state.cache:
        state.cache["seed"] = Seed.deserialize(_need(state, "seed"))
    return state.cache["seed"]


def _alpha(state: PipelineState) -> AlphaTensor:
    if "alpha" not in state.cache:
        data = _need(state, "alpha")
        state.cache["alpha"] = AlphaTensor(
            p=state.p,
            tensor=np.array(data["tensor"], dtype=np.int64),
            m_nonpivots=tuple(int(v) for v in data["m_nonpivots"]),
        )
    return state.cache["alpha"]


def _qs(state: PipelineState) -> QuadricSystem:
    if "qs" not in state.cache:
        data = _need(state, "quadric_system")
        state.cache["qs"] = QuadricSystem(
            p=state.p,
            space=Subspace.from_rows(np.array(data["basis"], dtype=np.int64), state.p),
            plane_spaces=tuple(
                Subspace.from_rows(np.array(b, dtype=np.int64), state.p)
                for b in data["plane_spaces"]
            ),
            planes=np.array(data["planes"], dtype=np.int64),
            planes_to_span=int(data["planes_to_span"]),
        )
    return state.cache["qs"]


def _xpoints(state: PipelineState) -> list[XPoint]:
    if "xpoints" not in state.cache:
        state.cache["xpoints"] = [
            XPoint(
                coords=np.array(d["coords"], dtype=np.int64),
                source_x=np.array(d["source"], dtype=np.int64),
            )
            for d in _need(state, "x_points")
        ]
    return state.cache["xpoints"]


def _rulings(state: PipelineState) -> list[Ruling]:
    if "rulings" not in state.cache:
        out = []
        for pts in _need(state, "rulings"):
            arr = np.array(pts, dtype=np.int64)
            out.append(Ruling(points=arr, space=Subspace.from_rows(arr, state.p)))
        state.cache["rulings"] = out
    return state.cache["rulings"]


def _pencil(state: PipelineState) -> Subspace:
    if "pencil" not in state.cache:
        state.cache["pencil"] = Subspace.from_rows(
            np.array(_need(state, "pencil"), dtype=np.int64), state.p
        )
    return state.cache["pencil"]


def _syz(state: PipelineState) -> SyzygySpace:
    if "syz" not in state.cache:
        gamma = np.array(_need(state, "syzygies")["gamma"], dtype=np.int64)
        state.cache["syz"] = SyzygySpace(
            p=state.p,
            space=Subspace.from_rows(gamma.reshape(8, 100), state.p),
            gamma=gamma,
        )
    return state.cache["syz"]


def _phi(state: PipelineState) -> SymplecticPhi:
    if "phi" not in state.cache:
        state.cache["phi"] = SymplecticPhi(
            p=state.p, matrix=np.array(_need(state, "phi"), dtype=np.int64)
        )
    return state.cache["phi"]


def _t2(state: PipelineState) -> Trivector:
    if "t2" not in state.cache:
        state.cache["t2"] = Trivector.from_vec(
            np.array(_need(state, "t2"), dtype=np.int64), state.p
        )
    return state.cache["t2"]


def _t1(state: PipelineState) -> Trivector:
    if "t1" not in state.cache:
        state.cache["t1"] = Trivector.from_vec(
            np.array(_need(state, "t1"), dtype=np.int64), state.p, dual=True
        )
    return state.cache["t1"]


def _t1run(state: PipelineState) -> t1.T1Run:
    if "t1run" not in state.cache:
        state.cache["t1run"] = t1.run_algorithm(
            _seed(state), _alpha(state), _qs(state), rng_seed=state.rng_seed
        )
    return state.cache["t1run"]


def _peskine(state: PipelineState, which: str, n: int, rng_seed: int):
    key = f"peskine/{which}/{n}/{rng_seed}"
    if key not in state.cache:
        tens = _t2(state) if which == "t2" else _t1(state)
        state.cache[key] = trivector.peskine_sample(tens, n, rng_seed=rng_seed)
    return state.cache[key]


# ---------------------------------------------------------------------------
# stages


def stage_quadrics(state: PipelineState) -> None:
    p, rng_seed, budgets = state.p, state.rng_seed, state.budgets
    seed = mukai.generate_seed(p, rng_seed, retries=budgets.retries)
    state.cache["seed"] = seed
    state.artifacts["seed"] = seed.serialize()
    state.add(mukai.validate_seed(seed, raise_on_fail=False), "quadrics")
    state.add([note("seed.attempts", seed.attempts, "quadrics")], "quadrics")

    alpha = mukai.build_alpha(seed)
    state.cache["alpha"] = alpha
    state.artifacts["alpha"] = {
        "tensor": _canon(alpha.tensor),
        "m_nonpivots": list(alpha.m_nonpivots),
    }

    qs = xquad.assemble_v10(seed, alpha)
    state.cache["qs"] = qs
    state.artifacts["quadric_system"] = {
        "basis": _canon(qs.space.basis),
        "plane_spaces": [_canon(sp.basis) for sp in qs.plane_spaces],
        "planes": _canon(qs.planes),
        "planes_to_span": qs.planes_to_span,
    }
    state.add(
        [
            check("quadrics.v10_dim", qs.space.dim, 10, "quadrics"),
            check(
                "quadrics.plane_system_dims",
                sorted({sp.dim for sp in qs.plane_spaces}),
                [4],
                "quadrics",
            ),
        ],
        "quadrics",
    )

    state.add(xquad.hilbert_check(qs, 6, rng_seed=rng_seed), "quadrics")
    state.add(
        [
            note(
                "hilbert.m6_expansion_discrepancy",
                {"combination": 875, "expanded": 880},
                "quadrics",
            )
        ],
        "quadrics",
    )

    xpoints = xquad.sample_x_points(seed, alpha, qs, budgets.points)
    state.cache["xpoints"] = xpoints
    state.artifacts["x_points"] = [
        {"coords": _canon(pt.coords), "source": _canon(pt.source_x)} for pt in xpoints
    ]
    on_x = all(not np.any(qs.evaluate_at(pt.coords)) for pt in xpoints)
    rulings = []
    seen = set()
    for pt in xpoints:
        r = xquad.ruling_through(qs, pt)
        if r.key() not in seen:
            seen.add(r.key())
            rulings.append(r)
    state.cache["rulings"] = rulings
    state.artifacts["rulings"] = [_canon(r.points) for r in rulings]
    state.add(
        [
            check("quadrics.points_on_all_quadrics", on_x, True, "quadrics"),
            check("quadrics.point_count", len(xpoints), state.budgets.points, "quadrics"),
            check(
                "quadrics.rulings_on_all_quadrics",
                all(xquad.line_on_quadrics(qs, r) for r in rulings),
                True,
                "quadrics",
            ),
            note("quadrics.distinct_rulings", len(rulings), "quadrics"),
        ],
        "quadrics",
    )

    pen = xquad.pencil(qs)
    state.cache["pencil"] = pen
    state.artifacts["pencil"] = _canon(pen.basis)
    ranks = xquad.pencil_rank_profile(qs, pen, rng_seed=rng_seed)
    state.add(
        [
            check("pencil.dim", pen.dim, 2, "quadrics"),
            check("pencil.member_ranks", sorted(ranks), [8], "quadrics"),
        ],
        "quadrics",
    )


def stage_syzygy(state: PipelineState) -> None:
    p, rng_seed = state.p, state.rng_seed
    qs, xpoints = _qs(state), _xpoints(state)
    syz = syzygy.linear_syzygies(qs)
    state.cache["syz"] = syz
    state.artifacts["syzygies"] = {"gamma": _canon(syz.gamma)}

    phi = syzygy.phi_compute(syz, qs)
    state.cache["phi"] = phi
    state.artifacts["phi"] = _canon(phi.matrix)
    state.add(
        [
            check("phi.solution_dim", 1, 1, "syzygy"),
            check("phi.skew", not np.any((phi.matrix + phi.matrix.T) % p), True, "syzygy"),
            check("phi.invertible", rank(phi.matrix, p), 8, "syzygy"),
        ],
        "syzygy",
    )

    t2 = syzygy.t2_compute(syz, qs, phi)
    state.cache["t2"] = t2
    state.artifacts["t2"] = _canon(t2.to_vec())
    flat = np.array(t2.flattening(), dtype=np.int64)
    state.add(
        [
            check("t2.flattening_rank", rank(flat, p), 10, "syzygy"),
            check("t2.flattening_kernel_dim", 45 - rank(flat, p), 35, "syzygy"),
        ],
        "syzygy",
    )

    state.add(syzygy.quadratic_syzygy_check(syz, qs, t2), "syzygy")
    state.add(syzygy.isotropy_check(syz, phi, xpoints), "syzygy")

    vertex_pts = xpoints[:10]
    state.add(merge_reports([syzygy.vertex_fiber_check(syz, qs, x) for x in vertex_pts]), "syzygy")
    state.add(
        merge_reports(
            [
                syzygy.ruling_constancy_check(syz, qs, x, xquad.ruling_through(qs, x))
                for x in vertex_pts
            ]
        ),
        "syzygy",
    )
    state.add(
        merge_reports([discrim.x60_membership(syz, qs, x) for x in xpoints[:2]]), "syzygy"
    )
    rulings = _rulings(state)
    if len(rulings) >= 2:
        state.add(syzygy.global_generation_check(qs, rulings[0], rulings[1]), "syzygy")


def stage_cover(state: PipelineState) -> None:
    p = state.p
    qs, syz, t2 = _qs(state), _syz(state), _t2(state)
    rng = rng_stream(state.rng_seed, "cli/cover-involution")
    squared_ok = composed_ok = tried = skipped = 0
    while tried < 100:
        pt = rng.integers(0, p, size=10)
        if not pt.any():
            continue
        tried += 1
        try:
            ivl = cover.involute(syz, qs, pt)
            twice = cover.involute(syz, qs, ivl)
            if np.array_equal(normalize_point(twice, p), normalize_point(pt % p, p)):
                squared_ok += 1
            if np.array_equal(cover.f_x(qs, ivl), cover.f_x(qs, pt)):
                composed_ok += 1
        except (cover.OnBaseLocus, cover.LineInX, mukai.NonGenericPoint):
            skipped += 1
    state.add(
        [
            check("cover.involution_squared", squared_ok, 100 - skipped, "cover"),
            check("cover.composition_invariant", composed_ok, 100 - skipped, "cover"),
            note("cover.skipped_draws", skipped, "cover"),
        ],
        "cover",
    )

    rng2 = rng_stream(state.rng_seed, "cli/cover-congruence")
    reports = []
    while len(reports) < 3:
        pt = rng2.integers(0, p, size=10)
        if not pt.any():
            continue
        try:
            reports.append(cover.invariant_line_congruence_check(syz, qs, t2, pt))
        except (cover.OnBaseLocus, cover.LineInX, mukai.NonGenericPoint):
            continue
    state.add(merge_reports(reports), "cover")


def stage_trivectors(state: PipelineState) -> None:
    p, rng_seed = state.p, state.rng_seed
    qs = _qs(state)
    run = t1.run_algorithm(_seed(state), _alpha(state), qs, rng_seed=rng_seed)
    state.cache["t1run"] = run
    state.cache["t1"] = run.t1
    state.artifacts["t1"] = _canon(run.t1.to_vec())
    state.artifacts["t1_sample"] = {
        "points": [_canon(pt.coords) for pt in run.points],
        "rulings": [_canon(r.points) for r in run.rulings],
    }

    flat = np.array(run.t1.flattening(), dtype=np.int64)
    state.add(
        [
            check("t1.k_space_count", len(run.k_spaces), 10, "trivectors"),
            check("t1.k_space_dims", sorted({k.dim for k in run.k_spaces}), [6], "trivectors"),
            check("t1.delta_count", len(run.deltas), 45, "trivectors"),
            check("t1.delta_dims", sorted({d.dim for d in run.deltas}), [2], "trivectors"),
            check("t1.v35_dim", run.v35.dim, 35, "trivectors"),
            check("t1.n10_dim", run.n10.dim, 10, "trivectors"),
            check("t1.flattening_rank", rank(flat, p), 10, "trivectors"),
            check(
                "t1.flattening_rows_span_n10",
                Subspace.from_rows(flat, p) == run.n10,
                True,
                "trivectors",
            ),
        ],
        "trivectors",
    )

    fresh = [pt for pt in _xpoints(state) if all(pt.key() != q.key() for q in run.points)]
    state.add(t1.verify_t1(qs, run, fresh=fresh[0] if fresh else None), "trivectors")

    pen = _pencil(state)
    pen10 = Subspace.from_rows(qs.space.coords(pen.basis), p)
    g, roots = trivector.line_secancy(run.t1, pen10)
    deg = len(g) - 1
    state.add(
        [
            check("pencil.secancy_degree", deg, 4, "trivectors"),
            check(
                "pencil.secancy_closure_points",
                roots.count_with_multiplicity if roots else 0,
                4,
                "trivectors",
            ),
        ],
        "trivectors",
    )


def stage_orthogonality(state: PipelineState) -> None:
    p = state.p
    syz, qs, t2_, t1_ = _syz(state), _qs(state), _t2(state), _t1(state)
    state.add(
        merge_reports([syzygy.dv_sixplane_check(syz, qs, t2_, x) for x in _xpoints(state)[:10]]),
        "orthogonality",
    )
    comp = trivector.compose(t2_, t1_)
    perp = trivector.perp_space(t2_)
    meet_dim, contains = trivector.orbit_tangent_intersection(t1_, perp)
    state.add(
        [
            check("orth.compose_zero", not comp.any(), True, "orthogonality"),
            check("orth.perp_dim", perp.dim, 20, "orthogonality"),
            check("orth.perp_contains_t1", perp.contains(t1_.to_vec()), True, "orthogonality"),
            check("orth.orbit_meet_dim", meet_dim, 1, "orthogonality"),
            check("orth.orbit_meet_contains_t1", contains, True, "orthogonality"),
        ],
        "orthogonality",
    )


def _plateau_value(res) -> object:
    return res.value if res.conclusive else "inconclusive"


def stage_degrees(state: PipelineState) -> None:
    rng_seed = state.rng_seed
    cap = state.budgets.degree_cap
    qs, syz, t2_, t1_ = _qs(state), _syz(state), _t2(state), _t1(state)
    seeds = (rng_seed, rng_seed + 1)

    def pair(name: str, results, expected: int) -> list[dict]:
        a, b = (_plateau_value(r) for r in results)
        agree = a == b and a != "inconclusive"
        return [
            check(f"degrees.{name}.slice_a", a, expected, "degrees"),
            check(f"degrees.{name}.slice_b", b, expected, "degrees"),
            check(f"degrees.{name}.slices_agree", agree, True, "degrees"),
        ]

    for label, tens in (("t2", t2_), ("t1", t1_)):
        vals = [trivector.peskine_slice_degree(tens, rng_seed=s, cap=14) for s in seeds]
        state.add(pair(f"peskine_{label}", vals, 15), "degrees")

    fit1 = [discrim.fit1_slice_degree(qs, rng_seed=s, cap=16) for s in seeds]
    state.add(pair("fit1", fit1, 165), "degrees")

    sing = [discrim.sing_slice_degree(qs, rng_seed=s, cap=cap) for s in seeds]
    state.add(pair("sing", sing, 225), "degrees")

    pesk = _peskine(state, "t2", 3, rng_seed)
    sprime_vals = []
    for tag, s in zip(("a", "b"), seeds):
        rep = discrim.fit0_sprime_checks(syz, pesk, rng_seed=s)
        sprime_vals.extend(c["value"] for c in rep if c["id"] == "discrim.sprime_slice_degree")
        for c in rep:
            c["id"] = f"{c['id']}.slice_{tag}"
        state.add(rep, "degrees")
    agree = len(set(sprime_vals)) == 1 and len(sprime_vals) == 2
    state.add([check("degrees.sprime.slices_agree", agree, True, "degrees")], "degrees")


def stage_kummer(state: PipelineState) -> None:
    rng_seed = state.rng_seed
    syz, qs, t2_ = _syz(state), _qs(state), _t2(state)

    anchors = []
    used_seed = None
    for s in (rng_seed, rng_seed + 1):
        anchors = _peskine(state, "t2", state.budgets.anchors, s)
        if anchors:
            used_seed = s
            break
        state.add(
            [
                note(
                    "kummer.anchor_search",
                    f"skipped: no rational rank-6 point for stream {s}",
                    "kummer",
                    status="skipped",
                )
            ],
            "kummer",
        )
    state.add(
        [check("kummer.anchor_found", bool(anchors), True, "kummer")], "kummer"
    )
    if not anchors:
        return
    state.add([note("kummer.anchor_stream", used_seed, "kummer")], "kummer")

    bundle = None
    last_error = None
    for idx, anchor in enumerate(anchors):
        try:
            fr = kummer.frame(syz, qs, anchor.coords)
            W = kummer.weddle(fr)
            K, lam = kummer.kummer_quartic(fr, W)
            bundle = (idx, fr, W, K, lam)
            break
        except (kummer.NotOnPeskine, mukai.NonGenericPoint) as e:
            last_error = e
    state.add(
        [
            check(
                "kummer.frame_built",
                True if bundle else f"{type(last_error).__name__}: {last_error}",
                True,
                "kummer",
            )
        ],
        "kummer",
    )
    if bundle is None:
        return
    idx, fr, W, K, lam = bundle
    state.add([note("kummer.anchor_index", idx, "kummer")], "kummer")

    state.add(kummer.frame_report(fr), "kummer")
    state.add(kummer.weddle_report(fr, W), "kummer")
    state.add(kummer.kummer_checks(fr, W, K, lam), "kummer")
    cubic = None
    try:
        cubic, rep = kummer.cubic_surface(fr, t2_)
        state.add(rep, "kummer")
    except mukai.NonGenericPoint as e:
        state.add(
            [note("kummer.cubic_surface", f"skipped: {e}", "kummer", status="skipped")],
            "kummer",
        )

    state.artifacts["kummer"] = {
        "anchor": _canon(fr.q),
        "emb": _canon(fr.emb),
        "restricted": _canon(fr.restricted),
        "iso": _canon(fr.iso),
        "weddle": _canon(W.to_vec()),
        "quartic": _canon(K.to_vec()),
        "lambda": lam,
        "cubic": _canon(cubic.to_vec()) if cubic is not None else None,
    }


def stage_chow(state: PipelineState) -> None:
    state.add(chow.run_all(), "chow")


def stage_plucker(state: PipelineState) -> None:
    state.add(
        xquad.plucker_model(_rulings(state), state.p, rng_seed=state.rng_seed), "plucker"
    )


def stage_probes(state: PipelineState) -> None:
    rng_seed = state.rng_seed
    qs, syz, t2_ = _qs(state), _syz(state), _t2(state)
    xpoints = _xpoints(state)
    t1_pesk = _peskine(state, "t1", 2, rng_seed)
    chords = [(xpoints[0], xpoints[1])] if len(xpoints) >= 2 else []
    state.add(discrim.conjecture_probes(qs, t1_pesk, chords, rng_seed=rng_seed), "probes")
    state.add(
        kummer.tangent_decomposition(
            syz, qs, t2_, rng_seed=rng_seed, budget=state.budgets.secancy
        ),
        "probes",
    )
    run = _t1run(state)
    state.add([t1.rerun_agreement(_seed(state), _alpha(state), qs, run, rng_seed + 1)], "probes")


STAGE_FNS = {
    "quadrics": stage_quadrics,
    "syzygy": stage_syzygy,
    "cover": stage_cover,
    "trivectors": stage_trivectors,
    "orthogonality": stage_orthogonality,
    "degrees": stage_degrees,
    "kummer": stage_kummer,
    "chow": stage_chow,
    "plucker": stage_plucker,
    "probes": stage_probes,
}


def plan(requested) -> list[str]:
    """Dependency closure of the requested stages, in canonical order."""
    want = set(requested)
    bad = want - set(STAGES)
    if bad:
        raise ValueError(f"unknown stages: {sorted(bad)}")
    grow = True
    while grow:
        grow = False
        for s in tuple(want):
            for d in DEPS[s]:
                if d not in want:
                    want.add(d)
                    grow = True
    return [s for s in STAGES if s in want]


def execute(state: PipelineState, stages: list[str]) -> None:
    for name in stages:
        if name in state.stages_done:
            continue
        missing = [d for d in DEPS[name] if d not in state.stages_done]
        broken = [d for d in DEPS[name] if d in state.stages_failed]
        if missing or broken:
            reason = f"dependencies not satisfied: {missing + broken}"
            state.add([note(f"{name}.stage", reason, name, status="skipped")], name)
            state.stages_failed.append(name)
            continue
        t0 = time.monotonic()
        try:
            STAGE_FNS[name](state)
            state.stages_done.append(name)
        except Exception as e:  # record, keep independent stages running
            state.add(
                [
                    {
                        "id": f"{name}.stage",
                        "stage": name,
                        "status": "fail",
                        "value": f"{type(e).__name__}: {e}",
                        "expected": "completed",
                    }
                ],
                name,
            )
            state.stages_failed.append(name)
        state.timings[name] = round(time.monotonic() - t0, 3)


def mandatory_ok(state: PipelineState) -> bool:
    return not any(c["status"] == "fail" for c in state.checks if c["stage"] != "probes")


def build_certificate(state: PipelineState, config: RunConfig) -> dict:
    return {
        "format": CERT_FORMAT,
        "version": FORMAT_VERSION,
        "config": config.serialize(),
        "stages_done": list(state.stages_done),
        "stages_failed": list(state.stages_failed),
        "checks": state.checks,
        "artifacts": state.artifacts,
        "mandatory_pass": mandatory_ok(state),
    }


def dumps_canonical(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True) + "\n"


def run(config: RunConfig) -> tuple[dict, PipelineState]:
    state = PipelineState(config.p, config.rng_seed, config.budgets)
    execute(state, plan(config.stages))
    return build_certificate(state, config), state


def save_state(state: PipelineState, path: str) -> None:
    payload = {
        "format": STATE_FORMAT,
        "version": FORMAT_VERSION,
        "p": state.p,
        "rng_seed": state.rng_seed,
        "budgets": state.budgets.serialize(),
        "stages_done": list(state.stages_done),
        "stages_failed": list(state.stages_failed),
        "checks": state.checks,
        "artifacts": state.artifacts,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(payload))


def load_state(path: str, expect_p: int | None = None) -> PipelineState:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise StateError(f"cannot read state file: {e}") from e
    if not isinstance(data, dict) or data.get("format") != STATE_FORMAT:
        raise StateError("not a pipeline state file")
    if data.get("version") != FORMAT_VERSION:
        raise StateError(f"state version {data.get('version')} != {FORMAT_VERSION}")
    p = int(data["p"])
    if expect_p is not None and p != expect_p:
        raise StateError(f"state prime {p} != requested {expect_p}")
    state = PipelineState(p, int(data["rng_seed"]), Budgets.deserialize(data["budgets"]))
    state.stages_done = list(data["stages_done"])
    state.stages_failed = list(data["stages_failed"])
    state.checks = list(data["checks"])
    state.artifacts = dict(data["artifacts"])
    return state


# ---------------------------------------------------------------------------
# verification of an emitted certificate


def _reverify(cert: dict) -> list[tuple[str, bool, str]]:
    """Independent spot re-checks of a certificate from its artifacts."""
    results: list[tuple[str, bool, str]] = []

    def rec(name: str, ok: bool, detail: str = "") -> None:
        results.append((name, bool(ok), detail))

    consistent = all(
        c["value"] == c["expected"]
        for c in cert["checks"]
        if c["status"] == "pass" and c["expected"] is not None
    )
    rec("checks.value_matches_expected", consistent)

    art = cert.get("artifacts", {})
    p = int(cert["config"]["p"])

    if "quadric_system" in art:
        basis = np.array(art["quadric_system"]["basis"], dtype=np.int64)
        rec("v10.rank", rank(basis, p) == 10)
        space = Subspace.from_rows(basis, p)
        qs = QuadricSystem(
            p=p,
            space=space,
            plane_spaces=(),
            planes=np.zeros((0, 4), dtype=np.int64),
            planes_to_span=0,
        )
        if "x_points" in art:
            pts = np.array([d["coords"] for d in art["x_points"]], dtype=np.int64)
            rec("x_points.on_quadrics", not np.any(qs.evaluate_at(pts)))
        if "rulings" in art:
            ok = True
            for pts in art["rulings"]:
                a, b = np.array(pts, dtype=np.int64)
                samples = np.array([a, b, (a + b) % p, (a + 2 * b) % p], dtype=np.int64)
                ok = ok and not np.any(qs.evaluate_at(samples))
            rec("rulings.on_quadrics", ok)
        if "pencil" in art:
            pen = np.array(art["pencil"], dtype=np.int64)
            rec("pencil.inside_system", space.contains_space(Subspace.from_rows(pen, p)))
        if "syzygies" in art:
            gamma = np.array(art["syzygies"]["gamma"], dtype=np.int64)
            rng = rng_stream(0, "cli/verify-syzygy")
            ok = True
            for _ in range(20):
                w = rng.integers(0, p, size=10)
                qvals = qs.evaluate_at(w)
                lin = matmul_mod(gamma.reshape(-1, 10), w.reshape(10, 1), p).reshape(8, 10)
                ok = ok and not np.any(matmul_mod(lin, qvals.reshape(10, 1), p))
            rec("syzygies.annihilate_quadrics", ok)
        if "phi" in art:
            phi = np.array(art["phi"], dtype=np.int64)
            rec("phi.skew_invertible", not np.any((phi + phi.T) % p) and rank(phi, p) == 8)
        if "t2" in art:
            t2_ = Trivector.from_vec(np.array(art["t2"], dtype=np.int64), p)
            rec("t2.flattening_rank", rank(np.array(t2_.flattening(), dtype=np.int64), p) == 10)
            if "t1" in art:
                t1_ = Trivector.from_vec(np.array(art["t1"], dtype=np.int64), p, dual=True)
                rec("t1_t2.composition_zero", not trivector.compose(t2_, t1_).any())
        if "kummer" in art and "syzygies" in art:
            kart = art["kummer"]
            gamma = np.array(art["syzygies"]["gamma"], dtype=np.int64)
            syz = SyzygySpace(p=p, space=Subspace.from_rows(gamma.reshape(8, 100), p), gamma=gamma)
            anchor = np.array(kart["anchor"], dtype=np.int64)
            rec("kummer.anchor_rank6", rank(s_prime_at(syz, anchor), p) == 6)
            restricted = np.array(kart["restricted"], dtype=np.int64)
            from .mpoly import MPoly

            W = MPoly.from_vec(np.array(kart["weddle"], dtype=np.int64), 4, 4, p)
            K = MPoly.from_vec(np.array(kart["quartic"], dtype=np.int64), 4, 4, p)
            lam = int(kart["lambda"])
            sysspace = Subspace.from_rows(restricted, p)
            grams = np.array(
                [MPoly.from_vec(b, 4, 2, p).gram() for b in sysspace.basis], dtype=np.int64
            )
            rng = rng_stream(0, "cli/verify-kummer")
            ok = True
            for _ in range(10):
                z = rng.integers(0, p, size=4) % p
                if not z.any():
                    continue
                ft = kummer._quadric_values(grams, z.reshape(1, 4), p)
                if not ft.any():
                    continue
                kval = int(kummer._eval_form(K, ft)[0])
                wval = int(kummer._eval_form(W, z.reshape(1, 4))[0])
                ok = ok and kval == lam * wval * wval % p
            rec("kummer.pullback_identity", ok)

    return results


def _load_certificate(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise StateError(f"cannot read certificate: {e}") from e
    if not isinstance(data, dict) or data.get("format") != CERT_FORMAT:
        raise StateError("not a certificate file")
    if data.get("version") != FORMAT_VERSION:
        raise StateError(f"certificate version {data.get('version')} != {FORMAT_VERSION}")
    return data


def cmd_verify(path: str) -> int:
    cert = _load_certificate(path)
    results = _reverify(cert)
    ok_all = True
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  {detail}" if detail else ""))
        ok_all = ok_all and ok
    fails = [c for c in cert["checks"] if c["status"] == "fail"]
    print(f"recorded checks: {len(cert['checks'])}, failures: {len(fails)}")
    return 0 if ok_all and cert.get("mandatory_pass", False) else 1


def cmd_report(path: str) -> int:
    cert = _load_certificate(path)
    cfg = cert["config"]
    print(f"p = {cfg['p']}, rng_seed = {cfg['rng_seed']}")
    print(f"stages done: {', '.join(cert['stages_done']) or 'none'}")
    if cert["stages_failed"]:
        print(f"stages failed/skipped: {', '.join(cert['stages_failed'])}")
    by_stage: dict[str, dict[str, int]] = {}
    for c in cert["checks"]:
        d = by_stage.setdefault(c["stage"], {})
        d[c["status"]] = d.get(c["status"], 0) + 1
    for stage in STAGES:
        if stage not in by_stage:
            continue
        counts = by_stage[stage]
        total = sum(counts.values())
        extra = "".join(
            f", {k}: {v}" for k, v in sorted(counts.items()) if k != "pass"
        )
        print(f"  {stage:<14} {counts.get('pass', 0)}/{total} pass{extra}")
    for c in cert["checks"]:
        if c["status"] == "fail":
            print(f"  FAIL {c['id']}: value {c['value']!r}, expected {c['expected']!r}")
    print("mandatory checks:", "pass" if cert.get("mandatory_pass") else "FAIL")
    return 0


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="k3g16")
    sub = ap.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--prime", type=int, default=101)
        sp.add_argument("--seed", type=int, default=0, help="rng seed for all sampling")
        sp.add_argument("--stages", default="all", help="comma-separated stage list or 'all'")
        sp.add_argument("--out", default="k3g16-cert.json")
        sp.add_argument("--save-state", default=None, help="also write a resumable state file")
        sp.add_argument("--budget-points", type=int, default=20)
        sp.add_argument("--budget-retries", type=int, default=8)
        sp.add_argument("--budget-degree-cap", type=int, default=40)
        sp.add_argument("--budget-anchors", type=int, default=3)
        sp.add_argument("--budget-secancy", type=int, default=30)

    sp_run = sub.add_parser("run", help="execute stages from scratch")
    common(sp_run)

    sp_res = sub.add_parser("resume", help="load a state file and run remaining stages")
    common(sp_res)
    sp_res.add_argument("--state", required=True, help="state file from --save-state")

    sp_ver = sub.add_parser("verify", help="re-check a certificate from its artifacts")
    sp_ver.add_argument("certificate")

    sp_rep = sub.add_parser("report", help="human-readable certificate summary")
    sp_rep.add_argument("certificate")
    return ap


def _stages_arg(text: str) -> tuple:
    if text.strip() == "all":
        return STAGES
    return tuple(s.strip() for s in text.split(",") if s.strip())


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        p=args.prime,
        rng_seed=args.seed,
        stages=_stages_arg(args.stages),
        budgets=Budgets(
            points=args.budget_points,
            retries=args.budget_retries,
            degree_cap=args.budget_degree_cap,
            anchors=args.budget_anchors,
            secancy=args.budget_secancy,
        ),
        out=args.out,
    )


def _emit(cert: dict, state: PipelineState, config: RunConfig, save_path: str | None) -> int:
    with open(config.out, "w", encoding="utf-8") as fh:
        fh.write(dumps_canonical(cert))
    with open(config.out + ".timings.json", "w", encoding="utf-8") as fh:
        json.dump(state.timings, fh, sort_keys=True, indent=1)
        fh.write("\n")
    if save_path:
        save_state(state, save_path)
    fails = state.failed()
    print(f"certificate: {config.out} ({len(state.checks)} checks, {len(fails)} failures)")
    for c in fails:
        print(f"  FAIL {c['id']}: value {c['value']!r}, expected {c['expected']!r}")
    return 0 if mandatory_ok(state) else 1


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.verb == "run":
            config = _config_from_args(args)
            cert, state = run(config)
            return _emit(cert, state, config, args.save_state)
        if args.verb == "resume":
            config = _config_from_args(args)
            state = load_state(args.state, expect_p=args.prime)
            state.budgets = Budgets(
                points=args.budget_points,
                retries=args.budget_retries,
                degree_cap=args.budget_degree_cap,
                anchors=args.budget_anchors,
                secancy=args.budget_secancy,
            )
            execute(state, plan(_stages_arg(args.stages)))
            cert = build_certificate(state, config)
            return _emit(cert, state, config, args.save_state)
        if args.verb == "verify":
            return cmd_verify(args.certificate)
        if args.verb == "report":
            return cmd_report(args.certificate)
    except (StateError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
