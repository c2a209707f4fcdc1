"""FastAPI service wrapping the lab.

Every endpoint takes a pydantic request, runs the corresponding checks,
and returns a deterministic report; the CLI is a thin client of this app
(in-process by default, over HTTP against a running server with --server).
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException

from . import __version__
from .approx import (
    DistSpec,
    SetFamily,
    is_sunflower,
    pluck,
    approximate_circuit,
)
from .circuits import BoolCircuit, expand_circuit, random_identity_test
from .codes import (
    binary_expand_code,
    check_t_wise_independence,
    code_stats,
    code_to_json,
    rs_code,
    rs_distance,
    rs_dual_distance,
    rs_generator,
)
from .errors import MonoforgeError
from .gf2 import BitMatrix
from .graphs import Graph
from .graphpoly import build_Q, build_sps_circuit, substitute_Q_to_P
from .poly import poly_equal
from .presets import PRESETS, SPS_WIRE_CONSTANT, run_experiment_preset
from .rankfn import (
    DistParams,
    RealMatrix01,
    cauchy_binet_poly,
    check_well_behaved,
    d0_support_f2,
    d0_support_real,
    f_M_eval,
    sample_D0,
    sample_D1,
    sample_sparse_matrix,
    spreadness_exact,
)
from .report import check, make_report, sanitize
from .schemas import (
    ApproxRunRequest,
    CbVerifyRequest,
    CodeIndependenceRequest,
    CodeParams,
    DistModel,
    DistSampleRequest,
    DistSpreadRequest,
    ExperimentRequest,
    MatrixSampleRequest,
    PluckRequest,
    PolyBuildRequest,
    PolyCheckIdentityRequest,
    RankEvalRequest,
    ReportModel,
    SunflowerRequest,
    WellBehavedRequest,
)
from .seeding import stream_rng

app = FastAPI(title="monoforge", version=__version__)

POLY_JSON_TERM_CAP = 4096


def _fail(exc):
    raise HTTPException(status_code=400, detail=str(exc))


def _graph(text):
    try:
        return Graph.from_text(text)
    except (ValueError, IndexError) as exc:
        _fail(f"bad graph: {exc}")


def _rs(params: CodeParams):
    return rs_code(params.l, params.n, params.m, params.points)


def _dist(model: DistModel) -> DistSpec:
    if model.kind == "uniform":
        return DistSpec.uniform(model.n)
    if model.kind == "weightW":
        return DistSpec.uniform_weight(model.n, model.weight)
    if model.kind == "explicit":
        support = {int(m): Fraction(w) for m, w in model.support}
        return DistSpec.explicit(model.n, support)
    if model.kind == "d0f2":
        code = _rs(model.code)
        binc = binary_expand_code(code)
        return DistSpec.explicit(binc.length, d0_support_f2(binc.gen))
    if model.kind == "d0real":
        matrix = RealMatrix01.from_text(model.matrix_text)
        return DistSpec.explicit(matrix.m, d0_support_real(matrix))
    raise HTTPException(status_code=400, detail=f"unknown dist kind {model.kind}")


def _report(command, config, checks):
    return ReportModel(**make_report(command, sanitize(config), checks))


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/poly/build", response_model=ReportModel)
def poly_build(req: PolyBuildRequest):
    g = _graph(req.graph_text)
    try:
        q = build_Q(g, req.k)
    except MonoforgeError as exc:
        _fail(exc)
    data = {"terms": q.num_terms(), "degree": q.total_degree()}
    if req.include_terms and q.num_terms() <= POLY_JSON_TERM_CAP:
        data["poly"] = q.to_json(nvars=req.k * (1 << (g.n // req.k)))
    checks = [check("poly-built", True, **data)]
    return _report("poly build", {"n": g.n, "edges": g.e(), "k": req.k}, checks)


@app.post("/poly/sps", response_model=ReportModel)
def poly_sps(req: PolyBuildRequest):
    g = _graph(req.graph_text)
    try:
        circ = build_sps_circuit(g, req.k)
    except MonoforgeError as exc:
        _fail(exc)
    bound = SPS_WIRE_CONSTANT * g.e() ** 2 * req.k * 2 ** (g.n // req.k)
    data = {
        "gates": circ.gate_count(),
        "wires": circ.wire_count(),
        "depth": circ.depth(),
        "wire_bound": bound,
    }
    if req.include_terms and circ.gate_count() <= POLY_JSON_TERM_CAP:
        data["circuit"] = circ.to_json()
    checks = [
        check("sps-built", True, **data),
        check("sps-size", circ.wire_count() <= bound,
              wires=circ.wire_count(), bound=bound),
    ]
    return _report("poly sps", {"n": g.n, "edges": g.e(), "k": req.k}, checks)


@app.post("/poly/check-identity", response_model=ReportModel)
def poly_check_identity(req: PolyCheckIdentityRequest):
    g = _graph(req.graph_text)
    try:
        q = build_Q(g, req.k)
        circ = build_sps_circuit(g, req.k)
    except MonoforgeError as exc:
        _fail(exc)
    checks = []
    if req.mode == "exact":
        expanded = expand_circuit(circ)
        checks.append(
            check("sps-vs-bruteforce", poly_equal(expanded, q),
                  note="exact expansion equals brute-force polynomial")
        )
        p_full = build_Q(g, g.n)
        checks.append(
            check("substitution", poly_equal(substitute_Q_to_P(q, g.n, req.k), p_full))
        )
    else:
        if req.seed is None:
            _fail("mc mode requires a seed")
        verdict = random_identity_test(circ, q, req.trials, req.seed)
        checks.append(
            check("sps-vs-bruteforce-whp", verdict.equal_whp,
                  trials=req.trials,
                  witness=None if verdict.witness is None
                  else {str(k): str(v) for k, v in verdict.witness.items()})
        )
    config = {"n": g.n, "edges": g.e(), "k": req.k, "mode": req.mode,
              "trials": req.trials if req.mode == "mc" else None,
              "seed": req.seed if req.mode == "mc" else None}
    return _report("poly check-identity", config, checks)


@app.post("/code/rs", response_model=ReportModel)
def code_rs(req: CodeParams):
    try:
        code = _rs(req)
        gen = rs_generator(code)
        d = rs_distance(code)
        dd = rs_dual_distance(code)
    except MonoforgeError as exc:
        _fail(exc)
    checks = [
        check("rs-distance", d == req.m - req.n + 1, distance=d, expect=req.m - req.n + 1),
        check("rs-dual-distance", dd == req.n + 1, dual_distance=dd, expect=req.n + 1),
        check("rs-generator", True, rows=gen, modulus=code.ctx.modulus,
              points=list(code.points)),
    ]
    config = {"l": req.l, "n": req.n, "m": req.m, "points": list(code.points)}
    return _report("code rs", config, checks)


@app.post("/code/expand", response_model=ReportModel)
def code_expand(req: CodeParams):
    try:
        code = _rs(req)
        binc = binary_expand_code(code)
    except MonoforgeError as exc:
        _fail(exc)
    checks = [
        check("binary-generator", True, **code_to_json(code, binc)),
        check("binary-dims", (binc.dim, binc.length) == (req.l * req.n, req.l * req.m),
              dim=binc.dim, length=binc.length),
    ]
    config = {"l": req.l, "n": req.n, "m": req.m, "points": list(code.points)}
    return _report("code expand", config, checks)


@app.post("/code/stats", response_model=ReportModel)
def code_stats_ep(req: CodeParams):
    try:
        code = _rs(req)
        d_l = rs_distance(code)
        dd_l = rs_dual_distance(code)
        binc = binary_expand_code(code)
        stats = code_stats(binc)
    except MonoforgeError as exc:
        _fail(exc)
    sandwich = (
        d_l <= stats.distance <= req.l * d_l
        and dd_l <= stats.dual_distance <= req.l * dd_l
    )
    checks = [
        check("rs-stats", d_l == req.m - req.n + 1 and dd_l == req.n + 1,
              distance=d_l, dual_distance=dd_l),
        check("binary-stats", True, **stats.to_json()),
        check("binary-stats-csv", True, csv=stats.csv_row()),
        check("sandwich", sandwich,
              d_bounds=[d_l, req.l * d_l], dual_bounds=[dd_l, req.l * dd_l]),
    ]
    config = {"l": req.l, "n": req.n, "m": req.m, "points": list(code.points)}
    return _report("code stats", config, checks)


@app.post("/code/independence", response_model=ReportModel)
def code_independence(req: CodeIndependenceRequest):
    try:
        code = _rs(req)
        binc = binary_expand_code(code)
        stats = code_stats(binc)
    except MonoforgeError as exc:
        _fail(exc)
    t = req.t if req.t is not None else stats.dual_distance - 1
    ok_at_t = check_t_wise_independence(binc, t)
    fails_after = not check_t_wise_independence(binc, stats.dual_distance)
    checks = [
        check("independent-at-t", ok_at_t == (t <= stats.dual_distance - 1),
              t=t, dual_distance=stats.dual_distance, independent=ok_at_t),
        check("fails-at-dual-distance", fails_after, t=stats.dual_distance),
    ]
    config = {"l": req.l, "n": req.n, "m": req.m, "t": t}
    return _report("code independence", config, checks)


@app.post("/dist/sample", response_model=ReportModel)
def dist_sample(req: DistSampleRequest):
    rows = ["sample_id,weight,f_M,witness_u"]
    try:
        if req.kind == "d1":
            if req.m is None or req.weight is None:
                _fail("d1 sampling needs m and weight")
            params = DistParams("F2", n=0, m=req.m, weight_override=req.weight)
            rng = stream_rng(req.seed, "cli-d1")
            for i in range(req.trials):
                a = sample_D1(params, rng=rng)
                rows.append(f"{i},{sum(a)},,")
        elif req.kind == "d0f2":
            if req.code is None:
                _fail("d0f2 sampling needs code parameters")
            binc = binary_expand_code(_rs(req.code))
            rng = stream_rng(req.seed, "cli-d0f2")
            for i in range(req.trials):
                a, u = sample_D0(binc.gen, "F2", rng=rng)
                fm = f_M_eval(binc.gen, a)
                rows.append(f"{i},{sum(a)},{fm},{u}")
        else:
            if req.matrix_text is None:
                _fail("d0real sampling needs matrix_text")
            matrix = RealMatrix01.from_text(req.matrix_text)
            rng = stream_rng(req.seed, "cli-d0real")
            for i in range(req.trials):
                a, u = sample_D0(matrix, "Real", rng=rng)
                fm = f_M_eval(matrix, a)
                enc = "".join(str(x + 1) for x in u)  # ternary digits
                rows.append(f"{i},{sum(a)},{fm},{enc}")
    except MonoforgeError as exc:
        _fail(exc)
    checks = [check("samples", True, csv="\n".join(rows), count=req.trials)]
    config = {"kind": req.kind, "seed": req.seed, "trials": req.trials,
              "m": req.m, "weight": req.weight}
    return _report("dist sample", config, checks)


@app.post("/dist/spread", response_model=ReportModel)
def dist_spread(req: DistSpreadRequest):
    try:
        table = spreadness_exact(req.m, req.weight, req.kmax)
    except MonoforgeError as exc:
        _fail(exc)
    rows = [
        {"k": k, "prob": str(p), "bound": str(b), "holds": h}
        for k, p, b, h in table
    ]
    checks = [check("spread-table", all(r["holds"] for r in rows), rows=rows)]
    config = {"m": req.m, "weight": req.weight, "kmax": req.kmax}
    return _report("dist spread", config, checks)


@app.post("/matrix/sample", response_model=ReportModel)
def matrix_sample(req: MatrixSampleRequest):
    try:
        matrix = sample_sparse_matrix(req.n, s_override=req.s_override,
                                      seed=req.seed, m=req.m)
    except MonoforgeError as exc:
        _fail(exc)
    checks = [
        check("matrix-sampled", True, n=matrix.n, m=matrix.m, s=matrix.s,
              text=matrix.to_text())
    ]
    config = {"n": req.n, "m": matrix.m, "s_override": req.s_override,
              "seed": req.seed}
    return _report("matrix sample", config, checks)


@app.post("/matrix/well-behaved", response_model=ReportModel)
def matrix_well_behaved(req: WellBehavedRequest):
    try:
        matrix = RealMatrix01.from_text(req.matrix_text)
        report = check_well_behaved(
            matrix, k=req.k, t_max=req.t_max, trials=req.trials, seed=req.seed,
            d1_weight_override=req.d1_weight_override,
        )
    except (MonoforgeError, ValueError) as exc:
        _fail(exc)
    p1, p2, p3 = report.passes
    checks = [
        check("column-weights", p1, min_col_support=report.min_col_support,
              s=report.s),
        check("full-rank-probability", p2,
              estimate=str(report.full_rank_prob_estimate),
              ci=[report.ci_low, report.ci_high]),
        check("containment-scarcity", p3,
              violations=report.to_json()["containment_violations"],
              note="one-sided: no violation found under budget"),
        check("well-behaved-report", None, report=report.to_json()),
    ]
    config = {"n": matrix.n, "m": matrix.m, "k": report.k, "t_max": req.t_max,
              "trials": req.trials, "seed": req.seed,
              "d1_weight_override": req.d1_weight_override}
    return _report("matrix well-behaved", config, checks)


@app.post("/rank/eval", response_model=ReportModel)
def rank_eval(req: RankEvalRequest):
    try:
        head = req.matrix_text.split(None, 1)[0]
        if head == "f2":
            matrix = BitMatrix.from_text(req.matrix_text)
            ncols = matrix.ncols
        elif head == "q01":
            matrix = RealMatrix01.from_text(req.matrix_text)
            ncols = matrix.m
        else:
            _fail("matrix_text must start with 'f2' or 'q01'")
        bits = tuple(int(ch) for ch in req.x.strip())
        if len(bits) != ncols or any(b not in (0, 1) for b in bits):
            _fail(f"x must be a bit string of length {ncols}")
        value = f_M_eval(matrix, bits)
    except (MonoforgeError, ValueError) as exc:
        _fail(exc)
    checks = [check("f_M", True, value=value, weight=sum(bits))]
    config = {"format": head, "cols": ncols}
    return _report("rank eval", config, checks)


@app.post("/cb/verify", response_model=ReportModel)
def cb_verify(req: CbVerifyRequest):
    checks = []
    try:
        if req.matrix_text is not None:
            matrices = [RealMatrix01.from_text(req.matrix_text)]
        else:
            if req.n is None or req.m is None:
                _fail("random mode needs n and m")
            rng = stream_rng(req.seed, "cb-verify")
            matrices = []
            for _ in range(req.count):
                cols = [
                    frozenset(
                        i for i in range(req.n) if rng.randrange(2)
                    )
                    for _ in range(req.m)
                ]
                matrices.append(RealMatrix01(req.n, req.m, cols))
        for idx, matrix in enumerate(matrices):
            res = cauchy_binet_poly(matrix)
            checks.append(
                check(f"cauchy-binet-{idx}",
                      res.equal and res.positivity_ok in (True, None),
                      equal=res.equal, positivity=res.positivity_ok,
                      terms=res.p_direct.num_terms())
            )
    except MonoforgeError as exc:
        _fail(exc)
    config = {"n": req.n, "m": req.m, "count": req.count, "seed": req.seed,
              "from_text": req.matrix_text is not None}
    return _report("cb verify", config, checks)


@app.post("/approx/pluck", response_model=ReportModel)
def approx_pluck(req: PluckRequest):
    try:
        fam = SetFamily.from_json(req.family)
        dist = _dist(req.dist)
        if req.mode == "mc" and req.seed is None:
            _fail("mc mode requires a seed")
        out, ledger = pluck(fam, dist, Fraction(req.eps), Fraction(req.r), req.w,
                            mode=req.mode, trials=req.trials, seed=req.seed or 0)
    except MonoforgeError as exc:
        _fail(exc)
    checks = [
        check("pluck", True, family=out.to_json(),
              ledger=[e.to_json() for e in ledger], plucks=len(ledger)),
        check("pluck-postconditions",
              out.r_small(Fraction(req.r)) and out.width() <= 2 * req.w),
    ]
    config = {"eps": req.eps, "r": req.r, "w": req.w, "mode": req.mode,
              "trials": req.trials if req.mode == "mc" else None,
              "seed": req.seed, "input_sets": len(fam)}
    return _report("approx pluck", config, checks)


@app.post("/approx/sunflower", response_model=ReportModel)
def approx_sunflower(req: SunflowerRequest):
    try:
        fam = SetFamily.from_json(req.family)
        dist = _dist(req.dist)
        if req.mode == "mc" and req.seed is None:
            _fail("mc mode requires a seed")
        cert = is_sunflower(fam, req.members, dist, Fraction(req.eps),
                            mode=req.mode, trials=req.trials, seed=req.seed or 0)
    except MonoforgeError as exc:
        _fail(exc)
    if cert is None:
        checks = [check("sunflower", False, accepted=False)]
    else:
        checks = [
            check("sunflower", True, accepted=True, core=sorted(cert.core),
                  prob=str(cert.prob_estimate), mode=cert.mode)
        ]
    config = {"members": list(req.members), "eps": req.eps, "mode": req.mode,
              "seed": req.seed}
    return _report("approx sunflower", config, checks)


@app.post("/approx/run", response_model=ReportModel)
def approx_run(req: ApproxRunRequest):
    try:
        circuit = BoolCircuit.from_json(req.circuit)
        d0 = _dist(req.d0)
        d1 = _dist(req.d1)
        if req.mode == "mc" and req.seed is None:
            _fail("mc mode requires a seed")
        final, rep = approximate_circuit(
            circuit, d0, d1, req.w, Fraction(req.r), Fraction(req.eps),
            mode=req.mode, trials=req.trials, seed=req.seed or 0,
        )
    except MonoforgeError as exc:
        _fail(exc)
    checks = [
        check("approximation", True,
              final=final.to_json(),
              gates=[g.to_json() for g in rep["gates"]],
              total_E0=str(rep["total_E0"]), total_E1=str(rep["total_E1"]),
              agreement=str(rep["agreement"])),
    ]
    config = {"w": req.w, "r": req.r, "eps": req.eps, "mode": req.mode,
              "seed": req.seed, "gates": circuit.gate_count()}
    return _report("approx run", config, checks)


@app.post("/experiment/{preset}", response_model=ReportModel)
def experiment(preset: str, req: ExperimentRequest):
    if preset not in PRESETS:
        raise HTTPException(status_code=404,
                            detail=f"unknown preset; choose from {PRESETS}")
    try:
        report = run_experiment_preset(preset, req.seed, **req.scale)
    except MonoforgeError as exc:
        _fail(exc)
    except TypeError as exc:
        raise HTTPException(status_code=400, detail=f"bad scale option: {exc}")
    return ReportModel(**report)
