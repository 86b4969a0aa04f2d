"""FastAPI service wrapping the core package.

Every computational surface is a POST endpoint with exact "p/q" payloads.
Shape problems are rejected by the models (422); payloads that parse but
break a domain invariant come back as 400 with the witness message, matching
the CLI's exit-code convention (2 vs 1).
"""

from __future__ import annotations

from fractions import Fraction

from fastapi import FastAPI, HTTPException

from .. import io
from ..conditions import check_class_f, check_conditions_c, check_inequality_i
from ..curves import StepCDF, TargetF, cdf_from_builtin, levy_distance, sup_distance
from ..cyclic import hitting_cdf, return_cdf
from ..errors import InvariantError, SchemaError
from ..montecarlo import EmpiricalCDF, ks_distance, simulate_hitting, target_measure
from ..odometer import realize, stamp_tower
from ..rationalize import check_star, rationalize_step, rationalize_target
from ..rationals import format_rational, parse_rational
from ..stamps import build_system, derive_params, make_stamp, verify_roundtrip
from . import schemas

ODOMETER_NOTE = (
    "residue i encodes the m-cylinder of the dyadic odometer whose index is i-1"
)


def _domain(fn, *args, **kwargs):
    """Run a core operation, translating error kinds to HTTP statuses."""
    try:
        return fn(*args, **kwargs)
    except SchemaError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except InvariantError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def create_app() -> FastAPI:
    app = FastAPI(
        title="hittimes",
        description="Exact hitting/return-time statistics service",
        version="0.1.0",
    )

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/cyclic/hitting")
    def cyclic_hitting(req: schemas.CyclicRequest) -> dict:
        system = _domain(io.cyclic_system_from_obj, req.system.model_dump(exclude_none=True))
        return {"cdf": io.step_cdf_to_obj(_domain(hitting_cdf, system))}

    @app.post("/cyclic/return")
    def cyclic_return(req: schemas.CyclicRequest) -> dict:
        system = _domain(io.cyclic_system_from_obj, req.system.model_dump(exclude_none=True))
        return {"cdf": io.step_cdf_to_obj(_domain(return_cdf, system))}

    @app.post("/check/cdf")
    def check_cdf(req: schemas.CheckCdfRequest) -> dict:
        cdf = _domain(io.step_cdf_from_obj, req.cdf.model_dump())
        report = _domain(check_conditions_c, cdf)
        alpha = _domain(parse_rational, req.alpha) if req.alpha else cdf.jumps[0][0]
        ineq = _domain(check_inequality_i, cdf, alpha)
        obj = io.report_to_obj(report)
        obj["pass"] = report.passed and ineq
        obj["alpha"] = format_rational(alpha)
        obj["inequality_i"] = ineq
        return obj

    @app.post("/check/class-f")
    def check_classf(req: schemas.CheckClassFRequest) -> dict:
        target = _domain(io.target_f_from_obj, req.target.model_dump())
        return io.report_to_obj(_domain(check_class_f, target))

    @app.post("/stamp")
    def stamp(req: schemas.StampRequest) -> dict:
        law = _domain(io.rational_f_from_obj, req.law.model_dump())
        params = _domain(derive_params, law)
        system = _domain(build_system, params)
        pattern = _domain(make_stamp, params)
        verified = _domain(verify_roundtrip, law) if req.verify else None
        return {
            "system": io.cyclic_system_to_obj(system),
            "stamp": {"height": pattern.height, "offsets": list(pattern.marked_offsets)},
            "verified": verified,
        }

    @app.post("/rationalize")
    def rationalize(req: schemas.RationalizeRequest) -> dict:
        curve = _domain(io.parse_curve, req.curve.model_dump())
        eps = _domain(parse_rational, req.eps)
        if isinstance(curve, TargetF):
            law = _domain(rationalize_target, curve, eps)
        elif isinstance(curve, StepCDF):
            law = _domain(rationalize_step, curve, eps)
        else:
            raise HTTPException(status_code=422, detail="curve must be a TargetF or StepCDF")
        star_ok = _domain(check_star, curve, law, eps)
        return {
            "law": io.rational_f_to_obj(law),
            "report": {
                "n_grid": law.alpha.denominator,
                "q": law.q,  # type: ignore[attr-defined]
                "jump_count": law.k_count,
                "star_ok": star_ok,
            },
        }

    @app.post("/realize")
    def realize_endpoint(req: schemas.RealizeRequest) -> dict:
        if (req.target is None) == (req.builtin is None):
            raise HTTPException(
                status_code=422, detail="provide exactly one of target/builtin"
            )
        if req.builtin is not None:
            params = [_domain(parse_rational, p) for p in req.builtin.params]
            mesh = _domain(parse_rational, req.builtin.mesh)
            target = _domain(cdf_from_builtin, req.builtin.name, params, mesh)
            target_desc: dict = {"builtin": req.builtin.model_dump()}
        else:
            target = _domain(io.target_f_from_obj, req.target.model_dump())
            target_desc = {"target": io.target_f_to_obj(target)}
        eps_schedule = [_domain(parse_rational, e) for e in req.eps_list]
        trace = _domain(
            realize, target, eps_schedule, margin=req.margin, keep_systems=req.emit_sets
        )
        stages = []
        for st in trace.stages:
            stage_obj = {
                "eps": format_rational(st.eps),
                "n_grid": st.n_grid,
                "q": st.q,
                "m": st.m,
                "mu_u": format_rational(st.mu_u),
                "levy_to_target": format_rational(st.levy_to_target),
                "law": io.rational_f_to_obj(st.law),
                "hitting": io.step_cdf_to_obj(st.hitting),
            }
            if st.system is not None:
                stage_obj["system"] = io.cyclic_system_to_obj(st.system, note=ODOMETER_NOTE)
            stages.append(stage_obj)
        config = {"eps_list": req.eps_list, "margin": req.margin, **target_desc}
        return {"config": config, "stages": stages}

    @app.post("/simulate")
    def simulate(req: schemas.SimulateRequest) -> dict:
        spec = _domain(io.system_spec_from_obj, req.system.model_dump(exclude_none=True))
        empirical = _domain(simulate_hitting, spec, req.samples, req.seed, req.horizon)
        return {
            "empirical": io.empirical_to_obj(empirical),
            "mu": format_rational(target_measure(spec)),
            "config": {
                "seed": req.seed,
                "samples": req.samples,
                "horizon": req.horizon,
                "system": req.system.model_dump(exclude_none=True),
            },
        }

    @app.post("/distance")
    def distance(req: schemas.DistanceRequest) -> dict:
        a = _domain(io.parse_curve, req.a)
        b = _domain(io.parse_curve, req.b)
        horizon = _domain(parse_rational, req.horizon) if req.horizon else None
        value = _domain(_distance_value, a, b, req.metric, horizon)
        return {
            "metric": req.metric,
            "value": format_rational(value),
            "decimal": float(value),
        }

    return app


def _as_step_or_target(x):
    """Normalize any curve payload to a StepCDF/TargetF for metric work."""
    from ..conditions import RationalF
    from ..cyclic import CyclicSystem

    if isinstance(x, RationalF):
        return x.induced_step_cdf()
    if isinstance(x, CyclicSystem):
        return hitting_cdf(x)
    return x


def _distance_value(a, b, metric: str, horizon: Fraction | None) -> Fraction:
    if metric == "ks" and isinstance(a, EmpiricalCDF):
        return ks_distance(a, _as_step_or_target(b))
    if metric == "ks" and isinstance(b, EmpiricalCDF):
        return ks_distance(b, _as_step_or_target(a))
    fa = _as_step_or_target(a)
    fb = _as_step_or_target(b)
    if isinstance(fa, EmpiricalCDF):
        fa = fa.to_step_cdf("total")
    if isinstance(fb, EmpiricalCDF):
        fb = fb.to_step_cdf("total")
    if metric == "levy":
        return levy_distance(fa, fb)
    if horizon is None:
        tops = []
        for f in (fa, fb):
            if isinstance(f, StepCDF):
                tops.append(f.jumps[-1][0] if f.jumps else Fraction(0))
            else:
                tops.append(f.t_max)
        horizon = max(tops) + 1
    return sup_distance(fa, fb, horizon)


app = create_app()
