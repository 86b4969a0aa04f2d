"""JSON and CSV codecs for every wire type.

All rationals travel as canonical "p/q" strings, so parse(print(x)) == x
bit-exactly for every type.  Shape problems raise SchemaError; well-formed
payloads that break a domain invariant raise InvariantError (the type
constructors carry the witnesses).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Union

from .conditions import CReport, RationalF, Violation
from .curves import StepCDF, TargetF
from .cyclic import CyclicSystem, KacTown
from .errors import SchemaError
from .montecarlo import (
    BernoulliSpec,
    CyclicSpec,
    EmpiricalCDF,
    MarkovSpec,
    RotationSpec,
    SystemSpec,
)
from .rationals import decimal_str, format_rational, parse_rational

Curvelike = Union[StepCDF, TargetF, RationalF, CyclicSystem, EmpiricalCDF]


def _require(obj: Any, key: str, kind: type, where: str) -> Any:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected a JSON object, got {type(obj).__name__}")
    if key not in obj:
        raise SchemaError(f"{where}: missing key {key!r}")
    value = obj[key]
    if kind is not object and not isinstance(value, kind):
        raise SchemaError(
            f"{where}: key {key!r} must be {kind.__name__}, got {type(value).__name__}"
        )
    return value


def step_cdf_to_obj(f: StepCDF) -> dict:
    return {
        "jumps": [
            {"t": format_rational(t), "size": format_rational(s)} for t, s in f.jumps
        ]
    }


def step_cdf_from_obj(obj: Any) -> StepCDF:
    jumps = _require(obj, "jumps", list, "StepCDF")
    parsed = []
    for j in jumps:
        t = parse_rational(_require(j, "t", str, "StepCDF jump"))
        s = parse_rational(_require(j, "size", str, "StepCDF jump"))
        parsed.append((t, s))
    return StepCDF(tuple(parsed))


def target_f_to_obj(f: TargetF) -> dict:
    obj: dict[str, Any] = {
        "breakpoints": [[format_rational(t), format_rational(v)] for t, v in f.breakpoints]
    }
    if f.encodes_jump:
        obj["encodes_jump"] = True
    return obj


def target_f_from_obj(obj: Any) -> TargetF:
    pts = _require(obj, "breakpoints", list, "TargetF")
    parsed = []
    for bp in pts:
        if not isinstance(bp, (list, tuple)) or len(bp) != 2:
            raise SchemaError("TargetF breakpoint must be a pair [t, value]")
        parsed.append((parse_rational(bp[0]), parse_rational(bp[1])))
    flag = obj.get("encodes_jump", False)
    if not isinstance(flag, bool):
        raise SchemaError("encodes_jump must be a boolean")
    return TargetF(tuple(parsed), flag)


def rational_f_to_obj(f: RationalF) -> dict:
    return {
        "alpha": format_rational(f.alpha),
        "betas": [format_rational(b) for b in f.betas],
    }


def rational_f_from_obj(obj: Any) -> RationalF:
    alpha = parse_rational(_require(obj, "alpha", str, "RationalF"))
    betas = _require(obj, "betas", list, "RationalF")
    return RationalF(alpha, tuple(parse_rational(b) for b in betas))


def cyclic_system_to_obj(sys: CyclicSystem, note: str | None = None) -> dict:
    obj: dict[str, Any] = {"q": sys.q, "marked": list(sys.marked)}
    if note:
        obj["note"] = note
    return obj


def cyclic_system_from_obj(obj: Any) -> CyclicSystem:
    q = _require(obj, "q", int, "CyclicSystem")
    marked = _require(obj, "marked", list, "CyclicSystem")
    if any(not isinstance(x, int) or isinstance(x, bool) for x in marked):
        raise SchemaError("CyclicSystem marked residues must be integers")
    return CyclicSystem(q, tuple(marked))


def kac_town_to_obj(town: KacTown) -> dict:
    return {
        "skyscrapers": [
            {"height": h, "width": format_rational(w)} for h, w in town.skyscrapers
        ],
        "ground_mass": format_rational(town.ground_mass),
    }


def report_to_obj(report: CReport, extra: dict | None = None) -> dict:
    obj: dict[str, Any] = {
        "pass": report.passed,
        "violations": [
            {"condition": v.condition, "witness": v.witness} for v in report.violations
        ],
    }
    if extra:
        obj.update(extra)
    return obj


def report_from_obj(obj: Any) -> CReport:
    passed = _require(obj, "pass", bool, "CReport")
    violations = _require(obj, "violations", list, "CReport")
    parsed = tuple(
        Violation(_require(v, "condition", str, "violation"), _require(v, "witness", str, "violation"))
        for v in violations
    )
    return CReport(passed, parsed)


def system_spec_to_obj(spec: SystemSpec) -> dict:
    if isinstance(spec, BernoulliSpec):
        return {
            "kind": "bernoulli",
            "probs": [format_rational(p) for p in spec.probs],
            "word": list(spec.word),
        }
    if isinstance(spec, MarkovSpec):
        return {
            "kind": "markov",
            "matrix": [[format_rational(x) for x in row] for row in spec.matrix],
            "stationary": [format_rational(x) for x in spec.stationary],
            "word": list(spec.word),
        }
    if isinstance(spec, RotationSpec):
        return {
            "kind": "rotation",
            "angle": format_rational(spec.angle),
            "arc": [format_rational(spec.arc[0]), format_rational(spec.arc[1])],
        }
    if isinstance(spec, CyclicSpec):
        return {"kind": "cyclic", "system": cyclic_system_to_obj(spec.system)}
    raise SchemaError(f"unknown spec {type(spec).__name__}")


def _int_list(obj: Any, key: str, where: str) -> tuple[int, ...]:
    values = _require(obj, key, list, where)
    if any(not isinstance(x, int) or isinstance(x, bool) for x in values):
        raise SchemaError(f"{where}: {key} must be a list of integers")
    return tuple(values)


def system_spec_from_obj(obj: Any) -> SystemSpec:
    kind = _require(obj, "kind", str, "SystemSpec")
    if kind == "bernoulli":
        probs = _require(obj, "probs", list, "bernoulli spec")
        return BernoulliSpec(
            tuple(parse_rational(p) for p in probs), _int_list(obj, "word", "bernoulli spec")
        )
    if kind == "markov":
        matrix = _require(obj, "matrix", list, "markov spec")
        if any(not isinstance(row, list) for row in matrix):
            raise SchemaError("markov matrix must be a list of rows")
        stationary = _require(obj, "stationary", list, "markov spec")
        return MarkovSpec(
            tuple(tuple(parse_rational(x) for x in row) for row in matrix),
            tuple(parse_rational(x) for x in stationary),
            _int_list(obj, "word", "markov spec"),
        )
    if kind == "rotation":
        angle = parse_rational(_require(obj, "angle", str, "rotation spec"))
        arc = _require(obj, "arc", list, "rotation spec")
        if len(arc) != 2:
            raise SchemaError("rotation arc must be [a, b]")
        return RotationSpec(angle, (parse_rational(arc[0]), parse_rational(arc[1])))
    if kind == "cyclic":
        system = _require(obj, "system", dict, "cyclic spec")
        return CyclicSpec(cyclic_system_from_obj(system))
    raise SchemaError(f"unknown system kind {kind!r}")


def empirical_to_obj(e: EmpiricalCDF) -> dict:
    return {
        "samples": [{"t": format_rational(v), "count": c} for v, c in e.samples],
        "count": e.count,
        "censored": e.censored,
    }


def empirical_from_obj(obj: Any) -> EmpiricalCDF:
    raw = _require(obj, "samples", list, "EmpiricalCDF")
    samples = []
    for s in raw:
        v = parse_rational(_require(s, "t", str, "empirical sample"))
        c = _require(s, "count", int, "empirical sample")
        samples.append((v, c))
    count = _require(obj, "count", int, "EmpiricalCDF")
    censored = _require(obj, "censored", int, "EmpiricalCDF")
    return EmpiricalCDF(tuple(samples), count, censored)


def parse_curve(obj: Any) -> Curvelike:
    """Detect and parse any curve-like payload by its distinguishing keys."""
    if not isinstance(obj, dict):
        raise SchemaError(f"expected a JSON object, got {type(obj).__name__}")
    if "jumps" in obj:
        return step_cdf_from_obj(obj)
    if "breakpoints" in obj:
        return target_f_from_obj(obj)
    if "alpha" in obj and "betas" in obj:
        return rational_f_from_obj(obj)
    if "q" in obj and "marked" in obj:
        return cyclic_system_from_obj(obj)
    if "samples" in obj and "count" in obj:
        return empirical_from_obj(obj)
    raise SchemaError(
        "unrecognized curve payload; expected one of StepCDF/TargetF/RationalF/"
        "CyclicSystem/EmpiricalCDF keys"
    )


def curve_to_obj(x: Curvelike) -> dict:
    if isinstance(x, StepCDF):
        return step_cdf_to_obj(x)
    if isinstance(x, TargetF):
        return target_f_to_obj(x)
    if isinstance(x, RationalF):
        return rational_f_to_obj(x)
    if isinstance(x, CyclicSystem):
        return cyclic_system_to_obj(x)
    if isinstance(x, EmpiricalCDF):
        return empirical_to_obj(x)
    raise SchemaError(f"unknown curve type {type(x).__name__}")


# ---------------------------------------------------------------------------
# CSV rendering (decimal, 12 significant digits; JSON stays exact)
# ---------------------------------------------------------------------------


def step_cdf_csv(f: StepCDF, comments: list[str] | None = None) -> str:
    """Cadlag staircase: two rows per jump, (t, left limit) then (t, value)."""
    lines = [f"# {c}" for c in (comments or [])]
    lines.append("t,F")
    for t, _ in f.jumps:
        lines.append(f"{decimal_str(t)},{decimal_str(f.left_value(t))}")
        lines.append(f"{decimal_str(t)},{decimal_str(f.value(t))}")
    return "\n".join(lines) + "\n"


def target_f_csv(f: TargetF, comments: list[str] | None = None) -> str:
    lines = [f"# {c}" for c in (comments or [])]
    lines.append("t,F")
    for t, v in f.breakpoints:
        lines.append(f"{decimal_str(t)},{decimal_str(v)}")
    return "\n".join(lines) + "\n"


def curve_csv(x: Curvelike, comments: list[str] | None = None) -> str:
    if isinstance(x, TargetF):
        return target_f_csv(x, comments)
    if isinstance(x, StepCDF):
        return step_cdf_csv(x, comments)
    if isinstance(x, RationalF):
        return step_cdf_csv(x.induced_step_cdf(), comments)
    if isinstance(x, EmpiricalCDF):
        return step_cdf_csv(x.to_step_cdf("total"), comments)
    raise SchemaError(f"no CSV rendering for {type(x).__name__}")
