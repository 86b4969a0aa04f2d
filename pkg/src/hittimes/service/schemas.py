"""Pydantic request/response models for the compute service.

Models validate the JSON shape only; domain invariants are enforced by the
core constructors when payloads are converted (see app.py), so that shape
errors and invariant violations surface as distinct HTTP statuses.
"""

from __future__ import annotations

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, Field


class JumpModel(BaseModel):
    t: str
    size: str


class StepCDFModel(BaseModel):
    jumps: list[JumpModel]


class TargetFModel(BaseModel):
    breakpoints: list[tuple[str, str]]
    encodes_jump: bool = False


class RationalFModel(BaseModel):
    alpha: str
    betas: list[str]


class CyclicSystemModel(BaseModel):
    q: int
    marked: list[int]
    note: Optional[str] = None


class BuiltinTargetModel(BaseModel):
    name: str
    params: list[str] = []
    mesh: str = "1/128"


class BernoulliModel(BaseModel):
    kind: Literal["bernoulli"]
    probs: list[str]
    word: list[int]


class MarkovModel(BaseModel):
    kind: Literal["markov"]
    matrix: list[list[str]]
    stationary: list[str]
    word: list[int]


class RotationModel(BaseModel):
    kind: Literal["rotation"]
    angle: str
    arc: tuple[str, str]


class CyclicSpecModel(BaseModel):
    kind: Literal["cyclic"]
    system: CyclicSystemModel


SystemSpecModel = Annotated[
    Union[BernoulliModel, MarkovModel, RotationModel, CyclicSpecModel],
    Field(discriminator="kind"),
]


class ViolationModel(BaseModel):
    condition: str
    witness: str


class ReportModel(BaseModel):
    passed: bool = Field(alias="pass")
    violations: list[ViolationModel]

    model_config = {"populate_by_name": True}


class CheckCdfRequest(BaseModel):
    cdf: StepCDFModel
    alpha: Optional[str] = None


class CheckCdfResponse(ReportModel):
    alpha: str
    inequality_i: bool


class CheckClassFRequest(BaseModel):
    target: TargetFModel


class StampRequest(BaseModel):
    law: RationalFModel
    verify: bool = False


class StampOffsetsModel(BaseModel):
    height: int
    offsets: list[int]


class StampResponse(BaseModel):
    system: CyclicSystemModel
    stamp: StampOffsetsModel
    verified: Optional[bool] = None


class CyclicRequest(BaseModel):
    system: CyclicSystemModel


class RationalizeRequest(BaseModel):
    curve: Union[StepCDFModel, TargetFModel]
    eps: str


class RationalizeReportModel(BaseModel):
    n_grid: int
    q: int
    jump_count: int
    star_ok: bool


class RationalizeResponse(BaseModel):
    law: RationalFModel
    report: RationalizeReportModel


class RealizeRequest(BaseModel):
    eps_list: list[str]
    target: Optional[TargetFModel] = None
    builtin: Optional[BuiltinTargetModel] = None
    margin: int = 2
    emit_sets: bool = False


class SimulateRequest(BaseModel):
    system: SystemSpecModel
    samples: int
    seed: int = 0
    horizon: int = 10000


class EmpiricalSampleModel(BaseModel):
    t: str
    count: int


class EmpiricalModel(BaseModel):
    samples: list[EmpiricalSampleModel]
    count: int
    censored: int


class SimulateResponse(BaseModel):
    empirical: EmpiricalModel
    mu: str
    config: dict


class DistanceRequest(BaseModel):
    a: dict
    b: dict
    metric: Literal["ks", "sup", "levy"]
    horizon: Optional[str] = None


class DistanceResponse(BaseModel):
    metric: str
    value: str
    decimal: float
