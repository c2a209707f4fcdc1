"""Pydantic request/response models for the service.

File-format payloads travel as text in the same formats the CLI writes to
disk ('graph <n>' listings, 'f2'/'q01' matrices), so the thin client just
forwards file contents.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class PolyBuildRequest(BaseModel):
    graph_text: str
    k: int
    include_terms: bool = True


class PolyCheckIdentityRequest(BaseModel):
    graph_text: str
    k: int
    mode: Literal["exact", "mc"] = "exact"
    trials: int = 50
    seed: Optional[int] = None


class CodeParams(BaseModel):
    l: int = Field(ge=1, le=16)
    n: int
    m: int
    points: Optional[list[int]] = None


class CodeIndependenceRequest(CodeParams):
    t: Optional[int] = None


class DistSampleRequest(BaseModel):
    kind: Literal["d1", "d0f2", "d0real"]
    seed: int
    trials: int = 100
    m: Optional[int] = None
    weight: Optional[int] = None
    code: Optional[CodeParams] = None
    matrix_text: Optional[str] = None


class DistSpreadRequest(BaseModel):
    m: int
    weight: int
    kmax: int


class MatrixSampleRequest(BaseModel):
    n: int
    m: Optional[int] = None
    s_override: Optional[int] = None
    seed: int


class WellBehavedRequest(BaseModel):
    matrix_text: str
    k: Optional[int] = None
    t_max: int = 6
    trials: int = 200
    seed: int = 0
    d1_weight_override: Optional[int] = None


class RankEvalRequest(BaseModel):
    matrix_text: str  # 'f2' or 'q01' header decides the field
    x: str  # bit string, length = number of columns


class CbVerifyRequest(BaseModel):
    matrix_text: Optional[str] = None  # q01 format
    n: Optional[int] = None  # random-matrix mode
    m: Optional[int] = None
    s: Optional[int] = None
    count: int = 1
    seed: int = 0


class DistModel(BaseModel):
    kind: Literal["uniform", "weightW", "explicit", "d0f2", "d0real"]
    n: Optional[int] = None
    weight: Optional[int] = None
    support: Optional[list[tuple[int, str]]] = None  # (mask, "p/q")
    code: Optional[CodeParams] = None
    matrix_text: Optional[str] = None


class SunflowerRequest(BaseModel):
    family: dict
    members: list[int]
    dist: DistModel
    eps: str
    mode: Literal["exact", "mc"] = "exact"
    trials: int = 4000
    seed: Optional[int] = None


class PluckRequest(BaseModel):
    family: dict
    dist: DistModel
    eps: str
    r: str
    w: int
    mode: Literal["exact", "mc"] = "exact"
    trials: int = 4000
    seed: Optional[int] = None


class ApproxRunRequest(BaseModel):
    circuit: dict
    d0: DistModel
    d1: DistModel
    w: int
    r: str
    eps: str
    mode: Literal["exact", "mc"] = "exact"
    trials: int = 4000
    seed: Optional[int] = None


class ExperimentRequest(BaseModel):
    seed: int
    scale: dict = Field(default_factory=dict)


class CheckModel(BaseModel):
    id: str
    passed: Optional[bool]
    data: dict


class ReportModel(BaseModel):
    command: str
    config: dict
    checks: list[CheckModel]
    failed: list[str]
    ok: bool
    provenance: dict
