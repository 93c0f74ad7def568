from pydantic import BaseModel, Field, ValidationInfo, field_validator
from typing import Any, Dict, List, Literal, Optional

from src.config import Config

SCHEMA_VERSION = 1


class RunConfig(BaseModel):
    """Settings for one CLI run, defaulting to the environment configuration"""
    anchor_limit: int = Field(default=Config.ANCHOR_LIMIT, ge=1, description="Anchors per pattern or subset enumeration")
    seed: int = Field(default=Config.CORPUS_SEED, ge=0, lt=2 ** 64, description="Corpus seed")
    depth: int = Field(default=Config.CERTIFICATE_DEPTH, ge=0, description="Certificate depth")
    output_format: Literal["text", "structured"] = Field(default="text", description="Output format tag")

    @field_validator('output_format', mode='before')
    @classmethod
    def normalize_format(cls, v: str) -> str:
        """Accept any casing of the format tag"""
        return v.strip().lower() if isinstance(v, str) else v

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"anchor_limit": 16, "seed": 20240917, "depth": 10, "output_format": "structured"}
            ]
        }
    }


class IntervalPartRecord(BaseModel):
    """A point or an open interval; infinite ends are written -inf and +inf"""
    kind: Literal["point", "interval"]
    endpoints: List[str] = Field(..., min_length=1, max_length=2)


class RnfRecord(BaseModel):
    stratum: str
    disjuncts: List[Dict[str, str]] = Field(default_factory=list, description="chi/theta pairs in the formula grammar")


class CertificateReport(BaseModel):
    """Complement witnesses in shrinking boxes around a point"""
    point: Dict[str, str]
    depth: int = Field(..., ge=0)
    found: bool
    witnesses: List[Dict[str, Any]] = Field(default_factory=list)
    failed_at: Optional[int] = None


class OpenCoreReport(BaseModel):
    is_open: bool
    variable: str
    interior: str = Field(..., description="Pure-order formula defining the interior")
    description: List[IntervalPartRecord]
    witness: Optional[str] = None
    certificate: Optional[CertificateReport] = None
    fibers: Dict[str, List[str]] = Field(default_factory=dict)


class NonelementarityReport(BaseModel):
    bound: int = Field(..., ge=0)
    witness: str
    fiber_size: int = Field(..., ge=0)
    complement_components: int = Field(..., ge=1)

    @field_validator('complement_components')
    @classmethod
    def check_components(cls, v: int, info: ValidationInfo) -> int:
        """A finite discrete set with k points leaves k+1 convex pieces"""
        size = info.data.get('fiber_size')
        if size is not None and v != size + 1:
            raise ValueError(f"expected {size + 1} components, got {v}")
        return v


class CheckResult(BaseModel):
    """Outcome of one acceptance check"""
    name: str = Field(..., min_length=1)
    passed: bool
    cases: int = Field(default=0, ge=0)
    failures: int = Field(default=0, ge=0)
    seconds: float = Field(default=0.0, ge=0)
    detail: str = ""

    model_config = {
        "json_schema_extra": {
            "examples": [
                {"name": "cell-count", "passed": True, "cases": 1, "failures": 0, "seconds": 0.01, "detail": "13 cells"}
            ]
        }
    }


class CommandRecord(BaseModel):
    """One line of structured output"""
    schema_version: int = SCHEMA_VERSION
    command: str
    input: Dict[str, Any] = Field(default_factory=dict)
    result: Any = None
    evidence: Dict[str, Any] = Field(default_factory=dict)
