"""Result and report models shared across modules.

Checks return one of these instead of raising: a failed axiom is a normal outcome,
the witness travels with it. Exceptions are kept for bad input.
"""

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field


class CheckResult(BaseModel):
    """Outcome of an axiom or property check."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ok: bool = Field(..., description="True when the check passed")
    check: str = Field(..., description="Name of the check that ran")
    failed: str | None = Field(None, description="Tag of the violated axiom, if any")
    witness: tuple[Any, ...] | None = Field(None, description="Raw witness objects")
    detail: str | None = Field(None, description="Witness in input syntax")

    def __bool__(self) -> bool:
        return self.ok

    @classmethod
    def passed(cls, check: str) -> "CheckResult":
        return cls(ok=True, check=check)

    @classmethod
    def failure(cls, check: str, failed: str, witness: tuple[Any, ...] | None = None,
                detail: str | None = None) -> "CheckResult":
        return cls(ok=False, check=check, failed=failed, witness=witness, detail=detail)


class RepSearchResult(BaseModel):
    """Outcome of a representation search."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    status: Literal["found", "none"] = Field(..., description="Whether a representation exists")
    tract: str = Field(..., description="Tract searched")
    level: str = Field(..., description="Wick level the result was verified at")
    nodes_explored: int = Field(0, description="Search tree nodes visited")
    wick: Any = Field(None, description="WickFunction when found")

    @property
    def found(self) -> bool:
        return self.status == "found"


class RegularityReport(BaseModel):
    """Outcome of the F2 + F3 regularity pipeline."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    regular: bool = Field(..., description="Representable over U0")
    f2: RepSearchResult = Field(..., description="Search over F2")
    f3: RepSearchResult | None = Field(None, description="Search over F3 (skipped if F2 fails)")
    wick: Any = Field(None, description="Strong U0 Wick function when regular")
    pushforwards: dict[str, bool] = Field(default_factory=dict,
                                          description="Re-verification after pushing to fields")


class M4FreeReport(BaseModel):
    """Outcome of the F2 + S pipeline for matroids without an M4 minor."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    applicable: bool = Field(..., description="M has no minor isomorphic to M4")
    f2: RepSearchResult | None = Field(None, description="Search over F2")
    sign: RepSearchResult | None = Field(None, description="Search over S")
    regular: bool = Field(False, description="Combined U0 function verified strong")
    three_products: bool | None = Field(None, description="At most three nonzero products seen")
    wick: Any = Field(None, description="Strong U0 Wick function when regular")
    note: str = Field("", description="Human readable remark")


class TargetCheck(BaseModel):
    """One pushforward target of a sixth-root representation."""
    target: str = Field(..., description="Target tract descriptor")
    root: str = Field(..., description="Image of the generator z")
    ok: bool = Field(..., description="Pushforward passed the strong check")


class SixthRootReport(BaseModel):
    """Outcome of the F3 + F4 pipeline."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    representable: bool = Field(..., description="Representable over R6")
    f3: RepSearchResult = Field(..., description="Search over F3")
    f4: RepSearchResult | None = Field(None, description="Search over F4")
    wick: Any = Field(None, description="Strong R6 Wick function when representable")
    targets: list[TargetCheck] = Field(default_factory=list, description="Sampled pushforwards")


class ProbeRecord(BaseModel):
    """One candidate of the M4 conjecture probe."""
    name: str = Field(..., description="Candidate label")
    has_m4_minor: bool = Field(..., description="Contains a minor isomorphic to M4")
    over_f2: bool = Field(..., description="Representable over F2")
    over_sign: bool = Field(..., description="Representable over S")
    regular: bool = Field(..., description="Representable over U0")

    @property
    def counterexample(self) -> bool:
        return self.over_f2 and self.over_sign and not self.regular


class AcceptanceOutcome(BaseModel):
    """One line of the corpus verification run."""
    name: str = Field(..., description="Criterion name")
    ok: bool = Field(..., description="Criterion passed")
    detail: str = Field("", description="Short explanation on failure")
    seconds: float = Field(0.0, description="Wall time")
