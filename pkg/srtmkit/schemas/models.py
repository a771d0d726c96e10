from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class CheckStatus(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


class DiagnosticCode(str, Enum):
    # machine
    BLANK_IN_INPUT_ALPHABET = "BlankInInputAlphabet"
    PLACEHOLDER_IN_INPUT_ALPHABET = "PlaceholderInInputAlphabet"
    BLANK_IS_PLACEHOLDER = "BlankIsPlaceholder"
    INPUT_NOT_IN_TAPE_ALPHABET = "InputNotInTapeAlphabet"
    BLANK_NOT_IN_TAPE_ALPHABET = "BlankNotInTapeAlphabet"
    PLACEHOLDER_NOT_IN_TAPE_ALPHABET = "PlaceholderNotInTapeAlphabet"
    UNKNOWN_INITIAL_STATE = "UnknownInitialState"
    UNKNOWN_STATE = "UnknownState"
    UNKNOWN_TAPE_SYMBOL = "UnknownTapeSymbol"
    BAD_DIRECTION = "BadDirection"
    UNKNOWN_CONSTANT_WEIGHT = "UnknownConstantWeight"
    MIXED_SEMIRINGS = "MixedSemirings"
    ORACLE_NOT_ENABLED = "OracleNotEnabled"
    # structure
    EMPTY_UNIVERSE = "EmptyUniverse"
    UNKNOWN_RELATION = "UnknownRelation"
    MISSING_RELATION = "MissingRelation"
    TUPLE_ARITY = "TupleArity"
    TUPLE_OUT_OF_RANGE = "TupleOutOfRange"
    PARTIAL_WEIGHTED_RELATION = "PartialWeightedRelation"
    OVERLAPPING_NAMES = "OverlappingNames"


class Diagnostic(BaseModel):
    code: DiagnosticCode
    message: str


class CheckReport(BaseModel):
    """Outcome of comparing two independently computed values."""
    name: str
    status: CheckStatus
    left_label: str
    left_value: Optional[str] = None
    right_label: str
    right_value: Optional[str] = None
    budget: Optional[int] = None
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.status == CheckStatus.PASS


class CompilationSummary(BaseModel):
    formula: str
    fragment: str
    state_count: int
    transition_count: int
    tape_symbol_count: int
    budget_hint: List[int]  # ascending coefficients in the structure size n


class SemiringRow(BaseModel):
    name: str
    plus_idempotent: bool
    carrier: str


class RunReport(BaseModel):
    command: str
    semiring: Optional[str] = None
    inputs: Dict[str, str] = Field(default_factory=dict)  # name -> sha256 prefix
    result: Optional[str] = None
    status: Optional[CheckStatus] = None
    budget: Optional[int] = None
    details: Dict[str, str] = Field(default_factory=dict)
    checks: List[CheckReport] = Field(default_factory=list)
    elapsed_ms: Optional[float] = None

    def to_text(self, include_timing: bool = True) -> str:
        lines = [f"command: {self.command}"]
        if self.semiring is not None:
            lines.append(f"semiring: {self.semiring}")
        for name, digest in sorted(self.inputs.items()):
            lines.append(f"input.{name}: {digest}")
        if self.budget is not None:
            lines.append(f"budget: {self.budget}")
        for key, value in self.details.items():
            lines.append(f"{key}: {value}")
        for check in self.checks:
            lines.append(
                f"check.{check.name}: {check.status.value} "
                f"({check.left_label}={check.left_value}, {check.right_label}={check.right_value})"
            )
        if self.result is not None:
            lines.append(f"result: {self.result}")
        if self.status is not None:
            lines.append(f"status: {self.status.value}")
        if include_timing and self.elapsed_ms is not None:
            lines.append(f"elapsed_ms: {self.elapsed_ms:.1f}")
        return "\n".join(lines)

    def to_json(self, include_timing: bool = True) -> str:
        exclude = None if include_timing else {"elapsed_ms"}
        return self.model_dump_json(exclude=exclude)
