# app/errors.py
# Error hierarchy shared by every stage. Each error knows its stage and condition
# so the CLI can print one JSON record per failure.
from __future__ import annotations

from typing import Any


class RamseyCubeError(Exception):
    """Base error: a named condition failed at a named stage, with numeric margins."""

    condition = "error"

    def __init__(self, message: str = "", *, stage: str = "core", **margins: Any):
        super().__init__(message or self.condition)
        self.message = message or self.condition
        self.stage = stage
        self.margins: dict[str, Any] = dict(margins)

    def tagged(self, stage: str) -> "RamseyCubeError":
        """Prefix the stage with an outer pipeline stage and return self (for `raise e.tagged(...)`)."""
        if not self.stage.startswith(stage):
            self.stage = f"{stage}/{self.stage}"
        return self

    def to_record(self) -> dict[str, Any]:
        return {
            "stage": self.stage,
            "condition": self.condition,
            "message": self.message,
            "margins": {k: _jsonable(v) for k, v in self.margins.items()},
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return str(value)


# ----- input and formats -----
class InputError(RamseyCubeError, ValueError):
    condition = "input"


class CrgFormatError(InputError):
    condition = "crg-format"


class CertificateFormatError(InputError):
    condition = "certificate-format"


class PreconditionViolated(InputError):
    condition = "precondition-violated"


# ----- limits -----
class CapacityError(RamseyCubeError, RuntimeError):
    condition = "capacity"


class BudgetExceeded(CapacityError):
    condition = "budget-exceeded"


# ----- pipeline conditions -----
class DecompositionFailed(RamseyCubeError):
    condition = "decomposition-failed"


class ParametersInfeasible(RamseyCubeError):
    condition = "parameters-infeasible"


class ThresholdViolated(RamseyCubeError):
    condition = "threshold-violated"


class RetriesExhausted(RamseyCubeError):
    condition = "retries-exhausted"

    def __init__(self, message: str = "", *, best: Any = None, stage: str = "core", **margins: Any):
        super().__init__(message, stage=stage, **margins)
        self.best = best


class EmbeddingStuck(RamseyCubeError):
    condition = "embedding-stuck"


class ExceptionSetOverflow(RamseyCubeError):
    condition = "exception-set-overflow"


class PackingShortfall(RamseyCubeError):
    condition = "packing-shortfall"


class SizeConditionViolated(RamseyCubeError):
    condition = "size-condition-violated"


class ExtensionStuck(RamseyCubeError):
    condition = "extension-stuck"


class QuotientCliqueUnliftable(RamseyCubeError):
    condition = "quotient-clique-unliftable"


class InternalAssertion(RamseyCubeError, AssertionError):
    condition = "internal-assertion"


class BlueCliqueFound(RamseyCubeError):
    """Raised from deep inside a search when a blue K_s turns up; callers usually catch it
    and hand the witness back as a result."""

    condition = "blue-clique-found"

    def __init__(self, witness: Any, message: str = "", *, stage: str = "core"):
        super().__init__(message or "blue clique found", stage=stage, size=len(witness.members))
        self.witness = witness
