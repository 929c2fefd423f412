from __future__ import annotations

import math
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

NoiseKind = Literal[
    "exact",
    "diag_after",
    "diag_before",
    "depolarized",
    "perturbed_unitary",
    "mixed_unitary",
]

FunctionName = Literal["identity", "inverse", "one", "zero", "sqrt"]

UNITARY_KINDS = frozenset({"exact", "diag_after", "diag_before", "perturbed_unitary"})

SEED_MAX = 2 ** 64


class NoiseSpec(BaseModel):
    """An imperfect QFT (``target='forward'``) or inverse QFT (``target='inverse'``).

    Kind-specific parameters:
        diag_after / diag_before: ``thetas`` (length 2**n) or seeded draws in
            ``[-theta_scale, theta_scale]``.
        depolarized: ``p`` in [0, 1].
        perturbed_unitary / mixed_unitary: ``eps`` in [0, 1]; mixed uses ``terms``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: Optional[str] = None
    kind: NoiseKind
    n: int = Field(ge=1, le=10)
    target: Literal["inverse", "forward"] = "inverse"
    thetas: Optional[List[float]] = None
    theta_scale: float = Field(default=math.pi, ge=0)
    p: Optional[float] = Field(default=None, ge=0, le=1)
    eps: Optional[float] = Field(default=None, ge=0, le=1)
    terms: int = Field(default=2, ge=1, le=16)
    seed: Optional[int] = Field(default=None, ge=0, lt=SEED_MAX)

    @model_validator(mode="after")
    def _check_kind_params(self) -> "NoiseSpec":
        problems = []
        if self.kind == "depolarized" and self.p is None:
            problems.append("depolarized channels need 'p'")
        if self.kind in ("perturbed_unitary", "mixed_unitary") and self.eps is None:
            problems.append(f"{self.kind} channels need 'eps'")
        if self.thetas is not None:
            if self.kind not in ("diag_after", "diag_before"):
                problems.append(f"'thetas' is only meaningful for diagonal kinds, not {self.kind}")
            elif len(self.thetas) != 2 ** self.n:
                problems.append(f"'thetas' must have length {2 ** self.n}, got {len(self.thetas)}")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def is_unitary(self) -> bool:
        return self.kind in UNITARY_KINDS or (self.kind == "depolarized" and self.p == 0)

    @property
    def needs_seed(self) -> bool:
        if self.kind in ("perturbed_unitary", "mixed_unitary"):
            return True
        return self.kind in ("diag_after", "diag_before") and self.thetas is None


class InstanceSpec(BaseModel):
    """Parameters of an HHL instance; the matrix is built from its spectrum and eigenbasis."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    n: int = Field(ge=1, le=10)
    spectrum: List[float] = Field(min_length=1)
    basis: Literal["computational", "random"] = "computational"
    basis_seed: Optional[int] = Field(default=None, ge=0, lt=SEED_MAX)
    b: Union[List[float], Literal["uniform_eigen", "random"]] = "uniform_eigen"
    b_seed: Optional[int] = Field(default=None, ge=0, lt=SEED_MAX)
    function: FunctionName = "identity"
    cutoff: float = Field(default=1.0, gt=0)
    perfect_case: Optional[bool] = None

    @model_validator(mode="after")
    def _check_spectrum(self) -> "InstanceSpec":
        problems = []
        for value in self.spectrum:
            if not 0.0 <= value < 1.0:
                problems.append(f"eigenvalue {value!r} outside [0, 1)")
        if isinstance(self.b, list) and len(self.b) != len(self.spectrum):
            problems.append(f"'b' must have length {len(self.spectrum)}, got {len(self.b)}")
        if isinstance(self.b, list) and not any(self.b):
            problems.append("'b' must not be the zero vector")
        if self.basis == "random" and self.basis_seed is None:
            problems.append("a random eigenbasis needs 'basis_seed'")
        if self.b == "random" and self.b_seed is None:
            problems.append("a random 'b' needs 'b_seed'")
        if self.perfect_case and not self.spectrum_on_grid:
            problems.append(f"perfect_case needs every eigenvalue on the 1/{2 ** self.n} grid")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def d(self) -> int:
        return len(self.spectrum)

    @property
    def spectrum_on_grid(self) -> bool:
        size = 2 ** self.n
        return all(abs(s * size - round(s * size)) < 1e-9 for s in self.spectrum)

    @property
    def is_perfect(self) -> bool:
        return self.spectrum_on_grid if self.perfect_case is None else self.perfect_case
