from __future__ import annotations

from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .results import ProtocolName
from .specs import SEED_MAX, UNITARY_KINDS, InstanceSpec, NoiseKind, NoiseSpec

SuiteName = Literal[
    "closeness_audit",
    "protocol_calibration",
    "theorem_s3",
    "hhl_perfect",
    "hhl_general",
    "hhl_unitary_inverse",
    "hhl_cp_mode",
    "adversarial_demo",
]

SUITES = SuiteName.__args__

HHL_SUITES = ("hhl_perfect", "hhl_general", "hhl_unitary_inverse", "hhl_cp_mode")

SCHEMA_VERSION = 1


class PlanSpec(BaseModel):
    """Additive error, failure probability and (optionally) the tested closeness ``eta``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    epsilon: float = Field(default=0.05, gt=0, lt=1)
    delta: float = Field(default=0.05, gt=0, lt=1)
    eta: Optional[float] = Field(default=None, gt=0, lt=1)


class PairSpec(BaseModel):
    """A C channel (inverse-QFT stand-in) and an optional P channel (QFT stand-in).

    Without ``p`` the exact QFT is used.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    id: str
    c: str
    p: Optional[str] = None


class PopulationSpec(BaseModel):
    """Seeded random population.

    For `theorem_s3` every member is one channel. For the HHL suites every member
    is a channel pair (or a single channel) plus an instance of dimension drawn
    from ``d`` with a random eigenbasis and input vector.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(default=100, ge=1, le=10000)
    n: List[int] = Field(default_factory=lambda: [2, 3])
    families: List[NoiseKind] = Field(
        default_factory=lambda: [
            "diag_after",
            "diag_before",
            "depolarized",
            "perturbed_unitary",
            "mixed_unitary",
        ]
    )
    max_strength: float = Field(default=0.5, gt=0, le=1)
    d: List[int] = Field(default_factory=lambda: [2, 4])

    @model_validator(mode="after")
    def _check_widths(self) -> "PopulationSpec":
        if not self.n or any(not 1 <= n <= 10 for n in self.n):
            raise ValueError("population widths must be non-empty and within [1, 10]")
        if not self.families:
            raise ValueError("population needs at least one family")
        if not self.d or any(not 1 <= d <= 16 for d in self.d):
            raise ValueError("population dimensions must be non-empty and within [1, 16]")
        return self


class DemoSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    thetas: List[float] = Field(default_factory=lambda: [0.0, 3.141592653589793, 0.0, 3.141592653589793])
    spectrum: List[float] = Field(default_factory=lambda: [0.25, 0.5])
    max_fidelity: float = Field(default=0.6, gt=0, le=1)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    schema_version: Literal[1]
    suite: SuiteName
    seed: int = Field(ge=0, lt=SEED_MAX)
    description: str = ""
    output: Optional[str] = None
    format: Literal["structured", "tabular"] = "structured"
    plan: PlanSpec = Field(default_factory=PlanSpec)
    protocols: List[ProtocolName] = Field(default_factory=lambda: ["TA1", "TA2", "TP1", "TP2"])
    reruns: int = Field(default=200, ge=1, le=100000)
    K: List[int] = Field(default_factory=lambda: [4])
    observables: int = Field(default=5, ge=0, le=100)
    channels: List[NoiseSpec] = Field(default_factory=list)
    pairs: List[PairSpec] = Field(default_factory=list)
    instances: List[InstanceSpec] = Field(default_factory=list)
    population: Optional[PopulationSpec] = None
    demo: DemoSpec = Field(default_factory=DemoSpec)

    @model_validator(mode="after")
    def _check_references(self) -> "ExperimentConfig":
        problems: List[str] = []

        ids: List[str] = []
        for spec in self.channels:
            if spec.id is None:
                problems.append(f"channel of kind {spec.kind!r} needs an 'id'")
            else:
                ids.append(spec.id)
        ids.extend(pair.id for pair in self.pairs)
        ids.extend(inst.id for inst in self.instances)
        seen = set()
        for ident in ids:
            if ident in seen:
                problems.append(f"duplicate id {ident!r}")
            seen.add(ident)

        if any(k < 2 for k in self.K):
            problems.append("every K must be at least 2")

        by_id = self.channel_map()
        for pair in self.pairs:
            c = by_id.get(pair.c)
            if c is None:
                problems.append(f"pair {pair.id!r} references unknown channel {pair.c!r}")
            elif c.target != "inverse":
                problems.append(f"pair {pair.id!r}: channel {pair.c!r} must target the inverse QFT")
            if pair.p is not None:
                p = by_id.get(pair.p)
                if p is None:
                    problems.append(f"pair {pair.id!r} references unknown channel {pair.p!r}")
                elif p.target != "forward":
                    problems.append(f"pair {pair.id!r}: channel {pair.p!r} must target the forward QFT")
                elif c is not None and c.n != p.n:
                    problems.append(f"pair {pair.id!r} mixes widths {c.n} and {p.n}")

        problems.extend(self._suite_problems(by_id))
        if problems:
            raise ValueError("; ".join(problems))
        return self

    def _suite_problems(self, by_id: Dict[str, NoiseSpec]) -> List[str]:
        problems: List[str] = []
        suite = self.suite
        if suite == "closeness_audit" and not (self.channels or self.pairs):
            problems.append("closeness_audit needs 'channels' or 'pairs'")
        if suite == "theorem_s3" and not (self.channels or self.population):
            problems.append("theorem_s3 needs 'channels' or 'population'")
        if suite == "protocol_calibration" and not self.channels:
            problems.append("protocol_calibration needs 'channels'")
        sampled = self.population is not None
        if suite in HHL_SUITES and not (self.instances or sampled):
            problems.append(f"{suite} needs 'instances' or 'population'")
        if suite in ("hhl_perfect", "hhl_general", "hhl_cp_mode") and self.instances and not self.pairs:
            problems.append(f"{suite} needs 'pairs' for its 'instances'")
        if suite in ("hhl_unitary_inverse", "hhl_cp_mode") and sampled:
            if not any(kind in UNITARY_KINDS for kind in self.population.families):
                problems.append(f"{suite} population needs at least one unitary family")
        if suite == "hhl_unitary_inverse":
            inverse = [c for c in self.channels if c.target == "inverse"]
            if self.instances and not inverse:
                problems.append("hhl_unitary_inverse needs inverse-targeted 'channels'")
            for spec in inverse:
                if not spec.is_unitary:
                    problems.append(f"channel {spec.id!r} is not unitary; hhl_unitary_inverse needs unitary channels")
        if suite == "hhl_cp_mode":
            for pair in self.pairs:
                for ref in (pair.c, pair.p):
                    spec = by_id.get(ref) if ref is not None else None
                    if spec is not None and not spec.is_unitary:
                        problems.append(f"pair {pair.id!r}: hhl_cp_mode needs unitary channels, {ref!r} is not")
        if suite == "hhl_perfect":
            for inst in self.instances:
                if not inst.is_perfect:
                    problems.append(f"instance {inst.id!r} is not a perfect-case instance")
        if suite in HHL_SUITES and self.instances and not self.hhl_cases():
            problems.append(f"{suite}: no channel matches the phase-register width of any instance")
        return problems

    def channel_map(self) -> Dict[str, NoiseSpec]:
        return {spec.id: spec for spec in self.channels if spec.id is not None}

    def hhl_cases(self) -> List[tuple]:
        """(channel-or-pair id, instance id) combinations with matching register widths."""
        by_id = self.channel_map()
        if self.suite == "hhl_unitary_inverse":
            sources = [(spec.id, spec.n) for spec in self.channels if spec.target == "inverse"]
        else:
            sources = [(pair.id, by_id[pair.c].n) for pair in self.pairs if pair.c in by_id]
        return [
            (source, inst.id)
            for source, width in sources
            for inst in self.instances
            if inst.n == width
        ]


__all__ = [
    "SuiteName",
    "SUITES",
    "HHL_SUITES",
    "SCHEMA_VERSION",
    "PlanSpec",
    "PairSpec",
    "PopulationSpec",
    "DemoSpec",
    "ExperimentConfig",
]
