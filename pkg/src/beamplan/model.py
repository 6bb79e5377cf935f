"""Core domain types for beam-hopping time plans.

An Instance holds integer per-cycle beam demands plus the adjacency
(interference) structure; a Plan is an ordered list of Patterns, each a set
of simultaneously illuminated beams with one integer dwell weight.  Beams
are 0-indexed everywhere in memory; the instance/plan file formats use
1-indexed beams.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources


@dataclass(frozen=True)
class CycleConfig:
    """Hopping-cycle timing: W fixed-length super-frames of sf_ms each."""

    sf_ms: float = 1.5
    slots: int = 256
    min_granularity_ms: float = 1.5
    switching_ms: float = 0.0

    def __post_init__(self):
        if self.sf_ms <= 0:
            raise ValueError("sf_ms must be positive")
        if self.slots < 1:
            raise ValueError("slots must be a positive integer")
        if self.min_granularity_ms <= 0:
            raise ValueError("min_granularity_ms must be positive")
        if self.switching_ms < 0:
            raise ValueError("switching_ms must be non-negative")

    @property
    def cycle_ms(self) -> float:
        return self.sf_ms * self.slots


@dataclass(frozen=True)
class Pattern:
    """A set of co-illuminated beams with one positive integer weight."""

    beams: frozenset[int]
    weight: int

    def __init__(self, beams, weight: int):
        beam_list = list(beams)
        beam_set = frozenset(beam_list)
        if len(beam_set) != len(beam_list):
            raise ValueError(f"duplicate beam indices in pattern: {sorted(beam_list)}")
        if not beam_set:
            raise ValueError("pattern must contain at least one beam")
        if any(not isinstance(b, int) or b < 0 for b in beam_set):
            raise ValueError("beam indices must be non-negative integers")
        if not isinstance(weight, int) or weight < 1:
            raise ValueError(f"pattern weight must be a positive integer, got {weight!r}")
        object.__setattr__(self, "beams", beam_set)
        object.__setattr__(self, "weight", weight)


@dataclass(frozen=True)
class Plan:
    """An ordered collection of patterns forming one hopping cycle."""

    patterns: tuple[Pattern, ...]
    cycle: CycleConfig

    def __init__(self, patterns, cycle: CycleConfig):
        object.__setattr__(self, "patterns", tuple(patterns))
        object.__setattr__(self, "cycle", cycle)

    @property
    def total_weight(self) -> int:
        return sum(p.weight for p in self.patterns)


@dataclass(frozen=True)
class ConstraintSet:
    """Pattern-level constraints: optional cardinality cap and interference."""

    n_max: int | None = None
    interference: bool = False

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 1:
            raise ValueError("n_max must be >= 1 when present")


@dataclass(frozen=True)
class Instance:
    """A beam-hopping problem: demands, adjacency and cycle configuration."""

    n_beams: int
    demands: tuple[int, ...]
    adjacency: tuple[frozenset[int], ...]
    cycle: CycleConfig = CycleConfig()
    metadata: dict | None = None

    def __init__(self, n_beams, demands, adjacency, cycle=CycleConfig(), metadata=None):
        object.__setattr__(self, "n_beams", n_beams)
        object.__setattr__(self, "demands", tuple(demands))
        object.__setattr__(self, "adjacency", tuple(frozenset(a) for a in adjacency))
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "metadata", metadata)

    @property
    def max_demand(self) -> int:
        return max(self.demands) if self.demands else 0


@dataclass
class CheckReport:
    """Outcome of a validation or feasibility check."""

    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: Instance) -> CheckReport:
    """Check every Instance invariant, reporting all violations found."""
    report = CheckReport()
    v = report.violations
    n = inst.n_beams
    if n < 1:
        v.append(f"n_beams must be >= 1, got {n}")
        return report
    if len(inst.demands) != n:
        v.append(f"demands length {len(inst.demands)} != n_beams {n}")
        return report
    if len(inst.adjacency) != n:
        v.append(f"adjacency length {len(inst.adjacency)} != n_beams {n}")
        return report
    for b, d in enumerate(inst.demands):
        if not isinstance(d, int) or d < 0:
            v.append(f"demand of beam {b} must be a non-negative integer, got {d!r}")
    if all(d == 0 for d in inst.demands):
        v.append("no positive demand")
    for b, neigh in enumerate(inst.adjacency):
        for nb in sorted(neigh):
            if not (0 <= nb < n):
                v.append(f"adjacency index out of range: beam {b} lists {nb}")
            elif nb == b:
                v.append(f"self-adjacency at beam {b}")
            elif b not in inst.adjacency[nb]:
                v.append(f"asymmetric adjacency ({b},{nb})")
    return report


def accumulated_weights(plan: Plan, n_beams: int) -> list[int]:
    """Per-beam sum of the weights of all patterns containing the beam."""
    acc = [0] * n_beams
    for p in plan.patterns:
        for b in p.beams:
            if b >= n_beams:
                raise IndexError(f"pattern beam {b} out of range for {n_beams} beams")
            acc[b] += p.weight
    return acc


def check_feasible(plan: Plan, inst: Instance, cons: ConstraintSet) -> CheckReport:
    """Check a plan against demands, cardinality and interference constraints."""
    report = CheckReport()
    v = report.violations
    acc = accumulated_weights(plan, inst.n_beams)
    for b, (got, want) in enumerate(zip(acc, inst.demands)):
        if got != want:
            v.append(f"demand mismatch beam {b}: {got} != {want}")
    for i, p in enumerate(plan.patterns):
        if cons.n_max is not None and len(p.beams) > cons.n_max:
            v.append(f"pattern {i} has {len(p.beams)} beams, exceeds n_max {cons.n_max}")
        if cons.interference:
            for b in sorted(p.beams):
                for nb in sorted(inst.adjacency[b]):
                    if nb > b and nb in p.beams:
                        v.append(f"adjacent pair ({b},{nb}) co-illuminated in pattern {i}")
    return report


# ---------------------------------------------------------------------------
# Instance / plan file formats (JSON; beams 1-indexed on disk)

def _parse_cycle(obj) -> CycleConfig:
    if not isinstance(obj, dict):
        raise ValueError("field 'cycle': expected an object")
    known = {"sf_ms", "slots", "min_granularity_ms", "switching_ms"}
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"field 'cycle': unknown keys {sorted(unknown)}")
    return CycleConfig(
        sf_ms=float(obj.get("sf_ms", 1.5)),
        slots=int(obj.get("slots", 256)),
        min_granularity_ms=float(obj.get("min_granularity_ms", 1.5)),
        switching_ms=float(obj.get("switching_ms", 0.0)),
    )


def load_instance(data: bytes | str) -> Instance:
    """Parse an instance file; symmetrizes one-directional neighbour lists.

    Raises ValueError on malformed input or if the loaded instance violates
    an invariant.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    obj = json.loads(data)
    if not isinstance(obj, dict):
        raise ValueError("instance file must contain a JSON object")
    for key in ("n_beams", "demands"):
        if key not in obj:
            raise ValueError(f"field '{key}': missing")
    n = obj["n_beams"]
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"field 'n_beams': expected positive integer, got {n!r}")
    demands = obj["demands"]
    if not isinstance(demands, list) or len(demands) != n:
        raise ValueError(f"field 'demands': expected array of length {n}")
    for i, d in enumerate(demands):
        if not isinstance(d, int):
            raise ValueError(f"field 'demands'[{i}]: expected integer, got {d!r}")
    neighbours = obj.get("neighbours", [])
    if not isinstance(neighbours, list) or len(neighbours) > n:
        raise ValueError(f"field 'neighbours': expected array of at most {n} arrays")
    adjacency = [set() for _ in range(n)]
    for i, lst in enumerate(neighbours):
        if not isinstance(lst, list):
            raise ValueError(f"field 'neighbours'[{i}]: expected array")
        for raw in lst:
            if not isinstance(raw, int) or not (1 <= raw <= n):
                raise ValueError(
                    f"field 'neighbours'[{i}]: beam {raw!r} outside 1..{n}"
                )
            if raw - 1 == i:
                raise ValueError(f"field 'neighbours'[{i}]: beam adjacent to itself")
            adjacency[i].add(raw - 1)
            adjacency[raw - 1].add(i)
    cycle = _parse_cycle(obj.get("cycle", {}))
    metadata = obj.get("metadata")
    inst = Instance(n, demands, adjacency, cycle, metadata)
    report = validate_instance(inst)
    if not report.ok:
        raise ValueError("invalid instance: " + "; ".join(report.violations))
    return inst


def save_instance(inst: Instance) -> bytes:
    """Serialize an instance; neighbour lists are written one-directionally."""
    obj = {
        "n_beams": inst.n_beams,
        "demands": list(inst.demands),
        "neighbours": [
            sorted(nb + 1 for nb in inst.adjacency[b] if nb > b)
            for b in range(inst.n_beams)
        ],
        "cycle": {
            "sf_ms": inst.cycle.sf_ms,
            "slots": inst.cycle.slots,
            "min_granularity_ms": inst.cycle.min_granularity_ms,
            "switching_ms": inst.cycle.switching_ms,
        },
    }
    if inst.metadata is not None:
        obj["metadata"] = inst.metadata
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


def load_plan(data: bytes | str) -> Plan:
    """Parse a plan file (1-indexed beam arrays plus a cycle echo)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    obj = json.loads(data)
    if not isinstance(obj, dict) or "patterns" not in obj:
        raise ValueError("plan file must be an object with a 'patterns' array")
    patterns = []
    for i, p in enumerate(obj["patterns"]):
        if not isinstance(p, dict) or "beams" not in p or "weight" not in p:
            raise ValueError(f"field 'patterns'[{i}]: expected beams and weight")
        beams = [b - 1 for b in p["beams"]]
        if any(b < 0 for b in beams):
            raise ValueError(f"field 'patterns'[{i}]: beams are 1-indexed")
        patterns.append(Pattern(beams, p["weight"]))
    cycle = _parse_cycle(obj.get("cycle", {}))
    return Plan(patterns, cycle)


def save_plan(plan: Plan) -> bytes:
    obj = {
        "patterns": [
            {"beams": sorted(b + 1 for b in p.beams), "weight": p.weight}
            for p in plan.patterns
        ],
        "cycle": {
            "sf_ms": plan.cycle.sf_ms,
            "slots": plan.cycle.slots,
            "min_granularity_ms": plan.cycle.min_granularity_ms,
            "switching_ms": plan.cycle.switching_ms,
        },
    }
    return (json.dumps(obj, indent=2) + "\n").encode("utf-8")


def bundled_instance(name: str) -> Instance:
    """Load one of the instances shipped with the package.

    Available: "instance10" (10 beams) and "instance15" (15 beams).
    """
    path = resources.files("beamplan.data").joinpath(f"{name}.json")
    return load_instance(path.read_bytes())
