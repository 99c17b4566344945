"""Distortion measures, distortion spheres, and witness search.

Three kinds of measure are supported: additive per-letter matrices, functionals
of the first-order joint type (scaled by n), and arbitrary callables. The first
two depend on the pair only through its joint type, which is what the covering
machinery requires; arbitrary callables are rejected there. Per-letter matrices
with integer or rational entries give exact integer/Fraction distortions, so
sphere membership tests never touch floats.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import (
    Alphabet,
    Block,
    EmpiricalDistribution,
    check_enumerable,
    enumerate_blocks,
    joint_empirical_distribution,
)
from .errors import PreconditionError

__all__ = [
    "DistortionSpec",
    "per_letter",
    "hamming",
    "joint_type_spec",
    "callable_spec",
    "squared_disagreement",
    "distortion",
    "enumerate_sphere",
    "enumerate_reverse_sphere",
    "find_witness",
    "spec_from_json",
    "spec_to_json",
    "load_spec",
]

PER_LETTER = "per_letter_matrix"
JOINT_TYPE = "joint_type_functional"
CALLABLE = "arbitrary_callable"


def _exact(value):
    """Normalize a matrix entry to int or Fraction, keeping integers integral."""
    if isinstance(value, bool):
        raise PreconditionError("matrix entries must be numbers")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else value
    if isinstance(value, float):
        f = Fraction(str(value))
        return int(f) if f.denominator == 1 else f
    if isinstance(value, str):
        f = Fraction(value)
        return int(f) if f.denominator == 1 else f
    raise PreconditionError(f"cannot interpret matrix entry {value!r}")


@dataclass(frozen=True)
class DistortionSpec:
    """A distortion measure together with its source/reproduction alphabets."""

    kind: str
    source: Alphabet
    repro: Alphabet
    matrix: tuple[tuple[object, ...], ...] | None = None
    functional: Callable | None = None
    fn: Callable | None = None

    @property
    def source_size(self) -> int:
        return self.source.size

    @property
    def repro_size(self) -> int:
        return self.repro.size

    @property
    def first_order_only(self) -> bool:
        """True when the measure depends only on the first-order joint type."""
        return self.kind in (PER_LETTER, JOINT_TYPE)


def per_letter(matrix, source: Alphabet, repro: Alphabet) -> DistortionSpec:
    rows = tuple(tuple(_exact(v) for v in row) for row in matrix)
    if len(rows) != source.size or any(len(r) != repro.size for r in rows):
        raise PreconditionError("matrix shape must be source size by repro size")
    for row in rows:
        for v in row:
            if v < 0:
                raise PreconditionError("matrix entries must be non-negative")
    return DistortionSpec(kind=PER_LETTER, source=source, repro=repro, matrix=rows)


def hamming(source: Alphabet, repro: Alphabet | None = None) -> DistortionSpec:
    """0/1 per-letter measure; indices agree means zero distortion."""
    repro = repro or source
    matrix = [[0 if i == j else 1 for j in range(repro.size)] for i in range(source.size)]
    return per_letter(matrix, source, repro)


def joint_type_spec(functional: Callable, source: Alphabet, repro: Alphabet) -> DistortionSpec:
    """Distortion n * functional(joint first-order type of the pair)."""
    return DistortionSpec(kind=JOINT_TYPE, source=source, repro=repro, functional=functional)


def callable_spec(fn: Callable, source: Alphabet, repro: Alphabet) -> DistortionSpec:
    """Fully general pairwise distortion; excluded from type-based machinery."""
    return DistortionSpec(kind=CALLABLE, source=source, repro=repro, fn=fn)


def _disagreement_squared(joint: EmpiricalDistribution):
    agree = Fraction(0)
    for (a, b), p in joint.probs().items():
        if a == b:
            agree += p
    return (1 - agree) ** 2


def squared_disagreement(source: Alphabet, repro: Alphabet | None = None) -> DistortionSpec:
    """Built-in non-additive fixture: n * (disagreement rate) squared."""
    return joint_type_spec(_disagreement_squared, source, repro or source)


def distortion(x: Block, xhat: Block, spec: DistortionSpec):
    """Evaluate the measure; exact (int/Fraction) for the exact kinds."""
    if x.n != xhat.n:
        raise PreconditionError("blocks must have equal length")
    if x.n == 0:
        raise PreconditionError("blocks must be nonempty")
    x.validate(spec.source_size)
    xhat.validate(spec.repro_size)
    if spec.kind == PER_LETTER:
        m = spec.matrix
        return sum(m[a][b] for a, b in zip(x.symbols, xhat.symbols))
    if spec.kind == JOINT_TYPE:
        joint = joint_empirical_distribution(x, xhat, 1)
        return x.n * spec.functional(joint)
    return spec.fn(x, xhat)


def _budget(n: int, level) -> Fraction:
    level = Fraction(level)
    if level < 0:
        raise PreconditionError("distortion level must be non-negative")
    return n * level


def enumerate_sphere(x: Block, level, spec: DistortionSpec) -> list[Block]:
    """All reproduction blocks within total distortion n * level of x."""
    budget = _budget(x.n, level)
    return [
        xhat
        for xhat in enumerate_blocks(x.n, spec.repro_size)
        if distortion(x, xhat, spec) <= budget
    ]


def enumerate_reverse_sphere(xhat: Block, level, spec: DistortionSpec) -> list[Block]:
    """All source blocks within total distortion n * level of xhat."""
    budget = _budget(xhat.n, level)
    return [
        x
        for x in enumerate_blocks(xhat.n, spec.source_size)
        if distortion(x, xhat, spec) <= budget
    ]


def find_witness(x: Block, level, spec: DistortionSpec) -> Block | None:
    """Some reproduction block within the budget, or None if the sphere is empty.

    For per-letter measures the per-position argmin minimizes the additive
    total, so the greedy choice decides emptiness without enumeration. Other
    kinds fall back to exhaustive search under the cap.
    """
    budget = _budget(x.n, level)
    if spec.kind == PER_LETTER:
        m = spec.matrix
        best_syms = []
        total = 0
        for a in x.symbols:
            row = m[a]
            j = min(range(spec.repro_size), key=lambda k: row[k])
            best_syms.append(j)
            total += row[j]
        if total <= budget:
            return Block(tuple(best_syms))
        return None
    check_enumerable(spec.repro_size**x.n, "witness search")
    for xhat in enumerate_blocks(x.n, spec.repro_size):
        if distortion(x, xhat, spec) <= budget:
            return xhat
    return None


def spec_from_json(text: str) -> DistortionSpec:
    """Parse the JSON wire form: kind, matrix, and source/repro alphabets."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"invalid distortion JSON: {e}")
    if not isinstance(data, dict) or "kind" not in data:
        raise PreconditionError("distortion JSON must be an object with a 'kind'")
    alphabets = data.get("alphabets", {})
    source = Alphabet(alphabets.get("source", "01"))
    repro = Alphabet(alphabets.get("repro", alphabets.get("source", "01")))
    kind = data["kind"]
    if kind == PER_LETTER:
        if "matrix" not in data:
            raise PreconditionError("per-letter distortion JSON needs a matrix")
        return per_letter(data["matrix"], source, repro)
    if kind == "hamming":
        return hamming(source, repro)
    if kind == JOINT_TYPE and data.get("functional") == "squared_disagreement":
        return squared_disagreement(source, repro)
    raise PreconditionError(f"unsupported distortion kind {kind!r} in JSON")


def spec_to_json(spec: DistortionSpec) -> str:
    if spec.kind != PER_LETTER:
        raise PreconditionError("only per-letter specs serialize to JSON")
    return json.dumps(
        {
            "kind": PER_LETTER,
            "matrix": [[str(v) for v in row] for row in spec.matrix],
            "alphabets": {"source": spec.source.symbols, "repro": spec.repro.symbols},
        }
    )


def load_spec(path: str) -> DistortionSpec:
    with open(path, "r", encoding="utf-8") as f:
        return spec_from_json(f.read())
