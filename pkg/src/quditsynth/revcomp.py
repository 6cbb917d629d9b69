"""Compile reversible functions on ``[d]^n`` into gates, one transposition at a time."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from .ir import TARGET, Circuit, Gate, SwapLevels, ancilla, eq
from .multictl import emit_ktoffoli
from .primitives import LoweringLevel, lower, relabel_swaps, transpositions
from .sim import decode


class FunctionError(ValueError):
    """The function table is malformed or not a bijection."""


@dataclass(frozen=True)
class ReversibleFunction:
    """A bijection of ``[d]^n`` given as ``table[s] = image of s`` on encoded states."""

    d: int
    n: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        if self.d < 2 or self.n < 1:
            raise FunctionError(f"need d >= 2 and n >= 1, got d={self.d}, n={self.n}")
        size = self.d**self.n
        if len(self.table) != size:
            raise FunctionError(f"table has {len(self.table)} entries, expected {size}")
        if sorted(self.table) != list(range(size)):
            raise FunctionError("table is not a bijection")

    @classmethod
    def identity(cls, d: int, n: int) -> ReversibleFunction:
        return cls(d, n, tuple(range(d**n)))

    @classmethod
    def from_dict(cls, doc: Any) -> ReversibleFunction:
        if not isinstance(doc, dict) or set(doc) != {"d", "n", "table"}:
            raise FunctionError('function file must be an object with exactly "d", "n", "table"')
        if not all(isinstance(doc[k], int) for k in ("d", "n")) or not isinstance(doc["table"], list):
            raise FunctionError("d and n must be integers and table a list")
        return cls(doc["d"], doc["n"], tuple(doc["table"]))

    @classmethod
    def load(cls, path: str | Path) -> ReversibleFunction:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict[str, Any]:
        return {"d": self.d, "n": self.n, "table": list(self.table)}


@dataclass(frozen=True)
class TwoCycle:
    """The swap of basis states ``a`` and ``b``; ``pivot`` defaults to the last differing index."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    pivot: int | None = None

    def __post_init__(self) -> None:
        a, b = tuple(self.a), tuple(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if len(a) != len(b) or a == b:
            raise FunctionError(f"a 2-cycle needs two distinct states of equal length: {a}, {b}")
        if self.pivot is None:
            object.__setattr__(self, "pivot", max(i for i in range(len(a)) if a[i] != b[i]))
        elif a[self.pivot] == b[self.pivot]:
            raise FunctionError(f"pivot {self.pivot} is not a differing position")


def decompose_transpositions(f: ReversibleFunction) -> list[TwoCycle]:
    """Transpositions of encoded states, in application order, whose product is ``f``.

    Cycles are taken in order of their smallest state ``c1``; a cycle
    ``c1 -> c2 -> ... -> cm`` contributes ``(c1 c2), (c1 c3), ..., (c1 cm)``.
    """
    return [TwoCycle(decode(s, f.d, f.n), decode(t, f.d, f.n)) for s, t in transpositions(f.table)]


def two_cycle_gates(t: TwoCycle, d: int, borrowed: int | None = None) -> list[Gate]:
    """Macro gates swapping ``t.a`` and ``t.b``; wires ``0..n-1`` are the state."""
    n, p = len(t.a), t.pivot
    a, b = t.a, t.b
    step1 = [Gate(SwapLevels(a[i], b[i]), i, (eq(p, b[p]),)) for i in range(n) if i != p and a[i] != b[i]]
    others = [i for i in range(n) if i != p]
    swap = SwapLevels(a[p], b[p])
    if len(others) <= 2:
        step2 = [Gate(swap, p, tuple(eq(i, a[i]) for i in others))]
    else:
        conj = [Gate(SwapLevels(0, a[i]), i) for i in others if a[i]]
        tau = [Gate(SwapLevels(x, y), p) for x, y in relabel_swaps(a[p], b[p])]
        core = emit_ktoffoli(d, others, p, borrowed=borrowed)
        step2 = conj + tau + core + tau[::-1] + conj
    return step1 + step2 + step1


def _register(d: int, n: int) -> tuple:
    wires = (TARGET,) * n
    return wires + ((ancilla("borrowed"),) if d % 2 == 0 else ())


def synth_2cycle(
    t: TwoCycle, d: int, n: int, level: LoweringLevel | str = LoweringLevel.MACRO
) -> Circuit:
    """Circuit for one transposition; even ``d`` adds one borrowed wire."""
    if len(t.a) != n or any(not 0 <= v < d for v in t.a + t.b):
        raise FunctionError(f"2-cycle {t.a} <-> {t.b} is not on [{d}]^{n}")
    borrowed = n if d % 2 == 0 else None
    c = Circuit(d, _register(d, n), two_cycle_gates(t, d, borrowed), {"family": "two_cycle"})
    return lower(c, level)


def compile_reversible(
    f: ReversibleFunction, level: LoweringLevel | str = LoweringLevel.MACRO
) -> Circuit:
    """Circuit realizing ``f``: ancilla-free for odd ``d``, one shared borrowed wire for even ``d``."""
    if f.d < 3:
        raise FunctionError(f"qudit dimension must be >= 3, got {f.d}")
    borrowed = f.n if f.d % 2 == 0 else None
    gates = [g for t in decompose_transpositions(f) for g in two_cycle_gates(t, f.d, borrowed)]
    c = Circuit(f.d, _register(f.d, f.n), gates, {"family": "function", "n": f.n})
    return lower(c, level)


@dataclass(frozen=True)
class BoundReport:
    n: int
    d: int
    c: float
    value: float
    bound: int
    observed: int | None = None

    @property
    def ratio(self) -> float | None:
        return None if self.observed is None else self.observed / self.bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "d": self.d,
            "c": self.c,
            "value": self.value,
            "bound": self.bound,
            "observed": self.observed,
            "ratio": self.ratio,
        }


def lower_bound(n: int, d: int, c: float = 1, observed: int | None = None) -> BoundReport:
    """Counting lower bound ``ceil(n d^n log d / (4 log(c d n)))`` on worst-case gate count.

    ``c`` scales the register: ``(c - 1) n`` ancilla wires on top of the ``n`` inputs.
    """
    if n < 1 or d < 2 or c < 1:
        raise ValueError(f"need n >= 1, d >= 2, c >= 1; got n={n}, d={d}, c={c}")
    value = n * d**n * math.log(d) / (4 * math.log(c * d * n))
    return BoundReport(n, d, c, value, math.ceil(value - 1e-9), observed)


def random_function(d: int, n: int, rng) -> ReversibleFunction:
    """A uniformly random bijection of ``[d]^n`` drawn from a numpy ``Generator``."""
    return ReversibleFunction(d, n, tuple(int(v) for v in rng.permutation(d**n)))


__all__: Sequence[str] = (
    "BoundReport",
    "FunctionError",
    "ReversibleFunction",
    "TwoCycle",
    "compile_reversible",
    "decompose_transpositions",
    "lower_bound",
    "random_function",
    "synth_2cycle",
    "two_cycle_gates",
)
