"""Constant-size gadgets and the lowering pass down to the elementary gate set.

The elementary set G is every uncontrolled level swap ``X_ij`` plus the single
controlled gate ``|0>-X_01``. Lowering runs in two stages:

* ``TWO_QUDIT``: gates with two or more controls are split into
  ``|0...0>-X_01`` cores (after relabelling controls and target) and each core
  is replaced by a two-controlled Toffoli gadget, or by a full k-Toffoli
  construction for three or more controls.
* ``G``: every remaining gate touches at most two wires; it is split by control
  level and by transposition, and each piece becomes ``|0>-X_01`` conjugated by
  uncontrolled swaps.

For even ``d`` the two-controlled gadget borrows one wire outside the gate; the
pass takes the lowest-numbered free wire of the circuit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Sequence

from .ir import (
    CONTROL,
    TARGET,
    Circuit,
    CircuitError,
    Control,
    CyclicAdd,
    Gate,
    GateKind,
    ParitySwapE,
    ParitySwapO,
    Pred,
    StarAdd,
    SwapLevels,
    ancilla,
    cyclic_add,
    eq,
    even_nz,
    is_g_gate,
    odd,
)

X01 = SwapLevels(0, 1)


class LoweringError(CircuitError):
    """A gate cannot be lowered inside the given register."""


class LoweringLevel(str, Enum):
    MACRO = "macro"
    TWO_QUDIT = "two-qudit"
    G = "g"


# --------------------------------------------------------------------------
# Level permutations


def transpositions(level_map: Sequence[int]) -> list[tuple[int, int]]:
    """Swaps whose application in list order realizes ``level_map``.

    A cycle ``c1 -> c2 -> ... -> cm`` becomes ``(c1 c2), (c1 c3), ..., (c1 cm)``,
    so a permutation of ``[d]`` never needs more than ``d - 1`` swaps.
    """
    out = []
    seen = [False] * len(level_map)
    for start in range(len(level_map)):
        if seen[start]:
            continue
        x = level_map[start]
        seen[start] = True
        while x != start:
            out.append((start, x))
            seen[x] = True
            x = level_map[x]
    return out


def relabel_swaps(i: int, j: int) -> list[tuple[int, int]]:
    """Disjoint swaps ``tau`` with ``{tau(i), tau(j)} == {0, 1}``.

    Since the swaps are disjoint, ``tau`` is an involution and
    ``X_ij = tau X_01 tau``.
    """
    if {i, j} == {0, 1}:
        return []
    if i in (0, 1):
        return [(j, 1 - i)]
    if j in (0, 1):
        return [(i, 1 - j)]
    return [(0, i), (1, j)]


def _swap(i: int, j: int, wire: int) -> Gate:
    return Gate(SwapLevels(i, j), wire)


def expand_controls(g: Gate, d: int) -> list[tuple[tuple[Control, ...], GateKind]]:
    """Split ``g`` into gates with only ``eq`` controls and pairwise disjoint firing sets.

    Parity controls fan out over their levels; a star control fans out over
    ``1..d-1`` with the matching ``X_{+-y}`` (``y = 0`` is the identity).
    """
    choices = []
    for c in g.controls:
        if c.pred is Pred.STAR:
            choices.append([(eq(c.wire, y), y) for y in range(1, d)])
        else:
            choices.append([(eq(c.wire, lv), None) for lv in c.levels(d)])
    out = []
    for combo in itertools.product(*choices):
        kind = g.kind
        if isinstance(kind, StarAdd):
            kind = CyclicAdd(kind.shifted(combo[0][1], d))
        out.append((tuple(c for c, _ in combo), kind))
    return out


# --------------------------------------------------------------------------
# Two-controlled Toffoli gadgets


def toffoli2_odd_gates(x1: int, x2: int, t: int, d: int) -> list[Gate]:
    """``|00>-X_01`` for odd ``d`` on three wires, no ancilla."""
    return [
        Gate(X01, t, (eq(x1),)),
        Gate(CyclicAdd(1), x2, (eq(x1),)),
        Gate(X01, t, (even_nz(x2),)),
        Gate(cyclic_add(-1, d), x2, (eq(x1),)),
        Gate(X01, t, (even_nz(x2),)),
    ]


# One row per gate: (target, kind, control wire, control level or "o" for odd).
_TOFFOLI2_EVEN = (
    ("x1", "X01", "x2", 1),
    ("x2", "X01", "a", "o"),
    ("x1", "X01", "x2", 1),
    ("t", "X01", "x1", 0),
    ("x1", "X01", "x2", 1),
    ("x2", "X01", "a", "o"),
    ("x1", "X01", "x2", 1),
    ("x1", "X02", "x2", 0),
    ("a", "Xeo", "x1", 2),
    ("x1", "X02", "x2", 0),
    ("x1", "X01", "x2", 1),
    ("x2", "X01", "a", "o"),
    ("x1", "X01", "x2", 1),
    ("t", "X01", "x1", 0),
    ("x1", "X01", "x2", 1),
    ("x2", "X01", "a", "o"),
    ("x1", "X01", "x2", 1),
    ("x1", "X02", "x2", 0),
    ("a", "Xeo", "x1", 2),
    ("x1", "X02", "x2", 0),
)

_TABLE_KINDS = {"X01": X01, "X02": SwapLevels(0, 2), "Xeo": ParitySwapE()}


def toffoli2_even_gates(x1: int, x2: int, t: int, a: int) -> list[Gate]:
    """``|00>-X_01`` for even ``d >= 4`` with ``a`` as a borrowed ancilla."""
    wires = {"x1": x1, "x2": x2, "t": t, "a": a}
    out = []
    for tgt, kind, cw, lv in _TOFFOLI2_EVEN:
        ctl = odd(wires[cw]) if lv == "o" else eq(wires[cw], lv)
        out.append(Gate(_TABLE_KINDS[kind], wires[tgt], (ctl,)))
    return out


# --------------------------------------------------------------------------
# Lowering of single gates


def _to_g(g: Gate, d: int) -> list[Gate]:
    """G-gates for a gate touching at most two wires."""
    if is_g_gate(g):
        return [g]
    if len(g.wires) > 2:
        raise LoweringError(f"gate {g} touches more than two wires")
    t = g.target
    if not g.controls:
        return [_swap(i, j, t) for i, j in transpositions(g.kind.level_map(d))]
    out: list[Gate] = []
    for (c,), kind in expand_controls(g, d):
        conj = [_swap(0, c.level, c.wire)] if c.level else []
        out += conj
        for i, j in transpositions(kind.level_map(d)):
            tau = [_swap(a, b, t) for a, b in relabel_swaps(i, j)]
            out += tau + [Gate(X01, t, (eq(c.wire),))] + tau[::-1]
        out += conj
    return out


def _free_wire(g: Gate, available: Sequence[int]) -> int | None:
    used = set(g.wires)
    return next((w for w in available if w not in used), None)


def _zero_toffoli(controls: list[int], t: int, d: int, available: Sequence[int]) -> list[Gate]:
    """Two-qudit gates for ``|0^k>-X_01`` with the given control wires."""
    if len(controls) == 1:
        return [Gate(X01, t, (eq(controls[0]),))]
    core = Gate(X01, t, tuple(eq(w) for w in controls))
    free = _free_wire(core, available) if d % 2 == 0 else None
    if d % 2 == 0 and free is None:
        raise LoweringError(f"even d={d}: no free wire to borrow for {core}")
    if len(controls) == 2:
        if d % 2:
            return toffoli2_odd_gates(controls[0], controls[1], t, d)
        return toffoli2_even_gates(controls[0], controls[1], t, free)
    from .multictl import emit_ktoffoli

    out = []
    for sub in emit_ktoffoli(d, controls, t, borrowed=free):
        out += _to_two(sub, d, available)
    return out


def _to_two(g: Gate, d: int, available: Sequence[int]) -> list[Gate]:
    """Gates touching at most two wires, equivalent to ``g``."""
    if len(g.targets) > 1:
        out = []
        for t in g.targets:
            out += _to_two(Gate(g.kind, t, g.controls), d, available)
        return out
    if len(g.wires) <= 2:
        return [g]
    t = g.target
    out = []
    for ctrls, kind in expand_controls(g, d):
        conj = [_swap(0, c.level, c.wire) for c in ctrls if c.level]
        zeros = [c.wire for c in ctrls]
        out += conj
        for i, j in transpositions(kind.level_map(d)):
            tau = [_swap(a, b, t) for a, b in relabel_swaps(i, j)]
            out += tau + _zero_toffoli(zeros, t, d, available) + tau[::-1]
        out += conj[::-1]
    return out


def _canonical(g: Gate) -> tuple[Gate, list[int]]:
    order = list(dict.fromkeys(g.wires))
    local = {w: i for i, w in enumerate(order)}
    cg = Gate(
        g.kind,
        tuple(local[t] for t in g.targets),
        tuple(Control(local[c.wire], c.pred, c.level) for c in g.controls),
    )
    return cg, order


def _needs_free_wire(g: Gate, d: int) -> bool:
    return d % 2 == 0 and len(g.controls) >= 2


@lru_cache(maxsize=None)
def _lowered_local(cg: Gate, d: int, level: LoweringLevel) -> tuple[Gate, ...]:
    n_local = len(cg.wires) + (1 if _needs_free_wire(cg, d) else 0)
    two = tuple(_to_two(cg, d, range(n_local)))
    if level is LoweringLevel.TWO_QUDIT:
        return two
    return tuple(h for g2 in two for h in _to_g(g2, d))


def _remap(g: Gate, order: Sequence[int]) -> Gate:
    return Gate(
        g.kind,
        tuple(order[t] for t in g.targets),
        tuple(Control(order[c.wire], c.pred, c.level) for c in g.controls),
    )


def lower_gate(g: Gate, d: int, m: int, level: LoweringLevel | str) -> list[Gate]:
    """Lower one gate of an ``m``-wire register to ``level``."""
    level = LoweringLevel(level)
    if level is LoweringLevel.MACRO:
        return [g]
    cg, order = _canonical(g)
    if _needs_free_wire(g, d):
        free = _free_wire(g, range(m))
        if free is None:
            raise LoweringError(f"even d={d}: no free wire to borrow for {g}")
        order.append(free)
    return [_remap(h, order) for h in _lowered_local(cg, d, level)]


def gate_cost(g: Gate, d: int, level: LoweringLevel | str) -> int:
    """Number of gates ``g`` becomes at ``level`` (assumes a free wire exists when needed)."""
    level = LoweringLevel(level)
    if level is LoweringLevel.MACRO:
        return 1
    return len(_lowered_local(_canonical(g)[0], d, level))


def lower(c: Circuit, level: LoweringLevel | str) -> Circuit:
    """Lower every gate of ``c`` to ``level``; the register is unchanged."""
    level = LoweringLevel(level)
    if level is LoweringLevel.MACRO:
        return c
    gates = [h for g in c.gates for h in lower_gate(g, c.d, c.m, level)]
    return c.with_gates(gates, lowering=level.value)


@dataclass(frozen=True)
class GateCount:
    macro: int
    two_qudit: int
    g_gates: int
    ancilla: dict

    def to_dict(self) -> dict:
        return {
            "macro": self.macro,
            "two_qudit": self.two_qudit,
            "g_gates": self.g_gates,
            "ancilla": dict(self.ancilla),
        }


def count_gates(c: Circuit) -> GateCount:
    """Gate counts at all three granularities without materializing the lowered circuit."""
    two = sum(gate_cost(g, c.d, LoweringLevel.TWO_QUDIT) for g in c.gates)
    gg = sum(gate_cost(g, c.d, LoweringLevel.G) for g in c.gates)
    return GateCount(len(c.gates), two, gg, c.ancilla_counts())


# --------------------------------------------------------------------------
# Public gadget builders


def _check_d(d: int) -> None:
    if d < 3:
        raise ValueError(f"qudit dimension must be >= 3, got {d}")


def lower_ctrl_swap(d: int, level: int, i: int, j: int) -> Circuit:
    """``|level>-X_ij`` in G-gates on wires (control, target)."""
    _check_d(d)
    if not (0 <= level < d and 0 <= i < d and 0 <= j < d) or i == j:
        raise ValueError(f"invalid levels: control {level}, swap ({i}, {j}) for d={d}")
    g = Gate(SwapLevels(i, j), 1, (eq(0, level),))
    return Circuit(d, (CONTROL, TARGET), _to_g(g, d), {"construction": "ctrl_swap"})


def lower_ctrl_add(d: int, level: int | None, y: int) -> Circuit:
    """``|level>-X_{+y}`` in G-gates; ``level=None`` gives the uncontrolled shift on one wire."""
    _check_d(d)
    if not 1 <= y <= d - 1:
        raise ValueError(f"shift must be in 1..{d - 1}, got {y}")
    if level is None:
        g = Gate(CyclicAdd(y), 0)
        return Circuit(d, (TARGET,), _to_g(g, d), {"construction": "add"})
    if not 0 <= level < d:
        raise ValueError(f"control level {level} out of range for d={d}")
    g = Gate(CyclicAdd(y), 1, (eq(0, level),))
    return Circuit(d, (CONTROL, TARGET), _to_g(g, d), {"construction": "ctrl_add"})


def lower_parity_ctrl(d: int, pred: Pred | str, base: GateKind) -> Circuit:
    """``|o>-U`` or ``|e>-U`` in G-gates, ``U`` a swap, shift or parity swap."""
    _check_d(d)
    pred = Pred(pred)
    if pred not in (Pred.ODD, Pred.EVEN_NONZERO):
        raise ValueError("parity control must be odd or even_nonzero")
    if not isinstance(base, (SwapLevels, CyclicAdd, ParitySwapE, ParitySwapO)):
        raise ValueError(f"unsupported base gate {base}")
    base.validate(d)
    g = Gate(base, 1, (Control(0, pred),))
    return Circuit(d, (CONTROL, TARGET), _to_g(g, d), {"construction": f"{pred.value}_ctrl"})


def _finish(c: Circuit, level: LoweringLevel | str) -> Circuit:
    return lower(c, level)


def synth_2toffoli_even(d: int, level: LoweringLevel | str = LoweringLevel.MACRO) -> Circuit:
    """Two-controlled Toffoli for even ``d >= 4`` on (x1, x2, t, borrowed a)."""
    if d % 2 or d < 4:
        raise ValueError(f"even-d 2-Toffoli needs even d >= 4, got {d}")
    wires = (CONTROL, CONTROL, TARGET, ancilla("borrowed"))
    c = Circuit(d, wires, toffoli2_even_gates(0, 1, 2, 3), {"construction": "toffoli2_even", "k": 2})
    return _finish(c, level)


def synth_2toffoli_odd(d: int, level: LoweringLevel | str = LoweringLevel.MACRO) -> Circuit:
    """Ancilla-free two-controlled Toffoli for odd ``d`` on (x1, x2, t)."""
    if d % 2 == 0 or d < 3:
        raise ValueError(f"odd-d 2-Toffoli needs odd d >= 3, got {d}")
    c = Circuit(d, (CONTROL, CONTROL, TARGET), toffoli2_odd_gates(0, 1, 2, d),
                {"construction": "toffoli2_odd", "k": 2})
    return _finish(c, level)


def synth_star_add(d: int, sign: int = 1, level: LoweringLevel | str = LoweringLevel.MACRO) -> Circuit:
    """Expansion of ``|*>|0>-X_{+-*}`` on (star, zero control, target).

    The expansion is the product over ``y = 1..d-1`` of ``|y>|0>-X_{+-y}``. For
    even ``d`` a borrowed wire is appended so the result can be lowered.
    """
    _check_d(d)
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    wires = [CONTROL, CONTROL, TARGET]
    if d % 2 == 0:
        wires.append(ancilla("borrowed"))
    gates = [Gate(cyclic_add(sign * y, d), 2, (eq(0, y), eq(1, 0))) for y in range(1, d)]
    c = Circuit(d, tuple(wires), gates, {"construction": "star_add", "sign": sign})
    return _finish(c, level)
