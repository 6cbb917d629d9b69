"""Gate and circuit intermediate representation.

A circuit acts on ``m`` qudits of dimension ``d``. Every gate permutes the
computational basis, so a basis state is just a tuple of levels, one per wire.
When states are packed into integers (see :mod:`quditsynth.sim`) wire 0 is the
most significant mixed-radix digit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence, Union


class CircuitError(ValueError):
    """A gate or circuit violates a structural invariant."""


class CircuitFormatError(CircuitError):
    """A serialized circuit document is malformed."""


# --------------------------------------------------------------------------
# Controls


class Pred(str, Enum):
    EQ = "eq"
    ODD = "odd"
    EVEN_NONZERO = "even_nonzero"
    STAR = "star"


@dataclass(frozen=True)
class Control:
    """One control of a gate: a wire plus the predicate that makes it fire.

    ``level`` is only meaningful for ``Pred.EQ``. A ``STAR`` control never
    blocks the gate; it supplies the shift amount of a ``StarAdd``.
    """

    wire: int
    pred: Pred = Pred.EQ
    level: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pred", Pred(self.pred))
        if self.wire < 0:
            raise CircuitError(f"negative wire index {self.wire}")
        if self.pred is Pred.EQ:
            if self.level < 0:
                raise CircuitError(f"negative control level {self.level}")
        elif self.level != 0:
            raise CircuitError(f"level given for non-eq predicate {self.pred.value}")

    def levels(self, d: int) -> tuple[int, ...]:
        """Levels of ``[d]`` on which this control fires."""
        if self.pred is Pred.EQ:
            return (self.level,)
        if self.pred is Pred.ODD:
            return tuple(range(1, d, 2))
        if self.pred is Pred.EVEN_NONZERO:
            return tuple(range(2, d, 2))
        raise CircuitError("a star control has no firing set")

    def fires(self, value: int) -> bool:
        if self.pred is Pred.EQ:
            return value == self.level
        if self.pred is Pred.ODD:
            return value % 2 == 1
        if self.pred is Pred.EVEN_NONZERO:
            return value != 0 and value % 2 == 0
        return True


def eq(wire: int, level: int = 0) -> Control:
    return Control(wire, Pred.EQ, level)


def odd(wire: int) -> Control:
    return Control(wire, Pred.ODD)


def even_nz(wire: int) -> Control:
    return Control(wire, Pred.EVEN_NONZERO)


def star(wire: int) -> Control:
    return Control(wire, Pred.STAR)


# --------------------------------------------------------------------------
# Gate kinds


@dataclass(frozen=True)
class SwapLevels:
    """``X_ij``: exchange levels ``i`` and ``j``. Stored with ``i < j``."""

    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i == self.j:
            raise CircuitError(f"X_ij needs distinct levels, got {self.i}")
        if min(self.i, self.j) < 0:
            raise CircuitError("negative level in X_ij")
        if self.i > self.j:
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)

    def validate(self, d: int) -> None:
        if self.j >= d:
            raise CircuitError(f"X_{self.i}{self.j} out of range for d={d}")

    def level_map(self, d: int) -> tuple[int, ...]:
        out = list(range(d))
        out[self.i], out[self.j] = self.j, self.i
        return tuple(out)

    def inverse(self, d: int) -> SwapLevels:
        return self


@dataclass(frozen=True)
class CyclicAdd:
    """``X_{+y}``: level ``x`` goes to ``(x + y) mod d``; ``1 <= y <= d-1``."""

    y: int

    def __post_init__(self) -> None:
        if self.y < 1:
            raise CircuitError(f"X_+y needs y >= 1, got {self.y}")

    def validate(self, d: int) -> None:
        if self.y > d - 1:
            raise CircuitError(f"X_+{self.y} out of range for d={d}")

    def level_map(self, d: int) -> tuple[int, ...]:
        return tuple((x + self.y) % d for x in range(d))

    def inverse(self, d: int) -> CyclicAdd:
        return CyclicAdd(d - self.y)


@dataclass(frozen=True)
class ParitySwapE:
    """``X_01 X_23 ... X_(d-2)(d-1)``; even ``d`` only."""

    def validate(self, d: int) -> None:
        if d % 2:
            raise CircuitError(f"parity_e needs even d, got d={d}")

    def level_map(self, d: int) -> tuple[int, ...]:
        return tuple(x ^ 1 for x in range(d))

    def inverse(self, d: int) -> ParitySwapE:
        return self


@dataclass(frozen=True)
class ParitySwapO:
    """``X_12 X_34 ...``; level 0 is fixed, and for even ``d`` so is ``d-1``."""

    def validate(self, d: int) -> None:
        pass

    def level_map(self, d: int) -> tuple[int, ...]:
        out = list(range(d))
        for lo in range(1, d - 1, 2):
            out[lo], out[lo + 1] = lo + 1, lo
        return tuple(out)

    def inverse(self, d: int) -> ParitySwapO:
        return self


@dataclass(frozen=True)
class StarAdd:
    """``X_{+-star}``: add ``sign * (value of the star control)`` to the target."""

    sign: int

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise CircuitError(f"star_add sign must be +1 or -1, got {self.sign}")

    def validate(self, d: int) -> None:
        pass

    def shifted(self, value: int, d: int) -> int:
        """Shift applied for star value ``value``, reduced mod ``d``."""
        return (self.sign * value) % d

    def inverse(self, d: int) -> StarAdd:
        return StarAdd(-self.sign)


@dataclass(frozen=True)
class OpaquePerm:
    """An arbitrary single-qudit permutation ``x -> perm[x]``."""

    perm: tuple[int, ...]
    name: str = "u"

    def __post_init__(self) -> None:
        object.__setattr__(self, "perm", tuple(int(v) for v in self.perm))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise CircuitError(f"opaque gate {self.name!r} is not a bijection: {self.perm}")

    def validate(self, d: int) -> None:
        if len(self.perm) != d:
            raise CircuitError(f"opaque gate {self.name!r} has size {len(self.perm)}, d={d}")

    def level_map(self, d: int) -> tuple[int, ...]:
        return self.perm

    def inverse(self, d: int) -> OpaquePerm:
        inv = [0] * len(self.perm)
        for x, y in enumerate(self.perm):
            inv[y] = x
        name = self.name[:-3] if self.name.endswith("^-1") else self.name + "^-1"
        return OpaquePerm(tuple(inv), name)


GateKind = Union[SwapLevels, CyclicAdd, ParitySwapE, ParitySwapO, StarAdd, OpaquePerm]

# Kinds for which the gate's target action does not depend on any control value.
_BROADCASTABLE = (ParitySwapE, ParitySwapO)


def cyclic_add(y: int, d: int) -> CyclicAdd:
    """``X_{+y}`` with ``y`` reduced mod ``d`` (so ``-1`` gives ``X_{+(d-1)}``)."""
    return CyclicAdd(y % d)


# --------------------------------------------------------------------------
# Gates


@dataclass(frozen=True)
class Gate:
    """A (multi-)controlled single-qudit permutation.

    ``targets`` has one entry except for broadcast parity swaps, which apply
    the same permutation to several wires under shared controls.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[Control, ...] = ()

    def __post_init__(self) -> None:
        targets = (self.targets,) if isinstance(self.targets, int) else tuple(self.targets)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "controls", tuple(self.controls))
        if not targets:
            raise CircuitError("gate without target")
        if len(targets) > 1 and not isinstance(self.kind, _BROADCASTABLE):
            raise CircuitError("only parity swaps may have several targets")
        wires = self.wires
        if len(set(wires)) != len(wires):
            raise CircuitError(f"gate wires are not distinct: {wires}")
        stars = [c for c in self.controls if c.pred is Pred.STAR]
        if isinstance(self.kind, StarAdd):
            if len(stars) != 1 or self.controls[0].pred is not Pred.STAR:
                raise CircuitError("star_add needs exactly one star control, listed first")
        elif stars:
            raise CircuitError("star control on a gate that is not star_add")

    @property
    def target(self) -> int:
        return self.targets[0]

    @property
    def wires(self) -> tuple[int, ...]:
        return tuple(c.wire for c in self.controls) + self.targets

    def validate(self, d: int, m: int) -> None:
        self.kind.validate(d)
        for w in self.wires:
            if w >= m:
                raise CircuitError(f"wire {w} not declared (m={m})")
        for c in self.controls:
            if c.pred is Pred.EQ and c.level >= d:
                raise CircuitError(f"control level {c.level} out of range for d={d}")

    def inverse(self, d: int) -> Gate:
        return Gate(self.kind.inverse(d), self.targets, self.controls)

    def __str__(self) -> str:
        ctl = "".join(_control_str(c) for c in self.controls)
        tgt = ",".join(map(str, self.targets))
        return f"{ctl}{_kind_str(self.kind)}@{tgt}"


def _control_str(c: Control) -> str:
    tag = {Pred.EQ: str(c.level), Pred.ODD: "o", Pred.EVEN_NONZERO: "e", Pred.STAR: "*"}[c.pred]
    return f"|{tag}>{c.wire} "


def _kind_str(kind: GateKind) -> str:
    if isinstance(kind, SwapLevels):
        return f"X{kind.i}{kind.j}"
    if isinstance(kind, CyclicAdd):
        return f"X+{kind.y}"
    if isinstance(kind, ParitySwapE):
        return "Xeo^e"
    if isinstance(kind, ParitySwapO):
        return "Xeo^o"
    if isinstance(kind, StarAdd):
        return "X+*" if kind.sign > 0 else "X-*"
    return f"U[{kind.name}]"


def gate_semantics(g: Gate, state: Sequence[int], d: int) -> tuple[int, ...]:
    """Image of one basis state under ``g``."""
    for v in state:
        if not 0 <= v < d:
            raise CircuitError(f"level {v} out of range for d={d}")
    for w in g.wires:
        if w >= len(state):
            raise CircuitError(f"wire {w} out of range for a {len(state)}-wire state")
    if not all(c.fires(state[c.wire]) for c in g.controls):
        return tuple(state)
    out = list(state)
    if isinstance(g.kind, StarAdd):
        shift = g.kind.shifted(state[g.controls[0].wire], d)
        out[g.target] = (state[g.target] + shift) % d
    else:
        table = g.kind.level_map(d)
        for t in g.targets:
            out[t] = table[state[t]]
    return tuple(out)


def is_g_gate(g: Gate) -> bool:
    """True for members of the elementary set ``{X_ij} + {|0>-X_01}``."""
    if not isinstance(g.kind, SwapLevels) or len(g.targets) != 1:
        return False
    if not g.controls:
        return True
    return (
        len(g.controls) == 1
        and g.controls[0] == eq(g.controls[0].wire, 0)
        and (g.kind.i, g.kind.j) == (0, 1)
    )


# --------------------------------------------------------------------------
# Wires and circuits


class AncillaKind(str, Enum):
    BURNABLE = "burnable"
    CLEAN = "clean"
    GARBAGE = "garbage"
    BORROWED = "borrowed"


@dataclass(frozen=True)
class WireRole:
    role: str
    ancilla_kind: AncillaKind | None = None

    def __post_init__(self) -> None:
        if self.role not in ("control", "target", "ancilla"):
            raise CircuitError(f"unknown wire role {self.role!r}")
        if self.role == "ancilla":
            if self.ancilla_kind is None:
                raise CircuitError("ancilla wire without ancilla kind")
            object.__setattr__(self, "ancilla_kind", AncillaKind(self.ancilla_kind))
        elif self.ancilla_kind is not None:
            raise CircuitError(f"ancilla kind given for a {self.role} wire")

    @property
    def is_ancilla(self) -> bool:
        return self.role == "ancilla"


CONTROL = WireRole("control")
TARGET = WireRole("target")


def ancilla(kind: AncillaKind | str) -> WireRole:
    return WireRole("ancilla", AncillaKind(kind))


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``len(wires)`` qudits of dimension ``d``.

    Wire ids are positions in ``wires``. Gates apply left to right.
    """

    d: int
    wires: tuple[WireRole, ...]
    gates: tuple[Gate, ...] = ()
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "wires", tuple(self.wires))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "meta", dict(self.meta))
        if isinstance(self.d, bool) or not isinstance(self.d, int) or self.d < 3:
            raise CircuitError(f"qudit dimension must be an integer >= 3, got {self.d!r}")
        for g in self.gates:
            g.validate(self.d, self.m)

    @property
    def m(self) -> int:
        return len(self.wires)

    @property
    def main_wires(self) -> tuple[int, ...]:
        return tuple(w for w, r in enumerate(self.wires) if not r.is_ancilla)

    @property
    def ancilla_wires(self) -> tuple[int, ...]:
        return tuple(w for w, r in enumerate(self.wires) if r.is_ancilla)

    def ancilla_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.wires:
            if r.is_ancilla:
                counts[r.ancilla_kind.value] = counts.get(r.ancilla_kind.value, 0) + 1
        return counts

    def with_gates(self, gates: Sequence[Gate], **meta: Any) -> Circuit:
        return Circuit(self.d, self.wires, tuple(gates), {**self.meta, **meta})

    def inverse(self) -> Circuit:
        return circuit_inverse(self)

    def __add__(self, other: Circuit) -> Circuit:
        return compose(self, other)

    def __len__(self) -> int:
        return len(self.gates)

    def __str__(self) -> str:
        return "\n".join(str(g) for g in self.gates)


def circuit_inverse(c: Circuit) -> Circuit:
    return Circuit(c.d, c.wires, tuple(g.inverse(c.d) for g in reversed(c.gates)), c.meta)


def compose(first: Circuit, second: Circuit) -> Circuit:
    """``first`` followed by ``second``; both must share dimension and wires."""
    if first.d != second.d or first.wires != second.wires:
        raise CircuitError("cannot compose circuits over different registers")
    return Circuit(first.d, first.wires, first.gates + second.gates, first.meta)


def invert_gates(gates: Sequence[Gate], d: int) -> list[Gate]:
    return [g.inverse(d) for g in reversed(gates)]


# --------------------------------------------------------------------------
# JSON


_KIND_NAMES = {
    SwapLevels: "swap",
    CyclicAdd: "add",
    ParitySwapE: "parity_e",
    ParitySwapO: "parity_o",
    StarAdd: "star_add",
    OpaquePerm: "opaque",
}


def _kind_to_json(kind: GateKind) -> tuple[str, dict[str, Any]]:
    name = _KIND_NAMES[type(kind)]
    if isinstance(kind, SwapLevels):
        return name, {"i": kind.i, "j": kind.j}
    if isinstance(kind, CyclicAdd):
        return name, {"y": kind.y}
    if isinstance(kind, StarAdd):
        return name, {"sign": kind.sign}
    if isinstance(kind, OpaquePerm):
        return name, {"perm": list(kind.perm), "name": kind.name}
    return name, {}


def circuit_to_dict(c: Circuit) -> dict[str, Any]:
    wires = []
    for w, r in enumerate(c.wires):
        entry: dict[str, Any] = {"id": w, "role": r.role}
        if r.is_ancilla:
            entry["ancilla_kind"] = r.ancilla_kind.value
        wires.append(entry)
    gates = []
    for g in c.gates:
        name, params = _kind_to_json(g.kind)
        controls = []
        for ctl in g.controls:
            entry = {"wire": ctl.wire, "pred": ctl.pred.value}
            if ctl.pred is Pred.EQ:
                entry["level"] = ctl.level
            controls.append(entry)
        gates.append({"kind": name, "params": params, "controls": controls, "targets": list(g.targets)})
    return {"d": c.d, "wires": wires, "gates": gates, "meta": dict(c.meta)}


def serialize(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), separators=(",", ":")) + "\n"


def _check_keys(obj: Any, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise CircuitFormatError(f"{where}: expected an object")
    keys = set(obj)
    if missing := required - keys:
        raise CircuitFormatError(f"{where}: missing field(s) {sorted(missing)}")
    if unknown := keys - required - optional:
        raise CircuitFormatError(f"{where}: unknown field(s) {sorted(unknown)}")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise CircuitFormatError(f"{where}: expected an integer, got {value!r}")
    return value


_PARAM_FIELDS = {
    "swap": {"i", "j"},
    "add": {"y"},
    "parity_e": set(),
    "parity_o": set(),
    "star_add": {"sign"},
    "opaque": {"perm", "name"},
}


def _kind_from_json(name: Any, params: Any, where: str) -> GateKind:
    if name not in _PARAM_FIELDS:
        raise CircuitFormatError(f"{where}: unknown gate kind {name!r}")
    _check_keys(params, _PARAM_FIELDS[name], set(), f"{where}.params")
    if name == "swap":
        return SwapLevels(_int(params["i"], where), _int(params["j"], where))
    if name == "add":
        return CyclicAdd(_int(params["y"], where))
    if name == "parity_e":
        return ParitySwapE()
    if name == "parity_o":
        return ParitySwapO()
    if name == "star_add":
        return StarAdd(_int(params["sign"], where))
    perm = params["perm"]
    if not isinstance(perm, list):
        raise CircuitFormatError(f"{where}: opaque perm must be a list")
    if not isinstance(params["name"], str):
        raise CircuitFormatError(f"{where}: opaque name must be a string")
    return OpaquePerm(tuple(_int(v, where) for v in perm), params["name"])


def circuit_from_dict(doc: Any) -> Circuit:
    try:
        return _circuit_from_dict(doc)
    except CircuitFormatError:
        raise
    except CircuitError as exc:
        raise CircuitFormatError(str(exc)) from exc


def _circuit_from_dict(doc: Any) -> Circuit:
    _check_keys(doc, {"d", "wires", "gates", "meta"}, set(), "circuit")
    d = _int(doc["d"], "d")
    if not isinstance(doc["wires"], list) or not isinstance(doc["gates"], list):
        raise CircuitFormatError("wires and gates must be lists")
    if not isinstance(doc["meta"], dict):
        raise CircuitFormatError("meta must be an object")
    roles = []
    for pos, entry in enumerate(doc["wires"]):
        where = f"wires[{pos}]"
        _check_keys(entry, {"id", "role"}, {"ancilla_kind"}, where)
        if _int(entry["id"], where) != pos:
            raise CircuitFormatError(f"{where}: ids must be 0..m-1 in order")
        try:
            roles.append(WireRole(entry["role"], entry.get("ancilla_kind")))
        except ValueError as exc:
            raise CircuitFormatError(f"{where}: {exc}") from exc
    gates = []
    for pos, entry in enumerate(doc["gates"]):
        where = f"gates[{pos}]"
        _check_keys(entry, {"kind", "params", "controls", "targets"}, set(), where)
        kind = _kind_from_json(entry["kind"], entry["params"], where)
        controls = []
        if not isinstance(entry["controls"], list) or not isinstance(entry["targets"], list):
            raise CircuitFormatError(f"{where}: controls and targets must be lists")
        for cpos, ctl in enumerate(entry["controls"]):
            cwhere = f"{where}.controls[{cpos}]"
            _check_keys(ctl, {"wire", "pred"}, {"level"}, cwhere)
            try:
                pred = Pred(ctl["pred"])
            except ValueError as exc:
                raise CircuitFormatError(f"{cwhere}: unknown predicate {ctl['pred']!r}") from exc
            if pred is Pred.EQ and "level" not in ctl:
                raise CircuitFormatError(f"{cwhere}: eq control needs a level")
            if pred is not Pred.EQ and "level" in ctl:
                raise CircuitFormatError(f"{cwhere}: level only allowed for eq controls")
            controls.append(Control(_int(ctl["wire"], cwhere), pred, _int(ctl.get("level", 0), cwhere)))
        targets = tuple(_int(t, where) for t in entry["targets"])
        gates.append(Gate(kind, targets, tuple(controls)))
    return Circuit(d, tuple(roles), tuple(gates), doc["meta"])


def deserialize(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"not valid JSON: {exc}") from exc
    return circuit_from_dict(doc)
