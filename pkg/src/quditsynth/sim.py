"""Exact basis-state simulation and brute-force verification.

Every circuit in scope permutes the computational basis, so its full
semantics is a permutation of ``d**m`` integers. States are packed with wire 0
as the most significant mixed-radix digit. Simulation is vectorized over all
states at once: the register is held as an ``(m, N)`` digit array and each gate
rewrites its target rows under a boolean firing mask.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Sequence, Union

import numpy as np

from .ir import TARGET, AncillaKind, Circuit, Gate, GateKind, Pred, StarAdd

DEFAULT_MAX_STATES = 10**8

DigitMap = Callable[[np.ndarray], np.ndarray]


class StateSpaceTooLarge(RuntimeError):
    """Exhaustive enumeration would exceed the configured state cap."""


# --------------------------------------------------------------------------
# Mixed-radix encoding


def all_states(d: int, m: int) -> np.ndarray:
    """Digits of every basis state, shape ``(m, d**m)``, in increasing index order."""
    n = d**m
    idx = np.arange(n, dtype=np.int64)
    digits = np.empty((m, n), dtype=np.int16)
    for w in range(m - 1, -1, -1):
        digits[w] = idx % d
        idx //= d
    return digits


def encode(digits: np.ndarray, d: int) -> np.ndarray:
    """Pack an ``(m, N)`` digit array into state indices."""
    out = np.zeros(digits.shape[1], dtype=np.int64)
    for row in digits:
        out = out * d + row
    return out


def decode(index: int, d: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        index, r = divmod(int(index), d)
        out.append(r)
    return tuple(reversed(out))


def _check_cap(d: int, m: int, max_states: int | None) -> None:
    cap = DEFAULT_MAX_STATES if max_states is None else max_states
    if d**m > cap:
        raise StateSpaceTooLarge(f"{d}^{m} = {d**m} states exceeds the cap of {cap}")


# --------------------------------------------------------------------------
# Permutations


@dataclass(frozen=True, eq=False)
class Permutation:
    """A bijection on ``[d]^m`` given by the image index of each state."""

    d: int
    m: int
    map: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.map, dtype=np.int64)
        object.__setattr__(self, "map", arr)
        n = self.d**self.m
        if arr.shape != (n,):
            raise ValueError(f"permutation table has shape {arr.shape}, expected ({n},)")
        seen = np.zeros(n, dtype=bool)
        seen[arr] = True
        if not seen.all() or arr.min() < 0:
            raise ValueError("table is not a bijection")

    @classmethod
    def identity(cls, d: int, m: int) -> Permutation:
        return cls(d, m, np.arange(d**m, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.map)

    def __getitem__(self, state: int) -> int:
        return int(self.map[state])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.d == other.d and self.m == other.m and np.array_equal(self.map, other.map)

    def __mul__(self, other: Permutation) -> Permutation:
        """Composition ``self o other``: apply ``other`` first."""
        if (self.d, self.m) != (other.d, other.m):
            raise ValueError("cannot compose permutations on different registers")
        return Permutation(self.d, self.m, self.map[other.map])

    def inverse(self) -> Permutation:
        inv = np.empty_like(self.map)
        inv[self.map] = np.arange(len(self.map), dtype=np.int64)
        return Permutation(self.d, self.m, inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.map, np.arange(len(self.map))))

    def apply_digits(self, digits: np.ndarray) -> np.ndarray:
        idx = self.map[encode(digits, self.d)]
        return _decode_many(idx, self.d, self.m)

    def cycles(self) -> list[list[int]]:
        """Non-trivial cycles, each starting at its smallest element, sorted by that element."""
        seen = np.zeros(len(self.map), dtype=bool)
        out = []
        table = self.map.tolist()
        for start in range(len(table)):
            if seen[start] or table[start] == start:
                seen[start] = True
                continue
            cyc = []
            x = start
            while not seen[x]:
                seen[x] = True
                cyc.append(x)
                x = table[x]
            out.append(cyc)
        return out


def _decode_many(idx: np.ndarray, d: int, m: int) -> np.ndarray:
    idx = np.array(idx, dtype=np.int64)
    digits = np.empty((m, len(idx)), dtype=np.int16)
    for w in range(m - 1, -1, -1):
        digits[w] = idx % d
        idx //= d
    return digits


def parity(p: Permutation) -> str:
    """``"even"`` or ``"odd"``, from the number of cycles (fixed points included)."""
    table = p.map.tolist()
    seen = bytearray(len(table))
    n_cycles = 0
    for start in range(len(table)):
        if seen[start]:
            continue
        n_cycles += 1
        x = start
        while not seen[x]:
            seen[x] = 1
            x = table[x]
    return "even" if (len(table) - n_cycles) % 2 == 0 else "odd"


# --------------------------------------------------------------------------
# Circuit simulation


@lru_cache(maxsize=None)
def _fire_table(pred: Pred, level: int, d: int) -> np.ndarray:
    values = np.arange(d)
    if pred is Pred.EQ:
        return values == level
    if pred is Pred.ODD:
        return values % 2 == 1
    if pred is Pred.EVEN_NONZERO:
        return (values % 2 == 0) & (values != 0)
    return np.ones(d, dtype=bool)


@lru_cache(maxsize=None)
def _level_table(kind: GateKind, d: int) -> np.ndarray:
    return np.array(kind.level_map(d), dtype=np.int16)


def apply_gate(g: Gate, digits: np.ndarray, d: int) -> None:
    """Apply ``g`` in place to an ``(m, N)`` digit array."""
    mask = None
    for c in g.controls:
        if c.pred is Pred.STAR:
            continue
        fired = _fire_table(c.pred, c.level, d)[digits[c.wire]]
        mask = fired if mask is None else mask & fired
    if isinstance(g.kind, StarAdd):
        shift = digits[g.controls[0].wire] if g.kind.sign > 0 else -digits[g.controls[0].wire]
        updates = [(g.target, (digits[g.target] + shift) % d)]
    else:
        table = _level_table(g.kind, d)
        updates = [(t, table[digits[t]]) for t in g.targets]
    for t, new in updates:
        digits[t] = new if mask is None else np.where(mask, new, digits[t])


def simulate(c: Circuit | Sequence[Gate], digits: np.ndarray, d: int | None = None) -> np.ndarray:
    """Run a circuit on a batch of basis states given as an ``(m, N)`` digit array."""
    gates = c.gates if isinstance(c, Circuit) else c
    if d is None:
        d = c.d
    out = np.array(digits, dtype=np.int16, copy=True)
    for g in gates:
        apply_gate(g, out, d)
    return out


def circuit_to_permutation(
    c: Circuit, max_states: int | None = None, allow_large: bool = False
) -> Permutation:
    if not allow_large:
        _check_cap(c.d, c.m, max_states)
    out = simulate(c, all_states(c.d, c.m))
    return Permutation(c.d, c.m, encode(out, c.d))


def gate_permutation(g: Gate, d: int, m: int) -> Permutation:
    """The permutation of ``[d]^m`` induced by one gate."""
    return circuit_to_permutation(Circuit(d, (TARGET,) * m, (g,)))


# --------------------------------------------------------------------------
# Target families
#
# Each family is written directly from its definition on digit arrays and
# shares no code with gate simulation, so it can serve as an oracle.


def _ktoffoli_map(d: int, k: int, pattern: Sequence[int] | None = None) -> DigitMap:
    levels = list(pattern) if pattern is not None else [0] * k
    if len(levels) != k:
        raise ValueError("control pattern length must equal k")

    def f(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        hit = np.all(x[:k] == np.array(levels)[:, None], axis=0) if k else np.ones(x.shape[1], bool)
        t = x[k]
        y[k] = np.where(hit & (t == 0), 1, np.where(hit & (t == 1), 0, t))
        return y

    return f


def _mcu_map(d: int, k: int, u: Sequence[int]) -> DigitMap:
    table = np.array(u)

    def f(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        hit = np.all(x[:k] == 0, axis=0)
        y[k] = np.where(hit, table[x[k]], x[k])
        return y

    return f


def _ctrl_add_map(d: int, k: int, y_shift: int = 1) -> DigitMap:
    def f(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        hit = np.all(x[:k] == 0, axis=0)
        y[k] = np.where(hit, (x[k] + y_shift) % d, x[k])
        return y

    return f


def _pk_subtracts(x: np.ndarray) -> np.ndarray:
    """Whether ``h`` subtracts one, for each column of the control digits ``x[:k-1]``."""
    k1 = x.shape[0]
    n = x.shape[1]
    decided = np.zeros(n, dtype=bool)
    subtract = np.ones(n, dtype=bool)  # i* undefined -> subtract
    for i in range(k1 - 1, -1, -1):
        nz = (x[i] != 0) & ~decided
        subtract[nz] = x[i][nz] % 2 == 0
        decided |= nz
    return subtract


def _pk_map(d: int, k: int, dagger: bool = False) -> DigitMap:
    step = 1 if dagger else -1

    def f(x: np.ndarray) -> np.ndarray:
        y = x.copy()
        sub = _pk_subtracts(x[: k - 1])
        y[k - 1] = np.where(sub, (x[k - 1] + step) % d, x[k - 1])
        return y

    return f


def _two_cycle_map(d: int, a: Sequence[int], b: Sequence[int]) -> DigitMap:
    av = np.array(a)[:, None]
    bv = np.array(b)[:, None]

    def f(x: np.ndarray) -> np.ndarray:
        is_a = np.all(x == av, axis=0)
        is_b = np.all(x == bv, axis=0)
        y = x.copy()
        y[:, is_a] = bv
        y[:, is_b] = av
        return y

    return f


def _table_map(d: int, n: int, table: Sequence[int]) -> DigitMap:
    arr = np.array(table, dtype=np.int64)

    def f(x: np.ndarray) -> np.ndarray:
        return _decode_many(arr[encode(x, d)], d, n)

    return f


def target_map(family: str, d: int, **params: Any) -> tuple[int, DigitMap]:
    """Vectorized action of a named target family.

    Returns ``(m, f)`` where ``m`` is the number of main wires and ``f`` maps an
    ``(m, N)`` digit array to its image. Families:

    - ``ktoffoli`` (k, optional pattern): ``|pattern>``-controlled ``X_01``.
    - ``ctrl_add1`` (k): ``|0^k>``-controlled ``X_{+1}``.
    - ``mcu`` (k, u): ``|0^k>``-controlled single-qudit permutation ``u``.
    - ``pk`` (k, optional dagger): the conditional decrement ``P_k`` or its inverse.
    - ``two_cycle`` (a, b): swap of two basis states.
    - ``function`` (n, table): an explicit reversible function table.
    - ``identity`` (m).
    """
    fam = family.replace("-", "_")
    try:
        if fam == "ktoffoli":
            k = int(params["k"])
            return k + 1, _ktoffoli_map(d, k, params.get("pattern"))
        if fam == "ctrl_add1":
            k = int(params["k"])
            return k + 1, _ctrl_add_map(d, k)
        if fam == "mcu":
            k = int(params["k"])
            u = list(params["u"])
            if sorted(u) != list(range(d)):
                raise ValueError(f"u = {u} is not a permutation of [{d}]")
            return k + 1, _mcu_map(d, k, u)
        if fam in ("pk", "pk_dagger"):
            k = int(params["k"])
            if k < 2:
                raise ValueError("P_k needs k >= 2")
            return k, _pk_map(d, k, bool(params.get("dagger", fam == "pk_dagger")))
        if fam == "two_cycle":
            a, b = tuple(params["a"]), tuple(params["b"])
            if len(a) != len(b) or a == b:
                raise ValueError("two_cycle needs two distinct states of equal length")
            return len(a), _two_cycle_map(d, a, b)
        if fam == "function":
            n = int(params["n"])
            table = list(params["table"])
            Permutation(d, n, table)
            return n, _table_map(d, n, table)
        if fam == "identity":
            return int(params["m"]), lambda x: x.copy()
    except KeyError as exc:
        raise ValueError(f"target family {family!r} is missing parameter {exc}") from exc
    raise ValueError(f"unknown target family {family!r}")


def target_permutation(family: str, d: int, **params: Any) -> Permutation:
    """Exact permutation of a target family on its main wires."""
    m, f = target_map(family, d, **params)
    _check_cap(d, m, params.get("max_states"))
    return Permutation(d, m, encode(f(all_states(d, m)), d))


def extend_with_ancillas(t: Permutation, c: Circuit) -> Permutation:
    """Lift a main-wire permutation to ``c``'s register, acting as identity on ancillas."""
    main = list(c.main_wires)
    if t.m != len(main):
        raise ValueError(f"target acts on {t.m} wires, circuit has {len(main)} main wires")
    x = all_states(c.d, c.m)
    y = x.copy()
    y[main] = t.apply_digits(x[main])
    return Permutation(c.d, c.m, encode(y, c.d))


# --------------------------------------------------------------------------
# Verification


@dataclass
class VerificationReport:
    status: str
    states_checked: int
    counterexample: dict[str, list[int]] | None = None
    parity: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "status": self.status,
            "states_checked": self.states_checked,
            "counterexample": self.counterexample,
        }
        if self.parity is not None:
            out["parity"] = self.parity
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


Target = Union[Permutation, DigitMap]


def _as_map(t: Target, d: int, m: int) -> DigitMap:
    if isinstance(t, Permutation):
        if (t.d, t.m) != (d, m):
            raise ValueError(f"target is on [{t.d}]^{t.m}, expected [{d}]^{m}")
        return t.apply_digits
    return t


def _sample_states(d: int, m: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, d, size=(m, samples), dtype=np.int16)
    order = np.argsort(encode(digits, d), kind="stable")
    return digits[:, order]


def _input_states(d: int, m: int, mode: str, samples: int, seed: int, max_states, allow_large):
    if mode == "exhaustive":
        if not allow_large:
            _check_cap(d, m, max_states)
        return all_states(d, m)
    if mode == "sample":
        return _sample_states(d, m, samples, seed)
    raise ValueError(f"unknown verification mode {mode!r}")


def _first_mismatch(x, expected, actual) -> dict[str, list[int]] | None:
    bad = np.flatnonzero(np.any(expected != actual, axis=0))
    if not len(bad):
        return None
    i = bad[0]
    return {
        "input": [int(v) for v in x[:, i]],
        "expected": [int(v) for v in expected[:, i]],
        "actual": [int(v) for v in actual[:, i]],
    }


def verify_equiv(
    c: Circuit,
    t: Target,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    max_states: int | None = None,
    allow_large: bool = False,
) -> VerificationReport:
    """Check that ``c`` equals ``t`` on its whole register.

    On failure the counterexample is the smallest encoded input state among
    those checked.
    """
    f = _as_map(t, c.d, c.m)
    x = _input_states(c.d, c.m, mode, samples, seed, max_states, allow_large)
    cex = _first_mismatch(x, f(x), simulate(c, x))
    return VerificationReport("fail" if cex else "pass", x.shape[1], cex)


def verify_ancilla(
    c: Circuit,
    t: Target,
    mode: str = "exhaustive",
    samples: int = 10_000,
    seed: int = 0,
    max_states: int | None = None,
    allow_large: bool = False,
) -> VerificationReport:
    """Check ``c`` against a main-wire target under its declared ancilla contracts.

    Clean and burnable ancillas start at 0; borrowed and garbage ancillas are
    checked for every initial value. Borrowed ancillas must return to their
    initial value, clean ancillas to 0; garbage and burnable ancillas may end
    anywhere. The main wires must always map through ``t``.
    """
    main = list(c.main_wires)
    anc = [(w, c.wires[w].ancilla_kind) for w in c.ancilla_wires]
    f = _as_map(t, c.d, len(main))
    x = _input_states(c.d, c.m, mode, samples, seed, max_states, allow_large)
    starts_zero = [w for w, k in anc if k in (AncillaKind.CLEAN, AncillaKind.BURNABLE)]
    if starts_zero:
        x = x[:, np.all(x[starts_zero] == 0, axis=0)]
    actual = simulate(c, x)
    expected = actual.copy()
    expected[main] = f(x[main])
    for w, kind in anc:
        if kind is AncillaKind.BORROWED:
            expected[w] = x[w]
        elif kind is AncillaKind.CLEAN:
            expected[w] = 0
    cex = _first_mismatch(x, expected, actual)
    return VerificationReport("fail" if cex else "pass", x.shape[1], cex)
