"""Multi-controlled gates built from the elementary set with few or no ancillas.

Wire conventions: controls come first, then the target, then ancillas. All
builders are deterministic: equal requests give identical circuits.

Two ladder builders do most of the work:

* ``parity_lambda`` (even ``d``) fires an involution on the target when every
  control fires, by threading parity flips through a chain of ancillas.
* ``additive_lambda`` (odd ``d``) adds a value to the target by telescoping
  differences through a chain of ancillas.

Both come in a garbage form and a borrowed form. The borrowed form appends the
inverse of the ancilla-touching middle block, so every ancilla is restored.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
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
    OpaquePerm,
    ParitySwapE,
    ParitySwapO,
    StarAdd,
    SwapLevels,
    ancilla,
    cyclic_add,
    eq,
    even_nz,
    invert_gates,
    odd,
    star,
)
from .primitives import LoweringLevel, lower

X01 = SwapLevels(0, 1)
XEO_E = ParitySwapE()


class SynthesisError(CircuitError):
    """A request violates a construction's preconditions."""


class AncillaMode(str, Enum):
    AUTO = "auto"
    GARBAGE = "garbage"
    BORROWED_MANY = "borrowed_many"
    BORROWED_ONE = "borrowed_one"
    NONE = "none"

    @classmethod
    def parse(cls, value: AncillaMode | str) -> AncillaMode:
        if isinstance(value, cls):
            return value
        return cls(str(value).replace("-", "_"))


# --------------------------------------------------------------------------
# The decrement predicate behind P_k


def h_oracle(x: Sequence[int], d: int) -> tuple[int | None, int]:
    """``(i*, h)`` for a point ``x`` of ``[d]^k``; ``i*`` is 1-based or ``None``.

    ``i*`` is the position of the last nonzero entry among ``x[:-1]``. ``h`` keeps
    ``x[-1]`` when that entry is odd and decrements it mod ``d`` otherwise.
    """
    if len(x) < 1:
        raise ValueError("h_oracle needs at least one coordinate")
    i_star = None
    for i, v in enumerate(x[:-1]):
        if v:
            i_star = i + 1
    if i_star is not None and x[i_star - 1] % 2 == 1:
        return i_star, x[-1]
    return i_star, (x[-1] - 1) % d


# --------------------------------------------------------------------------
# Ladders


def _ladder_check(controls: Sequence[Control], ancillas: Sequence[int]) -> None:
    need = max(len(controls) - 2, 0)
    if len(ancillas) < need:
        raise SynthesisError(f"{len(controls)} controls need {need} ancillas, got {len(ancillas)}")


def parity_lambda(
    controls: Sequence[Control],
    target: int,
    ancillas: Sequence[int],
    leaf_kind: GateKind = X01,
    borrowed: bool = True,
) -> list[Gate]:
    """Controlled involution ``leaf_kind`` on ``target`` for even ``d``.

    The gate fires when every control fires. For three or more controls the
    first ``len(controls) - 2`` ancillas are used.
    """
    r = len(controls)
    if r <= 2:
        return [Gate(leaf_kind, target, tuple(controls))]
    _ladder_check(controls, ancillas)
    anc = list(ancillas[: r - 2])
    apex = Gate(XEO_E, anc[0], (controls[0], controls[1]))
    legs = [Gate(XEO_E, anc[i], (odd(anc[i - 1]), controls[i + 1])) for i in range(1, r - 2)]
    box = legs[::-1] + [apex] + legs
    leaf = Gate(leaf_kind, target, (odd(anc[-1]), controls[-1]))
    out = [leaf] + box + [leaf]
    if borrowed:
        out += box[::-1]
    return out


def additive_lambda(
    controls: Sequence[Control],
    target: int,
    ancillas: Sequence[int],
    apex_kind: CyclicAdd | StarAdd,
    d: int,
    borrowed: bool = True,
) -> list[Gate]:
    """Controlled shift of ``target`` for odd ``d``.

    With ``apex_kind = CyclicAdd(y)`` this is ``|c...>-X_{+y}``. With
    ``StarAdd(s)`` the first control must be a star control and the target
    gains ``s`` times that wire's value when the other controls fire.
    """
    r = len(controls)
    if r == 0:
        if isinstance(apex_kind, StarAdd):
            raise SynthesisError("a star shift needs its star control")
        return [Gate(apex_kind, target)]
    if r <= 2:
        return [Gate(apex_kind, target, tuple(controls))]
    _ladder_check(controls, ancillas)
    anc = list(ancillas[: r - 2])
    apex = Gate(apex_kind, anc[0], (controls[0], controls[1]))
    left = [Gate(StarAdd(-1), anc[i], (star(anc[i - 1]), controls[i + 1])) for i in range(1, r - 2)]
    right = [Gate(StarAdd(1), anc[i], (star(anc[i - 1]), controls[i + 1])) for i in range(1, r - 2)]
    box = left[::-1] + [apex] + right
    leaf_l = Gate(StarAdd(-1), target, (star(anc[-1]), controls[-1]))
    leaf_r = Gate(StarAdd(1), target, (star(anc[-1]), controls[-1]))
    out = [leaf_l] + box + [leaf_r]
    if borrowed:
        out += invert_gates(box, d)
    return out


def _zeros(wires: Sequence[int]) -> list[Control]:
    return [eq(w) for w in wires]


# --------------------------------------------------------------------------
# P_k


def pk_lambda(xs: Sequence[int], ancillas: Sequence[int], d: int, borrowed: bool = True) -> list[Gate]:
    """``P_k`` on ``xs`` (target ``xs[-1]``) with ``k - 2`` ancillas."""
    k = len(xs)
    if k < 2:
        raise SynthesisError("P_k needs k >= 2")
    minus = cyclic_add(-1, d)
    if k == 2:
        return [Gate(minus, xs[1], (eq(xs[0]),)), Gate(minus, xs[1], (even_nz(xs[0]),))]
    if len(ancillas) < k - 2:
        raise SynthesisError(f"P_{k} needs {k - 2} ancillas, got {len(ancillas)}")
    a = ancillas[k - 3]
    xk, prev = xs[-1], xs[-2]
    left = [
        Gate(StarAdd(-1), xk, (star(a), eq(prev))),
        Gate(minus, xk, (even_nz(prev),)),
    ]
    mid = pk_lambda(list(xs[: k - 2]) + [a], ancillas[: k - 3], d, borrowed=False)
    right = [Gate(StarAdd(1), xk, (star(a), eq(prev)))]
    out = left + mid + right
    if borrowed:
        out += invert_gates(mid, d)
    return out


def pk_halving(xs: Sequence[int], a: int, d: int) -> list[Gate]:
    """``P_k`` with the single borrowed ancilla ``a``.

    The controls are split into a first half and the rest ``L``. When ``L`` is
    all zero, the decision falls to the first half, evaluated into ``a`` and
    copied onto the target by a star shift; otherwise a smaller ``P`` on
    ``L + [x_k]`` decides. Each sub-ladder borrows wires from the other half.
    """
    k = len(xs)
    if k < 3:
        return pk_lambda(xs, [], d)
    h = k // 2
    m = k - 1 - h
    first, rest, xk = list(xs[:h]), list(xs[h : k - 1]), xs[-1]
    s_minus = additive_lambda([star(a)] + _zeros(rest), xk, first[: m - 1], StarAdd(-1), d)
    s_plus = additive_lambda([star(a)] + _zeros(rest), xk, first[: m - 1], StarAdd(1), d)
    p1 = pk_lambda(first + [a], (rest + [xk])[: h - 1], d)
    inc = additive_lambda(_zeros(rest), xk, (first + [a])[: max(m - 2, 0)], CyclicAdd(1), d)
    p2 = pk_lambda(rest + [xk], (first + [a])[: m - 1], d)
    return s_minus + p1 + s_plus + invert_gates(p1, d) + inc + p2


# --------------------------------------------------------------------------
# k-Toffoli


def even_borrowed_one_gates(xs: Sequence[int], t: int, a: int) -> list[Gate]:
    """``|0^k>-X_01`` for even ``d`` and ``k >= 3`` with one borrowed wire ``a``.

    The first half of the controls toggles the parity of ``a``; the second half,
    gated on ``a`` being odd, flips the target. Running the pair twice leaves
    ``a`` restored and flips ``t`` exactly when both halves fire.
    """
    k = len(xs)
    up, lo = list(xs[: (k + 1) // 2]), list(xs[(k + 1) // 2 :])
    g1 = parity_lambda(_zeros(up), a, (lo + [t])[: max(len(up) - 2, 0)], XEO_E)
    g2 = parity_lambda([odd(a)] + _zeros(lo), t, up[: max(len(lo) - 1, 0)], X01)
    return g1 + g2 + g1 + g2


def ktoffoli_odd_blocks(xs: Sequence[int], t: int, d: int) -> list[tuple[str, list[Gate]]]:
    """Named blocks of the ancilla-free odd-``d`` k-Toffoli on ``xs`` and ``t``."""
    k = len(xs)
    if d % 2 == 0:
        raise SynthesisError("the ancilla-free k-Toffoli needs odd d")
    if k == 1:
        return [("flip", [Gate(X01, t, (eq(xs[0]),))])]
    if k == 2:
        return [("toffoli2", [Gate(X01, t, (eq(xs[0]), eq(xs[1])))])]
    xk = xs[-1]
    pk = pk_halving(xs, t, d)
    pk_dag = invert_gates(pk, d)
    flip = [Gate(X01, t, (eq(xk),))]
    parity_flip = [Gate(ParitySwapO(), tuple(xs[:-1]), (eq(xk),))]
    return [
        ("flip", flip),
        ("pk", pk),
        ("flip", flip),
        ("pk_dagger", pk_dag),
        ("parity_flip", parity_flip),
        ("pk", pk),
        ("flip", flip),
        ("pk_dagger", pk_dag),
        ("parity_flip", parity_flip),
    ]


def emit_ktoffoli(d: int, controls: Sequence[int], target: int, borrowed: int | None = None) -> list[Gate]:
    """``|0^k>-X_01`` on the given wires.

    For odd ``d`` no extra wire is used. For even ``d`` and ``k >= 3`` the
    ``borrowed`` wire is required and restored.
    """
    xs = list(controls)
    if not xs:
        return [Gate(X01, target)]
    if len(xs) <= 2:
        return [Gate(X01, target, tuple(_zeros(xs)))]
    if d % 2:
        return [g for _, block in ktoffoli_odd_blocks(xs, target, d) for g in block]
    if borrowed is None:
        raise SynthesisError(f"even d={d}: a {len(xs)}-Toffoli needs a borrowed wire")
    return even_borrowed_one_gates(xs, target, borrowed)


# --------------------------------------------------------------------------
# Requests and circuit builders


def _check_k(k: int, least: int = 1) -> None:
    if k < least:
        raise SynthesisError(f"k must be >= {least}, got {k}")


def _check_odd(d: int, what: str) -> None:
    if d < 3 or d % 2 == 0:
        raise SynthesisError(f"{what} needs odd d >= 3, got d={d}")


def _circuit(d: int, n_ctl: int, n_anc: int, kind: str, gates: list[Gate], level, **meta) -> Circuit:
    wires = (CONTROL,) * n_ctl + (TARGET,) + (ancilla(kind),) * n_anc
    return lower(Circuit(d, wires, gates, meta), level)


def synth_ctrl_add1(
    k: int,
    d: int,
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO,
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    """``|0^k>-X_{+1}`` for odd ``d`` with ``k - 2`` garbage or borrowed ancillas."""
    _check_k(k)
    _check_odd(d, "|0^k>-X_{+1}")
    mode = AncillaMode.parse(ancilla_mode)
    n_anc = max(k - 2, 0)
    if mode in (AncillaMode.NONE, AncillaMode.BORROWED_ONE) and n_anc:
        raise SynthesisError(f"|0^k>-X_(+1) with k={k} needs {n_anc} ancillas; use garbage or borrowed_many")
    garbage = mode is AncillaMode.GARBAGE
    anc = list(range(k + 1, k + 1 + n_anc))
    gates = additive_lambda(_zeros(range(k)), k, anc, CyclicAdd(1), d, borrowed=not garbage)
    kind = "garbage" if garbage else "borrowed"
    return _circuit(d, k, n_anc, kind, gates, level, family="ctrl_add1", k=k)


def synth_ktoffoli_even(
    k: int,
    d: int,
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO,
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    """Even-``d`` k-Toffoli with one borrowed ancilla or a ladder of ``k - 2``."""
    _check_k(k)
    if d < 4 or d % 2:
        raise SynthesisError(f"the even-d k-Toffoli needs even d >= 4, got d={d}")
    mode = AncillaMode.parse(ancilla_mode)
    if mode is AncillaMode.NONE:
        raise SynthesisError(
            f"even d={d}: no ancilla-free k-Toffoli exists, since every elementary gate is an even "
            "permutation while the k-Toffoli is odd; at least one borrowed ancilla is required"
        )
    xs = list(range(k))
    if k == 1:
        return _circuit(d, 1, 0, "borrowed", [Gate(X01, 1, (eq(0),))], level, family="ktoffoli", k=1)
    if mode in (AncillaMode.AUTO, AncillaMode.BORROWED_ONE):
        a = k + 1
        gates = [Gate(X01, k, (eq(0), eq(1)))] if k == 2 else even_borrowed_one_gates(xs, k, a)
        return _circuit(d, k, 1, "borrowed", gates, level, family="ktoffoli", k=k)
    garbage = mode is AncillaMode.GARBAGE
    n_anc = max(k - 2, 1)
    anc = list(range(k + 1, k + 1 + n_anc))
    gates = parity_lambda(_zeros(xs), k, anc, X01, borrowed=not garbage)
    kind = "garbage" if garbage else "borrowed"
    return _circuit(d, k, n_anc, kind, gates, level, family="ktoffoli", k=k)


def synth_ktoffoli_odd(
    k: int,
    d: int,
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO,
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    """Ancilla-free k-Toffoli for odd ``d``."""
    _check_k(k)
    _check_odd(d, "the ancilla-free k-Toffoli")
    mode = AncillaMode.parse(ancilla_mode)
    if mode not in (AncillaMode.AUTO, AncillaMode.NONE):
        raise SynthesisError(f"odd d uses no ancilla; ancilla mode {mode.value!r} is not offered")
    gates = emit_ktoffoli(d, list(range(k)), k)
    return _circuit(d, k, 0, "borrowed", gates, level, family="ktoffoli", k=k)


def synth_ktoffoli(
    k: int,
    d: int,
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO,
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    if d % 2:
        return synth_ktoffoli_odd(k, d, ancilla_mode, level)
    return synth_ktoffoli_even(k, d, ancilla_mode, level)


def synth_pk(
    k: int,
    d: int,
    dagger: bool = False,
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO,
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    """``P_k`` (or its inverse) on wires ``x_1..x_k`` followed by ancillas.

    ``garbage`` and ``borrowed_many`` give the ladder form with ``k - 2``
    ancillas; ``auto`` and ``borrowed_one`` give the halving form with one.
    """
    _check_k(k, 2)
    _check_odd(d, "P_k")
    mode = AncillaMode.parse(ancilla_mode)
    xs = list(range(k))
    if k == 2:
        n_anc, kind, gates = 0, "borrowed", pk_lambda(xs, [], d)
    elif mode is AncillaMode.NONE:
        raise SynthesisError(f"P_{k} needs at least one ancilla")
    elif mode in (AncillaMode.AUTO, AncillaMode.BORROWED_ONE):
        n_anc, kind, gates = 1, "borrowed", pk_halving(xs, k, d)
    else:
        garbage = mode is AncillaMode.GARBAGE
        n_anc = k - 2
        kind = "garbage" if garbage else "borrowed"
        gates = pk_lambda(xs, list(range(k, 2 * k - 2)), d, borrowed=not garbage)
    if dagger:
        gates = invert_gates(gates, d)
    wires = (CONTROL,) * (k - 1) + (TARGET,) + (ancilla(kind),) * n_anc
    meta = {"family": "pk_dagger" if dagger else "pk", "k": k}
    return lower(Circuit(d, wires, gates, meta), level)


def _as_perm(u: OpaquePerm | Sequence[int], d: int) -> OpaquePerm:
    try:
        perm = u if isinstance(u, OpaquePerm) else OpaquePerm(tuple(int(v) for v in u))
        perm.validate(d)
    except CircuitError as exc:
        raise SynthesisError(str(exc)) from exc
    return perm


def synth_mcu(
    k: int,
    d: int,
    u: OpaquePerm | Sequence[int],
    level: LoweringLevel | str = LoweringLevel.MACRO,
) -> Circuit:
    """``|0^k>-u`` with one clean ancilla; the k-Toffolis borrow the target wire."""
    _check_k(k)
    if d < 3:
        raise SynthesisError(f"d must be >= 3, got {d}")
    perm = _as_perm(u, d)
    xs, t, c = list(range(k)), k, k + 1
    tof = emit_ktoffoli(d, xs, c, borrowed=t)
    gates = tof + [Gate(perm, t, (eq(c, 1),))] + tof
    wires = (CONTROL,) * k + (TARGET, ancilla("clean"))
    return lower(Circuit(d, wires, gates, {"family": "mcu", "k": k, "u": list(perm.perm)}), level)


@dataclass(frozen=True)
class SynthesisRequest:
    family: str
    k: int
    d: int
    ancilla_mode: AncillaMode | str = AncillaMode.AUTO
    u: tuple[int, ...] | None = None

    @property
    def mode(self) -> AncillaMode:
        return AncillaMode.parse(self.ancilla_mode)


FAMILIES = ("ktoffoli", "ctrl_add1", "pk", "pk_dagger", "mcu")


def synthesize(req: SynthesisRequest, level: LoweringLevel | str = LoweringLevel.MACRO) -> Circuit:
    fam = req.family.replace("-", "_")
    if fam == "ktoffoli":
        return synth_ktoffoli(req.k, req.d, req.mode, level)
    if fam == "ctrl_add1":
        return synth_ctrl_add1(req.k, req.d, req.mode, level)
    if fam in ("pk", "pk_dagger"):
        return synth_pk(req.k, req.d, fam == "pk_dagger", req.mode, level)
    if fam == "mcu":
        if req.u is None:
            raise SynthesisError("family mcu needs a permutation u")
        return synth_mcu(req.k, req.d, req.u, level)
    raise SynthesisError(f"unknown family {req.family!r}; choose from {', '.join(FAMILIES)}")


def generalize_controls(template: Circuit | SynthesisRequest, pattern: Sequence[int]) -> Circuit:
    """Turn a ``|0^k>``-controlled circuit into its ``|pattern>``-controlled version.

    Each control wire ``i`` with ``pattern[i] != 0`` is conjugated by
    ``X_{0, pattern[i]}``.
    """
    c = synthesize(template) if isinstance(template, SynthesisRequest) else template
    controls = [w for w, role in enumerate(c.wires) if role == CONTROL]
    if len(pattern) != len(controls):
        raise SynthesisError(f"pattern has {len(pattern)} levels for {len(controls)} controls")
    for lv in pattern:
        if not 0 <= lv < c.d:
            raise SynthesisError(f"control level {lv} out of range for d={c.d}")
    conj = [Gate(SwapLevels(0, lv), w) for w, lv in zip(controls, pattern) if lv]
    return c.with_gates(conj + list(c.gates) + conj, pattern=list(pattern))


__all__ = [
    "AncillaMode",
    "FAMILIES",
    "SynthesisError",
    "SynthesisRequest",
    "additive_lambda",
    "emit_ktoffoli",
    "even_borrowed_one_gates",
    "generalize_controls",
    "h_oracle",
    "ktoffoli_odd_blocks",
    "parity_lambda",
    "pk_halving",
    "pk_lambda",
    "synth_ctrl_add1",
    "synth_ktoffoli",
    "synth_ktoffoli_even",
    "synth_ktoffoli_odd",
    "synth_mcu",
    "synth_pk",
    "synthesize",
]
