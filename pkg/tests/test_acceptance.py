"""Acceptance criteria, one check per criterion.

Each check returns ``(ok, detail)``; the test prints a PASS/FAIL line and the
same lines are repeated in the pytest terminal summary. Run this file directly
to print only the ten lines.
"""

import itertools
import math
import sys

import numpy as np

from conftest import ACCEPTANCE_LINES, scalar_permutation, tmap
from quditsynth.cli import main as cli_main
from quditsynth.ir import Gate, SwapLevels, eq, is_g_gate
from quditsynth.multictl import h_oracle, synth_ctrl_add1, synth_ktoffoli, synth_ktoffoli_even, synth_ktoffoli_odd, synth_mcu, synth_pk
from quditsynth.primitives import count_gates
from quditsynth.revcomp import compile_reversible, lower_bound, random_function
from quditsynth.sim import (
    circuit_to_permutation,
    gate_permutation,
    parity,
    target_permutation,
    verify_ancilla,
    verify_equiv,
)


def _report(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} -- {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return ok


# --------------------------------------------------------------------------


def check_1():
    bad = []
    for d, k in itertools.product((3, 5), range(1, 6)):
        c = synth_ktoffoli_odd(k, d, level="g")
        rep = verify_equiv(c, tmap("ktoffoli", d, k=k))
        ok = rep.passed and rep.states_checked == d ** (k + 1) and not c.ancilla_wires
        ok = ok and all(is_g_gate(g) for g in c.gates)
        if not ok:
            bad.append((d, k))
    return not bad, f"d in {{3,5}}, k in 1..5, exhaustive, failures={bad}"


def check_2():
    bad = []
    for d, k in itertools.product((4, 6), range(2, 5)):
        c = synth_ktoffoli_even(k, d, "borrowed_one", level="g")
        rep = verify_ancilla(c, tmap("ktoffoli", d, k=k))
        ok = rep.passed and rep.states_checked == d ** (k + 2) and c.ancilla_counts() == {"borrowed": 1}
        if not ok:
            bad.append((d, k))
    return not bad, f"d in {{4,6}}, k in 2..4, borrowed contract over d^(k+2) states, failures={bad}"


def _pk_oracle(d, k, dagger=False):
    def fn(x):
        h = h_oracle(x, d)[1]
        if dagger:
            h = x[-1] if h == x[-1] else (x[-1] + 1) % d
        return tuple(x[:-1]) + (h,)

    return scalar_permutation(d, k, fn)


def check_3():
    bad = []
    for d, k in itertools.product((3, 5), range(2, 6)):
        want = _pk_oracle(d, k)
        want_dag = _pk_oracle(d, k, True)
        for mode in ("garbage", "borrowed_many", "borrowed_one"):
            level = "g" if mode == "borrowed_one" else "macro"
            fwd = synth_pk(k, d, False, mode, level)
            dag = synth_pk(k, d, True, mode, level)
            ok = verify_ancilla(fwd, want).passed and verify_ancilla(dag, want_dag).passed
            if mode != "garbage":
                ok = ok and (circuit_to_permutation(dag) * circuit_to_permutation(fwd)).is_identity()
            if not ok:
                bad.append((d, k, mode))
    return not bad, f"d in {{3,5}}, k in 2..5, ladder and halving forms vs h-derived table, failures={bad}"


def check_4():
    bad = []
    for k in range(2, 6):
        c = synth_ctrl_add1(k, 3, "borrowed_many", level="g")
        if not verify_ancilla(c, tmap("ctrl_add1", 3, k=k)).passed or c.ancilla_counts().get("borrowed", 0) != max(k - 2, 0):
            bad.append(k)
    return not bad, f"d=3, k in 2..5, borrowed ladder, failures={bad}"


def check_5():
    target = parity(target_permutation("ktoffoli", 4, k=2))
    gates = list(synth_ktoffoli_even(2, 4, "borrowed_one", level="g").gates)
    # Every elementary gate shape on three wires, plus every gate the builder emits re-embedded there.
    shapes = [Gate(SwapLevels(i, j), 0) for i, j in itertools.combinations(range(4), 2)]
    shapes += [Gate(SwapLevels(0, 1), t, (eq(c),)) for c, t in itertools.permutations(range(3), 2)]
    for g in gates:
        local = {w: i for i, w in enumerate(g.wires)}
        shapes.append(Gate(g.kind, local[g.target], tuple(eq(local[c.wire], c.level) for c in g.controls)))
    parities = {parity(gate_permutation(g, 4, 3)) for g in shapes}
    refused = [cli_main(["synth", "--family", "ktoffoli", "--d", str(d), "--k", str(k), "--ancilla", "none"]) for d in (4, 6) for k in (2, 3, 4)]
    ok = target == "odd" and parities == {"even"} and set(refused) == {2}
    return ok, f"target parity={target}, gate parities={sorted(parities)}, exit codes={sorted(set(refused))}"


def check_6():
    ks = [4, 8, 16, 32, 64]
    ok = True
    parts = []
    for d in (3, 4):
        g = [count_gates(synth_ktoffoli(k, d)).g_gates for k in ks]
        ratios = [b / a for a, b in zip(g, g[1:])]
        slope, icept = np.polyfit(ks, g, 1)
        pred = slope * np.array(ks) + icept
        r2 = 1 - np.sum((np.array(g) - pred) ** 2) / np.sum((np.array(g) - np.mean(g)) ** 2)
        ok = ok and max(ratios) <= 2.5 and r2 >= 0.99
        parts.append(f"d={d}: g={g}, g(2k)/g(k)={[round(r, 3) for r in ratios]}, R^2={r2:.5f}")
    return ok, "; ".join(parts)


def check_7():
    ok = True
    parts = []
    for (d, n), seed in zip([(3, 2), (3, 3), (5, 2), (4, 2)], itertools.count(700)):
        rng = np.random.default_rng(seed)
        consts = []
        for _ in range(50):
            f = random_function(d, n, rng)
            c = compile_reversible(f, level="g")
            want = tmap("function", d, n=n, table=f.table)
            if d % 2:
                good = not c.ancilla_wires and verify_equiv(c, want).passed
            else:
                good = c.ancilla_counts() == {"borrowed": 1} and verify_ancilla(c, want).passed
            ok = ok and good and all(is_g_gate(g) for g in c.gates)
            consts.append(len(c.gates) / (n * d**n))
        c_all = max(consts)
        halves = (max(consts[:25]), max(consts[25:]))
        stable = all(abs(h / c_all - 1) <= 0.2 for h in halves)
        ok = ok and stable
        spread = (min(consts) / np.mean(consts), max(consts) / np.mean(consts))
        parts.append(
            f"({d},{n}): C={c_all:.2f} batch C={halves[0]:.2f}/{halves[1]:.2f}, "
            f"per-instance ratio/mean in [{spread[0]:.2f},{spread[1]:.2f}]"
        )
    return ok, "; ".join(parts)


def check_8():
    rng = np.random.default_rng(8)
    bad = []
    for _ in range(10):
        u = tuple(int(v) for v in rng.permutation(3))
        c = synth_mcu(3, 3, u, level="g")
        rep = verify_ancilla(c, tmap("mcu", 3, k=3, u=list(u)))
        if not (rep.passed and c.ancilla_counts() == {"clean": 1} and c.m == 5):
            bad.append(u)
    return not bad, f"d=3, k=3, 10 random u, clean contract over 3^5 register, failures={bad}"


def check_9():
    r = lower_bound(3, 3, 1)
    direct = math.ceil(3 * 27 * math.log(3) / (4 * math.log(9)) - 1e-9)
    return r.bound == 11 == direct, f"bound(n=3,d=3,c=1)={r.bound} (raw {r.value:.4f})"


def check_10():
    want = tmap("ktoffoli", 3, k=2)
    survivors = []
    sizes = []
    for level in ("macro", "g"):
        c = synth_ktoffoli_odd(2, 3, level=level)
        sizes.append(len(c.gates))
        assert verify_equiv(c, want).passed
        for i in range(len(c.gates)):
            if verify_equiv(c.with_gates(c.gates[:i] + c.gates[i + 1 :]), want).passed:
                survivors.append((level, i))
    return not survivors, f"single-gate deletions over {sizes} gates (macro, g), undetected={survivors}"


CHECKS = {
    1: ("odd-d k-Toffoli, no ancilla", check_1),
    2: ("even-d k-Toffoli, one borrowed ancilla", check_2),
    3: ("P_k against the h table", check_3),
    4: ("|0^k>-X_+1 with borrowed ancillas", check_4),
    5: ("parity obstruction for even d", check_5),
    6: ("linear growth of gate count in k", check_6),
    7: ("reversible function compiler", check_7),
    8: ("multi-controlled U with a clean ancilla", check_8),
    9: ("counting lower bound", check_9),
    10: ("mutation sensitivity of the oracle", check_10),
}


def _run(n):
    title, fn = CHECKS[n]
    ok, detail = fn()
    return _report(n, title, ok, detail)


def test_criterion_01_odd_ktoffoli():
    assert _run(1)


def test_criterion_02_even_ktoffoli():
    assert _run(2)


def test_criterion_03_pk():
    assert _run(3)


def test_criterion_04_ctrl_add1():
    assert _run(4)


def test_criterion_05_parity():
    assert _run(5)


def test_criterion_06_linearity():
    assert _run(6)


def test_criterion_07_reversible():
    assert _run(7)


def test_criterion_08_mcu():
    assert _run(8)


def test_criterion_09_lower_bound():
    assert _run(9)


def test_criterion_10_mutation():
    assert _run(10)


if __name__ == "__main__":
    results = [_run(n) for n in CHECKS]
    sys.exit(0 if all(results) else 1)
