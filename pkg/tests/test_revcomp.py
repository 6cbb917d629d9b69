import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tmap
from quditsynth.ir import SwapLevels, is_g_gate
from quditsynth.revcomp import (
    FunctionError,
    ReversibleFunction,
    TwoCycle,
    compile_reversible,
    decompose_transpositions,
    lower_bound,
    random_function,
    synth_2cycle,
)
from quditsynth.sim import encode, simulate, verify_ancilla, verify_equiv


def _recompose(d, n, cycles):
    """Apply the transpositions in list order to every state, on encoded integers."""
    image = list(range(d**n))
    for t in cycles:
        a = int(encode(np.array(t.a)[:, None], d)[0])
        b = int(encode(np.array(t.b)[:, None], d)[0])
        image = [b if v == a else a if v == b else v for v in image]
    return image


def test_identity_has_no_transpositions():
    assert decompose_transpositions(ReversibleFunction.identity(3, 2)) == []
    assert len(compile_reversible(ReversibleFunction.identity(3, 2)).gates) == 0


def test_single_swap():
    table = list(range(9))
    table[1], table[5] = 5, 1
    ts = decompose_transpositions(ReversibleFunction(3, 2, table))
    assert ts == [TwoCycle((0, 1), (1, 2))]


@given(st.sampled_from([(3, 1), (3, 2), (4, 2), (5, 1)]).flatmap(
    lambda dn: st.tuples(st.just(dn), st.permutations(range(dn[0] ** dn[1])))
))
def test_decomposition_recomposes(args):
    (d, n), table = args
    f = ReversibleFunction(d, n, table)
    ts = decompose_transpositions(f)
    assert len(ts) <= d**n - 1
    assert _recompose(d, n, ts) == list(table)


def test_function_validation():
    with pytest.raises(FunctionError):
        ReversibleFunction(3, 1, (0, 0, 1))
    with pytest.raises(FunctionError):
        ReversibleFunction(3, 2, tuple(range(8)))
    with pytest.raises(FunctionError):
        ReversibleFunction.from_dict({"d": 3, "n": 1, "table": [0, 1, 2], "x": 1})


def test_function_file_round_trip(tmp_path):
    f = ReversibleFunction(3, 1, (2, 0, 1))
    path = tmp_path / "f.json"
    path.write_text(json.dumps(f.to_dict()))
    assert ReversibleFunction.load(path) == f


def test_two_cycle_pivot_is_last_difference():
    assert TwoCycle((0, 1, 2), (1, 1, 0)).pivot == 2
    assert TwoCycle((0, 1, 2), (1, 1, 2)).pivot == 0
    with pytest.raises(FunctionError):
        TwoCycle((0, 1), (0, 1))


def test_two_cycle_fig_example():
    t = TwoCycle((0, 1), (1, 2))
    c = synth_2cycle(t, 3, 2)
    assert [str(g) for g in c.gates] == ["|2>1 X01@0", "|0>0 X12@1", "|2>1 X01@0"]
    assert verify_equiv(c, tmap("two_cycle", 3, a=[0, 1], b=[1, 2])).passed


def test_two_cycle_single_coordinate_has_no_step1():
    c = synth_2cycle(TwoCycle((1, 0, 2), (2, 0, 2), pivot=0), 3, 3)
    assert len(c.gates) == 1 and c.gates[0].kind == SwapLevels(1, 2)


@pytest.mark.parametrize("d,n", [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3), (5, 2), (6, 2)])
def test_two_cycles_random(d, n, rng):
    for _ in range(5):
        a = tuple(int(v) for v in rng.integers(0, d, n))
        b = tuple(int(v) for v in rng.integers(0, d, n))
        if a == b:
            continue
        c = synth_2cycle(TwoCycle(a, b), d, n, level="g")
        assert all(is_g_gate(g) for g in c.gates)
        assert verify_ancilla(c, tmap("two_cycle", d, a=list(a), b=list(b))).passed


def test_states_off_the_pivot_values_are_untouched():
    t = TwoCycle((0, 2, 1), (2, 0, 0))
    c = synth_2cycle(t, 3, 3)
    x = np.array([[1], [1], [2]])
    assert simulate(c, x).ravel().tolist() == [1, 1, 2]


@pytest.mark.parametrize("d,n", [(3, 2), (3, 3), (5, 2), (4, 2), (4, 3)])
def test_compile_random(d, n, rng):
    for _ in range(5):
        f = random_function(d, n, rng)
        c = compile_reversible(f, level="g")
        assert all(is_g_gate(g) for g in c.gates)
        assert c.ancilla_counts() == ({} if d % 2 else {"borrowed": 1})
        assert verify_ancilla(c, tmap("function", d, n=n, table=f.table)).passed


def test_compile_rejects_qubits():
    with pytest.raises(FunctionError):
        compile_reversible(ReversibleFunction(2, 2, (1, 0, 2, 3)))


def test_lower_bound_values():
    assert lower_bound(1, 2, 1).bound == 1
    r = lower_bound(3, 3, 1)
    assert r.bound == 11 and math.isclose(r.value, 10.125)
    r = lower_bound(3, 3, 1, observed=22)
    assert r.ratio == 2.0
    with pytest.raises(ValueError):
        lower_bound(0, 3)


@given(st.integers(1, 6), st.integers(2, 7), st.integers(1, 4))
@settings(max_examples=50)
def test_lower_bound_is_the_ceiling(n, d, c):
    r = lower_bound(n, d, c)
    exact = n * d**n * math.log2(d) / (4 * math.log2(c * d * n))
    assert r.bound == math.ceil(exact - 1e-9)
