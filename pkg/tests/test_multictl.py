import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import scalar_permutation, tmap
from quditsynth.ir import TARGET, Circuit, Gate, OpaquePerm, eq, is_g_gate, serialize
from quditsynth.multictl import (
    AncillaMode,
    SynthesisError,
    SynthesisRequest,
    generalize_controls,
    h_oracle,
    ktoffoli_odd_blocks,
    synth_ctrl_add1,
    synth_ktoffoli,
    synth_ktoffoli_even,
    synth_ktoffoli_odd,
    synth_mcu,
    synth_pk,
    synthesize,
)
from quditsynth.primitives import count_gates, synth_2toffoli_odd
from quditsynth.sim import (
    all_states,
    circuit_to_permutation,
    parity,
    simulate,
    target_permutation,
    verify_ancilla,
    verify_equiv,
)


def pk_oracle(d, k, dagger=False):
    """P_k built from ``h_oracle`` one basis state at a time."""

    def fn(x):
        _, h = h_oracle(x, d)
        if dagger:
            h = x[-1] if h == x[-1] else (x[-1] + 1) % d
        return tuple(x[:-1]) + (h,)

    return scalar_permutation(d, k, fn)


# --------------------------------------------------------------------------
# h


def test_h_oracle_examples():
    assert h_oracle((1, 0, 0, 0, 2), 3) == (1, 2)
    assert h_oracle((0, 0, 0, 2), 3) == (None, 1)
    assert h_oracle((2, 0, 1), 3) == (1, 0)
    assert h_oracle((0, 3, 4), 5) == (2, 4)
    assert h_oracle((0, 2, 0), 5) == (2, 4)


@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(0, 6), min_size=1, max_size=5))
def test_h_is_a_bijection_in_the_last_coordinate(d, prefix):
    prefix = [v % d for v in prefix]
    images = {h_oracle(prefix + [v], d)[1] for v in range(d)}
    assert images == set(range(d))


def test_pk_oracle_agrees_with_vectorized_target():
    for d in (3, 5):
        for k in (2, 3, 4):
            assert pk_oracle(d, k) == target_permutation("pk", d, k=k)
            assert pk_oracle(d, k, True) == target_permutation("pk_dagger", d, k=k)


# --------------------------------------------------------------------------
# |0^k>-X_{+1}


def test_ctrl_add1_base_case():
    c = synth_ctrl_add1(1, 3)
    assert len(c.gates) == 1 and c.ancilla_counts() == {}


@pytest.mark.parametrize("mode", ["garbage", "borrowed_many"])
@pytest.mark.parametrize("d,k", [(3, 2), (3, 3), (3, 4), (3, 5), (5, 3), (5, 4)])
def test_ctrl_add1(d, k, mode):
    c = synth_ctrl_add1(k, d, mode)
    assert sum(c.ancilla_counts().values()) == max(k - 2, 0)
    assert verify_ancilla(c, tmap("ctrl_add1", d, k=k)).passed


def test_ctrl_add1_rejects_even_and_missing_ancillas():
    with pytest.raises(SynthesisError):
        synth_ctrl_add1(3, 4)
    with pytest.raises(SynthesisError):
        synth_ctrl_add1(4, 3, "none")
    with pytest.raises(SynthesisError):
        synth_ctrl_add1(0, 3)


def test_ctrl_add1_garbage_leaves_ancillas_changed_somewhere():
    c = synth_ctrl_add1(4, 3, "garbage")
    x = all_states(3, c.m)
    y = simulate(c, x)
    assert np.any(y[list(c.ancilla_wires)] != x[list(c.ancilla_wires)])


# --------------------------------------------------------------------------
# P_k


@pytest.mark.parametrize("mode", ["garbage", "borrowed_many", "borrowed_one"])
@pytest.mark.parametrize("d,k", [(3, 2), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (5, 4)])
def test_pk_matches_h_oracle(d, k, mode):
    for dagger in (False, True):
        c = synth_pk(k, d, dagger, mode)
        assert verify_ancilla(c, pk_oracle(d, k, dagger)).passed


def test_pk_ancilla_counts():
    assert synth_pk(5, 3, ancilla_mode="borrowed_one").ancilla_counts() == {"borrowed": 1}
    assert synth_pk(5, 3, ancilla_mode="garbage").ancilla_counts() == {"garbage": 3}
    assert synth_pk(2, 3).ancilla_counts() == {}


def test_pk_dagger_undoes_pk():
    for k in (2, 3, 5):
        p = circuit_to_permutation(synth_pk(k, 3))
        q = circuit_to_permutation(synth_pk(k, 3, dagger=True))
        assert (q * p).is_identity()


def test_pk_two_is_the_h_table():
    assert circuit_to_permutation(synth_pk(2, 3)) == pk_oracle(3, 2)


def test_pk_rejects_even_and_small():
    with pytest.raises(SynthesisError):
        synth_pk(3, 4)
    with pytest.raises(SynthesisError):
        synth_pk(1, 3)
    with pytest.raises(SynthesisError):
        synth_pk(3, 3, ancilla_mode="none")


# --------------------------------------------------------------------------
# k-Toffoli


def _controls_preserved(c, k):
    x = all_states(c.d, c.m)
    return np.array_equal(simulate(c, x)[:k], x[:k])


@pytest.mark.parametrize("d,k", [(3, 1), (3, 2), (3, 3), (3, 4), (3, 5), (5, 2), (5, 3), (5, 4)])
def test_ktoffoli_odd(d, k):
    c = synth_ktoffoli_odd(k, d, level="g")
    assert c.ancilla_counts() == {}
    assert all(is_g_gate(g) for g in c.gates)
    assert verify_equiv(c, tmap("ktoffoli", d, k=k)).passed
    assert _controls_preserved(c, k)


def test_ktoffoli_odd_small_cases():
    assert len(synth_ktoffoli_odd(1, 3, level="g").gates) == 1
    assert circuit_to_permutation(synth_ktoffoli_odd(2, 3)) == circuit_to_permutation(synth_2toffoli_odd(3))


def test_ktoffoli_odd_only_flip_blocks_change_the_target():
    d, k = 3, 4
    blocks = ktoffoli_odd_blocks(list(range(k)), k, d)
    names = [name for name, _ in blocks]
    assert names.count("flip") == 3
    x = all_states(d, k + 1)
    for name, gates in blocks:
        changed = np.any(simulate(Circuit(d, (TARGET,) * (k + 1), gates), x)[k] != x[k])
        assert changed == (name == "flip"), name


@pytest.mark.parametrize("mode", ["borrowed_one", "borrowed_many", "garbage"])
@pytest.mark.parametrize("d,k", [(4, 1), (4, 2), (4, 3), (4, 4), (6, 2), (6, 3)])
def test_ktoffoli_even(d, k, mode):
    c = synth_ktoffoli_even(k, d, mode, level="g")
    assert all(is_g_gate(g) for g in c.gates)
    assert verify_ancilla(c, tmap("ktoffoli", d, k=k)).passed
    assert _controls_preserved(c, k)


def test_ktoffoli_even_ancilla_counts():
    assert synth_ktoffoli_even(5, 4, "borrowed_one").ancilla_counts() == {"borrowed": 1}
    assert synth_ktoffoli_even(5, 4, "garbage").ancilla_counts() == {"garbage": 3}
    assert synth_ktoffoli_even(5, 4, "borrowed_many").ancilla_counts() == {"borrowed": 3}


def test_ktoffoli_even_garbage_k5():
    c = synth_ktoffoli_even(5, 4, "garbage")
    assert verify_ancilla(c, tmap("ktoffoli", 4, k=5)).passed


def test_even_ancilla_free_request_is_refused_for_a_parity_reason():
    with pytest.raises(SynthesisError, match="even permutation"):
        synth_ktoffoli(3, 4, "none")
    assert parity(target_permutation("ktoffoli", 4, k=3)) == "odd"


def test_ktoffoli_odd_refuses_ancilla_modes():
    with pytest.raises(SynthesisError):
        synth_ktoffoli_odd(3, 3, "garbage")
    with pytest.raises(SynthesisError):
        synth_ktoffoli_odd(3, 4)


def test_linear_growth_at_large_k():
    for d in (3, 4):
        g = [count_gates(synth_ktoffoli(k, d)).g_gates for k in (16, 32, 64, 128)]
        assert all(b / a <= 2.5 for a, b in zip(g, g[1:]))


def test_requests_are_deterministic():
    req = SynthesisRequest("ktoffoli", 5, 3, "auto")
    assert serialize(synthesize(req)) == serialize(synthesize(req))


# --------------------------------------------------------------------------
# |0^k>-U and control patterns


def test_mcu_with_x01_equals_ktoffoli():
    c = synth_mcu(3, 3, (1, 0, 2))
    assert c.ancilla_counts() == {"clean": 1}
    assert verify_ancilla(c, tmap("ktoffoli", 3, k=3)).passed


@pytest.mark.parametrize("d,k,u", [(3, 3, (1, 2, 0)), (4, 3, (2, 3, 1, 0)), (5, 2, (4, 0, 1, 2, 3))])
def test_mcu(d, k, u):
    c = synth_mcu(k, d, u, level="g")
    assert verify_ancilla(c, tmap("mcu", d, k=k, u=list(u))).passed


def test_mcu_k1_equals_direct_gate():
    u = (3, 1, 4, 0, 2)
    c = synth_mcu(1, 5, u)
    direct = Circuit(5, (TARGET, TARGET), (Gate(OpaquePerm(u), 1, (eq(0),)),))
    want = circuit_to_permutation(direct)
    x = all_states(5, 3)
    x = x[:, x[2] == 0]
    assert np.array_equal(simulate(c, x)[:2], want.apply_digits(x[:2]))


def test_mcu_two_qudit_count_is_linear_in_k():
    counts = [count_gates(synth_mcu(k, 3, (1, 2, 0))).two_qudit for k in (8, 16, 32)]
    assert counts[2] / counts[1] <= 2.5


def test_mcu_rejects_non_bijection():
    with pytest.raises(SynthesisError):
        synth_mcu(2, 3, (0, 0, 1))


def test_generalize_controls():
    base = synth_ktoffoli_odd(2, 3)
    assert generalize_controls(base, [0, 0]).gates == base.gates
    c = generalize_controls(base, [2, 0])
    assert verify_equiv(c, tmap("ktoffoli", 3, k=2, pattern=[2, 0])).passed
    c = generalize_controls(SynthesisRequest("ktoffoli", 3, 3), [1, 1, 1])
    assert verify_equiv(c, tmap("ktoffoli", 3, k=3, pattern=[1, 1, 1])).passed
    with pytest.raises(SynthesisError):
        generalize_controls(base, [3, 0])
    with pytest.raises(SynthesisError):
        generalize_controls(base, [1])


def test_ancilla_mode_parsing():
    assert AncillaMode.parse("borrowed-one") is AncillaMode.BORROWED_ONE
    with pytest.raises(ValueError):
        AncillaMode.parse("many")


def test_unknown_family():
    with pytest.raises(SynthesisError):
        synthesize(SynthesisRequest("qft", 2, 3))
    with pytest.raises(SynthesisError):
        synthesize(SynthesisRequest("mcu", 2, 3))
