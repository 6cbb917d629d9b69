"""Synthesis of multi-controlled qudit gates and reversible functions.

The elementary gate set is every uncontrolled level swap ``X_ij`` together with
the zero-controlled ``|0>-X_01``. Circuits are verified by exhaustive
simulation of their action on basis states.
"""

from .ir import AncillaKind, Circuit, Control, Gate, deserialize, serialize
from .multictl import (
    AncillaMode,
    SynthesisError,
    SynthesisRequest,
    generalize_controls,
    h_oracle,
    synth_ctrl_add1,
    synth_ktoffoli,
    synth_ktoffoli_even,
    synth_ktoffoli_odd,
    synth_mcu,
    synth_pk,
    synthesize,
)
from .primitives import GateCount, LoweringLevel, count_gates, lower
from .sim import circuit_to_permutation, parity, target_permutation, verify_ancilla, verify_equiv

__all__ = [
    "AncillaKind",
    "AncillaMode",
    "Circuit",
    "Control",
    "Gate",
    "GateCount",
    "LoweringLevel",
    "SynthesisError",
    "SynthesisRequest",
    "circuit_to_permutation",
    "count_gates",
    "deserialize",
    "generalize_controls",
    "h_oracle",
    "lower",
    "parity",
    "serialize",
    "synth_ctrl_add1",
    "synth_ktoffoli",
    "synth_ktoffoli_even",
    "synth_ktoffoli_odd",
    "synth_mcu",
    "synth_pk",
    "synthesize",
    "target_permutation",
    "verify_ancilla",
    "verify_equiv",
]
