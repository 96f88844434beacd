"""OpenQASM 2.0 export of the full protocol circuit, and a replayer for it."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from ..njl.lattice import LatticeModel
from ..protocol import (AliceStage, Prepared, ProtocolConfig, alice_stage,
                        bob_interaction, prepare_initial_state)
from ..statevector import (CXGate, H_MATRIX, S_MATRIX, SDG_MATRIX, SingleQubitGate,
                           StateVector, X_MATRIX, apply_gate, measure_qubit, rz_matrix,
                           tensor_with_ancillas)


class GateOp(NamedTuple):
    name: str
    qubits: tuple
    params: tuple = ()
    condition: Optional[int] = None  # value of creg c that enables the gate


@dataclass
class CircuitScript:
    num_qubits: int
    num_clbits: int = 1
    ops: list = field(default_factory=list)

    def add(self, name, *qubits, params=(), condition=None):
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise IndexError(f"qubit {q} outside register of {self.num_qubits}")
        self.ops.append(GateOp(name, tuple(qubits), tuple(params), condition))

    def marker(self, label: str):
        self.ops.append(GateOp("marker", (), (label,)))

    def count(self, name: str) -> int:
        return sum(op.name == name for op in self.ops)

    def section(self, begin: str, end: str) -> list:
        """Ops strictly between two markers."""
        labels = [op.params[0] if op.name == "marker" else None for op in self.ops]
        i, j = labels.index(begin), labels.index(end)
        return self.ops[i + 1:j]

    def render(self) -> str:
        n = self.num_qubits
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";',
                 "opaque initialize " + ",".join(f"a{i}" for i in range(n - 2)) + ";",
                 f"qreg q[{n}];", f"creg c[{self.num_clbits}];"]
        for op in self.ops:
            if op.name == "marker":
                lines.append(f"// @{op.params[0]}")
                continue
            args = ",".join(f"q[{q}]" for q in op.qubits)
            if op.name == "measure":
                lines.append(f"measure {args} -> c[0];")
                continue
            head = op.name
            if op.params:
                head += "(" + ",".join(repr(float(p)) for p in op.params) + ")"
            prefix = f"if(c=={op.condition}) " if op.condition is not None else ""
            lines.append(f"{prefix}{head} {args};")
        return "\n".join(lines) + "\n"


_LINE = re.compile(r"^(?:if\(c==(\d+)\)\s*)?([a-z_]+)(?:\(([^)]*)\))?\s+(.*?);$")


def parse_circuit(text: str) -> CircuitScript:
    script = None
    nclbits = 1
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("//"):
            if line.startswith("// @") and script is not None:
                script.marker(line[4:])
            continue
        if line.startswith(("OPENQASM", "include", "opaque")):
            continue
        m = re.match(r"qreg q\[(\d+)\];", line)
        if m:
            script = CircuitScript(int(m.group(1)), nclbits)
            continue
        m = re.match(r"creg c\[(\d+)\];", line)
        if m:
            script.num_clbits = int(m.group(1))
            continue
        m = re.match(r"measure q\[(\d+)\] -> c\[0\];", line)
        if m:
            script.add("measure", int(m.group(1)))
            continue
        m = _LINE.match(line)
        if not m or script is None:
            raise ValueError(f"cannot parse circuit line {raw!r}")
        cond, name, params, args = m.groups()
        qubits = [int(q) for q in re.findall(r"q\[(\d+)\]", args)]
        pvals = tuple(float(p) for p in params.split(",")) if params else ()
        script.add(name, *qubits, params=pvals,
                   condition=int(cond) if cond is not None else None)
    if script is None:
        raise ValueError("no qreg declaration")
    return script


# ---------------------------------------------------------------- export ---


def _rotation_block(script: CircuitScript, factors: str, theta: float):
    """exp(-i theta P) via basis change, CX parity ladder and rz(2 theta)."""
    support = [q for q, f in enumerate(factors) if f != "I"]
    for q in support:
        if factors[q] == "X":
            script.add("h", q)
        elif factors[q] == "Y":
            script.add("sdg", q)
            script.add("h", q)
    for a, b in zip(support, support[1:]):
        script.add("cx", a, b)
    script.add("rz", support[-1], params=(2.0 * theta,))
    for a, b in reversed(list(zip(support, support[1:]))):
        script.add("cx", a, b)
    for q in support:
        if factors[q] == "X":
            script.add("h", q)
        elif factors[q] == "Y":
            script.add("h", q)
            script.add("s", q)


def trotter_terms(model: LatticeModel) -> list:
    """(factors, coefficient) in the order trotter_evolve applies them; identities dropped."""
    out = []
    for part in model.sub_sums():
        for c, p in part.terms:
            if not p.is_identity:
                out.append((p.factors, c.real))
    return out


def export_circuit(cfg: ProtocolConfig, model: LatticeModel,
                   steps: Optional[int] = None) -> CircuitScript:
    """Full gate sequence of one run.

    The field vacuum is an opaque ``initialize`` on the field qubits.
    Identity Hamiltonian terms only shift the global phase and are omitted.
    """
    steps = cfg.steps if steps is None else steps
    N = cfg.lattice.sites
    a, b, n0 = cfg.alice_qubit, cfg.bob_qubit, cfg.n0
    s = CircuitScript(cfg.num_qubits)
    s.add("initialize", *range(N))
    s.marker("energy H: vacuum")

    s.marker("alice")
    s.add("cx", a, n0)
    s.add("rz", n0, params=(2.0 * cfg.lambda_a,))
    s.add("cx", a, n0)
    s.add("measure", a)
    s.marker("energy H: after alice")

    s.marker("evolution begin")
    terms = trotter_terms(model)
    for _ in range(steps):
        for factors, c in terms:
            _rotation_block(s, factors + "II", c * cfg.dt)
    s.marker("evolution end")

    s.marker("bob")
    flips = [bit for bit in (0, 1) if cfg.bob_sign(1 - 2 * bit) == -1.0]
    for bit in (0, 1):
        if cfg.bob_sign(1 - 2 * bit) not in (1.0, -1.0):
            raise ValueError("circuit rendering needs m_B = +1 or -1")

    def flip():
        if len(flips) == 2:
            s.add("x", b)
        elif flips:
            s.add("x", b, condition=flips[0])

    flip()
    s.add("cx", b, n0)
    s.add("rz", n0, params=(cfg.lambda_b,))
    s.add("cx", b, n0)
    s.add("rz", b, params=(-cfg.lambda_b,))
    flip()
    s.marker(f"energy T00[{n0}]: Z basis for on-site terms")
    s.marker(f"energy T00[{n0}]: h on bond qubits for XX, sdg+h for YY")
    return s


# ---------------------------------------------------------------- replay ---

_FIXED = {"h": H_MATRIX, "s": S_MATRIX, "sdg": SDG_MATRIX, "x": X_MATRIX}


def replay(script: CircuitScript, field_vacuum: StateVector,
           forced_outcome: Optional[int] = None, rng=None) -> StateVector:
    """Run a script on the dense simulator, starting from ``field_vacuum``."""
    n_field = field_vacuum.num_qubits
    state = StateVector.zero_state(script.num_qubits)
    creg = 0
    for op in script.ops:
        if op.name == "marker":
            continue
        if op.condition is not None and op.condition != creg:
            continue
        if op.name == "initialize":
            if list(op.qubits) != list(range(n_field)):
                raise ValueError("initialize must cover the field qubits 0..N-1")
            state = tensor_with_ancillas(field_vacuum, script.num_qubits - n_field)
        elif op.name == "measure":
            if forced_outcome is not None:
                mu, _, state = measure_qubit(state, op.qubits[0], forced=forced_outcome)
            else:
                rng = rng if rng is not None else np.random.default_rng()
                mu, _, state = measure_qubit(state, op.qubits[0], draw=float(rng.random()))
            creg = 0 if mu == 1 else 1
        elif op.name == "cx":
            apply_gate(state, CXGate(*op.qubits))
        elif op.name == "rz":
            apply_gate(state, SingleQubitGate(rz_matrix(op.params[0]), op.qubits[0], "rz"))
        elif op.name in _FIXED:
            apply_gate(state, SingleQubitGate(_FIXED[op.name], op.qubits[0], op.name))
        else:
            raise ValueError(f"unsupported gate {op.name!r}")
    return state


def pipeline_final_state(cfg: ProtocolConfig, prepared: Optional[Prepared] = None,
                         alice: Optional[AliceStage] = None) -> tuple[StateVector, int]:
    """The in-memory state after Bob's kick, as run_protocol builds it, and mu."""
    prepared = prepared if prepared is not None else prepare_initial_state(cfg)
    alice = alice if alice is not None else alice_stage(cfg, prepared)
    return bob_interaction(alice.evolved.copy(), cfg, alice.mu), alice.mu
