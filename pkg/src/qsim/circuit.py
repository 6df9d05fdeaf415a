"""Circuit representation, text format, and benchmark generators.

The text format is line oriented: ``#`` starts a comment, ``.qubits N``
must come first, an optional ``.init <bits>`` may follow, then gate
lines, then an optional trailing ``.measure i j ...``.  Gate mnemonics:

    x t | y t | z t | h t | s t | t t | rx t | ry t
    cx c t | cz a b | ccx c1 [c2 ...] t | fredkin [c1 ...] t1 t2

Indices are whitespace-separated decimals.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum


class GateKind(Enum):
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    T = "t"
    RX90 = "rx"
    RY90 = "ry"
    CNOT = "cx"
    CZ = "cz"
    TOFFOLI = "ccx"
    FREDKIN = "fredkin"


#: (min controls, max controls or None for unbounded, number of targets)
_ARITY = {
    GateKind.X: (0, 0, 1),
    GateKind.Y: (0, 0, 1),
    GateKind.Z: (0, 0, 1),
    GateKind.H: (0, 0, 1),
    GateKind.S: (0, 0, 1),
    GateKind.T: (0, 0, 1),
    GateKind.RX90: (0, 0, 1),
    GateKind.RY90: (0, 0, 1),
    GateKind.CNOT: (1, 1, 1),
    GateKind.CZ: (1, 1, 1),
    GateKind.TOFFOLI: (1, None, 1),
    GateKind.FREDKIN: (0, None, 2),
}

_MNEMONICS = {kind.value: kind for kind in GateKind}


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    controls: tuple[int, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        lo, hi, nt = _ARITY[self.kind]
        if len(self.targets) != nt:
            raise ValueError(f"{self.kind.value} takes {nt} target(s)")
        if len(self.controls) < lo or (hi is not None and len(self.controls) > hi):
            raise ValueError(f"bad control count for {self.kind.value}")
        operands = self.controls + self.targets
        if len(set(operands)) != len(operands):
            raise ValueError(f"duplicate operand in {self.kind.value}")
        if any(q < 0 for q in operands):
            raise ValueError("qubit indices must be non-negative")

    def operands(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def mnemonic_line(self) -> str:
        return " ".join([self.kind.value, *map(str, self.operands())])


def gate(kind: GateKind, *operands: int) -> Gate:
    """Build a gate from operands in mnemonic order (controls first)."""
    _, _, nt = _ARITY[kind]
    ncontrols = len(operands) - nt
    if ncontrols < 0:
        raise ValueError(f"too few operands for {kind.value}")
    return Gate(kind, tuple(operands[:ncontrols]), tuple(operands[ncontrols:]))


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)
    init: str | None = None
    measure: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("circuit needs at least one qubit")
        if self.init is not None and (
                len(self.init) != self.n or any(c not in "01" for c in self.init)):
            raise ValueError(f"init must be a length-{self.n} bitstring")
        for g in self.gates:
            for q in g.operands():
                if q >= self.n:
                    raise ValueError(f"qubit index {q} out of range")
        if len(set(self.measure)) != len(self.measure):
            raise ValueError("duplicate qubit in measure list")
        for q in self.measure:
            if not 0 <= q < self.n:
                raise ValueError(f"measured qubit {q} out of range")

    def init_bits(self) -> str:
        return self.init if self.init is not None else "0" * self.n


class ParseError(ValueError):
    """Syntax or validation failure with source position."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def _tokens(raw: str) -> list[tuple[str, int]]:
    """(token, 1-based column) pairs for one line, comments stripped."""
    body = raw.split("#", 1)[0]
    out = []
    col = 0
    for tok in body.split():
        col = body.index(tok, col)
        out.append((tok, col + 1))
        col += len(tok)
    return out


def parse(text: str) -> Circuit:
    n: int | None = None
    init: str | None = None
    gates: list[Gate] = []
    measure: tuple[int, ...] = ()
    measured = False

    def err(msg: str, lineno: int, col: int = 1):
        raise ParseError(msg, lineno, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if not toks:
            continue
        head, head_col = toks[0]
        args = toks[1:]
        if head == ".qubits":
            if n is not None:
                err("duplicate .qubits directive", lineno, head_col)
            if gates or init is not None:
                err(".qubits must be the first directive", lineno, head_col)
            if len(args) != 1:
                err(".qubits takes exactly one count", lineno, head_col)
            tok, col = args[0]
            if not tok.isdigit() or int(tok) < 1:
                err(f"invalid qubit count {tok!r}", lineno, col)
            n = int(tok)
            continue
        if n is None:
            err("missing .qubits directive", lineno, head_col)
        if head == ".init":
            if gates or measured:
                err(".init must precede gate lines", lineno, head_col)
            if init is not None:
                err("duplicate .init directive", lineno, head_col)
            if len(args) != 1:
                err(".init takes exactly one bitstring", lineno, head_col)
            tok, col = args[0]
            if len(tok) != n or any(c not in "01" for c in tok):
                err(f"init bitstring must have length {n}", lineno, col)
            init = tok
            continue
        if head == ".measure":
            if measured:
                err("duplicate .measure directive", lineno, head_col)
            if not args:
                err(".measure needs at least one qubit", lineno, head_col)
            seen: list[int] = []
            for tok, col in args:
                if not tok.isdigit():
                    err(f"invalid qubit index {tok!r}", lineno, col)
                q = int(tok)
                if q >= n:
                    err(f"qubit index {q} out of range (n={n})", lineno, col)
                if q in seen:
                    err(f"duplicate measured qubit {q}", lineno, col)
                seen.append(q)
            measure = tuple(seen)
            measured = True
            continue
        if head.startswith("."):
            err(f"unknown directive {head!r}", lineno, head_col)
        if measured:
            err("gate after .measure directive", lineno, head_col)
        kind = _MNEMONICS.get(head)
        if kind is None:
            err(f"unknown gate mnemonic {head!r}", lineno, head_col)
        operands: list[int] = []
        for tok, col in args:
            if not tok.isdigit():
                err(f"invalid qubit index {tok!r}", lineno, col)
            q = int(tok)
            if q >= n:
                err(f"qubit index {q} out of range (n={n})", lineno, col)
            operands.append(q)
        lo, hi, nt = _ARITY[kind]
        total_lo, total_hi = lo + nt, (None if hi is None else hi + nt)
        if len(operands) < total_lo or (total_hi is not None
                                        and len(operands) > total_hi):
            err(f"wrong operand count for {head!r}", lineno, head_col)
        try:
            gates.append(gate(kind, *operands))
        except ValueError as exc:
            err(str(exc), lineno, head_col)

    if n is None:
        err("missing .qubits directive", max(1, text.count("\n") + 1), 1)
    return Circuit(n=n, gates=gates, init=init, measure=measure)


def serialize(circuit: Circuit) -> str:
    lines = [f".qubits {circuit.n}"]
    if circuit.init is not None:
        lines.append(f".init {circuit.init}")
    lines.extend(g.mnemonic_line() for g in circuit.gates)
    if circuit.measure:
        lines.append(".measure " + " ".join(map(str, circuit.measure)))
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------------
# benchmark generators

#: random pool: the full library minus the two rotations.
_RANDOM_POOL = (GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S,
                GateKind.T, GateKind.CNOT, GateKind.CZ, GateKind.TOFFOLI,
                GateKind.FREDKIN)


def gen_random(n: int, seed: int) -> Circuit:
    """H on every qubit, then 3n gates drawn uniformly from the pool.

    Operands are distinct and uniform.  With n = 2 the three-operand
    gates cannot be placed and are left out of the pool.
    """
    if n < 2:
        raise ValueError("random circuits need at least 2 qubits")
    pool = _RANDOM_POOL
    if n == 2:
        pool = tuple(k for k in _RANDOM_POOL
                     if k not in (GateKind.TOFFOLI, GateKind.FREDKIN))
    rng = random.Random(seed)
    gates = [gate(GateKind.H, q) for q in range(n)]
    for _ in range(3 * n):
        kind = pool[rng.randrange(len(pool))]
        if kind in (GateKind.TOFFOLI, GateKind.FREDKIN):
            arity = 3
        elif kind in (GateKind.CNOT, GateKind.CZ):
            arity = 2
        else:
            arity = 1
        operands = rng.sample(range(n), arity)
        gates.append(gate(kind, *operands))
    return Circuit(n=n, gates=gates)


def gen_ghz(n: int) -> Circuit:
    """H then a CNOT chain: n gates preparing (|0…0⟩+|1…1⟩)/√2."""
    if n < 1:
        raise ValueError("need at least one qubit")
    gates = [gate(GateKind.H, 0)]
    gates.extend(gate(GateKind.CNOT, i, i + 1) for i in range(n - 1))
    return Circuit(n=n, gates=gates, measure=tuple(range(n)))


def gen_bv(n: int, hidden: str | None = None) -> Circuit:
    """Hidden-string circuit over n−1 data qubits plus one ancilla.

    The default hidden string is all ones, giving 3n−1 gates; measuring
    the data qubits recovers the string with probability 1.
    """
    if n < 2:
        raise ValueError("need at least 2 qubits (data + ancilla)")
    if hidden is None:
        hidden = "1" * (n - 1)
    if len(hidden) != n - 1 or any(c not in "01" for c in hidden):
        raise ValueError(f"hidden string must be a length-{n - 1} bitstring")
    ancilla = n - 1
    gates = [gate(GateKind.X, ancilla)]
    gates.extend(gate(GateKind.H, q) for q in range(n))
    gates.extend(gate(GateKind.CNOT, i, ancilla)
                 for i in range(n - 1) if hidden[i] == "1")
    gates.extend(gate(GateKind.H, q) for q in range(n - 1))
    return Circuit(n=n, gates=gates, measure=tuple(range(n - 1)))
