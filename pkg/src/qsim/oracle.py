"""Dense reference simulator over exact amplitude tuples.

Ground truth for differential testing: the full 2^n coefficient vector
is updated gate by gate with integer-only tuple arithmetic (ω-multiples
are coefficient rotations, the two rotations and H fold their 1/√2 into
the shared exponent).  Guarded to small qubit counts; never used for
scale.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import AlgebraicAmplitude, RootTwoRational, shift_tuple
from .circuit import Circuit, Gate, GateKind
from .state import SlicedState

DENSE_LIMIT = 16

Tuple4 = tuple[int, int, int, int]

_ZERO4: Tuple4 = (0, 0, 0, 0)


def _add(x: Tuple4, y: Tuple4) -> Tuple4:
    return (x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3])


def _sub(x: Tuple4, y: Tuple4) -> Tuple4:
    return (x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3])


def _neg(x: Tuple4) -> Tuple4:
    return (-x[0], -x[1], -x[2], -x[3])


def _mul_i(x: Tuple4) -> Tuple4:
    # i = ω²: (a,b,c,d) → (c, d, −a, −b)
    return (x[2], x[3], -x[0], -x[1])


def _mul_neg_i(x: Tuple4) -> Tuple4:
    return (-x[2], -x[3], x[0], x[1])


def _mul_omega(x: Tuple4) -> Tuple4:
    # ω·(aω³+bω²+cω+d) uses ω⁴ = −1: (a,b,c,d) → (b, c, d, −a)
    return (x[1], x[2], x[3], -x[0])


class DenseState:
    """2^n exact coefficient tuples sharing one √2 exponent."""

    def __init__(self, n: int, k: int, amps: list[Tuple4]):
        self.n = n
        self.k = k
        self.amps = amps

    def amplitude(self, i: int) -> AlgebraicAmplitude:
        return AlgebraicAmplitude(*self.amps[i], k=self.k)

    def normalization_sums(self) -> tuple[int, int]:
        su = sv = 0
        for t in self.amps:
            a, b, c, d = t
            su += a * a + b * b + c * c + d * d
            sv += a * b + b * c + c * d - a * d
        return su, sv

    def check_normalized(self) -> None:
        su, sv = self.normalization_sums()
        if su != 1 << self.k or sv != 0:
            raise AssertionError(
                f"oracle lost normalization: sums ({su}, {sv}) at k={self.k}")

    def probability_of(self, qubits: tuple[int, ...], bits: str) -> RootTwoRational:
        """Exact probability that the given qubits read the given bits."""
        total = RootTwoRational(0)
        n = self.n
        for i, t in enumerate(self.amps):
            if all(((i >> (n - 1 - q)) & 1) == int(bits[pos])
                   for pos, q in enumerate(qubits)):
                total = total + AlgebraicAmplitude(*t, k=self.k).abs2()
        return total


def _mask(n: int, q: int) -> int:
    return 1 << (n - 1 - q)


def _pairs(n: int, t: int, controls: tuple[int, ...] = ()):
    """Indices (i0, i1) differing in bit t, controls all 1, bit t of i0 = 0."""
    mt = _mask(n, t)
    cmask = 0
    for c in controls:
        cmask |= _mask(n, c)
    for i in range(1 << n):
        if i & mt:
            continue
        if (i & cmask) == cmask:
            yield i, i | mt


def apply_dense_gate(dense: DenseState, g: Gate) -> None:
    n, amps = dense.n, dense.amps
    kind = g.kind
    t = g.targets[0]
    if kind in (GateKind.X, GateKind.CNOT, GateKind.TOFFOLI):
        for i0, i1 in _pairs(n, t, g.controls):
            amps[i0], amps[i1] = amps[i1], amps[i0]
    elif kind is GateKind.Y:
        for i0, i1 in _pairs(n, t):
            amps[i0], amps[i1] = _mul_neg_i(amps[i1]), _mul_i(amps[i0])
    elif kind is GateKind.Z:
        for _, i1 in _pairs(n, t):
            amps[i1] = _neg(amps[i1])
    elif kind is GateKind.S:
        for _, i1 in _pairs(n, t):
            amps[i1] = _mul_i(amps[i1])
    elif kind is GateKind.T:
        for _, i1 in _pairs(n, t):
            amps[i1] = _mul_omega(amps[i1])
    elif kind is GateKind.H:
        for i0, i1 in _pairs(n, t):
            a0, a1 = amps[i0], amps[i1]
            amps[i0], amps[i1] = _add(a0, a1), _sub(a0, a1)
        dense.k += 1
    elif kind is GateKind.RX90:
        for i0, i1 in _pairs(n, t):
            a0, a1 = amps[i0], amps[i1]
            amps[i0] = _add(a0, _mul_neg_i(a1))
            amps[i1] = _add(_mul_neg_i(a0), a1)
        dense.k += 1
    elif kind is GateKind.RY90:
        for i0, i1 in _pairs(n, t):
            a0, a1 = amps[i0], amps[i1]
            amps[i0], amps[i1] = _sub(a0, a1), _add(a0, a1)
        dense.k += 1
    elif kind is GateKind.CZ:
        both = _mask(n, g.controls[0]) | _mask(n, t)
        for i in range(1 << n):
            if (i & both) == both:
                amps[i] = _neg(amps[i])
    elif kind is GateKind.FREDKIN:
        t2 = g.targets[1]
        m1, m2 = _mask(n, t), _mask(n, t2)
        cmask = 0
        for c in g.controls:
            cmask |= _mask(n, c)
        for i in range(1 << n):
            if (i & cmask) == cmask and (i & m1) and not (i & m2):
                j = (i ^ m1) | m2
                amps[i], amps[j] = amps[j], amps[i]
    else:
        raise ValueError(f"unsupported gate kind {kind!r}")


def simulate_dense(circuit: Circuit, check: bool = True,
                   limit: int = DENSE_LIMIT) -> DenseState:
    """Run the circuit exactly on a dense vector (n ≤ limit)."""
    if circuit.n > limit:
        raise ValueError(f"dense simulation limited to {limit} qubits")
    n = circuit.n
    amps: list[Tuple4] = [_ZERO4] * (1 << n)
    amps[int(circuit.init_bits(), 2)] = (0, 0, 0, 1)
    dense = DenseState(n, 0, amps)
    for g in circuit.gates:
        apply_dense_gate(dense, g)
        if check:
            dense.check_normalized()
    return dense


@dataclass
class CompareReport:
    equal: bool
    index: str | None = None
    sliced: tuple | None = None
    dense: tuple | None = None

    def to_dict(self) -> dict:
        if self.equal:
            return {"status": "equal"}
        return {"status": "diverged", "first_divergence": {
            "index": self.index,
            "sliced": list(self.sliced),
            "dense": list(self.dense)}}


def compare(state: SlicedState, dense: DenseState) -> CompareReport:
    """Exact amplitude comparison after lifting both sides to a common k."""
    if state.n != dense.n:
        raise ValueError("qubit counts differ")
    k = max(state.k, dense.k)
    for i, amp in enumerate(state.decode_all()):
        lhs = amp.with_k(k).coeffs()
        t = dense.amps[i]
        for _ in range(k - dense.k):
            t = shift_tuple(t)
        if lhs != t:
            bits = format(i, f"0{state.n}b")
            return CompareReport(False, bits,
                                 lhs + (k,), t + (k,))
    return CompareReport(True)
