"""Bit-sliced state vectors.

An n-qubit state is stored as four families of r BDD slices over the
qubit variables.  Slice i of family a holds bit i of the integer vector
ā; the four integers at basis index j assemble, in two's complement, the
amplitude (a_j·ω³ + b_j·ω² + c_j·ω + d_j)/√2^k with k shared across the
state.  Slice r−1 is the sign slice; widening the integers appends
copies of it (sign extension).
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import AlgebraicAmplitude, RootTwoRational, RT_ONE
from .bdd import BddRef, DEFAULT_NODE_BUDGET, Engine

FAMILIES = ("a", "b", "c", "d")

#: decode_all refuses to enumerate states larger than this many qubits.
DEFAULT_ENUM_LIMIT = 16

DEFAULT_R_INIT = 32


class SlicedState:
    """Mutable simulation state: 4r slice BDDs plus (n, r, k, s²)."""

    def __init__(self, engine: Engine, n: int, qvars: list[int], r: int):
        self.engine = engine
        self.n = n
        self.qvars = qvars
        self.r = r
        self.k = 0
        self.s2: RootTwoRational = RT_ONE
        self.slices: dict[str, list[BddRef]] = {
            fam: [engine.false] * r for fam in FAMILIES}
        self._selector_vars: list[int] = []

    # ------------------------------------------------------------------

    def roots(self) -> list[BddRef]:
        out = []
        for fam in FAMILIES:
            out.extend(self.slices[fam])
        return out

    def node_count(self) -> int:
        """Internal BDD nodes reachable from the 4r slices."""
        return self.engine.count_reachable(self.roots())

    def selector_vars(self, count: int) -> list[int]:
        """Encoding variables shared by measurement builds (created lazily)."""
        while len(self._selector_vars) < count:
            self._selector_vars.append(self.engine.add_var())
        return self._selector_vars[:count]

    def _assignment(self, index: str) -> dict[int, int]:
        if len(index) != self.n or any(ch not in "01" for ch in index):
            raise ValueError(f"index must be a length-{self.n} bitstring")
        return {self.qvars[j]: int(index[j]) for j in range(self.n)}

    # ------------------------------------------------------------------
    # decoding

    def decode_amplitude(self, index: str) -> AlgebraicAmplitude:
        """Reassemble the amplitude stored at one basis index."""
        env = self.engine
        asg = self._assignment(index)
        ints = []
        for fam in FAMILIES:
            bits = [env.evaluate(f, asg) for f in self.slices[fam]]
            ints.append(_from_twos_complement(bits))
        return AlgebraicAmplitude(*ints, k=self.k)

    def decode_all(self, limit: int = DEFAULT_ENUM_LIMIT) -> list[AlgebraicAmplitude]:
        """All 2^n amplitudes, index ascending (qubit 0 most significant)."""
        if self.n > limit:
            raise ValueError(
                f"decode_all limited to {limit} qubits (state has {self.n})")
        env = self.engine
        level = [env.level_of(v) for v in self.qvars]
        if level != sorted(level):
            # decode in level order, then undo the permutation on indices
            return self._decode_all_permuted()
        var_low, var_high, var_ = env._low, env._high, env._var
        k = self.k
        n = self.n
        fams = [self.slices[f] for f in FAMILIES]
        out: list[AlgebraicAmplitude] = []
        zero = AlgebraicAmplitude(0, 0, 0, 0, k)

        def rec(j: int, vecs: tuple) -> None:
            if all(f == 0 for vec in vecs for f in vec):
                out.extend([zero] * (1 << (n - j)))
                return
            if j == n:
                ints = []
                for vec in vecs:
                    ints.append(_from_twos_complement(list(vec)))
                out.append(AlgebraicAmplitude(*ints, k=k))
                return
            lv = level[j]
            lows = []
            highs = []
            for vec in vecs:
                lo = []
                hi = []
                for f in vec:
                    if f >= 2 and env._level[var_[f]] == lv:
                        lo.append(var_low[f])
                        hi.append(var_high[f])
                    else:
                        lo.append(f)
                        hi.append(f)
                lows.append(tuple(lo))
                highs.append(tuple(hi))
            rec(j + 1, tuple(lows))
            rec(j + 1, tuple(highs))

        rec(0, tuple(tuple(s) for s in fams))
        return out

    def _decode_all_permuted(self) -> list[AlgebraicAmplitude]:
        return [self.decode_amplitude(format(i, f"0{self.n}b"))
                for i in range(1 << self.n)]

    def normalization_sums(self, limit: int = DEFAULT_ENUM_LIMIT) -> tuple[int, int]:
        """(Σu, Σv) over the |α|² numerators of all amplitudes.

        An exactly normalized state satisfies Σu = 2^k and Σv = 0.
        """
        su = sv = 0
        for amp in self.decode_all(limit):
            u, v = amp.abs2_numerators()
            su += u
            sv += v
        return su, sv

    # ------------------------------------------------------------------
    # width growth

    def grow(self, new_r: int) -> None:
        """Sign-extend every family to ``new_r`` bits."""
        if new_r <= self.r:
            raise ValueError("new width must exceed the current width")
        for fam in FAMILIES:
            sl = self.slices[fam]
            sign = sl[-1]
            sl.extend([sign] * (new_r - self.r))
        self.r = new_r

    # ------------------------------------------------------------------
    # output

    def dump_amplitudes(self, limit: int = DEFAULT_ENUM_LIMIT) -> list[str]:
        """One ``<bits> <a> <b> <c> <d> <k>`` line per nonzero index."""
        lines = []
        for i, amp in enumerate(self.decode_all(limit)):
            if amp.is_zero():
                continue
            bits = format(i, f"0{self.n}b")
            lines.append(f"{bits} {amp.a} {amp.b} {amp.c} {amp.d} {amp.k}")
        return lines


def init_basis_state(n: int, bits: str, r_init: int = DEFAULT_R_INIT,
                     node_budget: int = DEFAULT_NODE_BUDGET,
                     engine: Engine | None = None) -> SlicedState:
    """Fresh state |bits⟩: slice d0 is the index cube, all others 0."""
    if n < 1:
        raise ValueError("need at least one qubit")
    if len(bits) != n or any(ch not in "01" for ch in bits):
        raise ValueError(f"initial state must be a length-{n} bitstring")
    if r_init < 1:
        raise ValueError("slice width must be at least 1")
    if engine is None:
        engine = Engine(node_budget=node_budget)
    qvars = engine.add_vars(n)
    state = SlicedState(engine, n, qvars, r_init)
    state.slices["d"][0] = engine.cube(
        {qvars[j]: int(bits[j]) for j in range(n)})
    return state


def _from_twos_complement(bits: list[int]) -> int:
    r = len(bits)
    raw = 0
    for i, bit in enumerate(bits):
        if bit:
            raw |= 1 << i
    if bits[r - 1]:
        raw -= 1 << r
    return raw


def to_fraction_prob(p: RootTwoRational) -> Fraction:
    """Rational value of a probability known to have v = 0 (else raises)."""
    if p.v != 0:
        raise ValueError("probability has an irrational part")
    return p.u
