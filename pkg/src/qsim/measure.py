"""Measurement over a monolithic selector-encoded BDD.

The 4r state slices are folded into one BDD: two selector variables pick
the coefficient family (a/b/c/d) and ⌈log₂r⌉ further variables pick the
bit position, all placed below every qubit variable; measured qubits are
reordered to the top, in measurement order.  Outcome probabilities come
from one cached bottom-up traversal of the qubit levels; at the boundary
to the selector region each sub-BDD decodes to an exact amplitude whose
squared magnitude seeds the recursion.  Collapse redirects the losing
edge of the measured level to constant 0 and folds 1/p into the running
normalization factor s², all in exact ℚ[√2] arithmetic.

Measurement is a terminal phase: gates must not be applied to a state
after a hyperfunction built from it has collapsed an outcome.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import AlgebraicAmplitude, RootTwoRational, RT_ONE, RT_ZERO
from .bdd import BddRef, Engine
from .state import SlicedState, _from_twos_complement

_FAMILY_SELECT = (("a", 1, 1), ("b", 1, 0), ("c", 0, 1), ("d", 0, 0))

_U128 = 1 << 128


class MeasurementError(Exception):
    pass


@dataclass
class MeasurementRecord:
    """Outcomes in measurement order with their exact probabilities."""

    entries: list[tuple[int, int, RootTwoRational]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def outcomes(self) -> str:
        return "".join(str(bit) for _, bit, _ in self.entries)

    def probability_product(self) -> RootTwoRational:
        p = RT_ONE
        for _, _, q in self.entries:
            p = p * q
        return p


class Hyperfunction:
    """Monolithic measurement BDD with cached node probabilities."""

    def __init__(self, engine: Engine, root: BddRef, n: int, r: int, k: int,
                 measured: tuple[int, ...], sel_vars: list[int]):
        self.engine = engine
        self.root = root
        self.n = n
        self.r = r
        self.k = k
        self.measured = measured
        self.sel_vars = sel_vars
        self.nb = len(sel_vars) - 2
        self.s2: RootTwoRational = RT_ONE
        self.record = MeasurementRecord()
        self._prob: dict[int, RootTwoRational] = {}
        self._amp: dict[int, AlgebraicAmplitude] = {}
        self._bits: dict[tuple[int, int], tuple[int, ...]] = {}

    # ------------------------------------------------------------------
    # probability accumulation

    def _clamp(self, node: int) -> int:
        """Level of a node, with the selector region mapped to n."""
        if node < 2:
            return self.n
        env = self.engine
        lv = env._level[env._var[node]]
        return lv if lv < self.n else self.n

    def node_probability(self, node: BddRef) -> RootTwoRational:
        """Probability mass of a subtree, relative to its own level."""
        cache = self._prob
        p = cache.get(node)
        if p is not None:
            return p
        if node == 0:
            p = RT_ZERO
        elif self._clamp(node) >= self.n:
            p = self._leaf_amplitude(node).abs2()
        else:
            env = self.engine
            lv = env._level[env._var[node]]
            lo, hi = env._low[node], env._high[node]
            p = (self._weighted(lo, lv) + self._weighted(hi, lv))
        cache[node] = p
        return p

    def _weighted(self, child: int, parent_level: int) -> RootTwoRational:
        # a skipped qubit level doubles the subtree's contribution
        gap = self._clamp(child) - parent_level - 1
        p = self.node_probability(child)
        return (1 << gap) * p if gap else p

    def total_probability(self) -> RootTwoRational:
        """s² × mass of the whole tree; exactly 1 for an unmeasured state."""
        root = self.root
        mass = self.node_probability(root)
        gap = self._clamp(root)
        if gap:
            mass = (1 << gap) * mass
        return self.s2 * mass

    # ------------------------------------------------------------------
    # amplitude decoding at the selector boundary

    def _leaf_amplitude(self, node: int) -> AlgebraicAmplitude:
        amp = self._amp.get(node)
        if amp is not None:
            return amp
        env = self.engine
        x0, x1 = self.sel_vars[0], self.sel_vars[1]
        ints = []
        for _, b0, b1 in _FAMILY_SELECT:
            cur = node
            for v, bit in ((x0, b0), (x1, b1)):
                if cur >= 2 and env._var[cur] == v:
                    cur = env._high[cur] if bit else env._low[cur]
            bits = self._code_bits(cur, 0)
            ints.append(_from_twos_complement(list(bits[:self.r])))
        amp = AlgebraicAmplitude(*ints, k=self.k)
        self._amp[node] = amp
        return amp

    def _code_bits(self, node: int, b: int) -> tuple[int, ...]:
        """Bits of one integer, LSB first, read off the code sub-BDD."""
        nb = self.nb
        if b == nb:
            if node >= 2:
                raise MeasurementError("selector decode hit a deep node")
            return (node,)
        key = (node, b)
        out = self._bits.get(key)
        if out is not None:
            return out
        env = self.engine
        code_var = self.sel_vars[2 + b]
        if node >= 2 and env._var[node] == code_var:
            lo = self._code_bits(env._low[node], b + 1)
            hi = self._code_bits(env._high[node], b + 1)
        else:
            lo = hi = self._code_bits(node, b + 1)
        merged = []
        for x, y in zip(lo, hi):
            merged.append(x)
            merged.append(y)
        out = tuple(merged)
        self._bits[key] = out
        return out

    # ------------------------------------------------------------------
    # measurement

    def _descend_recorded(self) -> int:
        """Follow the recorded outcomes down to the next frontier level."""
        env = self.engine
        cur = self.root
        for lvl, (_, bit, _) in enumerate(self.record.entries):
            if cur < 2 or env._level[env._var[cur]] != lvl:
                raise MeasurementError("collapsed level is missing its node")
            cur = env._high[cur] if bit else env._low[cur]
        return cur

    def outcome_probabilities(self) -> tuple[RootTwoRational, RootTwoRational]:
        """(Pr[0], Pr[1]) for the next qubit in measurement order."""
        j = len(self.record)
        if j >= len(self.measured):
            raise MeasurementError("all measured qubits are consumed")
        env = self.engine
        cur = self._descend_recorded()
        if self._clamp(cur) > j:
            half = self._mass(cur, j + 1)
            raw0 = raw1 = half
        else:
            raw0 = self._mass(env._low[cur], j + 1)
            raw1 = self._mass(env._high[cur], j + 1)
        return self.s2 * raw0, self.s2 * raw1

    def _mass(self, node: int, at_level: int) -> RootTwoRational:
        gap = self._clamp(node) - at_level
        p = self.node_probability(node)
        return (1 << gap) * p if gap else p

    def measure_next(self, forced: int | None = None,
                     rng: random.Random | None = None) -> int:
        """Collapse the next measured qubit; returns the outcome bit."""
        j = len(self.record)
        p0, p1 = self.outcome_probabilities()
        if forced is None:
            if rng is None:
                raise ValueError("an rng is required when no outcome is forced")
            u = rng.getrandbits(128)
            outcome = 0 if _less_than_ratio(u, p0, p0 + p1) else 1
        else:
            if forced not in (0, 1):
                raise ValueError("forced outcome must be 0 or 1")
            outcome = forced
        p = p0 if outcome == 0 else p1
        if p.sign() <= 0:
            raise MeasurementError(
                f"outcome {outcome} of qubit {self.measured[j]} has probability 0")
        self._collapse(j, outcome)
        self.s2 = self.s2 / p
        self.record.entries.append((self.measured[j], outcome, p))
        return outcome

    def _collapse(self, j: int, outcome: int) -> None:
        env = self.engine
        path = []
        cur = self.root
        for lvl in range(j):
            path.append(cur)
            _, bit, _ = self.record.entries[lvl]
            cur = env._high[cur] if bit else env._low[cur]
        var_j = env._order[j]
        if cur >= 2 and env._var[cur] == var_j:
            lo, hi = env._low[cur], env._high[cur]
            node = env._mk(var_j, lo, 0) if outcome == 0 else env._mk(var_j, 0, hi)
        else:
            node = env._mk(var_j, cur, 0) if outcome == 0 else env._mk(var_j, 0, cur)
        for lvl in range(j - 1, -1, -1):
            parent = path[lvl]
            _, bit, _ = self.record.entries[lvl]
            v = env._var[parent]
            node = env._mk(v, 0, node) if bit else env._mk(v, node, 0)
        self.root = node

    # ------------------------------------------------------------------
    # queries

    def joint_probability(self, bits: str) -> RootTwoRational:
        """Exact probability of a prefix outcome; no collapse, no rescaling."""
        if len(bits) > len(self.measured):
            raise MeasurementError("assignment longer than the measured list")
        env = self.engine
        cur = self.root
        for lvl, ch in enumerate(bits):
            if ch not in "01":
                raise ValueError("outcome must be a bitstring")
            if self._clamp(cur) > lvl:
                continue
            cur = env._high[cur] if ch == "1" else env._low[cur]
            if cur == 0:
                return RT_ZERO
        return self.s2 * self._mass(cur, len(bits))

    def iter_outcomes(self):
        """Yield (bits, probability) for every nonzero outcome, ascending."""
        env = self.engine
        m = len(self.measured)

        def rec(node: int, lvl: int, prefix: str):
            if node == 0:
                return
            if lvl == m:
                yield prefix, self.s2 * self._mass(node, m)
                return
            if self._clamp(node) > lvl:
                yield from rec(node, lvl + 1, prefix + "0")
                yield from rec(node, lvl + 1, prefix + "1")
            else:
                yield from rec(env._low[node], lvl + 1, prefix + "0")
                yield from rec(env._high[node], lvl + 1, prefix + "1")

        yield from rec(self.root, 0, "")

    def sample(self, shots: int, seed: int) -> Counter:
        """Seeded histogram over the measured qubits; shares the prob cache."""
        if shots < 0:
            raise ValueError("shot count must be non-negative")
        rng = random.Random(seed)
        env = self.engine
        m = len(self.measured)
        hist: Counter = Counter()
        for _ in range(shots):
            bits = []
            cur = self.root
            for lvl in range(m):
                if self._clamp(cur) > lvl:
                    outcome = 0 if rng.getrandbits(128) < (_U128 >> 1) else 1
                    bits.append(outcome)
                    continue
                raw0 = self._mass(env._low[cur], lvl + 1)
                raw1 = self._mass(env._high[cur], lvl + 1)
                u = rng.getrandbits(128)
                outcome = 0 if _less_than_ratio(u, raw0, raw0 + raw1) else 1
                bits.append(outcome)
                cur = env._high[cur] if outcome else env._low[cur]
            hist["".join(map(str, bits))] += 1
        return hist


def _less_than_ratio(u: int, num: RootTwoRational, den: RootTwoRational) -> bool:
    """Exact test u/2^128 < num/den for den > 0 in ℚ[√2]."""
    return (u * den - _U128 * num).sign() < 0


def build_hyperfunction(state: SlicedState,
                        measured: tuple[int, ...] | list[int]) -> Hyperfunction:
    """Fold the state's slices into one measurement BDD.

    The engine order is changed so the measured qubits occupy the top
    levels in the given sequence; selector variables sit below all qubit
    variables, family selectors above the position code.
    """
    measured = tuple(measured)
    if len(set(measured)) != len(measured):
        raise ValueError("duplicate qubit in measured list")
    for q in measured:
        if not 0 <= q < state.n:
            raise ValueError(f"measured qubit {q} out of range")
    env = state.engine
    mset = set(measured)
    qperm = [state.qvars[q] for q in measured]
    qperm += [state.qvars[q] for q in range(state.n) if q not in mset]
    qset = set(qperm)
    target = qperm + [v for v in env.order() if v not in qset]
    target_levels = {v: i for i, v in enumerate(target)}
    if any(env.level_of(v) != target_levels[v] for v in qperm):
        env.set_order(target)

    nb = max(0, (state.r - 1).bit_length())
    sel = state.selector_vars(2 + nb)
    x0, x1 = sel[0], sel[1]
    code = sel[2:]

    def combine(funcs: list[BddRef], b: int) -> BddRef:
        if len(funcs) == 1:
            return funcs[0]
        lo = combine(funcs[0::2], b + 1)
        hi = combine(funcs[1::2], b + 1)
        return env.ite(env.var(code[b]), hi, lo)

    padded = 1 << nb
    family_fn = {}
    for fam, _, _ in _FAMILY_SELECT:
        funcs = list(state.slices[fam]) + [env.false] * (padded - state.r)
        family_fn[fam] = combine(funcs, 0)
    v1 = env.var(x1)
    pos = env.ite(v1, family_fn["a"], family_fn["b"])
    neg = env.ite(v1, family_fn["c"], family_fn["d"])
    root = env.ite(env.var(x0), pos, neg)
    h = Hyperfunction(env, root, state.n, state.r, state.k, measured, sel)
    h.s2 = state.s2
    return h
