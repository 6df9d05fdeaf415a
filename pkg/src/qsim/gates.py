"""Gate application over bit-sliced states.

Each gate updates the four slice families through a fixed Boolean
formula; superposition-creating gates run the slices through a symbolic
ripple-carry adder.  Every right-hand side reads the pre-gate slices
(the four families can be mutually dependent), so kernels compute all
new slices before committing.

Signed overflow of any family rolls the gate back, doubles the slice
width (sign extension), and reapplies; one extra bit is always enough
for a single gate, so the retry terminates.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .bdd import BddRef, Engine
from .circuit import Circuit, Gate, GateKind
from .state import FAMILIES, SlicedState, init_basis_state


class SimulationTimeout(Exception):
    """Raised when apply_circuit exceeds its deadline."""


def _carry(env: Engine, a: BddRef, b: BddRef, c: BddRef) -> BddRef:
    # Car(A,B,C) = AB ∨ (A∨B)C
    return env.disj(env.conj(a, b), env.conj(env.disj(a, b), c))


def _sum3(env: Engine, a: BddRef, b: BddRef, c: BddRef) -> BddRef:
    # Sum(A,B,C) = A ⊕ B ⊕ C
    return env.xor(env.xor(a, b), c)


def ripple_add(env: Engine, A: list[BddRef], B: list[BddRef],
               c0: BddRef) -> tuple[list[BddRef], BddRef]:
    """Symbolic two's-complement addition of two slice vectors.

    Returns the sum slices and the signed-overflow predicate
    C^r ⊕ C^{r−1} (carry out of the sign position vs. carry into it).
    """
    r = len(A)
    if len(B) != r:
        raise ValueError("operand widths differ")
    S: list[BddRef] = []
    c = c0
    c_into_sign = c0
    for i in range(r):
        a, b = A[i], B[i]
        if i == r - 1:
            c_into_sign = c
        S.append(_sum3(env, a, b, c))
        c = _carry(env, a, b, c)
    return S, env.xor(c, c_into_sign)


# ----------------------------------------------------------------------
# per-gate slice transforms; each returns (new slices, overflow refs)


def _flip_formula(env: Engine, f: BddRef, controls: tuple[int, ...],
                  t: int) -> BddRef:
    """Cofactor/select form of the conditional bit flip (X row shape)."""
    qc = env.cube({c: 1 for c in controls})
    ctl1 = {c: 1 for c in controls}
    f_t0 = env.cofactor(f, {**ctl1, t: 0})
    f_t1 = env.cofactor(f, {**ctl1, t: 1})
    vt = env.var(t)
    term1 = env.conj(env.neg(qc), f)
    term2 = env.conj(env.conj(qc, vt), f_t0)
    term3 = env.conj(env.conj(qc, env.neg(vt)), f_t1)
    return env.disj(term1, env.disj(term2, term3))


def _flip(env: Engine, f: BddRef, controls: tuple[int, ...], t: int) -> BddRef:
    lt = env.level_of(t)
    if all(env.level_of(c) < lt for c in controls):
        return env.flip_if(f, controls, t)
    return _flip_formula(env, f, controls, t)


def _permutation(state: SlicedState, controls: tuple[int, ...], t: int):
    env = state.engine
    cv = tuple(state.qvars[c] for c in controls)
    tv = state.qvars[t]
    new = {fam: [_flip(env, f, cv, tv) for f in state.slices[fam]]
           for fam in FAMILIES}
    return new, []


def _fredkin(state: SlicedState, controls: tuple[int, ...], t1: int, t2: int):
    env = state.engine
    cv = {state.qvars[c]: 1 for c in controls}
    v1, v2 = state.qvars[t1], state.qvars[t2]
    qc = env.cube(cv)
    active = env.conj(qc, env.xor(env.var(v1), env.var(v2)))
    inactive = env.neg(active)
    cube_10 = env.cube({**cv, v1: 1, v2: 0})
    cube_01 = env.cube({**cv, v1: 0, v2: 1})

    def transform(f: BddRef) -> BddRef:
        f_01 = env.cofactor(f, {**cv, v1: 0, v2: 1})
        f_10 = env.cofactor(f, {**cv, v1: 1, v2: 0})
        out = env.conj(inactive, f)
        out = env.disj(out, env.conj(cube_10, f_01))
        return env.disj(out, env.conj(cube_01, f_10))

    new = {fam: [transform(f) for f in state.slices[fam]] for fam in FAMILIES}
    return new, []


def _conditional_negate(state: SlicedState, cond: BddRef):
    """Shared Z/CZ body: two's-complement negate where ``cond`` holds."""
    env = state.engine
    zeros = [env.false] * state.r
    new = {}
    overflows = []
    for fam in FAMILIES:
        G = [env.xor(cond, f) for f in state.slices[fam]]
        S, ovf = ripple_add(env, G, zeros, cond)
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


def _z_gate(state: SlicedState, t: int):
    return _conditional_negate(state, state.engine.var(state.qvars[t]))


def _cz_gate(state: SlicedState, a: int, b: int):
    env = state.engine
    cond = env.conj(env.var(state.qvars[a]), env.var(state.qvars[b]))
    return _conditional_negate(state, cond)


def _h_gate(state: SlicedState, t: int):
    env = state.engine
    vt = env.var(state.qvars[t])
    tvar = state.qvars[t]
    new = {}
    overflows = []
    for fam in FAMILIES:
        F = state.slices[fam]
        G = [env.cofactor(f, {tvar: 0}) for f in F]
        D = [env.ite(vt, env.neg(f), env.cofactor(f, {tvar: 1})) for f in F]
        S, ovf = ripple_add(env, G, D, vt)
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


def _ry90_gate(state: SlicedState, t: int):
    env = state.engine
    vt = env.var(state.qvars[t])
    tvar = state.qvars[t]
    new = {}
    overflows = []
    for fam in FAMILIES:
        F = state.slices[fam]
        G = [env.cofactor(f, {tvar: 0}) for f in F]
        D = [env.ite(vt, f, env.neg(env.cofactor(f, {tvar: 1}))) for f in F]
        S, ovf = ripple_add(env, G, D, env.neg(vt))
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


def _s_gate(state: SlicedState, t: int):
    env = state.engine
    vt = env.var(state.qvars[t])
    zeros = [env.false] * state.r
    sl = state.slices
    new = {
        "a": [env.ite(vt, fc, fa) for fa, fc in zip(sl["a"], sl["c"])],
        "b": [env.ite(vt, fd, fb) for fb, fd in zip(sl["b"], sl["d"])],
    }
    overflows = []
    for fam, src in (("c", "a"), ("d", "b")):
        G = [env.ite(vt, env.neg(fs), ff)
             for ff, fs in zip(sl[fam], sl[src])]
        S, ovf = ripple_add(env, G, zeros, vt)
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


def _t_gate(state: SlicedState, t: int):
    env = state.engine
    vt = env.var(state.qvars[t])
    zeros = [env.false] * state.r
    sl = state.slices
    new = {
        "a": [env.ite(vt, fb, fa) for fa, fb in zip(sl["a"], sl["b"])],
        "b": [env.ite(vt, fc, fb) for fb, fc in zip(sl["b"], sl["c"])],
        "c": [env.ite(vt, fd, fc) for fc, fd in zip(sl["c"], sl["d"])],
    }
    Gd = [env.ite(vt, env.neg(fa), fd) for fd, fa in zip(sl["d"], sl["a"])]
    S, ovf = ripple_add(env, Gd, zeros, vt)
    new["d"] = S
    return new, [ovf]


def _y_gate(state: SlicedState, t: int):
    env = state.engine
    tvar = state.qvars[t]
    vt = env.var(tvar)
    nvt = env.neg(vt)
    zeros = [env.false] * state.r
    sl = state.slices
    new = {}
    overflows = []
    # a ← c, b ← d with sign selected on ¬q_t; c ← a, d ← b with sign on q_t
    for fam, src, keep_on_t, c0 in (("a", "c", True, nvt),
                                    ("b", "d", True, nvt),
                                    ("c", "a", False, vt),
                                    ("d", "b", False, vt)):
        G = [_flip(env, f, (), tvar) for f in sl[src]]
        if keep_on_t:
            D = [env.neg(env.xor(vt, g)) for g in G]
        else:
            D = [env.xor(vt, g) for g in G]
        S, ovf = ripple_add(env, D, zeros, c0)
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


def _rx90_gate(state: SlicedState, t: int):
    env = state.engine
    tvar = state.qvars[t]
    sl = state.slices
    new = {}
    overflows = []
    # a/b subtract the swapped partner (c/d); c/d add the swapped partner
    for fam, src, subtract in (("a", "c", True), ("b", "d", True),
                               ("c", "a", False), ("d", "b", False)):
        D = [_flip(env, f, (), tvar) for f in sl[src]]
        if subtract:
            B = [env.neg(d) for d in D]
            c0 = env.true
        else:
            B = D
            c0 = env.false
        S, ovf = ripple_add(env, sl[fam], B, c0)
        new[fam] = S
        overflows.append(ovf)
    return new, overflows


_K_INCREMENT = {GateKind.H: 1, GateKind.RX90: 1, GateKind.RY90: 1}


def _compute(state: SlicedState, g: Gate):
    kind = g.kind
    if kind in (GateKind.X, GateKind.CNOT, GateKind.TOFFOLI):
        return _permutation(state, g.controls, g.targets[0])
    if kind is GateKind.FREDKIN:
        return _fredkin(state, g.controls, g.targets[0], g.targets[1])
    if kind is GateKind.Z:
        return _z_gate(state, g.targets[0])
    if kind is GateKind.CZ:
        return _cz_gate(state, g.controls[0], g.targets[0])
    if kind is GateKind.H:
        return _h_gate(state, g.targets[0])
    if kind is GateKind.S:
        return _s_gate(state, g.targets[0])
    if kind is GateKind.T:
        return _t_gate(state, g.targets[0])
    if kind is GateKind.Y:
        return _y_gate(state, g.targets[0])
    if kind is GateKind.RX90:
        return _rx90_gate(state, g.targets[0])
    if kind is GateKind.RY90:
        return _ry90_gate(state, g.targets[0])
    raise ValueError(f"unsupported gate kind {kind!r}")


def apply_gate(state: SlicedState, g: Gate) -> int:
    """Apply one gate in place; returns how many width doublings occurred."""
    for q in g.operands():
        if not 0 <= q < state.n:
            raise ValueError(f"operand {q} out of range for {state.n} qubits")
    env = state.engine
    grew = 0
    while True:
        new, overflows = _compute(state, g)
        if all(ovf == env.false for ovf in overflows):
            state.slices = new
            state.k += _K_INCREMENT.get(g.kind, 0)
            return grew
        state.grow(2 * state.r)
        grew += 1


@dataclass
class GateStats:
    index: int
    mnemonic: str
    r: int
    k: int
    live_nodes: int
    grew: int


def apply_circuit(state: SlicedState, circuit: Circuit, *,
                  deadline: float | None = None,
                  reorder: bool = False,
                  gc_between: bool = True,
                  on_gate=None) -> list[GateStats]:
    """Apply every gate in order, with housekeeping between gates.

    ``on_gate(index, gate, state)`` runs after each gate (test hook).
    ``deadline`` is a time.monotonic() timestamp.
    """
    if circuit.n != state.n:
        raise ValueError("circuit and state disagree on qubit count")
    stats: list[GateStats] = []
    env = state.engine
    reorder_floor = max(env.live_nodes, 256)
    for idx, g in enumerate(circuit.gates):
        if deadline is not None and time.monotonic() > deadline:
            raise SimulationTimeout(f"time limit hit before gate {idx}")
        grew = apply_gate(state, g)
        if gc_between:
            env.maybe_gc(state.roots())
        if reorder and env.live_nodes >= 2 * reorder_floor:
            env.sift_reorder(state.roots())
            reorder_floor = max(env.live_nodes, 256)
        stats.append(GateStats(idx, g.kind.value, state.r, state.k,
                               env.live_nodes, grew))
        if on_gate is not None:
            on_gate(idx, g, state)
    return stats


def run_circuit(circuit: Circuit, *, r_init: int = 32,
                node_budget: int | None = None,
                deadline: float | None = None,
                reorder: bool = False,
                on_gate=None) -> tuple[SlicedState, list[GateStats]]:
    """Initialize from the circuit's ``.init`` and apply all gates."""
    kwargs = {} if node_budget is None else {"node_budget": node_budget}
    state = init_basis_state(circuit.n, circuit.init_bits(),
                             r_init=r_init, **kwargs)
    stats = apply_circuit(state, circuit, deadline=deadline,
                          reorder=reorder, on_gate=on_gate)
    return state, stats
