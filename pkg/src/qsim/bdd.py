"""Reduced ordered binary decision diagrams.

A small, self-contained ROBDD engine with a shared node store, memoized
Boolean operations, cofactoring, variable-order control (including a
sifting pass), and mark-and-sweep garbage collection.

Nodes use plain edges (no complement edges).  A node is referenced by a
small integer handle; handles are canonical: two handles are equal if and
only if they denote the same Boolean function under the engine's current
variable order.  Handles 0 and 1 are the constant functions.

References
==========

Randal E. Bryant,
    "Graph-based algorithms for Boolean function manipulation",
    IEEE Transactions on Computers C-35(8), 1986.

Karl S. Brace, Richard L. Rudell, Randal E. Bryant,
    "Efficient implementation of a BDD package", DAC 1990.

Richard Rudell,
    "Dynamic variable ordering for ordered binary decision diagrams",
    ICCAD 1993.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping

BddRef = int
VarId = int

#: Default cap on live internal nodes (exceeding it raises NodeBudgetExceeded).
DEFAULT_NODE_BUDGET = 1 << 26

#: Operation-cache entries are dropped wholesale past this size.
DEFAULT_CACHE_LIMIT = 1 << 20

_TERMINAL = -1

# opcodes for cache keys
_AND, _OR, _XOR, _NOT, _ITE, _RESTRICT, _FLIP = range(7)

_APPLY_OPS = {"and": _AND, "or": _OR, "xor": _XOR}


class BddError(Exception):
    """Engine-level failure (bad operands, broken preconditions)."""


class NodeBudgetExceeded(BddError):
    """The configured cap on live nodes was reached."""


class Engine:
    """A shared ROBDD forest.

    Single-threaded: handles are bound to their engine instance and must
    not be mixed across engines or used concurrently.  Run independent
    engines (one per simulation session) for parallelism.
    """

    false: BddRef = 0
    true: BddRef = 1

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET,
                 cache_limit: int = DEFAULT_CACHE_LIMIT):
        if node_budget < 1:
            raise ValueError("node budget must be positive")
        self._var: list[int] = [_TERMINAL, _TERMINAL]
        self._low: list[int] = [0, 1]
        self._high: list[int] = [0, 1]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._free: list[int] = []
        self._cache: dict = {}
        self._order: list[VarId] = []   # level -> var
        self._level: list[int] = []     # var -> level
        self._budget = node_budget
        self._cache_limit = cache_limit
        self._peak = 0
        self._lookups = 0
        self._hits = 0
        self._gc_floor = 0
        self._gc_min = 1 << 16
        self._gc_count = 0
        self._reclaimed_total = 0
        self._cube_tokens: dict[tuple, int] = {}

    # ------------------------------------------------------------------
    # variables and order

    def add_var(self) -> VarId:
        """Register a fresh variable at the bottom of the current order."""
        v = len(self._level)
        self._level.append(len(self._order))
        self._order.append(v)
        return v

    def add_vars(self, count: int) -> list[VarId]:
        return [self.add_var() for _ in range(count)]

    @property
    def num_vars(self) -> int:
        return len(self._level)

    def order(self) -> list[VarId]:
        """Current variable order, top level first."""
        return list(self._order)

    def level_of(self, v: VarId) -> int:
        self._check_var(v)
        return self._level[v]

    def _check_var(self, v: VarId) -> None:
        if not (isinstance(v, int) and 0 <= v < len(self._level)):
            raise BddError(f"unknown variable {v!r}")

    # ------------------------------------------------------------------
    # node construction

    def _mk(self, var: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (var, low, high)
        unique = self._unique
        n = unique.get(key)
        if n is not None:
            return n
        if len(unique) >= self._budget:
            raise NodeBudgetExceeded(
                f"live node count reached budget of {self._budget}")
        free = self._free
        if free:
            n = free.pop()
            self._var[n] = var
            self._low[n] = low
            self._high[n] = high
        else:
            n = len(self._var)
            self._var.append(var)
            self._low.append(low)
            self._high.append(high)
        unique[key] = n
        if len(unique) > self._peak:
            self._peak = len(unique)
        return n

    def var(self, v: VarId) -> BddRef:
        """The function that is 1 iff variable ``v`` is 1."""
        self._check_var(v)
        return self._mk(v, 0, 1)

    def nvar(self, v: VarId) -> BddRef:
        self._check_var(v)
        return self._mk(v, 1, 0)

    def cube(self, literals: Mapping[VarId, int]) -> BddRef:
        """Conjunction of literals; ``literals`` maps variable to phase."""
        for v in literals:
            self._check_var(v)
        f = 1
        level = self._level
        for v, phase in sorted(literals.items(),
                               key=lambda it: level[it[0]], reverse=True):
            f = self._mk(v, 0, f) if phase else self._mk(v, f, 0)
        return f

    # ------------------------------------------------------------------
    # node inspection

    def _check_ref(self, f: BddRef) -> None:
        if not (isinstance(f, int) and 0 <= f < len(self._var)):
            raise BddError(f"invalid node reference {f!r}")

    def is_terminal(self, f: BddRef) -> bool:
        return f < 2

    def top_var(self, f: BddRef) -> VarId:
        self._check_ref(f)
        if f < 2:
            raise BddError("terminal node has no variable")
        return self._var[f]

    def children(self, f: BddRef) -> tuple[BddRef, BddRef]:
        self._check_ref(f)
        if f < 2:
            raise BddError("terminal node has no children")
        return self._low[f], self._high[f]

    def iter_nodes(self) -> Iterator[tuple[int, int, int, int]]:
        """Yield (node, var, low, high) for every live internal node."""
        for (var, low, high), n in self._unique.items():
            yield n, var, low, high

    # ------------------------------------------------------------------
    # Boolean operations

    def apply(self, op: str, f: BddRef, g: BddRef) -> BddRef:
        """Binary connective; ``op`` is one of ``"and" | "or" | "xor"``."""
        code = _APPLY_OPS.get(op)
        if code is None:
            raise BddError(f"unsupported operation {op!r}")
        self._check_ref(f)
        self._check_ref(g)
        return self._apply(code, f, g)

    def conj(self, f: BddRef, g: BddRef) -> BddRef:
        return self._apply(_AND, f, g)

    def disj(self, f: BddRef, g: BddRef) -> BddRef:
        return self._apply(_OR, f, g)

    def xor(self, f: BddRef, g: BddRef) -> BddRef:
        return self._apply(_XOR, f, g)

    def _apply(self, op: int, f: int, g: int) -> int:
        if f == g:
            return f if op != _XOR else 0
        if op == _AND:
            if f == 0 or g == 0:
                return 0
            if f == 1:
                return g
            if g == 1:
                return f
        elif op == _OR:
            if f == 1 or g == 1:
                return 1
            if f == 0:
                return g
            if g == 0:
                return f
        else:
            if f == 0:
                return g
            if g == 0:
                return f
            if f == 1:
                return self.neg(g)
            if g == 1:
                return self.neg(f)
        if f > g:
            f, g = g, f
        key = (op, f, g)
        cache = self._cache
        self._lookups += 1
        r = cache.get(key)
        if r is not None:
            self._hits += 1
            return r
        var_, level = self._var, self._level
        vf, vg = var_[f], var_[g]
        lf, lg = level[vf], level[vg]
        if lf <= lg:
            v = vf
            f0, f1 = self._low[f], self._high[f]
        else:
            v = vg
            f0 = f1 = f
        if lg <= lf:
            g0, g1 = self._low[g], self._high[g]
        else:
            g0 = g1 = g
        r = self._mk(v, self._apply(op, f0, g0), self._apply(op, f1, g1))
        if len(cache) >= self._cache_limit:
            cache.clear()
        cache[key] = r
        return r

    def neg(self, f: BddRef) -> BddRef:
        if f < 2:
            return 1 - f
        key = (_NOT, f)
        cache = self._cache
        self._lookups += 1
        r = cache.get(key)
        if r is not None:
            self._hits += 1
            return r
        r = self._mk(self._var[f], self.neg(self._low[f]),
                     self.neg(self._high[f]))
        if len(cache) >= self._cache_limit:
            cache.clear()
        cache[key] = r
        return r

    def ite(self, f: BddRef, g: BddRef, h: BddRef) -> BddRef:
        """If-then-else: f·g ∨ ¬f·h."""
        for x in (f, g, h):
            self._check_ref(x)
        return self._ite(f, g, h)

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == 1:
            return g
        if f == 0:
            return h
        if g == h:
            return g
        if g == 1 and h == 0:
            return f
        if g == 0 and h == 1:
            return self.neg(f)
        key = (_ITE, f, g, h)
        cache = self._cache
        self._lookups += 1
        r = cache.get(key)
        if r is not None:
            self._hits += 1
            return r
        var_, level = self._var, self._level
        lv = level[var_[f]]
        v = var_[f]
        for x in (g, h):
            if x >= 2:
                l = level[var_[x]]
                if l < lv:
                    lv, v = l, var_[x]
        if var_[f] == v:
            f0, f1 = self._low[f], self._high[f]
        else:
            f0 = f1 = f
        if g >= 2 and var_[g] == v:
            g0, g1 = self._low[g], self._high[g]
        else:
            g0 = g1 = g
        if h >= 2 and var_[h] == v:
            h0, h1 = self._low[h], self._high[h]
        else:
            h0 = h1 = h
        r = self._mk(v, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        if len(cache) >= self._cache_limit:
            cache.clear()
        cache[key] = r
        return r

    # ------------------------------------------------------------------
    # cofactors and composition

    def _token(self, key: tuple) -> int:
        tok = self._cube_tokens.get(key)
        if tok is None:
            tok = len(self._cube_tokens)
            self._cube_tokens[key] = tok
        return tok

    def cofactor(self, f: BddRef, cube: Mapping[VarId, int]) -> BddRef:
        """Substitute each cube variable by its phase (0 or 1)."""
        self._check_ref(f)
        if not cube:
            return f
        items = []
        for v, phase in cube.items():
            self._check_var(v)
            if phase not in (0, 1):
                raise BddError(f"cube phase must be 0 or 1, got {phase!r}")
            items.append((self._level[v], v, phase))
        items.sort()
        levels = {v: phase for _, v, phase in items}
        tok = self._token(("cof",) + tuple((v, p) for _, v, p in items))
        max_level = items[-1][0]
        return self._cofactor(f, tok, levels, max_level)

    def _cofactor(self, f: int, tok: int, cube: dict, max_level: int) -> int:
        if f < 2:
            return f
        v = self._var[f]
        if self._level[v] > max_level:
            return f
        key = (_RESTRICT, tok, f)
        cache = self._cache
        self._lookups += 1
        r = cache.get(key)
        if r is not None:
            self._hits += 1
            return r
        phase = cube.get(v)
        if phase is None:
            r = self._mk(v, self._cofactor(self._low[f], tok, cube, max_level),
                         self._cofactor(self._high[f], tok, cube, max_level))
        elif phase:
            r = self._cofactor(self._high[f], tok, cube, max_level)
        else:
            r = self._cofactor(self._low[f], tok, cube, max_level)
        if len(cache) >= self._cache_limit:
            cache.clear()
        cache[key] = r
        return r

    def flip_if(self, f: BddRef, controls: Iterable[VarId],
                target: VarId) -> BddRef:
        """Compose f with the map that flips ``target`` where all controls are 1.

        Result(x) = f(x with bit ``target`` complemented) on assignments
        where every control variable is 1, and f(x) elsewhere.  Requires
        every control to sit strictly above ``target`` in the current
        order (callers with mixed placements use the cofactor form).
        """
        self._check_ref(f)
        self._check_var(target)
        level = self._level
        cs = sorted(set(controls), key=lambda v: level[v])
        lt = level[target]
        for c in cs:
            self._check_var(c)
            if level[c] >= lt:
                raise BddError("flip_if controls must be above the target")
        tok = self._token(("flip", tuple(cs), target))
        return self._flip(f, tok, cs, 0, target, lt)

    def _flip(self, f: int, tok: int, cs: list, j: int,
              target: int, lt: int) -> int:
        if f < 2:
            return f
        key = (_FLIP, tok, j, f)
        cache = self._cache
        self._lookups += 1
        r = cache.get(key)
        if r is not None:
            self._hits += 1
            return r
        v = self._var[f]
        lv = self._level[v]
        if j < len(cs):
            lc = self._level[cs[j]]
            if lv < lc:
                r = self._mk(v, self._flip(self._low[f], tok, cs, j, target, lt),
                             self._flip(self._high[f], tok, cs, j, target, lt))
            elif lv == lc:
                # control 0 branch is untouched
                r = self._mk(v, self._low[f],
                             self._flip(self._high[f], tok, cs, j + 1, target, lt))
            else:
                r = self._mk(cs[j], f, self._flip(f, tok, cs, j + 1, target, lt))
        else:
            if lv < lt:
                r = self._mk(v, self._flip(self._low[f], tok, cs, j, target, lt),
                             self._flip(self._high[f], tok, cs, j, target, lt))
            elif v == target:
                r = self._mk(target, self._high[f], self._low[f])
            else:
                r = f      # target absent: flip is a no-op
        if len(cache) >= self._cache_limit:
            cache.clear()
        cache[key] = r
        return r

    # ------------------------------------------------------------------
    # evaluation and support

    def evaluate(self, f: BddRef, assignment: Mapping[VarId, int]) -> int:
        """Truth value of f under a (possibly partial) assignment.

        Raises if the walk reaches a variable missing from ``assignment``.
        """
        self._check_ref(f)
        var_, low_, high_ = self._var, self._low, self._high
        while f >= 2:
            v = var_[f]
            try:
                bit = assignment[v]
            except KeyError:
                raise BddError(f"assignment does not cover variable {v}") from None
            f = high_[f] if bit else low_[f]
        return f

    def support(self, f: BddRef) -> set[VarId]:
        self._check_ref(f)
        seen: set[int] = set()
        out: set[VarId] = set()
        stack = [f]
        while stack:
            n = stack.pop()
            if n < 2 or n in seen:
                continue
            seen.add(n)
            out.add(self._var[n])
            stack.append(self._low[n])
            stack.append(self._high[n])
        return out

    def count_reachable(self, roots: Iterable[BddRef]) -> int:
        """Number of internal nodes reachable from ``roots``."""
        seen: set[int] = set()
        stack = [r for r in roots]
        while stack:
            n = stack.pop()
            if n < 2 or n in seen:
                continue
            seen.add(n)
            stack.append(self._low[n])
            stack.append(self._high[n])
        return len(seen)

    # ------------------------------------------------------------------
    # garbage collection

    def gc(self, roots: Iterable[BddRef] = ()) -> int:
        """Reclaim nodes unreachable from ``roots``; returns the count."""
        marked: set[int] = set()
        stack = [r for r in roots]
        for r in stack:
            self._check_ref(r)
        low_, high_ = self._low, self._high
        while stack:
            n = stack.pop()
            if n < 2 or n in marked:
                continue
            marked.add(n)
            stack.append(low_[n])
            stack.append(high_[n])
        unique = self._unique
        keep = {key: n for key, n in unique.items() if n in marked}
        reclaimed = len(unique) - len(keep)
        if reclaimed:
            self._free.extend(n for n in unique.values() if n not in marked)
            self._unique = keep
        self._cache.clear()
        self._gc_floor = len(keep)
        self._gc_count += 1
        self._reclaimed_total += reclaimed
        return reclaimed

    def maybe_gc(self, roots: Iterable[BddRef] = ()) -> int:
        """gc when the table has grown enough since the last collection."""
        live = len(self._unique)
        if live >= self._gc_floor + max(self._gc_min, self._gc_floor):
            return self.gc(roots)
        return 0

    # ------------------------------------------------------------------
    # variable reordering

    def set_order(self, new_order: Iterable[VarId]) -> None:
        """Reorder variables via adjacent swaps; semantics are preserved."""
        target = list(new_order)
        if sorted(target) != sorted(range(len(self._level))):
            raise BddError("set_order requires a permutation of all variables")
        self._cache.clear()
        for lvl, v in enumerate(target):
            cur = self._level[v]
            while cur > lvl:
                self._swap_levels(cur - 1)
                cur -= 1

    def _swap_levels(self, l: int) -> None:
        """Exchange levels l and l+1, keeping node handles stable."""
        u = self._order[l]
        v = self._order[l + 1]
        var_, low_, high_ = self._var, self._low, self._high
        unique = self._unique
        pending = [n for (w, _, _), n in unique.items() if w == u]
        for n in pending:
            lo, hi = low_[n], high_[n]
            lo_v = lo >= 2 and var_[lo] == v
            hi_v = hi >= 2 and var_[hi] == v
            if not lo_v and not hi_v:
                continue
            f00, f01 = (low_[lo], high_[lo]) if lo_v else (lo, lo)
            f10, f11 = (low_[hi], high_[hi]) if hi_v else (hi, hi)
            del unique[(u, lo, hi)]
            a = f00 if f00 == f10 else self._mk(u, f00, f10)
            b = f01 if f01 == f11 else self._mk(u, f01, f11)
            if (v, a, b) in unique:
                raise BddError("unique table collision during level swap")
            var_[n] = v
            low_[n] = a
            high_[n] = b
            unique[(v, a, b)] = n
        self._order[l] = v
        self._order[l + 1] = u
        self._level[u] = l + 1
        self._level[v] = l

    def sift_reorder(self, roots: Iterable[BddRef] = ()) -> None:
        """One sifting pass: move each variable to its locally best level.

        Size is measured as the node count reachable from ``roots`` (the
        whole table when no roots are given).  Intended for moderate
        variable counts; each variable visits every level.
        """
        roots = list(roots)
        self._cache.clear()
        self.gc(roots)

        def size() -> int:
            return self.count_reachable(roots) if roots else len(self._unique)

        counts: dict[int, int] = {}
        for (w, _, _) in self._unique:
            counts[w] = counts.get(w, 0) + 1
        by_weight = sorted(range(len(self._level)),
                           key=lambda v: counts.get(v, 0), reverse=True)
        top = len(self._order) - 1
        for v in by_weight:
            best_size = size()
            best = self._level[v]
            lvl = best
            while lvl > 0:
                self._swap_levels(lvl - 1)
                lvl -= 1
                s = size()
                if s < best_size:
                    best_size, best = s, lvl
            while lvl < top:
                self._swap_levels(lvl)
                lvl += 1
                s = size()
                if s < best_size:
                    best_size, best = s, lvl
            while lvl > best:
                self._swap_levels(lvl - 1)
                lvl -= 1
        self.gc(roots)

    # ------------------------------------------------------------------
    # statistics

    @property
    def live_nodes(self) -> int:
        return len(self._unique)

    @property
    def peak_nodes(self) -> int:
        return self._peak

    def stats(self) -> dict:
        rate = self._hits / self._lookups if self._lookups else 0.0
        return {
            "live_nodes": len(self._unique),
            "peak_nodes": self._peak,
            "cache_lookups": self._lookups,
            "cache_hits": self._hits,
            "cache_hit_rate": rate,
            "gc_runs": self._gc_count,
            "reclaimed_nodes": self._reclaimed_total,
            "variables": len(self._level),
        }
