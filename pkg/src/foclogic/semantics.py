"""Exact evaluation of counting-logic terms and formulas over labelled graphs.

Two evaluators live here:

* `eval_naive` is a direct transcription of the semantics: every bound
  variable is enumerated over its full range.  It is the reference the
  optimizing evaluator is tested against, and it is hopeless beyond toy
  inputs.

* `EvalSession` evaluates the same semantics but prunes enumeration without
  changing any answer.  The rules it applies:

  - counting results are memoized per (node, bindings of its free variables),
    kept when the scan was long or the node has at most one free variable;
  - a bound number variable that no later bound or the body mentions turns
    into a multiplication by its range;
  - conjuncts linear in the scanned variable become interval constraints,
    so equalities collapse the scan to one candidate;
  - a conjunct asserting "the scanned variable times something equals C"
    (written as a bounded existential) restricts candidates to divisors of C;
  - conjuncts comparing a term that is monotone in the scanned variable
    against a constant narrow the interval by binary search;
  - a counting body monotone in the scanned variable is counted by locating
    the true/false boundary with binary search instead of a sweep;
  - closed single-variable counts grow a cached prefix-sum table, so
    re-evaluation under a different bound costs one lookup;
  - comparisons against counting terms stop the scan as soon as the
    comparison is decided, and such existential scans remember which end of
    the range produced the last witness;
  - vertex scans restrict to neighbour lists or forced vertices when the
    body conjoins an adjacency or equality guard.

Every rule prunes candidates that cannot contribute or stops a scan whose
outcome is already decided; the body is still evaluated in full for every
counted candidate, so the optimized result always equals the naive one.

Values are exact: naturals for terms, booleans for formulas.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

from .graphs import LabelledGraph
from .syntax import (
    Add,
    Adj,
    And,
    Builtin,
    Const,
    Count,
    Formula,
    FunApp,
    Label,
    Le,
    Mul,
    NBind,
    Node,
    Not,
    NumVar,
    RelApp,
    Term,
    VarEq,
    VBind,
    VertexVar,
    VOrd,
    free_vars,
)

if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

# scans at least this long get their result memoized even for wide keys
_MEMO_ITERS = 8
# bounds above this size qualify for prefix tables and boundary search
_SWEEP_LIMIT = 64
# marks "variable had no outer binding" when scans save shadowed values
_ABSENT = object()


class EvalError(ValueError):
    pass


def _bit_builtin(i: int, n: int) -> bool:
    return (n >> i) & 1 == 1


BUILTIN_REGISTRY = {
    "BIT": _bit_builtin,
    "LEQ": lambda a, b: a <= b,
    "EVEN": lambda a: a % 2 == 0,
}

# Function oracles available in term position.  Formula builders use these at
# the oracle-backed fidelity level; purely structural formulas never mention
# them.  Subtraction truncates at zero and division by zero yields zero, so
# every oracle is total on the naturals.
SEMANTIC_FUNCTIONS = {
    "arith.add": lambda a, b: a + b,
    "arith.sub": lambda a, b: a - b if a >= b else 0,
    "arith.mul": lambda a, b: a * b,
    "arith.div": lambda a, b: a // b if b else 0,
    "arith.mod": lambda a, b: a % b if b else a,
    "arith.pow2": lambda a: 1 << a,
    "arith.bitlen": lambda a: a.bit_length() if a else 1,
}


@dataclass
class Assignment:
    """Interpretation of the non-logical symbols.

    individuals: variable node -> value (vertex id or natural).
    relations:   name -> set of argument tuples (ints).
    functions:   name -> (finite table, default value).
    builtins:    name -> boolean-valued callable on naturals.
    semantic_functions: name -> integer-valued callable, for oracle-backed
    formulas; defaults to the shared arithmetic registry.
    """

    individuals: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    functions: dict = field(default_factory=dict)
    builtins: dict = field(default_factory=dict)
    semantic_functions: dict = field(default_factory=lambda: dict(SEMANTIC_FUNCTIONS))

    def with_individuals(self, extra: dict) -> "Assignment":
        merged = dict(self.individuals)
        merged.update(extra)
        return Assignment(
            merged, self.relations, self.functions, self.builtins,
            self.semantic_functions,
        )


EMPTY_ASSIGNMENT = Assignment()


# --- the naive reference evaluator ----------------------------------------------


def eval_naive(node: Node, graph: LabelledGraph, assignment: Assignment | None = None,
               env: dict | None = None):
    a = assignment if assignment is not None else EMPTY_ASSIGNMENT
    env = dict(env) if env else {}

    def lookup(var):
        if var in env:
            return env[var]
        if var in a.individuals:
            return a.individuals[var]
        raise EvalError(f"unbound variable {var!r}")

    def ev(n):
        t = type(n)
        if t is Const:
            return n.value
        if t is NumVar or t is VertexVar:
            return lookup(n)
        if t is Add:
            return ev(n.left) + ev(n.right)
        if t is Mul:
            return ev(n.left) * ev(n.right)
        if t is FunApp:
            args = tuple(ev(x) for x in n.args)
            if n.name in a.functions:
                table, default = a.functions[n.name]
                return table.get(args, default)
            if n.name in a.semantic_functions:
                return a.semantic_functions[n.name](*args)
            raise EvalError(f"no interpretation for function {n.name!r}")
        if t is Count:
            def scan(i):
                if i == len(n.binds):
                    return 1 if ev(n.body) else 0
                b = n.binds[i]
                total = 0
                saved = env.get(b.var, _ABSENT)
                if isinstance(b, VBind):
                    for w in range(graph.n):
                        env[b.var] = w
                        total += scan(i + 1)
                else:
                    bound = ev(b.bound)
                    for w in range(bound):
                        env[b.var] = w
                        total += scan(i + 1)
                if saved is _ABSENT:
                    env.pop(b.var, None)
                else:
                    env[b.var] = saved
                return total
            return scan(0)
        if t is Le:
            return ev(n.left) <= ev(n.right)
        if t is VarEq:
            return lookup(n.left) == lookup(n.right)
        if t is Adj:
            return graph.has_edge(lookup(n.left), lookup(n.right))
        if t is VOrd:
            return lookup(n.left) <= lookup(n.right)
        if t is Label:
            return graph.label_bit(lookup(n.arg), n.k)
        if t is RelApp:
            rel = a.relations.get(n.name)
            if rel is None:
                raise EvalError(f"no interpretation for relation {n.name!r}")
            return tuple(ev(x) for x in n.args) in rel
        if t is Builtin:
            fn = a.builtins.get(n.name)
            if fn is None:
                fn = BUILTIN_REGISTRY.get(n.name)
            if fn is None:
                raise EvalError(f"no interpretation for builtin {n.name!r}")
            return bool(fn(*(ev(x) for x in n.args)))
        if t is Not:
            return not ev(n.body)
        if t is And:
            return ev(n.left) and ev(n.right)
        raise EvalError(f"cannot evaluate {type(n).__name__}")

    return ev(node)


# --- optimizing evaluator --------------------------------------------------------


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


class EvalSession:
    """Evaluation context for one graph and one assignment.

    Reusing a session across calls keeps all memo tables warm; the session
    must not outlive mutations to the graph or assignment.
    """

    def __init__(self, graph: LabelledGraph, assignment: Assignment | None = None):
        self.graph = graph
        self.a = assignment if assignment is not None else EMPTY_ASSIGNMENT
        self._memo: dict = {}
        self._partial: dict = {}
        self._prefix: dict = {}
        self._divisors: dict = {}
        self._conj: dict = {}
        self._mono: dict = {}
        self._sorted_free: dict = {}
        self._dir_hint: dict = {}
        self._iters = 0
        self.count_calls = 0
        self._neighbors = [sorted(graph.neighbors(v)) for v in range(graph.n)]

    # -- public API

    def eval(self, node: Node, env: dict | None = None):
        env = dict(env) if env else {}
        return self._eval(node, env)

    def eval_term(self, node: Term, env: dict | None = None) -> int:
        v = self.eval(node, env)
        if isinstance(v, bool):
            raise EvalError("expected a term, got a formula")
        return v

    def eval_formula(self, node: Formula, env: dict | None = None) -> bool:
        v = self.eval(node, env)
        if not isinstance(v, bool):
            raise EvalError("expected a formula, got a term")
        return v

    # -- variable lookup and memo keys

    def _lookup(self, var, env):
        v = env.get(var)
        if v is None:
            v = self.a.individuals.get(var)
            if v is None:
                raise EvalError(f"unbound variable {var!r}")
        return v

    @staticmethod
    def _restore(env, var, saved):
        # scans may shadow an outer binding of the same variable
        if saved is _ABSENT:
            env.pop(var, None)
        else:
            env[var] = saved

    def _sorted_free_vars(self, node):
        lst = self._sorted_free.get(node)
        if lst is None:
            lst = sorted(
                free_vars(node),
                key=lambda v: (0 if isinstance(v, VertexVar) else 1, v.index),
            )
            self._sorted_free[node] = lst
        return lst

    def _env_key(self, node, env):
        return tuple(self._lookup(v, env) for v in self._sorted_free_vars(node))

    # -- main dispatch

    def _eval(self, n: Node, env: dict):
        t = type(n)
        if t is Const:
            return n.value
        if t is NumVar or t is VertexVar:
            return self._lookup(n, env)
        if t is Add:
            return self._eval(n.left, env) + self._eval(n.right, env)
        if t is Mul:
            left = self._eval(n.left, env)
            if left == 0:
                return 0
            return left * self._eval(n.right, env)
        if t is Count:
            return self._count(n, env, None)
        if t is Le:
            left, right = n.left, n.right
            if type(right) is Count:
                lv = self._eval(left, env)
                if lv == 0:
                    return True
                return self._count(right, env, lv) >= lv
            if type(left) is Count:
                rv = self._eval(right, env)
                return self._count(left, env, rv + 1) <= rv
            return self._eval(left, env) <= self._eval(right, env)
        if t is Not:
            return not self._eval(n.body, env)
        if t is And:
            return self._eval(n.left, env) and self._eval(n.right, env)
        if t is FunApp:
            args = tuple(self._eval(x, env) for x in n.args)
            if n.name in self.a.functions:
                table, default = self.a.functions[n.name]
                return table.get(args, default)
            if n.name in self.a.semantic_functions:
                return self.a.semantic_functions[n.name](*args)
            raise EvalError(f"no interpretation for function {n.name!r}")
        if t is VarEq:
            return self._lookup(n.left, env) == self._lookup(n.right, env)
        if t is Adj:
            return self.graph.has_edge(self._lookup(n.left, env),
                                       self._lookup(n.right, env))
        if t is VOrd:
            return self._lookup(n.left, env) <= self._lookup(n.right, env)
        if t is Label:
            return self.graph.label_bit(self._lookup(n.arg, env), n.k)
        if t is RelApp:
            rel = self.a.relations.get(n.name)
            if rel is None:
                raise EvalError(f"no interpretation for relation {n.name!r}")
            return tuple(self._eval(x, env) for x in n.args) in rel
        if t is Builtin:
            fn = self.a.builtins.get(n.name)
            if fn is None:
                fn = BUILTIN_REGISTRY.get(n.name)
            if fn is None:
                raise EvalError(f"no interpretation for builtin {n.name!r}")
            return bool(fn(*(self._eval(x, env) for x in n.args)))
        raise EvalError(f"cannot evaluate {type(n).__name__}")

    # -- counting

    def _count(self, node: Count, env: dict, stop_at: int | None) -> int:
        self.count_calls += 1
        key = (node, self._env_key(node, env))
        got = self._memo.get(key)
        if got is not None:
            return got
        if stop_at is not None:
            part = self._partial.get(key)
            if part is not None and part >= stop_at:
                return part
        outer_iters = self._iters
        self._iters = 0
        total, exact = self._scan(node, 0, env, stop_at)
        own_iters = self._iters
        self._iters = outer_iters
        if own_iters >= _MEMO_ITERS or len(key[1]) <= 1:
            if exact:
                self._memo[key] = total
            elif total > self._partial.get(key, -1):
                self._partial[key] = total
        return total

    def _conjuncts(self, body: Formula):
        lst = self._conj.get(body)
        if lst is None:
            lst = []
            stack = [body]
            while stack:
                f = stack.pop()
                if type(f) is And:
                    stack.append(f.right)
                    stack.append(f.left)
                else:
                    lst.append(f)
            self._conj[body] = lst
        return lst

    def _scan(self, node: Count, i: int, env: dict, budget: int | None):
        binds = node.binds
        if i == len(binds):
            return (1 if self._eval(node.body, env) else 0), True
        b = binds[i]
        if isinstance(b, VBind):
            return self._scan_vertex(node, i, b.var, env, budget)
        return self._scan_number(node, i, b.var, b.bound, env, budget)

    # -- vertex scans

    def _scan_vertex(self, node, i, var, env, budget):
        conjuncts = self._conjuncts(node.body)
        # vars bound by later binds of this count are not in scope yet, even
        # if an enclosing scan left a value for the same variable in env
        pending = {node.binds[j].var for j in range(i + 1, len(node.binds))}
        forced = None
        neighbor_of = None
        excluded = None
        label_req = None
        for f in conjuncts:
            tf = type(f)
            if tf is VarEq:
                if f.left == var and f.right != var:
                    other = f.right
                elif f.right == var and f.left != var:
                    other = f.left
                else:
                    continue
                if other not in pending and (other in env
                                             or other in self.a.individuals):
                    w = self._lookup(other, env)
                    forced = w if forced is None or forced == w else -1
            elif tf is Adj:
                if f.left == var and f.right != var:
                    other = f.right
                elif f.right == var and f.left != var:
                    other = f.left
                else:
                    continue
                if neighbor_of is None and other not in pending and (
                        other in env or other in self.a.individuals):
                    neighbor_of = other
            elif tf is Label and f.arg == var:
                if label_req is None:
                    label_req = []
                label_req.append(f.k)
            elif tf is Not:
                g = f.body
                if type(g) is VarEq:
                    if g.left == var and g.right != var:
                        other = g.right
                    elif g.right == var and g.left != var:
                        other = g.left
                    else:
                        continue
                    if other not in pending and (
                            other in env or other in self.a.individuals):
                        if excluded is None:
                            excluded = set()
                        excluded.add(self._lookup(other, env))
        if forced == -1:
            return 0, True
        if forced is not None:
            candidates = (forced,)
        elif neighbor_of is not None:
            candidates = self._neighbors[self._lookup(neighbor_of, env)]
        else:
            candidates = range(self.graph.n)
        total = 0
        saved = env.get(var, _ABSENT)
        for w in candidates:
            if excluded is not None and w in excluded:
                continue
            if label_req is not None and not all(
                self.graph.label_bit(w, k) for k in label_req
            ):
                continue
            self._iters += 1
            env[var] = w
            sub, sub_exact = self._scan(node, i + 1, env, None if budget is None
                                        else budget - total)
            total += sub
            if not sub_exact or (budget is not None and total >= budget):
                self._restore(env, var, saved)
                return total, False
        self._restore(env, var, saved)
        return total, True

    # -- number scans

    def _scan_number(self, node, i, var, bound, env, budget):
        B = self._eval(bound, env)
        if B <= 0:
            return 0, True
        binds = node.binds
        rest_uses = var in free_vars(node.body) or any(
            var in free_vars(binds[j].bound)
            for j in range(i + 1, len(binds))
            if isinstance(binds[j], NBind)
        )
        if not rest_uses:
            inner, _ = self._scan(node, i + 1, env, None)
            return B * inner, True

        conjuncts = self._conjuncts(node.body)
        # later binds of this count are not in scope during this scan; an
        # enclosing scan of the same variable must not supply their values
        pending = {binds[j].var for j in range(i + 1, len(binds))}
        lo, hi = 0, B - 1
        candidates = None
        for f in conjuncts:
            if not self._env_complete(f, var, env, pending):
                continue
            res = self._constrain(f, var, env, lo, hi)
            if res is None:
                continue
            kind, payload = res
            if kind == "empty":
                return 0, True
            if kind == "interval":
                nlo, nhi = payload
                lo = max(lo, nlo)
                hi = min(hi, nhi)
                if lo > hi:
                    return 0, True
            elif kind == "candidates":
                candidates = payload if candidates is None else [
                    c for c in candidates if c in payload
                ]

        last = i + 1 == len(binds)

        if candidates is not None:
            cand = [c for c in candidates if lo <= c <= hi]
            return self._scan_loop(node, i, var, cand, env, budget)

        # monotone body: locate the boundary instead of sweeping
        if last and hi - lo > _SWEEP_LIMIT:
            mono = self._monotonicity(node.body, var)
            if mono in (1, -1):
                return self._scan_mono_body(node, var, env, lo, hi, mono), True

        # closed single-variable count: prefix table
        if (last and budget is None and lo == 0 and hi == B - 1
                and B > _SWEEP_LIMIT
                and all(v == var for v in free_vars(node.body))):
            return self._scan_prefix(node, var, env, B), True

        return self._scan_loop(node, i, var, range(lo, hi + 1), env, budget)

    def _scan_loop(self, node, i, var, values, env, budget):
        n_values = len(values)
        reversed_scan = False
        if budget == 1 and n_values > 4 and self._dir_hint.get(node):
            if isinstance(values, range):
                values = range(values.stop - 1, values.start - 1, -1)
            else:
                values = values[::-1]
            reversed_scan = True
        total = 0
        pos = 0
        saved = env.get(var, _ABSENT)
        for w in values:
            pos += 1
            self._iters += 1
            env[var] = w
            sub, sub_exact = self._scan(node, i + 1, env,
                                        None if budget is None else budget - total)
            total += sub
            if not sub_exact or (budget is not None and total >= budget):
                self._restore(env, var, saved)
                if budget == 1:
                    # remember which end of the range held the witness
                    near_end = pos > n_values // 2
                    self._dir_hint[node] = near_end != reversed_scan
                return total, False
        self._restore(env, var, saved)
        return total, True

    def _scan_mono_body(self, node, var, env, lo, hi, mono):
        body = node.body
        saved = env.get(var, _ABSENT)

        def holds(w):
            env[var] = w
            r = self._eval(body, env)
            self._restore(env, var, saved)
            return r

        if mono == -1:
            # true on a prefix of the interval
            if holds(lo):
                if holds(hi):
                    return hi - lo + 1
                a, b = lo, hi
                while b - a > 1:
                    m = (a + b) // 2
                    if holds(m):
                        a = m
                    else:
                        b = m
                return a - lo + 1
            return 0
        # true on a suffix of the interval
        if holds(hi):
            if holds(lo):
                return hi - lo + 1
            a, b = lo, hi
            while b - a > 1:
                m = (a + b) // 2
                if holds(m):
                    b = m
                else:
                    a = m
            return hi - b + 1
        return 0

    def _scan_prefix(self, node, var, env, B):
        sums = self._prefix.get(node)
        if sums is None:
            sums = [0]
            self._prefix[node] = sums
        if len(sums) <= B:
            body = node.body
            total = sums[-1]
            saved = env.get(var, _ABSENT)
            for w in range(len(sums) - 1, B):
                env[var] = w
                if self._eval(body, env):
                    total += 1
                sums.append(total)
            self._restore(env, var, saved)
        return sums[B]

    # -- conjunct analysis

    def _env_complete(self, f, var, env, pending=()):
        for v in free_vars(f):
            if v == var:
                continue
            if v in pending:
                return False
            if v not in env and v not in self.a.individuals:
                return False
        return True

    def _constrain(self, f, var, env, lo, hi):
        """Constraint contributed by one conjunct, or None."""
        tf = type(f)
        if tf is Le:
            res = self._constrain_le(f.left, f.right, 0, var, env, lo, hi)
            if res is not None:
                return res
            return self._constrain_divisor(f, var, env)
        if tf is Not and type(f.body) is Le:
            # not (a <= b)  iff  b + 1 <= a
            return self._constrain_le(f.body.right, f.body.left, 1, var, env, lo, hi)
        return None

    def _constrain_le(self, t1, t2, shift, var, env, lo, hi):
        """Constraint from  t1 + shift <= t2."""
        in1 = var in free_vars(t1)
        in2 = var in free_vars(t2)
        if not in1 and not in2:
            return None
        l1 = self._linearize(t1, var, env) if in1 else (0, self._eval(t1, env))
        l2 = self._linearize(t2, var, env) if in2 else (0, self._eval(t2, env))
        if l1 is not None and l2 is not None:
            a1, c1 = l1
            a2, c2 = l2
            d = a1 - a2
            rhs = c2 - c1 - shift
            if d > 0:
                if rhs < 0:
                    return ("empty", None)
                return ("interval", (0, rhs // d))
            if d < 0:
                if rhs >= 0:
                    return None
                return ("interval", (_ceil_div(-rhs, -d), hi))
            return ("empty", None) if rhs < 0 else None
        # one side monotone in var, other side constant
        if l1 is None and not in2 and l2 is not None:
            mono = self._monotonicity_term(t1, var)
            if mono in (1, -1):
                limit = l2[1] - shift
                return self._narrow_mono(t1, var, env, lo, hi, mono, "le", limit)
        if l2 is None and not in1 and l1 is not None:
            mono = self._monotonicity_term(t2, var)
            if mono in (1, -1):
                limit = l1[1] + shift
                return self._narrow_mono(t2, var, env, lo, hi, mono, "ge", limit)
        return None

    def _narrow_mono(self, term, var, env, lo, hi, mono, rel, limit):
        """Narrow [lo, hi] using  term(var) <= limit  (rel='le') or
        term(var) >= limit (rel='ge'), with term monotone in var."""
        if lo > hi:
            return ("empty", None)
        if limit < 0:
            # term values are naturals
            return ("empty", None) if rel == "le" else None

        saved = env.get(var, _ABSENT)

        def val(w):
            env[var] = w
            r = self._eval(term, env)
            self._restore(env, var, saved)
            return r

        ok = (lambda v: v <= limit) if rel == "le" else (lambda v: v >= limit)
        increasing = (mono == 1)
        # increasing term <= limit holds on a prefix, >= limit on a suffix;
        # decreasing swaps the two.
        prefix = (increasing == (rel == "le"))
        if prefix:
            if ok(val(lo)):
                if ok(val(hi)):
                    return None
                a, b = lo, hi
                while b - a > 1:
                    m = (a + b) // 2
                    if ok(val(m)):
                        a = m
                    else:
                        b = m
                return ("interval", (0, a))
            return ("empty", None)
        if ok(val(hi)):
            if ok(val(lo)):
                return None
            a, b = lo, hi
            while b - a > 1:
                m = (a + b) // 2
                if ok(val(m)):
                    b = m
                else:
                    a = m
            return ("interval", (b, hi))
        return ("empty", None)

    def _constrain_divisor(self, f, var, env):
        """Detect  1 <= #(w < theta). (var * w == C)  among the conjuncts and
        restrict var to divisors of C.  The equality must appear as a pair of
        opposite comparisons between the product and a constant term."""
        if type(f) is not Le or type(f.left) is not Const or f.left.value != 1:
            return None
        cnt = f.right
        if type(cnt) is not Count or len(cnt.binds) != 1:
            return None
        bind = cnt.binds[0]
        if not isinstance(bind, NBind):
            return None
        w = bind.var
        inner = self._conjuncts(cnt.body)
        les = [g for g in inner if type(g) is Le]
        for g in les:
            if self._is_var_pair_product(g.left, var, w) and not (
                var in free_vars(g.right) or w in free_vars(g.right)
            ):
                prod, const = g.left, g.right
            elif self._is_var_pair_product(g.right, var, w) and not (
                var in free_vars(g.left) or w in free_vars(g.left)
            ):
                prod, const = g.right, g.left
            else:
                continue
            fwd = any(h.left == prod and h.right == const for h in les)
            rev = any(h.left == const and h.right == prod for h in les)
            if not (fwd and rev):
                continue
            C = self._eval(const, env)
            if C <= 0:
                return None
            return ("candidates", self._divisor_list(C))
        return None

    @staticmethod
    def _is_var_pair_product(t, a, b):
        return type(t) is Mul and (
            (t.left == a and t.right == b) or (t.left == b and t.right == a)
        )

    def _divisor_list(self, c: int):
        got = self._divisors.get(c)
        if got is None:
            got = _divisors_of(c)
            self._divisors[c] = got
        return got

    def _linearize(self, t, var, env):
        """Write t as a*var + c with a, c naturals, or None."""
        if var not in free_vars(t):
            return (0, self._eval(t, env))
        tt = type(t)
        if tt is NumVar:
            return (1, 0)
        if tt is Add:
            l = self._linearize(t.left, var, env)
            if l is None:
                return None
            r = self._linearize(t.right, var, env)
            if r is None:
                return None
            return (l[0] + r[0], l[1] + r[1])
        if tt is Mul:
            lf = var in free_vars(t.left)
            rf = var in free_vars(t.right)
            if lf and rf:
                return None
            if lf:
                k = self._eval(t.right, env)
                inner = self._linearize(t.left, var, env)
            else:
                k = self._eval(t.left, env)
                inner = self._linearize(t.right, var, env)
            if inner is None:
                return None
            return (inner[0] * k, inner[1] * k)
        return None

    # -- monotonicity analysis (structural, environment-free)

    def _monotonicity(self, f: Formula, var) -> int | None:
        """1: truth never falls as var grows; -1: never rises; 0: independent;
        None: unknown."""
        if var not in free_vars(f):
            return 0
        key = (f, var)
        got = self._mono.get(key)
        if got is not None:
            return got[0]
        res = self._mono_formula(f, var)
        self._mono[key] = (res,)
        return res

    def _mono_formula(self, f, var):
        tf = type(f)
        if tf is Le:
            m1 = self._monotonicity_term(f.left, var)
            m2 = self._monotonicity_term(f.right, var)
            if m1 is None or m2 is None:
                return None
            if m1 <= 0 and m2 >= 0:
                return 1 if (m1 < 0 or m2 > 0) else 0
            if m1 >= 0 and m2 <= 0:
                return -1 if (m1 > 0 or m2 < 0) else 0
            return None
        if tf is Not:
            m = self._monotonicity(f.body, var)
            return None if m is None else -m
        if tf is And:
            m1 = self._monotonicity(f.left, var)
            m2 = self._monotonicity(f.right, var)
            if m1 is None or m2 is None:
                return None
            if m1 >= 0 and m2 >= 0:
                return max(m1, m2)
            if m1 <= 0 and m2 <= 0:
                return min(m1, m2)
            return None
        return None

    def _monotonicity_term(self, t: Term, var) -> int | None:
        if var not in free_vars(t):
            return 0
        key = (t, var)
        got = self._mono.get(key)
        if got is not None:
            return got[0]
        res = self._mono_term(t, var)
        self._mono[key] = (res,)
        return res

    def _mono_term(self, t, var):
        tt = type(t)
        if tt is NumVar:
            return 1
        if tt is Add or tt is Mul:
            m1 = self._monotonicity_term(t.left, var)
            m2 = self._monotonicity_term(t.right, var)
            if m1 is None or m2 is None:
                return None
            if m1 >= 0 and m2 >= 0:
                return max(m1, m2)
            if m1 <= 0 and m2 <= 0:
                return min(m1, m2)
            return None
        if tt is Count:
            # larger ranges and a body that only gains witnesses
            ms = []
            for b in t.binds:
                if isinstance(b, NBind):
                    m = self._monotonicity_term(b.bound, var)
                    if m is None:
                        return None
                    ms.append(m)
            mb = self._monotonicity(t.body, var)
            if mb is None:
                return None
            ms.append(mb)
            if all(m >= 0 for m in ms):
                return 1 if any(m > 0 for m in ms) else 0
            if all(m <= 0 for m in ms):
                return -1 if any(m < 0 for m in ms) else 0
            return None
        return None


def _divisors_of(c: int):
    try:
        import numpy as np
    except ImportError:
        np = None
    r = math.isqrt(c)
    if np is not None and c > 4096:
        small = np.arange(1, r + 1, dtype=np.int64)
        mask = (c % small) == 0
        lows = small[mask].tolist()
    else:
        lows = [d for d in range(1, r + 1) if c % d == 0]
    out = set(lows)
    out.update(c // d for d in lows)
    return sorted(out)


def evaluate(node: Node, graph: LabelledGraph, assignment: Assignment | None = None,
             env: dict | None = None):
    """One-shot evaluation with a fresh session."""
    return EvalSession(graph, assignment).eval(node, env)


# --- worst-case value bounds ------------------------------------------------------


def term_bound(t: Term, order: int, var_bounds: dict | None = None) -> int:
    """An upper bound on the value of t over any graph of the given order,
    assuming each free number variable y satisfies y < var_bounds[y].
    Function applications are rejected: their range is not derivable."""
    vb = var_bounds or {}

    def tb(term):
        tt = type(term)
        if tt is Const:
            return term.value
        if tt is NumVar:
            if term not in vb:
                raise EvalError(f"no bound for free variable {term!r}")
            return max(vb[term] - 1, 0)
        if tt is Add:
            return tb(term.left) + tb(term.right)
        if tt is Mul:
            return tb(term.left) * tb(term.right)
        if tt is Count:
            total = 1
            saved = {}
            for b in term.binds:
                if isinstance(b, VBind):
                    total *= order
                else:
                    # a variable below theta ranges over at most tb(theta) values
                    bound_val = tb(b.bound)
                    total *= bound_val
                    saved[b.var] = vb.get(b.var)
                    vb[b.var] = bound_val
            for var, old in saved.items():
                if old is None:
                    vb.pop(var, None)
                else:
                    vb[var] = old
            return total
        if tt is FunApp:
            raise EvalError("cannot bound a function application")
        raise EvalError(f"cannot bound {type(term).__name__}")

    return tb(t)
