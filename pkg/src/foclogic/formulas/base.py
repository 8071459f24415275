"""Shared plumbing for the formula builders.

Three things live here: the fidelity levels, a substitution engine for
applying formula schemas (replace relation and function symbols by concrete
formulas and terms), and the pinning helpers ``hold_at`` / ``value_at`` that
let one builder use another builder's output at shifted arguments without
renaming any variables.

Variable discipline: every builder draws its internal number variables from
``fresh_num`` (indices 9000 and up), so caller-visible variables (small
indices) never collide with builder internals.  The pinning helpers also
handle the one remaining hazard, a pin whose replacement term mentions the
pinned variable itself, by routing through fresh intermediaries.
"""

from __future__ import annotations

import enum
import itertools
import threading

from ..syntax import (
    Add,
    And,
    Adj,
    Builtin,
    Const,
    Count,
    FunApp,
    Label,
    Le,
    Mul,
    NBind,
    Node,
    Not,
    NumVar,
    ONE,
    RelApp,
    Term,
    VBind,
    VOrd,
    VarEq,
    VertexVar,
    conj,
    free_num_vars,
    num_eq,
)


class FidelityLevel(enum.Enum):
    """How much a builder may lean on interpreted arithmetic symbols.

    PURE output contains no builtin oracles except those the caller already
    supplied in its own schema; SEMANTIC output may call the registered
    arithmetic builtins (BIT and the ``arith.*`` functions).
    """

    PURE = "pure"
    SEMANTIC = "semantic"


PURE = FidelityLevel.PURE
SEMANTIC = FidelityLevel.SEMANTIC

#: Default bit width cap for the pure bit/length/power machinery.  Formulas
#: built at width K are exact for numbers below 2**K.
DEFAULT_WIDTH = 18


_fresh_counter = itertools.count(9000)
_fresh_lock = threading.Lock()


def fresh_num() -> NumVar:
    """A number variable no caller-facing formula uses (index >= 9000)."""
    with _fresh_lock:
        return NumVar(next(_fresh_counter))


_cache: dict = {}
_cache_lock = threading.RLock()


def cached(kind: str, key, make):
    """Build-once cache for the public mk_* entry points."""
    full = (kind, key)
    with _cache_lock:
        got = _cache.get(full)
        if got is None:
            got = make()
            _cache[full] = got
        return got


# --- schema substitution -------------------------------------------------------


def substitute(node: Node, rel_map=None, fun_map=None, var_map=None) -> Node:
    """Apply a schema: replace relation/function symbols and free variables.

    ``rel_map`` maps a relation name to a callable taking the (already
    rewritten) argument tuple and returning a formula; ``fun_map`` does the
    same for function symbols, returning a term.  ``var_map`` maps variables
    to replacement nodes and must not mention any variable that is bound in
    ``node`` (asserted), so no capture analysis is needed.

    Rebuilding is identity-preserving: untouched subtrees come back as the
    same objects, and repeated applications of a symbol at equal arguments
    return the same replacement object, so shared structure stays shared.
    """
    rel_map = rel_map or {}
    fun_map = fun_map or {}
    var_map = var_map or {}
    memo: dict[int, Node] = {}
    app_cache: dict = {}

    def rebuild(n: Node) -> Node:
        got = memo.get(id(n))
        if got is not None:
            return got
        out = _rebuild(n)
        memo[id(n)] = out
        return out

    def apply_symbol(fn, name, args):
        key = (name, args)
        got = app_cache.get(key)
        if got is None:
            got = fn(args)
            app_cache[key] = got
        return got

    def _rebuild(n: Node) -> Node:
        t = type(n)
        if t is NumVar or t is VertexVar:
            return var_map.get(n, n)
        if t is Const:
            return n
        if t is Add or t is Mul or t is And:
            left = rebuild(n.left)
            right = rebuild(n.right)
            if left is n.left and right is n.right:
                return n
            return t(left, right)
        if t is Le or t is VarEq or t is Adj or t is VOrd:
            left = rebuild(n.left)
            right = rebuild(n.right)
            if left is n.left and right is n.right:
                return n
            return t(left, right)
        if t is Not:
            body = rebuild(n.body)
            return n if body is n.body else Not(body)
        if t is Label:
            arg = rebuild(n.arg)
            return n if arg is n.arg else Label(n.k, arg)
        if t is FunApp:
            args = tuple(rebuild(a) for a in n.args)
            fn = fun_map.get(n.name)
            if fn is not None:
                return apply_symbol(fn, n.name, args)
            if all(a is b for a, b in zip(args, n.args)):
                return n
            return FunApp(n.name, args)
        if t is RelApp:
            args = tuple(rebuild(a) for a in n.args)
            fn = rel_map.get(n.name)
            if fn is not None:
                return apply_symbol(fn, n.name, args)
            if all(a is b for a, b in zip(args, n.args)):
                return n
            return RelApp(n.name, args)
        if t is Builtin:
            args = tuple(rebuild(a) for a in n.args)
            if all(a is b for a, b in zip(args, n.args)):
                return n
            return Builtin(n.name, args)
        if t is Count:
            for b in n.binds:
                assert b.var not in var_map, (
                    "substitution would capture a bound variable"
                )
            binds = []
            changed = False
            for b in n.binds:
                if isinstance(b, NBind):
                    bound = rebuild(b.bound)
                    if bound is b.bound:
                        binds.append(b)
                    else:
                        binds.append(NBind(b.var, bound))
                        changed = True
                else:
                    binds.append(b)
            body = rebuild(n.body)
            if not changed and body is n.body:
                return n
            return Count(tuple(binds), body)
        raise TypeError(f"substitute: unhandled node {t.__name__}")

    return rebuild(node)


# --- pinning helpers -----------------------------------------------------------


def _pin_binds(pins):
    """Bind each pinned variable just above its target and equate them."""
    binds = []
    eqs = []
    for var, term in pins:
        binds.append(NBind(var, Add(term, ONE)))
        eqs.append(num_eq(var, term))
    return binds, eqs


def _needs_indirection(pins) -> bool:
    pinned = frozenset(var for var, _ in pins)
    for _, term in pins:
        if free_num_vars(term) & pinned:
            return True
    return False


def hold_at(formula, pins) -> Node:
    """Assert that ``formula`` holds with each pinned variable set to a term.

    ``pins`` is a sequence of (variable, term) pairs; every term is read in
    the caller's environment.  When a term mentions one of the pinned
    variables (rebinding a variable to a function of itself), the values are
    staged through fresh intermediaries so nothing is read after shadowing.
    """
    pins = list(pins)
    if not pins:
        return formula
    if _needs_indirection(pins):
        staging = [(fresh_num(), term) for _, term in pins]
        inner = hold_at(formula, [(var, f) for (var, _), (f, _) in zip(pins, staging)])
        return hold_at(inner, staging)
    binds, eqs = _pin_binds(pins)
    return Le(ONE, Count(tuple(binds), conj(*eqs, formula)))


def value_at(term, pins) -> Term:
    """The value of ``term`` with each pinned variable set to a term.

    Same contract as ``hold_at`` but for terms: the result is a counting term
    equal to ``term`` evaluated under the pins (pin terms read in the
    caller's environment).
    """
    pins = list(pins)
    if not pins:
        return term
    if _needs_indirection(pins):
        staging = [(fresh_num(), t) for _, t in pins]
        inner = value_at(term, [(var, f) for (var, _), (f, _) in zip(pins, staging)])
        return value_at(inner, staging)
    binds, eqs = _pin_binds(pins)
    h = fresh_num()
    return Count(tuple(binds) + (NBind(h, term),), conj(*eqs))


def indicator(formula) -> Term:
    """A term that is 1 when the formula holds and 0 otherwise."""
    h = fresh_num()
    return Count((NBind(h, ONE),), formula)
