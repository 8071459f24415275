"""Classification of expressions into the counting-logic sublanguages.

Four nested properties of an expression are recognised:

- two-variable: at most two distinct vertex variables occur (free or bound);
- decomposable: additionally, no relation or function variables occur, and
  no comparison atom (or builtin atom over terms) has two free vertex
  variables, so term-level atoms never join both vertex variables;
- guarded: vertex counting only ranges over neighbours of the other vertex
  variable, expressed by an edge or vertex-order guard conjunct, per the
  grammar checked by `_guarded` below;
- guarded with global counting: additionally allows unguarded vertex counts
  whose body does not mention the other vertex variable.

Guarded expressions use exactly the vertex variables x1 and x2.  The closed
order term (count of vertices equal to themselves) is accepted as the guarded
languages' built-in order constant.  Names containing a dot (``arith.add``)
are interpreted oracle symbols, not variables, so they do not spoil
decomposability; undotted relation and function applications are variables
and do.

`is_arithmetical` checks the stronger property of mentioning no vertex
variable at all (not even bound); such expressions have graph-independent
values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import (
    Add,
    Adj,
    And,
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
    RelApp,
    VarEq,
    VBind,
    VertexVar,
    VOrd,
    free_vertex_vars,
    is_order_term,
)

FLAG_ORDER = ("in_FOC2", "decomposable", "in_GFOC", "in_GCgc")


@dataclass(frozen=True)
class FragmentReport:
    """Outcome of `classify_fragment`.

    The flags are nested: in_gfoc implies in_gcgc implies in_foc2.
    `witnesses` maps the label of each failed flag to an offending
    subexpression (the innermost one the checker saw).
    """

    in_foc2: bool
    decomposable: bool
    in_gfoc: bool
    in_gcgc: bool
    witnesses: dict = field(default_factory=dict)

    @property
    def witness(self):
        for name in FLAG_ORDER:
            if name in self.witnesses:
                return self.witnesses[name]
        return None

    def flag(self, label: str) -> bool:
        return {
            "in_FOC2": self.in_foc2,
            "decomposable": self.decomposable,
            "in_GFOC": self.in_gfoc,
            "in_GCgc": self.in_gcgc,
        }[label]


def walk(e: Node):
    """Preorder over the expression DAG, visiting each node object once."""
    seen = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if id(n) in seen:
            continue
        seen.add(id(n))
        yield n
        stack.extend(reversed(list(n.children())))


def is_arithmetical(e: Node) -> bool:
    """True when the expression mentions no vertex variable anywhere."""
    return not any(isinstance(n, VertexVar) for n in walk(e))


def is_interpreted_name(name: str) -> bool:
    """Dotted names are oracle symbols with a fixed meaning, not variables."""
    return "." in name


def _two_variable(e: Node):
    seen = {}
    for n in walk(e):
        if isinstance(n, VertexVar) and n.index not in seen:
            seen[n.index] = n
            if len(seen) > 2:
                return False, n
    return True, None


def _decomposable_body(e: Node):
    """No relation/function variables; term atoms keep one vertex variable
    free at most.  Returns an offending node or None."""
    for n in walk(e):
        t = type(n)
        if t in (RelApp, FunApp) and not is_interpreted_name(n.name):
            return n
        if t in (Le, Builtin):
            if len(free_vertex_vars(n)) > 1:
                return n
    return None


def _is_guard(f: Node, a: VertexVar, b: VertexVar) -> bool:
    if type(f) not in (Adj, VOrd):
        return False
    return {f.left, f.right} == {a, b}


def _conjunct_list(body: Node):
    out = []
    stack = [body]
    while stack:
        f = stack.pop()
        if type(f) is And:
            stack.append(f.right)
            stack.append(f.left)
        else:
            out.append(f)
    return out


def _guarded(e: Node, allow_global: bool):
    """Grammar check for the guarded languages.  Returns (ok, witness)."""
    memo = {}

    def chk(n):
        if id(n) in memo:
            return memo[id(n)]
        memo[id(n)] = w = _chk(n)
        return w

    def chk_args(args):
        for a in args:
            if isinstance(a, VertexVar):
                if a.index not in (1, 2):
                    return a
            else:
                w = chk(a)
                if w is not None:
                    return w
        return None

    def _chk(n):
        t = type(n)
        if t is Const or t is NumVar:
            return None
        if t is Add or t is Mul or t is Le or t is And:
            return chk(n.left) or chk(n.right)
        if t is Not:
            return chk(n.body)
        if t is FunApp or t is RelApp:
            return chk_args(n.args)
        if t is Builtin:
            return chk_args(n.args)
        if t in (VarEq, Adj, VOrd):
            if n.left.index not in (1, 2) or n.right.index not in (1, 2):
                return n
            return None
        if t is Label:
            return None if n.arg.index in (1, 2) else n
        if t is Count:
            if is_order_term(n):
                return None
            vbinds = [b for b in n.binds if isinstance(b, VBind)]
            if not vbinds:
                for b in n.binds:
                    w = chk(b.bound)
                    if w is not None:
                        return w
                return chk(n.body)
            if len(vbinds) > 1 or not isinstance(n.binds[0], VBind):
                return n
            xb = n.binds[0].var
            if xb.index not in (1, 2):
                return xb
            xo = VertexVar(3 - xb.index)
            for b in n.binds[1:]:
                w = chk(b.bound)
                if w is not None:
                    return w
            has_guard = any(
                _is_guard(c, xb, xo) for c in _conjunct_list(n.body)
            )
            if not has_guard:
                if not allow_global:
                    return n
                if xo in free_vertex_vars(n.body):
                    return n
            return chk(n.body)
        return n

    w = chk(e)
    return w is None, w


def classify_fragment(e: Node) -> FragmentReport:
    """Structural classification of an expression (term or formula)."""
    witnesses = {}
    two, w2 = _two_variable(e)
    if not two:
        witnesses["in_FOC2"] = w2

    if two:
        wd = _decomposable_body(e)
        decomposable = wd is None
        if wd is not None:
            witnesses["decomposable"] = wd
    else:
        decomposable = False
        witnesses["decomposable"] = w2

    gf, wg = _guarded(e, allow_global=False)
    if not gf:
        witnesses["in_GFOC"] = wg
    gc, wc = _guarded(e, allow_global=True)
    if not gc:
        witnesses["in_GCgc"] = wc

    return FragmentReport(
        in_foc2=two,
        decomposable=decomposable,
        in_gfoc=gf,
        in_gcgc=gc,
        witnesses=witnesses,
    )
