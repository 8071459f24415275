"""Abstract syntax for two-sorted first-order logic with counting.

Terms denote natural numbers; formulas denote truth values.  Vertex
variables (x1, x2, ...) range over graph vertices, number variables
(y0, y1, ...) over naturals.  Counting terms bind a mixed prefix of vertex
variables and bounded number variables; a number bound may mention the
variables bound before it.

Nodes are immutable and structurally hashable, with hashes cached at
construction.  Compound constructions share subtrees freely (the in-memory
form is a DAG); the evaluator memoizes by node identity-or-equality, so
sharing is what keeps composed formulas tractable.

The concrete syntax is s-expressions; see `parse` and `emit`.  Sugar
(or/imp/exists/forall/existsn, truncated subtraction, min, max, div, ord,
decimal numerals, true/false) is expanded at parse time; `ord` is
re-recognised by the printer so round-trips are stable.
"""

from __future__ import annotations

import re

# --- node classes -------------------------------------------------------------


class Node:
    __slots__ = ("_hash", "_freev")
    _fields: tuple[str, ...] = ()

    def _init_cache(self):
        self._hash = None
        self._freev = None

    def children(self):
        for f in self._fields:
            v = getattr(self, f)
            if isinstance(v, Node):
                yield v
            elif isinstance(v, tuple):
                for item in v:
                    if isinstance(item, Node):
                        yield item
                    elif isinstance(item, tuple):
                        for sub in item:
                            if isinstance(sub, Node):
                                yield sub

    def _key(self):
        out = [type(self).__name__]
        for f in self._fields:
            out.append(getattr(self, f))
        return tuple(out)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self._key())
            self._hash = h
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        if hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __repr__(self):
        return emit(self)


class Term(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()


class Const(Term):
    __slots__ = ("value",)
    _fields = ("value",)

    def __init__(self, value: int):
        if value not in (0, 1):
            raise ValueError("only the constants 0 and 1 exist; use numerals")
        self.value = value
        self._init_cache()


class NumVar(Term):
    __slots__ = ("index",)
    _fields = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._init_cache()


class VertexVar(Node):
    """Vertex variables are not terms: they only appear in atoms, bindings,
    and argument positions."""

    __slots__ = ("index",)
    _fields = ("index",)

    def __init__(self, index: int):
        self.index = index
        self._init_cache()


def _require(cond: bool, msg: str):
    if not cond:
        raise TypeError(msg)


class Add(Term):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Term, right: Term):
        _require(isinstance(left, Term) and isinstance(right, Term), "+ needs terms")
        self.left = left
        self.right = right
        self._init_cache()


class Mul(Term):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Term, right: Term):
        _require(isinstance(left, Term) and isinstance(right, Term), "* needs terms")
        self.left = left
        self.right = right
        self._init_cache()


class FunApp(Term):
    __slots__ = ("name", "args")
    _fields = ("name", "args")

    def __init__(self, name: str, args=()):
        args = tuple(args)
        _require(
            all(isinstance(a, (Term, VertexVar)) for a in args),
            "function arguments must be terms or vertex variables",
        )
        self.name = name
        self.args = args
        self._init_cache()


class VBind(Node):
    __slots__ = ("var",)
    _fields = ("var",)

    def __init__(self, var: VertexVar):
        _require(isinstance(var, VertexVar), "vertex binding needs a vertex variable")
        self.var = var
        self._init_cache()


class NBind(Node):
    __slots__ = ("var", "bound")
    _fields = ("var", "bound")

    def __init__(self, var: NumVar, bound: Term):
        _require(isinstance(var, NumVar), "number binding needs a number variable")
        _require(isinstance(bound, Term), "number binding needs a term bound")
        self.var = var
        self.bound = bound
        self._init_cache()


class Count(Term):
    __slots__ = ("binds", "body")
    _fields = ("binds", "body")

    def __init__(self, binds, body: Formula):
        binds = tuple(binds)
        _require(len(binds) >= 1, "counting term needs at least one binding")
        _require(
            all(isinstance(b, (VBind, NBind)) for b in binds), "bad binding list"
        )
        _require(isinstance(body, Formula), "counting term body must be a formula")
        seen = set()
        for b in binds:
            if b.var in seen:
                raise TypeError("repeated bound variable in counting term")
            seen.add(b.var)
        self.binds = binds
        self.body = body
        self._init_cache()


class Le(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Term, right: Term):
        _require(isinstance(left, Term) and isinstance(right, Term), "le needs terms")
        self.left = left
        self.right = right
        self._init_cache()


class VarEq(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: VertexVar, right: VertexVar):
        _require(
            isinstance(left, VertexVar) and isinstance(right, VertexVar),
            "= compares vertex variables",
        )
        self.left = left
        self.right = right
        self._init_cache()


class Adj(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: VertexVar, right: VertexVar):
        _require(
            isinstance(left, VertexVar) and isinstance(right, VertexVar),
            "E needs vertex variables",
        )
        self.left = left
        self.right = right
        self._init_cache()


class VOrd(Formula):
    """Built-in linear order on vertices (the `vle` atom)."""

    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: VertexVar, right: VertexVar):
        _require(
            isinstance(left, VertexVar) and isinstance(right, VertexVar),
            "vle needs vertex variables",
        )
        self.left = left
        self.right = right
        self._init_cache()


class Label(Formula):
    __slots__ = ("k", "arg")
    _fields = ("k", "arg")

    def __init__(self, k: int, arg: VertexVar):
        _require(isinstance(arg, VertexVar), "label atoms take a vertex variable")
        self.k = k
        self.arg = arg
        self._init_cache()


class RelApp(Formula):
    __slots__ = ("name", "args")
    _fields = ("name", "args")

    def __init__(self, name: str, args=()):
        args = tuple(args)
        _require(
            all(isinstance(a, (Term, VertexVar)) for a in args),
            "relation arguments must be terms or vertex variables",
        )
        self.name = name
        self.args = args
        self._init_cache()


class Builtin(Formula):
    __slots__ = ("name", "args")
    _fields = ("name", "args")

    def __init__(self, name: str, args=()):
        args = tuple(args)
        _require(all(isinstance(a, Term) for a in args), "builtin arguments are terms")
        self.name = name
        self.args = args
        self._init_cache()


class Not(Formula):
    __slots__ = ("body",)
    _fields = ("body",)

    def __init__(self, body: Formula):
        _require(isinstance(body, Formula), "not needs a formula")
        self.body = body
        self._init_cache()


class And(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        _require(
            isinstance(left, Formula) and isinstance(right, Formula),
            "and needs formulas",
        )
        self.left = left
        self.right = right
        self._init_cache()


ZERO = Const(0)
ONE = Const(1)
TRUE = Le(ZERO, ZERO)
FALSE = Le(ONE, ZERO)


# --- free variables -----------------------------------------------------------


def free_vars(node: Node) -> frozenset:
    """Free vertex and number variables.  For counting terms, a bound's free
    variables count except for variables bound earlier in the same prefix."""
    cached = node._freev
    if cached is not None:
        return cached
    if isinstance(node, (NumVar, VertexVar)):
        out = frozenset((node,))
    elif isinstance(node, Count):
        bound = set()
        out = set()
        for b in node.binds:
            if isinstance(b, NBind):
                out |= free_vars(b.bound) - bound
            bound.add(b.var)
        out |= free_vars(node.body) - bound
        out = frozenset(out)
    else:
        out = frozenset()
        for child in node.children():
            out |= free_vars(child)
    node._freev = out
    return out


def free_num_vars(node: Node) -> frozenset:
    return frozenset(v for v in free_vars(node) if isinstance(v, NumVar))


def free_vertex_vars(node: Node) -> frozenset:
    return frozenset(v for v in free_vars(node) if isinstance(v, VertexVar))


def all_vars(node: Node, acc=None, seen=None) -> set:
    """Every variable occurring anywhere (free or bound)."""
    if acc is None:
        acc = set()
        seen = set()
    if id(node) in seen:
        return acc
    seen.add(id(node))
    if isinstance(node, (NumVar, VertexVar)):
        acc.add(node)
    for child in node.children():
        all_vars(child, acc, seen)
    return acc


def fresh_numvars(*exprs, start_above: int = -1):
    """Generator of number variables unused anywhere in the given expressions."""
    top = start_above
    for e in exprs:
        if e is None:
            continue
        for v in all_vars(e):
            if isinstance(v, NumVar) and v.index > top:
                top = v.index
    i = top

    def gen():
        nonlocal i
        while True:
            i += 1
            yield NumVar(i)

    return gen()


# --- convenience constructors --------------------------------------------------


def conj(*fs: Formula) -> Formula:
    fs = [f for f in fs if f is not TRUE]
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    return Not(conj(*(Not(f) for f in fs)))


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def lt(a: Term, b: Term) -> Formula:
    return Le(Add(a, ONE), b)


def num_eq(a: Term, b: Term) -> Formula:
    return And(Le(a, b), Le(b, a))


def numeral(n: int) -> Term:
    """Closed term for n, built by binary Horner steps over 0 and 1."""
    if n < 0:
        raise ValueError("numerals are nonnegative")
    if n <= 1:
        return Const(n)
    two = Add(ONE, ONE)
    bits = bin(n)[2:]
    acc: Term = ONE
    for b in bits[1:]:
        acc = Mul(acc, two)
        if b == "1":
            acc = Add(acc, ONE)
    return acc


def exists_vertex(var: VertexVar, body: Formula) -> Formula:
    return Le(ONE, Count((VBind(var),), body))


def forall_vertex(var: VertexVar, body: Formula) -> Formula:
    return Not(exists_vertex(var, Not(body)))


def exists_bounded(var: NumVar, bound: Term, body: Formula) -> Formula:
    return Le(ONE, Count((NBind(var, bound),), body))


def forall_bounded(var: NumVar, bound: Term, body: Formula) -> Formula:
    return Not(exists_bounded(var, bound, Not(body)))


def ord_term(var_index: int = 1) -> Term:
    """The graph-order constant: the count of vertices equal to themselves."""
    x = VertexVar(var_index)
    return Count((VBind(x),), VarEq(x, x))


def is_order_term(node: Node) -> bool:
    return (
        isinstance(node, Count)
        and len(node.binds) == 1
        and isinstance(node.binds[0], VBind)
        and isinstance(node.body, VarEq)
        and node.body.left == node.binds[0].var
        and node.body.right == node.binds[0].var
    )


def truncated_sub(a: Term, b: Term, fresh: NumVar) -> Term:
    # counts z < a with b <= z
    return Count((NBind(fresh, a),), Le(b, fresh))


def min_term(a: Term, b: Term, fresh: NumVar) -> Term:
    return Count((NBind(fresh, a),), lt(fresh, b))


def max_term(a: Term, b: Term, fresh: NumVar) -> Term:
    return Count((NBind(fresh, Add(a, b)),), disj(lt(fresh, a), lt(fresh, b)))


def div_term(a: Term, b: Term, fresh: NumVar) -> Term:
    # counts z <= a with b*z < a
    return Count((NBind(fresh, Add(a, ONE)),), lt(Mul(b, fresh), a))


# --- s-expression reader --------------------------------------------------------


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int | None = None):
        super().__init__(msg if pos is None else f"{msg} (at offset {pos})")
        self.pos = pos


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text: str):
    out = []
    for m in _TOKEN.finditer(text):
        out.append((m.group(0), m.start()))
    return out


def _read_sexpr(tokens, i):
    if i >= len(tokens):
        raise ParseError("unexpected end of input")
    tok, pos = tokens[i]
    if tok == "(":
        items = []
        i += 1
        while True:
            if i >= len(tokens):
                raise ParseError("unclosed parenthesis", pos)
            if tokens[i][0] == ")":
                return (items, pos), i + 1
            item, i = _read_sexpr(tokens, i)
            items.append(item)
    if tok == ")":
        raise ParseError("unmatched )", pos)
    return (tok, pos), i + 1


_VERTEX_RE = re.compile(r"x(\d+)$")
_NUM_RE = re.compile(r"y(\d+)$")
_LABEL_RE = re.compile(r"P(\d+)$")
_NUMERAL_RE = re.compile(r"\d+$")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        tokens = _tokenize(text)
        sexprs = []
        i = 0
        while i < len(tokens):
            sx, i = _read_sexpr(tokens, i)
            sexprs.append(sx)
        if len(sexprs) != 1:
            raise ParseError("expected exactly one expression")
        self.root = sexprs[0]
        used = [0]

        def scan(sx):
            val = sx[0]
            if isinstance(val, list):
                for item in val:
                    scan(item)
            else:
                m = _NUM_RE.match(val)
                if m:
                    used[0] = max(used[0], int(m.group(1)) + 1)

        scan(self.root)
        self._next_fresh = used[0]

    def fresh(self) -> NumVar:
        v = NumVar(self._next_fresh)
        self._next_fresh += 1
        return v

    # -- helpers

    def _vertex(self, sx) -> VertexVar:
        val, pos = sx
        if isinstance(val, str):
            m = _VERTEX_RE.match(val)
            if m:
                return VertexVar(int(m.group(1)))
        raise ParseError("expected a vertex variable xK", pos)

    def term(self, sx) -> Term:
        val, pos = sx
        if isinstance(val, str):
            if val == "0":
                return ZERO
            if val == "1":
                return ONE
            if val == "ord":
                return ord_term()
            m = _NUM_RE.match(val)
            if m:
                return NumVar(int(m.group(1)))
            if _NUMERAL_RE.match(val):
                return numeral(int(val))
            if _VERTEX_RE.match(val):
                raise ParseError(f"vertex variable {val} used as a term", pos)
            raise ParseError(f"unknown term {val!r}", pos)
        if not val:
            raise ParseError("empty term", pos)
        head, hpos = val[0]
        if isinstance(head, list):
            raise ParseError("operator must be an atom", hpos)
        if head == "+":
            self._arity(val, 2, pos)
            return Add(self.term(val[1]), self.term(val[2]))
        if head == "*":
            self._arity(val, 2, pos)
            return Mul(self.term(val[1]), self.term(val[2]))
        if head == "U":
            if len(val) < 2 or isinstance(val[1][0], list):
                raise ParseError("(U name arg...) needs a name", pos)
            return FunApp(val[1][0], tuple(self._arg(a) for a in val[2:]))
        if head == "count":
            self._arity(val, 2, pos)
            binds = self._binds(val[1])
            return Count(binds, self.formula(val[2]))
        if head == "sub":
            self._arity(val, 2, pos)
            return truncated_sub(self.term(val[1]), self.term(val[2]), self.fresh())
        if head == "min":
            self._arity(val, 2, pos)
            return min_term(self.term(val[1]), self.term(val[2]), self.fresh())
        if head == "max":
            self._arity(val, 2, pos)
            return max_term(self.term(val[1]), self.term(val[2]), self.fresh())
        if head == "div":
            self._arity(val, 2, pos)
            return div_term(self.term(val[1]), self.term(val[2]), self.fresh())
        raise ParseError(f"unknown term operator {head!r}", pos)

    def _arg(self, sx):
        val, _ = sx
        if isinstance(val, str) and _VERTEX_RE.match(val):
            return self._vertex(sx)
        return self.term(sx)

    def _arity(self, val, n, pos):
        if len(val) != n + 1:
            raise ParseError(f"{val[0][0]} takes {n} arguments", pos)

    def _binds(self, sx):
        val, pos = sx
        if not isinstance(val, list):
            raise ParseError("expected a binding list", pos)
        binds = []
        for item in val:
            iv, ipos = item
            if not isinstance(iv, list) or not iv:
                raise ParseError("bad binding", ipos)
            kind = iv[0][0]
            if kind == "x":
                if len(iv) != 2:
                    raise ParseError("vertex binding is (x xK)", ipos)
                binds.append(VBind(self._vertex(iv[1])))
            elif kind == "y":
                if len(iv) != 3:
                    raise ParseError("number binding is (y yK t)", ipos)
                nv, npos = iv[1]
                m = _NUM_RE.match(nv) if isinstance(nv, str) else None
                if not m:
                    raise ParseError("expected a number variable yK", npos)
                binds.append(NBind(NumVar(int(m.group(1))), self.term(iv[2])))
            else:
                raise ParseError("binding must start with x or y", ipos)
        return tuple(binds)

    def formula(self, sx) -> Formula:
        val, pos = sx
        if isinstance(val, str):
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            raise ParseError(f"unknown formula {val!r}", pos)
        if not val:
            raise ParseError("empty formula", pos)
        head, hpos = val[0]
        if isinstance(head, list):
            raise ParseError("operator must be an atom", hpos)
        if head == "le":
            self._arity(val, 2, pos)
            return Le(self.term(val[1]), self.term(val[2]))
        if head == "=":
            self._arity(val, 2, pos)
            return VarEq(self._vertex(val[1]), self._vertex(val[2]))
        if head == "E":
            self._arity(val, 2, pos)
            return Adj(self._vertex(val[1]), self._vertex(val[2]))
        if head == "vle":
            self._arity(val, 2, pos)
            return VOrd(self._vertex(val[1]), self._vertex(val[2]))
        m = _LABEL_RE.match(head)
        if m:
            self._arity(val, 1, pos)
            return Label(int(m.group(1)), self._vertex(val[1]))
        if head == "X":
            if len(val) < 2 or isinstance(val[1][0], list):
                raise ParseError("(X name arg...) needs a name", pos)
            return RelApp(val[1][0], tuple(self._arg(a) for a in val[2:]))
        if head == "N":
            if len(val) < 2 or isinstance(val[1][0], list):
                raise ParseError("(N name t...) needs a name", pos)
            return Builtin(val[1][0], tuple(self.term(a) for a in val[2:]))
        if head == "not":
            self._arity(val, 1, pos)
            return Not(self.formula(val[1]))
        if head == "and":
            if len(val) < 3:
                raise ParseError("and takes at least 2 arguments", pos)
            out = self.formula(val[1])
            for item in val[2:]:
                out = And(out, self.formula(item))
            return out
        if head == "or":
            if len(val) < 3:
                raise ParseError("or takes at least 2 arguments", pos)
            return disj(*(self.formula(item) for item in val[1:]))
        if head == "imp":
            self._arity(val, 2, pos)
            return implies(self.formula(val[1]), self.formula(val[2]))
        if head == "exists":
            self._arity(val, 2, pos)
            return self._quantifier(val[1], val[2], pos, exists=True)
        if head == "forall":
            self._arity(val, 2, pos)
            return self._quantifier(val[1], val[2], pos, exists=False)
        if head == "existsn":
            self._arity(val, 2, pos)
            return self._bounded_quantifier(val[1], val[2], pos, exists=True)
        if head == "foralln":
            self._arity(val, 2, pos)
            return self._bounded_quantifier(val[1], val[2], pos, exists=False)
        raise ParseError(f"unknown formula operator {head!r}", pos)

    def _quantifier(self, bind_sx, body_sx, pos, exists: bool):
        bv, bpos = bind_sx
        if not isinstance(bv, list) or len(bv) != 2 or bv[0][0] != "x":
            raise ParseError("vertex quantifier binding is (x xK)", bpos)
        var = self._vertex(bv[1])
        body = self.formula(body_sx)
        return exists_vertex(var, body) if exists else forall_vertex(var, body)

    def _bounded_quantifier(self, bind_sx, body_sx, pos, exists: bool):
        bv, bpos = bind_sx
        if not isinstance(bv, list) or len(bv) != 3 or bv[0][0] != "y":
            raise ParseError("number quantifier binding is (y yK t)", bpos)
        nv, npos = bv[1]
        m = _NUM_RE.match(nv) if isinstance(nv, str) else None
        if not m:
            raise ParseError("expected a number variable yK", npos)
        var = NumVar(int(m.group(1)))
        bound = self.term(bv[2])
        body = self.formula(body_sx)
        if exists:
            return exists_bounded(var, bound, body)
        return forall_bounded(var, bound, body)


def parse(text: str) -> Node:
    """Parse a single term or formula.  Tries the formula reading first for
    parenthesised input whose head is a formula operator."""
    p = _Parser(text)
    val, _ = p.root
    if isinstance(val, str):
        if val in ("true", "false"):
            return p.formula(p.root)
        return p.term(p.root)
    head = val[0][0] if val else None
    formula_heads = {
        "le", "=", "E", "vle", "X", "N", "not", "and", "or", "imp",
        "exists", "forall", "existsn", "foralln",
    }
    if head in formula_heads or (isinstance(head, str) and _LABEL_RE.match(head)):
        return p.formula(p.root)
    return p.term(p.root)


def parse_formula(text: str) -> Formula:
    node = parse(text)
    if not isinstance(node, Formula):
        raise ParseError("expected a formula")
    return node


def parse_term(text: str) -> Term:
    node = parse(text)
    if not isinstance(node, Term):
        raise ParseError("expected a term")
    return node


# --- printer -------------------------------------------------------------------


def emit(node: Node) -> str:
    out: list[str] = []
    _emit(node, out)
    return "".join(out)


def _emit(node: Node, out: list[str]):
    if isinstance(node, Const):
        out.append(str(node.value))
    elif isinstance(node, NumVar):
        out.append(f"y{node.index}")
    elif isinstance(node, VertexVar):
        out.append(f"x{node.index}")
    elif isinstance(node, Count):
        if is_order_term(node):
            out.append("ord")
            return
        out.append("(count (")
        for i, b in enumerate(node.binds):
            if i:
                out.append(" ")
            if isinstance(b, VBind):
                out.append(f"(x x{b.var.index})")
            else:
                out.append(f"(y y{b.var.index} ")
                _emit(b.bound, out)
                out.append(")")
        out.append(") ")
        _emit(node.body, out)
        out.append(")")
    elif isinstance(node, Add):
        out.append("(+ ")
        _emit(node.left, out)
        out.append(" ")
        _emit(node.right, out)
        out.append(")")
    elif isinstance(node, Mul):
        out.append("(* ")
        _emit(node.left, out)
        out.append(" ")
        _emit(node.right, out)
        out.append(")")
    elif isinstance(node, FunApp):
        out.append(f"(U {node.name}")
        for a in node.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(node, Le):
        out.append("(le ")
        _emit(node.left, out)
        out.append(" ")
        _emit(node.right, out)
        out.append(")")
    elif isinstance(node, VarEq):
        out.append(f"(= x{node.left.index} x{node.right.index})")
    elif isinstance(node, Adj):
        out.append(f"(E x{node.left.index} x{node.right.index})")
    elif isinstance(node, VOrd):
        out.append(f"(vle x{node.left.index} x{node.right.index})")
    elif isinstance(node, Label):
        out.append(f"(P{node.k} x{node.arg.index})")
    elif isinstance(node, RelApp):
        out.append(f"(X {node.name}")
        for a in node.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(node, Builtin):
        out.append(f"(N {node.name}")
        for a in node.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(node, Not):
        out.append("(not ")
        _emit(node.body, out)
        out.append(")")
    elif isinstance(node, And):
        out.append("(and ")
        _emit(node.left, out)
        out.append(" ")
        _emit(node.right, out)
        out.append(")")
    else:
        raise TypeError(f"cannot print {type(node).__name__}")


# --- signature consistency -------------------------------------------------------


def _arg_sort(a) -> str:
    return "v" if isinstance(a, VertexVar) else "n"


def check_signatures(node: Node) -> dict:
    """Infer (kind, argument sorts) for every relation/function/builtin name
    and fail on inconsistent use.  Returns {name: (kind, sorts)}."""
    sigs: dict[str, tuple[str, tuple[str, ...]]] = {}
    seen: set[int] = set()

    def visit(e: Node):
        if id(e) in seen:
            return
        seen.add(id(e))
        if isinstance(e, (FunApp, RelApp, Builtin)):
            kind = {FunApp: "fun", RelApp: "rel", Builtin: "builtin"}[type(e)]
            sorts = tuple(_arg_sort(a) for a in e.args)
            prev = sigs.get(e.name)
            if prev is not None and prev != (kind, sorts):
                raise TypeError(
                    f"{e.name!r} used both as {prev} and as {(kind, sorts)}"
                )
            sigs[e.name] = (kind, sorts)
        for c in e.children():
            visit(c)

    visit(node)
    return sigs
