"""Parser and printer for the FOF subset used by rule catalogs and problems.

The accepted shape is a universally quantified Horn formula over the fixed
geometric predicates:

    unit    := "fof(" name "," role "," formula ")."
    formula := ["("] ["![" vars "]" ":"] body [")"]
    body    := conj ["=>" conj]
    conj    := ["("] lit ("&" lit)* [")"]
    lit     := ["~"] atom

plus ``include('path').`` directives and ``%`` line comments. Variables are
uppercase-initial, point constants lowercase-initial. Negated literals are
legal only on the premise side and denote non-degeneracy provisos. Nothing
beyond this shape (equality, existentials, nested connectives) is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ARITY

ROLES = ("axiom", "conjecture")


class FofError(ValueError):
    """Syntax or well-formedness error, with source position when known."""

    def __init__(self, message: str, origin: str | None = None, line: int = 0, col: int = 0):
        self.origin = origin
        self.line = line
        self.col = col
        where = f"{origin or '<input>'}:{line}:{col}: " if line else f"{origin or '<input>'}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class Term:
    """Variable reference or point constant inside an atom."""

    name: str

    @property
    def is_var(self) -> bool:
        return self.name[0].isupper()


@dataclass(frozen=True, eq=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    def __post_init__(self):
        # atoms are dictionary keys in the match loops; cache the hash
        object.__setattr__(self, "_hash", hash((self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(t.name for t in self.args)})"


@dataclass(frozen=True)
class QuantifiedHorn:
    variables: tuple[str, ...]
    premises: tuple[Atom, ...]
    ndg_premises: tuple[Atom, ...]
    conclusions: tuple[Atom, ...]


@dataclass(frozen=True)
class SourceUnit:
    name: str
    role: str
    formula: QuantifiedHorn
    origin: str = "<input>"
    line: int = 0


@dataclass(frozen=True)
class IncludeDirective:
    path: str
    origin: str = "<input>"
    line: int = 0


# --- tokenizer -------------------------------------------------------------

_SYMBOLS = ("=>", "(", ")", "[", "]", ",", ".", ":", "!", "&", "~")


@dataclass
class _Token:
    kind: str  # 'name' | 'sym' | 'quoted' | 'eof'
    text: str
    line: int
    col: int


def _tokenize(text: str, origin: str) -> list[_Token]:
    for i, ch in enumerate(text):
        if ord(ch) > 127:
            line = text.count("\n", 0, i) + 1
            col = i - (text.rfind("\n", 0, i) + 1) + 1
            raise FofError(f"non-ASCII byte {ch!r}", origin, line, col)
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            j = text.find("\n", i)
            i = n if j < 0 else j
            continue
        if ch == "'":
            j = text.find("'", i + 1)
            if j < 0:
                raise FofError("unterminated quoted name", origin, line, col)
            tokens.append(_Token("quoted", text[i + 1 : j], line, col))
            col += j - i + 1
            i = j + 1
            continue
        if ch.isalnum() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("name", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if text.startswith("=>", i):
            tokens.append(_Token("sym", "=>", line, col))
            i += 2
            col += 2
            continue
        if ch in "()[],.:!&~":
            tokens.append(_Token("sym", ch, line, col))
            i += 1
            col += 1
            continue
        raise FofError(f"unexpected character {ch!r}", origin, line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], origin: str):
        self.toks = tokens
        self.pos = 0
        self.origin = origin

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise FofError(message, self.origin, tok.line, tok.col)

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            self.fail(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        return tok

    def expect_name(self) -> _Token:
        tok = self.next()
        if tok.kind not in ("name", "quoted"):
            self.fail(f"expected a name, found {tok.text or 'end of input'!r}", tok)
        return tok

    # grammar ---------------------------------------------------------------

    def parse_file(self) -> tuple[list[SourceUnit], list[IncludeDirective]]:
        units: list[SourceUnit] = []
        includes: list[IncludeDirective] = []
        names: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.expect_name()
            if tok.text == "include":
                self.expect("(")
                path = self.next()
                if path.kind != "quoted":
                    self.fail("include path must be single-quoted", path)
                self.expect(")")
                self.expect(".")
                includes.append(IncludeDirective(path.text, self.origin, tok.line))
            elif tok.text == "fof":
                unit = self.parse_unit(tok)
                if unit.name in names:
                    self.fail(f"duplicate unit name {unit.name!r}", tok)
                names.add(unit.name)
                units.append(unit)
            else:
                self.fail(f"expected 'fof' or 'include', found {tok.text!r}", tok)
        return units, includes

    def parse_unit(self, fof_tok: _Token) -> SourceUnit:
        self.expect("(")
        name = self.expect_name().text
        self.expect(",")
        role = self.expect_name()
        if role.text not in ROLES:
            self.fail(f"unknown role {role.text!r} (expected axiom or conjecture)", role)
        self.expect(",")
        formula = self.parse_formula()
        self.expect(")")
        self.expect(".")
        return SourceUnit(name, role.text, formula, self.origin, fof_tok.line)

    def parse_formula(self) -> QuantifiedHorn:
        wrapped = False
        if self.peek().text == "(" and self._quantifier_follows():
            self.expect("(")
            wrapped = True
        variables: tuple[str, ...] = ()
        if self.peek().text == "!":
            variables = self.parse_quantifier()
        premises, ndg, conclusions = self.parse_body()
        if wrapped:
            self.expect(")")
        return self._validated(variables, premises, ndg, conclusions)

    def _quantifier_follows(self) -> bool:
        return self.toks[self.pos + 1].text == "!"

    def parse_quantifier(self) -> tuple[str, ...]:
        self.expect("!")
        self.expect("[")
        variables: list[str] = []
        while True:
            tok = self.expect_name()
            if not tok.text[0].isupper():
                self.fail(f"variables must start uppercase: {tok.text!r}", tok)
            if tok.text in variables:
                self.fail(f"repeated variable {tok.text!r}", tok)
            variables.append(tok.text)
            if self.peek().text == ",":
                self.next()
                continue
            break
        self.expect("]")
        self.expect(":")
        return tuple(variables)

    def parse_body(self):
        wrapped = self.peek().text == "("
        if wrapped:
            self.expect("(")
        lhs = self.parse_conj()
        premises: tuple[tuple[Atom, bool], ...] = ()
        if self.peek().text == "=>":
            self.next()
            premises = lhs
            rhs = self.parse_conj()
        else:
            rhs = lhs
        if wrapped:
            self.expect(")")
            if self.peek().text == "=>":
                # "(premises) => conclusion" with the implication outside the parens
                self.next()
                premises = rhs if not premises else self.fail("nested implication")
                rhs = self.parse_conj()
        pos = [a for a, negated in premises if not negated]
        ndg = [a for a, negated in premises if negated]
        conclusions = []
        for atom, negated in rhs:
            if negated:
                self.fail(f"negation is only allowed on premises: ~{atom}")
            conclusions.append(atom)
        return tuple(pos), tuple(ndg), tuple(conclusions)

    def parse_conj(self) -> tuple[tuple[Atom, bool], ...]:
        wrapped = self.peek().text == "(" and self.toks[self.pos + 1].text != ")"
        if wrapped:
            # Only treat as a conjunction group if it closes before any "=>",
            # i.e. "(a & b) => c"; otherwise leave the paren to parse_body.
            depth, j = 0, self.pos
            grouping = False
            while j < len(self.toks):
                t = self.toks[j].text
                if t == "(":
                    depth += 1
                elif t == ")":
                    depth -= 1
                    if depth == 0:
                        grouping = self.toks[j + 1].text in ("=>", ")", ".")
                        break
                elif t == "=>" and depth == 1:
                    grouping = False
                    break
                j += 1
            if grouping:
                self.expect("(")
                lits = self._lits()
                self.expect(")")
                return lits
        return self._lits()

    def _lits(self) -> tuple[tuple[Atom, bool], ...]:
        lits = [self.parse_lit()]
        while self.peek().text == "&":
            self.next()
            lits.append(self.parse_lit())
        return tuple(lits)

    def parse_lit(self) -> tuple[Atom, bool]:
        negated = False
        if self.peek().text == "~":
            self.next()
            negated = True
        return self.parse_atom(), negated

    def parse_atom(self) -> Atom:
        tok = self.expect_name()
        pred = tok.text
        if pred not in ARITY:
            self.fail(f"unknown predicate {pred!r}", tok)
        self.expect("(")
        args: list[Term] = []
        while True:
            arg = self.expect_name()
            args.append(Term(arg.text))
            if self.peek().text == ",":
                self.next()
                continue
            break
        self.expect(")")
        if len(args) != ARITY[pred]:
            self.fail(f"{pred} expects {ARITY[pred]} arguments, got {len(args)}", tok)
        return Atom(pred, tuple(args))

    def _validated(self, variables, premises, ndg, conclusions) -> QuantifiedHorn:
        if not conclusions:
            self.fail("a formula needs at least one conclusion atom")
        used: set[str] = set()
        for atom in (*premises, *ndg, *conclusions):
            for term in atom.args:
                if term.is_var:
                    if term.name not in variables:
                        self.fail(f"variable {term.name} is not quantified")
                    used.add(term.name)
        for var in variables:
            if var not in used:
                self.fail(f"quantified variable {var} never occurs")
        return QuantifiedHorn(tuple(variables), premises, ndg, conclusions)


def parse_units(text: str, origin: str = "<input>") -> tuple[list[SourceUnit], list[IncludeDirective]]:
    """All fof units and include directives of one file, in source order."""
    return _Parser(_tokenize(text, origin), origin).parse_file()


# --- includes ---------------------------------------------------------------


def resolve_includes(units, directives, base_dir, loader, _seen=None) -> list[SourceUnit]:
    """Depth-first include expansion; included units precede including units.

    ``loader(path)`` returns file content; paths resolve relative to the
    including file's directory. Cycles and duplicate unit names across the
    flattened collection are errors.
    """
    import posixpath

    seen = _seen if _seen is not None else []
    out: list[SourceUnit] = []
    for directive in directives:
        path = directive.path
        if not posixpath.isabs(path):
            path = posixpath.normpath(posixpath.join(base_dir, path))
        if path in seen:
            raise FofError(f"include cycle through {path!r}", directive.origin, directive.line)
        try:
            text = loader(path)
        except OSError as exc:
            raise FofError(f"cannot include {path!r}: {exc}", directive.origin, directive.line) from None
        sub_units, sub_dirs = parse_units(text, path)
        out.extend(
            resolve_includes(sub_units, sub_dirs, posixpath.dirname(path), loader, seen + [path])
        )
    out.extend(units)
    names: set[str] = set()
    for unit in out:
        if unit.name in names:
            raise FofError(f"duplicate unit name {unit.name!r} across files", unit.origin, unit.line)
        names.add(unit.name)
    return out


# --- printer ----------------------------------------------------------------


def print_unit(unit: SourceUnit) -> str:
    """Valid FOF text for a unit; parsing the output reproduces the unit."""
    f = unit.formula
    lits = [f"~{a}" for a in f.ndg_premises]
    lits = [str(a) for a in f.premises] + lits
    rhs = " & ".join(str(a) for a in f.conclusions)
    body = f"{' & '.join(lits)} => {rhs}" if lits else rhs
    if f.variables:
        formula = f"(![{','.join(f.variables)}] : ({body}) )"
    else:
        formula = f"({body})" if (f.premises or f.ndg_premises) else rhs
    return f"fof({unit.name},{unit.role},{formula})."
