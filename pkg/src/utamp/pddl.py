"""Reader and writer for the PDDL subset used by the built-in domains.

Supported: ``:strips``, ``:typing`` and ``:negative-preconditions``; typed
parameters, constants and objects; conjunctive preconditions with ``not``
literals; add/delete effects.  Writing is deterministic (sorted predicates,
actions, objects and init atoms), so ``write(read(write(x))) == write(x)``
byte for byte.  The grammar is spelled out in ``docs/pddl-grammar.md``.

Names are case-sensitive; section keywords are not.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .symbolic import ActionSchema, Atom, Domain, Literal, Problem, fmt_atom

INDENT = "  "


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        exp = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{line}:{column}: {message}{exp}")


# ---------------------------------------------------------------------------
# writing

def _typed(items: Sequence[Tuple[str, str]]) -> str:
    """``a b - t1 c - t2`` grouping runs of equal type."""
    parts: List[str] = []
    run: List[str] = []
    typ = None
    for name, t in items:
        if run and t != typ:
            parts.append(" ".join(run) + f" - {typ}")
            run = []
        run.append(name)
        typ = t
    if run:
        parts.append(" ".join(run) + f" - {typ}")
    return " ".join(parts)


def _conj(lits: Sequence[str], indent: str) -> str:
    if not lits:
        return "(and)"
    inner = ("\n" + indent + INDENT).join(lits)
    return f"(and\n{indent}{INDENT}{inner})"


def write_domain(domain: Domain) -> str:
    out = [f"(define (domain {domain.name})"]
    out.append(f"{INDENT}(:requirements {' '.join(domain.requirements)})")
    out.append(f"{INDENT}(:types {' '.join(domain.types)})")
    if domain.constants:
        consts = sorted(domain.constants, key=lambda c: (c[1], c[0]))
        out.append(f"{INDENT}(:constants {_typed(consts)})")
    out.append(f"{INDENT}(:predicates")
    for name, params in domain.predicates:
        sig = f" {_typed(params)}" if params else ""
        out.append(f"{INDENT * 2}({name}{sig})")
    out[-1] += ")"
    for a in domain.actions:
        ind = INDENT * 2
        out.append(f"{INDENT}(:action {a.name}")
        out.append(f"{ind}:parameters ({_typed(a.parameters)})")
        out.append(f"{ind}:precondition {_conj([str(l) for l in a.precondition], ind)}")
        eff = [fmt_atom(x) for x in a.add_effects] + [f"(not {fmt_atom(x)})" for x in a.del_effects]
        out.append(f"{ind}:effect {_conj(eff, ind)})")
    out[-1] += ")"
    return "\n".join(out) + "\n"


def write_problem(problem: Problem) -> str:
    out = [f"(define (problem {problem.name})"]
    out.append(f"{INDENT}(:domain {problem.domain_name})")
    objs = sorted(problem.objects, key=lambda o: (o[1], o[0]))
    out.append(f"{INDENT}(:objects {_typed(objs)})")
    out.append(f"{INDENT}(:init")
    for atom in sorted(problem.init):
        out.append(f"{INDENT * 2}{fmt_atom(atom)}")
    out[-1] += ")"
    out.append(f"{INDENT}(:goal {_conj([fmt_atom(g) for g in problem.goal], INDENT)}))")
    return "\n".join(out) + "\n"


def write_goal(goal: Iterable[Atom]) -> str:
    return _conj([fmt_atom(g) for g in sorted(set(goal))], "") + "\n"


# ---------------------------------------------------------------------------
# reading

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


@dataclass(frozen=True)
class _Tok:
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        s = m.group(0)
        if not (s[0].isspace() or s[0] == ";"):
            toks.append(_Tok(s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos = m.end()
    toks.append(_Tok("", line, col))   # end marker
    return toks


class _Reader:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, expected: Iterable[str] = ()):
        t = self.tok
        raise ParseError(message if t.text else "unexpected end of input", t.line, t.col, expected)

    def next(self) -> _Tok:
        t = self.tok
        if not t.text:
            self.fail("unexpected end of input")
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text.lower() != text:
            self.fail(f"unexpected {self.tok.text!r}", {text})
        return self.next()

    def peek_is(self, text: str) -> bool:
        return self.tok.text.lower() == text

    def name(self, what: str = "name") -> str:
        t = self.tok
        if t.text in ("(", ")", "") or t.text.startswith(":") or t.text.startswith("?"):
            self.fail(f"unexpected {t.text!r}", {what})
        return self.next().text

    def var(self) -> str:
        t = self.tok
        if not t.text.startswith("?") or len(t.text) < 2:
            self.fail(f"unexpected {t.text!r}", {"?variable"})
        return self.next().text

    def term(self) -> str:
        t = self.tok
        if t.text in ("(", ")", "") or t.text.startswith(":"):
            self.fail(f"unexpected {t.text!r}", {"term"})
        return self.next().text

    def end(self):
        if self.tok.text:
            self.fail(f"trailing input {self.tok.text!r}", {"end of input"})

    # typed lists: items [- type] ...
    def typed_list(self, item) -> List[Tuple[str, str]]:
        out: List[Tuple[str, str]] = []
        pending: List[str] = []
        while not self.peek_is(")"):
            if self.peek_is("-"):
                self.next()
                if not pending:
                    self.fail("type without items")
                typ = self.name("type")
                out += [(p, typ) for p in pending]
                pending = []
            else:
                pending.append(item())
        out += [(p, "object") for p in pending]
        return out

    def atom(self) -> Atom:
        self.expect("(")
        pred = self.name("predicate")
        args = []
        while not self.peek_is(")"):
            args.append(self.term())
        self.expect(")")
        return (pred,) + tuple(args)

    def literal(self) -> Literal:
        save = self.i
        self.expect("(")
        if self.peek_is("not"):
            self.next()
            a = self.atom()
            self.expect(")")
            return Literal(a, True)
        self.i = save
        return Literal(self.atom(), False)

    def conjunction(self) -> List[Literal]:
        """``(and lit*)`` or a single literal."""
        save = self.i
        self.expect("(")
        if self.peek_is("and"):
            self.next()
            lits = []
            while not self.peek_is(")"):
                if not self.peek_is("("):
                    self.fail(f"unexpected {self.tok.text!r}", {"(", ")"})
                lits.append(self.literal())
            self.expect(")")
            return lits
        self.i = save
        return [self.literal()]


def _header(r: _Reader, kind: str) -> str:
    r.expect("(")
    r.expect("define")
    r.expect("(")
    r.expect(kind)
    name = r.name(f"{kind} name")
    r.expect(")")
    return name


def parse_domain(text: str) -> Domain:
    r = _Reader(text)
    name = _header(r, "domain")
    requirements: Tuple[str, ...] = ()
    types: List[str] = []
    constants: List[Tuple[str, str]] = []
    predicates = []
    actions = []
    sections = {":requirements", ":types", ":constants", ":predicates", ":action"}
    while not r.peek_is(")"):
        r.expect("(")
        key = r.tok.text.lower()
        if key == ":requirements":
            r.next()
            reqs = []
            while not r.peek_is(")"):
                t = r.next()
                if not t.text.startswith(":"):
                    r.i -= 1
                    r.fail(f"unexpected {t.text!r}", {":requirement"})
                reqs.append(t.text.lower())
            requirements = tuple(reqs)
        elif key == ":types":
            r.next()
            for t, parent in r.typed_list(lambda: r.name("type")):
                types.append(t)
        elif key == ":constants":
            r.next()
            constants += r.typed_list(lambda: r.name("constant"))
        elif key == ":predicates":
            r.next()
            while not r.peek_is(")"):
                r.expect("(")
                pred = r.name("predicate")
                params = tuple(r.typed_list(r.var))
                r.expect(")")
                predicates.append((pred, params))
        elif key == ":action":
            r.next()
            actions.append(_action(r))
        else:
            r.fail(f"unknown section {r.tok.text!r}", sections)
        r.expect(")")
    r.expect(")")
    r.end()
    kw = {} if not requirements else {"requirements": requirements}
    return Domain(name, tuple(types), tuple(constants), tuple(predicates), tuple(actions), **kw)


def _action(r: _Reader) -> ActionSchema:
    name = r.name("action name")
    params: Tuple[Tuple[str, str], ...] = ()
    pre: List[Literal] = []
    eff: List[Literal] = []
    while not r.peek_is(")"):
        key = r.tok.text.lower()
        if key == ":parameters":
            r.next()
            r.expect("(")
            params = tuple(r.typed_list(r.var))
            r.expect(")")
        elif key == ":precondition":
            r.next()
            pre = r.conjunction()
        elif key == ":effect":
            r.next()
            eff = r.conjunction()
        else:
            r.fail(f"unexpected {r.tok.text!r}", {":parameters", ":precondition", ":effect", ")"})
    add = tuple(l.atom for l in eff if not l.negated)
    dele = tuple(l.atom for l in eff if l.negated)
    try:
        return ActionSchema(name, params, tuple(pre), add, dele)
    except ValueError as e:
        raise ParseError(str(e), r.tok.line, r.tok.col) from None


def parse_problem(text: str) -> Problem:
    r = _Reader(text)
    name = _header(r, "problem")
    domain_name = None
    objects: List[Tuple[str, str]] = []
    init: List[Atom] = []
    goal: List[Atom] = []
    sections = {":domain", ":objects", ":init", ":goal"}
    while not r.peek_is(")"):
        r.expect("(")
        key = r.tok.text.lower()
        if key == ":domain":
            r.next()
            domain_name = r.name("domain name")
        elif key == ":objects":
            r.next()
            objects += r.typed_list(lambda: r.name("object"))
        elif key == ":init":
            r.next()
            while not r.peek_is(")"):
                init.append(r.atom())
        elif key == ":goal":
            r.next()
            lits = r.conjunction()
            if any(l.negated for l in lits):
                r.fail("negative goals are not supported")
            goal = [l.atom for l in lits]
        else:
            r.fail(f"unknown section {r.tok.text!r}", sections)
        r.expect(")")
    r.expect(")")
    r.end()
    if domain_name is None:
        r.fail("problem names no domain", {":domain"})
    return Problem(name, domain_name, tuple(objects), frozenset(init), tuple(goal))


def parse_goal(text: str) -> Tuple[Atom, ...]:
    """A goal file: ``(and atom*)``, a single atom, or ``(:goal ...)``."""
    r = _Reader(text)
    wrapped = len(r.toks) > 1 and r.toks[1].text.lower() == ":goal"
    if wrapped:
        r.expect("(")
        r.next()
    lits = r.conjunction()
    if wrapped:
        r.expect(")")
    r.end()
    if any(l.negated for l in lits):
        raise ParseError("negative goals are not supported", 1, 1)
    return tuple(l.atom for l in lits)


def parse_pddl(text: str) -> Union[Domain, Problem]:
    """Domain or problem, depending on the ``define`` header."""
    r = _Reader(text)
    for want in ("(", "define", "("):
        r.expect(want)
    kind = r.tok.text.lower()
    if kind == "domain":
        return parse_domain(text)
    if kind == "problem":
        return parse_problem(text)
    r.fail(f"unexpected {r.tok.text!r}", {"domain", "problem"})
