"""STRIPS-subset planning model for pick-and-place with object-centric parts.

Atoms are plain tuples ``(predicate, arg1, ...)``.  A state is a frozenset of
atoms under the closed-world assumption.  Variables in schemas start with
``?``; everything else is a constant.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from .abstraction import (
    OPPOSITE, PARTS, SIDES, GraspConfig, PlacementConfig, base_to_base,
    enumerate_legal_grasps, enumerate_surface_placements,
)

Atom = Tuple[str, ...]
State = FrozenSet[Atom]

PART = "part"
OBJ = "obj"
ANY = "object"  # common supertype of parts and objects

SUPPORT = "object-support"
CONTAINER = "object-container"
HYBRID = "hybrid"
DOMAIN_KINDS = (SUPPORT, CONTAINER, HYBRID)


class ArityMismatch(ValueError):
    pass


class UnknownSymbol(ValueError):
    pass


class NotApplicable(ValueError):
    def __init__(self, action, atom):
        super().__init__(f"{action} is not applicable: {fmt_atom(atom)} does not hold")
        self.action = action
        self.atom = atom


def fmt_atom(atom: Atom) -> str:
    return "(" + " ".join(atom) + ")"


def is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def __str__(self):
        return f"(not {fmt_atom(self.atom)})" if self.negated else fmt_atom(self.atom)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: Tuple[Tuple[str, str], ...]
    precondition: Tuple[Literal, ...]
    add_effects: Tuple[Atom, ...]
    del_effects: Tuple[Atom, ...]

    def __post_init__(self):
        params = {v for v, _ in self.parameters}
        for atom in itertools.chain(
            (l.atom for l in self.precondition), self.add_effects, self.del_effects
        ):
            for t in atom[1:]:
                if is_var(t) and t not in params:
                    raise UnknownSymbol(f"{self.name}: variable {t} is not a parameter")


@dataclass(frozen=True)
class Domain:
    name: str
    types: Tuple[str, ...]
    constants: Tuple[Tuple[str, str], ...]
    predicates: Tuple[Tuple[str, Tuple[Tuple[str, str], ...]], ...]
    actions: Tuple[ActionSchema, ...]
    requirements: Tuple[str, ...] = (":strips", ":typing", ":negative-preconditions")

    def __post_init__(self):
        object.__setattr__(self, "constants", tuple(sorted(self.constants)))
        object.__setattr__(self, "predicates", tuple(sorted(self.predicates)))
        object.__setattr__(self, "actions", tuple(sorted(self.actions, key=lambda a: a.name)))

    @property
    def arity(self) -> Dict[str, int]:
        return {name: len(args) for name, args in self.predicates}

    @property
    def fluent_predicates(self) -> FrozenSet[str]:
        return frozenset(
            a[0] for s in self.actions for a in itertools.chain(s.add_effects, s.del_effects)
        )

    @property
    def static_predicates(self) -> FrozenSet[str]:
        return frozenset(p for p, _ in self.predicates) - self.fluent_predicates

    def action(self, name: str) -> ActionSchema:
        for a in self.actions:
            if a.name == name:
                return a
        raise UnknownSymbol(name)


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: Tuple[Tuple[str, str], ...]
    init: FrozenSet[Atom]
    goal: Tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(sorted(self.objects)))
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "goal", tuple(sorted(set(self.goal))))


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: Tuple[str, ...]
    pre: FrozenSet[Atom]
    add: FrozenSet[Atom]
    delete: FrozenSet[Atom]

    def __str__(self):
        return "(" + " ".join((self.name,) + self.args) + ")"

    @property
    def binding(self) -> Dict[str, str]:
        """Parameter-name -> value map, filled in by :func:`ground`."""
        return dict(self._binding) if hasattr(self, "_binding") else {}

    def applicable(self, state: State) -> bool:
        return self.pre <= state


def _bound(action: GroundAction, schema: ActionSchema, args) -> GroundAction:
    object.__setattr__(action, "_binding", tuple(zip((v for v, _ in schema.parameters), args)))
    return action


Plan = List[GroundAction]


# ---------------------------------------------------------------------------
# built-in domain

def _p(*names, typ=PART):
    return tuple((n, typ) for n in names)


def _lit(*atom, neg=False):
    return Literal(tuple(atom), neg)


def _pick() -> ActionSchema:
    o1, o2, p, f1, f2 = "?o1", "?o2", "?o1-h-p", "?o1-h-f1", "?o1-h-f2"
    o1o2, o2o1, base, force = "?o1-o2", "?o2-o1", "?o1-base", "?o1-force"
    o2base = "?o2-base"
    pre = (
        _lit("isgrasp", p, f1, f2),
        _lit("oc", p, o1, "air"), _lit("oc", f1, o1, "air"), _lit("oc", f2, o1, "air"),
        _lit("base", o1, base),
        _lit("isopposite", base, p, neg=True),
        _lit("oc", o1o2, o1, o2), _lit("oc", o2o1, o2, o1),
        _lit("force", o2, o2o1),
        _lit("force", o1, force), _lit("oc", force, o1, "air"),
        _lit("oc", "in", "hand", "air"),
        # reconstruction: the same support-to-object couplings that place establishes
        _lit("isopposite", force, o1o2),
        _lit("base", o2, o2base),
        _lit("base2base", o2base, o2o1, o1o2, base),
        _lit("isequal", o1, o2, neg=True),
    )
    add = (
        ("oc", "in", "hand", o1),
        ("oc", p, o1, "hand"), ("oc", f1, o1, "hand"), ("oc", f2, o1, "hand"),
        # reconstruction: the vacated contact faces become clear on both bodies
        ("oc", o1o2, o1, "air"), ("oc", o2o1, o2, "air"),
    )
    dele = (
        ("oc", "in", "hand", "air"),
        ("oc", p, o1, "air"), ("oc", f1, o1, "air"), ("oc", f2, o1, "air"),
        ("oc", o1o2, o1, o2), ("oc", o2o1, o2, o1),
        ("force", o1, force), ("base", o1, base),
    )
    return ActionSchema("pick", _p(o1, o2, typ=OBJ) + _p(p, f1, f2, o1o2, o2o1, base, force, o2base),
                        pre, add, dele)


def _holding(o1, p, f1, f2):
    return (
        _lit("oc", "in", "hand", o1),
        _lit("oc", p, o1, "hand"), _lit("oc", f1, o1, "hand"), _lit("oc", f2, o1, "hand"),
        _lit("isgrasp", p, f1, f2),
    )


def _place() -> ActionSchema:
    o1, o2, p, f1, f2 = "?o1", "?o2", "?o1-h-p", "?o1-h-f1", "?o1-h-f2"
    o1o2, o2o1, o2base, o1base, force = "?o1-o2", "?o2-o1", "?o2-base", "?o1-base", "?o1-force"
    pre = _holding(o1, p, f1, f2) + (
        _lit("oc", o1o2, o1, "air"), _lit("oc", o2o1, o2, "air"),
        _lit("force", o2, o2o1),
        _lit("base", o2, o2base),
        _lit("base2base", o2base, o2o1, o1o2, o1base),
        _lit("isopposite", o1base, p, neg=True),
        _lit("isopposite", force, o1o2),
        _lit("isequal", o1, o2, neg=True),
        _lit("isplacement", o1o2, o2o1),
    )
    add = (
        ("oc", o1o2, o1, o2), ("oc", o2o1, o2, o1),
        ("oc", "in", "hand", "air"),
        ("oc", p, o1, "air"), ("oc", f1, o1, "air"), ("oc", f2, o1, "air"),
        ("base", o1, o1base), ("force", o1, force),
    )
    dele = (
        ("oc", o1o2, o1, "air"), ("oc", o2o1, o2, "air"),
        ("oc", "in", "hand", o1),
        ("oc", p, o1, "hand"), ("oc", f1, o1, "hand"), ("oc", f2, o1, "hand"),
    )
    return ActionSchema(
        "place", _p(o1, o2, typ=OBJ) + _p(p, f1, f2, o1o2, o2o1, o2base, o1base, force),
        pre, add, dele)


def _space_guards(p, f1, f2, o2, hp, hf1, hf2, o2base, bbs):
    lits = [
        _lit("oc", p, o2, hp), _lit("oc", f1, o2, hf1), _lit("oc", f2, o2, hf2),
        _lit("oc", "in", hp, "air"), _lit("oc", "in", hf1, "air"), _lit("oc", "in", hf2, "air"),
        _lit("force", o2, "in"),
        _lit("base", o2, o2base),
        _lit("isopposite", o2base, p, neg=True),
    ]
    # the three free faces: distinct from each other, from the hand contacts, and not "in"
    for bb in bbs:
        for h in (p, f1, f2, "in"):
            lits.append(_lit("isequal", bb, h, neg=True))
    for a, b in itertools.combinations(bbs, 2):
        lits.append(_lit("isequal", a, b, neg=True))
    # symmetry breaking: free faces are listed in canonical part order
    lits += [_lit("precedes", bbs[0], bbs[1]), _lit("precedes", bbs[1], bbs[2])]
    return tuple(lits)


def _pick_space() -> ActionSchema:
    o1, o2, p, f1, f2 = "?o1", "?o2", "?o1-h-p", "?o1-h-f1", "?o1-h-f2"
    hp, hf1, hf2, o2base = "?o2-h-p", "?o2-h-f1", "?o2-h-f2", "?o2-base"
    bbs = ("?o1-bb1", "?o1-bb2", "?o1-bb3")
    pre = (_lit("oc", "in", o2, o1), _lit("isgrasp", p, f1, f2),
           _lit("oc", "in", "hand", "air"), _lit("isequal", o1, "air", neg=True)) + _space_guards(p, f1, f2, o2, hp, hf1, hf2, o2base, bbs)
    add = (
        ("oc", "in", "hand", o1),
        ("oc", p, o1, "hand"), ("oc", f1, o1, "hand"), ("oc", f2, o1, "hand"),
        ("oc", "in", o2, "air"),
    ) + tuple(("oc", bb, o1, "air") for bb in bbs)
    dele = (("oc", "in", o2, o1), ("oc", "in", "hand", "air"))
    params = _p(o1, o2, typ=OBJ) + _p(p, f1, f2) + _p(hp, hf1, hf2, typ=OBJ) + _p(o2base) + _p(*bbs)
    return ActionSchema("pick-space", params, pre, add, dele)


def _place_space() -> ActionSchema:
    o1, o2, p, f1, f2 = "?o1", "?o2", "?o1-h-p", "?o1-h-f1", "?o1-h-f2"
    hp, hf1, hf2, o2base = "?o2-h-p", "?o2-h-f1", "?o2-h-f2", "?o2-base"
    bbs = ("?o1-bb1", "?o1-bb2", "?o1-bb3")
    pre = (
        _holding(o1, p, f1, f2)
        + (_lit("oc", "in", o2, "air"),)
        + tuple(_lit("oc", bb, o1, "air") for bb in bbs)
        + _space_guards(p, f1, f2, o2, hp, hf1, hf2, o2base, bbs)
    )
    add = (("oc", "in", o2, o1), ("oc", "in", "hand", "air"))
    dele = (
        ("oc", "in", o2, "air"), ("oc", "in", "hand", o1),
        ("oc", p, o1, "hand"), ("oc", f1, o1, "hand"), ("oc", f2, o1, "hand"),
    ) + tuple(("oc", bb, o1, "air") for bb in bbs)
    params = _p(o1, o2, typ=OBJ) + _p(p, f1, f2) + _p(hp, hf1, hf2, typ=OBJ) + _p(o2base) + _p(*bbs)
    return ActionSchema("place-space", params, pre, add, dele)


def _clean() -> ActionSchema:
    return ActionSchema(
        "clean", _p("?o", "?d", typ=OBJ),
        (_lit("cleaner", "?d"), _lit("oc", "on", "?d", "?o"), _lit("isequal", "?o", "air", neg=True)),
        (("cleaned", "?o"),), ())


def _cook() -> ActionSchema:
    return ActionSchema(
        "cook", _p("?o", "?m", typ=OBJ),
        (_lit("cooker", "?m"), _lit("cleaned", "?o"), _lit("oc", "on", "?m", "?o")),
        (("cooked", "?o"),), ())


EXTENSIONS = {"clean": _clean, "cook": _cook}

BASE_PREDICATES = (
    ("oc", _p("?part") + _p("?o1", "?o2", typ=OBJ)),
    ("isgrasp", _p("?p", "?f1", "?f2")),
    ("isopposite", _p("?a", "?b")),
    ("isequal", _p("?a", "?b", typ=ANY)),
    ("base", _p("?o", typ=OBJ) + _p("?part")),
    ("force", _p("?o", typ=OBJ) + _p("?part")),
    ("base2base", _p("?b2", "?s", "?p", "?b1")),
    ("precedes", _p("?a", "?b")),
    ("isplacement", _p("?a", "?b")),
)
EXTENSION_PREDICATES = {
    "clean": (("cleaner", _p("?d", typ=OBJ)), ("cleaned", _p("?o", typ=OBJ))),
    "cook": (("cooker", _p("?m", typ=OBJ)), ("cooked", _p("?o", typ=OBJ))),
}


def object_identity_facts(objects: Iterable[str]) -> FrozenSet[Atom]:
    """``isequal(o, o)`` for scene objects, so schemas can require distinct objects."""
    return frozenset(("isequal", o, o) for o in objects)


def static_facts(grasp_whitelist: Optional[Iterable[GraspConfig]] = None,
                 placement_whitelist: Optional[Iterable[PlacementConfig]] = None) -> FrozenSet[Atom]:
    grasps = enumerate_legal_grasps() if grasp_whitelist is None else [GraspConfig(*g) for g in grasp_whitelist]
    placements = (enumerate_surface_placements() if placement_whitelist is None
                  else [PlacementConfig(*c) for c in placement_whitelist])
    for g in grasps:
        if not g.legal:
            raise ValueError(f"{tuple(g)} is not a legal grasp")
    for g in grasps:
        if not g.legal:
            raise ValueError(f"{tuple(g)} is not a legal grasp")
    for c in placements:
        if not c.legal or c.placed == "in":
            raise ValueError(f"{tuple(c)} is not a surface placement")
    facts = {("isgrasp",) + tuple(g) for g in grasps}
    facts |= {("isplacement",) + tuple(c) for c in placements}
    facts |= {("isopposite", a, OPPOSITE[a]) for a in SIDES}
    facts |= {("isequal", a, a) for a in PARTS}
    facts |= {("precedes", a, b) for a, b in itertools.combinations(SIDES, 2)}
    for b2 in SIDES:
        for s in SIDES:
            for p in SIDES:
                facts.add(("base2base", b2, s, p, base_to_base(b2, PlacementConfig(p, s))))
    return frozenset(facts)


def builtin_domain(kind: str = HYBRID, grasp_whitelist=None, extensions: Sequence[str] = (),
                   placement_whitelist=None):
    """Return ``(domain, static facts)`` for the requested task kind.

    The whitelists restrict which grasp triples and surface placements the
    ``isgrasp`` / ``isplacement`` tables admit; None admits all legal ones.
    """
    if kind not in DOMAIN_KINDS:
        raise ValueError(f"unknown domain kind {kind!r}")
    actions = []
    if kind in (SUPPORT, HYBRID):
        actions += [_pick(), _place()]
    if kind in (CONTAINER, HYBRID):
        actions += [_pick_space(), _place_space()]
    preds = list(BASE_PREDICATES)
    for ext in extensions:
        if ext not in EXTENSIONS:
            raise ValueError(f"unknown extension {ext!r}; known: {sorted(EXTENSIONS)}")
        actions.append(EXTENSIONS[ext]())
        preds += EXTENSION_PREDICATES[ext]
    constants = tuple((p, PART) for p in PARTS) + (("hand", OBJ), ("air", OBJ))
    name = "utamp-" + kind + "".join("-" + e for e in extensions)
    dom = Domain(name, (PART, OBJ), constants, tuple(preds), tuple(actions))
    return dom, static_facts(grasp_whitelist, placement_whitelist)


# ---------------------------------------------------------------------------
# grounding

@dataclass
class GroundTask:
    domain: Domain
    problem: Problem
    actions: List[GroundAction]
    init: State            # fluent atoms only
    goal: FrozenSet[Atom]
    statics: FrozenSet[Atom]

    def goal_reached(self, state: State) -> bool:
        return self.goal <= state


class _Index:
    """Atoms grouped by predicate, with hash tables keyed on bound argument positions."""

    def __init__(self, atoms: Iterable[Atom] = ()):
        self.by_pred: Dict[str, List[Atom]] = defaultdict(list)
        self.tables: Dict[Tuple[str, Tuple[int, ...]], Dict[tuple, List[Atom]]] = {}
        self.add(atoms)

    def add(self, atoms: Iterable[Atom]):
        for a in atoms:
            self.by_pred[a[0]].append(a)
            for (pred, pos), table in self.tables.items():
                if pred == a[0]:
                    table.setdefault(tuple(a[i] for i in pos), []).append(a)

    def lookup(self, pred: str, pos: Tuple[int, ...], key: tuple) -> List[Atom]:
        if not pos:
            return self.by_pred.get(pred, [])
        table = self.tables.get((pred, pos))
        if table is None:
            table = {}
            for a in self.by_pred.get(pred, ()):
                table.setdefault(tuple(a[i] for i in pos), []).append(a)
            self.tables[(pred, pos)] = table
        return table.get(key, [])


def _substitute(atom: Atom, binding: Dict[str, str]) -> Atom:
    return (atom[0],) + tuple(binding.get(t, t) for t in atom[1:])


def _match(pattern: Atom, atom: Atom, binding: Dict[str, str]) -> Optional[Dict[str, str]]:
    if len(pattern) != len(atom):
        return None
    new = None
    for t, v in zip(pattern[1:], atom[1:]):
        if is_var(t):
            b = binding.get(t) if new is None else new.get(t)
            if b is None:
                if new is None:
                    new = dict(binding)
                new[t] = v
            elif b != v:
                return None
        elif t != v:
            return None
    return binding if new is None else new


@dataclass
class _Step:
    pred: str
    key_pos: Tuple[int, ...]          # atom positions (1-based) used as lookup key
    key_terms: Tuple[str, ...]        # variable or constant supplying each key value
    free: Tuple[Tuple[int, str], ...]  # positions whose variable gets bound here
    negs: Tuple[Atom, ...]            # negative literals that become ground here


def _join_plan(schema: ActionSchema, bound: FrozenSet[str], skip: int,
               static_preds: FrozenSet[str]) -> Tuple[List[_Step], Tuple[Atom, ...]]:
    """Fixed join order: always extend with the pattern leaving fewest new variables."""
    positives = [l.atom for l in schema.precondition if not l.negated]
    negatives = [l.atom for l in schema.precondition if l.negated]
    todo = [p for i, p in enumerate(positives) if i != skip]
    bound = set(bound)
    done_negs = {i for i, n in enumerate(negatives)
                 if {t for t in n[1:] if is_var(t)} <= bound}
    steps = []
    while todo:
        def score(p):
            fresh = {t for t in p[1:] if is_var(t) and t not in bound}
            return (len(fresh), p[0] not in static_preds, -sum(1 for t in p[1:] if not is_var(t) or t in bound))
        k = min(range(len(todo)), key=lambda i: score(todo[i]))
        p = todo.pop(k)
        key_pos, key_terms, free = [], [], []
        for i, t in enumerate(p[1:], start=1):
            if not is_var(t) or t in bound:
                key_pos.append(i)
                key_terms.append(t)
            else:
                free.append((i, t))
        bound |= {t for _, t in free}
        negs = []
        for i, n in enumerate(negatives):
            if i not in done_negs and {t for t in n[1:] if is_var(t)} <= bound:
                done_negs.add(i)
                negs.append(n)
        steps.append(_Step(p[0], tuple(key_pos), tuple(key_terms), tuple(free), tuple(negs)))
    leftover = tuple(n for i, n in enumerate(negatives) if i not in done_negs)
    return steps, leftover


class _Grounder:
    """Enumerates bindings of one schema against an atom index."""

    def __init__(self, schema: ActionSchema, static_true: FrozenSet[Atom],
                 objects_by_type: Dict[str, List[str]], static_preds: FrozenSet[str]):
        self.schema = schema
        self.static_true = static_true
        self.objects_by_type = objects_by_type
        self.params = [v for v, _ in schema.parameters]
        self.ptype = dict(schema.parameters)
        self.positives = [l.atom for l in schema.precondition if not l.negated]
        self.ground_negs = [l.atom for l in schema.precondition
                            if l.negated and not any(is_var(t) for t in l.atom[1:])]
        self.full = _join_plan(schema, frozenset(), -1, static_preds)
        self.from_delta = {}
        for i, p in enumerate(self.positives):
            if p[0] not in static_preds:
                vs = frozenset(t for t in p[1:] if is_var(t))
                self.from_delta[i] = _join_plan(schema, vs, i, static_preds)

    def bindings(self, index: _Index, delta: Optional[_Index] = None) -> Iterator[Dict[str, str]]:
        """All bindings; with ``delta``, only those using a ``delta`` atom for a fluent pattern."""
        if any(n in self.static_true for n in self.ground_negs):
            return
        if delta is None:
            steps, leftover = self.full
            yield from self._run(index, steps, leftover, 0, {})
            return
        for i, (steps, leftover) in self.from_delta.items():
            pat = self.positives[i]
            for atom in delta.by_pred.get(pat[0], ()):
                b = _match(pat, atom, {})
                if b is not None and self._negs_ok(b, self._start_negs(pat)):
                    yield from self._run(index, steps, leftover, 0, b)

    def _start_negs(self, pat):
        vs = {t for t in pat[1:] if is_var(t)}
        return [l.atom for l in self.schema.precondition if l.negated
                and {t for t in l.atom[1:] if is_var(t)} <= vs
                and any(is_var(t) for t in l.atom[1:])]

    def _negs_ok(self, binding, negs) -> bool:
        st = self.static_true
        for n in negs:
            if (n[0],) + tuple(binding.get(t, t) for t in n[1:]) in st:
                return False
        return True

    def _run(self, index, steps, leftover, k, binding):
        if k == len(steps):
            free = [v for v in self.params if v not in binding]
            yield from self._fill(binding, free, leftover)
            return
        st = steps[k]
        key = tuple(binding.get(t, t) for t in st.key_terms)
        for atom in index.lookup(st.pred, st.key_pos, key):
            b = dict(binding)
            ok = True
            for i, var in st.free:
                v = atom[i]
                old = b.get(var)
                if old is None:
                    b[var] = v
                elif old != v:
                    ok = False
                    break
            if ok and self._negs_ok(b, st.negs):
                yield from self._run(index, steps, leftover, k + 1, b)

    def _fill(self, binding, free, leftover):
        if not free:
            if self._negs_ok(binding, leftover):
                yield binding
            return
        v = free[0]
        for o in self.objects_by_type[self.ptype[v]]:
            b = dict(binding)
            b[v] = o
            yield from self._fill(b, free[1:], leftover)


def _check_symbols(domain: Domain, problem: Problem):
    arity = domain.arity
    known = {n for n, _ in domain.constants} | {n for n, _ in problem.objects}
    for atom in itertools.chain(problem.init, problem.goal):
        if atom[0] not in arity:
            raise UnknownSymbol(f"undeclared predicate in {fmt_atom(atom)}")
        if len(atom) - 1 != arity[atom[0]]:
            raise ArityMismatch(f"{fmt_atom(atom)} expects {arity[atom[0]]} arguments")
        for t in atom[1:]:
            if t not in known:
                raise UnknownSymbol(f"unknown object {t!r} in {fmt_atom(atom)}")
    for schema in domain.actions:
        for atom in itertools.chain((l.atom for l in schema.precondition),
                                    schema.add_effects, schema.del_effects):
            if atom[0] not in arity:
                raise UnknownSymbol(f"{schema.name}: undeclared predicate {atom[0]}")
            if len(atom) - 1 != arity[atom[0]]:
                raise ArityMismatch(f"{schema.name}: {fmt_atom(atom)} has wrong arity")
            for t in atom[1:]:
                if not is_var(t) and t not in known:
                    raise UnknownSymbol(f"{schema.name}: unknown constant {t!r}")


def ground(domain: Domain, problem: Problem) -> GroundTask:
    """Instantiate every schema binding reachable under the delete relaxation."""
    _check_symbols(domain, problem)
    statics = domain.static_predicates
    objects_by_type: Dict[str, List[str]] = defaultdict(list)
    for name, typ in itertools.chain(domain.constants, problem.objects):
        objects_by_type[typ].append(name)
        if typ != ANY:
            objects_by_type[ANY].append(name)
    static_true = frozenset(a for a in problem.init if a[0] in statics)

    grounders = [_Grounder(sch, static_true, objects_by_type, statics) for sch in domain.actions]
    reach = set(problem.init)
    index = _Index(sorted(reach))
    delta = None
    seen = {}
    changed = True
    while changed:
        changed = False
        new_atoms = set()
        for g in grounders:
            schema = g.schema
            for b in g.bindings(index, delta):
                args = tuple(b[v] for v, _ in schema.parameters)
                key = (schema.name, args)
                if key in seen:
                    continue
                pre = frozenset(_substitute(l.atom, b) for l in schema.precondition
                                if not l.negated and l.atom[0] not in statics)
                add = frozenset(_substitute(a, b) for a in schema.add_effects)
                dele = frozenset(_substitute(a, b) for a in schema.del_effects) - add
                seen[key] = _bound(GroundAction(schema.name, args, pre, add, dele), schema, args)
                new_atoms |= add - reach
        if new_atoms:
            reach |= new_atoms
            index.add(sorted(new_atoms))
            delta = _Index(sorted(new_atoms))
            changed = True
    # drop behaviourally identical duplicates (e.g. permutations of free faces)
    actions, sig = [], set()
    for key in sorted(seen):
        a = seen[key]
        s = (a.name, a.pre, a.add, a.delete)
        if s not in sig:
            sig.add(s)
            actions.append(a)
    init = frozenset(a for a in problem.init if a[0] not in statics)
    return GroundTask(domain, problem, actions, init, frozenset(problem.goal), static_true)


# ---------------------------------------------------------------------------
# semantics

def apply(state: State, action: GroundAction) -> State:
    missing = action.pre - state
    if missing:
        raise NotApplicable(action, min(missing))
    return (state - action.delete) | action.add


@dataclass(frozen=True)
class Validation:
    ok: bool
    step: Optional[int] = None      # index of failing action; len(plan) for goal failure
    atom: Optional[Atom] = None
    final_state: Optional[State] = None

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "Ok"
        return f"FirstFailure(step={self.step}, atom={fmt_atom(self.atom)})"


def validate(plan: Sequence[GroundAction], s0: State, goal: Iterable[Atom]) -> Validation:
    state = frozenset(s0)
    for i, a in enumerate(plan):
        missing = a.pre - state
        if missing:
            return Validation(False, i, min(missing))
        state = (state - a.delete) | a.add
    unmet = frozenset(goal) - state
    if unmet:
        return Validation(False, len(plan), min(unmet), state)
    return Validation(True, final_state=state)


def well_formed_violations(state: State, objects: Iterable[str] = ()) -> List[str]:
    """Mutual-exclusion problems in ``state``: duplicate occupants, hand, base."""
    problems = []
    occ = defaultdict(list)
    bases = defaultdict(list)
    for a in state:
        if a[0] == "oc":
            occ[(a[1], a[2])].append(a[3])
        elif a[0] == "base":
            bases[a[1]].append(a[2])
    for (part, obj), vals in occ.items():
        if len(vals) > 1:
            problems.append(f"{part} of {obj} has {len(vals)} occupants {sorted(vals)}")
    if len(occ.get(("in", "hand"), [])) != 1:
        problems.append("hand occupancy must be exactly one atom")
    for obj, vals in bases.items():
        if len(vals) > 1:
            problems.append(f"{obj} has several base sides {sorted(vals)}")
    return problems


def instantiate(domain: Domain, statics: FrozenSet[Atom], name: str, args: Sequence[str]) -> GroundAction:
    """Ground one schema with explicit arguments, checking its static preconditions."""
    schema = domain.action(name)
    if len(args) != len(schema.parameters):
        raise ArityMismatch(f"{name} takes {len(schema.parameters)} arguments, got {len(args)}")
    b = dict(zip((v for v, _ in schema.parameters), args))
    static_preds = domain.static_predicates
    for lit in schema.precondition:
        if lit.atom[0] in static_preds:
            holds = _substitute(lit.atom, b) in statics
            if holds == lit.negated:
                raise NotApplicable(f"({name} {' '.join(args)})", _substitute(lit.atom, b))
    pre = frozenset(_substitute(l.atom, b) for l in schema.precondition
                    if not l.negated and l.atom[0] not in static_preds)
    add = frozenset(_substitute(a, b) for a in schema.add_effects)
    dele = frozenset(_substitute(a, b) for a in schema.del_effects) - add
    return _bound(GroundAction(name, tuple(args), pre, add, dele), schema, tuple(args))


def parse_action_string(text: str, task: GroundTask) -> GroundAction:
    """Ground an action written as ``(name arg ...)`` against ``task``."""
    toks = text.strip().strip("()").split()
    if not toks:
        raise ValueError("empty action")
    return instantiate(task.domain, task.statics, toks[0].lower(), tuple(toks[1:]))
