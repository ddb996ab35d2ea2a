"""Parsers for PDDL domains and problems (STRIPS with typing).

Keywords are matched case-insensitively and identifiers are lowercased, so
``(:INIT (On B1 B2))`` and ``(:init (on b1 b2))`` parse to the same AST.
"""

from __future__ import annotations

from .ast import ROOT_TYPE, ActionSchema, Atom, PddlDomain, PddlProblem, PredicateSchema
from .diagnostics import Issue, PddlError, error, warning
from .sexpr import Node, SList, Symbol, read

SUPPORTED_REQUIREMENTS = {":strips", ":typing"}


def _loc(node: Node) -> tuple[int, int]:
    return node.line, node.col


def _sym(node: Node, what: str) -> str:
    if not isinstance(node, Symbol):
        raise PddlError([error("MALFORMED", f"expected {what}, found a list", *_loc(node))])
    return node.text.lower()


def _head(node: Node) -> str | None:
    if isinstance(node, SList) and node.items and isinstance(node.items[0], Symbol):
        return node.items[0].text.lower()
    return None


def _define_form(text: str, kind: str) -> tuple[str, SList, list[Node]]:
    """Locate ``(define (<kind> NAME) ...)`` and return (name, form, sections)."""
    forms = read(text)
    if not forms:
        raise PddlError([error("EMPTY_INPUT", "no PDDL form found", 1, 1)])
    form = forms[0]
    if len(forms) > 1:
        extra = forms[1]
        raise PddlError([error("TRAILING_INPUT", "unexpected content after define form", *_loc(extra))])
    if _head(form) != "define":
        raise PddlError([error("MALFORMED", "expected (define ...)", *_loc(form))])
    if len(form) < 2 or _head(form[1]) != kind:
        where = form[1] if len(form) > 1 else form
        raise PddlError([error("MALFORMED", f"expected ({kind} NAME) after define", *_loc(where))])
    header = form[1]
    if len(header) != 2:
        raise PddlError([error("MALFORMED", f"({kind} NAME) takes exactly one name", *_loc(header))])
    name = _sym(header[1], f"{kind} name")
    return name, form, list(form.items[2:])


def _typed_list(nodes, what: str, allow_vars: bool) -> list[tuple[str, str, int, int]]:
    """Parse ``a b - t c`` into [(a, t), (b, t), (c, object)] with locations."""
    out: list[tuple[str, str, int, int]] = []
    pending: list[Symbol] = []
    i = 0
    items = list(nodes)
    while i < len(items):
        node = items[i]
        if isinstance(node, SList):
            raise PddlError([error("MALFORMED", f"unexpected list in {what}", *_loc(node))])
        if node.text == "-":
            if not pending:
                raise PddlError([error("MALFORMED", f"'-' without names in {what}", *_loc(node))])
            if i + 1 >= len(items):
                raise PddlError([error("MALFORMED", f"missing type after '-' in {what}", *_loc(node))])
            tnode = items[i + 1]
            if isinstance(tnode, SList):
                raise PddlError([error("UNSUPPORTED", "either-types are not supported", *_loc(tnode))])
            tname = tnode.text.lower()
            for p in pending:
                out.append((p.text.lower(), tname, p.line, p.col))
            pending = []
            i += 2
            continue
        is_var = node.text.startswith("?")
        if is_var != allow_vars:
            kind = "variable" if allow_vars else "name"
            raise PddlError([error("MALFORMED", f"expected a {kind} in {what}, got {node.text!r}", *_loc(node))])
        pending.append(node)
        i += 1
    for p in pending:
        out.append((p.text.lower(), ROOT_TYPE, p.line, p.col))
    return out


def _atom(node: Node, what: str) -> Atom:
    if not isinstance(node, SList) or not node.items:
        raise PddlError([error("MALFORMED", f"expected an atom in {what}", *_loc(node))])
    head = _head(node)
    if head is None:
        raise PddlError([error("MALFORMED", f"expected predicate name in {what}", *_loc(node))])
    if head in ("not", "and", "or", "imply", "exists", "forall", "when", "="):
        raise PddlError([error("UNSUPPORTED", f"'{head}' is not supported in {what}", *_loc(node))])
    args = tuple(_sym(a, "argument") for a in node.items[1:])
    return Atom(head, args, node.line, node.col)


def _conjunction(node: Node, what: str, allow_negation: bool) -> tuple[list[Atom], list[Atom]]:
    """Split ``(and ...)`` / single literal into (positive, negative) atoms."""
    if isinstance(node, Symbol):
        raise PddlError([error("MALFORMED", f"expected a formula in {what}", *_loc(node))])
    head = _head(node)
    parts = list(node.items[1:]) if head == "and" else ([node] if node.items else [])
    pos: list[Atom] = []
    neg: list[Atom] = []
    for part in parts:
        if _head(part) == "not":
            if not allow_negation:
                raise PddlError([error("UNSUPPORTED", f"negative literals are not supported in {what}", *_loc(part))])
            if len(part) != 2:
                raise PddlError([error("MALFORMED", "(not ...) takes one atom", *_loc(part))])
            neg.append(_atom(part[1], what))
        else:
            pos.append(_atom(part, what))
    return pos, neg


def _parse_action(node: SList) -> ActionSchema:
    if len(node) < 2:
        raise PddlError([error("MALFORMED_ACTION", "action without a name", *_loc(node))])
    name = _sym(node[1], "action name")
    fields: dict[str, Node] = {}
    rest = list(node.items[2:])
    if len(rest) % 2:
        raise PddlError([error("MALFORMED_ACTION", f"action {name}: odd number of key/value items", *_loc(node))])
    for key, value in zip(rest[::2], rest[1::2]):
        k = _sym(key, "action keyword")
        if k not in (":parameters", ":precondition", ":effect"):
            raise PddlError([error("MALFORMED_ACTION", f"action {name}: unknown keyword {k}", *_loc(key))])
        if k in fields:
            raise PddlError([error("MALFORMED_ACTION", f"action {name}: duplicate {k}", *_loc(key))])
        fields[k] = value
    params: list[tuple[str, str]] = []
    if ":parameters" in fields:
        pnode = fields[":parameters"]
        if not isinstance(pnode, SList):
            raise PddlError([error("MALFORMED_ACTION", f"action {name}: parameters must be a list", *_loc(pnode))])
        params = [(v, t) for v, t, _, _ in _typed_list(pnode.items, f"action {name} parameters", True)]
    pre: list[Atom] = []
    if ":precondition" in fields:
        pre, _ = _conjunction(fields[":precondition"], f"precondition of {name}", allow_negation=False)
    add: list[Atom] = []
    dele: list[Atom] = []
    if ":effect" in fields:
        add, dele = _conjunction(fields[":effect"], f"effect of {name}", allow_negation=True)
    return ActionSchema(name, tuple(params), tuple(pre), tuple(add), tuple(dele))


def _check_domain(domain: PddlDomain, issues: list[Issue], action_locs: dict[str, tuple[int, int]]) -> None:
    for pred in domain.predicates:
        for _, t in pred.params:
            if not domain.has_type(t):
                issues.append(error("UNDECLARED_TYPE", f"predicate {pred.name} uses undeclared type {t}"))
    for act in domain.actions:
        line, col = action_locs.get(act.name, (None, None))
        scope: dict[str, str] = {}
        for v, t in act.params:
            if not domain.has_type(t):
                issues.append(error("UNDECLARED_TYPE", f"action {act.name} uses undeclared type {t}", line, col))
            if v in scope:
                issues.append(error("DUPLICATE_PARAMETER", f"action {act.name} repeats parameter {v}", line, col))
            scope[v] = t
        for atom in (*act.precondition, *act.add, *act.delete):
            schema = domain.predicate_map.get(atom.predicate)
            if schema is None:
                issues.append(error("UNKNOWN_PREDICATE", f"action {act.name} uses undeclared predicate {atom.predicate}", atom.line, atom.col))
                continue
            if schema.arity != len(atom.args):
                issues.append(error("ARITY_MISMATCH", f"{atom} in {act.name}: {atom.predicate} takes {schema.arity} argument(s)", atom.line, atom.col))
            for arg in atom.args:
                if not arg.startswith("?"):
                    issues.append(error("UNSUPPORTED", f"constant {arg} in action {act.name}; constants are not supported", atom.line, atom.col))
                elif arg not in scope:
                    issues.append(error("UNDECLARED_VARIABLE", f"{arg} is not a parameter of {act.name}", atom.line, atom.col))
        both = {a.key for a in act.add} & {a.key for a in act.delete}
        for pred, args in sorted(both):
            issues.append(error("CONTRADICTORY_EFFECT", f"action {act.name} both adds and deletes {Atom(pred, args)}", line, col))


def parse_domain(text: str) -> PddlDomain:
    """Parse a ``(define (domain ...))`` form, raising PddlError on failure."""
    name, form, sections = _define_form(text, "domain")
    issues: list[Issue] = []
    requirements: list[str] = []
    types: dict[str, str] = {}
    predicates: list[PredicateSchema] = []
    actions: list[ActionSchema] = []
    action_locs: dict[str, tuple[int, int]] = {}
    seen_predicates_section = False
    for sec in sections:
        head = _head(sec)
        if head is None:
            raise PddlError([error("MALFORMED", "expected a domain section", *_loc(sec))])
        if head == ":requirements":
            for r in sec.items[1:]:
                req = _sym(r, "requirement")
                if req not in SUPPORTED_REQUIREMENTS:
                    issues.append(error("UNSUPPORTED_REQUIREMENT", f"requirement {req} is not supported", *_loc(r)))
                requirements.append(req)
        elif head == ":types":
            for tname, parent, line, col in _typed_list(sec.items[1:], ":types", False):
                if tname == ROOT_TYPE:
                    continue
                if tname in types and types[tname] != parent:
                    issues.append(error("DUPLICATE_TYPE", f"type {tname} declared twice", line, col))
                types[tname] = parent
        elif head == ":predicates":
            seen_predicates_section = True
            for p in sec.items[1:]:
                if not isinstance(p, SList) or _head(p) is None:
                    raise PddlError([error("MALFORMED", "expected (predicate ?args)", *_loc(p))])
                pname = _head(p)
                params = [(v, t) for v, t, _, _ in _typed_list(p.items[1:], f"predicate {pname}", True)]
                if any(q.name == pname for q in predicates):
                    issues.append(error("DUPLICATE_PREDICATE", f"predicate {pname} declared twice", *_loc(p)))
                    continue
                predicates.append(PredicateSchema(pname, tuple(params)))
        elif head == ":action":
            act = _parse_action(sec)
            if act.name in action_locs:
                issues.append(error("DUPLICATE_ACTION", f"action {act.name} declared twice", *_loc(sec)))
                continue
            action_locs[act.name] = _loc(sec)
            actions.append(act)
        else:
            raise PddlError([error("UNSUPPORTED_SECTION", f"section {head} is not supported", *_loc(sec))])
    # Supertypes named only after '-' are implicitly declared under object.
    for parent in list(types.values()):
        if parent != ROOT_TYPE and parent not in types:
            types[parent] = ROOT_TYPE
    if actions and not seen_predicates_section:
        issues.append(error("MISSING_PREDICATES", "domain has actions but no :predicates section", *_loc(form)))
    domain = PddlDomain(name, tuple(requirements), tuple(types.items()), tuple(predicates), tuple(actions))
    _check_domain(domain, issues, action_locs)
    if issues:
        raise PddlError(issues)
    return domain


def parse_problem(text: str) -> PddlProblem:
    """Parse a ``(define (problem ...))`` form, raising PddlError on failure.

    Duplicate init atoms collapse to one and leave a DUPLICATE_INIT warning on
    the returned problem's ``warnings``.
    """
    name, form, sections = _define_form(text, "problem")
    issues: list[Issue] = []
    warnings: list[Issue] = []
    domain_name: str | None = None
    objects: dict[str, str] = {}
    init: dict[Atom, Atom] = {}
    goal: list[Atom] | None = None
    seen_init = False
    for sec in sections:
        head = _head(sec)
        if head is None:
            raise PddlError([error("MALFORMED", "expected a problem section", *_loc(sec))])
        if head == ":domain":
            if len(sec) != 2:
                raise PddlError([error("MALFORMED", "(:domain NAME) takes one name", *_loc(sec))])
            domain_name = _sym(sec[1], "domain name")
        elif head == ":requirements":
            continue
        elif head == ":objects":
            for oname, otype, line, col in _typed_list(sec.items[1:], ":objects", False):
                if oname in objects:
                    if objects[oname] != otype:
                        issues.append(error("DUPLICATE_OBJECT", f"object {oname} declared with types {objects[oname]} and {otype}", line, col))
                    else:
                        warnings.append(warning("DUPLICATE_OBJECT", f"object {oname} declared twice", line, col))
                    continue
                objects[oname] = otype
        elif head == ":init":
            seen_init = True
            for node in sec.items[1:]:
                atom = _atom(node, ":init")
                if any(a.startswith("?") for a in atom.args):
                    issues.append(error("NON_GROUND_ATOM", f"{atom} in :init contains a variable", atom.line, atom.col))
                if atom in init:
                    warnings.append(warning("DUPLICATE_INIT", f"{atom} appears more than once in :init", atom.line, atom.col))
                    continue
                init[atom] = atom
        elif head == ":goal":
            if len(sec) != 2:
                raise PddlError([error("MALFORMED", "(:goal FORMULA) takes one formula", *_loc(sec))])
            goal, _ = _conjunction(sec[1], ":goal", allow_negation=False)
            for atom in goal:
                if any(a.startswith("?") for a in atom.args):
                    issues.append(error("NON_GROUND_ATOM", f"{atom} in :goal contains a variable", atom.line, atom.col))
            if not goal:
                issues.append(error("EMPTY_GOAL", "goal is empty", *_loc(sec)))
        else:
            raise PddlError([error("UNSUPPORTED_SECTION", f"section {head} is not supported", *_loc(sec))])
    if domain_name is None:
        issues.append(error("MISSING_DOMAIN", "problem has no (:domain ...) section", *_loc(form)))
    if not seen_init:
        issues.append(error("MISSING_INIT", "problem has no (:init ...) section", *_loc(form)))
    if goal is None:
        issues.append(error("MISSING_GOAL", "problem has no (:goal ...) section", *_loc(form)))
    if issues:
        raise PddlError(issues)
    return PddlProblem(name, domain_name, tuple(objects.items()), frozenset(init), tuple(goal), tuple(warnings))
