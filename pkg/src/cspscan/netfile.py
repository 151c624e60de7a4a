"""The network file format.

UTF-8 text, one directive per line, '#' starts a comment, tokens are
whitespace separated:

    VAR <name> <value>+          declare a variable and its domain
    CON <name> <var>+            open a constraint over the scope
    T <value>+                   one allowed tuple (inside CON..END)
    END                          close the constraint
    TREE root=<value> (<parent>:<child>)*
                                 value tree on the union of all domains
    ORDER <var>+                 total variable ordering

Value tokens cannot contain whitespace, ',', '(', ')' or '#'; the
format additionally rejects ':' and '=' in values because the TREE
directive uses them.  Scopes must be unique as sets.  `format_network`
emits a canonical form (declaration order, tuples sorted by domain
position) that re-parses to the same network byte for byte.
"""

from __future__ import annotations

from .errors import InputError, NetworkFormatError
from .model import Constraint, ConstraintNetwork, Variable
from .valuetree import ValueTree


def parse_network(text: str) -> ConstraintNetwork:
    variables: list[Variable] = []
    var_names: set[str] = set()
    constraints: list[Constraint] = []
    con_names: set[str] = set()
    scopes: set[frozenset[str]] = set()
    tree_spec: tuple[int, str, list[tuple[str, str]]] | None = None
    ordering: tuple[int, tuple[str, ...]] | None = None

    open_con: tuple[int, str, tuple[str, ...]] | None = None
    open_rows: list[tuple[str, ...]] = []

    def fail(line_no: int, message: str):
        raise NetworkFormatError(message, line_no)

    def check_value_token(line_no: int, tok: str) -> str:
        if ":" in tok or "=" in tok:
            fail(line_no, f"value token {tok!r} may not contain ':' or '='")
        return tok

    def domain_of(line_no: int, name: str) -> tuple[str, ...]:
        for v in variables:
            if v.name == name:
                return v.domain
        fail(line_no, f"unknown variable {name!r}")

    lines = text.splitlines()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        directive, args = tokens[0], tokens[1:]

        if directive == "T":
            if open_con is None:
                fail(line_no, "tuple line outside of a CON block")
            _, cname, scope = open_con
            if len(args) != len(scope):
                fail(
                    line_no,
                    f"tuple has {len(args)} values, constraint {cname} "
                    f"has arity {len(scope)}",
                )
            for x, val in zip(scope, args):
                if val not in domain_of(line_no, x):
                    fail(
                        line_no,
                        f"value {val!r} not in the domain of {x}",
                    )
            open_rows.append(tuple(args))
            continue

        if directive == "END":
            if open_con is None:
                fail(line_no, "END without an open CON block")
            if args:
                fail(line_no, "END takes no arguments")
            opened_at, cname, scope = open_con
            try:
                constraints.append(
                    Constraint(cname, scope, frozenset(open_rows))
                )
            except InputError as exc:
                fail(opened_at, str(exc))
            open_con = None
            open_rows = []
            continue

        if open_con is not None:
            fail(line_no, f"expected T or END inside constraint block, got {directive}")

        if directive == "VAR":
            if len(args) < 2:
                fail(line_no, "VAR needs a name and at least one value")
            name = args[0]
            if name in var_names:
                fail(line_no, f"duplicate variable name {name!r}")
            for tok in args[1:]:
                check_value_token(line_no, tok)
            try:
                variables.append(Variable(name, tuple(args[1:])))
            except InputError as exc:
                fail(line_no, str(exc))
            var_names.add(name)
        elif directive == "CON":
            if len(args) < 2:
                fail(line_no, "CON needs a name and at least one variable")
            name = args[0]
            if name in con_names:
                fail(line_no, f"duplicate constraint name {name!r}")
            scope = tuple(args[1:])
            for x in scope:
                domain_of(line_no, x)
            if len(set(scope)) != len(scope):
                fail(line_no, f"constraint {name}: repeated scope variable")
            key = frozenset(scope)
            if key in scopes:
                fail(
                    line_no,
                    f"constraint {name}: another constraint already covers "
                    f"the scope {{{','.join(sorted(scope))}}}",
                )
            scopes.add(key)
            con_names.add(name)
            open_con = (line_no, name, scope)
            open_rows = []
        elif directive == "TREE":
            if tree_spec is not None:
                fail(line_no, "duplicate TREE directive")
            if not args or not args[0].startswith("root="):
                fail(line_no, "TREE needs root=<value> first")
            root = args[0][len("root=") :]
            edges = []
            for tok in args[1:]:
                if tok.count(":") != 1:
                    fail(line_no, f"malformed tree edge {tok!r}")
                parent, child = tok.split(":")
                if not parent or not child:
                    fail(line_no, f"malformed tree edge {tok!r}")
                edges.append((parent, child))
            tree_spec = (line_no, root, edges)
        elif directive == "ORDER":
            if ordering is not None:
                fail(line_no, "duplicate ORDER directive")
            if not args:
                fail(line_no, "ORDER needs at least one variable")
            ordering = (line_no, tuple(args))
        else:
            fail(line_no, f"unknown directive {directive!r}")

    if open_con is not None:
        fail(open_con[0], f"constraint {open_con[1]} is never closed with END")
    if not variables:
        fail(max(len(lines), 1), "no variables declared")

    tree = None
    if tree_spec is not None:
        line_no, root, edges = tree_spec
        universe: dict[str, None] = {}
        for v in variables:
            for val in v.domain:
                universe.setdefault(val)
        members = set(universe)
        if root not in members:
            fail(line_no, f"tree root {root!r} is not a domain value")
        parent: dict[str, str] = {}
        for par, child in edges:
            if par not in members or child not in members:
                fail(line_no, f"tree edge {par}:{child} uses unknown values")
            if child == root or child in parent:
                fail(line_no, f"value {child!r} has two parents (or is the root)")
            parent[child] = par
        if len(parent) != len(members) - 1:
            fail(
                line_no,
                f"tree must have exactly {len(members) - 1} edges covering "
                "every domain value",
            )
        try:
            tree = ValueTree(tuple(universe), root, parent)
        except InputError as exc:
            fail(line_no, str(exc))

    order = None
    if ordering is not None:
        line_no, order = ordering
        if sorted(order) != sorted(var_names):
            fail(line_no, "ORDER must be a permutation of all variables")

    try:
        return ConstraintNetwork(variables, constraints, tree=tree, ordering=order)
    except InputError as exc:
        fail(max(len(lines), 1), str(exc))


def parse_file(path) -> ConstraintNetwork:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_network(handle.read())


def format_network(net: ConstraintNetwork) -> str:
    """Canonical text form; parsing it back yields an equal network."""
    out: list[str] = []
    for v in net.variables:
        out.append("VAR " + v.name + " " + " ".join(v.domain))
    for c in net.constraints:
        out.append("CON " + c.name + " " + " ".join(c.scope))
        keys = [net.domain_index(x) for x in c.scope]
        rows = sorted(
            c.tuples, key=lambda t: tuple(k[val] for k, val in zip(keys, t))
        )
        for row in rows:
            out.append("T " + " ".join(row))
        out.append("END")
    if net.tree is not None:
        edges = " ".join(f"{p}:{ch}" for p, ch in net.tree.edges())
        out.append(("TREE root=" + net.tree.root + " " + edges).rstrip())
    if net.ordering is not None:
        out.append("ORDER " + " ".join(net.ordering))
    return "\n".join(out) + "\n"
