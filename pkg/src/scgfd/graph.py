"""Summary causal graphs: parsing, paths, cycles, and blocking semantics.

A summary causal graph (SCG) has one vertex per time series, directed edges
(self-loops allowed, reciprocal pairs form the double-arrow pattern), and
dashed bidirected edges marking latent confounding.  Path blocking on an SCG
is deliberately more conservative than d-separation: the middle-vertex
patterns that count as colliders or non-colliders are restricted ("strict")
because a macro edge stands for an unknown family of lagged micro edges.
"""

from __future__ import annotations

import enum
import itertools
import logging
import re
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


class ScgError(Exception):
    """Base class for SCG construction and query errors."""


class ScgParseError(ScgError):
    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnknownVertexError(ScgError):
    pass


class InvalidPathError(ScgError):
    pass


class LinkMark(enum.Enum):
    """Mark of one adjacency on a path, read from the earlier path vertex."""

    FORWARD = "->"
    BACKWARD = "<-"
    BOTH = "<=>"
    BIDIRECTED = "<->"


class PathKind(enum.Enum):
    DIRECTED = "directed"
    BACKDOOR = "backdoor"
    OTHER = "other"


@dataclass(frozen=True)
class Scg:
    """Immutable summary causal graph.

    A reciprocal pair A->B plus B->A is stored as the two directed edges;
    the double-arrow link mark is derived.  Bidirected edges are stored as
    canonically ordered pairs and may coexist with directed edges on the
    same pair of series.
    """

    series: tuple[str, ...]
    directed: frozenset[tuple[str, str]]
    bidirected: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(sorted(self.series)))
        if len(set(self.series)) != len(self.series):
            raise ScgError("duplicate series name")
        for name in self.series:
            if not _NAME_RE.match(name):
                raise ScgError(f"invalid series name {name!r}")
        known = set(self.series)
        for a, b in self.directed:
            if a not in known or b not in known:
                raise UnknownVertexError(f"edge endpoint not declared: {a} -> {b}")
        canon = set()
        for a, b in self.bidirected:
            if a not in known or b not in known:
                raise UnknownVertexError(f"edge endpoint not declared: {a} <-> {b}")
            canon.add((min(a, b), max(a, b)))
        object.__setattr__(self, "directed", frozenset(self.directed))
        object.__setattr__(self, "bidirected", frozenset(canon))

    def check_vertex(self, v: str) -> None:
        if v not in self.series:
            raise UnknownVertexError(f"unknown vertex {v!r}")

    def has_bidirected(self, a: str, b: str) -> bool:
        return (min(a, b), max(a, b)) in self.bidirected

    def directed_mark(self, a: str, b: str) -> LinkMark | None:
        """Link mark of the directed-edge configuration from a to b, if any."""
        ab = (a, b) in self.directed
        ba = (b, a) in self.directed
        if ab and ba:
            return LinkMark.BOTH
        if ab:
            return LinkMark.FORWARD
        if ba:
            return LinkMark.BACKWARD
        return None

    def link_marks(self, a: str, b: str) -> list[LinkMark]:
        """All marks available between two distinct adjacent series."""
        marks = []
        dm = self.directed_mark(a, b)
        if dm is not None:
            marks.append(dm)
        if a != b and self.has_bidirected(a, b):
            marks.append(LinkMark.BIDIRECTED)
        return marks


@dataclass(frozen=True)
class ScgPath:
    """A simple path: distinct vertices plus one explicit mark per adjacency."""

    vertices: tuple[str, ...]
    links: tuple[LinkMark, ...]

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise InvalidPathError("a path needs at least one link")
        if len(set(self.vertices)) != len(self.vertices):
            raise InvalidPathError("path vertices must be distinct")
        if len(self.links) != len(self.vertices) - 1:
            raise InvalidPathError("need exactly one link mark per adjacency")

    def reverse(self) -> "ScgPath":
        flip = {
            LinkMark.FORWARD: LinkMark.BACKWARD,
            LinkMark.BACKWARD: LinkMark.FORWARD,
            LinkMark.BOTH: LinkMark.BOTH,
            LinkMark.BIDIRECTED: LinkMark.BIDIRECTED,
        }
        return ScgPath(
            tuple(reversed(self.vertices)),
            tuple(flip[m] for m in reversed(self.links)),
        )

    def __str__(self) -> str:
        parts = [self.vertices[0]]
        for mark, v in zip(self.links, self.vertices[1:]):
            parts.append(mark.value)
            parts.append(v)
        return " ".join(parts)


def validate_path(g: Scg, p: ScgPath) -> None:
    """Raise unless every vertex is declared and every mark matches the edge set."""
    for v in p.vertices:
        g.check_vertex(v)
    for (a, b), mark in zip(itertools.pairwise(p.vertices), p.links):
        if mark not in g.link_marks(a, b):
            raise InvalidPathError(f"mark {a} {mark.value} {b} not present in graph")


# ---------------------------------------------------------------------------
# parsing and serialization


def parse_scg(text: str) -> Scg:
    """Parse the line-based SCG file format.

    First non-comment line declares the series; each following line is one
    edge, ``A -> B`` or ``A <-> B``.  ``#`` starts a comment.
    """
    series: list[str] | None = None
    directed: set[tuple[str, str]] = set()
    bidirected: set[tuple[str, str]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if series is None:
            if tokens[0] != "series" or len(tokens) < 2:
                raise ScgParseError("expected 'series N1 N2 ...'", line_no)
            series = tokens[1:]
            seen = set()
            for name in series:
                if not _NAME_RE.match(name):
                    raise ScgParseError(f"invalid series name {name!r}", line_no)
                if name in seen:
                    raise ScgParseError(f"duplicate series {name!r}", line_no)
                seen.add(name)
            continue
        if len(tokens) != 3 or tokens[1] not in ("->", "<->"):
            raise ScgParseError(f"expected 'A -> B' or 'A <-> B', got {line!r}", line_no)
        a, op, b = tokens
        for v in (a, b):
            if v not in series:
                raise ScgParseError(f"undeclared series {v!r}", line_no)
        if op == "->":
            if (a, b) in directed:
                raise ScgParseError(f"duplicate edge {a} -> {b}", line_no)
            directed.add((a, b))
        else:
            pair = (min(a, b), max(a, b))
            if pair in bidirected:
                raise ScgParseError(f"duplicate edge {a} <-> {b}", line_no)
            bidirected.add(pair)
    if series is None:
        raise ScgParseError("empty input, expected a series declaration", 1)
    return Scg(tuple(series), frozenset(directed), frozenset(bidirected))


def serialize_scg(g: Scg) -> str:
    """Canonical byte-stable text form: sorted series, then sorted edges."""
    lines = ["series " + " ".join(g.series)]
    lines += [f"{a} -> {b}" for a, b in sorted(g.directed)]
    lines += [f"{a} <-> {b}" for a, b in sorted(g.bidirected)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# parents / ancestors / descendants / cycles


def scg_parents(g: Scg, v: str) -> frozenset[str]:
    """All A with A -> v (bidirected edges never create parents)."""
    g.check_vertex(v)
    return frozenset(a for a, b in g.directed if b == v)


def _closure(g: Scg, v: str, forward: bool) -> frozenset[str]:
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for a, b in g.directed:
            nxt = b if (a == u and forward) else a if (b == u and not forward) else None
            if nxt is not None and nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


def scg_descendants(g: Scg, v: str) -> frozenset[str]:
    """Reflexive-transitive closure over directed edges."""
    g.check_vertex(v)
    return _closure(g, v, forward=True)


def scg_ancestors(g: Scg, v: str) -> frozenset[str]:
    g.check_vertex(v)
    return _closure(g, v, forward=False)


def scg_ancestors_of_set(g: Scg, vs) -> frozenset[str]:
    return frozenset().union(*(scg_ancestors(g, v) for v in vs)) if vs else frozenset()


def scg_descendants_of_set(g: Scg, vs) -> frozenset[str]:
    return frozenset().union(*(scg_descendants(g, v) for v in vs)) if vs else frozenset()


class CycleKind(enum.Enum):
    NONE = "none"
    SELF_LOOP_ONLY = "self_loop_only"
    HAS_LARGER_CYCLE = "has_larger_cycle"


@dataclass(frozen=True)
class CycleSummary:
    kind: CycleKind
    witnesses: tuple[tuple[str, ...], ...] = field(default_factory=tuple)


def cycles_containing(g: Scg, v: str) -> CycleSummary:
    """Classify the directed cycles through v and list witness cycles.

    A witness is the vertex sequence with the start repeated, e.g.
    ``(X, U, X)``; the self-loop witness is ``(X, X)``.
    """
    g.check_vertex(v)
    witnesses: list[tuple[str, ...]] = []
    if (v, v) in g.directed:
        witnesses.append((v, v))

    def extend(path: list[str]):
        u = path[-1]
        for a, b in sorted(g.directed):
            if a != u or a == b:
                continue
            if b == v:
                witnesses.append(tuple(path) + (v,))
            elif b not in path:
                extend(path + [b])

    extend([v])
    larger = any(len(w) > 2 for w in witnesses)
    if larger:
        kind = CycleKind.HAS_LARGER_CYCLE
    elif witnesses:
        kind = CycleKind.SELF_LOOP_ONLY
    else:
        kind = CycleKind.NONE
    return CycleSummary(kind, tuple(sorted(witnesses, key=lambda w: (len(w), w))))


# ---------------------------------------------------------------------------
# path enumeration and classification


def enumerate_scg_paths(g: Scg, a: str, b: str) -> list[ScgPath]:
    """All simple paths from a to b, one per mark choice, in canonical order.

    Self-loops never occur inside a path (vertices are distinct); a pair
    joined by both a directed configuration and a bidirected edge yields one
    path per mark.
    """
    g.check_vertex(a)
    g.check_vertex(b)
    if a == b:
        raise ScgError("path endpoints must differ")
    out: list[ScgPath] = []

    def walk(vertices: list[str], links: list[LinkMark]):
        u = vertices[-1]
        for v in g.series:
            if v == u or v in vertices:
                continue
            for mark in g.link_marks(u, v):
                if v == b:
                    out.append(ScgPath(tuple(vertices) + (v,), tuple(links) + (mark,)))
                else:
                    walk(vertices + [v], links + [mark])

    walk([a], [])
    out.sort(key=lambda p: (p.vertices, tuple(m.value for m in p.links)))
    return out


def classify_scg_path(p: ScgPath) -> PathKind:
    """Directed, back-door, or other.

    A directed path starts with a forward mark and carries no plain backward
    mark; a double-arrow or bidirected link does not point *strictly* toward
    the start, so it may occur in the interior.  A back-door path starts with
    a backward, bidirected, or double-arrow mark.
    """
    first = p.links[0]
    if first in (LinkMark.BACKWARD, LinkMark.BIDIRECTED, LinkMark.BOTH):
        return PathKind.BACKDOOR
    if all(m is not LinkMark.BACKWARD for m in p.links):
        return PathKind.DIRECTED
    return PathKind.OTHER


class _Side(enum.Enum):
    IN = "in"        # plain directed edge with its head at the middle vertex
    OUT = "out"      # plain directed edge with its tail at the middle vertex
    BOTH = "both"    # reciprocal pair (double arrow)
    BI = "bi"        # bidirected edge (head at the middle vertex)


_LEFT_SIDE = {
    LinkMark.FORWARD: _Side.IN,
    LinkMark.BACKWARD: _Side.OUT,
    LinkMark.BOTH: _Side.BOTH,
    LinkMark.BIDIRECTED: _Side.BI,
}
_RIGHT_SIDE = {
    LinkMark.FORWARD: _Side.OUT,
    LinkMark.BACKWARD: _Side.IN,
    LinkMark.BOTH: _Side.BOTH,
    LinkMark.BIDIRECTED: _Side.BI,
}


class MiddleKind(enum.Enum):
    STRICT_COLLIDER = "strict_collider"
    STRICT_NON_COLLIDER = "strict_non_collider"
    NEITHER = "neither"


def middle_vertex_kind(p: ScgPath, i: int) -> MiddleKind:
    """Classify the i-th path vertex (0 < i < last) per the strict patterns.

    Strict collider: both adjacent links carry an arrowhead into the vertex
    and neither is a double arrow.  Strict non-collider: at least one
    adjacent link is a plain directed edge out of the vertex.  Patterns
    involving a double arrow on the head side are neither, by the explicit
    exclusions; remaining unlisted combinations are also neither.
    """
    if not 0 < i < len(p.vertices) - 1:
        raise InvalidPathError("not a middle vertex")
    left = _LEFT_SIDE[p.links[i - 1]]
    right = _RIGHT_SIDE[p.links[i]]
    sides = {left, right}
    if sides <= {_Side.IN, _Side.BI}:
        return MiddleKind.STRICT_COLLIDER
    if _Side.OUT in sides:
        return MiddleKind.STRICT_NON_COLLIDER
    logger.debug(
        "path %s: vertex %s has non-strict pattern (%s, %s)",
        p, p.vertices[i], left.value, right.value,
    )
    return MiddleKind.NEITHER


def scg_path_blocked(g: Scg, p: ScgPath, cond: frozenset[str] | set[str]) -> bool:
    """Blocking per the strict-pattern rules.

    Blocked iff some middle vertex is a strict collider none of whose
    descendants is conditioned, or a conditioned strict non-collider with a
    directed edge to a path-adjacent vertex that does not close a cycle back
    to it.
    """
    cond = frozenset(cond)
    endpoints = {p.vertices[0], p.vertices[-1]}
    if cond & endpoints:
        raise ScgError("conditioning set may not contain a path endpoint")
    for i in range(1, len(p.vertices) - 1):
        m = p.vertices[i]
        kind = middle_vertex_kind(p, i)
        if kind is MiddleKind.STRICT_COLLIDER:
            if not (cond & scg_descendants(g, m)):
                return True
        elif kind is MiddleKind.STRICT_NON_COLLIDER and m in cond:
            for nb in (p.vertices[i - 1], p.vertices[i + 1]):
                if (m, nb) in g.directed and m not in scg_descendants(g, nb):
                    return True
    return False


def path_activated(g: Scg, p: ScgPath, cond=frozenset()) -> bool:
    return not scg_path_blocked(g, p, cond)


# ---------------------------------------------------------------------------
# the three relational queries behind the criterion


def has_activated_backdoor(
    g: Scg, x: str, targets
) -> tuple[bool, ScgPath | None]:
    """Does some back-door path from x to a target stay activated by the empty set?"""
    g.check_vertex(x)
    targets = frozenset(targets)
    if x in targets:
        raise ScgError("x may not be one of the targets")
    for t in sorted(targets):
        for p in enumerate_scg_paths(g, x, t):
            if classify_scg_path(p) is PathKind.BACKDOOR and path_activated(g, p):
                return True, p
    return False, None


def backdoors_blocked_by_x(
    g: Scg, sources, y: str, x: str
) -> tuple[bool, ScgPath | None]:
    """Is every back-door path from each source to y blocked by {x}?"""
    g.check_vertex(y)
    g.check_vertex(x)
    sources = frozenset(sources)
    if y in sources:
        raise ScgError("y may not be one of the sources")
    for s in sorted(sources):
        for p in enumerate_scg_paths(g, s, y):
            if classify_scg_path(p) is not PathKind.BACKDOOR:
                continue
            if not scg_path_blocked(g, p, frozenset({x})):
                return False, p
    return True, None


def intercepts_all_activated_directed(
    g: Scg, w, x: str, y: str
) -> tuple[bool, ScgPath | None]:
    """Does w meet every directed path from x to y that is activated by the empty set?"""
    g.check_vertex(x)
    g.check_vertex(y)
    w = frozenset(w)
    if x in w or y in w:
        raise ScgError("interception set may not contain an endpoint")
    if x == y:
        raise ScgError("endpoints must differ")
    for p in enumerate_scg_paths(g, x, y):
        if classify_scg_path(p) is not PathKind.DIRECTED:
            continue
        if not path_activated(g, p):
            continue
        if not (w & set(p.vertices[1:-1])):
            return False, p
    return True, None


def activated_directed_paths(g: Scg, x: str, y: str) -> list[ScgPath]:
    return [
        p
        for p in enumerate_scg_paths(g, x, y)
        if classify_scg_path(p) is PathKind.DIRECTED and path_activated(g, p)
    ]
