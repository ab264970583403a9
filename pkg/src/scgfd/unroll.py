"""Candidate full-time graphs compatible with an SCG, and finite windows.

Stationarity is encoded as edge templates: one choice per (edge, lag),
repeated across every time slice.  A candidate template set must project
back onto the SCG exactly (at least one template per SCG edge, none for a
non-edge) and its lag-zero directed templates must form an acyclic relation
over the series, since effects never precede causes and slices are acyclic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from scgfd.graph import Scg, ScgError


class WindowTooShortError(ScgError):
    pass


@dataclass(frozen=True, order=True)
class EdgeTemplate:
    """One stationary micro edge: (src, tau - lag) -> (dst, tau), or the
    bidirected analogue.  Lag-zero bidirected templates are unordered, so
    src <= dst canonically; lagged bidirected templates are directional in
    time (src is the earlier endpoint)."""

    kind: str  # "directed" | "bidirected"
    src: str
    dst: str
    lag: int

    def __post_init__(self):
        if self.kind not in ("directed", "bidirected"):
            raise ScgError(f"unknown template kind {self.kind!r}")
        if self.lag < 0:
            raise ScgError("template lag must be non-negative")
        if self.src == self.dst and self.lag == 0:
            raise ScgError("instantaneous self edges are forbidden")
        if self.kind == "bidirected" and self.lag == 0 and self.src > self.dst:
            raise ScgError("lag-zero bidirected templates are canonically ordered")


def template_options(g: Scg, gamma_max: int) -> dict[tuple, list[EdgeTemplate]]:
    """Admissible templates per SCG edge, keyed by the edge, values sorted."""
    if gamma_max < 1:
        raise ScgError("gamma_max must be at least 1")
    options: dict[tuple, list[EdgeTemplate]] = {}
    for a, b in sorted(g.directed):
        low = 1 if a == b else 0
        options[("directed", a, b)] = [
            EdgeTemplate("directed", a, b, lag) for lag in range(low, gamma_max + 1)
        ]
    for a, b in sorted(g.bidirected):
        opts = []
        if a != b:
            opts.append(EdgeTemplate("bidirected", a, b, 0))
            for lag in range(1, gamma_max + 1):
                opts.append(EdgeTemplate("bidirected", a, b, lag))
                opts.append(EdgeTemplate("bidirected", b, a, lag))
        else:
            opts = [
                EdgeTemplate("bidirected", a, b, lag) for lag in range(1, gamma_max + 1)
            ]
        options[("bidirected", a, b)] = sorted(opts)
    return options


def _lag0_acyclic(templates) -> bool:
    edges = [(t.src, t.dst) for t in templates if t.kind == "directed" and t.lag == 0]
    adj: dict[str, set[str]] = {}
    for a, b in edges:
        adj.setdefault(a, set()).add(b)
    state: dict[str, int] = {}

    def dfs(u: str) -> bool:
        state[u] = 1
        for v in adj.get(u, ()):
            if state.get(v, 0) == 1 or (state.get(v, 0) == 0 and not dfs(v)):
                return False
        state[u] = 2
        return True

    return all(state.get(u, 0) == 2 or dfs(u) for u in list(adj))


@dataclass(frozen=True)
class CandidateSpec:
    """A stationary candidate: its SCG, a max lag, and one template set."""

    scg: Scg
    gamma_max: int
    templates: frozenset[EdgeTemplate]

    def __post_init__(self):
        for t in self.templates:
            if t.lag > self.gamma_max:
                raise ScgError("template lag exceeds gamma_max")
        if latent_project(self) != self.scg:
            raise ScgError("templates do not project onto the declared SCG")
        if not _lag0_acyclic(self.templates):
            raise ScgError("lag-zero directed templates must be acyclic per slice")


def latent_project(spec: CandidateSpec) -> Scg:
    """The SCG induced by a template set over the spec's series."""
    directed = frozenset(
        (t.src, t.dst) for t in spec.templates if t.kind == "directed"
    )
    bidirected = frozenset(
        (min(t.src, t.dst), max(t.src, t.dst))
        for t in spec.templates
        if t.kind == "bidirected"
    )
    return Scg(spec.scg.series, directed, bidirected)


def iter_candidates(g: Scg, gamma_max: int) -> Iterator[CandidateSpec]:
    """Every compatible template set, lexicographic over per-edge bitmasks."""
    options = template_options(g, gamma_max)
    keys = sorted(options)
    option_lists = [options[k] for k in keys]

    def walk(i: int, chosen: list[EdgeTemplate]) -> Iterator[CandidateSpec]:
        if i == len(option_lists):
            if _lag0_acyclic(chosen):
                yield CandidateSpec(g, gamma_max, frozenset(chosen))
            return
        opts = option_lists[i]
        for mask in range(1, 1 << len(opts)):
            subset = [opts[j] for j in range(len(opts)) if mask & (1 << j)]
            yield from walk(i + 1, chosen + subset)

    if not option_lists:
        yield CandidateSpec(g, gamma_max, frozenset())
        return
    yield from walk(0, [])


@dataclass(frozen=True)
class Enumeration:
    candidates: tuple[CandidateSpec, ...]
    truncated: bool
    count: int


def enumerate_candidates(g: Scg, gamma_max: int, cap: int = 20000) -> Enumeration:
    if cap < 1:
        raise ScgError("cap must be at least 1")
    out: list[CandidateSpec] = []
    truncated = False
    for spec in iter_candidates(g, gamma_max):
        if len(out) >= cap:
            truncated = True
            break
        out.append(spec)
    return Enumeration(tuple(out), truncated, len(out))


def count_candidates(g: Scg, gamma_max: int) -> int:
    """Closed-form candidate count, independent of the enumeration stream.

    Product over edges of (2^{#templates} - 1), refined for per-slice
    acyclicity: sum over the acyclic lag-zero edge patterns of the number of
    per-edge subsets realizing that pattern.
    """
    options = template_options(g, gamma_max)
    bi_count = 1
    for key, opts in options.items():
        if key[0] == "bidirected":
            bi_count *= (1 << len(opts)) - 1
    dir_edges = [k for k in sorted(options) if k[0] == "directed"]
    with_lag0, without_lag0 = [], []
    for k in dir_edges:
        opts = options[k]
        has0 = any(t.lag == 0 for t in opts)
        n = len(opts)
        with_lag0.append((1 << (n - 1)) if has0 else 0)
        without_lag0.append(((1 << (n - 1)) - 1) if has0 else ((1 << n) - 1))
    total = 0
    m = len(dir_edges)
    for pattern in range(1 << m):
        chosen = [dir_edges[i][1:] for i in range(m) if pattern & (1 << i)]
        if not _lag0_acyclic(
            [EdgeTemplate("directed", a, b, 0) for a, b in chosen if a != b]
        ):
            continue
        if any(a == b for a, b in chosen):
            continue  # self edges have no lag-zero option
        ways = 1
        for i in range(m):
            ways *= with_lag0[i] if pattern & (1 << i) else without_lag0[i]
        total += ways
    return total * bi_count


# ---------------------------------------------------------------------------
# finite windows


MicroV = tuple[str, int]  # (series, absolute slice index in [0, L))


@dataclass(frozen=True)
class WindowGraph:
    """A finite window of a candidate: micro vertices with directed and
    bidirected edges instantiated wherever both endpoints fall inside."""

    window_length: int
    series: tuple[str, ...]
    parents: dict
    children: dict
    bi_edges: frozenset[tuple[MicroV, MicroV]]

    @property
    def vertices(self) -> list[MicroV]:
        return [(s, t) for t in range(self.window_length) for s in self.series]

    def bi_partners(self, v: MicroV) -> list[MicroV]:
        out = []
        for a, b in self.bi_edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return sorted(out)

    def check_vertex(self, v: MicroV) -> None:
        s, t = v
        if s not in self.series or not 0 <= t < self.window_length:
            raise ScgError(f"vertex {v} outside the window")


def instantiate_window(spec: CandidateSpec, L: int) -> WindowGraph:
    if L < spec.gamma_max + 1:
        raise WindowTooShortError(
            f"window length {L} cannot host lag {spec.gamma_max}"
        )
    parents: dict[MicroV, list[MicroV]] = {}
    children: dict[MicroV, list[MicroV]] = {}
    bi: set[tuple[MicroV, MicroV]] = set()
    series = spec.scg.series
    for t in range(L):
        for s in series:
            parents.setdefault((s, t), [])
            children.setdefault((s, t), [])
    for tmpl in sorted(spec.templates):
        for t in range(tmpl.lag, L):
            u = (tmpl.src, t - tmpl.lag)
            v = (tmpl.dst, t)
            if tmpl.kind == "directed":
                parents[v].append(u)
                children[u].append(v)
            else:
                bi.add(tuple(sorted((u, v))))
    for v in parents:
        parents[v] = sorted(set(parents[v]))
        children[v] = sorted(set(children[v]))
    ft = WindowGraph(L, series, parents, children, frozenset(bi))
    _assert_acyclic(ft)
    return ft


def _assert_acyclic(ft: WindowGraph) -> None:
    state: dict[MicroV, int] = {}

    def dfs(u: MicroV) -> bool:
        state[u] = 1
        for v in ft.children[u]:
            if (vt := state.get(v, 0)) == 1 or (vt == 0 and not dfs(v)):
                return False
        state[u] = 2
        return True

    for u in ft.vertices:
        if state.get(u, 0) == 0 and not dfs(u):
            raise ScgError("window graph is cyclic")
