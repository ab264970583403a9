"""Brute-force verification oracles over finite candidate windows.

m-separation is decided two independent ways: an active-trail reachability
pass over the window with every bidirected edge expanded into a fresh latent
common parent, and a plain enumeration of simple mixed paths.  On top of
those sit the back-door check, per-candidate verification of the interception
and blocking claims behind the criterion, and the construction of
direction-ambiguity witnesses.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from scgfd.criterion import CriterionReport, EffectQuery, check_front_door
from scgfd.estimand import MicroVertex, front_door_sets, build_bx_general
from scgfd.graph import Scg, ScgError, serialize_scg
from scgfd.unroll import (
    CandidateSpec,
    EdgeTemplate,
    WindowGraph,
    MicroV,
    WindowTooShortError,
    instantiate_window,
    iter_candidates,
)

_LATENT = "<latent>"


class CriterionNotSatisfiedError(ScgError):
    pass


def micro_descendants(ft: WindowGraph, v: MicroV) -> frozenset[MicroV]:
    ft.check_vertex(v)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for c in ft.children[u]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return frozenset(seen)


def micro_ancestors(ft: WindowGraph, v: MicroV) -> frozenset[MicroV]:
    ft.check_vertex(v)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for p in ft.parents[u]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return frozenset(seen)


def _expanded(ft: WindowGraph):
    """Parents/children maps with one latent vertex per bidirected edge."""
    parents = {v: list(ps) for v, ps in ft.parents.items()}
    children = {v: list(cs) for v, cs in ft.children.items()}
    for i, (u, v) in enumerate(sorted(ft.bi_edges)):
        lat = (_LATENT, i)
        parents[lat] = []
        children[lat] = [u, v]
        parents[u].append(lat)
        parents[v].append(lat)
    return parents, children


def _ancestors_of_set(parents, zs) -> set:
    seen = set(zs)
    stack = list(zs)
    while stack:
        u = stack.pop()
        for p in parents[u]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def _reachable(
    ft: WindowGraph,
    a: MicroV,
    targets,
    z,
    backdoor_only: bool = False,
    forbidden=frozenset(),
):
    """Active-trail reachability from a given z; optionally only paths whose
    first edge points into a, and never transiting forbidden vertices.
    Returns a witness trail (list of micro vertices, latents contracted) or
    None.

    The into-a restriction is realized by deleting a's outgoing directed
    edges before the walk (the back-door surgery), which also stops trails
    from bouncing off a latent parent straight back through a."""
    targets = set(targets)
    z = set(z)
    forbidden = set(forbidden)
    parents, children = _expanded(ft)
    if backdoor_only:
        for c in children[a]:
            parents[c] = [p for p in parents[c] if p != a]
        children[a] = []
    anz = _ancestors_of_set(parents, z)
    # state: (vertex, moving) with moving "up" (into parents) or "down"
    start: list[tuple] = [(p, "up") for p in parents[a]]
    start += [(c, "down") for c in children[a]]
    prev: dict[tuple, tuple | None] = {}
    queue = deque()
    for st in start:
        if st not in prev:
            prev[st] = None
            queue.append(st)
    hit = None
    while queue:
        state = queue.popleft()
        v, direction = state
        if v in targets:
            hit = state
            break
        if v in forbidden:
            continue
        nxt: list[tuple] = []
        if direction == "up":
            if v not in z:
                nxt += [(p, "up") for p in parents[v]]
                nxt += [(c, "down") for c in children[v]]
        else:
            if v not in z:
                nxt += [(c, "down") for c in children[v]]
            if v in anz:
                nxt += [(p, "up") for p in parents[v]]
        for st in nxt:
            if st not in prev:
                prev[st] = state
                queue.append(st)
    if hit is None:
        return None
    trail = []
    st: tuple | None = hit
    while st is not None:
        trail.append(st[0])
        st = prev[st]
    trail.append(a)
    trail.reverse()
    return [v for v in trail if v[0] != _LATENT]


def d_connected(ft: WindowGraph, a: MicroV, b: MicroV, z) -> bool:
    """m-connection via latent expansion plus active-trail reachability."""
    ft.check_vertex(a)
    ft.check_vertex(b)
    if a == b:
        raise ScgError("endpoints must differ")
    if a in z or b in z:
        raise ScgError("endpoints may not be conditioned")
    return _reachable(ft, a, {b}, z) is not None


def d_connected_by_paths(ft: WindowGraph, a: MicroV, b: MicroV, z) -> bool:
    """Independent cross-check: enumerate simple mixed paths and test each.

    Suitable for windows up to about twenty vertices.
    """
    ft.check_vertex(a)
    ft.check_vertex(b)
    if a == b:
        raise ScgError("endpoints must differ")
    z = set(z)
    if a in z or b in z:
        raise ScgError("endpoints may not be conditioned")

    def steps(u: MicroV):
        for c in ft.children[u]:
            yield c, "out"
        for p in ft.parents[u]:
            yield p, "in"
        for w in ft.bi_partners(u):
            yield w, "bi"

    desc_cache: dict[MicroV, frozenset[MicroV]] = {}

    def desc(v: MicroV) -> frozenset[MicroV]:
        if v not in desc_cache:
            desc_cache[v] = micro_descendants(ft, v)
        return desc_cache[v]

    def active(path_vs, path_marks) -> bool:
        for i in range(1, len(path_vs) - 1):
            left_head = path_marks[i - 1] in ("out", "bi")
            right_head = path_marks[i] in ("in", "bi")
            if left_head and right_head:  # collider at path_vs[i]
                if not (desc(path_vs[i]) & z):
                    return False
            else:
                if path_vs[i] in z:
                    return False
        return True

    found = False

    def walk(vs, marks):
        nonlocal found
        if found:
            return
        u = vs[-1]
        for w, mark in steps(u):
            if w in vs:
                continue
            if w == b:
                if active(vs + [w], marks + [mark]):
                    found = True
                    return
            else:
                walk(vs + [w], marks + [mark])

    walk([a], [])
    return found


def backdoor_holds(ft: WindowGraph, treatments, outcome: MicroV, z) -> tuple[bool, dict]:
    """Set back-door criterion: no conditioned descendant of a treatment, and
    for each treatment every into-treatment path to the outcome avoiding the
    other treatments is blocked by z plus those other treatments."""
    treatments = set(treatments)
    z = set(z)
    if treatments & z or outcome in treatments or outcome in z:
        raise ScgError("treatments, outcome, and z must be disjoint")
    for t in sorted(treatments):
        bad = sorted(z & micro_descendants(ft, t))
        if bad:
            return False, {"reason": "descendant_in_z", "treatment": t, "vertex": bad[0]}
    for t in sorted(treatments):
        others = treatments - {t}
        trail = _reachable(
            ft, t, {outcome}, z | others, backdoor_only=True, forbidden=others
        )
        if trail is not None:
            return False, {"reason": "open_backdoor", "treatment": t, "trail": trail}
    return True, {}


# ---------------------------------------------------------------------------
# per-candidate verification of the blocking claims


@dataclass(frozen=True)
class VerificationReport:
    scg: str
    query: dict
    candidates_checked: int
    truncated: bool
    violations: tuple[dict, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        def enc(o):
            if isinstance(o, tuple):
                return list(o)
            raise TypeError(type(o))

        return json.dumps(
            {
                "scg": self.scg,
                "query": self.query,
                "candidates_checked": self.candidates_checked,
                "truncated": self.truncated,
                "violations": [
                    {k: _jsonable(v) for k, v in sorted(viol.items())}
                    for viol in self.violations
                ],
            },
            sort_keys=True,
            default=enc,
        )


def _jsonable(v):
    if isinstance(v, tuple):
        return list(_jsonable(x) for x in v)
    if isinstance(v, list):
        return [_jsonable(x) for x in v]
    return v


def _place(mv: MicroVertex, anchor: int) -> MicroV:
    return (mv.series, anchor + mv.offset)


_BX_CHECK = {"4a": "cause_side_4a", "4c": "cause_side_4c", "4b": "cause_side_4b"}


def verify_front_door_claims(
    g: Scg,
    w,
    q: EffectQuery,
    L: int = 8,
    cap: int = 20000,
    report: CriterionReport | None = None,
) -> VerificationReport:
    """Check, in every candidate window, the interception and blocking claims
    that justify the do-free formula for this query and mediator set."""
    w = frozenset(w)
    if report is None:
        report = check_front_door(g, w, q)
    if not report.satisfied:
        raise CriterionNotSatisfiedError(
            f"criterion unsatisfied for {sorted(w)}: conditions={report.conditions}, "
            f"variant={report.variant}"
        )
    if L < 2 * (q.gamma + q.gamma_max) + 2:
        raise WindowTooShortError(
            f"window {L} too short; need at least {2 * (q.gamma + q.gamma_max) + 2}"
        )
    anchor = L - 1
    sets = front_door_sets(g, w, q, report.variant)
    general_bx = build_bx_general(g, w, q, condition_4a="4a" in report.variants_holding)
    cause = _place(MicroVertex(q.cause, -q.gamma), anchor)
    effect = _place(MicroVertex(q.effect, 0), anchor)
    f_micro = sorted(_place(mv, anchor) for mv in sets.f)
    bx_micro = sorted(_place(mv, anchor) for mv in sets.bx)
    gbx_micro = sorted(_place(mv, anchor) for mv in general_bx)
    bf_micro = sorted(_place(mv, anchor) for mv in sets.bf)
    bx_check = _BX_CHECK[report.variant]

    violations: list[dict] = []
    checked = 0
    truncated = False
    for idx, spec in enumerate(iter_candidates(g, q.gamma_max)):
        if checked >= cap:
            truncated = True
            break
        checked += 1
        ft = instantiate_window(spec, L)
        add = lambda check, detail: violations.append(
            {"candidate_index": idx, "check": check, **detail}
        )

        trail = _directed_path_avoiding(ft, cause, effect, avoid=set(f_micro))
        if trail is not None:
            add("interception", {"path": trail})

        for label, bset in ((bx_check, bx_micro), ("cause_side_general", gbx_micro)):
            for m in f_micro:
                ok, info = backdoor_holds(ft, {cause}, m, bset)
                if not ok:
                    add(label, {"target": m, **info})

        ok, info = backdoor_holds(ft, set(f_micro), effect, set(bf_micro) | {cause})
        if not ok:
            add("mediator_side", info)

        x_others = {
            v for v in ft.vertices if v[0] == q.cause and v != cause
        }
        for m in f_micro:
            trail = _reachable(
                ft, cause, {m}, set(), backdoor_only=True, forbidden=x_others
            )
            if trail is not None:
                add("cause_reentry", {"target": m, "trail": trail})
        w_series = {mv.series for mv in sets.f}
        for m in f_micro:
            blockers = x_others | {cause}
            blockers |= {v for v in ft.vertices if v[0] in w_series and v != m}
            trail = _reachable(
                ft, m, {effect}, set(), backdoor_only=True, forbidden=blockers
            )
            if trail is not None:
                add("mediator_reentry", {"source": m, "trail": trail})

    return VerificationReport(
        scg=serialize_scg(g),
        query={
            "cause": q.cause,
            "effect": q.effect,
            "gamma": q.gamma,
            "gamma_max": q.gamma_max,
            "mediators": sorted(w),
        },
        candidates_checked=checked,
        truncated=truncated,
        violations=tuple(violations),
    )


def _directed_path_avoiding(ft: WindowGraph, a: MicroV, b: MicroV, avoid) -> list | None:
    """A directed micro path from a to b with no interior vertex in avoid."""
    if a == b:
        return [a]
    prev = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for c in ft.children[u]:
            if c in prev:
                continue
            if c == b:
                path = [b, u]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.reverse()
                return path
            if c in avoid:
                continue
            prev[c] = u
            queue.append(c)
    return None


# ---------------------------------------------------------------------------
# structural-ambiguity and failure witnesses


def find_direction_ambiguity(
    g: Scg, a: str, b: str, gamma_max: int = 1
) -> tuple[CandidateSpec, CandidateSpec] | None:
    """Two candidates whose lag-zero parent relation between a_t and b_t is
    reversed; they exist exactly when the SCG carries the double arrow."""
    g.check_vertex(a)
    g.check_vertex(b)
    if a == b:
        raise ScgError("endpoints must differ")
    if (a, b) not in g.directed or (b, a) not in g.directed:
        return None

    def build(lag0_edge: tuple[str, str]) -> CandidateSpec:
        templates: set[EdgeTemplate] = set()
        for u, v in sorted(g.directed):
            lag = 0 if (u, v) == lag0_edge else 1
            templates.add(EdgeTemplate("directed", u, v, lag))
        for u, v in sorted(g.bidirected):
            if u == v:
                templates.add(EdgeTemplate("bidirected", u, v, 1))
            else:
                templates.add(EdgeTemplate("bidirected", u, v, 0))
        return CandidateSpec(g, gamma_max, frozenset(templates))

    return build((a, b)), build((b, a))


def demonstrate_unblockable(
    g: Scg, w, q: EffectQuery, L: int = 6, cap: int = 200
) -> dict | None:
    """Exhibit, in some candidate, an empty-set-active back-door micro path
    from the cause to a mediator instance whose interior consists only of
    descendants of the cause, so no admissible vertex can block it."""
    w = frozenset(w)
    anchor = L - 1
    cause = (q.cause, anchor - q.gamma)
    f_micro = sorted(
        (s, anchor - q.gamma + k) for s in sorted(w) for k in range(q.gamma + 1)
    )
    for idx, spec in enumerate(iter_candidates(g, q.gamma_max)):
        if idx >= cap:
            break
        ft = instantiate_window(spec, L)
        desc = micro_descendants(ft, cause)
        for m in f_micro:
            path = _active_backdoor_path(ft, cause, m)
            if path is None:
                continue
            if all(v in desc for v in path[1:-1]):
                return {"candidate_index": idx, "spec": spec, "path": path}
    return None


def _active_backdoor_path(ft: WindowGraph, a: MicroV, b: MicroV) -> list | None:
    """A simple empty-set-active mixed path from a to b starting into a,
    preferring the shortest; None if none exists."""
    best: list | None = None

    def steps(u: MicroV, first: bool):
        if not first:
            for c in ft.children[u]:
                yield c, "out"
        for p in ft.parents[u]:
            yield p, "in"
        for x in ft.bi_partners(u):
            yield x, "bi"

    def no_collider(vs, marks) -> bool:
        for i in range(1, len(vs) - 1):
            if marks[i - 1] in ("out", "bi") and marks[i] in ("in", "bi"):
                return False
        return True

    def walk(vs, marks):
        nonlocal best
        if best is not None and len(vs) >= len(best):
            return
        u = vs[-1]
        for v, mark in steps(u, first=len(vs) == 1):
            if v in vs:
                continue
            nxt_vs, nxt_marks = vs + [v], marks + [mark]
            if v == b:
                if no_collider(nxt_vs, nxt_marks) and (
                    best is None or len(nxt_vs) < len(best)
                ):
                    best = nxt_vs
            else:
                walk(nxt_vs, nxt_marks)

    walk([a], [])
    return best
