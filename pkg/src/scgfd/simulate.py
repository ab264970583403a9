"""Discrete dynamic structural causal models over a candidate window.

Each observed micro vertex gets a conditional probability table over its
in-window parents plus one latent parent per incident bidirected edge;
vertices with the same parent shape share one table (stationarity), while
truncated boundary slices get their own tables over the surviving parents.
Every probability is floored away from zero so that conditioning events in
the estimand always have positive mass.

Exact inference introduces variables slice by slice, multiplying tables in
and summing each latent out as soon as both its children are present, so the
live tensor never grows past the observed state space times a few latents.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from scgfd.criterion import EffectQuery
from scgfd.estimand import MicroVertex
from scgfd.graph import ScgError
from scgfd.unroll import CandidateSpec, WindowGraph, MicroV, instantiate_window

POSITIVITY_FLOOR = 1e-3
MAX_OBSERVED_STATES = 1 << 18


class StateSpaceError(ScgError):
    pass


@dataclass(frozen=True)
class JointDistribution:
    """Exact observational joint over micro vertices at offsets <= 0."""

    variables: tuple[MicroVertex, ...]
    domains: tuple[int, ...]
    probs: np.ndarray

    @property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    def domain(self, v: MicroVertex) -> int:
        return self.domains[self.index[v]]

    def marginal(self, vs) -> np.ndarray:
        """Marginal table with axes in the order requested."""
        vs = tuple(vs)
        if len(set(vs)) != len(vs):
            raise ScgError("marginal query repeats a variable")
        idx = self.index
        keep = [idx[v] for v in vs]
        other = tuple(i for i in range(len(self.variables)) if i not in keep)
        m = self.probs.sum(axis=other) if other else self.probs
        kept_sorted = sorted(keep)
        perm = [kept_sorted.index(ax) for ax in keep]
        return np.transpose(m, perm) if perm else m

    def replace_probs(self, probs: np.ndarray) -> "JointDistribution":
        return JointDistribution(self.variables, self.domains, probs)


@dataclass(frozen=True)
class DiscreteDynamicScm:
    spec: CandidateSpec
    window_length: int
    cardinality: int
    seed: int
    ft: WindowGraph
    latents: tuple  # (latent_id, template, (early_vertex, late_vertex))
    latent_priors: dict  # template -> prior vector
    vertex_parents: dict  # vertex -> (observed parents, latent ids)
    signature_of: dict  # vertex -> signature
    cpts: dict  # signature -> ndarray of shape (k,)*n_parents + (k,)

    @property
    def observed(self) -> list[MicroV]:
        return self.ft.vertices


def _signature(ft: WindowGraph, v: MicroV, lat_parents) -> tuple:
    s, t = v
    obs = tuple(("o", ps, t - pt) for ps, pt in ft.parents[v])
    lats = tuple(("l",) + key for key in sorted(lat_parents))
    return (s, obs, lats)


def _positive_rows(rng: np.random.Generator, shape: tuple[int, ...], k: int) -> np.ndarray:
    raw = rng.gamma(1.0, size=shape + (k,))
    raw /= raw.sum(axis=-1, keepdims=True)
    return (1.0 - k * POSITIVITY_FLOOR) * raw + POSITIVITY_FLOOR


def sample_scm(spec: CandidateSpec, L: int, k: int, seed: int) -> DiscreteDynamicScm:
    """Seed-reproducible random positive model on the window of the spec."""
    if k < 2:
        raise ScgError("variable domains need at least two values")
    ft = instantiate_window(spec, L)
    n_obs = len(ft.vertices)
    if k ** n_obs > MAX_OBSERVED_STATES:
        raise StateSpaceError(
            f"observed state space {k}^{n_obs} exceeds {MAX_OBSERVED_STATES}"
        )
    latents = []
    lat_parents_of: dict[MicroV, list] = {v: [] for v in ft.vertices}
    for i, (u, v) in enumerate(sorted(ft.bi_edges)):
        early, late = (u, v) if u[1] <= v[1] else (v, u)
        lag = late[1] - early[1]
        template_key = (early[0], late[0], lag)
        lat_id = ("<latent>", i)
        latents.append((lat_id, template_key, (early, late)))
        lat_parents_of[early].append((template_key, "early", lat_id))
        lat_parents_of[late].append((template_key, "late", lat_id))

    rng = np.random.default_rng(seed)
    prior_keys = sorted({t for _, t, _ in latents})
    latent_priors = {key: _positive_rows(rng, (), k) for key in prior_keys}

    vertex_parents = {}
    signature_of = {}
    for v in ft.vertices:
        lat_keys = [(key, role) for key, role, _ in lat_parents_of[v]]
        sig = _signature(ft, v, lat_keys)
        signature_of[v] = sig
        lat_ids = [
            lid for (key, role, lid) in sorted(lat_parents_of[v], key=lambda e: e[:2])
        ]
        vertex_parents[v] = (tuple(ft.parents[v]), tuple(lat_ids))

    cpts = {}
    for sig in sorted(set(signature_of.values())):
        n_parents = len(sig[1]) + len(sig[2])
        cpts[sig] = _positive_rows(rng, (k,) * n_parents, k)

    return DiscreteDynamicScm(
        spec=spec,
        window_length=L,
        cardinality=k,
        seed=seed,
        ft=ft,
        latents=tuple(latents),
        latent_priors=latent_priors,
        vertex_parents=vertex_parents,
        signature_of=signature_of,
        cpts=cpts,
    )


# ---------------------------------------------------------------------------
# exact inference


def _observed_joint(
    m: DiscreteDynamicScm, clamp: dict | None = None, exogenize=frozenset()
) -> np.ndarray:
    """Joint over observed vertices (axes in canonical order).  Clamped
    vertices get point-indicator mechanisms, exogenized vertices uniform
    parentless ones; both delete the sampled mechanism."""
    k = m.cardinality
    clamp = clamp or {}
    lat_by_early_slice: dict[int, list] = {}
    lat_death_slice: dict[tuple, int] = {}
    for lat_id, key, (early, late) in m.latents:
        lat_by_early_slice.setdefault(early[1], []).append((lat_id, key))
        lat_death_slice[lat_id] = late[1]

    axes: list = []
    table = np.array(1.0)

    def introduce(var, parent_ids, factor):
        nonlocal table, axes
        pos = {p: i for i, p in enumerate(parent_ids)}
        order = [p for p in axes if p in pos]
        if len(order) != len(parent_ids):
            missing = [p for p in parent_ids if p not in pos or p not in axes]
            raise ScgError(f"parents not yet introduced: {missing}")
        fac = np.transpose(factor, [pos[p] for p in order] + [len(parent_ids)])
        shape = tuple(k if ax in pos else 1 for ax in axes) + (k,)
        table = table[..., None] * fac.reshape(shape)
        axes = axes + [var]

    def sum_out(var):
        nonlocal table, axes
        i = axes.index(var)
        table = table.sum(axis=i)
        axes = axes[:i] + axes[i + 1 :]

    L = m.window_length
    for t in range(L):
        for lat_id, key in sorted(lat_by_early_slice.get(t, [])):
            introduce(lat_id, (), m.latent_priors[key])
        slice_vs = sorted(v for v in m.ft.vertices if v[1] == t)
        remaining = [v for v in slice_vs]
        placed: set = {v for v in m.ft.vertices if v[1] < t}
        while remaining:  # lag-zero edges impose an in-slice order
            progressed = False
            for v in list(remaining):
                if all(p[1] < t or p in placed for p in m.ft.parents[v]):
                    obs_p, lat_p = m.vertex_parents[v]
                    if v in clamp:
                        factor = np.zeros(k)
                        factor[clamp[v]] = 1.0
                        introduce(v, (), factor)
                    elif v in exogenize:
                        introduce(v, (), np.full(k, 1.0 / k))
                    else:
                        introduce(v, obs_p + lat_p, m.cpts[m.signature_of[v]])
                    placed.add(v)
                    remaining.remove(v)
                    progressed = True
            if not progressed:
                raise ScgError("cyclic lag-zero structure")
        for lat_id, key, (early, late) in m.latents:
            if lat_death_slice[lat_id] == t and lat_id in axes:
                sum_out(lat_id)

    canonical = sorted(m.ft.vertices)
    perm = [axes.index(v) for v in canonical]
    return np.transpose(table, perm)


def _to_offsets(m: DiscreteDynamicScm) -> tuple[MicroVertex, ...]:
    anchor = m.window_length - 1
    return tuple(MicroVertex(s, t - anchor) for s, t in sorted(m.ft.vertices))


def exact_joint(m: DiscreteDynamicScm) -> JointDistribution:
    """Marginalize all latents exactly; positive and normalized."""
    probs = _observed_joint(m)
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-9:
        raise ScgError(f"joint normalization off by {total - 1.0}")
    if probs.min() <= 0.0:
        raise ScgError("joint lost strict positivity")
    k = m.cardinality
    return JointDistribution(
        variables=_to_offsets(m),
        domains=(k,) * len(m.ft.vertices),
        probs=probs,
    )


def interventional_table(m: DiscreteDynamicScm, q: EffectQuery) -> np.ndarray:
    """Exact effect distributions under every clamped cause value, one row per
    value.  The cause's mechanism is replaced by a uniform prior, after which
    conditioning on the exogenized cause equals intervening on it, so a
    single pass covers all values."""
    anchor = m.window_length - 1
    cause = (q.cause, anchor - q.gamma)
    effect = (q.effect, anchor)
    if cause[1] - q.gamma_max < 0:
        raise ScgError("cause vertex lacks its full lag neighborhood in the window")
    m.ft.check_vertex(cause)
    m.ft.check_vertex(effect)
    probs = _observed_joint(m, exogenize={cause})
    canonical = sorted(m.ft.vertices)
    keep = [canonical.index(cause), canonical.index(effect)]
    other = tuple(i for i in range(len(canonical)) if i not in keep)
    table = probs.sum(axis=other)
    if keep[0] > keep[1]:
        table = table.T
    return table / table.sum(axis=1, keepdims=True)


def interventional_truth(m: DiscreteDynamicScm, q: EffectQuery, x_value: int) -> np.ndarray:
    """Exact distribution of the effect at the window top under clamping of
    the cause, by truncated factorization."""
    return interventional_table(m, q)[x_value]


@dataclass(frozen=True)
class CompareReport:
    max_abs_error: float
    passed: bool

    def to_json_dict(self, seed: int, candidate_index: int) -> dict:
        return {
            "seed": seed,
            "candidate_index": candidate_index,
            "max_abs_error": self.max_abs_error,
            "pass": self.passed,
        }


def compare(ast, m: DiscreteDynamicScm, q: EffectQuery, tol: float = 1e-9) -> CompareReport:
    """Largest deviation of the do-free formula from the truncated-factorization
    truth over every (cause value, effect value) pair."""
    from scgfd.estimand import evaluate_estimand_table

    joint = exact_joint(m)
    estimates = evaluate_estimand_table(ast, joint)
    truth = interventional_table(m, q)
    worst = float(np.abs(estimates - truth).max())
    return CompareReport(max_abs_error=worst, passed=worst <= tol)
