"""Mediator instances, adjustment sets, and the do-free estimand.

The do-free formula for P(y_t | do(x_{t-gamma})) sums over the mediator
instances F and, within one shared stratification over the covariates
C = B^x union B^f, multiplies the cause-side conditional P(f | x, c) with
the mediator-side term sum_{x'} P(y | f, c, x') P(x' | c), weighting each
stratum by P(c); x' is a fresh copy of the cause variable.  Keeping the two
conditionals inside one stratum matters: marginalizing the covariates
separately per factor lets the realized covariate values decouple and the
product no longer telescopes to the interventional quantity.  Offsets are
relative to the reference time: 0 is t, -k is t-k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from scgfd.criterion import EffectQuery
from scgfd.graph import (
    Scg,
    ScgError,
    scg_ancestors,
    scg_ancestors_of_set,
    scg_descendants,
    scg_descendants_of_set,
    scg_parents,
)


@dataclass(frozen=True, order=True)
class MicroVertex:
    series: str
    offset: int

    def __post_init__(self):
        if self.offset > 0:
            raise ScgError("micro vertices here never sit after the reference time")

    def __str__(self) -> str:
        return f"{self.series}@{self.offset}"

    @classmethod
    def parse(cls, token: str) -> "MicroVertex":
        series, _, off = token.partition("@")
        return cls(series, int(off))


class ZeroProbabilityError(ScgError):
    """A conditioning event has zero mass; names the offending event."""

    def __init__(self, event: dict):
        super().__init__(f"zero-probability conditioning event: {event}")
        self.event = event


class MissingVariableError(ScgError):
    pass


def _span(series, offsets) -> frozenset[MicroVertex]:
    return frozenset(MicroVertex(s, o) for s in series for o in offsets)


def mediator_instances(w, q: EffectQuery) -> frozenset[MicroVertex]:
    """Instances of the mediator series from the cause lag up to the reference time."""
    return _span(w, range(-q.gamma, 1))


def build_bx(g: Scg, w, q: EffectQuery, variant: str) -> frozenset[MicroVertex]:
    """Cause-side adjustment set for the chosen cycle-condition variant.

    4a and 4c use the reduced sets (parents-based); 4b uses the general
    ancestor-based set at lag zero.  The cause vertex itself is removed when
    the expansion generates it (a self-loop parent does under 4c).
    """
    w = frozenset(w)
    x, gm, gamma = q.cause, q.gamma_max, q.gamma
    anc_w = scg_ancestors_of_set(g, w)
    desc_x = scg_descendants(g, x)
    if variant == "4a":
        out = _span(scg_parents(g, x), range(-gamma - gm, -gamma + 1))
        out |= _span(anc_w & desc_x, range(-gamma - gm, -gamma))
        out |= _span({x}, range(-gamma + 1, 1))
    elif variant == "4c":
        out = _span(scg_parents(g, x), range(-gamma - gm, -gamma + 1))
        out |= _span({x}, range(-gamma - gm, -gamma))
    elif variant == "4b":
        if gamma != 0:
            raise ScgError("variant 4b requires gamma = 0")
        anc_x = scg_ancestors(g, x)
        out = _span(anc_x - desc_x, range(-gm, 1))
        out |= _span((anc_x | anc_w) & desc_x, range(-gm, 0))
    else:
        raise ScgError(f"unknown variant {variant!r}")
    return out - {MicroVertex(x, -gamma)}


def build_bx_general(
    g: Scg, w, q: EffectQuery, condition_4a: bool
) -> frozenset[MicroVertex]:
    """The general cause-side adjustment set, valid under every variant.

    The extra cause instances after the cause lag join only when condition
    4a holds.
    """
    w = frozenset(w)
    x, gm, gamma = q.cause, q.gamma_max, q.gamma
    anc_x = scg_ancestors(g, x)
    desc_x = scg_descendants(g, x)
    anc_w = scg_ancestors_of_set(g, w)
    out = _span(anc_x - desc_x, range(-gamma - gm, -gamma + 1))
    out |= _span((anc_x | anc_w) & desc_x, range(-gamma - gm, -gamma))
    if condition_4a:
        out |= _span({x}, range(-gamma + 1, 1))
    return out - {MicroVertex(x, -gamma)}


def build_bf(g: Scg, w, q: EffectQuery) -> frozenset[MicroVertex]:
    """Mediator-side adjustment set, minus the cause vertex (summed separately)."""
    w = frozenset(w)
    gm, gamma = q.gamma_max, q.gamma
    anc_w = scg_ancestors_of_set(g, w)
    desc_w = scg_descendants_of_set(g, w)
    out = _span(anc_w - desc_w, range(-gamma - gm, 1))
    out |= _span(anc_w & desc_w, range(-gamma - gm, -gamma))
    return out - {MicroVertex(q.cause, -gamma)}


@dataclass(frozen=True)
class FrontDoorSets:
    f: frozenset[MicroVertex]
    bx: frozenset[MicroVertex]
    bf: frozenset[MicroVertex]
    variant: str

    def __post_init__(self):
        if self.bx & self.f:
            raise ScgError("cause-side adjustment overlaps the mediator instances")
        if self.bf & self.f:
            raise ScgError("mediator-side adjustment overlaps the mediator instances")


def front_door_sets(g: Scg, w, q: EffectQuery, variant: str) -> FrontDoorSets:
    return FrontDoorSets(
        f=mediator_instances(w, q),
        bx=build_bx(g, w, q, variant),
        bf=build_bf(g, w, q),
        variant=variant,
    )


# ---------------------------------------------------------------------------
# the estimand


def _ordered(vs) -> tuple[MicroVertex, ...]:
    return tuple(sorted(vs, key=lambda v: (v.series, -v.offset)))


@dataclass(frozen=True)
class EstimandAst:
    """Eq-style do-free expression, fully determined by its variable groups.

    The primed cause copy lives at the cause vertex slot but is summed inside
    the second factor rather than pinned to the intervention value.
    """

    cause: MicroVertex
    effect: MicroVertex
    f: tuple[MicroVertex, ...]
    bx: tuple[MicroVertex, ...]
    bf: tuple[MicroVertex, ...]

    def __post_init__(self):
        object.__setattr__(self, "f", _ordered(self.f))
        object.__setattr__(self, "bx", _ordered(self.bx))
        object.__setattr__(self, "bf", _ordered(self.bf))
        groups = [set(self.f), set(self.bx), set(self.bf), {self.cause}, {self.effect}]
        for i, gi in enumerate(groups):
            if i < 3 and (self.cause in gi or self.effect in gi):
                raise ScgError("cause/effect may not appear inside a summed group")
        if set(self.f) & set(self.bx) or set(self.f) & set(self.bf):
            raise ScgError("mediator instances may not appear in an adjustment set")

    @property
    def shared(self) -> tuple[MicroVertex, ...]:
        """The shared stratification set: cause-side and mediator-side
        covariates together."""
        return _ordered(set(self.bx) | set(self.bf))

    def to_json_dict(self) -> dict:
        enc = lambda vs: [str(v) for v in vs]
        return {
            "outer_sum": enc(self.f),
            "factor1": {
                "cond": enc(self.f),
                "given": enc((self.cause,) + self.bx),
                "marginal_sum": enc(self.bx),
            },
            "factor2": {
                "cond": [str(self.effect)],
                "given": enc(self.f + self.bf + (self.cause,)),
                "marginal_sum": enc(self.bf + (self.cause,)),
            },
        }


def build_estimand(sets: FrontDoorSets, q: EffectQuery) -> EstimandAst:
    return EstimandAst(
        cause=MicroVertex(q.cause, -q.gamma),
        effect=MicroVertex(q.effect, 0),
        f=_ordered(sets.f),
        bx=_ordered(sets.bx),
        bf=_ordered(sets.bf),
    )


def parse_estimand_json(text: str) -> EstimandAst:
    data = json.loads(text)
    dec = lambda toks: tuple(MicroVertex.parse(t) for t in toks)
    f = dec(data["outer_sum"])
    bx = dec(data["factor1"]["marginal_sum"])
    given1 = dec(data["factor1"]["given"])
    cause = next(v for v in given1 if v not in bx)
    effect = dec(data["factor2"]["cond"])[0]
    sum2 = dec(data["factor2"]["marginal_sum"])
    bf = tuple(v for v in sum2 if v != cause)
    return EstimandAst(cause=cause, effect=effect, f=f, bx=bx, bf=bf)


def _sub(offset: int) -> str:
    return "t" if offset == 0 else f"{{t{offset}}}"


def _val(v: MicroVertex, prime: bool = False) -> str:
    return f"{v.series.lower()}{'′' if prime else ''}_{_sub(v.offset)}"


def render_estimand(ast: EstimandAst, format: str = "text") -> str:
    """Deterministic text (sigma/P notation) or JSON rendering."""
    if format == "json":
        return json.dumps(ast.to_json_dict(), sort_keys=True, separators=(", ", ": "))
    if format != "text":
        raise ScgError(f"unknown format {format!r}")
    x = _val(ast.cause)
    y = _val(ast.effect)
    xp = _val(ast.cause, prime=True)
    fv = [_val(v) for v in ast.f]
    cv = [_val(v) for v in ast.shared]
    fs = ",".join(fv)
    cs = ",".join(cv)
    if ast.f:
        factor1 = f"P({fs} | {x}, {cs})" if cv else f"P({fs} | {x})"
    else:
        factor1 = "1"
    given2 = ", ".join(fv + cv + [xp])
    weight2 = f"P({xp} | {cs})" if cv else f"P({xp})"
    factor2 = f"Σ_{{{xp}}} P({y} | {given2}) {weight2}"
    outer = f"Σ_{{{fs}}} " if ast.f else ""
    strata = f"Σ_{{{cs}}} P({cs}) " if cv else ""
    return f"P({y} | do({x})) = {outer}{strata}{factor1} {factor2}"


# ---------------------------------------------------------------------------
# evaluation against an exact joint distribution


def evaluate_estimand_table(ast: EstimandAst, joint, smooth: float = 0.0) -> np.ndarray:
    """Do-free formula at every (cause value, effect value) pair at once.

    Computes sum_{f, c} P(c) P(f | x, c) sum_{x'} P(y | f, c, x') P(x' | c)
    with c ranging over the shared covariate set; returns an array indexed
    by (cause value, effect value).
    """
    c = ast.shared
    for v in ast.f + c + (ast.cause, ast.effect):
        if v not in joint.index:
            raise MissingVariableError(f"variable {v} not in the joint distribution")
    if smooth > 0.0:
        probs = joint.probs + smooth
        joint = joint.replace_probs(probs / probs.sum())

    nf, nc = len(ast.f), len(c)

    # P(f | x, c) over (x, f..., c...)
    m_xfc = joint.marginal((ast.cause,) + ast.f + c)
    m_xc = joint.marginal((ast.cause,) + c)
    if np.any(m_xc == 0.0):
        flat = int(np.argmin(m_xc))
        idx = np.unravel_index(flat, m_xc.shape)
        event = {str(v): int(i) for v, i in zip((ast.cause,) + c, idx)}
        raise ZeroProbabilityError(event)
    shape_den = (m_xc.shape[0],) + (1,) * nf + m_xc.shape[1:]
    p_f = m_xfc / m_xc.reshape(shape_den)

    # sum_{x'} P(y | f, c, x') P(x' | c) over (y, f..., c...)
    m_yfcx = joint.marginal((ast.effect,) + ast.f + c + (ast.cause,))
    m_fcx = joint.marginal(ast.f + c + (ast.cause,))
    if np.any(m_fcx == 0.0):
        flat = int(np.argmin(m_fcx))
        idx = np.unravel_index(flat, m_fcx.shape)
        event = {str(v): int(i) for v, i in zip(ast.f + c + (ast.cause,), idx)}
        raise ZeroProbabilityError(event)
    m_cx = joint.marginal(c + (ast.cause,))
    m_c = joint.marginal(c)
    p_xp = m_cx / m_c[..., None] if nc else m_cx  # P(x' | c)
    p_y = ((m_yfcx / m_fcx) * p_xp).sum(axis=-1)

    weighted = p_y[:, None, ...] * (p_f * m_c)[None, ...]  # (y, x, f..., c...)
    table = weighted.reshape(weighted.shape[0], weighted.shape[1], -1).sum(axis=2)
    return table.T  # (x, y)


def evaluate_estimand(ast: EstimandAst, joint, x_value: int, y_value: int,
                      smooth: float = 0.0) -> float:
    """Numeric value of the do-free formula at one (cause, effect) value pair.

    ``smooth`` adds uniform mass before evaluation; it is off-spec,
    exploratory only, and disabled by default.
    """
    return float(evaluate_estimand_table(ast, joint, smooth=smooth)[x_value, y_value])


def shared_covariate_caveat(g: Scg, q: EffectQuery, ast: EstimandAst) -> tuple[MicroVertex, ...]:
    """Shared covariates that may be micro descendants of the cause vertex.

    The stratified formula weights each covariate assignment by its
    observational law, which is only sound when no covariate responds to the
    intervention.  A self-loop or larger cycle on the cause series can place
    later cause instances (or cause-descendant series at later offsets) into
    the mediator-side set; the emitted formula is then not exact and callers
    should surface a warning.
    """
    from scgfd.graph import CycleKind, cycles_containing

    desc = scg_descendants(g, q.cause)
    cyclic = cycles_containing(g, q.cause).kind is not CycleKind.NONE
    flagged = []
    for v in ast.shared:
        if v.series == q.cause:
            if cyclic and v.offset > -q.gamma:
                flagged.append(v)
        elif v.series in desc and v.offset >= -q.gamma:
            flagged.append(v)
    return tuple(flagged)


def cause_side_marginal(joint, f, cause, bx, x_value) -> np.ndarray:
    """The marginal cause-side adjustment sum_b P(f | x, b) P(b), one entry
    per mediator-instance assignment; equal for every valid back-door set."""
    f, bx = tuple(f), tuple(bx)
    m_fxb = joint.marginal(f + (cause,) + bx)
    m_xb = joint.marginal((cause,) + bx)
    den = np.take(m_xb, x_value, axis=0)
    if np.any(den == 0.0):
        raise ZeroProbabilityError({str(cause): x_value})
    m_b = joint.marginal(bx)
    out = (np.take(m_fxb, x_value, axis=len(f)) / den) * m_b
    return out.sum(axis=tuple(range(len(f), out.ndim)))
