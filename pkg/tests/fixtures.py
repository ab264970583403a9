"""Fixture graphs for the test suite.

Three running example SCGs, ten SCGs that satisfy the criterion at every lag
(first five with no cycle on the cause, second five with only a self-loop),
five SCGs that qualify only at lag zero, five SCGs that never qualify, and a
dense and a sparse hand-picked candidate for each running example.
"""

from __future__ import annotations

from scgfd.graph import Scg, parse_scg
from scgfd.unroll import CandidateSpec, EdgeTemplate

SCG1_TEXT = """\
series X Y W
X -> W
W -> Y
W -> W
Y -> Y
X <-> X
X <-> Y
Y <-> Y
"""

SCG2_TEXT = """\
series X Y W
X -> W
W -> Y
X -> X
W -> W
Y -> Y
X <-> Y
Y <-> Y
"""

SCG3_TEXT = """\
series X Y W
X -> W
W -> Y
X -> X
W -> W
Y -> Y
X <-> X
X <-> Y
Y <-> Y
"""


def _graph(series: str, directed: list[str], bidirected: list[str]) -> Scg:
    lines = [f"series {series}"]
    lines += [f"{a} -> {b}" for a, b in (e.split(">") for e in directed)]
    lines += [f"{a} <-> {b}" for a, b in (e.split("~") for e in bidirected)]
    return parse_scg("\n".join(lines) + "\n")


def scg1() -> Scg:
    return parse_scg(SCG1_TEXT)


def scg2() -> Scg:
    return parse_scg(SCG2_TEXT)


def scg3() -> Scg:
    return parse_scg(SCG3_TEXT)


# Ten SCGs satisfying the criterion for {W} at every lag: (a)-(e) have no
# cycle through X, (f)-(j) repeat them with a self-loop on X and without
# cause-series confounding.
SATISFYING: dict[str, Scg] = {
    "a": _graph("X Y W", ["X>W", "W>Y", "W>W", "Y>Y"], ["X~X", "X~Y", "Y~Y"]),
    "b": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "U>X", "Z>U", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "c": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "U>W", "W>U", "Z>U", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "d": _graph(
        "X Y W U Z",
        ["X>U", "U>Z", "Z>U", "Z>W", "W>Y", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "e": _graph(
        "X Y W U Z",
        ["X>W", "W>Z", "Z>U", "U>Z", "U>Y", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "f": _graph("X Y W", ["X>W", "W>Y", "X>X", "W>W", "Y>Y"], ["X~Y", "Y~Y"]),
    "g": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "U>X", "Z>U", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~Y", "Y~Y"],
    ),
    "h": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "U>W", "W>U", "Z>U", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~Y", "Y~Y"],
    ),
    "i": _graph(
        "X Y W U Z",
        ["X>U", "U>Z", "Z>U", "Z>W", "W>Y", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~Y", "Y~Y"],
    ),
    "j": _graph(
        "X Y W U Z",
        ["X>W", "W>Z", "Z>U", "U>Z", "U>Y", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~Y", "Y~Y"],
    ),
}

# Five SCGs satisfying the criterion for {W} only at lag zero.
LAG_ZERO_ONLY: dict[str, Scg] = {
    "a": scg3(),
    "b": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "X>U", "U>X", "Z>U", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "c": _graph(
        "X Y W U Z",
        ["X>W", "W>Y", "U>W", "W>U", "Z>U", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "d": _graph(
        "X Y W U Z",
        ["X>U", "U>Z", "Z>U", "Z>W", "W>Y", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "e": _graph(
        "X Y W U Z",
        ["X>W", "W>Z", "Z>U", "U>Z", "U>Y", "X>X", "U>U", "W>W", "Y>Y", "Z>Z"],
        ["X~X", "X~Y", "Y~Y"],
    ),
}

# Five SCGs admitting no qualifying set; condition 2 is the cited failure
# for (a) and (d), condition 3 for (b) and (e), both for (c).
UNSATISFIABLE: dict[str, Scg] = {
    "a": _graph("X Y W", ["X>W", "W>X", "W>Y", "W>W", "Y>Y"], ["X~X", "X~Y", "Y~Y"]),
    "b": _graph("X Y W", ["X>W", "W>Y", "Y>W", "W>W"], ["X~X", "X~Y", "Y~Y"]),
    "c": _graph(
        "X Y W", ["X>W", "W>X", "W>Y", "Y>W", "W>W", "Y>Y"], ["X~X", "X~Y", "Y~Y"]
    ),
    "d": _graph(
        "X Y W U",
        ["X>W", "W>U", "U>X", "W>Y", "U>U", "W>W", "Y>Y"],
        ["X~X", "X~Y", "Y~Y"],
    ),
    "e": _graph(
        "X Y W U",
        ["X>W", "W>Y", "Y>U", "U>W", "U>U", "W>W", "Y>Y"],
        ["X~X", "X~Y", "Y~Y"],
    ),
}


def _spec(g: Scg, directed: list[tuple[str, str, int]],
          bidirected: list[tuple[str, str, int]]) -> CandidateSpec:
    templates = {EdgeTemplate("directed", a, b, lag) for a, b, lag in directed}
    templates |= {EdgeTemplate("bidirected", a, b, lag) for a, b, lag in bidirected}
    return CandidateSpec(g, 1, frozenset(templates))


_BI_SCG1 = [("X", "Y", 0), ("X", "Y", 1), ("Y", "X", 1), ("X", "X", 1), ("Y", "Y", 1)]
_BI_SCG2 = [("X", "Y", 0), ("X", "Y", 1), ("Y", "X", 1), ("Y", "Y", 1)]


def scg1_candidate_a() -> CandidateSpec:
    return _spec(
        scg1(),
        [("X", "W", 0), ("X", "W", 1), ("W", "Y", 0), ("W", "Y", 1),
         ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG1,
    )


def scg1_candidate_b() -> CandidateSpec:
    return _spec(
        scg1(),
        [("X", "W", 1), ("W", "Y", 0), ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG1,
    )


def scg2_candidate_a() -> CandidateSpec:
    return _spec(
        scg2(),
        [("X", "W", 0), ("X", "W", 1), ("W", "Y", 0), ("W", "Y", 1),
         ("X", "X", 1), ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG2,
    )


def scg2_candidate_b() -> CandidateSpec:
    return _spec(
        scg2(),
        [("X", "W", 1), ("W", "Y", 0), ("X", "X", 1), ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG2,
    )


def scg3_candidate_a() -> CandidateSpec:
    return _spec(
        scg3(),
        [("X", "W", 0), ("X", "W", 1), ("W", "Y", 0), ("W", "Y", 1),
         ("X", "X", 1), ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG1,
    )


def scg3_candidate_b() -> CandidateSpec:
    return _spec(
        scg3(),
        [("X", "W", 1), ("W", "Y", 0), ("X", "X", 1), ("W", "W", 1), ("Y", "Y", 1)],
        _BI_SCG1,
    )
