"""Hypothesis strategies for small objects, expressions and knowledge bases.

Pools are deliberately tiny so that equal, similar and partially matching
objects turn up often.
"""

from hypothesis import strategies as st

from okb import (
    MethodDescriptor,
    ObjectInstance,
    QualitativeProperty,
    QuantitativeProperty,
    VerificationExpression,
)
from okb.expr import Name, Num, Op

PROPERTY_NAMES = ["a", "b", "c", "d", "e", "f", "g", "h"]
UNITS = ["kg", "m", "s"]
QUALS = ["x > 0", "0 < x", "x < 0", "ramp(x, 0, 10)", "fract(x) == 0", "(x > 1) * (x < 5)"]
VALUES = [0.0, 1.0, 2.5, (1.0, 2.0), (3.0, 7.0, 5.0)]
METHODS = [
    ("perimeter", ("s",), "sum(s)"),
    ("total", ("t",), "sum(t)"),  # same function as perimeter
    ("area", ("s",), "s[0] * s[0]"),
    ("plus", ("p", "q"), None),
    ("times", ("p", "q"), None),
]


@st.composite
def properties(draw, name):
    if draw(st.booleans()):
        return QuantitativeProperty(name, draw(st.sampled_from(VALUES)), draw(st.sampled_from(UNITS)))
    return QualitativeProperty(name, VerificationExpression(draw(st.sampled_from(QUALS))))


@st.composite
def objects(draw, oid=None, max_properties=6):
    oid = oid or draw(st.sampled_from(["O1", "O2", "O3", "O4"]))
    names = draw(st.lists(st.sampled_from(PROPERTY_NAMES), max_size=max_properties, unique=True))
    spec = [draw(properties(n)) for n in names]
    picked = draw(st.lists(st.sampled_from(METHODS), max_size=3, unique_by=lambda m: m[0]))
    sig = [MethodDescriptor(n, p, b) for n, p, b in picked]
    return ObjectInstance(oid, tuple(spec), tuple(sig))


@st.composite
def distinct_id_objects(draw, min_size=1, max_size=5):
    """Objects with ids O0, O1, ...; about a third are exact copies of an earlier one."""
    n = draw(st.integers(min_size, max_size))
    out = []
    for i in range(n):
        if out and draw(st.integers(0, 2)) == 0:
            src = draw(st.sampled_from(out))
            out.append(ObjectInstance(f"O{i}", src.specification, src.signature))
        else:
            out.append(draw(objects(oid=f"O{i}")))
    return out


@st.composite
def three_groups(draw):
    """Three non-empty consecutive slices of one population."""
    objs = draw(distinct_id_objects(min_size=6, max_size=8))
    i = draw(st.integers(2, len(objs) - 4))
    j = draw(st.integers(i + 2, len(objs) - 2))
    return objs[:i], objs[i:j], objs[j:]


_CONSTS = st.sampled_from([0.0, 1.0, 2.0, -1.0, 0.5, 3.0, 10.0])
_LEAVES = st.one_of(_CONSTS.map(Num), st.just(Name("x")))


def _binary(ops, children):
    return st.builds(lambda op, a, b: Op(op, (a, b)), st.sampled_from(ops), children, children)


def expressions(ops=("+", "-", "*", "/", "<", "<=", ">", ">=", "==", "!="), functions=True):
    def extend(children):
        options = [_binary(list(ops), children)]
        if functions:
            options += [
                st.builds(lambda f, a: Op(f, (a,)), st.sampled_from(["abs", "floor", "fract", "clamp"]), children),
                st.builds(lambda a, b, c: Op("ramp", (a, b, c)), children, children, children),
                st.builds(lambda f, a, b: Op(f, (a, b)), st.sampled_from(["min", "max"]), children, children),
                st.builds(lambda a, b, c: Op("clamp", (a, b, c)), children, children, children),
            ]
        return st.one_of(options)

    return st.recursive(_LEAVES, extend, max_leaves=10)


def crisp_predicates():
    """Comparisons combined with boolean arithmetic (conjunction by ``*``, negation by ``1 -``)."""
    comparison = _binary(["<", "<=", ">", ">=", "==", "!="], expressions(ops=("+", "-", "*"), functions=False))
    return st.recursive(
        comparison,
        lambda ch: st.one_of(
            st.builds(lambda a, b: Op("*", (a, b)), ch, ch),
            st.builds(lambda a: Op("-", (Num(1.0), a)), ch),
            st.builds(lambda a, b: Op("max", (a, b)), ch, ch),
            st.builds(lambda a, b: Op("min", (a, b)), ch, ch),
        ),
        max_leaves=4,
    )


@st.composite
def knowledge_bases(draw):
    from okb import KnowledgeBase, difference, infer_class, intersection, symmetric_difference, union
    from okb.algebra import DoesNotExist

    objs = draw(distinct_id_objects(min_size=2, max_size=4))
    kb = KnowledgeBase(objects={o.id: o for o in objs})
    a, b = objs[0], objs[1]
    candidates = {
        "Inferred": infer_class(objs),
        "Meet": intersection(a, b),
        "Diff": difference(a, b),
        "Sym": symmetric_difference(a, b),
    }
    for name, k in candidates.items():
        if not isinstance(k, DoesNotExist):
            kb.classes[name] = k
    mode = draw(st.sampled_from(["set", "multiset"]))
    first = union(objs, mode=mode)
    kb.sets["All"] = first
    if draw(st.booleans()):
        kb.sets["Again"] = union([first, a], mode="multiset")
    return kb
