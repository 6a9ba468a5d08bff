import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vfgen.certificate import (CertBuilder, Certificate, CertificateError, deserialize,
                               evaluate, metrics, serialize)
from vfgen.vectorfield import VectorField, ad_iter, lie_bracket, standard_generators


def step1_chain_n2():
    b = CertBuilder(2)
    u, v = b.gen_u(), b.gen_v()
    node = v
    for _ in range(5):
        node = b.bracket(u, node)
    return b.certificate(b.lincomb([(Fraction(1, 6720), node)]))


def test_eval_gen_u():
    c = Certificate(2, [("U",)], 0)
    assert evaluate(c) == standard_generators(2)[0]


def test_eval_bracket_uv():
    c = Certificate(2, [("U",), ("V",), ("br", 0, 1)], 2)
    want = VectorField.basis((0, 7), 1, 8) + VectorField.basis((4, 3), 2, 4)
    assert evaluate(c) == want


def test_eval_step1_chain():
    U, V = standard_generators(2)
    c = step1_chain_n2()
    assert evaluate(c) == ad_iter(U, V, 5).scale(Fraction(1, 6720))
    assert evaluate(c) == VectorField.basis((0, 3), 1)
    assert metrics(c).node_count == 8


def test_serialize_examples():
    assert serialize(Certificate(2, [("U",)], 0)) == b'{"n":2,"nodes":[{"op":"U"}],"root":0}'
    c = Certificate(2, [("U",), ("V",), ("br", 0, 1)], 2)
    assert serialize(c) == b'{"n":2,"nodes":[{"op":"U"},{"op":"V"},{"op":"br","l":0,"r":1}],"root":2}'
    doc = json.loads(serialize(step1_chain_n2()))
    assert doc["nodes"][-1] == {"op": "lin", "terms": [["1/6720", 6]]}


def test_serialize_roundtrip_bytes():
    c = step1_chain_n2()
    data = serialize(c)
    assert deserialize(data) == c
    assert serialize(deserialize(data)) == data


def test_big_scalars_are_strings():
    huge = Fraction(10**40 + 1, 3)
    c = Certificate(1, [("U",), ("lin", ((huge, 0),))], 1)
    data = serialize(c)
    assert b'"' + str(huge).encode() + b'"' in data
    assert deserialize(data) == c


def test_metrics():
    assert tuple(metrics(Certificate(2, [("U",)], 0))) == (1, 1, 0)
    c = step1_chain_n2()
    m = metrics(c)
    assert m.depth == 7
    assert m.max_scalar_bits == (6720).bit_length()


def test_interning():
    b = CertBuilder(2)
    u, v = b.gen_u(), b.gen_v()
    uv = b.bracket(u, v)
    root = b.bracket(b.gen_v(), b.bracket(u, v))
    c = b.certificate(root)
    assert metrics(c).node_count == 4
    U, V = standard_generators(2)
    assert evaluate(c) == lie_bracket(V, lie_bracket(U, V))
    assert uv == b.bracket(u, v)


def test_extraction_drops_unreachable():
    b = CertBuilder(2)
    u, v = b.gen_u(), b.gen_v()
    b.bracket(v, u)
    c = b.certificate(b.bracket(u, v))
    assert c.nodes == (("U",), ("V",), ("br", 0, 1))


@pytest.mark.parametrize("nodes,root", [
    ([("br", 0, 1)], 0),
    ([("U",), ("br", 0, 1)], 1),
    ([("U",), ("lin", ())], 1),
    ([("U",), ("lin", ((Fraction(0), 0),))], 1),
    ([("U",), ("U",)], 0),
    ([("U",)], 1),
    ([("W",)], 0),
])
def test_malformed_rejected_at_construction(nodes, root):
    with pytest.raises(CertificateError):
        Certificate(2, nodes, root)


@pytest.mark.parametrize("doc,path", [
    ('{"n":2,"nodes":[{"op":"U"},{"op":"br","l":0,"r":2}],"root":1}', "$.nodes[1].r"),
    ('{"n":2,"nodes":[{"op":"X"}],"root":0}', "$.nodes[0].op"),
    ('{"n":2,"nodes":[{"op":"U"},{"op":"lin","terms":[[1,0]]}],"root":1}', "$.nodes[1].terms[0][0]"),
    ('{"n":2,"nodes":[{"op":"U"},{"op":"lin","terms":[["2/4",0]]}],"root":1}', "$.nodes[1].terms[0][0]"),
    ('{"n":2,"nodes":[{"op":"U"},{"op":"lin","terms":[["0",0]]}],"root":1}', "$.nodes[1].terms[0][0]"),
    ('{"n":0,"nodes":[{"op":"U"}],"root":0}', "$.n"),
    ('{"n":2,"nodes":[{"op":"U"}],"root":3}', "$.root"),
    ('{"n":2,"nodes":[{"op":"U","l":1}],"root":0}', "$.nodes[0]"),
    ('{"n":2,"nodes":[{"op":"U"}]}', "$"),
    ('[1,2]', "$"),
    ('not json', "$"),
])
def test_deserialize_errors(doc, path):
    with pytest.raises(CertificateError) as ei:
        deserialize(doc.encode())
    assert ei.value.path == path


@st.composite
def random_dags(draw, n=2):
    b = CertBuilder(n)
    ids = [b.gen_u(), b.gen_v()]
    for _ in range(draw(st.integers(1, 6))):
        if draw(st.booleans()):
            ids.append(b.bracket(draw(st.sampled_from(ids)), draw(st.sampled_from(ids))))
        else:
            k = draw(st.integers(1, 3))
            terms = [(Fraction(draw(st.integers(-5, 5).filter(bool)), draw(st.integers(1, 4))),
                      draw(st.sampled_from(ids))) for _ in range(k)]
            ids.append(b.lincomb(terms))
    return b, ids[-1]


def _tree_eval(b, idx, U, V):
    # no memo, no interning: plain recursive evaluation of the expression tree
    node = b.nodes[idx]
    if node[0] == "U":
        return U
    if node[0] == "V":
        return V
    if node[0] == "br":
        return lie_bracket(_tree_eval(b, node[1], U, V), _tree_eval(b, node[2], U, V))
    acc = VectorField.zero(U.n)
    for c, k in node[1]:
        acc = acc + _tree_eval(b, k, U, V).scale(c)
    return acc


@settings(max_examples=100, deadline=None)
@given(random_dags())
def test_eval_is_homomorphism(dag):
    b, root = dag
    c = b.certificate(root)
    U, V = standard_generators(2)
    assert evaluate(c) == _tree_eval(b, root, U, V)
    node = c.nodes[c.root]
    if node[0] == "br":
        left = Certificate(2, c.nodes[:node[1] + 1], node[1])
        right = Certificate(2, c.nodes[:node[2] + 1], node[2])
        assert evaluate(c) == lie_bracket(evaluate(left), evaluate(right))
    data = serialize(c)
    assert serialize(deserialize(data)) == data
