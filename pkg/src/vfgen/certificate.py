"""
Generation certificates: hash-consed DAGs of brackets and rational linear
combinations over the two generators, with exact evaluation and a JSON
interchange format.

Nodes are plain tuples so that structural equality is tuple equality::

    ("U",)                      generator U
    ("V",)                      generator V
    ("br", l, r)                Lie bracket [node l, node r]
    ("lin", ((c0, id0), ...))   sum of c_k * node id_k, c_k nonzero Fractions

Ids index the node table; children always precede their parent.
"""

import json
from collections import namedtuple
from fractions import Fraction

from .vectorfield import lie_bracket, standard_generators, VectorField

GEN_U = ("U",)
GEN_V = ("V",)

Metrics = namedtuple("Metrics", "node_count depth max_scalar_bits")


class CertificateError(ValueError):
    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path


def bracket_node(l, r):
    return ("br", l, r)


def lin_node(terms):
    return ("lin", tuple((Fraction(c), i) for c, i in terms))


def children(node):
    if node[0] == "br":
        return node[1:]
    if node[0] == "lin":
        return tuple(i for _, i in node[1])
    return ()


def _check_node(node, idx, path):
    tag = node[0] if isinstance(node, tuple) and node else None
    if tag in ("U", "V"):
        if len(node) != 1:
            raise CertificateError("generator node takes no arguments", path)
        return
    if tag == "br":
        if len(node) != 3:
            raise CertificateError("bracket node needs exactly two children", path)
        kids = node[1:]
    elif tag == "lin":
        if len(node) != 2 or not node[1]:
            raise CertificateError("linear combination needs at least one term", path)
        for c, _ in node[1]:
            if not isinstance(c, Fraction) or c == 0:
                raise CertificateError(f"bad scalar {c!r}", path)
        kids = [i for _, i in node[1]]
    else:
        raise CertificateError(f"unknown node {node!r}", path)
    for k in kids:
        if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k < idx:
            raise CertificateError(f"child id {k!r} is not an earlier node", path)


class Certificate:
    """An immutable, topologically ordered, deduplicated node table with a root."""

    __slots__ = ("n", "nodes", "root")

    def __init__(self, n, nodes, root):
        if not isinstance(n, int) or n < 1:
            raise CertificateError("dimension must be a positive integer", "$.n")
        nodes = tuple(nodes)
        seen = set()
        for idx, node in enumerate(nodes):
            _check_node(node, idx, f"$.nodes[{idx}]")
            if node in seen:
                raise CertificateError("duplicate node", f"$.nodes[{idx}]")
            seen.add(node)
        if not isinstance(root, int) or not 0 <= root < len(nodes):
            raise CertificateError(f"root {root!r} out of range", "$.root")
        self.n = n
        self.nodes = nodes
        self.root = root

    def __eq__(self, other):
        if not isinstance(other, Certificate):
            return NotImplemented
        return (self.n, self.nodes, self.root) == (other.n, other.nodes, other.root)

    def __hash__(self):
        return hash((self.n, self.nodes, self.root))

    def __repr__(self):
        return f"Certificate(n={self.n}, nodes={len(self.nodes)}, root={self.root})"

    def reachable(self):
        mark = [False] * len(self.nodes)
        mark[self.root] = True
        for idx in range(self.root, -1, -1):
            if mark[idx]:
                for k in children(self.nodes[idx]):
                    mark[k] = True
        return mark

    def eval(self):
        return evaluate(self)

    def metrics(self):
        return metrics(self)

    def serialize(self):
        return serialize(self)


def evaluate(cert, generators=None):
    """Evaluate the root to a VectorField; each reachable node is evaluated once."""
    U, V = generators or standard_generators(cert.n)
    mark = cert.reachable()
    vals = {}
    for idx, node in enumerate(cert.nodes):
        if not mark[idx]:
            continue
        tag = node[0]
        if tag == "U":
            vals[idx] = U
        elif tag == "V":
            vals[idx] = V
        elif tag == "br":
            vals[idx] = lie_bracket(vals[node[1]], vals[node[2]])
        else:
            acc = VectorField.zero(cert.n)
            for c, k in node[1]:
                acc = acc + vals[k].scale(c)
            vals[idx] = acc
    return vals[cert.root]


def metrics(cert):
    mark = cert.reachable()
    depth = {}
    bits = 0
    for idx, node in enumerate(cert.nodes):
        if not mark[idx]:
            continue
        kids = children(node)
        depth[idx] = 1 + max((depth[k] for k in kids), default=0)
        if node[0] == "lin":
            for c, _ in node[1]:
                bits = max(bits, abs(c.numerator).bit_length(), c.denominator.bit_length())
    return Metrics(sum(mark), depth[cert.root], bits)


class CertBuilder:
    """Append-only interning node table shared by many certificates."""

    def __init__(self, n):
        self.n = n
        self.nodes = []
        self._index = {}

    def __len__(self):
        return len(self.nodes)

    def intern(self, node):
        idx = self._index.get(node)
        if idx is None:
            _check_node(node, len(self.nodes), f"$.nodes[{len(self.nodes)}]")
            idx = len(self.nodes)
            self.nodes.append(node)
            self._index[node] = idx
        return idx

    def gen_u(self):
        return self.intern(GEN_U)

    def gen_v(self):
        return self.intern(GEN_V)

    def bracket(self, l, r):
        return self.intern(bracket_node(l, r))

    def lincomb(self, terms):
        return self.intern(lin_node((c, i) for c, i in terms if c))

    def scaled(self, c, idx):
        """``c * node``; no new node when ``c == 1``."""
        c = Fraction(c)
        return idx if c == 1 else self.lincomb([(c, idx)])

    def certificate(self, root):
        """Extract the sub-DAG below ``root`` as a compact Certificate."""
        mark = [False] * len(self.nodes)
        mark[root] = True
        for idx in range(root, -1, -1):
            if mark[idx]:
                for k in children(self.nodes[idx]):
                    mark[k] = True
        remap = {}
        out = []
        for idx, node in enumerate(self.nodes):
            if not mark[idx]:
                continue
            if node[0] == "br":
                node = ("br", remap[node[1]], remap[node[2]])
            elif node[0] == "lin":
                node = ("lin", tuple((c, remap[k]) for c, k in node[1]))
            remap[idx] = len(out)
            out.append(node)
        return Certificate(self.n, out, remap[root])


# JSON interchange


def _scalar_str(c):
    return str(c)


def _node_json(node):
    tag = node[0]
    if tag in ("U", "V"):
        return {"op": tag}
    if tag == "br":
        return {"op": "br", "l": node[1], "r": node[2]}
    return {"op": "lin", "terms": [[_scalar_str(c), k] for c, k in node[1]]}


def serialize(cert):
    doc = {"n": cert.n, "nodes": [_node_json(x) for x in cert.nodes], "root": cert.root}
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def _parse_scalar(s, path):
    if not isinstance(s, str):
        raise CertificateError("scalar must be a string", path)
    try:
        c = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise CertificateError(f"malformed scalar {s!r}", path) from None
    if _scalar_str(c) != s:
        raise CertificateError(f"scalar {s!r} is not in lowest terms canonical form", path)
    if c == 0:
        raise CertificateError("zero scalar", path)
    return c


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _parse_node(obj, idx, path):
    if not isinstance(obj, dict):
        raise CertificateError("node must be an object", path)
    op = obj.get("op")
    if op in ("U", "V"):
        allowed = {"op"}
    elif op == "br":
        allowed = {"op", "l", "r"}
    elif op == "lin":
        allowed = {"op", "terms"}
    else:
        raise CertificateError(f"unknown op tag {op!r}", path + ".op")
    extra = set(obj) - allowed
    if extra:
        raise CertificateError(f"unexpected keys {sorted(extra)}", path)
    missing = allowed - set(obj)
    if missing:
        raise CertificateError(f"missing keys {sorted(missing)}", path)

    def ref(x, p):
        if not _is_int(x):
            raise CertificateError("node id must be an integer", p)
        if not 0 <= x < idx:
            raise CertificateError(f"forward or dangling reference {x}", p)
        return x

    if op in ("U", "V"):
        return (op,)
    if op == "br":
        return ("br", ref(obj["l"], path + ".l"), ref(obj["r"], path + ".r"))
    terms = obj["terms"]
    if not isinstance(terms, list) or not terms:
        raise CertificateError("terms must be a non-empty list", path + ".terms")
    out = []
    for t, term in enumerate(terms):
        tp = f"{path}.terms[{t}]"
        if not isinstance(term, list) or len(term) != 2:
            raise CertificateError("term must be a [scalar, id] pair", tp)
        out.append((_parse_scalar(term[0], tp + "[0]"), ref(term[1], tp + "[1]")))
    return ("lin", tuple(out))


def deserialize(data):
    if isinstance(data, (bytes, bytearray)):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise CertificateError(f"invalid UTF-8: {e}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise CertificateError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise CertificateError("top level must be an object")
    extra = set(doc) - {"n", "nodes", "root"}
    if extra:
        raise CertificateError(f"unexpected keys {sorted(extra)}")
    for key in ("n", "nodes", "root"):
        if key not in doc:
            raise CertificateError(f"missing key {key!r}")
    if not _is_int(doc["n"]) or doc["n"] < 1:
        raise CertificateError("n must be a positive integer", "$.n")
    if not isinstance(doc["nodes"], list) or not doc["nodes"]:
        raise CertificateError("nodes must be a non-empty list", "$.nodes")
    nodes = [_parse_node(obj, idx, f"$.nodes[{idx}]") for idx, obj in enumerate(doc["nodes"])]
    if not _is_int(doc["root"]):
        raise CertificateError("root must be an integer", "$.root")
    return Certificate(doc["n"], nodes, doc["root"])
