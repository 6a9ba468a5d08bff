"""
Constructive generation of polynomial vector fields from the pair (U, V).

A :class:`CertStore` builds, on one shared interning node table, a
certificate for every basis field ``z^a d_i`` it is asked for.  Entries in
the memo always evaluate to the basis field with coefficient exactly 1.

The construction runs in seven stages:

1. ``ad_U^(4n-3) V`` isolates ``z_n^3 d_(n-1)``; further ``ad_U`` gives
   ``z_n^s d_(n-1)`` for ``s <= 3``.
2. For ``k = n-1 .. 2``, ``ad_(d_k)^(4k-3) V`` isolates
   ``(z_n..z_(k+1))^(4k) z_k^3 d_(k-1)``, and differentiating by ``d_j``
   (``j >= k``) yields every ``z_n^(s_n)..z_k^(s_k) d_(k-1)`` with
   ``s_j <= 3``.  For ``k = 1``, ``ad_(d_1) V = 4 z_1^3 (z_n..z_2)^4 d_n``
   yields every ``z^s d_n`` with ``s_j <= 3``.
3. ``[z_k^3 d_n, z_n d_k] + 3 z_k^2 z_n d_n = z_k^3 d_k``, then ``z_k^s d_k``.
4. ``[z_i d_n, z_n d_j] = z_i d_j`` for ``i != j``.
5. ``[z_i^(s-1) d_i, z_i^2 d_i] = (3-s) z_i^s d_i`` for ``s >= 4``.
6. ``[z_i^s d_i, z_i d_j] = z_i^s d_j``.
7. ``[z_k^s d_i, f z_i d_i] = (p+1) f z_k^s d_i`` where ``p`` is the
   exponent of ``z_i`` in ``f``; peels one variable at a time.

Stages 1-4 run eagerly in :meth:`CertStore.initialize`; 5-7 on demand.
"""

import itertools
from fractions import Fraction
from math import factorial

from .algebra import DimensionError
from .certificate import CertBuilder, evaluate
from .parse import format_monomial
from .vectorfield import VectorField, lie_bracket, standard_generators


class NodeLimitExceeded(RuntimeError):
    pass


class MissingPrerequisite(RuntimeError):
    """A stage was run before the stages it depends on."""


def _unit(n, v, e=1):
    exps = [0] * n
    exps[v - 1] = e
    return tuple(exps)


def _ad_label(v, n, m):
    op = "ad_U" if v == n else f"ad_d{v}"
    return f"{op}^{m}" if m > 1 else op


def _basis_str(exps, i):
    mono = format_monomial(exps)
    return f"{mono} d{i}" if mono else f"d{i}"


class CertStore:
    """
    Memo of certificates for basis fields ``z^exps d_i`` on ``n``-space.

    ``trace``, if a list, receives ``(stage, message)`` pairs describing
    each construction with its exact scalar.
    """

    def __init__(self, n, trace=None, max_nodes=None):
        if n < 1:
            raise ValueError("dimension must be at least 1")
        self.n = n
        self.builder = CertBuilder(n)
        self.memo = {}
        self.trace = trace
        self.max_nodes = max_nodes
        self.u = self.builder.gen_u()
        self.v = self.builder.gen_v()
        self.memo[((0,) * n, n)] = self.u
        self.heads = {}
        self._fields = {}
        self._gens = standard_generators(n)
        self.initialized = False

    # node helpers

    def _check_limit(self):
        if self.max_nodes is not None and len(self.builder) > self.max_nodes:
            raise NodeLimitExceeded(f"certificate table exceeded {self.max_nodes} nodes")

    def _bracket(self, l, r):
        idx = self.builder.bracket(l, r)
        self._check_limit()
        return idx

    def _scaled(self, c, idx):
        idx = self.builder.scaled(c, idx)
        self._check_limit()
        return idx

    def _log(self, stage, msg):
        if self.trace is not None:
            self.trace.append((stage, msg))

    def field(self, idx):
        """Exact value of node ``idx`` (cached across calls)."""
        cache = self._fields
        nodes = self.builder.nodes
        todo = [idx]
        while todo:
            top = todo[-1]
            if top in cache:
                todo.pop()
                continue
            node = nodes[top]
            tag = node[0]
            if tag == "U":
                cache[top] = self._gens[0]
            elif tag == "V":
                cache[top] = self._gens[1]
            else:
                kids = node[1:] if tag == "br" else [k for _, k in node[1]]
                pending = [k for k in kids if k not in cache]
                if pending:
                    todo.extend(pending)
                    continue
                if tag == "br":
                    cache[top] = lie_bracket(cache[node[1]], cache[node[2]])
                else:
                    acc = VectorField.zero(self.n)
                    for c, k in node[1]:
                        acc = acc + cache[k].scale(c)
                    cache[top] = acc
            todo.pop()
        return cache[idx]

    def certificate(self, idx):
        return self.builder.certificate(idx)

    def lookup(self, exps, i):
        key = (tuple(exps), i)
        if key not in self.memo:
            raise MissingPrerequisite(f"no certificate yet for {_basis_str(*key)}")
        return self.memo[key]

    def _insert(self, exps, i, idx):
        # first writer wins
        return self.memo.setdefault((tuple(exps), i), idx)

    def _partial(self, j):
        return self.lookup((0,) * self.n, j)

    # stages 1 and 2

    def _head(self, k):
        """ad_(d_k)^m V and its exact scalar, monomial, and direction."""
        n = self.n
        d = self._partial(k)
        if k >= 2:
            m = 4 * k - 3
            exps = tuple(4 * k if v > k else (3 if v == k else 0) for v in range(1, n + 1))
            direction = k - 1
            scalar = Fraction(factorial(4 * k), 6)
        else:
            m = 1
            exps = (3,) + (4,) * (n - 1)
            direction = n
            scalar = Fraction(4)
        node = self.v
        for _ in range(m):
            node = self._bracket(d, node)
        desc = f"{_ad_label(k, n, m)}(V)"
        self.heads[k] = (desc, node, VectorField.basis(exps, direction, scalar))
        self._log(f"step{1 if k == n else 2}",
                  f"{desc} = {scalar} {_basis_str(exps, direction)}")
        return node, scalar, exps, direction, desc

    def _reduce_family(self, k, stage):
        node, scalar, head, direction, desc = self._head(k)
        n = self.n
        raw = {head: (node, scalar)}
        ranges = [range(4) if v >= k else range(1) for v in range(1, n + 1)]
        for target in itertools.product(*ranges):
            if (target, direction) in self.memo:
                continue
            cur = head
            idx, c = raw[cur]
            # largest variable first so paths share prefixes
            for v in range(n, k - 1, -1):
                while cur[v - 1] > target[v - 1]:
                    e = cur[v - 1]
                    nxt = cur[:v - 1] + (e - 1,) + cur[v:]
                    if nxt not in raw:
                        raw[nxt] = (self._bracket(self._partial(v), idx), c * e)
                    cur = nxt
                    idx, c = raw[cur]
            entry = self._scaled(1 / c, idx)
            self._insert(target, direction, entry)
            if self.trace is not None:
                ops = " ".join(
                    _ad_label(v, n, head[v - 1] - target[v - 1])
                    for v in range(k, n + 1) if head[v - 1] > target[v - 1])
                chain = f"{ops} {desc}" if ops else desc
                self._log(stage, f"{_basis_str(target, direction)} = {1 / c} * {chain}")

    def gen_step1(self):
        """``z_n^s d_(n-1)`` for ``0 <= s <= 3``."""
        if self.n < 2:
            raise ValueError("stage 1 needs n >= 2")
        self._reduce_family(self.n, "step1")

    def gen_step2(self, k):
        """Family for direction ``k-1`` (``k >= 2``) or direction ``n`` (``k == 1``)."""
        n = self.n
        if not 1 <= k <= n - 1 and not (n == 1 and k == 1):
            raise ValueError(f"stage 2 index {k} out of range 1..{n - 1}")
        for j in range(k, n + 1):
            self._partial(j)
        self._reduce_family(k, "step1" if k == n else "step2")

    # stages 3 and 4

    def gen_cube_diag(self, k):
        """``z_k^s d_k`` for ``s <= 3`` and ``k < n``."""
        n = self.n
        if not 1 <= k < n:
            raise ValueError(f"stage 3 index {k} must satisfy 1 <= k < {n}")
        a = self.lookup(_unit(n, k, 3), n)
        b = self.lookup(_unit(n, n), k)
        corr_exps = list(_unit(n, k, 2))
        corr_exps[n - 1] = 1
        corr = self.lookup(corr_exps, n)
        br = self._bracket(a, b)
        node = self.builder.lincomb([(1, br), (3, corr)])
        self._check_limit()
        self._insert(_unit(n, k, 3), k, node)
        self._log("step3", f"z{k}^3 d{k} = [z{k}^3 d{n}, z{n} d{k}] + 3 {_basis_str(corr_exps, n)}")
        dk = self._partial(k)
        for s in (2, 1):
            prev = self.lookup(_unit(n, k, s + 1), k)
            entry = self._scaled(Fraction(1, s + 1), self._bracket(dk, prev))
            self._insert(_unit(n, k, s), k, entry)
            self._log("step3", f"{_basis_str(_unit(n, k, s), k)} = 1/{s + 1} * [d{k}, {_basis_str(_unit(n, k, s + 1), k)}]")

    def gen_linear(self, i, j):
        """``z_i d_j`` for ``i != j``."""
        n = self.n
        if i == j:
            raise ValueError("stage 4 needs i != j; diagonal fields come from stage 3")
        if not (1 <= i <= n and 1 <= j <= n):
            raise DimensionError(f"indices ({i}, {j}) out of range 1..{n}")
        key = (_unit(n, i), j)
        if key in self.memo:
            return self.memo[key]
        a = self.lookup(_unit(n, i), n)
        b = self.lookup(_unit(n, n), j)
        self._log("step4", f"z{i} d{j} = [z{i} d{n}, z{n} d{j}]")
        return self._insert(_unit(n, i), j, self._bracket(a, b))

    def initialize(self):
        """Run stages 1-4 once."""
        if self.initialized:
            return self
        n = self.n
        if n == 1:
            # stages 1, 3, 4 are vacuous; ad_U V = 4 z1^3 d1 starts the chain
            self.gen_step2(1)
        else:
            self.gen_step1()
            for k in range(n - 1, 0, -1):
                self.gen_step2(k)
            for k in range(1, n):
                self.gen_cube_diag(k)
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    if i != j:
                        self.gen_linear(i, j)
        self.initialized = True
        return self

    def _require_init(self):
        if not self.initialized:
            raise MissingPrerequisite("store not initialized; call initialize() first")

    # stages 5-7

    def gen_diag_power(self, i, s):
        """``z_i^s d_i`` for any ``s >= 0``."""
        self._require_init()
        n = self.n
        t = s
        while (_unit(n, i, t), i) not in self.memo:
            t -= 1
        sq = self.lookup(_unit(n, i, 2), i)
        for e in range(t + 1, s + 1):
            prev = self.memo[(_unit(n, i, e - 1), i)]
            factor = 3 - e
            node = self._scaled(Fraction(1, factor), self._bracket(prev, sq))
            self._insert(_unit(n, i, e), i, node)
            self._log("step5", f"z{i}^{e} d{i} = {Fraction(1, factor)} * [z{i}^{e - 1} d{i}, z{i}^2 d{i}]")
        return self.memo[(_unit(n, i, s), i)]

    def gen_offdiag_power(self, i, j, s):
        """``z_i^s d_j`` for ``i != j``."""
        self._require_init()
        if i == j:
            raise ValueError("off-diagonal power needs i != j")
        n = self.n
        key = (_unit(n, i, s), j)
        if key in self.memo:
            return self.memo[key]
        diag = self.gen_diag_power(i, s)
        lin = self.lookup(_unit(n, i), j)
        self._log("step6", f"z{i}^{s} d{j} = [z{i}^{s} d{i}, z{i} d{j}]")
        return self._insert(key[0], j, self._bracket(diag, lin))

    def gen_monomial(self, exps, i):
        """Node id of a certificate for ``z^exps d_i``."""
        self._require_init()
        n = self.n
        exps = tuple(exps)
        if len(exps) != n:
            raise DimensionError(f"monomial of length {len(exps)} on {n}-space")
        if not 1 <= i <= n:
            raise DimensionError(f"direction {i} out of range 1..{n}")
        key = (exps, i)
        if key in self.memo:
            return self.memo[key]
        others = [v for v in range(1, n + 1) if v != i and exps[v - 1]]
        if not others:
            return self.gen_diag_power(i, exps[i - 1])
        if len(others) == 1 and exps[i - 1] == 0:
            return self.gen_offdiag_power(others[0], i, exps[others[0] - 1])
        k = others[-1]
        s = exps[k - 1]
        f = exps[:k - 1] + (0,) + exps[k:]
        p = f[i - 1]
        fz = f[:i - 1] + (p + 1,) + f[i:]
        left = self.gen_monomial(_unit(n, k, s), i)
        right = self.gen_monomial(fz, i)
        node = self._scaled(Fraction(1, p + 1), self._bracket(left, right))
        self._log("step7", f"{_basis_str(exps, i)} = 1/{p + 1} * [{_basis_str(_unit(n, k, s), i)}, {_basis_str(fz, i)}]")
        return self._insert(exps, i, node)

    def generate_field(self, target):
        """Certificate whose evaluation is exactly ``target``."""
        if target.n != self.n:
            raise DimensionError(f"target on {target.n}-space, store on {self.n}-space")
        self.initialize()
        terms = [(c, self.gen_monomial(exps, i)) for exps, i, c in target.terms()]
        if not terms:
            terms = [(1, self._bracket(self.u, self.u))]
        root = self.builder.lincomb(terms)
        self._check_limit()
        return self.builder.certificate(root)


def generate_field(target, store=None):
    """One-shot helper: certificate for ``target`` from a fresh or given store."""
    store = store or CertStore(target.n)
    return store.generate_field(target)


def verify(cert, target):
    """Exact check that ``cert`` evaluates to ``target``."""
    return cert.n == target.n and evaluate(cert) == target
