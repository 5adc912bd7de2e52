"""
Exact linear algebra over the local rings Z/pZ and Z/p^2Z.

Row vectors throughout: a submodule is the row span of its basis matrix, and
the basis is kept in Howell canonical form so that equality of submodules is
equality of arrays.
"""
import numpy as np

from .basics import Residue, split_modulus, same_modulus
from .common import shape_to_str, unit_inverse, valuations
from .errors import NotASubmodule, ModulusMismatch


class RingMatrix:
    """ A dense matrix over Z/qZ, entries stored reduced in [0, q). """

    __slots__ = ("data", "modulus")

    def __init__(self, data, modulus):
        data = np.asarray(data, dtype=np.int64)
        if data.ndim == 1:
            data = data.reshape(1, -1)
        assert data.ndim == 2, f"expected a 2d array, got shape {data.shape}"
        split_modulus(modulus)
        self.data = data % modulus
        self.modulus = modulus

    @classmethod
    def from_rows(cls, rows, modulus, cols=None):
        rows = list(rows)
        if not rows:
            return cls(np.zeros((0, cols or 0), dtype=np.int64), modulus)
        return cls(np.array(rows, dtype=np.int64), modulus)

    @classmethod
    def identity(cls, size, modulus):
        return cls(np.eye(size, dtype=np.int64), modulus)

    @classmethod
    def zeros(cls, rows, cols, modulus):
        return cls(np.zeros((rows, cols), dtype=np.int64), modulus)

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def prime(self):
        return split_modulus(self.modulus)[0]

    @property
    def level(self):
        return split_modulus(self.modulus)[1]

    def entry(self, i, j):
        return Residue(self.data[i, j], self.modulus)

    def __getitem__(self, key):
        i, j = key
        return self.entry(i, j)

    def _other(self, other):
        if isinstance(other, RingMatrix):
            same_modulus(self.modulus, other.modulus)
            return other.data
        return np.asarray(other, dtype=np.int64)

    def __matmul__(self, other):
        return RingMatrix(self.data @ self._other(other), self.modulus)

    def __add__(self, other):
        return RingMatrix(self.data + self._other(other), self.modulus)

    def __sub__(self, other):
        return RingMatrix(self.data - self._other(other), self.modulus)

    @property
    def T(self):
        return RingMatrix(self.data.T.copy(), self.modulus)

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (self.modulus == other.modulus and self.data.shape == other.data.shape
                and bool(np.array_equal(self.data, other.data)))

    def __hash__(self):
        return hash((self.modulus, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        body = ",".join("[" + ",".join(str(int(x)) for x in row) + "]" for row in self.data)
        return f"[{body}] mod {self.modulus}"


def _howell(data, p, n):
    """
    Howell canonical form of the row span of `data` over Z/p^nZ.

    Pivots are normalised to p^v, entries above a pivot are reduced into
    [0, p^v), and for every pivot row r the row p^(n-v)*r (which vanishes in
    the pivot column) is fed back into the pool so that the Howell property
    holds: the rows with leading zeros span every element of the module with
    those leading zeros.
    """
    q = p ** n
    work = np.asarray(data, dtype=np.int64) % q
    cols = work.shape[1]
    work = work[work.any(axis=1)]
    pivots = []
    for j in range(cols):
        if work.shape[0] == 0:
            break
        col = work[:, j]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        vals = valuations(col[nz], p, n)
        k = int(nz[np.argmin(vals)])
        v = int(vals.min())
        pv = p ** v
        row = (work[k] * unit_inverse(int(col[k]) // pv, q)) % q
        work = np.delete(work, k, axis=0)
        factors = work[:, j] // pv
        work = (work - np.outer(factors, row)) % q
        extra = (row * p ** (n - v)) % q
        if extra.any():
            work = np.vstack([work, extra[None, :]])
        work = work[work.any(axis=1)]
        pivots.append((j, v, row))

    rows = [r for _, _, r in pivots]
    for idx, (j, v, _) in enumerate(pivots):
        pv = p ** v
        prow = rows[idx]
        for i in range(idx):
            f = int(rows[i][j]) // pv
            if f:
                rows[i] = (rows[i] - f * prow) % q
    if not rows:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def howell_form(m):
    p, n = split_modulus(m.modulus)
    return RingMatrix(_howell(m.data, p, n), m.modulus)


def _pivot_info(basis, p, n):
    info = []
    for row in basis:
        j = int(np.nonzero(row)[0][0])
        v = int(valuations(row[j:j + 1], p, n)[0])
        info.append((j, v))
    return info


class Submodule:
    """
    A submodule of (Z/qZ)^ambient_rank, stored as a Howell basis.
    Construct through `Submodule.span`, which canonicalises.
    """

    __slots__ = ("basis", "ambient_rank", "_pivots")

    def __init__(self, basis, ambient_rank):
        assert basis.cols == ambient_rank, \
            f"basis has {basis.cols} columns, ambient rank is {ambient_rank}"
        self.basis = basis
        self.ambient_rank = ambient_rank
        self._pivots = None

    @classmethod
    def span(cls, rows, modulus, ambient_rank=None):
        if isinstance(rows, RingMatrix):
            same_modulus(rows.modulus, modulus)
            data = rows.data
        else:
            data = np.asarray(rows, dtype=np.int64)
            if data.ndim == 1:
                data = data.reshape(-1, ambient_rank) if ambient_rank else data.reshape(1, -1)
        if ambient_rank is None:
            ambient_rank = data.shape[1]
        data = data.reshape(-1, ambient_rank)
        p, n = split_modulus(modulus)
        return cls(RingMatrix(_howell(data, p, n), modulus), ambient_rank)

    @classmethod
    def full(cls, rank, modulus):
        return cls(RingMatrix.identity(rank, modulus), rank)

    @classmethod
    def zero(cls, rank, modulus):
        return cls(RingMatrix.zeros(0, rank, modulus), rank)

    @classmethod
    def direct_power(cls, sub, k):
        """ sub^k inside (Z/q)^(rank*k), block diagonal. """
        r = sub.ambient_rank
        rows = []
        for b in range(k):
            for row in sub.basis.data:
                full = np.zeros(r * k, dtype=np.int64)
                full[b * r:(b + 1) * r] = row
                rows.append(full)
        return cls.span(np.array(rows, dtype=np.int64).reshape(-1, r * k), sub.modulus, r * k)

    @property
    def modulus(self):
        return self.basis.modulus

    @property
    def pivots(self):
        if self._pivots is None:
            p, n = split_modulus(self.modulus)
            self._pivots = _pivot_info(self.basis.data, p, n)
        return self._pivots

    @property
    def order(self):
        p, n = split_modulus(self.modulus)
        out = 1
        for _, v in self.pivots:
            out *= p ** (n - v)
        return out

    def is_zero(self):
        return self.basis.rows == 0

    def is_full(self):
        return self.order == self.modulus ** self.ambient_rank

    def _check(self, other):
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"moduli differ: {self.modulus} vs {other.modulus}")
        assert self.ambient_rank == other.ambient_rank, "ambient ranks differ"

    def reduce(self, x):
        """ Remainder of x after division by the Howell basis. """
        p, _ = split_modulus(self.modulus)
        q = self.modulus
        x = np.asarray(x, dtype=np.int64).reshape(-1) % q
        for (j, v), row in zip(self.pivots, self.basis.data):
            pv = p ** v
            if x[j] % pv:
                return x
            f = int(x[j]) // pv
            if f:
                x = (x - f * row) % q
        return x

    def contains(self, x):
        return not self.reduce(x).any()

    __contains__ = contains

    def __le__(self, other):
        self._check(other)
        return all(other.contains(row) for row in self.basis.data)

    def __eq__(self, other):
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.ambient_rank == other.ambient_rank and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __add__(self, other):
        self._check(other)
        return Submodule.span(np.vstack([self.basis.data, other.basis.data]),
                              self.modulus, self.ambient_rank)

    def intersect(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Submodule.zero(self.ambient_rank, self.modulus)
        stacked = RingMatrix(np.vstack([self.basis.data, other.basis.data]), self.modulus)
        # (a, b) with a*S + b*T = 0 gives a*S in both spans
        rel = kernel(stacked.T)
        a = rel.basis.data[:, :self.basis.rows]
        return Submodule.span((a @ self.basis.data) % self.modulus,
                              self.modulus, self.ambient_rank)

    def elements(self):
        """ Every element of the submodule; desk-scale only. """
        q = self.modulus
        seen = {tuple([0] * self.ambient_rank)}
        frontier = [np.zeros(self.ambient_rank, dtype=np.int64)]
        while frontier:
            nxt = []
            for x in frontier:
                for row in self.basis.data:
                    y = (x + row) % q
                    key = tuple(int(t) for t in y)
                    if key not in seen:
                        seen.add(key)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def __repr__(self):
        return f"Submodule(order={self.order}, rank={self.ambient_rank}, basis {shape_to_str(self.basis.data)})"


def membership(x, sub):
    return sub.contains(x)


def equal(s, t):
    s._check(t)
    return s == t


def intersect(s, t):
    return s.intersect(t)


def submodule_sum(s, t):
    return s + t


def kernel(m):
    """ {x : m x = 0} as a submodule of (Z/q)^cols. """
    p, n = split_modulus(m.modulus)
    q = m.modulus
    cols = m.cols
    h = _howell(m.data, p, n)
    r = h.shape[0]
    aug = np.hstack([h.T, np.eye(cols, dtype=np.int64)])
    k = _howell(aug, p, n)
    tails = k[~k[:, :r].any(axis=1), r:] if r else k
    return Submodule.span(tails.reshape(-1, cols), q, cols)


def image(m):
    """ Column span of m inside (Z/q)^rows. """
    return Submodule.span(m.data.T, m.modulus, m.rows)


def preimage(m, sub):
    """ {x : m x in sub} as a submodule of (Z/q)^cols. """
    same_modulus(m.modulus, sub.modulus)
    assert m.rows == sub.ambient_rank, "codomain rank mismatch"
    if sub.is_zero():
        return kernel(m)
    q = m.modulus
    joint = RingMatrix(np.hstack([m.data, (-sub.basis.data.T) % q]), q)
    rel = kernel(joint)
    return Submodule.span(rel.basis.data[:, :m.cols], q, m.cols)


def apply(m, sub):
    """ Image of a submodule under x -> m x. """
    same_modulus(m.modulus, sub.modulus)
    if sub.is_zero():
        return Submodule.zero(m.rows, m.modulus)
    return Submodule.span((sub.basis.data @ m.data.T) % m.modulus, m.modulus, m.rows)


def _smith_local(rel, k, p, n):
    """
    Diagonalise the relation rows over Z/p^n using row and column operations.
    Returns the diagonal valuations (n for zero) and the inverse column
    transform whose rows generate the cyclic summands of Z^k / rel.
    """
    q = p ** n
    d = np.asarray(rel, dtype=np.int64).reshape(-1, k) % q
    qinv = np.eye(k, dtype=np.int64)
    diag = []
    t = 0
    while t < min(d.shape[0], k):
        sub = d[t:, t:]
        if not sub.any():
            break
        vals = np.where(sub != 0, valuations(sub, p, n), n + 1)
        flat = int(np.argmin(vals))
        i, j = divmod(flat, sub.shape[1])
        i, j = i + t, j + t
        v = int(vals.flat[flat])
        pv = p ** v
        d[[t, i]] = d[[i, t]]
        if j != t:
            d[:, [t, j]] = d[:, [j, t]]
            qinv[[t, j]] = qinv[[j, t]]
        d[t] = (d[t] * unit_inverse(int(d[t, t]) // pv, q)) % q
        for r in range(t + 1, d.shape[0]):
            f = int(d[r, t]) // pv
            if f:
                d[r] = (d[r] - f * d[t]) % q
        for c in range(t + 1, k):
            f = int(d[t, c]) // pv
            if f:
                d[:, c] = (d[:, c] - f * d[:, t]) % q
                qinv[t] = (qinv[t] + f * qinv[c]) % q
        diag.append(v)
        t += 1
    diag.extend([n] * (k - len(diag)))
    return diag, qinv


def quotient_presentation(num, den):
    """
    Cyclic decomposition of num/den.
    Returns a list of (order, generator) pairs, generator a vector in the
    ambient module lying in num, sorted by order; trivial summands dropped.
    """
    num._check(den)
    if not den <= num:
        raise NotASubmodule("denominator is not contained in numerator")
    p, n = split_modulus(num.modulus)
    q = num.modulus
    k = num.basis.rows
    if k == 0:
        return []
    b = num.basis.data
    rel = preimage(RingMatrix(b.T, q), den)
    diag, qinv = _smith_local(rel.basis.data, k, p, n)
    out = []
    for i, v in enumerate(diag):
        order = p ** v
        if order > 1:
            out.append((order, (qinv[i] @ b) % q))
    out.sort(key=lambda t: t[0])
    return out


def quotient_invariants(num, den):
    """ Invariant-factor orders of num/den, sorted; [] for a trivial quotient. """
    return [order for order, _ in quotient_presentation(num, den)]
