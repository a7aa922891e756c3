"""Semigroup handles: finite Cayley tables and enumerated countable semigroups.

Elements are addressed by their position in the handle's canonical
enumeration (a non-negative int).  The adjoined identity of X^1 is never an
element index; it is written ``None`` wherever a coefficient from X^1 is
allowed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import product as iproduct

import numpy as np


class SemigroupError(Exception):
    pass


class ForeignElementError(SemigroupError):
    """An element was used with a handle it does not belong to."""


@dataclass(frozen=True)
class Element:
    """An element index bound to its handle."""

    semigroup: "Semigroup"
    index: int

    def __mul__(self, other):
        return Element(self.semigroup, mul(self.semigroup, self, other))

    def __repr__(self):
        return f"Element({self.semigroup.render(self.index)})"


class Semigroup:
    """Base class for semigroup handles.

    Subclasses provide ``mul`` on indices and ``render``.  ``order`` is an int
    for finite handles and ``None`` for countably infinite ones.
    """

    order = None
    identity = None
    zero = None
    tags = frozenset()
    # 'nat' or 'int' when the handle is (N,+) or (Z,+) with the standard
    # enumeration; enables the linear-normal-form oracle of polynomials.
    additive = None

    def __init__(self, name):
        self.name = name

    @property
    def is_finite(self):
        return self.order is not None

    def mul(self, a, b):
        raise NotImplementedError

    def render(self, a):
        return str(a)

    def mul_array(self, a, b):
        """Vectorized product on index arrays; subclasses override when cheap."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a, b = np.broadcast_arrays(a, b)
        out = np.empty(a.shape, dtype=np.int64)
        flat_a, flat_b, flat_o = a.ravel(), b.ravel(), out.ravel()
        for k in range(flat_a.size):
            flat_o[k] = self.mul(int(flat_a[k]), int(flat_b[k]))
        return out

    def inverse(self, a):
        """Group inverse, when the handle knows it; ``None`` otherwise."""
        return None

    def shift_fibers(self):
        """Structural knowledge about the fibers {x : ax=b}, {x : xa=b}.

        Returns ``'finite'`` for finite handles, ``'injective'`` when every
        shift is injective, ``'bounded'`` when fibers are known to be
        finite, a tuple
        ``('infinite', a, b)`` naming a shift with an infinite fiber, or
        ``None`` when nothing is known beyond a window.
        """
        if self.is_finite:
            return "finite"
        if {"cancellative", "group"} & set(self.tags):
            return "injective"
        return None

    def check(self, a):
        if isinstance(a, Element):
            if a.semigroup is not self:
                raise ForeignElementError(
                    f"element {a!r} belongs to {a.semigroup.name}, not {self.name}")
            a = a.index
        if not isinstance(a, (int, np.integer)) or a < 0 or (
                self.order is not None and a >= self.order):
            raise ForeignElementError(f"{a!r} is not an element of {self.name}")
        return int(a)

    def element(self, a):
        return Element(self, self.check(a))

    def power(self, a, n):
        if n < 1:
            raise ValueError("powers start at 1")
        result = a
        for _ in range(n - 1):
            result = self.mul(result, a)
        return result

    def mul_ext(self, u, v):
        """Product in X^1 where ``None`` is the adjoined identity."""
        if u is None:
            return v
        if v is None:
            return u
        return self.mul(u, v)

    def window(self, size=None):
        return Window(self, size)

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


def mul(S, a, b):
    """Product of two elements of ``S`` (indices or bound elements)."""
    return S.mul(S.check(a), S.check(b))


class Window:
    """The first ``size`` elements of a handle's enumeration.

    For finite handles the default window is the whole semigroup.
    """

    def __init__(self, semigroup, size=None):
        if size is None:
            if not semigroup.is_finite:
                raise ValueError("an infinite semigroup needs an explicit window size")
            size = semigroup.order
        size = int(size)
        if size < 1:
            raise ValueError("window size must be at least 1")
        if semigroup.is_finite and size > semigroup.order:
            raise ValueError(
                f"window {size} exceeds the order {semigroup.order} of {semigroup.name}")
        self.semigroup = semigroup
        self.size = size

    @property
    def exhaustive(self):
        return self.semigroup.is_finite and self.size == self.semigroup.order

    @property
    def elements(self):
        return range(self.size)

    def __contains__(self, a):
        return isinstance(a, (int, np.integer)) and 0 <= a < self.size

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"Window({self.semigroup.name}, {self.size})"


# --------------------------------------------------------------------------
# finite handles


class CayleySemigroup(Semigroup):
    """A finite semigroup given by its multiplication table.

    ``table[i][j]`` is the index of ``i*j``.  Associativity is not checked
    here; use :func:`polybound.structure.check_associative`.
    """

    def __init__(self, table, name="cayley", identity=None, zero=None, tags=(),
                 labels=None):
        super().__init__(name)
        arr = np.array(table, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise SemigroupError("a Cayley table must be square")
        n = arr.shape[0]
        if n == 0:
            raise SemigroupError("empty semigroups are not allowed")
        if arr.min() < 0 or arr.max() >= n:
            raise SemigroupError("Cayley table entries out of range")
        self.table = arr
        self._rows = arr.tolist()
        self.order = n
        self.tags = frozenset(tags)
        self.labels = labels
        if identity is None:
            identity = _find_identity(self._rows)
        elif not all(self._rows[identity][x] == x == self._rows[x][identity] for x in range(n)):
            raise SemigroupError(f"{identity} is not an identity")
        if zero is None:
            zero = _find_zero(self._rows)
        elif not all(self._rows[zero][x] == zero == self._rows[x][zero] for x in range(n)):
            raise SemigroupError(f"{zero} is not a zero")
        self.identity = identity
        self.zero = zero

    def mul(self, a, b):
        return self._rows[a][b]

    def mul_array(self, a, b):
        return self.table[np.asarray(a), np.asarray(b)]

    def render(self, a):
        if self.labels is not None:
            return str(self.labels[a])
        return str(a)

    @cached_property
    def _inverses(self):
        e = self.identity
        if e is None:
            return None
        inv = {}
        for x in range(self.order):
            for y in range(self.order):
                if self._rows[x][y] == e == self._rows[y][x]:
                    inv[x] = y
                    break
        return inv

    def inverse(self, a):
        inv = self._inverses
        return None if inv is None else inv.get(a)

    def rows(self):
        return self._rows


def _find_identity(rows):
    n = len(rows)
    for e in range(n):
        if all(rows[e][x] == x == rows[x][e] for x in range(n)):
            return e
    return None


def _find_zero(rows):
    n = len(rows)
    for z in range(n):
        if all(rows[z][x] == z == rows[x][z] for x in range(n)):
            return z
    return None


def as_table(S):
    """The Cayley table (list of rows) of a finite handle."""
    if not S.is_finite:
        raise SemigroupError(f"{S.name} is infinite")
    if isinstance(S, CayleySemigroup):
        return S.rows()
    n = S.order
    return [[S.mul(a, b) for b in range(n)] for a in range(n)]


def from_cayley(table, name="cayley", **kwargs):
    return CayleySemigroup(table, name=name, **kwargs)


def make_cyclic(n):
    """C_n written additively: element k is the residue k mod n."""
    if n < 1:
        raise ValueError("cyclic order must be positive")
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return CayleySemigroup(table, name=f"C{n}", identity=0,
                           tags={"commutative", "cancellative", "group"})


def make_symmetric3():
    """S_3 as permutations of (0,1,2) in lexicographic order; product is
    composition ``(p*q)(i) = p(q(i))``."""
    from itertools import permutations

    perms = list(permutations(range(3)))
    index = {p: k for k, p in enumerate(perms)}
    table = [[index[tuple(p[q[i]] for i in range(3))] for q in perms] for p in perms]
    labels = ["".join(map(str, p)) for p in perms]
    return CayleySemigroup(table, name="S3", identity=0,
                           tags={"cancellative", "group"}, labels=labels)


def make_semilattice(n):
    """Finite X_n on {0..n-1}: x*x = x, x*y = 0 otherwise."""
    table = [[i if i == j else 0 for j in range(n)] for i in range(n)]
    return CayleySemigroup(table, name=f"X{n}", tags={"commutative"})


def make_taimanov_finite(n):
    """Taimanov operation on {0..n-1}: x*y = 1 if x = y > 1, else 0."""
    if n < 2:
        raise ValueError("the Taimanov table needs the elements 0 and 1")
    table = [[1 if (i == j and i > 1) else 0 for j in range(n)] for i in range(n)]
    return CayleySemigroup(table, name=f"taimanov{n}", tags={"commutative"})


def make_trivial():
    return CayleySemigroup([[0]], name="trivial", identity=0,
                           tags={"commutative", "cancellative", "group"})


def make_left_zero(n):
    """x*y = x."""
    return CayleySemigroup([[i] * n for i in range(n)], name=f"LZ{n}")


# --------------------------------------------------------------------------
# infinite builtins


def int_to_index(z):
    """Enumeration of Z as 0, 1, -1, 2, -2, ..."""
    return 2 * z - 1 if z > 0 else -2 * z


def index_to_int(k):
    return (k + 1) // 2 if k % 2 else -(k // 2)


class NatPlus(Semigroup):
    additive = "nat"
    tags = frozenset({"commutative", "cancellative"})
    identity = 0

    def __init__(self):
        super().__init__("nat-plus")

    def mul(self, a, b):
        return a + b

    def mul_array(self, a, b):
        return np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)

    def shift_fibers(self):
        return "injective"


class IntPlus(Semigroup):
    additive = "int"
    tags = frozenset({"commutative", "cancellative", "group"})
    identity = 0

    def __init__(self):
        super().__init__("int-plus")

    def mul(self, a, b):
        return int_to_index(index_to_int(a) + index_to_int(b))

    def mul_array(self, a, b):
        z = _idx_to_int_arr(np.asarray(a, dtype=np.int64)) + _idx_to_int_arr(
            np.asarray(b, dtype=np.int64))
        return _int_to_idx_arr(z)

    def render(self, a):
        return str(index_to_int(a))

    def inverse(self, a):
        return int_to_index(-index_to_int(a))


def _idx_to_int_arr(k):
    return np.where(k % 2 == 1, (k + 1) // 2, -(k // 2))


def _int_to_idx_arr(z):
    return np.where(z > 0, 2 * z - 1, -2 * z)


class FreeMonoid(Semigroup):
    """Free monoid on k letters, words in shortlex order; index 0 is the
    empty word."""

    tags = frozenset({"cancellative"})
    identity = 0

    def __init__(self, k):
        if k < 1:
            raise ValueError("need at least one generator")
        super().__init__(f"free:{k}")
        self.k = k
        if k == 1:
            self.tags = frozenset({"cancellative", "commutative"})

    def word(self, a):
        k = self.k
        if k == 1:
            return (0,) * a
        length, start = 0, 0
        while a >= start + k ** length:
            start += k ** length
            length += 1
        rank = a - start
        letters = []
        for _ in range(length):
            rank, r = divmod(rank, k)
            letters.append(r)
        return tuple(reversed(letters))

    def index(self, word):
        k = self.k
        if k == 1:
            return len(word)
        start = sum(k ** l for l in range(len(word)))
        rank = 0
        for letter in word:
            rank = rank * k + letter
        return start + rank

    def mul(self, a, b):
        if self.k == 1:
            return a + b
        return self.index(self.word(a) + self.word(b))

    def render(self, a):
        w = self.word(a)
        if not w:
            return "ε"
        return "".join(chr(ord("a") + c) if c < 26 else f"<{c}>" for c in w)


class Taimanov(Semigroup):
    """Taimanov's semigroup on omega: x*y = 1 if x = y > 1, else 0."""

    tags = frozenset({"commutative"})
    zero = 0

    def __init__(self):
        super().__init__("taimanov")

    def mul(self, a, b):
        return 1 if a == b and a > 1 else 0

    def mul_array(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return ((a == b) & (a > 1)).astype(np.int64)

    def shift_fibers(self):
        # 2*x = 0 for every x != 2
        return ("infinite", 2, 0)


class SemilatticeOmega(Semigroup):
    """X_omega: x*x = x, x*y = 0 for x != y."""

    tags = frozenset({"commutative"})
    zero = 0

    def __init__(self):
        super().__init__("semilattice-omega")

    def mul(self, a, b):
        return a if a == b else 0

    def mul_array(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.where(a == b, a, 0)

    def shift_fibers(self):
        # 0*x = 0 for every x
        return ("infinite", 0, 0)


def make_nat_plus():
    return NatPlus()


def make_int_plus():
    return IntPlus()


def make_free_monoid(k):
    return FreeMonoid(k)


def make_taimanov():
    return Taimanov()


def make_semilattice_omega():
    return SemilatticeOmega()


# --------------------------------------------------------------------------
# diagonal enumeration of pairs


def _tri(s):
    return s * (s + 1) // 2


def diagonal_index(i, j, n1, n2):
    """Position of (i, j) in the diagonal order of range(n1) x range(n2).

    Pairs are ordered by i+j, then by j; ``None`` means an infinite factor.
    """
    s = i + j
    if n1 is None and n2 is None:
        return _tri(s) + j
    if n1 is not None and n2 is not None:
        return _finite_diagonal(n1, n2)[1][(i, j)]
    if n1 is None:
        m = n2
        before = _tri(s) if s <= m else _tri(m) + (s - m) * m
        return before + j
    m = n1
    before = _tri(s) if s <= m else _tri(m) + (s - m) * m
    lo = max(0, s - m + 1)
    return before + (j - lo)


def diagonal_pair(k, n1, n2):
    if n1 is None and n2 is None:
        s = (math.isqrt(8 * k + 1) - 1) // 2
        j = k - _tri(s)
        return s - j, j
    if n1 is not None and n2 is not None:
        return _finite_diagonal(n1, n2)[0][k]
    m = n2 if n1 is None else n1
    if k < _tri(m):
        s = (math.isqrt(8 * k + 1) - 1) // 2
        off = k - _tri(s)
    else:
        s = m + (k - _tri(m)) // m
        off = (k - _tri(m)) % m
    if n1 is None:
        j = off
    else:
        j = max(0, s - m + 1) + off
    return s - j, j


_FIN_DIAG = {}


def _finite_diagonal(n1, n2):
    key = (n1, n2)
    if key not in _FIN_DIAG:
        pairs = sorted(iproduct(range(n1), range(n2)), key=lambda p: (p[0] + p[1], p[1]))
        _FIN_DIAG[key] = (pairs, {p: k for k, p in enumerate(pairs)})
    return _FIN_DIAG[key]


# --------------------------------------------------------------------------
# constructions


class ProductSemigroup(Semigroup):
    """Direct product with componentwise multiplication.

    Coefficients of polynomials over a product may be *mixed* pairs such as
    ``(None, b)`` that live in X^1 x Y^1 but not in (X x Y)^1; ``mul_ext``
    handles them componentwise.
    """

    def __init__(self, left, right):
        super().__init__(f"product({left.name},{right.name})")
        self.left = left
        self.right = right
        if left.is_finite and right.is_finite:
            self.order = left.order * right.order
        tags = set(left.tags) & set(right.tags)
        self.tags = frozenset(tags & {"commutative", "cancellative", "group"})
        if left.identity is not None and right.identity is not None:
            self.identity = self.pair_index(left.identity, right.identity)
        if left.zero is not None and right.zero is not None:
            self.zero = self.pair_index(left.zero, right.zero)
        self._table = None
        if self.is_finite:
            n1, n2 = left.order, right.order
            self._pairs = [diagonal_pair(k, n1, n2) for k in range(self.order)]
            rows = []
            for (a1, a2) in self._pairs:
                rows.append([self.pair_index(left.mul(a1, b1), right.mul(a2, b2))
                             for (b1, b2) in self._pairs])
            self._table = np.array(rows, dtype=np.int64)
            self._rows = rows

    def components(self, a):
        if self._table is not None:
            return self._pairs[a]
        return diagonal_pair(a, self.left.order, self.right.order)

    def pair_index(self, a, b):
        return diagonal_index(a, b, self.left.order, self.right.order)

    def mul(self, a, b):
        if self._table is not None:
            return self._rows[a][b]
        a1, a2 = self.components(a)
        b1, b2 = self.components(b)
        return self.pair_index(self.left.mul(a1, b1), self.right.mul(a2, b2))

    def mul_array(self, a, b):
        if self._table is not None:
            return self._table[np.asarray(a), np.asarray(b)]
        return super().mul_array(a, b)

    def render(self, a):
        a1, a2 = self.components(a)
        return f"({self.left.render(a1)},{self.right.render(a2)})"

    def inverse(self, a):
        a1, a2 = self.components(a)
        i1, i2 = self.left.inverse(a1), self.right.inverse(a2)
        if i1 is None or i2 is None:
            return None
        return self.pair_index(i1, i2)

    def shift_fibers(self):
        if self.is_finite:
            return "finite"
        kinds = (self.left.shift_fibers(), self.right.shift_fibers())
        if all(k in ("finite", "injective") for k in kinds):
            return "injective" if "finite" not in kinds else None
        return None

    def split_ext(self, u):
        if u is None:
            return None, None
        if isinstance(u, tuple):
            return u
        return self.components(u)

    def join_ext(self, u1, u2):
        if u1 is None and u2 is None:
            return None
        if u1 is None or u2 is None:
            return (u1, u2)
        return self.pair_index(u1, u2)

    def mul_ext(self, u, v):
        if u is None:
            return v
        if v is None:
            return u
        if not isinstance(u, tuple) and not isinstance(v, tuple):
            return self.mul(u, v)
        u1, u2 = self.split_ext(u)
        v1, v2 = self.split_ext(v)
        return self.join_ext(self.left.mul_ext(u1, v1), self.right.mul_ext(u2, v2))


def product(S, T):
    return ProductSemigroup(S, T)


class _Extension(Semigroup):
    """X with one fresh element placed at index 0; old index i becomes i+1."""

    fresh_label = "?"

    def __init__(self, base, name):
        super().__init__(name)
        self.base = base
        if base.is_finite:
            self.order = base.order + 1
        self.tags = frozenset(t for t in base.tags if t == "commutative")

    def inner(self, a):
        return a - 1

    def outer(self, a):
        return a + 1

    def render(self, a):
        if a == 0:
            return self.fresh_label
        return self.base.render(a - 1)

    def shift_fibers(self):
        if self.is_finite:
            return "finite"
        return None


class AdjoinIdentity(_Extension):
    fresh_label = "1"

    def __init__(self, base):
        super().__init__(base, f"adjoin1({base.name})")
        self.identity = 0
        if base.zero is not None:
            self.zero = base.zero + 1

    def mul(self, a, b):
        if a == 0:
            return b
        if b == 0:
            return a
        return self.base.mul(a - 1, b - 1) + 1

    def shift_fibers(self):
        if self.is_finite:
            return "finite"
        kind = self.base.shift_fibers()
        if kind in ("injective", "bounded"):
            # the fresh identity adds at most one solution
            return "bounded"
        if isinstance(kind, tuple):
            return ("infinite", kind[1] + 1, kind[2] + 1)
        return None


class AdjoinZero(_Extension):
    fresh_label = "0"

    def __init__(self, base):
        super().__init__(base, f"adjoin0({base.name})")
        self.zero = 0

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self.base.mul(a - 1, b - 1) + 1

    def shift_fibers(self):
        if self.is_finite:
            return "finite"
        return ("infinite", 0, 0)


def _materialize(ext):
    if not ext.is_finite:
        return ext
    n = ext.order
    table = [[ext.mul(a, b) for b in range(n)] for a in range(n)]
    labels = [ext.render(a) for a in range(n)]
    S = CayleySemigroup(table, name=ext.name, identity=ext.identity, zero=ext.zero,
                        tags=ext.tags, labels=labels)
    S.base = ext.base
    return S


def adjoin_identity(S):
    """X^1: a fresh identity at index 0, even if S is already a monoid."""
    return _materialize(AdjoinIdentity(S))


def adjoin_zero(S):
    """X^0: a fresh absorbing zero at index 0."""
    return _materialize(AdjoinZero(S))


class SemidirectPM(Semigroup):
    """A x| {1,-1} for an abelian group A: <x,i>*<y,j> = <x + i*y, ij>.

    Enumeration: the diagonal order of A's enumeration times (+1, -1).
    """

    tags = frozenset({"cancellative", "group"})

    def __init__(self, base):
        if "group" not in base.tags or "commutative" not in base.tags:
            raise SemigroupError("the semidirect construction needs an abelian group")
        super().__init__(f"semidirect-pm({base.name})" if base.name != "int-plus" else "zpm")
        self.base = base
        if base.is_finite:
            self.order = 2 * base.order
        self.identity = self.pair_index(base.identity, 1)

    def components(self, a):
        x, j = diagonal_pair(a, self.base.order, 2)
        return x, (1 if j == 0 else -1)

    def pair_index(self, x, sign):
        return diagonal_index(x, 0 if sign == 1 else 1, self.base.order, 2)

    def mul(self, a, b):
        x, i = self.components(a)
        y, j = self.components(b)
        if i == -1:
            y = self.base.inverse(y)
        return self.pair_index(self.base.mul(x, y), i * j)

    def mul_array(self, a, b):
        if isinstance(self.base, IntPlus):
            x, i = _zpm_split(np.asarray(a, dtype=np.int64))
            y, j = _zpm_split(np.asarray(b, dtype=np.int64))
            return _zpm_join(x + i * y, i * j)
        return super().mul_array(a, b)

    def render(self, a):
        x, i = self.components(a)
        return f"<{self.base.render(x)},{i}>"

    def inverse(self, a):
        x, i = self.components(a)
        if i == 1:
            return self.pair_index(self.base.inverse(x), 1)
        return a

    def element_of(self, x, sign):
        """Index of <x, sign> where x is given as a base index."""
        return self.pair_index(x, sign)

    def shift_fibers(self):
        return "finite" if self.is_finite else "injective"


def _zpm_split(k):
    # diagonal order of N x {0,1}: 0 -> (0,0); k >= 1 -> s = (k-1)//2 + 1, j = (k-1)%2
    j = np.where(k == 0, 0, (k - 1) % 2)
    s = np.where(k == 0, 0, (k - 1) // 2 + 1)
    i = s - j
    return _idx_to_int_arr(i), 1 - 2 * j


def _zpm_join(x, sign):
    i = _int_to_idx_arr(x)
    j = (1 - sign) // 2
    s = i + j
    return np.where(s == 0, 0, 1 + 2 * (s - 1) + j)


def make_semidirect_pm(A=None):
    """Example-style group A x| {1,-1}; defaults to A = (Z,+)."""
    return SemidirectPM(make_int_plus() if A is None else A)


def zpm_element(G, x, sign):
    """<x, sign> in Z x| {1,-1} from an integer x."""
    return G.pair_index(int_to_index(x), sign)
