"""Finite field tower F_p < F_q < F_{q^n}.

Elements of F_q are integer codes ``sum(a_i * p**i)`` over the power basis of
the base modulus.  Elements of F_{q^n} are integer codes ``sum(c_t * q**t)``
where each ``c_t`` is an F_q code, so the base-q digits of a code are exactly
its coordinates over F_q.  An F_q element ``c`` embeds in F_{q^n} as the code
``c`` itself.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# Fields up to this many elements get log/exp/Frobenius lookup tables.
TABLE_LIMIT = 1 << 20
BASE_FIELD_LIMIT = 1 << 12


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def prime_factors(m: int) -> list[int]:
    out = []
    f = 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            while m % f == 0:
                m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def split_prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, e)`` with ``q == p**e``; raise ValueError otherwise."""
    if q < 2:
        raise ValueError(f"q must be a prime power, got {q}")
    p = prime_factors(q)[0]
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"q must be a prime power, got {q}")
    return p, e


class BaseField:
    """F_q = F_p[y]/(modulus) with full q x q operation tables."""

    def __init__(self, p: int, e: int, modulus: Sequence[int]):
        self.p = p
        self.e = e
        self.q = p**e
        self.modulus = list(modulus)
        q = self.q
        if q > BASE_FIELD_LIMIT:
            raise ValueError(f"base field of size {q} is too large")
        digits = [_digits(a, p, e) for a in range(q)]
        self.add_t = [[_undigits([(x + y) % p for x, y in zip(digits[a], digits[b])], p)
                       for b in range(q)] for a in range(q)]
        self.neg_t = [_undigits([(-x) % p for x in digits[a]], p) for a in range(q)]
        self.mul_t = [[0] * q for _ in range(q)]
        for a in range(q):
            for b in range(a, q):
                c = _undigits(_prime_polymulmod(digits[a], digits[b], self.modulus, p), p)
                self.mul_t[a][b] = self.mul_t[b][a] = c
        self.inv_t = [0] * q
        for a in range(1, q):
            row = self.mul_t[a]
            for b in range(1, q):
                if row[b] == 1:
                    self.inv_t[a] = b
                    break
            else:
                raise ValueError(f"modulus {self.modulus} is reducible over F_{p}")

    def add(self, a: int, b: int) -> int:
        return self.add_t[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_t[a][self.neg_t[b]]

    def neg(self, a: int) -> int:
        return self.neg_t[a]

    def mul(self, a: int, b: int) -> int:
        return self.mul_t[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self.inv_t[a]

    def from_int(self, m: int) -> int:
        """Image of the integer m under Z -> F_p -> F_q."""
        return m % self.p

    def __repr__(self) -> str:
        return f"BaseField(p={self.p}, e={self.e}, modulus={self.modulus})"


def _digits(a: int, base: int, length: int) -> list[int]:
    out = []
    for _ in range(length):
        a, r = divmod(a, base)
        out.append(r)
    return out


def _undigits(ds: Iterable[int], base: int) -> int:
    code = 0
    for d in reversed(list(ds)):
        code = code * base + d
    return code


def _prime_polymulmod(a, b, mod, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    d = len(mod) - 1
    for i in range(len(prod) - 1, d - 1, -1):
        c = prod[i]
        if c:
            for j in range(d + 1):
                prod[i - d + j] = (prod[i - d + j] - c * mod[j]) % p
    return (prod + [0] * d)[:d]


# ---------------------------------------------------------------------------
# univariate polynomials over a BaseField, coefficient lists constant first


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(F: BaseField, a: list[int], b: list[int], mod: list[int]) -> list[int]:
    if not a or not b:
        return []
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            mx = F.mul_t[x]
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = F.add_t[prod[i + j]][mx[y]]
    return _pmod(F, prod, mod)


def _pmod(F: BaseField, a: list[int], mod: list[int]) -> list[int]:
    a = _ptrim(list(a))
    d = len(mod) - 1
    lead_inv = F.inv(mod[-1])
    while len(a) > d:
        c = F.mul(a[-1], lead_inv)
        shift = len(a) - 1 - d
        for j in range(d + 1):
            a[shift + j] = F.sub(a[shift + j], F.mul(c, mod[j]))
        _ptrim(a)
    return a


def _ppowmod(F: BaseField, a: list[int], k: int, mod: list[int]) -> list[int]:
    result = [1]
    base = _pmod(F, a, mod)
    while k:
        if k & 1:
            result = _pmulmod(F, result, base, mod)
        k >>= 1
        if k:
            base = _pmulmod(F, base, base, mod)
    return result


def _pgcd(F: BaseField, a: list[int], b: list[int]) -> list[int]:
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(F, a, b)
    return a


def _x_pow_field_power(F: BaseField, m: int, mod: list[int]) -> list[int]:
    """x^(|F|^m) mod ``mod``."""
    r = [0, 1]
    for _ in range(m):
        r = _ppowmod(F, r, F.q, mod)
    return r


def is_irreducible(F: BaseField, poly: Sequence[int]) -> bool:
    """Rabin's test for a monic polynomial over F (coefficients constant first)."""
    f = _ptrim(list(poly))
    d = len(f) - 1
    if d < 1 or f[-1] != 1:
        return False
    if d == 1:
        return True
    if f[0] == 0:
        return False
    xx = _pmod(F, [0, 1], f)
    if _x_pow_field_power(F, d, f) != xx:
        return False
    for r in prime_factors(d):
        h = _x_pow_field_power(F, d // r, f)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = F.sub(diff[1], 1)
        g = _pgcd(F, f, _ptrim(diff))
        if len(g) != 1:
            return False
    return True


def least_irreducible(F: BaseField, d: int) -> list[int]:
    """Lexicographically least monic irreducible of degree d (constant term compared first)."""
    for low in itertools.product(range(F.q), repeat=d):
        if d > 1 and low[0] == 0:
            continue
        cand = list(low) + [1]
        if is_irreducible(F, cand):
            return cand
    raise RuntimeError("no irreducible polynomial found")  # pragma: no cover


def prime_field(p: int) -> BaseField:
    return BaseField(p, 1, [0, 1])


# ---------------------------------------------------------------------------


@dataclass(eq=False)
class FieldCtx:
    """The tower F_p < F_q < F_{q^n} together with its Frobenius data.

    Build instances with :func:`field_create`.  The object is treated as
    immutable; the Frobenius caches are filled lazily under a lock.
    """

    p: int
    e: int
    n: int
    base_modulus: list[int]
    ext_modulus: list[int]
    base: BaseField
    frob_matrix: list[list[int]]
    q: int = field(init=False)
    order: int = field(init=False)

    def __post_init__(self):
        self.q = self.p**self.e
        self.order = self.q**self.n
        self._lock = threading.Lock()
        self._frob_mats: dict[int, list[list[int]]] = {0: _identity(self.n)}
        self._frob_tabs: dict[int, list[int]] = {}
        self._np: dict[str, np.ndarray] = {}
        self.has_tables = self.order <= TABLE_LIMIT
        self._qpow = [self.q**t for t in range(self.n + 1)]
        if self.has_tables:
            self._build_tables()

    # -- representation -----------------------------------------------------

    def coeffs(self, x: int) -> list[int]:
        """F_q coordinates of x over the power basis, constant first."""
        return _digits(x, self.q, self.n)

    def from_coeffs(self, cs: Sequence[int]) -> int:
        if len(cs) != self.n or any(not 0 <= c < self.q for c in cs):
            raise ValueError(f"expected {self.n} coordinates in [0, {self.q})")
        return _undigits(cs, self.q)

    def nested(self, x: int) -> list[list[int]]:
        """Coordinates as n lists of e F_p integers (serialization format)."""
        return [_digits(c, self.p, self.e) for c in self.coeffs(x)]

    def from_nested(self, rows: Sequence[Sequence[int]]) -> int:
        if len(rows) != self.n or any(len(r) != self.e for r in rows):
            raise ValueError(f"expected {self.n} rows of {self.e} F_p digits")
        return self.from_coeffs([_undigits(r, self.p) for r in rows])

    def check(self, x: int) -> int:
        if not isinstance(x, (int, np.integer)) or not 0 <= x < self.order:
            raise ValueError(f"{x!r} is not an element of F_{self.q}^{self.n}")
        return int(x)

    def elements(self) -> range:
        return range(self.order)

    def random_element(self, rng, nonzero: bool = False) -> int:
        lo = 1 if nonzero else 0
        return int(rng.integers(lo, self.order))

    def in_base(self, x: int) -> bool:
        return x < self.q

    # -- arithmetic -----------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.has_tables:
            if a == 0:
                return b
            if b == 0:
                return a
            la, lb = self.log[a], self.log[b]
            z = self.zech[(lb - la) % (self.order - 1)]
            return 0 if z < 0 else self.exp[la + z]
        return self._add_digits(a, b)

    def _add_digits(self, a: int, b: int) -> int:
        F, q = self.base, self.q
        code, mult = 0, 1
        while a or b:
            a, x = divmod(a, q)
            b, y = divmod(b, q)
            code += F.add_t[x][y] * mult
            mult *= q
        return code

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        if self.has_tables:
            return self.exp[self.log[a] + (self.order - 1) // 2]
        F, q = self.base, self.q
        return _undigits([F.neg_t[c] for c in _digits(a, q, self.n)], q)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.has_tables:
            return self.exp[self.log[a] + self.log[b]]
        return self._mul_poly(a, b)

    def _mul_poly(self, a: int, b: int) -> int:
        F = self.base
        r = _pmulmod(F, _digits(a, self.q, self.n), _digits(b, self.q, self.n), self.ext_modulus)
        return _undigits(r, self.q)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.has_tables:
            return self.exp[(self.order - 1) - self.log[a]]
        return self.pow(a, self.order - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        """Square-and-multiply; negative k inverts first."""
        if k < 0:
            a, k = self.inv(a), -k
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            k >>= 1
            if k:
                base = self.mul(base, base)
        return result

    def scalar(self, c: int, x: int) -> int:
        """Multiply x by the F_q element c (c is also its own F_{q^n} code)."""
        return self.mul(c, x)

    # -- Frobenius ------------------------------------------------------------

    def frob_power_matrix(self, j: int) -> list[list[int]]:
        """Matrix of x -> x^(q^j) acting on coordinate columns."""
        j %= self.n
        mats = self._frob_mats
        if j in mats:
            return mats[j]
        with self._lock:
            if j not in mats:
                prev = self.frob_power_matrix(j - 1) if j - 1 in mats else None
                if prev is None:
                    m = _identity(self.n)
                    for _ in range(j):
                        m = _matmul(self.base, self.frob_matrix, m)
                else:
                    m = _matmul(self.base, self.frob_matrix, prev)
                mats[j] = m
        return mats[j]

    def frob_table(self, j: int) -> list[int]:
        """Lookup table of x -> x^(q^j) over all codes (requires tables)."""
        j %= self.n
        tabs = self._frob_tabs
        if j not in tabs:
            arr = self._apply_linear_all(self.frob_power_matrix(j))
            with self._lock:
                tabs.setdefault(j, arr.tolist())
        return tabs[j]

    def frobenius(self, x: int, j: int) -> int:
        j %= self.n
        if j == 0 or x < self.q:
            return x
        if self.has_tables:
            return self.frob_table(j)[x]
        return self._apply_matrix(self.frob_power_matrix(j), x)

    def _apply_matrix(self, m: list[list[int]], x: int) -> int:
        F = self.base
        v = self.coeffs(x)
        out = []
        for row in m:
            acc = 0
            for a, b in zip(row, v):
                if a and b:
                    acc = F.add_t[acc][F.mul_t[a][b]]
            out.append(acc)
        return _undigits(out, self.q)

    # -- table construction ---------------------------------------------------

    def _all_digits(self) -> np.ndarray:
        if "digits" not in self._np:
            codes = np.arange(self.order, dtype=np.int64)
            d = np.empty((self.order, self.n), dtype=np.int64)
            for t in range(self.n):
                d[:, t] = codes % self.q
                codes //= self.q
            self._np["digits"] = d
        return self._np["digits"]

    def _apply_linear_all(self, m: list[list[int]]) -> np.ndarray:
        """Apply an F_q-linear map (matrix on coordinate columns) to every code."""
        D = self._all_digits()
        add_t = np.array(self.base.add_t, dtype=np.int64)
        mul_t = np.array(self.base.mul_t, dtype=np.int64)
        out = np.zeros(self.order, dtype=np.int64)
        for r in range(self.n):
            acc = np.zeros(self.order, dtype=np.int64)
            for t in range(self.n):
                if m[r][t]:
                    acc = add_t[acc, mul_t[m[r][t], D[:, t]]]
            out += acc * self._qpow[r]
        return out

    def _mult_matrix(self, g: int) -> list[list[int]]:
        """Matrix of y -> g*y on coordinate columns."""
        cols = [self._mul_poly(g, self._qpow[t]) for t in range(self.n)]
        cols = [self.coeffs(c) for c in cols]
        return [[cols[t][r] for t in range(self.n)] for r in range(self.n)]

    def _build_tables(self) -> None:
        Q = self.order
        if Q == 2:
            self.generator = 1
            self.log = [-1, 0]
            self.exp = [1, 1]
            self.zech = [-1]
            return
        for g in self._generator_candidates():
            perm = self._apply_linear_all(self._mult_matrix(g)).tolist()
            exp = [1]
            x = perm[1]
            while x != 1 and len(exp) < Q:
                exp.append(x)
                x = perm[x]
            if len(exp) == Q - 1:
                break
        else:  # pragma: no cover
            raise RuntimeError("no primitive element found")
        self.generator = g
        log = [-1] * Q
        for i, x in enumerate(exp):
            log[x] = i
        self.log = log
        self.exp = exp + exp
        if self.p == 2:
            self.zech = []
        else:
            E = np.array(exp, dtype=np.int64)
            d0 = E % self.q
            one_plus = E - d0 + np.array(self.base.add_t, dtype=np.int64)[d0, 1]
            L = np.array(log, dtype=np.int64)
            self.zech = L[one_plus].tolist()

    def _generator_candidates(self):
        yield from range(self.q if self.n > 1 else 2, self.order)
        yield from range(2, self.q)

    # numpy views for compiled kernels
    def np_tables(self) -> dict[str, np.ndarray]:
        if not self.has_tables:
            raise ValueError("field too large for lookup tables")
        if "log" not in self._np:
            self._np["log"] = np.array(self.log, dtype=np.int64)
            self._np["exp"] = np.array(self.exp, dtype=np.int64)
            self._np["zech"] = np.array(self.zech if self.zech else [0], dtype=np.int64)
            self._np["fq_add"] = np.array(self.base.add_t, dtype=np.int64)
            self._np["fq_mul"] = np.array(self.base.mul_t, dtype=np.int64)
            self._np["fq_neg"] = np.array(self.base.neg_t, dtype=np.int64)
            self._np["fq_inv"] = np.array(self.base.inv_t, dtype=np.int64)
        return self._np

    def describe(self) -> dict:
        return {
            "p": self.p,
            "e": self.e,
            "q": self.q,
            "n": self.n,
            "base_modulus": list(self.base_modulus),
            "ext_modulus": list(self.ext_modulus),
        }

    def __repr__(self) -> str:
        return f"FieldCtx(q={self.q}, n={self.n}, ext_modulus={self.ext_modulus})"


def _identity(n: int) -> list[list[int]]:
    return [[1 if r == c else 0 for c in range(n)] for r in range(n)]


def _matmul(F: BaseField, a, b):
    n, m, l = len(a), len(b), len(b[0])
    out = [[0] * l for _ in range(n)]
    for i in range(n):
        for k in range(m):
            x = a[i][k]
            if x:
                mx = F.mul_t[x]
                bk = b[k]
                row = out[i]
                for j in range(l):
                    if bk[j]:
                        row[j] = F.add_t[row[j]][mx[bk[j]]]
    return out


def field_create(p: int, e: int = 1, n: int = 1, modulus_override=None) -> FieldCtx:
    """Build the tower F_p < F_{p^e} < F_{p^(e n)}.

    ``modulus_override`` may be ``(base_modulus, ext_modulus)``; either entry
    may be None to keep the default.  Default moduli are the lexicographically
    least monic irreducibles, comparing coefficients from the constant term up.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if e < 1:
        raise ValueError(f"e must be >= 1, got {e}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    base_over, ext_over = modulus_override if modulus_override else (None, None)
    Fp = prime_field(p)
    if base_over is not None:
        base_mod = [int(c) % p for c in base_over]
        if len(base_mod) != e + 1 or not is_irreducible(Fp, base_mod):
            raise ValueError(f"base modulus {list(base_over)} is not a monic irreducible of degree {e}")
    else:
        base_mod = least_irreducible(Fp, e)
    Fq = BaseField(p, e, base_mod)
    if ext_over is not None:
        ext_mod = [int(c) for c in ext_over]
        if len(ext_mod) != n + 1 or any(not 0 <= c < Fq.q for c in ext_mod) \
                or not is_irreducible(Fq, ext_mod):
            raise ValueError(f"extension modulus {list(ext_over)} is not a monic irreducible of degree {n}")
    else:
        ext_mod = least_irreducible(Fq, n)
    q = Fq.q
    # column t holds the coordinates of (x^t)^q
    cols = []
    for t in range(n):
        xt = [0] * t + [1]
        img = _ppowmod(Fq, xt, q, ext_mod) if n > 1 else [1]
        cols.append((img + [0] * n)[:n])
    frob = [[cols[t][r] for t in range(n)] for r in range(n)]
    return FieldCtx(p=p, e=e, n=n, base_modulus=base_mod, ext_modulus=ext_mod,
                    base=Fq, frob_matrix=frob)


def field_for(q: int, n: int, modulus_override=None) -> FieldCtx:
    """Convenience wrapper taking the prime power q."""
    p, e = split_prime_power(q)
    return field_create(p, e, n, modulus_override)


def frobenius(ctx: FieldCtx, x: int, j: int) -> int:
    if j < 0:
        raise ValueError("Frobenius power must be >= 0")
    return ctx.frobenius(ctx.check(x), j)


def arith(ctx: FieldCtx, op: str, *operands: int) -> int:
    """Dispatch ``add``, ``sub``, ``mul``, ``inv``, ``neg`` or ``pow``."""
    if op == "add":
        a, b = operands
        return ctx.add(ctx.check(a), ctx.check(b))
    if op == "sub":
        a, b = operands
        return ctx.sub(ctx.check(a), ctx.check(b))
    if op == "mul":
        a, b = operands
        return ctx.mul(ctx.check(a), ctx.check(b))
    if op == "inv":
        (a,) = operands
        return ctx.inv(ctx.check(a))
    if op == "neg":
        (a,) = operands
        return ctx.neg(ctx.check(a))
    if op == "pow":
        a, k = operands
        return ctx.pow(ctx.check(a), int(k))
    raise ValueError(f"unknown operation {op!r}")
