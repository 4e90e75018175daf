"""Finite fields F_q (q a prime power) with log/Zech tables and
multiplicative characters stored as exponents.

Elements are plain ints in ``range(q)``: the base-``characteristic``
digits of the int are the coefficients (constant term first) of the
element's representative modulo ``modulus``. 0 and 1 are the additive
and multiplicative identities in every field.
"""

from __future__ import annotations

from functools import cached_property, lru_cache

import numpy as np

from ._validation import check_prime, prime_factors

# q above this is outside desk scale; tables are O(q).
MAX_FIELD_SIZE = 1 << 21
# full q x q numpy tables are only built up to this size
MAX_TABLE_SIZE = 2048


class FieldError(ValueError):
    pass


class CharacterOrderError(FieldError):
    """The requested character order does not divide q - 1."""


# -- prime-field polynomial helpers (lists, constant term first) ----------


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim(list(a))
    inv_lead = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, m, p)


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _is_irreducible_prime(f: list[int], p: int) -> bool:
    # f monic of degree n is irreducible iff gcd(f, X^(p^k) - X) = 1, k <= n/2
    n = len(f) - 1
    x = [0, 1]
    power = x
    for _ in range(n // 2):
        # power <- power^p mod f
        acc = [1]
        base = power
        e = p
        while e:
            if e & 1:
                acc = _pmulmod(acc, base, f, p)
            base = _pmulmod(base, base, f, p)
            e >>= 1
        power = acc
        diff = list(power) + [0] * max(0, 2 - len(power))
        diff[1] = (diff[1] - 1) % p
        if len(_pgcd(f, _trim(diff), p)) != 1:
            return False
    return True


def _digits(x: int, p: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        x, r = divmod(x, p)
        out.append(r)
    return out


def _undigits(ds, p: int) -> int:
    x = 0
    for c in reversed(ds):
        x = x * p + c
    return x


class FieldSpec:
    """The finite field with ``characteristic ** ext_degree`` elements.

    Use :func:`make_field` rather than calling this directly; it picks the
    canonical modulus and generator and caches the result.
    """

    def __init__(self, characteristic: int, ext_degree: int, modulus, generator: int,
                 exp: list[int]):
        self.characteristic = characteristic
        self.ext_degree = ext_degree
        self.q = characteristic ** ext_degree
        self.modulus = tuple(modulus) if modulus is not None else None
        self.generator = generator
        q = self.q
        self._exp = tuple(exp)
        log = [-1] * q
        for k, x in enumerate(exp):
            log[x] = k
        self._log = tuple(log)
        # zech[k] = log(1 + g^k), -1 when 1 + g^k = 0
        p = characteristic
        zech = []
        for x in exp:
            d0 = x % p
            y = x - d0 + (d0 + 1) % p
            zech.append(log[y])
        self._zech = tuple(zech)

    # -- basic facts ------------------------------------------------------

    def __repr__(self) -> str:
        return f"FieldSpec(q={self.q})"

    def __reduce__(self):
        return (make_field, (self.characteristic, self.ext_degree))

    @property
    def order(self) -> int:
        """Order of the unit group."""
        return self.q - 1

    def elements(self) -> range:
        return range(self.q)

    def log(self, x: int) -> int:
        """Discrete log base the generator; raises on 0."""
        if x == 0:
            raise FieldError("log of zero")
        return self._log[x]

    def exp(self, k: int) -> int:
        return self._exp[k % (self.q - 1)]

    @property
    def log_table(self) -> tuple[int, ...]:
        """``log_table[x]`` for x != 0; entry 0 is the sentinel -1."""
        return self._log

    # -- arithmetic -------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.ext_degree == 1:
            return (a + b) % self.q
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.ext_degree == 1:
            return (-a) % self.q
        p = self.characteristic
        return _undigits([(-c) % p for c in _digits(a, p, self.ext_degree)], p)

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.ext_degree == 1:
            return (a * b) % self.q
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("negative power of zero")
            return 1 if e == 0 else 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def from_int(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return n % self.characteristic

    # -- numpy tables for the batch enumerators ----------------------------

    @cached_property
    def add_table(self) -> np.ndarray:
        self._check_table_size()
        q = self.q
        if self.ext_degree == 1:
            r = np.arange(q)
            return (r[:, None] + r[None, :]) % q
        p, n = self.characteristic, self.ext_degree
        digits = np.array([_digits(x, p, n) for x in range(q)], dtype=np.int64)
        weights = p ** np.arange(n, dtype=np.int64)
        s = (digits[:, None, :] + digits[None, :, :]) % p
        return (s * weights).sum(axis=2)

    @cached_property
    def mul_table(self) -> np.ndarray:
        self._check_table_size()
        q = self.q
        if self.ext_degree == 1:
            r = np.arange(q)
            return (r[:, None] * r[None, :]) % q
        log = np.array(self._log)
        exp = np.array(self._exp)
        t = exp[(log[:, None] + log[None, :]) % (q - 1)]
        t[0, :] = 0
        t[:, 0] = 0
        return t

    @cached_property
    def neg_array(self) -> np.ndarray:
        return np.array([self.neg(a) for a in range(self.q)])

    @cached_property
    def log_array(self) -> np.ndarray:
        return np.array(self._log, dtype=np.int64)

    @cached_property
    def exp_array(self) -> np.ndarray:
        return np.array(self._exp, dtype=np.int64)

    @cached_property
    def digit_array(self) -> np.ndarray:
        p, n = self.characteristic, self.ext_degree
        x = np.arange(self.q, dtype=np.int64)
        out = np.empty((self.q, n), dtype=np.int64)
        for i in range(n):
            out[:, i] = x % p
            x //= p
        return out

    def add_vec(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise sum for arrays of any size field (no q x q table)."""
        if self.ext_degree == 1:
            return (a + b) % self.q
        p = self.characteristic
        weights = p ** np.arange(self.ext_degree, dtype=np.int64)
        dig = self.digit_array
        return ((dig[a] + dig[b]) % p) @ weights

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        if self.ext_degree == 1:
            return (a * b) % self.q
        log, exp = self.log_array, self.exp_array
        a = np.asarray(a)
        b = np.asarray(b)
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)

    def _check_table_size(self):
        if self.q > MAX_TABLE_SIZE:
            raise FieldError(f"q={self.q} too large for dense operation tables")


def _find_modulus(p: int, n: int) -> tuple[int, ...]:
    # candidates ordered by (c_{n-1}, ..., c_0), i.e. by integer encoding
    for code in range(p ** n):
        f = _digits(code, p, n) + [1]
        if f[0] == 0:
            continue
        if _is_irreducible_prime(f, p):
            return tuple(f)
    raise RuntimeError(f"no irreducible polynomial of degree {n} over F_{p}")


@lru_cache(maxsize=None)
def make_field(characteristic: int, ext_degree: int = 1) -> FieldSpec:
    """Build F_q with q = characteristic ** ext_degree.

    The modulus is the smallest monic irreducible (comparing coefficients
    from X^(n-1) down to the constant) and the generator is the
    smallest-index element of order q - 1.
    """
    check_prime(characteristic, "characteristic")
    if not isinstance(ext_degree, int) or ext_degree < 1:
        raise ValueError(f"ext_degree={ext_degree!r} must be a positive integer")
    p, n = characteristic, ext_degree
    q = p ** n
    if q > MAX_FIELD_SIZE:
        raise FieldError(f"q={q} exceeds desk scale ({MAX_FIELD_SIZE})")

    if n == 1:
        modulus = None

        def mul(a, b):
            return (a * b) % p
    else:
        modulus = _find_modulus(p, n)
        m = list(modulus)

        def mul(a, b):
            return _undigits(_pmulmod(_digits(a, p, n), _digits(b, p, n), m, p), p)

    def power(a, e):
        acc, base = 1, a
        while e:
            if e & 1:
                acc = mul(acc, base)
            base = mul(base, base)
            e >>= 1
        return acc

    cofactors = [(q - 1) // r for r in prime_factors(q - 1)]
    for g in range(1, q):
        if all(power(g, c) != 1 for c in cofactors):
            break
    else:  # pragma: no cover
        raise RuntimeError(f"no generator found for F_{q}")

    exp = [1]
    x = 1
    for _ in range(q - 2):
        x = mul(x, g)
        exp.append(x)
    if len(set(exp)) != q - 1:  # pragma: no cover
        raise RuntimeError("generator table is not a bijection")
    return FieldSpec(p, n, modulus, g, exp)


def field_of_size(q: int) -> FieldSpec:
    from ._validation import prime_power

    ell, e = prime_power(q)
    return make_field(ell, e)


@lru_cache(maxsize=None)
def make_extension(field: FieldSpec, degree: int) -> tuple[FieldSpec, tuple[int, ...]]:
    """F_{q^degree} together with the embedding of ``field`` into it.

    The embedding sends the class of X in ``field`` to the smallest root of
    ``field.modulus`` in the big field, so it is a ring homomorphism.
    """
    big = make_field(field.characteristic, field.ext_degree * degree)
    if field.ext_degree == 1:
        return big, tuple(range(field.q))
    m = field.modulus
    root = None
    for r in range(big.q):
        acc = 0
        for c in reversed(m):
            acc = big.add(big.mul(acc, r), c)
        if acc == 0:
            root = r
            break
    if root is None:  # pragma: no cover
        raise RuntimeError("modulus has no root in the extension")
    p, n = field.characteristic, field.ext_degree
    powers = [big.pow(root, i) for i in range(n)]
    emb = []
    for x in range(field.q):
        acc = 0
        for c, rp in zip(_digits(x, p, n), powers):
            if c:
                acc = big.add(acc, big.mul(c, rp))
        emb.append(acc)
    return big, tuple(emb)


class MultCharacter:
    """A multiplicative character of order ``order`` on F_q.

    Values are stored as exponents k meaning zeta_order**k; ``None`` stands
    for the value at 0, which contributes nothing to character sums.
    """

    def __init__(self, field: FieldSpec, order: int, twist: int = 1):
        self.field = field
        self.order = order
        self.twist = twist % order
        log = field.log_table
        self.value_table = tuple(
            None if x == 0 else (self.twist * log[x]) % order for x in range(field.q)
        )

    def __repr__(self) -> str:
        return f"MultCharacter(q={self.field.q}, order={self.order}, twist={self.twist})"

    def __call__(self, x: int):
        return self.value_table[x]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultCharacter)
            and self.field is other.field
            and self.order == other.order
            and self.twist == other.twist
        )

    def __hash__(self) -> int:
        return hash((self.field.q, self.order, self.twist))

    def conjugate(self) -> MultCharacter:
        return MultCharacter(self.field, self.order, -self.twist)

    def power(self, j: int) -> MultCharacter:
        return MultCharacter(self.field, self.order, self.twist * j)

    @cached_property
    def array(self) -> np.ndarray:
        """Exponent table as an int array with -1 at 0."""
        return np.array([-1 if v is None else v for v in self.value_table], dtype=np.int64)


def make_character(field: FieldSpec, order: int) -> MultCharacter:
    """The order-``order`` character sending the canonical generator to zeta."""
    if order < 1 or (field.q - 1) % order:
        raise CharacterOrderError(
            f"character order {order} does not divide q-1={field.q - 1} (need q = 1 mod {order})"
        )
    return MultCharacter(field, order)


def char_eval(chi: MultCharacter, x: int):
    """Exponent of chi(x), or None when x = 0."""
    return chi.value_table[x]
