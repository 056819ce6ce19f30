"""Seeds, compatible pairs, seed mutation and freezing.

Vertices are indexed ``0..n-1`` inside the library. The JSON seed format
and the command line use 1-based indices.
"""

import hashlib
import json
from fractions import Fraction

from . import linalg
from .errors import (BadFreeze, DimensionError, FrozenMutation, IncompatiblePair,
                     SeedInvariantError)


def _pos(x):
    return x if x > 0 else 0


class Seed:
    """Exchange data of a (possibly quantum) seed.

    ``B`` is the full ``n x n`` matrix ``(b_ij)``; ``p*e_k`` is its column
    ``k``. ``lam`` is the quantization matrix or None for a classical seed.
    """

    __slots__ = ("n", "unfrozen", "B", "d", "lam", "labels", "_id", "_cache")

    def __init__(self, B, unfrozen, d=None, lam=None, labels=None, validate=True):
        self.B = linalg.matrix(B)
        self.n = len(self.B)
        if any(len(row) != self.n for row in self.B):
            raise DimensionError("the exchange matrix must be square")
        self.unfrozen = tuple(sorted(set(int(k) for k in unfrozen)))
        if any(k < 0 or k >= self.n for k in self.unfrozen):
            raise DimensionError(f"unfrozen vertices {self.unfrozen} out of range")
        self.d = tuple(int(x) for x in (d if d is not None else [1] * self.n))
        if len(self.d) != self.n:
            raise DimensionError("one skew-symmetrizer per vertex is required")
        self.lam = None if lam is None else tuple(tuple(int(x) for x in row) for row in lam)
        self.labels = tuple(labels) if labels is not None else tuple(f"x{i + 1}" for i in range(self.n))
        self._id = None
        self._cache = {}
        if validate:
            self.validate()

    @classmethod
    def from_btilde(cls, btilde, unfrozen, d=None, lam=None, labels=None):
        """Build a seed from the ``I x I_uf`` matrix only.

        The missing columns are filled in so that the full matrix stays
        skew-symmetrizable: ``b_ij = -b_ji d_i / d_j`` when ``i`` is
        unfrozen, and zero between frozen vertices.
        """
        n = len(btilde)
        unfrozen = sorted(unfrozen)
        d = list(d) if d is not None else [1] * n
        full = [[Fraction(0)] * n for _ in range(n)]
        for c, k in enumerate(unfrozen):
            for i in range(n):
                full[i][k] = linalg.as_fraction(btilde[i][c])
        for j in range(n):
            if j in unfrozen:
                continue
            for i in unfrozen:
                full[i][j] = -full[j][i] * d[i] / d[j]
        return cls(full, unfrozen, d, lam, labels)

    # derived data -------------------------------------------------------
    @property
    def frozen(self):
        return tuple(i for i in range(self.n) if i not in self.unfrozen)

    @property
    def rank(self):
        return len(self.unfrozen)

    def pstar(self, k):
        """``p*e_k`` as an integer vector (column ``k`` of ``B``)."""
        key = ("pstar", k)
        if key not in self._cache:
            self._cache[key] = tuple(int(self.B[i][k]) for i in range(self.n))
        return self._cache[key]

    def pstar_vec(self, n):
        """``p*n`` for ``n`` indexed by the unfrozen vertices (in order)."""
        out = [0] * self.n
        for c, k in enumerate(self.unfrozen):
            if n[c]:
                col = self.pstar(k)
                for i in range(self.n):
                    out[i] += n[c] * col[i]
        return tuple(out)

    @property
    def btilde(self):
        return linalg.columns(self.B, self.unfrozen)

    def omega(self, i, j):
        """``omega_ij`` with ``omega_ij d_j = b_ji``."""
        return linalg.normalize(Fraction(self.B[j][i]) / self.d[j])

    def full_rank(self):
        return linalg.rank(self.btilde) == self.rank

    def btilde_left_inverse(self):
        if "linv" not in self._cache:
            self._cache["linv"] = linalg.left_inverse(self.btilde)
        return self._cache["linv"]

    # invariants ---------------------------------------------------------
    def validate(self):
        n, B, d = self.n, self.B, self.d
        if any(x <= 0 for x in d):
            raise SeedInvariantError("skew-symmetrizers", f"d must be positive, got {d}")
        for i in range(n):
            for j in range(n):
                if Fraction(B[i][j]) / d[i] != -Fraction(B[j][i]) / d[j]:
                    raise SeedInvariantError(
                        "skew-symmetrizable",
                        f"b[{i + 1}][{j + 1}]/d_{i + 1} != -b[{j + 1}][{i + 1}]/d_{j + 1}")
                if (i in self.unfrozen or j in self.unfrozen) and not isinstance(B[i][j], int):
                    raise SeedInvariantError(
                        "integrality", f"b[{i + 1}][{j + 1}] = {B[i][j]} must be an integer")
        if self.unfrozen and not self.full_rank():
            raise SeedInvariantError("full-rank", "the extended exchange matrix is not of full rank")
        if self.lam is not None:
            if len(self.lam) != n or any(len(r) != n for r in self.lam):
                raise DimensionError("the quantization matrix must be n x n")
            if not linalg.is_skew_symmetric(self.lam):
                raise SeedInvariantError("skew-form", "the quantization matrix is not skew-symmetric")
            check_compatibility(self)

    # identity -----------------------------------------------------------
    def to_dict(self, one_based=True):
        off = 1 if one_based else 0
        return {
            "n": self.n,
            "unfrozen": [k + off for k in self.unfrozen],
            "B": [[str(x) for x in row] for row in self.B],
            "d": list(self.d),
            "Lambda": [list(r) for r in self.lam] if self.lam is not None else None,
            "labels": list(self.labels),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, data):
        n = int(data["n"])
        B = data["B"]
        if len(B) != n:
            raise DimensionError(f"'B' has {len(B)} rows but n = {n}")
        unfrozen = [int(k) - 1 for k in data["unfrozen"]]
        rows = [[Fraction(str(x)) for x in row] for row in B]
        if rows and len(rows[0]) != n:
            return cls.from_btilde(rows, unfrozen, data.get("d"), data.get("Lambda"), data.get("labels"))
        return cls(rows, unfrozen, data.get("d"), data.get("Lambda"), data.get("labels"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    @property
    def id(self):
        if self._id is None:
            body = self.to_dict()
            body.pop("labels")
            digest = hashlib.sha1(json.dumps(body, sort_keys=True).encode()).hexdigest()
            self._id = digest[:12]
        return self._id

    def __eq__(self, other):
        if not isinstance(other, Seed):
            return NotImplemented
        return (self.B, self.unfrozen, self.d, self.lam) == (other.B, other.unfrozen, other.d, other.lam)

    def __hash__(self):
        return hash((self.B, self.unfrozen, self.d, self.lam))

    def __repr__(self):
        return f"Seed(n={self.n}, unfrozen={[k + 1 for k in self.unfrozen]}, B={self.B})"


def check_compatibility(seed):
    """Return ``{k: delta_k}`` for a compatible quantum seed.

    Checks ``lambda(f_i, p*e_k) = delta_ik delta_k`` with ``delta_k > 0``.
    """
    if seed.lam is None:
        raise IncompatiblePair("the seed has no quantization matrix")
    deltas = {}
    for k in seed.unfrozen:
        col = seed.pstar(k)
        for i in range(seed.n):
            val = sum(seed.lam[i][j] * col[j] for j in range(seed.n))
            if i == k:
                if val <= 0:
                    raise IncompatiblePair(f"lambda(f_{k + 1}, p*e_{k + 1}) = {val} is not positive")
                deltas[k] = val
            elif val != 0:
                raise IncompatiblePair(f"lambda(f_{i + 1}, p*e_{k + 1}) = {val} should vanish")
    return deltas


def mutation_matrices(seed, k, eps):
    n, B = seed.n, seed.B
    E = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    F = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for i in range(n):
        if i != k:
            E[i][k] = _pos(-eps * B[i][k])
            F[k][i] = _pos(eps * B[k][i])
    E[k][k] = -1
    F[k][k] = -1
    return linalg.matrix(E), linalg.matrix(F)


def mutate_seed(seed, k, eps=1):
    """Mutation at the unfrozen vertex ``k`` (0-based).

    Computes ``B' = E B F`` and ``Lambda' = E^T Lambda E`` for the given sign and
    checks the result against the other sign.
    """
    if k not in seed.unfrozen:
        raise FrozenMutation(f"vertex {k + 1} is frozen")
    results = []
    for s in (eps, -eps):
        E, F = mutation_matrices(seed, k, s)
        B2 = linalg.mat_mul(linalg.mat_mul(E, seed.B), F)
        lam2 = None
        if seed.lam is not None:
            lam2 = linalg.mat_mul(linalg.mat_mul(linalg.transpose(E), seed.lam), E)
        results.append((B2, lam2))
    if results[0] != results[1]:
        raise SeedInvariantError("sign-independence", f"mutation at {k + 1} depends on the sign")
    B2, lam2 = results[0]
    out = Seed(B2, seed.unfrozen, seed.d, lam2, seed.labels, validate=False)
    _check_mutated(seed, out)
    return out


def _check_mutated(old, new):
    for i in range(new.n):
        for j in range(new.n):
            if Fraction(new.B[i][j]) / new.d[i] != -Fraction(new.B[j][i]) / new.d[j]:
                raise SeedInvariantError("skew-symmetrizable", "mutation broke skew-symmetrizability")
    if new.lam is not None and check_compatibility(new) != check_compatibility(old):
        raise SeedInvariantError("compatible-pair", "mutation changed the compatibility constants")


def mutate_word(seed, word):
    for k in word:
        seed = mutate_seed(seed, k)
    return seed


def freeze_seed(seed, F):
    """Move the unfrozen vertices in ``F`` (0-based) to the frozen part."""
    F = set(F)
    if not F <= set(seed.unfrozen):
        bad = sorted(k + 1 for k in F - set(seed.unfrozen))
        raise BadFreeze(f"vertices {bad} are not unfrozen")
    return Seed(seed.B, [k for k in seed.unfrozen if k not in F], seed.d, seed.lam, seed.labels)


# catalog ----------------------------------------------------------------------

def _principal(B, lam_extra=True):
    """Principal-coefficient extension ``[B; I]`` with its standard quantization."""
    r = len(B)
    n = 2 * r
    full = [[0] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            full[i][j] = B[i][j]
        full[r + i][i] = 1
        full[i][r + i] = -1
    lam = None
    if lam_extra:
        lam = [[0] * n for _ in range(n)]
        for i in range(r):
            lam[i][r + i] = 1
            lam[r + i][i] = -1
            for j in range(r):
                lam[r + i][r + j] = B[i][j]
    return full, list(range(r)), lam


def catalog():
    """Named example seeds used by tests, the CLI and the documentation."""
    a3 = [[0, 1, 0], [-1, 0, 1], [0, -1, 0]]
    a3_full, a3_uf, a3_lam = _principal(a3)
    return {
        "A2": Seed([[0, 1], [-1, 0]], [0, 1], lam=[[0, -1], [1, 0]]),
        "ex4": Seed([[0, -1], [1, 0]], [0], lam=[[0, 1], [-1, 0]]),
        "A3": Seed(a3_full, a3_uf, lam=a3_lam),
        "kronecker": Seed([[0, 2], [-2, 0]], [0, 1], lam=[[0, -1], [1, 0]]),
        "B2": Seed([[0, 1], [-2, 0]], [0, 1], d=[1, 2], lam=[[0, -1], [1, 0]]),
    }


def get_seed(name):
    seeds = catalog()
    if name not in seeds:
        raise KeyError(f"unknown seed {name!r}; known: {sorted(seeds)}")
    return seeds[name]
