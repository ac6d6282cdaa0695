"""Matroids with fast rank/closure/flat queries on bitmask subsets.

A matroid is stored in one of three defining forms:

* a basis list (all maximal independent sets),
* a circuit-hyperplane list for sparse paving matroids, or
* an explicit rank table (used for single-point extensions).

Whatever the form, every query goes through ``rank``; flats are cached per
rank level.  Instances are immutable after construction, so all queries are
safe to share across threads; cache population is idempotent.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .masks import (
    check_in_ground,
    format_mask,
    full_mask,
    mask_of,
    points_of,
    popcount,
    subsets_of,
)


class MatroidError(ValueError):
    pass


class AxiomViolation:
    """First axiom failure found by `verify_axioms`."""

    def __init__(self, axiom: str, x: int, y: int, detail: str):
        self.axiom = axiom
        self.x = x
        self.y = y
        self.detail = detail

    def __repr__(self):
        return f"AxiomViolation({self.axiom}, X={format_mask(self.x)}, Y={format_mask(self.y)}: {self.detail})"


class Matroid:
    """Immutable matroid on ground set {0, ..., n-1}."""

    def __init__(
        self,
        n: int,
        *,
        bases: Optional[Sequence[int]] = None,
        circuit_hyperplanes: Optional[Sequence[int]] = None,
        rank_table: Optional[Sequence[int]] = None,
        rank: Optional[int] = None,
        name: str = "",
    ):
        if not 0 < n <= 16:
            raise MatroidError(f"ground set size {n} outside supported range 1..16")
        self.n = n
        self.name = name
        forms = sum(x is not None for x in (bases, circuit_hyperplanes, rank_table))
        if forms != 1:
            raise MatroidError("exactly one defining form required")

        self._bases: Optional[Tuple[int, ...]] = None
        self._ch_set: Optional[frozenset] = None
        self._rank_table: Optional[List[int]] = None
        self._flat_cache: Dict[int, Tuple[int, ...]] = {}
        self._closure_cache: Dict[int, int] = {}
        self._all_flats: Optional[frozenset] = None

        if bases is not None:
            bl = sorted(set(bases))
            if not bl:
                raise MatroidError("empty basis list")
            for b in bl:
                check_in_ground(b, n)
            sizes = {popcount(b) for b in bl}
            if len(sizes) != 1:
                raise MatroidError("bases have differing sizes")
            self._bases = tuple(bl)
            self.k = sizes.pop()
        elif circuit_hyperplanes is not None:
            if rank is None:
                raise MatroidError("sparse paving form needs an explicit rank")
            self.k = rank
            chs = sorted(set(circuit_hyperplanes))
            for h in chs:
                check_in_ground(h, n)
                if popcount(h) != rank:
                    raise MatroidError(
                        f"circuit-hyperplane {format_mask(h)} must have exactly {rank} points"
                    )
            for h1, h2 in itertools.combinations(chs, 2):
                if popcount(h1 & h2) > rank - 2:
                    raise MatroidError(
                        f"circuit-hyperplanes {format_mask(h1)}, {format_mask(h2)} "
                        f"share more than {rank - 2} points"
                    )
            if rank > n:
                raise MatroidError("rank exceeds ground size")
            self._ch_set = frozenset(chs)
        else:
            assert rank_table is not None
            if len(rank_table) != 1 << n:
                raise MatroidError("rank table must have 2^n entries")
            self._rank_table = list(rank_table)
            self.k = self._rank_table[full_mask(n)]

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_bases(cls, n: int, bases: Iterable[Iterable[int]], name: str = "") -> "Matroid":
        return cls(n, bases=[mask_of(b) for b in bases], name=name)

    @classmethod
    def sparse_paving(
        cls, n: int, rank: int, circuit_hyperplanes: Iterable[Iterable[int]], name: str = ""
    ) -> "Matroid":
        return cls(
            n,
            circuit_hyperplanes=[mask_of(h) for h in circuit_hyperplanes],
            rank=rank,
            name=name,
        )

    @classmethod
    def uniform(cls, rank: int, n: int) -> "Matroid":
        return cls(n, circuit_hyperplanes=[], rank=rank, name=f"U_{rank}_{n}")

    @property
    def is_sparse_paving_form(self) -> bool:
        return self._ch_set is not None

    @property
    def circuit_hyperplanes(self) -> Tuple[int, ...]:
        """Circuit-hyperplanes (rank-(k-1) flats of size k)."""
        if self._ch_set is not None:
            return tuple(sorted(self._ch_set))
        out = []
        for m in itertools.combinations(range(self.n), self.k):
            a = mask_of(m)
            if self.rank(a) == self.k - 1 and self.is_flat(a):
                out.append(a)
        return tuple(sorted(out))

    def bases(self) -> Tuple[int, ...]:
        if self._bases is None:
            bl = []
            for comb in itertools.combinations(range(self.n), self.k):
                b = mask_of(comb)
                if self.rank(b) == self.k:
                    bl.append(b)
            self._bases = tuple(bl)
        return self._bases

    # -- rank and closure -----------------------------------------------------

    def rank(self, a: int) -> int:
        check_in_ground(a, self.n)
        if self._ch_set is not None:
            size = popcount(a)
            if size < self.k:
                return size
            if size == self.k:
                return self.k - 1 if a in self._ch_set else self.k
            return self.k
        if self._rank_table is not None:
            return self._rank_table[a]
        best = 0
        for b in self._bases:  # type: ignore[union-attr]
            c = popcount(a & b)
            if c > best:
                best = c
                if best == self.k:
                    break
        return best

    def rank_table(self) -> List[int]:
        if self._rank_table is None:
            self._rank_table = [self.rank(a) for a in range(1 << self.n)]
        return self._rank_table

    def closure(self, a: int) -> int:
        check_in_ground(a, self.n)
        cached = self._closure_cache.get(a)
        if cached is not None:
            return cached
        r = self.rank(a)
        cl = a
        rest = full_mask(self.n) & ~a
        for p in points_of(rest):
            if self.rank(a | (1 << p)) == r:
                cl |= 1 << p
        self._closure_cache[a] = cl
        return cl

    def is_flat(self, a: int) -> bool:
        return self.closure(a) == a

    def is_independent(self, a: int) -> bool:
        return self.rank(a) == popcount(a)

    def is_circuit(self, a: int) -> bool:
        if self.is_independent(a):
            return False
        for p in points_of(a):
            if not self.is_independent(a & ~(1 << p)):
                return False
        return True

    def flats(self, rank_level: Optional[int] = None) -> List[int]:
        """All flats, or all flats of one rank, sorted by (rank, mask)."""
        if not self._flat_cache:
            by_rank: Dict[int, List[int]] = {r: [] for r in range(self.k + 1)}
            for a in range(1 << self.n):
                if self.is_flat(a):
                    by_rank[self.rank(a)].append(a)
            for r, fl in by_rank.items():
                self._flat_cache[r] = tuple(sorted(fl))
            self._all_flats = frozenset(f for fl in self._flat_cache.values() for f in fl)
        if rank_level is not None:
            return list(self._flat_cache.get(rank_level, ()))
        return [f for r in range(self.k + 1) for f in self._flat_cache[r]]

    def flat_set(self) -> frozenset:
        if self._all_flats is None:
            self.flats()
        return self._all_flats  # type: ignore[return-value]

    # -- derived matroids -----------------------------------------------------

    def dual(self) -> "Matroid":
        full = full_mask(self.n)
        dual_bases = [full & ~b for b in self.bases()]
        d = Matroid(self.n, bases=dual_bases, name=f"{self.name}*" if self.name else "")
        return d.compressed()

    def compressed(self) -> "Matroid":
        """Re-express in circuit-hyperplane form when sparse paving."""
        if self._ch_set is not None:
            return self
        if not self.is_sparse_paving():
            return self
        return Matroid(
            self.n,
            circuit_hyperplanes=list(self.circuit_hyperplanes),
            rank=self.k,
            name=self.name,
        )

    def is_sparse_paving(self) -> bool:
        chs = set(self.circuit_hyperplanes)
        for size in range(self.k, 0, -1):
            for comb in itertools.combinations(range(self.n), size):
                a = mask_of(comb)
                if self.rank(a) < popcount(a):
                    # every dependent set of size <= k must be (or contain) a CH
                    if size < self.k:
                        return False
                    if a not in chs:
                        return False
        return True

    def delete(self, b: int) -> "Matroid":
        return self._minor(b, contract=False)

    def contract(self, b: int) -> "Matroid":
        return self._minor(b, contract=True)

    def _minor(self, b: int, contract: bool) -> "Matroid":
        check_in_ground(b, self.n)
        keep = [p for p in range(self.n) if not (b >> p) & 1]
        if not keep:
            raise MatroidError("removing the whole ground set leaves no matroid")
        relabel = {old: new for new, old in enumerate(keep)}
        m = len(keep)
        rb = self.rank(b)
        table = [0] * (1 << m)
        for sub in range(1 << m):
            orig = 0
            for new, old in enumerate(keep):
                if (sub >> new) & 1:
                    orig |= 1 << old
            if contract:
                table[sub] = self.rank(orig | b) - rb
            else:
                table[sub] = self.rank(orig)
        out = Matroid(m, rank_table=table, name="")
        out.relabeling = relabel  # old point -> new point
        return out.compressed()

    # -- structure predicates -------------------------------------------------

    def is_modular_pair(self, x: int, y: int) -> bool:
        if not self.is_flat(x) or not self.is_flat(y):
            raise MatroidError("is_modular_pair expects flats")
        return self.rank(x) + self.rank(y) == self.rank(x | y) + self.rank(x & y)

    def modular_defect(self, x: int, y: int) -> int:
        return self.rank(x) + self.rank(y) - self.rank(x | y) - self.rank(x & y)

    def verify_axioms(self, sample: Optional[int] = None, seed: int = 0):
        """Validate P1-P3 and the cardinality bound.

        Exhaustive for n <= 12 unless `sample` forces sampling; returns
        (True, None) or (False, AxiomViolation) on the first failure.
        """
        full = full_mask(self.n)
        if self.rank(0) != 0:
            return False, AxiomViolation("P1", 0, 0, f"r(empty) = {self.rank(0)}")
        subsets: Iterable[int]
        if sample is None and self.n <= 12:
            subsets = range(1 << self.n)
            pair_iter = itertools.product(range(1 << self.n), repeat=2)
        else:
            count = sample or 20000
            rng = random.Random(seed)
            subsets = [rng.randrange(1 << self.n) for _ in range(count)]
            pair_iter = (
                (rng.randrange(1 << self.n), rng.randrange(1 << self.n)) for _ in range(count)
            )
        table = self.rank_table() if self.n <= 12 else None

        def r(a):
            return table[a] if table is not None else self.rank(a)

        for a in subsets:
            ra = r(a)
            if ra > popcount(a):
                return False, AxiomViolation("CARD", a, a, f"r={ra} > |X|={popcount(a)}")
            if ra < 0:
                return False, AxiomViolation("P2", 0, a, f"r={ra} < 0")
            if ra > r(full):
                return False, AxiomViolation("P2", a, full, "rank above ground rank")
        for x, y in pair_iter:
            if (x & y) == x and r(x) > r(y):
                return False, AxiomViolation("P2", x, y, f"{r(x)} > {r(y)}")
            if r(x & y) + r(x | y) > r(x) + r(y):
                return False, AxiomViolation(
                    "P3", x, y, f"{r(x & y)}+{r(x | y)} > {r(x)}+{r(y)}"
                )
        return True, None

    # -- misc -----------------------------------------------------------------

    def with_name(self, name: str) -> "Matroid":
        self.name = name
        return self

    def same_rank_function(self, other: "Matroid") -> bool:
        if self.n != other.n:
            return False
        return self.rank_table() == other.rank_table()

    def __eq__(self, other):
        return isinstance(other, Matroid) and self.same_rank_function(other)

    def __hash__(self):
        return hash((self.n, tuple(self.rank_table())))

    def __repr__(self):
        label = self.name or "matroid"
        return f"<{label} n={self.n} r={self.k}>"
