"""Finitely generated groups handled through finite quotients.

The infinite deck group is never materialized: presentations provide words
and (for the shipped families) exact normal forms, while finite quotients
carry the Cayley structure actually used for covers.  Quotient elements
are hashable values (ints, tuples, permutation tuples) enumerated by BFS
from the identity, so ``elements[0]`` is always the identity and every
element is reachable from the generator images by construction.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, UnsupportedGroupError

Word = tuple

# ---------------------------------------------------------------------------
# words


def free_reduce(word) -> Word:
    """Freely reduce a word (tuple of nonzero ints, -j inverts generator j)."""
    out = []
    for letter in word:
        letter = int(letter)
        if letter == 0:
            raise ArgumentError("word letters must be nonzero")
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def letter_order(r: int) -> list:
    """Canonical letter order used for lexicographic tie-breaking."""
    out = []
    for j in range(1, r + 1):
        out.append(j)
        out.append(-j)
    return out


def reduced_words(r: int, max_len: int):
    """Yield freely reduced words in (length, lex) order up to max_len."""
    letters = letter_order(r)
    layer = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for letter in letters:
                if w and w[-1] == -letter:
                    continue
                nw = w + (letter,)
                nxt.append(nw)
                yield nw
        layer = nxt


def commutator(a: Word, b: Word) -> Word:
    inv = lambda w: tuple(-x for x in reversed(w))
    return free_reduce(a + b + inv(a) + inv(b))


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class GroupPresentation:
    """Generators and relators, with an optional exact normal form.

    ``family`` marks presentations whose word problem we solve exactly:
    free groups (free reduction), free abelian groups (exponent vectors)
    and the integer Heisenberg group (triple arithmetic).  Everything else
    falls back to separation by the available finite quotients.
    """

    generator_count: int
    relators: tuple = ()
    declared_abelian: bool = False
    family: str = "generic"

    def __post_init__(self):
        if self.generator_count < 1:
            raise ArgumentError("presentation needs at least one generator")
        rels = []
        for w in self.relators:
            rw = free_reduce(w)
            for letter in rw:
                if abs(letter) > self.generator_count:
                    raise ArgumentError(f"relator letter {letter} out of range")
            rels.append(rw)
        object.__setattr__(self, "relators", tuple(rels))

    def normal_form(self, word) -> object | None:
        """Exact normal form of a word, or None if unavailable."""
        word = free_reduce(word)
        if self.family == "free":
            return word
        if self.family == "free_abelian":
            vec = [0] * self.generator_count
            for letter in word:
                vec[abs(letter) - 1] += 1 if letter > 0 else -1
            return tuple(vec)
        if self.family == "heisenberg":
            x = (1, 0, 0)
            z = (0, 0, 1)
            images = {1: x, -1: (-1, 0, 0), 2: z, -2: (0, 0, -1)}
            val = (0, 0, 0)
            for letter in word:
                val = _heis_mult(val, images[letter], None)
            return val
        return None


def free_presentation(r: int) -> GroupPresentation:
    return GroupPresentation(r, (), declared_abelian=(r == 1), family="free")


def free_abelian_presentation(r: int) -> GroupPresentation:
    rels = tuple(
        commutator((i,), (j,)) for i in range(1, r + 1) for j in range(i + 1, r + 1)
    )
    return GroupPresentation(r, rels, declared_abelian=True, family="free_abelian")


def heisenberg_presentation() -> GroupPresentation:
    # generators x, z; the commutator y = [x, z] is central
    y = commutator((1,), (2,))
    rels = (commutator((1,), y), commutator((2,), y))
    return GroupPresentation(2, rels, family="heisenberg")


def surface_presentation(genus: int) -> GroupPresentation:
    """Orientable surface group: product of commutators of handle pairs."""
    if genus < 1:
        raise ArgumentError("genus must be >= 1")
    rel = ()
    for g in range(genus):
        a, b = 2 * g + 1, 2 * g + 2
        rel = rel + commutator((a,), (b,))
    return GroupPresentation(2 * genus, (free_reduce(rel),), family="surface")


# ---------------------------------------------------------------------------
# finite quotients


def _heis_mult(a, b, m):
    x = a[0] + b[0]
    y = a[1] + b[1] + a[0] * b[2]
    z = a[2] + b[2]
    if m is None:
        return (x, y, z)
    return (x % m, y % m, z % m)


def _perm_mult(p, q):
    # (p q)(i) = p(q(i)): apply q first
    return tuple(p[q[i]] for i in range(len(p)))


def _perm_inv(p):
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


class FiniteQuotient:
    """Finite group with chosen generator images.

    Elements are enumerated by BFS over right multiplication by the
    generators, so reachability (the images generate) holds by
    construction and ``elements[0]`` is the identity.
    """

    def __init__(self, identity, gen_values, mult, inv, family="generic", meta=None,
                 max_size=200000, allow_partial=False):
        self.mult = mult
        self.inv = inv
        self.family = family
        self.meta = dict(meta or {})
        self.gen_values = list(gen_values)
        if not self.gen_values:
            raise ArgumentError("quotient needs at least one generator image")
        self.complete = True
        elements = [identity]
        index = {identity: 0}
        queue = deque([identity])
        while queue and self.complete:
            g = queue.popleft()
            for s in self.gen_values:
                h = mult(g, s)
                if h not in index:
                    if len(elements) >= max_size:
                        if allow_partial:
                            # word evaluation still works; enumeration-based
                            # operations will refuse this quotient
                            self.complete = False
                            break
                        raise ArgumentError(
                            f"quotient enumeration exceeded {max_size} elements"
                        )
                    index[h] = len(elements)
                    elements.append(h)
                    queue.append(h)
        self.elements = elements
        self.index = index
        self.size = len(elements)
        self.gen_indices = [index[v] for v in self.gen_values]
        self._succ = None
        self._table = None
        if self.complete and self.size <= 64:
            self.verify_axioms()

    def require_complete(self, what: str) -> None:
        if not self.complete:
            raise ArgumentError(
                f"{what} needs a fully enumerated quotient; this one was "
                f"truncated at {self.size} elements"
            )

    @property
    def generator_count(self):
        return len(self.gen_values)

    def gen_successors(self) -> np.ndarray:
        """Array succ[j][g] = index of elements[g] * gen_j."""
        self.require_complete("Cayley structure")
        if self._succ is None:
            succ = np.empty((len(self.gen_values), self.size), dtype=np.int64)
            for j, s in enumerate(self.gen_values):
                for i, g in enumerate(self.elements):
                    succ[j, i] = self.index[self.mult(g, s)]
            self._succ = succ
        return self._succ

    def mult_table(self, limit=4096) -> np.ndarray:
        self.require_complete("multiplication table")
        if self._table is None:
            if self.size > limit:
                raise ArgumentError(
                    f"refusing to build {self.size}x{self.size} multiplication table"
                )
            t = np.empty((self.size, self.size), dtype=np.int64)
            for i, a in enumerate(self.elements):
                t[i] = [self.index[self.mult(a, b)] for b in self.elements]
            self._table = t
        return self._table

    def is_abelian(self) -> bool:
        for a in self.gen_values:
            for b in self.gen_values:
                if self.mult(a, b) != self.mult(b, a):
                    return False
        return True

    def evaluate(self, word):
        """Image of a word in the quotient."""
        val = self.elements[0]
        for letter in word:
            g = self.gen_values[abs(letter) - 1]
            if letter < 0:
                g = self.inv(g)
            val = self.mult(val, g)
        return val

    def element_order(self, value) -> int:
        e = self.elements[0]
        acc = value
        n = 1
        while acc != e:
            acc = self.mult(acc, value)
            n += 1
            if n > self.size:
                raise ArgumentError("element order exceeded group size")
        return n

    def verify_axioms(self, rng=None, samples=10000) -> None:
        """Spot-check the group axioms; exhaustive for size <= 512.

        Raises ArgumentError on any violation.  Enumeration already
        guarantees closure; this checks identity, inverses and
        associativity on the stored multiplication rule.
        """
        self.require_complete("axiom verification")
        e = self.elements[0]
        for g in self.elements:
            if self.mult(e, g) != g or self.mult(g, e) != g:
                raise ArgumentError("identity axiom violated")
            gi = self.inv(g)
            if gi not in self.index:
                raise ArgumentError("inverse left the enumerated set")
            if self.mult(g, gi) != e or self.mult(gi, g) != e:
                raise ArgumentError("inverse axiom violated")
        if self.size <= 512:
            t = self.mult_table()
            for a in range(self.size):
                # t[t[a,b], c] vs t[a, t[b,c]] for all b, c at once
                if not np.array_equal(t[t[a], :], t[a][t]):
                    raise ArgumentError("associativity violated")
        else:
            rng = rng or np.random.default_rng(0)
            idx = rng.integers(0, self.size, size=(samples, 3))
            for a, b, c in idx:
                va, vb, vc = self.elements[a], self.elements[b], self.elements[c]
                if self.mult(self.mult(va, vb), vc) != self.mult(va, self.mult(vb, vc)):
                    raise ArgumentError("associativity violated (sampled)")


def trivial_quotient(generator_count: int = 1) -> FiniteQuotient:
    return FiniteQuotient(
        0, [0] * generator_count,
        mult=lambda a, b: 0, inv=lambda a: 0,
        family="trivial",
    )


def cyclic_quotient(m: int, gen_images=(1,)) -> FiniteQuotient:
    if m < 1:
        raise ArgumentError("modulus must be >= 1")
    return FiniteQuotient(
        0, [g % m for g in gen_images],
        mult=lambda a, b, m=m: (a + b) % m,
        inv=lambda a, m=m: (-a) % m,
        family="cyclic", meta={"m": m},
    )


def product_cyclic_quotient(moduli, gen_images=None) -> FiniteQuotient:
    moduli = tuple(int(m) for m in moduli)
    if any(m < 1 for m in moduli):
        raise ArgumentError("moduli must be >= 1")
    k = len(moduli)
    if gen_images is None:
        gen_images = [tuple(1 if i == j else 0 for i in range(k)) for j in range(k)]
    gen_images = [tuple(v % m for v, m in zip(g, moduli)) for g in gen_images]
    return FiniteQuotient(
        tuple(0 for _ in moduli), gen_images,
        mult=lambda a, b, mod=moduli: tuple((x + y) % m for x, y, m in zip(a, b, mod)),
        inv=lambda a, mod=moduli: tuple((-x) % m for x, m in zip(a, mod)),
        family="product_cyclic", meta={"moduli": moduli},
    )


def dihedral_quotient(n: int) -> FiniteQuotient:
    """Dihedral group of order 2n with generators (rotation, reflection)."""
    if n < 1:
        raise ArgumentError("dihedral parameter must be >= 1")

    def mult(a, b, n=n):
        k1, f1 = a
        k2, f2 = b
        return ((k1 + (k2 if f1 == 0 else -k2)) % n, f1 ^ f2)

    def inv(a, n=n):
        k, f = a
        return ((-k) % n, 0) if f == 0 else a

    return FiniteQuotient((0, 0), [(1, 0), (0, 1)], mult, inv,
                          family="dihedral", meta={"n": n})


def symmetric_quotient(n: int, gen_perms=None) -> FiniteQuotient:
    """Symmetric group S_n, default generators (0 1) and the n-cycle."""
    if n < 2:
        raise ArgumentError("symmetric group parameter must be >= 2")
    if gen_perms is None:
        swap = tuple([1, 0] + list(range(2, n)))
        cycle = tuple(list(range(1, n)) + [0])
        gen_perms = [swap, cycle]
    ident = tuple(range(n))
    return FiniteQuotient(ident, [tuple(p) for p in gen_perms],
                          _perm_mult, _perm_inv,
                          family="symmetric", meta={"n": n})


def heisenberg_quotient(m: int) -> FiniteQuotient:
    """H3(Z/m): upper unitriangular 3x3 matrices over Z/m, generators x, z."""
    if m < 1:
        raise ArgumentError("modulus must be >= 1")
    return FiniteQuotient(
        (0, 0, 0), [(1 % m, 0, 0), (0, 0, 1 % m)],
        mult=lambda a, b, m=m: _heis_mult(a, b, m),
        inv=lambda a, m=m: ((-a[0]) % m, (a[0] * a[2] - a[1]) % m, (-a[2]) % m),
        family="heisenberg", meta={"m": m},
    )


def parse_cycles(text: str, degree: int | None = None) -> tuple:
    """Parse one-line cycle notation like ``(1 2 3)(4 5)`` (1-based)."""
    text = text.strip()
    if text in ("()", "e", ""):
        cycles = []
    else:
        if not (text.startswith("(") and text.endswith(")")):
            raise ArgumentError(f"bad cycle notation: {text!r}")
        cycles = []
        for part in text[1:-1].split(")("):
            entries = part.replace(",", " ").split()
            try:
                cyc = [int(x) for x in entries]
            except ValueError as exc:
                raise ArgumentError(f"bad cycle notation: {text!r}") from exc
            if len(cyc) < 1 or min(cyc) < 1 or len(set(cyc)) != len(cyc):
                raise ArgumentError(f"bad cycle: {part!r}")
            cycles.append(cyc)
    top = max((max(c) for c in cycles), default=0)
    deg = degree if degree is not None else top
    if deg < top:
        raise ArgumentError("cycle symbol exceeds declared degree")
    perm = list(range(deg))
    for cyc in cycles:
        for i, a in enumerate(cyc):
            b = cyc[(i + 1) % len(cyc)]
            perm[a - 1] = b - 1
    return tuple(perm)


def permutation_quotient(components, degree=None, allow_partial=False) -> FiniteQuotient:
    """Image of the free group in a product of symmetric groups.

    ``components[c][j]`` is the image of generator ``j`` in component ``c``,
    given as a permutation tuple or a cycle-notation string.  Elements are
    tuples with one permutation per component, so kernels intersect across
    components.
    """
    comps = []
    for comp in components:
        perms = []
        for p in comp:
            if isinstance(p, str):
                perms.append(parse_cycles(p, degree))
            else:
                perms.append(tuple(int(x) for x in p))
        comps.append(perms)
    if not comps:
        raise ArgumentError("need at least one component")
    r = len(comps[0])
    if any(len(c) != r for c in comps):
        raise ArgumentError("all components must list the same generators")
    for c, perms in enumerate(comps):
        deg = len(perms[0])
        if any(len(p) != deg for p in perms):
            # pad shorter permutations with fixed points
            deg = max(len(p) for p in perms)
            comps[c] = [tuple(list(p) + list(range(len(p), deg))) for p in perms]
    gen_values = [tuple(comps[c][j] for c in range(len(comps))) for j in range(r)]
    ident = tuple(tuple(range(len(comps[c][0]))) for c in range(len(comps)))
    return FiniteQuotient(
        ident, gen_values,
        mult=lambda a, b: tuple(_perm_mult(x, y) for x, y in zip(a, b)),
        inv=lambda a: tuple(_perm_inv(x) for x in a),
        family="permutation", meta={"components": len(comps)},
        allow_partial=allow_partial,
    )


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class Tower:
    """Nested finite quotients with compatible projections.

    ``projections[i]`` maps level ``i+1`` element values onto level ``i``.
    Projections are verified to be surjective homomorphisms matching the
    generator images.
    """

    presentation: GroupPresentation
    quotients: tuple
    projections: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "quotients", tuple(self.quotients))
        object.__setattr__(self, "projections", tuple(self.projections))
        if len(self.projections) != max(0, len(self.quotients) - 1):
            raise ArgumentError("need one projection per consecutive level pair")
        r = self.presentation.generator_count
        for q in self.quotients:
            if q.generator_count != r:
                raise ArgumentError("quotient arity does not match presentation")
            if not check_relations(self.presentation, q):
                raise ArgumentError("quotient does not satisfy the relators")
        for i, proj in enumerate(self.projections):
            lo, hi = self.quotients[i], self.quotients[i + 1]
            for gv_hi, gv_lo in zip(hi.gen_values, lo.gen_values):
                if proj(gv_hi) != gv_lo:
                    raise ArgumentError(f"projection {i} breaks generator images")
            image = set()
            for g in hi.elements[: min(hi.size, 20000)]:
                image.add(proj(g))
            if hi.complete and hi.size <= 20000 and len(image) != lo.size:
                raise ArgumentError(f"projection {i} is not surjective")
            sample = hi.elements if hi.size <= 256 else hi.elements[:64]
            for a in sample:
                for b in hi.gen_values:
                    if proj(hi.mult(a, b)) != lo.mult(proj(a), proj(b)):
                        raise ArgumentError(f"projection {i} is not a homomorphism")

    def __len__(self):
        return len(self.quotients)


def cyclic_tower(ms, gen_image: int = 1) -> Tower:
    ms = [int(m) for m in ms]
    for a, b in zip(ms, ms[1:]):
        if b % a != 0:
            raise ArgumentError("cyclic tower moduli must be nested by divisibility")
    quotients = [cyclic_quotient(m, (gen_image,)) for m in ms]
    projections = [lambda v, m=ms[i]: v % m for i in range(len(ms) - 1)]
    return Tower(free_abelian_presentation(1), quotients, projections)


def heisenberg_tower(ms) -> Tower:
    ms = [int(m) for m in ms]
    for a, b in zip(ms, ms[1:]):
        if b % a != 0:
            raise ArgumentError("Heisenberg tower moduli must be nested by divisibility")
    quotients = [heisenberg_quotient(m) for m in ms]
    projections = [
        lambda v, m=ms[i]: (v[0] % m, v[1] % m, v[2] % m) for i in range(len(ms) - 1)
    ]
    return Tower(heisenberg_presentation(), quotients, projections)


def permutation_tower(levels, presentation: GroupPresentation | None = None,
                      allow_partial=False) -> Tower:
    """Kernel-intersection tower from nested component lists.

    Each level is a list of components (lists of generator permutations);
    consecutive levels must extend the previous component list, so the
    kernels are nested and dropping the new components projects level
    ``i+1`` onto level ``i``.
    """
    quotients = [permutation_quotient(lvl, allow_partial=allow_partial) for lvl in levels]
    for lo, hi in zip(levels, levels[1:]):
        if len(hi) < len(lo) or hi[: len(lo)] != lo:
            raise ArgumentError("tower levels must extend the previous components")
    projections = [
        lambda v, k=len(levels[i]): v[:k] for i in range(len(levels) - 1)
    ]
    if presentation is None:
        presentation = free_presentation(len(levels[0][0]))
    return Tower(presentation, quotients, projections)


# ---------------------------------------------------------------------------
# Cayley graph and word metric


@dataclass(frozen=True)
class CayleyGraph:
    """Directed labeled Cayley graph: edge g -> g * gen_j with label j."""

    size: int
    successors: np.ndarray  # shape (r, size)

    def edges(self):
        for j in range(self.successors.shape[0]):
            for g in range(self.size):
                yield (g, int(self.successors[j, g]), j)


def cayley_graph(q: FiniteQuotient) -> CayleyGraph:
    return CayleyGraph(q.size, q.gen_successors().copy())


def word_metric_ball(q: FiniteQuotient, n: int) -> dict:
    """Exact word-metric distances (generators and inverses) up to n.

    Elements farther than ``n`` are absent from the returned map.
    """
    if n < 0:
        raise ArgumentError("radius must be >= 0")
    e = q.elements[0]
    dist = {e: 0}
    frontier = [e]
    steps = [q.gen_values[j] for j in range(q.generator_count)]
    steps += [q.inv(s) for s in steps]
    d = 0
    while frontier and d < n:
        d += 1
        nxt = []
        for g in frontier:
            for s in steps:
                h = q.mult(g, s)
                if h not in dist:
                    dist[h] = d
                    nxt.append(h)
        frontier = nxt
    return dist


def word_distance(q: FiniteQuotient, a, b) -> int:
    """d(a, b) = d(a b^{-1}, e) in the word metric."""
    ball = word_metric_ball(q, q.size)
    return ball[q.mult(a, q.inv(b))]


# ---------------------------------------------------------------------------
# minimal representatives and injectivity radius


def minimal_representatives(tower: Tower, level: int) -> list:
    """Minimal-length coset representative words for each element of G_i.

    BFS over the quotient's Cayley graph (generators and inverses, letters
    in canonical order) yields for every element the unique shortest freely
    reduced word that is lexicographically least among shortest words.
    Equal-length ties are broken by generator index, so representative sets
    are nested across tower levels.
    """
    if not 0 <= level < len(tower.quotients):
        raise ArgumentError(f"tower has no level {level}")
    q = tower.quotients[level]
    q.require_complete("minimal representatives")
    letters = letter_order(q.generator_count)
    step = {}
    for letter in letters:
        g = q.gen_values[abs(letter) - 1]
        step[letter] = g if letter > 0 else q.inv(g)
    e = q.elements[0]
    words = {e: ()}
    order = [()]
    frontier = [(e, ())]
    while len(words) < q.size:
        nxt = []
        for g, w in frontier:
            for letter in letters:
                if w and w[-1] == -letter:
                    continue
                h = q.mult(g, step[letter])
                if h not in words:
                    nw = w + (letter,)
                    words[h] = nw
                    order.append(nw)
                    nxt.append((h, nw))
        if not nxt:
            raise ArgumentError("generators do not reach every element")
        frontier = nxt
    return order


@dataclass(frozen=True)
class RadiusResult:
    """Injectivity radius of the word ball into a quotient level."""

    radius: int
    exhausted: bool  # ball explored to n_max without finding a collision
    certified: bool  # group-side equality was decided by an exact normal form

    def __int__(self):
        return self.radius


def residual_injectivity_radius(tower: Tower, level: int, n_max: int = 8) -> RadiusResult:
    """Largest n <= n_max with the group ball B_n mapping injectively to G_i.

    Group equality of words is decided by the presentation's exact normal
    form when available; otherwise two words count as equal when no level
    of the tower separates them (reported as uncertified approximation).
    """
    if not 0 <= level < len(tower.quotients):
        raise ArgumentError(f"tower has no level {level}")
    q = tower.quotients[level]
    pres = tower.presentation
    exact = pres.normal_form(()) is not None

    def nf(word):
        if exact:
            return pres.normal_form(word)
        return tuple(qq.evaluate(word) for qq in tower.quotients)

    seen = {}
    for word in reduced_words(pres.generator_count, n_max):
        image = q.evaluate(word)
        form = nf(word)
        prev = seen.get(image)
        if prev is None:
            seen[image] = form
        elif prev != form:
            return RadiusResult(radius=len(word) - 1, exhausted=False, certified=exact)
    return RadiusResult(radius=n_max, exhausted=True, certified=exact)


# ---------------------------------------------------------------------------
# relation checking and unitary representations


@dataclass(frozen=True)
class UnitaryRep:
    """Generator images as real orthogonal matrices.

    Complex irreducibles are stored as real matrices of doubled dimension
    (a conjugate pair realified); ``complex_dim`` is the complex dimension
    of the underlying irreducible and ``conjugate_pair`` marks doubled
    storage.  Peter-Weyl multiplicity is always ``complex_dim``.
    """

    matrices: tuple
    complex_dim: int = 0
    conjugate_pair: bool = False
    label: str = ""

    def __post_init__(self):
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if not mats:
            raise ArgumentError("representation needs at least one generator")
        n = mats[0].shape[0]
        for m in mats:
            if m.shape != (n, n):
                raise ArgumentError("representation matrices must share one shape")
            if np.max(np.abs(m.T @ m - np.eye(n))) > 1e-12:
                raise ArgumentError("representation matrices must be orthogonal")
        if self.complex_dim == 0:
            object.__setattr__(self, "complex_dim", n // 2 if self.conjugate_pair else n)

    @property
    def dim_real(self) -> int:
        return int(self.matrices[0].shape[0])

    @property
    def generator_count(self) -> int:
        return len(self.matrices)

    def evaluate(self, word) -> np.ndarray:
        out = np.eye(self.dim_real)
        for letter in word:
            m = self.matrices[abs(letter) - 1]
            out = out @ (m if letter > 0 else m.T)
        return out


def check_relations(pres: GroupPresentation, target) -> bool:
    """True iff every relator maps to the identity in the target.

    Exact for finite quotients; within 1e-10 for unitary representations.
    """
    if isinstance(target, FiniteQuotient):
        if target.generator_count != pres.generator_count:
            raise ArgumentError("generator count mismatch")
        e = target.elements[0]
        return all(target.evaluate(w) == e for w in pres.relators)
    if isinstance(target, UnitaryRep):
        if target.generator_count != pres.generator_count:
            raise ArgumentError("generator count mismatch")
        eye = np.eye(target.dim_real)
        return all(
            np.max(np.abs(target.evaluate(w) - eye)) <= 1e-10 for w in pres.relators
        )
    raise ArgumentError(f"cannot check relations against {type(target)!r}")


def realify(a: np.ndarray) -> np.ndarray:
    """Real 2n x 2n image of a complex n x n matrix."""
    a = np.asarray(a, dtype=complex)
    return np.block([[a.real, -a.imag], [a.imag, a.real]])


def _rep_from_complex(q, func, label, complex_dim, gen_matrices=None):
    """Build a UnitaryRep from an element -> complex-matrix function."""
    mats = [np.asarray(func(v), dtype=complex) for v in q.gen_values]
    if all(np.max(np.abs(m.imag)) < 1e-14 for m in
           (np.asarray(func(v), dtype=complex) for v in q.elements)):
        return UnitaryRep(tuple(m.real for m in mats), complex_dim=complex_dim,
                          conjugate_pair=False, label=label)
    return UnitaryRep(tuple(realify(m) for m in mats), complex_dim=complex_dim,
                      conjugate_pair=True, label=label)


# -- abelian characters ------------------------------------------------------


def _integer_diagonalize(rows, r):
    """Unimodular diagonalization U A V = diag(d); returns (d, V).

    Plain integer elimination; divisibility normalization is not needed for
    the character construction.
    """
    a = [list(map(int, row)) for row in rows]
    n_rows = len(a)
    v = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
    for t in range(r):
        while True:
            piv = None
            for i in range(t, n_rows):
                for j in range(t, r):
                    if a[i][j] != 0 and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                raise ArgumentError("relation lattice is rank deficient")
            pi, pj = piv
            a[t], a[pi] = a[pi], a[t]
            if pj != t:
                for row in a:
                    row[t], row[pj] = row[pj], row[t]
                for row in v:
                    row[t], row[pj] = row[pj], row[t]
            p = a[t][t]
            clean = True
            for i in range(t + 1, n_rows):
                qq = a[i][t] // p
                if qq:
                    for j in range(t, r):
                        a[i][j] -= qq * a[t][j]
                if a[i][t] != 0:
                    clean = False
            for j in range(t + 1, r):
                qq = a[t][j] // p
                if qq:
                    for row in a:
                        row[j] -= qq * row[t]
                    for row in v:
                        row[j] -= qq * row[t]
                if a[t][j] != 0:
                    clean = False
            if clean:
                break
        if a[t][t] < 0:
            for row in a:
                row[t] = -row[t]
            for row in v:
                row[t] = -row[t]
    d = [a[t][t] for t in range(r)]
    return d, v


def _abelian_exponents(q: FiniteQuotient):
    """Exponent vectors of every element plus generating relations."""
    r = q.generator_count
    e = q.elements[0]
    exps = {e: tuple([0] * r)}
    relations = []
    queue = deque([e])
    while queue:
        g = queue.popleft()
        xg = exps[g]
        for j, s in enumerate(q.gen_values):
            h = q.mult(g, s)
            xh = list(xg)
            xh[j] += 1
            xh = tuple(xh)
            if h in exps:
                rel = tuple(a - b for a, b in zip(xh, exps[h]))
                if any(rel):
                    relations.append(rel)
            else:
                exps[h] = xh
                queue.append(h)
    for j, s in enumerate(q.gen_values):
        rel = [0] * r
        rel[j] = q.element_order(s)
        relations.append(tuple(rel))
    return exps, relations


def abelian_characters(q: FiniteQuotient) -> list:
    """All characters of an abelian quotient, realified and paired.

    Characters live on the exponent lattice Z^r modulo the relation
    lattice; a unimodular diagonalization of the relations parameterizes
    the dual group exactly.
    """
    if not q.is_abelian():
        raise UnsupportedGroupError("characters require an abelian group")
    r = q.generator_count
    exps, relations = _abelian_exponents(q)
    d, v = _integer_diagonalize(relations, r)
    total = 1
    for di in d:
        total *= di
    if total != q.size:
        raise ArgumentError("relation lattice does not match the group order")
    vt = np.array(v, dtype=np.int64).T

    def char_value(c, value):
        x = np.array(exps[value], dtype=np.int64)
        phase = sum(int(c[i]) * int((vt @ x)[i]) / d[i] for i in range(r))
        return cmath.exp(2j * math.pi * phase)

    reps = []
    seen = set()
    for flat in range(q.size):
        c = []
        rem = flat
        for di in d:
            c.append(rem % di)
            rem //= di
        c = tuple(c)
        if c in seen:
            continue
        cbar = tuple((-ci) % di for ci, di in zip(c, d))
        seen.add(c)
        is_real = cbar == c
        if not is_real:
            seen.add(cbar)
        label = "chi_" + "_".join(map(str, c))
        func = lambda val, c=c: np.array([[char_value(c, val)]])
        reps.append(_rep_from_complex(q, func, label, complex_dim=1))
    return reps


# -- catalogued non-abelian irreps -------------------------------------------


def _helmert_basis(n: int) -> np.ndarray:
    """Orthonormal basis (n x (n-1)) of the sum-zero subspace of R^n."""
    cols = []
    for k in range(1, n):
        col = np.zeros(n)
        col[:k] = 1.0
        col[k] = -k
        cols.append(col / math.sqrt(k * (k + 1)))
    return np.column_stack(cols)


def _perm_matrix(p) -> np.ndarray:
    n = len(p)
    m = np.zeros((n, n))
    for i, v in enumerate(p):
        m[v, i] = 1.0
    return m


def _parity(p) -> int:
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _dihedral_irreps(q: FiniteQuotient) -> list:
    n = q.meta["n"]

    def rot(theta):
        c, s = math.cos(theta), math.sin(theta)
        return np.array([[c, -s], [s, c]])

    reps = [
        _rep_from_complex(q, lambda v: np.array([[1.0 + 0j]]), "trivial", 1),
        _rep_from_complex(q, lambda v: np.array([[(-1.0) ** v[1] + 0j]]), "sign_s", 1),
    ]
    if n % 2 == 0:
        reps.append(_rep_from_complex(
            q, lambda v: np.array([[(-1.0) ** v[0] + 0j]]), "sign_r", 1))
        reps.append(_rep_from_complex(
            q, lambda v: np.array([[(-1.0) ** (v[0] + v[1]) + 0j]]), "sign_rs", 1))
    flip = np.array([[1.0, 0.0], [0.0, -1.0]])
    n_two_dim = (n - 1) // 2 if n % 2 else n // 2 - 1
    for h in range(1, n_two_dim + 1):
        def func(v, h=h):
            m = rot(2 * math.pi * h * v[0] / n)
            return m @ flip if v[1] else m
        reps.append(UnitaryRep(
            tuple(func(v) for v in q.gen_values),
            complex_dim=2, conjugate_pair=False, label=f"plane_{h}",
        ))
    return reps


def _partition_action(p) -> tuple:
    """Image of an S4 element acting on the three 2+2 partitions (an S3 perm)."""
    out = []
    for a in (1, 2, 3):
        pair = {p[0], p[a]}
        if 0 in pair:
            partner = (pair - {0}).pop()
        else:
            rest = {0, 1, 2, 3} - pair
            partner = (rest - {0}).pop()
        out.append(partner - 1)
    return tuple(out)


def _symmetric_irreps(q: FiniteQuotient) -> list:
    n = q.meta["n"]
    if n not in (3, 4):
        raise UnsupportedGroupError(f"irreps catalogued only for S3 and S4, not S{n}")
    basis = _helmert_basis(n)

    def standard(p):
        return basis.T @ _perm_matrix(p) @ basis

    reps = [
        _rep_from_complex(q, lambda v: np.array([[1.0 + 0j]]), "trivial", 1),
        _rep_from_complex(q, lambda v: np.array([[float(_parity(v)) + 0j]]), "sign", 1),
        UnitaryRep(tuple(standard(v) for v in q.gen_values),
                   complex_dim=n - 1, label="standard"),
    ]
    if n == 4:
        reps.append(UnitaryRep(
            tuple(float(_parity(v)) * standard(v) for v in q.gen_values),
            complex_dim=3, label="standard_sign",
        ))
        basis3 = _helmert_basis(3)
        reps.append(UnitaryRep(
            tuple(basis3.T @ _perm_matrix(_partition_action(v)) @ basis3
                  for v in q.gen_values),
            complex_dim=2, label="partition_plane",
        ))
    return reps


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % k for k in range(2, int(math.isqrt(n)) + 1))


def _heisenberg_irreps(q: FiniteQuotient) -> list:
    p = q.meta["m"]
    if not _is_prime(p):
        raise UnsupportedGroupError(
            f"Heisenberg irreps catalogued only for prime modulus, not {p}")
    omega = cmath.exp(2j * math.pi / p)
    reps = []
    # characters factor through the abelianization (x, z)
    seen = set()
    for a in range(p):
        for b in range(p):
            if (a, b) in seen:
                continue
            seen.add((a, b))
            seen.add(((-a) % p, (-b) % p))
            func = lambda v, a=a, b=b: np.array([[omega ** (a * v[0] + b * v[2])]])
            reps.append(_rep_from_complex(q, func, f"chi_{a}_{b}", 1))
    shift = np.zeros((p, p), dtype=complex)
    for k in range(p):
        shift[(k + 1) % p, k] = 1.0
    for t in range(1, p - 1 + 1):
        tbar = (p - t) % p
        if tbar < t:
            continue
        mod = np.diag([omega ** (-t * k) for k in range(p)])

        def func(v, t=t, mod=mod):
            x, y, z = v
            return (omega ** (t * y)) * np.linalg.matrix_power(mod, z) @ \
                np.linalg.matrix_power(shift, x)

        reps.append(_rep_from_complex(q, func, f"schroedinger_{t}", p))
    return reps


def irreps(q: FiniteQuotient) -> list:
    """Complete list of pairwise-inequivalent irreducible unitary reps.

    Available for abelian quotients and the catalogued non-abelian
    families (dihedral, S3, S4, Heisenberg mod a prime).  The squared
    complex dimensions sum to the group order; conjugate pairs stored as
    one doubled real representation count twice.
    """
    q.require_complete("irreducible representations")
    if q.size == 1:
        out = [UnitaryRep(tuple(np.eye(1) for _ in range(q.generator_count)),
                          complex_dim=1, label="trivial")]
    elif q.is_abelian():
        out = abelian_characters(q)
    elif q.family == "dihedral":
        out = _dihedral_irreps(q)
    elif q.family == "symmetric":
        out = _symmetric_irreps(q)
    elif q.family == "heisenberg":
        out = _heisenberg_irreps(q)
    else:
        raise UnsupportedGroupError(
            f"no irrep catalogue for non-abelian family {q.family!r}")
    total = sum(r.complex_dim**2 * (2 if r.conjugate_pair else 1) for r in out)
    if total != q.size:
        raise ArgumentError(
            f"irrep dimensions sum to {total}, expected group order {q.size}")
    return out


def peter_weyl_weight(rep: UnitaryRep) -> int:
    """Multiplicity of the rep's real spectrum in the regular decomposition."""
    return rep.complex_dim
