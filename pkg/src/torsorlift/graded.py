"""Graded spaces with finite named bases, sparse vectors and symmetric multimaps.

Vectors are plain dicts mapping basis keys to values (Fractions, or PolyForms
in the operator backends); zero coefficients are never stored, so equality is
dict equality.  All sign conventions live here: multilinear brackets and
morphism components are graded symmetric with respect to the degree-shifted
grading, shifted degree = degree - 1.
"""

import itertools
from fractions import Fraction



# ----------------------------------------------------------------------
# sparse vectors


def vadd(a, b):
    out = dict(a)
    for k, v in b.items():
        w = out.get(k)
        if w is None:
            out[k] = v
        else:
            w = w + v
            if _nonzero(w):
                out[k] = w
            else:
                del out[k]
    return out


def vsub(a, b):
    return vadd(a, {k: -v for k, v in b.items()})


def vscale(c, a):
    if not c:
        return {}
    return {k: _scale_value(c, v) for k, v in a.items()}


def vneg(a):
    return {k: -v for k, v in a.items()}


def is_zero_vec(a):
    return not a


def _nonzero(v):
    if isinstance(v, Fraction):
        return bool(v)
    return not v.is_zero()


def _scale_value(c, v):
    if isinstance(v, Fraction):
        return c * v
    return v.scale(c)


def unit_vector(key, c=Fraction(1)):
    return {key: c} if c else {}


# ----------------------------------------------------------------------


class GradedSpace:
    """Finite based graded space, with an optional filtration level per key.

    Basis entries are (key, degree) or (key, degree, level); keys are any
    hashable values, degrees are unshifted integers.  The iteration order of
    the basis fixes the canonical order used by the Koszul sign machinery.
    """

    def __init__(self, entries, name=""):
        self.name = name
        self._degree = {}
        self._level = {}
        self._index = {}
        self.basis = []
        for entry in entries:
            if len(entry) == 2:
                key, degree = entry
                level = 0
            else:
                key, degree, level = entry
            if key in self._degree:
                raise ValueError("duplicate basis key %r" % (key,))
            self._index[key] = len(self.basis)
            self.basis.append(key)
            self._degree[key] = degree
            self._level[key] = level

    @property
    def dim(self):
        return len(self.basis)

    def degree(self, key):
        return self._degree[key]

    def sdeg(self, key):
        """Shifted degree, the one all symmetry conventions refer to."""
        return self._degree[key] - 1

    def level(self, key):
        return self._level[key]

    def index(self, key):
        return self._index[key]

    def keys_of_degree(self, d):
        return [k for k in self.basis if self._degree[k] == d]

    def vector_degree(self, vec):
        degs = {self._degree[k] for k in vec}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("vector is not homogeneous: degrees %s" % sorted(degs))
        return degs.pop()

    def vector_level(self, vec):
        """Largest filtration level containing the vector (None for 0)."""
        if not vec:
            return None
        return min(self._level[k] for k in vec)

    def homogeneous_parts(self, vec):
        out = {}
        for k, v in vec.items():
            out.setdefault(self._degree[k], {})[k] = v
        return out

    def __repr__(self):
        return "GradedSpace(%s, dim=%d)" % (self.name or "?", self.dim)


# ----------------------------------------------------------------------
# Koszul sign machinery (all degrees shifted)


def koszul_sort(keys, sdeg, index):
    """Sort basis keys into canonical order, tracking the symmetric Koszul sign.

    Returns (sorted tuple, sign); sign is 0 when an odd key repeats, which
    forces the symmetric value to vanish in characteristic zero.
    """
    items = list(keys)
    sign = 1
    # insertion sort, counting graded transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and index(items[j - 1]) > index(items[j]):
            if (sdeg(items[j - 1]) % 2) and (sdeg(items[j]) % 2):
                sign = -sign
            items[j - 1], items[j] = items[j], items[j - 1]
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b and sdeg(a) % 2:
            return tuple(items), 0
    return tuple(items), sign


def koszul_permutation_sign(sdegs, perm):
    """Koszul sign of rearranging symbols of the given shifted degrees by perm.

    perm maps new positions to old positions: result[i] = original[perm[i]].
    """
    sign = 1
    seen = []
    for pos in perm:
        crossings = sum(1 for q in seen if q > pos and sdegs[q] % 2)
        if sdegs[pos] % 2 and crossings % 2:
            sign = -sign
        seen.append(pos)
    return sign


def sym_shuffles(n, i, sdegs):
    """Splittings of positions 0..n-1 into a size-i block and the rest.

    Yields (block, rest, koszul sign) with both parts in increasing position
    order; the sign moves the block symbols to the front.
    """
    positions = range(n)
    for block in itertools.combinations(positions, i):
        rest = tuple(p for p in positions if p not in block)
        perm = block + rest
        yield block, rest, koszul_permutation_sign(sdegs, perm)


def set_partitions(items, k=None):
    """Unordered set partitions of a list of positions, optionally into k blocks.

    Blocks are tuples in increasing order, ordered by their smallest element.
    """
    items = list(items)
    if not items:
        if k in (None, 0):
            yield []
        return

    def rec(remaining):
        if not remaining:
            yield []
            return
        first, rest = remaining[0], remaining[1:]
        for subset in _subsets(rest):
            block = (first,) + subset
            others = [x for x in rest if x not in subset]
            for tail in rec(others):
                yield [block] + tail

    for part in rec(items):
        if k is None or len(part) == k:
            yield part


def _subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def partition_koszul_sign(sdegs, blocks):
    """Koszul sign of regrouping symbols into the given ordered blocks."""
    perm = tuple(p for block in blocks for p in block)
    return koszul_permutation_sign(sdegs, perm)


# ----------------------------------------------------------------------


class MultiMap:
    """Graded symmetric multilinear map between based spaces.

    The table stores values on canonically sorted basis words only; evaluation
    on arbitrary words sorts the arguments and applies the Koszul sign.  The
    shifted degree of the map is +1 for brackets, 0 for morphism components,
    -1 for homotopies.
    """

    def __init__(self, source, target, arity, sdeg_shift, table=None):
        self.source = source
        self.target = target
        self.arity = arity
        self.sdeg_shift = sdeg_shift
        self.table = {}
        if table:
            for word, vec in table.items():
                self.set_entry(word, vec)

    def set_entry(self, word, vec):
        word = tuple(word)
        assert len(word) == self.arity
        sorted_word, sign = koszul_sort(word, self.source.sdeg, self.source.index)
        if sign == 0:
            if vec:
                raise ValueError("nonzero value on a word with repeated odd key: %r" % (word,))
            return
        vec = vscale(Fraction(sign), vec)
        if vec:
            self.table[sorted_word] = vec
        else:
            self.table.pop(sorted_word, None)

    def add_to_entry(self, word, vec):
        word = tuple(word)
        sorted_word, sign = koszul_sort(word, self.source.sdeg, self.source.index)
        if sign == 0 or not vec:
            return
        cur = self.table.get(sorted_word, {})
        new = vadd(cur, vscale(Fraction(sign), vec))
        if new:
            self.table[sorted_word] = new
        else:
            self.table.pop(sorted_word, None)

    def eval_word(self, word):
        sorted_word, sign = koszul_sort(tuple(word), self.source.sdeg, self.source.index)
        if sign == 0:
            return {}
        vec = self.table.get(sorted_word)
        if not vec:
            return {}
        return vscale(Fraction(sign), vec)

    def eval_vectors(self, vectors):
        """Multilinear evaluation on a list of sparse vectors."""
        assert len(vectors) == self.arity
        if self.arity == 0:
            return dict(self.table.get((), {}))
        total = {}
        for combo in itertools.product(*[v.items() for v in vectors]):
            keys = tuple(k for k, _ in combo)
            coeff = Fraction(1)
            for _, c in combo:
                coeff *= c
            if not coeff:
                continue
            val = self.eval_word(keys)
            if val:
                total = vadd(total, vscale(coeff, val))
        return total

    def is_zero(self):
        return not self.table

    def words(self):
        return list(self.table.keys())

    def check_symmetry(self):
        """Regression check: swapping adjacent arguments multiplies by the Koszul sign."""
        bad = []
        for word in self.table:
            for i in range(len(word) - 1):
                swapped = list(word)
                swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                s = self.source.sdeg(word[i]) * self.source.sdeg(word[i + 1])
                expect = vscale(Fraction(-1 if s % 2 else 1), self.eval_word(word))
                if self.eval_word(tuple(swapped)) != expect:
                    bad.append((word, i))
        return bad

    def check_continuity(self):
        """Filtration continuity: level(out) >= sum of input levels."""
        bad = []
        for word, vec in self.table.items():
            need = sum(self.source.level(k) for k in word)
            got = self.target.vector_level(vec)
            if got is not None and got < need:
                bad.append((word, need, got))
        return bad

    def check_degree(self):
        bad = []
        for word, vec in self.table.items():
            want = sum(self.source.sdeg(k) for k in word) + self.sdeg_shift
            for k in vec:
                if self.target.sdeg(k) != want:
                    bad.append((word, k))
        return bad


def expand_multilinear(fn_word, vectors):
    """Evaluate a word-level map multilinearly on sparse vectors."""
    total = {}
    for combo in itertools.product(*[v.items() for v in vectors]):
        keys = tuple(k for k, _ in combo)
        coeff = Fraction(1)
        for _, c in combo:
            coeff *= c
        val = fn_word(keys)
        if val:
            total = vadd(total, vscale(coeff, val))
    return total


def linear_map_from_table(source, target, sdeg_shift, table):
    """Arity-1 MultiMap from {key: vector}."""
    m = MultiMap(source, target, 1, sdeg_shift)
    for key, vec in table.items():
        m.set_entry((key,), vec)
    return m


def words_up_to(space, length, min_len=1):
    """Canonically sorted basis words of the space up to the given length."""
    out = []
    for n in range(min_len, length + 1):
        for combo in itertools.combinations_with_replacement(space.basis, n):
            word, sign = koszul_sort(combo, space.sdeg, space.index)
            if sign == 0:
                continue
            out.append(word)
    return out
