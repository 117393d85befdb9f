"""Curved and uncurved homotopy Lie structures and their Maurer-Cartan calculus.

Conventions (fixed once, used everywhere):

* All structure maps are graded symmetric in the shifted grading
  (shifted degree = degree - 1) and raise shifted degree by one.
* A (curved) differential graded Lie algebra with curvature C, differential d
  and bracket [.,.] is packaged as

      q_0 = -C,   q_1 = -d,   q_2(x, y) = (-1)^{|x|} [x, y]

  with |x| the unshifted degree.  Under this packaging the Maurer-Cartan
  defect of a degree-1 element x is -(C + dx + [x,x]/2), so the MC set equals
  the classical solution set on the nose, and the word-length-one generalized
  Jacobi identity is exactly d^2 = [C, -].
* Tensoring with a graded commutative algebra extends brackets by

      q_k(x_1 w_1, .., x_k w_k) = +- q_k(x_1..x_k) (w_1 .. w_k),
      q_1(x w) = q_1(x) w + (-1)^{sdeg x} x dw,

  the sign moving each w_i across the shifted symbols to its right.
"""

import itertools
from fractions import Fraction

from .graded import (
    GradedSpace,
    MultiMap,
    koszul_sort,
    partition_koszul_sign,
    set_partitions,
    sym_shuffles,
    unit_vector,
    vadd,
    vscale,
    words_up_to,
)
from .polyforms import LineForm, PolyForm, dupont_homotopy


class VectorBackend:
    """Shared graded-ops protocol for structures on a finite based space."""

    space = None
    curved = False
    max_arity = 1

    def zero(self):
        return {}

    def add(self, a, b):
        return vadd(a, b)

    def scale(self, c, a):
        return vscale(Fraction(c), a)

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def sdeg_of(self, payload):
        d = self.space.vector_degree(payload)
        return None if d is None else d - 1

    def level_of(self, payload):
        return self.space.vector_level(payload)

    def q_word(self, k, word):
        raise NotImplementedError

    def q(self, k, args):
        from .graded import expand_multilinear

        if k == 0:
            return self.q_word(0, ())
        return expand_multilinear(lambda keys: self.q_word(k, keys), list(args))

    def curvature(self):
        return self.q_word(0, ())

    def probe_args(self, length):
        """Basis words as unit-vector argument lists, with shifted degrees."""
        out = []
        for word in words_up_to(self.space, length):
            args = [unit_vector(k) for k in word]
            sdegs = [self.space.sdeg(k) for k in word]
            out.append((word, args, sdegs))
        return out

    def filtration_span(self):
        levels = [self.space.level(k) for k in self.space.basis]
        if not levels:
            return 1
        return max(levels) - min(levels) + 1

    def word_within_budget(self, word):
        """Whether a word can have a nonzero bracket by level bookkeeping."""
        levels = [self.space.level(k) for k in self.space.basis]
        if not levels:
            return False
        return sum(self.space.level(k) for k in word) <= max(levels)

    def q_same(self, k, x):
        """q_k(x, .., x) by budgeted multiset enumeration (divided powers).

        Equivalent to q(k, [x] * k) but enumerates multisets of the support
        once, with multinomial weights, skipping words that the filtration
        bookkeeping forces to vanish.
        """
        if k == 0:
            return self.q_word(0, ())
        items = sorted(x.items(), key=lambda kv: str(kv[0]))
        total = {}
        for combo in itertools.combinations_with_replacement(range(len(items)), k):
            word = tuple(items[i][0] for i in combo)
            if not self.word_within_budget(word):
                continue
            coeff = Fraction(_factorial(k))
            run = 1
            for j in range(1, k + 1):
                if j < k and combo[j] == combo[j - 1]:
                    run += 1
                else:
                    coeff /= _factorial(run)
                    run = 1
            for i in combo:
                coeff *= items[i][1]
            if not coeff:
                continue
            val = self.q_word(k, word)
            if val:
                total = vadd(total, vscale(coeff, val))
        return total

    def bracket_table(self, arity):
        m = MultiMap(self.space, self.space, arity, 1)
        for word in words_up_to(self.space, arity, min_len=arity):
            vec = self.q_word(arity, word)
            if vec:
                m.table[word] = vec
        return m

    def serialize(self):
        sp = [[_key_str(k), self.space.degree(k), self.space.level(k)] for k in self.space.basis]
        brackets = {}
        arities = range(0 if self.curved else 1, self.max_arity + 1)
        for arity in arities:
            rows = []
            if arity == 0:
                for out_key, c in sorted(self.curvature().items(), key=lambda kv: str(kv[0])):
                    rows.append([[], _key_str(out_key), str(c)])
            else:
                table = self.bracket_table(arity).table
                for word, vec in sorted(table.items(), key=lambda kv: str(kv[0])):
                    for out_key, c in sorted(vec.items(), key=lambda kv: str(kv[0])):
                        rows.append([[_key_str(k) for k in word], _key_str(out_key), str(c)])
            if rows:
                brackets[str(arity)] = rows
        return {"space": sp, "brackets": brackets}


class TableStructure(VectorBackend):
    """Homotopy Lie structure on a finite based space, brackets as tables."""

    def __init__(self, space, brackets, curved=False, max_arity=None, name=""):
        self.space = space
        self.brackets = dict(brackets)
        self.curved = curved or (0 in self.brackets and not self.brackets[0].is_zero())
        self.name = name
        stored = [a for a in self.brackets if not self.brackets[a].is_zero()]
        self.max_arity = max_arity if max_arity is not None else max(stored, default=1)
        for arity, m in self.brackets.items():
            assert m.arity == arity and m.sdeg_shift == 1

    def q(self, k, args):
        m = self.brackets.get(k)
        if m is None or m.is_zero():
            return {}
        return m.eval_vectors(list(args))

    def q_word(self, k, word):
        m = self.brackets.get(k)
        if m is None:
            return {}
        if k == 0:
            return dict(m.table.get((), {}))
        return m.eval_word(word)

    def bracket_table(self, arity):
        m = self.brackets.get(arity)
        if m is None:
            m = MultiMap(self.space, self.space, arity, 1)
        return m


def _key_str(key):
    if isinstance(key, str):
        return key
    if isinstance(key, tuple):
        return "(" + ",".join(_key_str(k) for k in key) + ")"
    return str(key)


# ----------------------------------------------------------------------
# packaging classical differential graded Lie data


def package_lie(lie, alg=None, name=""):
    """A nilpotent Lie algebra (tensored with coefficients) in degree zero.

    Basis keys are (lie name, coefficient name); filtration levels combine the
    central series depth of the Lie part with the ideal order of the
    coefficient, so brackets deepen levels additively and every induced
    bracket of arity beyond the filtration span vanishes.
    """
    from .lie import TRIVIAL_COEFFICIENTS, TensorLie, central_depths

    alg = alg or TRIVIAL_COEFFICIENTS
    tensor = TensorLie(lie, alg)
    depth = central_depths(lie)
    entries = []
    for (g, a) in tensor.keys:
        entries.append(((g, a), 0, depth[g] + alg.m_order(a)))
    space = GradedSpace(entries, name or (lie.name + ("" if alg.is_trivial() else "@" + alg.name)))
    bracket = {}
    for i, g1 in enumerate(lie.names):
        for g2 in lie.names[i + 1:]:
            v = lie.bracket_names(g1, g2)
            if not v:
                continue
            for a1 in alg.names:
                for a2 in alg.names:
                    prod = alg.mul_names(a1, a2)
                    if not prod:
                        continue
                    vec = {}
                    for g3, cg in v.items():
                        for a3, ca in prod.items():
                            c = cg * ca
                            if c:
                                vec[(g3, a3)] = vec.get((g3, a3), Fraction(0)) + c
                    vec = {k: c for k, c in vec.items() if c}
                    if vec:
                        bracket[((g1, a1), (g2, a2))] = vec
    # same lie name, different coefficient names never bracket nontrivially
    struct = package_dgla(space, bracket=bracket, name=space.name)
    struct.tensor = tensor
    return struct


def package_dgla(space, diff=None, bracket=None, curvature=None, name=""):
    """Package (C, d, [.,.]) given on basis keys into the shifted conventions.

    diff: {key: vector} for d; bracket: {(a, b): vector} for [a, b], given on
    ordered pairs once per unordered pair (graded antisymmetry is implied);
    curvature: a degree-2 vector.
    """
    brackets = {}
    q1 = MultiMap(space, space, 1, 1)
    if diff:
        for key, vec in diff.items():
            q1.add_to_entry((key,), vscale(Fraction(-1), vec))
    brackets[1] = q1
    q2 = MultiMap(space, space, 2, 1)
    if bracket:
        seen = set()
        for (a, b), vec in bracket.items():
            word, _ = koszul_sort((a, b), space.sdeg, space.index)
            if word in seen:
                raise ValueError("bracket pair (%r, %r) given twice" % (a, b))
            seen.add(word)
            sign = -1 if space.degree(a) % 2 else 1
            q2.add_to_entry((a, b), vscale(Fraction(sign), vec))
    brackets[2] = q2
    curved = False
    if curvature:
        q0 = MultiMap(space, space, 0, 1)
        q0.table[()] = vscale(Fraction(-1), curvature)
        brackets[0] = q0
        curved = True
    return TableStructure(space, brackets, curved=curved, max_arity=2, name=name)


# ----------------------------------------------------------------------
# generalized Jacobi


def jacobi_defect(struct, args, sdegs):
    """Square of the codifferential, corestricted to the base, on one word."""
    n = len(args)
    total = struct.zero()
    lo = 0 if struct.curved else 1
    for i in range(lo, n + 1):
        if i == 0:
            inner = struct.q(0, [])
            if struct.is_zero(inner):
                continue
            outer = struct.q(n + 1, [inner] + list(args))
            total = struct.add(total, outer)
            continue
        for block, rest, sign in sym_shuffles(n, i, sdegs):
            inner = struct.q(i, [args[p] for p in block])
            if struct.is_zero(inner):
                continue
            outer = struct.q(n - i + 1, [inner] + [args[p] for p in rest])
            if struct.is_zero(outer):
                continue
            total = struct.add(total, struct.scale(1 if sign > 0 else -1, outer))
    return total


def generalized_jacobi_check(struct, arity_bound, probes=None):
    """Report of nonzero components of Q o Q on words up to the arity bound.

    For table structures probes default to all basis words; operator backends
    must supply (label, args, sdegs) probes.
    """
    report = []
    if probes is None:
        probes = struct.probe_args(arity_bound)
    if struct.curved:
        d = struct.q(1, [struct.q(0, [])])
        if not struct.is_zero(d):
            report.append(("empty word", d))
    for label, args, sdegs in probes:
        if len(args) > arity_bound:
            continue
        d = jacobi_defect(struct, args, sdegs)
        if not struct.is_zero(d):
            report.append((label, d))
    return report


# ----------------------------------------------------------------------
# Maurer-Cartan


def mc_defect(struct, x, max_arity=None):
    """Curvature of a degree-1 element: sum over arities of q_i(x,..,x)/i!."""
    bound = struct.max_arity if max_arity is None else max_arity
    total = struct.zero()
    if struct.curved:
        total = struct.add(total, struct.q(0, []))
    same = getattr(struct, "q_same", None)
    for i in range(1, bound + 1):
        term = same(i, x) if same is not None else struct.q(i, [x] * i)
        if not struct.is_zero(term):
            total = struct.add(total, struct.scale(Fraction(1, _fact(i)), term))
    return total


def is_mc(struct, x, max_arity=None):
    return struct.is_zero(mc_defect(struct, x, max_arity))


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def _fact(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ----------------------------------------------------------------------
# morphisms


class Morphism:
    """Homotopy morphism given by its corestricted components.

    comps[i] is either a MultiMap or a callable of i payloads; comp0 is the
    constant term of a curved morphism (None when absent).
    """

    def __init__(self, source, target, comps, comp0=None, max_arity=None):
        self.source = source
        self.target = target
        self.comps = dict(comps)
        self.comp0 = comp0
        self.max_arity = max_arity if max_arity is not None else max(self.comps, default=1)

    def apply(self, i, args):
        if i == 0:
            return self.comp0 if self.comp0 is not None else self.target.zero()
        c = self.comps.get(i)
        if c is None:
            return self.target.zero()
        if isinstance(c, MultiMap):
            return c.eval_vectors(list(args))
        return c(list(args))

    def pushforward(self, x, max_arity=None):
        bound = self.max_arity if max_arity is None else max_arity
        total = self.target.zero()
        if self.comp0 is not None:
            total = self.target.add(total, self.comp0)
        xs = []
        for i in range(1, bound + 1):
            xs.append(x)
            term = self.apply(i, xs)
            if not self.target.is_zero(term):
                total = self.target.add(total, self.target.scale(Fraction(1, _fact(i)), term))
        return total


def pushforward_mc(morph, x, check=True, max_arity=None):
    """Push a Maurer-Cartan element forward; verifies both MC conditions."""
    if check and not is_mc(morph.source, x):
        raise ValueError("element is not Maurer-Cartan in the source")
    y = morph.pushforward(x, max_arity=max_arity)
    if check and not is_mc(morph.target, y):
        raise AssertionError("pushforward failed to satisfy the target MC equation")
    return y


def morphism_defect(morph, args, sdegs, empty_bound=3):
    """G o Q - R o G corestricted to the target, on one source word."""
    src, tgt = morph.source, morph.target
    n = len(args)
    lhs = tgt.zero()
    lo = 0 if src.curved else 1
    for i in range(lo, n + 1):
        if i == 0:
            inner = src.q(0, [])
            if not src.is_zero(inner):
                lhs = tgt.add(lhs, morph.apply(n + 1, [inner] + list(args)))
            continue
        for block, rest, sign in sym_shuffles(n, i, sdegs):
            inner = src.q(i, [args[p] for p in block])
            if src.is_zero(inner):
                continue
            val = morph.apply(n - i + 1, [inner] + [args[p] for p in rest])
            if not tgt.is_zero(val):
                lhs = tgt.add(lhs, tgt.scale(sign, val))
    rhs = tgt.zero()
    curved_const = morph.comp0 is not None and not tgt.is_zero(morph.comp0)
    e_max = empty_bound if (curved_const or tgt.curved) else 0
    for partition in set_partitions(range(n)):
        p = len(partition)
        if n == 0 and p == 0:
            partition = []
        sign = partition_koszul_sign(sdegs, partition)
        images = [morph.apply(len(b), [args[q] for q in b]) for b in partition]
        if any(tgt.is_zero(v) for v in images) and p > 0:
            continue
        for e in range(0, e_max + 1):
            if p + e == 0:
                term = tgt.q(0, []) if tgt.curved else tgt.zero()
            else:
                extra = [morph.comp0] * e
                if e and morph.comp0 is None:
                    continue
                term = tgt.q(p + e, images + extra)
            if tgt.is_zero(term):
                continue
            rhs = tgt.add(rhs, tgt.scale(Fraction(sign, _fact(e)), term))
    return tgt.add(lhs, tgt.scale(-1, rhs))


def morphism_check(morph, arity_bound, probes=None):
    """Report of words where the morphism fails to intertwine codifferentials."""
    report = []
    if probes is None:
        probes = morph.source.probe_args(arity_bound)
        if morph.source.curved or morph.comp0 is not None:
            probes = [("empty word", [], [])] + list(probes)
    for label, args, sdegs in probes:
        if len(args) > arity_bound:
            continue
        d = morphism_defect(morph, args, sdegs)
        if not morph.target.is_zero(d):
            report.append((label, d))
    return report


def identity_morphism(struct):
    m = MultiMap(struct.space, struct.space, 1, 0)
    for k in struct.space.basis:
        m.set_entry((k,), unit_vector(k))
    return Morphism(struct, struct, {1: m})


# ----------------------------------------------------------------------
# tensoring with graded commutative coefficients


class FormStructure:
    """Structure on L tensor the polynomial forms of the n-simplex.

    Payloads are dicts {basis key of L: PolyForm}.  Probing and the Dupont
    contraction side live in the simplicial module; this class provides the
    graded ops protocol used by the transfer engine.
    """

    def __init__(self, base, n):
        self.base = base
        self.n = n
        self.curved = base.curved
        self.max_arity = base.max_arity

    def zero(self):
        return {}

    def add(self, a, b):
        out = dict(a)
        for k, w in b.items():
            v = out.get(k)
            if v is None:
                out[k] = w
            else:
                v = v + w
                if v.is_zero():
                    del out[k]
                else:
                    out[k] = v
        return out

    def scale(self, c, a):
        c = Fraction(c)
        if not c:
            return {}
        return {k: w.scale(c) for k, w in a.items()}

    def is_zero(self, a):
        return not a

    def eq(self, a, b):
        return a == b

    def _form_zero(self):
        return PolyForm.zero(self.n)

    def _form_const(self, c):
        return PolyForm.const(self.n, c)

    def sdeg_of(self, payload):
        degs = set()
        for k, w in payload.items():
            for fd in w.form_degrees():
                degs.add(self.base.space.sdeg(k) + fd)
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("payload not homogeneous: %s" % sorted(degs))
        return degs.pop()

    def q(self, k, args):
        if k == 0:
            c = self.base.curvature()
            return {key: self._form_const(v) for key, v in c.items()}
        if k == 1:
            (x,) = args
            out = self.zero()
            for key, form in x.items():
                dvec = self.base.q(1, [unit_vector(key)])
                for k2, c in dvec.items():
                    out = self.add(out, {k2: form.scale(c)})
                sd = self.base.space.sdeg(key)
                dw = form.de_rham()
                if not dw.is_zero():
                    out = self.add(out, {key: dw if sd % 2 == 0 else -dw})
            return out
        if k > self.base.max_arity:
            return {}
        out = self.zero()
        split = [_split_homogeneous(self, x) for x in args]
        for combo in itertools.product(*split):
            keys = tuple(t[0] for t in combo)
            vec = self.base.q_word(k, keys)
            if not vec:
                continue
            sign = 1
            for i in range(len(combo)):
                fd = combo[i][2]
                if fd % 2 == 0:
                    continue
                crossing = sum(self.base.space.sdeg(combo[j][0]) for j in range(i + 1, len(combo)))
                if crossing % 2:
                    sign = -sign
            wedge = combo[0][1]
            for t in combo[1:]:
                wedge = wedge.wedge(t[1])
                if wedge.is_zero():
                    break
            if wedge.is_zero():
                continue
            for k2, c in vec.items():
                out = self.add(out, {k2: wedge.scale(c * sign)})
        return out

    def dupont_K(self, payload):
        """The contracting homotopy on coefficients: (-1)^{sdeg key} per key."""
        out = {}
        for key, form in payload.items():
            v = dupont_homotopy(form)
            if v.is_zero():
                continue
            if self.base.space.sdeg(key) % 2:
                v = -v
            out[key] = v
        return out


def _split_homogeneous(fs, payload):
    """[(key, homogeneous form part, form degree)] for one payload."""
    out = []
    for key, form in payload.items():
        for fd in form.form_degrees():
            part = form.degree_part(fd)
            if not part.is_zero():
                out.append((key, part, fd))
    return out


class LineStructure(FormStructure):
    """Structure on L tensor k[s, ds] (shares the 1-simplex representation)."""

    def __init__(self, base):
        super().__init__(base, 1)

    def _form_const(self, c):
        return LineForm.const_line(c)

    def eval_at(self, payload, s0):
        out = {}
        for key, form in payload.items():
            v = LineForm.from_polyform(form).eval_at(s0)
            if v:
                out[key] = v
        return out

    def embed(self, vec, form=None):
        form = LineForm.const_line(1) if form is None else form
        return {k: form.scale(c) for k, c in vec.items()}


def tensor_line(struct):
    """The induced structure on V tensor k[s, ds]."""
    return LineStructure(struct)


def line_evaluation_morphism(line_struct, s0):
    """Evaluation at s = s0 as a strict morphism to the base structure."""
    return Morphism(line_struct, line_struct.base, {1: lambda args: line_struct.eval_at(args[0], s0)})


def homotopy_equiv_check(struct, z, a, a_prime, max_arity=None):
    """True iff z is Maurer-Cartan over the line with the given endpoints."""
    line = tensor_line(struct)
    if not line.is_zero(mc_defect(line, z, max_arity or struct.max_arity)):
        raise ValueError("the connecting element is not Maurer-Cartan over the line")
    return line.eval_at(z, 0) == a and line.eval_at(z, 1) == a_prime


# ----------------------------------------------------------------------
# classical (unshifted) views, for display only


def classical_bracket_view(struct, a, b):
    """[a, b] recovered from the packaged q_2 on basis keys."""
    sign = -1 if struct.space.degree(a) % 2 else 1
    return vscale(Fraction(sign), struct.q_word(2, (a, b)))


def classical_differential_view(struct, a):
    return vscale(Fraction(-1), struct.q_word(1, (a,)))
