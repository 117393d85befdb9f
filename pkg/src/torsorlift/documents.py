"""Document schemas and parsers for the structured-text interfaces.

Every external file is JSON.  Scalars are strings "p/q" (or "p").  Lie
algebras list structure constants as rows [i, j, k, "p/q"] meaning
[basis[i], basis[j]] has a coefficient on basis[k]; extensions carry the
action rows b as [i_g, j_h, k_h, "p/q"] and the cocycle rows c as
[i_g, j_g, k_h, "p/q"].  Covers list faces as index tuples; coefficient
algebras are declared once under "algebras" and referenced per face.
Elements of a tensor algebra are {"x": "2"} (unit coefficient implied) or
{"x": {"1": "2", "eps": "1/2"}}.
"""

from fractions import Fraction
from typing import Any, Dict, List

from pydantic import BaseModel, Field

from .descent import CoverNerve, LiftCocycle, TorsorCocycle
from .lie import CoefficientAlgebra, ExtensionDatum, NilpotentLie
from .scalars import format_scalar, parse_scalar


class InputError(ValueError):
    """Malformed or inconsistent input document."""


def _scalar(value):
    try:
        return parse_scalar(value)
    except ValueError as exc:
        raise InputError(str(exc))


class LieDoc(BaseModel):
    basis: List[str]
    brackets: List[List[Any]] = Field(default_factory=list)
    nilpotency_class: int = Field(alias="class", default=1)

    model_config = {"populate_by_name": True}

    def to_lie(self, name="g"):
        table = {}
        for row in self.brackets:
            if len(row) != 4:
                raise InputError("bracket row must be [i, j, k, scalar]: %r" % (row,))
            i, j, k, c = row
            try:
                a, b, target = self.basis[i], self.basis[j], self.basis[k]
            except (IndexError, TypeError) as exc:
                raise InputError("bracket row indices out of range: %r (%s)" % (row, exc))
            vec = table.setdefault((a, b), {})
            vec[target] = vec.get(target, Fraction(0)) + _scalar(c)
        try:
            return NilpotentLie(self.basis, table, self.nilpotency_class, name=name)
        except ValueError as exc:
            raise InputError(str(exc))


def lie_to_doc(lie):
    idx = {n: i for i, n in enumerate(lie.names)}
    rows = []
    for i, a in enumerate(lie.names):
        for b in lie.names[i + 1:]:
            for k, c in sorted(lie.bracket_names(a, b).items()):
                rows.append([idx[a], idx[b], idx[k], format_scalar(c)])
    return {"basis": list(lie.names), "brackets": rows, "class": lie.declared_class}


class ExtensionDoc(BaseModel):
    g: LieDoc
    h: LieDoc
    b: List[List[Any]] = Field(default_factory=list)
    c: List[List[Any]] = Field(default_factory=list)

    def to_extension(self, name="extension"):
        g = self.g.to_lie("g")
        h = self.h.to_lie("h")
        b_table, c_table = {}, {}
        for row in self.b:
            if len(row) != 4:
                raise InputError("b row must be [i_g, j_h, k_h, scalar]: %r" % (row,))
            i, j, k, c = row
            try:
                key = (g.names[i], h.names[j])
                tgt = h.names[k]
            except (IndexError, TypeError):
                raise InputError("b row indices out of range: %r" % (row,))
            vec = b_table.setdefault(key, {})
            vec[tgt] = vec.get(tgt, Fraction(0)) + _scalar(c)
        for row in self.c:
            if len(row) != 4:
                raise InputError("c row must be [i_g, j_g, k_h, scalar]: %r" % (row,))
            i, j, k, c = row
            try:
                key = (g.names[i], g.names[j])
                tgt = h.names[k]
            except (IndexError, TypeError):
                raise InputError("c row indices out of range: %r" % (row,))
            vec = c_table.setdefault(key, {})
            vec[tgt] = vec.get(tgt, Fraction(0)) + _scalar(c)
        try:
            return ExtensionDatum(g, h, b_table, c_table, name=name)
        except ValueError as exc:
            raise InputError(str(exc))


class AlgebraDoc(BaseModel):
    basis: List[str]
    unit: str = "1"
    table: List[List[Any]] = Field(default_factory=list)
    nilpotent: List[str] = Field(default_factory=list)

    def to_algebra(self, name=""):
        mult = {}
        for row in self.table:
            if len(row) != 4:
                raise InputError("algebra row must be [a, b, c, scalar]: %r" % (row,))
            a, b, target, c = row
            for x in (a, b, target):
                if x not in self.basis:
                    raise InputError("algebra row names unknown: %r" % (row,))
            vec = mult.setdefault((a, b), {})
            vec[target] = vec.get(target, Fraction(0)) + _scalar(c)
        # rows define products of non-unit pairs; unknown pairs default to 0
        for a in self.basis:
            for b in self.basis:
                if a == self.unit or b == self.unit:
                    continue
                mult.setdefault((a, b), mult.get((b, a), {}))
        try:
            return CoefficientAlgebra(self.basis, mult, unit=self.unit,
                                      nil_ideal=self.nilpotent, name=name)
        except ValueError as exc:
            raise InputError(str(exc))


class CoverDoc(BaseModel):
    opens: List[str]
    faces: List[List[int]]
    algebras: Dict[str, AlgebraDoc] = Field(default_factory=dict)
    coefficients: Dict[str, str] = Field(default_factory=dict)
    restrictions: List[Dict[str, Any]] = Field(default_factory=list)

    def to_nerve(self, name="cover"):
        algebras = {alias: doc.to_algebra(alias) for alias, doc in self.algebras.items()}
        coeffs = {}
        for label, alias in self.coefficients.items():
            face = _parse_face(label)
            if alias not in algebras:
                raise InputError("unknown algebra alias %r for face %r" % (alias, label))
            coeffs[face] = algebras[alias]
        restr = {}
        for row in self.restrictions:
            try:
                small = tuple(sorted(row["from"]))
                big = tuple(sorted(row["to"]))
                mapping = row["map"]
            except (KeyError, TypeError):
                raise InputError("restriction rows need from/to/map: %r" % (row,))
            restr[(small, big)] = {
                a: {b: _scalar(c) for b, c in vec.items()} for a, vec in mapping.items()
            }
        nerve = CoverNerve(self.opens, [tuple(f) for f in self.faces],
                           coefficients=coeffs, restrictions=restr, name=name)
        bad = nerve.validate()
        if bad:
            raise InputError("cover fails validation: %s" % bad[:3])
        return nerve


def _parse_face(label):
    try:
        return tuple(sorted(int(x) for x in str(label).split()))
    except ValueError:
        raise InputError("malformed face label %r (expected e.g. \"0 1\")" % (label,))


def parse_element(value, lie, algebra):
    """Accept "x", {"x": "2"} or {"x": {"1": "2", ...}} into tensor keys."""
    if isinstance(value, str):
        if value not in lie.names:
            raise InputError("unknown basis name %r" % (value,))
        return {(value, algebra.unit): Fraction(1)}
    if not isinstance(value, dict):
        raise InputError("element must be a name or an object, got %r" % (value,))
    out = {}
    for gname, inner in value.items():
        if gname not in lie.names:
            raise InputError("unknown basis name %r" % (gname,))
        if isinstance(inner, dict):
            for aname, c in inner.items():
                if aname not in algebra.names:
                    raise InputError("unknown coefficient name %r" % (aname,))
                c = _scalar(c)
                if c:
                    out[(gname, aname)] = out.get((gname, aname), Fraction(0)) + c
        else:
            c = _scalar(inner)
            if c:
                out[(gname, algebra.unit)] = out.get((gname, algebra.unit), Fraction(0)) + c
    return {k: c for k, c in out.items() if c}


def element_to_doc(vec, algebra_unit="1"):
    out = {}
    for (gname, aname), c in sorted(vec.items(), key=str):
        if aname == algebra_unit and not any(
            a != algebra_unit for (g2, a), _ in vec.items() if g2 == gname
        ):
            out[gname] = format_scalar(c)
        else:
            out.setdefault(gname, {})
            if isinstance(out[gname], str):
                out[gname] = {algebra_unit: out[gname]}
            out[gname][aname] = format_scalar(c)
    return out


class CocycleDoc(BaseModel):
    edges: Dict[str, Any] = Field(default_factory=dict)

    def to_cocycle(self, nerve, lie):
        edges = {}
        for label, value in self.edges.items():
            face = _parse_face(label)
            if len(face) != 2 or face not in nerve._face_set:
                raise InputError("cocycle entry on a non-edge %r" % (label,))
            edges[face] = parse_element(value, lie, nerve.algebra(face))
        try:
            return TorsorCocycle(nerve, lie, edges)
        except ValueError as exc:
            raise InputError(str(exc))

    def to_lift(self, nerve, h):
        edges = {}
        for label, value in self.edges.items():
            face = _parse_face(label)
            if len(face) != 2 or face not in nerve._face_set:
                raise InputError("lift entry on a non-edge %r" % (label,))
            edges[face] = parse_element(value, h, nerve.algebra(face))
        try:
            return LiftCocycle(nerve, h, edges)
        except ValueError as exc:
            raise InputError(str(exc))


def cocycle_to_doc(cocycle, nerve):
    return {
        "edges": {
            " ".join(str(v) for v in face): element_to_doc(vec, nerve.algebra(face).unit)
            for face, vec in sorted(cocycle.edges.items())
        }
    }


class TrivializationDoc(BaseModel):
    opens: Dict[str, Any] = Field(default_factory=dict)

    def to_sigma(self, nerve, lie):
        out = {}
        for label, value in self.opens.items():
            try:
                idx = int(label)
            except ValueError:
                raise InputError("trivialization keys are open indices, got %r" % (label,))
            if not 0 <= idx < len(nerve.opens):
                raise InputError("open index %d out of range" % idx)
            out[(idx,)] = parse_element(value, lie, nerve.algebra((idx,)))
        return out


def sigma_to_doc(sigma, nerve):
    return {
        "opens": {
            str(face[0]): element_to_doc(vec, nerve.algebra(face).unit)
            for face, vec in sorted(sigma.items())
            if vec
        }
    }
