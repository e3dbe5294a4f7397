"""Turning manifest and query syntax into engine objects."""

from __future__ import annotations

from fractions import Fraction

from .complexes import (AtomComplex, as_complex, cech, cone, direct_sum, hom_from_free, koszul,
                        multiplication_map, shift, stable_cech_trunc, stable_koszul_trunc, tensor,
                        unit_complex)
from .derived import dagger, matlis_dual
from .errors import FormalCohError, InvalidInput, ParseError
from .language import (Call, Free, IdealLit, Int, Manifest, Monomial, Name, Quot, Residue, Sum)
from .linalg import FieldSpec
from .monomial import ModulePresentation, MonomialIdeal, RingSpec, add

# builtin constructions: name -> (ideal arguments, object arguments, extra)
CONSTRUCTIONS = ("koszul", "cech", "telescope", "cechtrunc", "tensor", "hom", "cone", "shift",
                 "dagger", "dual")


class Context:
    """Resolved names of a manifest over a fixed ring."""

    def __init__(self, man: Manifest, characteristic: int | None = None):
        self.man = man
        char = man.characteristic if characteristic is None else characteristic
        try:
            field = FieldSpec(char)
        except InvalidInput as e:
            raise ParseError(str(e))
        self.ring = RingSpec(len(man.variables), field, tuple(man.variables))
        self.var_index = {v: k for k, v in enumerate(man.variables)}
        self.ideals: dict = {}
        self.objects: dict = {}
        self._line = None
        for kind, name in man.order:
            self._line = man.lines[name]
            if kind == "IDEAL":
                self.ideals[name] = self.ideal(man.ideals[name])
            elif kind == "MODULE":
                self.objects[name] = self._module(man.modules[name])
            else:
                self.objects[name] = self.obj(man.complexes[name])
        self._line = None

    # -- errors -----------------------------------------------------------

    def fail(self, msg):
        raise ParseError(msg, self._line)

    # -- atoms of syntax ----------------------------------------------------

    def exponent(self, mono: Monomial) -> tuple:
        v = [0] * self.ring.n
        for var, e in mono.powers:
            if var not in self.var_index:
                self.fail(f"unknown variable {var!r}")
            v[self.var_index[var]] += e
        return tuple(v)

    def ideal(self, node) -> MonomialIdeal:
        n = self.ring.n
        if isinstance(node, Int) and node.value == 0:
            return MonomialIdeal(n, [])
        if isinstance(node, Name):
            if node.id == "m":
                return MonomialIdeal.maximal(n)
            if node.id in self.ideals:
                return self.ideals[node.id]
            if node.id in self.var_index:
                return MonomialIdeal(n, [self.exponent(Monomial(((node.id, 1),)))])
            self.fail(f"unresolved ideal name {node.id!r}")
        if isinstance(node, Monomial):
            return MonomialIdeal(n, [self.exponent(node)])
        if isinstance(node, IdealLit):
            gens = [self.exponent(m) for m in node.monomials if isinstance(m, Monomial)]
            return MonomialIdeal(n, gens)
        self.fail(f"expected an ideal, found {node}")

    def ideal_generators(self, node) -> list:
        """Generators in the order written, for Koszul complexes on literal lists."""
        if isinstance(node, IdealLit):
            return [self.exponent(m) for m in node.monomials if isinstance(m, Monomial)]
        return list(self.ideal(node).generators)

    def monomial(self, node) -> tuple:
        if isinstance(node, Monomial):
            return self.exponent(node)
        if isinstance(node, Name) and node.id in self.var_index:
            return self.exponent(Monomial(((node.id, 1),)))
        if isinstance(node, Int) and node.value == 1:
            return self.ring.zero_degree()
        self.fail(f"expected a monomial, found {node}")

    def integer(self, node) -> int:
        if isinstance(node, Int):
            return node.value
        self.fail(f"expected an integer, found {node}")

    # -- modules and complexes --------------------------------------------

    def _module(self, md):
        if md.expr is not None:
            return self.obj(md.expr)
        n = self.ring.n
        for g in md.gens:
            if len(g) != n:
                self.fail(f"GEN degree {g} needs {n} coordinates")
        rels = []
        for terms, degree, ln in md.rels:
            self._line = ln
            source, entries = None, {}
            for t in terms:
                label = _term_text(t)
                if t.gen > len(md.gens):
                    self.fail(f"entry {label} refers to e{t.gen}, but {md.name} has {len(md.gens)} generators")
                d = add(md.gens[t.gen - 1], self.exponent(t.monomial))
                if degree is not None and len(degree) != n:
                    self.fail(f"REL degree {degree} needs {n} coordinates")
                want = degree if degree is not None else source
                if want is not None and d != tuple(want):
                    self.fail(f"matrix entry {label} has degree {d}, expected {tuple(want)}")
                source = source or d
                entries[t.gen - 1] = entries.get(t.gen - 1, Fraction(0)) + t.scalar
            rels.append((source, entries))
        try:
            return ModulePresentation(self.ring, md.gens, rels)
        except InvalidInput as e:
            self.fail(str(e))

    def obj(self, node):
        try:
            return self._obj(node)
        except ParseError:
            raise
        except FormalCohError as e:
            self.fail(f"{node}: {e}")

    def _obj(self, node):
        ring = self.ring
        if isinstance(node, Free):
            shift_v = node.twist
            if shift_v is not None:
                if len(shift_v) != ring.n:
                    self.fail(f"twist {shift_v} needs {ring.n} coordinates")
                return ModulePresentation.free(ring, [tuple(-c for c in shift_v)])
            return ModulePresentation.free(ring)
        if isinstance(node, Residue):
            return ModulePresentation.quotient(ring, MonomialIdeal.maximal(ring.n))
        if isinstance(node, Quot):
            return ModulePresentation.quotient(ring, self.ideal(node.ideal))
        if isinstance(node, Name):
            if node.id in self.objects:
                return self.objects[node.id]
            if node.id in self.ideals or node.id == "m":
                self.fail(f"{node.id!r} is an ideal; a module or complex is needed here")
            self.fail(f"unresolved name {node.id!r}")
        if isinstance(node, Sum):
            parts = [self._obj(t) for t in node.terms]
            if all(isinstance(p, ModulePresentation) for p in parts):
                return ModulePresentation.direct_sum(*parts)
            cs = [as_complex(p) for p in parts]
            if not all(isinstance(c, AtomComplex) for c in cs):
                self.fail("direct sums need modules or atom complexes")
            return direct_sum(*cs)
        if isinstance(node, Call):
            return self._call(node)
        self.fail(f"expected a module or complex, found {node}")

    def _call(self, node: Call):
        f = node.func
        if node.index is not None:
            self.fail(f"{f} takes no index")
        args = [e for g in node.groups for e in g]
        ring = self.ring

        def arity(k):
            if len(args) != k:
                self.fail(f"{f} takes {k} argument{'s' if k != 1 else ''}, got {len(args)}")

        if f == "koszul":
            arity(1)
            return koszul(self.ideal_generators(args[0]), ring)
        if f == "cech":
            arity(1)
            return cech(self.ideal(args[0]), ring)
        if f in ("telescope", "cechtrunc"):
            arity(2)
            build = stable_koszul_trunc if f == "telescope" else stable_cech_trunc
            return build(self.ideal(args[0]), ring, self.integer(args[1]))
        if f == "tensor":
            arity(2)
            return tensor(as_complex(self._obj(args[0])), as_complex(self._obj(args[1])))
        if f == "hom":
            arity(2)
            return hom_from_free(as_complex(self._obj(args[0])), as_complex(self._obj(args[1])))
        if f == "cone":
            arity(2)
            C = as_complex(self._obj(args[0]))
            if not isinstance(C, AtomComplex):
                self.fail("cone needs an atom complex")
            return cone(multiplication_map(C, self.monomial(args[1])))
        if f == "shift":
            arity(2)
            return shift(as_complex(self._obj(args[0])), self.integer(args[1]))
        if f == "dagger":
            arity(1)
            return dagger(self._obj(args[0]))
        if f == "dual":
            arity(1)
            return matlis_dual(as_complex(self._obj(args[0])))
        self.fail(f"unknown construction {f!r}")


def _term_text(t):
    s = "" if t.scalar == 1 else f"{t.scalar}*"
    s += f"{t.monomial}*" if t.monomial.powers else ""
    return s + f"e{t.gen}"


def resolve_manifest(man: Manifest, characteristic: int | None = None) -> Context:
    return Context(man, characteristic)
