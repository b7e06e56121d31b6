"""Finitely presented modules over a supported ring.

A module is the cokernel of its relations matrix: ``A**g / colspan(relations)``.
Morphisms are matrices between generator sets that carry relations into
relations; equality of morphisms is equality modulo target relations.  All
isomorphism questions reduce to invariant factors, which are decidable over
the supported rings.

The zero module is presented with zero generators and every operation accepts
and emits it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import (IllFormedMorphism, NotFiniteLength, ShapeMismatch,
                     TargetMismatch)
from .matrices import (Matrix, block_diag, column_span_basis, hstack,
                       kernel_basis, smith_normal_form, solve_matrix, vstack)
from .rings import Ring, factor_integer


@dataclass(frozen=True)
class ModulePresentation:
    ring: Ring
    generators: int
    relations: Matrix  # generators x q; columns span the relation submodule

    def __post_init__(self):
        if self.relations.rows != self.generators or self.relations.ring != self.ring:
            raise ShapeMismatch("relations matrix must have one row per generator")

    @property
    def invariants(self) -> tuple[int, tuple]:
        """(free rank, nonunit invariant factors)."""
        return _invariants_of(self)

    def is_zero(self) -> bool:
        return self.invariants == (0, ())

    def is_finite_length(self) -> bool:
        return self.invariants[0] == 0

    def __repr__(self):
        free, tors = self.invariants
        parts = [f"R^{free}"] if free else []
        parts += [f"R/{self.ring.format_el(f)}" for f in tors]
        return f"Module({self.ring.descriptor}: " + (" + ".join(parts) or "0") + ")"


@lru_cache(maxsize=100_000)
def _invariants_of(m: ModulePresentation):
    from .matrices import cokernel_invariants
    return cokernel_invariants(m.relations)


def free_presentation(ring: Ring, n: int) -> ModulePresentation:
    return ModulePresentation(ring, n, Matrix.zeros(ring, n, 0))


def presentation_from_factors(ring: Ring, factors, free_rank: int = 0) -> ModulePresentation:
    """Canonical diagonal presentation: one generator per factor plus free ones."""
    factors = [ring.el(f) for f in factors]
    g = len(factors) + free_rank
    rel = Matrix.from_shape(ring, g, len(factors),
                            [[factors[j] if i == j else ring.zero for j in range(len(factors))]
                             for i in range(g)])
    return ModulePresentation(ring, g, rel)


@dataclass(frozen=True)
class ModuleMorphism:
    source: ModulePresentation
    target: ModulePresentation
    matrix: Matrix  # target.generators x source.generators

    def __post_init__(self):
        if (self.matrix.rows, self.matrix.cols) != (self.target.generators, self.source.generators):
            raise ShapeMismatch("morphism matrix shape mismatch")

    def is_well_defined(self) -> bool:
        image_of_relations = self.matrix @ self.source.relations
        return solve_matrix(self.target.relations, image_of_relations) is not None

    def require_well_defined(self) -> "ModuleMorphism":
        if not self.is_well_defined():
            raise IllFormedMorphism("matrix does not send relations into relations")
        return self

    def compose(self, other: "ModuleMorphism") -> "ModuleMorphism":
        """self after other."""
        if other.target != self.source:
            raise TargetMismatch("composition needs matching middle presentation")
        return ModuleMorphism(other.source, self.target, self.matrix @ other.matrix)

    def __add__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix + other.matrix)

    def __sub__(self, other):
        return ModuleMorphism(self.source, self.target, self.matrix - other.matrix)

    def __neg__(self):
        return ModuleMorphism(self.source, self.target, -self.matrix)

    def scale(self, c):
        return ModuleMorphism(self.source, self.target, self.matrix.scale(c))

    def equals(self, other: "ModuleMorphism") -> bool:
        if self.source != other.source or self.target != other.target:
            return False
        return solve_matrix(self.target.relations, self.matrix - other.matrix) is not None

    def is_zero(self) -> bool:
        return solve_matrix(self.target.relations, self.matrix) is not None

    def is_epi(self) -> bool:
        from .matrices import cokernel_invariants
        return cokernel_invariants(hstack(self.matrix, self.target.relations)) == (0, ())

    def is_mono(self) -> bool:
        return subquotient(self, "kernel").obj.is_zero()

    def is_iso(self) -> bool:
        return self.is_epi() and self.is_mono()


def identity_morphism(m: ModulePresentation) -> ModuleMorphism:
    return ModuleMorphism(m, m, Matrix.identity(m.ring, m.generators))


def zero_morphism(source: ModulePresentation, target: ModulePresentation) -> ModuleMorphism:
    return ModuleMorphism(source, target, Matrix.zeros(source.ring, target.generators, source.generators))


# -- canonical form ------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalData:
    """SNF-derived canonical shape of a presentation.

    ``kept`` indexes the generators that survive (nonunit diagonal or free);
    ``partial`` is the boundary matrix of the minimal free resolution,
    ``aug_matrix`` maps the resolution's degree-zero generators onto the
    original presentation.
    """
    module: ModulePresentation
    factors: tuple          # nonunit nonzero invariant factors, divisibility chain
    free_rank: int
    kept: tuple
    partial: Matrix         # g' x k, columns f_i * e_i
    aug_matrix: Matrix      # g x g'


@lru_cache(maxsize=100_000)
def canonical_data(m: ModulePresentation) -> CanonicalData:
    ring = m.ring
    dec = smith_normal_form(m.relations)
    g = m.generators
    k = min(g, m.relations.cols)
    kept, factors = [], []
    for i in range(g):
        f = dec.diagonal[i] if i < k else ring.zero
        if f == ring.zero:
            kept.append(i)
        elif not ring.is_unit(f):
            kept.append(i)
            factors.append(f)
    gp = len(kept)
    partial = Matrix.from_shape(ring, gp, len(factors),
                                [[factors[j] if i == j else ring.zero for j in range(len(factors))]
                                 for i in range(gp)])
    aug = dec.U_inv.select_columns(kept)
    return CanonicalData(m, tuple(factors), gp - len(factors), tuple(kept), partial, aug)


def to_canonical(m: ModulePresentation) -> tuple[ModulePresentation, ModuleMorphism, ModuleMorphism]:
    """Canonical diagonal presentation with the isomorphisms both ways."""
    data = canonical_data(m)
    can = ModulePresentation(m.ring, len(data.kept), data.partial)
    back = ModuleMorphism(can, m, data.aug_matrix)
    u = smith_normal_form(m.relations).U
    fwd = ModuleMorphism(m, can, u.select_rows(list(data.kept)))
    return can, fwd, back


# -- kernels, images, cokernels, pullbacks --------------------------------------


@dataclass(frozen=True)
class SubquotientWitness:
    kind: str
    obj: ModulePresentation
    map: ModuleMorphism          # kernel/image: inclusion; cokernel: projection
    epi_from_source: ModuleMorphism | None = None  # for images


def _span_membership_relations(gens: Matrix, modulo: Matrix) -> Matrix:
    """Relations among the columns of ``gens`` inside coker(modulo)."""
    combined = hstack(gens, modulo)
    ker = kernel_basis(combined)
    return ker.select_rows(list(range(gens.cols)))


def subquotient(f: ModuleMorphism, kind: str) -> SubquotientWitness:
    f.require_well_defined()
    ring = f.source.ring
    if kind == "kernel":
        combined = hstack(f.matrix, f.target.relations)
        ker = kernel_basis(combined)
        gens = ker.select_rows(list(range(f.source.generators)))
        gens = column_span_basis(hstack(gens, f.source.relations))
        rels = _span_membership_relations(gens, f.source.relations)
        obj = ModulePresentation(ring, gens.cols, rels)
        incl = ModuleMorphism(obj, f.source, gens).require_well_defined()
        return SubquotientWitness("kernel", obj, incl)
    if kind == "image":
        rels = _span_membership_relations(f.matrix, f.target.relations)
        obj = ModulePresentation(ring, f.source.generators, rels)
        incl = ModuleMorphism(obj, f.target, f.matrix).require_well_defined()
        epi = ModuleMorphism(f.source, obj, Matrix.identity(ring, f.source.generators))
        return SubquotientWitness("image", obj, incl, epi.require_well_defined())
    if kind == "cokernel":
        obj = ModulePresentation(ring, f.target.generators, hstack(f.target.relations, f.matrix))
        proj = ModuleMorphism(f.target, obj, Matrix.identity(ring, f.target.generators))
        return SubquotientWitness("cokernel", obj, proj.require_well_defined())
    raise ValueError(f"unknown subquotient kind {kind!r}")


@dataclass(frozen=True)
class Pullback:
    obj: ModulePresentation
    proj1: ModuleMorphism
    proj2: ModuleMorphism


def direct_sum(ms: list[ModulePresentation]):
    """Direct sum with injections and projections."""
    if not ms:
        raise ValueError("direct_sum needs at least one summand")
    ring = ms[0].ring
    total = sum(m.generators for m in ms)
    rel = block_diag(*[m.relations for m in ms])
    s = ModulePresentation(ring, total, rel)
    injections, projections = [], []
    offset = 0
    for m in ms:
        rows = list(range(offset, offset + m.generators))
        inj = Matrix.from_shape(ring, total, m.generators,
                                [[ring.one if (i in rows and i - offset == j) else ring.zero
                                  for j in range(m.generators)] for i in range(total)])
        injections.append(ModuleMorphism(m, s, inj))
        proj = inj.transpose()
        projections.append(ModuleMorphism(s, m, proj))
        offset += m.generators
    return s, injections, projections


def pullback(f: ModuleMorphism, g: ModuleMorphism) -> Pullback:
    """Fiber product of f and g over their shared target."""
    if f.target != g.target:
        raise TargetMismatch("pullback needs a shared target")
    s, injs, projs = direct_sum([f.source, g.source])
    h = ModuleMorphism(s, f.target, hstack(f.matrix, -g.matrix))
    ker = subquotient(h, "kernel")
    gm = f.source.generators
    proj1 = ModuleMorphism(ker.obj, f.source, ker.map.matrix.select_rows(list(range(gm))))
    proj2 = ModuleMorphism(ker.obj, g.source,
                           ker.map.matrix.select_rows(list(range(gm, s.generators))))
    return Pullback(ker.obj, proj1.require_well_defined(), proj2.require_well_defined())


def pullback_factor(pb: Pullback, h1: ModuleMorphism, h2: ModuleMorphism) -> ModuleMorphism:
    """The universal map T -> pullback induced by a commuting cone (h1, h2)."""
    ring = pb.obj.ring
    stacked_target = vstack(h1.matrix, h2.matrix)
    gens = vstack(pb.proj1.matrix, pb.proj2.matrix)
    modulo = block_diag(h1.target.relations, h2.target.relations)
    sol = solve_matrix(hstack(gens, modulo), stacked_target)
    if sol is None:
        raise TargetMismatch("cone does not factor through the pullback")
    u = ModuleMorphism(h1.source, pb.obj, sol.select_rows(list(range(pb.obj.generators))))
    return u.require_well_defined()


def factor_through(mono_or_epi: ModuleMorphism, g: ModuleMorphism) -> ModuleMorphism:
    """Solve mono_or_epi . u = g for u (both maps into the same target)."""
    if mono_or_epi.target != g.target:
        raise TargetMismatch("factorization needs a shared target")
    sol = solve_matrix(hstack(mono_or_epi.matrix, g.target.relations), g.matrix)
    if sol is None:
        raise IllFormedMorphism("morphism does not factor")
    u = ModuleMorphism(g.source, mono_or_epi.source,
                       sol.select_rows(list(range(mono_or_epi.source.generators))))
    return u


def invert_morphism(f: ModuleMorphism) -> ModuleMorphism:
    """Two-sided inverse of an isomorphism of presentations."""
    ring = f.source.ring
    gm, gn = f.source.generators, f.target.generators
    # solve G @ f.matrix + Y @ rel_M = I, i.e. transposed as a single system
    lhs = hstack(f.matrix.transpose(), f.source.relations.transpose())
    rhs = Matrix.identity(ring, gm)
    sol = solve_matrix(lhs, rhs)
    if sol is None:
        raise IllFormedMorphism("morphism is not invertible")
    g = ModuleMorphism(f.target, f.source, sol.select_rows(list(range(gn))).transpose())
    if not (g.is_well_defined() and g.compose(f).equals(identity_morphism(f.source))
            and f.compose(g).equals(identity_morphism(f.target))):
        raise IllFormedMorphism("morphism is not invertible")
    return g


# -- Hom and Ext into the ring ---------------------------------------------------


@dataclass(frozen=True)
class HomData:
    presentation: ModulePresentation  # free, one generator per basis functional
    basis: Matrix                     # g x m, columns are the functionals


@lru_cache(maxsize=100_000)
def hom_to_ring(m: ModulePresentation) -> HomData:
    """Hom(M, R) as a free module: the kernel of the transposed relations."""
    basis = kernel_basis(m.relations.transpose())
    return HomData(free_presentation(m.ring, basis.cols), basis)


def hom_dual_morphism(f: ModuleMorphism) -> ModuleMorphism:
    """Hom(f, R): Hom(N, R) -> Hom(M, R) in the chosen bases."""
    hm, hn = hom_to_ring(f.source), hom_to_ring(f.target)
    pulled = f.matrix.transpose() @ hn.basis
    coords = solve_matrix(hm.basis, pulled)
    if coords is None:
        raise IllFormedMorphism("pulled-back functionals do not land in the hom basis")
    return ModuleMorphism(hn.presentation, hm.presentation, coords)


def resolution_lift(f: ModuleMorphism) -> tuple[Matrix, Matrix]:
    """Lift f through the canonical length-<=1 free resolutions.

    Returns (l0, l1): l0 between the degree-zero free modules commuting with
    the augmentations, l1 between the relation modules.
    """
    cm, cn = canonical_data(f.source), canonical_data(f.target)
    ring = f.source.ring
    target_aug = hstack(cn.aug_matrix, f.target.relations)
    sol = solve_matrix(target_aug, f.matrix @ cm.aug_matrix)
    if sol is None:
        raise IllFormedMorphism("morphism does not lift through the resolutions")
    l0 = sol.select_rows(list(range(cn.aug_matrix.cols)))
    l1 = solve_matrix(cn.partial, l0 @ cm.partial)
    if l1 is None:
        raise IllFormedMorphism("degree-one lift does not exist")
    return l0, l1


def ext_to_ring(m: ModulePresentation, i: int) -> ModulePresentation:
    """Ext^i(M, R) computed from the canonical free resolution.

    Over the supported rings resolutions have length at most one, so Ext
    vanishes beyond degree one (and beyond degree zero over fields).
    """
    ring = m.ring
    data = canonical_data(m)
    if i == 0:
        hom_basis = kernel_basis(data.partial.transpose())
        return free_presentation(ring, hom_basis.cols)
    if i == 1:
        k = data.partial.cols
        return ModulePresentation(ring, k, data.partial.transpose())
    return free_presentation(ring, 0)


def ext_dual_morphism(f: ModuleMorphism, i: int) -> ModuleMorphism:
    """Ext^i(f, R): Ext^i(N, R) -> Ext^i(M, R), for i = 0 over fields or i = 1."""
    l0, l1 = resolution_lift(f)
    em, en = ext_to_ring(f.source, i), ext_to_ring(f.target, i)
    if i == 1:
        return ModuleMorphism(en, em, l1.transpose()).require_well_defined()
    if i == 0:
        km = kernel_basis(canonical_data(f.source).partial.transpose())
        kn = kernel_basis(canonical_data(f.target).partial.transpose())
        coords = solve_matrix(km, l0.transpose() @ kn)
        if coords is None:
            raise IllFormedMorphism("Ext^0 action does not restrict to kernels")
        return ModuleMorphism(en, em, coords)
    return zero_morphism(en, em)


# -- primary decomposition -------------------------------------------------------


def _crt_idempotents(ring: Ring, f: Fraction) -> dict[int, Fraction]:
    """For f a positive odd integer: e_p = 1 mod p-part, 0 mod the rest."""
    n = int(f)
    out = {}
    for p, e in factor_integer(n):
        pe = p ** e
        rest = n // pe
        # rest * (rest^{-1} mod pe) is 1 mod pe and 0 mod rest
        out[p] = Fraction(rest * pow(rest, -1, pe))
    return out


@dataclass(frozen=True)
class PrimarySplitting:
    module: ModulePresentation
    primes: tuple
    pieces: tuple                 # canonical diagonal presentations over the same ring
    injections: tuple             # piece -> module
    projections: tuple            # module -> piece


def primary_splitting(m: ModulePresentation) -> PrimarySplitting:
    """Internal orthogonal splitting of a finite-length module over z-half."""
    ring = m.ring
    if ring.kind != "z-half":
        raise NotFiniteLength("primary decomposition lives over z-half")
    free, factors = m.invariants
    if free:
        raise NotFiniteLength("module has free rank")
    can, fwd, back = to_canonical(m)
    primes = sorted({p for f in factors for p, _ in factor_integer(int(f))})
    pieces, injections, projections = [], [], []
    for p in primes:
        pfactors = []
        cols = []   # (index in can, p-part, cofactor idempotent)
        for j, f in enumerate(factors):
            v = 0
            n = int(f)
            while n % p == 0:
                n //= p
                v += 1
            if v:
                pfactors.append(Fraction(p) ** v)
                cols.append(j)
        piece = presentation_from_factors(ring, pfactors)
        # injection: generator j of the piece goes to the CRT idempotent times e_{cols[j]}
        inj_rows = [[ring.zero] * len(cols) for _ in range(can.generators)]
        proj_rows = [[ring.zero] * can.generators for _ in range(len(cols))]
        for jj, j in enumerate(cols):
            e_p = _crt_idempotents(ring, factors[j])[p]
            inj_rows[j][jj] = e_p
            proj_rows[jj][j] = ring.one
        inj = ModuleMorphism(piece, can, Matrix.make(ring, inj_rows) if cols else
                             Matrix.zeros(ring, can.generators, 0))
        proj = ModuleMorphism(can, piece, Matrix.make(ring, proj_rows) if cols else
                              Matrix.zeros(ring, 0, can.generators))
        pieces.append(piece)
        injections.append(back.compose(inj).require_well_defined())
        projections.append(proj.compose(fwd).require_well_defined())
    return PrimarySplitting(m, tuple(primes), tuple(pieces), tuple(injections), tuple(projections))


def primary_decompose(m: ModulePresentation) -> list[tuple[int, ModulePresentation]]:
    """Finite-length module over z-half as a list of p-local presentations."""
    split = primary_splitting(m)
    out = []
    for p, piece in zip(split.primes, split.pieces):
        local = Ring("zloc", p)
        out.append((p, ModulePresentation(local, piece.generators,
                                          Matrix.make(local, [list(r) for r in piece.relations.entries]))))
    return out
