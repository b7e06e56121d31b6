"""Bounded chain complexes of free modules.

A complex stores free ranks and differentials per degree; the differential
in degree r maps the degree-r module to degree r-1 and consecutive
differentials must compose to zero.  Chain maps, chain homotopies, mapping
cones, duals, translations, and a homotopy solver that decides equality of
maps in the homotopy category live here.

Sign conventions, kept in one place:

* the dual has ``(C^#)_{-r} = (C_r)^*`` with plainly transposed
  differentials and no degree signs, so the double dual is equal to the
  original complex on the nose and the evaluation map has identity
  components;
* ``translate(C, n, signed=True)`` multiplies differentials by (-1)**n;
* the cone of f: S -> T has ``cone_r = T_r (+) S_{r-1}`` with differential
  (t, s) -> (dt + f s, -ds); the projection lands in the signed translate
  of S;
* the degree-shifted dual of a map u is ``shifted_dual_map(u, n)`` with
  components the transposes of u read backwards from degree n.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NotAComplex, NotQuasiIso, ShapeMismatch
from .matrices import (Matrix, block_diag, column_span_basis, hstack,
                       kernel_basis, solve_matrix, vstack)
from .modules import ModulePresentation
from .rings import Ring


@dataclass(frozen=True)
class Complex:
    ring: Ring
    ranks: tuple        # ((degree, rank), ...) sorted, ranks positive
    diffs: tuple        # ((degree, Matrix), ...) sorted

    @property
    def rank_map(self) -> dict:
        return dict(self.ranks)

    def rank(self, r: int) -> int:
        return self.rank_map.get(r, 0)

    def diff(self, r: int) -> Matrix:
        for deg, m in self.diffs:
            if deg == r:
                return m
        return Matrix.zeros(self.ring, self.rank(r - 1), self.rank(r))

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        degs = [d for d, _ in self.ranks]
        return min(degs), max(degs)

    def degrees(self):
        s = self.support
        return range(s[0], s[1] + 1) if s else range(0)

    def is_zero(self) -> bool:
        return not self.ranks

    def total_rank(self) -> int:
        return sum(r for _, r in self.ranks)


def complex_make(ring: Ring, ranks: dict[int, int], diffs: dict[int, Matrix]) -> Complex:
    """Validate shapes and d(d(x)) = 0, then freeze."""
    ranks = {r: n for r, n in ranks.items() if n}
    for r, m in diffs.items():
        a, b = ranks.get(r - 1, 0), ranks.get(r, 0)
        if (m.rows, m.cols) != (a, b):
            raise ShapeMismatch(f"differential at degree {r} has shape "
                                f"{m.rows}x{m.cols}, expected {a}x{b}")
        if m.ring != ring:
            raise ShapeMismatch("differential over the wrong ring")
    kept = {r: m for r, m in diffs.items()
            if ranks.get(r, 0) and ranks.get(r - 1, 0) and not m.is_zero()}
    c = Complex(ring, tuple(sorted(ranks.items())), tuple(sorted(kept.items())))
    for r in list(ranks):
        if ranks.get(r, 0) and ranks.get(r - 2, 0):
            prod = c.diff(r - 1) @ c.diff(r)
            if not prod.is_zero():
                raise NotAComplex(f"differentials at degrees {r} and {r - 1} do not compose to zero")
    return c


def zero_complex(ring: Ring) -> Complex:
    return Complex(ring, (), ())


def free_module_complex(ring: Ring, n: int, degree: int = 0) -> Complex:
    return complex_make(ring, {degree: n}, {})


@dataclass(frozen=True)
class ChainMap:
    source: Complex
    target: Complex
    components: tuple   # ((degree, Matrix), ...) sorted

    def component(self, r: int) -> Matrix:
        for deg, m in self.components:
            if deg == r:
                return m
        return Matrix.zeros(self.source.ring, self.target.rank(r), self.source.rank(r))

    def __add__(self, other):
        _same_ends(self, other)
        degs = {d for d, _ in self.components} | {d for d, _ in other.components}
        return chain_map(self.source, self.target,
                         {r: self.component(r) + other.component(r) for r in degs})

    def __sub__(self, other):
        _same_ends(self, other)
        degs = {d for d, _ in self.components} | {d for d, _ in other.components}
        return chain_map(self.source, self.target,
                         {r: self.component(r) - other.component(r) for r in degs})

    def __neg__(self):
        return chain_map(self.source, self.target, {r: -m for r, m in self.components})

    def scale(self, c):
        return chain_map(self.source, self.target, {r: m.scale(c) for r, m in self.components})

    def compose(self, other: "ChainMap") -> "ChainMap":
        """self after other."""
        if other.target != self.source:
            raise ShapeMismatch("chain map composition mismatch")
        degs = set(dict(other.components)) | set(dict(self.components))
        return chain_map(other.source, self.target,
                         {r: self.component(r) @ other.component(r) for r in degs})

    def is_zero_map(self) -> bool:
        return all(m.is_zero() for _, m in self.components)


def _same_ends(f: ChainMap, g: ChainMap):
    if f.source != g.source or f.target != g.target:
        raise ShapeMismatch("chain maps do not share endpoints")


def chain_map(source: Complex, target: Complex, components: dict[int, Matrix],
              check: bool = True) -> ChainMap:
    comp = {}
    for r, m in components.items():
        a, b = target.rank(r), source.rank(r)
        if (m.rows, m.cols) != (a, b):
            raise ShapeMismatch(f"component at degree {r} has shape {m.rows}x{m.cols},"
                                f" expected {a}x{b}")
        if not m.is_zero():
            comp[r] = m
    f = ChainMap(source, target, tuple(sorted(comp.items())))
    if check:
        lo_hi = [d for c in (source, target) if c.support for d in c.support]
        if lo_hi:
            for r in range(min(lo_hi), max(lo_hi) + 1):
                left = target.diff(r) @ f.component(r)
                right = f.component(r - 1) @ source.diff(r)
                if left != right:
                    raise ShapeMismatch(f"components do not commute with differentials at degree {r}")
    return f


def identity_chain_map(c: Complex) -> ChainMap:
    return chain_map(c, c, {r: Matrix.identity(c.ring, c.rank(r)) for r in c.degrees()})


def zero_chain_map(source: Complex, target: Complex) -> ChainMap:
    return ChainMap(source, target, ())


@dataclass(frozen=True)
class Homotopy:
    """Maps h_r : source_r -> target_{r+1} witnessing f - g = dh + hd."""
    source: Complex
    target: Complex
    maps: tuple    # ((degree, Matrix), ...)

    def map_at(self, r: int) -> Matrix:
        for deg, m in self.maps:
            if deg == r:
                return m
        return Matrix.zeros(self.source.ring, self.target.rank(r + 1), self.source.rank(r))

    def certifies(self, f: ChainMap, g: ChainMap | None = None) -> bool:
        delta = f if g is None else f - g
        degs = set(dict(delta.components))
        for c in (self.source, self.target):
            if c.support:
                degs |= set(range(c.support[0], c.support[1] + 1))
        for r in degs:
            lhs = self.target.diff(r + 1) @ self.map_at(r) + self.map_at(r - 1) @ self.source.diff(r)
            if lhs != delta.component(r):
                return False
        return True


def homotopy_make(source: Complex, target: Complex, maps: dict[int, Matrix]) -> Homotopy:
    kept = {r: m for r, m in maps.items() if not m.is_zero()}
    return Homotopy(source, target, tuple(sorted(kept.items())))


# -- homology -----------------------------------------------------------------


@dataclass(frozen=True)
class HomologyData:
    degree: int
    cycles: Matrix        # basis of ker d_r, columns in the degree-r module
    boundary_coords: Matrix  # coordinates of d_{r+1} in the cycle basis
    presentation: ModulePresentation

    @property
    def invariants(self):
        return self.presentation.invariants


def homology(c: Complex, r: int) -> HomologyData:
    z = kernel_basis(c.diff(r))
    coords = solve_matrix(z, c.diff(r + 1))
    if coords is None:
        raise NotAComplex("boundaries do not lie among cycles")
    pres = ModulePresentation(c.ring, z.cols, coords)
    return HomologyData(r, z, coords, pres)


def all_homology(c: Complex) -> dict[int, HomologyData]:
    return {r: homology(c, r) for r in c.degrees()}


def homology_support(c: Complex) -> list[int]:
    return [r for r in c.degrees() if not homology(c, r).presentation.is_zero()]


def is_exact(c: Complex) -> bool:
    return not homology_support(c)


def homology_morphism(f: ChainMap, r: int):
    """Induced map on degree-r homology presentations."""
    from .modules import ModuleMorphism
    hs, ht = homology(f.source, r), homology(f.target, r)
    image = f.component(r) @ hs.cycles
    coords = solve_matrix(hstack(ht.cycles, f.target.diff(r + 1)), image)
    if coords is None:
        raise NotAComplex("chain map does not preserve cycles")
    mat = coords.select_rows(list(range(ht.cycles.cols)))
    return ModuleMorphism(hs.presentation, ht.presentation, mat).require_well_defined()


# -- duality and translation ---------------------------------------------------


def dual_complex(c: Complex) -> Complex:
    ranks = {-r: n for r, n in c.ranks}
    diffs = {}
    for r in ranks:
        src, tgt = ranks.get(r, 0), ranks.get(r - 1, 0)
        if src and tgt:
            diffs[r] = c.diff(-r + 1).transpose()
    return complex_make(c.ring, ranks, diffs)


def dual_map(u: ChainMap) -> ChainMap:
    """u^# : target^# -> source^#, componentwise transposition."""
    comps = {-r: m.transpose() for r, m in u.components}
    return chain_map(dual_complex(u.target), dual_complex(u.source), comps)


def evaluation_map(c: Complex) -> ChainMap:
    """The canonical identification of a complex with its double dual.

    With the unsigned convention the double dual is the complex itself and
    every component is an identity matrix.
    """
    dd = dual_complex(dual_complex(c))
    if dd != c:
        raise NotAComplex("double dual deviates from the original complex")
    return identity_chain_map(c)


def translate(c: Complex, n: int, signed: bool = False) -> Complex:
    """Degree shift by n; the signed variant multiplies differentials by (-1)**n."""
    ranks = {r + n: k for r, k in c.ranks}
    sign = -1 if (signed and n % 2) else 1
    diffs = {r + n: (m if sign == 1 else -m) for r, m in c.diffs}
    return complex_make(c.ring, ranks, diffs)


def translate_map(u: ChainMap, n: int, signed: bool = False) -> ChainMap:
    comps = {r + n: m for r, m in u.components}
    return chain_map(translate(u.source, n, signed), translate(u.target, n, signed), comps)


def shifted_dual_complex(c: Complex, n: int) -> Complex:
    """T_u^n (C^#): the duality target at shift n."""
    return translate(dual_complex(c), n)


def shifted_dual_map(u: ChainMap, n: int) -> ChainMap:
    """T_u^n (u^#): contravariant duality at shift n, (Du)_r = (u_{n-r})^T."""
    return translate_map(dual_map(u), n)


def flip_form(phi: ChainMap, n: int) -> ChainMap:
    """The transposed-partner of a form phi : E -> T_u^n(E^#).

    Components (n - r) of phi, transposed; symmetric forms agree with
    epsilon times their flip up to homotopy.
    """
    e = phi.source
    comps = {r: phi.component(n - r).transpose() for r in e.degrees()}
    return chain_map(e, shifted_dual_complex(e, n), comps)


def direct_sum_complexes(a: Complex, b: Complex) -> Complex:
    degs = set(dict(a.ranks)) | set(dict(b.ranks))
    ranks = {r: a.rank(r) + b.rank(r) for r in degs}
    diffs = {}
    for r in degs:
        if ranks.get(r - 1, 0) and ranks[r]:
            diffs[r] = block_diag(a.diff(r), b.diff(r))
    return complex_make(a.ring, ranks, diffs)


def summand_inclusion(a: Complex, b: Complex, which: int) -> ChainMap:
    s = direct_sum_complexes(a, b)
    comp = {}
    piece = a if which == 0 else b
    for r in piece.degrees():
        rows, cols = s.rank(r), piece.rank(r)
        offset = 0 if which == 0 else a.rank(r)
        m = [[piece.ring.one if i == j + offset else piece.ring.zero for j in range(cols)]
             for i in range(rows)]
        comp[r] = Matrix.from_shape(piece.ring, rows, cols, m)
    return chain_map(piece, s, comp)


def summand_projection(a: Complex, b: Complex, which: int) -> ChainMap:
    s = direct_sum_complexes(a, b)
    piece = a if which == 0 else b
    comp = {}
    for r in piece.degrees():
        incl = summand_inclusion(a, b, which).component(r)
        comp[r] = incl.transpose()
    return chain_map(s, piece, comp)


# -- cones, homotopies, quasi-isomorphisms --------------------------------------


@dataclass(frozen=True)
class ConeData:
    complex: Complex
    inclusion: ChainMap    # target -> cone
    projection: ChainMap   # cone -> signed translate of source


def cone(f: ChainMap) -> ConeData:
    s, t = f.source, f.target
    ring = s.ring
    degs = set(d for d, _ in t.ranks) | set(d + 1 for d, _ in s.ranks)
    ranks = {r: t.rank(r) + s.rank(r - 1) for r in degs}
    diffs = {}
    for r in degs:
        if not ranks.get(r - 1, 0) or not ranks.get(r, 0):
            continue
        top = hstack(t.diff(r), f.component(r - 1))
        bottom = hstack(Matrix.zeros(ring, s.rank(r - 2), t.rank(r)), -s.diff(r - 1))
        diffs[r] = vstack(top, bottom)
    c = complex_make(ring, ranks, diffs)
    incl = chain_map(t, c, {r: vstack(Matrix.identity(ring, t.rank(r)),
                                      Matrix.zeros(ring, s.rank(r - 1), t.rank(r)))
                            for r in t.degrees()})
    ts = translate(s, 1, signed=True)
    proj = chain_map(c, ts, {r: hstack(Matrix.zeros(ring, s.rank(r - 1), t.rank(r)),
                                       Matrix.identity(ring, s.rank(r - 1)))
                             for r in degs if s.rank(r - 1)})
    return ConeData(c, incl, proj)


def is_quasi_iso(f: ChainMap) -> bool:
    return is_exact(cone(f).complex)


def find_homotopy(f: ChainMap, g: ChainMap | None = None) -> Homotopy | None:
    """Solve f - g = dh + hd as one linear system; None when no witness exists."""
    if g is not None:
        _same_ends(f, g)
    delta = f if g is None else f - g
    s, t = f.source, f.target
    ring = s.ring
    hdegs = [r for r in s.degrees() if s.rank(r) and t.rank(r + 1)]
    sizes = {r: t.rank(r + 1) * s.rank(r) for r in hdegs}
    offsets, total = {}, 0
    for r in hdegs:
        offsets[r] = total
        total += sizes[r]
    eq_degs = [r for r in (set(s.degrees()) | set(t.degrees()))
               if s.rank(r) and t.rank(r)]
    rows, rhs = [], []
    for r in sorted(eq_degs):
        dt = t.diff(r + 1)              # t_{r+1} -> t_r
        ds = s.diff(r)                  # s_r -> s_{r-1}
        a, b = t.rank(r), s.rank(r)
        dmat = delta.component(r)
        for i in range(a):
            for j in range(b):
                row = [ring.zero] * total
                # d_{r+1} @ h_r contributes dt[i, k] * h_r[k, j]
                if r in offsets:
                    kdim = t.rank(r + 1)
                    for k in range(kdim):
                        row[offsets[r] + k * b + j] = dt[i, k]
                # h_{r-1} @ d_r contributes h_{r-1}[i, c] * ds[c, j]
                if (r - 1) in offsets:
                    cdim = s.rank(r - 1)
                    for cc in range(cdim):
                        row[offsets[r - 1] + i * cdim + cc] = ring.add(
                            row[offsets[r - 1] + i * cdim + cc], ds[cc, j])
                rows.append(row)
                rhs.append([dmat[i, j]])
    if not rows:
        return homotopy_make(s, t, {}) if delta.is_zero_map() else None
    big = Matrix.from_shape(ring, len(rows), total, rows) if total else \
        Matrix.zeros(ring, len(rows), 0)
    sol = solve_matrix(big, Matrix.from_shape(ring, len(rows), 1, rhs))
    if sol is None:
        return None
    maps = {}
    for r in hdegs:
        kdim, b = t.rank(r + 1), s.rank(r)
        maps[r] = Matrix.from_shape(
            ring, kdim, b,
            [[sol[offsets[r] + k * b + j, 0] for j in range(b)] for k in range(kdim)])
    h = homotopy_make(s, t, maps)
    assert h.certifies(f, g if g is not None else zero_chain_map(s, t))
    return h


def contraction(x: Complex) -> Homotopy:
    """A chain contraction of an exact bounded free complex.

    Built degreewise from sections of the differentials; raises NotQuasiIso
    if the complex is not exact.
    """
    ring = x.ring
    if x.is_zero():
        return homotopy_make(x, x, {})
    lo, hi = x.support
    im_basis, im_coords, sections = {}, {}, {}
    for r in range(lo, hi + 2):
        d = x.diff(r)
        im_basis[r] = column_span_basis(d)
        im_coords[r] = solve_matrix(im_basis[r], d)
        sections[r] = solve_matrix(d, im_basis[r])
        if im_coords[r] is None or (sections[r] is None and im_basis[r].cols):
            raise NotQuasiIso("no section: complex is not exact")
    maps = {}
    for r in range(lo, hi + 1):
        if not x.rank(r):
            continue
        # projection onto cycles: 1 - s_r @ c_r, then coordinates in im d_{r+1}
        rho = sections[r] @ im_coords[r] if im_basis[r].cols else \
            Matrix.zeros(ring, x.rank(r), x.rank(r))
        cyc_proj = Matrix.identity(ring, x.rank(r)) - rho
        w = solve_matrix(im_basis[r + 1], cyc_proj)
        if w is None:
            raise NotQuasiIso(f"homology at degree {r} does not vanish")
        if im_basis[r + 1].cols:
            maps[r] = sections[r + 1] @ w
    h = homotopy_make(x, x, maps)
    assert h.certifies(identity_chain_map(x))
    return h


@dataclass(frozen=True)
class HomotopyInverseData:
    inverse: ChainMap
    right_witness: Homotopy   # f . inverse - 1_target = dh + hd
    left_witness: Homotopy    # inverse . f - 1_source = dh + hd


def homotopy_inverse(f: ChainMap) -> HomotopyInverseData:
    """A two-sided homotopy inverse of a quasi-isomorphism of bounded free
    complexes, extracted from a contraction of the mapping cone."""
    s, t = f.source, f.target
    ring = s.ring
    cn = cone(f)
    h = contraction(cn.complex)
    ginv, right, left = {}, {}, {}
    for r in (set(s.degrees()) | set(t.degrees()) | {d for d, _ in h.maps}):
        m = h.map_at(r)  # cone_r -> cone_{r+1}: blocks (t_r + s_{r-1}) -> (t_{r+1} + s_r)
        tr_, sr_ = t.rank(r), s.rank(r - 1)
        trp, srp = t.rank(r + 1), s.rank(r)
        if m.rows != trp + srp or m.cols != tr_ + sr_:
            continue
        if srp and tr_:
            ginv[r] = m.select_rows(list(range(trp, trp + srp))).select_columns(list(range(tr_)))
        if trp and tr_:
            right[r] = m.select_rows(list(range(trp))).select_columns(list(range(tr_)))
        if srp and sr_:
            left[r - 1] = m.select_rows(list(range(trp, trp + srp))).select_columns(
                list(range(tr_, tr_ + sr_)))
    g = chain_map(t, s, {r: m for r, m in ginv.items() if m.rows and m.cols})
    rw = homotopy_make(t, t, {r: -m for r, m in right.items()})
    lw = homotopy_make(s, s, left)
    assert rw.certifies(f.compose(g), identity_chain_map(t))
    assert lw.certifies(g.compose(f), identity_chain_map(s))
    return HomotopyInverseData(g, rw, lw)
