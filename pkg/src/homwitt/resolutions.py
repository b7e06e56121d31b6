"""Free resolutions and the lifting functor into the homotopy category.

Every finitely presented module over the supported rings has a canonical
free resolution of length at most one, read off the Smith normal form of
its relations (length zero over fields).  Morphisms of modules lift to
chain maps between resolutions, uniquely up to chain homotopy, which makes
the assignment module -> resolution a functor into the homotopy category
of bounded free complexes.

The canonical resolution is memoized per presentation so repeated calls
agree bit for bit; the cache tolerates concurrent idempotent inserts.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .errors import IncompatibleAugmentations, NotQuasiIso
from .matrices import Matrix, hstack, solve_matrix
from .complexes import (ChainMap, Complex, Homotopy, chain_map, complex_make,
                        homology, homotopy_inverse, homotopy_make,
                        zero_complex)
from .modules import (ModuleMorphism, ModulePresentation, canonical_data,
                      free_presentation, identity_morphism, pullback,
                      pullback_factor, subquotient, factor_through,
                      zero_morphism)


@dataclass(frozen=True)
class Resolution:
    module: ModulePresentation
    complex: Complex
    augmentation: ModuleMorphism   # from the degree-0 free presentation onto module

    @property
    def length(self) -> int:
        s = self.complex.support
        return s[1] if s else 0


def free_resolution(m: ModulePresentation) -> Resolution:
    """The minimal free resolution derived from the canonical form of m."""
    data = canonical_data(m)
    ring = m.ring
    gp, k = len(data.kept), len(data.factors)
    ranks = {0: gp}
    diffs = {}
    if k:
        ranks[1] = k
        diffs[1] = data.partial
    comp = complex_make(ring, ranks, diffs)
    aug = ModuleMorphism(free_presentation(ring, gp), m, data.aug_matrix)
    return Resolution(m, comp, aug.require_well_defined())


_cache: dict = {}
_cache_lock = threading.Lock()


def canonical_resolution(m: ModulePresentation) -> Resolution:
    res = _cache.get(m)
    if res is None:
        res = free_resolution(m)
        with _cache_lock:
            _cache.setdefault(m, res)
            res = _cache[m]
    return res


def validate_resolution(res: Resolution) -> bool:
    c = res.complex
    if c.support and c.support[0] < 0:
        return False
    if res.length > max(res.module.ring.d, 1):
        return False
    for r in c.degrees():
        if r > 0 and not homology(c, r).presentation.is_zero():
            return False
    if not res.augmentation.is_epi():
        return False
    # H_0 identified with the module through the augmentation
    h0 = homology(c, 0).presentation if not c.is_zero() else free_presentation(c.ring, 0)
    induced = ModuleMorphism(h0, res.module, res.augmentation.matrix)
    return induced.is_well_defined() and induced.is_iso()


def lift_morphism(g: ModuleMorphism, p: Resolution, q: Resolution) -> ChainMap:
    """A chain map between resolutions that commutes with the augmentations.

    Exists because the degree-zero modules are free and the target is exact
    in positive degrees; any two outputs are chain homotopic.
    """
    if p.module != g.source or q.module != g.target:
        raise IncompatibleAugmentations("resolutions do not match the morphism")
    ring = g.source.ring
    comps: dict[int, Matrix] = {}
    top = p.complex.support[1] if p.complex.support else -1
    target_rel = g.target.relations
    sol = solve_matrix(hstack(q.augmentation.matrix, target_rel),
                       g.matrix @ p.augmentation.matrix)
    if sol is None:
        raise IncompatibleAugmentations("degree-zero lift does not exist")
    comps[0] = sol.select_rows(list(range(q.complex.rank(0))))
    for r in range(1, top + 1):
        rhs = comps[r - 1] @ p.complex.diff(r)
        sol = solve_matrix(q.complex.diff(r), rhs)
        if sol is None:
            raise IncompatibleAugmentations(f"degree-{r} lift does not exist")
        comps[r] = sol
    return chain_map(p.complex, q.complex, comps)


def resolution_map(g: ModuleMorphism) -> ChainMap:
    """The functor on morphisms: lift between the canonical resolutions."""
    return lift_morphism(g, canonical_resolution(g.source), canonical_resolution(g.target))


def resolution_null_homotopy(delta: ChainMap, q: Resolution) -> Homotopy:
    """Null-homotopy of a chain map into a resolution that induces zero.

    ``delta`` must land in q.complex and compose to zero with q's
    augmentation; the homotopy is built degree by degree using exactness.
    """
    s = delta.source
    ring = s.ring
    maps: dict[int, Matrix] = {}
    top = s.support[1] if s.support else -1
    prev = None
    for r in range(0, top + 1):
        e = delta.component(r)
        if prev is not None:
            e = e - prev @ s.diff(r)
        dq = q.complex.diff(r + 1)
        sol = solve_matrix(dq, e)
        if sol is None:
            raise IncompatibleAugmentations("map does not induce zero on the resolved module")
        maps[r] = sol
        prev = sol
    h = homotopy_make(s, q.complex, maps)
    assert h.certifies(delta)
    return h


def normalize_roof(tau: ChainMap, gamma: ChainMap) -> tuple[ChainMap, Homotopy]:
    """Convert a roof (tau quasi-iso out of a common source, gamma the other
    leg) into a direct chain map with a witness that out . tau ~ gamma."""
    from .complexes import is_quasi_iso
    if not is_quasi_iso(tau):
        raise NotQuasiIso("roof denominator is not a quasi-isomorphism")
    inv = homotopy_inverse(tau)
    out = gamma.compose(inv.inverse)
    h = inv.left_witness     # inv.inverse . tau - 1 = dh + hd
    witness = homotopy_make(tau.source, gamma.target,
                            {r: gamma.component(r + 1) @ h.map_at(r)
                             for r, _ in h.maps})
    assert witness.certifies(out.compose(tau), gamma)
    return out, witness


# -- bounded complexes of presented modules -------------------------------------


@dataclass(frozen=True)
class ModuleComplex:
    ring: object
    objects: tuple   # ((degree, ModulePresentation), ...) sorted
    diffs: tuple     # ((degree, ModuleMorphism), ...) sorted

    def object(self, r: int) -> ModulePresentation:
        for deg, m in self.objects:
            if deg == r:
                return m
        return free_presentation(self.ring, 0)

    def diff(self, r: int) -> ModuleMorphism:
        for deg, f in self.diffs:
            if deg == r:
                return f
        return zero_morphism(self.object(r), self.object(r - 1))

    @property
    def support(self):
        degs = [d for d, m in self.objects if not m.is_zero()]
        return (min(degs), max(degs)) if degs else None

    def degrees(self):
        s = self.support
        return range(s[0], s[1] + 1) if s else range(0)


def module_complex(ring, objects: dict[int, ModulePresentation],
                   diffs: dict[int, ModuleMorphism]) -> ModuleComplex:
    objects = {r: m for r, m in objects.items() if m.generators}
    kept = {}
    for r, f in diffs.items():
        if r in objects and (r - 1) in objects:
            f.require_well_defined()
            kept[r] = f
    mc = ModuleComplex(ring, tuple(sorted(objects.items())), tuple(sorted(kept.items())))
    for r in list(objects):
        if (r - 2) in objects and r in objects:
            comp = mc.diff(r - 1).compose(mc.diff(r))
            if not comp.is_zero():
                from .errors import NotAComplex
                raise NotAComplex(f"module differentials at {r}, {r - 1} do not compose to zero")
    return mc


def free_to_module_complex(c: Complex) -> ModuleComplex:
    objs = {r: free_presentation(c.ring, c.rank(r)) for r in c.degrees()}
    diffs = {}
    for r in c.degrees():
        if c.rank(r) and c.rank(r - 1):
            diffs[r] = ModuleMorphism(objs[r], objs[r - 1], c.diff(r))
    return module_complex(c.ring, objs, diffs)


def module_complex_homology(mc: ModuleComplex, r: int) -> ModulePresentation:
    ker = subquotient(mc.diff(r), "kernel")
    u = factor_through(ker.map, mc.diff(r + 1))
    return subquotient(u, "cokernel").obj


def module_map_components_quasi_iso(comps: dict[int, ModuleMorphism],
                                    src: ModuleComplex, tgt: ModuleComplex) -> bool:
    degs = set(src.degrees()) | set(tgt.degrees())
    for r in degs:
        hs = module_complex_homology(src, r)
        ht = module_complex_homology(tgt, r)
        ker_s = subquotient(src.diff(r), "kernel")
        ker_t = subquotient(tgt.diff(r), "kernel")
        f = comps.get(r, zero_morphism(src.object(r), tgt.object(r)))
        v = factor_through(ker_t.map, f.compose(ker_s.map))
        hmor = ModuleMorphism(hs, ht, v.matrix)
        if not (hmor.is_well_defined() and hmor.is_iso()):
            return False
    return True


# -- degreewise pullback of two resolutions over a morphism ----------------------


@dataclass(frozen=True)
class ResolutionPullback:
    gamma: ModuleComplex
    to_first: dict          # degree -> ModuleMorphism, a quasi-isomorphism
    to_second: dict         # degree -> ModuleMorphism
    augmentation: ModuleMorphism


def pullback_complexes(f_res, g_res, g: ModuleMorphism) -> ResolutionPullback:
    """Degreewise pullback of two augmented complexes over a morphism of the
    resolved modules; the first projection is a quasi-isomorphism.

    ``f_res`` resolves the source of g and ``g_res`` its target; the inputs
    may be free resolutions or augmented module complexes (anything with
    .complex-like objects per degree plus .augmentation).
    """
    fc = _as_module_complex(f_res)
    gc = _as_module_complex(g_res)
    f_aug, g_aug = f_res.augmentation, g_res.augmentation
    if f_aug.target != g.source or g_aug.target != g.target:
        raise IncompatibleAugmentations("augmentations do not match the morphism")
    ring = g.source.ring
    pb = pullback(g.compose(f_aug), g_aug)
    objects = {0: pb.obj}
    to_first = {0: pb.proj1}
    to_second = {0: pb.proj2}
    diffs = {}
    degs = sorted(set(list(fc.degrees()) + list(gc.degrees())))
    from .modules import direct_sum
    for r in degs:
        if r <= 0:
            continue
        s, injs, projs = direct_sum([fc.object(r), gc.object(r)])
        objects[r] = s
        to_first[r] = projs[0]
        to_second[r] = projs[1]
        if r == 1:
            cone_1 = fc.diff(1).compose(projs[0])
            cone_2 = gc.diff(1).compose(projs[1])
            diffs[1] = pullback_factor(pb, cone_1, cone_2)
        else:
            sp, injs_p, projs_p = direct_sum([fc.object(r - 1), gc.object(r - 1)])
            left = injs_p[0].compose(fc.diff(r).compose(projs[0]))
            right = injs_p[1].compose(gc.diff(r).compose(projs[1]))
            diffs[r] = left + right
    gamma = module_complex(ring, objects, diffs)
    aug = f_aug.compose(to_first[0])
    return ResolutionPullback(gamma, to_first, to_second, aug.require_well_defined())


def _as_module_complex(res) -> ModuleComplex:
    """Accept a free Resolution or any augmented bundle with a ModuleComplex."""
    if isinstance(res, Resolution):
        return free_to_module_complex(res.complex)
    return res.complex


# -- free approximation of a bounded module complex (quasi-isomorphism) ----------


@dataclass(frozen=True)
class FreeApproximation:
    complex: Complex
    components: dict        # degree -> ModuleMorphism from the free cover onto G_r


def resolve_quasi(g: ModuleComplex) -> FreeApproximation:
    """A bounded free complex with a degreewise-epi quasi-isomorphism onto g.

    Built from the bottom degree upward by pulling the next differential
    back along the kernel of the approximation so far; over the supported
    rings the construction stabilizes one degree past the top.
    """
    ring = g.ring
    sup = g.support
    if sup is None:
        return FreeApproximation(zero_complex(ring), {})
    lo, hi = sup
    if all(g.object(r).relations.cols == 0 for r in g.degrees()):
        # already free: take it as its own approximation
        ranks = {r: g.object(r).generators for r in g.degrees()}
        diffs = {r: g.diff(r).matrix for r in g.degrees() if ranks.get(r) and ranks.get(r - 1)}
        c = complex_make(ring, ranks, diffs)
        comps = {r: identity_morphism(g.object(r)) for r in g.degrees()}
        return FreeApproximation(c, comps)

    ranks: dict[int, int] = {}
    dmats: dict[int, Matrix] = {}
    comps: dict[int, ModuleMorphism] = {}
    from .matrices import column_span_basis, kernel_basis

    # degree lo: the canonical free cover
    g_lo = g.object(lo)
    ranks[lo] = g_lo.generators
    comps[lo] = ModuleMorphism(free_presentation(ring, g_lo.generators), g_lo,
                               Matrix.identity(ring, g_lo.generators))
    z_basis = Matrix.identity(ring, g_lo.generators)     # basis of ker(d_lo) = everything

    for n in range(lo, hi + 1):
        gn = g.object(n)
        gnext = g.object(n + 1)
        dnext = g.diff(n + 1)
        # elements of ker(d_n) in the free cover whose image lies in the
        # boundaries of g at degree n (plus relations)
        gz = comps[n].matrix @ z_basis
        combined = hstack(gz, -dnext.matrix, -gn.relations)
        ker = kernel_basis(combined)
        pre = column_span_basis(ker.select_rows(list(range(z_basis.cols))))
        y_part = None
        if gnext.generators:
            sol = solve_matrix(hstack(dnext.matrix, gn.relations), gz @ pre)
            if sol is None:
                raise IncompatibleAugmentations("preimage does not factor through the boundary")
            y_part = sol.select_rows(list(range(gnext.generators)))
        # pull the free cover of the next object back over the preimage
        pre_obj = free_presentation(ring, pre.cols)
        if gnext.generators:
            bnd = subquotient(dnext, "image")
            rho = ModuleMorphism(pre_obj, bnd.obj, y_part)
            pb = pullback(ModuleMorphism(gnext, bnd.obj,
                                         Matrix.identity(ring, gnext.generators)), rho)
            cover_rank = pb.obj.generators
            ranks[n + 1] = cover_rank
            comps[n + 1] = ModuleMorphism(free_presentation(ring, cover_rank), gnext,
                                          pb.proj1.matrix)
            step = pre @ pb.proj2.matrix
        else:
            cover_rank = pre.cols
            ranks[n + 1] = cover_rank
            comps[n + 1] = zero_morphism(free_presentation(ring, cover_rank), gnext)
            step = pre
        dmats[n + 1] = z_basis @ step
        z_basis = kernel_basis(dmats[n + 1])
    ranks = {r: k for r, k in ranks.items() if k}
    c = complex_make(ring, ranks, {r: m for r, m in dmats.items()
                                   if ranks.get(r) and ranks.get(r - 1)})
    comps = {r: f for r, f in comps.items() if ranks.get(r)}
    return FreeApproximation(c, comps)
