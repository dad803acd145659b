//! Finite bicategories given by explicit data, with exhaustive coherence
//! checks, and pseudofunctors between them.

mod io;
mod ops;
mod pseudo;
mod universe;

pub use io::{RawBicat, RawCompose, RawHom, RawCoherence};
pub use ops::{core1, op1, op2, sub_bicat_by_spec, Core1, Specification2, SubBicat};
pub use pseudo::{icon_iso, Pseudofunctor};
pub use universe::{cat_universe, locally_discrete, CatUniverse, LocallyDiscrete};

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::{check_triangle_identities, Adjunction};
use crate::error::{Error, Result};
use crate::fincat::{FinCat, Mor, Ob};
use crate::twocat::TwoCat;

/// Composites of 1-cells and both whiskering tables for one triple of objects.
type CompositionTable = (Vec<Ob>, Vec<Mor>, Vec<Mor>);

/// A 1-cell: an object of the hom-category `hom(src, tgt)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell1 {
    pub src: usize,
    pub tgt: usize,
    pub ob: Ob,
}

/// A 2-cell: a morphism of the hom-category `hom(src, tgt)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell2 {
    pub src: usize,
    pub tgt: usize,
    pub mor: Mor,
}

/// A finite bicategory.  Horizontal composition is stored as whiskering
/// tables; `None` coherence tables stand for identity cells.
#[derive(Clone, Debug)]
pub struct Bicat {
    pub objects: Vec<String>,
    homs: Vec<Arc<FinCat>>,
    units: Vec<Ob>,
    comp: Vec<Vec<Ob>>,
    lw: Vec<Vec<Mor>>,
    rw: Vec<Vec<Mor>>,
    assoc: Vec<Option<Vec<Mor>>>,
    lunit: Vec<Option<Vec<Mor>>>,
    runit: Vec<Option<Vec<Mor>>>,
}

impl PartialEq for Bicat {
    fn eq(&self, other: &Self) -> bool {
        let n = self.n();
        if self.objects != other.objects || self.units != other.units || self.homs != other.homs {
            return false;
        }
        if self.comp != other.comp || self.lw != other.lw || self.rw != other.rw {
            return false;
        }
        let quads = (0..n.pow(4)).all(|q| self.assoc_table(q) == other.assoc_table(q));
        let pairs = (0..n * n).all(|p| {
            self.unit_table(&self.lunit, p) == other.unit_table(&other.lunit, p)
                && self.unit_table(&self.runit, p) == other.unit_table(&other.runit, p)
        });
        quads && pairs
    }
}

type ComposeFn<'a> = dyn Fn(usize, usize, usize, Ob, Ob) -> Result<Ob> + Sync + 'a;
type WhiskerLeftFn<'a> = dyn Fn(usize, usize, usize, Ob, Mor) -> Result<Mor> + Sync + 'a;
type WhiskerRightFn<'a> = dyn Fn(usize, usize, usize, Mor, Ob) -> Result<Mor> + Sync + 'a;

impl Bicat {
    /// Tabulates composition from closures; coherence cells start as identities.
    pub fn strict(
        objects: Vec<String>,
        homs: Vec<Arc<FinCat>>,
        units: Vec<Ob>,
        compose: &ComposeFn<'_>,
        whisker_left: &WhiskerLeftFn<'_>,
        whisker_right: &WhiskerRightFn<'_>,
    ) -> Result<Bicat> {
        let n = objects.len();
        if homs.len() != n * n || units.len() != n {
            return Err(Error::Format("bicategory data has the wrong shape".into()));
        }
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .collect();
        let tables: Vec<Result<CompositionTable>> = triples
            .par_iter()
            .map(|&(x, y, z)| {
                let (hf, hg) = (&homs[x * n + y], &homs[y * n + z]);
                let mut comp = Vec::with_capacity(hg.num_objects() * hf.num_objects());
                for g in hg.objects() {
                    for f in hf.objects() {
                        comp.push(compose(x, y, z, g, f)?);
                    }
                }
                let mut lw = Vec::with_capacity(hg.num_objects() * hf.num_morphisms());
                for g in hg.objects() {
                    for a in hf.morphisms() {
                        lw.push(whisker_left(x, y, z, g, a)?);
                    }
                }
                let mut rw = Vec::with_capacity(hg.num_morphisms() * hf.num_objects());
                for b in hg.morphisms() {
                    for f in hf.objects() {
                        rw.push(whisker_right(x, y, z, b, f)?);
                    }
                }
                Ok((comp, lw, rw))
            })
            .collect();
        let mut comp = Vec::with_capacity(triples.len());
        let mut lw = Vec::with_capacity(triples.len());
        let mut rw = Vec::with_capacity(triples.len());
        for t in tables {
            let (c, l, r) = t?;
            comp.push(c);
            lw.push(l);
            rw.push(r);
        }
        Ok(Bicat {
            objects,
            homs,
            units,
            comp,
            lw,
            rw,
            assoc: vec![None; n.pow(4)],
            lunit: vec![None; n * n],
            runit: vec![None; n * n],
        })
    }

    /// Replaces the coherence cells by tabulated ones.
    pub fn with_coherence<A, L, R>(mut self, associator: A, left_unitor: L, right_unitor: R) -> Result<Bicat>
    where
        A: Fn(&Bicat, [usize; 4], Ob, Ob, Ob) -> Result<Mor> + Sync,
        L: Fn(&Bicat, usize, usize, Ob) -> Result<Mor> + Sync,
        R: Fn(&Bicat, usize, usize, Ob) -> Result<Mor> + Sync,
    {
        let n = self.n();
        let quads: Vec<[usize; 4]> = (0..n.pow(4)).map(|q| self.split_quad(q)).collect();
        let assoc: Vec<Result<Vec<Mor>>> = quads
            .par_iter()
            .map(|&[x, y, z, w]| {
                let mut cells = Vec::new();
                for h in self.hom(z, w).objects() {
                    for g in self.hom(y, z).objects() {
                        for f in self.hom(x, y).objects() {
                            cells.push(associator(&self, [x, y, z, w], h, g, f)?);
                        }
                    }
                }
                Ok(cells)
            })
            .collect();
        let assoc = assoc.into_iter().map(|r| r.map(Some)).collect::<Result<Vec<_>>>()?;
        let mut lunit = Vec::with_capacity(n * n);
        let mut runit = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let fs: Vec<Ob> = self.hom(x, y).objects().collect();
                lunit.push(Some(fs.iter().map(|&f| left_unitor(&self, x, y, f)).collect::<Result<Vec<_>>>()?));
                runit.push(Some(fs.iter().map(|&f| right_unitor(&self, x, y, f)).collect::<Result<Vec<_>>>()?));
            }
        }
        self.assoc = assoc;
        self.lunit = lunit;
        self.runit = runit;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.objects.len()
    }

    fn split_quad(&self, q: usize) -> [usize; 4] {
        let n = self.n();
        [q / (n * n * n), (q / (n * n)) % n, (q / n) % n, q % n]
    }

    fn triple(&self, x: usize, y: usize, z: usize) -> usize {
        let n = self.n();
        (x * n + y) * n + z
    }

    fn quad(&self, x: usize, y: usize, z: usize, w: usize) -> usize {
        let n = self.n();
        ((x * n + y) * n + z) * n + w
    }

    pub fn hom(&self, x: usize, y: usize) -> &Arc<FinCat> {
        &self.homs[x * self.n() + y]
    }

    pub fn homs(&self) -> &[Arc<FinCat>] {
        &self.homs
    }

    pub fn unit(&self, x: usize) -> Ob {
        self.units[x]
    }

    pub fn object_named(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn comp_ob(&self, x: usize, y: usize, z: usize, g: Ob, f: Ob) -> Ob {
        let nf = self.hom(x, y).num_objects();
        self.comp[self.triple(x, y, z)][g.idx() * nf + f.idx()]
    }

    /// `1_g * α`.
    pub fn lw(&self, x: usize, y: usize, z: usize, g: Ob, alpha: Mor) -> Mor {
        let m = self.hom(x, y).num_morphisms();
        self.lw[self.triple(x, y, z)][g.idx() * m + alpha.idx()]
    }

    /// `β * 1_f`.
    pub fn rw(&self, x: usize, y: usize, z: usize, beta: Mor, f: Ob) -> Mor {
        let nf = self.hom(x, y).num_objects();
        self.rw[self.triple(x, y, z)][beta.idx() * nf + f.idx()]
    }

    /// `β * α = (β * 1) ∘ (1 * α)`.
    pub fn hcomp_mor(&self, x: usize, y: usize, z: usize, beta: Mor, alpha: Mor) -> Mor {
        let (hf, hg) = (self.hom(x, y), self.hom(y, z));
        let left = self.lw(x, y, z, hg.src(beta), alpha);
        let right = self.rw(x, y, z, beta, hf.tgt(alpha));
        self.hom(x, z).compose(right, left)
    }

    fn assoc_table(&self, q: usize) -> Option<&Vec<Mor>> {
        self.assoc[q].as_ref()
    }

    fn unit_table<'a>(&self, t: &'a [Option<Vec<Mor>>], p: usize) -> Option<&'a Vec<Mor>> {
        t[p].as_ref()
    }

    /// `a_{h,g,f}: (h g) f ⇒ h (g f)`.
    #[allow(clippy::too_many_arguments)]
    pub fn assoc(&self, x: usize, y: usize, z: usize, w: usize, h: Ob, g: Ob, f: Ob) -> Mor {
        match &self.assoc[self.quad(x, y, z, w)] {
            Some(t) => {
                let (ng, nf) = (self.hom(y, z).num_objects(), self.hom(x, y).num_objects());
                t[(h.idx() * ng + g.idx()) * nf + f.idx()]
            }
            None => {
                let hg = self.comp_ob(y, z, w, h, g);
                self.hom(x, w).id(self.comp_ob(x, y, w, hg, f))
            }
        }
    }

    /// `λ_f: 1 ∘ f ⇒ f`.
    pub fn lunit(&self, x: usize, y: usize, f: Ob) -> Mor {
        match &self.lunit[x * self.n() + y] {
            Some(t) => t[f.idx()],
            None => self.hom(x, y).id(f),
        }
    }

    /// `ρ_f: f ∘ 1 ⇒ f`.
    pub fn runit(&self, x: usize, y: usize, f: Ob) -> Mor {
        match &self.runit[x * self.n() + y] {
            Some(t) => t[f.idx()],
            None => self.hom(x, y).id(f),
        }
    }

    /// Whether all coherence cells are stored as identities.
    pub fn has_identity_coherence(&self) -> bool {
        self.assoc.iter().all(Option::is_none)
            && self.lunit.iter().all(Option::is_none)
            && self.runit.iter().all(Option::is_none)
    }

    pub fn cell1(&self, x: usize, y: usize, f: Ob) -> Cell1 {
        Cell1 { src: x, tgt: y, ob: f }
    }

    pub fn cell2(&self, x: usize, y: usize, m: Mor) -> Cell2 {
        Cell2 { src: x, tgt: y, mor: m }
    }

    pub fn cell1_named(&self, x: usize, y: usize, name: &str) -> Result<Cell1> {
        Ok(self.cell1(x, y, self.hom(x, y).ob_named(name)?))
    }

    pub fn one_cells(&self) -> impl Iterator<Item = Cell1> + '_ {
        let n = self.n();
        (0..n).flat_map(move |x| {
            (0..n).flat_map(move |y| self.hom(x, y).objects().map(move |f| Cell1 { src: x, tgt: y, ob: f }))
        })
    }

    pub fn two_cells(&self) -> impl Iterator<Item = Cell2> + '_ {
        let n = self.n();
        (0..n).flat_map(move |x| {
            (0..n).flat_map(move |y| self.hom(x, y).morphisms().map(move |m| Cell2 { src: x, tgt: y, mor: m }))
        })
    }

    pub fn name1(&self, f: &Cell1) -> String {
        format!(
            "{} : {} -> {}",
            self.hom(f.src, f.tgt).ob_name(f.ob),
            self.objects[f.src],
            self.objects[f.tgt]
        )
    }

    pub fn name2(&self, a: &Cell2) -> String {
        format!(
            "{} in hom({}, {})",
            self.hom(a.src, a.tgt).mor_name(a.mor),
            self.objects[a.src],
            self.objects[a.tgt]
        )
    }

    pub fn num_one_cells(&self) -> usize {
        self.homs.iter().map(|h| h.num_objects()).sum()
    }

    pub fn num_two_cells(&self) -> usize {
        self.homs.iter().map(|h| h.num_morphisms()).sum()
    }

    /// Checks every bicategory axiom exhaustively; the first failure in
    /// canonical order is reported.
    pub fn validate(&self) -> Result<()> {
        self.check_composition()?;
        self.check_coherence_cells()?;
        self.check_pentagon()?;
        self.check_triangle()
    }

    fn triples(&self) -> Vec<(usize, usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .collect()
    }

    fn quads(&self) -> Vec<[usize; 4]> {
        (0..self.n().pow(4)).map(|q| self.split_quad(q)).collect()
    }

    fn check_composition(&self) -> Result<()> {
        let fail = |what: String| Err(Error::CoherenceFailure(what));
        for x in 0..self.n() {
            if self.units[x].idx() >= self.hom(x, x).num_objects() {
                return fail(format!("unit of `{}` is not a 1-cell", self.objects[x]));
            }
        }
        let found = self.triples().par_iter().find_map_first(|&(x, y, z)| {
            let (hf, hg, hgf) = (self.hom(x, y), self.hom(y, z), self.hom(x, z));
            let name = |what: &str| {
                format!(
                    "{what} over {} -> {} -> {}",
                    self.objects[x], self.objects[y], self.objects[z]
                )
            };
            for g in hg.objects() {
                for a in hf.morphisms() {
                    let m = self.lw(x, y, z, g, a);
                    if hgf.src(m) != self.comp_ob(x, y, z, g, hf.src(a))
                        || hgf.tgt(m) != self.comp_ob(x, y, z, g, hf.tgt(a))
                    {
                        return Some(name("left whiskering has the wrong endpoints"));
                    }
                }
                for f in hf.objects() {
                    if !hgf.is_identity(self.lw(x, y, z, g, hf.id(f))) {
                        return Some(name("left whiskering does not preserve identities"));
                    }
                }
                for (a2, a1) in hf.composable_pairs() {
                    let lhs = self.lw(x, y, z, g, hf.compose(a2, a1));
                    let rhs = hgf.compose(self.lw(x, y, z, g, a2), self.lw(x, y, z, g, a1));
                    if lhs != rhs {
                        return Some(name("left whiskering does not preserve composites"));
                    }
                }
            }
            for f in hf.objects() {
                for b in hg.morphisms() {
                    let m = self.rw(x, y, z, b, f);
                    if hgf.src(m) != self.comp_ob(x, y, z, hg.src(b), f)
                        || hgf.tgt(m) != self.comp_ob(x, y, z, hg.tgt(b), f)
                    {
                        return Some(name("right whiskering has the wrong endpoints"));
                    }
                }
                for g in hg.objects() {
                    if !hgf.is_identity(self.rw(x, y, z, hg.id(g), f)) {
                        return Some(name("right whiskering does not preserve identities"));
                    }
                }
                for (b2, b1) in hg.composable_pairs() {
                    let lhs = self.rw(x, y, z, hg.compose(b2, b1), f);
                    let rhs = hgf.compose(self.rw(x, y, z, b2, f), self.rw(x, y, z, b1, f));
                    if lhs != rhs {
                        return Some(name("right whiskering does not preserve composites"));
                    }
                }
            }
            for b in hg.morphisms() {
                for a in hf.morphisms() {
                    let one = hgf.compose(self.rw(x, y, z, b, hf.tgt(a)), self.lw(x, y, z, hg.src(b), a));
                    let two = hgf.compose(self.lw(x, y, z, hg.tgt(b), a), self.rw(x, y, z, b, hf.src(a)));
                    if one != two {
                        return Some(name(&format!(
                            "interchange fails for `{}` and `{}`",
                            hg.mor_name(b),
                            hf.mor_name(a)
                        )));
                    }
                }
            }
            None
        });
        match found {
            Some(msg) => fail(msg),
            None => Ok(()),
        }
    }

    fn check_coherence_cells(&self) -> Result<()> {
        let found = self.quads().par_iter().find_map_first(|&[x, y, z, w]| {
            let (hf, hg, hh, hw) = (self.hom(x, y), self.hom(y, z), self.hom(z, w), self.hom(x, w));
            for h in hh.objects() {
                for g in hg.objects() {
                    let hg_ = self.comp_ob(y, z, w, h, g);
                    for f in hf.objects() {
                        let a = self.assoc(x, y, z, w, h, g, f);
                        let gf = self.comp_ob(x, y, z, g, f);
                        let cell = || {
                            format!(
                                "associator at ({}, {}, {})",
                                hh.ob_name(h),
                                hg.ob_name(g),
                                hf.ob_name(f)
                            )
                        };
                        if !hw.is_iso(a) {
                            return Some(Error::NonInvertibleCoherence(cell()));
                        }
                        if hw.src(a) != self.comp_ob(x, y, w, hg_, f) || hw.tgt(a) != self.comp_ob(x, z, w, h, gf) {
                            return Some(Error::CoherenceFailure(format!("{} has the wrong boundary", cell())));
                        }
                    }
                }
            }
            // naturality in f
            for h in hh.objects() {
                for g in hg.objects() {
                    let hg_ = self.comp_ob(y, z, w, h, g);
                    for al in hf.morphisms() {
                        let (f, f2) = (hf.src(al), hf.tgt(al));
                        let lhs = hw.compose(self.assoc(x, y, z, w, h, g, f2), self.lw(x, y, w, hg_, al));
                        let inner = self.lw(x, y, z, g, al);
                        let rhs = hw.compose(self.lw(x, z, w, h, inner), self.assoc(x, y, z, w, h, g, f));
                        if lhs != rhs {
                            return Some(Error::CoherenceFailure(format!(
                                "associator not natural in `{}`",
                                hf.mor_name(al)
                            )));
                        }
                    }
                }
            }
            // naturality in g
            for h in hh.objects() {
                for be in hg.morphisms() {
                    let (g, g2) = (hg.src(be), hg.tgt(be));
                    for f in hf.objects() {
                        let outer = self.lw(y, z, w, h, be);
                        let lhs = hw.compose(self.assoc(x, y, z, w, h, g2, f), self.rw(x, y, w, outer, f));
                        let inner = self.rw(x, y, z, be, f);
                        let rhs = hw.compose(self.lw(x, z, w, h, inner), self.assoc(x, y, z, w, h, g, f));
                        if lhs != rhs {
                            return Some(Error::CoherenceFailure(format!(
                                "associator not natural in `{}`",
                                hg.mor_name(be)
                            )));
                        }
                    }
                }
            }
            // naturality in h
            for ga in hh.morphisms() {
                let (h, h2) = (hh.src(ga), hh.tgt(ga));
                for g in hg.objects() {
                    for f in hf.objects() {
                        let gf = self.comp_ob(x, y, z, g, f);
                        let outer = self.rw(y, z, w, ga, g);
                        let lhs = hw.compose(self.assoc(x, y, z, w, h2, g, f), self.rw(x, y, w, outer, f));
                        let rhs = hw.compose(self.rw(x, z, w, ga, gf), self.assoc(x, y, z, w, h, g, f));
                        if lhs != rhs {
                            return Some(Error::CoherenceFailure(format!(
                                "associator not natural in `{}`",
                                hh.mor_name(ga)
                            )));
                        }
                    }
                }
            }
            None
        });
        if let Some(e) = found {
            return Err(e);
        }
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                let h = self.hom(x, y);
                for f in h.objects() {
                    let (l, r) = (self.lunit(x, y, f), self.runit(x, y, f));
                    let name = h.ob_name(f);
                    if h.src(l) != self.comp_ob(x, y, y, self.unit(y), f) || h.tgt(l) != f {
                        return Err(Error::CoherenceFailure(format!("left unitor at `{name}` has the wrong boundary")));
                    }
                    if h.src(r) != self.comp_ob(x, x, y, f, self.unit(x)) || h.tgt(r) != f {
                        return Err(Error::CoherenceFailure(format!("right unitor at `{name}` has the wrong boundary")));
                    }
                    if !h.is_iso(l) {
                        return Err(Error::NonInvertibleCoherence(format!("left unitor at `{name}`")));
                    }
                    if !h.is_iso(r) {
                        return Err(Error::NonInvertibleCoherence(format!("right unitor at `{name}`")));
                    }
                }
                for al in h.morphisms() {
                    let (f, f2) = (h.src(al), h.tgt(al));
                    let l1 = h.compose(self.lunit(x, y, f2), self.lw(x, y, y, self.unit(y), al));
                    let l2 = h.compose(al, self.lunit(x, y, f));
                    let r1 = h.compose(self.runit(x, y, f2), self.rw(x, x, y, al, self.unit(x)));
                    let r2 = h.compose(al, self.runit(x, y, f));
                    if l1 != l2 || r1 != r2 {
                        return Err(Error::CoherenceFailure(format!(
                            "unitors not natural in `{}`",
                            h.mor_name(al)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_pentagon(&self) -> Result<()> {
        if self.assoc.iter().all(Option::is_none) {
            // identity associators on a strictly associative composition
            return Ok(());
        }
        let n = self.n();
        let tuples: Vec<[usize; 5]> = (0..n.pow(5))
            .map(|t| [t / n.pow(4), (t / n.pow(3)) % n, (t / (n * n)) % n, (t / n) % n, t % n])
            .collect();
        let found = tuples.par_iter().find_map_first(|&[v, w, x, y, z]| {
            let (hf, hg, hh, hk) = (self.hom(v, w), self.hom(w, x), self.hom(x, y), self.hom(y, z));
            let target = self.hom(v, z);
            for k in hk.objects() {
                for h in hh.objects() {
                    let kh = self.comp_ob(x, y, z, k, h);
                    for g in hg.objects() {
                        let hg_ = self.comp_ob(w, x, y, h, g);
                        let khg = self.comp_ob(w, x, z, kh, g);
                        let a_khg = self.assoc(w, x, y, z, k, h, g);
                        for f in hf.objects() {
                            let gf = self.comp_ob(v, w, x, g, f);
                            let step1 = self.rw(v, w, z, a_khg, f);
                            let step2 = self.assoc(v, w, y, z, k, hg_, f);
                            let step3 = self.lw(v, y, z, k, self.assoc(v, w, x, y, h, g, f));
                            let lhs = target.compose(step3, target.compose(step2, step1));
                            let rhs = target.compose(
                                self.assoc(v, x, y, z, k, h, gf),
                                self.assoc(v, w, x, z, kh, g, f),
                            );
                            let _ = khg;
                            if lhs != rhs {
                                return Some(format!(
                                    "({}, {}, {}, {})",
                                    hk.ob_name(k),
                                    hh.ob_name(h),
                                    hg.ob_name(g),
                                    hf.ob_name(f)
                                ));
                            }
                        }
                    }
                }
            }
            None
        });
        match found {
            Some(q) => Err(Error::PentagonFailure(q)),
            None => Ok(()),
        }
    }

    fn check_triangle(&self) -> Result<()> {
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (hf, hg, h) = (self.hom(x, y), self.hom(y, z), self.hom(x, z));
                    for g in hg.objects() {
                        for f in hf.objects() {
                            let lhs = h.compose(
                                self.lw(x, y, z, g, self.lunit(x, y, f)),
                                self.assoc(x, y, y, z, g, self.unit(y), f),
                            );
                            let rhs = self.rw(x, y, z, self.runit(y, z, g), f);
                            if lhs != rhs {
                                return Err(Error::TriangleFailure(format!(
                                    "({}, {})",
                                    hg.ob_name(g),
                                    hf.ob_name(f)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Overwrites one associator component; used to exercise the validator.
    #[allow(clippy::too_many_arguments)]
    pub fn perturb_associator(&mut self, x: usize, y: usize, z: usize, w: usize, h: Ob, g: Ob, f: Ob, cell: Mor) {
        let q = self.quad(x, y, z, w);
        let (ng, nf) = (self.hom(y, z).num_objects(), self.hom(x, y).num_objects());
        let (nh, idx) = (self.hom(z, w).num_objects(), (h.idx() * ng + g.idx()) * nf + f.idx());
        if self.assoc[q].is_none() {
            let mut t = Vec::with_capacity(nh * ng * nf);
            for h2 in 0..nh as u32 {
                for g2 in 0..ng as u32 {
                    for f2 in 0..nf as u32 {
                        t.push(self.assoc(x, y, z, w, Ob(h2), Ob(g2), Ob(f2)));
                    }
                }
            }
            self.assoc[q] = Some(t);
        }
        self.assoc[q].as_mut().expect("table")[idx] = cell;
    }

    /// All adjunctions `f ⊣ r` in canonical order of `(r, unit, counit)`.
    pub fn right_adjoints(&self, f: &Cell1) -> Vec<Adjunction<Bicat>> {
        let (x, y) = (f.src, f.tgt);
        let mut out = Vec::new();
        let hxx = self.hom(x, x);
        let hyy = self.hom(y, y);
        for r in self.hom(y, x).objects() {
            let rf = self.comp_ob(x, y, x, r, f.ob);
            let fr = self.comp_ob(y, x, y, f.ob, r);
            for &eta in hxx.hom(self.unit(x), rf) {
                for &eps in hyy.hom(fr, self.unit(y)) {
                    let adj = Adjunction {
                        left: *f,
                        right: self.cell1(y, x, r),
                        unit: self.cell2(x, x, eta),
                        counit: self.cell2(y, y, eps),
                    };
                    if check_triangle_identities(self, &adj).map(|t| t.holds()).unwrap_or(false) {
                        out.push(adj);
                    }
                }
            }
        }
        out
    }
}

impl TwoCat for Bicat {
    type Obj = usize;
    type One = Cell1;
    type Two = Cell2;

    fn src(&self, f: &Cell1) -> usize {
        f.src
    }

    fn tgt(&self, f: &Cell1) -> usize {
        f.tgt
    }

    fn identity(&self, x: &usize) -> Cell1 {
        self.cell1(*x, *x, self.unit(*x))
    }

    fn compose(&self, g: &Cell1, f: &Cell1) -> Result<Cell1> {
        if f.tgt != g.src {
            return Err(Error::BoundaryMismatch(format!(
                "cannot compose `{}` after `{}`",
                self.name1(g),
                self.name1(f)
            )));
        }
        Ok(self.cell1(f.src, g.tgt, self.comp_ob(f.src, f.tgt, g.tgt, g.ob, f.ob)))
    }

    fn two_src(&self, a: &Cell2) -> Cell1 {
        self.cell1(a.src, a.tgt, self.hom(a.src, a.tgt).src(a.mor))
    }

    fn two_tgt(&self, a: &Cell2) -> Cell1 {
        self.cell1(a.src, a.tgt, self.hom(a.src, a.tgt).tgt(a.mor))
    }

    fn id2(&self, f: &Cell1) -> Cell2 {
        self.cell2(f.src, f.tgt, self.hom(f.src, f.tgt).id(f.ob))
    }

    fn vcomp(&self, b: &Cell2, a: &Cell2) -> Result<Cell2> {
        let h = self.hom(a.src, a.tgt);
        if (a.src, a.tgt) != (b.src, b.tgt) || h.tgt(a.mor) != h.src(b.mor) {
            return Err(Error::BoundaryMismatch(format!(
                "cannot stack `{}` on `{}`",
                self.name2(b),
                self.name2(a)
            )));
        }
        Ok(self.cell2(a.src, a.tgt, h.compose(b.mor, a.mor)))
    }

    fn hcomp(&self, b: &Cell2, a: &Cell2) -> Result<Cell2> {
        if a.tgt != b.src {
            return Err(Error::BoundaryMismatch(format!(
                "cannot paste `{}` after `{}`",
                self.name2(b),
                self.name2(a)
            )));
        }
        Ok(self.cell2(a.src, b.tgt, self.hcomp_mor(a.src, a.tgt, b.tgt, b.mor, a.mor)))
    }

    fn associator(&self, h: &Cell1, g: &Cell1, f: &Cell1) -> Result<Cell2> {
        if f.tgt != g.src || g.tgt != h.src {
            return Err(Error::BoundaryMismatch("associator of non-composable 1-cells".into()));
        }
        Ok(self.cell2(f.src, h.tgt, self.assoc(f.src, g.src, h.src, h.tgt, h.ob, g.ob, f.ob)))
    }

    fn left_unitor(&self, f: &Cell1) -> Cell2 {
        self.cell2(f.src, f.tgt, self.lunit(f.src, f.tgt, f.ob))
    }

    fn right_unitor(&self, f: &Cell1) -> Cell2 {
        self.cell2(f.src, f.tgt, self.runit(f.src, f.tgt, f.ob))
    }

    fn inverse(&self, a: &Cell2) -> Option<Cell2> {
        self.hom(a.src, a.tgt).inverse(a.mor).map(|m| self.cell2(a.src, a.tgt, m))
    }

    fn difference(&self, a: &Cell2, b: &Cell2) -> Option<String> {
        (a != b).then(|| format!("`{}` differs from `{}`", self.name2(a), self.name2(b)))
    }

    fn non_invertible_witness(&self, a: &Cell2) -> Option<String> {
        (!self.is_invertible(a)).then(|| format!("`{}` is not invertible", self.name2(a)))
    }

    fn find_right_adjoint(&self, f: &Cell1) -> Result<Adjunction<Bicat>> {
        self.right_adjoints(f)
            .into_iter()
            .next()
            .ok_or_else(|| Error::NoAdjoint(self.name1(f)))
    }
}

#[cfg(test)]
mod tests;
