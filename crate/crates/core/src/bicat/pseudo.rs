use std::sync::Arc;

use rayon::prelude::*;

use super::{Bicat, Cell1, Cell2};
use crate::error::{Error, Result};
use crate::fincat::{same_cat, Functor, Mor, Ob};

/// A pseudofunctor between finite bicategories.
#[derive(Clone, Debug)]
pub struct Pseudofunctor {
    pub source: Arc<Bicat>,
    pub target: Arc<Bicat>,
    pub ob_map: Vec<usize>,
    /// `hom(x, y) → hom(Fx, Fy)`, indexed by source pair.
    pub hom_maps: Vec<Functor>,
    /// Per source triple, `F g ∘ F f ⇒ F(g f)` indexed by `(g, f)`.
    compositor: Vec<Vec<Mor>>,
    /// Per source object, `1 ⇒ F(1)`.
    unitor: Vec<Mor>,
}

impl PartialEq for Pseudofunctor {
    fn eq(&self, other: &Self) -> bool {
        self.ob_map == other.ob_map
            && self.hom_maps == other.hom_maps
            && self.compositor == other.compositor
            && self.unitor == other.unitor
    }
}

type CompositorFn<'a> = dyn Fn(usize, usize, usize, Ob, Ob) -> Result<Mor> + Sync + 'a;

impl Pseudofunctor {
    /// Tabulates the coherence cells; nothing is checked beyond shapes.
    pub fn tabulate(
        source: Arc<Bicat>,
        target: Arc<Bicat>,
        ob_map: Vec<usize>,
        hom_maps: Vec<Functor>,
        compositor: &CompositorFn<'_>,
        unitor: &(dyn Fn(usize) -> Result<Mor> + Sync),
    ) -> Result<Pseudofunctor> {
        let n = source.n();
        if ob_map.len() != n || hom_maps.len() != n * n || ob_map.iter().any(|&y| y >= target.n()) {
            return Err(Error::Format("pseudofunctor data has the wrong shape".into()));
        }
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .collect();
        let comp: Vec<Result<Vec<Mor>>> = triples
            .par_iter()
            .map(|&(x, y, z)| {
                let mut cells = Vec::new();
                for g in source.hom(y, z).objects() {
                    for f in source.hom(x, y).objects() {
                        cells.push(compositor(x, y, z, g, f)?);
                    }
                }
                Ok(cells)
            })
            .collect();
        let compositor = comp.into_iter().collect::<Result<Vec<_>>>()?;
        let unitor = (0..n).map(unitor).collect::<Result<Vec<_>>>()?;
        Ok(Pseudofunctor {
            source,
            target,
            ob_map,
            hom_maps,
            compositor,
            unitor,
        })
    }

    pub fn identity(b: &Arc<Bicat>) -> Pseudofunctor {
        let n = b.n();
        let hom_maps = (0..n * n).map(|p| Functor::identity(&b.homs()[p])).collect();
        Pseudofunctor::tabulate(
            b.clone(),
            b.clone(),
            (0..n).collect(),
            hom_maps,
            &|x, y, z, g, f| Ok(b.hom(x, z).id(b.comp_ob(x, y, z, g, f))),
            &|x| Ok(b.hom(x, x).id(b.unit(x))),
        )
        .expect("identity pseudofunctor")
    }

    pub fn hom_map(&self, x: usize, y: usize) -> &Functor {
        &self.hom_maps[x * self.source.n() + y]
    }

    pub fn apply1(&self, f: &Cell1) -> Cell1 {
        Cell1 {
            src: self.ob_map[f.src],
            tgt: self.ob_map[f.tgt],
            ob: self.hom_map(f.src, f.tgt).ob(f.ob),
        }
    }

    pub fn apply2(&self, a: &Cell2) -> Cell2 {
        Cell2 {
            src: self.ob_map[a.src],
            tgt: self.ob_map[a.tgt],
            mor: self.hom_map(a.src, a.tgt).mor(a.mor),
        }
    }

    /// `F g ∘ F f ⇒ F(g f)` in `hom(Fx, Fz)`.
    pub fn compositor(&self, x: usize, y: usize, z: usize, g: Ob, f: Ob) -> Mor {
        let n = self.source.n();
        let nf = self.source.hom(x, y).num_objects();
        self.compositor[(x * n + y) * n + z][g.idx() * nf + f.idx()]
    }

    /// `1 ⇒ F(1_x)` in `hom(Fx, Fx)`.
    pub fn unitor(&self, x: usize) -> Mor {
        self.unitor[x]
    }

    /// Overwrites one compositor component; used to exercise the validator.
    pub fn perturb_compositor(&mut self, x: usize, y: usize, z: usize, g: Ob, f: Ob, cell: Mor) {
        let n = self.source.n();
        let nf = self.source.hom(x, y).num_objects();
        self.compositor[(x * n + y) * n + z][g.idx() * nf + f.idx()] = cell;
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Pseudofunctor) -> Result<Pseudofunctor> {
        if !Arc::ptr_eq(&inner.target, &self.source) && *inner.target != *self.source {
            return Err(Error::BoundaryMismatch("pseudofunctors are not composable".into()));
        }
        let n = inner.source.n();
        let mut hom_maps = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let outer = self.hom_map(inner.ob_map[x], inner.ob_map[y]);
                hom_maps.push(outer.after(inner.hom_map(x, y))?);
            }
        }
        let ob_map = inner.ob_map.iter().map(|&x| self.ob_map[x]).collect();
        let k = &self.target;
        Pseudofunctor::tabulate(
            inner.source.clone(),
            self.target.clone(),
            ob_map,
            hom_maps,
            &|x, y, z, g, f| {
                let (fx, fy, fz) = (inner.ob_map[x], inner.ob_map[y], inner.ob_map[z]);
                let fg = inner.hom_map(y, z).ob(g);
                let ff = inner.hom_map(x, y).ob(f);
                let outer = self.compositor(fx, fy, fz, fg, ff);
                let lifted = self.hom_map(fx, fz).mor(inner.compositor(x, y, z, g, f));
                Ok(k.hom(self.ob_map[fx], self.ob_map[fz]).compose(lifted, outer))
            },
            &|x| {
                let fx = inner.ob_map[x];
                let lifted = self.hom_map(fx, fx).mor(inner.unitor(x));
                Ok(k.hom(self.ob_map[fx], self.ob_map[fx]).compose(lifted, self.unitor(fx)))
            },
        )
    }

    /// Checks functoriality on homs and every coherence law exhaustively.
    pub fn validate(&self) -> Result<()> {
        let (b, k) = (&self.source, &self.target);
        let n = b.n();
        let fail = |what: String| Err(Error::CoherenceFailure(what));
        for x in 0..n {
            for y in 0..n {
                let h = self.hom_map(x, y);
                if !same_cat(&h.source, b.hom(x, y)) || !same_cat(&h.target, k.hom(self.ob_map[x], self.ob_map[y])) {
                    return fail(format!(
                        "hom functor for ({}, {}) has the wrong boundary",
                        b.objects[x], b.objects[y]
                    ));
                }
                h.validate()?;
            }
        }
        for x in 0..n {
            let kx = self.ob_map[x];
            let hom = k.hom(kx, kx);
            let u = self.unitor(x);
            if hom.src(u) != k.unit(kx) || hom.tgt(u) != self.hom_map(x, x).ob(b.unit(x)) {
                return fail(format!("unitor at `{}` has the wrong boundary", b.objects[x]));
            }
            if !hom.is_iso(u) {
                return fail(format!("unitor at `{}` is not invertible", b.objects[x]));
            }
        }
        let triples: Vec<(usize, usize, usize)> = (0..n)
            .flat_map(|x| (0..n).flat_map(move |y| (0..n).map(move |z| (x, y, z))))
            .collect();
        let found = triples.par_iter().find_map_first(|&(x, y, z)| self.check_triple(x, y, z));
        if let Some(msg) = found {
            return fail(msg);
        }
        let quads: Vec<[usize; 4]> = (0..n.pow(4))
            .map(|q| [q / (n * n * n), (q / (n * n)) % n, (q / n) % n, q % n])
            .collect();
        let found = quads.par_iter().find_map_first(|&q| self.check_hexagon(q));
        if let Some(msg) = found {
            return fail(msg);
        }
        for x in 0..n {
            for y in 0..n {
                if let Some(msg) = self.check_unit_squares(x, y) {
                    return fail(msg);
                }
            }
        }
        Ok(())
    }

    fn check_triple(&self, x: usize, y: usize, z: usize) -> Option<String> {
        let (b, k) = (&self.source, &self.target);
        let (kx, ky, kz) = (self.ob_map[x], self.ob_map[y], self.ob_map[z]);
        let (hf, hg) = (b.hom(x, y), b.hom(y, z));
        let hk = k.hom(kx, kz);
        let (ff, fg, fgf) = (self.hom_map(x, y), self.hom_map(y, z), self.hom_map(x, z));
        for g in hg.objects() {
            for f in hf.objects() {
                let c = self.compositor(x, y, z, g, f);
                let name = || format!("compositor at ({}, {})", hg.ob_name(g), hf.ob_name(f));
                if hk.src(c) != k.comp_ob(kx, ky, kz, fg.ob(g), ff.ob(f))
                    || hk.tgt(c) != fgf.ob(b.comp_ob(x, y, z, g, f))
                {
                    return Some(format!("{} has the wrong boundary", name()));
                }
                if !hk.is_iso(c) {
                    return Some(format!("{} is not invertible", name()));
                }
            }
        }
        for g in hg.objects() {
            for a in hf.morphisms() {
                let (f, f2) = (hf.src(a), hf.tgt(a));
                let lhs = hk.compose(self.compositor(x, y, z, g, f2), k.lw(kx, ky, kz, fg.ob(g), ff.mor(a)));
                let rhs = hk.compose(fgf.mor(b.lw(x, y, z, g, a)), self.compositor(x, y, z, g, f));
                if lhs != rhs {
                    return Some(format!("compositor not natural in `{}`", hf.mor_name(a)));
                }
            }
        }
        for be in hg.morphisms() {
            for f in hf.objects() {
                let (g, g2) = (hg.src(be), hg.tgt(be));
                let lhs = hk.compose(self.compositor(x, y, z, g2, f), k.rw(kx, ky, kz, fg.mor(be), ff.ob(f)));
                let rhs = hk.compose(fgf.mor(b.rw(x, y, z, be, f)), self.compositor(x, y, z, g, f));
                if lhs != rhs {
                    return Some(format!("compositor not natural in `{}`", hg.mor_name(be)));
                }
            }
        }
        None
    }

    fn check_hexagon(&self, [x, y, z, w]: [usize; 4]) -> Option<String> {
        let (b, k) = (&self.source, &self.target);
        let (kx, ky, kz, kw) = (self.ob_map[x], self.ob_map[y], self.ob_map[z], self.ob_map[w]);
        let hk = k.hom(kx, kw);
        let (hf, hg, hh) = (b.hom(x, y), b.hom(y, z), b.hom(z, w));
        for h in hh.objects() {
            let fh = self.hom_map(z, w).ob(h);
            for g in hg.objects() {
                let fg = self.hom_map(y, z).ob(g);
                let hg_ = b.comp_ob(y, z, w, h, g);
                let phi_hg = self.compositor(y, z, w, h, g);
                for f in hf.objects() {
                    let ff = self.hom_map(x, y).ob(f);
                    let gf = b.comp_ob(x, y, z, g, f);
                    let lhs = hk.compose_path(&[
                        k.rw(kx, ky, kw, phi_hg, ff),
                        self.compositor(x, y, w, hg_, f),
                        self.hom_map(x, w).mor(b.assoc(x, y, z, w, h, g, f)),
                    ]);
                    let rhs = hk.compose_path(&[
                        k.assoc(kx, ky, kz, kw, fh, fg, ff),
                        k.lw(kx, kz, kw, fh, self.compositor(x, y, z, g, f)),
                        self.compositor(x, z, w, h, gf),
                    ]);
                    if lhs != rhs {
                        return Some(format!(
                            "associativity hexagon fails at ({}, {}, {})",
                            hh.ob_name(h),
                            hg.ob_name(g),
                            hf.ob_name(f)
                        ));
                    }
                }
            }
        }
        None
    }

    fn check_unit_squares(&self, x: usize, y: usize) -> Option<String> {
        let (b, k) = (&self.source, &self.target);
        let (kx, ky) = (self.ob_map[x], self.ob_map[y]);
        let hk = k.hom(kx, ky);
        let hf = b.hom(x, y);
        let fm = self.hom_map(x, y);
        for f in hf.objects() {
            let ff = fm.ob(f);
            let left = hk.compose_path(&[
                k.rw(kx, ky, ky, self.unitor(y), ff),
                self.compositor(x, y, y, b.unit(y), f),
                fm.mor(b.lunit(x, y, f)),
            ]);
            if left != k.lunit(kx, ky, ff) {
                return Some(format!("left unit square fails at `{}`", hf.ob_name(f)));
            }
            let right = hk.compose_path(&[
                k.lw(kx, kx, ky, ff, self.unitor(x)),
                self.compositor(x, x, y, f, b.unit(x)),
                fm.mor(b.runit(x, y, f)),
            ]);
            if right != k.runit(kx, ky, ff) {
                return Some(format!("right unit square fails at `{}`", hf.ob_name(f)));
            }
        }
        None
    }
}

/// An invertible icon between pseudofunctors with the same object map:
/// components `F f ⇒ G f` for every 1-cell, natural in 2-cells and
/// compatible with compositors and unitors.  Found by backtracking.
pub fn icon_iso(f: &Pseudofunctor, g: &Pseudofunctor) -> Option<Vec<Cell2>> {
    if f.ob_map != g.ob_map || *f.source != *g.source || *f.target != *g.target {
        return None;
    }
    let (b, k) = (&f.source, &f.target);
    let cells: Vec<Cell1> = b.one_cells().collect();
    let index: std::collections::HashMap<Cell1, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let candidates: Vec<Vec<Mor>> = cells
        .iter()
        .map(|c| {
            let (fc, gc) = (f.apply1(c), g.apply1(c));
            let hom = k.hom(fc.src, fc.tgt);
            hom.hom(fc.ob, gc.ob).iter().copied().filter(|&m| hom.is_iso(m)).collect()
        })
        .collect();
    // constraints are checked once their last cell is assigned
    let mut checks: Vec<Vec<Constraint>> = vec![Vec::new(); cells.len()];
    for a in b.two_cells() {
        let (s, t) = (index[&b.cell1(a.src, a.tgt, b.hom(a.src, a.tgt).src(a.mor))], index[&b.cell1(a.src, a.tgt, b.hom(a.src, a.tgt).tgt(a.mor))]);
        checks[s.max(t)].push(Constraint::Natural(a));
    }
    let n = b.n();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for gg in b.hom(y, z).objects() {
                    for ff in b.hom(x, y).objects() {
                        let i = index[&b.cell1(y, z, gg)];
                        let j = index[&b.cell1(x, y, ff)];
                        let l = index[&b.cell1(x, z, b.comp_ob(x, y, z, gg, ff))];
                        checks[i.max(j).max(l)].push(Constraint::Compositor(x, y, z, gg, ff));
                    }
                }
            }
        }
        checks[index[&b.cell1(x, x, b.unit(x))]].push(Constraint::Unit(x));
    }
    let mut chosen: Vec<Mor> = Vec::with_capacity(cells.len());
    let ctx = IconSearch { f, g, b, k, cells: &cells, index: &index, candidates: &candidates, checks: &checks };
    if ctx.search(&mut chosen) {
        Some(
            cells
                .iter()
                .zip(chosen)
                .map(|(c, m)| Cell2 { src: f.ob_map[c.src], tgt: f.ob_map[c.tgt], mor: m })
                .collect(),
        )
    } else {
        None
    }
}

#[derive(Clone, Debug)]
enum Constraint {
    Natural(Cell2),
    Compositor(usize, usize, usize, Ob, Ob),
    Unit(usize),
}

struct IconSearch<'a> {
    f: &'a Pseudofunctor,
    g: &'a Pseudofunctor,
    b: &'a Bicat,
    k: &'a Bicat,
    cells: &'a [Cell1],
    index: &'a std::collections::HashMap<Cell1, usize>,
    candidates: &'a [Vec<Mor>],
    checks: &'a [Vec<Constraint>],
}

impl IconSearch<'_> {
    fn search(&self, chosen: &mut Vec<Mor>) -> bool {
        let i = chosen.len();
        if i == self.cells.len() {
            return true;
        }
        for &m in &self.candidates[i] {
            chosen.push(m);
            if self.checks[i].iter().all(|c| self.holds(c, chosen)) && self.search(chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn holds(&self, c: &Constraint, chosen: &[Mor]) -> bool {
        let (b, k, f, g) = (self.b, self.k, self.f, self.g);
        let theta = |cell: Cell1| chosen[self.index[&cell]];
        match *c {
            Constraint::Natural(a) => {
                let hom = b.hom(a.src, a.tgt);
                let (s, t) = (b.cell1(a.src, a.tgt, hom.src(a.mor)), b.cell1(a.src, a.tgt, hom.tgt(a.mor)));
                let kh = k.hom(f.ob_map[a.src], f.ob_map[a.tgt]);
                let lhs = kh.compose(g.hom_map(a.src, a.tgt).mor(a.mor), theta(s));
                let rhs = kh.compose(theta(t), f.hom_map(a.src, a.tgt).mor(a.mor));
                lhs == rhs
            }
            Constraint::Compositor(x, y, z, gg, ff) => {
                let (kx, ky, kz) = (f.ob_map[x], f.ob_map[y], f.ob_map[z]);
                let kh = k.hom(kx, kz);
                let gf = b.cell1(x, z, b.comp_ob(x, y, z, gg, ff));
                let lhs = kh.compose(theta(gf), f.compositor(x, y, z, gg, ff));
                let both = k.hcomp_mor(kx, ky, kz, theta(b.cell1(y, z, gg)), theta(b.cell1(x, y, ff)));
                let rhs = kh.compose(g.compositor(x, y, z, gg, ff), both);
                lhs == rhs
            }
            Constraint::Unit(x) => {
                let kx = f.ob_map[x];
                let kh = k.hom(kx, kx);
                kh.compose(theta(b.cell1(x, x, b.unit(x))), f.unitor(x)) == g.unitor(x)
            }
        }
    }
}
