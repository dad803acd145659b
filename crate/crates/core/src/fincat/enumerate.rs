//! Exhaustive enumeration of functors and natural transformations, and the
//! functor categories built from them.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{FinCat, Functor, Mor, MorphismRecord, NatTrans, Ob};
use crate::error::{Error, Result};

/// Default bound on the size of constructed categories.
pub const DEFAULT_CAP: usize = 10_000;

/// Backtracking search for functors with optional per-cell restrictions.
///
/// Results come out in lexicographic order of `(ob_map, mor_map)`.
pub struct FunctorSearch<'a> {
    source: &'a Arc<FinCat>,
    target: &'a Arc<FinCat>,
    ob_ok: Box<dyn Fn(Ob, Ob) -> bool + Sync + 'a>,
    mor_ok: Box<dyn Fn(Mor, Mor) -> bool + Sync + 'a>,
}

impl<'a> FunctorSearch<'a> {
    pub fn new(source: &'a Arc<FinCat>, target: &'a Arc<FinCat>) -> Self {
        FunctorSearch {
            source,
            target,
            ob_ok: Box::new(|_, _| true),
            mor_ok: Box::new(|_, _| true),
        }
    }

    /// Restricts the image of each source object.
    pub fn objects(mut self, ok: impl Fn(Ob, Ob) -> bool + Sync + 'a) -> Self {
        self.ob_ok = Box::new(ok);
        self
    }

    /// Restricts the image of each source morphism.
    pub fn morphisms(mut self, ok: impl Fn(Mor, Mor) -> bool + Sync + 'a) -> Self {
        self.mor_ok = Box::new(ok);
        self
    }

    /// All functors, erroring once more than `cap` are found.
    pub fn collect(&self, cap: usize) -> Result<Vec<Functor>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each(&mut |ob, mor| {
            if out.len() == cap {
                over = true;
                return false;
            }
            out.push(Functor::unchecked(
                self.source.clone(),
                self.target.clone(),
                ob.to_vec(),
                mor.to_vec(),
            ));
            true
        });
        if over {
            return Err(Error::SizeCap {
                what: "functor enumeration".into(),
                cap,
            });
        }
        Ok(out)
    }

    /// Visits each functor; the visitor returns `false` to stop.
    pub fn for_each(&self, visit: &mut dyn FnMut(&[Ob], &[Mor]) -> bool) {
        let c = &**self.source;
        let n = c.num_objects();
        // morphisms checked when the later of their endpoints is assigned
        let mut by_object: Vec<Vec<Mor>> = vec![Vec::new(); n];
        for f in c.morphisms() {
            by_object[c.src(f).idx().max(c.tgt(f).idx())].push(f);
        }
        let free: Vec<Mor> = c.morphisms().filter(|&f| !c.is_identity(f)).collect();
        let mut pos = vec![usize::MAX; c.num_morphisms()];
        for (i, &f) in free.iter().enumerate() {
            pos[f.idx()] = i;
        }
        let slot = |m: Mor| if pos[m.idx()] == usize::MAX { None } else { Some(pos[m.idx()]) };
        let mut triples: Vec<Vec<(Mor, Mor, Mor)>> = vec![Vec::new(); free.len()];
        for (g, f) in c.composable_pairs() {
            if c.is_identity(g) || c.is_identity(f) {
                continue;
            }
            let gf = c.compose(g, f);
            let last = [slot(g), slot(f), slot(gf)].into_iter().flatten().max().expect("non-identity");
            triples[last].push((g, f, gf));
        }
        let mut ob_map = vec![Ob(0); n];
        let mut mor_map = vec![Mor(0); c.num_morphisms()];
        let mut stop = false;
        self.objects_step(0, &by_object, &free, &triples, &mut ob_map, &mut mor_map, visit, &mut stop);
    }

    #[allow(clippy::too_many_arguments)]
    fn objects_step(
        &self,
        k: usize,
        by_object: &[Vec<Mor>],
        free: &[Mor],
        triples: &[Vec<(Mor, Mor, Mor)>],
        ob_map: &mut Vec<Ob>,
        mor_map: &mut Vec<Mor>,
        visit: &mut dyn FnMut(&[Ob], &[Mor]) -> bool,
        stop: &mut bool,
    ) {
        let c = &**self.source;
        let d = &**self.target;
        if k == c.num_objects() {
            for x in c.objects() {
                mor_map[c.id(x).idx()] = d.id(ob_map[x.idx()]);
            }
            self.morphisms_step(0, free, triples, ob_map, mor_map, visit, stop);
            return;
        }
        let x = Ob(k as u32);
        for y in d.objects() {
            if *stop {
                return;
            }
            if !(self.ob_ok)(x, y) {
                continue;
            }
            ob_map[k] = y;
            let feasible = by_object[k].iter().all(|&f| {
                if c.is_identity(f) {
                    return (self.mor_ok)(f, d.id(y));
                }
                d.hom(ob_map[c.src(f).idx()], ob_map[c.tgt(f).idx()])
                    .iter()
                    .any(|&g| (self.mor_ok)(f, g))
            });
            if feasible {
                self.objects_step(k + 1, by_object, free, triples, ob_map, mor_map, visit, stop);
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn morphisms_step(
        &self,
        k: usize,
        free: &[Mor],
        triples: &[Vec<(Mor, Mor, Mor)>],
        ob_map: &mut Vec<Ob>,
        mor_map: &mut Vec<Mor>,
        visit: &mut dyn FnMut(&[Ob], &[Mor]) -> bool,
        stop: &mut bool,
    ) {
        let c = &**self.source;
        let d = &**self.target;
        if k == free.len() {
            if !visit(ob_map, mor_map) {
                *stop = true;
            }
            return;
        }
        let f = free[k];
        for &g in d.hom(ob_map[c.src(f).idx()], ob_map[c.tgt(f).idx()]) {
            if *stop {
                return;
            }
            if !(self.mor_ok)(f, g) {
                continue;
            }
            mor_map[f.idx()] = g;
            let ok = triples[k]
                .iter()
                .all(|&(a, b, ab)| d.compose(mor_map[a.idx()], mor_map[b.idx()]) == mor_map[ab.idx()]);
            if ok {
                self.morphisms_step(k + 1, free, triples, ob_map, mor_map, visit, stop);
            }
        }
    }
}

/// All functors `C → D` in canonical order.
pub fn enumerate_functors(c: &Arc<FinCat>, d: &Arc<FinCat>, cap: usize) -> Result<Vec<Functor>> {
    FunctorSearch::new(c, d).collect(cap)
}

/// All natural transformations `F ⇒ G`, in lexicographic order of components.
pub fn enumerate_nat_trans(f: &Functor, g: &Functor) -> Vec<NatTrans> {
    let c = &f.source;
    let n = c.num_objects();
    let mut by_object: Vec<Vec<Mor>> = vec![Vec::new(); n];
    for h in c.morphisms() {
        if !c.is_identity(h) {
            by_object[c.src(h).idx().max(c.tgt(h).idx())].push(h);
        }
    }
    let mut out = Vec::new();
    let mut comps = vec![Mor(0); n];
    fn go(
        k: usize,
        f: &Functor,
        g: &Functor,
        by_object: &[Vec<Mor>],
        comps: &mut Vec<Mor>,
        out: &mut Vec<NatTrans>,
    ) {
        let c = &f.source;
        let d = &f.target;
        if k == c.num_objects() {
            out.push(NatTrans::unchecked(f.clone(), g.clone(), comps.clone()));
            return;
        }
        let x = Ob(k as u32);
        for &m in d.hom(f.ob(x), g.ob(x)) {
            comps[k] = m;
            let ok = by_object[k].iter().all(|&h| {
                let (s, t) = (c.src(h), c.tgt(h));
                d.compose(g.mor(h), comps[s.idx()]) == d.compose(comps[t.idx()], f.mor(h))
            });
            if ok {
                go(k + 1, f, g, by_object, comps, out);
            }
        }
    }
    go(0, f, g, &by_object, &mut comps, &mut out);
    out
}

/// A functor category with the enumerated functors and transformations
/// behind its objects and morphisms.
#[derive(Clone, Debug)]
pub struct FunctorCategory {
    pub cat: Arc<FinCat>,
    pub functors: Vec<Functor>,
    pub transformations: Vec<NatTrans>,
    functor_index: HashMap<Vec<Mor>, Ob>,
    trans_index: HashMap<(Ob, Ob, Vec<Mor>), Mor>,
}

impl FunctorCategory {
    /// The object standing for `f`, if `f` has the right source and target.
    pub fn object_of(&self, f: &Functor) -> Option<Ob> {
        let ob = *self.functor_index.get(&f.mor_map)?;
        (self.functors[ob.idx()] == *f).then_some(ob)
    }

    pub fn morphism_of(&self, t: &NatTrans) -> Option<Mor> {
        let s = self.object_of(&t.source)?;
        let u = self.object_of(&t.target)?;
        self.trans_index.get(&(s, u, t.components.clone())).copied()
    }

    pub fn functor(&self, x: Ob) -> &Functor {
        &self.functors[x.idx()]
    }

    pub fn transformation(&self, m: Mor) -> &NatTrans {
        &self.transformations[m.idx()]
    }
}

/// `Fun(C, D)`: all functors and all natural transformations between them.
pub fn functor_category(c: &Arc<FinCat>, d: &Arc<FinCat>, cap: usize) -> Result<FunctorCategory> {
    let functors = enumerate_functors(c, d, cap)?;
    let n = functors.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let per_pair: Vec<Vec<NatTrans>> = pairs
        .par_iter()
        .map(|&(i, j)| enumerate_nat_trans(&functors[i], &functors[j]))
        .collect();
    let total: usize = per_pair.iter().map(Vec::len).sum();
    if total > cap {
        return Err(Error::SizeCap {
            what: "functor category morphisms".into(),
            cap,
        });
    }
    let labels: Vec<String> = functors.iter().map(Functor::label).collect();
    let mut records = Vec::with_capacity(total);
    let mut transformations = Vec::with_capacity(total);
    let mut trans_index = HashMap::with_capacity(total);
    let mut ids = vec![Mor(0); n];
    let mut ends: Vec<(u32, u32)> = Vec::with_capacity(total);
    for (&(i, j), ts) in pairs.iter().zip(per_pair) {
        for t in ts {
            let m = Mor(records.len() as u32);
            if i == j && t.components.iter().all(|&cm| d.is_identity(cm)) {
                ids[i] = m;
            }
            let comps: Vec<&str> = t.components.iter().map(|&cm| d.mor_name(cm)).collect();
            records.push(MorphismRecord {
                name: format!("{}=[{}]=>{}", labels[i], comps.join(","), labels[j]),
                src: Ob(i as u32),
                tgt: Ob(j as u32),
            });
            trans_index.insert((Ob(i as u32), Ob(j as u32), t.components.clone()), m);
            ends.push((i as u32, j as u32));
            transformations.push(t);
        }
    }
    let cat = FinCat::assemble(labels, records, ids, |g, f| {
        let (tf, tg) = (&transformations[f.idx()], &transformations[g.idx()]);
        let comps: Vec<Mor> = tf
            .components
            .iter()
            .zip(&tg.components)
            .map(|(&a, &b)| d.compose(b, a))
            .collect();
        let (s, t) = (Ob(ends[f.idx()].0), Ob(ends[g.idx()].1));
        trans_index.get(&(s, t, comps)).copied()
    })?;
    let functor_index = functors
        .iter()
        .enumerate()
        .map(|(i, f)| (f.mor_map.clone(), Ob(i as u32)))
        .collect();
    let cat = Arc::new(cat);
    Ok(FunctorCategory {
        cat,
        functors,
        transformations,
        functor_index,
        trans_index,
    })
}
