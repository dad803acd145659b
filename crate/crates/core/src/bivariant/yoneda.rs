use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::families::postcompose_spans;
use super::{ob, BivariantReport};
use crate::adjoint::{functor_right_adjoint, is_beck_chevalley, Adjunction, LaxSquare};
use crate::bicat::CatUniverse;
use crate::error::{Error, Result};
use crate::fincat::{
    enumerate_functors, enumerate_nat_trans, is_equivalence, FinCat, Functor, Mor, MorphismRecord, NatTrans, Ob,
};
use crate::span::{Corr, Span};
use crate::twocat::CatCalc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct YonedaReport {
    pub holds: bool,
    /// Bivariant transformations out of `Corr(x, −)`.
    pub transformations: usize,
    pub modifications: usize,
    /// Value of each transformation at the identity span.
    pub evaluations: Vec<String>,
    pub witness: Option<String>,
}

struct Setting<'a> {
    base: &'a FinCat,
    /// `Corr(x, f)` and `F f` per base morphism.
    moves: Vec<(Functor, Functor)>,
    /// Right adjoints of both for marked morphisms.
    adjoints: Vec<Option<(Adjunction<CatCalc>, Adjunction<CatCalc>)>>,
    /// Base morphisms checked once the larger endpoint is assigned.
    due: Vec<Vec<Mor>>,
}

impl Setting<'_> {
    fn natural(&self, f: Mor, comps: &[Functor]) -> Result<bool> {
        let (y, y2) = (self.base.src(f).idx(), self.base.tgt(f).idx());
        let (spans, fam) = &self.moves[f.idx()];
        let upper = fam.after(&comps[y])?;
        if upper != comps[y2].after(spans)? {
            return Ok(false);
        }
        let Some((left_adj, right_adj)) = &self.adjoints[f.idx()] else {
            return Ok(true);
        };
        let sq = LaxSquare {
            top: comps[y].clone(),
            left: spans.clone(),
            right: fam.clone(),
            bottom: comps[y2].clone(),
            filler: NatTrans::identity(&upper),
            left_adj: left_adj.clone(),
            right_adj: right_adj.clone(),
        };
        Ok(is_beck_chevalley(&CatCalc, &sq)?.holds)
    }

    fn transformations(&self, candidates: &[Vec<Functor>], cap: usize) -> Result<Vec<Vec<Functor>>> {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        self.extend(candidates, &mut chosen, &mut out, cap)?;
        Ok(out)
    }

    fn extend(
        &self,
        candidates: &[Vec<Functor>],
        chosen: &mut Vec<Functor>,
        out: &mut Vec<Vec<Functor>>,
        cap: usize,
    ) -> Result<()> {
        let y = chosen.len();
        if y == candidates.len() {
            if out.len() == cap {
                return Err(Error::SizeCap {
                    what: "bivariant transformations".into(),
                    cap,
                });
            }
            out.push(chosen.clone());
            return Ok(());
        }
        for phi in &candidates[y] {
            chosen.push(phi.clone());
            let mut ok = true;
            for &f in &self.due[y] {
                if !self.natural(f, chosen)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                self.extend(candidates, chosen, out, cap)?;
            }
            chosen.pop();
        }
        Ok(())
    }

    fn modifications(&self, from: &[Functor], to: &[Functor]) -> Vec<Vec<NatTrans>> {
        let per_object: Vec<Vec<NatTrans>> = from.iter().zip(to).map(|(a, b)| enumerate_nat_trans(a, b)).collect();
        let mut out = Vec::new();
        let mut chosen: Vec<NatTrans> = Vec::new();
        self.extend_modification(&per_object, &mut chosen, &mut out);
        out
    }

    fn extend_modification(&self, per_object: &[Vec<NatTrans>], chosen: &mut Vec<NatTrans>, out: &mut Vec<Vec<NatTrans>>) {
        let y = chosen.len();
        if y == per_object.len() {
            out.push(chosen.clone());
            return;
        }
        for theta in &per_object[y] {
            chosen.push(theta.clone());
            let ok = self.due[y].iter().all(|&f| {
                let (a, b) = (self.base.src(f).idx(), self.base.tgt(f).idx());
                let (spans, fam) = &self.moves[f.idx()];
                let upper = NatTrans::whisker_left(fam, &chosen[a]).map(|t| t.components);
                let lower = NatTrans::whisker_right(&chosen[b], spans).map(|t| t.components);
                matches!((upper, lower), (Ok(u), Ok(l)) if u == l)
            });
            if ok {
                self.extend_modification(per_object, chosen, out);
            }
            chosen.pop();
        }
    }
}

/// Enumerates the strictly natural bivariant transformations
/// `Corr(x, −) ⇒ F` and their modifications, and checks that evaluation at
/// the identity span is an equivalence onto `F x`.
pub fn yoneda_check(corr: &Corr, f: &BivariantReport, u: &CatUniverse, x: usize, cap: usize) -> Result<YonedaReport> {
    let c = corr.base();
    if **c != *f.base.cat || *u.bicat != **f.target() {
        return Err(Error::PreconditionFailed("family and correspondences disagree on base or universe".into()));
    }
    let n = c.num_objects();
    if x >= n {
        return Err(Error::UnknownName(format!("object {x}")));
    }
    let fam_cat = |y: usize| u.cats[f.functor.ob_map[y]].clone();
    let mut moves = Vec::with_capacity(c.num_morphisms());
    let mut adjoints = Vec::with_capacity(c.num_morphisms());
    let mut due = vec![Vec::new(); n];
    for g in c.morphisms() {
        let spans = postcompose_spans(corr, x, g)?;
        let fam = u.functor(&f.image(g)).clone();
        let adj = if corr.marked.is_marked(g) {
            Some((functor_right_adjoint(&spans)?, functor_right_adjoint(&fam)?))
        } else {
            None
        };
        moves.push((spans, fam));
        adjoints.push(adj);
        due[c.src(g).idx().max(c.tgt(g).idx())].push(g);
    }
    let setting = Setting {
        base: c,
        moves,
        adjoints,
        due,
    };
    let candidates = (0..n)
        .map(|y| enumerate_functors(&corr.span_category(x, y).cat, &fam_cat(y), cap))
        .collect::<Result<Vec<_>>>()?;
    let transformations = setting.transformations(&candidates, cap)?;

    let mut records = Vec::new();
    let mut modifications: Vec<Vec<NatTrans>> = Vec::new();
    let mut index: HashMap<(usize, usize, Vec<Vec<Mor>>), Mor> = HashMap::new();
    let mut identities = vec![Mor(0); transformations.len()];
    for (i, from) in transformations.iter().enumerate() {
        for (j, to) in transformations.iter().enumerate() {
            for theta in setting.modifications(from, to) {
                let key: Vec<Vec<Mor>> = theta.iter().map(|t| t.components.clone()).collect();
                let m = Mor(records.len() as u32);
                if i == j && theta.iter().all(|t| t.is_identity()) {
                    identities[i] = m;
                }
                index.insert((i, j, key), m);
                records.push(MorphismRecord {
                    name: format!("m{}:t{i}=>t{j}", m.0),
                    src: ob(i),
                    tgt: ob(j),
                });
                modifications.push(theta);
            }
        }
        if modifications.len() > cap {
            return Err(Error::SizeCap {
                what: "modifications".into(),
                cap,
            });
        }
    }
    let names = (0..transformations.len()).map(|i| format!("t{i}")).collect();
    let cat = FinCat::validated(names, records.clone(), identities, |g, h| {
        let (i, k) = (records[h.idx()].src.idx(), records[g.idx()].tgt.idx());
        let key: Vec<Vec<Mor>> = modifications[g.idx()]
            .iter()
            .zip(&modifications[h.idx()])
            .map(|(a, b)| a.after(b).map(|t| t.components))
            .collect::<Result<_>>()
            .ok()?;
        index.get(&(i, k, key)).copied()
    })?;
    let cat = Arc::new(cat);
    let sc = corr.span_category(x, x);
    let id_span = sc.find(&Span::identity(c, ob(x))).expect("identity span");
    let ob_map: Vec<Ob> = transformations.iter().map(|t| t[x].ob(id_span)).collect();
    let mor_map: Vec<Mor> = modifications.iter().map(|m| m[x].at(id_span)).collect();
    let evaluation = Functor::new(cat.clone(), fam_cat(x), ob_map.clone(), mor_map)?;
    let eq = is_equivalence(&evaluation);
    let target = fam_cat(x);
    Ok(YonedaReport {
        holds: eq.holds(),
        transformations: transformations.len(),
        modifications: modifications.len(),
        evaluations: ob_map.iter().map(|&o| target.ob_name(o).to_string()).collect(),
        witness: eq.witness,
    })
}
