//! Bivariant functors out of a marked category: marked maps go to left
//! adjoints and certified pullback squares to Beck-Chevalley squares.
//! Span extension to the correspondence bicategory, the local
//! representation of spans, and enumerative Yoneda and universality oracles.

mod extend;
mod families;
mod monoidal;
mod universal;
mod yoneda;
#[cfg(test)]
mod tests;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::{is_beck_chevalley, Adjunction, LaxSquare};
use crate::bicat::{locally_discrete, Bicat, Cell1, Cell2, LocallyDiscrete, Pseudofunctor};
use crate::error::{Error, Result};
use crate::fincat::{Cone, Mor, Ob};
use crate::marked::{certify, MarkedCat};
use crate::twocat::TwoCat;

pub use extend::{
    check_composition_intertwine, check_spex, local_representation, spex, IntertwineReport, LocalRep, SpexReport,
};
pub use families::{constant_family, corepresentable, self_indexing};
pub use monoidal::{cartesian_monoidal, self_duality_check, MonoidalReport, SelfDualityReport, Zigzag};
pub use universal::{enumerate_pseudofunctors, universality_check, UniversalityReport};
pub use yoneda::{yoneda_check, YonedaReport};

/// A pseudofunctor on the locally discrete bicategory of a marked category
/// together with its chosen right adjoints and Beck-Chevalley verdicts.
#[derive(Clone, Debug)]
pub struct BivariantReport {
    pub functor: Pseudofunctor,
    pub base: LocallyDiscrete,
    /// The marking, certified.
    pub marked: MarkedCat,
    /// `H f ⊣ H f^!` for each marked `f`.
    pub adjoints: BTreeMap<Mor, Adjunction<Bicat>>,
    pub squares: Vec<SquareVerdict>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareVerdict {
    pub marked: String,
    pub along: String,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdjointSummary {
    pub morphism: String,
    pub left: String,
    pub right: String,
}

/// Serializable outcome of a bivariance check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BivariantSummary {
    pub holds: bool,
    pub adjoints: Vec<AdjointSummary>,
    pub squares: Vec<SquareVerdict>,
    pub failure: Option<String>,
}

impl BivariantReport {
    pub fn target(&self) -> &Arc<Bicat> {
        &self.functor.target
    }

    /// `H f` for a base morphism.
    pub fn image(&self, f: Mor) -> Cell1 {
        self.functor.apply1(&self.base.cell(f))
    }

    /// `H g ∘ H f ⇒ H(g f)`.
    pub fn compositor(&self, g: Mor, f: Mor) -> Cell2 {
        let c = &self.base.cat;
        let (x, y, z) = (c.src(f).idx(), c.tgt(f).idx(), c.tgt(g).idx());
        let h = &self.functor;
        Cell2 {
            src: h.ob_map[x],
            tgt: h.ob_map[z],
            mor: h.compositor(x, y, z, self.base.cell(g).ob, self.base.cell(f).ob),
        }
    }

    /// `1 ⇒ H(1_x)`.
    pub fn unitor(&self, x: usize) -> Cell2 {
        let hx = self.functor.ob_map[x];
        Cell2 {
            src: hx,
            tgt: hx,
            mor: self.functor.unitor(x),
        }
    }

    pub fn adjunction(&self, f: Mor) -> Result<&Adjunction<Bicat>> {
        self.adjoints
            .get(&f)
            .ok_or_else(|| Error::PreconditionFailed(format!("`{}` is not marked", self.base.cat.mor_name(f))))
    }

    /// The image of the pullback square of marked `g` along `f`, filled by
    /// the compositor and an inverse compositor.
    pub fn square(&self, g: Mor, f: Mor, cone: &Cone) -> Result<LaxSquare<Bicat>> {
        let k = self.target();
        let (top, left) = (cone.legs[0], cone.legs[1]);
        let filler = k.vpath(&[self.compositor(g, top), k.invert(&self.compositor(f, left))?])?;
        Ok(LaxSquare {
            top: self.image(top),
            left: self.image(left),
            right: self.image(g),
            bottom: self.image(f),
            filler,
            left_adj: self.adjunction(left)?.clone(),
            right_adj: self.adjunction(g)?.clone(),
        })
    }

    pub fn summary(&self) -> BivariantSummary {
        summarize(self, None)
    }
}

fn summarize(r: &BivariantReport, failure: Option<&Error>) -> BivariantSummary {
    let c = &r.base.cat;
    let k = r.target();
    BivariantSummary {
        holds: failure.is_none(),
        adjoints: r
            .adjoints
            .iter()
            .map(|(&f, adj)| AdjointSummary {
                morphism: c.mor_name(f).to_string(),
                left: k.name1(&adj.left),
                right: k.name1(&adj.right),
            })
            .collect(),
        squares: r.squares.clone(),
        failure: failure.map(|e| e.to_string()),
    }
}

fn assess(h: &Pseudofunctor, m: &MarkedCat) -> Result<(BivariantReport, Option<Error>)> {
    let base = locally_discrete(&m.cat);
    if *h.source != *base.bicat {
        return Err(Error::PreconditionFailed(
            "functor is not defined on the locally discrete bicategory of the marking".into(),
        ));
    }
    let m = if m.has_certificate() { m.clone() } else { certify(m)? };
    let k = h.target.clone();
    let marked: Vec<Mor> = m.marked().collect();
    let found: Vec<Option<Adjunction<Bicat>>> = marked
        .par_iter()
        .map(|&f| k.find_right_adjoint(&h.apply1(&base.cell(f))).ok())
        .collect();
    let mut report = BivariantReport {
        functor: h.clone(),
        base,
        marked: m.clone(),
        adjoints: BTreeMap::new(),
        squares: Vec::new(),
    };
    let mut failure = None;
    for (&f, adj) in marked.iter().zip(found) {
        match adj {
            Some(adj) => {
                report.adjoints.insert(f, adj);
            }
            None if failure.is_none() => failure = Some(Error::NoAdjoint(m.cat.mor_name(f).to_string())),
            None => {}
        }
    }
    if failure.is_some() {
        return Ok((report, failure));
    }
    let cert = m.certificate.as_ref().expect("certified marking");
    let entries: Vec<(&(Mor, Mor), &Cone)> = cert.iter().collect();
    let verdicts: Vec<Result<SquareVerdict>> = entries
        .par_iter()
        .map(|&(&(g, f), cone)| {
            let bc = is_beck_chevalley(&*k, &report.square(g, f, cone)?)?;
            Ok(SquareVerdict {
                marked: m.cat.mor_name(g).to_string(),
                along: m.cat.mor_name(f).to_string(),
                holds: bc.holds,
                witness: bc.witness,
            })
        })
        .collect();
    report.squares = verdicts.into_iter().collect::<Result<_>>()?;
    let failure = report.squares.iter().find(|s| !s.holds).map(|s| {
        Error::BaseChangeFails(format!(
            "mate of `{}` along `{}`: {}",
            s.marked,
            s.along,
            s.witness.as_deref().unwrap_or("not invertible")
        ))
    });
    Ok((report, failure))
}

/// Finds right adjoints of the images of marked maps and checks the mate of
/// every certified pullback square.  Fails with [`Error::NoAdjoint`] or
/// [`Error::BaseChangeFails`].
pub fn check_bivariant(h: &Pseudofunctor, m: &MarkedCat) -> Result<BivariantReport> {
    match assess(h, m)? {
        (report, None) => Ok(report),
        (_, Some(e)) => Err(e),
    }
}

/// Like [`check_bivariant`], but records a failing verdict instead of
/// returning it as an error.
pub fn bivariance_summary(h: &Pseudofunctor, m: &MarkedCat) -> Result<BivariantSummary> {
    let (report, failure) = assess(h, m)?;
    Ok(summarize(&report, failure.as_ref()))
}

/// A transformation between bivariant functors with the same source and
/// target: one component per base object and an invertible naturality
/// cell `H2 f ∘ Φ_x ⇒ Φ_y ∘ H1 f` per base morphism.
#[derive(Clone, Debug)]
pub struct BivariantTransformation {
    pub components: Vec<Cell1>,
    pub naturality: Vec<Cell2>,
}

impl BivariantTransformation {
    pub fn identity(h: &BivariantReport) -> Result<BivariantTransformation> {
        let k = h.target();
        let c = &h.base.cat;
        let components = h.functor.ob_map.iter().map(|x| k.identity(x)).collect();
        let naturality = c
            .morphisms()
            .map(|f| {
                let hf = h.image(f);
                k.vpath(&[k.right_unitor(&hf), k.invert(&k.left_unitor(&hf))?])
            })
            .collect::<Result<_>>()?;
        Ok(BivariantTransformation { components, naturality })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransformationReport {
    pub holds: bool,
    pub squares: usize,
    pub witness: Option<String>,
}

/// Whether the naturality square of every marked map is Beck-Chevalley.
pub fn check_bivariant_transformation(
    from: &BivariantReport,
    to: &BivariantReport,
    phi: &BivariantTransformation,
) -> Result<TransformationReport> {
    let c = &from.base.cat;
    if *from.base.bicat != *to.base.bicat || *from.target() != *to.target() || from.marked != to.marked {
        return Err(Error::PreconditionFailed("transformation between unrelated bivariant functors".into()));
    }
    if phi.components.len() != c.num_objects() || phi.naturality.len() != c.num_morphisms() {
        return Err(Error::Format("transformation needs one component per object and one cell per morphism".into()));
    }
    let k = from.target();
    for (i, cell) in phi.naturality.iter().enumerate() {
        if !k.is_invertible(cell) {
            return Err(Error::InvalidTransformation(format!(
                "naturality cell at `{}` is not invertible",
                c.mor_name(Mor(i as u32))
            )));
        }
    }
    let mut report = TransformationReport {
        holds: true,
        squares: 0,
        witness: None,
    };
    for f in from.marked.marked() {
        let (x, y) = (c.src(f).idx(), c.tgt(f).idx());
        let sq = LaxSquare {
            top: phi.components[x],
            left: from.image(f),
            right: to.image(f),
            bottom: phi.components[y],
            filler: phi.naturality[f.idx()],
            left_adj: from.adjunction(f)?.clone(),
            right_adj: to.adjunction(f)?.clone(),
        };
        report.squares += 1;
        let bc = is_beck_chevalley(&**k, &sq)?;
        if !bc.holds {
            report.holds = false;
            report.witness = Some(format!("at `{}`: {}", c.mor_name(f), bc.witness.unwrap_or_default()));
            break;
        }
    }
    Ok(report)
}

/// The adjunct `X ⇒ R ∘ Y` of `α: L ∘ X ⇒ Y` under `L ⊣ R`.
pub(crate) fn adjunct(k: &Bicat, adj: &Adjunction<Bicat>, x: &Cell1, alpha: &Cell2) -> Result<Cell2> {
    let (l, r) = (&adj.left, &adj.right);
    k.vpath(&[
        k.invert(&k.left_unitor(x))?,
        k.whisker_right(&adj.unit, x)?,
        k.associator(r, l, x)?,
        k.whisker_left(r, alpha)?,
    ])
}

fn ob(i: usize) -> Ob {
    Ob(i as u32)
}
