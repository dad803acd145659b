use std::collections::HashSet;

use serde::Serialize;

use super::{all_morphisms, is_cartesian, marking_of, no_morphisms, Fibration};
use crate::error::{Error, Result};
use crate::fincat::{comma, enumerate_nat_trans, Comma, Functor, FunctorSearch, Mor, NatTrans, Ob};
use crate::marked::{marked_comma, MarkedCat, MarkedComma};

/// `D ↓♯ E` over `D` by the source projection, with Cartesian lifts over
/// the marked maps.
#[derive(Clone, Debug)]
pub struct FreeCartesian {
    pub comma: MarkedComma,
    pub fibration: Fibration,
}

pub fn free_cartesian(m: &MarkedCat, p: &Functor, cap: usize) -> Result<FreeCartesian> {
    let mc = marked_comma(m, p, cap)?;
    let mut fibration = Fibration::new(mc.proj.clone());
    fibration.find_lifts(&marking_of(m), &no_morphisms(&m.cat), &|_| true)?;
    Ok(FreeCartesian { comma: mc, fibration })
}

/// `(D ↓♯ E) ↓ D` over `D` by the last projection: objects are spans
/// `p(e) ← a → d` with marked wrong-way leg.  Cartesian over marked maps,
/// coCartesian over all maps.
#[derive(Clone, Debug)]
pub struct FreeBicartesian {
    pub comma: MarkedComma,
    pub outer: Comma,
    pub fibration: Fibration,
}

pub fn free_bicartesian(m: &MarkedCat, p: &Functor, cap: usize) -> Result<FreeBicartesian> {
    let mc = marked_comma(m, p, cap)?;
    let outer = comma(&mc.proj, &Functor::identity(&m.cat), cap)?;
    let mut fibration = Fibration::new(outer.right.clone());
    fibration.find_lifts(&marking_of(m), &all_morphisms(&m.cat), &|_| true)?;
    Ok(FreeBicartesian {
        comma: mc,
        outer,
        fibration,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub holds: bool,
    /// Functors over the base out of the free fibration preserving the
    /// Cartesian lifts.
    pub cartesian_functors: usize,
    /// Functors over the base out of the generating category.
    pub functors_over_base: usize,
    /// Pairs of functors whose vertical transformations were compared.
    pub pairs_checked: usize,
    pub failure: Option<String>,
}

fn key(f: &Functor) -> (Vec<Ob>, Vec<Mor>) {
    (f.ob_map.clone(), f.mor_map.clone())
}

/// Restriction along `E → D ↓♯ E` is a bijection from lift-preserving
/// functors over `D` into `target` onto functors over `D` from `E`, and a
/// bijection on vertical transformations between them.
pub fn check_free_cartesian(m: &MarkedCat, p: &Functor, target: &Fibration, cap: usize) -> Result<FreenessReport> {
    if *target.base() != m.cat {
        return Err(Error::PreconditionFailed("target fibration lies over a different base".into()));
    }
    let free = free_cartesian(m, p, cap)?;
    let mut target = target.clone();
    target.find_lifts(&marking_of(m), &no_morphisms(&m.cat), &|_| true)?;
    let q = &target.proj;
    let mc = &free.comma;
    let total = &mc.comma.cat;
    let lifts: Vec<Mor> = free.fibration.cart.values().copied().collect();
    let cartesian: Vec<Functor> = FunctorSearch::new(total, target.total())
        .objects(|x, y| mc.proj.ob(x) == q.ob(y))
        .morphisms(|f, g| mc.proj.mor(f) == q.mor(g))
        .collect(cap)?
        .into_iter()
        .filter(|f| lifts.iter().all(|&l| is_cartesian(q, f.mor(l))))
        .collect();
    let over_base = FunctorSearch::new(&p.source, target.total())
        .objects(|x, y| p.ob(x) == q.ob(y))
        .morphisms(|f, g| p.mor(f) == q.mor(g))
        .collect(cap)?;
    let restricted = cartesian
        .iter()
        .map(|f| f.after(&mc.incl))
        .collect::<Result<Vec<_>>>()?;
    let mut report = FreenessReport {
        holds: false,
        cartesian_functors: cartesian.len(),
        functors_over_base: over_base.len(),
        pairs_checked: 0,
        failure: None,
    };
    let image: HashSet<_> = restricted.iter().map(key).collect();
    let all: HashSet<_> = over_base.iter().map(key).collect();
    if image.len() != restricted.len() {
        report.failure = Some("two lift-preserving functors restrict to the same functor".into());
        return Ok(report);
    }
    if image != all {
        report.failure = Some("restriction misses a functor over the base".into());
        return Ok(report);
    }
    let base = &m.cat;
    let vertical = |t: &NatTrans| t.components.iter().all(|&c| base.is_identity(q.mor(c)));
    for (i, f) in cartesian.iter().enumerate() {
        for (j, g) in cartesian.iter().enumerate() {
            let upstairs: Vec<NatTrans> = enumerate_nat_trans(f, g).into_iter().filter(|t| vertical(t)).collect();
            let downstairs = enumerate_nat_trans(&restricted[i], &restricted[j])
                .into_iter()
                .filter(|t| vertical(t))
                .count();
            let images: HashSet<Vec<Mor>> = upstairs
                .iter()
                .map(|t| mc.incl.ob_map.iter().map(|&o| t.at(o)).collect())
                .collect();
            report.pairs_checked += 1;
            if images.len() != upstairs.len() || images.len() != downstairs {
                report.failure = Some(format!(
                    "vertical transformations between functors {i} and {j}: {} upstairs, {} after restriction, {downstairs} downstairs",
                    upstairs.len(),
                    images.len()
                ));
                return Ok(report);
            }
        }
    }
    report.holds = true;
    Ok(report)
}
