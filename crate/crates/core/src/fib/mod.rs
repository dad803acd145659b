//! Cartesian and coCartesian fibrations between finite categories, the
//! Grothendieck construction and its inverse, free fibrations and the
//! base-change conditions for bicartesian fibrations.

mod bicart;
mod free;
mod groth;
#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{subcategory, FinCat, Functor, Mor, Ob, Sub};
use crate::marked::MarkedCat;

pub use bicart::{
    check_bicartesian_base_change, check_twisted_bicartesian, BicartesianReport, Condition, Orientation,
    TwistedReport,
};
pub use free::{check_free_cartesian, free_bicartesian, free_cartesian, FreeBicartesian, FreeCartesian, FreenessReport};
pub use groth::{
    fibre_transport, grothendieck, grothendieck_round_trip, integral_marking, representable, strict_family,
    transport_round_trip, Grothendieck,
    RoundTripReport, Transport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variance {
    /// coCartesian lifts; transport along `f` goes forward.
    Covariant,
    /// Cartesian lifts; transport along `f` goes backward.
    Contravariant,
}

/// A class of base morphisms as an indicator vector.
pub type Marking = Vec<bool>;

pub fn all_morphisms(c: &FinCat) -> Marking {
    vec![true; c.num_morphisms()]
}

pub fn no_morphisms(c: &FinCat) -> Marking {
    vec![false; c.num_morphisms()]
}

pub fn marking_of(m: &MarkedCat) -> Marking {
    m.cat.morphisms().map(|f| m.is_marked(f)).collect()
}

/// Whether `phi` is Cartesian for `p`: maps into its source correspond
/// exactly to maps into its target together with a factorisation of their
/// image through `p(phi)`.
pub fn is_cartesian(p: &Functor, phi: Mor) -> bool {
    let (e, d) = (&p.source, &p.target);
    let (src, tgt) = (e.src(phi), e.tgt(phi));
    let f = p.mor(phi);
    e.objects().all(|z| {
        let mut seen = HashSet::new();
        for &chi in e.hom(z, src) {
            if !seen.insert((e.compose(phi, chi), p.mor(chi))) {
                return false;
            }
        }
        let expected: usize = e
            .hom(z, tgt)
            .iter()
            .map(|&psi| {
                d.hom(p.ob(z), d.src(f))
                    .iter()
                    .filter(|&&g| d.compose(f, g) == p.mor(psi))
                    .count()
            })
            .sum();
        seen.len() == expected
    })
}

/// The dual of [`is_cartesian`].
pub fn is_cocartesian(p: &Functor, phi: Mor) -> bool {
    let (e, d) = (&p.source, &p.target);
    let (src, tgt) = (e.src(phi), e.tgt(phi));
    let f = p.mor(phi);
    e.objects().all(|z| {
        let mut seen = HashSet::new();
        for &chi in e.hom(tgt, z) {
            if !seen.insert((e.compose(chi, phi), p.mor(chi))) {
                return false;
            }
        }
        let expected: usize = e
            .hom(src, z)
            .iter()
            .map(|&psi| {
                d.hom(d.tgt(f), p.ob(z))
                    .iter()
                    .filter(|&&g| d.compose(g, f) == p.mor(psi))
                    .count()
            })
            .sum();
        seen.len() == expected
    })
}

fn check_over(p: &Functor, phi: Mor, f: Mor) -> Result<()> {
    if p.mor(phi) != f {
        return Err(Error::NotOverF(format!(
            "`{}` lies over `{}`, not `{}`",
            p.source.mor_name(phi),
            p.target.mor_name(p.mor(phi)),
            p.target.mor_name(f)
        )));
    }
    Ok(())
}

pub fn is_cartesian_lift(p: &Functor, phi: Mor, f: Mor) -> Result<bool> {
    check_over(p, phi, f)?;
    Ok(is_cartesian(p, phi))
}

pub fn is_cocartesian_lift(p: &Functor, phi: Mor, f: Mor) -> Result<bool> {
    check_over(p, phi, f)?;
    Ok(is_cocartesian(p, phi))
}

/// A base morphism and a total object with no lift of the requested kind.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MissingLift {
    pub cartesian: bool,
    pub morphism: String,
    pub object: String,
}

impl fmt::Display for MissingLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.cartesian { "Cartesian" } else { "coCartesian" };
        write!(f, "no {kind} lift of `{}` at `{}`", self.morphism, self.object)
    }
}

impl From<MissingLift> for Error {
    fn from(m: MissingLift) -> Error {
        Error::PreconditionFailed(m.to_string())
    }
}

/// A functor together with chosen Cartesian and coCartesian lifts.
#[derive(Clone, Debug)]
pub struct Fibration {
    pub proj: Functor,
    /// Cartesian lift of `f` ending at `e`, keyed by `(f, e)`.
    pub cart: BTreeMap<(Mor, Ob), Mor>,
    /// coCartesian lift of `f` starting at `e`, keyed by `(f, e)`.
    pub cocart: BTreeMap<(Mor, Ob), Mor>,
    over: Vec<Vec<Ob>>,
}

impl Fibration {
    pub fn new(proj: Functor) -> Fibration {
        let mut over = vec![Vec::new(); proj.target.num_objects()];
        for e in proj.source.objects() {
            over[proj.ob(e).idx()].push(e);
        }
        Fibration {
            proj,
            cart: BTreeMap::new(),
            cocart: BTreeMap::new(),
            over,
        }
    }

    pub fn total(&self) -> &Arc<FinCat> {
        &self.proj.source
    }

    pub fn base(&self) -> &Arc<FinCat> {
        &self.proj.target
    }

    /// Total objects over `d`, in order.
    pub fn over(&self, d: Ob) -> &[Ob] {
        &self.over[d.idx()]
    }

    pub fn cart_lift(&self, f: Mor, e: Ob) -> Result<Mor> {
        self.cart.get(&(f, e)).copied().ok_or_else(|| self.no_lift(true, f, e))
    }

    pub fn cocart_lift(&self, f: Mor, e: Ob) -> Result<Mor> {
        self.cocart.get(&(f, e)).copied().ok_or_else(|| self.no_lift(false, f, e))
    }

    fn no_lift(&self, cartesian: bool, f: Mor, e: Ob) -> Error {
        MissingLift {
            cartesian,
            morphism: self.base().mor_name(f).to_string(),
            object: self.total().ob_name(e).to_string(),
        }
        .into()
    }

    /// Searches lifts of the marked base morphisms not chosen yet.  Among
    /// candidates accepted by `admit`, the first in canonical order is taken.
    pub fn find_lifts(
        &mut self,
        cart: &[bool],
        cocart: &[bool],
        admit: &(dyn Fn(Mor) -> bool + Sync),
    ) -> std::result::Result<(), MissingLift> {
        let (e, d) = (self.proj.source.clone(), self.proj.target.clone());
        let mut into = vec![Vec::new(); e.num_objects()];
        let mut out = vec![Vec::new(); e.num_objects()];
        for m in e.morphisms() {
            into[e.tgt(m).idx()].push(m);
            out[e.src(m).idx()].push(m);
        }
        let mut tasks = Vec::new();
        for f in d.morphisms() {
            if cart[f.idx()] {
                for &x in self.over(d.tgt(f)) {
                    if !self.cart.contains_key(&(f, x)) {
                        tasks.push((true, f, x));
                    }
                }
            }
            if cocart[f.idx()] {
                for &x in self.over(d.src(f)) {
                    if !self.cocart.contains_key(&(f, x)) {
                        tasks.push((false, f, x));
                    }
                }
            }
        }
        let p = &self.proj;
        let found: Vec<Option<Mor>> = tasks
            .par_iter()
            .map(|&(cartesian, f, x)| {
                let candidates = if cartesian { &into[x.idx()] } else { &out[x.idx()] };
                candidates.iter().copied().find(|&m| {
                    p.mor(m) == f
                        && admit(m)
                        && if cartesian { is_cartesian(p, m) } else { is_cocartesian(p, m) }
                })
            })
            .collect();
        for (&(cartesian, f, x), lift) in tasks.iter().zip(found) {
            match lift {
                Some(m) if cartesian => {
                    self.cart.insert((f, x), m);
                }
                Some(m) => {
                    self.cocart.insert((f, x), m);
                }
                None => {
                    return Err(MissingLift {
                        cartesian,
                        morphism: d.mor_name(f).to_string(),
                        object: e.ob_name(x).to_string(),
                    })
                }
            }
        }
        Ok(())
    }

    /// The fibre over `d`: objects over `d` and morphisms over its identity.
    pub fn fibre(&self, d: Ob) -> Sub {
        let e = self.total();
        let id = self.base().id(d);
        let mors: Vec<Mor> = e.morphisms().filter(|&m| self.proj.mor(m) == id).collect();
        subcategory(e, self.over(d), &mors).expect("fibres are subcategories")
    }

    /// The unique `k: a → b` over `over` with `ok(k)`.
    pub fn factor(&self, a: Ob, b: Ob, over: Mor, ok: impl Fn(Mor) -> bool) -> Result<Mor> {
        let e = self.total();
        let mut found = e.hom(a, b).iter().copied().filter(|&k| self.proj.mor(k) == over && ok(k));
        match (found.next(), found.next()) {
            (Some(k), None) => Ok(k),
            (first, _) => Err(Error::NonUniqueMediator(format!(
                "{} factorisations {} -> {} over `{}`",
                if first.is_some() { "several" } else { "no" },
                e.ob_name(a),
                e.ob_name(b),
                self.base().mor_name(over)
            ))),
        }
    }
}

/// Chooses lifts over `marking`: coCartesian ones for the covariant case,
/// Cartesian ones otherwise.
pub fn check_fibration(
    p: &Functor,
    marking: &[bool],
    variance: Variance,
) -> std::result::Result<Fibration, MissingLift> {
    let mut fib = Fibration::new(p.clone());
    let none = no_morphisms(&p.target);
    match variance {
        Variance::Covariant => fib.find_lifts(&none, marking, &|_| true)?,
        Variance::Contravariant => fib.find_lifts(marking, &none, &|_| true)?,
    }
    Ok(fib)
}
