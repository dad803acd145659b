//! Finite categories given by explicit composition tables.
//!
//! A [`FinCat`] stores its objects and morphisms in canonical (input) order
//! and a total composition table over all composable pairs.  Everything else
//! in the crate is built on top of it: functors, natural transformations,
//! limits with canonical choices, comma and functor categories.

mod construct;
mod enumerate;
mod functor;
mod io;
mod limits;

pub use construct::{
    comma, comma_filtered, discrete, opposite, postcompose, power, product, product_functor, slice,
    subcategory, Comma, Power, Product, Sub,
};
pub use enumerate::{
    enumerate_functors, enumerate_nat_trans, functor_category, FunctorCategory, FunctorSearch,
    DEFAULT_CAP,
};
pub use functor::{is_equivalence, EquivalenceReport, Functor, FunctorDescription, NatTrans};
pub(crate) use functor::same_cat;
pub use io::{RawCategory, RawMorphism};
pub use limits::{
    binary_product, is_limit_cone, is_pullback, limit, pullback, terminal_object, Cone, Diagram,
};

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an object in its category's canonical order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ob(pub u32);

/// Index of a morphism in its category's canonical order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mor(pub u32);

impl Ob {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Mor {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Ob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismRecord {
    pub name: String,
    pub src: Ob,
    pub tgt: Ob,
}

/// A finite category with a total composition table.
#[derive(Clone)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<MorphismRecord>,
    identities: Vec<Mor>,
    out: Vec<Vec<Mor>>,
    out_pos: Vec<u32>,
    table: Vec<Vec<Mor>>,
    homs: HashMap<(Ob, Ob), Vec<Mor>>,
    ob_names: HashMap<String, Ob>,
    mor_names: HashMap<String, Mor>,
}

impl PartialEq for FinCat {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.table == other.table
    }
}

impl Eq for FinCat {}

impl fmt::Debug for FinCat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinCat")
            .field("objects", &self.objects)
            .field(
                "morphisms",
                &self
                    .morphisms
                    .iter()
                    .map(|m| {
                        format!(
                            "{}: {} -> {}",
                            m.name,
                            self.objects[m.src.idx()],
                            self.objects[m.tgt.idx()]
                        )
                    })
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

static EMPTY: [Mor; 0] = [];

impl FinCat {
    /// Assembles a category from its data, checking names, identities,
    /// endpoints of composites and the identity laws.  Associativity is
    /// checked separately by [`FinCat::check_associativity`].
    pub fn assemble<F>(
        objects: Vec<String>,
        morphisms: Vec<MorphismRecord>,
        identities: Vec<Mor>,
        mut compose: F,
    ) -> Result<FinCat>
    where
        F: FnMut(Mor, Mor) -> Option<Mor>,
    {
        let mut ob_names = HashMap::with_capacity(objects.len());
        for (i, name) in objects.iter().enumerate() {
            if ob_names.insert(name.clone(), Ob(i as u32)).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let mut mor_names = HashMap::with_capacity(morphisms.len());
        for (i, m) in morphisms.iter().enumerate() {
            if mor_names.insert(m.name.clone(), Mor(i as u32)).is_some() {
                return Err(Error::DuplicateName(m.name.clone()));
            }
            if m.src.idx() >= objects.len() || m.tgt.idx() >= objects.len() {
                return Err(Error::UnknownName(format!("endpoint of `{}`", m.name)));
            }
        }
        if identities.len() != objects.len() {
            let missing = objects.get(identities.len()).cloned().unwrap_or_default();
            return Err(Error::MissingIdentity(missing));
        }
        for (i, &id) in identities.iter().enumerate() {
            let rec = morphisms.get(id.idx()).ok_or_else(|| Error::MissingIdentity(objects[i].clone()))?;
            if rec.src.idx() != i || rec.tgt.idx() != i {
                return Err(Error::BadIdentity {
                    object: objects[i].clone(),
                    morphism: rec.name.clone(),
                });
            }
        }

        let mut out = vec![Vec::new(); objects.len()];
        let mut out_pos = vec![0u32; morphisms.len()];
        let mut homs: HashMap<(Ob, Ob), Vec<Mor>> = HashMap::new();
        for (i, m) in morphisms.iter().enumerate() {
            out_pos[i] = out[m.src.idx()].len() as u32;
            out[m.src.idx()].push(Mor(i as u32));
            homs.entry((m.src, m.tgt)).or_default().push(Mor(i as u32));
        }

        let mut table = Vec::with_capacity(morphisms.len());
        for (fi, f) in morphisms.iter().enumerate() {
            let row_len = out[f.tgt.idx()].len();
            let mut row = Vec::with_capacity(row_len);
            for &g in &out[f.tgt.idx()] {
                let gr = &morphisms[g.idx()];
                let gf = compose(g, Mor(fi as u32)).ok_or_else(|| Error::CompositionGap {
                    g: gr.name.clone(),
                    f: f.name.clone(),
                })?;
                let rec = morphisms.get(gf.idx()).ok_or_else(|| Error::CompositionGap {
                    g: gr.name.clone(),
                    f: f.name.clone(),
                })?;
                let f_is_id = identities[f.src.idx()].idx() == fi;
                let g_is_id = identities[gr.src.idx()] == g;
                if (f_is_id && gf != g) || (g_is_id && gf.idx() != fi) {
                    return Err(Error::IdentityLaw {
                        g: gr.name.clone(),
                        f: f.name.clone(),
                    });
                }
                if rec.src != f.src || rec.tgt != gr.tgt {
                    return Err(Error::EndpointMismatch {
                        g: gr.name.clone(),
                        f: f.name.clone(),
                    });
                }
                row.push(gf);
            }
            table.push(row);
        }

        Ok(FinCat {
            objects,
            morphisms,
            identities,
            out,
            out_pos,
            table,
            homs,
            ob_names,
            mor_names,
        })
    }

    /// Assembles and then checks associativity: the full set of category laws.
    pub fn validated<F>(
        objects: Vec<String>,
        morphisms: Vec<MorphismRecord>,
        identities: Vec<Mor>,
        compose: F,
    ) -> Result<FinCat>
    where
        F: FnMut(Mor, Mor) -> Option<Mor>,
    {
        let c = FinCat::assemble(objects, morphisms, identities, compose)?;
        c.check_associativity()?;
        Ok(c)
    }

    /// Checks every law exhaustively (identity laws are already enforced by
    /// construction, so this re-runs them for completeness).
    pub fn validate(&self) -> Result<()> {
        for f in self.morphisms() {
            let (x, y) = (self.src(f), self.tgt(f));
            if self.compose(self.id(y), f) != f || self.compose(f, self.id(x)) != f {
                return Err(Error::IdentityLaw {
                    g: self.mor_name(f).to_string(),
                    f: self.mor_name(self.id(x)).to_string(),
                });
            }
        }
        self.check_associativity()
    }

    pub fn check_associativity(&self) -> Result<()> {
        for f in self.morphisms() {
            for (gi, &g) in self.out[self.tgt(f).idx()].iter().enumerate() {
                let gf = self.table[f.idx()][gi];
                for (hi, &h) in self.out[self.tgt(g).idx()].iter().enumerate() {
                    let hg = self.table[g.idx()][hi];
                    let left = self.compose(h, gf);
                    let right = self.compose(hg, f);
                    if left != right {
                        return Err(Error::NonAssociative {
                            h: self.mor_name(h).to_string(),
                            g: self.mor_name(g).to_string(),
                            f: self.mor_name(f).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn num_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> impl ExactSizeIterator<Item = Ob> + Clone {
        (0..self.objects.len() as u32).map(Ob)
    }

    pub fn morphisms(&self) -> impl ExactSizeIterator<Item = Mor> + Clone {
        (0..self.morphisms.len() as u32).map(Mor)
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_records(&self) -> &[MorphismRecord] {
        &self.morphisms
    }

    pub fn ob_name(&self, x: Ob) -> &str {
        &self.objects[x.idx()]
    }

    pub fn mor_name(&self, f: Mor) -> &str {
        &self.morphisms[f.idx()].name
    }

    pub fn ob(&self, name: &str) -> Option<Ob> {
        self.ob_names.get(name).copied()
    }

    pub fn mor(&self, name: &str) -> Option<Mor> {
        self.mor_names.get(name).copied()
    }

    pub fn ob_named(&self, name: &str) -> Result<Ob> {
        self.ob(name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn mor_named(&self, name: &str) -> Result<Mor> {
        self.mor(name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn src(&self, f: Mor) -> Ob {
        self.morphisms[f.idx()].src
    }

    pub fn tgt(&self, f: Mor) -> Ob {
        self.morphisms[f.idx()].tgt
    }

    pub fn id(&self, x: Ob) -> Mor {
        self.identities[x.idx()]
    }

    pub fn is_identity(&self, f: Mor) -> bool {
        self.identities[self.src(f).idx()] == f
    }

    /// `g ∘ f`; panics if the pair is not composable.
    pub fn compose(&self, g: Mor, f: Mor) -> Mor {
        debug_assert_eq!(self.tgt(f), self.src(g), "non-composable pair");
        self.table[f.idx()][self.out_pos[g.idx()] as usize]
    }

    pub fn try_compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        (self.tgt(f) == self.src(g)).then(|| self.compose(g, f))
    }

    /// Composes a path given in application order (first morphism first).
    pub fn compose_path(&self, path: &[Mor]) -> Mor {
        let mut acc = path[0];
        for &m in &path[1..] {
            acc = self.compose(m, acc);
        }
        acc
    }

    pub fn hom(&self, x: Ob, y: Ob) -> &[Mor] {
        self.homs.get(&(x, y)).map(Vec::as_slice).unwrap_or(&EMPTY)
    }

    /// Morphisms with source `x`, in canonical order.
    pub fn out_of(&self, x: Ob) -> &[Mor] {
        &self.out[x.idx()]
    }

    pub fn inverse(&self, f: Mor) -> Option<Mor> {
        let (x, y) = (self.src(f), self.tgt(f));
        self.hom(y, x)
            .iter()
            .copied()
            .find(|&g| self.compose(g, f) == self.id(x) && self.compose(f, g) == self.id(y))
    }

    pub fn is_iso(&self, f: Mor) -> bool {
        self.inverse(f).is_some()
    }

    /// All composable pairs `(g, f)` in canonical order (by `f`, then `g`).
    pub fn composable_pairs(&self) -> impl Iterator<Item = (Mor, Mor)> + '_ {
        self.morphisms()
            .flat_map(move |f| self.out[self.tgt(f).idx()].iter().map(move |&g| (g, f)))
    }

    pub fn num_composable_pairs(&self) -> usize {
        self.table.iter().map(Vec::len).sum()
    }

    /// Least isomorphism `x → y`, if any.
    pub fn find_iso(&self, x: Ob, y: Ob) -> Option<Mor> {
        self.hom(x, y).iter().copied().find(|&f| self.is_iso(f))
    }

    pub fn is_thin(&self) -> bool {
        self.homs.values().all(|h| h.len() <= 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn arrow_tables() {
        let c = fixtures::arrow();
        let a = c.mor_named("a").unwrap();
        let (x0, x1) = (c.ob_named("0").unwrap(), c.ob_named("1").unwrap());
        assert_eq!(c.compose(a, c.id(x0)), a);
        assert_eq!(c.compose(c.id(x1), a), a);
        assert_eq!(c.hom(x0, x1), &[a]);
        assert!(c.hom(x1, x0).is_empty());
        assert!(!c.is_iso(a));
        assert!(c.is_iso(c.id(x0)));
        assert_eq!(c.num_composable_pairs(), 4);
    }

    #[test]
    fn duplicate_object_name() {
        let err = FinCat::assemble(
            vec!["x".into(), "x".into()],
            vec![],
            vec![],
            |_, _| None,
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateName("x".into()));
    }

    #[test]
    fn missing_identity() {
        let err = FinCat::assemble(vec!["x".into()], vec![], vec![], |_, _| None).unwrap_err();
        assert_eq!(err, Error::MissingIdentity("x".into()));
    }

    #[test]
    fn composition_gap() {
        let recs = vec![MorphismRecord {
            name: "id".into(),
            src: Ob(0),
            tgt: Ob(0),
        }];
        let err = FinCat::assemble(vec!["x".into()], recs, vec![Mor(0)], |_, _| None).unwrap_err();
        assert_eq!(
            err,
            Error::CompositionGap {
                g: "id".into(),
                f: "id".into()
            }
        );
    }

    #[test]
    fn non_associative_table() {
        // One object, morphisms {1, e, z} where e∘e = 1 but z absorbs only on one side.
        let recs = ["1", "e", "z"]
            .iter()
            .map(|n| MorphismRecord {
                name: n.to_string(),
                src: Ob(0),
                tgt: Ob(0),
            })
            .collect();
        let table = |g: Mor, f: Mor| -> Option<Mor> {
            Some(match (g.0, f.0) {
                (0, x) | (x, 0) => Mor(x),
                (1, 1) => Mor(0),
                (1, 2) => Mor(2),
                (2, 1) => Mor(1),
                (2, 2) => Mor(2),
                _ => unreachable!(),
            })
        };
        let err = FinCat::validated(vec!["x".into()], recs, vec![Mor(0)], table).unwrap_err();
        assert!(matches!(err, Error::NonAssociative { .. }), "{err:?}");
    }
}
