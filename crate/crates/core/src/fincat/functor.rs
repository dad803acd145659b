use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::{FinCat, Mor, Ob};
use crate::error::{Error, Result};

/// True when the two handles denote equal categories.
pub(crate) fn same_cat(a: &Arc<FinCat>, b: &Arc<FinCat>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A functor between finite categories, stored as object and morphism maps.
#[derive(Clone)]
pub struct Functor {
    pub source: Arc<FinCat>,
    pub target: Arc<FinCat>,
    pub ob_map: Vec<Ob>,
    pub mor_map: Vec<Mor>,
}

impl PartialEq for Functor {
    fn eq(&self, other: &Self) -> bool {
        self.ob_map == other.ob_map
            && self.mor_map == other.mor_map
            && same_cat(&self.source, &other.source)
            && same_cat(&self.target, &other.target)
    }
}

impl fmt::Debug for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor{}", self.label())
    }
}

impl Functor {
    pub fn new(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        ob_map: Vec<Ob>,
        mor_map: Vec<Mor>,
    ) -> Result<Functor> {
        let f = Functor {
            source,
            target,
            ob_map,
            mor_map,
        };
        f.validate()?;
        Ok(f)
    }

    /// Builds a functor from its morphism map; objects follow the identities.
    pub fn from_mor_map(source: Arc<FinCat>, target: Arc<FinCat>, mor_map: Vec<Mor>) -> Result<Functor> {
        if mor_map.len() != source.num_morphisms() {
            return Err(Error::InvalidFunctor("morphism map has the wrong length".into()));
        }
        let ob_map = source
            .objects()
            .map(|x| target.src(mor_map[source.id(x).idx()]))
            .collect();
        Functor::new(source, target, ob_map, mor_map)
    }

    /// Builds a functor from name-keyed maps.
    pub fn from_names<'a>(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        ob_map: impl IntoIterator<Item = (&'a str, &'a str)>,
        mor_map: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Functor> {
        let mut obs = vec![None; source.num_objects()];
        for (x, y) in ob_map {
            obs[source.ob_named(x)?.idx()] = Some(target.ob_named(y)?);
        }
        let mut mors = vec![None; source.num_morphisms()];
        for (f, g) in mor_map {
            mors[source.mor_named(f)?.idx()] = Some(target.mor_named(g)?);
        }
        for f in source.morphisms() {
            if let Some(g) = mors[f.idx()] {
                obs[source.src(f).idx()].get_or_insert(target.src(g));
                obs[source.tgt(f).idx()].get_or_insert(target.tgt(g));
            }
        }
        for x in source.objects() {
            if mors[source.id(x).idx()].is_none() {
                if let Some(y) = obs[x.idx()] {
                    mors[source.id(x).idx()] = Some(target.id(y));
                }
            }
        }
        let ob_map = obs
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| Error::InvalidFunctor(format!("object `{}` unmapped", source.ob_name(Ob(i as u32))))))
            .collect::<Result<Vec<_>>>()?;
        let mor_map = mors
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::InvalidFunctor(format!("morphism `{}` unmapped", source.mor_name(Mor(i as u32))))))
            .collect::<Result<Vec<_>>>()?;
        Functor::new(source, target, ob_map, mor_map)
    }

    pub fn unchecked(source: Arc<FinCat>, target: Arc<FinCat>, ob_map: Vec<Ob>, mor_map: Vec<Mor>) -> Functor {
        Functor {
            source,
            target,
            ob_map,
            mor_map,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (c, d) = (&self.source, &self.target);
        if self.ob_map.len() != c.num_objects() || self.mor_map.len() != c.num_morphisms() {
            return Err(Error::InvalidFunctor("map lengths do not match the source".into()));
        }
        if self.ob_map.iter().any(|y| y.idx() >= d.num_objects())
            || self.mor_map.iter().any(|g| g.idx() >= d.num_morphisms())
        {
            return Err(Error::InvalidFunctor("image outside the target".into()));
        }
        for f in c.morphisms() {
            let g = self.mor(f);
            if d.src(g) != self.ob(c.src(f)) || d.tgt(g) != self.ob(c.tgt(f)) {
                return Err(Error::InvalidFunctor(format!(
                    "`{}` is sent to `{}` with the wrong endpoints",
                    c.mor_name(f),
                    d.mor_name(g)
                )));
            }
        }
        for x in c.objects() {
            if self.mor(c.id(x)) != d.id(self.ob(x)) {
                return Err(Error::InvalidFunctor(format!(
                    "identity of `{}` is not preserved",
                    c.ob_name(x)
                )));
            }
        }
        for (g, f) in c.composable_pairs() {
            if self.mor(c.compose(g, f)) != d.compose(self.mor(g), self.mor(f)) {
                return Err(Error::InvalidFunctor(format!(
                    "composite `{}` after `{}` is not preserved",
                    c.mor_name(g),
                    c.mor_name(f)
                )));
            }
        }
        Ok(())
    }

    pub fn identity(c: &Arc<FinCat>) -> Functor {
        Functor::unchecked(c.clone(), c.clone(), c.objects().collect(), c.morphisms().collect())
    }

    /// The constant functor at `d`.
    pub fn constant(source: &Arc<FinCat>, target: &Arc<FinCat>, d: Ob) -> Functor {
        Functor::unchecked(
            source.clone(),
            target.clone(),
            vec![d; source.num_objects()],
            vec![target.id(d); source.num_morphisms()],
        )
    }

    pub fn ob(&self, x: Ob) -> Ob {
        self.ob_map[x.idx()]
    }

    pub fn mor(&self, f: Mor) -> Mor {
        self.mor_map[f.idx()]
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Functor) -> Result<Functor> {
        if !same_cat(&inner.target, &self.source) {
            return Err(Error::BoundaryMismatch("functors are not composable".into()));
        }
        Ok(self.after_unchecked(inner))
    }

    pub(crate) fn after_unchecked(&self, inner: &Functor) -> Functor {
        Functor::unchecked(
            inner.source.clone(),
            self.target.clone(),
            inner.ob_map.iter().map(|&x| self.ob(x)).collect(),
            inner.mor_map.iter().map(|&f| self.mor(f)).collect(),
        )
    }

    pub fn is_identity(&self) -> bool {
        same_cat(&self.source, &self.target)
            && self.ob_map.iter().enumerate().all(|(i, o)| o.idx() == i)
            && self.mor_map.iter().enumerate().all(|(i, m)| m.idx() == i)
    }

    /// Readable label listing the morphism images.
    pub fn label(&self) -> String {
        let parts: Vec<&str> = self.mor_map.iter().map(|&g| self.target.mor_name(g)).collect();
        format!("<{}>", parts.join(","))
    }

    /// Objects and morphisms by name, for reports.
    pub fn describe(&self) -> FunctorDescription {
        FunctorDescription {
            ob_map: self
                .source
                .objects()
                .map(|x| (self.source.ob_name(x).to_string(), self.target.ob_name(self.ob(x)).to_string()))
                .collect(),
            mor_map: self
                .source
                .morphisms()
                .map(|f| (self.source.mor_name(f).to_string(), self.target.mor_name(self.mor(f)).to_string()))
                .collect(),
        }
    }
}

/// Name-level view of a functor used in reports and the functor file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorDescription {
    pub ob_map: std::collections::BTreeMap<String, String>,
    pub mor_map: std::collections::BTreeMap<String, String>,
}

/// A natural transformation between parallel functors.
#[derive(Clone)]
pub struct NatTrans {
    pub source: Functor,
    pub target: Functor,
    pub components: Vec<Mor>,
}

impl PartialEq for NatTrans {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.source == other.source && self.target == other.target
    }
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let comps: Vec<&str> = self
            .components
            .iter()
            .map(|&m| self.source.target.mor_name(m))
            .collect();
        write!(f, "NatTrans[{}]", comps.join(","))
    }
}

impl NatTrans {
    pub fn new(source: Functor, target: Functor, components: Vec<Mor>) -> Result<NatTrans> {
        let t = NatTrans {
            source,
            target,
            components,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn unchecked(source: Functor, target: Functor, components: Vec<Mor>) -> NatTrans {
        NatTrans {
            source,
            target,
            components,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (f, g) = (&self.source, &self.target);
        if !same_cat(&f.source, &g.source) || !same_cat(&f.target, &g.target) {
            return Err(Error::InvalidTransformation("functors are not parallel".into()));
        }
        let (c, d) = (&f.source, &f.target);
        if self.components.len() != c.num_objects() {
            return Err(Error::InvalidTransformation("wrong number of components".into()));
        }
        for x in c.objects() {
            let m = self.at(x);
            if m.idx() >= d.num_morphisms() || d.src(m) != f.ob(x) || d.tgt(m) != g.ob(x) {
                return Err(Error::InvalidTransformation(format!(
                    "component at `{}` has the wrong endpoints",
                    c.ob_name(x)
                )));
            }
        }
        for h in c.morphisms() {
            let (x, y) = (c.src(h), c.tgt(h));
            if d.compose(g.mor(h), self.at(x)) != d.compose(self.at(y), f.mor(h)) {
                return Err(Error::InvalidTransformation(format!(
                    "naturality fails at `{}`",
                    c.mor_name(h)
                )));
            }
        }
        Ok(())
    }

    pub fn identity(f: &Functor) -> NatTrans {
        let d = &f.target;
        NatTrans::unchecked(f.clone(), f.clone(), f.ob_map.iter().map(|&y| d.id(y)).collect())
    }

    pub fn at(&self, x: Ob) -> Mor {
        self.components[x.idx()]
    }

    /// Vertical composite `self ∘ inner`.
    pub fn after(&self, inner: &NatTrans) -> Result<NatTrans> {
        if inner.target != self.source {
            return Err(Error::BoundaryMismatch("vertical composite of non-matching transformations".into()));
        }
        let d = &self.source.target;
        Ok(NatTrans::unchecked(
            inner.source.clone(),
            self.target.clone(),
            inner
                .components
                .iter()
                .zip(&self.components)
                .map(|(&a, &b)| d.compose(b, a))
                .collect(),
        ))
    }

    /// Horizontal composite `self * inner`, with `inner: F ⇒ F'` and `self: G ⇒ G'`.
    pub fn horizontal(&self, inner: &NatTrans) -> Result<NatTrans> {
        if !same_cat(&inner.source.target, &self.source.source) {
            return Err(Error::BoundaryMismatch("horizontal composite of non-composable transformations".into()));
        }
        let e = &self.source.target;
        let g2 = &self.target;
        let comps = inner
            .source
            .source
            .objects()
            .map(|x| e.compose(g2.mor(inner.at(x)), self.at(inner.source.ob(x))))
            .collect();
        Ok(NatTrans::unchecked(
            self.source.after_unchecked(&inner.source),
            self.target.after_unchecked(&inner.target),
            comps,
        ))
    }

    /// `G α` for a functor `G` after the transformation `α`.
    pub fn whisker_left(g: &Functor, alpha: &NatTrans) -> Result<NatTrans> {
        NatTrans::identity(g).horizontal(alpha)
    }

    /// `β F` for a transformation `β` after the functor `F`.
    pub fn whisker_right(beta: &NatTrans, f: &Functor) -> Result<NatTrans> {
        beta.horizontal(&NatTrans::identity(f))
    }

    pub fn inverse(&self) -> Option<NatTrans> {
        let d = &self.source.target;
        let comps = self
            .components
            .iter()
            .map(|&m| d.inverse(m))
            .collect::<Option<Vec<_>>>()?;
        Some(NatTrans::unchecked(self.target.clone(), self.source.clone(), comps))
    }

    pub fn is_iso(&self) -> bool {
        let d = &self.source.target;
        self.components.iter().all(|&m| d.is_iso(m))
    }

    /// First object whose component is not invertible.
    pub fn first_non_iso(&self) -> Option<Ob> {
        let d = &self.source.target;
        self.source.source.objects().find(|&x| !d.is_iso(self.at(x)))
    }

    pub fn is_identity(&self) -> bool {
        let d = &self.source.target;
        self.source == self.target && self.components.iter().all(|&m| d.is_identity(m))
    }
}

/// Outcome of [`is_equivalence`].
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub fully_faithful: bool,
    pub essentially_surjective: bool,
    pub quasi_inverse: Option<Functor>,
    /// First obstruction found, by name.
    pub witness: Option<String>,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.fully_faithful && self.essentially_surjective
    }
}

/// Decides whether `f` is an equivalence and, if so, builds a quasi-inverse.
pub fn is_equivalence(f: &Functor) -> EquivalenceReport {
    let (c, d) = (&f.source, &f.target);
    let mut witness = None;
    let mut fully_faithful = true;
    'ff: for x in c.objects() {
        for y in c.objects() {
            let hom = c.hom(x, y);
            let image = d.hom(f.ob(x), f.ob(y));
            let mut seen: Vec<Mor> = hom.iter().map(|&h| f.mor(h)).collect();
            seen.sort();
            seen.dedup();
            if seen.len() != hom.len() || hom.len() != image.len() {
                fully_faithful = false;
                witness = Some(format!(
                    "hom({}, {}) has {} elements but its image hom has {}",
                    c.ob_name(x),
                    c.ob_name(y),
                    hom.len(),
                    image.len()
                ));
                break 'ff;
            }
        }
    }
    let mut preimage = Vec::with_capacity(d.num_objects());
    let mut essentially_surjective = true;
    for e in d.objects() {
        let found = c
            .objects()
            .find_map(|x| d.find_iso(f.ob(x), e).map(|iso| (x, iso)));
        match found {
            Some(p) => preimage.push(p),
            None => {
                essentially_surjective = false;
                if witness.is_none() {
                    witness = Some(format!("`{}` is not isomorphic to any image object", d.ob_name(e)));
                }
                break;
            }
        }
    }
    let quasi_inverse = (fully_faithful && essentially_surjective).then(|| {
        let mor_map = d
            .morphisms()
            .map(|k| {
                let (s, t) = (d.src(k), d.tgt(k));
                let (xs, is) = preimage[s.idx()];
                let (xt, it) = preimage[t.idx()];
                let inv_t = d.inverse(it).expect("iso");
                let wanted = d.compose(inv_t, d.compose(k, is));
                *c.hom(xs, xt)
                    .iter()
                    .find(|&&h| f.mor(h) == wanted)
                    .expect("fully faithful")
            })
            .collect();
        Functor::unchecked(
            d.clone(),
            c.clone(),
            preimage.iter().map(|p| p.0).collect(),
            mor_map,
        )
    });
    EquivalenceReport {
        fully_faithful,
        essentially_surjective,
        quasi_inverse,
        witness,
    }
}
