//! Input file formats: `fincat-v1` categories with an optional marking,
//! functors, strict families and squares of functors.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use corrcalc::bicat::{cat_universe, CatUniverse, Pseudofunctor};
use corrcalc::fib::{strict_family, Variance};
use corrcalc::fincat::{FinCat, Functor, FunctorDescription, NatTrans, RawCategory};
use corrcalc::marked::{validate_marking_names, MarkedCat};
use corrcalc::{Error, Result};
use serde::Deserialize;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// A category file; the marking is trivial unless the file lists one.
pub fn marked_category(path: &Path) -> Result<MarkedCat> {
    let raw: RawCategory = parse(path)?;
    marked_from_raw(&raw)
}

pub fn marked_from_raw(raw: &RawCategory) -> Result<MarkedCat> {
    let cat = Arc::new(raw.validate()?);
    match &raw.marked {
        Some(names) => validate_marking_names(&cat, names),
        None => Ok(MarkedCat::trivial(&cat)),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFunctor {
    pub source: RawCategory,
    pub target: RawCategory,
    pub ob_map: BTreeMap<String, String>,
    pub mor_map: BTreeMap<String, String>,
}

fn named_functor(source: &Arc<FinCat>, target: &Arc<FinCat>, d: &FunctorDescription) -> Result<Functor> {
    Functor::from_names(
        source.clone(),
        target.clone(),
        d.ob_map.iter().map(|(a, b)| (a.as_str(), b.as_str())),
        d.mor_map.iter().map(|(a, b)| (a.as_str(), b.as_str())),
    )
}

/// A functor file, with the marking of its target if one is listed.
pub fn functor(path: &Path) -> Result<(Functor, Option<MarkedCat>)> {
    let raw: RawFunctor = parse(path)?;
    let source = Arc::new(raw.source.validate()?);
    let target = marked_from_raw(&raw.target)?;
    let d = FunctorDescription {
        ob_map: raw.ob_map,
        mor_map: raw.mor_map,
    };
    let f = named_functor(&source, &target.cat, &d)?;
    Ok((f, raw.target.marked.is_some().then_some(target)))
}

#[derive(Deserialize, Clone, Copy)]
#[serde(rename_all = "lowercase")]
pub enum VarianceName {
    Covariant,
    Contravariant,
}

impl From<VarianceName> for Variance {
    fn from(v: VarianceName) -> Variance {
        match v {
            VarianceName::Covariant => Variance::Covariant,
            VarianceName::Contravariant => Variance::Contravariant,
        }
    }
}

/// A strict family of categories indexed by a marked base.  Functors are
/// given for the non-identity morphisms; identities act as identities.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawFamily {
    pub base: RawCategory,
    pub variance: VarianceName,
    pub categories: BTreeMap<String, RawCategory>,
    pub objects: BTreeMap<String, String>,
    pub functors: BTreeMap<String, FunctorDescription>,
}

pub struct Family {
    pub marked: MarkedCat,
    pub universe: CatUniverse,
    pub functor: Pseudofunctor,
    pub variance: Variance,
}

pub fn family(path: &Path, cap: usize) -> Result<Family> {
    let raw: RawFamily = parse(path)?;
    let marked = marked_from_raw(&raw.base)?;
    let base = &marked.cat;
    let names: Vec<&String> = raw.categories.keys().collect();
    let cats = raw
        .categories
        .values()
        .map(|c| c.validate().map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    let universe = cat_universe(&cats, cap)?;
    let slot = |name: &str| -> Result<usize> {
        let i = names
            .iter()
            .position(|n| n.as_str() == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Ok(universe.index_of(&cats[i]).expect("category in universe"))
    };
    let ob_map = base
        .objects()
        .map(|x| {
            let name = raw
                .objects
                .get(base.ob_name(x))
                .ok_or_else(|| Error::Format(format!("object `{}` has no category", base.ob_name(x))))?;
            slot(name)
        })
        .collect::<Result<Vec<_>>>()?;
    let variance: Variance = raw.variance.into();
    let functors = base
        .morphisms()
        .map(|f| {
            let (mut from, mut to) = (ob_map[base.src(f).idx()], ob_map[base.tgt(f).idx()]);
            if variance == Variance::Contravariant {
                std::mem::swap(&mut from, &mut to);
            }
            let (from, to) = (&universe.cats[from], &universe.cats[to]);
            match raw.functors.get(base.mor_name(f)) {
                Some(d) => named_functor(from, to, d),
                None if base.is_identity(f) => Ok(Functor::identity(from)),
                None => Err(Error::Format(format!("morphism `{}` has no functor", base.mor_name(f)))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let functor = strict_family(base, &universe, ob_map, &functors, variance)?;
    Ok(Family {
        marked,
        universe,
        functor,
        variance,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdge {
    pub source: String,
    pub target: String,
    pub ob_map: BTreeMap<String, String>,
    pub mor_map: BTreeMap<String, String>,
}

/// A square of functors `right ∘ top ⇒ bottom ∘ left` between named
/// categories, with filler components keyed by objects of the corner.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSquare {
    pub categories: BTreeMap<String, RawCategory>,
    pub top: RawEdge,
    pub left: RawEdge,
    pub right: RawEdge,
    pub bottom: RawEdge,
    pub filler: BTreeMap<String, String>,
}

pub struct Square {
    pub top: Functor,
    pub left: Functor,
    pub right: Functor,
    pub bottom: Functor,
    pub filler: NatTrans,
}

pub fn square(path: &Path) -> Result<Square> {
    let raw: RawSquare = parse(path)?;
    let cats: BTreeMap<&str, Arc<FinCat>> = raw
        .categories
        .iter()
        .map(|(n, c)| Ok((n.as_str(), Arc::new(c.validate()?))))
        .collect::<Result<_>>()?;
    let cat = |n: &str| cats.get(n).cloned().ok_or_else(|| Error::UnknownName(n.to_string()));
    let edge = |e: &RawEdge| -> Result<Functor> {
        let d = FunctorDescription {
            ob_map: e.ob_map.clone(),
            mor_map: e.mor_map.clone(),
        };
        named_functor(&cat(&e.source)?, &cat(&e.target)?, &d)
    };
    let (top, left, right, bottom) = (edge(&raw.top)?, edge(&raw.left)?, edge(&raw.right)?, edge(&raw.bottom)?);
    let upper = right.after(&top)?;
    let lower = bottom.after(&left)?;
    let corner = &top.source;
    let components = corner
        .objects()
        .map(|x| {
            let name = raw
                .filler
                .get(corner.ob_name(x))
                .ok_or_else(|| Error::Format(format!("filler has no component at `{}`", corner.ob_name(x))))?;
            upper.target.mor_named(name)
        })
        .collect::<Result<Vec<_>>>()?;
    let filler = NatTrans::new(upper, lower, components)?;
    Ok(Square {
        top,
        left,
        right,
        bottom,
        filler,
    })
}

/// `wrong/right` morphism names.
pub fn span_legs(c: &FinCat, text: &str) -> Result<corrcalc::span::Span> {
    let (w, r) = text
        .split_once('/')
        .ok_or_else(|| Error::Format(format!("expected `wrong/right`, got `{text}`")))?;
    let (w, r) = (c.mor_named(w.trim())?, c.mor_named(r.trim())?);
    if c.src(w) != c.src(r) {
        return Err(Error::Format(format!("legs of `{text}` do not share a source")));
    }
    Ok(corrcalc::span::Span {
        left: c.tgt(w),
        right: c.tgt(r),
        kernel: c.src(w),
        wrong_way: w,
        right_way: r,
    })
}
