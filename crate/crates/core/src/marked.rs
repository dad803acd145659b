//! Markings, base change and marked comma categories.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{comma_filtered, is_pullback, pullback, Comma, Cone, FinCat, Functor, Mor, NatTrans, Ob};

/// Chosen pullbacks keyed by `(marked f, g)` with a common target.  The
/// cone's first leg goes to `src f`, the second to `src g`.
pub type Certificate = BTreeMap<(Mor, Mor), Cone>;

/// A category with a marking: identities included, closed under composition.
#[derive(Clone, Debug)]
pub struct MarkedCat {
    pub cat: Arc<FinCat>,
    marked: Vec<bool>,
    pub certificate: Option<Arc<Certificate>>,
}

impl PartialEq for MarkedCat {
    fn eq(&self, other: &Self) -> bool {
        self.cat == other.cat && self.marked == other.marked
    }
}

impl MarkedCat {
    pub fn is_marked(&self, f: Mor) -> bool {
        self.marked[f.idx()]
    }

    pub fn marked(&self) -> impl Iterator<Item = Mor> + '_ {
        self.cat.morphisms().filter(move |&f| self.marked[f.idx()])
    }

    pub fn marked_names(&self) -> Vec<String> {
        self.marked().map(|f| self.cat.mor_name(f).to_string()).collect()
    }

    /// Every morphism marked.
    pub fn maximal(cat: &Arc<FinCat>) -> MarkedCat {
        MarkedCat {
            cat: cat.clone(),
            marked: vec![true; cat.num_morphisms()],
            certificate: None,
        }
    }

    /// Exactly the isomorphisms marked.
    pub fn trivial(cat: &Arc<FinCat>) -> MarkedCat {
        MarkedCat {
            cat: cat.clone(),
            marked: cat.morphisms().map(|f| cat.is_iso(f)).collect(),
            certificate: None,
        }
    }

    /// The certified pullback of marked `f` along `g`.
    pub fn certified(&self, f: Mor, g: Mor) -> Result<&Cone> {
        self.certificate
            .as_ref()
            .and_then(|c| c.get(&(f, g)))
            .ok_or_else(|| {
                Error::MissingCertificate(format!(
                    "`{}` along `{}`",
                    self.cat.mor_name(f),
                    self.cat.mor_name(g)
                ))
            })
    }

    pub fn has_certificate(&self) -> bool {
        self.certificate.is_some()
    }

    /// Same marking, certificate dropped.
    pub fn uncertified(&self) -> MarkedCat {
        MarkedCat {
            certificate: None,
            ..self.clone()
        }
    }
}

/// Checks that `marking` (plus identities) is closed under composition.
pub fn validate_marking(c: &Arc<FinCat>, marking: &[Mor]) -> Result<MarkedCat> {
    let mut marked = vec![false; c.num_morphisms()];
    for &f in marking {
        if f.idx() >= marked.len() {
            return Err(Error::UnknownName(format!("{f}")));
        }
        marked[f.idx()] = true;
    }
    for x in c.objects() {
        marked[c.id(x).idx()] = true;
    }
    for (g, f) in c.composable_pairs() {
        if marked[f.idx()] && marked[g.idx()] && !marked[c.compose(g, f).idx()] {
            return Err(Error::NotClosed(format!(
                "`{}` after `{}` is not marked",
                c.mor_name(g),
                c.mor_name(f)
            )));
        }
    }
    Ok(MarkedCat {
        cat: c.clone(),
        marked,
        certificate: None,
    })
}

/// Name-based front end for [`validate_marking`].
pub fn validate_marking_names(c: &Arc<FinCat>, names: &[String]) -> Result<MarkedCat> {
    let mors = names.iter().map(|n| c.mor_named(n)).collect::<Result<Vec<_>>>()?;
    validate_marking(c, &mors)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseChangeCounterexample {
    pub marked: String,
    pub along: String,
    pub reason: String,
}

/// Outcome of [`has_base_change`]; on success `marked` carries the certificate.
#[derive(Clone, Debug)]
pub struct BaseChangeReport {
    pub holds: bool,
    pub counterexample: Option<BaseChangeCounterexample>,
    pub marked: MarkedCat,
}

fn base_change_pairs(m: &MarkedCat) -> Vec<(Mor, Mor)> {
    let c = &m.cat;
    let mut pairs = Vec::new();
    for f in m.marked() {
        for g in c.morphisms() {
            if c.tgt(g) == c.tgt(f) {
                pairs.push((f, g));
            }
        }
    }
    pairs
}

fn check_pair(m: &MarkedCat, f: Mor, g: Mor) -> std::result::Result<Cone, BaseChangeCounterexample> {
    let c = &m.cat;
    let fail = |reason: String| BaseChangeCounterexample {
        marked: c.mor_name(f).to_string(),
        along: c.mor_name(g).to_string(),
        reason,
    };
    match pullback(c, f, g) {
        Ok(cone) if m.is_marked(cone.legs[1]) => Ok(cone),
        Ok(cone) => Err(fail(format!("pulled-back leg `{}` is not marked", c.mor_name(cone.legs[1])))),
        Err(_) => Err(fail(format!(
            "no pullback of the cospan {} -> {} <- {}",
            c.ob_name(c.src(f)),
            c.ob_name(c.tgt(f)),
            c.ob_name(c.src(g))
        ))),
    }
}

/// Decides whether pullbacks of marked maps along arbitrary maps exist and
/// are marked; stops at the first failure in canonical order.
pub fn has_base_change(m: &MarkedCat) -> BaseChangeReport {
    let pairs = base_change_pairs(m);
    let mut cert = Certificate::new();
    for chunk in pairs.chunks(64) {
        let results: Vec<_> = chunk.par_iter().map(|&(f, g)| check_pair(m, f, g)).collect();
        for (&(f, g), r) in chunk.iter().zip(results) {
            match r {
                Ok(cone) => {
                    cert.insert((f, g), cone);
                }
                Err(ce) => {
                    return BaseChangeReport {
                        holds: false,
                        counterexample: Some(ce),
                        marked: m.uncertified(),
                    };
                }
            }
        }
    }
    BaseChangeReport {
        holds: true,
        counterexample: None,
        marked: MarkedCat {
            certificate: Some(Arc::new(cert)),
            ..m.clone()
        },
    }
}

/// Certifies the marking, failing with [`Error::BaseChangeFails`].
pub fn certify(m: &MarkedCat) -> Result<MarkedCat> {
    let r = has_base_change(m);
    match r.counterexample {
        None => Ok(r.marked),
        Some(ce) => Err(Error::BaseChangeFails(format!(
            "`{}` along `{}`: {}",
            ce.marked, ce.along, ce.reason
        ))),
    }
}

/// A partial certificate: only the pairs whose pullback exists with a marked
/// leg are recorded.  Composition then works for exactly those cospans.
pub fn certify_partial(m: &MarkedCat) -> MarkedCat {
    certify_pairs(m, &base_change_pairs(m))
}

/// Certifies only the given `(marked, along)` cospans, skipping those whose
/// pullback is missing or has an unmarked leg.
pub fn certify_pairs(m: &MarkedCat, pairs: &[(Mor, Mor)]) -> MarkedCat {
    let cones: Vec<Option<Cone>> = pairs
        .par_iter()
        .map(|&(f, g)| check_pair(m, f, g).ok())
        .collect();
    let cert: Certificate = pairs
        .iter()
        .zip(cones)
        .filter_map(|(&pair, cone)| cone.map(|c| (pair, c)))
        .collect();
    MarkedCat {
        certificate: Some(Arc::new(cert)),
        ..m.clone()
    }
}

/// The marked comma category `D ↓♯ E` of a functor `p: E → D`.
#[derive(Clone, Debug)]
pub struct MarkedComma {
    /// Objects `(x, e, α: x → p e)` with `α` marked.
    pub comma: Comma,
    /// `(x, e, α) ↦ x`.
    pub proj: Functor,
    /// `e ↦ (p e, e, id)`.
    pub incl: Functor,
}

pub fn marked_comma(m: &MarkedCat, p: &Functor, cap: usize) -> Result<MarkedComma> {
    if *p.target != *m.cat {
        return Err(Error::PreconditionFailed("functor does not land in the marked category".into()));
    }
    let id = Functor::identity(&m.cat);
    let comma = comma_filtered(&id, p, cap, |_, _, alpha| m.is_marked(alpha))?;
    let proj = comma.left.clone();
    let e = &p.source;
    let ob_map: Vec<Ob> = e
        .objects()
        .map(|x| comma.find(p.ob(x), x, m.cat.id(p.ob(x))).expect("identity object"))
        .collect();
    let cc = &comma.cat;
    let mor_map: Vec<Mor> = e
        .morphisms()
        .map(|h| {
            let (s, t) = (ob_map[e.src(h).idx()], ob_map[e.tgt(h).idx()]);
            *cc.hom(s, t)
                .iter()
                .find(|&&k| comma.morphisms[k.idx()] == (p.mor(h), h))
                .expect("inclusion morphism")
        })
        .collect();
    let incl = Functor::unchecked(e.clone(), cc.clone(), ob_map, mor_map);
    Ok(MarkedComma { comma, proj, incl })
}

/// Checks that `f` maps marked to marked and certified squares to pullbacks.
fn check_marked_functor(f: &Functor, name: &str, dom: &MarkedCat, cod: &MarkedCat) -> Result<()> {
    let c = &dom.cat;
    let d = &cod.cat;
    for m in dom.marked() {
        if !cod.is_marked(f.mor(m)) {
            return Err(Error::PreconditionFailed(format!(
                "{name} sends marked `{}` to unmarked `{}`",
                c.mor_name(m),
                d.mor_name(f.mor(m))
            )));
        }
    }
    let cert = dom.certificate.as_ref().ok_or_else(|| {
        Error::PreconditionFailed("source marking carries no base-change certificate".into())
    })?;
    for (&(a, b), cone) in cert.iter() {
        let ok = is_pullback(d, f.mor(a), f.mor(b), f.mor(cone.legs[0]), f.mor(cone.legs[1]));
        if !ok {
            return Err(Error::PreconditionFailed(format!(
                "{name} does not preserve the pullback of `{}` along `{}`",
                c.mor_name(a),
                c.mor_name(b)
            )));
        }
    }
    Ok(())
}

/// Whether every marked naturality square of `psi: F0 ⇒ F1` is a pullback.
pub fn is_base_change_exact(psi: &NatTrans, dom: &MarkedCat, cod: &MarkedCat) -> Result<bool> {
    let (f0, f1) = (&psi.source, &psi.target);
    check_marked_functor(f0, "source functor", dom, cod)?;
    check_marked_functor(f1, "target functor", dom, cod)?;
    let d = &cod.cat;
    let c = &dom.cat;
    Ok(dom.marked().all(|m| {
        let (x, y) = (c.src(m), c.tgt(m));
        is_pullback(d, f1.mor(m), psi.at(y), psi.at(x), f0.mor(m))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::DEFAULT_CAP;
    use crate::fixtures;

    fn arrow_a() -> MarkedCat {
        let c = Arc::new(fixtures::arrow());
        validate_marking_names(&c, &["a".into()]).unwrap()
    }

    #[test]
    fn arrow_marking() {
        let m = arrow_a();
        assert_eq!(m.marked_names(), vec!["id_0", "id_1", "a"]);
        assert!(has_base_change(&m).holds);
    }

    #[test]
    fn chain_not_closed() {
        let c = Arc::new(fixtures::chain(3));
        let err = validate_marking_names(&c, &["0->1".into(), "1->2".into()]).unwrap_err();
        assert!(matches!(err, Error::NotClosed(_)));
    }

    #[test]
    fn trivial_marking_has_base_change() {
        for c in [fixtures::arrow(), fixtures::p2(), fixtures::fs(2), fixtures::discrete_two()] {
            let c = Arc::new(c);
            assert!(has_base_change(&MarkedCat::trivial(&c)).holds);
        }
    }

    #[test]
    fn fs4_fails_at_two_three() {
        let c = Arc::new(fixtures::fs(4));
        let r = has_base_change(&MarkedCat::maximal(&c));
        let ce = r.counterexample.unwrap();
        assert_eq!(ce.marked, "2->1:[0,0]");
        assert_eq!(ce.along, "3->1:[0,0,0]");
    }

    #[test]
    fn marked_comma_over_point() {
        let m = arrow_a();
        let one = Arc::new(fixtures::one());
        let p = Functor::constant(&one, &m.cat, m.cat.ob_named("1").unwrap());
        let mc = marked_comma(&m, &p, DEFAULT_CAP).unwrap();
        assert_eq!(mc.comma.cat.num_objects(), 2);
        assert_eq!(mc.comma.cat.num_morphisms(), 3);
        mc.comma.cat.validate().unwrap();
        mc.incl.validate().unwrap();
    }

    #[test]
    fn marked_comma_trivial_is_equivalent() {
        let c = Arc::new(fixtures::p2());
        let m = MarkedCat::trivial(&c);
        let mc = marked_comma(&m, &Functor::identity(&c), DEFAULT_CAP).unwrap();
        assert!(crate::fincat::is_equivalence(&mc.proj).holds());
    }

    #[test]
    fn base_change_exact_examples() {
        let d0 = certify(&arrow_a()).unwrap();
        let p2 = Arc::new(fixtures::p2());
        let d1 = certify(&MarkedCat::maximal(&p2)).unwrap();
        let f0 = Functor::from_names(d0.cat.clone(), p2.clone(), [], [("a", "{}<={1}")]).unwrap();
        let f1 = Functor::from_names(d0.cat.clone(), p2.clone(), [], [("a", "{2}<={1,2}")]).unwrap();
        let psi = NatTrans::new(
            f0.clone(),
            f1.clone(),
            vec![p2.mor_named("{}<={2}").unwrap(), p2.mor_named("{1}<={1,2}").unwrap()],
        )
        .unwrap();
        assert!(is_base_change_exact(&psi, &d0, &d1).unwrap());
        let g0 = Functor::from_names(d0.cat.clone(), p2.clone(), [], [("a", "{}<={1,2}")]).unwrap();
        let phi = NatTrans::new(
            g0,
            f1,
            vec![p2.mor_named("{}<={2}").unwrap(), p2.mor_named("{1,2}<={1,2}").unwrap()],
        )
        .unwrap();
        assert!(!is_base_change_exact(&phi, &d0, &d1).unwrap());
        assert!(is_base_change_exact(&NatTrans::identity(&f0), &d0, &d1).unwrap());
    }
}
