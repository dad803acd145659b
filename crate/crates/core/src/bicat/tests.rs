use std::sync::Arc;

use super::*;
use crate::fincat::{FinCat, Functor, DEFAULT_CAP};
use crate::fixtures;
use crate::twocat::TwoCat;

fn arc(c: FinCat) -> Arc<FinCat> {
    Arc::new(c)
}

/// Same objects, same morphism names and the same composites by name.
fn same_by_names(a: &FinCat, b: &FinCat) -> bool {
    if a.object_names() != b.object_names() || a.num_morphisms() != b.num_morphisms() {
        return false;
    }
    let to_b = |f| b.mor(a.mor_name(f));
    a.morphisms().all(|f| {
        to_b(f).is_some_and(|g| a.ob_name(a.src(f)) == b.ob_name(b.src(g)) && a.ob_name(a.tgt(f)) == b.ob_name(b.tgt(g)))
    }) && a
        .composable_pairs()
        .all(|(g, f)| to_b(a.compose(g, f)) == Some(b.compose(to_b(g).unwrap(), to_b(f).unwrap())))
}

#[test]
fn locally_discrete_is_valid_and_core_recovers_it() {
    for c in [fixtures::one(), fixtures::arrow(), fixtures::p2(), fixtures::fs(3)] {
        let c = arc(c);
        let ld = locally_discrete(&c);
        ld.bicat.validate().unwrap();
        let core = core1(&ld.bicat).unwrap();
        assert!(core.strict);
        assert!(same_by_names(&core.cat, &c));
        for f in c.morphisms() {
            assert_eq!(ld.mor(&ld.cell(f)), f);
        }
    }
}

#[test]
fn cat_universe_sizes() {
    let one = arc(fixtures::one());
    let arrow = arc(fixtures::arrow());
    let u = cat_universe(std::slice::from_ref(&one), DEFAULT_CAP).unwrap();
    assert_eq!(u.bicat.n(), 1);
    assert_eq!(u.bicat.hom(0, 0).num_objects(), 1);
    assert_eq!(u.bicat.hom(0, 0).num_morphisms(), 1);
    let core = core1(&u.bicat).unwrap();
    assert_eq!((core.cat.num_objects(), core.cat.num_morphisms()), (1, 1));

    let u = cat_universe(&[one, arrow], DEFAULT_CAP).unwrap();
    u.bicat.validate().unwrap();
    assert_eq!(u.bicat.hom(0, 1).num_objects(), 2);
    assert_eq!(u.bicat.hom(1, 1).num_objects(), 3);
    // Fun(ONE, ARROW) is ARROW again: one transformation between the two points
    assert_eq!(u.bicat.hom(0, 1).num_morphisms(), 3);
}

#[test]
fn cat_universe_of_p2_is_monotone_maps() {
    let p2 = arc(fixtures::p2());
    let u = cat_universe(std::slice::from_ref(&p2), DEFAULT_CAP).unwrap();
    u.bicat.validate().unwrap();
    let hom = u.bicat.hom(0, 0);
    let maps = monotone_maps(&p2);
    assert_eq!(hom.num_objects(), maps.len());
    // morphisms are pointwise comparisons between monotone maps
    let leq = |a: usize, b: usize| p2.hom(crate::fincat::Ob(a as u32), crate::fincat::Ob(b as u32)).len() == 1;
    let pairs = maps
        .iter()
        .flat_map(|f| maps.iter().map(move |g| (f, g)))
        .filter(|(f, g)| f.iter().zip(g.iter()).all(|(&a, &b)| leq(a, b)))
        .count();
    assert_eq!(hom.num_morphisms(), pairs);
    assert!(hom.is_thin());
}

fn monotone_maps(p: &FinCat) -> Vec<Vec<usize>> {
    let n = p.num_objects();
    let leq = |a: usize, b: usize| !p.hom(crate::fincat::Ob(a as u32), crate::fincat::Ob(b as u32)).is_empty();
    let mut out = Vec::new();
    for code in 0..n.pow(n as u32) {
        let m: Vec<usize> = (0..n).map(|i| (code / n.pow(i as u32)) % n).collect();
        if (0..n).all(|a| (0..n).all(|b| !leq(a, b) || leq(m[a], m[b]))) {
            out.push(m);
        }
    }
    out
}

#[test]
fn perturbed_associator_is_not_invertible() {
    let one = arc(fixtures::one());
    let arrow = arc(fixtures::arrow());
    let u = cat_universe(&[one, arrow], DEFAULT_CAP).unwrap();
    let mut b = Bicat::clone(&u.bicat);
    // in Fun(ONE, ARROW) the transformation 0 ⇒ 1 is not invertible
    let hom = b.hom(0, 1).clone();
    let non_iso = hom.morphisms().find(|&m| !hom.is_identity(m)).unwrap();
    let s = hom.src(non_iso);
    let unit0 = b.unit(0);
    b.perturb_associator(0, 0, 0, 1, s, unit0, unit0, non_iso);
    assert!(matches!(b.validate(), Err(Error::NonInvertibleCoherence(_))));
}

#[test]
fn op_involutions_and_commutation() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let b = &*u.bicat;
    assert_eq!(op1(&op1(b)), *b);
    assert_eq!(op2(&op2(b)), *b);
    assert_eq!(op1(&op2(b)), op2(&op1(b)));
    op1(b).validate().unwrap();
    op2(b).validate().unwrap();
    let ld = locally_discrete(&arc(fixtures::arrow()));
    assert_eq!(op2(&ld.bicat), *ld.bicat);
}

#[test]
fn full_specification_gives_back_the_bicategory() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let b = &*u.bicat;
    let sub = sub_bicat_by_spec(b, &Specification2::everything(b)).unwrap();
    assert_eq!(sub.bicat, *b);
}

#[test]
fn invertible_two_cells_form_a_sub_bicategory() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let b = &*u.bicat;
    let spec = Specification2 {
        objects: (0..b.n()).collect(),
        one_cells: b.one_cells().collect(),
        two_cells: b.two_cells().filter(|a| b.is_invertible(a)).collect(),
    };
    let sub = sub_bicat_by_spec(b, &spec).unwrap();
    sub.bicat.validate().unwrap();
    assert_eq!(sub.bicat.num_two_cells(), b.num_one_cells());
    // idempotent
    let again = sub_bicat_by_spec(&sub.bicat, &Specification2::everything(&sub.bicat)).unwrap();
    assert_eq!(again.bicat, sub.bicat);
}

#[test]
fn unclosed_specification_is_rejected() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let b = &*u.bicat;
    let mut spec = Specification2::everything(b);
    let id = b.identity(&1);
    spec.one_cells.remove(&id);
    assert!(matches!(sub_bicat_by_spec(b, &spec), Err(Error::NotClosed(_))));
}

#[test]
fn identity_pseudofunctor_and_perturbation() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let id = Pseudofunctor::identity(&u.bicat);
    id.validate().unwrap();
    let twice = id.after(&id).unwrap();
    assert_eq!(twice, id);
    assert!(icon_iso(&id, &twice).is_some());

    let mut bad = id.clone();
    let b = &u.bicat;
    let hom = b.hom(0, 1);
    let (g, f) = (hom.objects().next().unwrap(), b.unit(0));
    let gf = b.comp_ob(0, 0, 1, g, f);
    let other = hom.objects().find(|&o| o != gf).unwrap();
    let wrong = hom.hom(gf, other).first().copied().or_else(|| hom.hom(other, gf).first().copied()).unwrap();
    bad.perturb_compositor(0, 0, 1, g, f, wrong);
    assert!(matches!(bad.validate(), Err(Error::CoherenceFailure(_))));
}

#[test]
fn bicat_json_round_trip() {
    let u = cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap();
    let text = u.bicat.to_json();
    let back = Bicat::from_json(&text).unwrap();
    assert_eq!(back, *u.bicat);
    let broken = text.replacen("bicat-v1", "bicat-v0", 1);
    assert!(matches!(Bicat::from_json(&broken), Err(Error::Format(_))));
}

#[test]
fn adjunctions_in_the_universe_match_functor_adjunctions() {
    let one = arc(fixtures::one());
    let arrow = arc(fixtures::arrow());
    let u = cat_universe(&[one.clone(), arrow.clone()], DEFAULT_CAP).unwrap();
    let bang = Functor::constant(&arrow, &one, crate::fincat::Ob(0));
    let cell = u.cell1_of(&bang).unwrap();
    let adj = u.bicat.find_right_adjoint(&cell).unwrap();
    let right = u.functor(&adj.right);
    // the right adjoint of ARROW → ONE picks the terminal object 1
    assert_eq!(arrow.ob_name(right.ob(crate::fincat::Ob(0))), "1");
}
