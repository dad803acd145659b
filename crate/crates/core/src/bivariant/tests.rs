use std::sync::Arc;

use super::*;
use crate::bicat::{cat_universe, CatUniverse};
use crate::fib::{check_bicartesian_base_change, grothendieck, strict_family, Orientation, Variance};
use crate::fincat::{FinCat, Functor, DEFAULT_CAP};
use crate::fixtures;
use crate::marked::{certify, validate_marking_names};
use crate::span::build_corr;
use crate::twocat::TwoCat;

fn arc(c: FinCat) -> Arc<FinCat> {
    Arc::new(c)
}

fn arrow_a() -> MarkedCat {
    certify(&validate_marking_names(&arc(fixtures::arrow()), &["a".to_string()]).unwrap()).unwrap()
}

fn p2_all() -> MarkedCat {
    certify(&MarkedCat::maximal(&arc(fixtures::p2()))).unwrap()
}

/// A covariant family on ARROW with the two given fibres and image of `a`.
fn arrow_family(u: &CatUniverse, at0: usize, at1: usize, along: Functor) -> Pseudofunctor {
    let base = arc(fixtures::arrow());
    let functors: Vec<Functor> = base
        .morphisms()
        .map(|f| match (base.src(f).idx(), base.tgt(f).idx()) {
            (0, 1) => along.clone(),
            (i, _) => Functor::identity(&u.cats[if i == 0 { at0 } else { at1 }]),
        })
        .collect();
    strict_family(&base, u, vec![at0, at1], &functors, Variance::Covariant).unwrap()
}

fn one_arrow() -> CatUniverse {
    cat_universe(&[arc(fixtures::one()), arc(fixtures::arrow())], DEFAULT_CAP).unwrap()
}

#[test]
fn constant_family_is_bivariant() {
    let m = arrow_a();
    let u = one_arrow();
    for i in 0..2 {
        let h = constant_family(&m.cat, &u, i).unwrap();
        let report = check_bivariant(&h, &m).unwrap();
        assert!(report.summary().holds);
        assert_eq!(report.adjoints.len(), 3);
    }
}

#[test]
fn collapsing_the_arrow_breaks_base_change() {
    let m = arrow_a();
    let u = one_arrow();
    let bang = Functor::constant(&u.cats[1], &u.cats[0], Ob(0));
    let h = arrow_family(&u, 1, 0, bang);
    let err = check_bivariant(&h, &m).unwrap_err();
    assert!(matches!(err, Error::BaseChangeFails(_)), "{err}");
    let summary = bivariance_summary(&h, &m).unwrap();
    assert!(!summary.holds);
}

#[test]
fn picking_the_terminal_object_has_no_right_adjoint() {
    let m = arrow_a();
    let u = one_arrow();
    let top = Functor::constant(&u.cats[0], &u.cats[1], Ob(1));
    let h = arrow_family(&u, 0, 1, top);
    assert!(matches!(check_bivariant(&h, &m), Err(Error::NoAdjoint(_))));
    // the initial object is fine
    let bottom = Functor::constant(&u.cats[0], &u.cats[1], Ob(0));
    check_bivariant(&arrow_family(&u, 0, 1, bottom), &m).unwrap();
}

#[test]
fn self_indexing_is_bivariant() {
    for m in [arrow_a(), p2_all()] {
        let (_, h) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
        let report = check_bivariant(&h, &m).unwrap();
        assert_eq!(report.squares.len(), m.certificate.as_ref().unwrap().len());
    }
}

/// Families with their bivariance decided independently of the checker.
fn dictionary_cases() -> Vec<(&'static str, MarkedCat, CatUniverse, Pseudofunctor, bool)> {
    let mut out = Vec::new();
    let u = one_arrow();
    let m = arrow_a();
    out.push(("constant point", m.clone(), u.clone(), constant_family(&m.cat, &u, 0).unwrap(), true));
    out.push(("constant arrow", m.clone(), u.clone(), constant_family(&m.cat, &u, 1).unwrap(), true));
    let bang = Functor::constant(&u.cats[1], &u.cats[0], Ob(0));
    out.push(("collapse", m.clone(), u.clone(), arrow_family(&u, 1, 0, bang), false));
    let top = Functor::constant(&u.cats[0], &u.cats[1], Ob(1));
    out.push(("terminal pick", m.clone(), u.clone(), arrow_family(&u, 0, 1, top), false));
    let (su, sh) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
    out.push(("arrow slices", m, su, sh, true));
    let p = p2_all();
    let (pu, ph) = self_indexing(&p.cat, &[], DEFAULT_CAP).unwrap();
    out.push(("p2 slices", p, pu, ph, true));
    out
}

#[test]
fn bivariance_matches_bicartesian_base_change() {
    for (name, m, u, h, expected) in dictionary_cases() {
        let direct = check_bivariant(&h, &m).is_ok();
        let g = grothendieck(&m.cat, &u, &h, Variance::Covariant, DEFAULT_CAP).unwrap();
        let fib = check_bicartesian_base_change(&g.fibration, &m, Orientation::MarkedCartesian).unwrap();
        assert_eq!(direct, expected, "{name}");
        assert_eq!(fib.holds, expected, "{name}: {:?}", fib.failure);
    }
}

#[test]
fn identity_transformation_is_beck_chevalley() {
    let m = p2_all();
    let (_, h) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
    let bv = check_bivariant(&h, &m).unwrap();
    let phi = BivariantTransformation::identity(&bv).unwrap();
    let report = check_bivariant_transformation(&bv, &bv, &phi).unwrap();
    assert!(report.holds);
    assert_eq!(report.squares, m.marked().count());
}

#[test]
fn transformation_from_slices_into_the_constant_arrow() {
    // slices over 0 and 1 are a point and a copy of ARROW; `a` picks the
    // bottom.  Into the constant ARROW family, the identity on the fibre over
    // 1 is strictly natural but fails base change; the constant at the
    // bottom passes.
    let m = arrow_a();
    let arrow = arc(fixtures::arrow());
    let (u, h1) = self_indexing(&m.cat, std::slice::from_ref(&arrow), DEFAULT_CAP).unwrap();
    let ai = u.index_of(&arrow).unwrap();
    let h2 = arrow_family(&u, ai, ai, Functor::identity(&arrow));
    let (from, to) = (check_bivariant(&h1, &m).unwrap(), check_bivariant(&h2, &m).unwrap());
    let k = from.target();
    let (s0, s1) = (u.cats[h1.ob_map[0]].clone(), u.cats[h1.ob_map[1]].clone());
    let bottom = s1.objects().find(|&o| s1.objects().all(|p| !s1.hom(o, p).is_empty())).unwrap();
    let level = |o: Ob| if o == bottom { Ob(0) } else { Ob(1) };
    let upward = Functor::new(
        s1.clone(),
        arrow.clone(),
        s1.objects().map(level).collect(),
        s1.morphisms()
            .map(|f| arrow.hom(level(s1.src(f)), level(s1.tgt(f)))[0])
            .collect(),
    )
    .unwrap();
    let at_bottom = Functor::constant(&s1, &arrow, Ob(0));
    let point = Functor::constant(&s0, &arrow, Ob(0));
    let c = &m.cat;
    let build = |phi1: &Functor| {
        let components = vec![u.cell1_of(&point).unwrap(), u.cell1_of(phi1).unwrap()];
        let naturality = c
            .morphisms()
            .map(|f| {
                let (x, y) = (c.src(f).idx(), c.tgt(f).idx());
                let lhs = k.compose(&to.image(f), &components[x]).unwrap();
                let rhs = k.compose(&components[y], &from.image(f)).unwrap();
                assert_eq!(u.functor(&lhs), u.functor(&rhs));
                k.id2(&lhs)
            })
            .collect();
        BivariantTransformation { components, naturality }
    };
    let fails = check_bivariant_transformation(&from, &to, &build(&upward)).unwrap();
    assert!(!fails.holds);
    assert!(fails.witness.unwrap().contains("`a`"));
    let holds = check_bivariant_transformation(&from, &to, &build(&at_bottom)).unwrap();
    assert!(holds.holds, "{:?}", holds.witness);
}

#[test]
fn local_representation_sends_legs_to_adjoints_and_images() {
    let m = p2_all();
    let corr = build_corr(&m, DEFAULT_CAP).unwrap();
    let (_, h) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
    let bv = check_bivariant(&h, &m).unwrap();
    let k = bv.target();
    let c = &m.cat;
    for x in 0..c.num_objects() {
        let rep = local_representation(&bv, &corr, x).unwrap();
        for y in 0..c.num_objects() {
            let sc = corr.span_category(x, y);
            let hom = k.hom(h.ob_map[x], h.ob_map[y]);
            for (i, s) in sc.spans.iter().enumerate() {
                let image = rep.functors[y].ob(Ob(i as u32));
                if c.is_identity(s.right_way) {
                    let right = bv.adjunction(s.wrong_way).unwrap().right;
                    assert!(hom.find_iso(image, right.ob).is_some());
                }
                if c.is_identity(s.wrong_way) {
                    assert!(hom.find_iso(image, bv.image(s.right_way).ob).is_some());
                }
            }
        }
    }
}

#[test]
fn span_extension_of_slices() {
    for m in [arrow_a(), p2_all()] {
        let corr = build_corr(&m, DEFAULT_CAP).unwrap();
        let (_, h) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
        let bv = check_bivariant(&h, &m).unwrap();
        let report = check_spex(&bv, &corr).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(report.validated && report.restricts && report.matches_local_representation);
    }
}

#[test]
fn span_extension_of_the_base_inclusion() {
    let m = arrow_a();
    let corr = build_corr(&m, DEFAULT_CAP).unwrap();
    let (_, incl) = corr.inclusion().unwrap();
    let bv = check_bivariant(&incl, &corr.marked).unwrap();
    let report = check_spex(&bv, &corr).unwrap();
    assert!(report.holds, "{report:?}");
}

#[test]
fn perturbed_compositor_fails_to_intertwine() {
    let m = arrow_a();
    let corr = build_corr(&m, DEFAULT_CAP).unwrap();
    let (_, h) = self_indexing(&m.cat, &[], DEFAULT_CAP).unwrap();
    let bv = check_bivariant(&h, &m).unwrap();
    let mut f = spex(&bv, &corr).unwrap();
    assert!(check_composition_intertwine(&f, 0, 1, 1).holds);
    let b = corr.bicat.clone();
    let (g, e) = (b.hom(1, 1).objects().next().unwrap(), b.hom(0, 1).objects().next().unwrap());
    let k = bv.target();
    let hom = k.hom(f.ob_map[0], f.ob_map[1]);
    let current = f.compositor(0, 1, 1, g, e);
    let other = hom.morphisms().find(|&c| c != current).unwrap();
    f.perturb_compositor(0, 1, 1, g, e, other);
    let report = check_composition_intertwine(&f, 0, 1, 1);
    assert!(!report.holds);
    assert!(report.counterexample.is_some());
}

#[test]
fn yoneda_on_the_marked_arrow() {
    let m = arrow_a();
    let corr = build_corr(&m, DEFAULT_CAP).unwrap();
    for x in 0..2 {
        let (u, h) = corepresentable(&corr, x, DEFAULT_CAP).unwrap();
        let bv = check_bivariant(&h, &m).unwrap();
        let report = yoneda_check(&corr, &bv, &u, x, DEFAULT_CAP).unwrap();
        assert!(report.holds, "{report:?}");
        assert_eq!(report.transformations, corr.span_category(x, x).spans.len());
    }
    let u = one_arrow();
    for i in 0..2 {
        let h = constant_family(&m.cat, &u, i).unwrap();
        let bv = check_bivariant(&h, &m).unwrap();
        let report = yoneda_check(&corr, &bv, &u, 1, DEFAULT_CAP).unwrap();
        assert!(report.holds, "{report:?}");
        assert_eq!(report.transformations, u.cats[i].num_objects());
    }
}

#[test]
fn universality_for_the_marked_arrow() {
    let m = arrow_a();
    let u = one_arrow();
    let report = universality_check(&m, &u.bicat, DEFAULT_CAP).unwrap();
    assert!(report.holds, "{report:?}");
    assert_eq!(report.extension_classes, report.bivariant_classes);
}

#[test]
fn reindexing_powers_of_p2() {
    let c = arc(fixtures::p2());
    let report = cartesian_monoidal(&c, 3).unwrap();
    assert!(report.holds, "{report:?}");
    // maps between sets of size at most 3
    let expected: usize = (0..=3usize).flat_map(|m| (0..=3usize).map(move |k| k.pow(m as u32))).sum();
    assert_eq!(report.maps, expected);
    assert!(report.squares > 0);
}

#[test]
fn arrow_without_products_is_rejected() {
    let c = arc(fixtures::discrete_two());
    assert!(matches!(cartesian_monoidal(&c, 1), Err(Error::NoProducts(_))));
}

#[test]
fn objects_of_p2_are_self_dual() {
    let m = p2_all();
    for x in m.cat.objects() {
        let report = self_duality_check(&m, x).unwrap();
        assert!(report.holds, "{report:?}");
        assert_eq!(report.zigzags.len(), 2);
    }
    let partial = MarkedCat::trivial(&arc(fixtures::p2()));
    assert!(matches!(self_duality_check(&partial, Ob(1)), Err(Error::PreconditionFailed(_))));
}
