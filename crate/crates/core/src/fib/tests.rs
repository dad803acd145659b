use std::sync::Arc;

use super::*;
use crate::bicat::{cat_universe, CatUniverse, Cell1, Cell2, Pseudofunctor};
use crate::fincat::{comma, is_pullback, pullback, Functor, NatTrans, DEFAULT_CAP};
use crate::fixtures;
use crate::marked::{certify, validate_marking_names};
use crate::span::span_total;

fn arc(c: crate::fincat::FinCat) -> Arc<crate::fincat::FinCat> {
    Arc::new(c)
}

fn arrow_a() -> MarkedCat {
    validate_marking_names(&arc(fixtures::arrow()), &["a".to_string()]).unwrap()
}

fn p2_all() -> MarkedCat {
    MarkedCat::maximal(&arc(fixtures::p2()))
}

/// The arrow category of `c` over its target.
fn target_projection(c: &Arc<crate::fincat::FinCat>) -> (crate::fincat::Comma, Functor) {
    let id = Functor::identity(c);
    let arrows = comma(&id, &id, DEFAULT_CAP).unwrap();
    let proj = arrows.right.clone();
    (arrows, proj)
}

#[test]
fn cartesian_maps_of_the_target_projection_are_pullback_squares() {
    let c = arc(fixtures::p2());
    let (arrows, proj) = target_projection(&c);
    let e = &arrows.cat;
    for m in e.morphisms() {
        let (s, t) = (arrows.objects[e.src(m).idx()], arrows.objects[e.tgt(m).idx()]);
        let (u, v) = arrows.morphisms[m.idx()];
        assert_eq!(is_cartesian(&proj, m), is_pullback(&c, t.2, v, u, s.2), "{}", e.mor_name(m));
        // every square is a coCartesian map for postcomposition exactly when
        // the source-side component is invertible
        assert_eq!(is_cocartesian(&proj, m), c.is_iso(u), "{}", e.mor_name(m));
    }
}

#[test]
fn lift_over_the_wrong_base_map_is_rejected() {
    let c = arc(fixtures::arrow());
    let (arrows, proj) = target_projection(&c);
    let m = arrows.cat.morphisms().find(|&m| !c.is_identity(proj.mor(m))).unwrap();
    let other = c.id(Ob(0));
    assert!(matches!(is_cartesian_lift(&proj, m, other), Err(Error::NotOverF(_))));
    assert!(is_cocartesian_lift(&proj, m, proj.mor(m)).is_ok());
}

#[test]
fn target_projection_is_a_fibration_both_ways() {
    let c = arc(fixtures::p2());
    let (_, proj) = target_projection(&c);
    let all = all_morphisms(&c);
    let cart = check_fibration(&proj, &all, Variance::Contravariant).unwrap();
    assert_eq!(cart.cart.len(), c.morphisms().map(|f| cart.over(c.tgt(f)).len()).sum::<usize>());
    check_fibration(&proj, &all, Variance::Covariant).unwrap();
    // the constant projection ARROW → ONE has no coCartesian lift at 1
    let arrow = arc(fixtures::arrow());
    let one = arc(fixtures::one());
    let bang = Functor::constant(&arrow, &one, Ob(0));
    let all_one = all_morphisms(&one);
    assert!(check_fibration(&bang, &all_one, Variance::Covariant).is_ok());
    let discrete = arc(fixtures::discrete_two());
    let bang = Functor::constant(&discrete, &arrow, Ob(0));
    let miss = check_fibration(&bang, &all_morphisms(&arrow), Variance::Covariant).unwrap_err();
    assert_eq!((miss.morphism.as_str(), miss.cartesian), ("a", false));
}

#[test]
fn contravariant_transport_of_the_target_projection_is_pullback() {
    let c = arc(fixtures::p2());
    let (arrows, proj) = target_projection(&c);
    let fib = check_fibration(&proj, &all_morphisms(&c), Variance::Contravariant).unwrap();
    let t = fibre_transport(&fib, Variance::Contravariant, DEFAULT_CAP).unwrap();
    t.pseudofunctor.validate().unwrap();
    for f in c.morphisms() {
        let cell = t.pseudofunctor.apply1(&t.base.cell(f));
        let functor = t.universe.functor(&cell);
        let (from, to) = (&t.fibres[c.tgt(f).idx()], &t.fibres[c.src(f).idx()]);
        for x in from.cat.objects() {
            let (_, _, alpha) = arrows.objects[from.ob_incl[x.idx()].idx()];
            let pb = pullback(&c, alpha, f).unwrap();
            let (apex, _, leg) = arrows.objects[to.ob_incl[functor.ob(x).idx()].idx()];
            assert_eq!((apex, leg), (pb.apex, pb.legs[1]));
        }
    }
}

fn universe(cats: &[crate::fincat::FinCat]) -> CatUniverse {
    let cats: Vec<_> = cats.iter().cloned().map(arc).collect();
    cat_universe(&cats, DEFAULT_CAP).unwrap()
}

/// Replaces each transition functor by an isomorphic one and rebuilds the
/// coherence cells from the chosen isomorphisms.
fn twisted(f: &Pseudofunctor, u: &CatUniverse, replace: &dyn Fn(usize, usize, Ob) -> Option<(Functor, NatTrans)>) -> Pseudofunctor {
    let b = &*f.source;
    let n = b.n();
    let mut moved = std::collections::HashMap::new();
    for x in 0..n {
        for y in 0..n {
            for i in b.hom(x, y).objects() {
                let cell = f.apply1(&Cell1 { src: x, tgt: y, ob: i });
                let old = u.functor(&cell).clone();
                let (new, iso) = replace(x, y, i).unwrap_or_else(|| (old.clone(), NatTrans::identity(&old)));
                moved.insert((x, y, i), (new, iso));
            }
        }
    }
    let fc = |x: usize, y: usize| u.funcat(f.ob_map[x], f.ob_map[y]);
    let mut hom_maps = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let src = b.hom(x, y).clone();
            let tgt = u.bicat.hom(f.ob_map[x], f.ob_map[y]).clone();
            let obs: Vec<Ob> = src.objects().map(|i| fc(x, y).object_of(&moved[&(x, y, i)].0).unwrap()).collect();
            let mors = obs.iter().map(|&o| tgt.id(o)).collect();
            hom_maps.push(Functor::new(src, tgt, obs, mors).unwrap());
        }
    }
    let compositor = |x: usize, y: usize, z: usize, g: Ob, h: Ob| -> crate::Result<crate::fincat::Mor> {
        let old = u.transformation(&Cell2 {
            src: f.ob_map[x],
            tgt: f.ob_map[z],
            mor: f.compositor(x, y, z, g, h),
        });
        let gh = b.comp_ob(x, y, z, g, h);
        let (sg, sh, sgh) = (&moved[&(y, z, g)].1, &moved[&(x, y, h)].1, &moved[&(x, z, gh)].1);
        let back = sg.inverse().unwrap().horizontal(&sh.inverse().unwrap())?;
        let t = sgh.after(&old.after(&back)?)?;
        Ok(fc(x, z).morphism_of(&t).unwrap())
    };
    let unitor = |x: usize| -> crate::Result<crate::fincat::Mor> {
        let old = u.transformation(&Cell2 {
            src: f.ob_map[x],
            tgt: f.ob_map[x],
            mor: f.unitor(x),
        });
        let t = moved[&(x, x, b.unit(x))].1.after(old)?;
        Ok(fc(x, x).morphism_of(&t).unwrap())
    };
    Pseudofunctor::tabulate(f.source.clone(), f.target.clone(), f.ob_map.clone(), hom_maps, &compositor, &unitor).unwrap()
}

fn swap_family() -> (Arc<crate::fincat::FinCat>, CatUniverse, Pseudofunctor) {
    use crate::fincat::Mor;
    let base = arc(fixtures::arrow());
    let u = universe(&[fixtures::walking_iso()]);
    let iso = u.cats[0].clone();
    let id = Functor::identity(&iso);
    let strict = strict_family(&base, &u, vec![0, 0], &[id.clone(), id.clone(), id.clone()], Variance::Covariant).unwrap();
    let swap = Functor::new(iso.clone(), iso.clone(), vec![Ob(1), Ob(0)], vec![Mor(1), Mor(0), Mor(3), Mor(2)]).unwrap();
    let to_swap = NatTrans::new(id, swap.clone(), vec![Mor(2), Mor(3)]).unwrap();
    // the identity of 0 is sent to the swap
    let f = twisted(&strict, &u, &|x, y, _| (x == 0 && y == 0).then(|| (swap.clone(), to_swap.clone())));
    (base, u, f)
}

#[test]
fn twisted_family_is_a_non_strict_pseudofunctor() {
    let (_, _, f) = swap_family();
    f.validate().unwrap();
    assert!(!f.target.hom(0, 0).is_identity(f.unitor(0)));
}

/// Families used for the round trip, tagged by variance.
fn families() -> Vec<(&'static str, Arc<crate::fincat::FinCat>, CatUniverse, Pseudofunctor, Variance)> {
    let mut out = Vec::new();
    let arrow = arc(fixtures::arrow());
    let u = universe(&[fixtures::one(), fixtures::arrow()]);
    let (one, arr) = (u.cats[0].clone(), u.cats[1].clone());
    let pick = |c: &Arc<crate::fincat::FinCat>, d: &Arc<crate::fincat::FinCat>, x: u32| Functor::constant(c, d, Ob(x));
    // 0 ↦ ONE, 1 ↦ ARROW, a ↦ the point 0
    let f = strict_family(
        &arrow,
        &u,
        vec![0, 1],
        &[Functor::identity(&one), Functor::identity(&arr), pick(&one, &arr, 0)],
        Variance::Covariant,
    )
    .unwrap();
    out.push(("point into arrow", arrow.clone(), u.clone(), f, Variance::Covariant));
    let f = strict_family(
        &arrow,
        &u,
        vec![1, 1],
        &[Functor::identity(&arr), Functor::identity(&arr), Functor::identity(&arr)],
        Variance::Covariant,
    )
    .unwrap();
    out.push(("constant arrow", arrow.clone(), u.clone(), f, Variance::Covariant));
    // contravariant: 0 ↦ ARROW, 1 ↦ ONE, a ↦ the point 1
    let f = strict_family(
        &arrow,
        &u,
        vec![1, 0],
        &[Functor::identity(&arr), Functor::identity(&one), pick(&one, &arr, 1)],
        Variance::Contravariant,
    )
    .unwrap();
    out.push(("point back", arrow.clone(), u.clone(), f, Variance::Contravariant));
    let p2 = arc(fixtures::p2());
    let (ru, rf) = representable(&p2, Ob(3), DEFAULT_CAP).unwrap();
    out.push(("representable", p2.clone(), ru, rf, Variance::Contravariant));
    let (base, su, sf) = swap_family();
    out.push(("swapped", base, su, sf, Variance::Covariant));
    out
}

#[test]
fn grothendieck_round_trip_on_families() {
    for (name, base, u, f, variance) in families() {
        let r = grothendieck_round_trip(&base, &u, &f, variance, DEFAULT_CAP).unwrap();
        assert!(r.holds, "{name}: {:?}", r.failure);
        let g = grothendieck(&base, &u, &f, variance, DEFAULT_CAP).unwrap();
        let r = transport_round_trip(&g.fibration, variance, DEFAULT_CAP).unwrap();
        assert!(r.holds, "{name}: {:?}", r.failure);
    }
}

#[test]
fn grothendieck_counts_match_an_independent_count() {
    for (name, base, u, f, variance) in families() {
        let g = grothendieck(&base, &u, &f, variance, DEFAULT_CAP).unwrap();
        let cat = |d: Ob| u.cats[f.ob_map[d.idx()]].clone();
        let objects: usize = base.objects().map(|d| cat(d).num_objects()).sum();
        // morphisms over `m` correspond to pairs (x, y) with a map between
        // the transported object and the other end
        let mut morphisms = 0;
        for m in base.morphisms() {
            let (a, b) = (base.src(m), base.tgt(m));
            let (ca, cb) = (cat(a), cat(b));
            let t = u.functor(&f.apply1(&g_cell(&base, variance, m)));
            for x in ca.objects() {
                for y in cb.objects() {
                    morphisms += match variance {
                        Variance::Covariant => cb.hom(t.ob(x), y).len(),
                        Variance::Contravariant => ca.hom(x, t.ob(y)).len(),
                    };
                }
            }
        }
        assert_eq!(g.total().num_objects(), objects, "{name}");
        assert_eq!(g.total().num_morphisms(), morphisms, "{name}");
    }
}

fn g_cell(base: &Arc<crate::fincat::FinCat>, variance: Variance, m: crate::fincat::Mor) -> Cell1 {
    let ld = match variance {
        Variance::Covariant => crate::bicat::locally_discrete(base),
        Variance::Contravariant => crate::bicat::locally_discrete(&arc(crate::fincat::opposite(base))),
    };
    ld.cell(m)
}

#[test]
fn representable_integral_is_the_slice() {
    for (c, d) in [(arc(fixtures::p2()), Ob(3)), (arc(fixtures::arrow()), Ob(1)), (arc(fixtures::p2()), Ob(1))] {
        let (u, f) = representable(&c, d, DEFAULT_CAP).unwrap();
        let g = grothendieck(&c, &u, &f, Variance::Contravariant, DEFAULT_CAP).unwrap();
        let slice = crate::fincat::slice(&c, d, DEFAULT_CAP).unwrap();
        let total = g.total();
        assert_eq!(total.num_objects(), slice.cat.num_objects());
        assert_eq!(total.num_morphisms(), slice.cat.num_morphisms());
        // (x, g: x → d) ↦ the slice object g
        let ob_map: Vec<Ob> = g
            .objects
            .iter()
            .map(|&(x, i)| slice.find(x, Ob(0), c.hom(x, d)[i.idx()]).unwrap())
            .collect();
        let mor_map = total
            .morphisms()
            .map(|k| {
                let (m, _) = g.morphisms[k.idx()];
                let (s, t) = (ob_map[total.src(k).idx()], ob_map[total.tgt(k).idx()]);
                *slice.cat.hom(s, t).iter().find(|&&h| slice.morphisms[h.idx()].0 == m).unwrap()
            })
            .collect();
        let iso = Functor::new(total.clone(), slice.cat.clone(), ob_map, mor_map).unwrap();
        assert!(crate::fincat::is_equivalence(&iso).holds());
        assert!(iso.ob_map.iter().collect::<std::collections::HashSet<_>>().len() == total.num_objects());
    }
}

#[test]
fn transport_round_trip_on_the_target_projection() {
    let c = arc(fixtures::p2());
    let (_, proj) = target_projection(&c);
    for variance in [Variance::Covariant, Variance::Contravariant] {
        let fib = check_fibration(&proj, &all_morphisms(&c), variance).unwrap();
        let r = transport_round_trip(&fib, variance, DEFAULT_CAP).unwrap();
        assert!(r.holds, "{variance:?}: {:?}", r.failure);
    }
}

#[test]
fn free_cartesian_fibration_is_free() {
    let m = arrow_a();
    let d = m.cat.clone();
    let one = arc(fixtures::one());
    let at_one = Functor::constant(&one, &d, Ob(1));
    let free = free_cartesian(&m, &at_one, DEFAULT_CAP).unwrap();
    // objects are marked maps into 1: id_1 and a
    assert_eq!(free.comma.comma.cat.num_objects(), 2);
    let (_, proj) = target_projection(&d);
    let target = check_fibration(&proj, &marking_of(&m), Variance::Contravariant).unwrap();
    let r = check_free_cartesian(&m, &at_one, &target, DEFAULT_CAP).unwrap();
    assert!(r.holds, "{:?}", r.failure);
    // functors ONE → arrows over D hitting an object over 1: id_1 and a
    assert_eq!(r.functors_over_base, 2);
    let ident = Fibration::new(Functor::identity(&d));
    let r = check_free_cartesian(&m, &at_one, &ident, DEFAULT_CAP).unwrap();
    assert!(r.holds, "{:?}", r.failure);
    assert_eq!((r.cartesian_functors, r.functors_over_base), (1, 1));
}

#[test]
fn free_bicartesian_fibration_is_the_span_total() {
    for m in [arrow_a(), p2_all()] {
        let d = m.cat.clone();
        let free = free_bicartesian(&m, &Functor::identity(&d), DEFAULT_CAP).unwrap();
        let spans = span_total(&m, DEFAULT_CAP).unwrap();
        let outer = &free.outer;
        let inner = &free.comma.comma;
        // ((a, e, α), d, β) ↦ the span e ← a → d
        let ob_map: Vec<Ob> = outer
            .objects
            .iter()
            .map(|&(x, t, beta)| {
                let (a, e, alpha) = inner.objects[x.idx()];
                let s = crate::span::Span {
                    left: e,
                    right: t,
                    kernel: a,
                    wrong_way: alpha,
                    right_way: beta,
                };
                Ob(spans.spans.iter().position(|sp| *sp == s).unwrap() as u32)
            })
            .collect();
        let mor_map = outer
            .cat
            .morphisms()
            .map(|k| {
                let (x, w) = outer.morphisms[k.idx()];
                let (ua, ve) = inner.morphisms[x.idx()];
                let (s, t) = (ob_map[outer.cat.src(k).idx()], ob_map[outer.cat.tgt(k).idx()]);
                *spans
                    .cat
                    .hom(s, t)
                    .iter()
                    .find(|&&h| spans.components[h.idx()] == (ve, ua, w))
                    .unwrap()
            })
            .collect();
        let iso = Functor::new(outer.cat.clone(), spans.cat.clone(), ob_map, mor_map).unwrap();
        assert!(crate::fincat::is_equivalence(&iso).holds());
        assert_eq!(outer.cat.num_objects(), spans.cat.num_objects());
        let r = check_bicartesian_base_change(&free.fibration, &certify(&m).unwrap(), Orientation::MarkedCartesian).unwrap();
        assert!(r.holds, "{:?}", r.failure);
        assert!(r.squares > 0);
    }
}

#[test]
fn span_total_is_twisted_bicartesian() {
    for m in [arrow_a(), p2_all()] {
        let m = certify(&m).unwrap();
        let total = span_total(&m, DEFAULT_CAP).unwrap();
        let r = check_twisted_bicartesian(&total.proj, &total.feet, &m, &m).unwrap();
        assert!(r.holds, "{:#?}", r.conditions);
        assert_eq!(r.conditions.len(), 5);
    }
}

#[test]
fn twisted_check_fails_when_the_left_marking_is_too_large() {
    let trivial = certify(&MarkedCat::trivial(&arc(fixtures::arrow()))).unwrap();
    let total = span_total(&trivial, DEFAULT_CAP).unwrap();
    let maximal = certify(&MarkedCat::maximal(&trivial.cat)).unwrap();
    let r = check_twisted_bicartesian(&total.proj, &total.feet, &maximal, &trivial).unwrap();
    assert!(!r.holds);
    assert!(!r.conditions[0].holds);
}

#[test]
fn integral_of_a_constant_marked_family() {
    let base = arc(fixtures::arrow());
    let u = universe(&[fixtures::arrow()]);
    let c = u.cats[0].clone();
    let id = Functor::identity(&c);
    let f = strict_family(&base, &u, vec![0, 0], &[id.clone(), id.clone(), id], Variance::Contravariant).unwrap();
    let fibre = validate_marking_names(&c, &["a".to_string()]).unwrap();
    let (g, m) = integral_marking(&base, &u, &f, &[fibre.clone(), fibre], DEFAULT_CAP).unwrap();
    assert_eq!(g.total().num_objects(), 4);
    // identities plus the two vertical copies of `a`
    assert_eq!(m.marked().count(), 6);
    assert!(m.has_certificate());
}
