use std::sync::{Arc, OnceLock};

use corrcalc::adjoint::functor_right_adjoint;
use corrcalc::fincat::{enumerate_functors, opposite, pullback, FinCat, Ob, DEFAULT_CAP};
use corrcalc::fixtures;
use corrcalc::marked::{certify, has_base_change, validate_marking, MarkedCat};
use corrcalc::span::{build_corr, span_total, Span};
use corrcalc::Error;
use proptest::prelude::*;

/// Reflexive-transitive closure of a relation on `n` points.
fn preorder(n: usize, bits: &[bool]) -> Vec<Vec<bool>> {
    let mut leq: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j || bits[i * n + j]).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if leq[i][k] && leq[k][j] {
                    leq[i][j] = true;
                }
            }
        }
    }
    leq
}

fn thin(leq: &[Vec<bool>]) -> Arc<FinCat> {
    let names: Vec<String> = (0..leq.len()).map(|i| format!("x{i}")).collect();
    Arc::new(fixtures::thin(&names, |i, j| leq[i][j], |i, j| format!("x{i}<=x{j}")))
}

fn relation() -> impl Strategy<Value = (usize, Vec<bool>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), proptest::collection::vec(proptest::bool::weighted(0.3), n * n)))
}

/// Whether every pair with an upper bound has a greatest lower bound.
fn has_pullbacks(leq: &[Vec<bool>]) -> bool {
    let n = leq.len();
    (0..n).all(|a| {
        (0..n).all(|b| {
            if !(0..n).any(|c| leq[a][c] && leq[b][c]) {
                return true;
            }
            let below = |z: usize| leq[z][a] && leq[z][b];
            (0..n).any(|z| below(z) && (0..n).all(|w| !below(w) || leq[w][z]))
        })
    })
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn preorders_are_lawful_categories((n, bits) in relation()) {
        let leq = preorder(n, &bits);
        let c = thin(&leq);
        c.validate().unwrap();
        let arrows = leq.iter().flatten().filter(|&&b| b).count();
        prop_assert_eq!(c.num_morphisms(), arrows);
        prop_assert!(c.is_thin());
        let back = opposite(&opposite(&c));
        prop_assert_eq!(back.object_names(), c.object_names());
        prop_assert_eq!(back.num_morphisms(), c.num_morphisms());
        for (g, f) in c.composable_pairs() {
            prop_assert_eq!(back.compose(g, f), c.compose(g, f));
        }
    }

    #[test]
    fn base_change_in_a_preorder_is_having_pullbacks((n, bits) in relation()) {
        let leq = preorder(n, &bits);
        let c = thin(&leq);
        let report = has_base_change(&MarkedCat::maximal(&c));
        prop_assert_eq!(report.holds, has_pullbacks(&leq));
        prop_assert_eq!(report.holds, report.counterexample.is_none());
    }

    #[test]
    fn composing_with_identity_spans((n, bits) in relation()) {
        let leq = preorder(n, &bits);
        prop_assume!(has_pullbacks(&leq));
        let c = thin(&leq);
        let m = certify(&MarkedCat::maximal(&c)).unwrap();
        let corr = build_corr(&m, DEFAULT_CAP).unwrap();
        for f in corr.bicat.one_cells() {
            let s = *corr.span(&f);
            for (first, second) in [(Span::identity(&c, s.left), s), (s, Span::identity(&c, s.right))] {
                let comp = corr.compose(&first, &second).unwrap();
                let cell = corr.cell_of(&comp.span).unwrap();
                prop_assert!(corr.bicat.hom(f.src, f.tgt).find_iso(cell.ob, f.ob).is_some());
            }
        }
    }

    #[test]
    fn marking_closure_in_a_chain(n in 1usize..=5, picks in proptest::collection::vec(any::<bool>(), 10)) {
        let c = Arc::new(fixtures::chain(n));
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let chosen: Vec<(usize, usize)> = pairs.iter().zip(&picks).filter(|(_, &p)| p).map(|(&e, _)| e).collect();
        let closed = chosen.iter().all(|&(i, j)| {
            chosen.iter().all(|&(k, l)| k != j || chosen.contains(&(i, l)))
        });
        let mors: Vec<_> = chosen.iter().map(|(i, j)| c.mor_named(&format!("{i}->{j}")).unwrap()).collect();
        match validate_marking(&c, &mors) {
            Ok(m) => {
                prop_assert!(closed);
                prop_assert_eq!(m.marked().count(), n + chosen.len());
            }
            Err(e) => {
                prop_assert!(!closed);
                prop_assert!(matches!(e, Error::NotClosed(_)));
            }
        }
    }

    #[test]
    fn pullbacks_of_finite_sets_count_matching_pairs(
        f in proptest::collection::vec(0usize..2, 0..=2),
        g in proptest::collection::vec(0usize..2, 0..=2),
    ) {
        static FINITE_SETS: OnceLock<FinCat> = OnceLock::new();
        let c = FINITE_SETS.get_or_init(|| fixtures::fs(4));
        let (fm, gm) = (fixtures::fs_morphism(c, f.len(), 2, &f), fixtures::fs_morphism(c, g.len(), 2, &g));
        let cone = pullback(c, fm, gm).unwrap();
        let pairs = f.iter().flat_map(|a| g.iter().filter(move |b| a == *b)).count();
        prop_assert_eq!(c.ob_name(cone.apex), pairs.to_string());
    }

    #[test]
    fn spans_do_not_depend_on_threads((n, bits) in relation()) {
        let leq = preorder(n, &bits);
        prop_assume!(has_pullbacks(&leq));
        let c = thin(&leq);
        let m = certify(&MarkedCat::maximal(&c)).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let corr = build_corr(&m, DEFAULT_CAP).unwrap();
                let total = span_total(&m, DEFAULT_CAP).unwrap();
                (corr.bicat.to_json(), total.cat.object_names().to_vec())
            })
        };
        prop_assert_eq!(run(1), run(3));
    }
}

#[test]
fn monotone_maps_between_chains() {
    for m in 1..=3 {
        for n in 1..=3 {
            let (a, b) = (Arc::new(fixtures::chain(m)), Arc::new(fixtures::chain(n)));
            let functors = enumerate_functors(&a, &b, DEFAULT_CAP).unwrap();
            // non-decreasing sequences of length m in n values
            assert_eq!(functors.len(), binomial(m + n - 1, m));
            for f in &functors {
                // a map of chains has a right adjoint iff it keeps the bottom
                assert_eq!(functor_right_adjoint(f).is_ok(), f.ob(Ob(0)) == Ob(0), "{m} {n}");
            }
        }
    }
}
