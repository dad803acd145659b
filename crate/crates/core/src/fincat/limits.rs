//! Finite limits by exhaustive cone enumeration, with the canonical choice of
//! the lexicographically least terminal cone.

use std::collections::HashMap;

use serde::Serialize;

use super::{FinCat, Mor, Ob};
use crate::error::{Error, Result};

/// A finite diagram: objects of the ambient category and arrows between them
/// given as `(from, to, morphism)` with positions into `objects`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub objects: Vec<Ob>,
    pub arrows: Vec<(usize, usize, Mor)>,
}

/// A cone with legs indexed by diagram position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    pub apex: Ob,
    pub legs: Vec<Mor>,
}

impl Diagram {
    pub fn cospan(c: &FinCat, f: Mor, g: Mor) -> Diagram {
        Diagram {
            objects: vec![c.src(f), c.src(g), c.tgt(f)],
            arrows: vec![(0, 2, f), (1, 2, g)],
        }
    }

    pub fn discrete(objects: Vec<Ob>) -> Diagram {
        Diagram {
            objects,
            arrows: vec![],
        }
    }
}

/// All cones over `d` with apex `w`, in lexicographic order of legs.
fn cones_from(c: &FinCat, d: &Diagram, w: Ob) -> Vec<Vec<Mor>> {
    let n = d.objects.len();
    // targets of arrows first, so that source legs are drawn from preimages
    let mut order: Vec<usize> = (0..n).filter(|&k| d.arrows.iter().any(|a| a.1 == k)).collect();
    order.extend((0..n).filter(|&k| !d.arrows.iter().any(|a| a.1 == k)));
    let mut slot_of = vec![0; n];
    for (s, &k) in order.iter().enumerate() {
        slot_of[k] = s;
    }
    enum Source {
        All,
        Preimage(usize, usize),
        Forced(usize, Mor),
    }
    let mut sources = Vec::with_capacity(n);
    let mut checks: Vec<Vec<(usize, usize, Mor)>> = vec![Vec::new(); n];
    let mut preimages: Vec<HashMap<Mor, Vec<Mor>>> = Vec::new();
    for (s, &k) in order.iter().enumerate() {
        let mut src = Source::All;
        for &(i, j, m) in &d.arrows {
            if i == k && slot_of[j] < s {
                if matches!(src, Source::All) {
                    let mut index: HashMap<Mor, Vec<Mor>> = HashMap::new();
                    for &l in c.hom(w, d.objects[k]) {
                        index.entry(c.compose(m, l)).or_default().push(l);
                    }
                    preimages.push(index);
                    src = Source::Preimage(preimages.len() - 1, j);
                    continue;
                }
            } else if j == k && slot_of[i] < s && matches!(src, Source::All) {
                src = Source::Forced(i, m);
                continue;
            }
            if slot_of[i].max(slot_of[j]) == s {
                checks[s].push((i, j, m));
            }
        }
        sources.push(src);
    }
    let mut out = Vec::new();
    let mut legs: Vec<Option<Mor>> = vec![None; n];
    #[allow(clippy::too_many_arguments)]
    fn go(
        c: &FinCat,
        d: &Diagram,
        w: Ob,
        s: usize,
        order: &[usize],
        sources: &[Source],
        preimages: &[HashMap<Mor, Vec<Mor>>],
        checks: &[Vec<(usize, usize, Mor)>],
        legs: &mut Vec<Option<Mor>>,
        out: &mut Vec<Vec<Mor>>,
    ) {
        if s == order.len() {
            out.push(legs.iter().map(|l| l.expect("assigned")).collect());
            return;
        }
        let k = order[s];
        let forced;
        let candidates: &[Mor] = match sources[s] {
            Source::All => c.hom(w, d.objects[k]),
            Source::Preimage(p, j) => match preimages[p].get(&legs[j].expect("assigned")) {
                Some(v) => v,
                None => return,
            },
            Source::Forced(i, m) => {
                forced = [c.compose(m, legs[i].expect("assigned"))];
                &forced
            }
        };
        for &l in candidates {
            legs[k] = Some(l);
            let ok = checks[s]
                .iter()
                .all(|&(i, j, m)| c.compose(m, legs[i].expect("assigned")) == legs[j].expect("assigned"));
            if ok {
                go(c, d, w, s + 1, order, sources, preimages, checks, legs, out);
            }
        }
        legs[k] = None;
    }
    go(c, d, w, 0, &order, &sources, &preimages, &checks, &mut legs, &mut out);
    out.sort();
    out
}

fn count_cones(c: &FinCat, d: &Diagram) -> Vec<usize> {
    c.objects().map(|w| cones_from(c, d, w).len()).collect()
}

/// Whether `legs` from `apex` form a terminal cone, given the per-object cone counts.
fn is_terminal(c: &FinCat, apex: Ob, legs: &[Mor], counts: &[usize]) -> bool {
    for w in c.objects() {
        let hom = c.hom(w, apex);
        if hom.len() != counts[w.idx()] {
            return false;
        }
        let mut images: Vec<Vec<Mor>> = hom
            .iter()
            .map(|&m| legs.iter().map(|&l| c.compose(l, m)).collect())
            .collect();
        images.sort();
        images.dedup();
        if images.len() != hom.len() {
            return false;
        }
    }
    true
}

/// The canonical limit of `d`: the least terminal cone in (apex, legs) order.
pub fn limit(c: &FinCat, d: &Diagram) -> Result<Cone> {
    let counts = count_cones(c, d);
    for w in c.objects() {
        // a terminal apex has exactly as many maps in as there are cones
        if c.objects().any(|v| c.hom(v, w).len() != counts[v.idx()]) {
            continue;
        }
        for legs in cones_from(c, d, w) {
            if is_terminal(c, w, &legs, &counts) {
                return Ok(Cone { apex: w, legs });
            }
        }
    }
    Err(Error::NoLimit(describe(c, d)))
}

fn describe(c: &FinCat, d: &Diagram) -> String {
    if d.arrows.is_empty() {
        let names: Vec<&str> = d.objects.iter().map(|&x| c.ob_name(x)).collect();
        format!("product of [{}]", names.join(", "))
    } else {
        let names: Vec<String> = d
            .arrows
            .iter()
            .map(|&(_, _, m)| {
                format!("{}: {} -> {}", c.mor_name(m), c.ob_name(c.src(m)), c.ob_name(c.tgt(m)))
            })
            .collect();
        format!("diagram [{}]", names.join(", "))
    }
}

/// Whether the given cone is a limit cone of `d`.
pub fn is_limit_cone(c: &FinCat, d: &Diagram, apex: Ob, legs: &[Mor]) -> bool {
    let commutes = legs.len() == d.objects.len()
        && legs
            .iter()
            .zip(&d.objects)
            .all(|(&l, &x)| c.src(l) == apex && c.tgt(l) == x)
        && d
            .arrows
            .iter()
            .all(|&(i, j, m)| c.compose(m, legs[i]) == legs[j]);
    commutes && is_terminal(c, apex, legs, &count_cones(c, d))
}

/// Canonical pullback of the cospan `f: x → z ← y: g`; the legs go to `x`
/// and `y` in that order.
pub fn pullback(c: &FinCat, f: Mor, g: Mor) -> Result<Cone> {
    if c.tgt(f) != c.tgt(g) {
        return Err(Error::PreconditionFailed(format!(
            "`{}` and `{}` do not share a target",
            c.mor_name(f),
            c.mor_name(g)
        )));
    }
    let mut cone = limit(c, &Diagram::cospan(c, f, g))?;
    cone.legs.truncate(2);
    Ok(cone)
}

/// Whether the square `f ∘ a = g ∘ b` with apex `src(a)` is a pullback.
pub fn is_pullback(c: &FinCat, f: Mor, g: Mor, a: Mor, b: Mor) -> bool {
    let d = Diagram::cospan(c, f, g);
    if c.src(a) != c.src(b) || c.tgt(a) != c.src(f) || c.tgt(b) != c.src(g) {
        return false;
    }
    let fa = c.compose(f, a);
    if fa != c.compose(g, b) {
        return false;
    }
    is_limit_cone(c, &d, c.src(a), &[a, b, fa])
}

pub fn terminal_object(c: &FinCat) -> Result<Ob> {
    limit(c, &Diagram::discrete(vec![])).map(|cone| cone.apex)
}

/// Canonical product of `x` and `y` with its two projections.
pub fn binary_product(c: &FinCat, x: Ob, y: Ob) -> Result<Cone> {
    limit(c, &Diagram::discrete(vec![x, y]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fs4_product_pullback() {
        let c = fixtures::fs(4);
        let bang = c.mor_named("2->1:[0,0]").unwrap();
        let cone = pullback(&c, bang, bang).unwrap();
        assert_eq!(c.ob_name(cone.apex), "4");
        // the legs are jointly injective: together they realise all 4 pairs
        let l0 = c.mor_name(cone.legs[0]);
        let l1 = c.mor_name(cone.legs[1]);
        assert!(l0.starts_with("4->2") && l1.starts_with("4->2"));
        assert!(is_pullback(&c, bang, bang, cone.legs[0], cone.legs[1]));
    }

    #[test]
    fn p2_meet() {
        let c = fixtures::p2();
        let f = c.mor_named("{1}<={1,2}").unwrap();
        let g = c.mor_named("{2}<={1,2}").unwrap();
        let cone = pullback(&c, f, g).unwrap();
        assert_eq!(c.ob_name(cone.apex), "{}");
    }

    #[test]
    fn pullback_along_identity() {
        let c = fixtures::p2();
        for f in c.morphisms() {
            let cone = pullback(&c, f, c.id(c.tgt(f))).unwrap();
            assert_eq!(cone.apex, c.src(f));
            assert_eq!(cone.legs, vec![c.id(c.src(f)), f]);
        }
    }

    #[test]
    fn fs2_has_no_product_of_two_twos() {
        let c = fixtures::fs(2);
        let two = c.ob_named("2").unwrap();
        assert!(matches!(binary_product(&c, two, two), Err(Error::NoLimit(_))));
    }

    #[test]
    fn terminal_objects() {
        assert_eq!(fixtures::p2().ob_name(terminal_object(&fixtures::p2()).unwrap()), "{1,2}");
        assert_eq!(fixtures::fs(3).ob_name(terminal_object(&fixtures::fs(3)).unwrap()), "1");
        assert!(terminal_object(&fixtures::discrete_two()).is_err());
    }

    #[test]
    fn non_pullback_square_detected() {
        let c = fixtures::p2();
        let f = c.mor_named("{1}<={1,2}").unwrap();
        let g = c.mor_named("{2}<={1,2}").unwrap();
        // the square with apex {} is a pullback; it has no competitor here,
        // so check a square over {1} ⊆ {1,2} ⊇ {1,2} with apex {} instead
        let h = c.mor_named("{1,2}<={1,2}").unwrap();
        let a = c.mor_named("{}<={1}").unwrap();
        let b = c.mor_named("{}<={1,2}").unwrap();
        assert!(!is_pullback(&c, f, h, a, b));
        let a2 = c.mor_named("{}<={1}").unwrap();
        let b2 = c.mor_named("{}<={2}").unwrap();
        assert!(is_pullback(&c, f, g, a2, b2));
    }
}
