//! Adjunctions, triangle identities, mates and the Beck-Chevalley condition.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{opposite, FinCat, Functor, Mor, NatTrans, Ob};
use crate::twocat::{CatCalc, TwoCat};

/// `left ⊣ right` with `unit: 1 ⇒ right ∘ left` and
/// `counit: left ∘ right ⇒ 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjunction<T: TwoCat> {
    pub left: T::One,
    pub right: T::One,
    pub unit: T::Two,
    pub counit: T::Two,
}

/// Which triangle identities fail, with the first difference found.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TriangleReport {
    pub left: Option<String>,
    pub right: Option<String>,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }
}

/// `λ ∘ (ε * 1) ∘ a⁻¹ ∘ (1 * η) ∘ ρ⁻¹` on the left adjoint.
pub fn left_triangle<T: TwoCat>(k: &T, adj: &Adjunction<T>) -> Result<T::Two> {
    let (l, r) = (&adj.left, &adj.right);
    k.vpath(&[
        k.invert(&k.right_unitor(l))?,
        k.whisker_left(l, &adj.unit)?,
        k.invert(&k.associator(l, r, l)?)?,
        k.whisker_right(&adj.counit, l)?,
        k.left_unitor(l),
    ])
}

/// `ρ ∘ (1 * ε) ∘ a ∘ (η * 1) ∘ λ⁻¹` on the right adjoint.
pub fn right_triangle<T: TwoCat>(k: &T, adj: &Adjunction<T>) -> Result<T::Two> {
    let (l, r) = (&adj.left, &adj.right);
    k.vpath(&[
        k.invert(&k.left_unitor(r))?,
        k.whisker_right(&adj.unit, r)?,
        k.associator(r, l, r)?,
        k.whisker_left(r, &adj.counit)?,
        k.right_unitor(r),
    ])
}

pub fn check_triangle_identities<T: TwoCat>(k: &T, adj: &Adjunction<T>) -> Result<TriangleReport> {
    check_boundary(k, adj)?;
    let left = k.difference(&left_triangle(k, adj)?, &k.id2(&adj.left));
    let right = k.difference(&right_triangle(k, adj)?, &k.id2(&adj.right));
    Ok(TriangleReport { left, right })
}

fn check_boundary<T: TwoCat>(k: &T, adj: &Adjunction<T>) -> Result<()> {
    let (l, r) = (&adj.left, &adj.right);
    let (x, y) = (k.src(l), k.tgt(l));
    if k.src(r) != y || k.tgt(r) != x {
        return Err(Error::BoundaryMismatch("adjoints are not opposed".into()));
    }
    if k.two_src(&adj.unit) != k.identity(&x) || k.two_tgt(&adj.unit) != k.compose(r, l)? {
        return Err(Error::BoundaryMismatch("unit has the wrong boundary".into()));
    }
    if k.two_src(&adj.counit) != k.compose(l, r)? || k.two_tgt(&adj.counit) != k.identity(&y) {
        return Err(Error::BoundaryMismatch("counit has the wrong boundary".into()));
    }
    Ok(())
}

/// A square `x00 → x01 → x11`, `x00 → x10 → x11` with filler
/// `right ∘ top ⇒ bottom ∘ left` and the vertical edges adjoined.
#[derive(Clone, Debug)]
pub struct LaxSquare<T: TwoCat> {
    pub top: T::One,
    pub left: T::One,
    pub right: T::One,
    pub bottom: T::One,
    pub filler: T::Two,
    pub left_adj: Adjunction<T>,
    pub right_adj: Adjunction<T>,
}

fn check_square<T: TwoCat>(k: &T, sq: &LaxSquare<T>) -> Result<()> {
    let fail = |what: &str| Err(Error::BoundaryMismatch(what.into()));
    if k.src(&sq.top) != k.src(&sq.left)
        || k.tgt(&sq.top) != k.src(&sq.right)
        || k.tgt(&sq.left) != k.src(&sq.bottom)
        || k.tgt(&sq.right) != k.tgt(&sq.bottom)
    {
        return fail("square edges do not meet");
    }
    if k.two_src(&sq.filler) != k.compose(&sq.right, &sq.top)?
        || k.two_tgt(&sq.filler) != k.compose(&sq.bottom, &sq.left)?
    {
        return fail("filler has the wrong boundary");
    }
    if sq.left_adj.left != sq.left || sq.right_adj.left != sq.right {
        return fail("adjunctions do not belong to the vertical edges");
    }
    check_boundary(k, &sq.left_adj)?;
    check_boundary(k, &sq.right_adj)
}

/// The mate `top ∘ left* ⇒ right* ∘ bottom`, where `*` marks right adjoints.
///
/// The counit of the left adjunction is pasted first, giving a cell
/// `(right ∘ top) ∘ left* ⇒ bottom`, whose adjunct under the right
/// adjunction is returned.
pub fn mate<T: TwoCat>(k: &T, sq: &LaxSquare<T>) -> Result<T::Two> {
    check_square(k, sq)?;
    let (top, left, right, bottom) = (&sq.top, &sq.left, &sq.right, &sq.bottom);
    let left_r = &sq.left_adj.right;
    let right_r = &sq.right_adj.right;
    let into_bottom = k.vpath(&[
        k.whisker_right(&sq.filler, left_r)?,
        k.associator(bottom, left, left_r)?,
        k.whisker_left(bottom, &sq.left_adj.counit)?,
        k.right_unitor(bottom),
    ])?;
    let kk = k.compose(top, left_r)?;
    k.vpath(&[
        k.invert(&k.left_unitor(&kk))?,
        k.whisker_right(&sq.right_adj.unit, &kk)?,
        k.associator(right_r, right, &kk)?,
        k.whisker_left(right_r, &k.invert(&k.associator(right, top, left_r)?)?)?,
        k.whisker_left(right_r, &into_bottom)?,
    ])
}

/// The same mate computed the other way round: first the adjunct of the
/// filler under the right adjunction, then the left counit.
pub fn mate_via_top<T: TwoCat>(k: &T, sq: &LaxSquare<T>) -> Result<T::Two> {
    check_square(k, sq)?;
    let (top, left, right, bottom) = (&sq.top, &sq.left, &sq.right, &sq.bottom);
    let left_r = &sq.left_adj.right;
    let right_r = &sq.right_adj.right;
    let adjunct = k.vpath(&[
        k.invert(&k.left_unitor(top))?,
        k.whisker_right(&sq.right_adj.unit, top)?,
        k.associator(right_r, right, top)?,
        k.whisker_left(right_r, &sq.filler)?,
        k.invert(&k.associator(right_r, bottom, left)?)?,
    ])?;
    let rb = k.compose(right_r, bottom)?;
    k.vpath(&[
        k.whisker_right(&adjunct, left_r)?,
        k.associator(&rb, left, left_r)?,
        k.whisker_left(&rb, &sq.left_adj.counit)?,
        k.right_unitor(&rb),
    ])
}

/// Beck-Chevalley verdict with the failing location, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BeckChevalley {
    pub holds: bool,
    pub witness: Option<String>,
}

pub fn is_beck_chevalley<T: TwoCat>(k: &T, sq: &LaxSquare<T>) -> Result<BeckChevalley> {
    let m = mate(k, sq)?;
    let witness = k.non_invertible_witness(&m);
    Ok(BeckChevalley {
        holds: witness.is_none(),
        witness,
    })
}

/// Whether `h ↦ alpha ∘ F h` is a bijection `hom(c', c) → hom(F c', d)` for all `c'`.
fn is_universal(f: &Functor, c: Ob, d: Ob, alpha: Mor) -> bool {
    let (src, tgt) = (&f.source, &f.target);
    src.objects().all(|c2| {
        let hom = src.hom(c2, c);
        if hom.len() != tgt.hom(f.ob(c2), d).len() {
            return false;
        }
        let mut images: Vec<Mor> = hom.iter().map(|&h| tgt.compose(alpha, f.mor(h))).collect();
        images.sort();
        images.dedup();
        images.len() == hom.len()
    })
}

/// Right adjoint of a functor by terminal-object search in each comma
/// category `F ↓ d`, choosing the least universal arrow.
pub fn functor_right_adjoint(f: &Functor) -> Result<Adjunction<CatCalc>> {
    use rayon::prelude::*;
    let (c, d) = (&f.source, &f.target);
    let universal: Vec<Option<(Ob, Mor)>> = d
        .objects()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&y| {
            c.objects().find_map(|x| {
                d.hom(f.ob(x), y)
                    .iter()
                    .find(|&&alpha| is_universal(f, x, y, alpha))
                    .map(|&alpha| (x, alpha))
            })
        })
        .collect();
    let mut ob_map = Vec::with_capacity(d.num_objects());
    let mut counit = Vec::with_capacity(d.num_objects());
    for (y, u) in d.objects().zip(&universal) {
        let (x, alpha) = u.ok_or_else(|| Error::NoAdjoint(d.ob_name(y).to_string()))?;
        ob_map.push(x);
        counit.push(alpha);
    }
    let factor = |target: Ob, through: Mor, wanted: Mor, from: Ob| -> Mor {
        *c.hom(from, target)
            .iter()
            .find(|&&h| d.compose(through, f.mor(h)) == wanted)
            .expect("universal arrow factors")
    };
    let mor_map = d
        .morphisms()
        .map(|k| {
            let (y, y2) = (d.src(k), d.tgt(k));
            factor(ob_map[y2.idx()], counit[y2.idx()], d.compose(k, counit[y.idx()]), ob_map[y.idx()])
        })
        .collect();
    let right = Functor::new(d.clone(), c.clone(), ob_map, mor_map)?;
    let unit_comps = c
        .objects()
        .map(|x| {
            let fx = f.ob(x);
            factor(right.ob(fx), counit[fx.idx()], d.id(fx), x)
        })
        .collect();
    let unit = NatTrans::new(Functor::identity(c), right.after(f)?, unit_comps)?;
    let counit = NatTrans::new(f.after(&right)?, Functor::identity(d), counit)?;
    let adj = Adjunction {
        left: f.clone(),
        right,
        unit,
        counit,
    };
    let report = check_triangle_identities(&CatCalc, &adj)?;
    if !report.holds() {
        return Err(Error::CoherenceFailure(format!("assembled adjunction: {report:?}")));
    }
    Ok(adj)
}

fn op_functor(f: &Functor, source: &Arc<FinCat>, target: &Arc<FinCat>) -> Functor {
    Functor::unchecked(source.clone(), target.clone(), f.ob_map.clone(), f.mor_map.clone())
}

/// Left adjoint of `g` obtained from the right adjoint of its opposite.
pub fn functor_left_adjoint(g: &Functor) -> Result<Adjunction<CatCalc>> {
    let dop = Arc::new(opposite(&g.source));
    let cop = Arc::new(opposite(&g.target));
    let gop = op_functor(g, &dop, &cop);
    let adj = functor_right_adjoint(&gop)?;
    let left = op_functor(&adj.right, &g.target, &g.source);
    let unit = NatTrans::new(
        Functor::identity(&g.target),
        g.after(&left)?,
        adj.counit.components.clone(),
    )?;
    let counit = NatTrans::new(
        left.after(g)?,
        Functor::identity(&g.source),
        adj.unit.components.clone(),
    )?;
    Ok(Adjunction {
        left,
        right: g.clone(),
        unit,
        counit,
    })
}

/// Whether two functors are naturally isomorphic; returns an isomorphism.
pub fn natural_iso(f: &Functor, g: &Functor) -> Option<NatTrans> {
    let mut comps = Vec::with_capacity(f.source.num_objects());
    fn search(f: &Functor, g: &Functor, comps: &mut Vec<Mor>) -> bool {
        let c = &f.source;
        let d = &f.target;
        let k = comps.len();
        if k == c.num_objects() {
            return true;
        }
        let x = Ob(k as u32);
        for &m in d.hom(f.ob(x), g.ob(x)) {
            if !d.is_iso(m) {
                continue;
            }
            comps.push(m);
            let ok = c.morphisms().all(|h| {
                let (s, t) = (c.src(h), c.tgt(h));
                s.idx() > k
                    || t.idx() > k
                    || d.compose(g.mor(h), comps[s.idx()]) == d.compose(comps[t.idx()], f.mor(h))
            });
            if ok && search(f, g, comps) {
                return true;
            }
            comps.pop();
        }
        false
    }
    search(f, g, &mut comps).then(|| NatTrans::unchecked(f.clone(), g.clone(), comps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{pullback, slice, postcompose, DEFAULT_CAP};
    use crate::fixtures;

    fn arrow() -> Arc<FinCat> {
        Arc::new(fixtures::arrow())
    }

    #[test]
    fn bang_has_right_adjoint_picking_one() {
        let a = arrow();
        let one = Arc::new(fixtures::one());
        let bang = Functor::constant(&a, &one, Ob(0));
        let adj = functor_right_adjoint(&bang).unwrap();
        assert_eq!(a.ob_name(adj.right.ob(Ob(0))), "1");
        let names: Vec<&str> = adj.unit.components.iter().map(|&m| a.mor_name(m)).collect();
        assert_eq!(names, vec!["a", "id_1"]);
        assert!(adj.counit.is_identity());
    }

    #[test]
    fn identity_adjunction() {
        let c = Arc::new(fixtures::p2());
        let adj = functor_right_adjoint(&Functor::identity(&c)).unwrap();
        assert!(adj.right.is_identity());
        assert!(check_triangle_identities(&CatCalc, &adj).unwrap().holds());
    }

    #[test]
    fn const_zero_is_left_adjoint_to_bang() {
        let a = arrow();
        let one = Arc::new(fixtures::one());
        let c0 = Functor::constant(&one, &a, Ob(0));
        let adj = functor_right_adjoint(&c0).unwrap();
        assert_eq!(adj.right, Functor::constant(&a, &one, Ob(0)));
        let c1 = Functor::constant(&one, &a, Ob(1));
        assert!(matches!(functor_right_adjoint(&c1), Err(Error::NoAdjoint(n)) if n == "0"));
    }

    #[test]
    fn corrupted_unit_is_reported() {
        let c = Arc::new(fixtures::fs(2));
        let mut adj = functor_right_adjoint(&Functor::identity(&c)).unwrap();
        let two = c.ob_named("2").unwrap();
        adj.unit.components[two.idx()] = c.mor_named("2->2:[1,0]").unwrap();
        let report = check_triangle_identities(&CatCalc, &adj).unwrap();
        assert!(!report.holds());
        assert!(report.left.unwrap().contains("at `2`"));
    }

    #[test]
    fn left_adjoint_via_opposite() {
        let a = arrow();
        let one = Arc::new(fixtures::one());
        let c1 = Functor::constant(&one, &a, Ob(1));
        let adj = functor_left_adjoint(&c1).unwrap();
        assert_eq!(adj.left, Functor::constant(&a, &one, Ob(0)));
        assert!(check_triangle_identities(&CatCalc, &adj).unwrap().holds());
    }

    fn slice_square(
        p2: &Arc<FinCat>,
        apex: &str,
        top_tgt: &str,
        left_tgt: &str,
        corner: &str,
    ) -> LaxSquare<CatCalc> {
        let ob = |n: &str| p2.ob_named(n).unwrap();
        let le = |a: &str, b: &str| p2.mor_named(&format!("{a}<={b}")).unwrap();
        let s = |n: &str| slice(p2, ob(n), DEFAULT_CAP).unwrap();
        let (s00, s01, s10, s11) = (s(apex), s(top_tgt), s(left_tgt), s(corner));
        let top = postcompose(p2, &s00, &s01, le(apex, top_tgt));
        let left = postcompose(p2, &s00, &s10, le(apex, left_tgt));
        let right = postcompose(p2, &s01, &s11, le(top_tgt, corner));
        let bottom = postcompose(p2, &s10, &s11, le(left_tgt, corner));
        let filler = NatTrans::identity(&right.after(&top).unwrap());
        LaxSquare {
            left_adj: functor_right_adjoint(&left).unwrap(),
            right_adj: functor_right_adjoint(&right).unwrap(),
            top,
            left,
            right,
            bottom,
            filler,
        }
    }

    #[test]
    fn self_indexing_pullback_square_is_beck_chevalley() {
        let p2 = Arc::new(fixtures::p2());
        let sq = slice_square(&p2, "{}", "{1}", "{2}", "{1,2}");
        let a = pullback(&p2, p2.mor_named("{1}<={1,2}").unwrap(), p2.mor_named("{2}<={1,2}").unwrap()).unwrap();
        assert_eq!(p2.ob_name(a.apex), "{}");
        assert!(is_beck_chevalley(&CatCalc, &sq).unwrap().holds);
        assert_eq!(mate(&CatCalc, &sq).unwrap(), mate_via_top(&CatCalc, &sq).unwrap());
    }

    #[test]
    fn self_indexing_non_pullback_square_fails() {
        let p2 = Arc::new(fixtures::p2());
        let sq = slice_square(&p2, "{}", "{1}", "{1}", "{1,2}");
        let bc = is_beck_chevalley(&CatCalc, &sq).unwrap();
        assert!(!bc.holds);
        assert!(bc.witness.unwrap().contains("not invertible"));
    }

    #[test]
    fn identity_square_mate_is_identity() {
        let c = Arc::new(fixtures::p2());
        let id = Functor::identity(&c);
        let adj = functor_right_adjoint(&id).unwrap();
        let sq = LaxSquare {
            top: id.clone(),
            left: id.clone(),
            right: id.clone(),
            bottom: id.clone(),
            filler: NatTrans::identity(&id),
            left_adj: adj.clone(),
            right_adj: adj,
        };
        assert!(mate(&CatCalc, &sq).unwrap().is_identity());
    }

    #[test]
    fn mate_with_identity_verticals_is_filler() {
        // verticals identities: the mate of φ is φ itself
        let p2 = Arc::new(fixtures::p2());
        let id = Functor::identity(&p2);
        let adj = functor_right_adjoint(&id).unwrap();
        let top_ob = p2.ob_named("{1}").unwrap();
        let f = Functor::constant(&p2, &p2, top_ob);
        let g = Functor::constant(&p2, &p2, p2.ob_named("{1,2}").unwrap());
        let phi = NatTrans::new(f.clone(), g.clone(), vec![p2.mor_named("{1}<={1,2}").unwrap(); 4]).unwrap();
        let sq = LaxSquare {
            top: f,
            left: id.clone(),
            right: id,
            bottom: g,
            filler: phi.clone(),
            left_adj: adj.clone(),
            right_adj: adj,
        };
        assert_eq!(mate(&CatCalc, &sq).unwrap().components, phi.components);
    }

    #[test]
    fn natural_iso_search() {
        let c = Arc::new(fixtures::p2());
        let id = Functor::identity(&c);
        assert!(natural_iso(&id, &id).is_some());
        let k = Functor::constant(&c, &c, Ob(0));
        assert!(natural_iso(&id, &k).is_none());
    }
}
