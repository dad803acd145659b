//! A common interface for 2-dimensional calculations.
//!
//! Adjunctions, mates and bivariance checks are written once against
//! [`TwoCat`] and run both in the strict 2-category of finite categories
//! ([`CatCalc`]) and in explicit finite bicategories.

use std::fmt::Debug;
use std::sync::Arc;

use crate::adjoint::{self, Adjunction};
use crate::error::{Error, Result};
use crate::fincat::{FinCat, Functor, NatTrans};

pub trait TwoCat: Sized + Sync {
    type Obj: Clone + PartialEq + Debug + Send + Sync;
    type One: Clone + PartialEq + Debug + Send + Sync;
    type Two: Clone + PartialEq + Debug + Send + Sync;

    fn src(&self, f: &Self::One) -> Self::Obj;
    fn tgt(&self, f: &Self::One) -> Self::Obj;
    fn identity(&self, x: &Self::Obj) -> Self::One;
    /// `g ∘ f`.
    fn compose(&self, g: &Self::One, f: &Self::One) -> Result<Self::One>;

    fn two_src(&self, a: &Self::Two) -> Self::One;
    fn two_tgt(&self, a: &Self::Two) -> Self::One;
    fn id2(&self, f: &Self::One) -> Self::Two;
    /// Vertical composite `b ∘ a`.
    fn vcomp(&self, b: &Self::Two, a: &Self::Two) -> Result<Self::Two>;
    /// Horizontal composite `b * a` for `a: f ⇒ f'`, `b: g ⇒ g'`.
    fn hcomp(&self, b: &Self::Two, a: &Self::Two) -> Result<Self::Two>;

    /// `(h g) f ⇒ h (g f)`.
    fn associator(&self, h: &Self::One, g: &Self::One, f: &Self::One) -> Result<Self::Two>;
    /// `1 ∘ f ⇒ f`.
    fn left_unitor(&self, f: &Self::One) -> Self::Two;
    /// `f ∘ 1 ⇒ f`.
    fn right_unitor(&self, f: &Self::One) -> Self::Two;
    fn inverse(&self, a: &Self::Two) -> Option<Self::Two>;

    fn is_invertible(&self, a: &Self::Two) -> bool {
        self.inverse(a).is_some()
    }

    /// `None` when the cells agree, otherwise a description of the first
    /// difference.
    fn difference(&self, a: &Self::Two, b: &Self::Two) -> Option<String> {
        (a != b).then(|| format!("{a:?} differs from {b:?}"))
    }

    /// Where `a` fails to be invertible, if it does.
    fn non_invertible_witness(&self, a: &Self::Two) -> Option<String> {
        (!self.is_invertible(a)).then(|| format!("{a:?}"))
    }

    fn find_right_adjoint(&self, f: &Self::One) -> Result<Adjunction<Self>>;

    fn whisker_left(&self, g: &Self::One, a: &Self::Two) -> Result<Self::Two> {
        self.hcomp(&self.id2(g), a)
    }

    fn whisker_right(&self, b: &Self::Two, f: &Self::One) -> Result<Self::Two> {
        self.hcomp(b, &self.id2(f))
    }

    /// Vertical composite of a path given in application order.
    fn vpath(&self, cells: &[Self::Two]) -> Result<Self::Two> {
        let mut it = cells.iter();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::BoundaryMismatch("empty path of 2-cells".into()))?
            .clone();
        for c in it {
            acc = self.vcomp(c, &acc)?;
        }
        Ok(acc)
    }

    fn invert(&self, a: &Self::Two) -> Result<Self::Two> {
        self.inverse(a)
            .ok_or_else(|| Error::NonInvertibleCoherence(format!("{a:?}")))
    }
}

/// The strict 2-category of finite categories, functors and natural
/// transformations.
#[derive(Clone, Copy, Debug, Default)]
pub struct CatCalc;

impl TwoCat for CatCalc {
    type Obj = Arc<FinCat>;
    type One = Functor;
    type Two = NatTrans;

    fn src(&self, f: &Functor) -> Arc<FinCat> {
        f.source.clone()
    }

    fn tgt(&self, f: &Functor) -> Arc<FinCat> {
        f.target.clone()
    }

    fn identity(&self, x: &Arc<FinCat>) -> Functor {
        Functor::identity(x)
    }

    fn compose(&self, g: &Functor, f: &Functor) -> Result<Functor> {
        g.after(f)
    }

    fn two_src(&self, a: &NatTrans) -> Functor {
        a.source.clone()
    }

    fn two_tgt(&self, a: &NatTrans) -> Functor {
        a.target.clone()
    }

    fn id2(&self, f: &Functor) -> NatTrans {
        NatTrans::identity(f)
    }

    fn vcomp(&self, b: &NatTrans, a: &NatTrans) -> Result<NatTrans> {
        b.after(a)
    }

    fn hcomp(&self, b: &NatTrans, a: &NatTrans) -> Result<NatTrans> {
        b.horizontal(a)
    }

    fn associator(&self, h: &Functor, g: &Functor, f: &Functor) -> Result<NatTrans> {
        Ok(NatTrans::identity(&h.after(g)?.after(f)?))
    }

    fn left_unitor(&self, f: &Functor) -> NatTrans {
        NatTrans::identity(f)
    }

    fn right_unitor(&self, f: &Functor) -> NatTrans {
        NatTrans::identity(f)
    }

    fn inverse(&self, a: &NatTrans) -> Option<NatTrans> {
        a.inverse()
    }

    fn is_invertible(&self, a: &NatTrans) -> bool {
        a.is_iso()
    }

    fn difference(&self, a: &NatTrans, b: &NatTrans) -> Option<String> {
        if a.source != b.source || a.target != b.target {
            return Some("transformations have different boundaries".into());
        }
        let c = &a.source.source;
        let d = &a.source.target;
        c.objects().find(|&x| a.at(x) != b.at(x)).map(|x| {
            format!(
                "components at `{}` differ: `{}` vs `{}`",
                c.ob_name(x),
                d.mor_name(a.at(x)),
                d.mor_name(b.at(x))
            )
        })
    }

    fn non_invertible_witness(&self, a: &NatTrans) -> Option<String> {
        a.first_non_iso().map(|x| {
            format!(
                "component `{}` at `{}` is not invertible",
                a.source.target.mor_name(a.at(x)),
                a.source.source.ob_name(x)
            )
        })
    }

    fn find_right_adjoint(&self, f: &Functor) -> Result<Adjunction<CatCalc>> {
        adjoint::functor_right_adjoint(f)
    }
}
