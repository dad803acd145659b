use serde::Serialize;

use super::{all_morphisms, is_cartesian, is_cocartesian, marking_of, Fibration};
use crate::error::{Error, Result};
use crate::fincat::{Functor, Mor, Ob, Product, Sub};
use crate::marked::MarkedCat;

/// Which side of a pullback square of a marked map carries Cartesian lifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Cartesian lifts over marked maps, coCartesian lifts over all maps.
    MarkedCartesian,
    /// Cartesian lifts over all maps, coCartesian lifts over marked maps.
    MarkedCocartesian,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BicartesianReport {
    pub holds: bool,
    pub squares: usize,
    pub objects_checked: usize,
    pub failure: Option<String>,
}

/// The comparison `t_! l^! u → r^! b_! u` for a commuting square
/// `b ∘ l = r ∘ t` and `u` over the target of `l`.
fn comparison(fib: &Fibration, l: Mor, b: Mor, r: Mor, t: Mor, u: Ob) -> Result<Mor> {
    let (e, d) = (fib.total(), fib.base());
    let c1 = fib.cart_lift(l, u)?;
    let c2 = fib.cocart_lift(b, u)?;
    let through = e.compose(c2, c1);
    let c3 = fib.cart_lift(r, e.tgt(c2))?;
    let m = fib.factor(e.src(c1), e.src(c3), t, |k| e.compose(c3, k) == through)?;
    let c4 = fib.cocart_lift(t, e.src(c1))?;
    fib.factor(e.tgt(c4), e.src(c3), d.id(d.tgt(t)), |k| e.compose(k, c4) == m)
}

/// Checks that the comparison maps of every certified pullback square of
/// the marking are invertible.  Missing lifts are searched first; their
/// absence makes the check fail.
pub fn check_bicartesian_base_change(
    fib: &Fibration,
    m: &MarkedCat,
    orientation: Orientation,
) -> Result<BicartesianReport> {
    if *m.cat != **fib.base() {
        return Err(Error::PreconditionFailed("marking is on a different base".into()));
    }
    let cert = m
        .certificate
        .as_ref()
        .ok_or_else(|| Error::MissingCertificate("marking carries no base change certificate".into()))?;
    let mut fib = fib.clone();
    let (marked, all) = (marking_of(m), all_morphisms(&m.cat));
    let found = match orientation {
        Orientation::MarkedCartesian => fib.find_lifts(&marked, &all, &|_| true),
        Orientation::MarkedCocartesian => fib.find_lifts(&all, &marked, &|_| true),
    };
    let mut report = BicartesianReport {
        holds: false,
        squares: 0,
        objects_checked: 0,
        failure: None,
    };
    if let Err(missing) = found {
        report.failure = Some(missing.to_string());
        return Ok(report);
    }
    let (e, d) = (fib.total().clone(), fib.base().clone());
    for (&(g, f), cone) in cert.iter() {
        let (l, b, r, t) = match orientation {
            Orientation::MarkedCartesian => (cone.legs[1], f, g, cone.legs[0]),
            Orientation::MarkedCocartesian => (cone.legs[0], g, f, cone.legs[1]),
        };
        report.squares += 1;
        for &u in fib.over(d.tgt(l)) {
            report.objects_checked += 1;
            let nu = comparison(&fib, l, b, r, t, u)?;
            if !e.is_iso(nu) {
                report.failure = Some(format!(
                    "comparison `{}` for `{}` along `{}` at `{}` is not invertible",
                    e.mor_name(nu),
                    d.mor_name(g),
                    d.mor_name(f),
                    e.ob_name(u)
                ));
                return Ok(report);
            }
        }
    }
    report.holds = true;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistedReport {
    pub holds: bool,
    pub conditions: Vec<Condition>,
}

fn condition(name: &str, witness: Option<String>) -> Condition {
    Condition {
        name: name.to_string(),
        holds: witness.is_none(),
        witness,
    }
}

/// Fibre of the left projection over one left object, viewed over the right
/// factor.
struct RightFibre {
    sub: Sub,
    fibration: Fibration,
    local: Vec<Option<Mor>>,
}

/// Checks that `p: E → C × D` is Cartesian over all of `C` and coCartesian
/// over the marked maps of `C` with lifts vertical over `D`, that each fibre
/// over `C` is coCartesian over `D` and Cartesian over the marked maps of
/// `D`, that transport in either variable preserves these lifts, and that
/// base change holds in both variables.
pub fn check_twisted_bicartesian(
    p: &Functor,
    feet: &Product,
    left: &MarkedCat,
    right: &MarkedCat,
) -> Result<TwistedReport> {
    if *p.target != *feet.cat || *feet.left != *left.cat || *feet.right != *right.cat {
        return Err(Error::PreconditionFailed("projection does not land in the product of the markings".into()));
    }
    let (c, d) = (&left.cat, &right.cat);
    let e = p.source.clone();
    let mut conditions = Vec::new();

    let mut lf = Fibration::new(feet.proj_left().after(p)?);
    let vertical = |m: Mor| d.is_identity(feet.split_mor(p.mor(m)).1);
    let left_lifts = lf.find_lifts(&all_morphisms(c), &marking_of(left), &vertical);
    let left_ok = left_lifts.is_ok();
    conditions.push(condition(
        "left projection has vertical Cartesian lifts and marked coCartesian lifts",
        left_lifts.err().map(|m| m.to_string()),
    ));

    let mut fibres = Vec::with_capacity(c.num_objects());
    let mut fibre_failure = None;
    for x in c.objects() {
        let sub = lf.fibre(x);
        let ob_map = sub.ob_incl.iter().map(|&o| feet.split_ob(p.ob(o)).1).collect();
        let mor_map = sub.mor_incl.iter().map(|&m| feet.split_mor(p.mor(m)).1).collect();
        let proj = Functor::new(sub.cat.clone(), d.clone(), ob_map, mor_map)?;
        let mut fibration = Fibration::new(proj);
        if fibre_failure.is_none() {
            if let Err(missing) = fibration.find_lifts(&marking_of(right), &all_morphisms(d), &|_| true) {
                fibre_failure = Some(format!("over `{}`: {missing}", c.ob_name(x)));
            } else {
                let bc = check_bicartesian_base_change(&fibration, right, Orientation::MarkedCartesian)?;
                if let Some(w) = bc.failure {
                    fibre_failure = Some(format!("over `{}`: {w}", c.ob_name(x)));
                }
            }
        }
        let mut local = vec![None; e.num_morphisms()];
        for (i, &m) in sub.mor_incl.iter().enumerate() {
            local[m.idx()] = Some(Mor(i as u32));
        }
        fibres.push(RightFibre { sub, fibration, local });
    }
    let fibres_ok = fibre_failure.is_none();
    conditions.push(condition(
        "fibres over left objects are bicartesian over the right factor with base change",
        fibre_failure,
    ));

    let prerequisite = (!(left_ok && fibres_ok)).then(|| "earlier condition failed".to_string());
    let transport = |cartesian: bool| -> Result<Option<String>> {
        if let Some(w) = &prerequisite {
            return Ok(Some(w.clone()));
        }
        for f in c.morphisms() {
            if !cartesian && !left.is_marked(f) {
                continue;
            }
            let (a, b) = (c.src(f), c.tgt(f));
            let (from, to) = if cartesian { (b, a) } else { (a, b) };
            let (src_fibre, dst_fibre) = (&fibres[from.idx()], &fibres[to.idx()]);
            let lifts = src_fibre.fibration.cart.values().map(|&l| (true, l));
            let colifts = src_fibre.fibration.cocart.values().map(|&l| (false, l));
            for (is_cart, psi) in lifts.chain(colifts) {
                let psi = src_fibre.sub.mor_incl[psi.idx()];
                let (e1, e2) = (e.src(psi), e.tgt(psi));
                let moved = if cartesian {
                    let (l1, l2) = (lf.cart_lift(f, e1)?, lf.cart_lift(f, e2)?);
                    lf.factor(e.src(l1), e.src(l2), c.id(to), |k| e.compose(l2, k) == e.compose(psi, l1))?
                } else {
                    let (l1, l2) = (lf.cocart_lift(f, e1)?, lf.cocart_lift(f, e2)?);
                    lf.factor(e.tgt(l1), e.tgt(l2), c.id(to), |k| e.compose(k, l1) == e.compose(l2, psi))?
                };
                let k = dst_fibre.local[moved.idx()].expect("vertical morphism lies in its fibre");
                let proj = &dst_fibre.fibration.proj;
                let ok = if is_cart { is_cartesian(proj, k) } else { is_cocartesian(proj, k) };
                if !ok {
                    return Ok(Some(format!(
                        "transport along `{}` of `{}` is not {}",
                        c.mor_name(f),
                        e.mor_name(psi),
                        if is_cart { "Cartesian" } else { "coCartesian" }
                    )));
                }
            }
        }
        Ok(None)
    };
    conditions.push(condition("Cartesian transport along left maps preserves fibre lifts", transport(true)?));
    conditions.push(condition(
        "coCartesian transport along marked left maps preserves fibre lifts",
        transport(false)?,
    ));

    let left_bc = match &prerequisite {
        Some(w) if !left_ok => Some(w.clone()),
        _ => check_bicartesian_base_change(&lf, left, Orientation::MarkedCocartesian)?.failure,
    };
    conditions.push(condition("base change in the left variable", left_bc));

    Ok(TwistedReport {
        holds: conditions.iter().all(|c| c.holds),
        conditions,
    })
}
