use rayon::prelude::*;
use serde::Serialize;

use super::{adjunct, ob, BivariantReport};
use crate::adjoint::mate;
use crate::bicat::{icon_iso, Cell1, Cell2, Pseudofunctor};
use crate::error::{Error, Result};
use crate::fincat::{Functor, Mor, Ob};
use crate::span::{Corr, Span};
use crate::twocat::TwoCat;

/// The functors `Corr(x, y) → K(Hx, Hy)` sending `(p, q)` to `q_! ∘ p^!`.
#[derive(Clone, Debug)]
pub struct LocalRep {
    pub x: usize,
    /// Indexed by `y`.
    pub functors: Vec<Functor>,
}

fn check_same_base(bv: &BivariantReport, corr: &Corr) -> Result<()> {
    if *bv.base.cat != **corr.base() || bv.marked != corr.marked {
        return Err(Error::PreconditionFailed("correspondences over a different marked category".into()));
    }
    Ok(())
}

/// `q_! ∘ p^!` for a span.
fn represent(bv: &BivariantReport, s: &Span) -> Result<Cell1> {
    let k = bv.target();
    k.compose(&bv.image(s.right_way), &bv.adjunction(s.wrong_way)?.right)
}

/// `H h ∘ p^! ⇒ p'^!` for `h` with `p' ∘ h = p`: the adjunct under
/// `p'_! ⊣ p'^!` of the counit of `p`.
fn transfer(bv: &BivariantReport, h: Mor, p: Mor, p2: Mor) -> Result<Cell2> {
    let k = bv.target();
    let (adj, adj2) = (bv.adjunction(p)?, bv.adjunction(p2)?);
    let x = k.compose(&bv.image(h), &adj.right)?;
    let alpha = k.vpath(&[
        k.invert(&k.associator(&adj2.left, &bv.image(h), &adj.right)?)?,
        k.whisker_right(&bv.compositor(p2, h), &adj.right)?,
        adj.counit,
    ])?;
    k.vpath(&[adjunct(k, adj2, &x, &alpha)?, k.right_unitor(&adj2.right)])
}

/// The 2-cell `q_! p^! ⇒ q'_! p'^!` of a span morphism with kernel map `h`.
fn represent_morphism(bv: &BivariantReport, s: &Span, s2: &Span, h: Mor) -> Result<Cell2> {
    let k = bv.target();
    let r = &bv.adjunction(s.wrong_way)?.right;
    let q2 = bv.image(s2.right_way);
    k.vpath(&[
        k.whisker_right(&k.invert(&bv.compositor(s2.right_way, h))?, r)?,
        k.associator(&q2, &bv.image(h), r)?,
        k.whisker_left(&q2, &transfer(bv, h, s.wrong_way, s2.wrong_way)?)?,
    ])
}

pub fn local_representation(bv: &BivariantReport, corr: &Corr, x: usize) -> Result<LocalRep> {
    check_same_base(bv, corr)?;
    let k = bv.target();
    let n = corr.bicat.n();
    let hx = bv.functor.ob_map[x];
    let functors = (0..n)
        .into_par_iter()
        .map(|y| {
            let sc = corr.span_category(x, y);
            let hy = bv.functor.ob_map[y];
            let obs = sc
                .spans
                .iter()
                .map(|s| represent(bv, s).map(|c| c.ob))
                .collect::<Result<Vec<Ob>>>()?;
            let mors = sc
                .cat
                .morphisms()
                .map(|m| {
                    let (s, s2) = (sc.span(sc.cat.src(m)), sc.span(sc.cat.tgt(m)));
                    represent_morphism(bv, s, s2, sc.kernel_maps[m.idx()]).map(|c| c.mor)
                })
                .collect::<Result<Vec<Mor>>>()?;
            Functor::new(sc.cat.clone(), k.hom(hx, hy).clone(), obs, mors)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalRep { x, functors })
}

/// `R_t ∘ R_p ⇒ R_{p t}` comparing composite and chosen right adjoints.
fn compare_adjoints(bv: &BivariantReport, p: Mor, t: Mor) -> Result<Cell2> {
    let k = bv.target();
    let pt = bv.base.cat.compose(p, t);
    let (ap, at, apt) = (bv.adjunction(p)?, bv.adjunction(t)?, bv.adjunction(pt)?);
    let rr = k.compose(&at.right, &ap.right)?;
    let (hp, ht) = (&ap.left, &at.left);
    let alpha = k.vpath(&[
        k.whisker_right(&k.invert(&bv.compositor(p, t))?, &rr)?,
        k.associator(hp, ht, &rr)?,
        k.whisker_left(hp, &k.invert(&k.associator(ht, &at.right, &ap.right)?)?)?,
        k.whisker_left(hp, &k.whisker_right(&at.counit, &ap.right)?)?,
        k.whisker_left(hp, &k.left_unitor(&ap.right))?,
        ap.counit,
    ])?;
    k.vpath(&[adjunct(k, apt, &rr, &alpha)?, k.right_unitor(&apt.right)])
}

/// `F s2 ∘ F s1 ⇒ F(s2 ∘ s1)` through the inverse Beck-Chevalley mate of
/// the composition square.
fn spex_compositor(bv: &BivariantReport, corr: &Corr, s1: &Span, s2: &Span) -> Result<Cell2> {
    let k = bv.target();
    let comp = corr.compose(s1, s2)?;
    let (t1, t2) = (comp.to_first, comp.to_second);
    let a = bv.image(s2.right_way);
    let b = bv.adjunction(s2.wrong_way)?.right;
    let c = bv.image(s1.right_way);
    let d = bv.adjunction(s1.wrong_way)?.right;
    let cone = corr.marked.certified(s2.wrong_way, s1.right_way)?;
    let mu = mate(&**k, &bv.square(s2.wrong_way, s1.right_way, cone)?)?;
    let mu_inv = k.inverse(&mu).ok_or_else(|| {
        Error::BaseChangeFails(format!("mate of the composition square at `{}`", k.name2(&mu)))
    })?;
    let e = bv.image(t2);
    let g = bv.adjunction(t1)?.right;
    let gd = k.compose(&g, &d)?;
    k.vpath(&[
        k.associator(&a, &b, &k.compose(&c, &d)?)?,
        k.whisker_left(&a, &k.invert(&k.associator(&b, &c, &d)?)?)?,
        k.whisker_left(&a, &k.whisker_right(&mu_inv, &d)?)?,
        k.whisker_left(&a, &k.associator(&e, &g, &d)?)?,
        k.invert(&k.associator(&a, &e, &gd)?)?,
        k.whisker_right(&bv.compositor(s2.right_way, t2), &gd)?,
        k.whisker_left(&bv.image(corr.base().compose(s2.right_way, t2)), &compare_adjoints(bv, s1.wrong_way, t1)?)?,
    ])
}

/// `1 ⇒ H(1) ∘ R_1` from the unitor of `H` and its adjunct.
fn spex_unitor(bv: &BivariantReport, x: usize) -> Result<Cell2> {
    let k = bv.target();
    let id = bv.base.cat.id(ob(x));
    let adj = bv.adjunction(id)?;
    let iota = bv.unitor(x);
    let one = k.identity(&bv.functor.ob_map[x]);
    let alpha = k.vpath(&[k.right_unitor(&adj.left), k.invert(&iota)?])?;
    let iota_r = k.vpath(&[adjunct(k, adj, &one, &alpha)?, k.right_unitor(&adj.right)])?;
    k.vpath(&[k.invert(&k.left_unitor(&one))?, k.hcomp(&iota, &iota_r)?])
}

/// The span extension of a bivariant functor to the correspondence
/// bicategory, validated as a pseudofunctor.
pub fn spex(bv: &BivariantReport, corr: &Corr) -> Result<Pseudofunctor> {
    check_same_base(bv, corr)?;
    let n = corr.bicat.n();
    let locals = (0..n).map(|x| local_representation(bv, corr, x)).collect::<Result<Vec<_>>>()?;
    let hom_maps = locals.into_iter().flat_map(|l| l.functors).collect();
    let f = Pseudofunctor::tabulate(
        corr.bicat.clone(),
        bv.target().clone(),
        bv.functor.ob_map.clone(),
        hom_maps,
        &|x, y, z, g, f| {
            let (s1, s2) = (corr.span_category(x, y).span(f), corr.span_category(y, z).span(g));
            spex_compositor(bv, corr, s1, s2).map(|c| c.mor)
        },
        &|x| spex_unitor(bv, x).map(|c| c.mor),
    )?;
    f.validate()?;
    Ok(f)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntertwineReport {
    pub holds: bool,
    pub pairs_checked: usize,
    pub counterexample: Option<String>,
}

/// Checks that `f` carries composition `Corr(y, z) × Corr(x, y) → Corr(x, z)`
/// to composition in the target up to its compositor: each compositor cell
/// has the right boundary and is invertible, and it is natural in both
/// spans.
pub fn check_composition_intertwine(f: &Pseudofunctor, x: usize, y: usize, z: usize) -> IntertwineReport {
    let (b, k) = (&f.source, &f.target);
    let (hxy, hyz) = (b.hom(x, y), b.hom(y, z));
    let (kx, ky, kz) = (f.ob_map[x], f.ob_map[y], f.ob_map[z]);
    let kh = k.hom(kx, kz);
    let mut report = IntertwineReport {
        holds: true,
        pairs_checked: 0,
        counterexample: None,
    };
    let phi = |g: Ob, ff: Ob| f.compositor(x, y, z, g, ff);
    for g in hyz.objects() {
        for ff in hxy.objects() {
            report.pairs_checked += 1;
            let cell = phi(g, ff);
            let expected_src = k.comp_ob(kx, ky, kz, f.hom_map(y, z).ob(g), f.hom_map(x, y).ob(ff));
            let expected_tgt = f.hom_map(x, z).ob(b.comp_ob(x, y, z, g, ff));
            let describe = || format!("`{}` after `{}`", b.name1(&b.cell1(y, z, g)), b.name1(&b.cell1(x, y, ff)));
            if kh.src(cell) != expected_src || kh.tgt(cell) != expected_tgt {
                report.holds = false;
                report.counterexample = Some(format!("compositor at {} has the wrong boundary", describe()));
                return report;
            }
            if !kh.is_iso(cell) {
                report.holds = false;
                report.counterexample = Some(format!("compositor at {} is not invertible", describe()));
                return report;
            }
        }
    }
    for beta in hyz.morphisms() {
        for alpha in hxy.morphisms() {
            let (g, g2) = (hyz.src(beta), hyz.tgt(beta));
            let (ff, ff2) = (hxy.src(alpha), hxy.tgt(alpha));
            let image = f.hom_map(x, z).mor(b.hcomp_mor(x, y, z, beta, alpha));
            let lhs = kh.compose(image, phi(g, ff));
            let both = k.hcomp_mor(kx, ky, kz, f.hom_map(y, z).mor(beta), f.hom_map(x, y).mor(alpha));
            let rhs = kh.compose(phi(g2, ff2), both);
            if lhs != rhs {
                report.holds = false;
                report.counterexample = Some(format!(
                    "compositor is not natural at `{}` and `{}`",
                    b.name2(&Cell2 { src: y, tgt: z, mor: beta }),
                    b.name2(&Cell2 { src: x, tgt: y, mor: alpha })
                ));
                return report;
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpexReport {
    pub holds: bool,
    /// The extension passed pseudofunctor validation.
    pub validated: bool,
    /// Restricting along the base inclusion gives back the functor up to an
    /// invertible icon.
    pub restricts: bool,
    /// Every hom action agrees with the local representation.
    pub matches_local_representation: bool,
    pub triples_checked: usize,
    pub intertwine_failure: Option<String>,
    pub failure: Option<String>,
}

/// Builds the span extension and checks restriction, hom actions and
/// composition on every triple of objects.
pub fn check_spex(bv: &BivariantReport, corr: &Corr) -> Result<SpexReport> {
    let mut report = SpexReport {
        holds: false,
        validated: false,
        restricts: false,
        matches_local_representation: false,
        triples_checked: 0,
        intertwine_failure: None,
        failure: None,
    };
    let f = match spex(bv, corr) {
        Ok(f) => f,
        Err(e @ (Error::CoherenceFailure(_) | Error::NonInvertibleCoherence(_) | Error::BaseChangeFails(_))) => {
            report.failure = Some(e.to_string());
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.validated = true;
    let (_, incl) = corr.inclusion()?;
    report.restricts = icon_iso(&f.after(&incl)?, &bv.functor).is_some();
    let n = corr.bicat.n();
    let mut matches = true;
    for x in 0..n {
        let local = local_representation(bv, corr, x)?;
        matches &= (0..n).all(|y| *f.hom_map(x, y) == local.functors[y]);
    }
    report.matches_local_representation = matches;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                report.triples_checked += 1;
                let r = check_composition_intertwine(&f, x, y, z);
                if !r.holds && report.intertwine_failure.is_none() {
                    report.intertwine_failure = r.counterexample;
                }
            }
        }
    }
    report.holds = report.restricts && matches && report.intertwine_failure.is_none();
    if !report.restricts {
        report.failure = Some("restriction is not isomorphic to the functor".into());
    }
    Ok(report)
}
