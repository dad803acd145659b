use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::{functor_right_adjoint, is_beck_chevalley, Adjunction, LaxSquare};
use crate::error::{Error, Result};
use crate::fincat::{binary_product, power, terminal_object, Cone, FinCat, Functor, Mor, NatTrans, Ob, Power};
use crate::fixtures::{fs, fs_values};
use crate::marked::{certify, certify_partial, MarkedCat};
use crate::span::{compose_spans, mediate, Span};
use crate::twocat::CatCalc;

fn products(c: &FinCat) -> Result<()> {
    terminal_object(c).map_err(|_| Error::NoProducts("no terminal object".into()))?;
    for a in c.objects() {
        for b in c.objects() {
            product_of(c, a, b)?;
        }
    }
    Ok(())
}

fn product_of(c: &FinCat, a: Ob, b: Ob) -> Result<Cone> {
    binary_product(c, a, b)
        .map_err(|_| Error::NoProducts(format!("no product of `{}` and `{}`", c.ob_name(a), c.ob_name(b))))
}

/// `∏ xs` with the empty product terminal.
fn product_list(c: &FinCat, xs: &[Ob]) -> Result<Ob> {
    let mut acc = terminal_object(c)?;
    for (i, &x) in xs.iter().enumerate() {
        acc = if i == 0 { x } else { product_of(c, acc, x)?.apex };
    }
    Ok(acc)
}

/// Reindexing `C^J → C^I` along `φ: I → J`.
fn reindex(powers: &[Power], values: &[usize], source_size: usize, target_size: usize) -> Result<Functor> {
    let (from, to) = (&powers[target_size], &powers[source_size]);
    let ob_map = from
        .cat
        .objects()
        .map(|y| {
            let ys = from.split_ob(y);
            to.ob(&values.iter().map(|&v| ys[v]).collect::<Vec<_>>())
        })
        .collect();
    let mor_map = from
        .cat
        .morphisms()
        .map(|g| {
            let gs = from.split_mor(g);
            to.mor(&values.iter().map(|&v| gs[v]).collect::<Vec<_>>())
        })
        .collect();
    Functor::new(from.cat.clone(), to.cat.clone(), ob_map, mor_map)
}

/// Reindexing functor, its right adjoint and any formula mismatch.
type Reindexed = (Functor, Adjunction<CatCalc>, Option<String>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidalReport {
    pub holds: bool,
    /// Maps of finite sets checked.
    pub maps: usize,
    /// Every right adjoint agrees with the product formula up to isomorphism.
    pub formula_matches: bool,
    pub formula_failure: Option<String>,
    /// Pullback squares of finite sets checked, read as pushout squares of
    /// the opposite.
    pub squares: usize,
    /// Cospans of finite sets whose pullback leaves the size bound.
    pub uncertified: usize,
    pub collar_change_failure: Option<String>,
}

/// The family `I ↦ C^I` on the opposite of finite sets of size at most `n`,
/// acting by reindexing.  Right adjoints are found by search and compared
/// with `(∏_{φ i = j} x_i)_j`.  Pushforwards must commute with reindexing
/// along every pullback square of finite sets within the size bound, that
/// is, the family has collar change.
pub fn cartesian_monoidal(c: &Arc<FinCat>, n: usize) -> Result<MonoidalReport> {
    products(c)?;
    let fin = Arc::new(fs(n));
    let powers: Vec<Power> = (0..=n).map(|k| power(c, k)).collect();
    let maps: Vec<Mor> = fin.morphisms().collect();
    let computed: Vec<Result<Reindexed>> = maps
        .par_iter()
        .map(|&phi| {
            let (m, k) = (fin.src(phi).idx(), fin.tgt(phi).idx());
            let values = fs_values(&fin, phi);
            let pull = reindex(&powers, &values, m, k)?;
            let adj = functor_right_adjoint(&pull)?;
            let mut mismatch = None;
            for x in powers[m].cat.objects() {
                let xs = powers[m].split_ob(x);
                let found = powers[k].split_ob(adj.right.ob(x));
                for (j, &slot) in found.iter().enumerate() {
                    let fibre: Vec<Ob> = (0..m).filter(|&i| values[i] == j).map(|i| xs[i]).collect();
                    let expected = product_list(c, &fibre)?;
                    if c.find_iso(slot, expected).is_none() {
                        mismatch.get_or_insert_with(|| {
                            format!(
                                "right adjoint of reindexing along `{}` sends `{}` to `{}` in slot {j}, expected `{}`",
                                fin.mor_name(phi),
                                powers[m].cat.ob_name(x),
                                c.ob_name(slot),
                                c.ob_name(expected)
                            )
                        });
                    }
                }
            }
            Ok((pull, adj, mismatch))
        })
        .collect();
    let computed = computed.into_iter().collect::<Result<Vec<_>>>()?;
    let formula_failure = computed.iter().find_map(|(_, _, w)| w.clone());

    // pushout squares of the opposite are pullbacks of finite sets
    let cert = certify_partial(&MarkedCat::maximal(&fin));
    let certified = cert.certificate.as_ref().expect("certificate");
    let cospans = fin
        .morphisms()
        .map(|f| fin.morphisms().filter(|&g| fin.tgt(g) == fin.tgt(f)).count())
        .sum::<usize>();
    let entries: Vec<_> = certified.iter().collect();
    let verdicts: Vec<Result<Option<String>>> = entries
        .par_iter()
        .map(|&(&(f, g), cone)| {
            let image = |h: Mor| &computed[h.idx()].0;
            let (to_f, to_g) = (cone.legs[0], cone.legs[1]);
            let upper = image(to_g).after(image(g))?;
            if upper != image(to_f).after(image(f))? {
                return Err(Error::CoherenceFailure("reindexing is not strictly functorial".into()));
            }
            let sq = LaxSquare {
                top: image(g).clone(),
                left: image(f).clone(),
                right: image(to_g).clone(),
                bottom: image(to_f).clone(),
                filler: NatTrans::identity(&upper),
                left_adj: computed[f.idx()].1.clone(),
                right_adj: computed[to_g.idx()].1.clone(),
            };
            let bc = is_beck_chevalley(&CatCalc, &sq)?;
            Ok(bc.witness.map(|w| format!("`{}` against `{}`: {w}", fin.mor_name(f), fin.mor_name(g))))
        })
        .collect();
    let mut collar_change_failure = None;
    for v in verdicts {
        if let Some(w) = v? {
            collar_change_failure.get_or_insert(w);
        }
    }
    Ok(MonoidalReport {
        holds: formula_failure.is_none() && collar_change_failure.is_none(),
        maps: maps.len(),
        formula_matches: formula_failure.is_none(),
        formula_failure,
        squares: certified.len(),
        uncertified: cospans - certified.len(),
        collar_change_failure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Zigzag {
    pub name: String,
    /// The composite span as `(wrong-way, right-way)`.
    pub composite: String,
    pub iso_to_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfDualityReport {
    pub holds: bool,
    pub zigzags: Vec<Zigzag>,
}

struct Cartesian<'a> {
    c: &'a FinCat,
    terminal: Ob,
}

impl Cartesian<'_> {
    fn prod(&self, a: Ob, b: Ob) -> Result<Cone> {
        product_of(self.c, a, b)
    }

    fn pair(&self, target: &Cone, f: Mor, g: Mor) -> Result<Mor> {
        mediate(self.c, self.c.src(f), target.apex, &[f, g], &target.legs)
    }

    fn bang(&self, a: Ob) -> Mor {
        self.c.hom(a, self.terminal)[0]
    }

    /// `f × g` between chosen products.
    fn times(&self, f: Mor, g: Mor) -> Result<Mor> {
        let c = self.c;
        let from = self.prod(c.src(f), c.src(g))?;
        let to = self.prod(c.tgt(f), c.tgt(g))?;
        self.pair(&to, c.compose(f, from.legs[0]), c.compose(g, from.legs[1]))
    }

    fn tensor(&self, s: &Span, t: &Span) -> Result<Span> {
        Ok(Span {
            left: self.prod(s.left, t.left)?.apex,
            right: self.prod(s.right, t.right)?.apex,
            kernel: self.prod(s.kernel, t.kernel)?.apex,
            wrong_way: self.times(s.wrong_way, t.wrong_way)?,
            right_way: self.times(s.right_way, t.right_way)?,
        })
    }

    fn lower(&self, f: Mor) -> Span {
        let c = self.c;
        Span {
            left: c.src(f),
            right: c.tgt(f),
            kernel: c.src(f),
            wrong_way: c.id(c.src(f)),
            right_way: f,
        }
    }
}

/// Forms evaluation `X×X ← X → 1` and coevaluation `1 ← X → X×X` along the
/// diagonal, composes both zigzags through the unit and associativity
/// isomorphisms of the product, and checks each composite is isomorphic to
/// the identity span of `X`.
pub fn self_duality_check(m: &MarkedCat, x: Ob) -> Result<SelfDualityReport> {
    let c = &m.cat;
    if m.marked().count() != c.num_morphisms() {
        return Err(Error::PreconditionFailed("self-duality needs every morphism marked".into()));
    }
    let m = if m.has_certificate() { m.clone() } else { certify(m)? };
    let terminal = terminal_object(c).map_err(|_| Error::NoProducts("no terminal object".into()))?;
    let k = Cartesian { c, terminal };
    let xx = k.prod(x, x)?;
    let diag = k.pair(&xx, c.id(x), c.id(x))?;
    let ev = Span {
        left: xx.apex,
        right: terminal,
        kernel: x,
        wrong_way: diag,
        right_way: k.bang(x),
    };
    let coev = Span {
        left: terminal,
        right: xx.apex,
        kernel: x,
        wrong_way: k.bang(x),
        right_way: diag,
    };
    let id = Span::identity(c, x);
    // X × (X × X) and (X × X) × X
    let p = k.prod(x, xx.apex)?;
    let q = k.prod(xx.apex, x)?;
    let first_two = k.pair(&xx, p.legs[0], c.compose(xx.legs[0], p.legs[1]))?;
    let assoc = k.pair(&q, first_two, c.compose(xx.legs[1], p.legs[1]))?;
    let last_two = k.pair(&xx, c.compose(xx.legs[1], q.legs[0]), q.legs[1])?;
    let assoc_inv = k.pair(&p, c.compose(xx.legs[0], q.legs[0]), last_two)?;
    let (x1, one_x) = (k.prod(x, terminal)?, k.prod(terminal, x)?);

    let right_first = [
        k.lower(k.pair(&x1, c.id(x), k.bang(x))?),
        k.tensor(&id, &coev)?,
        k.lower(assoc),
        k.tensor(&ev, &id)?,
        k.lower(one_x.legs[1]),
    ];
    let left_first = [
        k.lower(k.pair(&one_x, k.bang(x), c.id(x))?),
        k.tensor(&coev, &id)?,
        k.lower(assoc_inv),
        k.tensor(&id, &ev)?,
        k.lower(x1.legs[0]),
    ];
    let mut zigzags = Vec::new();
    for (name, path) in [("(ev ⊗ 1) ∘ (1 ⊗ coev)", &right_first), ("(1 ⊗ ev) ∘ (coev ⊗ 1)", &left_first)] {
        let mut acc = path[0];
        for s in &path[1..] {
            acc = compose_spans(&m, &acc, s)?.span;
        }
        let iso = acc.wrong_way == acc.right_way && c.is_iso(acc.wrong_way) && acc.left == x && acc.right == x;
        zigzags.push(Zigzag {
            name: name.to_string(),
            composite: acc.name(c),
            iso_to_identity: iso,
        });
    }
    Ok(SelfDualityReport {
        holds: zigzags.iter().all(|z| z.iso_to_identity),
        zigzags,
    })
}
