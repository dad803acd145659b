//! Spans with a marked wrong-way leg, their categories, composition by
//! certified pullbacks, and the bicategory of correspondences.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::adjoint::Adjunction;
use crate::bicat::{locally_discrete, sub_bicat_by_spec, Bicat, Cell1, Cell2, LocallyDiscrete, Pseudofunctor, Specification2, SubBicat};
use crate::error::{Error, Result};
use crate::fincat::{product, FinCat, Functor, Mor, MorphismRecord, Ob, Product};
use crate::marked::{certify, validate_marking, MarkedCat};

/// `left ← kernel → right` with marked wrong-way leg.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub left: Ob,
    pub right: Ob,
    pub kernel: Ob,
    pub wrong_way: Mor,
    pub right_way: Mor,
}

impl Span {
    pub fn identity(c: &FinCat, x: Ob) -> Span {
        Span {
            left: x,
            right: x,
            kernel: x,
            wrong_way: c.id(x),
            right_way: c.id(x),
        }
    }

    pub fn name(&self, c: &FinCat) -> String {
        format!("({},{})", c.mor_name(self.wrong_way), c.mor_name(self.right_way))
    }
}

/// The walking span `s0 ← s01 → s1` with `p` marked.
pub fn walking_span() -> MarkedCat {
    let names = ["s0", "s01", "s1"].map(String::from).to_vec();
    let rec = |name: &str, s: u32, t: u32| MorphismRecord {
        name: name.to_string(),
        src: Ob(s),
        tgt: Ob(t),
    };
    let records = vec![
        rec("id_s0", 0, 0),
        rec("id_s01", 1, 1),
        rec("id_s1", 2, 2),
        rec("p", 1, 0),
        rec("q", 1, 2),
    ];
    let cat = FinCat::validated(names, records, vec![Mor(0), Mor(1), Mor(2)], |g, f| match (g.0, f.0) {
        (g, f) if g < 3 && f < 3 => Some(Mor(f)),
        (g, 1) => Some(Mor(g)),
        (0, 3) => Some(Mor(3)),
        (2, 4) => Some(Mor(4)),
        _ => None,
    })
    .expect("walking span");
    validate_marking(&Arc::new(cat), &[Mor(3)]).expect("walking span marking")
}

/// All spans `x ↛ y` and the kernel maps between them.
#[derive(Clone, Debug)]
pub struct SpanCategory {
    pub cat: Arc<FinCat>,
    pub spans: Vec<Span>,
    /// Kernel map of each morphism.
    pub kernel_maps: Vec<Mor>,
    index: HashMap<(Mor, Mor), Ob>,
    mor_index: HashMap<(Ob, Ob, Mor), Mor>,
}

impl SpanCategory {
    pub fn find(&self, s: &Span) -> Option<Ob> {
        self.index.get(&(s.wrong_way, s.right_way)).copied()
    }

    pub fn span(&self, x: Ob) -> &Span {
        &self.spans[x.idx()]
    }

    /// The morphism with kernel map `h` between the given spans.
    pub fn morphism(&self, from: Ob, to: Ob, h: Mor) -> Option<Mor> {
        self.mor_index.get(&(from, to, h)).copied()
    }
}

/// Spans in canonical order of kernel, wrong-way leg, right-way leg.
pub fn spans_between(m: &MarkedCat, x: Ob, y: Ob) -> Vec<Span> {
    let c = &m.cat;
    let mut out = Vec::new();
    for k in c.objects() {
        for &p in c.hom(k, x) {
            if !m.is_marked(p) {
                continue;
            }
            for &q in c.hom(k, y) {
                out.push(Span {
                    left: x,
                    right: y,
                    kernel: k,
                    wrong_way: p,
                    right_way: q,
                });
            }
        }
    }
    out
}

pub fn span_category(m: &MarkedCat, x: Ob, y: Ob, cap: usize) -> Result<SpanCategory> {
    let c = &m.cat;
    let spans = spans_between(m, x, y);
    if spans.len() > cap {
        return Err(Error::SizeCap {
            what: "span category objects".into(),
            cap,
        });
    }
    let names: Vec<String> = spans.iter().map(|s| s.name(c)).collect();
    let mut records = Vec::new();
    let mut kernel_maps = Vec::new();
    let mut mor_index = HashMap::new();
    let mut ids = vec![Mor(0); spans.len()];
    for (i, s) in spans.iter().enumerate() {
        for (j, t) in spans.iter().enumerate() {
            for &h in c.hom(s.kernel, t.kernel) {
                if c.compose(t.wrong_way, h) != s.wrong_way || c.compose(t.right_way, h) != s.right_way {
                    continue;
                }
                let m = Mor(records.len() as u32);
                if i == j && c.is_identity(h) {
                    ids[i] = m;
                }
                records.push(MorphismRecord {
                    name: format!("{}:{}=>{}", c.mor_name(h), names[i], names[j]),
                    src: Ob(i as u32),
                    tgt: Ob(j as u32),
                });
                mor_index.insert((Ob(i as u32), Ob(j as u32), h), m);
                kernel_maps.push(h);
                if records.len() > cap {
                    return Err(Error::SizeCap {
                        what: "span category morphisms".into(),
                        cap,
                    });
                }
            }
        }
    }
    let ends: Vec<(Ob, Ob)> = records.iter().map(|r| (r.src, r.tgt)).collect();
    let cat = FinCat::assemble(names, records, ids, |g, f| {
        let h = c.compose(kernel_maps[g.idx()], kernel_maps[f.idx()]);
        mor_index.get(&(ends[f.idx()].0, ends[g.idx()].1, h)).copied()
    })?;
    let index = spans
        .iter()
        .enumerate()
        .map(|(i, s)| ((s.wrong_way, s.right_way), Ob(i as u32)))
        .collect();
    Ok(SpanCategory {
        cat: Arc::new(cat),
        spans,
        kernel_maps,
        index,
        mor_index,
    })
}

/// A composite span with the projections of its kernel onto the two
/// factors' kernels.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComposedSpan {
    pub span: Span,
    pub to_first: Mor,
    pub to_second: Mor,
}

/// `second ∘ first` through the certified pullback of `second`'s wrong-way
/// leg along `first`'s right-way leg.
pub fn compose_spans(m: &MarkedCat, first: &Span, second: &Span) -> Result<ComposedSpan> {
    if first.right != second.left {
        return Err(Error::BoundaryMismatch("spans are not composable".into()));
    }
    let c = &m.cat;
    let cone = m.certified(second.wrong_way, first.right_way)?;
    let (to_second, to_first) = (cone.legs[0], cone.legs[1]);
    Ok(ComposedSpan {
        span: Span {
            left: first.left,
            right: second.right,
            kernel: cone.apex,
            wrong_way: c.compose(first.wrong_way, to_first),
            right_way: c.compose(second.right_way, to_second),
        },
        to_first,
        to_second,
    })
}

/// The unique `h: from → to` with `to_legs[i] ∘ h = from_legs[i]`.
pub fn mediate(c: &FinCat, from: Ob, to: Ob, from_legs: &[Mor], to_legs: &[Mor]) -> Result<Mor> {
    let mut found = c
        .hom(from, to)
        .iter()
        .copied()
        .filter(|&h| to_legs.iter().zip(from_legs).all(|(&v, &u)| c.compose(v, h) == u));
    let describe = || format!("from `{}` to `{}`", c.ob_name(from), c.ob_name(to));
    match (found.next(), found.next()) {
        (Some(h), None) => Ok(h),
        (None, _) => Err(Error::NonUniqueMediator(format!("no mediating morphism {}", describe()))),
        (Some(_), Some(_)) => Err(Error::NonUniqueMediator(format!("several mediating morphisms {}", describe()))),
    }
}

/// The bicategory of correspondences of a marked category with base change.
#[derive(Clone, Debug)]
pub struct Corr {
    pub bicat: Arc<Bicat>,
    pub marked: MarkedCat,
    homs: Vec<SpanCategory>,
}

impl Corr {
    pub fn base(&self) -> &Arc<FinCat> {
        &self.marked.cat
    }

    pub fn span_category(&self, x: usize, y: usize) -> &SpanCategory {
        &self.homs[x * self.bicat.n() + y]
    }

    pub fn span(&self, f: &Cell1) -> &Span {
        self.span_category(f.src, f.tgt).span(f.ob)
    }

    pub fn cell_of(&self, s: &Span) -> Option<Cell1> {
        let (x, y) = (s.left.idx(), s.right.idx());
        self.span_category(x, y).find(s).map(|ob| Cell1 { src: x, tgt: y, ob })
    }

    pub fn kernel_map(&self, a: &Cell2) -> Mor {
        self.span_category(a.src, a.tgt).kernel_maps[a.mor.idx()]
    }

    /// The 2-cell with kernel map `h` between two spans.
    pub fn two_cell(&self, from: &Cell1, to: &Cell1, h: Mor) -> Result<Cell2> {
        let sc = self.span_category(from.src, from.tgt);
        sc.morphism(from.ob, to.ob, h)
            .map(|mor| Cell2 { src: from.src, tgt: from.tgt, mor })
            .ok_or_else(|| {
                Error::BoundaryMismatch(format!(
                    "`{}` is not a morphism of spans",
                    self.base().mor_name(h)
                ))
            })
    }

    pub fn compose(&self, first: &Span, second: &Span) -> Result<ComposedSpan> {
        compose_spans(&self.marked, first, second)
    }

    /// `f_! = (id, f)`.
    pub fn lower_shriek(&self, f: Mor) -> Cell1 {
        let c = self.base();
        let s = Span {
            left: c.src(f),
            right: c.tgt(f),
            kernel: c.src(f),
            wrong_way: c.id(c.src(f)),
            right_way: f,
        };
        self.cell_of(&s).expect("every morphism gives a span")
    }

    /// `f^! = (f, id)` for marked `f`.
    pub fn upper_shriek(&self, f: Mor) -> Result<Cell1> {
        let c = self.base();
        if !self.marked.is_marked(f) {
            return Err(Error::PreconditionFailed(format!("`{}` is not marked", c.mor_name(f))));
        }
        let s = Span {
            left: c.tgt(f),
            right: c.src(f),
            kernel: c.src(f),
            wrong_way: f,
            right_way: c.id(c.src(f)),
        };
        Ok(self.cell_of(&s).expect("marked morphisms give spans"))
    }

    /// `f_! ⊣ f^!` with the diagonal as unit and `f` itself as counit.
    pub fn shriek_adjunction(&self, f: Mor) -> Result<Adjunction<Bicat>> {
        let c = self.base();
        let (x, y) = (c.src(f), c.tgt(f));
        let left = self.lower_shriek(f);
        let right = self.upper_shriek(f)?;
        let up = self.compose(self.span(&left), self.span(&right))?;
        let diag = mediate(c, x, up.span.kernel, &[c.id(x), c.id(x)], &[up.to_first, up.to_second])?;
        let id_x = self.cell_of(&Span::identity(c, x)).expect("identity span");
        let unit = self.two_cell(&id_x, &self.cell_of(&up.span).expect("composite span"), diag)?;
        let down = self.compose(self.span(&right), self.span(&left))?;
        let id_y = self.cell_of(&Span::identity(c, y)).expect("identity span");
        let counit = self.two_cell(
            &self.cell_of(&down.span).expect("composite span"),
            &id_y,
            c.compose(f, down.to_first),
        )?;
        Ok(Adjunction { left, right, unit, counit })
    }

    /// The inclusion `f ↦ f_!` of the base, as a pseudofunctor from its
    /// locally discrete bicategory.
    pub fn inclusion(&self) -> Result<(LocallyDiscrete, Pseudofunctor)> {
        let c = self.base();
        let ld = locally_discrete(c);
        let n = c.num_objects();
        let mut hom_maps = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let obs: Vec<Ob> = ld
                    .bicat
                    .hom(x, y)
                    .objects()
                    .map(|o| self.lower_shriek(ld.mor(&Cell1 { src: x, tgt: y, ob: o })).ob)
                    .collect();
                let target = self.span_category(x, y);
                let mors = obs.iter().map(|&o| target.cat.id(o)).collect();
                hom_maps.push(Functor::new(ld.bicat.hom(x, y).clone(), target.cat.clone(), obs, mors)?);
            }
        }
        let pf = Pseudofunctor::tabulate(
            ld.bicat.clone(),
            self.bicat.clone(),
            (0..n).collect(),
            hom_maps,
            &|x, y, z, g, f| {
                let (g, f) = (ld.mor(&Cell1 { src: y, tgt: z, ob: g }), ld.mor(&Cell1 { src: x, tgt: y, ob: f }));
                let (gs, fs) = (self.lower_shriek(g), self.lower_shriek(f));
                let comp = self.compose(self.span(&fs), self.span(&gs))?;
                let target = self.lower_shriek(c.compose(g, f));
                let ts = self.span(&target);
                let h = mediate(c, comp.span.kernel, ts.kernel, &[comp.span.wrong_way], &[ts.wrong_way])?;
                let from = self.cell_of(&comp.span).expect("composite span");
                Ok(self.two_cell(&from, &target, h)?.mor)
            },
            &|x| Ok(self.bicat.hom(x, x).id(self.bicat.unit(x))),
        )?;
        Ok((ld, pf))
    }
}

/// Builds `Corr` over a marked category with base change; associators and
/// unitors are the unique mediators between iterated chosen pullbacks.
pub fn build_corr(m: &MarkedCat, cap: usize) -> Result<Corr> {
    let m = if m.has_certificate() { m.clone() } else { certify(m)? };
    let c = m.cat.clone();
    let n = c.num_objects();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let homs: Vec<SpanCategory> = pairs
        .par_iter()
        .map(|&(x, y)| span_category(&m, Ob(x as u32), Ob(y as u32), cap))
        .collect::<Result<_>>()?;
    let hom = |x: usize, y: usize| &homs[x * n + y];
    let compose = |first: &Span, second: &Span| compose_spans(&m, first, second);
    let find = |s: &Span| -> Result<Ob> {
        hom(s.left.idx(), s.right.idx())
            .find(s)
            .ok_or_else(|| Error::PreconditionFailed("composite span missing".into()))
    };
    let cell = |x: usize, y: usize, from: Ob, to: Ob, h: Mor| -> Result<Mor> {
        hom(x, y)
            .morphism(from, to, h)
            .ok_or_else(|| Error::NonUniqueMediator("mediator is not a morphism of spans".into()))
    };
    let bicat = Bicat::strict(
        c.object_names().to_vec(),
        homs.iter().map(|h| h.cat.clone()).collect(),
        (0..n).map(|x| hom(x, x).find(&Span::identity(&c, Ob(x as u32))).expect("identity span")).collect(),
        &|x, y, z, g, f| find(&compose(hom(x, y).span(f), hom(y, z).span(g))?.span),
        &|x, y, z, g, a| {
            let sc = hom(x, y);
            let (f, f2) = (sc.cat.src(a), sc.cat.tgt(a));
            let second = hom(y, z).span(g);
            let one = compose(sc.span(f), second)?;
            let two = compose(sc.span(f2), second)?;
            let h = mediate(
                &c,
                one.span.kernel,
                two.span.kernel,
                &[one.to_second, c.compose(sc.kernel_maps[a.idx()], one.to_first)],
                &[two.to_second, two.to_first],
            )?;
            cell(x, z, find(&one.span)?, find(&two.span)?, h)
        },
        &|x, y, z, b, f| {
            let sc = hom(y, z);
            let (g, g2) = (sc.cat.src(b), sc.cat.tgt(b));
            let first = hom(x, y).span(f);
            let one = compose(first, sc.span(g))?;
            let two = compose(first, sc.span(g2))?;
            let h = mediate(
                &c,
                one.span.kernel,
                two.span.kernel,
                &[c.compose(sc.kernel_maps[b.idx()], one.to_second), one.to_first],
                &[two.to_second, two.to_first],
            )?;
            cell(x, z, find(&one.span)?, find(&two.span)?, h)
        },
    )?;
    let bicat = bicat.with_coherence(
        |_, [x, y, z, w], h3, g2, f1| {
            let (s1, s2, s3) = (hom(x, y).span(f1), hom(y, z).span(g2), hom(z, w).span(h3));
            let c21 = compose(s1, s2)?;
            let c32 = compose(s2, s3)?;
            let left = compose(s1, &c32.span)?;
            let right = compose(&c21.span, s3)?;
            let from = [
                left.to_first,
                c.compose(c32.to_first, left.to_second),
                c.compose(c32.to_second, left.to_second),
            ];
            let to = [
                c.compose(c21.to_first, right.to_first),
                c.compose(c21.to_second, right.to_first),
                right.to_second,
            ];
            let h = mediate(&c, left.span.kernel, right.span.kernel, &from, &to)?;
            cell(x, w, find(&left.span)?, find(&right.span)?, h)
        },
        |_, x, y, f| {
            let s = hom(x, y).span(f);
            let comp = compose(s, &Span::identity(&c, s.right))?;
            cell(x, y, find(&comp.span)?, f, comp.to_first)
        },
        |_, x, y, f| {
            let s = hom(x, y).span(f);
            let comp = compose(&Span::identity(&c, s.left), s)?;
            cell(x, y, find(&comp.span)?, f, comp.to_second)
        },
    )?;
    Ok(Corr {
        bicat: Arc::new(bicat),
        marked: m,
        homs,
    })
}

/// The sub-bicategory of spans whose right-way leg lies in `right_way`.
pub fn restrict_corr(corr: &Corr, right_way: &MarkedCat) -> Result<SubBicat> {
    let c = corr.base();
    if let Some(cert) = &corr.marked.certificate {
        for (&(f, g), cone) in cert.iter() {
            if right_way.is_marked(g) && !right_way.is_marked(cone.legs[0]) {
                return Err(Error::NotClosed(format!(
                    "pulling `{}` back along `{}` leaves the right-way class",
                    c.mor_name(g),
                    c.mor_name(f)
                )));
            }
        }
    }
    let b = &corr.bicat;
    let cells: Vec<Cell1> = b.one_cells().filter(|f| right_way.is_marked(corr.span(f).right_way)).collect();
    sub_bicat_by_spec(b, &Specification2::full_on(b, cells))
}

/// Whether `Corr(D1 × D2)` splits as `Corr(D1) × Corr(D2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductSplitReport {
    pub holds: bool,
    pub objects: usize,
    pub homs_checked: usize,
    pub failure: Option<String>,
}

/// Marks pairs of marked morphisms in `D1 × D2`.
pub fn product_marking(m1: &MarkedCat, m2: &MarkedCat) -> Result<(Product, MarkedCat)> {
    let p = product(&m1.cat, &m2.cat);
    let marked: Vec<Mor> = p
        .cat
        .morphisms()
        .filter(|&f| {
            let (a, b) = p.split_mor(f);
            m1.is_marked(a) && m2.is_marked(b)
        })
        .collect();
    let m = validate_marking(&p.cat, &marked)?;
    Ok((p, m))
}

pub fn corr_product_split(m1: &MarkedCat, m2: &MarkedCat, cap: usize) -> Result<ProductSplitReport> {
    let (p, m) = product_marking(m1, m2)?;
    let whole = build_corr(&m, cap)?;
    let (c1, c2) = (build_corr(m1, cap)?, build_corr(m2, cap)?);
    let n = whole.bicat.n();
    let fail = |msg: String, checked| ProductSplitReport {
        holds: false,
        objects: n,
        homs_checked: checked,
        failure: Some(msg),
    };
    if n != c1.bicat.n() * c2.bicat.n() {
        return Ok(fail("object counts differ".into(), 0));
    }
    let mut checked = 0;
    for x in p.cat.objects() {
        for y in p.cat.objects() {
            let ((x1, x2), (y1, y2)) = (p.split_ob(x), p.split_ob(y));
            let hw = whole.span_category(x.idx(), y.idx());
            let h1 = c1.span_category(x1.idx(), y1.idx());
            let h2 = c2.span_category(x2.idx(), y2.idx());
            let split_span = |s: &Span| -> Option<(Ob, Ob)> {
                let (k1, k2) = p.split_ob(s.kernel);
                let (p1, p2) = p.split_mor(s.wrong_way);
                let (q1, q2) = p.split_mor(s.right_way);
                let a = h1.find(&Span { left: x1, right: y1, kernel: k1, wrong_way: p1, right_way: q1 })?;
                let b = h2.find(&Span { left: x2, right: y2, kernel: k2, wrong_way: p2, right_way: q2 })?;
                Some((a, b))
            };
            let mut seen_obs = std::collections::HashSet::new();
            for s in &hw.spans {
                match split_span(s) {
                    Some(pair) => {
                        seen_obs.insert(pair);
                    }
                    None => return Ok(fail(format!("span `{}` does not split", s.name(&p.cat)), checked)),
                }
            }
            let name = || format!("hom({}, {})", p.cat.ob_name(x), p.cat.ob_name(y));
            if seen_obs.len() != hw.spans.len() || seen_obs.len() != h1.spans.len() * h2.spans.len() {
                return Ok(fail(format!("objects of {} do not split", name()), checked));
            }
            let mut seen_mors = std::collections::HashSet::new();
            for a in hw.cat.morphisms() {
                let (k1, k2) = p.split_mor(hw.kernel_maps[a.idx()]);
                let (s1, s2) = split_span(hw.span(hw.cat.src(a))).expect("split");
                let (t1, t2) = split_span(hw.span(hw.cat.tgt(a))).expect("split");
                match (h1.morphism(s1, t1, k1), h2.morphism(s2, t2, k2)) {
                    (Some(u), Some(v)) => {
                        seen_mors.insert((u, v));
                    }
                    _ => return Ok(fail(format!("a morphism of {} does not split", name()), checked)),
                }
            }
            if seen_mors.len() != hw.cat.num_morphisms()
                || seen_mors.len() != h1.cat.num_morphisms() * h2.cat.num_morphisms()
            {
                return Ok(fail(format!("morphisms of {} do not split", name()), checked));
            }
            checked += 1;
        }
    }
    Ok(ProductSplitReport {
        holds: true,
        objects: n,
        homs_checked: checked,
        failure: None,
    })
}

/// The category of all spans and all maps of span diagrams, with its
/// projection to the two feet.
#[derive(Clone, Debug)]
pub struct SpanTotal {
    pub cat: Arc<FinCat>,
    pub spans: Vec<Span>,
    /// Components `(left, kernel, right)` of each morphism.
    pub components: Vec<(Mor, Mor, Mor)>,
    pub feet: Product,
    pub proj: Functor,
}

pub fn span_total(m: &MarkedCat, cap: usize) -> Result<SpanTotal> {
    let c = &m.cat;
    let mut spans = Vec::new();
    for x in c.objects() {
        for y in c.objects() {
            spans.extend(spans_between(m, x, y));
        }
    }
    if spans.len() > cap {
        return Err(Error::SizeCap { what: "span total objects".into(), cap });
    }
    let names: Vec<String> = spans.iter().map(|s| s.name(c)).collect();
    let mut records = Vec::new();
    let mut components = Vec::new();
    let mut index = HashMap::new();
    let mut ids = vec![Mor(0); spans.len()];
    for (i, s) in spans.iter().enumerate() {
        for (j, t) in spans.iter().enumerate() {
            for &u in c.hom(s.left, t.left) {
                for &v in c.hom(s.right, t.right) {
                    for &h in c.hom(s.kernel, t.kernel) {
                        if c.compose(t.wrong_way, h) != c.compose(u, s.wrong_way)
                            || c.compose(t.right_way, h) != c.compose(v, s.right_way)
                        {
                            continue;
                        }
                        let mm = Mor(records.len() as u32);
                        if i == j && c.is_identity(u) && c.is_identity(v) && c.is_identity(h) {
                            ids[i] = mm;
                        }
                        records.push(MorphismRecord {
                            name: format!(
                                "({},{},{}):{}=>{}",
                                c.mor_name(u),
                                c.mor_name(h),
                                c.mor_name(v),
                                names[i],
                                names[j]
                            ),
                            src: Ob(i as u32),
                            tgt: Ob(j as u32),
                        });
                        index.insert((i, j, u, h, v), mm);
                        components.push((u, h, v));
                        if records.len() > cap {
                            return Err(Error::SizeCap { what: "span total morphisms".into(), cap });
                        }
                    }
                }
            }
        }
    }
    let ends: Vec<(usize, usize)> = records.iter().map(|r| (r.src.idx(), r.tgt.idx())).collect();
    let cat = Arc::new(FinCat::assemble(names, records, ids, |g, f| {
        let ((u2, h2, v2), (u1, h1, v1)) = (components[g.idx()], components[f.idx()]);
        index
            .get(&(ends[f.idx()].0, ends[g.idx()].1, c.compose(u2, u1), c.compose(h2, h1), c.compose(v2, v1)))
            .copied()
    })?);
    let feet = product(c, c);
    let ob_map = spans.iter().map(|s| feet.ob(s.left, s.right)).collect();
    let mor_map = components.iter().map(|&(u, _, v)| feet.mor(u, v)).collect();
    let proj = Functor::new(cat.clone(), feet.cat.clone(), ob_map, mor_map)?;
    Ok(SpanTotal {
        cat,
        spans,
        components,
        feet,
        proj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicat::core1;
    use crate::fincat::DEFAULT_CAP;
    use crate::fixtures;
    use crate::marked::{certify_pairs, validate_marking_names};

    fn arrow_a() -> MarkedCat {
        let c = Arc::new(fixtures::arrow());
        validate_marking_names(&c, &["a".to_string()]).unwrap()
    }

    fn p2_all() -> MarkedCat {
        MarkedCat::maximal(&Arc::new(fixtures::p2()))
    }

    #[test]
    fn walking_span_shape() {
        let w = walking_span();
        assert_eq!((w.cat.num_objects(), w.cat.num_morphisms()), (3, 5));
        assert_eq!(w.marked_names(), vec!["id_s0", "id_s01", "id_s1", "p"]);
    }

    #[test]
    fn span_categories_of_the_arrow() {
        let m = arrow_a();
        let one = span_category(&m, Ob(1), Ob(1), DEFAULT_CAP).unwrap();
        assert_eq!(one.cat.object_names(), &["(a,a)", "(id_1,id_1)"]);
        assert_eq!(one.cat.num_morphisms(), 3);
        let back = span_category(&m, Ob(1), Ob(0), DEFAULT_CAP).unwrap();
        assert_eq!(back.cat.object_names(), &["(a,id_0)"]);
        assert_eq!(back.cat.num_morphisms(), 1);
    }

    #[test]
    fn trivial_marking_gives_discrete_homs() {
        let c = Arc::new(fixtures::chain(3));
        let m = MarkedCat::trivial(&c);
        for x in c.objects() {
            for y in c.objects() {
                let sc = span_category(&m, x, y, DEFAULT_CAP).unwrap();
                assert_eq!(sc.cat.num_objects(), c.hom(x, y).len());
                assert_eq!(sc.cat.num_morphisms(), sc.cat.num_objects());
            }
        }
    }

    #[test]
    fn fs4_composite_kernel() {
        let c = Arc::new(fixtures::fs(4));
        let f = fixtures::fs_morphism(&c, 2, 1, &[0, 0]);
        let m = certify_pairs(&MarkedCat::maximal(&c), &[(f, f)]);
        let s = Span { left: Ob(1), right: Ob(1), kernel: Ob(2), wrong_way: f, right_way: f };
        let comp = compose_spans(&m, &s, &s).unwrap();
        assert_eq!(c.ob_name(comp.span.kernel), "4");
    }

    #[test]
    fn p2_composite_is_the_meet() {
        let m = certify(&p2_all()).unwrap();
        let c = &m.cat;
        let (one, two, top) = (c.ob_named("{1}").unwrap(), c.ob_named("{2}").unwrap(), c.ob_named("{1,2}").unwrap());
        let leg = |k: Ob| c.hom(k, top)[0];
        let s1 = Span { left: top, right: top, kernel: one, wrong_way: leg(one), right_way: leg(one) };
        let s2 = Span { left: top, right: top, kernel: two, wrong_way: leg(two), right_way: leg(two) };
        let comp = compose_spans(&m, &s1, &s2).unwrap();
        assert_eq!(c.ob_name(comp.span.kernel), "{}");
    }

    #[test]
    fn corr_validates_on_fixtures() {
        for m in [MarkedCat::trivial(&Arc::new(fixtures::one())), arrow_a(), p2_all()] {
            let corr = build_corr(&m, DEFAULT_CAP).unwrap();
            corr.bicat.validate().unwrap();
        }
    }

    #[test]
    fn shriek_adjunctions_hold() {
        use crate::adjoint::check_triangle_identities;
        for m in [arrow_a(), p2_all()] {
            let corr = build_corr(&m, DEFAULT_CAP).unwrap();
            for f in m.marked() {
                let adj = corr.shriek_adjunction(f).unwrap();
                assert!(check_triangle_identities(&*corr.bicat, &adj).unwrap().holds());
            }
        }
    }

    #[test]
    fn inclusion_is_a_pseudofunctor() {
        let corr = build_corr(&p2_all(), DEFAULT_CAP).unwrap();
        let (_, incl) = corr.inclusion().unwrap();
        incl.validate().unwrap();
    }

    #[test]
    fn core_of_corr_is_a_quotient() {
        let corr = build_corr(&arrow_a(), DEFAULT_CAP).unwrap();
        let core = core1(&corr.bicat).unwrap();
        // hom(1,1) has two non-isomorphic spans, all other homs one span each
        assert_eq!(core.cat.num_morphisms(), corr.bicat.num_one_cells());
        let p = build_corr(&p2_all(), DEFAULT_CAP).unwrap();
        let core = core1(&p.bicat).unwrap();
        assert!(core.cat.num_morphisms() <= p.bicat.num_one_cells());
    }

    #[test]
    fn op1_exchanges_span_categories() {
        let corr = build_corr(&arrow_a(), DEFAULT_CAP).unwrap();
        let op = crate::bicat::op1(&corr.bicat);
        op.validate().unwrap();
        assert_eq!(op.hom(0, 1), corr.bicat.hom(1, 0));
        assert_eq!(op.hom(1, 0), corr.bicat.hom(0, 1));
    }

    #[test]
    fn restriction_to_invertible_right_legs() {
        let m = arrow_a();
        let corr = build_corr(&m, DEFAULT_CAP).unwrap();
        let isos = MarkedCat::trivial(&m.cat);
        let sub = restrict_corr(&corr, &isos).unwrap();
        sub.bicat.validate().unwrap();
        assert_eq!(sub.bicat.hom(1, 1).object_names(), &["(id_1,id_1)"]);
        let all = MarkedCat::maximal(&m.cat);
        assert_eq!(restrict_corr(&corr, &all).unwrap().bicat, *corr.bicat);
    }

    #[test]
    fn restriction_not_stable_under_pullback() {
        let m = p2_all();
        let corr = build_corr(&m, DEFAULT_CAP).unwrap();
        let c = &m.cat;
        // {1} ≤ {1,2} alone: pulled back along {2} ≤ {1,2} it gives {} ≤ {2}
        let g = c.mor_named("{1}<={1,2}").unwrap();
        let s = validate_marking(c, &[g]).unwrap();
        assert!(matches!(restrict_corr(&corr, &s), Err(Error::NotClosed(_))));
    }

    #[test]
    fn product_splits() {
        let trivial_arrow = MarkedCat::trivial(&Arc::new(fixtures::arrow()));
        let r = corr_product_split(&arrow_a(), &trivial_arrow, DEFAULT_CAP).unwrap();
        assert!(r.holds, "{r:?}");
        let one = MarkedCat::trivial(&Arc::new(fixtures::one()));
        assert!(corr_product_split(&p2_all(), &one, DEFAULT_CAP).unwrap().holds);
    }

    #[test]
    fn span_total_fibres_are_span_categories() {
        let m = arrow_a();
        let t = span_total(&m, DEFAULT_CAP).unwrap();
        for x in m.cat.objects() {
            for y in m.cat.objects() {
                let sc = span_category(&m, x, y, DEFAULT_CAP).unwrap();
                let over = t.feet.ob(x, y);
                let fibre_obs = t.cat.objects().filter(|&o| t.proj.ob(o) == over).count();
                let fibre_mors = t
                    .cat
                    .morphisms()
                    .filter(|&a| t.proj.mor(a) == t.feet.cat.id(over) && t.proj.ob(t.cat.src(a)) == over)
                    .count();
                assert_eq!((fibre_obs, fibre_mors), (sc.cat.num_objects(), sc.cat.num_morphisms()));
            }
        }
    }
}
