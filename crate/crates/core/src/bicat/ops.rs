use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use super::{Bicat, Cell1, Cell2};
use crate::error::{Error, Result};
use crate::fincat::{opposite, subcategory, FinCat, Mor, MorphismRecord, Ob, Sub};

/// Chosen objects, 1-cells and 2-cells of a bicategory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Specification2 {
    pub objects: BTreeSet<usize>,
    pub one_cells: BTreeSet<Cell1>,
    pub two_cells: BTreeSet<Cell2>,
}

impl Specification2 {
    /// Everything in `b`.
    pub fn everything(b: &Bicat) -> Specification2 {
        Specification2 {
            objects: (0..b.n()).collect(),
            one_cells: b.one_cells().collect(),
            two_cells: b.two_cells().collect(),
        }
    }

    /// The given 1-cells with all 2-cells between them.
    pub fn full_on(b: &Bicat, one_cells: impl IntoIterator<Item = Cell1>) -> Specification2 {
        let one_cells: BTreeSet<Cell1> = one_cells.into_iter().collect();
        let two_cells = b
            .two_cells()
            .filter(|a| {
                use crate::twocat::TwoCat;
                one_cells.contains(&b.two_src(a)) && one_cells.contains(&b.two_tgt(a))
            })
            .collect();
        Specification2 {
            objects: (0..b.n()).collect(),
            one_cells,
            two_cells,
        }
    }
}

/// A sub-bicategory with its inclusion data.
#[derive(Clone, Debug)]
pub struct SubBicat {
    pub bicat: Bicat,
    /// Ambient index of each object.
    pub objects: Vec<usize>,
    homs: Vec<Sub>,
}

impl SubBicat {
    pub fn include1(&self, f: &Cell1) -> Cell1 {
        let n = self.objects.len();
        Cell1 {
            src: self.objects[f.src],
            tgt: self.objects[f.tgt],
            ob: self.homs[f.src * n + f.tgt].ob_incl[f.ob.idx()],
        }
    }

    pub fn include2(&self, a: &Cell2) -> Cell2 {
        let n = self.objects.len();
        Cell2 {
            src: self.objects[a.src],
            tgt: self.objects[a.tgt],
            mor: self.homs[a.src * n + a.tgt].mor_incl[a.mor.idx()],
        }
    }
}

/// The sub-bicategory exactly fitting `spec`.
pub fn sub_bicat_by_spec(b: &Bicat, spec: &Specification2) -> Result<SubBicat> {
    use crate::twocat::TwoCat;
    let not_closed = |what: String| Err(Error::NotClosed(what));
    for f in &spec.one_cells {
        if !spec.objects.contains(&f.src) || !spec.objects.contains(&f.tgt) {
            return not_closed(format!("`{}` leaves the chosen objects", b.name1(f)));
        }
    }
    for &x in &spec.objects {
        let u = b.identity(&x);
        if !spec.one_cells.contains(&u) {
            return not_closed(format!("identity `{}` is missing", b.name1(&u)));
        }
    }
    for g in &spec.one_cells {
        for f in spec.one_cells.iter().filter(|f| f.tgt == g.src) {
            let gf = b.compose(g, f)?;
            if !spec.one_cells.contains(&gf) {
                return not_closed(format!("composite `{}` is missing", b.name1(&gf)));
            }
        }
    }
    for a in &spec.two_cells {
        if !spec.one_cells.contains(&b.two_src(a)) || !spec.one_cells.contains(&b.two_tgt(a)) {
            return not_closed(format!("`{}` has a boundary outside the chosen 1-cells", b.name2(a)));
        }
    }
    for f in &spec.one_cells {
        if !spec.two_cells.contains(&b.id2(f)) {
            return not_closed(format!("identity on `{}` is missing", b.name1(f)));
        }
    }
    for g in &spec.one_cells {
        for a in spec.two_cells.iter().filter(|a| a.tgt == g.src) {
            let w = b.whisker_left(g, a)?;
            if !spec.two_cells.contains(&w) {
                return not_closed(format!("whiskering `{}` is missing", b.name2(&w)));
            }
        }
        for a in spec.two_cells.iter().filter(|a| a.src == g.tgt) {
            let w = b.whisker_right(a, g)?;
            if !spec.two_cells.contains(&w) {
                return not_closed(format!("whiskering `{}` is missing", b.name2(&w)));
            }
        }
    }
    let cells: Vec<&Cell1> = spec.one_cells.iter().collect();
    let mut coherence = Vec::new();
    for h in &cells {
        for g in cells.iter().filter(|g| g.tgt == h.src) {
            for f in cells.iter().filter(|f| f.tgt == g.src) {
                coherence.push(b.associator(h, g, f)?);
            }
        }
    }
    for f in &cells {
        coherence.push(b.left_unitor(f));
        coherence.push(b.right_unitor(f));
    }
    for c in coherence {
        let inv = b.invert(&c)?;
        for cell in [c, inv] {
            if !spec.two_cells.contains(&cell) {
                return not_closed(format!("coherence cell `{}` is missing", b.name2(&cell)));
            }
        }
    }

    let objects: Vec<usize> = spec.objects.iter().copied().collect();
    let n = objects.len();
    let mut homs = Vec::with_capacity(n * n);
    for &x in &objects {
        for &y in &objects {
            let obs: Vec<Ob> = spec.one_cells.iter().filter(|f| (f.src, f.tgt) == (x, y)).map(|f| f.ob).collect();
            let mors: Vec<Mor> = spec.two_cells.iter().filter(|a| (a.src, a.tgt) == (x, y)).map(|a| a.mor).collect();
            homs.push(subcategory(b.hom(x, y), &obs, &mors)?);
        }
    }
    let ob_pos: Vec<HashMap<Ob, Ob>> = homs
        .iter()
        .map(|s| s.ob_incl.iter().enumerate().map(|(i, &o)| (o, Ob(i as u32))).collect())
        .collect();
    let mor_pos: Vec<HashMap<Mor, Mor>> = homs
        .iter()
        .map(|s| s.mor_incl.iter().enumerate().map(|(i, &m)| (m, Mor(i as u32))).collect())
        .collect();
    let h = |x: usize, y: usize| x * n + y;
    let o = |x: usize| objects[x];
    let units = (0..n).map(|x| ob_pos[h(x, x)][&b.unit(o(x))]).collect();
    let sub = Bicat::strict(
        objects.iter().map(|&x| b.objects[x].clone()).collect(),
        homs.iter().map(|s| s.cat.clone()).collect(),
        units,
        &|x, y, z, g, f| {
            let gf = b.comp_ob(o(x), o(y), o(z), homs[h(y, z)].ob_incl[g.idx()], homs[h(x, y)].ob_incl[f.idx()]);
            Ok(ob_pos[h(x, z)][&gf])
        },
        &|x, y, z, g, a| {
            let m = b.lw(o(x), o(y), o(z), homs[h(y, z)].ob_incl[g.idx()], homs[h(x, y)].mor_incl[a.idx()]);
            Ok(mor_pos[h(x, z)][&m])
        },
        &|x, y, z, be, f| {
            let m = b.rw(o(x), o(y), o(z), homs[h(y, z)].mor_incl[be.idx()], homs[h(x, y)].ob_incl[f.idx()]);
            Ok(mor_pos[h(x, z)][&m])
        },
    )?;
    let bicat = if b.has_identity_coherence() {
        sub
    } else {
        sub.with_coherence(
            |_, [x, y, z, w], hh, g, f| {
                let m = b.assoc(
                    o(x),
                    o(y),
                    o(z),
                    o(w),
                    homs[h(z, w)].ob_incl[hh.idx()],
                    homs[h(y, z)].ob_incl[g.idx()],
                    homs[h(x, y)].ob_incl[f.idx()],
                );
                Ok(mor_pos[h(x, w)][&m])
            },
            |_, x, y, f| Ok(mor_pos[h(x, y)][&b.lunit(o(x), o(y), homs[h(x, y)].ob_incl[f.idx()])]),
            |_, x, y, f| Ok(mor_pos[h(x, y)][&b.runit(o(x), o(y), homs[h(x, y)].ob_incl[f.idx()])]),
        )?
    };
    Ok(SubBicat { bicat, objects, homs })
}

/// The underlying 1-category of a bicategory.
#[derive(Clone, Debug)]
pub struct Core1 {
    pub cat: Arc<FinCat>,
    /// Whether 1-cells compose strictly, so that no quotient was taken.
    pub strict: bool,
    /// Representative 1-cell of each morphism.
    pub representatives: Vec<Cell1>,
}

/// 1-cells under horizontal composition; when composition is not strictly
/// associative and unital, 1-cells are identified up to invertible 2-cells
/// and the least cell of each class represents it.
pub fn core1(b: &Bicat) -> Result<Core1> {
    let n = b.n();
    let strict = is_strict_on_one_cells(b);
    let mut class: HashMap<Cell1, usize> = HashMap::new();
    let mut representatives: Vec<Cell1> = Vec::new();
    for f in b.one_cells() {
        let hom = b.hom(f.src, f.tgt);
        let rep = if strict {
            f
        } else {
            let least = hom.objects().find(|&g| hom.find_iso(g, f.ob).is_some()).expect("reflexive");
            b.cell1(f.src, f.tgt, least)
        };
        if rep == f {
            class.insert(f, representatives.len());
            representatives.push(f);
        } else {
            let c = class[&rep];
            class.insert(f, c);
        }
    }
    let names: Vec<String> = representatives.iter().map(|f| b.hom(f.src, f.tgt).ob_name(f.ob).to_string()).collect();
    let unique = names.iter().collect::<HashSet<_>>().len() == names.len();
    let records = representatives
        .iter()
        .zip(&names)
        .map(|(f, name)| MorphismRecord {
            name: if unique { name.clone() } else { b.name1(f) },
            src: Ob(f.src as u32),
            tgt: Ob(f.tgt as u32),
        })
        .collect();
    let ids = (0..n).map(|x| Mor(class[&b.cell1(x, x, b.unit(x))] as u32)).collect();
    let cat = FinCat::validated(b.objects.clone(), records, ids, |g, f| {
        let (g, f) = (representatives[g.idx()], representatives[f.idx()]);
        (f.tgt == g.src).then(|| Mor(class[&b.cell1(f.src, g.tgt, b.comp_ob(f.src, f.tgt, g.tgt, g.ob, f.ob))] as u32))
    })?;
    Ok(Core1 {
        cat: Arc::new(cat),
        strict,
        representatives,
    })
}

fn is_strict_on_one_cells(b: &Bicat) -> bool {
    let n = b.n();
    for x in 0..n {
        for y in 0..n {
            for f in b.hom(x, y).objects() {
                if b.comp_ob(x, y, y, b.unit(y), f) != f || b.comp_ob(x, x, y, f, b.unit(x)) != f {
                    return false;
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    for h in b.hom(z, w).objects() {
                        for g in b.hom(y, z).objects() {
                            let hg = b.comp_ob(y, z, w, h, g);
                            for f in b.hom(x, y).objects() {
                                let left = b.comp_ob(x, y, w, hg, f);
                                let right = b.comp_ob(x, z, w, h, b.comp_ob(x, y, z, g, f));
                                if left != right {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

fn inverse_in(c: &FinCat, m: Mor) -> Mor {
    c.inverse(m).expect("coherence cells are invertible")
}

/// Reverses 1-cells: `hom'(x, y) = hom(y, x)`.
pub fn op1(b: &Bicat) -> Bicat {
    let n = b.n();
    let homs: Vec<Arc<FinCat>> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .map(|(x, y)| b.hom(y, x).clone())
        .collect();
    let units = (0..n).map(|x| b.unit(x)).collect();
    let out = Bicat::strict(
        b.objects.clone(),
        homs,
        units,
        &|x, y, z, g, f| Ok(b.comp_ob(z, y, x, f, g)),
        &|x, y, z, g, a| Ok(b.rw(z, y, x, a, g)),
        &|x, y, z, be, f| Ok(b.lw(z, y, x, f, be)),
    )
    .expect("opposite tables");
    if b.has_identity_coherence() {
        return out;
    }
    out.with_coherence(
        |_, [x, y, z, w], h, g, f| Ok(inverse_in(b.hom(w, x), b.assoc(w, z, y, x, f, g, h))),
        |_, x, y, f| Ok(b.runit(y, x, f)),
        |_, x, y, f| Ok(b.lunit(y, x, f)),
    )
    .expect("opposite coherence")
}

/// Reverses 2-cells: `hom'(x, y) = hom(x, y)^op`.
pub fn op2(b: &Bicat) -> Bicat {
    let homs: Vec<Arc<FinCat>> = b.homs().iter().map(|h| Arc::new(opposite(h))).collect();
    let units = (0..b.n()).map(|x| b.unit(x)).collect();
    let out = Bicat::strict(
        b.objects.clone(),
        homs,
        units,
        &|x, y, z, g, f| Ok(b.comp_ob(x, y, z, g, f)),
        &|x, y, z, g, a| Ok(b.lw(x, y, z, g, a)),
        &|x, y, z, be, f| Ok(b.rw(x, y, z, be, f)),
    )
    .expect("opposite tables");
    if b.has_identity_coherence() {
        return out;
    }
    out.with_coherence(
        |_, [x, y, z, w], h, g, f| Ok(inverse_in(b.hom(x, w), b.assoc(x, y, z, w, h, g, f))),
        |_, x, y, f| Ok(inverse_in(b.hom(x, y), b.lunit(x, y, f))),
        |_, x, y, f| Ok(inverse_in(b.hom(x, y), b.runit(x, y, f))),
    )
    .expect("opposite coherence")
}
