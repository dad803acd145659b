//! Derived categories: discrete, opposite, products, powers, subcategories
//! and comma categories.

use std::collections::HashMap;
use std::sync::Arc;

use super::{FinCat, Functor, Mor, MorphismRecord, Ob};
use crate::error::{Error, Result};

/// The discrete category on the given object names; identities are `id_<name>`.
pub fn discrete(names: &[String]) -> FinCat {
    let records = names
        .iter()
        .enumerate()
        .map(|(i, n)| MorphismRecord {
            name: format!("id_{n}"),
            src: Ob(i as u32),
            tgt: Ob(i as u32),
        })
        .collect();
    let ids = (0..names.len() as u32).map(Mor).collect();
    FinCat::assemble(names.to_vec(), records, ids, |g, _| Some(g)).expect("discrete category")
}

/// The opposite category: same names and order, endpoints swapped.
pub fn opposite(c: &FinCat) -> FinCat {
    let records = c
        .morphism_records()
        .iter()
        .map(|m| MorphismRecord {
            name: m.name.clone(),
            src: m.tgt,
            tgt: m.src,
        })
        .collect();
    let ids = c.objects().map(|x| c.id(x)).collect();
    FinCat::assemble(c.object_names().to_vec(), records, ids, |g, f| Some(c.compose(f, g)))
        .expect("opposite of a category")
}

/// Binary product `C × D` with lexicographic (left-major) order.
#[derive(Clone, Debug)]
pub struct Product {
    pub cat: Arc<FinCat>,
    pub left: Arc<FinCat>,
    pub right: Arc<FinCat>,
}

impl Product {
    pub fn ob(&self, c: Ob, d: Ob) -> Ob {
        Ob(c.0 * self.right.num_objects() as u32 + d.0)
    }

    pub fn mor(&self, f: Mor, g: Mor) -> Mor {
        Mor(f.0 * self.right.num_morphisms() as u32 + g.0)
    }

    pub fn split_ob(&self, x: Ob) -> (Ob, Ob) {
        let n = self.right.num_objects() as u32;
        (Ob(x.0 / n), Ob(x.0 % n))
    }

    pub fn split_mor(&self, f: Mor) -> (Mor, Mor) {
        let n = self.right.num_morphisms() as u32;
        (Mor(f.0 / n), Mor(f.0 % n))
    }

    pub fn proj_left(&self) -> Functor {
        Functor::unchecked(
            self.cat.clone(),
            self.left.clone(),
            self.cat.objects().map(|x| self.split_ob(x).0).collect(),
            self.cat.morphisms().map(|f| self.split_mor(f).0).collect(),
        )
    }

    pub fn proj_right(&self) -> Functor {
        Functor::unchecked(
            self.cat.clone(),
            self.right.clone(),
            self.cat.objects().map(|x| self.split_ob(x).1).collect(),
            self.cat.morphisms().map(|f| self.split_mor(f).1).collect(),
        )
    }
}

pub fn product(left: &Arc<FinCat>, right: &Arc<FinCat>) -> Product {
    let (c, d) = (left, right);
    let mut objects = Vec::with_capacity(c.num_objects() * d.num_objects());
    for x in c.objects() {
        for y in d.objects() {
            objects.push(format!("({},{})", c.ob_name(x), d.ob_name(y)));
        }
    }
    let nd = d.num_objects() as u32;
    let md = d.num_morphisms() as u32;
    let mut records = Vec::with_capacity(c.num_morphisms() * d.num_morphisms());
    for f in c.morphisms() {
        for g in d.morphisms() {
            records.push(MorphismRecord {
                name: format!("({},{})", c.mor_name(f), d.mor_name(g)),
                src: Ob(c.src(f).0 * nd + d.src(g).0),
                tgt: Ob(c.tgt(f).0 * nd + d.tgt(g).0),
            });
        }
    }
    let mut ids = Vec::with_capacity(objects.len());
    for x in c.objects() {
        for y in d.objects() {
            ids.push(Mor(c.id(x).0 * md + d.id(y).0));
        }
    }
    let cat = FinCat::assemble(objects, records, ids, |g, f| {
        let (g1, g2) = (Mor(g.0 / md), Mor(g.0 % md));
        let (f1, f2) = (Mor(f.0 / md), Mor(f.0 % md));
        Some(Mor(c.compose(g1, f1).0 * md + d.compose(g2, f2).0))
    })
    .expect("product category");
    Product {
        cat: Arc::new(cat),
        left: left.clone(),
        right: right.clone(),
    }
}

/// `F × G` between product categories.
pub fn product_functor(f: &Functor, g: &Functor, source: &Product, target: &Product) -> Functor {
    Functor::unchecked(
        source.cat.clone(),
        target.cat.clone(),
        source
            .cat
            .objects()
            .map(|x| {
                let (a, b) = source.split_ob(x);
                target.ob(f.ob(a), g.ob(b))
            })
            .collect(),
        source
            .cat
            .morphisms()
            .map(|m| {
                let (a, b) = source.split_mor(m);
                target.mor(f.mor(a), g.mor(b))
            })
            .collect(),
    )
}

/// The `k`-fold power `C^k` with tuple names and mixed-radix order.
#[derive(Clone, Debug)]
pub struct Power {
    pub cat: Arc<FinCat>,
    pub base: Arc<FinCat>,
    pub k: usize,
}

impl Power {
    pub fn ob(&self, xs: &[Ob]) -> Ob {
        let n = self.base.num_objects() as u32;
        Ob(xs.iter().fold(0, |acc, x| acc * n + x.0))
    }

    pub fn mor(&self, fs: &[Mor]) -> Mor {
        let m = self.base.num_morphisms() as u32;
        Mor(fs.iter().fold(0, |acc, f| acc * m + f.0))
    }

    pub fn split_ob(&self, x: Ob) -> Vec<Ob> {
        split(x.0, self.base.num_objects() as u32, self.k).into_iter().map(Ob).collect()
    }

    pub fn split_mor(&self, f: Mor) -> Vec<Mor> {
        split(f.0, self.base.num_morphisms() as u32, self.k).into_iter().map(Mor).collect()
    }
}

fn split(mut v: u32, radix: u32, k: usize) -> Vec<u32> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = v % radix;
        v /= radix;
    }
    out
}

fn tuples(radix: u32, k: usize) -> impl Iterator<Item = Vec<u32>> {
    let total = (radix as usize).pow(k as u32);
    (0..total as u32).map(move |v| split(v, radix, k))
}

pub fn power(base: &Arc<FinCat>, k: usize) -> Power {
    let c = base;
    let (n, m) = (c.num_objects() as u32, c.num_morphisms() as u32);
    let enc = |xs: &[u32], radix: u32| xs.iter().fold(0, |acc, x| acc * radix + x);
    let objects: Vec<String> = tuples(n, k)
        .map(|xs| {
            let names: Vec<&str> = xs.iter().map(|&x| c.ob_name(Ob(x))).collect();
            format!("({})", names.join(","))
        })
        .collect();
    let records: Vec<MorphismRecord> = tuples(m, k)
        .map(|fs| {
            let names: Vec<&str> = fs.iter().map(|&f| c.mor_name(Mor(f))).collect();
            let srcs: Vec<u32> = fs.iter().map(|&f| c.src(Mor(f)).0).collect();
            let tgts: Vec<u32> = fs.iter().map(|&f| c.tgt(Mor(f)).0).collect();
            MorphismRecord {
                name: format!("({})", names.join(",")),
                src: Ob(enc(&srcs, n)),
                tgt: Ob(enc(&tgts, n)),
            }
        })
        .collect();
    let ids = tuples(n, k)
        .map(|xs| {
            let idm: Vec<u32> = xs.iter().map(|&x| c.id(Ob(x)).0).collect();
            Mor(enc(&idm, m))
        })
        .collect();
    let cat = FinCat::assemble(objects, records, ids, |g, f| {
        let gs = split(g.0, m, k);
        let fs = split(f.0, m, k);
        let comp: Vec<u32> = gs
            .iter()
            .zip(&fs)
            .map(|(&gi, &fi)| c.compose(Mor(gi), Mor(fi)).0)
            .collect();
        Some(Mor(enc(&comp, m)))
    })
    .expect("power category");
    Power {
        cat: Arc::new(cat),
        base: base.clone(),
        k,
    }
}

/// A subcategory with its inclusion data.
#[derive(Clone, Debug)]
pub struct Sub {
    pub cat: Arc<FinCat>,
    pub ob_incl: Vec<Ob>,
    pub mor_incl: Vec<Mor>,
}

impl Sub {
    pub fn inclusion(&self, ambient: &Arc<FinCat>) -> Functor {
        Functor::unchecked(self.cat.clone(), ambient.clone(), self.ob_incl.clone(), self.mor_incl.clone())
    }
}

/// The subcategory on the given objects and morphisms (kept in ambient
/// order); errors unless it contains identities and is closed.
pub fn subcategory(c: &FinCat, objects: &[Ob], morphisms: &[Mor]) -> Result<Sub> {
    let mut obs: Vec<Ob> = objects.to_vec();
    obs.sort();
    obs.dedup();
    let mut mors: Vec<Mor> = morphisms.to_vec();
    mors.sort();
    mors.dedup();
    let ob_pos: HashMap<Ob, u32> = obs.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let mor_pos: HashMap<Mor, u32> = mors.iter().enumerate().map(|(i, &f)| (f, i as u32)).collect();
    let mut records = Vec::with_capacity(mors.len());
    for &f in &mors {
        let (s, t) = (c.src(f), c.tgt(f));
        let (Some(&si), Some(&ti)) = (ob_pos.get(&s), ob_pos.get(&t)) else {
            return Err(Error::NotClosed(format!(
                "`{}` has an endpoint outside the chosen objects",
                c.mor_name(f)
            )));
        };
        records.push(MorphismRecord {
            name: c.mor_name(f).to_string(),
            src: Ob(si),
            tgt: Ob(ti),
        });
    }
    let mut ids = Vec::with_capacity(obs.len());
    for &x in &obs {
        let id = c.id(x);
        match mor_pos.get(&id) {
            Some(&p) => ids.push(Mor(p)),
            None => {
                return Err(Error::NotClosed(format!("identity of `{}` missing", c.ob_name(x))));
            }
        }
    }
    let mut failure = None;
    let cat = FinCat::assemble(
        obs.iter().map(|&x| c.ob_name(x).to_string()).collect(),
        records,
        ids,
        |g, f| {
            let gf = c.compose(mors[g.idx()], mors[f.idx()]);
            let found = mor_pos.get(&gf).map(|&p| Mor(p));
            if found.is_none() && failure.is_none() {
                failure = Some(format!(
                    "`{}` after `{}` leaves the subcategory",
                    c.mor_name(mors[g.idx()]),
                    c.mor_name(mors[f.idx()])
                ));
            }
            found
        },
    );
    match cat {
        Ok(cat) => Ok(Sub {
            cat: Arc::new(cat),
            ob_incl: obs,
            mor_incl: mors,
        }),
        Err(e) => Err(failure.map(Error::NotClosed).unwrap_or(e)),
    }
}

/// A comma category `F ↓ G` with its projections.
#[derive(Clone, Debug)]
pub struct Comma {
    pub cat: Arc<FinCat>,
    /// Objects as `(a, b, α: F a → G b)`.
    pub objects: Vec<(Ob, Ob, Mor)>,
    /// Morphisms as `(h, k)`.
    pub morphisms: Vec<(Mor, Mor)>,
    pub left: Functor,
    pub right: Functor,
}

impl Comma {
    pub fn find(&self, a: Ob, b: Ob, alpha: Mor) -> Option<Ob> {
        self.objects
            .iter()
            .position(|&o| o == (a, b, alpha))
            .map(|i| Ob(i as u32))
    }
}

/// `F ↓ G` for `F: A → D` and `G: B → D`.
pub fn comma(f: &Functor, g: &Functor, cap: usize) -> Result<Comma> {
    comma_filtered(f, g, cap, |_, _, _| true)
}

/// The full subcategory of `F ↓ G` on objects accepted by `keep`.
pub fn comma_filtered<K>(f: &Functor, g: &Functor, cap: usize, keep: K) -> Result<Comma>
where
    K: Fn(Ob, Ob, Mor) -> bool,
{
    if !super::functor::same_cat(&f.target, &g.target) {
        return Err(Error::PreconditionFailed("comma of functors with different targets".into()));
    }
    let (a_cat, b_cat, d) = (&f.source, &g.source, &f.target);
    let mut objects = Vec::new();
    let mut by_pair: HashMap<(Ob, Ob), Vec<u32>> = HashMap::new();
    for a in a_cat.objects() {
        for b in b_cat.objects() {
            for &alpha in d.hom(f.ob(a), g.ob(b)) {
                if keep(a, b, alpha) {
                    by_pair.entry((a, b)).or_default().push(objects.len() as u32);
                    objects.push((a, b, alpha));
                    if objects.len() > cap {
                        return Err(Error::SizeCap {
                            what: "comma category objects".into(),
                            cap,
                        });
                    }
                }
            }
        }
    }
    let ob_names: Vec<String> = objects
        .iter()
        .map(|&(a, b, alpha)| format!("({},{},{})", a_cat.ob_name(a), b_cat.ob_name(b), d.mor_name(alpha)))
        .collect();
    let mut records = Vec::new();
    let mut morphisms = Vec::new();
    let mut index: HashMap<(u32, u32, Mor, Mor), Mor> = HashMap::new();
    let mut ids = vec![Mor(0); objects.len()];
    for (i, &(a, b, alpha)) in objects.iter().enumerate() {
        for &h in a_cat.out_of(a) {
            for &k in b_cat.out_of(b) {
                let key = (a_cat.tgt(h), b_cat.tgt(k));
                let Some(targets) = by_pair.get(&key) else { continue };
                let lhs = d.compose(g.mor(k), alpha);
                for &j in targets {
                    let beta = objects[j as usize].2;
                    if d.compose(beta, f.mor(h)) == lhs {
                        let m = Mor(records.len() as u32);
                        if a_cat.is_identity(h) && b_cat.is_identity(k) && j as usize == i {
                            ids[i] = m;
                        }
                        index.insert((i as u32, j, h, k), m);
                        records.push(MorphismRecord {
                            name: format!(
                                "({},{}):{}->{}",
                                a_cat.mor_name(h),
                                b_cat.mor_name(k),
                                ob_names[i],
                                ob_names[j as usize]
                            ),
                            src: Ob(i as u32),
                            tgt: Ob(j),
                        });
                        morphisms.push((h, k));
                        if records.len() > cap {
                            return Err(Error::SizeCap {
                                what: "comma category morphisms".into(),
                                cap,
                            });
                        }
                    }
                }
            }
        }
    }
    let ends: Vec<(u32, u32)> = records.iter().map(|r| (r.src.0, r.tgt.0)).collect();
    let cat = FinCat::assemble(ob_names, records, ids, |g2, f2| {
        let (h1, k1) = morphisms[f2.idx()];
        let (h2, k2) = morphisms[g2.idx()];
        index
            .get(&(
                ends[f2.idx()].0,
                ends[g2.idx()].1,
                a_cat.compose(h2, h1),
                b_cat.compose(k2, k1),
            ))
            .copied()
    })?;
    let cat = Arc::new(cat);
    let left = Functor::unchecked(
        cat.clone(),
        a_cat.clone(),
        objects.iter().map(|o| o.0).collect(),
        morphisms.iter().map(|m| m.0).collect(),
    );
    let right = Functor::unchecked(
        cat.clone(),
        b_cat.clone(),
        objects.iter().map(|o| o.1).collect(),
        morphisms.iter().map(|m| m.1).collect(),
    );
    Ok(Comma {
        cat,
        objects,
        morphisms,
        left,
        right,
    })
}

/// The slice `C / x` as the comma category `id ↓ x`.
pub fn slice(c: &Arc<FinCat>, x: Ob, cap: usize) -> Result<Comma> {
    let one = Arc::new(crate::fixtures::one());
    comma(&Functor::identity(c), &Functor::constant(&one, c, x), cap)
}

/// Post-composition `f ∘ −: C/x → C/y` between slices built by [`slice`].
pub fn postcompose(c: &FinCat, from: &Comma, to: &Comma, f: Mor) -> Functor {
    let ob_map: Vec<Ob> = from
        .objects
        .iter()
        .map(|&(a, b, alpha)| to.find(a, b, c.compose(f, alpha)).expect("slice object"))
        .collect();
    let mor_map = from
        .cat
        .morphisms()
        .map(|m| {
            let (s, t) = (ob_map[from.cat.src(m).idx()], ob_map[from.cat.tgt(m).idx()]);
            *to.cat
                .hom(s, t)
                .iter()
                .find(|&&k| to.morphisms[k.idx()] == from.morphisms[m.idx()])
                .expect("slice morphism")
        })
        .collect();
    Functor::unchecked(from.cat.clone(), to.cat.clone(), ob_map, mor_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn opposite_is_involutive() {
        for c in [fixtures::one(), fixtures::arrow(), fixtures::p2(), fixtures::fs(2)] {
            let op = opposite(&c);
            op.validate().unwrap();
            assert_eq!(opposite(&op), c);
        }
        let op = opposite(&fixtures::arrow());
        let a = op.mor_named("a").unwrap();
        assert_eq!(op.ob_name(op.src(a)), "1");
        assert_eq!(opposite(&fixtures::one()), fixtures::one());
    }

    #[test]
    fn arrow_over_one() {
        let a = Arc::new(fixtures::arrow());
        let one = Arc::new(fixtures::one());
        let c1 = Functor::constant(&one, &a, a.ob_named("1").unwrap());
        let cm = comma(&Functor::identity(&a), &c1, usize::MAX).unwrap();
        cm.cat.validate().unwrap();
        assert_eq!(cm.cat.num_objects(), 2);
        assert_eq!(cm.cat.num_morphisms(), 3);
        cm.left.validate().unwrap();
        cm.right.validate().unwrap();
    }

    #[test]
    fn comma_of_constants_is_a_point() {
        let a = Arc::new(fixtures::arrow());
        let one = Arc::new(fixtures::one());
        let c0 = Functor::constant(&one, &a, a.ob_named("0").unwrap());
        let c1 = Functor::constant(&one, &a, a.ob_named("1").unwrap());
        let cm = comma(&c0, &c1, usize::MAX).unwrap();
        assert_eq!((cm.cat.num_objects(), cm.cat.num_morphisms()), (1, 1));
        let id1 = Functor::identity(&one);
        let triv = comma(&id1, &id1, usize::MAX).unwrap();
        assert_eq!((triv.cat.num_objects(), triv.cat.num_morphisms()), (1, 1));
    }

    #[test]
    fn comma_cap() {
        let p = Arc::new(fixtures::p2());
        let id = Functor::identity(&p);
        assert!(matches!(comma(&id, &id, 3), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn products_and_powers_validate() {
        let a = Arc::new(fixtures::arrow());
        let p = product(&a, &a);
        p.cat.validate().unwrap();
        assert_eq!(p.cat.num_objects(), 4);
        p.proj_left().validate().unwrap();
        let pw = power(&Arc::new(fixtures::p2()), 2);
        pw.cat.validate().unwrap();
        assert_eq!(pw.cat.num_morphisms(), 81);
        let x = pw.ob(&[Ob(1), Ob(2)]);
        assert_eq!(pw.split_ob(x), vec![Ob(1), Ob(2)]);
        let zero = power(&a, 0);
        assert_eq!((zero.cat.num_objects(), zero.cat.num_morphisms()), (1, 1));
    }

    #[test]
    fn subcategory_closure() {
        let c = fixtures::chain(3);
        let all_obs: Vec<Ob> = c.objects().collect();
        let ids: Vec<Mor> = c.objects().map(|x| c.id(x)).collect();
        let mut mors = ids.clone();
        mors.push(c.mor_named("0->1").unwrap());
        mors.push(c.mor_named("1->2").unwrap());
        assert!(matches!(subcategory(&c, &all_obs, &mors), Err(Error::NotClosed(_))));
        mors.push(c.mor_named("0->2").unwrap());
        let sub = subcategory(&c, &all_obs, &mors).unwrap();
        assert_eq!(*sub.cat, c);
    }
}
