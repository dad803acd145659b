use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{is_cartesian, is_cocartesian, Fibration, Variance};
use crate::bicat::{cat_universe, icon_iso, locally_discrete, CatUniverse, Cell1, Cell2, LocallyDiscrete, Pseudofunctor};
use crate::error::{Error, Result};
use crate::fincat::{is_equivalence, opposite, FinCat, Functor, Mor, MorphismRecord, NatTrans, Ob, Sub};
use crate::marked::{certify, validate_marking, MarkedCat};

/// The locally discrete source of a family indexed covariantly or
/// contravariantly by `base`.
fn index_bicat(base: &Arc<FinCat>, variance: Variance) -> LocallyDiscrete {
    match variance {
        Variance::Covariant => locally_discrete(base),
        Variance::Contravariant => locally_discrete(&Arc::new(opposite(base))),
    }
}

/// A pseudofunctor on a locally discrete bicategory read as a family of
/// categories, transition functors and coherence components.
struct Family<'a> {
    base: &'a Arc<FinCat>,
    ld: LocallyDiscrete,
    u: &'a CatUniverse,
    f: &'a Pseudofunctor,
    variance: Variance,
}

impl<'a> Family<'a> {
    fn new(base: &'a Arc<FinCat>, u: &'a CatUniverse, f: &'a Pseudofunctor, variance: Variance) -> Result<Family<'a>> {
        let ld = index_bicat(base, variance);
        if *f.source != *ld.bicat {
            return Err(Error::PreconditionFailed(format!(
                "pseudofunctor is not defined on the {} locally discrete base",
                match variance {
                    Variance::Covariant => "covariant",
                    Variance::Contravariant => "opposite",
                }
            )));
        }
        if *f.target != *u.bicat {
            return Err(Error::PreconditionFailed("pseudofunctor does not land in the given universe".into()));
        }
        Ok(Family { base, ld, u, f, variance })
    }

    fn cat(&self, d: Ob) -> &Arc<FinCat> {
        &self.u.cats[self.f.ob_map[d.idx()]]
    }

    /// Forward along `m` when covariant, backward otherwise.
    fn along(&self, m: Mor) -> &Functor {
        self.u.functor(&self.f.apply1(&self.ld.cell(m)))
    }

    /// For `f` then `g` in the base: `F g ∘ F f ⇒ F(g f)` when covariant,
    /// `F f ∘ F g ⇒ F(g f)` otherwise.
    fn compositor(&self, g: Mor, f: Mor) -> &NatTrans {
        let (gc, fc) = (self.ld.cell(g), self.ld.cell(f));
        let (x, y, z, outer, inner) = match self.variance {
            Variance::Covariant => (fc.src, fc.tgt, gc.tgt, gc, fc),
            Variance::Contravariant => (gc.src, gc.tgt, fc.tgt, fc, gc),
        };
        let mor = self.f.compositor(x, y, z, outer.ob, inner.ob);
        self.u.transformation(&Cell2 {
            src: self.f.ob_map[x],
            tgt: self.f.ob_map[z],
            mor,
        })
    }

    /// `1 ⇒ F(1_d)`.
    fn unitor(&self, d: Ob) -> &NatTrans {
        let x = self.f.ob_map[d.idx()];
        self.u.transformation(&Cell2 {
            src: x,
            tgt: x,
            mor: self.f.unitor(d.idx()),
        })
    }

    /// The fibre category holding the component of a morphism over `m`.
    fn component_cat(&self, m: Mor) -> &Arc<FinCat> {
        match self.variance {
            Variance::Covariant => self.cat(self.base.tgt(m)),
            Variance::Contravariant => self.cat(self.base.src(m)),
        }
    }
}

fn not_invertible(what: &str) -> Error {
    Error::NonInvertibleCoherence(what.to_string())
}

/// The total category of a family of categories.
///
/// Covariant: morphisms `(f, ξ): (d, x) → (d', x')` with `ξ: F f (x) → x'`.
/// Contravariant: `ξ: x → F f (x')`.
#[derive(Clone, Debug)]
pub struct Grothendieck {
    pub fibration: Fibration,
    pub variance: Variance,
    /// `(base object, fibre object)` per total object.
    pub objects: Vec<(Ob, Ob)>,
    /// `(base morphism, fibre component)` per total morphism.
    pub morphisms: Vec<(Mor, Mor)>,
    offsets: Vec<usize>,
    index: HashMap<(Mor, Ob, Ob, Mor), Mor>,
}

impl Grothendieck {
    pub fn total(&self) -> &Arc<FinCat> {
        self.fibration.total()
    }

    pub fn object(&self, d: Ob, x: Ob) -> Ob {
        Ob((self.offsets[d.idx()] + x.idx()) as u32)
    }

    pub fn find(&self, m: Mor, src: Ob, tgt: Ob, component: Mor) -> Option<Mor> {
        self.index.get(&(m, src, tgt, component)).copied()
    }
}

pub fn grothendieck(
    base: &Arc<FinCat>,
    u: &CatUniverse,
    f: &Pseudofunctor,
    variance: Variance,
    cap: usize,
) -> Result<Grothendieck> {
    let fam = Family::new(base, u, f, variance)?;
    f.validate()?;
    let mut offsets = Vec::with_capacity(base.num_objects());
    let mut objects = Vec::new();
    let mut names = Vec::new();
    for d in base.objects() {
        offsets.push(objects.len());
        let c = fam.cat(d);
        for x in c.objects() {
            objects.push((d, x));
            names.push(format!("({},{})", base.ob_name(d), c.ob_name(x)));
        }
    }
    if objects.len() > cap {
        return Err(Error::SizeCap { what: "Grothendieck objects".into(), cap });
    }
    let at = |d: Ob, x: Ob| Ob((offsets[d.idx()] + x.idx()) as u32);
    let mut records = Vec::new();
    let mut morphisms = Vec::new();
    let mut index = HashMap::new();
    for m in base.morphisms() {
        let (a, b) = (base.src(m), base.tgt(m));
        let t = fam.along(m);
        let comp = fam.component_cat(m);
        for x in fam.cat(a).objects() {
            for y in fam.cat(b).objects() {
                let xis = match variance {
                    Variance::Covariant => comp.hom(t.ob(x), y),
                    Variance::Contravariant => comp.hom(x, t.ob(y)),
                };
                let (s, tt) = (at(a, x), at(b, y));
                for &xi in xis {
                    index.insert((m, s, tt, xi), Mor(records.len() as u32));
                    records.push(MorphismRecord {
                        name: format!(
                            "({},{}):{}=>{}",
                            base.mor_name(m),
                            comp.mor_name(xi),
                            names[s.idx()],
                            names[tt.idx()]
                        ),
                        src: s,
                        tgt: tt,
                    });
                    morphisms.push((m, xi));
                    if records.len() > cap {
                        return Err(Error::SizeCap { what: "Grothendieck morphisms".into(), cap });
                    }
                }
            }
        }
    }
    let mut ids = Vec::with_capacity(objects.len());
    for (i, &(d, x)) in objects.iter().enumerate() {
        let c = fam.cat(d);
        let unit = fam.unitor(d).at(x);
        let xi = match variance {
            Variance::Covariant => c.inverse(unit).ok_or_else(|| not_invertible("unitor component"))?,
            Variance::Contravariant => unit,
        };
        let o = Ob(i as u32);
        ids.push(index[&(base.id(d), o, o, xi)]);
    }
    let ends: Vec<(Ob, Ob)> = records.iter().map(|r| (r.src, r.tgt)).collect();
    let total = FinCat::validated(names, records, ids, |g, h| {
        let ((mg, zeta), (mf, xi)) = (morphisms[g.idx()], morphisms[h.idx()]);
        let gf = base.compose(mg, mf);
        let phi = fam.compositor(mg, mf);
        let (s, t) = (ends[h.idx()].0, ends[g.idx()].1);
        let comp = fam.component_cat(gf);
        let v = match variance {
            Variance::Covariant => {
                let x = objects[s.idx()].1;
                let inv = comp.inverse(phi.at(x))?;
                comp.compose(zeta, comp.compose(fam.along(mg).mor(xi), inv))
            }
            Variance::Contravariant => {
                let z = objects[t.idx()].1;
                comp.compose(phi.at(z), comp.compose(fam.along(mf).mor(zeta), xi))
            }
        };
        index.get(&(gf, s, t, v)).copied()
    })?;
    let total = Arc::new(total);
    let proj = Functor::new(
        total.clone(),
        base.clone(),
        objects.iter().map(|&(d, _)| d).collect(),
        morphisms.iter().map(|&(m, _)| m).collect(),
    )?;
    let mut fibration = Fibration::new(proj);
    for m in base.morphisms() {
        let (a, b) = (base.src(m), base.tgt(m));
        let t = fam.along(m);
        let comp = fam.component_cat(m);
        match variance {
            Variance::Covariant => {
                for x in fam.cat(a).objects() {
                    let (s, tt) = (at(a, x), at(b, t.ob(x)));
                    fibration.cocart.insert((m, s), index[&(m, s, tt, comp.id(t.ob(x)))]);
                }
            }
            Variance::Contravariant => {
                for y in fam.cat(b).objects() {
                    let (s, tt) = (at(a, t.ob(y)), at(b, y));
                    fibration.cart.insert((m, tt), index[&(m, s, tt, comp.id(t.ob(y)))]);
                }
            }
        }
    }
    let p = &fibration.proj;
    let lifts: Vec<Mor> = fibration.cart.values().chain(fibration.cocart.values()).copied().collect();
    let ok = match variance {
        Variance::Covariant => lifts.par_iter().all(|&l| is_cocartesian(p, l)),
        Variance::Contravariant => lifts.par_iter().all(|&l| is_cartesian(p, l)),
    };
    if !ok {
        return Err(Error::CoherenceFailure("a canonical lift of the total category is not universal".into()));
    }
    Ok(Grothendieck {
        fibration,
        variance,
        objects,
        morphisms,
        offsets,
        index,
    })
}

/// Fibres and transition functors of a fibration, as a pseudofunctor into
/// the universe spanned by the fibres.
#[derive(Clone, Debug)]
pub struct Transport {
    pub base: LocallyDiscrete,
    pub universe: CatUniverse,
    pub fibres: Vec<Sub>,
    pub pseudofunctor: Pseudofunctor,
}

pub fn fibre_transport(fib: &Fibration, variance: Variance, cap: usize) -> Result<Transport> {
    let (d, e) = (fib.base().clone(), fib.total().clone());
    let ld = index_bicat(&d, variance);
    let fibres: Vec<Sub> = d.objects().map(|x| fib.fibre(x)).collect();
    let cats: Vec<Arc<FinCat>> = fibres.iter().map(|s| s.cat.clone()).collect();
    let universe = cat_universe(&cats, cap)?;
    let slot: Vec<usize> = cats.iter().map(|c| universe.index_of(c).expect("fibre in universe")).collect();
    let mut local_ob = vec![Ob(0); e.num_objects()];
    let mut local_mor = vec![Mor(0); e.num_morphisms()];
    for s in &fibres {
        for (i, &o) in s.ob_incl.iter().enumerate() {
            local_ob[o.idx()] = Ob(i as u32);
        }
        for (i, &m) in s.mor_incl.iter().enumerate() {
            local_mor[m.idx()] = Mor(i as u32);
        }
    }
    let lift = |m: Mor, x: Ob| match variance {
        Variance::Covariant => fib.cocart_lift(m, x),
        Variance::Contravariant => fib.cart_lift(m, x),
    };
    // transport along each base morphism, as a functor between fibres
    let mut functors = Vec::with_capacity(d.num_morphisms());
    for m in d.morphisms() {
        let (a, b) = (d.src(m), d.tgt(m));
        let functor = match variance {
            Variance::Covariant => {
                let (from, to) = (&fibres[a.idx()], &fibres[b.idx()]);
                let ob_map = from
                    .ob_incl
                    .iter()
                    .map(|&x| Ok(local_ob[e.tgt(lift(m, x)?).idx()]))
                    .collect::<Result<Vec<_>>>()?;
                let mor_map = from
                    .mor_incl
                    .iter()
                    .map(|&chi| {
                        let (l1, l2) = (lift(m, e.src(chi))?, lift(m, e.tgt(chi))?);
                        let k = fib.factor(e.tgt(l1), e.tgt(l2), d.id(b), |k| {
                            e.compose(k, l1) == e.compose(l2, chi)
                        })?;
                        Ok(local_mor[k.idx()])
                    })
                    .collect::<Result<Vec<_>>>()?;
                Functor::new(from.cat.clone(), to.cat.clone(), ob_map, mor_map)?
            }
            Variance::Contravariant => {
                let (from, to) = (&fibres[b.idx()], &fibres[a.idx()]);
                let ob_map = from
                    .ob_incl
                    .iter()
                    .map(|&x| Ok(local_ob[e.src(lift(m, x)?).idx()]))
                    .collect::<Result<Vec<_>>>()?;
                let mor_map = from
                    .mor_incl
                    .iter()
                    .map(|&chi| {
                        let (l1, l2) = (lift(m, e.src(chi))?, lift(m, e.tgt(chi))?);
                        let k = fib.factor(e.src(l1), e.src(l2), d.id(a), |k| {
                            e.compose(l2, k) == e.compose(chi, l1)
                        })?;
                        Ok(local_mor[k.idx()])
                    })
                    .collect::<Result<Vec<_>>>()?;
                Functor::new(from.cat.clone(), to.cat.clone(), ob_map, mor_map)?
            }
        };
        functors.push(functor);
    }
    let missing = |what: &str| Error::PreconditionFailed(format!("{what} missing from the fibre universe"));
    let cell_of = |m: Mor, x: usize, y: usize| -> Result<Ob> {
        universe
            .funcat(slot[x], slot[y])
            .object_of(&functors[m.idx()])
            .ok_or_else(|| missing("transport functor"))
    };
    let n = d.num_objects();
    let mut hom_maps = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let src = ld.bicat.hom(x, y).clone();
            let tgt = universe.bicat.hom(slot[x], slot[y]).clone();
            let ob_map = src
                .objects()
                .map(|i| cell_of(ld.mor(&Cell1 { src: x, tgt: y, ob: i }), x, y))
                .collect::<Result<Vec<_>>>()?;
            let mor_map = ob_map.iter().map(|&o| tgt.id(o)).collect();
            hom_maps.push(Functor::new(src, tgt, ob_map, mor_map)?);
        }
    }
    let fibre_ob = |x: usize, i: Ob| fibres[x].ob_incl[i.idx()];
    let compositor = |x: usize, y: usize, z: usize, g: Ob, f: Ob| -> Result<Mor> {
        let gm = ld.mor(&Cell1 { src: y, tgt: z, ob: g });
        let fm = ld.mor(&Cell1 { src: x, tgt: y, ob: f });
        let gf = ld.cat.compose(gm, fm);
        let source = functors[gm.idx()].after(&functors[fm.idx()])?;
        let target = &functors[gf.idx()];
        let comps = fibres[x]
            .cat
            .objects()
            .map(|i| {
                let o = fibre_ob(x, i);
                let l1 = lift(fm, o)?;
                let k = match variance {
                    Variance::Covariant => {
                        let l2 = lift(gm, e.tgt(l1))?;
                        let l3 = lift(gf, o)?;
                        fib.factor(e.tgt(l2), e.tgt(l3), d.id(Ob(z as u32)), |k| {
                            e.compose_path(&[l1, l2, k]) == l3
                        })?
                    }
                    Variance::Contravariant => {
                        let l2 = lift(gm, e.src(l1))?;
                        let l3 = lift(gf, o)?;
                        fib.factor(e.src(l2), e.src(l3), d.id(Ob(z as u32)), |k| {
                            e.compose(l3, k) == e.compose(l1, l2)
                        })?
                    }
                };
                Ok(local_mor[k.idx()])
            })
            .collect::<Result<Vec<_>>>()?;
        let t = NatTrans::new(source, target.clone(), comps)?;
        universe
            .funcat(slot[x], slot[z])
            .morphism_of(&t)
            .ok_or_else(|| missing("compositor"))
    };
    let unitor = |x: usize| -> Result<Mor> {
        let dx = Ob(x as u32);
        let idm = d.id(dx);
        let comps = fibres[x]
            .cat
            .objects()
            .map(|i| {
                let o = fibre_ob(x, i);
                let l = lift(idm, o)?;
                let k = match variance {
                    Variance::Covariant => l,
                    Variance::Contravariant => fib.factor(o, e.src(l), idm, |k| e.compose(l, k) == e.id(o))?,
                };
                Ok(local_mor[k.idx()])
            })
            .collect::<Result<Vec<_>>>()?;
        let t = NatTrans::new(Functor::identity(&fibres[x].cat), functors[idm.idx()].clone(), comps)?;
        universe
            .funcat(slot[x], slot[x])
            .morphism_of(&t)
            .ok_or_else(|| missing("unitor"))
    };
    let pseudofunctor = Pseudofunctor::tabulate(
        ld.bicat.clone(),
        universe.bicat.clone(),
        slot.clone(),
        hom_maps,
        &compositor,
        &unitor,
    )?;
    Ok(Transport {
        base: ld,
        universe,
        fibres,
        pseudofunctor,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RoundTripReport {
    pub holds: bool,
    pub total_objects: usize,
    pub total_morphisms: usize,
    pub failure: Option<String>,
}

impl RoundTripReport {
    fn new(total: &FinCat, failure: Option<String>) -> RoundTripReport {
        RoundTripReport {
            holds: failure.is_none(),
            total_objects: total.num_objects(),
            total_morphisms: total.num_morphisms(),
            failure,
        }
    }
}

/// Builds the total category of `f`, transports its fibres back and compares
/// the result with `f` by an icon isomorphism, after identifying each fibre
/// with the category it came from.
pub fn grothendieck_round_trip(
    base: &Arc<FinCat>,
    u: &CatUniverse,
    f: &Pseudofunctor,
    variance: Variance,
    cap: usize,
) -> Result<RoundTripReport> {
    let g = grothendieck(base, u, f, variance, cap)?;
    let total = g.total().clone();
    let t = fibre_transport(&g.fibration, variance, cap)?;
    if let Err(err) = t.pseudofunctor.validate() {
        return Ok(RoundTripReport::new(&total, Some(format!("transport is not a pseudofunctor: {err}"))));
    }
    let fam = Family::new(base, u, f, variance)?;
    let mut theta = Vec::new();
    let mut theta_inv = Vec::new();
    for d in base.objects() {
        let fibre = &t.fibres[d.idx()];
        let c = fam.cat(d);
        let unit = fam.unitor(d);
        let ob_map: Vec<Ob> = fibre.ob_incl.iter().map(|&o| g.objects[o.idx()].1).collect();
        let mor_map = fibre
            .mor_incl
            .iter()
            .map(|&m| {
                let xi = g.morphisms[m.idx()].1;
                let (x, y) = (g.objects[total.src(m).idx()].1, g.objects[total.tgt(m).idx()].1);
                Ok(match variance {
                    Variance::Covariant => c.compose(xi, unit.at(x)),
                    Variance::Contravariant => {
                        c.compose(c.inverse(unit.at(y)).ok_or_else(|| not_invertible("unitor"))?, xi)
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let forward = Functor::new(fibre.cat.clone(), c.clone(), ob_map, mor_map)?;
        let local = |o: Ob| Ob(fibre.ob_incl.iter().position(|&p| p == o).expect("fibre object") as u32);
        let inv_ob: Vec<Ob> = c.objects().map(|x| local(g.object(d, x))).collect();
        let inv_mor = c
            .morphisms()
            .map(|zeta| {
                let (x, y) = (c.src(zeta), c.tgt(zeta));
                let xi = match variance {
                    Variance::Covariant => {
                        c.compose(zeta, c.inverse(unit.at(x)).ok_or_else(|| not_invertible("unitor"))?)
                    }
                    Variance::Contravariant => c.compose(unit.at(y), zeta),
                };
                let m = g
                    .find(base.id(d), g.object(d, x), g.object(d, y), xi)
                    .ok_or_else(|| Error::CoherenceFailure("fibre morphism missing".into()))?;
                Ok(Mor(fibre.mor_incl.iter().position(|&p| p == m).expect("fibre morphism") as u32))
            })
            .collect::<Result<Vec<_>>>()?;
        let backward = Functor::new(c.clone(), fibre.cat.clone(), inv_ob, inv_mor)?;
        if !forward.after(&backward)?.is_identity() || !backward.after(&forward)?.is_identity() {
            return Ok(RoundTripReport::new(
                &total,
                Some(format!("fibre over `{}` is not identified with its category", base.ob_name(d))),
            ));
        }
        theta.push(forward);
        theta_inv.push(backward);
    }
    let ld = &t.base;
    let n = base.num_objects();
    let conj = |x: usize, y: usize, cell: Ob| -> Result<Functor> {
        let moved = t.universe.functor(&t.pseudofunctor.apply1(&Cell1 { src: x, tgt: y, ob: cell }));
        theta[y].after(&moved.after(&theta_inv[x])?)
    };
    let missing = || Error::PreconditionFailed("conjugated cell missing from the universe".into());
    let mut hom_maps = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let src = ld.bicat.hom(x, y).clone();
            let tgt = u.bicat.hom(f.ob_map[x], f.ob_map[y]).clone();
            let ob_map = src
                .objects()
                .map(|i| u.funcat(f.ob_map[x], f.ob_map[y]).object_of(&conj(x, y, i)?).ok_or_else(missing))
                .collect::<Result<Vec<_>>>()?;
            let mor_map = ob_map.iter().map(|&o| tgt.id(o)).collect();
            hom_maps.push(Functor::new(src, tgt, ob_map, mor_map)?);
        }
    }
    let compositor = |x: usize, y: usize, z: usize, gc: Ob, fc: Ob| -> Result<Mor> {
        let alpha = t.universe.transformation(&Cell2 {
            src: t.pseudofunctor.ob_map[x],
            tgt: t.pseudofunctor.ob_map[z],
            mor: t.pseudofunctor.compositor(x, y, z, gc, fc),
        });
        let gf = ld.bicat.comp_ob(x, y, z, gc, fc);
        let source = conj(y, z, gc)?.after(&conj(x, y, fc)?)?;
        let comps = fam
            .cat(Ob(x as u32))
            .objects()
            .map(|w| theta[z].mor(alpha.at(theta_inv[x].ob(w))))
            .collect();
        let nt = NatTrans::new(source, conj(x, z, gf)?, comps)?;
        u.funcat(f.ob_map[x], f.ob_map[z]).morphism_of(&nt).ok_or_else(missing)
    };
    let unitor = |x: usize| -> Result<Mor> {
        let beta = t.universe.transformation(&Cell2 {
            src: t.pseudofunctor.ob_map[x],
            tgt: t.pseudofunctor.ob_map[x],
            mor: t.pseudofunctor.unitor(x),
        });
        let c = fam.cat(Ob(x as u32));
        let comps = c.objects().map(|w| theta[x].mor(beta.at(theta_inv[x].ob(w)))).collect();
        let nt = NatTrans::new(Functor::identity(c), conj(x, x, ld.bicat.unit(x))?, comps)?;
        u.funcat(f.ob_map[x], f.ob_map[x]).morphism_of(&nt).ok_or_else(missing)
    };
    let back = Pseudofunctor::tabulate(
        f.source.clone(),
        u.bicat.clone(),
        f.ob_map.clone(),
        hom_maps,
        &compositor,
        &unitor,
    )?;
    if let Err(err) = back.validate() {
        return Ok(RoundTripReport::new(&total, Some(format!("conjugated transport is not a pseudofunctor: {err}"))));
    }
    let failure = icon_iso(&back, f).is_none().then(|| "no icon isomorphism to the original family".to_string());
    Ok(RoundTripReport::new(&total, failure))
}

/// Transports the fibres of `fib`, rebuilds the total category and checks
/// that the comparison functor into the original total category is an
/// equivalence over the base.
pub fn transport_round_trip(fib: &Fibration, variance: Variance, cap: usize) -> Result<RoundTripReport> {
    let t = fibre_transport(fib, variance, cap)?;
    let (d, e) = (fib.base(), fib.total());
    let g = grothendieck(d, &t.universe, &t.pseudofunctor, variance, cap)?;
    let total = g.total().clone();
    let ob_map: Vec<Ob> = g
        .objects
        .iter()
        .map(|&(x, i)| t.fibres[x.idx()].ob_incl[i.idx()])
        .collect();
    let mor_map = total
        .morphisms()
        .map(|k| {
            let (m, xi) = g.morphisms[k.idx()];
            let (a, b) = (d.src(m), d.tgt(m));
            Ok(match variance {
                Variance::Covariant => {
                    let lift = fib.cocart_lift(m, ob_map[total.src(k).idx()])?;
                    e.compose(t.fibres[b.idx()].mor_incl[xi.idx()], lift)
                }
                Variance::Contravariant => {
                    let lift = fib.cart_lift(m, ob_map[total.tgt(k).idx()])?;
                    e.compose(lift, t.fibres[a.idx()].mor_incl[xi.idx()])
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = match Functor::new(total.clone(), e.clone(), ob_map, mor_map) {
        Ok(phi) => phi,
        Err(err) => return Ok(RoundTripReport::new(&total, Some(format!("comparison is not a functor: {err}")))),
    };
    if fib.proj.after(&phi)? != g.fibration.proj {
        return Ok(RoundTripReport::new(&total, Some("comparison does not lie over the base".into())));
    }
    let eq = is_equivalence(&phi);
    let failure = (!eq.holds()).then(|| {
        format!(
            "comparison is not an equivalence: {}",
            eq.witness.unwrap_or_else(|| "no witness".into())
        )
    });
    Ok(RoundTripReport::new(&total, failure))
}

/// The total category of a contravariant family of marked categories,
/// marked by the union of the fibre markings, with its base change
/// certificate.
pub fn integral_marking(
    base: &Arc<FinCat>,
    u: &CatUniverse,
    family: &Pseudofunctor,
    markings: &[MarkedCat],
    cap: usize,
) -> Result<(Grothendieck, MarkedCat)> {
    let fam = Family::new(base, u, family, Variance::Contravariant)?;
    if markings.len() != base.num_objects() {
        return Err(Error::PreconditionFailed("one marking per base object is required".into()));
    }
    for d in base.objects() {
        if *markings[d.idx()].cat != **fam.cat(d) {
            return Err(Error::PreconditionFailed(format!(
                "marking over `{}` is on a different category",
                base.ob_name(d)
            )));
        }
    }
    let g = grothendieck(base, u, family, Variance::Contravariant, cap)?;
    let total = g.total().clone();
    let mut marked = Vec::new();
    for k in total.morphisms() {
        let (m, xi) = g.morphisms[k.idx()];
        if !base.is_identity(m) {
            continue;
        }
        let d = base.src(m);
        let c = fam.cat(d);
        let y = g.objects[total.tgt(k).idx()].1;
        let back = c.inverse(fam.unitor(d).at(y)).ok_or_else(|| not_invertible("unitor"))?;
        if markings[d.idx()].is_marked(c.compose(back, xi)) {
            marked.push(k);
        }
    }
    let m = certify(&validate_marking(&total, &marked)?)?;
    Ok((g, m))
}

/// The strict family with the given categories and transition functors,
/// one per base morphism (covariant: `F(src) → F(tgt)`; contravariant:
/// `F(tgt) → F(src)`).  Fails unless the functors compose strictly.
pub fn strict_family(
    base: &Arc<FinCat>,
    u: &CatUniverse,
    ob_map: Vec<usize>,
    functors: &[Functor],
    variance: Variance,
) -> Result<Pseudofunctor> {
    let ld = index_bicat(base, variance);
    if ob_map.len() != base.num_objects() || functors.len() != base.num_morphisms() {
        return Err(Error::Format("family needs one category per object and one functor per morphism".into()));
    }
    let cells = functors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let cell = u
                .cell1_of(f)
                .ok_or_else(|| Error::InvalidFunctor(format!("functor over `{}` is not in the universe", base.mor_name(Mor(i as u32)))))?;
            let c = ld.cell(Mor(i as u32));
            if cell.src != ob_map[c.src] || cell.tgt != ob_map[c.tgt] {
                return Err(Error::InvalidFunctor(format!(
                    "functor over `{}` has the wrong endpoints",
                    base.mor_name(Mor(i as u32))
                )));
            }
            Ok(cell)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = base.num_objects();
    let mut hom_maps = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let src = ld.bicat.hom(x, y).clone();
            let tgt = u.bicat.hom(ob_map[x], ob_map[y]).clone();
            let obs: Vec<Ob> = src.objects().map(|i| cells[ld.mor(&Cell1 { src: x, tgt: y, ob: i }).idx()].ob).collect();
            let mors = obs.iter().map(|&o| tgt.id(o)).collect();
            hom_maps.push(Functor::new(src, tgt, obs, mors)?);
        }
    }
    let b = &u.bicat;
    let compositor = |x: usize, y: usize, z: usize, g: Ob, f: Ob| -> Result<Mor> {
        let (gm, fm) = (ld.mor(&Cell1 { src: y, tgt: z, ob: g }), ld.mor(&Cell1 { src: x, tgt: y, ob: f }));
        let composite = b.comp_ob(ob_map[x], ob_map[y], ob_map[z], cells[gm.idx()].ob, cells[fm.idx()].ob);
        if composite != cells[ld.cat.compose(gm, fm).idx()].ob {
            return Err(Error::CoherenceFailure(format!(
                "transition functors over `{}` and `{}` do not compose strictly",
                base.mor_name(gm),
                base.mor_name(fm)
            )));
        }
        Ok(b.hom(ob_map[x], ob_map[z]).id(composite))
    };
    let unitor = |x: usize| -> Result<Mor> {
        let unit = cells[base.id(Ob(x as u32)).idx()].ob;
        if unit != b.unit(ob_map[x]) {
            return Err(Error::CoherenceFailure(format!(
                "transition functor over `{}` is not the identity",
                base.mor_name(base.id(Ob(x as u32)))
            )));
        }
        Ok(b.hom(ob_map[x], ob_map[x]).id(unit))
    };
    Pseudofunctor::tabulate(ld.bicat.clone(), u.bicat.clone(), ob_map.clone(), hom_maps, &compositor, &unitor)
}

/// The contravariant family `x ↦ hom(x, d)` of discrete categories.
pub fn representable(base: &Arc<FinCat>, d: Ob, cap: usize) -> Result<(CatUniverse, Pseudofunctor)> {
    let cats: Vec<Arc<FinCat>> = base
        .objects()
        .map(|x| {
            let names: Vec<String> = base.hom(x, d).iter().map(|&m| base.mor_name(m).to_string()).collect();
            Arc::new(crate::fincat::discrete(&names))
        })
        .collect();
    let u = cat_universe(&cats, cap)?;
    let ob_map: Vec<usize> = cats.iter().map(|c| u.index_of(c).expect("category in universe")).collect();
    let functors = base
        .morphisms()
        .map(|m| {
            let (x, y) = (base.src(m), base.tgt(m));
            let hom_x = base.hom(x, d);
            let obs: Vec<Ob> = base
                .hom(y, d)
                .iter()
                .map(|&g| {
                    let gm = base.compose(g, m);
                    Ob(hom_x.iter().position(|&h| h == gm).expect("composite in hom set") as u32)
                })
                .collect();
            let mors = obs.iter().map(|o| Mor(o.0)).collect();
            Functor::new(cats[y.idx()].clone(), cats[x.idx()].clone(), obs, mors)
        })
        .collect::<Result<Vec<_>>>()?;
    let f = strict_family(base, &u, ob_map, &functors, Variance::Contravariant)?;
    Ok((u, f))
}
