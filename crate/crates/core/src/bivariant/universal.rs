use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use super::check_bivariant;
use crate::bicat::{icon_iso, Bicat, Pseudofunctor};
use crate::error::{Error, Result};
use crate::fincat::{enumerate_functors, Functor, Mor};
use crate::marked::MarkedCat;
use crate::span::build_corr;

/// Largest hom-category of the target the universality oracle accepts.
pub const MAX_TARGET_HOM: usize = 4;

struct Search<'a> {
    source: &'a Arc<Bicat>,
    target: &'a Arc<Bicat>,
    ob_map: Vec<usize>,
    pairs: Vec<(usize, usize)>,
    candidates: Vec<Vec<Functor>>,
    cap: usize,
}

/// A coherence slot and its invertible candidates.
type Slots = Vec<Vec<Mor>>;

impl Search<'_> {
    fn pair_index(&self, x: usize, y: usize) -> usize {
        x * self.source.n() + y
    }

    /// Invertible cells `F g ∘ F f ≅ F(g f)` for all composable `g`, `f`,
    /// and `1 ≅ F 1`, given the hom functors.  `None` if some slot is empty.
    fn slots(&self, homs: &[Option<&Functor>], x: usize, y: usize, z: usize) -> Option<Slots> {
        let (s, t) = (&**self.source, &**self.target);
        let (fx, fy, fz) = (self.ob_map[x], self.ob_map[y], self.ob_map[z]);
        let (hxy, hyz, hxz) = (
            homs[self.pair_index(x, y)]?,
            homs[self.pair_index(y, z)]?,
            homs[self.pair_index(x, z)]?,
        );
        let kh = t.hom(fx, fz);
        let mut out = Vec::new();
        for g in s.hom(y, z).objects() {
            for f in s.hom(x, y).objects() {
                let from = t.comp_ob(fx, fy, fz, hyz.ob(g), hxy.ob(f));
                let to = hxz.ob(s.comp_ob(x, y, z, g, f));
                let isos: Vec<Mor> = kh.hom(from, to).iter().copied().filter(|&m| kh.is_iso(m)).collect();
                if isos.is_empty() {
                    return None;
                }
                out.push(isos);
            }
        }
        Some(out)
    }

    fn unit_slot(&self, homs: &[Option<&Functor>], x: usize) -> Option<Vec<Mor>> {
        let h = homs[self.pair_index(x, x)]?;
        let fx = self.ob_map[x];
        let kh = self.target.hom(fx, fx);
        let isos: Vec<Mor> = kh
            .hom(self.target.unit(fx), h.ob(self.source.unit(x)))
            .iter()
            .copied()
            .filter(|&m| kh.is_iso(m))
            .collect();
        (!isos.is_empty()).then_some(isos)
    }

    fn feasible(&self, homs: &[Option<&Functor>]) -> bool {
        let n = self.source.n();
        let assigned = |x: usize, y: usize| homs[self.pair_index(x, y)].is_some();
        (0..n).all(|x| !assigned(x, x) || self.unit_slot(homs, x).is_some())
            && (0..n).all(|x| {
                (0..n).all(|y| {
                    (0..n).all(|z| {
                        !(assigned(x, y) && assigned(y, z) && assigned(x, z)) || self.slots(homs, x, y, z).is_some()
                    })
                })
            })
    }

    fn run<'s>(&'s self, homs: &mut Vec<Option<&'s Functor>>, k: usize, out: &mut Vec<Pseudofunctor>) -> Result<()> {
        if k == self.pairs.len() {
            return self.complete(homs, out);
        }
        for cand in &self.candidates[k] {
            homs[k] = Some(cand);
            if self.feasible(homs) {
                self.run(homs, k + 1, out)?;
            }
            homs[k] = None;
        }
        Ok(())
    }

    fn complete(&self, homs: &[Option<&Functor>], out: &mut Vec<Pseudofunctor>) -> Result<()> {
        let n = self.source.n();
        let mut slots: Vec<Vec<Mor>> = Vec::new();
        let mut offsets = HashMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    offsets.insert((x, y, z), slots.len());
                    slots.extend(self.slots(homs, x, y, z).expect("feasible"));
                }
            }
        }
        let unit_offset = slots.len();
        for x in 0..n {
            slots.push(self.unit_slot(homs, x).expect("feasible"));
        }
        let combos: usize = slots.iter().map(Vec::len).try_fold(1usize, |a, l| a.checked_mul(l)).unwrap_or(usize::MAX);
        if combos > self.cap {
            return Err(Error::SizeCap {
                what: "coherence cell choices".into(),
                cap: self.cap,
            });
        }
        let hom_maps: Vec<Functor> = homs.iter().map(|h| (*h).expect("assigned").clone()).collect();
        let mut choice = vec![0usize; slots.len()];
        loop {
            let pick = |i: usize| slots[i][choice[i]];
            let f = Pseudofunctor::tabulate(
                self.source.clone(),
                self.target.clone(),
                self.ob_map.clone(),
                hom_maps.clone(),
                &|x, y, z, g, f| {
                    let nf = self.source.hom(x, y).num_objects();
                    Ok(pick(offsets[&(x, y, z)] + g.idx() * nf + f.idx()))
                },
                &|x| Ok(pick(unit_offset + x)),
            )?;
            if f.validate().is_ok() {
                if out.len() == self.cap {
                    return Err(Error::SizeCap {
                        what: "pseudofunctors".into(),
                        cap: self.cap,
                    });
                }
                out.push(f);
            }
            let mut i = 0;
            loop {
                if i == slots.len() {
                    return Ok(());
                }
                choice[i] += 1;
                if choice[i] < slots[i].len() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

/// All pseudofunctors `source → target`, by object map, hom functors and
/// coherence cells, each validated.  `cap` bounds every enumeration.
pub fn enumerate_pseudofunctors(source: &Arc<Bicat>, target: &Arc<Bicat>, cap: usize) -> Result<Vec<Pseudofunctor>> {
    let (n, m) = (source.n(), target.n());
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).collect();
    let mut functor_cache: HashMap<(usize, usize, usize, usize), Vec<Functor>> = HashMap::new();
    let mut out = Vec::new();
    let total = m.checked_pow(n as u32).unwrap_or(usize::MAX);
    for code in 0..total {
        let mut ob_map = vec![0; n];
        let mut rest = code;
        for slot in ob_map.iter_mut().rev() {
            *slot = rest % m;
            rest /= m;
        }
        let mut candidates = Vec::with_capacity(pairs.len());
        for &(x, y) in &pairs {
            let key = (x, y, ob_map[x], ob_map[y]);
            if let std::collections::hash_map::Entry::Vacant(e) = functor_cache.entry(key) {
                let fs = enumerate_functors(source.hom(x, y), target.hom(ob_map[x], ob_map[y]), cap)?;
                e.insert(fs);
            }
            candidates.push(functor_cache[&key].clone());
        }
        let search = Search {
            source,
            target,
            ob_map,
            pairs: pairs.clone(),
            candidates,
            cap,
        };
        let mut homs = vec![None; pairs.len()];
        search.run(&mut homs, 0, &mut out)?;
    }
    Ok(out)
}

/// Representatives of the classes under invertible icons.
fn classes(fs: &[Pseudofunctor]) -> Vec<usize> {
    let mut reps: Vec<usize> = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        if !reps.iter().any(|&r| icon_iso(&fs[r], f).is_some()) {
            reps.push(i);
        }
    }
    reps
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalityReport {
    pub holds: bool,
    pub extensions: usize,
    pub extension_classes: usize,
    pub bivariant_functors: usize,
    pub bivariant_classes: usize,
    /// Class of the restriction of each extension class, when bivariant.
    pub restriction: Vec<Option<usize>>,
    pub injective_witness: Option<String>,
    pub surjective_witness: Option<String>,
    /// Object maps of the bivariant class representatives.
    pub bivariant_object_maps: Vec<Vec<String>>,
}

/// Checks that restriction along the base inclusion is a bijection from
/// iso-classes of pseudofunctors `Corr → K` onto iso-classes of bivariant
/// functors into `K`.
pub fn universality_check(m: &MarkedCat, k: &Arc<Bicat>, cap: usize) -> Result<UniversalityReport> {
    if let Some(big) = k.homs().iter().find(|h| h.num_objects() > MAX_TARGET_HOM) {
        return Err(Error::SizeCap {
            what: format!("target hom-category with {} objects", big.num_objects()),
            cap: MAX_TARGET_HOM,
        });
    }
    let corr = build_corr(m, cap)?;
    let (ld, incl) = corr.inclusion()?;
    let extensions = enumerate_pseudofunctors(&corr.bicat, k, cap)?;
    let mut bivariant = Vec::new();
    for h in enumerate_pseudofunctors(&ld.bicat, k, cap)? {
        match check_bivariant(&h, &corr.marked) {
            Ok(_) => bivariant.push(h),
            Err(Error::NoAdjoint(_) | Error::BaseChangeFails(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let ext_reps = classes(&extensions);
    let biv_reps = classes(&bivariant);
    let restriction = ext_reps
        .iter()
        .map(|&r| {
            let res = extensions[r].after(&incl)?;
            Ok(biv_reps.iter().position(|&b| icon_iso(&bivariant[b], &res).is_some()))
        })
        .collect::<Result<Vec<Option<usize>>>>()?;
    let mut injective_witness = None;
    for (i, a) in restriction.iter().enumerate() {
        match a {
            None => {
                injective_witness.get_or_insert_with(|| format!("extension class {i} restricts to a non-bivariant functor"));
            }
            Some(c) => {
                if let Some(j) = restriction[..i].iter().position(|b| *b == Some(*c)) {
                    injective_witness.get_or_insert_with(|| format!("extension classes {j} and {i} restrict to class {c}"));
                }
            }
        }
    }
    let surjective_witness = (0..biv_reps.len())
        .find(|c| !restriction.contains(&Some(*c)))
        .map(|c| format!("bivariant class {c} has no extension"));
    let names = |h: &Pseudofunctor| h.ob_map.iter().map(|&i| k.objects[i].clone()).collect();
    Ok(UniversalityReport {
        holds: injective_witness.is_none() && surjective_witness.is_none(),
        extensions: extensions.len(),
        extension_classes: ext_reps.len(),
        bivariant_functors: bivariant.len(),
        bivariant_classes: biv_reps.len(),
        restriction,
        injective_witness,
        surjective_witness,
        bivariant_object_maps: biv_reps.iter().map(|&b| names(&bivariant[b])).collect(),
    })
}
