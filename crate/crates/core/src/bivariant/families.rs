use std::sync::Arc;

use crate::bicat::{cat_universe, CatUniverse, Pseudofunctor};
use crate::error::Result;
use crate::fib::{strict_family, Variance};
use crate::fincat::{postcompose, slice, FinCat, Functor, Mor};
use crate::span::Corr;

/// `d ↦ C/d` with post-composition, in a universe holding the slices
/// followed by `extra`.
pub fn self_indexing(base: &Arc<FinCat>, extra: &[Arc<FinCat>], cap: usize) -> Result<(CatUniverse, Pseudofunctor)> {
    let slices = base.objects().map(|d| slice(base, d, cap)).collect::<Result<Vec<_>>>()?;
    let mut cats: Vec<Arc<FinCat>> = slices.iter().map(|s| s.cat.clone()).collect();
    cats.extend(extra.iter().cloned());
    let u = cat_universe(&cats, cap)?;
    let ob_map = slices.iter().map(|s| u.index_of(&s.cat).expect("slice in universe")).collect();
    let functors: Vec<Functor> = base
        .morphisms()
        .map(|f| postcompose(base, &slices[base.src(f).idx()], &slices[base.tgt(f).idx()], f))
        .collect();
    let h = strict_family(base, &u, ob_map, &functors, Variance::Covariant)?;
    Ok((u, h))
}

/// The covariant family constant at the `i`-th category of `u`.
pub fn constant_family(base: &Arc<FinCat>, u: &CatUniverse, i: usize) -> Result<Pseudofunctor> {
    let c = &u.cats[i];
    let functors: Vec<Functor> = base.morphisms().map(|_| Functor::identity(c)).collect();
    strict_family(base, u, vec![i; base.num_objects()], &functors, Variance::Covariant)
}

/// `y ↦ Corr(x, y)`, acting on base maps by post-composing the right-way
/// leg.
pub fn corepresentable(corr: &Corr, x: usize, cap: usize) -> Result<(CatUniverse, Pseudofunctor)> {
    let c = corr.base();
    let n = c.num_objects();
    let cats: Vec<Arc<FinCat>> = (0..n).map(|y| corr.span_category(x, y).cat.clone()).collect();
    let u = cat_universe(&cats, cap)?;
    let ob_map = cats.iter().map(|s| u.index_of(s).expect("span category in universe")).collect();
    let functors: Vec<Functor> = c
        .morphisms()
        .map(|f| postcompose_spans(corr, x, f))
        .collect::<Result<_>>()?;
    let h = strict_family(c, &u, ob_map, &functors, Variance::Covariant)?;
    Ok((u, h))
}

/// `Corr(x, f): Corr(x, y) → Corr(x, y')`, post-composing the right-way leg.
pub(crate) fn postcompose_spans(corr: &Corr, x: usize, f: Mor) -> Result<Functor> {
    let c = corr.base();
    let (from, to) = (corr.span_category(x, c.src(f).idx()), corr.span_category(x, c.tgt(f).idx()));
    let ob_map: Vec<_> = from
        .spans
        .iter()
        .map(|s| {
            let mut moved = *s;
            moved.right = c.tgt(f);
            moved.right_way = c.compose(f, s.right_way);
            to.find(&moved).expect("post-composed span")
        })
        .collect();
    let mor_map: Vec<Mor> = from
        .cat
        .morphisms()
        .map(|m| {
            let (s, t) = (ob_map[from.cat.src(m).idx()], ob_map[from.cat.tgt(m).idx()]);
            to.morphism(s, t, from.kernel_maps[m.idx()]).expect("kernel map survives")
        })
        .collect();
    Functor::new(from.cat.clone(), to.cat.clone(), ob_map, mor_map)
}
