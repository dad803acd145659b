use std::sync::Arc;

use super::{Bicat, Cell1, Cell2};
use crate::error::{Error, Result};
use crate::fincat::{discrete, functor_category, same_cat, FinCat, Functor, FunctorCategory, Mor, NatTrans, Ob};

/// A finite piece of the 2-category of categories: the given categories with
/// all functors and natural transformations between them.
#[derive(Clone, Debug)]
pub struct CatUniverse {
    pub bicat: Arc<Bicat>,
    pub cats: Vec<Arc<FinCat>>,
    funcats: Vec<FunctorCategory>,
}

impl CatUniverse {
    pub fn funcat(&self, x: usize, y: usize) -> &FunctorCategory {
        &self.funcats[x * self.cats.len() + y]
    }

    pub fn functor(&self, f: &Cell1) -> &Functor {
        self.funcat(f.src, f.tgt).functor(f.ob)
    }

    pub fn transformation(&self, a: &Cell2) -> &NatTrans {
        self.funcat(a.src, a.tgt).transformation(a.mor)
    }

    pub fn index_of(&self, c: &Arc<FinCat>) -> Option<usize> {
        self.cats.iter().position(|d| same_cat(c, d))
    }

    pub fn cell1_of(&self, f: &Functor) -> Option<Cell1> {
        let x = self.index_of(&f.source)?;
        let y = self.index_of(&f.target)?;
        let ob = self.funcat(x, y).object_of(f)?;
        Some(Cell1 { src: x, tgt: y, ob })
    }

    pub fn cell2_of(&self, t: &NatTrans) -> Option<Cell2> {
        let x = self.index_of(&t.source.source)?;
        let y = self.index_of(&t.source.target)?;
        let mor = self.funcat(x, y).morphism_of(t)?;
        Some(Cell2 { src: x, tgt: y, mor })
    }
}

/// The strict bicategory on `cats` with `hom(C, D) = Fun(C, D)`.
pub fn cat_universe(cats: &[Arc<FinCat>], cap: usize) -> Result<CatUniverse> {
    if cats.is_empty() {
        return Err(Error::PreconditionFailed("cat_universe needs at least one category".into()));
    }
    let n = cats.len();
    let mut funcats = Vec::with_capacity(n * n);
    for c in cats {
        for d in cats {
            funcats.push(functor_category(c, d, cap)?);
        }
    }
    let objects: Vec<String> = (0..n).map(|i| format!("C{i}")).collect();
    let homs: Vec<Arc<FinCat>> = funcats.iter().map(|f| f.cat.clone()).collect();
    let units = (0..n)
        .map(|i| {
            funcats[i * n + i]
                .object_of(&Functor::identity(&cats[i]))
                .expect("identity functor is enumerated")
        })
        .collect();
    let fc = |x: usize, y: usize| &funcats[x * n + y];
    let missing = |what: &str| Error::PreconditionFailed(format!("{what} missing from the functor category"));
    let bicat = Bicat::strict(
        objects,
        homs,
        units,
        &|x, y, z, g, f| {
            let gf = fc(y, z).functor(g).after_unchecked(fc(x, y).functor(f));
            fc(x, z).object_of(&gf).ok_or_else(|| missing("composite"))
        },
        &|x, y, z, g, a| {
            let t = NatTrans::whisker_left(fc(y, z).functor(g), fc(x, y).transformation(a))?;
            fc(x, z).morphism_of(&t).ok_or_else(|| missing("whiskering"))
        },
        &|x, y, z, b, f| {
            let t = NatTrans::whisker_right(fc(y, z).transformation(b), fc(x, y).functor(f))?;
            fc(x, z).morphism_of(&t).ok_or_else(|| missing("whiskering"))
        },
    )?;
    Ok(CatUniverse {
        bicat: Arc::new(bicat),
        cats: cats.to_vec(),
        funcats,
    })
}

/// A finite category viewed as a bicategory with only identity 2-cells.
#[derive(Clone, Debug)]
pub struct LocallyDiscrete {
    pub bicat: Arc<Bicat>,
    pub cat: Arc<FinCat>,
    cells: Vec<Cell1>,
}

impl LocallyDiscrete {
    pub fn cell(&self, f: Mor) -> Cell1 {
        self.cells[f.idx()]
    }

    pub fn mor(&self, f: &Cell1) -> Mor {
        self.cat.hom(Ob(f.src as u32), Ob(f.tgt as u32))[f.ob.idx()]
    }
}

pub fn locally_discrete(c: &Arc<FinCat>) -> LocallyDiscrete {
    let n = c.num_objects();
    let ob = |i: usize| Ob(i as u32);
    let mut homs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let names: Vec<String> = c.hom(ob(x), ob(y)).iter().map(|&m| c.mor_name(m).to_string()).collect();
            homs.push(Arc::new(discrete(&names)));
        }
    }
    let mut cells = vec![Cell1 { src: 0, tgt: 0, ob: Ob(0) }; c.num_morphisms()];
    for x in 0..n {
        for y in 0..n {
            for (i, &m) in c.hom(ob(x), ob(y)).iter().enumerate() {
                cells[m.idx()] = Cell1 { src: x, tgt: y, ob: Ob(i as u32) };
            }
        }
    }
    let pos = |m: Mor| cells[m.idx()].ob;
    let at = |x: usize, y: usize, i: Ob| c.hom(ob(x), ob(y))[i.idx()];
    let units = (0..n).map(|x| pos(c.id(ob(x)))).collect();
    let bicat = Bicat::strict(
        c.object_names().to_vec(),
        homs,
        units,
        &|x, y, z, g, f| Ok(pos(c.compose(at(y, z, g), at(x, y, f)))),
        &|x, y, z, g, a| Ok(Mor(pos(c.compose(at(y, z, g), at(x, y, Ob(a.0)))).0)),
        &|x, y, z, b, f| Ok(Mor(pos(c.compose(at(y, z, Ob(b.0)), at(x, y, f))).0)),
    )
    .expect("locally discrete tables");
    LocallyDiscrete {
        bicat: Arc::new(bicat),
        cat: c.clone(),
        cells,
    }
}
