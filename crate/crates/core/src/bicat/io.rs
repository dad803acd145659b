//! The `bicat-v1` JSON format.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Bicat;
use crate::error::{Error, Result};
use crate::fincat::{FinCat, RawCategory};

pub const BICAT_FORMAT: &str = "bicat-v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawHom {
    pub src: String,
    pub tgt: String,
    pub category: RawCategory,
}

/// Composition over `src → mid → tgt`: `cells` lists `[g, f, g∘f]`,
/// `whisker_left` lists `[g, α, 1_g * α]`, `whisker_right` lists `[β, f, β * 1_f]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCompose {
    pub src: String,
    pub mid: String,
    pub tgt: String,
    pub cells: Vec<[String; 3]>,
    pub whisker_left: Vec<[String; 3]>,
    pub whisker_right: Vec<[String; 3]>,
}

/// Coherence components over a tuple of objects; each row lists the
/// 1-cells followed by the 2-cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoherence {
    pub objects: Vec<String>,
    pub cells: Vec<Vec<String>>,
}

/// Bicategory description as read from or written to `bicat-v1` JSON.
/// Empty coherence lists stand for identity cells.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBicat {
    pub format: String,
    pub objects: Vec<String>,
    pub homs: Vec<RawHom>,
    pub units: BTreeMap<String, String>,
    pub compose: Vec<RawCompose>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub associator: Vec<RawCoherence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub left_unitor: Vec<RawCoherence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub right_unitor: Vec<RawCoherence>,
}

fn missing(what: String) -> Error {
    Error::Format(format!("missing entry: {what}"))
}

/// Coherence cells keyed by object indices, then by 1-cell names.
type CoherenceTable = HashMap<Vec<usize>, HashMap<Vec<String>, String>>;

impl RawBicat {
    pub fn from_json(text: &str) -> Result<RawBicat> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Builds the bicategory and checks every axiom.
    pub fn validate(&self) -> Result<Bicat> {
        if self.format != BICAT_FORMAT {
            return Err(Error::Format(format!("expected format `{BICAT_FORMAT}`, got `{}`", self.format)));
        }
        let n = self.objects.len();
        let mut obj = HashMap::new();
        for (i, o) in self.objects.iter().enumerate() {
            if obj.insert(o.as_str(), i).is_some() {
                return Err(Error::DuplicateName(o.clone()));
            }
        }
        let look = |name: &str| obj.get(name).copied().ok_or_else(|| Error::UnknownName(name.to_string()));
        let mut homs: Vec<Option<Arc<FinCat>>> = vec![None; n * n];
        for h in &self.homs {
            let p = look(&h.src)? * n + look(&h.tgt)?;
            if homs[p].is_some() {
                return Err(Error::DuplicateName(format!("hom({}, {})", h.src, h.tgt)));
            }
            homs[p] = Some(Arc::new(h.category.validate()?));
        }
        let homs: Vec<Arc<FinCat>> = homs
            .into_iter()
            .enumerate()
            .map(|(p, h)| h.ok_or_else(|| missing(format!("hom({}, {})", self.objects[p / n], self.objects[p % n]))))
            .collect::<Result<_>>()?;
        let hom = |x: usize, y: usize| &homs[x * n + y];
        let mut units = Vec::with_capacity(n);
        for (x, name) in self.objects.iter().enumerate() {
            let u = self.units.get(name).ok_or_else(|| missing(format!("unit of `{name}`")))?;
            units.push(hom(x, x).ob_named(u)?);
        }
        type Table = HashMap<(String, String), String>;
        let mut tables: HashMap<(usize, usize, usize), (Table, Table, Table)> = HashMap::new();
        let rows = |v: &[[String; 3]]| -> Table { v.iter().map(|[a, b, c]| ((a.clone(), b.clone()), c.clone())).collect() };
        for c in &self.compose {
            let key = (look(&c.src)?, look(&c.mid)?, look(&c.tgt)?);
            tables.insert(key, (rows(&c.cells), rows(&c.whisker_left), rows(&c.whisker_right)));
        }
        let entry = |x: usize, y: usize, z: usize| {
            tables.get(&(x, y, z)).ok_or_else(|| {
                missing(format!(
                    "composition over {} -> {} -> {}",
                    self.objects[x], self.objects[y], self.objects[z]
                ))
            })
        };
        let get = |t: &Table, a: &str, b: &str| t.get(&(a.to_string(), b.to_string())).cloned().ok_or_else(|| missing(format!("({a}, {b})")));
        let bicat = Bicat::strict(
            self.objects.clone(),
            homs.clone(),
            units,
            &|x, y, z, g, f| {
                let r = get(&entry(x, y, z)?.0, hom(y, z).ob_name(g), hom(x, y).ob_name(f))?;
                hom(x, z).ob_named(&r)
            },
            &|x, y, z, g, a| {
                let r = get(&entry(x, y, z)?.1, hom(y, z).ob_name(g), hom(x, y).mor_name(a))?;
                hom(x, z).mor_named(&r)
            },
            &|x, y, z, b, f| {
                let r = get(&entry(x, y, z)?.2, hom(y, z).mor_name(b), hom(x, y).ob_name(f))?;
                hom(x, z).mor_named(&r)
            },
        )?;
        let bicat = if self.associator.is_empty() && self.left_unitor.is_empty() && self.right_unitor.is_empty() {
            bicat
        } else {
            let coh = |list: &[RawCoherence]| -> Result<CoherenceTable> {
                let mut out = HashMap::new();
                for c in list {
                    let key = c.objects.iter().map(|o| look(o)).collect::<Result<Vec<_>>>()?;
                    let mut rows = HashMap::new();
                    for row in &c.cells {
                        let (cell, cells) = row.split_last().ok_or_else(|| Error::Format("empty coherence row".into()))?;
                        rows.insert(cells.to_vec(), cell.clone());
                    }
                    out.insert(key, rows);
                }
                Ok(out)
            };
            let (assoc, left, right) = (coh(&self.associator)?, coh(&self.left_unitor)?, coh(&self.right_unitor)?);
            let find = |t: &HashMap<Vec<usize>, HashMap<Vec<String>, String>>, key: Vec<usize>, cells: Vec<String>| {
                let what = format!("coherence cell at ({})", cells.join(", "));
                t.get(&key).and_then(|r| r.get(&cells)).cloned().ok_or_else(|| missing(what))
            };
            bicat.with_coherence(
                |b, [x, y, z, w], h, g, f| {
                    let cells = vec![
                        b.hom(z, w).ob_name(h).to_string(),
                        b.hom(y, z).ob_name(g).to_string(),
                        b.hom(x, y).ob_name(f).to_string(),
                    ];
                    b.hom(x, w).mor_named(&find(&assoc, vec![x, y, z, w], cells)?)
                },
                |b, x, y, f| b.hom(x, y).mor_named(&find(&left, vec![x, y], vec![b.hom(x, y).ob_name(f).to_string()])?),
                |b, x, y, f| b.hom(x, y).mor_named(&find(&right, vec![x, y], vec![b.hom(x, y).ob_name(f).to_string()])?),
            )?
        };
        bicat.validate()?;
        Ok(bicat)
    }
}

impl Bicat {
    pub fn to_raw(&self) -> RawBicat {
        let n = self.n();
        let name = |x: usize| self.objects[x].clone();
        let mut homs = Vec::with_capacity(n * n);
        let mut units = BTreeMap::new();
        for x in 0..n {
            units.insert(name(x), self.hom(x, x).ob_name(self.unit(x)).to_string());
            for y in 0..n {
                homs.push(RawHom {
                    src: name(x),
                    tgt: name(y),
                    category: self.hom(x, y).to_raw(),
                });
            }
        }
        let mut compose = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (hf, hg, hgf) = (self.hom(x, y), self.hom(y, z), self.hom(x, z));
                    let mut cells = Vec::new();
                    let mut wl = Vec::new();
                    let mut wr = Vec::new();
                    for g in hg.objects() {
                        for f in hf.objects() {
                            cells.push([
                                hg.ob_name(g).to_string(),
                                hf.ob_name(f).to_string(),
                                hgf.ob_name(self.comp_ob(x, y, z, g, f)).to_string(),
                            ]);
                        }
                        for a in hf.morphisms() {
                            wl.push([
                                hg.ob_name(g).to_string(),
                                hf.mor_name(a).to_string(),
                                hgf.mor_name(self.lw(x, y, z, g, a)).to_string(),
                            ]);
                        }
                    }
                    for b in hg.morphisms() {
                        for f in hf.objects() {
                            wr.push([
                                hg.mor_name(b).to_string(),
                                hf.ob_name(f).to_string(),
                                hgf.mor_name(self.rw(x, y, z, b, f)).to_string(),
                            ]);
                        }
                    }
                    compose.push(RawCompose {
                        src: name(x),
                        mid: name(y),
                        tgt: name(z),
                        cells,
                        whisker_left: wl,
                        whisker_right: wr,
                    });
                }
            }
        }
        let (mut associator, mut left_unitor, mut right_unitor) = (Vec::new(), Vec::new(), Vec::new());
        if !self.has_identity_coherence() {
            for q in 0..n.pow(4) {
                let [x, y, z, w] = self.split_quad(q);
                let mut cells = Vec::new();
                for h in self.hom(z, w).objects() {
                    for g in self.hom(y, z).objects() {
                        for f in self.hom(x, y).objects() {
                            cells.push(vec![
                                self.hom(z, w).ob_name(h).to_string(),
                                self.hom(y, z).ob_name(g).to_string(),
                                self.hom(x, y).ob_name(f).to_string(),
                                self.hom(x, w).mor_name(self.assoc(x, y, z, w, h, g, f)).to_string(),
                            ]);
                        }
                    }
                }
                associator.push(RawCoherence {
                    objects: vec![name(x), name(y), name(z), name(w)],
                    cells,
                });
            }
            for x in 0..n {
                for y in 0..n {
                    let h = self.hom(x, y);
                    let row = |m: &dyn Fn(crate::fincat::Ob) -> crate::fincat::Mor| h.objects().map(|f| vec![h.ob_name(f).to_string(), h.mor_name(m(f)).to_string()]).collect();
                    left_unitor.push(RawCoherence {
                        objects: vec![name(x), name(y)],
                        cells: row(&|f| self.lunit(x, y, f)),
                    });
                    right_unitor.push(RawCoherence {
                        objects: vec![name(x), name(y)],
                        cells: row(&|f| self.runit(x, y, f)),
                    });
                }
            }
        }
        RawBicat {
            format: BICAT_FORMAT.to_string(),
            objects: self.objects.clone(),
            homs,
            units,
            compose,
            associator,
            left_unitor,
            right_unitor,
        }
    }

    pub fn from_json(text: &str) -> Result<Bicat> {
        RawBicat::from_json(text)?.validate()
    }

    pub fn to_json(&self) -> String {
        self.to_raw().to_json()
    }
}
