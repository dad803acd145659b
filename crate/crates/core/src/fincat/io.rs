//! The `fincat-v1` JSON format.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{FinCat, Mor, MorphismRecord, Ob};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMorphism {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// Category description as read from or written to `fincat-v1` JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub identities: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<String>>,
}

impl RawCategory {
    pub fn from_json(text: &str) -> Result<RawCategory> {
        serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Validates every law and returns the category.
    pub fn validate(&self) -> Result<FinCat> {
        let mut ob_index = HashMap::new();
        for (i, name) in self.objects.iter().enumerate() {
            if ob_index.insert(name.as_str(), Ob(i as u32)).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let lookup_ob = |n: &str| {
            ob_index
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownName(n.to_string()))
        };
        let mut records = Vec::with_capacity(self.morphisms.len());
        let mut mor_index = HashMap::new();
        for (i, m) in self.morphisms.iter().enumerate() {
            if mor_index.insert(m.name.as_str(), Mor(i as u32)).is_some() {
                return Err(Error::DuplicateName(m.name.clone()));
            }
            records.push(MorphismRecord {
                name: m.name.clone(),
                src: lookup_ob(&m.src)?,
                tgt: lookup_ob(&m.tgt)?,
            });
        }
        for key in self.identities.keys() {
            lookup_ob(key)?;
        }
        let lookup_mor = |n: &str| {
            mor_index
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownName(n.to_string()))
        };
        let mut identities = Vec::with_capacity(self.objects.len());
        for name in &self.objects {
            let id = self
                .identities
                .get(name)
                .ok_or_else(|| Error::MissingIdentity(name.clone()))?;
            identities.push(lookup_mor(id)?);
        }
        let mut table: HashMap<(Mor, Mor), Mor> = HashMap::new();
        for [g, f, gf] in &self.compose {
            let (gm, fm, gfm) = (lookup_mor(g)?, lookup_mor(f)?, lookup_mor(gf)?);
            if records[fm.idx()].tgt != records[gm.idx()].src {
                return Err(Error::NotComposable {
                    g: g.clone(),
                    f: f.clone(),
                });
            }
            if let Some(prev) = table.insert((gm, fm), gfm) {
                if prev != gfm {
                    return Err(Error::ConflictingComposite {
                        g: g.clone(),
                        f: f.clone(),
                    });
                }
            }
        }
        FinCat::validated(self.objects.clone(), records, identities, |g, f| {
            table.get(&(g, f)).copied()
        })
    }
}

impl FinCat {
    /// The `fincat-v1` description of this category; composites are listed by
    /// first factor, then second factor, in canonical order.
    pub fn to_raw(&self) -> RawCategory {
        RawCategory {
            objects: self.object_names().to_vec(),
            morphisms: self
                .morphism_records()
                .iter()
                .map(|m| RawMorphism {
                    name: m.name.clone(),
                    src: self.ob_name(m.src).to_string(),
                    tgt: self.ob_name(m.tgt).to_string(),
                })
                .collect(),
            identities: self
                .objects()
                .map(|x| (self.ob_name(x).to_string(), self.mor_name(self.id(x)).to_string()))
                .collect(),
            compose: self
                .composable_pairs()
                .map(|(g, f)| {
                    [
                        self.mor_name(g).to_string(),
                        self.mor_name(f).to_string(),
                        self.mor_name(self.compose(g, f)).to_string(),
                    ]
                })
                .collect(),
            marked: None,
        }
    }

    pub fn from_json(text: &str) -> Result<FinCat> {
        RawCategory::from_json(text)?.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trip_fixtures() {
        for c in [fixtures::one(), fixtures::arrow(), fixtures::p2(), fixtures::chain(3)] {
            let raw = c.to_raw();
            let back = RawCategory::from_json(&raw.to_json()).unwrap().validate().unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"objects":[],"morphisms":[],"identities":{},"compose":[],"extra":1}"#;
        assert!(matches!(RawCategory::from_json(text), Err(Error::Format(_))));
    }

    #[test]
    fn identity_law_violation_is_named() {
        let mut raw = fixtures::arrow().to_raw();
        for t in raw.compose.iter_mut() {
            if t[0] == "a" && t[1] == "id_0" {
                t[2] = "id_0".into();
            }
        }
        assert_eq!(
            raw.validate().unwrap_err(),
            Error::IdentityLaw {
                g: "a".into(),
                f: "id_0".into()
            }
        );
    }

    #[test]
    fn gap_is_named() {
        let mut raw = fixtures::arrow().to_raw();
        raw.compose.retain(|t| !(t[0] == "id_1" && t[1] == "a"));
        assert_eq!(
            raw.validate().unwrap_err(),
            Error::CompositionGap {
                g: "id_1".into(),
                f: "a".into()
            }
        );
    }

    #[test]
    fn duplicate_morphism_name() {
        let mut raw = fixtures::arrow().to_raw();
        raw.morphisms[2].name = "id_0".into();
        assert_eq!(raw.validate().unwrap_err(), Error::DuplicateName("id_0".into()));
    }
}
