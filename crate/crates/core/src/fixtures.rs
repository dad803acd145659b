//! Small named categories used throughout tests, examples and the CLI.

use std::collections::HashMap;

use crate::fincat::{FinCat, Mor, MorphismRecord, Ob};

fn rec(name: String, src: usize, tgt: usize) -> MorphismRecord {
    MorphismRecord {
        name,
        src: Ob(src as u32),
        tgt: Ob(tgt as u32),
    }
}

/// The terminal category: one object `*` with its identity `id_*`.
pub fn one() -> FinCat {
    FinCat::validated(vec!["*".into()], vec![rec("id_*".into(), 0, 0)], vec![Mor(0)], |_, _| {
        Some(Mor(0))
    })
    .expect("ONE")
}

/// The walking arrow: objects `0`, `1`; morphisms `id_0`, `id_1`, `a: 0 → 1`.
pub fn arrow() -> FinCat {
    let mut c = chain(2);
    // rename the single non-identity arrow
    let raw = {
        let mut r = c.to_raw();
        for m in r.morphisms.iter_mut() {
            if m.name == "0->1" {
                m.name = "a".into();
            }
        }
        for t in r.compose.iter_mut() {
            for s in t.iter_mut() {
                if s == "0->1" {
                    *s = "a".into();
                }
            }
        }
        r
    };
    c = raw.validate().expect("ARROW");
    c
}

/// Two objects `x`, `y` and only identities.
pub fn discrete_two() -> FinCat {
    crate::fincat::discrete(&["x".to_string(), "y".to_string()])
}

/// Two objects `x`, `y` with inverse arrows `u: x → y` and `v: y → x`.
pub fn walking_iso() -> FinCat {
    let records = vec![rec("id_x".into(), 0, 0), rec("id_y".into(), 1, 1), rec("u".into(), 0, 1), rec("v".into(), 1, 0)];
    let ends = [(0, 0), (1, 1), (0, 1), (1, 0)];
    FinCat::validated(vec!["x".into(), "y".into()], records, vec![Mor(0), Mor(1)], |g, f| {
        let (s, t) = (ends[f.idx()].0, ends[g.idx()].1);
        Some(Mor(match (s, t) {
            (0, 0) => 0,
            (1, 1) => 1,
            (0, 1) => 2,
            _ => 3,
        }))
    })
    .expect("walking isomorphism")
}

/// A thin category on `names` with an arrow `a → b` whenever `leq(a, b)`;
/// morphisms are named by `label(a, b)`.
pub fn thin<L, N>(names: &[String], leq: L, label: N) -> FinCat
where
    L: Fn(usize, usize) -> bool,
    N: Fn(usize, usize) -> String,
{
    let n = names.len();
    let mut records = Vec::new();
    let mut index = HashMap::new();
    let mut identities = vec![Mor(0); n];
    for (i, identity) in identities.iter_mut().enumerate() {
        for j in 0..n {
            if leq(i, j) {
                if i == j {
                    *identity = Mor(records.len() as u32);
                }
                index.insert((i, j), Mor(records.len() as u32));
                records.push(rec(label(i, j), i, j));
            }
        }
    }
    let ends: Vec<(usize, usize)> = records.iter().map(|r| (r.src.idx(), r.tgt.idx())).collect();
    FinCat::validated(names.to_vec(), records, identities, |g, f| {
        index.get(&(ends[f.idx()].0, ends[g.idx()].1)).copied()
    })
    .expect("thin category")
}

/// The chain `0 → 1 → … → n-1`, identities `id_i`, other arrows `i->j`.
pub fn chain(n: usize) -> FinCat {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut records = Vec::new();
    let mut index = HashMap::new();
    for i in 0..n {
        index.insert((i, i), Mor(records.len() as u32));
        records.push(rec(format!("id_{i}"), i, i));
    }
    for i in 0..n {
        for j in i + 1..n {
            index.insert((i, j), Mor(records.len() as u32));
            records.push(rec(format!("{i}->{j}"), i, j));
        }
    }
    let ends: Vec<(usize, usize)> = records.iter().map(|r| (r.src.idx(), r.tgt.idx())).collect();
    let identities = (0..n).map(|i| Mor(i as u32)).collect();
    FinCat::validated(names, records, identities, |g, f| {
        index.get(&(ends[f.idx()].0, ends[g.idx()].1)).copied()
    })
    .expect("chain")
}

fn subset_name(bits: usize, k: usize) -> String {
    let elems: Vec<String> = (0..k)
        .filter(|b| bits & (1 << b) != 0)
        .map(|b| (b + 1).to_string())
        .collect();
    format!("{{{}}}", elems.join(","))
}

/// Subsets of `{1,…,k}` under inclusion, ordered by size then lexicographically
/// on bit patterns; inclusions are named `A<=B`.
pub fn powerset(k: usize) -> FinCat {
    let mut subsets: Vec<usize> = (0..1usize << k).collect();
    subsets.sort_by_key(|&s| (s.count_ones(), s));
    let names: Vec<String> = subsets.iter().map(|&s| subset_name(s, k)).collect();
    let sub = subsets.clone();
    let nm = names.clone();
    thin(
        &names,
        move |i, j| sub[i] & !sub[j] == 0,
        move |i, j| format!("{}<={}", nm[i], nm[j]),
    )
}

/// Subsets of `{1,2}`: objects `{}`, `{1}`, `{2}`, `{1,2}`.
pub fn p2() -> FinCat {
    powerset(2)
}

/// Skeleton of finite sets of size at most `n`: objects `0..=n`, all
/// functions as morphisms, named `m->k:[v0,…]` and ordered by source, target,
/// then value sequence.
pub fn fs(n: usize) -> FinCat {
    let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
    let mut records = Vec::new();
    let mut values: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<(usize, Vec<usize>), Mor> = HashMap::new();
    for m in 0..=n {
        for k in 0..=n {
            for vals in all_functions(m, k) {
                let label = vals.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
                index.insert((k, vals.clone()), Mor(records.len() as u32));
                records.push(rec(format!("{m}->{k}:[{label}]"), m, k));
                values.push(vals);
            }
        }
    }
    let identities = (0..=n)
        .map(|m| index[&(m, (0..m).collect::<Vec<_>>())])
        .collect();
    let tgts: Vec<usize> = records.iter().map(|r| r.tgt.idx()).collect();
    FinCat::validated(names, records, identities, |g, f| {
        let composite: Vec<usize> = values[f.idx()].iter().map(|&v| values[g.idx()][v]).collect();
        index.get(&(tgts[g.idx()], composite)).copied()
    })
    .expect("FS")
}

fn all_functions(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for prefix in &out {
            for v in 0..k {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Values of an `fs(n)` morphism as a function on `0..m`.
pub fn fs_values(c: &FinCat, f: Mor) -> Vec<usize> {
    let name = c.mor_name(f);
    let inner = &name[name.find('[').expect("fs name") + 1..name.len() - 1];
    if inner.is_empty() {
        vec![]
    } else {
        inner.split(',').map(|v| v.parse().expect("fs value")).collect()
    }
}

/// The `fs(n)` morphism with the given source size, target size and values.
pub fn fs_morphism(c: &FinCat, m: usize, k: usize, values: &[usize]) -> Mor {
    let label = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    c.mor_named(&format!("{m}->{k}:[{label}]")).expect("fs morphism")
}
