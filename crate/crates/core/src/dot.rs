//! Graphviz rendering of categories, spans and projections.
//!
//! Output is deterministic: nodes and edges follow the canonical order of
//! objects and morphisms.  Identities are omitted and marked morphisms are
//! drawn bold.

use std::fmt::Write;

use crate::fincat::{FinCat, Functor};
use crate::marked::MarkedCat;
use crate::span::{Span, SpanTotal};

const MARKED: &str = "style=bold, color=\"#1f5fbf\"";

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            out.push('\\');
        }
        out.push(ch);
    }
    out.push('"');
    out
}

fn body(out: &mut String, c: &FinCat, marked: &dyn Fn(usize) -> bool) {
    for x in c.objects() {
        writeln!(out, "  n{} [label={}];", x.idx(), quote(c.ob_name(x))).unwrap();
    }
    for f in c.morphisms().filter(|&f| !c.is_identity(f)) {
        let style = if marked(f.idx()) { format!(", {MARKED}") } else { String::new() };
        writeln!(
            out,
            "  n{} -> n{} [label={}{style}];",
            c.src(f).idx(),
            c.tgt(f).idx(),
            quote(c.mor_name(f))
        )
        .unwrap();
    }
}

/// Objects as nodes and non-identity morphisms as edges.
pub fn category_dot(m: &MarkedCat) -> String {
    let mut out = String::from("digraph category {\n");
    body(&mut out, &m.cat, &|i| m.is_marked(crate::fincat::Mor(i as u32)));
    out.push_str("}\n");
    out
}

/// A roof with the kernel on top and the feet on one rank; the wrong-way
/// leg is marked.
pub fn span_dot(c: &FinCat, s: &Span) -> String {
    let mut out = String::from("digraph span {\n");
    writeln!(out, "  kernel [label={}];", quote(c.ob_name(s.kernel))).unwrap();
    writeln!(out, "  left [label={}];", quote(c.ob_name(s.left))).unwrap();
    writeln!(out, "  right [label={}];", quote(c.ob_name(s.right))).unwrap();
    writeln!(out, "  {{ rank=same; left; right; }}").unwrap();
    writeln!(out, "  kernel -> left [label={}, {MARKED}];", quote(c.mor_name(s.wrong_way))).unwrap();
    writeln!(out, "  kernel -> right [label={}];", quote(c.mor_name(s.right_way))).unwrap();
    out.push_str("}\n");
    out
}

/// The category of spans, one node per span.
pub fn span_total_dot(t: &SpanTotal) -> String {
    let mut out = String::from("digraph spans {\n");
    body(&mut out, &t.cat, &|_| false);
    out.push_str("}\n");
    out
}

/// The source of `p`, with the objects over each target object on one rank.
pub fn projection_dot(p: &Functor) -> String {
    let e = &p.source;
    let mut out = String::from("digraph projection {\n");
    body(&mut out, e, &|_| false);
    for d in p.target.objects() {
        let over: Vec<String> = e.objects().filter(|&x| p.ob(x) == d).map(|x| format!("n{}", x.idx())).collect();
        if !over.is_empty() {
            writeln!(out, "  {{ rank=same; {}; }}", over.join("; ")).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::fincat::{FinCat, MorphismRecord, Ob};
    use crate::fixtures;
    use crate::marked::{certify, validate_marking_names};
    use crate::span::span_total;

    fn edges(dot: &str) -> usize {
        dot.lines().filter(|l| l.contains("->")).count()
    }

    fn walking_span() -> FinCat {
        let rec = |name: &str, s: u32, t: u32| MorphismRecord { name: name.into(), src: Ob(s), tgt: Ob(t) };
        let names = vec!["k".to_string(), "x".to_string(), "y".to_string()];
        let records = vec![rec("1k", 0, 0), rec("1x", 1, 1), rec("1y", 2, 2), rec("p", 0, 1), rec("q", 0, 2)];
        let ids = vec![crate::fincat::Mor(0), crate::fincat::Mor(1), crate::fincat::Mor(2)];
        FinCat::validated(names, records, ids, |g, f| {
            if g.idx() < 3 {
                Some(f)
            } else if f.idx() < 3 {
                Some(g)
            } else {
                None
            }
        })
        .unwrap()
    }

    #[test]
    fn point_is_one_node() {
        let m = MarkedCat::trivial(&Arc::new(fixtures::one()));
        let dot = category_dot(&m);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=")).count(), 1);
        assert_eq!(edges(&dot), 0);
    }

    #[test]
    fn walking_span_styles_the_marked_leg() {
        let c = Arc::new(walking_span());
        let m = validate_marking_names(&c, &["p".to_string()]).unwrap();
        let dot = category_dot(&m);
        assert_eq!(edges(&dot), 2);
        let styled: Vec<&str> = dot.lines().filter(|l| l.contains("bold")).collect();
        assert_eq!(styled.len(), 1);
        assert!(styled[0].contains("\"p\""));
        assert_eq!(dot, category_dot(&m));
    }

    #[test]
    fn span_is_a_roof() {
        let c = fixtures::arrow();
        let a = c.mor_named("a").unwrap();
        let s = Span { left: Ob(0), right: Ob(1), kernel: Ob(0), wrong_way: c.id(Ob(0)), right_way: a };
        let dot = span_dot(&c, &s);
        assert_eq!(edges(&dot), 2);
        assert!(dot.contains("rank=same; left; right;"));
    }

    #[test]
    fn span_total_has_a_node_per_span() {
        let m = certify(&validate_marking_names(&Arc::new(fixtures::arrow()), &["a".to_string()]).unwrap()).unwrap();
        let t = span_total(&m, crate::fincat::DEFAULT_CAP).unwrap();
        let dot = span_total_dot(&t);
        let nodes = dot.lines().filter(|l| l.contains("[label=") && !l.contains("->")).count();
        assert_eq!(nodes, t.spans.len());
        assert!(projection_dot(&t.proj).contains("rank=same"));
    }
}
