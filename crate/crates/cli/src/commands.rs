use std::path::Path;
use std::sync::Arc;

use corrcalc::adjoint::{
    check_triangle_identities, functor_left_adjoint, functor_right_adjoint, is_beck_chevalley, mate, Adjunction,
    LaxSquare,
};
use corrcalc::bicat::{cat_universe, Bicat, CatUniverse, Pseudofunctor};
use corrcalc::bivariant::{
    bivariance_summary, cartesian_monoidal, check_bivariant, check_spex, corepresentable, self_duality_check,
    self_indexing, universality_check, yoneda_check,
};
use corrcalc::dot::{category_dot, span_dot, span_total_dot};
use corrcalc::fib::{all_morphisms, check_fibration, check_twisted_bicartesian, grothendieck, grothendieck_round_trip, marking_of, Variance};
use corrcalc::fincat::{FinCat, NatTrans, RawCategory};
use corrcalc::fixtures;
use corrcalc::marked::{certify, certify_partial, has_base_change, validate_marking_names, MarkedCat};
use corrcalc::span::{build_corr, compose_spans, span_total};
use corrcalc::twocat::CatCalc;
use corrcalc::Error;
use serde::Serialize;
use serde_json::json;

use crate::input::{self, Family};
use crate::output::{emit, render, Envelope, Outcome};
use crate::{Cli, Command, MarkingArg, Side, VarianceArg};

/// Why a command stopped: bad input, or a check that could not go through.
enum Fail {
    Malformed(Error),
    Check(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Check(e)
    }
}

type Outcomes = std::result::Result<Outcome, Fail>;

trait Input<T> {
    fn input(self) -> std::result::Result<T, Fail>;
}

impl<T> Input<T> for corrcalc::Result<T> {
    fn input(self) -> std::result::Result<T, Fail> {
        self.map_err(Fail::Malformed)
    }
}

fn check_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Fixture { .. } => "fixture",
        Command::CheckCategory { .. } => "category-laws",
        Command::CheckMarking { .. } => "marking-closure",
        Command::CheckBaseChange { .. } => "base-change",
        Command::FindAdjoint { .. } => "adjoint-search",
        Command::Mate { .. } => "mate",
        Command::CheckBc { .. } => "beck-chevalley",
        Command::BuildCorr { .. } => "correspondence-coherence",
        Command::ComposeSpans { .. } => "span-composition",
        Command::Grothendieck { .. } => "grothendieck-round-trip",
        Command::CheckFibration { .. } => "fibration-lifts",
        Command::CheckTwisted { .. } => "twisted-bicartesian",
        Command::CheckBivariant { .. } => "bivariance",
        Command::Spex { .. } => "span-extension",
        Command::YonedaCheck { .. } => "bivariant-yoneda",
        Command::Universality { .. } => "universality",
        Command::SelfDual { .. } => "self-duality",
        Command::CartesianMonoidal { .. } => "cartesian-monoidal",
        Command::Dot { .. } => "dot",
    }
}

/// Runs the command and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let check = check_name(&cli.command);
    let cap = cli.cap as usize;
    let result = dispatch(cli, cap);
    let (text, code, out) = match result {
        Ok(Outcome::Artifact(text)) => (text, 0, cli.out.as_deref()),
        Ok(Outcome::Report { check, holds, report }) => {
            let env = Envelope {
                check,
                holds,
                report: Some(report),
                error: None,
            };
            let out = if matches!(cli.command, Command::BuildCorr { .. }) { None } else { cli.out.as_deref() };
            (render(&env, cli.format), if holds { 0 } else { 1 }, out)
        }
        Err(fail) => {
            let (e, code) = match fail {
                Fail::Malformed(e) => (e, 2),
                Fail::Check(e) => (e, 1),
            };
            if code == 2 {
                eprintln!("error: {e}");
            }
            let env = Envelope {
                check,
                holds: false,
                report: None,
                error: Some(e.to_string()),
            };
            (render(&env, cli.format), code, None)
        }
    };
    if let Err(e) = emit(&text, out) {
        eprintln!("error: {e}");
        return 2;
    }
    code
}

fn dispatch(cli: &Cli, cap: usize) -> Outcomes {
    match &cli.command {
        Command::Fixture { name, marked, mark } => fixture(name, *marked, mark.as_deref()),
        Command::CheckCategory { input } => check_category(input),
        Command::CheckMarking { input } => check_marking(input),
        Command::CheckBaseChange { input } => {
            let m = input::marked_category(input).input()?;
            let r = has_base_change(&m);
            let certified = r.marked.certificate.as_ref().map_or(0, |c| c.len());
            Ok(Outcome::report(
                "base-change",
                r.holds,
                &json!({ "counterexample": r.counterexample, "certified_pairs": certified }),
            ))
        }
        Command::FindAdjoint { input, side } => find_adjoint(input, *side),
        Command::Mate { input } => square_check(input, false),
        Command::CheckBc { input } => square_check(input, true),
        Command::BuildCorr { input } => build(input, cli.out.as_deref(), cap),
        Command::ComposeSpans { input, first, second } => compose(input, first, second),
        Command::Grothendieck { input } => integrate(input, cap),
        Command::CheckFibration { input, variance } => fibration(input, *variance),
        Command::CheckTwisted { input } => {
            let m = certify(&input::marked_category(input).input()?)?;
            let t = span_total(&m, cap)?;
            let r = check_twisted_bicartesian(&t.proj, &t.feet, &m, &m)?;
            Ok(Outcome::report("twisted-bicartesian", r.holds, &r))
        }
        Command::CheckBivariant { input, family } => {
            let (m, _, h) = family_for(input, family.as_deref(), cap)?;
            let summary = bivariance_summary(&h, &m)?;
            Ok(Outcome::report("bivariance", summary.holds, &summary))
        }
        Command::Spex { input, family } => {
            let (m, _, h) = family_for(input, family.as_deref(), cap)?;
            let corr = build_corr(&m, cap)?;
            let bv = check_bivariant(&h, &corr.marked)?;
            let r = check_spex(&bv, &corr)?;
            Ok(Outcome::report("span-extension", r.holds, &r))
        }
        Command::YonedaCheck { input, at, family, corr } => yoneda(input, at, family.as_deref(), corr.as_deref(), cap),
        Command::Universality { input, target } => {
            let m = input::marked_category(input).input()?;
            let k = match target {
                Some(path) => Arc::new(Bicat::from_json(&input::read(path).input()?).input()?),
                None => cat_universe(&[Arc::new(fixtures::one()), Arc::new(fixtures::arrow())], cap)?.bicat,
            };
            let r = universality_check(&m, &k, cap)?;
            Ok(Outcome::report("universality", r.holds, &r))
        }
        Command::SelfDual { input, at } => {
            let m = input::marked_category(input).input()?;
            let x = m.cat.ob_named(at).input()?;
            let r = self_duality_check(&m, x)?;
            Ok(Outcome::report("self-duality", r.holds, &r))
        }
        Command::CartesianMonoidal { input, size } => {
            let m = input::marked_category(input).input()?;
            let r = cartesian_monoidal(&m.cat, *size)?;
            Ok(Outcome::report("cartesian-monoidal", r.holds, &r))
        }
        Command::Dot { input, span, spans } => {
            let m = input::marked_category(input).input()?;
            let text = if let Some(s) = span {
                span_dot(&m.cat, &input::span_legs(&m.cat, s).input()?)
            } else if *spans {
                span_total_dot(&span_total(&certify(&m)?, cap)?)
            } else {
                category_dot(&m)
            };
            Ok(Outcome::Artifact(text))
        }
    }
}

fn fixture(name: &str, marked: Option<MarkingArg>, mark: Option<&[String]>) -> Outcomes {
    let sized = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    let c: FinCat = match name {
        "one" => fixtures::one(),
        "arrow" => fixtures::arrow(),
        "p2" => fixtures::p2(),
        "iso" => fixtures::walking_iso(),
        "discrete2" => fixtures::discrete_two(),
        _ => match (sized("fs"), sized("chain"), sized("powerset")) {
            (Some(n), _, _) if n <= 4 => fixtures::fs(n),
            (_, Some(n), _) if n <= 8 => fixtures::chain(n),
            (_, _, Some(n)) if n <= 3 => fixtures::powerset(n),
            _ => return Err(Fail::Malformed(Error::UnknownName(format!("fixture `{name}`")))),
        },
    };
    let mut raw = c.to_raw();
    raw.marked = match (marked, mark) {
        (Some(MarkingArg::All), _) => Some(raw.morphisms.iter().map(|m| m.name.clone()).collect()),
        (Some(MarkingArg::None), _) => Some(Vec::new()),
        (None, Some(names)) => {
            validate_marking_names(&Arc::new(c), names).input()?;
            Some(names.to_vec())
        }
        (None, None) => None,
    };
    let mut text = raw.to_json();
    text.push('\n');
    Ok(Outcome::Artifact(text))
}

fn check_category(path: &Path) -> Outcomes {
    let raw = RawCategory::from_json(&input::read(path).input()?).input()?;
    match raw.validate() {
        Ok(c) => Ok(Outcome::report(
            "category-laws",
            true,
            &json!({
                "objects": c.num_objects(),
                "morphisms": c.num_morphisms(),
                "composable_pairs": c.num_composable_pairs(),
            }),
        )),
        Err(e) => Ok(Outcome::report("category-laws", false, &json!({ "violation": e.to_string() }))),
    }
}

fn check_marking(path: &Path) -> Outcomes {
    let raw = RawCategory::from_json(&input::read(path).input()?).input()?;
    let c = Arc::new(raw.validate().input()?);
    let names = raw.marked.clone().unwrap_or_default();
    let mors = names.iter().map(|n| c.mor_named(n)).collect::<corrcalc::Result<Vec<_>>>().input()?;
    match corrcalc::marked::validate_marking(&c, &mors) {
        Ok(m) => Ok(Outcome::report(
            "marking-closure",
            true,
            &json!({ "marked": m.marked().map(|f| c.mor_name(f).to_string()).collect::<Vec<_>>() }),
        )),
        Err(e @ Error::NotClosed(_)) => Ok(Outcome::report("marking-closure", false, &json!({ "violation": e.to_string() }))),
        Err(e) => Err(Fail::Malformed(e)),
    }
}

fn components(t: &NatTrans) -> serde_json::Map<String, serde_json::Value> {
    let (c, d) = (&t.source.source, &t.source.target);
    c.objects()
        .map(|x| (c.ob_name(x).to_string(), json!(d.mor_name(t.at(x)))))
        .collect()
}

#[derive(Serialize)]
struct AdjointReport {
    side: &'static str,
    ob_map: std::collections::BTreeMap<String, String>,
    mor_map: std::collections::BTreeMap<String, String>,
    unit: serde_json::Map<String, serde_json::Value>,
    counit: serde_json::Map<String, serde_json::Value>,
    triangles: corrcalc::adjoint::TriangleReport,
}

fn find_adjoint(path: &Path, side: Side) -> Outcomes {
    let (f, _) = input::functor(path).input()?;
    let (adj, name): (Adjunction<CatCalc>, _) = match side {
        Side::Right => (functor_right_adjoint(&f)?, "right"),
        Side::Left => (functor_left_adjoint(&f)?, "left"),
    };
    let found = if side == Side::Right { &adj.right } else { &adj.left };
    let d = found.describe();
    let triangles = check_triangle_identities(&CatCalc, &adj)?;
    let report = AdjointReport {
        side: name,
        ob_map: d.ob_map,
        mor_map: d.mor_map,
        unit: components(&adj.unit),
        counit: components(&adj.counit),
        triangles,
    };
    Ok(Outcome::report("adjoint-search", report.triangles.holds(), &report))
}

fn square_check(path: &Path, verdict: bool) -> Outcomes {
    let sq = input::square(path).input()?;
    let sq = LaxSquare {
        left_adj: functor_right_adjoint(&sq.left)?,
        right_adj: functor_right_adjoint(&sq.right)?,
        top: sq.top,
        left: sq.left,
        right: sq.right,
        bottom: sq.bottom,
        filler: sq.filler,
    };
    let m = mate(&CatCalc, &sq)?;
    if verdict {
        let bc = is_beck_chevalley(&CatCalc, &sq)?;
        Ok(Outcome::report(
            "beck-chevalley",
            bc.holds,
            &json!({ "mate": components(&m), "witness": bc.witness }),
        ))
    } else {
        Ok(Outcome::report("mate", true, &json!({ "mate": components(&m) })))
    }
}

fn build(path: &Path, out: Option<&Path>, cap: usize) -> Outcomes {
    let m = input::marked_category(path).input()?;
    let corr = build_corr(&m, cap)?;
    let validated = corr.bicat.validate().map_err(Fail::Check);
    let c = corr.base();
    let homs: Vec<_> = corr
        .bicat
        .homs()
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let n = c.num_objects();
            json!({
                "from": c.ob_name(corrcalc::fincat::Ob((i / n) as u32)),
                "to": c.ob_name(corrcalc::fincat::Ob((i % n) as u32)),
                "spans": h.num_objects(),
                "morphisms": h.num_morphisms(),
            })
        })
        .collect();
    if let Some(out) = out {
        emit(&corr.bicat.to_json(), Some(out)).map_err(|e| Fail::Malformed(Error::Format(e.to_string())))?;
    }
    validated?;
    Ok(Outcome::report("correspondence-coherence", true, &json!({ "objects": c.num_objects(), "homs": homs })))
}

fn compose(path: &Path, first: &str, second: &str) -> Outcomes {
    let m = input::marked_category(path).input()?;
    let c = m.cat.clone();
    let (s1, s2) = (input::span_legs(&c, first).input()?, input::span_legs(&c, second).input()?);
    for s in [&s1, &s2] {
        if !m.is_marked(s.wrong_way) {
            return Err(Fail::Malformed(Error::PreconditionFailed(format!(
                "wrong-way leg `{}` is not marked",
                c.mor_name(s.wrong_way)
            ))));
        }
    }
    if s1.right != s2.left {
        return Err(Fail::Malformed(Error::NotComposable {
            g: second.to_string(),
            f: first.to_string(),
        }));
    }
    let m = certify_partial(&m);
    let r = compose_spans(&m, &s1, &s2)?;
    Ok(Outcome::report(
        "span-composition",
        true,
        &json!({
            "composite": r.span.name(&c),
            "kernel": c.ob_name(r.span.kernel),
            "wrong_way": c.mor_name(r.span.wrong_way),
            "right_way": c.mor_name(r.span.right_way),
            "to_first": c.mor_name(r.to_first),
            "to_second": c.mor_name(r.to_second),
        }),
    ))
}

fn integrate(path: &Path, cap: usize) -> Outcomes {
    let Family {
        marked,
        universe,
        functor,
        variance,
    } = input::family(path, cap).input()?;
    let base = &marked.cat;
    let g = grothendieck(base, &universe, &functor, variance, cap)?;
    let r = grothendieck_round_trip(base, &universe, &functor, variance, cap)?;
    let total = serde_json::to_value(g.total().to_raw()).expect("serializable category");
    Ok(Outcome::report(
        "grothendieck-round-trip",
        r.holds,
        &json!({ "round_trip": r, "total": total }),
    ))
}

fn fibration(path: &Path, variance: VarianceArg) -> Outcomes {
    let (p, marked) = input::functor(path).input()?;
    let marking = match &marked {
        Some(m) => marking_of(m),
        None => all_morphisms(&p.target),
    };
    let variance = match variance {
        VarianceArg::Covariant => Variance::Covariant,
        VarianceArg::Contravariant => Variance::Contravariant,
    };
    match check_fibration(&p, &marking, variance) {
        Ok(fib) => Ok(Outcome::report(
            "fibration-lifts",
            true,
            &json!({ "cartesian_lifts": fib.cart.len(), "cocartesian_lifts": fib.cocart.len() }),
        )),
        Err(missing) => Ok(Outcome::report("fibration-lifts", false, &json!({ "missing": missing }))),
    }
}

/// The marking of `input` with the family in `family`, or the slice family.
fn family_for(input: &Path, family: Option<&Path>, cap: usize) -> std::result::Result<(MarkedCat, CatUniverse, Pseudofunctor), Fail> {
    let m = input::marked_category(input).input()?;
    match family {
        None => {
            let (u, h) = self_indexing(&m.cat, &[], cap)?;
            Ok((m, u, h))
        }
        Some(path) => {
            let f = input::family(path, cap).input()?;
            if f.variance != Variance::Covariant {
                return Err(Fail::Malformed(Error::PreconditionFailed("bivariant families are covariant".into())));
            }
            if *f.marked.cat != *m.cat {
                return Err(Fail::Malformed(Error::PreconditionFailed(
                    "family is indexed by a different category".into(),
                )));
            }
            Ok((m, f.universe, f.functor))
        }
    }
}

fn yoneda(input: &Path, at: &str, family: Option<&Path>, corr_file: Option<&Path>, cap: usize) -> Outcomes {
    let m = input::marked_category(input).input()?;
    let x = m.cat.ob_named(at).input()?.idx();
    let corr = build_corr(&m, cap)?;
    if let Some(path) = corr_file {
        let stored = Bicat::from_json(&input::read(path).input()?).input()?;
        if stored != *corr.bicat {
            return Err(Fail::Check(Error::PreconditionFailed(
                "correspondence file does not match the input category".into(),
            )));
        }
    }
    let (u, h) = match family {
        None => corepresentable(&corr, x, cap)?,
        Some(_) => {
            let (_, u, h) = family_for(input, family, cap)?;
            (u, h)
        }
    };
    let bv = check_bivariant(&h, &corr.marked)?;
    let r = yoneda_check(&corr, &bv, &u, x, cap)?;
    Ok(Outcome::report("bivariant-yoneda", r.holds, &r))
}
