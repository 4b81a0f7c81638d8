//! The internal language: dummy variables, connectives, comprehension, the
//! set-theoretic oracle and excluded middle.

use spantopos::logic::oracle::oracle_agrees;
use spantopos::logic::{
    comprehension_roundtrip, connective_tables_check, dummy_invariance_check, eval_closed, parse, Env, TypeExpr, Value,
};
use spantopos::Topos;

use super::SuiteConfig;
use crate::report::{Report, Tally};

pub fn finset_env() -> Env {
    let t = Topos::finset();
    let mut env = Env::new(&t);
    let (a, b) = (t.constant(2), t.constant(3));
    env.add_object("A", &a);
    env.add_object("B", &b);
    env.add_morphism("f", &t.morphism(&a, &b, vec![vec![2, 0]]).unwrap());
    env.add_morphism("g", &t.morphism(&b, &a, vec![vec![1, 1, 0]]).unwrap());
    let s = t.subobject_of_elements(&b, &[vec![0, 2]]).unwrap();
    env.add_subobject("S", TypeExpr::Named("B".into()), &s).unwrap();
    let tt = t.subobject_of_elements(&a, &[vec![1]]).unwrap();
    env.add_subobject("T", TypeExpr::Named("A".into()), &tt).unwrap();
    env
}

pub fn sierpinski_env() -> Env {
    let t = Topos::sierpinski();
    let mut env = Env::new(&t);
    let y = t.representable(1).clone();
    let fork = t.presheaf(&[1, 2], &[("u", vec![0, 0])]).unwrap();
    env.add_object("Y", &y);
    env.add_object("F", &fork);
    // stage 0 only: the witness against excluded middle
    let s = t.subobject(&y, vec![vec![true], vec![false]]).unwrap();
    env.add_subobject("S", TypeExpr::Named("Y".into()), &s).unwrap();
    let r = t.subobject(&fork, vec![vec![true], vec![true, false]]).unwrap();
    env.add_subobject("R", TypeExpr::Named("F".into()), &r).unwrap();
    env
}

const FINSET_ATOMS: [&str; 6] = [
    "mem(x, T)",
    "mem(f(x), S)",
    "f(x) = y:B",
    "x = g(y:B)",
    "g(f(x)) = x",
    "not mem(x, T)",
];

const SIERPINSKI_ATOMS: [&str; 4] = ["mem(x, R)", "not mem(x, R)", "x = x", "mem(x, R) or not mem(x, R)"];

/// Quantified formulas over `x:ty`: single atoms and binary combinations.
fn quantified(atoms: &[&str], ty: &str) -> Vec<String> {
    let mut out = Vec::new();
    for q in ["forall", "exists"] {
        for a in atoms {
            out.push(format!("{q} x:{ty}. {a}"));
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                for c in ["and", "or", "implies"] {
                    out.push(format!("{q} x:{ty}. {c}({a}, {b})"));
                }
            }
        }
    }
    out
}

pub fn finset_formulas() -> Vec<String> {
    quantified(&FINSET_ATOMS, "A")
}

pub fn run(_cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let fin = finset_env();
    let sie = sierpinski_env();
    let fin_formulas = finset_formulas();
    let sie_formulas = quantified(&SIERPINSKI_ATOMS, "F");
    report.info(
        "formulas",
        format!("{} FinSet, {} Sierpinski", fin_formulas.len(), sie_formulas.len()),
    );

    let mut dummy = Tally::new("dummy_invariance_check", "forall/exists formulas with an unused z");
    for (env, formulas, dummies) in [(&fin, &fin_formulas, ["A", "B"]), (&sie, &sie_formulas, ["F", "Y"])] {
        for src in formulas.iter() {
            let e = parse(src).expect("suite formulas parse");
            for ty in dummies {
                match dummy_invariance_check(&e, env, "z", &TypeExpr::Named(ty.into())) {
                    Ok(rep) => dummy.record(rep.holds(), || format!("{src} with z:{ty}: {rep:?}")),
                    Err(err) => dummy.error(format!("{src}: {err}")),
                }
            }
        }
    }
    report.add(dummy);

    let mut tables = Tally::new("interpret", "and/or/implies/not agree with stage-wise sieve tables");
    for env in [&fin, &sie] {
        match connective_tables_check(env) {
            Ok(ok) => tables.record(ok, || env.topos().name().to_string()),
            Err(err) => tables.error(err),
        }
    }
    report.add(tables);

    let mut compr = Tally::new("interpret", "comprehension { x | φ } names the subobject φ");
    for (env, atoms, ty) in [(&fin, &FINSET_ATOMS[..], "A"), (&sie, &SIERPINSKI_ATOMS[..], "F")] {
        for a in atoms.iter().filter(|a| !a.contains('y')) {
            let body = parse(&format!("and(x:{ty} = x, {a})")).expect("atoms parse");
            match comprehension_roundtrip(&body, env, "x", &TypeExpr::Named(ty.into())) {
                Ok(ok) => compr.record(ok, || a.to_string()),
                Err(err) => compr.error(format!("{a}: {err}")),
            }
        }
    }
    report.add(compr);

    let mut oracle = Tally::new("eval_closed/interpret", "FinSet denotations = set-theoretic oracle");
    let extra = [
        "(x:A, y:B) = (x, y) and q:Omega",
        "{ y:B | mem(y, S) or y = f(x:A) } = { y:B | mem(y, S) }",
    ];
    for src in fin_formulas.iter().map(String::as_str).chain(extra) {
        let e = parse(src).expect("suite formulas parse");
        match oracle_agrees(&e, &fin) {
            Ok(Ok(_)) => oracle.ok(true),
            Ok(Err(values)) => oracle.record(false, || format!("{src} at {values:?}")),
            Err(err) => oracle.error(format!("{src}: {err}")),
        }
    }
    report.add(oracle);

    let mut lem = Tally::new(
        "eval_closed",
        "excluded middle: true in FinSet, false for S in Sierpinski",
    );
    let cases = [
        (&fin, "forall x:A. mem(x, T) or not mem(x, T)", true),
        (&fin, "forall y:B. mem(y, S) or not mem(y, S)", true),
        (&sie, "forall x:Y. mem(x, S) or not mem(x, S)", false),
    ];
    for (env, src, expected) in cases {
        match eval_closed(&parse(src).unwrap(), env) {
            Ok(Value::Truth(v)) => lem.record(v == expected, || format!("{src} evaluated to {v}")),
            Ok(other) => lem.record(false, || format!("{src} gave {other:?}")),
            Err(err) => lem.error(err),
        }
    }
    report.add(lem);
    report
}
