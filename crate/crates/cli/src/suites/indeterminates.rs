//! Adjoined indeterminates: `x^n`, product preservation, faithfulness,
//! composite sorts, the Π quotient's cartesian closure and the chain colimit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use spantopos::indeterminates::{colimit_check, context, hereditary_iso_check, IndeterminateCategory, Sort, Term};
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Morphism, Object, Topos};

use super::common::{homs, pick, rng, show_morphism};
use super::SuiteConfig;
use crate::report::{Report, Tally};

fn fork(t: &Topos) -> Object {
    t.presheaf(&[1, 2], &[("u", vec![0, 0])]).expect("fork presheaf")
}

pub fn run(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let fin = Topos::finset();
    let sie = Topos::sierpinski();
    report.add(x_powers(&fin, &sie));
    report.add(products(&fin, &sie));
    report.add(faithfulness(&fin, &sie));
    report.add(composite(&fin, &sie));
    let (beta, unique) = pi_closure(cfg, &fin, &sie);
    report.add(beta);
    report.add(unique);
    report.add(colimit(cfg, &fin));
    report
}

fn x_powers(fin: &Topos, sie: &Topos) -> Tally {
    let mut tally = Tally::new("the_x/pair", "x^n = <x,...,x> = embed(diagonal) . x, n <= 3");
    let samples = [
        (fin, fin.constant(1)),
        (fin, fin.constant(2)),
        (fin, fin.constant(3)),
        (sie, sie.representable(1).clone()),
        (sie, fork(sie)),
    ];
    for (t, a) in samples {
        let cx = IndeterminateCategory::adjoin(t, &a);
        let x = cx.the_x(0);
        let mut tuple = x.clone();
        for n in 1..=3 {
            if n > 1 {
                tuple = cx.pair(&tuple, &x).expect("same domain");
            }
            let ids = vec![Morphism::identity(&a); n];
            let diag = t.tuple(&a, &ids).expect("diagonal");
            let via_diag = cx.compose(&x, &cx.embed(&diag)).expect("composable");
            let power = cx.x_power(0, n);
            tally.record(
                cx.class_equal(&power, &tuple) && cx.class_equal(&power, &via_diag),
                || format!("{} A={:?} n={n}", t.name(), a.sizes()),
            );
        }
    }
    tally
}

fn products(fin: &Topos, sie: &Topos) -> Tally {
    let mut tally = Tally::new("pair", "Q preserves products: exactly one mediating class");
    let cases = [
        (fin, fin.constant(2), vec![fin.constant(1), fin.constant(2)]),
        (
            sie,
            sie.representable(1).clone(),
            vec![sie.terminal().clone(), sie.representable(0).clone()],
        ),
    ];
    for (t, a, objs) in cases {
        let cx = IndeterminateCategory::adjoin(t, &a);
        for d in &objs {
            for b in &objs {
                for c in &objs {
                    let us = cx.hom_classes(d, b, DEFAULT_LIMIT).unwrap();
                    let vs = cx.hom_classes(d, c, DEFAULT_LIMIT).unwrap();
                    for u in &us {
                        for v in &vs {
                            let n = cx.mediating_count(u, v).unwrap();
                            tally.record(n == 1, || {
                                format!(
                                    "{} D={:?} B={:?} C={:?}: {n} mediating",
                                    t.name(),
                                    d.sizes(),
                                    b.sizes(),
                                    c.sizes()
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    tally
}

fn faithfulness(fin: &Topos, sie: &Topos) -> Tally {
    let mut tally = Tally::new(
        "embed/is_faithful_here",
        "faithful iff hom(1,A) nonempty (A = 0 included)",
    );
    let cases: Vec<(&Topos, Vec<Object>, Vec<Object>)> = vec![
        (
            fin,
            super::common::finset_objects(fin, 3),
            vec![fin.constant(1), fin.constant(2)],
        ),
        (
            sie,
            super::common::sierpinski_objects(sie, 1),
            vec![sie.representable(1).clone(), fork(sie), sie.constant(2)],
        ),
    ];
    for (t, samples, probes) in cases {
        for a in &samples {
            let cx = IndeterminateCategory::adjoin(t, a);
            let global = !t.global_elements(a).is_empty();
            let mut injective_everywhere = true;
            for b in &probes {
                for c in &probes {
                    injective_everywhere &= cx.embed_injective_on(b, c).unwrap();
                }
            }
            tally.record(
                cx.is_faithful_here() == global && injective_everywhere == global,
                || {
                    format!(
                        "{} A={:?} global={global} injective={injective_everywhere}",
                        t.name(),
                        a.sizes()
                    )
                },
            );
        }
    }
    tally
}

fn composite(fin: &Topos, sie: &Topos) -> Tally {
    let mut tally = Tally::new(
        "compose_classes/hereditary_iso_check",
        "A∘B: hom(A×B×X,Y) ≅ hom_{A∘B}(X,Y)",
    );
    let small: Vec<Object> = vec![fin.constant(1), fin.constant(2)];
    for a in &small {
        for b in &small {
            for x in &small {
                for y in &small {
                    let rep = hereditary_iso_check(fin, a, b, x, y).unwrap();
                    tally.record(rep.holds(), || format!("FinSet {rep:?}"));
                }
            }
        }
    }
    let (one, y0, y1) = (
        sie.terminal().clone(),
        sie.representable(0).clone(),
        sie.representable(1).clone(),
    );
    for (a, b, x, y) in [
        (&y1, &y1, &one, &y1),
        (&y0, &y1, &y1, &fork(sie)),
        (&one, &y0, &y1, &y1),
    ] {
        let rep = hereditary_iso_check(sie, a, b, x, y).unwrap();
        tally.record(rep.holds(), || format!("Sierpinski {rep:?}"));
    }
    tally
}

fn random_map(t: &Topos, a: &Object, b: &Object, r: &mut ChaCha8Rng) -> Option<Morphism> {
    if t.index().num_stages() == 1 {
        if b.size(0) == 0 && a.size(0) > 0 {
            return None;
        }
        let table = (0..a.size(0)).map(|_| r.gen_range(0..b.size(0))).collect();
        return Some(t.morphism(a, b, vec![table]).expect("function"));
    }
    let hs = homs(t, a, b);
    (!hs.is_empty()).then(|| pick(r, &hs).clone())
}

fn random_sorts(objs: &[Object], r: &mut ChaCha8Rng) -> Vec<Sort> {
    let n = r.gen_range(0..=2);
    (0..n).map(|i| Sort::new(format!("s{i}"), pick(r, objs))).collect()
}

fn pi_closure(cfg: &SuiteConfig, fin: &Topos, sie: &Topos) -> (Tally, Tally) {
    let mut beta = Tally::new("exp_in_pi", "Span_Π: uncurry(curry u) = u");
    let mut unique = Tally::new("exp_in_pi", "Span_Π: curry(uncurry w) = w");
    let mut r = rng(cfg.seed, "pi-closure");
    let cases = [
        (fin, vec![fin.constant(1), fin.constant(2)], cfg.scaled(100)),
        (
            sie,
            vec![sie.terminal().clone(), sie.representable(1).clone()],
            cfg.scaled(25),
        ),
    ];
    for (t, objs, n) in cases {
        let pi = IndeterminateCategory::pi(t);
        let mut done = 0;
        while done < n {
            let sorts = random_sorts(&objs, &mut r);
            let (c, a, b) = (
                pick(&mut r, &objs).clone(),
                pick(&mut r, &objs).clone(),
                pick(&mut r, &objs).clone(),
            );
            let ca = t.product(&c, &a).object;
            let Some(core) = random_map(t, &context(t, &sorts, &ca), &b, &mut r) else {
                continue;
            };
            let u = pi.term(sorts.clone(), ca, core).unwrap();
            let cur = pi.curry(&u, &c, &a).unwrap();
            let back = pi.uncurry(&cur, &a, &b).unwrap();
            beta.record(pi.class_equal(&back, &u), || {
                format!("{} u={}", t.name(), show_morphism(u.core()))
            });

            let (exp, _) = pi.exp_in_pi(&a, &b);
            let Some(core) = random_map(t, &context(t, &sorts, &c), &exp, &mut r) else {
                continue;
            };
            let w = pi.term(sorts, c.clone(), core).unwrap();
            let again = pi.curry(&pi.uncurry(&w, &a, &b).unwrap(), &c, &a).unwrap();
            unique.record(pi.class_equal(&again, &w), || {
                format!("{} w={}", t.name(), show_morphism(w.core()))
            });
            done += 1;
        }
    }
    (beta, unique)
}

fn colimit(cfg: &SuiteConfig, t: &Topos) -> Tally {
    let mut tally = Tally::new("colimit_check", "T[x0] -> T[x0,x1] cocone factors through Span_Π");
    let mut r = rng(cfg.seed, "colimit");
    let (a0, a1) = (t.constant(2), t.constant(3));
    let chain = vec![Sort::new("x0", &a0), Sort::new("x1", &a1)];
    let pi = IndeterminateCategory::pi(t);
    let objs = [t.constant(1), t.constant(2)];
    for _ in 0..cfg.scaled(10) {
        let elements = vec![
            random_map(t, t.terminal(), &a0, &mut r).unwrap(),
            random_map(t, t.terminal(), &a1, &mut r).unwrap(),
        ];
        let term = |r: &mut ChaCha8Rng, d: &Object, e: &Object, max_k: usize| -> Term {
            let k = r.gen_range(1..=max_k);
            let sorts = chain[..k].to_vec();
            let core = random_map(t, &context(t, &sorts, d), e, r).unwrap();
            pi.term(sorts, d.clone(), core).unwrap()
        };
        let mut samples = Vec::new();
        let mut pairs = Vec::new();
        for _ in 0..5 {
            let (d, e, f) = (
                pick(&mut r, &objs).clone(),
                pick(&mut r, &objs).clone(),
                pick(&mut r, &objs).clone(),
            );
            // samples live in the first stage; pairs may use the whole chain
            samples.push(term(&mut r, &d, &e, 1));
            pairs.push((term(&mut r, &d, &e, 2), term(&mut r, &e, &f, 2)));
        }
        let rep = colimit_check(t, &chain, &elements, &samples, &pairs).unwrap();
        tally.record(rep.holds(), || format!("{rep:?}"));
    }
    tally
}
