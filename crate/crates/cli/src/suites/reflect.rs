//! Logical relations and Booleanization.

use rand::seq::SliceRandom;
use spantopos::allegory::Relation;
use spantopos::boolean::{
    bool_on_functor, boolean_evidence, booleanize, corollary_lg_lf_check, eta_logical_check, k_inverse_check,
    lemma_forall_check, reflection_check, representation_check, BoolToposView,
};
use spantopos::congruence::{CongruenceTable, Decision, EndospanClass, ObjectUniverse};
use spantopos::functor::{SliceFunctor, ToposFunctor};
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Morphism, Object, Topos};

use super::common::{homs, pick, rng, show_morphism};
use super::SuiteConfig;
use crate::report::{Report, Tally};

fn fork(t: &Topos) -> Object {
    t.presheaf(&[1, 2], &[("u", vec![0, 0])]).expect("fork presheaf")
}

/// Universe for relation checks: `1`, `1+1`, `Ω` and the given extras.
pub fn base_universe(t: &Topos, extras: &[(&str, Object)]) -> ObjectUniverse {
    let (sum, _) = t.one_plus_one();
    let mut seeds = vec![
        ("1", t.terminal().clone()),
        ("1+1", sum.object.clone()),
        ("Ω", t.omega().object.clone()),
    ];
    seeds.extend(extras.iter().cloned());
    ObjectUniverse::new(t, &seeds)
}

fn epis_between(t: &Topos, objs: &[Object]) -> Vec<Morphism> {
    let mut out = Vec::new();
    for a in objs {
        for b in objs {
            out.extend(homs(t, a, b).into_iter().filter(Morphism::is_epi));
        }
    }
    out
}

/// Criterion 7.
pub fn logical_relations(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let fin = Topos::finset();
    let sie = Topos::sierpinski();

    let mut forall_kernel = Tally::new(
        "lemma_forall_check",
        "∀_{g×g} of the inner kernel pair = kernel pair of f",
    );
    let mut r = rng(cfg.seed, "forall-kernel");
    let cases = [
        (&fin, super::common::finset_objects(&fin, 3)[1..].to_vec()),
        (&sie, super::common::sierpinski_objects(&sie, 2)),
    ];
    for (t, objs) in &cases {
        let epis = epis_between(t, objs);
        let mut n = 0;
        while n < cfg.scaled(100) {
            let g = pick(&mut r, &epis);
            let targets: Vec<Morphism> = objs.iter().flat_map(|a| homs(t, g.cod(), a)).collect();
            if targets.is_empty() {
                continue;
            }
            let f = pick(&mut r, &targets);
            match lemma_forall_check(t, f, g) {
                Ok(ok) => forall_kernel.record(ok, || {
                    format!("{} f={} g={}", t.name(), show_morphism(f), show_morphism(g))
                }),
                Err(e) => forall_kernel.error(e),
            }
            n += 1;
        }
    }
    report.add(forall_kernel);

    let mut inverse = Tally::new(
        "k_class/generated_congruence",
        "[1,e] invertible modulo K(e), every epi e in U",
    );
    let mut contain = Tally::new("k_class/generated_congruence", "K(h) ⊆ K(g∘h) for h epi in U");
    let mut l_containment = Tally::new("corollary_Lg_Lf_check", "bounded L(g) ⊆ bounded L(g∘h), h epi");
    let universes = [
        (
            &fin,
            ObjectUniverse::new(
                &fin,
                &[("1", fin.constant(1)), ("2", fin.constant(2)), ("3", fin.constant(3))],
            ),
        ),
        (
            &sie,
            ObjectUniverse::new(
                &sie,
                &[
                    ("1", sie.terminal().clone()),
                    ("y0", sie.representable(0).clone()),
                    ("F", fork(&sie)),
                ],
            ),
        ),
    ];
    for (t, u) in &universes {
        let epis = epis_between(t, u.objects());
        for e in &epis {
            match k_inverse_check(t, e, u) {
                Ok((Decision::ProvedEqual, Decision::ProvedEqual)) => inverse.ok(true),
                Ok((Decision::DistinctInUniverse, _)) | Ok((_, Decision::DistinctInUniverse)) => {
                    inverse.record(false, || format!("{} e={}", t.name(), show_morphism(e)))
                }
                Ok(_) => inverse.unknown(),
                Err(err) => inverse.error(err),
            }
        }
        let mut r = rng(cfg.seed, &format!("k-containment-{}", t.name()));
        for _ in 0..cfg.scaled(6) {
            let h = pick(&mut r, &epis);
            let gs: Vec<Morphism> = u.objects().iter().flat_map(|b| homs(t, h.cod(), b)).collect();
            let g = pick(&mut r, &gs);
            let f = g.after(h).unwrap();
            let kh = CongruenceTable::generate(t, &EndospanClass::k_class(t, h, u), u);
            let kf = CongruenceTable::generate(t, &EndospanClass::k_class(t, &f, u), u);
            match (kh, kf) {
                (Ok(kh), Ok(kf)) => contain.record(kh.contained_in(&kf), || {
                    format!("{} h={} g={}", t.name(), show_morphism(h), show_morphism(g))
                }),
                (Err(e), _) | (_, Err(e)) => contain.error(e),
            }
            match corollary_lg_lf_check(t, g, h, u, 1) {
                Ok(ok) => l_containment.record(ok, || {
                    format!("{} h={} g={}", t.name(), show_morphism(h), show_morphism(g))
                }),
                Err(e) => l_containment.error(e),
            }
        }
    }
    report.add(inverse);
    report.add(contain);
    report.add(l_containment);
    report
}

/// Sample relations for representation checks: a prefix of each listed hom-poset.
fn relation_samples(view: &BoolToposView, pairs: &[(Object, Object)], per_pair: usize) -> Vec<Relation> {
    let al = view.allegory();
    pairs
        .iter()
        .flat_map(|(a, b)| {
            let rels = al.relations(a, b, DEFAULT_LIMIT).unwrap_or_default();
            rels.into_iter().take(per_pair).collect::<Vec<_>>()
        })
        .collect()
}

/// Criterion 8.
pub fn booleanization(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let fin = Topos::finset();
    let fu = base_universe(&fin, &[("2", fin.constant(2)), ("3", fin.constant(3))]);
    let mut counts = Tally::new("booleanize", "booleanize(FinSet) hom-counts = FinSet hom-counts on U");
    match booleanize(&fin, &fu) {
        Ok(view) => {
            for a in fu.objects() {
                for b in fu.objects() {
                    let n = view.hom_count(a, b);
                    counts.record(n.as_ref() == Ok(&fin.count_homs(a, b)), || {
                        format!("A={:?} B={:?}: view {n:?}", a.sizes(), b.sizes())
                    });
                }
            }
        }
        Err(e) => counts.error(e),
    }
    report.add(counts);

    let sie = Topos::sierpinski();
    let su = base_universe(
        &sie,
        &[
            ("y0", sie.representable(0).clone()),
            ("F", fork(&sie)),
            ("3", sie.constant(3)),
        ],
    );
    let view = match booleanize(&sie, &su) {
        Ok(v) => v,
        Err(e) => {
            let mut t = Tally::new("booleanize", "booleanize(Sierpinski)");
            t.error(e);
            report.add(t);
            return report;
        }
    };
    report.info(
        "B(Sierpinski) topology",
        view.class().topology().describe(&sie).join("; "),
    );
    let mut inv = Tally::new("booleanize", "Sierpinski: [1,b] has a two-sided inverse in the view");
    match boolean_evidence(&view) {
        Ok(ev) => inv.record(ev.holds(), || format!("{ev:?}")),
        Err(e) => inv.error(e),
    }
    report.add(inv);

    let om = sie.omega().object.clone();
    let (sum, _) = sie.one_plus_one();
    let y0 = sie.representable(0).clone();
    let samples = vec![sie.terminal().clone(), y0.clone(), fork(&sie), om.clone()];
    let pairs = vec![
        (y0.clone(), fork(&sie)),
        (fork(&sie), om.clone()),
        (sum.object.clone(), y0.clone()),
    ];
    let mut eta = Tally::new(
        "eta_logical_check",
        "η preserves 1, products, pullbacks, Ω, exponentials",
    );
    match eta_logical_check(&view, &samples, &pairs) {
        Ok(rep) => {
            for (name, counts) in [
                ("identities", rep.identities),
                ("terminal", rep.terminal),
                ("products", rep.products),
                ("pullbacks", rep.pullbacks),
                ("omega", rep.omega),
                ("exponentials", rep.exponentials),
            ] {
                eta.add_counts(counts, || format!("{name} failed: {rep:?}"));
            }
        }
        Err(e) => eta.error(e),
    }
    report.add(eta);

    let func = match SliceFunctor::new(&sie, &y0) {
        Ok(f) => f,
        Err(e) => {
            let mut t = Tally::new("bool_on_functor", "slice over y0");
            t.error(e);
            report.add(t);
            return report;
        }
    };
    let tt = func.target().clone();
    let tu = base_universe(&tt, &[("3", tt.constant(3))]);
    let tview = booleanize(&tt, &tu).expect("target universe is small");
    let bf = bool_on_functor(&func, &view, &tview).expect("matching views");

    let rel_pairs = vec![
        (om.clone(), om.clone()),
        (sum.object.clone(), om.clone()),
        (y0.clone(), fork(&sie)),
    ];
    let mut repr = Tally::new(
        "representation_check",
        "Bool(F) preserves identities, ∘, °, ∩, division",
    );
    match representation_check(&bf, &relation_samples(&view, &rel_pairs, cfg.scaled(8))) {
        Ok(rep) => {
            for counts in [
                rep.well_defined,
                rep.identities,
                rep.composition,
                rep.converse,
                rep.meet,
                rep.division,
            ] {
                repr.add_counts(counts, || format!("{rep:?}"));
            }
        }
        Err(e) => repr.error(e),
    }
    report.add(repr);

    let morphisms: Vec<Morphism> = su
        .morphisms(&sie, DEFAULT_LIMIT)
        .into_iter()
        .map(|(_, _, f)| f)
        .collect();
    let mut maps: Vec<Relation> = Vec::new();
    for a in su.objects() {
        for b in su.objects() {
            maps.extend(view.maps(a, b).unwrap_or_default());
        }
    }
    let mut r = rng(cfg.seed, "uniqueness");
    maps.shuffle(&mut r);
    maps.truncate(cfg.scaled(60));
    report.info(
        "reflection samples",
        format!("{} morphisms, {} quotient maps", morphisms.len(), maps.len()),
    );
    let mut trivial = Tally::new("reflection_check", "B(T') identifies nothing beyond E");
    let mut triangle = Tally::new("reflection_check", "Bool(F) ∘ η = η' ∘ F on every U-morphism");
    let mut inverted = Tally::new("reflection_check", "F sends members of B(T) to isomorphisms");
    let mut unique = Tally::new("reflection_check", "F(g)∘F(f)^{-1} = Bool(F)[f,g] on quotient maps");
    match reflection_check(&bf, &morphisms, &maps) {
        Ok(rep) => {
            trivial.record(rep.target_class_trivial, || {
                tview.class().topology().describe(&tt).join("; ")
            });
            triangle.add_counts(rep.triangle, || format!("{rep:?}"));
            inverted.add_counts(rep.class_inverted, || format!("{rep:?}"));
            unique.add_counts(rep.uniqueness, || format!("{rep:?}"));
        }
        Err(e) => triangle.error(e),
    }
    report.add(trivial);
    report.add(triangle);
    report.add(inverted);
    report.add(unique);
    report
}
