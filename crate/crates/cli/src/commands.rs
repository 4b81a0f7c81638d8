//! The five subcommands. Each returns an exit code and a report, or an input error.

use rand::seq::SliceRandom;
use rand::Rng;
use spantopos::allegory::{right_division_oracle, Allegory, Relation};
use spantopos::boolean::{
    bool_on_functor, boolean_evidence, booleanize as booleanize_view, congruence_summary, eta_logical_check,
    reflection_check, BoolToposView,
};
use spantopos::congruence::ObjectUniverse;
use spantopos::indeterminates::IndeterminateCategory;
use spantopos::logic::{interpret, parse, LogicError};
use spantopos::text::ToposFile;
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Morphism, Object, ToposError};

use crate::report::{Report, Status, Tally};
use crate::suites::common::{rng, show_morphism, show_relation};
use crate::suites::{criterion_name, run_criterion, SuiteConfig, CRITERIA};
use crate::{
    exit_code, load, load_file, InputError, RunConfig, Source, EXIT_COUNTEREXAMPLE, EXIT_INCONCLUSIVE, EXIT_PASS,
};

type CmdResult = Result<(i32, Report), InputError>;

/// Relation hom-sets larger than this are sampled rather than enumerated.
const RELATION_LIMIT: usize = 4096;
/// Law instances checked per object triple in `check-allegory`.
const TRIPLES_PER_TYPE: usize = 64;
/// Largest total size of a universe member built by closure.
const UNIVERSE_MAX_SIZE: usize = 6;

fn topos_file(cfg: &RunConfig) -> Result<ToposFile, InputError> {
    load(cfg.topos.as_ref().unwrap_or(&Source::Builtin("finset".into())))
}

fn header(report: &mut Report, cmd: &str, file: &ToposFile, cfg: &RunConfig) {
    report.section(cmd);
    let source = match &cfg.topos {
        Some(Source::File(path)) => path.display().to_string(),
        _ => file.topos.name().to_string(),
    };
    report.info("topos", source);
    report.info("seed", cfg.seed.to_string());
}

/// Resource limits make a check inconclusive; anything else is a failure.
fn record_error(tally: &mut Tally, e: ToposError) {
    match e {
        ToposError::TooLarge { .. } => tally.unknown(),
        other => tally.error(other),
    }
}

fn input_logic_error(e: LogicError) -> InputError {
    InputError::Usage(format!("formula: {e}"))
}

pub fn eval(cfg: &RunConfig) -> CmdResult {
    let file = topos_file(cfg)?;
    let src = cfg
        .formula
        .as_deref()
        .ok_or_else(|| InputError::Usage("eval needs --formula".into()))?;
    let expr = parse(src).map_err(input_logic_error)?;
    let env = file.env();
    let d = match interpret(&expr, &env) {
        Ok(d) => d,
        Err(LogicError::Topos(e)) => {
            let mut report = Report::new();
            header(&mut report, "eval", &file, cfg);
            let mut tally = Tally::new("interpret", "denotation computed");
            record_error(&mut tally, e);
            report.add(tally);
            return Ok((EXIT_INCONCLUSIVE, report));
        }
        Err(e) => return Err(input_logic_error(e)),
    };
    let t = &file.topos;
    let mut report = Report::new();
    header(&mut report, "eval", &file, cfg);
    report.info("formula", src);
    let ctx: Vec<String> = d.context.iter().map(|v| format!("{}:{}", v.name, v.ty)).collect();
    report.info(
        "context",
        if ctx.is_empty() {
            "(closed)".into()
        } else {
            ctx.join(", ")
        },
    );
    report.info("type", d.ty.to_string());
    let f = &d.morphism;
    for c in 0..t.index().num_stages() {
        let rows: Vec<String> = (0..f.dom().size(c))
            .map(|x| format!("{} -> {}", f.dom().label(c, x), f.cod().label(c, f.apply(c, x))))
            .collect();
        report.info(format!("denotation at {}", t.index().stage_name(c)), rows.join(", "));
    }
    let is_formula = d.ty.object == t.omega().object;
    if d.is_closed() {
        if is_formula {
            let v = *f == t.truth();
            report.info("value", v.to_string());
            return Ok((if v { EXIT_PASS } else { EXIT_COUNTEREXAMPLE }, report));
        }
        report.info("value", show_morphism(f));
        return Ok((EXIT_PASS, report));
    }
    if is_formula {
        for c in 0..t.index().num_stages() {
            let members: Vec<String> = (0..f.dom().size(c))
                .filter(|&x| d.holds_at(t, c, x))
                .map(|x| f.dom().label(c, x))
                .collect();
            report.info(
                format!("extension at {}", t.index().stage_name(c)),
                format!("{{{}}}", members.join(", ")),
            );
        }
    }
    report.info("value", "not closed");
    Ok((EXIT_INCONCLUSIVE, report))
}

fn named_objects(file: &ToposFile) -> Vec<(String, Object)> {
    let mut out: Vec<(String, Object)> = file.objects.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    if out.is_empty() {
        out.push(("1".into(), file.topos.terminal().clone()));
    }
    out
}

pub fn adjoin(cfg: &RunConfig) -> CmdResult {
    let file = topos_file(cfg)?;
    let t = &file.topos;
    let objs = named_objects(&file);
    let (name, a) = match &cfg.object {
        Some(n) => {
            let o = file
                .objects
                .get(n)
                .ok_or_else(|| InputError::Usage(format!("unknown object {n}")))?;
            (n.clone(), o.clone())
        }
        None => objs[0].clone(),
    };
    let cx = IndeterminateCategory::adjoin(t, &a);
    let mut report = Report::new();
    header(&mut report, "adjoin", &file, cfg);
    report.info("indeterminate", format!("x : 1 -> {name}"));

    let mut faithful = Tally::new(
        "embed/is_faithful_here",
        "T -> T[x] faithful iff A has a global element",
    );
    let global = !t.global_elements(&a).is_empty();
    let mut injective = true;
    for (bn, b) in &objs {
        for (cn, c) in &objs {
            let base = t.count_homs(b, c);
            let classes = cx.hom_classes(b, c, DEFAULT_LIMIT).map(|v| v.len());
            let shown = match &classes {
                Ok(n) => n.to_string(),
                Err(e) => format!("({e})"),
            };
            report.info(format!("hom({bn}, {cn})"), format!("T: {base}, T[x]: {shown}"));
            match cx.embed_injective_on(b, c) {
                Ok(ok) => injective &= ok,
                Err(e) => record_error(&mut faithful, e),
            }
        }
    }
    faithful.record(cx.is_faithful_here() == global && injective == global, || {
        format!("global element: {global}, embed injective: {injective}")
    });
    report.add(faithful);

    let mut square = Tally::new("the_x/pair", "x^2 = <x, x>");
    let x = cx.the_x(0);
    match cx.pair(&x, &x) {
        Ok(p) => square.record(cx.class_equal(&cx.x_power(0, 2), &p), || {
            "x^2 differs from <x, x>".into()
        }),
        Err(e) => record_error(&mut square, e),
    }
    report.add(square);

    let mut products = Tally::new("pair", "products preserved: one mediating class");
    for (_, d) in &objs {
        for (_, b) in &objs {
            for (_, c) in &objs {
                let (us, vs) = match (cx.hom_classes(d, b, 64), cx.hom_classes(d, c, 64)) {
                    (Ok(us), Ok(vs)) => (us, vs),
                    (Err(e), _) | (_, Err(e)) => {
                        record_error(&mut products, e);
                        continue;
                    }
                };
                for u in &us {
                    for v in &vs {
                        match cx.mediating_count(u, v) {
                            Ok(n) => products.record(n == 1, || {
                                format!(
                                    "{} and {}: {n} mediating",
                                    show_morphism(u.core()),
                                    show_morphism(v.core())
                                )
                            }),
                            Err(e) => record_error(&mut products, e),
                        }
                    }
                }
            }
        }
    }
    report.add(products);
    Ok((exit_code(report.status()), report))
}

/// All relations of a type, or `None` when the hom-poset is too large.
fn relations(al: &Allegory, a: &Object, b: &Object) -> Option<Vec<Relation>> {
    al.relations(a, b, RELATION_LIMIT).ok()
}

pub fn check_allegory(cfg: &RunConfig) -> CmdResult {
    let file = topos_file(cfg)?;
    let t = &file.topos;
    let al = Allegory::new(t);
    let objs = named_objects(&file);
    let mut report = Report::new();
    header(&mut report, "check-allegory", &file, cfg);
    let mut r = rng(cfg.seed, "check-allegory");

    let mut modular = Tally::new("modular_law_holds", "ψφ ∩ χ ≤ (ψ ∩ χφ°)φ");
    let mut involution = Tally::new("converse", "(ψφ)° = φ°ψ°, r°° = r");
    let mut adjunction = Tally::new("right_division", "Xφ ≤ r iff X ≤ r/φ");
    let mut formula = Tally::new("right_division", "r/φ = brute-force largest solution");
    let mut skipped = 0usize;
    for (_, a) in &objs {
        for (_, b) in &objs {
            for (_, c) in &objs {
                let (Some(phis), Some(psis), Some(chis)) =
                    (relations(&al, a, b), relations(&al, b, c), relations(&al, a, c))
                else {
                    skipped += 1;
                    continue;
                };
                if phis.is_empty() || psis.is_empty() || chis.is_empty() {
                    continue;
                }
                let total = phis.len() * psis.len() * chis.len();
                let exhaustive = total <= TRIPLES_PER_TYPE;
                let triples: Vec<(usize, usize, usize)> = if exhaustive {
                    (0..total)
                        .map(|i| {
                            (
                                i % phis.len(),
                                (i / phis.len()) % psis.len(),
                                i / (phis.len() * psis.len()),
                            )
                        })
                        .collect()
                } else {
                    (0..TRIPLES_PER_TYPE)
                        .map(|_| {
                            (
                                r.gen_range(0..phis.len()),
                                r.gen_range(0..psis.len()),
                                r.gen_range(0..chis.len()),
                            )
                        })
                        .collect()
                };
                let brute = psis.len() <= 256;
                for (i, j, k) in triples {
                    let (phi, psi, chi) = (&phis[i], &psis[j], &chis[k]);
                    let dump = || {
                        format!(
                            "φ={} ψ={} χ={}",
                            show_relation(phi),
                            show_relation(psi),
                            show_relation(chi)
                        )
                    };
                    match al.modular_law_holds(psi, phi, chi) {
                        Ok(ok) => modular.record(ok, dump),
                        Err(e) => record_error(&mut modular, e),
                    }
                    let inv = al
                        .compose(phi, psi)
                        .and_then(|comp| al.compose(&al.converse(psi), &al.converse(phi)).map(|rev| (comp, rev)))
                        .map(|(comp, rev)| al.converse(&comp) == rev && al.converse(&al.converse(phi)) == *phi);
                    match inv {
                        Ok(ok) => involution.record(ok, dump),
                        Err(e) => record_error(&mut involution, e),
                    }
                    // r = χ : A → C, X = ψ : B → C
                    match al.right_division(chi, phi) {
                        Ok(div) => {
                            let lhs = al.compose(phi, psi).map(|x| al.below(&x, chi));
                            match lhs {
                                Ok(l) => adjunction.record(l == al.below(psi, &div), dump),
                                Err(e) => record_error(&mut adjunction, e),
                            }
                            if brute && j == 0 {
                                match right_division_oracle(&al, chi, phi) {
                                    Ok(o) => formula.record(o == div, dump),
                                    Err(e) => record_error(&mut formula, e),
                                }
                            }
                        }
                        Err(e) => record_error(&mut adjunction, e),
                    }
                }
            }
        }
    }
    if skipped > 0 {
        report.info(
            "object triples skipped (relation hom-set too large)",
            skipped.to_string(),
        );
    }
    report.add(modular);
    report.add(involution);
    report.add(adjunction);
    report.add(formula);

    let mut power = Tally::new("power_laws_check", "(∈|∈) = 1 and 1 ≤ (φ∖∈)(∈∖φ)");
    let mut maps = Tally::new("maps", "maps A → B correspond to morphisms");
    for (an, a) in &objs {
        if a.total_size() > 3 {
            continue;
        }
        for (bn, b) in &objs {
            if let Some(phis) = relations(&al, b, a) {
                let mut phis = phis;
                phis.shuffle(&mut r);
                for phi in phis.iter().take(16) {
                    match al.power_laws_check(a, phi) {
                        Ok((ext, total)) => power.record(ext && total, || format!("A={an} φ={}", show_relation(phi))),
                        Err(e) => record_error(&mut power, e),
                    }
                }
            }
            match al.maps(a, b, RELATION_LIMIT) {
                Ok(ms) => {
                    let n = t.count_homs(a, b);
                    let round = ms.iter().all(|m| al.ungraph(m).is_some_and(|f| al.graph(&f) == *m));
                    maps.record(ms.len() == n && round, || {
                        format!("{an} -> {bn}: {} maps, {n} morphisms", ms.len())
                    });
                }
                Err(e) => record_error(&mut maps, e),
            }
        }
    }
    report.add(power);
    report.add(maps);
    Ok((exit_code(report.status()), report))
}

/// Seeds `1+1` and the named objects, closed under products and powers to `depth`.
fn universe_for(file: &ToposFile, depth: usize) -> ObjectUniverse {
    let t = &file.topos;
    let (sum, _) = t.one_plus_one();
    let mut seeds: Vec<(&str, Object)> = vec![("1+1", sum.object.clone())];
    seeds.extend(file.objects.iter().map(|(k, v)| (k.as_str(), v.clone())));
    ObjectUniverse::closed(t, &seeds, depth, UNIVERSE_MAX_SIZE)
}

fn topos_error(tally_name: &str, e: ToposError) -> (i32, Report) {
    let mut report = Report::new();
    let mut tally = Tally::new("booleanize", tally_name);
    record_error(&mut tally, e);
    report.add(tally);
    (exit_code(report.status()), report)
}

pub fn booleanize(cfg: &RunConfig) -> CmdResult {
    let file = topos_file(cfg)?;
    let functor_file = cfg.functor.as_ref().map(load_file).transpose()?;
    let t = &file.topos;
    let universe = universe_for(&file, cfg.depth);
    // relation-level checks enumerate hom-posets, so they use the seed universe
    let core = universe_for(&file, 0);
    let mut report = Report::new();
    header(&mut report, "booleanize", &file, cfg);
    report.info("depth", cfg.depth.to_string());
    report.info("universe", universe.names().join(", "));
    report.info("check universe", core.names().join(", "));
    let view = match booleanize_view(t, &universe) {
        Ok(v) => v,
        Err(e) => {
            let (code, sub) = topos_error("B(T) computed", e);
            report.extend(sub);
            return Ok((code, report));
        }
    };

    report.section("B(T)");
    for line in view.class().topology().describe(t) {
        report.info("topology", line);
    }
    let members: Vec<String> = view
        .class()
        .proper_monos(&universe)
        .into_iter()
        .map(|(i, j, m)| format!("{} -> {} {}", universe.name(i), universe.name(j), show_morphism(&m)))
        .collect();
    report.info("proper monos in B(T)", members.len().to_string());
    for m in members {
        report.info("member", m);
    }

    report.section("congruence");
    let mut sound = Tally::new(
        "congruence_summary",
        "table identifications are closure identifications",
    );
    match congruence_summary(&view, &core) {
        Ok(s) => {
            report.info("relations", s.relations.to_string());
            report.info("classes", s.classes.to_string());
            report.info(
                "closure identifications reproduced",
                format!("{}/{}", s.agreeing, s.closure_identified),
            );
            sound.record(s.sound, || format!("{s:?}"));
        }
        Err(e) => record_error(&mut sound, e),
    }
    report.add(sound);

    report.section("booleanness");
    let mut boolean = Tally::new("boolean_evidence", "[1, b] invertible in the quotient");
    match boolean_evidence(&view) {
        Ok(ev) => {
            report.info("b invertible", if ev.holds() { "yes" } else { "no" });
            boolean.record(ev.holds(), || format!("{ev:?}"));
        }
        Err(e) => {
            report.info("b invertible", "unknown");
            record_error(&mut boolean, e);
        }
    }
    report.add(boolean);

    report.section("η");
    let samples: Vec<Object> = core.objects().iter().filter(|o| o.total_size() <= 4).cloned().collect();
    let pairs: Vec<(Object, Object)> = samples.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
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
                report.info(name, format!("{}/{}", counts.0, counts.1));
                eta.add_counts(counts, || format!("{name}: {rep:?}"));
            }
        }
        Err(e) => record_error(&mut eta, e),
    }
    report.add(eta);

    if let Some(ff) = functor_file {
        report.section("reflection");
        let func = ff.functor_from(&file).map_err(|source| InputError::Parse {
            path: cfg
                .functor
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            source,
        })?;
        report.extend(reflection(cfg, &view, &core, func.as_ref()));
    }
    Ok((exit_code(report.status()), report))
}

fn reflection(
    cfg: &RunConfig,
    view: &BoolToposView,
    universe: &ObjectUniverse,
    func: &dyn spantopos::functor::ToposFunctor,
) -> Report {
    let mut report = Report::new();
    let tt = func.target().clone();
    let (sum, _) = tt.one_plus_one();
    let mut seeds: Vec<(String, Object)> = vec![("1+1".into(), sum.object.clone())];
    for (i, a) in universe.objects().iter().enumerate() {
        if let Ok(fa) = func.map_object(a) {
            if fa.total_size() <= UNIVERSE_MAX_SIZE {
                seeds.push((format!("F({})", universe.name(i)), fa));
            }
        }
    }
    let seeds: Vec<(&str, Object)> = seeds.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
    let tu = ObjectUniverse::closed(&tt, &seeds, 0, UNIVERSE_MAX_SIZE);
    let mut check = Tally::new("bool_on_functor", "Bool(F) defined on the views");
    let tview = match booleanize_view(&tt, &tu) {
        Ok(v) => v,
        Err(e) => {
            record_error(&mut check, e);
            report.add(check);
            return report;
        }
    };
    let bf = match bool_on_functor(func, view, &tview) {
        Ok(bf) => bf,
        Err(e) => {
            record_error(&mut check, e);
            report.add(check);
            return report;
        }
    };
    let morphisms: Vec<Morphism> = universe
        .morphisms(view.topos(), DEFAULT_LIMIT)
        .into_iter()
        .map(|(_, _, f)| f)
        .collect();
    let mut maps: Vec<Relation> = Vec::new();
    for a in universe.objects() {
        for b in universe.objects() {
            maps.extend(view.maps(a, b).unwrap_or_default());
        }
    }
    let mut r = rng(cfg.seed, "reflection");
    maps.shuffle(&mut r);
    maps.truncate(60);
    report.info(
        "samples",
        format!("{} morphisms, {} quotient maps", morphisms.len(), maps.len()),
    );
    let mut trivial = Tally::new("reflection_check", "target class is trivial (target Boolean)");
    let mut triangle = Tally::new("reflection_check", "Bool(F) ∘ η = η' ∘ F");
    let mut inverted = Tally::new("reflection_check", "F inverts members of B(T)");
    let mut unique = Tally::new("reflection_check", "F(g)∘F(f)^{-1} = Bool(F)[f, g]");
    match reflection_check(&bf, &morphisms, &maps) {
        Ok(rep) => {
            trivial.record(rep.target_class_trivial, || {
                tview.class().topology().describe(&tt).join("; ")
            });
            triangle.add_counts(rep.triangle, || format!("{rep:?}"));
            inverted.add_counts(rep.class_inverted, || format!("{rep:?}"));
            unique.add_counts(rep.uniqueness, || format!("{rep:?}"));
        }
        Err(e) => record_error(&mut triangle, e),
    }
    report.add(trivial);
    report.add(triangle);
    report.add(inverted);
    report.add(unique);
    report
}

pub fn selftest(cfg: &RunConfig) -> (i32, Report) {
    let suite = SuiteConfig {
        seed: cfg.seed,
        full_scale: cfg.full,
    };
    let chosen: Vec<u8> = if cfg.criteria.is_empty() {
        CRITERIA.iter().map(|(n, _)| *n).collect()
    } else {
        cfg.criteria.clone()
    };
    let mut report = Report::new();
    report.section("selftest");
    report.info("scale", if cfg.full { "full" } else { "quick" });
    report.info("seed", cfg.seed.to_string());
    for n in chosen {
        let name = criterion_name(n).unwrap_or("unknown criterion");
        report.section(format!("criterion {n}: {name}"));
        report.extend(run_criterion(n, &suite));
    }
    let status = report.status();
    report.section("summary");
    report.info(
        "result",
        match status {
            Status::Pass => "all checks pass",
            Status::Inconclusive => "inconclusive within universe",
            Status::Fail => "counterexample found",
        },
    );
    (exit_code(status), report)
}
