//! Topos kernel laws on FinSet carriers of size at most 3 and Sierpiński
//! presheaves with stage sizes at most 2.

use std::collections::HashSet;

use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Morphism, Object, Subobject, Topos};

use super::common::{homs, pick, rng, show_morphism};
use super::SuiteConfig;
use crate::report::{Report, Tally};

struct Fixture {
    topos: Topos,
    objects: Vec<Object>,
    /// Test domains for universal properties.
    probes: Vec<Object>,
}

fn fixtures(cfg: &SuiteConfig) -> Vec<Fixture> {
    let fin = Topos::finset();
    let sie = Topos::sierpinski();
    let fin_max = if cfg.full() { 3 } else { 2 };
    let sie_objects = super::common::sierpinski_objects(&sie, if cfg.full() { 2 } else { 1 });
    let sie_probes = vec![
        sie.terminal().clone(),
        sie.representable(0).clone(),
        sie.representable(1).clone(),
        sie.constant(2),
    ];
    vec![
        Fixture {
            objects: super::common::finset_objects(&fin, fin_max),
            probes: super::common::finset_objects(&fin, fin_max),
            topos: fin,
        },
        Fixture {
            topos: sie,
            objects: sie_objects,
            probes: sie_probes,
        },
    ]
}

fn show_sub(s: &Subobject) -> String {
    let stages: Vec<String> = (0..s.carrier().num_stages())
        .map(|c| format!("{:?}", s.stage(c)))
        .collect();
    format!("{:?} {}", s.carrier().sizes(), stages.join(" "))
}

pub fn run(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    for fx in fixtures(cfg) {
        let t = &fx.topos;
        report.info(
            format!("{} samples", t.name()),
            format!("{} objects, {} probes", fx.objects.len(), fx.probes.len()),
        );
        report.add(composition(cfg, &fx));
        report.add(products(&fx));
        report.add(pullbacks(cfg, &fx));
        report.add(exponentials(&fx));
        report.add(classifier(&fx));
        report.add(images(&fx));
        report.add(quantifiers(&fx));
    }
    report
}

fn composition(cfg: &SuiteConfig, fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new("compose", &format!("{}: naturality, identity, associativity", t.name()));
    let cat = t.index();
    let mut all: Vec<Morphism> = Vec::new();
    for a in &fx.objects {
        for b in &fx.objects {
            for f in homs(t, a, b) {
                let ok = f.check(cat).is_ok()
                    && f.after(&Morphism::identity(a)).as_ref() == Ok(&f)
                    && Morphism::identity(b).after(&f).as_ref() == Ok(&f);
                tally.record(ok, || show_morphism(&f));
                all.push(f);
            }
        }
    }
    for f in &all {
        for g in all.iter().filter(|g| g.dom() == f.cod()) {
            let gf = g.after(f).expect("composable");
            tally.record(gf.check(cat).is_ok(), || {
                format!("{} then {}", show_morphism(f), show_morphism(g))
            });
        }
    }
    let mut r = rng(cfg.seed, "kernel-assoc");
    for _ in 0..cfg.scaled(2000) {
        let f = pick(&mut r, &all);
        let gs: Vec<&Morphism> = all.iter().filter(|g| g.dom() == f.cod()).collect();
        let g = *pick(&mut r, &gs);
        let hs: Vec<&Morphism> = all.iter().filter(|h| h.dom() == g.cod()).collect();
        let h = *pick(&mut r, &hs);
        let lhs = h.after(&g.after(f).unwrap()).unwrap();
        let rhs = h.after(g).unwrap().after(f).unwrap();
        tally.record(lhs == rhs, || show_morphism(f));
    }
    tally
}

fn products(fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new("product", &format!("{}: unique mediating map", t.name()));
    for a in &fx.objects {
        for b in &fx.objects {
            let prod = t.product(a, b);
            for d in &fx.probes {
                let into_p = homs(t, d, &prod.object);
                let pairs: HashSet<(Morphism, Morphism)> = into_p
                    .iter()
                    .map(|h| (prod.p1.after(h).unwrap(), prod.p2.after(h).unwrap()))
                    .collect();
                let expected = t.count_homs(d, a) * t.count_homs(d, b);
                tally.record(pairs.len() == into_p.len() && pairs.len() == expected, || {
                    format!("A={:?} B={:?} D={:?}", a.sizes(), b.sizes(), d.sizes())
                });
            }
        }
    }
    tally
}

fn pullbacks(cfg: &SuiteConfig, fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new("pullback", &format!("{}: unique mediating map", t.name()));
    let mut r = rng(cfg.seed, &format!("kernel-pullback-{}", t.name()));
    let mut cospans = Vec::new();
    for c in &fx.objects {
        for a in &fx.objects {
            for b in &fx.objects {
                let (fs, gs) = (homs(t, a, c), homs(t, b, c));
                if !fs.is_empty() && !gs.is_empty() {
                    cospans.push((fs, gs));
                }
            }
        }
    }
    for _ in 0..cfg.scaled(300) {
        let (fs, gs) = pick(&mut r, &cospans);
        let (f, g) = (pick(&mut r, fs), pick(&mut r, gs));
        let pb = t.pullback(f, g).expect("cospan");
        for d in &fx.probes {
            let into_p = homs(t, d, &pb.object);
            let med: HashSet<(Morphism, Morphism)> = into_p
                .iter()
                .map(|h| (pb.p1.after(h).unwrap(), pb.p2.after(h).unwrap()))
                .collect();
            let mut cones = 0;
            for u in homs(t, d, f.dom()) {
                for v in homs(t, d, g.dom()) {
                    if f.after(&u).unwrap() == g.after(&v).unwrap() {
                        cones += 1;
                        if !med.contains(&(u.clone(), v)) {
                            cones = usize::MAX;
                            break;
                        }
                    }
                }
            }
            tally.record(cones == med.len() && med.len() == into_p.len(), || {
                format!("f={} g={} D={:?}", show_morphism(f), show_morphism(g), d.sizes())
            });
        }
    }
    tally
}

fn exponentials(fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new("exponential", &format!("{}: transpose bijection and beta", t.name()));
    for a in &fx.objects {
        for b in &fx.objects {
            let exp = t.exponential(a, b);
            for d in &fx.probes {
                let da = t.product(d, a);
                let maps = homs(t, &da.object, b);
                let mut seen = HashSet::new();
                let mut ok = maps.len() == t.count_homs(d, &exp.object);
                for f in &maps {
                    let ft = t.transpose(f, d, a).expect("typed");
                    let beta = exp
                        .eval
                        .after(&t.product_map(&ft, &Morphism::identity(a)))
                        .is_ok_and(|g| g == *f);
                    ok &= beta && seen.insert(ft);
                }
                tally.record(ok, || format!("A={:?} B={:?} D={:?}", a.sizes(), b.sizes(), d.sizes()));
            }
        }
    }
    tally
}

fn classifier(fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new(
        "omega/char/sub_of_char",
        &format!("{}: subobjects correspond to A -> Omega", t.name()),
    );
    let om = t.omega();
    for a in &fx.objects {
        let subs = t.subobjects(a, DEFAULT_LIMIT).expect("small");
        for s in &subs {
            let chi = t.char_of(s);
            let pulled = t.pullback_subobject(&chi, &t.image_subobject(&om.truth));
            tally.record(t.sub_of_char(&chi).as_ref() == Ok(s) && pulled == *s, || show_sub(s));
        }
        for chi in homs(t, a, &om.object) {
            let back = t.sub_of_char(&chi).map(|s| t.char_of(&s));
            tally.record(back.as_ref() == Ok(&chi), || show_morphism(&chi));
        }
        tally.record(t.count_homs(a, &om.object) == subs.len(), || {
            format!("A={:?}", a.sizes())
        });
    }
    tally
}

fn images(fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new("image", &format!("{}: epi-mono factorization", t.name()));
    for a in &fx.objects {
        for b in &fx.objects {
            for f in homs(t, a, b) {
                let im = t.image(&f);
                let ok = im.epi.is_epi()
                    && im.mono.is_mono()
                    && im.mono.after(&im.epi).as_ref() == Ok(&f)
                    && f.is_iso() == (f.is_epi() && f.is_mono());
                tally.record(ok, || show_morphism(&f));
            }
        }
    }
    tally
}

fn quantifiers(fx: &Fixture) -> Tally {
    let t = &fx.topos;
    let mut tally = Tally::new(
        "exists_along/forall_along",
        &format!("{}: exists -| pullback -| forall", t.name()),
    );
    for a in &fx.objects {
        let subs_a = t.subobjects(a, DEFAULT_LIMIT).expect("small");
        for b in &fx.objects {
            let subs_b = t.subobjects(b, DEFAULT_LIMIT).expect("small");
            for g in homs(t, a, b) {
                let ex: Vec<Subobject> = subs_a.iter().map(|s| t.exists_along(&g, s)).collect();
                let fa: Vec<Subobject> = subs_a.iter().map(|s| t.forall_along(&g, s)).collect();
                let pb: Vec<Subobject> = subs_b.iter().map(|u| t.pullback_subobject(&g, u)).collect();
                let mut ok = true;
                for (i, s) in subs_a.iter().enumerate() {
                    for (j, u) in subs_b.iter().enumerate() {
                        ok &= ex[i].leq(u) == s.leq(&pb[j]);
                        ok &= pb[j].leq(s) == u.leq(&fa[i]);
                    }
                }
                tally.record(ok, || show_morphism(&g));
            }
        }
    }
    tally
}
