//! Allegory laws, power-allegory laws and map extraction.

use spantopos::allegory::{right_division_oracle, Allegory, Relation};
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Object, Topos};

use super::common::{homs, random_relation, rng, show_relation};
use super::SuiteConfig;
use crate::report::{Report, Tally};

/// Pointwise set-theoretic `r / φ`: `b` relates to `c` when every `a` with
/// `a φ b` has `a r c`.
fn pointwise_division(t: &Topos, r: &Relation, phi: &Relation) -> Relation {
    let (a, b, c) = (r.dom().size(0), phi.cod().size(0), r.cod().size(0));
    let pairs: Vec<(usize, usize)> = (0..b)
        .flat_map(|y| (0..c).map(move |z| (y, z)))
        .filter(|&(y, z)| (0..a).all(|x| !phi.holds(0, x, y) || r.holds(0, x, z)))
        .collect();
    Relation::from_pairs(t, phi.cod(), r.cod(), &[pairs]).expect("FinSet relation")
}

fn involution(al: &Allegory, r: &Relation, s: &Relation) -> bool {
    let conv_comp = al.converse(&al.compose(r, s).unwrap()) == al.compose(&al.converse(s), &al.converse(r)).unwrap();
    let twice = al.converse(&al.converse(r)) == *r;
    let meets = if r.dom() == s.dom() && r.cod() == s.cod() {
        al.converse(&al.meet(r, s).unwrap()) == al.meet(&al.converse(r), &al.converse(s)).unwrap()
            && (!r.leq(s) || al.converse(r).leq(&al.converse(s)))
    } else {
        true
    };
    conv_comp && twice && meets
}

/// Criterion 2: modular law, involution, division adjunction and formula.
pub fn laws(cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let t = Topos::finset();
    let al = Allegory::new(&t);
    let two = t.constant(2);
    let rels = al.relations(&two, &two, DEFAULT_LIMIT).expect("16 relations");

    let mut modular = Tally::new("modular_law_holds", "FinSet |A|=|B|=|C|=2, all triples");
    let mut invol = Tally::new("converse", "FinSet size 2: (sr)°=r°s°, r°°=r, ° on meets");
    let mut adj = Tally::new("right_division", "FinSet size 2: Xφ <= r <=> X <= r/φ, all triples");
    let mut formula = Tally::new("right_division", "FinSet size 2: formula = brute-force oracle");
    for psi in &rels {
        for phi in &rels {
            invol.record(involution(&al, psi, phi), || {
                format!("{} ; {}", show_relation(psi), show_relation(phi))
            });
            let div = al.right_division(psi, phi).unwrap();
            let oracle = right_division_oracle(&al, psi, phi).unwrap();
            formula.record(div == oracle, || {
                format!("r={} φ={}", show_relation(psi), show_relation(phi))
            });
            for chi in &rels {
                modular.record(al.modular_law_holds(psi, phi, chi).unwrap(), || {
                    format!(
                        "ψ={} φ={} χ={}",
                        show_relation(psi),
                        show_relation(phi),
                        show_relation(chi)
                    )
                });
                let lhs = al.compose(phi, chi).unwrap().leq(psi);
                adj.record(lhs == chi.leq(&div), || {
                    format!(
                        "r={} φ={} X={}",
                        show_relation(psi),
                        show_relation(phi),
                        show_relation(chi)
                    )
                });
            }
        }
    }
    report.add(modular);
    report.add(invol);
    report.add(adj);
    report.add(formula);

    let three = t.constant(3);
    let mut r = rng(cfg.seed, "allegory-random");
    let mut random = Tally::new(
        "right_division",
        "FinSet size 3 random: adjunction, formula vs pointwise, modular",
    );
    for _ in 0..cfg.scaled(10_000) {
        let rr = random_relation(&t, &three, &three, &mut r);
        let phi = random_relation(&t, &three, &three, &mut r);
        let x = random_relation(&t, &three, &three, &mut r);
        let div = al.right_division(&rr, &phi).unwrap();
        let ok = div == pointwise_division(&t, &rr, &phi)
            && al.compose(&phi, &x).unwrap().leq(&rr) == x.leq(&div)
            && al.modular_law_holds(&x, &phi, &rr).unwrap()
            && involution(&al, &rr, &phi);
        random.record(ok, || {
            format!(
                "r={} φ={} X={}",
                show_relation(&rr),
                show_relation(&phi),
                show_relation(&x)
            )
        });
    }
    report.add(random);

    let s = Topos::sierpinski();
    let sal = Allegory::new(&s);
    let objs = [s.representable(0).clone(), s.representable(1).clone(), s.constant(1)];
    let mut sie = Tally::new(
        "modular_law_holds",
        "Sierpinski representables: modular, division, involution",
    );
    for a in &objs {
        for b in &objs {
            let ab = sal.relations(a, b, DEFAULT_LIMIT).unwrap();
            for c in &objs {
                let bc = sal.relations(b, c, DEFAULT_LIMIT).unwrap();
                let ac = sal.relations(a, c, DEFAULT_LIMIT).unwrap();
                for phi in &ab {
                    for psi in &bc {
                        for chi in &ac {
                            let div = sal.right_division(chi, phi).unwrap();
                            let ok = sal.modular_law_holds(psi, phi, chi).unwrap()
                                && sal.compose(phi, psi).unwrap().leq(chi) == psi.leq(&div)
                                && involution(&sal, phi, psi);
                            sie.record(ok, || {
                                format!(
                                    "φ={} ψ={} χ={}",
                                    show_relation(phi),
                                    show_relation(psi),
                                    show_relation(chi)
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    report.add(sie);
    report
}

fn power_laws(al: &Allegory, a: &Object, bs: &[Object], tally: &mut Tally) {
    for b in bs {
        for phi in al.relations(b, a, DEFAULT_LIMIT).unwrap() {
            match al.power_laws_check(a, &phi) {
                Ok((ext, total)) => tally.record(ext && total, || {
                    format!("A={:?} φ={} ext={ext} total={total}", a.sizes(), show_relation(&phi))
                }),
                Err(e) => tally.error(e),
            }
        }
    }
}

/// Criterion 3: `(∈|∈) = 1` and `1 <= (φ∖∈)(∈∖φ)`.
pub fn power(_cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let t = Topos::finset();
    let al = Allegory::new(&t);
    let sizes: Vec<Object> = (0..=2).map(|n| t.constant(n)).collect();
    let mut fin = Tally::new("power_laws_check", "FinSet |A|,|B| <= 2, all φ: B -> A");
    for a in &sizes {
        power_laws(&al, a, &sizes, &mut fin);
    }
    report.add(fin);

    let s = Topos::sierpinski();
    let sal = Allegory::new(&s);
    let reps = [s.representable(0).clone(), s.representable(1).clone()];
    let probes = [s.terminal().clone(), reps[0].clone(), reps[1].clone()];
    let mut sie = Tally::new("power_laws_check", "Sierpinski representable A, all φ: B -> A");
    for a in &reps {
        power_laws(&sal, a, &probes, &mut sie);
    }
    report.add(sie);
    report
}

/// Criterion 4: maps of `Rel(FinSet)` are functions.
pub fn maps(_cfg: &SuiteConfig) -> Report {
    let mut report = Report::new();
    let t = Topos::finset();
    let al = Allegory::new(&t);
    let mut count = Tally::new("is_map/maps_category", "FinSet sizes <= 3: #maps A->B = |B|^|A|");
    let mut round = Tally::new("graph/ungraph", "FinSet sizes <= 3: graph and ungraph are inverse");
    for a in 0..=3usize {
        for b in 0..=3usize {
            let (oa, ob) = (t.constant(a), t.constant(b));
            let maps = al.maps(&oa, &ob, DEFAULT_LIMIT).unwrap();
            count.record(maps.len() == b.pow(a as u32), || {
                format!("|A|={a} |B|={b}: {} maps", maps.len())
            });
            for m in &maps {
                let back = al.ungraph(m).map(|f| al.graph(&f));
                round.record(back.as_ref() == Some(m), || show_relation(m));
            }
            for f in homs(&t, &oa, &ob) {
                round.record(al.ungraph(&al.graph(&f)).as_ref() == Some(&f), || {
                    format!("|A|={a} |B|={b}")
                });
            }
        }
    }
    report.add(count);
    report.add(round);

    let s = Topos::sierpinski();
    let sal = Allegory::new(&s);
    let objs = super::common::sierpinski_objects(&s, 1);
    let mut sie = Tally::new(
        "is_map/maps_category",
        "Sierpinski stage sizes <= 1: #maps = #morphisms",
    );
    for a in &objs {
        for b in &objs {
            let n = sal.maps(a, b, DEFAULT_LIMIT).unwrap().len();
            sie.record(n == s.count_homs(a, b), || {
                format!("A={:?} B={:?}", a.sizes(), b.sizes())
            });
        }
    }
    report.add(sie);
    report
}
