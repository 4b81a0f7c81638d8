//! Sample objects and seeded randomness shared by the suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spantopos::allegory::Relation;
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Morphism, Object, Topos};

/// Independent stream per suite and purpose.
pub fn rng(seed: u64, salt: &str) -> ChaCha8Rng {
    let mix = salt.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ mix)
}

/// Finite sets of sizes `0..=max`.
pub fn finset_objects(t: &Topos, max: usize) -> Vec<Object> {
    (0..=max).map(|n| t.constant(n)).collect()
}

/// Every presheaf on `0 → 1` with stage sizes at most `max`.
pub fn sierpinski_objects(t: &Topos, max: usize) -> Vec<Object> {
    let mut out = Vec::new();
    for s1 in 0..=max {
        for s0 in 0..=max {
            for table in functions(s1, s0) {
                out.push(
                    t.presheaf(&[s0, s1], &[("u", table)])
                        .expect("any function is a restriction"),
                );
            }
        }
    }
    out
}

/// All functions `n → m` as value tables.
pub fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..m).map(move |y| {
                    let mut w = v.clone();
                    w.push(y);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn homs(t: &Topos, a: &Object, b: &Object) -> Vec<Morphism> {
    t.homs(a, b, DEFAULT_LIMIT).expect("sample hom-sets are small")
}

pub fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty sample")
}

/// A uniformly random relation between finite sets.
pub fn random_relation(t: &Topos, a: &Object, b: &Object, rng: &mut ChaCha8Rng) -> Relation {
    let pairs: Vec<(usize, usize)> = (0..a.size(0))
        .flat_map(|x| (0..b.size(0)).map(move |y| (x, y)))
        .filter(|_| rng.gen_bool(0.5))
        .collect();
    Relation::from_pairs(t, a, b, &[pairs]).expect("FinSet relation")
}

/// Compact element tables for counterexample dumps.
pub fn show_morphism(f: &Morphism) -> String {
    let stages: Vec<String> = (0..f.dom().num_stages())
        .map(|c| format!("{:?}", f.component(c)))
        .collect();
    format!("{:?}->{:?} {}", f.dom().sizes(), f.cod().sizes(), stages.join(" "))
}

pub fn show_relation(r: &Relation) -> String {
    let stages: Vec<String> = (0..r.dom().num_stages()).map(|c| format!("{:?}", r.pairs(c))).collect();
    format!("{:?}->{:?} {}", r.dom().sizes(), r.cod().sizes(), stages.join(" "))
}
