//! Spans, their composition by pullback, and quotients by stable classes.

use std::fmt;

use crate::error::{Result, ToposError};
use crate::object::{Morphism, Object};
use crate::search::HomSearch;
use crate::topos::{Topos, DEFAULT_LIMIT};

/// `A ← D → B` with `left: D → A` and `right: D → B`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Span {
    left: Morphism,
    right: Morphism,
}

impl fmt::Debug for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Span({:?}, {:?})", self.left, self.right)
    }
}

impl Span {
    pub fn new(left: Morphism, right: Morphism) -> Result<Self> {
        if left.dom() != right.dom() {
            return Err(ToposError::Mismatch("span legs need a common domain".into()));
        }
        Ok(Span { left, right })
    }

    pub fn identity(a: &Object) -> Self {
        let id = Morphism::identity(a);
        Span {
            left: id.clone(),
            right: id,
        }
    }

    /// `(1, f)`.
    pub fn of_map(f: &Morphism) -> Self {
        Span {
            left: Morphism::identity(f.dom()),
            right: f.clone(),
        }
    }

    /// `(f, 1)`.
    pub fn co_map(f: &Morphism) -> Self {
        Span {
            left: f.clone(),
            right: Morphism::identity(f.dom()),
        }
    }

    /// `(e, e)`.
    pub fn diagonal(e: &Morphism) -> Self {
        Span {
            left: e.clone(),
            right: e.clone(),
        }
    }

    pub fn left(&self) -> &Morphism {
        &self.left
    }

    pub fn right(&self) -> &Morphism {
        &self.right
    }

    pub fn apex(&self) -> &Object {
        self.left.dom()
    }

    pub fn dom(&self) -> &Object {
        self.left.cod()
    }

    pub fn cod(&self) -> &Object {
        self.right.cod()
    }

    pub fn converse(&self) -> Span {
        Span {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn is_endospan(&self) -> bool {
        self.dom() == self.cod()
    }
}

/// `snd ∘ fst`: pull back `fst.right` against `snd.left`.
pub fn span_compose(t: &Topos, fst: &Span, snd: &Span) -> Result<Span> {
    if fst.cod() != snd.dom() {
        return Err(ToposError::Mismatch("spans are not composable".into()));
    }
    let pb = t.pullback(&fst.right, &snd.left)?;
    Ok(Span {
        left: fst.left.after(&pb.p1)?,
        right: snd.right.after(&pb.p2)?,
    })
}

/// An iso `φ` between apexes with `s2.left ∘ φ = s1.left` and
/// `s2.right ∘ φ = s1.right`, if any.
pub fn vertical_iso(t: &Topos, s1: &Span, s2: &Span) -> Option<Morphism> {
    if s1.dom() != s2.dom() || s1.cod() != s2.cod() || s1.apex().sizes() != s2.apex().sizes() {
        return None;
    }
    let ok = |c: usize, x: usize, y: usize| {
        s1.left.apply(c, x) == s2.left.apply(c, y) && s1.right.apply(c, x) == s2.right.apply(c, y)
    };
    HomSearch::new(t.index(), s1.apex(), s2.apex())
        .injective()
        .allowed(&ok)
        .first()
}

/// Cheap invariant of a span up to vertical isomorphism: fibre sizes over each
/// cell of `A × B`, stage by stage.
pub fn span_fingerprint(s: &Span) -> Vec<Vec<usize>> {
    let (a, b) = (s.dom(), s.cod());
    (0..a.num_stages())
        .map(|c| {
            let nb = b.size(c);
            let mut v = vec![0; a.size(c) * nb];
            for x in 0..s.apex().size(c) {
                v[s.left.apply(c, x) * nb + s.right.apply(c, x)] += 1;
            }
            v
        })
        .collect()
}

/// A class of morphisms containing the isos and stable under composition
/// and pullback.
pub trait StableClass {
    fn name(&self) -> &str;

    fn contains(&self, t: &Topos, f: &Morphism) -> bool;

    /// Apexes that suffice to search for a bridge between `s1` and `s2`, when
    /// the class admits a complete finite candidate set.
    fn complete_candidates(&self, _t: &Topos, _s1: &Span, _s2: &Span) -> Option<Vec<Object>> {
        None
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Isos;

impl StableClass for Isos {
    fn name(&self) -> &str {
        "isos"
    }

    fn contains(&self, _t: &Topos, f: &Morphism) -> bool {
        f.is_iso()
    }

    fn complete_candidates(&self, _t: &Topos, s1: &Span, _s2: &Span) -> Option<Vec<Object>> {
        Some(vec![s1.apex().clone()])
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Epis;

impl StableClass for Epis {
    fn name(&self) -> &str {
        "epis"
    }

    fn contains(&self, _t: &Topos, f: &Morphism) -> bool {
        f.is_epi()
    }

    fn complete_candidates(&self, t: &Topos, s1: &Span, s2: &Span) -> Option<Vec<Object>> {
        // with epis the joint pullback over A × B is a universal bridge
        Some(vec![joint_pullback(t, s1, s2).0])
    }
}

/// Outcome of a bounded decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Related,
    Unrelated,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Related => "related",
            Verdict::Unrelated => "unrelated",
            Verdict::Inconclusive => "inconclusive within universe",
        })
    }
}

/// Pullback of the two spans over `A × B`, with its legs into each apex.
fn joint_pullback(t: &Topos, s1: &Span, s2: &Span) -> (Object, Morphism, Morphism) {
    let l1 = t.pair(&s1.left, &s1.right).expect("span legs share a domain");
    let l2 = t.pair(&s2.left, &s2.right).expect("span legs share a domain");
    let pb = t.pullback(&l1, &l2).expect("both land in A × B");
    (pb.object, pb.p1, pb.p2)
}

/// Whether some `P` with `p, q ∈ F` makes `s1 ∘ p = s2 ∘ q` leg-wise.
/// Searches the class's complete candidates when it has them, else the
/// supplied universe (and the joint pullback).
pub fn stable_equiv(t: &Topos, class: &dyn StableClass, s1: &Span, s2: &Span, universe: &[Object]) -> Result<Verdict> {
    if s1.dom() != s2.dom() || s1.cod() != s2.cod() {
        return Err(ToposError::Mismatch("spans have different types".into()));
    }
    if s1 == s2 {
        return Ok(Verdict::Related);
    }
    let complete = class.complete_candidates(t, s1, s2);
    let candidates = match &complete {
        Some(c) => c.clone(),
        None => {
            let mut c = vec![joint_pullback(t, s1, s2).0];
            c.extend(universe.iter().cloned());
            c
        }
    };
    for p_obj in &candidates {
        if bridge_from(t, class, s1, s2, p_obj) {
            return Ok(Verdict::Related);
        }
    }
    Ok(if complete.is_some() {
        Verdict::Unrelated
    } else {
        Verdict::Inconclusive
    })
}

fn bridge_from(t: &Topos, class: &dyn StableClass, s1: &Span, s2: &Span, p_obj: &Object) -> bool {
    let mut found = false;
    HomSearch::new(t.index(), p_obj, s1.apex()).for_each(|maps| {
        let p = Morphism::from_fn(p_obj, s1.apex(), |c, x| maps[c][x]);
        if !class.contains(t, &p) {
            return std::ops::ControlFlow::Continue(());
        }
        let ok = |c: usize, x: usize, y: usize| {
            let z = p.apply(c, x);
            s1.left.apply(c, z) == s2.left.apply(c, y) && s1.right.apply(c, z) == s2.right.apply(c, y)
        };
        let search = HomSearch::new(t.index(), p_obj, s2.apex()).allowed(&ok);
        let mut hit = false;
        search.for_each(|qm| {
            let q = Morphism::from_fn(p_obj, s2.apex(), |c, x| qm[c][x]);
            if class.contains(t, &q) {
                hit = true;
                std::ops::ControlFlow::Break(())
            } else {
                std::ops::ControlFlow::Continue(())
            }
        });
        if hit {
            found = true;
            std::ops::ControlFlow::Break(())
        } else {
            std::ops::ControlFlow::Continue(())
        }
    });
    found
}

/// The kernel pair of `f` as an endospan on `dom(f)`.
pub fn kernel_pair(t: &Topos, f: &Morphism) -> Span {
    let kp = t.kernel_pair(f);
    Span {
        left: kp.p1,
        right: kp.p2,
    }
}

/// Morphisms `h: dom(f) → Y`, `Y` drawn from `targets`, through which `f`
/// factors as `f = g ∘ h`.
pub fn factorizations(t: &Topos, f: &Morphism, targets: &[Object]) -> Vec<(Morphism, Morphism)> {
    let mut out = Vec::new();
    for y in targets {
        let Ok(hs) = t.homs(f.dom(), y, DEFAULT_LIMIT) else {
            continue;
        };
        for h in hs {
            // g must send h(x) to f(x)
            let ok =
                |c: usize, z: usize, w: usize| (0..f.dom().size(c)).all(|x| h.apply(c, x) != z || f.apply(c, x) == w);
            if let Some(g) = HomSearch::new(t.index(), y, f.cod()).allowed(&ok).first() {
                out.push((g, h));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(t: &Topos, n: usize) -> Object {
        t.constant(n)
    }

    fn map(t: &Topos, a: &Object, b: &Object, v: &[usize]) -> Morphism {
        t.morphism(a, b, vec![v.to_vec()]).unwrap()
    }

    #[test]
    fn identity_span_is_unit() {
        let t = Topos::finset();
        let (a, b) = (fin(&t, 2), fin(&t, 3));
        let s = Span::of_map(&map(&t, &a, &b, &[2, 0]));
        let left = span_compose(&t, &Span::identity(&a), &s).unwrap();
        let right = span_compose(&t, &s, &Span::identity(&b)).unwrap();
        assert!(vertical_iso(&t, &left, &s).is_some());
        assert!(vertical_iso(&t, &right, &s).is_some());
    }

    #[test]
    fn graphs_compose_like_functions() {
        let t = Topos::finset();
        let (a, b, c) = (fin(&t, 3), fin(&t, 2), fin(&t, 2));
        let f = map(&t, &a, &b, &[0, 1, 1]);
        let g = map(&t, &b, &c, &[1, 0]);
        let comp = span_compose(&t, &Span::of_map(&f), &Span::of_map(&g)).unwrap();
        assert!(vertical_iso(&t, &comp, &Span::of_map(&g.after(&f).unwrap())).is_some());
    }

    #[test]
    fn epi_composite_is_kernel_pair() {
        let t = Topos::finset();
        let (a, b) = (fin(&t, 3), fin(&t, 2));
        let e = map(&t, &a, &b, &[0, 0, 1]);
        let comp = span_compose(&t, &Span::of_map(&e), &Span::co_map(&e)).unwrap();
        assert_eq!(comp.apex().size(0), 5);
        assert!(vertical_iso(&t, &comp, &kernel_pair(&t, &e)).is_some());
    }

    #[test]
    fn constant_map_kernel_pair_is_square() {
        let t = Topos::finset();
        let f = map(&t, &fin(&t, 2), &fin(&t, 1), &[0, 0]);
        assert_eq!(kernel_pair(&t, &f).apex().size(0), 4);
        let m = map(&t, &fin(&t, 2), &fin(&t, 3), &[2, 0]);
        let kp = kernel_pair(&t, &m);
        assert_eq!(kp.left(), kp.right());
        assert_eq!(kp.apex().size(0), 2);
    }

    #[test]
    fn epi_equivalence_is_image_equality() {
        let t = Topos::finset();
        let (one, two, a) = (fin(&t, 1), fin(&t, 2), fin(&t, 2));
        // (s, f) with apex 2 hitting the single cell (0, 1) twice, against its image
        let fat = Span::new(map(&t, &two, &a, &[0, 0]), map(&t, &two, &a, &[1, 1])).unwrap();
        let thin = Span::new(map(&t, &one, &a, &[0]), map(&t, &one, &a, &[1])).unwrap();
        let other = Span::new(map(&t, &one, &a, &[1]), map(&t, &one, &a, &[1])).unwrap();
        assert_eq!(stable_equiv(&t, &Epis, &fat, &thin, &[]).unwrap(), Verdict::Related);
        assert_eq!(stable_equiv(&t, &Epis, &fat, &other, &[]).unwrap(), Verdict::Unrelated);
        assert_eq!(stable_equiv(&t, &Isos, &fat, &thin, &[]).unwrap(), Verdict::Unrelated);
        assert_eq!(stable_equiv(&t, &Isos, &fat, &fat, &[]).unwrap(), Verdict::Related);
    }

    #[test]
    fn factorizations_find_the_trivial_ones() {
        let t = Topos::finset();
        let f = map(&t, &fin(&t, 2), &fin(&t, 1), &[0, 0]);
        let fs = factorizations(&t, &f, &[fin(&t, 1), fin(&t, 2)]);
        // every h into 1 or 2 works because the codomain is terminal
        assert_eq!(fs.len(), 1 + 4);
    }
}
