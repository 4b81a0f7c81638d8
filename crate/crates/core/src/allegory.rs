//! Relations over a finite topos: composition, converse, meets, divisions and
//! power-allegory membership.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, ToposError};
use crate::object::{Morphism, Object};
use crate::span::Span;
use crate::subobject::{for_each_subobject, Subobject};
use crate::topos::Topos;

/// A relation `A → B`, stored as its tabulation `R ≤ A × B`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    dom: Object,
    cod: Object,
    sub: Subobject,
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<usize>> = (0..self.dom.num_stages())
            .map(|c| {
                (0..self.sub.carrier().size(c))
                    .filter(|&p| self.sub.contains(c, p))
                    .collect()
            })
            .collect();
        write!(f, "Relation{cells:?}")
    }
}

impl Relation {
    pub fn from_subobject(t: &Topos, dom: &Object, cod: &Object, sub: Subobject) -> Result<Self> {
        if sub.carrier() != &t.product(dom, cod).object {
            return Err(ToposError::Mismatch("tabulation must live in dom × cod".into()));
        }
        Ok(Relation {
            dom: dom.clone(),
            cod: cod.clone(),
            sub,
        })
    }

    /// Builds a relation from its stage-wise pairs, checking closure.
    pub fn from_pairs(t: &Topos, dom: &Object, cod: &Object, pairs: &[Vec<(usize, usize)>]) -> Result<Self> {
        let prod = t.product(dom, cod).object;
        let mut mem: Vec<Vec<bool>> = (0..prod.num_stages()).map(|c| vec![false; prod.size(c)]).collect();
        for (c, ps) in pairs.iter().enumerate() {
            for &(a, b) in ps {
                mem[c][a * cod.size(c) + b] = true;
            }
        }
        let sub = t.subobject(&prod, mem)?;
        Ok(Relation {
            dom: dom.clone(),
            cod: cod.clone(),
            sub,
        })
    }

    fn from_fn(t: &Topos, dom: &Object, cod: &Object, f: impl Fn(usize, usize, usize) -> bool) -> Self {
        let prod = t.product(dom, cod).object;
        let sub = Subobject::from_fn(&prod, |c, p| f(c, p / cod.size(c), p % cod.size(c)));
        Relation {
            dom: dom.clone(),
            cod: cod.clone(),
            sub,
        }
    }

    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        &self.cod
    }

    pub fn subobject(&self) -> &Subobject {
        &self.sub
    }

    pub fn holds(&self, c: usize, a: usize, b: usize) -> bool {
        self.sub.contains(c, a * self.cod.size(c) + b)
    }

    pub fn pairs(&self, c: usize) -> Vec<(usize, usize)> {
        let nb = self.cod.size(c);
        (0..self.sub.carrier().size(c))
            .filter(|&p| self.sub.contains(c, p))
            .map(|p| (p / nb, p % nb))
            .collect()
    }

    pub fn leq(&self, other: &Relation) -> bool {
        self.sub.leq(&other.sub)
    }

    pub fn is_empty(&self) -> bool {
        self.sub.is_bottom()
    }

    pub fn size(&self) -> usize {
        self.sub.count()
    }
}

/// Quotient of relations by a compatible equivalence with canonical
/// representatives.
pub trait RelationQuotient: Send + Sync {
    fn canonical(&self, r: &Relation) -> Relation;
}

/// Relations of a topos, optionally read through a quotient.
#[derive(Clone)]
pub struct Allegory {
    topos: Topos,
    quotient: Option<Arc<dyn RelationQuotient>>,
}

impl fmt::Debug for Allegory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Allegory({:?}, quotient: {})", self.topos, self.quotient.is_some())
    }
}

impl Allegory {
    pub fn new(topos: &Topos) -> Self {
        Allegory {
            topos: topos.clone(),
            quotient: None,
        }
    }

    pub fn with_quotient(topos: &Topos, quotient: Arc<dyn RelationQuotient>) -> Self {
        Allegory {
            topos: topos.clone(),
            quotient: Some(quotient),
        }
    }

    pub fn topos(&self) -> &Topos {
        &self.topos
    }

    /// Canonical representative of `r`'s class (itself without a quotient).
    pub fn class_of(&self, r: &Relation) -> Relation {
        match &self.quotient {
            Some(q) => q.canonical(r),
            None => r.clone(),
        }
    }

    pub fn related(&self, r: &Relation, s: &Relation) -> bool {
        self.class_of(r) == self.class_of(s)
    }

    /// Order in the (quotient) allegory: `[r] ∩ [s] = [r]`.
    pub fn below(&self, r: &Relation, s: &Relation) -> bool {
        self.class_of(r).leq(&self.class_of(s))
    }

    // ----- basic relations -----

    pub fn identity(&self, a: &Object) -> Relation {
        Relation::from_fn(&self.topos, a, a, |_, x, y| x == y)
    }

    pub fn full(&self, a: &Object, b: &Object) -> Relation {
        Relation::from_fn(&self.topos, a, b, |_, _, _| true)
    }

    pub fn empty(&self, a: &Object, b: &Object) -> Relation {
        Relation::from_fn(&self.topos, a, b, |_, _, _| false)
    }

    pub fn graph(&self, f: &Morphism) -> Relation {
        Relation::from_fn(&self.topos, f.dom(), f.cod(), |c, x, y| f.apply(c, x) == y)
    }

    /// The function a map-like relation is the graph of.
    pub fn ungraph(&self, r: &Relation) -> Option<Morphism> {
        let maps: Option<Vec<Vec<usize>>> = (0..r.dom.num_stages())
            .map(|c| {
                (0..r.dom.size(c))
                    .map(|x| {
                        let mut ys = (0..r.cod.size(c)).filter(|&y| r.holds(c, x, y));
                        let y = ys.next()?;
                        ys.next().is_none().then_some(y)
                    })
                    .collect()
            })
            .collect();
        self.topos.morphism(&r.dom, &r.cod, maps?).ok()
    }

    pub fn rel_of_span(&self, s: &Span) -> Relation {
        let pairing = self.topos.pair(s.left(), s.right()).expect("span legs share a domain");
        let sub = self.topos.image_subobject(&pairing);
        Relation {
            dom: s.dom().clone(),
            cod: s.cod().clone(),
            sub,
        }
    }

    /// The jointly monic span tabulating `r`.
    pub fn span_of_rel(&self, r: &Relation) -> Span {
        let (_, incl) = r.sub.to_object(self.topos.index());
        let prod = self.topos.product(&r.dom, &r.cod);
        Span::new(prod.p1.after(&incl).unwrap(), prod.p2.after(&incl).unwrap()).unwrap()
    }

    // ----- operations -----

    /// `s ∘ r`: first `r: A → B`, then `s: B → C`.
    pub fn compose(&self, r: &Relation, s: &Relation) -> Result<Relation> {
        if r.cod != s.dom {
            return Err(ToposError::Mismatch("relations are not composable".into()));
        }
        let out = Relation::from_fn(&self.topos, &r.dom, &s.cod, |c, a, z| {
            (0..r.cod.size(c)).any(|b| r.holds(c, a, b) && s.holds(c, b, z))
        });
        Ok(self.class_of(&out))
    }

    pub fn converse(&self, r: &Relation) -> Relation {
        let out = Relation::from_fn(&self.topos, &r.cod, &r.dom, |c, b, a| r.holds(c, a, b));
        self.class_of(&out)
    }

    pub fn meet(&self, r: &Relation, s: &Relation) -> Result<Relation> {
        same_type(r, s)?;
        Ok(self.class_of(&Relation {
            dom: r.dom.clone(),
            cod: r.cod.clone(),
            sub: r.sub.meet(&s.sub),
        }))
    }

    pub fn join(&self, r: &Relation, s: &Relation) -> Result<Relation> {
        same_type(r, s)?;
        Ok(self.class_of(&Relation {
            dom: r.dom.clone(),
            cod: r.cod.clone(),
            sub: r.sub.join(&s.sub),
        }))
    }

    /// `ψφ ∩ χ ≤ (ψ ∩ χφ°)φ` for `φ: A → B`, `ψ: B → C`, `χ: A → C`.
    pub fn modular_law_holds(&self, psi: &Relation, phi: &Relation, chi: &Relation) -> Result<bool> {
        let lhs = self.meet(&self.compose(phi, psi)?, chi)?;
        let inner = self.meet(psi, &self.compose(&self.converse(phi), chi)?)?;
        let rhs = self.compose(phi, &inner)?;
        Ok(self.below(&lhs, &rhs))
    }

    /// `r / φ: B → C`, the largest `ψ` with `ψ ∘ φ ≤ r`, for `r: A → C` and
    /// `φ: A → B`. Computed as `∀_{g×1}(f×1)*(R)` where `(f, g)` tabulates `φ`.
    pub fn right_division(&self, r: &Relation, phi: &Relation) -> Result<Relation> {
        if r.dom != phi.dom {
            return Err(ToposError::Mismatch("division needs a common domain".into()));
        }
        let t = &self.topos;
        let r = self.class_of(r);
        let phi = self.class_of(phi);
        let tab = self.span_of_rel(&phi);
        let (f, g) = (tab.left(), tab.right());
        let id_c = Morphism::identity(&r.cod);
        let pulled = t.pullback_subobject(&t.product_map(f, &id_c), &r.sub);
        let sub = t.forall_along(&t.product_map(g, &id_c), &pulled);
        Ok(self.class_of(&Relation {
            dom: phi.cod.clone(),
            cod: r.cod.clone(),
            sub,
        }))
    }

    /// `r ∖ s: X → Y` for `r: X → A`, `s: Y → A`, defined as `s° / r°`:
    /// `x` relates to `y` when everything `x` reaches, `y` reaches.
    pub fn left_division(&self, r: &Relation, s: &Relation) -> Result<Relation> {
        self.right_division(&self.converse(s), &self.converse(r))
    }

    /// `(r | s) = (r ∖ s) ∩ (s ∖ r)°`.
    pub fn symmetric_division(&self, r: &Relation, s: &Relation) -> Result<Relation> {
        let a = self.left_division(r, s)?;
        let b = self.converse(&self.left_division(s, r)?);
        self.meet(&a, &b)
    }

    /// `∈_A` as a relation `PA → A`.
    pub fn membership(&self, a: &Object) -> Relation {
        let p = self.topos.power(a);
        Relation {
            dom: p.object.clone(),
            cod: a.clone(),
            sub: p.membership,
        }
    }

    /// `(∈|∈) = 1_{PA}` and `1_B ≤ (φ ∖ ∈)(∈ ∖ φ)` for `φ: B → A`, with the
    /// composite read left to right.
    pub fn power_laws_check(&self, a: &Object, phi: &Relation) -> Result<(bool, bool)> {
        let mem = self.membership(a);
        let ext = self.symmetric_division(&mem, &mem)? == self.class_of(&self.identity(mem.dom()));
        let up = self.left_division(phi, &mem)?;
        let down = self.left_division(&mem, phi)?;
        let total = self.below(&self.identity(phi.dom()), &self.compose(&up, &down)?);
        Ok((ext, total))
    }

    /// Total and single-valued: `Δ ≤ r° r` and `r r° ≤ Δ`.
    pub fn is_map(&self, r: &Relation) -> bool {
        let rc = self.converse(r);
        let total = self.below(&self.identity(&r.dom), &self.compose(r, &rc).unwrap());
        let single = self.below(&self.compose(&rc, r).unwrap(), &self.identity(&r.cod));
        total && single
    }

    /// All relations `A → B` in enumeration order.
    pub fn relations(&self, a: &Object, b: &Object, limit: usize) -> Result<Vec<Relation>> {
        let prod = self.topos.product(a, b).object;
        Ok(self
            .topos
            .subobjects(&prod, limit)?
            .into_iter()
            .map(|sub| Relation {
                dom: a.clone(),
                cod: b.clone(),
                sub,
            })
            .collect())
    }

    pub fn for_each_relation(&self, a: &Object, b: &Object, mut f: impl FnMut(Relation)) {
        let prod = self.topos.product(a, b).object;
        for_each_subobject(self.topos.index(), &prod, |sub| {
            f(Relation {
                dom: a.clone(),
                cod: b.clone(),
                sub,
            });
            std::ops::ControlFlow::Continue(())
        });
    }

    /// Hom-set `A → B` of the category of maps (one representative per class).
    pub fn maps(&self, a: &Object, b: &Object, limit: usize) -> Result<Vec<Relation>> {
        let mut out: Vec<Relation> = Vec::new();
        for r in self.relations(a, b, limit)? {
            let r = self.class_of(&r);
            if self.is_map(&r) && !out.contains(&r) {
                out.push(r);
            }
        }
        Ok(out)
    }
}

fn same_type(r: &Relation, s: &Relation) -> Result<()> {
    if r.dom != s.dom || r.cod != s.cod {
        return Err(ToposError::Mismatch("relations have different types".into()));
    }
    Ok(())
}

/// Brute-force `r / φ`: the union of every `ψ` with `ψ ∘ φ ≤ r`.
pub fn right_division_oracle(al: &Allegory, r: &Relation, phi: &Relation) -> Result<Relation> {
    let mut acc = al.empty(phi.cod(), r.cod());
    for psi in al.relations(phi.cod(), r.cod(), 1 << 20)? {
        if al.compose(phi, &psi)?.leq(r) {
            acc = al.join(&acc, &psi)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Topos, Allegory) {
        let t = Topos::finset();
        let al = Allegory::new(&t);
        (t, al)
    }

    #[test]
    fn relational_composition() {
        let (t, al) = setup();
        let (one, two) = (t.constant(1), t.constant(2));
        let r = Relation::from_pairs(&t, &one, &two, &[vec![(0, 0)]]).unwrap();
        let s = Relation::from_pairs(&t, &two, &one, &[vec![(0, 0), (1, 0)]]).unwrap();
        assert_eq!(al.compose(&r, &s).unwrap().pairs(0), vec![(0, 0)]);
        assert_eq!(al.compose(&al.identity(&one), &r).unwrap(), r);
        assert_eq!(al.converse(&al.converse(&s)), s);
    }

    #[test]
    fn division_example() {
        let (t, al) = setup();
        let (a, b, c) = (t.constant(2), t.constant(2), t.constant(1));
        let phi = Relation::from_pairs(&t, &a, &b, &[vec![(0, 0)]]).unwrap();
        let r = Relation::from_pairs(&t, &a, &c, &[vec![(0, 0)]]).unwrap();
        let d = al.right_division(&r, &phi).unwrap();
        assert_eq!(d.pairs(0), vec![(0, 0), (1, 0)]);
        assert_eq!(d, right_division_oracle(&al, &r, &phi).unwrap());
        let id = al.identity(&a);
        assert_eq!(al.right_division(&id, &id).unwrap(), id);
    }

    #[test]
    fn partial_relation_is_not_a_map() {
        let (t, al) = setup();
        let (two, one) = (t.constant(2), t.constant(1));
        let r = Relation::from_pairs(&t, &two, &one, &[vec![(0, 0)]]).unwrap();
        assert!(!al.is_map(&r));
        let f = t.morphism(&two, &one, vec![vec![0, 0]]).unwrap();
        assert!(al.is_map(&al.graph(&f)));
        assert_eq!(al.ungraph(&al.graph(&f)).unwrap(), f);
    }

    #[test]
    fn endospan_gives_partial_diagonal() {
        let (t, al) = setup();
        let (two, three) = (t.constant(2), t.constant(3));
        let w = t.morphism(&two, &three, vec![vec![2, 0]]).unwrap();
        let r = al.rel_of_span(&Span::diagonal(&w));
        assert_eq!(r.pairs(0), vec![(0, 0), (2, 2)]);
    }

    #[test]
    fn membership_extensionality() {
        let (t, al) = setup();
        let a = t.constant(2);
        let one = t.constant(1);
        let phi = Relation::from_pairs(&t, &one, &a, &[vec![(0, 1)]]).unwrap();
        assert_eq!(al.power_laws_check(&a, &phi).unwrap(), (true, true));
    }
}
