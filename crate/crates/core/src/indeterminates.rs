//! Adjoining indeterminate global elements by quotienting spans whose left
//! leg is a product projection.
//!
//! A class `[p, f]` with `p: S1 × … × Sn × B → B` is stored as the pair
//! `(sorts, f)`. Two representatives are identified exactly when they agree
//! after being re-expressed over one coordinate per distinct sort, repeated
//! coordinates of the same sort being merged along the diagonal.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Result, ToposError};
use crate::functor::{tuple_comparison, ToposFunctor};
use crate::object::{Morphism, Object};
use crate::topos::{decode_tuple, encode_tuple, Topos, DEFAULT_LIMIT};

/// Which projections are allowed as left legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassKind {
    /// `A^n × B → B` for one object `A`.
    Single,
    /// Projections discarding coordinates from several fixed sorts.
    Composite,
    /// All product projections.
    Pi,
}

/// An adjoined indeterminate: a name and the object it ranges over. Two
/// coordinates are the same indeterminate exactly when both agree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sort {
    pub name: String,
    pub object: Object,
}

impl Sort {
    pub fn new(name: impl Into<String>, object: &Object) -> Self {
        Sort {
            name: name.into(),
            object: object.clone(),
        }
    }
}

fn objects(sorts: &[Sort]) -> Vec<Object> {
    sorts.iter().map(|s| s.object.clone()).collect()
}

/// A representative `[p, f]`: `f: S1 × … × Sn × B → C`, products left-associated.
#[derive(Clone)]
pub struct Term {
    sorts: Vec<Sort>,
    dom: Object,
    core: Morphism,
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sorts: Vec<_> = self.sorts.iter().map(|s| &s.name).collect();
        write!(f, "Term(sorts {sorts:?}, {:?})", self.core)
    }
}

impl Term {
    pub fn new(t: &Topos, sorts: Vec<Sort>, dom: Object, core: Morphism) -> Result<Self> {
        if core.dom() != &context(t, &sorts, &dom) {
            return Err(ToposError::Mismatch("core must start at the sort context".into()));
        }
        Ok(Term { sorts, dom, core })
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        self.core.cod()
    }

    pub fn core(&self) -> &Morphism {
        &self.core
    }

    pub fn arity(&self) -> usize {
        self.sorts.len()
    }
}

/// Normal form: one coordinate per distinct sort, with the coordinates the
/// core ignores removed when the sort has a global element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTerm {
    pub sorts: Vec<Sort>,
    pub mask: Vec<bool>,
    pub core: Morphism,
}

impl CanonicalTerm {
    pub fn arity(&self) -> usize {
        self.sorts.len()
    }

    pub fn dependent(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
}

/// `S1 × … × Sn × B`.
pub fn context(t: &Topos, sorts: &[Sort], dom: &Object) -> Object {
    let mut v = objects(sorts);
    v.push(dom.clone());
    t.product_many(&v)
}

/// Map `ctx(from, dom) → ctx(to, dom)` picking, for each sort of `to`, the
/// first coordinate of `from` with that sort.
fn reindex(t: &Topos, from: &[Sort], to: &[Sort], dom: &Object) -> Result<Morphism> {
    let picks: Vec<usize> = to
        .iter()
        .map(|s| {
            from.iter()
                .position(|f| f == s)
                .ok_or_else(|| ToposError::Mismatch("sort missing from context".into()))
        })
        .collect::<Result<_>>()?;
    let mut fo = objects(from);
    fo.push(dom.clone());
    let mut tobj = objects(to);
    tobj.push(dom.clone());
    let d = t.product_many(&fo);
    let c = t.product_many(&tobj);
    Ok(Morphism::from_fn(&d, &c, |st, p| {
        let v = decode_tuple(&fo, st, p);
        let mut w: Vec<usize> = picks.iter().map(|&i| v[i]).collect();
        w.push(v[from.len()]);
        encode_tuple(&tobj, st, &w)
    }))
}

/// A category `C[x]`-style quotient of spans over a topos.
#[derive(Debug, Clone)]
pub struct IndeterminateCategory {
    topos: Topos,
    kind: ClassKind,
    sorts: Vec<Sort>,
}

impl IndeterminateCategory {
    /// Adjoin an indeterminate `x: 1 → A`.
    pub fn adjoin(t: &Topos, a: &Object) -> Self {
        Self::adjoin_named(t, Sort::new("x", a))
    }

    pub fn adjoin_named(t: &Topos, sort: Sort) -> Self {
        IndeterminateCategory {
            topos: t.clone(),
            kind: ClassKind::Single,
            sorts: vec![sort],
        }
    }

    /// The composite class `A1 ∘ A2 ∘ …`.
    pub fn composite(t: &Topos, sorts: &[Sort]) -> Self {
        let mut v: Vec<Sort> = Vec::new();
        for s in sorts {
            if !v.contains(s) {
                v.push(s.clone());
            }
        }
        IndeterminateCategory {
            topos: t.clone(),
            kind: ClassKind::Composite,
            sorts: v,
        }
    }

    /// The class of all projections. Classes are compared over the union of
    /// the sorts the two representatives mention.
    pub fn pi(t: &Topos) -> Self {
        IndeterminateCategory {
            topos: t.clone(),
            kind: ClassKind::Pi,
            sorts: Vec::new(),
        }
    }

    pub fn topos(&self) -> &Topos {
        &self.topos
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    fn check_sorts(&self, sorts: &[Sort]) -> Result<()> {
        if self.kind != ClassKind::Pi && sorts.iter().any(|s| !self.sorts.contains(s)) {
            return Err(ToposError::Mismatch("sort not adjoined to this category".into()));
        }
        Ok(())
    }

    /// Distinct sorts of `terms` plus the category's own, in canonical order.
    fn union_sorts(&self, lists: &[&[Sort]]) -> Vec<Sort> {
        let mut out: Vec<Sort> = self.sorts.clone();
        for l in lists {
            for s in l.iter() {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        }
        if self.kind == ClassKind::Pi {
            out.sort_by(|x, y| (&x.name, x.object.sort_key()).cmp(&(&y.name, y.object.sort_key())));
        }
        out
    }

    pub fn term(&self, sorts: Vec<Sort>, dom: Object, core: Morphism) -> Result<Term> {
        self.check_sorts(&sorts)?;
        Term::new(&self.topos, sorts, dom, core)
    }

    /// `[1, f]`.
    pub fn embed(&self, f: &Morphism) -> Term {
        Term {
            sorts: Vec::new(),
            dom: f.dom().clone(),
            core: f.clone(),
        }
    }

    pub fn identity(&self, b: &Object) -> Term {
        self.embed(&Morphism::identity(b))
    }

    /// `x = [!_A, 1_A]` for the `i`-th sort.
    pub fn the_x(&self, i: usize) -> Term {
        let a = self.sorts[i].clone();
        let t = &self.topos;
        let one = t.terminal().clone();
        let core = t.product(&a.object, &one).p1;
        Term {
            sorts: vec![a],
            dom: one,
            core,
        }
    }

    /// `x^n = [!_{A^n}, 1_{A^n}]` for the `i`-th sort.
    pub fn x_power(&self, i: usize, n: usize) -> Term {
        let a = self.sorts[i].clone();
        let t = &self.topos;
        let one = t.terminal().clone();
        let an = t.product_many(&vec![a.object.clone(); n]);
        let core = t.product(&an, &one).p1;
        Term {
            sorts: vec![a; n],
            dom: one,
            core,
        }
    }

    /// The core re-expressed over `all` (which must contain every sort of `u`).
    pub fn full_form(&self, u: &Term, all: &[Sort]) -> Result<Morphism> {
        let r = reindex(&self.topos, all, &u.sorts, &u.dom)?;
        u.core.after(&r)
    }

    pub fn class_equal(&self, u: &Term, v: &Term) -> bool {
        if u.dom != v.dom || u.cod() != v.cod() {
            return false;
        }
        let all = self.union_sorts(&[&u.sorts, &v.sorts]);
        match (self.full_form(u, &all), self.full_form(v, &all)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// `v ∘ u` for `u: B → C`, `v: C → D`.
    pub fn compose(&self, u: &Term, v: &Term) -> Result<Term> {
        if u.cod() != &v.dom {
            return Err(ToposError::Mismatch("classes are not composable".into()));
        }
        let t = &self.topos;
        let all = self.union_sorts(&[&u.sorts, &v.sorts]);
        let ctx_list: Vec<Object> = objects(&all).into_iter().chain([u.dom.clone()]).collect();
        let ctx = t.product_many(&ctx_list);
        let mut comps: Vec<Morphism> = v
            .sorts
            .iter()
            .map(|s| {
                let i = all.iter().position(|x| x == s).unwrap();
                t.project_many(&ctx_list, i)
            })
            .collect();
        comps.push(self.full_form(u, &all)?);
        let into_v = t.tuple(&ctx, &comps)?;
        Ok(Term {
            sorts: all,
            dom: u.dom.clone(),
            core: v.core.after(&into_v)?,
        })
    }

    /// `⟨u, v⟩: D → B × C`.
    pub fn pair(&self, u: &Term, v: &Term) -> Result<Term> {
        if u.dom != v.dom {
            return Err(ToposError::Mismatch("pairing needs a common domain".into()));
        }
        let all = self.union_sorts(&[&u.sorts, &v.sorts]);
        let core = self.topos.pair(&self.full_form(u, &all)?, &self.full_form(v, &all)?)?;
        Ok(Term {
            sorts: all,
            dom: u.dom.clone(),
            core,
        })
    }

    /// `u × v: X × X' → Y × Y'`.
    pub fn product_terms(&self, u: &Term, v: &Term) -> Result<Term> {
        let prod = self.topos.product(&u.dom, &v.dom);
        let l = self.compose(&self.embed(&prod.p1), u)?;
        let r = self.compose(&self.embed(&prod.p2), v)?;
        self.pair(&l, &r)
    }

    pub fn canonicalize(&self, u: &Term) -> Result<CanonicalTerm> {
        let t = &self.topos;
        let all = self.union_sorts(&[&u.sorts]);
        let all: Vec<Sort> = all.into_iter().filter(|s| u.sorts.contains(s)).collect();
        let f = self.full_form(u, &all)?;
        let globals: Vec<Option<Morphism>> = all
            .iter()
            .map(|s| t.global_elements(&s.object).into_iter().next())
            .collect();
        let ctx_list: Vec<Object> = objects(&all).into_iter().chain([u.dom.clone()]).collect();
        let ctx = t.product_many(&ctx_list);
        let mut mask = Vec::with_capacity(all.len());
        for (k, g) in globals.iter().enumerate() {
            let Some(g) = g else {
                mask.push(true);
                continue;
            };
            let subst = Morphism::from_fn(&ctx, &ctx, |c, p| {
                let mut v = decode_tuple(&ctx_list, c, p);
                v[k] = g.apply(c, 0);
                encode_tuple(&ctx_list, c, &v)
            });
            mask.push(f.after(&subst)? != f);
        }
        let kept: Vec<Sort> = all
            .iter()
            .zip(&mask)
            .filter(|(_, &m)| m)
            .map(|(s, _)| s.clone())
            .collect();
        let kept_list: Vec<Object> = objects(&kept).into_iter().chain([u.dom.clone()]).collect();
        let kept_ctx = t.product_many(&kept_list);
        let fill = Morphism::from_fn(&kept_ctx, &ctx, |c, p| {
            let v = decode_tuple(&kept_list, c, p);
            let mut it = v.iter();
            let mut w: Vec<usize> = all
                .iter()
                .zip(&mask)
                .enumerate()
                .map(|(k, (_, &m))| {
                    if m {
                        *it.next().unwrap()
                    } else {
                        globals[k].as_ref().unwrap().apply(c, 0)
                    }
                })
                .collect();
            w.push(v[kept.len()]);
            encode_tuple(&ctx_list, c, &w)
        });
        Ok(CanonicalTerm {
            sorts: all,
            mask,
            core: f.after(&fill)?,
        })
    }

    /// True when every adjoined sort has a global element.
    pub fn is_faithful_here(&self) -> bool {
        self.kind != ClassKind::Pi
            && self
                .sorts
                .iter()
                .all(|s| !self.topos.global_elements(&s.object).is_empty())
    }

    /// Whether `embed` is injective on `hom(B, C)` (exhaustive).
    pub fn embed_injective_on(&self, b: &Object, c: &Object) -> Result<bool> {
        let homs = self.topos.homs(b, c, DEFAULT_LIMIT)?;
        for (i, f) in homs.iter().enumerate() {
            for g in &homs[i + 1..] {
                if self.class_equal(&self.embed(f), &self.embed(g)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// One representative per class of `hom(B, C)`, over all adjoined sorts.
    pub fn hom_classes(&self, b: &Object, c: &Object, limit: usize) -> Result<Vec<Term>> {
        if self.kind == ClassKind::Pi {
            return Err(ToposError::Precondition(
                "hom-sets of the Π quotient are unbounded".into(),
            ));
        }
        let ctx = context(&self.topos, &self.sorts, b);
        Ok(self
            .topos
            .homs(&ctx, c, limit)?
            .into_iter()
            .map(|core| Term {
                sorts: self.sorts.clone(),
                dom: b.clone(),
                core,
            })
            .collect())
    }

    /// `[1, π_B] ∘ w = u` and `[1, π_C] ∘ w = v`: number of mediating classes
    /// `w: D → B × C` (exhaustive).
    pub fn mediating_count(&self, u: &Term, v: &Term) -> Result<usize> {
        let prod = self.topos.product(u.cod(), v.cod());
        let (p1, p2) = (self.embed(&prod.p1), self.embed(&prod.p2));
        let mut n = 0;
        for w in self.hom_classes(&u.dom, &prod.object, DEFAULT_LIMIT)? {
            if self.class_equal(&self.compose(&w, &p1)?, u) && self.class_equal(&self.compose(&w, &p2)?, v) {
                n += 1;
            }
        }
        Ok(n)
    }

    // ----- exponentials in the Π quotient -----

    /// `(B^A, [1, ev])`.
    pub fn exp_in_pi(&self, a: &Object, b: &Object) -> (Object, Term) {
        let e = self.topos.exponential(a, b);
        (e.object.clone(), self.embed(&e.eval))
    }

    /// Curry `u: C × A → B` to `C → B^A`.
    pub fn curry(&self, u: &Term, c_obj: &Object, a: &Object) -> Result<Term> {
        let t = &self.topos;
        let ca = t.product(c_obj, a).object;
        if u.dom != ca {
            return Err(ToposError::Mismatch("curry expects a class out of C × A".into()));
        }
        let sc_list: Vec<Object> = objects(&u.sorts).into_iter().chain([c_obj.clone()]).collect();
        let sc = t.product_many(&sc_list);
        let pair_dom = t.product(&sc, a).object;
        let ctx_list: Vec<Object> = objects(&u.sorts).into_iter().chain([ca.clone()]).collect();
        let ctx = t.product_many(&ctx_list);
        let shuffle = Morphism::from_fn(&pair_dom, &ctx, |st, p| {
            let (l, x) = (p / a.size(st), p % a.size(st));
            let mut v = decode_tuple(&sc_list, st, l);
            let cc = v.pop().unwrap();
            v.push(cc * a.size(st) + x);
            encode_tuple(&ctx_list, st, &v)
        });
        let core = t.transpose(&u.core.after(&shuffle)?, &sc, a)?;
        Ok(Term {
            sorts: u.sorts.clone(),
            dom: c_obj.clone(),
            core,
        })
    }

    /// `[1, ev] ∘ (w × 1_A)`.
    pub fn uncurry(&self, w: &Term, a: &Object, b: &Object) -> Result<Term> {
        let (_, ev) = self.exp_in_pi(a, b);
        let prod = self.product_terms(w, &self.identity(a))?;
        self.compose(&prod, &ev)
    }

    /// Substitute global elements for the sorts (one per sort of `sorts`).
    pub fn substitute(&self, u: &Term, sorts: &[Sort], elements: &[Morphism]) -> Result<Morphism> {
        let t = &self.topos;
        let all = self.union_sorts(&[sorts, &u.sorts]);
        let f = self.full_form(u, &all)?;
        let pick: Vec<&Morphism> = all
            .iter()
            .map(|s| {
                sorts
                    .iter()
                    .position(|x| x == s)
                    .map(|i| &elements[i])
                    .ok_or_else(|| ToposError::Precondition("no element supplied for a sort".into()))
            })
            .collect::<Result<_>>()?;
        let list: Vec<Object> = objects(&all).into_iter().chain([u.dom.clone()]).collect();
        let ctx = t.product_many(&list);
        let ins = Morphism::from_fn(&u.dom, &ctx, |c, b| {
            let mut v: Vec<usize> = pick.iter().map(|e| e.apply(c, 0)).collect();
            v.push(b);
            encode_tuple(&list, c, &v)
        });
        f.after(&ins)
    }
}

/// `F′[p, f] = F(f) ∘ (a^n × 1)`, extending a product-preserving `F` along `x ↦ a`.
pub struct ExtendedFunctor<'a> {
    cat: &'a IndeterminateCategory,
    func: &'a dyn ToposFunctor,
    a: Morphism,
}

impl<'a> ExtendedFunctor<'a> {
    pub fn apply(&self, u: &Term) -> Result<Morphism> {
        let target = self.func.target();
        let list: Vec<Object> = objects(&u.sorts).into_iter().chain([u.dom.clone()]).collect();
        let kappa = tuple_comparison(self.func, &list)?;
        if !kappa.is_iso() {
            return Err(ToposError::Functor("functor does not preserve this product".into()));
        }
        let fb = self.func.map_object(&u.dom)?;
        let bang = target.to_terminal(&fb);
        let mut comps: Vec<Morphism> = u.sorts.iter().map(|_| self.a.after(&bang)).collect::<Result<_>>()?;
        comps.push(Morphism::identity(&fb));
        let ins = target.tuple(&fb, &comps)?;
        let fcore = self.func.map_morphism(&u.core)?;
        fcore.after(&kappa.inverse()?)?.after(&ins)
    }

    pub fn category(&self) -> &IndeterminateCategory {
        self.cat
    }
}

/// Extends `func` to the adjoined category by sending `x` to `a: 1 → F(A)`.
pub fn extend_functor<'a>(
    cat: &'a IndeterminateCategory,
    func: &'a dyn ToposFunctor,
    a: &Morphism,
) -> Result<ExtendedFunctor<'a>> {
    if cat.kind != ClassKind::Single {
        return Err(ToposError::Precondition(
            "extension is defined for one adjoined sort".into(),
        ));
    }
    if a.cod() != &func.map_object(&cat.sorts[0].object)? || a.dom().sizes().iter().any(|&n| n != 1) {
        return Err(ToposError::Mismatch("a must be a global element of F(A)".into()));
    }
    Ok(ExtendedFunctor {
        cat,
        func,
        a: a.clone(),
    })
}

/// Result of comparing two-step adjunction with the composite class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HereditaryReport {
    pub left_classes: usize,
    pub right_classes: usize,
    pub injective: bool,
    pub surjective: bool,
    pub padding_consistent: bool,
}

impl HereditaryReport {
    pub fn holds(&self) -> bool {
        self.left_classes == self.right_classes && self.injective && self.surjective && self.padding_consistent
    }
}

/// Sends `[[1, pr]_A, [p, f]_A]_B ↦ [pr·p, f]_{A∘B}` on `hom(X, Y)` and checks
/// it is a bijection onto the composite quotient.
pub fn hereditary_iso_check(t: &Topos, a: &Object, b: &Object, x: &Object, y: &Object) -> Result<HereditaryReport> {
    let (sa, sb) = (Sort::new("x", a), Sort::new("y", b));
    let comp = IndeterminateCategory::composite(t, &[sa.clone(), sb.clone()]);
    let bx = t.product(b, x).object;
    let abx = t.product(a, &bx).object;
    let left = t.homs(&abx, y, DEFAULT_LIMIT)?;
    // (A × B) × X → A × (B × X)
    let list = [a.clone(), b.clone(), x.clone()];
    let assoc_dom = t.product_many(&list);
    let assoc = Morphism::from_fn(&assoc_dom, &abx, |c, p| {
        let v = decode_tuple(&list, c, p);
        v[0] * bx.size(c) + v[1] * x.size(c) + v[2]
    });
    let mut images: HashSet<Morphism> = HashSet::new();
    let mut injective = true;
    for f in &left {
        let img = comp.term(vec![sa.clone(), sb.clone()], x.clone(), f.after(&assoc)?)?;
        let key = comp.full_form(&img, &[sa.clone(), sb.clone()])?;
        injective &= images.insert(key);
    }
    let right_classes = comp.hom_classes(x, y, DEFAULT_LIMIT)?.len();
    // outer representatives without a B coordinate must agree with their padding
    let ax = t.product(a, x).object;
    let mut padding_consistent = true;
    for g in t.homs(&ax, y, DEFAULT_LIMIT)? {
        let short = comp.term(vec![sa.clone()], x.clone(), g.clone())?;
        let pad = Morphism::from_fn(&abx, &ax, |c, p| {
            let (av, rest) = (p / bx.size(c), p % bx.size(c));
            av * x.size(c) + rest % x.size(c)
        });
        let long = comp.term(vec![sa.clone(), sb.clone()], x.clone(), g.after(&pad)?.after(&assoc)?)?;
        padding_consistent &= comp.class_equal(&short, &long);
    }
    Ok(HereditaryReport {
        left_classes: left.len(),
        right_classes,
        injective,
        surjective: images.len() == right_classes,
        padding_consistent,
    })
}

/// Result of the chain colimit check.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ColimitReport {
    pub cocone: (usize, usize),
    pub factorization: (usize, usize),
    pub well_defined: (usize, usize),
    pub functorial: (usize, usize),
}

impl ColimitReport {
    pub fn holds(&self) -> bool {
        [self.cocone, self.factorization, self.well_defined, self.functorial]
            .iter()
            .all(|(a, b)| a == b)
    }
}

/// For the chain `C[A1] → C[A1∘A2] → …` with the sink of substitution
/// functors at `elements`, checks that `U[π, f]_Π = F_k[π, f]_k` is a
/// well-defined functor factoring the sink. `samples` are classes of the
/// first stage; `pairs` are composable sample pairs.
pub fn colimit_check(
    t: &Topos,
    chain: &[Sort],
    elements: &[Morphism],
    samples: &[Term],
    pairs: &[(Term, Term)],
) -> Result<ColimitReport> {
    let pi = IndeterminateCategory::pi(t);
    let stages: Vec<IndeterminateCategory> = (1..=chain.len())
        .map(|k| IndeterminateCategory::composite(t, &chain[..k]))
        .collect();
    let u = |term: &Term| pi.substitute(term, chain, elements);
    let mut rep = ColimitReport::default();
    for s in samples {
        for (k, st) in stages.iter().enumerate() {
            let fk = st.substitute(s, &chain[..=k], &elements[..=k])?;
            // F_{k+1} ∘ Q = F_k
            if k + 1 < stages.len() {
                let next = stages[k + 1].substitute(s, &chain[..=k + 1], &elements[..=k + 1])?;
                rep.cocone.1 += 1;
                rep.cocone.0 += usize::from(next == fk);
            }
            rep.factorization.1 += 1;
            rep.factorization.0 += usize::from(u(s)? == fk);
        }
        // a padded representative of the same class has the same image
        let padded = pi.compose(&pi.embed(&Morphism::identity(&s.dom)), s)?;
        let mut with_dummy = padded.clone();
        let extra = chain.last().unwrap().clone();
        if !with_dummy.sorts.contains(&extra) {
            let list: Vec<Sort> = with_dummy.sorts.iter().cloned().chain([extra.clone()]).collect();
            with_dummy = Term {
                core: pi.full_form(&padded, &with_dummy.sorts)?.after(&reindex(
                    t,
                    &list,
                    &with_dummy.sorts,
                    &s.dom,
                )?)?,
                sorts: list,
                dom: s.dom.clone(),
            };
        }
        rep.well_defined.1 += 1;
        rep.well_defined.0 += usize::from(pi.class_equal(s, &with_dummy) && u(s)? == u(&with_dummy)?);
    }
    for (a, b) in pairs {
        rep.functorial.1 += 1;
        let lhs = u(&pi.compose(a, b)?)?;
        let rhs = u(b)?.after(&u(a)?)?;
        rep.functorial.0 += usize::from(lhs == rhs);
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(t: &Topos, n: usize) -> Object {
        t.constant(n)
    }

    #[test]
    fn x_squared_is_the_pairing() {
        let t = Topos::finset();
        let a = fin(&t, 2);
        let cx = IndeterminateCategory::adjoin(&t, &a);
        let x = cx.the_x(0);
        assert!(cx.class_equal(&cx.x_power(0, 1), &x));
        let xx = cx.pair(&x, &x).unwrap();
        assert!(cx.class_equal(&cx.x_power(0, 2), &xx));
        let diag = t.pair(&Morphism::identity(&a), &Morphism::identity(&a)).unwrap();
        assert!(cx.class_equal(&cx.compose(&x, &cx.embed(&diag)).unwrap(), &xx));
    }

    #[test]
    fn empty_sort_collapses_hom_sets() {
        let t = Topos::finset();
        let (b, c) = (fin(&t, 2), fin(&t, 2));
        let empty = IndeterminateCategory::adjoin(&t, &fin(&t, 0));
        assert!(!empty.is_faithful_here());
        assert!(!empty.embed_injective_on(&b, &c).unwrap());
        let point = IndeterminateCategory::adjoin(&t, &fin(&t, 1));
        assert!(point.is_faithful_here());
        assert!(point.embed_injective_on(&b, &c).unwrap());
    }

    #[test]
    fn canonical_form_drops_dummies() {
        let t = Topos::finset();
        let (a, b) = (fin(&t, 2), fin(&t, 2));
        let cx = IndeterminateCategory::adjoin(&t, &a);
        let ab = t.product(&a, &b);
        // f(a, b) = a depends on the sort coordinate
        let sx = cx.sorts()[0].clone();
        let f = cx.term(vec![sx.clone()], b.clone(), ab.p1.clone()).unwrap();
        let can = cx.canonicalize(&f).unwrap();
        assert_eq!(can.mask, vec![true]);
        // g(a, b) = b does not
        let g = cx.term(vec![sx], b.clone(), ab.p2.clone()).unwrap();
        let can = cx.canonicalize(&g).unwrap();
        assert_eq!(can.mask, vec![false]);
        assert_eq!(can.core, Morphism::identity(&b));
        assert!(cx.class_equal(&g, &cx.identity(&b)));
    }

    #[test]
    fn products_are_preserved_on_a_small_case() {
        let t = Topos::finset();
        let a = fin(&t, 2);
        let cx = IndeterminateCategory::adjoin(&t, &a);
        let one = fin(&t, 1);
        let x = cx.the_x(0);
        assert_eq!(cx.mediating_count(&x, &x).unwrap(), 1);
        let u = cx.embed(&t.to_terminal(&one));
        assert_eq!(cx.mediating_count(&u, &x).unwrap(), 1);
    }

    #[test]
    fn curry_satisfies_beta() {
        let t = Topos::finset();
        let (a, b, c) = (fin(&t, 2), fin(&t, 2), fin(&t, 1));
        let s = fin(&t, 2);
        let pi = IndeterminateCategory::pi(&t);
        let ca = t.product(&c, &a).object;
        let s = Sort::new("s", &s);
        let ctx = context(&t, std::slice::from_ref(&s), &ca);
        let core = t.morphism(&ctx, &b, vec![vec![0, 1, 1, 0]]).unwrap();
        let u = pi.term(vec![s], ca, core).unwrap();
        let cur = pi.curry(&u, &c, &a).unwrap();
        assert!(pi.class_equal(&pi.uncurry(&cur, &a, &b).unwrap(), &u));
    }

    #[test]
    fn hereditary_small() {
        let t = Topos::finset();
        let rep = hereditary_iso_check(&t, &fin(&t, 2), &fin(&t, 1), &fin(&t, 1), &fin(&t, 2)).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }
}
