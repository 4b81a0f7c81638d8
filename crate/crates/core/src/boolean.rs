//! Logical morphism classes, the Booleanization quotient and checks of its
//! reflection property on finite universes.
//!
//! A logical class is stored through the sieves that must count as covering
//! for its monos to be members: a topology `J ≤ Ω`. A mono belongs to the
//! class when it is `J`-dense and a morphism when its image does. Relations
//! are identified exactly when their `J`-closures agree, so the closure is
//! the canonical representative of a class.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::allegory::{Allegory, Relation, RelationQuotient};
use crate::congruence::{CongruenceTable, Decision, EndospanClass, ObjectUniverse};
use crate::error::{Result, ToposError};
use crate::functor::ToposFunctor;
use crate::object::{Morphism, Object};
use crate::span::{span_compose, Span};
use crate::subobject::Subobject;
use crate::topos::{Topos, DEFAULT_LIMIT};

/// Objects whose subobject lattices are searched by the `∀_g` rule.
const FORALL_RULE_MAX_SIZE: usize = 4;

/// A topology on `Ω`: per stage, which sieves cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    covers: Subobject,
}

impl Topology {
    /// The least topology containing the given sieves `(stage, sieve index)`.
    pub fn generated(t: &Topos, gens: &[(usize, usize)]) -> Self {
        let cat = t.index();
        let om = t.omega();
        let mut mem: Vec<Vec<bool>> = (0..cat.num_stages())
            .map(|c| (0..om.num_sieves(c)).map(|w| w == om.top(c)).collect())
            .collect();
        for &(c, w) in gens {
            mem[c][w] = true;
        }
        let pullback = |f: usize, w: usize| -> usize {
            let a = cat.arrow(f);
            let s = om.sieve(a.dst, w);
            let pulled: Vec<bool> = (0..cat.num_arrows())
                .map(|g| cat.arrow(g).dst == a.src && cat.compose(f, g).is_some_and(|h| s[h]))
                .collect();
            om.index_of(a.src, &pulled)
        };
        loop {
            let mut changed = false;
            for f in 0..cat.num_arrows() {
                let a = cat.arrow(f);
                for w in 0..om.num_sieves(a.dst) {
                    if mem[a.dst][w] {
                        let p = pullback(f, w);
                        if !mem[a.src][p] {
                            mem[a.src][p] = true;
                            changed = true;
                        }
                    }
                }
            }
            for c in 0..cat.num_stages() {
                for r in 0..om.num_sieves(c) {
                    if mem[c][r] {
                        continue;
                    }
                    let local = (0..om.num_sieves(c)).any(|s| {
                        mem[c][s]
                            && cat
                                .arrows_into(c)
                                .iter()
                                .filter(|&&f| om.sieve(c, s)[f])
                                .all(|&f| mem[cat.arrow(f).src][pullback(f, r)])
                    });
                    if local {
                        mem[c][r] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Topology {
            covers: Subobject::new(cat, om.object.clone(), mem).expect("topologies are pullback-stable"),
        }
    }

    /// Only maximal sieves cover.
    pub fn trivial(t: &Topos) -> Self {
        Self::generated(t, &[])
    }

    pub fn covers(&self, c: usize, sieve: usize) -> bool {
        self.covers.contains(c, sieve)
    }

    pub fn as_subobject(&self) -> &Subobject {
        &self.covers
    }

    pub fn is_trivial(&self, t: &Topos) -> bool {
        let om = t.omega();
        (0..om.object.num_stages()).all(|c| (0..om.num_sieves(c)).all(|w| self.covers(c, w) == (w == om.top(c))))
    }

    /// Covering sieves per stage, as arrow-name lists.
    pub fn describe(&self, t: &Topos) -> Vec<String> {
        let cat = t.index();
        let om = t.omega();
        (0..cat.num_stages())
            .map(|c| {
                let sieves: Vec<String> = (0..om.num_sieves(c))
                    .filter(|&w| self.covers(c, w))
                    .map(|w| {
                        let names: Vec<&str> = (0..cat.num_arrows())
                            .filter(|&f| om.sieve(c, w)[f])
                            .map(|f| cat.arrow(f).name.as_str())
                            .collect();
                        format!("{{{}}}", names.join(","))
                    })
                    .collect();
                format!("J({}) = {}", cat.stage_name(c), sieves.join(" "))
            })
            .collect()
    }

    /// `cl(S) = {x : χ_S(x) covers}`.
    pub fn closure(&self, t: &Topos, s: &Subobject) -> Subobject {
        let chi = t.char_of(s);
        let a = s.carrier();
        let mem = (0..a.num_stages())
            .map(|c| (0..a.size(c)).map(|x| self.covers(c, chi.apply(c, x))).collect())
            .collect();
        Subobject::new(t.index(), a.clone(), mem).expect("closures are subobjects")
    }

    /// `S` is dense in `F` (both subobjects of one carrier, `S ≤ F`).
    pub fn dense_in(&self, t: &Topos, s: &Subobject, f: &Subobject) -> bool {
        s.leq(f) && f.leq(&self.closure(t, s))
    }

    /// Sieves `χ_S(x)` for `x ∈ F`: what must cover for `S ≤ F` to be dense.
    fn requirements(t: &Topos, s: &Subobject, f: &Subobject) -> Vec<(usize, usize)> {
        let chi = t.char_of(s);
        let a = s.carrier();
        let mut out = Vec::new();
        for c in 0..a.num_stages() {
            for x in 0..a.size(c) {
                if f.contains(c, x) {
                    out.push((c, chi.apply(c, x)));
                }
            }
        }
        out
    }
}

/// A logical class of morphisms, finitely presented by a topology.
#[derive(Debug, Clone)]
pub struct LogicalClass {
    topos: Topos,
    topology: Topology,
    generators: Vec<(usize, usize)>,
    /// Rounds of the `∀_g` rule that added sieves.
    pub forall_rounds: usize,
}

impl LogicalClass {
    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn generators(&self) -> &[(usize, usize)] {
        &self.generators
    }

    /// `w` has a dense image.
    pub fn contains(&self, w: &Morphism) -> bool {
        let img = self.topos.image_subobject(w);
        self.topology.dense_in(&self.topos, &img, &Subobject::top(w.cod()))
    }

    /// Members among the morphisms of `universe`, as `(dom, cod, f)`.
    pub fn members(&self, universe: &ObjectUniverse) -> Vec<(usize, usize, Morphism)> {
        universe
            .morphisms(&self.topos, DEFAULT_LIMIT)
            .into_iter()
            .filter(|(_, _, f)| self.contains(f))
            .collect()
    }

    /// Member monos that are not isomorphisms, within `universe`.
    pub fn proper_monos(&self, universe: &ObjectUniverse) -> Vec<(usize, usize, Morphism)> {
        self.members(universe)
            .into_iter()
            .filter(|(_, _, f)| f.is_mono() && !f.is_iso())
            .collect()
    }
}

/// Least logical class containing `seeds`, with the `∀_g` rule enforced on
/// the subobjects of universe objects of size at most `FORALL_RULE_MAX_SIZE`.
///
/// Rule: for `M ≤ F ≤ Z` with `M` dense in `F` and `g: Z → Z'` in the
/// universe, `∀_g M ≤ ∀_g F` must be dense.
pub fn logical_closure(t: &Topos, seeds: &[Morphism], universe: &ObjectUniverse) -> Result<LogicalClass> {
    let mut gens: Vec<(usize, usize)> = Vec::new();
    for w in seeds {
        let img = t.image_subobject(w);
        gens.extend(Topology::requirements(t, &img, &Subobject::top(w.cod())));
    }
    let mut uniq: BTreeSet<(usize, usize)> = gens.into_iter().collect();
    let mut rounds = 0;
    loop {
        let gens: Vec<(usize, usize)> = uniq.iter().copied().collect();
        let j = Topology::generated(t, &gens);
        let extra = forall_rule_violations(t, &j, universe)?;
        let before = uniq.len();
        uniq.extend(extra.into_iter().filter(|&(c, w)| !j.covers(c, w)));
        if uniq.len() == before {
            return Ok(LogicalClass {
                topos: t.clone(),
                topology: j,
                generators: gens,
                forall_rounds: rounds,
            });
        }
        rounds += 1;
    }
}

fn forall_rule_violations(t: &Topos, j: &Topology, universe: &ObjectUniverse) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for z in universe.objects() {
        if z.total_size() > FORALL_RULE_MAX_SIZE {
            continue;
        }
        let subs = t.subobjects(z, DEFAULT_LIMIT)?;
        let dense_pairs: Vec<(&Subobject, &Subobject)> = subs
            .iter()
            .flat_map(|f| subs.iter().map(move |m| (m, f)))
            .filter(|(m, f)| m != f && j.dense_in(t, m, f))
            .collect();
        if dense_pairs.is_empty() {
            continue;
        }
        for z2 in universe.objects() {
            for g in t.homs(z, z2, DEFAULT_LIMIT)? {
                for (m, f) in &dense_pairs {
                    let (fm, ff) = (t.forall_along(&g, m), t.forall_along(&g, f));
                    if !j.dense_in(t, &fm, &ff) {
                        out.extend(Topology::requirements(t, &fm, &ff));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `B(T)`: the least logical class containing `b: 1+1 → Ω`.
pub fn boolean_class(t: &Topos, universe: &ObjectUniverse) -> Result<LogicalClass> {
    let (_, b) = t.one_plus_one();
    logical_closure(t, &[b], universe)
}

/// Relations modulo a logical class, canonicalized by closure.
#[derive(Debug, Clone)]
pub struct LogicalRelationHandle {
    topos: Topos,
    topology: Topology,
}

impl LogicalRelationHandle {
    pub fn new(t: &Topos, class: &LogicalClass) -> Self {
        LogicalRelationHandle {
            topos: t.clone(),
            topology: class.topology.clone(),
        }
    }
}

impl RelationQuotient for LogicalRelationHandle {
    fn canonical(&self, r: &Relation) -> Relation {
        let sub = self.topology.closure(&self.topos, r.subobject());
        Relation::from_subobject(&self.topos, r.dom(), r.cod(), sub).expect("closure keeps the carrier")
    }
}

/// `Map(Span_W(T))` restricted to a universe: objects of `T`, morphisms the
/// closed relations that are maps in the quotient allegory.
#[derive(Debug, Clone)]
pub struct BoolToposView {
    topos: Topos,
    class: LogicalClass,
    allegory: Allegory,
    universe: ObjectUniverse,
}

impl BoolToposView {
    pub fn topos(&self) -> &Topos {
        &self.topos
    }

    pub fn class(&self) -> &LogicalClass {
        &self.class
    }

    pub fn allegory(&self) -> &Allegory {
        &self.allegory
    }

    pub fn universe(&self) -> &ObjectUniverse {
        &self.universe
    }

    pub fn closure(&self, r: &Relation) -> Relation {
        self.allegory.class_of(r)
    }

    pub fn maps(&self, a: &Object, b: &Object) -> Result<Vec<Relation>> {
        self.allegory.maps(a, b, DEFAULT_LIMIT)
    }

    pub fn hom_count(&self, a: &Object, b: &Object) -> Result<usize> {
        Ok(self.maps(a, b)?.len())
    }

    /// Composite `first ; then`, closed.
    pub fn compose(&self, first: &Relation, then: &Relation) -> Result<Relation> {
        self.allegory.compose(first, then)
    }

    pub fn identity(&self, a: &Object) -> Relation {
        self.closure(&self.allegory.identity(a))
    }

    /// `η(f) = [1, f]`.
    pub fn eta(&self, f: &Morphism) -> Relation {
        self.closure(&self.allegory.graph(f))
    }

    /// A two-sided inverse in the view, if one exists.
    pub fn inverse(&self, r: &Relation) -> Result<Option<Relation>> {
        let inv = self.allegory.converse(r);
        let ok = self.allegory.is_map(r)
            && self.allegory.is_map(&inv)
            && self.compose(r, &inv)? == self.identity(r.dom())
            && self.compose(&inv, r)? == self.identity(r.cod());
        Ok(ok.then_some(inv))
    }

    /// `[1, b]` has a two-sided inverse.
    pub fn is_boolean(&self) -> Result<bool> {
        let (_, b) = self.topos.one_plus_one();
        Ok(self.inverse(&self.eta(&b))?.is_some())
    }
}

/// Builds `B(T)`, its relation quotient and the map view over `universe`.
pub fn booleanize(t: &Topos, universe: &ObjectUniverse) -> Result<BoolToposView> {
    let class = boolean_class(t, universe)?;
    let handle = LogicalRelationHandle::new(t, &class);
    Ok(BoolToposView {
        topos: t.clone(),
        allegory: Allegory::with_quotient(t, Arc::new(handle)),
        class,
        universe: universe.clone(),
    })
}

/// Evidence that `[1, b]` is invertible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanEvidence {
    /// `[b, 1] ∘ [1, b]` has apex `1+1` with identity legs (b is mono).
    pub left_inverse_by_pullback: bool,
    /// `(b, b) ∼ (1, 1)`: b is a member of the class.
    pub generator_related: bool,
    /// Closed converse is a two-sided inverse in the view.
    pub inverse_in_view: bool,
}

impl BooleanEvidence {
    pub fn holds(&self) -> bool {
        self.left_inverse_by_pullback && self.generator_related && self.inverse_in_view
    }
}

pub fn boolean_evidence(view: &BoolToposView) -> Result<BooleanEvidence> {
    let t = &view.topos;
    let (sum, b) = t.one_plus_one();
    let there = Span::of_map(&b);
    let back = Span::co_map(&b);
    let round = span_compose(t, &there, &back)?;
    let id = Morphism::identity(&sum.object);
    let left_inverse_by_pullback = round.apex().sizes() == sum.object.sizes()
        && round.left().is_iso()
        && round.left() == round.right()
        && round.left().cod() == id.cod();
    let al = &view.allegory;
    let bb = al.rel_of_span(&Span::diagonal(&b));
    let generator_related = view.closure(&bb) == view.identity(b.cod());
    Ok(BooleanEvidence {
        left_inverse_by_pullback,
        generator_related,
        inverse_in_view: view.is_boolean()?,
    })
}

/// Bounded approximation of the congruence generated by `(w, w)` for the
/// class's proper monos and `(e, e)` for epis, compared with closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSummary {
    pub relations: usize,
    pub classes: usize,
    /// Table identifications also identified by closure.
    pub sound: bool,
    /// Closure identifications the table also makes.
    pub agreeing: usize,
    pub closure_identified: usize,
}

pub fn congruence_summary(view: &BoolToposView, universe: &ObjectUniverse) -> Result<CongruenceSummary> {
    let t = &view.topos;
    let mut gens = EndospanClass::epis().named("B(T)");
    for (_, _, m) in view.class.proper_monos(universe) {
        gens = gens.with_generator(Span::diagonal(&m));
    }
    let table = CongruenceTable::generate(t, &gens, universe)?;
    let (mut relations, mut classes, mut agreeing, mut closure_identified) = (0, 0, 0, 0);
    let mut sound = true;
    for i in 0..universe.len() {
        for j in 0..universe.len() {
            let nodes = table.hom_nodes(i, j);
            relations += nodes.len();
            classes += table.classes(i, j).len();
            for &x in nodes {
                let rx = table.node_relation(x);
                let by_closure = view.closure(&rx);
                let rep = table.class_of(x);
                if rep != x {
                    sound &= view.closure(&table.node_relation(rep)) == by_closure;
                }
                if by_closure != rx {
                    closure_identified += 1;
                    if table.decide_relations(&rx, &by_closure) == Decision::ProvedEqual {
                        agreeing += 1;
                    }
                }
            }
        }
    }
    Ok(CongruenceSummary {
        relations,
        classes,
        sound,
        agreeing,
        closure_identified,
    })
}

/// Outcome counts `(passed, checked)` for each preservation property of `η`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EtaReport {
    pub identities: (usize, usize),
    pub terminal: (usize, usize),
    pub products: (usize, usize),
    pub pullbacks: (usize, usize),
    pub omega: (usize, usize),
    pub exponentials: (usize, usize),
}

impl EtaReport {
    pub fn all_pass(&self) -> bool {
        [
            self.identities,
            self.terminal,
            self.products,
            self.pullbacks,
            self.omega,
            self.exponentials,
        ]
        .iter()
        .all(|(p, n)| p == n)
    }
}

fn tally(slot: &mut (usize, usize), ok: bool) {
    slot.0 += usize::from(ok);
    slot.1 += 1;
}

/// Checks that `η` preserves identities, the terminal object, binary
/// products (mediating uniqueness in the view), pullbacks, classification of
/// subobjects and exponential hom-counts, on the given sample objects.
pub fn eta_logical_check(view: &BoolToposView, samples: &[Object], pairs: &[(Object, Object)]) -> Result<EtaReport> {
    let t = &view.topos;
    let al = &view.allegory;
    let one = t.terminal().clone();
    let mut rep = EtaReport::default();
    for a in samples {
        tally(
            &mut rep.identities,
            view.eta(&Morphism::identity(a)) == view.identity(a),
        );
        tally(&mut rep.terminal, view.hom_count(a, &one)? == 1);
    }
    for (a, b) in pairs {
        let prod = t.product(a, b);
        let (p1, p2) = (view.eta(&prod.p1), view.eta(&prod.p2));
        for d in samples {
            let us = view.maps(d, a)?;
            let vs = view.maps(d, b)?;
            let ws = view.maps(d, &prod.object)?;
            let mut ok = true;
            for u in &us {
                for v in &vs {
                    let mut n = 0;
                    for w in &ws {
                        if view.compose(w, &p1)? == *u && view.compose(w, &p2)? == *v {
                            n += 1;
                        }
                    }
                    ok &= n == 1;
                }
            }
            tally(&mut rep.products, ok);
        }
        // pullback of the two projections to 1 is the product: η keeps the square
        let (ta, tb) = (t.to_terminal(a), t.to_terminal(b));
        let pb = t.pullback(&ta, &tb)?;
        let square =
            view.compose(&view.eta(&pb.p1), &view.eta(&ta))? == view.compose(&view.eta(&pb.p2), &view.eta(&tb))?;
        tally(
            &mut rep.pullbacks,
            square && view.eta(&pb.p1) == p1_from(view, &pb, &prod)?,
        );
        // exponential transpose is a bijection on view hom-sets
        let exp = t.exponential(a, b);
        tally(
            &mut rep.exponentials,
            view.hom_count(&one, &exp.object)? == view.hom_count(a, b)?,
        );
    }
    let om = t.omega();
    let truth = view.eta(&om.truth);
    for a in samples {
        let maps = view.maps(a, &om.object)?;
        let mut named: Vec<Relation> = Vec::new();
        for phi in &maps {
            let sub = view.compose(phi, &al.converse(&truth))?;
            named.push(sub);
        }
        let distinct: BTreeSet<Vec<Vec<bool>>> = named
            .iter()
            .map(|r| {
                (0..r.dom().num_stages())
                    .map(|c| (0..r.dom().size(c)).map(|x| r.holds(c, x, 0)).collect())
                    .collect()
            })
            .collect();
        let closed_subs = t
            .subobjects(a, DEFAULT_LIMIT)?
            .into_iter()
            .filter(|s| view.class.topology.closure(t, s) == *s)
            .count();
        tally(
            &mut rep.omega,
            distinct.len() == maps.len() && maps.len() == closed_subs,
        );
        for s in t.subobjects(a, DEFAULT_LIMIT)? {
            let chi = view.eta(&t.char_of(&s));
            let pulled = view.compose(&chi, &al.converse(&truth))?;
            let expected = view.closure(&Relation::from_subobject(
                t,
                a,
                &one,
                t.pullback_subobject(&t.product(a, &one).p1, &s),
            )?);
            tally(&mut rep.omega, pulled == expected);
        }
    }
    Ok(rep)
}

fn p1_from(view: &BoolToposView, pb: &crate::topos::Pullback, prod: &crate::topos::Product) -> Result<Relation> {
    // the comparison between the pullback over 1 and the product is an iso
    let t = &view.topos;
    let cmp = t.pair(&pb.p1, &pb.p2)?;
    view.compose(&view.eta(&cmp), &view.eta(&prod.p1))
}

/// `Bool(F)` on relations: `[f, g] ↦ [Ff, Fg]`, read in the target view.
pub struct BoolFunctor<'a> {
    func: &'a dyn ToposFunctor,
    source: &'a BoolToposView,
    target: &'a BoolToposView,
}

pub fn bool_on_functor<'a>(
    func: &'a dyn ToposFunctor,
    source: &'a BoolToposView,
    target: &'a BoolToposView,
) -> Result<BoolFunctor<'a>> {
    if !func.source().same(&source.topos) || !func.target().same(&target.topos) {
        return Err(ToposError::Functor("views do not match the functor's toposes".into()));
    }
    Ok(BoolFunctor { func, source, target })
}

impl BoolFunctor<'_> {
    pub fn map_relation(&self, r: &Relation) -> Result<Relation> {
        let span = self.source.allegory.span_of_rel(r);
        let f = self.func.map_morphism(span.left())?;
        let g = self.func.map_morphism(span.right())?;
        let image = Span::new(f, g)?;
        Ok(self.target.closure(&self.target.allegory.rel_of_span(&image)))
    }

    /// `F(g) ∘ F(f)^{-1}` for the tabulation `(f, g)` of a view map.
    pub fn via_inverse(&self, r: &Relation) -> Result<Option<Morphism>> {
        let span = self.source.allegory.span_of_rel(r);
        let ff = self.func.map_morphism(span.left())?;
        if !ff.is_iso() {
            return Ok(None);
        }
        let fg = self.func.map_morphism(span.right())?;
        Ok(Some(fg.after(&ff.inverse()?)?))
    }
}

/// `(passed, checked)` for each representation property of `Bool(F)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepresentationReport {
    pub well_defined: (usize, usize),
    pub identities: (usize, usize),
    pub composition: (usize, usize),
    pub converse: (usize, usize),
    pub meet: (usize, usize),
    pub division: (usize, usize),
}

impl RepresentationReport {
    pub fn all_pass(&self) -> bool {
        [
            self.well_defined,
            self.identities,
            self.composition,
            self.converse,
            self.meet,
            self.division,
        ]
        .iter()
        .all(|(p, n)| p == n)
    }
}

/// Checks `Bool(F)` on sample relations: class-independence, identities,
/// composition, converse, meets and right division.
pub fn representation_check(bf: &BoolFunctor<'_>, samples: &[Relation]) -> Result<RepresentationReport> {
    let (sa, ta) = (&bf.source.allegory, &bf.target.allegory);
    let mut rep = RepresentationReport::default();
    let mut seen_objects: Vec<Object> = Vec::new();
    for r in samples {
        let closed = bf.source.closure(r);
        tally(&mut rep.well_defined, bf.map_relation(r)? == bf.map_relation(&closed)?);
        tally(
            &mut rep.converse,
            bf.map_relation(&sa.converse(&closed))? == ta.converse(&bf.map_relation(&closed)?),
        );
        for a in [r.dom(), r.cod()] {
            if !seen_objects.contains(a) {
                seen_objects.push(a.clone());
                let fa = bf.func.map_object(a)?;
                tally(
                    &mut rep.identities,
                    bf.map_relation(&bf.source.identity(a))? == bf.target.identity(&fa),
                );
            }
        }
    }
    for r in samples {
        for s in samples {
            if r.cod() == s.dom() {
                let lhs = bf.map_relation(&sa.compose(r, s)?)?;
                let rhs = ta.compose(&bf.map_relation(r)?, &bf.map_relation(s)?)?;
                tally(&mut rep.composition, lhs == rhs);
            }
            if r.dom() == s.dom() && r.cod() == s.cod() {
                let lhs = bf.map_relation(&sa.meet(r, s)?)?;
                let rhs = ta.meet(&bf.map_relation(r)?, &bf.map_relation(s)?)?;
                tally(&mut rep.meet, lhs == rhs);
            }
            if r.dom() == s.dom() {
                let lhs = bf.map_relation(&sa.right_division(r, s)?)?;
                let rhs = ta.right_division(&bf.map_relation(r)?, &bf.map_relation(s)?)?;
                tally(&mut rep.division, lhs == rhs);
            }
        }
    }
    Ok(rep)
}

/// Results of the reflection checks for `F: T → T'` with `T'` boolean.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReflectionReport {
    /// The target's class identifies nothing beyond images.
    pub target_class_trivial: bool,
    /// Members of `B(T)` are sent to isomorphisms.
    pub class_inverted: (usize, usize),
    /// `Bool(F) ∘ η = η' ∘ F` on universe morphisms.
    pub triangle: (usize, usize),
    /// `F(g) ∘ F(f)^{-1}` equals `Bool(F)[f, g]` on sampled view maps.
    pub uniqueness: (usize, usize),
}

impl ReflectionReport {
    pub fn all_pass(&self) -> bool {
        self.target_class_trivial
            && [self.class_inverted, self.triangle, self.uniqueness]
                .iter()
                .all(|(p, n)| p == n)
    }
}

pub fn reflection_check(
    bf: &BoolFunctor<'_>,
    morphisms: &[Morphism],
    view_maps: &[Relation],
) -> Result<ReflectionReport> {
    let tt = &bf.target.topos;
    let mut rep = ReflectionReport {
        target_class_trivial: bf.target.class.topology.is_trivial(tt),
        ..Default::default()
    };
    for h in morphisms {
        let fh = bf.func.map_morphism(h)?;
        tally(
            &mut rep.triangle,
            bf.map_relation(&bf.source.eta(h))? == bf.target.eta(&fh),
        );
        if bf.source.class.contains(h) && h.is_mono() {
            tally(&mut rep.class_inverted, fh.is_iso());
        }
    }
    for r in view_maps {
        let ok = match bf.via_inverse(r)? {
            Some(m) => bf.target.allegory.graph(&m) == bf.map_relation(r)?,
            None => false,
        };
        tally(&mut rep.uniqueness, ok);
    }
    Ok(rep)
}

/// `∀_{g×g}` of the kernel pair of `f∘g` equals the kernel pair of `f`,
/// for `f: B → A` and epi `g: C → B`.
pub fn lemma_forall_check(t: &Topos, f: &Morphism, g: &Morphism) -> Result<bool> {
    if !g.is_epi() {
        return Err(ToposError::Precondition("g must be epi".into()));
    }
    if g.cod() != f.dom() {
        return Err(ToposError::Mismatch("g must land in the domain of f".into()));
    }
    let kf = kernel_subobject(t, f)?;
    let gg = t.product_map(g, g);
    let q = t.pullback_subobject(&gg, &kf);
    let direct = kernel_subobject(t, &f.after(g)?)?;
    Ok(q == direct && t.forall_along(&gg, &q) == kf)
}

fn kernel_subobject(t: &Topos, f: &Morphism) -> Result<Subobject> {
    let kp = t.kernel_pair(f);
    Ok(t.image_subobject(&t.pair(&kp.p1, &kp.p2)?))
}

/// `[1, e]` modulo `K(e)`: decisions for `[e, 1] ∘ [1, e] ∼ 1` on the domain
/// and `[1, e] ∘ [e, 1] ∼ 1` on the codomain.
pub fn k_inverse_check(t: &Topos, e: &Morphism, universe: &ObjectUniverse) -> Result<(Decision, Decision)> {
    if !e.is_epi() {
        return Err(ToposError::Precondition("e must be epi".into()));
    }
    let table = CongruenceTable::generate(t, &EndospanClass::k_class(t, e, universe), universe)?;
    let (there, back) = (Span::of_map(e), Span::co_map(e));
    let dom_round = span_compose(t, &there, &back)?;
    let cod_round = span_compose(t, &back, &there)?;
    Ok((
        table.decide(&dom_round, &Span::identity(e.dom())),
        table.decide(&cod_round, &Span::identity(e.cod())),
    ))
}

/// Bounded `L(f)`: the relation-mode congruence generated by `K(f)` and
/// closed under the `∀_{a×1}` rule for `rounds` rounds.
pub fn bounded_l(t: &Topos, f: &Morphism, universe: &ObjectUniverse, rounds: usize) -> Result<CongruenceTable> {
    let gens = EndospanClass::k_class(t, f, universe);
    let objects = universe.objects().to_vec();
    let rule = move |r: &Relation, s: &Relation| -> Vec<(Relation, Relation)> {
        let mut out = Vec::new();
        for b in &objects {
            let Ok(homs) = t.homs(r.dom(), b, DEFAULT_LIMIT) else {
                continue;
            };
            for a in homs {
                let a1 = t.product_map(&a, &Morphism::identity(r.cod()));
                let push = |x: &Relation| {
                    Relation::from_subobject(t, b, x.cod(), t.forall_along(&a1, x.subobject())).expect("typed")
                };
                out.push((push(r), push(s)));
            }
        }
        out
    };
    CongruenceTable::generate_with(t, &gens, universe, Some(&rule), rounds)
}

/// For `f = g∘h` with `h` epi: bounded `L(g) ⊆` bounded `L(f)`.
pub fn corollary_lg_lf_check(
    t: &Topos,
    g: &Morphism,
    h: &Morphism,
    universe: &ObjectUniverse,
    rounds: usize,
) -> Result<bool> {
    if !h.is_epi() {
        return Err(ToposError::Precondition("h must be epi".into()));
    }
    let f = g.after(h)?;
    let lg = bounded_l(t, g, universe, rounds)?;
    let lf = bounded_l(t, &f, universe, rounds)?;
    Ok(lg.contained_in(&lf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functor::{IdentityFunctor, SliceFunctor};

    fn small_universe(t: &Topos) -> ObjectUniverse {
        let (sum, _) = t.one_plus_one();
        ObjectUniverse::new(
            t,
            &[
                ("1", t.terminal().clone()),
                ("1+1", sum.object.clone()),
                ("Ω", t.omega().object.clone()),
            ],
        )
    }

    #[test]
    fn finset_class_is_trivial() {
        let t = Topos::finset();
        let u = small_universe(&t);
        let class = boolean_class(&t, &u).unwrap();
        assert!(class.topology().is_trivial(&t));
        assert!(class.proper_monos(&u).is_empty());
    }

    #[test]
    fn sierpinski_class_is_the_dense_topology() {
        let t = Topos::sierpinski();
        let u = small_universe(&t);
        let class = boolean_class(&t, &u).unwrap();
        let j = class.topology();
        let om = t.omega();
        assert_eq!((0..om.num_sieves(0)).filter(|&w| j.covers(0, w)).count(), 1);
        assert_eq!((0..om.num_sieves(1)).filter(|&w| j.covers(1, w)).count(), 2);
        assert!(!class.proper_monos(&u).is_empty());
    }

    #[test]
    fn booleanize_sierpinski_inverts_b() {
        let t = Topos::sierpinski();
        let u = small_universe(&t);
        let view = booleanize(&t, &u).unwrap();
        let ev = boolean_evidence(&view).unwrap();
        assert!(ev.holds(), "{ev:?}");
        // sheaves for the dense topology are determined by stage 0
        let y1 = t.representable(1).clone();
        let om = t.omega().object.clone();
        assert_eq!(view.hom_count(&y1, &om).unwrap(), 2);
        for a in u.objects() {
            for b in u.objects() {
                let expected = b.size(0).pow(a.size(0) as u32);
                assert_eq!(
                    view.hom_count(a, b).unwrap(),
                    expected,
                    "{:?} -> {:?}",
                    a.sizes(),
                    b.sizes()
                );
            }
        }
    }

    #[test]
    fn finset_view_counts_functions() {
        let t = Topos::finset();
        let u = small_universe(&t);
        let view = booleanize(&t, &u).unwrap();
        for (a, b) in [(2, 3), (3, 2), (0, 2), (2, 0)] {
            let (a, b) = (t.constant(a), t.constant(b));
            assert_eq!(view.hom_count(&a, &b).unwrap(), t.count_homs(&a, &b));
        }
        assert!(boolean_evidence(&view).unwrap().holds());
    }

    #[test]
    fn eta_is_logical_on_sierpinski() {
        let t = Topos::sierpinski();
        let u = small_universe(&t);
        let view = booleanize(&t, &u).unwrap();
        let y1 = t.representable(1).clone();
        let samples = vec![t.terminal().clone(), y1.clone(), t.omega().object.clone()];
        let pairs = vec![(y1.clone(), t.terminal().clone()), (y1.clone(), y1)];
        let rep = eta_logical_check(&view, &samples, &pairs).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn stage_zero_slice_reflects() {
        let t = Topos::sierpinski();
        let u = small_universe(&t);
        let view = booleanize(&t, &u).unwrap();
        let func = SliceFunctor::new(&t, t.representable(0)).unwrap();
        let tt = func.target().clone();
        let tu = small_universe(&tt);
        let tview = booleanize(&tt, &tu).unwrap();
        let bf = bool_on_functor(&func, &view, &tview).unwrap();
        let om = t.omega().object.clone();
        let samples: Vec<Relation> = view.allegory().relations(&om, &om, DEFAULT_LIMIT).unwrap();
        let rep = representation_check(&bf, &samples[..samples.len().min(12)]).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
        let morphisms: Vec<Morphism> = u.morphisms(&t, 200).into_iter().map(|(_, _, f)| f).collect();
        let maps = view.maps(&om, &om).unwrap();
        let refl = reflection_check(&bf, &morphisms, &maps).unwrap();
        assert!(refl.all_pass(), "{refl:?}");
    }

    #[test]
    fn identity_into_non_boolean_target_is_flagged() {
        let t = Topos::sierpinski();
        let u = small_universe(&t);
        let view = booleanize(&t, &u).unwrap();
        let func = IdentityFunctor::new(&t);
        let bf = bool_on_functor(&func, &view, &view).unwrap();
        let refl = reflection_check(&bf, &[], &[]).unwrap();
        assert!(!refl.target_class_trivial);
        assert!(!refl.all_pass());
    }

    #[test]
    fn forall_check_rejects_non_epi() {
        let t = Topos::finset();
        let (b, a) = (t.constant(2), t.constant(3));
        let g = t.morphism(&b, &a, vec![vec![0, 1]]).unwrap();
        let f = Morphism::identity(&a);
        assert!(matches!(
            lemma_forall_check(&t, &f, &g),
            Err(ToposError::Precondition(_))
        ));
    }

    #[test]
    fn l_containment_on_finset() {
        let t = Topos::finset();
        let (c, b, a) = (t.constant(3), t.constant(2), t.constant(1));
        let h = t.morphism(&c, &b, vec![vec![0, 1, 1]]).unwrap();
        let g = t.morphism(&b, &a, vec![vec![0, 0]]).unwrap();
        let u = ObjectUniverse::new(&t, &[("1", a.clone()), ("2", b.clone()), ("3", c.clone())]);
        assert!(corollary_lg_lf_check(&t, &g, &h, &u, 2).unwrap());
    }

    #[test]
    fn forall_check_on_small_instance() {
        let t = Topos::finset();
        let (c, b, a) = (t.constant(4), t.constant(3), t.constant(2));
        let g = t.morphism(&c, &b, vec![vec![0, 1, 2, 2]]).unwrap();
        let f = t.morphism(&b, &a, vec![vec![0, 0, 1]]).unwrap();
        assert!(lemma_forall_check(&t, &f, &g).unwrap());
        assert!(lemma_forall_check(&t, &g, &Morphism::identity(&c)).unwrap());
    }
}
