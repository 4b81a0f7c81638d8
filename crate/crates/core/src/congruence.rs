//! Compatible relations on spans generated by endospans, decided by
//! congruence-closure saturation inside a finite universe of objects.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::allegory::{Allegory, Relation};
use crate::error::Result;
use crate::object::{Morphism, Object};
use crate::span::{factorizations, kernel_pair, span_compose, span_fingerprint, vertical_iso, Span};
use crate::topos::{Topos, DEFAULT_LIMIT};

/// A finite list of objects standing in for the whole topos.
#[derive(Debug, Clone)]
pub struct ObjectUniverse {
    objects: Vec<Object>,
    names: Vec<String>,
    depth: usize,
}

impl ObjectUniverse {
    pub fn new(t: &Topos, seeds: &[(&str, Object)]) -> Self {
        let mut u = ObjectUniverse {
            objects: Vec::new(),
            names: Vec::new(),
            depth: 0,
        };
        for (name, obj) in seeds {
            u.insert(t, name, obj.clone());
        }
        u
    }

    /// Closes `seeds` under binary products, `Ω` and power objects for
    /// `depth` rounds, skipping objects with more than `max_size` elements.
    pub fn closed(t: &Topos, seeds: &[(&str, Object)], depth: usize, max_size: usize) -> Self {
        let mut u = Self::new(t, seeds);
        u.insert(t, "1", t.terminal().clone());
        u.insert(t, "Ω", t.omega().object.clone());
        for _ in 0..depth {
            let current: Vec<(String, Object)> = u.names.iter().cloned().zip(u.objects.iter().cloned()).collect();
            let mut fresh: Vec<(String, Object)> = Vec::new();
            for (i, (na, a)) in current.iter().enumerate() {
                for (nb, b) in &current[i..] {
                    if a.total_size() * b.total_size() <= max_size * max_size {
                        let p = t.product(a, b).object;
                        if p.total_size() <= max_size {
                            fresh.push((format!("{na}×{nb}"), p));
                        }
                    }
                }
                if a.total_size() <= 3 {
                    let p = t.power(a).object;
                    if p.total_size() <= max_size {
                        fresh.push((format!("P({na})"), p));
                    }
                }
            }
            for (n, o) in fresh {
                u.insert(t, &n, o);
            }
        }
        u.depth = depth;
        u
    }

    /// Adds `obj` unless an isomorphic object is present; returns its index.
    pub fn insert(&mut self, t: &Topos, name: &str, obj: Object) -> usize {
        if let Some(i) = self.find(t, &obj) {
            return i;
        }
        self.objects.push(obj);
        self.names.push(name.to_string());
        self.objects.len() - 1
    }

    /// Index of an object isomorphic to `obj`.
    pub fn find(&self, t: &Topos, obj: &Object) -> Option<usize> {
        if let Some(i) = self.objects.iter().position(|o| o == obj) {
            return Some(i);
        }
        self.objects
            .iter()
            .position(|o| o.sizes() == obj.sizes() && !t.isos(o, obj, 1).map(|v| v.is_empty()).unwrap_or(true))
    }

    /// Index of exactly this object (extensional equality).
    pub fn position(&self, obj: &Object) -> Option<usize> {
        self.objects.iter().position(|o| o == obj)
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All morphisms between universe objects, as `(i, j, f)`.
    pub fn morphisms(&self, t: &Topos, limit: usize) -> Vec<(usize, usize, Morphism)> {
        let mut out = Vec::new();
        for (i, a) in self.objects.iter().enumerate() {
            for (j, b) in self.objects.iter().enumerate() {
                if let Ok(hs) = t.homs(a, b, limit) {
                    out.extend(hs.into_iter().map(|h| (i, j, h)));
                }
            }
        }
        out
    }
}

/// Generators for a compatible relation: explicit endospans, optionally with
/// `(e, e)` for every epi `e`. Endospans of isos are always members.
#[derive(Debug, Clone)]
pub struct EndospanClass {
    name: String,
    generators: Vec<Span>,
    with_epis: bool,
}

impl EndospanClass {
    pub fn isos() -> Self {
        EndospanClass {
            name: "isos".into(),
            generators: Vec::new(),
            with_epis: false,
        }
    }

    pub fn epis() -> Self {
        EndospanClass {
            name: "epis".into(),
            generators: Vec::new(),
            with_epis: true,
        }
    }

    pub fn with_generator(mut self, s: Span) -> Self {
        assert!(s.is_endospan(), "generators must be endospans");
        self.generators.push(s);
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = name.into();
        self
    }

    /// `K(f)`: kernel pairs of every `h` with `f = g ∘ h` for `h` landing in
    /// the universe, together with all epi endospans.
    pub fn k_class(t: &Topos, f: &Morphism, universe: &ObjectUniverse) -> Self {
        let mut gens: Vec<Span> = Vec::new();
        let al = Allegory::new(t);
        let mut seen: Vec<Relation> = Vec::new();
        for (_, h) in factorizations(t, f, universe.objects()) {
            let kp = kernel_pair(t, &h);
            let rel = al.rel_of_span(&kp);
            if !seen.contains(&rel) {
                seen.push(rel);
                gens.push(kp);
            }
        }
        EndospanClass {
            name: "K(f)".into(),
            generators: gens,
            with_epis: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Span] {
        &self.generators
    }

    pub fn includes_epis(&self) -> bool {
        self.with_epis
    }

    /// Generator kernel relations, as a relation-level summary.
    pub fn generator_relations(&self, t: &Topos) -> Vec<Relation> {
        let al = Allegory::new(t);
        self.generators.iter().map(|s| al.rel_of_span(s)).collect()
    }
}

/// Outcome of a query against a bounded congruence table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    ProvedEqual,
    DistinctInUniverse,
    OutsideUniverse,
}

#[derive(Debug, Clone)]
enum Node {
    Rel(Relation),
    Span(Span),
}

/// A further closure rule applied between saturation rounds: given two
/// related relations it proposes pairs that must also be related.
pub type ExtraRule<'a> = dyn Fn(&Relation, &Relation) -> Vec<(Relation, Relation)> + 'a;

/// Endpoints and fingerprint of a span node.
type SpanKey = (usize, usize, Vec<Vec<usize>>);

/// Equivalence classes of spans between universe objects under the least
/// compatible relation containing the generators.
#[derive(Debug)]
pub struct CongruenceTable {
    topos: Topos,
    universe: ObjectUniverse,
    name: String,
    relation_mode: bool,
    nodes: Vec<Node>,
    ends: Vec<(usize, usize)>,
    homs: Vec<Vec<Vec<usize>>>,
    rel_index: HashMap<Relation, usize>,
    span_buckets: HashMap<SpanKey, Vec<usize>>,
    parent: Vec<usize>,
    memo: HashMap<(usize, usize), Option<usize>>,
    /// Composites that fell outside the universe during saturation.
    pub missing: usize,
}

impl CongruenceTable {
    /// Saturates the generated relation. With epi endospans present, spans are
    /// identified with their images and the nodes are relations.
    pub fn generate(t: &Topos, gens: &EndospanClass, universe: &ObjectUniverse) -> Result<Self> {
        Self::generate_with(t, gens, universe, None, 0)
    }

    pub fn generate_with(
        t: &Topos,
        gens: &EndospanClass,
        universe: &ObjectUniverse,
        extra: Option<&ExtraRule<'_>>,
        extra_rounds: usize,
    ) -> Result<Self> {
        let n = universe.len();
        let mut table = CongruenceTable {
            topos: t.clone(),
            universe: universe.clone(),
            name: gens.name.clone(),
            relation_mode: gens.with_epis,
            nodes: Vec::new(),
            ends: Vec::new(),
            homs: vec![vec![Vec::new(); n]; n],
            rel_index: HashMap::new(),
            span_buckets: HashMap::new(),
            parent: Vec::new(),
            memo: HashMap::new(),
            missing: 0,
        };
        table.enumerate()?;
        let mut pending: VecDeque<(usize, usize)> = VecDeque::new();
        for g in &gens.generators {
            let Some(a) = universe.position(g.dom()) else {
                table.missing += 1;
                continue;
            };
            let id = Span::identity(&universe.objects()[a]);
            match (table.lookup_span(g), table.lookup_span(&id)) {
                (Some(x), Some(y)) => pending.push_back((x, y)),
                _ => table.missing += 1,
            }
        }
        table.saturate(&mut pending);
        if let Some(rule) = extra {
            for _ in 0..extra_rounds {
                let mut found = false;
                let members: Vec<(usize, usize)> = (0..table.nodes.len())
                    .filter(|&i| table.find(i) != i)
                    .map(|i| (i, table.find(i)))
                    .collect();
                for (x, y) in members {
                    let (Node::Rel(r), Node::Rel(s)) = (&table.nodes[x], &table.nodes[y]) else {
                        continue;
                    };
                    for (r2, s2) in rule(r, s) {
                        match (table.rel_index.get(&r2), table.rel_index.get(&s2)) {
                            (Some(&a), Some(&b)) => {
                                if table.find(a) != table.find(b) {
                                    found = true;
                                    pending.push_back((a, b));
                                }
                            }
                            _ => table.missing += 1,
                        }
                    }
                }
                if !found {
                    break;
                }
                table.saturate(&mut pending);
            }
        }
        Ok(table)
    }

    fn enumerate(&mut self) -> Result<()> {
        let t = self.topos.clone();
        let al = Allegory::new(&t);
        let objs = self.universe.objects().to_vec();
        for (i, a) in objs.iter().enumerate() {
            for (j, b) in objs.iter().enumerate() {
                if self.relation_mode {
                    for r in al.relations(a, b, DEFAULT_LIMIT)? {
                        let id = self.push(Node::Rel(r.clone()), i, j);
                        self.rel_index.insert(r, id);
                    }
                } else {
                    for d in &objs {
                        let lefts = t.homs(d, a, DEFAULT_LIMIT)?;
                        let rights = t.homs(d, b, DEFAULT_LIMIT)?;
                        for l in &lefts {
                            for r in &rights {
                                let s = Span::new(l.clone(), r.clone())?;
                                if self.lookup_span(&s).is_none() {
                                    let key = (i, j, span_fingerprint(&s));
                                    let id = self.push(Node::Span(s), i, j);
                                    self.span_buckets.entry(key).or_default().push(id);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn push(&mut self, node: Node, i: usize, j: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.ends.push((i, j));
        self.homs[i][j].push(id);
        self.parent.push(id);
        id
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        // smaller id stays the representative
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }

    /// Node id of a span (by its image in relation mode, up to vertical iso
    /// otherwise).
    pub fn lookup_span(&self, s: &Span) -> Option<usize> {
        if self.relation_mode {
            let al = Allegory::new(&self.topos);
            return self.rel_index.get(&al.rel_of_span(s)).copied();
        }
        let i = self.universe.position(s.dom())?;
        let j = self.universe.position(s.cod())?;
        let bucket = self.span_buckets.get(&(i, j, span_fingerprint(s)))?;
        bucket.iter().copied().find(|&id| match &self.nodes[id] {
            Node::Span(n) => n == s || vertical_iso(&self.topos, s, n).is_some(),
            Node::Rel(_) => false,
        })
    }

    pub fn lookup_relation(&self, r: &Relation) -> Option<usize> {
        if self.relation_mode {
            self.rel_index.get(r).copied()
        } else {
            self.lookup_span(&Allegory::new(&self.topos).span_of_rel(r))
        }
    }

    fn compose_nodes(&mut self, x: usize, y: usize) -> Option<usize> {
        if let Some(&r) = self.memo.get(&(x, y)) {
            return r;
        }
        let out = match (&self.nodes[x], &self.nodes[y]) {
            (Node::Rel(r), Node::Rel(s)) => {
                let al = Allegory::new(&self.topos);
                al.compose(r, s).ok().and_then(|c| self.rel_index.get(&c).copied())
            }
            (Node::Span(r), Node::Span(s)) => span_compose(&self.topos, r, s).ok().and_then(|c| self.lookup_span(&c)),
            _ => None,
        };
        if out.is_none() {
            self.missing += 1;
        }
        self.memo.insert((x, y), out);
        out
    }

    fn saturate(&mut self, pending: &mut VecDeque<(usize, usize)>) {
        let n = self.universe.len();
        while let Some((x, y)) = pending.pop_front() {
            if !self.union(x, y) {
                continue;
            }
            let (a, b) = self.ends[x];
            for c in 0..n {
                let after: Vec<usize> = self.homs[b][c].clone();
                for t in after {
                    if let (Some(p), Some(q)) = (self.compose_nodes(x, t), self.compose_nodes(y, t)) {
                        pending.push_back((p, q));
                    }
                }
                let before: Vec<usize> = self.homs[c][a].clone();
                for t in before {
                    if let (Some(p), Some(q)) = (self.compose_nodes(t, x), self.compose_nodes(t, y)) {
                        pending.push_back((p, q));
                    }
                }
            }
        }
    }

    pub fn universe(&self) -> &ObjectUniverse {
        &self.universe
    }

    pub fn is_relation_mode(&self) -> bool {
        self.relation_mode
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn class_of(&self, node: usize) -> usize {
        self.find(node)
    }

    pub fn decide(&self, s1: &Span, s2: &Span) -> Decision {
        match (self.lookup_span(s1), self.lookup_span(s2)) {
            (Some(x), Some(y)) if self.find(x) == self.find(y) => Decision::ProvedEqual,
            (Some(_), Some(_)) => Decision::DistinctInUniverse,
            _ => Decision::OutsideUniverse,
        }
    }

    pub fn decide_relations(&self, r: &Relation, s: &Relation) -> Decision {
        match (self.lookup_relation(r), self.lookup_relation(s)) {
            (Some(x), Some(y)) if self.find(x) == self.find(y) => Decision::ProvedEqual,
            (Some(_), Some(_)) => Decision::DistinctInUniverse,
            _ => Decision::OutsideUniverse,
        }
    }

    /// Nodes of `hom(i, j)` grouped by class, classes ordered by representative.
    pub fn classes(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        for &id in &self.homs[i][j] {
            let r = self.find(id);
            match groups.iter_mut().find(|(rep, _)| *rep == r) {
                Some((_, g)) => g.push(id),
                None => groups.push((r, vec![id])),
            }
        }
        groups.sort_by_key(|(r, _)| *r);
        groups.into_iter().map(|(_, g)| g).collect()
    }

    pub fn hom_nodes(&self, i: usize, j: usize) -> &[usize] {
        &self.homs[i][j]
    }

    pub fn node_relation(&self, id: usize) -> Relation {
        match &self.nodes[id] {
            Node::Rel(r) => r.clone(),
            Node::Span(s) => Allegory::new(&self.topos).rel_of_span(s),
        }
    }

    pub fn node_span(&self, id: usize) -> Span {
        match &self.nodes[id] {
            Node::Rel(r) => Allegory::new(&self.topos).span_of_rel(r),
            Node::Span(s) => s.clone(),
        }
    }

    /// Whether related nodes stay related after composing with any node on
    /// either side. Returns the first counterexample pair if not.
    pub fn congruence_counterexample(&mut self) -> Option<(usize, usize)> {
        let n = self.universe.len();
        for x in 0..self.nodes.len() {
            let y = self.find(x);
            if x == y {
                continue;
            }
            let (a, b) = self.ends[x];
            for c in 0..n {
                for t in self.homs[b][c].clone() {
                    if let (Some(p), Some(q)) = (self.compose_nodes(x, t), self.compose_nodes(y, t)) {
                        if self.find(p) != self.find(q) {
                            return Some((x, y));
                        }
                    }
                }
                for t in self.homs[c][a].clone() {
                    if let (Some(p), Some(q)) = (self.compose_nodes(t, x), self.compose_nodes(t, y)) {
                        if self.find(p) != self.find(q) {
                            return Some((x, y));
                        }
                    }
                }
            }
        }
        None
    }

    /// Every pair identified here is identified in `other` (same universe).
    pub fn contained_in(&self, other: &CongruenceTable) -> bool {
        (0..self.nodes.len()).all(|x| {
            let y = self.find(x);
            if x == y {
                return true;
            }
            let (rx, ry) = (self.node_relation(x), self.node_relation(y));
            other.decide_relations(&rx, &ry) == Decision::ProvedEqual
        })
    }

    /// Deterministic text dump of every hom-set's classes.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let u = &self.universe;
        let _ = writeln!(
            out,
            "congruence {} over {} objects, {} nodes, mode {}",
            self.name,
            u.len(),
            self.nodes.len(),
            if self.relation_mode { "relations" } else { "spans" }
        );
        for i in 0..u.len() {
            for j in 0..u.len() {
                let classes = self.classes(i, j);
                let _ = writeln!(
                    out,
                    "hom {} -> {}: {} nodes, {} classes",
                    u.name(i),
                    u.name(j),
                    self.homs[i][j].len(),
                    classes.len()
                );
                for g in classes {
                    let rep = g[0];
                    let _ = writeln!(out, "  [{}] size {} rep {}", rep, g.len(), self.describe(rep));
                }
            }
        }
        let _ = writeln!(out, "composites outside universe: {}", self.missing);
        out
    }

    fn describe(&self, id: usize) -> String {
        match &self.nodes[id] {
            Node::Rel(r) => {
                let stages: Vec<String> = (0..r.dom().num_stages())
                    .map(|c| {
                        let ps: Vec<String> = r.pairs(c).iter().map(|(a, b)| format!("{a}{b}")).collect();
                        format!("{{{}}}", ps.join(" "))
                    })
                    .collect();
                stages.join("/")
            }
            Node::Span(s) => format!("apex {:?} fibres {:?}", s.apex().sizes(), span_fingerprint(s)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finset_universe(t: &Topos, sizes: &[usize]) -> ObjectUniverse {
        let seeds: Vec<(String, Object)> = sizes.iter().map(|&n| (n.to_string(), t.constant(n))).collect();
        let refs: Vec<(&str, Object)> = seeds.iter().map(|(n, o)| (n.as_str(), o.clone())).collect();
        ObjectUniverse::new(t, &refs)
    }

    #[test]
    fn isos_only_keeps_vertical_iso_classes() {
        let t = Topos::finset();
        let u = finset_universe(&t, &[1, 2]);
        let table = CongruenceTable::generate(&t, &EndospanClass::isos(), &u).unwrap();
        for i in 0..u.len() {
            for j in 0..u.len() {
                assert_eq!(table.classes(i, j).len(), table.hom_nodes(i, j).len());
            }
        }
    }

    #[test]
    fn epi_generated_classes_are_relations() {
        let t = Topos::finset();
        let u = finset_universe(&t, &[1, 2]);
        let table = CongruenceTable::generate(&t, &EndospanClass::epis(), &u).unwrap();
        assert_eq!(table.classes(1, 1).len(), 16);
    }

    #[test]
    fn kernel_pair_of_epi_makes_graph_invertible() {
        let t = Topos::finset();
        let u = finset_universe(&t, &[1, 2, 3]);
        let e = t.morphism(&t.constant(3), &t.constant(2), vec![vec![0, 0, 1]]).unwrap();
        let k = EndospanClass::k_class(&t, &e, &u);
        let table = CongruenceTable::generate(&t, &k, &u).unwrap();
        let al = Allegory::new(&t);
        let g = al.graph(&e);
        let back = al.converse(&g);
        let there = al.compose(&g, &back).unwrap();
        assert_eq!(
            table.decide_relations(&there, &al.identity(e.dom())),
            Decision::ProvedEqual
        );
        assert_eq!(al.compose(&back, &g).unwrap(), al.identity(e.cod()));
    }

    #[test]
    fn table_is_a_congruence() {
        let t = Topos::finset();
        let u = finset_universe(&t, &[1, 2]);
        let f = t.morphism(&t.constant(2), &t.constant(1), vec![vec![0, 0]]).unwrap();
        let mut table = CongruenceTable::generate(&t, &EndospanClass::k_class(&t, &f, &u), &u).unwrap();
        assert_eq!(table.congruence_counterexample(), None);
        let a = table.export();
        let b = CongruenceTable::generate(&t, &EndospanClass::k_class(&t, &f, &u), &u)
            .unwrap()
            .export();
        assert_eq!(a, b);
    }
}
