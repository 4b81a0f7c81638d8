//! Functors between finite toposes and a validation pass for logical ones.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Result, ToposError};
use crate::index::IndexCategory;
use crate::object::{Morphism, Object};
use crate::topos::Topos;

pub trait ToposFunctor: Send + Sync {
    fn name(&self) -> &str;
    fn source(&self) -> &Topos;
    fn target(&self) -> &Topos;
    fn map_object(&self, a: &Object) -> Result<Object>;
    fn map_morphism(&self, f: &Morphism) -> Result<Morphism>;
}

impl fmt::Debug for dyn ToposFunctor + '_ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functor({})", self.name())
    }
}

#[derive(Debug, Clone)]
pub struct IdentityFunctor {
    topos: Topos,
}

impl IdentityFunctor {
    pub fn new(t: &Topos) -> Self {
        IdentityFunctor { topos: t.clone() }
    }
}

impl ToposFunctor for IdentityFunctor {
    fn name(&self) -> &str {
        "identity"
    }

    fn source(&self) -> &Topos {
        &self.topos
    }

    fn target(&self) -> &Topos {
        &self.topos
    }

    fn map_object(&self, a: &Object) -> Result<Object> {
        Ok(a.clone())
    }

    fn map_morphism(&self, f: &Morphism) -> Result<Morphism> {
        Ok(f.clone())
    }
}

/// `A ↦ A × X → X`, presented as presheaves on the category of elements of `X`.
#[derive(Debug, Clone)]
pub struct SliceFunctor {
    name: String,
    source: Topos,
    target: Topos,
    /// Per element stage of `el(X)`, the base stage.
    base_stage: Vec<usize>,
    /// Per arrow of `el(X)`, the base arrow.
    base_arrow: Vec<usize>,
}

impl SliceFunctor {
    pub fn new(t: &Topos, x: &Object) -> Result<Self> {
        let cat = t.index();
        let mut stage_names = Vec::new();
        let mut base_stage = Vec::new();
        let mut stage_of: HashMap<(usize, usize), usize> = HashMap::new();
        for c in 0..cat.num_stages() {
            for e in 0..x.size(c) {
                stage_of.insert((c, e), stage_names.len());
                stage_names.push(format!("{}:{}", cat.stage_name(c), x.label(c, e)));
                base_stage.push(c);
            }
        }
        if stage_names.is_empty() {
            return Err(ToposError::Functor("slice over an empty object".into()));
        }
        let n = stage_names.len();
        // el(X) arrow (f, e): (d, X(f)e) → (c, e) for each non-identity f: d → c
        let mut arrows = Vec::new();
        let mut arrow_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut base_arrow: Vec<usize> = base_stage.clone();
        for (f, arrow) in cat.arrows().iter().enumerate() {
            if cat.is_identity(f) {
                continue;
            }
            for e in 0..x.size(arrow.dst) {
                let src = stage_of[&(arrow.src, x.restrict(f, e))];
                let dst = stage_of[&(arrow.dst, e)];
                arrow_of.insert((f, e), arrows.len());
                arrows.push((src, dst, format!("{}@{}", arrow.name, x.label(arrow.dst, e))));
                base_arrow.push(f);
            }
        }
        let mut rows = Vec::new();
        for (&(g, e), &gi) in &arrow_of {
            for f in 0..cat.num_arrows() {
                if cat.is_identity(f) {
                    continue;
                }
                let Some(h) = cat.compose(g, f) else { continue };
                let e_mid = x.restrict(g, e);
                let Some(&fi) = arrow_of.get(&(f, e_mid)) else { continue };
                if cat.is_identity(h) {
                    return Err(ToposError::Functor(
                        "slices over sites with non-trivial isomorphisms are not supported".into(),
                    ));
                }
                rows.push((gi, fi, arrow_of[&(h, e)]));
            }
        }
        rows.sort_unstable();
        let el = IndexCategory::new(stage_names, arrows, rows)?;
        debug_assert_eq!(el.num_stages(), n);
        let target = Topos::new(format!("{}/X", t.name()), el);
        Ok(SliceFunctor {
            name: format!("slice over {:?}", x.sizes()),
            source: t.clone(),
            target,
            base_stage,
            base_arrow,
        })
    }
}

impl ToposFunctor for SliceFunctor {
    fn name(&self) -> &str {
        &self.name
    }

    fn source(&self) -> &Topos {
        &self.source
    }

    fn target(&self) -> &Topos {
        &self.target
    }

    fn map_object(&self, a: &Object) -> Result<Object> {
        let sizes = self.base_stage.iter().map(|&c| a.size(c)).collect();
        let restrict = self
            .base_arrow
            .iter()
            .map(|&f| a.restriction_table(f).to_vec())
            .collect();
        let labels = self
            .base_stage
            .iter()
            .map(|&c| (0..a.size(c)).map(|x| a.label(c, x)).collect())
            .collect();
        Ok(self.target.object(sizes, restrict)?.with_labels(labels))
    }

    fn map_morphism(&self, f: &Morphism) -> Result<Morphism> {
        let dom = self.map_object(f.dom())?;
        let cod = self.map_object(f.cod())?;
        let maps = self.base_stage.iter().map(|&c| f.component(c).to_vec()).collect();
        self.target.morphism(&dom, &cod, maps)
    }
}

/// Explicit object and morphism tables; anything else is rejected.
#[derive(Debug, Clone)]
pub struct TableFunctor {
    name: String,
    source: Topos,
    target: Topos,
    objects: Vec<(Object, Object)>,
    morphisms: Vec<(Morphism, Morphism)>,
}

impl TableFunctor {
    pub fn new(name: &str, source: &Topos, target: &Topos) -> Self {
        TableFunctor {
            name: name.into(),
            source: source.clone(),
            target: target.clone(),
            objects: Vec::new(),
            morphisms: Vec::new(),
        }
    }

    pub fn map_object_to(&mut self, a: Object, b: Object) {
        self.objects.push((a, b));
    }

    pub fn map_morphism_to(&mut self, f: Morphism, g: Morphism) {
        self.morphisms.push((f, g));
    }
}

impl ToposFunctor for TableFunctor {
    fn name(&self) -> &str {
        &self.name
    }

    fn source(&self) -> &Topos {
        &self.source
    }

    fn target(&self) -> &Topos {
        &self.target
    }

    fn map_object(&self, a: &Object) -> Result<Object> {
        self.objects
            .iter()
            .find(|(x, _)| x == a)
            .map(|(_, y)| y.clone())
            .ok_or_else(|| ToposError::Functor(format!("no image recorded for object {:?}", a.sizes())))
    }

    fn map_morphism(&self, f: &Morphism) -> Result<Morphism> {
        if let Some((_, g)) = self.morphisms.iter().find(|(x, _)| x == f) {
            return Ok(g.clone());
        }
        if f == &Morphism::identity(f.dom()) {
            return Ok(Morphism::identity(&self.map_object(f.dom())?));
        }
        Err(ToposError::Functor("no image recorded for morphism".into()))
    }
}

/// `⟨F π1, F π2⟩: F(A × B) → F(A) × F(B)`.
pub fn product_comparison(func: &dyn ToposFunctor, a: &Object, b: &Object) -> Result<Morphism> {
    let prod = func.source().product(a, b);
    let fp1 = func.map_morphism(&prod.p1)?;
    let fp2 = func.map_morphism(&prod.p2)?;
    func.target().pair(&fp1, &fp2)
}

/// Comparison `F(A1 × … × An) → F(A1) × … × F(An)` for left-associated products.
pub fn tuple_comparison(func: &dyn ToposFunctor, objs: &[Object]) -> Result<Morphism> {
    let src = func.source();
    let dom = func.map_object(&src.product_many(objs))?;
    let projs: Vec<Morphism> = (0..objs.len())
        .map(|i| func.map_morphism(&src.project_many(objs, i)))
        .collect::<Result<_>>()?;
    func.target().tuple(&dom, &projs)
}

/// One line per preserved structure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogicalReport {
    pub terminal: bool,
    pub products: (usize, usize),
    pub pullbacks: (usize, usize),
    pub omega: bool,
    pub exponentials: (usize, usize),
}

impl LogicalReport {
    pub fn all_pass(&self) -> bool {
        self.terminal
            && self.omega
            && self.products.0 == self.products.1
            && self.pullbacks.0 == self.pullbacks.1
            && self.exponentials.0 == self.exponentials.1
    }
}

/// Checks that `func` preserves 1, products, pullbacks, `Ω` and exponentials
/// on the sample objects. Counts are `(passed, checked)`.
pub fn validate_logical(func: &dyn ToposFunctor, samples: &[Object]) -> Result<LogicalReport> {
    let (s, t) = (func.source(), func.target());
    let mut rep = LogicalReport {
        terminal: func.map_object(s.terminal())?.sizes().iter().all(|&n| n == 1),
        ..Default::default()
    };
    for a in samples {
        for b in samples {
            rep.products.1 += 1;
            if product_comparison(func, a, b)?.is_iso() {
                rep.products.0 += 1;
            }
        }
    }
    // pullbacks of the unique maps to 1 and of diagonal pairs
    for a in samples {
        for b in samples {
            let pb = s.pullback(&s.to_terminal(a), &s.to_terminal(b))?;
            let fa = func.map_morphism(&s.to_terminal(a))?;
            let fb = func.map_morphism(&s.to_terminal(b))?;
            let tp = t.pullback(&fa, &fb)?;
            let cmp = pullback_comparison(t, &func.map_morphism(&pb.p1)?, &func.map_morphism(&pb.p2)?, &tp);
            rep.pullbacks.1 += 1;
            if cmp.map(|m| m.is_iso()).unwrap_or(false) {
                rep.pullbacks.0 += 1;
            }
        }
    }
    let om = s.omega();
    let ftrue = func.map_morphism(&om.truth)?;
    let one_iso = t.homs(t.terminal(), ftrue.dom(), 2)?;
    rep.omega = match one_iso.as_slice() {
        [u] if u.is_iso() => {
            let chi = t.classify(&ftrue.after(u)?);
            chi.is_iso()
        }
        _ => false,
    };
    for a in samples.iter().filter(|o| o.total_size() <= 3) {
        for b in samples.iter().filter(|o| o.total_size() <= 3) {
            rep.exponentials.1 += 1;
            if exponential_preserved(func, a, b).unwrap_or(false) {
                rep.exponentials.0 += 1;
            }
        }
    }
    Ok(rep)
}

fn pullback_comparison(t: &Topos, q1: &Morphism, q2: &Morphism, pb: &crate::topos::Pullback) -> Result<Morphism> {
    let pair = t.pair(q1, q2)?;
    let legs = t.pair(&pb.p1, &pb.p2)?;
    // factor the pairing through the pullback's inclusion
    let mut maps = Vec::new();
    for c in 0..q1.dom().num_stages() {
        let mut row = Vec::new();
        for x in 0..q1.dom().size(c) {
            let target = pair.apply(c, x);
            let y = (0..pb.object.size(c))
                .find(|&y| legs.apply(c, y) == target)
                .ok_or_else(|| ToposError::Functor("cone does not factor through pullback".into()))?;
            row.push(y);
        }
        maps.push(row);
    }
    t.morphism(q1.dom(), &pb.object, maps)
}

fn exponential_preserved(func: &dyn ToposFunctor, a: &Object, b: &Object) -> Result<bool> {
    let (s, t) = (func.source(), func.target());
    let exp = s.exponential(a, b);
    let fev = func.map_morphism(&exp.eval)?;
    let cmp = product_comparison(func, &exp.object, a)?;
    let fe = func.map_object(&exp.object)?;
    let fa = func.map_object(a)?;
    let ev_over_product = fev.after(&cmp.inverse()?)?;
    let tr = t.transpose(&ev_over_product, &fe, &fa)?;
    Ok(tr.is_iso())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slice_over_stage_zero_point_is_evaluation() {
        let t = Topos::sierpinski();
        let x = t.representable(0).clone();
        assert_eq!(x.sizes(), &[1, 0]);
        let f = SliceFunctor::new(&t, &x).unwrap();
        assert_eq!(f.target().index().num_stages(), 1);
        let om = f.map_object(&t.omega().object).unwrap();
        assert_eq!(om.sizes(), &[2]);
        let samples = vec![t.terminal().clone(), t.omega().object.clone(), x.clone()];
        let rep = validate_logical(&f, &samples).unwrap();
        assert!(rep.all_pass(), "{rep:?}");
    }

    #[test]
    fn identity_is_logical() {
        let t = Topos::sierpinski();
        let f = IdentityFunctor::new(&t);
        let samples = vec![t.representable(0).clone(), t.representable(1).clone()];
        assert!(validate_logical(&f, &samples).unwrap().all_pass());
    }

    #[test]
    fn slice_over_terminal_is_equivalence() {
        let t = Topos::sierpinski();
        let f = SliceFunctor::new(&t, t.terminal()).unwrap();
        assert_eq!(f.target().index().num_stages(), 2);
        assert_eq!(f.target().omega().object.sizes(), &[2, 3]);
    }
}
