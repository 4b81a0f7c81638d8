//! Presheaf objects and natural transformations with explicit carriers.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Result, ToposError};
use crate::index::IndexCategory;

#[derive(Debug)]
struct ObjectData {
    sizes: Vec<usize>,
    /// Per arrow `f: d → c`, the restriction `X(c) → X(d)`.
    restrict: Vec<Vec<usize>>,
    labels: Option<Vec<Vec<String>>>,
}

/// A presheaf on a finite index category. Elements at stage `c` are `0..size(c)`.
///
/// Equality is extensional: carrier sizes and restriction tables. Labels are
/// presentation only.
#[derive(Clone)]
pub struct Object(Arc<ObjectData>);

impl PartialEq for Object {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.sizes == other.0.sizes && self.0.restrict == other.0.restrict)
    }
}

impl Eq for Object {}

impl Hash for Object {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.sizes.hash(state);
        self.0.restrict.hash(state);
    }
}

impl fmt::Debug for Object {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Object{:?}", self.0.sizes)
    }
}

impl Object {
    /// Checks functoriality against `cat` and builds the object.
    pub fn new(cat: &IndexCategory, sizes: Vec<usize>, restrict: Vec<Vec<usize>>) -> Result<Self> {
        let obj = Self::new_unchecked(sizes, restrict);
        obj.check(cat)?;
        Ok(obj)
    }

    pub(crate) fn new_unchecked(sizes: Vec<usize>, restrict: Vec<Vec<usize>>) -> Self {
        Object(Arc::new(ObjectData {
            sizes,
            restrict,
            labels: None,
        }))
    }

    pub fn with_labels(&self, labels: Vec<Vec<String>>) -> Self {
        Object(Arc::new(ObjectData {
            sizes: self.0.sizes.clone(),
            restrict: self.0.restrict.clone(),
            labels: Some(labels),
        }))
    }

    fn check(&self, cat: &IndexCategory) -> Result<()> {
        let d = &self.0;
        if d.sizes.len() != cat.num_stages() || d.restrict.len() != cat.num_arrows() {
            return Err(ToposError::Functoriality("shape does not match index".into()));
        }
        for (a, arrow) in cat.arrows().iter().enumerate() {
            let r = &d.restrict[a];
            if r.len() != d.sizes[arrow.dst] || r.iter().any(|&y| y >= d.sizes[arrow.src]) {
                return Err(ToposError::Functoriality(format!(
                    "restriction along {} has the wrong type",
                    arrow.name
                )));
            }
            if cat.is_identity(a) && r.iter().enumerate().any(|(i, &y)| i != y) {
                return Err(ToposError::Functoriality(format!(
                    "identity {} acts non-trivially",
                    arrow.name
                )));
            }
        }
        // X(g∘f) = X(f)∘X(g)
        for g in 0..cat.num_arrows() {
            for f in 0..cat.num_arrows() {
                if let Some(gf) = cat.compose(g, f) {
                    for x in 0..d.sizes[cat.arrow(g).dst] {
                        if d.restrict[gf][x] != d.restrict[f][d.restrict[g][x]] {
                            return Err(ToposError::Functoriality(format!(
                                "restriction along {} differs from {} then {}",
                                cat.arrow(gf).name,
                                cat.arrow(g).name,
                                cat.arrow(f).name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn size(&self, c: usize) -> usize {
        self.0.sizes[c]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.0.sizes
    }

    pub fn total_size(&self) -> usize {
        self.0.sizes.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total_size() == 0
    }

    pub fn num_stages(&self) -> usize {
        self.0.sizes.len()
    }

    /// Restriction of `x ∈ X(dst(a))` along arrow `a`.
    pub fn restrict(&self, a: usize, x: usize) -> usize {
        self.0.restrict[a][x]
    }

    pub fn restriction_table(&self, a: usize) -> &[usize] {
        &self.0.restrict[a]
    }

    /// Total order compatible with extensional equality.
    pub fn sort_key(&self) -> (&[usize], &[Vec<usize>]) {
        (&self.0.sizes, &self.0.restrict)
    }

    pub fn label(&self, c: usize, x: usize) -> String {
        match &self.0.labels {
            Some(l) => l[c][x].clone(),
            None => x.to_string(),
        }
    }

    pub fn find_label(&self, c: usize, name: &str) -> Option<usize> {
        match &self.0.labels {
            Some(l) => l[c].iter().position(|s| s == name),
            None => name.parse().ok().filter(|&x: &usize| x < self.size(c)),
        }
    }

    /// Flat numbering of all elements across stages.
    pub fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.num_stages() + 1);
        let mut acc = 0;
        off.push(0);
        for &s in &self.0.sizes {
            acc += s;
            off.push(acc);
        }
        off
    }
}

/// A natural transformation between presheaves, stored stage by stage.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Morphism {
    dom: Object,
    cod: Object,
    maps: Arc<Vec<Vec<usize>>>,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Morphism{:?}", self.maps)
    }
}

impl Morphism {
    /// Checks naturality against `cat`.
    pub fn new(cat: &IndexCategory, dom: Object, cod: Object, maps: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self::new_unchecked(dom, cod, maps);
        m.check(cat)?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(dom: Object, cod: Object, maps: Vec<Vec<usize>>) -> Self {
        Morphism {
            dom,
            cod,
            maps: Arc::new(maps),
        }
    }

    /// Builds a morphism from an element function `(stage, x) ↦ y`.
    pub(crate) fn from_fn(dom: &Object, cod: &Object, f: impl Fn(usize, usize) -> usize) -> Self {
        let maps = (0..dom.num_stages())
            .map(|c| (0..dom.size(c)).map(|x| f(c, x)).collect())
            .collect();
        Self::new_unchecked(dom.clone(), cod.clone(), maps)
    }

    pub fn check(&self, cat: &IndexCategory) -> Result<()> {
        if self.maps.len() != cat.num_stages() {
            return Err(ToposError::Naturality("wrong number of components".into()));
        }
        for c in 0..cat.num_stages() {
            if self.maps[c].len() != self.dom.size(c) || self.maps[c].iter().any(|&y| y >= self.cod.size(c)) {
                return Err(ToposError::Naturality(format!(
                    "component at stage {} has the wrong type",
                    cat.stage_name(c)
                )));
            }
        }
        for (a, arrow) in cat.arrows().iter().enumerate() {
            for x in 0..self.dom.size(arrow.dst) {
                let lhs = self.maps[arrow.src][self.dom.restrict(a, x)];
                let rhs = self.cod.restrict(a, self.maps[arrow.dst][x]);
                if lhs != rhs {
                    return Err(ToposError::Naturality(format!(
                        "square for {} fails at element {}",
                        arrow.name,
                        self.dom.label(arrow.dst, x)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn identity(obj: &Object) -> Self {
        Self::from_fn(obj, obj, |_, x| x)
    }

    pub fn dom(&self) -> &Object {
        &self.dom
    }

    pub fn cod(&self) -> &Object {
        &self.cod
    }

    pub fn apply(&self, c: usize, x: usize) -> usize {
        self.maps[c][x]
    }

    pub fn component(&self, c: usize) -> &[usize] {
        &self.maps[c]
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &Morphism) -> Result<Morphism> {
        if g.cod != self.dom {
            return Err(ToposError::Mismatch(
                "codomain of the first map differs from the domain of the second".into(),
            ));
        }
        Ok(Morphism::from_fn(&g.dom, &self.cod, |c, x| self.maps[c][g.maps[c][x]]))
    }

    pub fn is_mono(&self) -> bool {
        (0..self.dom.num_stages()).all(|c| {
            let mut seen = vec![false; self.cod.size(c)];
            self.maps[c].iter().all(|&y| !std::mem::replace(&mut seen[y], true))
        })
    }

    pub fn is_epi(&self) -> bool {
        (0..self.dom.num_stages()).all(|c| {
            let mut seen = vec![false; self.cod.size(c)];
            for &y in self.maps[c].iter() {
                seen[y] = true;
            }
            seen.into_iter().all(|b| b)
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_mono() && self.is_epi()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<Morphism> {
        if !self.is_iso() {
            return Err(ToposError::Precondition("morphism is not invertible".into()));
        }
        let mut maps = Vec::new();
        for c in 0..self.dom.num_stages() {
            let mut inv = vec![0; self.cod.size(c)];
            for (x, &y) in self.maps[c].iter().enumerate() {
                inv[y] = x;
            }
            maps.push(inv);
        }
        Ok(Morphism::new_unchecked(self.cod.clone(), self.dom.clone(), maps))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> Object {
        Object::new(&IndexCategory::finset(), vec![n], vec![(0..n).collect()]).unwrap()
    }

    #[test]
    fn compose_pointwise() {
        let cat = IndexCategory::finset();
        let two = set(2);
        let f = Morphism::new(&cat, two.clone(), two.clone(), vec![vec![1, 0]]).unwrap();
        let g = Morphism::new(&cat, two.clone(), two.clone(), vec![vec![0, 0]]).unwrap();
        assert_eq!(f.after(&g).unwrap().component(0), &[1, 1]);
        let id = Morphism::identity(&two);
        assert_eq!(id.after(&f).unwrap(), f);
        assert_eq!(f.after(&id).unwrap(), f);
    }

    #[test]
    fn compose_rejects_mismatch() {
        let f = Morphism::identity(&set(2));
        let g = Morphism::identity(&set(3));
        assert!(matches!(f.after(&g), Err(ToposError::Mismatch(_))));
    }

    #[test]
    fn naturality_checked_at_construction() {
        let cat = IndexCategory::sierpinski();
        let u = cat.arrow_index("u").unwrap();
        // X(0) = {a, b}, X(1) = {c} with c|u = a
        let mut restrict = vec![vec![0, 1], vec![0], vec![0]];
        restrict[u] = vec![0];
        let x = Object::new(&cat, vec![2, 1], restrict).unwrap();
        // swapping stage 0 but fixing stage 1 breaks the u-square
        let bad = Morphism::new(&cat, x.clone(), x.clone(), vec![vec![1, 0], vec![0]]);
        assert!(matches!(bad, Err(ToposError::Naturality(_))));
        assert!(Morphism::new(&cat, x.clone(), x, vec![vec![0, 1], vec![0]]).is_ok());
    }

    #[test]
    fn functoriality_checked_at_construction() {
        let cat = IndexCategory::finset();
        assert!(Object::new(&cat, vec![2], vec![vec![1, 0]]).is_err());
    }
}
