//! Finite index categories: the sites over which presheaves are taken.

use std::collections::HashMap;

use crate::error::{Result, ToposError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub src: usize,
    pub dst: usize,
    pub name: String,
}

/// A finite category given by an explicit composition table.
///
/// Arrow indices are stable: identities come first (arrow `c` is the
/// identity of stage `c`), followed by the declared arrows in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexCategory {
    stages: Vec<String>,
    arrows: Vec<Arrow>,
    /// `compose[g][f] = Some(g∘f)` when `dst(f) == src(g)`.
    compose: Vec<Vec<Option<usize>>>,
    into: Vec<Vec<usize>>,
}

impl IndexCategory {
    /// Builds a category from stage names, non-identity arrows `(src, dst, name)`
    /// and composition rows `(g, f, h)` meaning `g∘f = h`. Compositions with
    /// identities are implicit.
    pub fn new(
        stages: Vec<String>,
        arrows: Vec<(usize, usize, String)>,
        rows: Vec<(usize, usize, usize)>,
    ) -> Result<Self> {
        let n = stages.len();
        if n == 0 {
            return Err(ToposError::Index("no stages".into()));
        }
        let mut all: Vec<Arrow> = stages
            .iter()
            .enumerate()
            .map(|(c, s)| Arrow {
                src: c,
                dst: c,
                name: format!("id_{s}"),
            })
            .collect();
        for (src, dst, name) in arrows {
            if src >= n || dst >= n {
                return Err(ToposError::Index(format!("arrow {name} has unknown endpoint")));
            }
            all.push(Arrow { src, dst, name });
        }
        let m = all.len();
        let mut compose = vec![vec![None; m]; m];
        for g in 0..m {
            for f in 0..m {
                if all[f].dst != all[g].src {
                    continue;
                }
                if g < n {
                    compose[g][f] = Some(f);
                } else if f < n {
                    compose[g][f] = Some(g);
                }
            }
        }
        for (g, f, h) in rows {
            let (g, f, h) = (g + n, f + n, h + n);
            if g >= m || f >= m || h >= m {
                return Err(ToposError::Index("composition row names unknown arrow".into()));
            }
            if all[f].dst != all[g].src {
                return Err(ToposError::Index(format!(
                    "{}.{} is not composable",
                    all[g].name, all[f].name
                )));
            }
            if all[h].src != all[f].src || all[h].dst != all[g].dst {
                return Err(ToposError::Index(format!(
                    "{}.{} = {} has the wrong type",
                    all[g].name, all[f].name, all[h].name
                )));
            }
            compose[g][f] = Some(h);
        }
        let mut into = vec![Vec::new(); n];
        for (i, a) in all.iter().enumerate() {
            into[a.dst].push(i);
        }
        let cat = IndexCategory {
            stages,
            arrows: all,
            compose,
            into,
        };
        cat.validate()?;
        Ok(cat)
    }

    /// Variant of [`IndexCategory::new`] that refers to stages and arrows by name.
    pub fn from_names(stages: &[&str], arrows: &[(&str, &str, &str)], rows: &[(&str, &str, &str)]) -> Result<Self> {
        let stage_ix: HashMap<&str, usize> = stages.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let find_stage = |s: &str| {
            stage_ix
                .get(s)
                .copied()
                .ok_or_else(|| ToposError::Index(format!("unknown stage {s}")))
        };
        let mut arr = Vec::new();
        for (s, d, name) in arrows {
            arr.push((find_stage(s)?, find_stage(d)?, name.to_string()));
        }
        let arrow_ix: HashMap<&str, usize> = arrows.iter().enumerate().map(|(i, a)| (a.2, i)).collect();
        let find_arrow = |s: &str| {
            arrow_ix
                .get(s)
                .copied()
                .ok_or_else(|| ToposError::Index(format!("unknown arrow {s}")))
        };
        let mut r = Vec::new();
        for (g, f, h) in rows {
            r.push((find_arrow(g)?, find_arrow(f)?, find_arrow(h)?));
        }
        Self::new(stages.iter().map(|s| s.to_string()).collect(), arr, r)
    }

    /// The one-object category with only the identity: presheaves are finite sets.
    pub fn finset() -> Self {
        Self::new(vec!["*".into()], vec![], vec![]).expect("trivial category")
    }

    /// The chain `0 ≤ 1`.
    pub fn sierpinski() -> Self {
        Self::from_names(&["0", "1"], &[("0", "1", "u")], &[]).expect("chain category")
    }

    fn validate(&self) -> Result<()> {
        let m = self.arrows.len();
        for g in 0..m {
            for f in 0..m {
                if self.arrows[f].dst == self.arrows[g].src && self.compose[g][f].is_none() {
                    return Err(ToposError::Index(format!(
                        "composition {}.{} missing",
                        self.arrows[g].name, self.arrows[f].name
                    )));
                }
            }
        }
        for h in 0..m {
            for g in 0..m {
                for f in 0..m {
                    let (Some(gf), Some(hg)) = (self.compose[g][f], self.compose[h][g]) else {
                        continue;
                    };
                    if self.compose[h][gf] != self.compose[hg][f] {
                        return Err(ToposError::Index(format!(
                            "composition not associative at {}.{}.{}",
                            self.arrows[h].name, self.arrows[g].name, self.arrows[f].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_stages(&self) -> usize {
        self.stages.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn stage_name(&self, c: usize) -> &str {
        &self.stages[c]
    }

    pub fn stage_index(&self, name: &str) -> Option<usize> {
        self.stages.iter().position(|s| s == name)
    }

    pub fn arrow(&self, a: usize) -> &Arrow {
        &self.arrows[a]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    pub fn identity(&self, c: usize) -> usize {
        c
    }

    pub fn is_identity(&self, a: usize) -> bool {
        a < self.stages.len()
    }

    /// `g∘f`, or `None` when not composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g][f]
    }

    /// Arrows with codomain `c`, in index order.
    pub fn arrows_into(&self, c: usize) -> &[usize] {
        &self.into[c]
    }

    /// Arrows `d → c`.
    pub fn hom(&self, d: usize, c: usize) -> impl Iterator<Item = usize> + '_ {
        self.into[c].iter().copied().filter(move |&a| self.arrows[a].src == d)
    }

    /// True when every hom-set has at most one arrow and only identities are endo.
    pub fn is_poset(&self) -> bool {
        let n = self.num_stages();
        for d in 0..n {
            for c in 0..n {
                let k = self.hom(d, c).count();
                if k > 1 || (d == c && k != 1) {
                    return false;
                }
                if d != c && k == 1 && self.hom(c, d).count() == 1 {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sierpinski_shape() {
        let s = IndexCategory::sierpinski();
        assert_eq!(s.num_stages(), 2);
        assert_eq!(s.num_arrows(), 3);
        let u = s.arrow_index("u").unwrap();
        assert_eq!(s.compose(1, u), Some(u));
        assert_eq!(s.compose(u, 0), Some(u));
        assert_eq!(s.compose(u, u), None);
        assert_eq!(s.arrows_into(1), &[1, u]);
        assert!(s.is_poset());
    }

    #[test]
    fn missing_composite_is_rejected() {
        // a: x→y, b: y→z without b.a declared
        let err = IndexCategory::from_names(&["x", "y", "z"], &[("x", "y", "a"), ("y", "z", "b")], &[]).unwrap_err();
        assert!(matches!(err, ToposError::Index(_)));
        let ok = IndexCategory::from_names(
            &["x", "y", "z"],
            &[("x", "y", "a"), ("y", "z", "b"), ("x", "z", "c")],
            &[("b", "a", "c")],
        )
        .unwrap();
        assert!(ok.is_poset());
    }

    #[test]
    fn idempotent_monoid_is_not_poset() {
        let m = IndexCategory::from_names(&["o"], &[("o", "o", "e")], &[("e", "e", "e")]).unwrap();
        assert!(!m.is_poset());
        assert_eq!(m.compose(1, 1), Some(1));
    }
}
