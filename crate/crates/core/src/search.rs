//! Backtracking enumeration of natural transformations.
//!
//! Assigning `φ_c(x) = y` forces `φ_d(X(a)x) = Y(a)y` for every arrow
//! `a: d → c`; forced values are propagated eagerly, so a complete
//! assignment is always natural.

use std::ops::ControlFlow;

use crate::index::IndexCategory;
use crate::object::{Morphism, Object};

type Allowed<'a> = dyn Fn(usize, usize, usize) -> bool + 'a;

pub struct HomSearch<'a> {
    cat: &'a IndexCategory,
    dom: &'a Object,
    cod: &'a Object,
    injective: bool,
    allowed: Option<&'a Allowed<'a>>,
}

struct State {
    assign: Vec<Vec<Option<usize>>>,
    used: Vec<Vec<bool>>,
    trail: Vec<(usize, usize)>,
}

impl<'a> HomSearch<'a> {
    pub fn new(cat: &'a IndexCategory, dom: &'a Object, cod: &'a Object) -> Self {
        HomSearch {
            cat,
            dom,
            cod,
            injective: false,
            allowed: None,
        }
    }

    /// Restrict to stage-wise injective maps.
    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Only allow `φ_c(x) = y` when `allowed(c, x, y)`.
    pub fn allowed(mut self, f: &'a Allowed<'a>) -> Self {
        self.allowed = Some(f);
        self
    }

    fn order(&self) -> Vec<(usize, usize)> {
        let mut stages: Vec<usize> = (0..self.cat.num_stages()).collect();
        stages.sort_by_key(|&c| std::cmp::Reverse(self.cat.arrows_into(c).len()));
        stages
            .into_iter()
            .flat_map(|c| (0..self.dom.size(c)).map(move |x| (c, x)))
            .collect()
    }

    fn try_assign(&self, st: &mut State, c: usize, x: usize, y: usize) -> bool {
        let mut stack = vec![(c, x, y)];
        while let Some((c, x, y)) = stack.pop() {
            match st.assign[c][x] {
                Some(v) if v == y => continue,
                Some(_) => return false,
                None => {}
            }
            if let Some(ok) = self.allowed {
                if !ok(c, x, y) {
                    return false;
                }
            }
            if self.injective {
                if st.used[c][y] {
                    return false;
                }
                st.used[c][y] = true;
            }
            st.assign[c][x] = Some(y);
            st.trail.push((c, x));
            for &a in self.cat.arrows_into(c) {
                if self.cat.is_identity(a) {
                    continue;
                }
                let d = self.cat.arrow(a).src;
                stack.push((d, self.dom.restrict(a, x), self.cod.restrict(a, y)));
            }
        }
        true
    }

    fn undo(&self, st: &mut State, mark: usize) {
        while st.trail.len() > mark {
            let (c, x) = st.trail.pop().unwrap();
            if self.injective {
                let y = st.assign[c][x].unwrap();
                st.used[c][y] = false;
            }
            st.assign[c][x] = None;
        }
    }

    /// Visits every matching morphism's components; stop early with `Break`.
    pub fn for_each(&self, mut visit: impl FnMut(&[Vec<usize>]) -> ControlFlow<()>) {
        let n = self.cat.num_stages();
        let mut st = State {
            assign: (0..n).map(|c| vec![None; self.dom.size(c)]).collect(),
            used: (0..n).map(|c| vec![false; self.cod.size(c)]).collect(),
            trail: Vec::new(),
        };
        let order = self.order();
        let mut out: Vec<Vec<usize>> = (0..n).map(|c| vec![0; self.dom.size(c)]).collect();
        let _ = self.rec(&mut st, &order, 0, &mut out, &mut visit);
    }

    fn rec(
        &self,
        st: &mut State,
        order: &[(usize, usize)],
        mut i: usize,
        out: &mut Vec<Vec<usize>>,
        visit: &mut impl FnMut(&[Vec<usize>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        while i < order.len() && st.assign[order[i].0][order[i].1].is_some() {
            i += 1;
        }
        if i == order.len() {
            for (c, row) in out.iter_mut().enumerate() {
                for (x, slot) in row.iter_mut().enumerate() {
                    *slot = st.assign[c][x].unwrap();
                }
            }
            return visit(out);
        }
        let (c, x) = order[i];
        for y in 0..self.cod.size(c) {
            let mark = st.trail.len();
            if self.try_assign(st, c, x, y) {
                self.rec(st, order, i + 1, out, visit)?;
            }
            self.undo(st, mark);
        }
        ControlFlow::Continue(())
    }

    pub fn collect(&self, limit: usize) -> Option<Vec<Morphism>> {
        let mut res = Vec::new();
        let mut over = false;
        self.for_each(|maps| {
            if res.len() == limit {
                over = true;
                return ControlFlow::Break(());
            }
            res.push(Morphism::new_unchecked(
                self.dom.clone(),
                self.cod.clone(),
                maps.to_vec(),
            ));
            ControlFlow::Continue(())
        });
        (!over).then_some(res)
    }

    pub fn first(&self) -> Option<Morphism> {
        let mut res = None;
        self.for_each(|maps| {
            res = Some(Morphism::new_unchecked(
                self.dom.clone(),
                self.cod.clone(),
                maps.to_vec(),
            ));
            ControlFlow::Break(())
        });
        res
    }

    pub fn count(&self) -> usize {
        let mut n = 0;
        self.for_each(|_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize) -> Object {
        Object::new(&IndexCategory::finset(), vec![n], vec![(0..n).collect()]).unwrap()
    }

    #[test]
    fn counts_functions_and_injections() {
        let cat = IndexCategory::finset();
        let (a, b) = (set(2), set(3));
        assert_eq!(HomSearch::new(&cat, &a, &b).count(), 9);
        assert_eq!(HomSearch::new(&cat, &a, &b).injective().count(), 6);
        assert_eq!(HomSearch::new(&cat, &set(0), &b).count(), 1);
        assert_eq!(HomSearch::new(&cat, &a, &set(0)).count(), 0);
    }

    #[test]
    fn sierpinski_homs_are_natural() {
        let cat = IndexCategory::sierpinski();
        let u = cat.arrow_index("u").unwrap();
        // X: X(1) = {p, q}, X(0) = {r, s}, restriction p,q ↦ r
        let mut r = vec![vec![0, 1], vec![0, 1], vec![]];
        r[u] = vec![0, 0];
        let x = Object::new(&cat, vec![2, 2], r).unwrap();
        let all = HomSearch::new(&cat, &x, &x).collect(10_000).unwrap();
        for m in &all {
            m.check(&cat).unwrap();
        }
        // brute force over all stage-wise pairs of functions
        let mut brute = 0;
        for s0 in 0..4usize {
            for s1 in 0..4usize {
                let f0 = [s0 % 2, s0 / 2];
                let f1 = [s1 % 2, s1 / 2];
                let m = Morphism::new_unchecked(x.clone(), x.clone(), vec![f0.to_vec(), f1.to_vec()]);
                if m.check(&cat).is_ok() {
                    brute += 1;
                }
            }
        }
        assert_eq!(all.len(), brute);
    }
}
