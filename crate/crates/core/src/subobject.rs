//! Subobjects as stage-wise subsets closed under restriction.

use std::ops::ControlFlow;

use crate::error::{Result, ToposError};
use crate::index::IndexCategory;
use crate::object::{Morphism, Object};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subobject {
    carrier: Object,
    mem: Vec<Vec<bool>>,
}

impl Subobject {
    pub fn new(cat: &IndexCategory, carrier: Object, mem: Vec<Vec<bool>>) -> Result<Self> {
        let s = Subobject { carrier, mem };
        if s.mem.len() != cat.num_stages() || (0..cat.num_stages()).any(|c| s.mem[c].len() != s.carrier.size(c)) {
            return Err(ToposError::NotSubobject("wrong shape".into()));
        }
        for (a, arrow) in cat.arrows().iter().enumerate() {
            for x in 0..s.carrier.size(arrow.dst) {
                if s.mem[arrow.dst][x] && !s.mem[arrow.src][s.carrier.restrict(a, x)] {
                    return Err(ToposError::NotSubobject(format!(
                        "not closed under restriction along {}",
                        arrow.name
                    )));
                }
            }
        }
        Ok(s)
    }

    pub(crate) fn new_unchecked(carrier: Object, mem: Vec<Vec<bool>>) -> Self {
        Subobject { carrier, mem }
    }

    pub(crate) fn from_fn(carrier: &Object, f: impl Fn(usize, usize) -> bool) -> Self {
        let mem = (0..carrier.num_stages())
            .map(|c| (0..carrier.size(c)).map(|x| f(c, x)).collect())
            .collect();
        Subobject {
            carrier: carrier.clone(),
            mem,
        }
    }

    pub fn top(carrier: &Object) -> Self {
        Self::from_fn(carrier, |_, _| true)
    }

    pub fn bottom(carrier: &Object) -> Self {
        Self::from_fn(carrier, |_, _| false)
    }

    pub fn carrier(&self) -> &Object {
        &self.carrier
    }

    pub fn contains(&self, c: usize, x: usize) -> bool {
        self.mem[c][x]
    }

    pub fn stage(&self, c: usize) -> &[bool] {
        &self.mem[c]
    }

    pub fn count(&self) -> usize {
        self.mem.iter().flatten().filter(|&&b| b).count()
    }

    pub fn is_top(&self) -> bool {
        self.mem.iter().flatten().all(|&b| b)
    }

    pub fn is_bottom(&self) -> bool {
        self.mem.iter().flatten().all(|&b| !b)
    }

    pub fn leq(&self, other: &Subobject) -> bool {
        debug_assert_eq!(self.carrier, other.carrier);
        self.mem
            .iter()
            .flatten()
            .zip(other.mem.iter().flatten())
            .all(|(&a, &b)| !a || b)
    }

    pub fn meet(&self, other: &Subobject) -> Subobject {
        Self::from_fn(&self.carrier, |c, x| self.mem[c][x] && other.mem[c][x])
    }

    pub fn join(&self, other: &Subobject) -> Subobject {
        Self::from_fn(&self.carrier, |c, x| self.mem[c][x] || other.mem[c][x])
    }

    /// Heyting implication: `x ∈ (S ⇒ T)(c)` iff every restriction of `x` in `S` lies in `T`.
    pub fn implies(&self, cat: &IndexCategory, other: &Subobject) -> Subobject {
        Self::from_fn(&self.carrier, |c, x| {
            cat.arrows_into(c).iter().all(|&a| {
                let d = cat.arrow(a).src;
                let y = self.carrier.restrict(a, x);
                !self.mem[d][y] || other.mem[d][y]
            })
        })
    }

    /// Pseudo-complement `S ⇒ ⊥`.
    pub fn negation(&self, cat: &IndexCategory) -> Subobject {
        self.implies(cat, &Subobject::bottom(&self.carrier))
    }

    /// The subobject as an object in its own right, with its inclusion.
    /// Elements keep the carrier's relative order.
    pub fn to_object(&self, cat: &IndexCategory) -> (Object, Morphism) {
        let n = self.carrier.num_stages();
        let mut index: Vec<Vec<usize>> = Vec::with_capacity(n);
        let mut members: Vec<Vec<usize>> = Vec::with_capacity(n);
        for c in 0..n {
            let mut ix = vec![usize::MAX; self.carrier.size(c)];
            let mut mem = Vec::new();
            for (x, slot) in ix.iter_mut().enumerate() {
                if self.mem[c][x] {
                    *slot = mem.len();
                    mem.push(x);
                }
            }
            index.push(ix);
            members.push(mem);
        }
        let restrict = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(a, arrow)| {
                members[arrow.dst]
                    .iter()
                    .map(|&x| index[arrow.src][self.carrier.restrict(a, x)])
                    .collect()
            })
            .collect();
        let sizes = members.iter().map(Vec::len).collect();
        let labels = members
            .iter()
            .enumerate()
            .map(|(c, m)| m.iter().map(|&x| self.carrier.label(c, x)).collect())
            .collect();
        let obj = Object::new_unchecked(sizes, restrict).with_labels(labels);
        let incl = Morphism::new_unchecked(obj.clone(), self.carrier.clone(), members);
        (obj, incl)
    }
}

/// Enumerates all subobjects of `carrier`, stopping when `visit` breaks.
pub fn for_each_subobject(cat: &IndexCategory, carrier: &Object, mut visit: impl FnMut(Subobject) -> ControlFlow<()>) {
    let n = cat.num_stages();
    let offsets = carrier.offsets();
    let total = offsets[n];
    let flat = |c: usize, x: usize| offsets[c] + x;
    // implications x ⇒ y (x member forces y member)
    let mut down: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut up: Vec<Vec<usize>> = vec![Vec::new(); total];
    for (a, arrow) in cat.arrows().iter().enumerate() {
        if cat.is_identity(a) {
            continue;
        }
        for x in 0..carrier.size(arrow.dst) {
            let from = flat(arrow.dst, x);
            let to = flat(arrow.src, carrier.restrict(a, x));
            down[from].push(to);
            up[to].push(from);
        }
    }
    let mut val: Vec<Option<bool>> = vec![None; total];
    let mut trail: Vec<usize> = Vec::new();

    fn set(
        v: usize,
        b: bool,
        val: &mut [Option<bool>],
        trail: &mut Vec<usize>,
        down: &[Vec<usize>],
        up: &[Vec<usize>],
    ) -> bool {
        let mut stack = vec![(v, b)];
        while let Some((v, b)) = stack.pop() {
            match val[v] {
                Some(cur) if cur == b => continue,
                Some(_) => return false,
                None => {}
            }
            val[v] = Some(b);
            trail.push(v);
            let next = if b { &down[v] } else { &up[v] };
            stack.extend(next.iter().map(|&w| (w, b)));
        }
        true
    }

    fn rec(
        i: usize,
        val: &mut Vec<Option<bool>>,
        trail: &mut Vec<usize>,
        down: &[Vec<usize>],
        up: &[Vec<usize>],
        emit: &mut dyn FnMut(&[Option<bool>]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let mut i = i;
        while i < val.len() && val[i].is_some() {
            i += 1;
        }
        if i == val.len() {
            return emit(val);
        }
        for b in [false, true] {
            let mark = trail.len();
            if set(i, b, val, trail, down, up) {
                rec(i + 1, val, trail, down, up, emit)?;
            }
            while trail.len() > mark {
                let v = trail.pop().unwrap();
                val[v] = None;
            }
        }
        ControlFlow::Continue(())
    }

    let mut emit = |vals: &[Option<bool>]| {
        let mem = (0..n)
            .map(|c| (0..carrier.size(c)).map(|x| vals[offsets[c] + x].unwrap()).collect())
            .collect();
        visit(Subobject::new_unchecked(carrier.clone(), mem))
    };
    let _ = rec(0, &mut val, &mut trail, &down, &up, &mut emit);
}

/// All subobjects, or `None` when there are more than `limit`.
pub fn all_subobjects(cat: &IndexCategory, carrier: &Object, limit: usize) -> Option<Vec<Subobject>> {
    let mut out = Vec::new();
    let mut over = false;
    for_each_subobject(cat, carrier, |s| {
        if out.len() == limit {
            over = true;
            return ControlFlow::Break(());
        }
        out.push(s);
        ControlFlow::Continue(())
    });
    (!over).then_some(out)
}
