//! Finite presheaf toposes: limits, colimits, the subobject classifier,
//! exponentials, power objects, images and the quantifiers along a map.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Result, ToposError};
use crate::index::IndexCategory;
use crate::object::{Morphism, Object};
use crate::search::HomSearch;
use crate::subobject::{all_subobjects, Subobject};

/// Upper bound on enumerations performed implicitly by the kernel.
pub const DEFAULT_LIMIT: usize = 1 << 20;

#[derive(Clone)]
pub struct Topos(Arc<Inner>);

struct Inner {
    name: String,
    cat: IndexCategory,
    terminal: Object,
    initial: Object,
    representables: Vec<Object>,
    omega: OnceLock<Arc<Omega>>,
    ops: OnceLock<Arc<OmegaOps>>,
    exps: Mutex<HashMap<(Object, Object), Arc<Exponential>>>,
    products: Mutex<HashMap<(Object, Object), Product>>,
}

impl fmt::Debug for Topos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Topos({})", self.0.name)
    }
}

/// The subobject classifier: `Ω(c)` is the set of sieves on `c`.
#[derive(Debug)]
pub struct Omega {
    pub object: Object,
    /// Per stage, each sieve as a membership vector over all arrows.
    sieves: Vec<Vec<Vec<bool>>>,
    lookup: Vec<HashMap<Vec<bool>, usize>>,
    top: Vec<usize>,
    bottom: Vec<usize>,
    pub truth: Morphism,
    pub falsity: Morphism,
}

impl Omega {
    pub fn sieve(&self, c: usize, w: usize) -> &[bool] {
        &self.sieves[c][w]
    }

    pub fn index_of(&self, c: usize, sieve: &[bool]) -> usize {
        self.lookup[c][sieve]
    }

    pub fn top(&self, c: usize) -> usize {
        self.top[c]
    }

    pub fn bottom(&self, c: usize) -> usize {
        self.bottom[c]
    }

    pub fn num_sieves(&self, c: usize) -> usize {
        self.sieves[c].len()
    }
}

/// Connectives on `Ω`, derived from classifying maps.
#[derive(Debug)]
pub struct OmegaOps {
    pub and: Morphism,
    pub or: Morphism,
    pub implies: Morphism,
    pub not: Morphism,
    pub omega_squared: Product,
}

#[derive(Debug, Clone)]
pub struct Product {
    pub object: Object,
    pub p1: Morphism,
    pub p2: Morphism,
}

#[derive(Debug, Clone)]
pub struct Coproduct {
    pub object: Object,
    pub i1: Morphism,
    pub i2: Morphism,
}

#[derive(Debug, Clone)]
pub struct Pullback {
    pub object: Object,
    pub p1: Morphism,
    pub p2: Morphism,
}

/// Epi–mono factorization `f = mono ∘ epi` through the image subobject.
#[derive(Debug, Clone)]
pub struct Image {
    pub subobject: Subobject,
    pub epi: Morphism,
    pub mono: Morphism,
}

/// `B^A`, with `B^A(c)` enumerated as natural maps `y(c) × A → B`.
#[derive(Debug)]
pub struct Exponential {
    pub object: Object,
    pub eval: Morphism,
    pub eval_domain: Product,
    base: Object,
    target: Object,
    families: Vec<Vec<Vec<Vec<usize>>>>,
    lookup: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

impl Exponential {
    pub fn base(&self) -> &Object {
        &self.base
    }

    pub fn target(&self) -> &Object {
        &self.target
    }

    /// Components of the family `θ ∈ B^A(c)` on `y(c) × A`.
    pub fn family(&self, c: usize, theta: usize) -> &[Vec<usize>] {
        &self.families[c][theta]
    }
}

impl Topos {
    pub fn new(name: impl Into<String>, cat: IndexCategory) -> Self {
        let n = cat.num_stages();
        let terminal =
            Object::new_unchecked(vec![1; n], vec![vec![0]; cat.num_arrows()])
                .with_labels(vec![vec!["*".to_string()]; n]);
        let initial = Object::new_unchecked(vec![0; n], vec![vec![]; cat.num_arrows()]);
        let representables = (0..n).map(|c| representable(&cat, c)).collect();
        Topos(Arc::new(Inner {
            name: name.into(),
            cat,
            terminal,
            initial,
            representables,
            omega: OnceLock::new(),
            ops: OnceLock::new(),
            exps: Mutex::new(HashMap::new()),
            products: Mutex::new(HashMap::new()),
        }))
    }

    pub fn finset() -> Self {
        Self::new("FinSet", IndexCategory::finset())
    }

    pub fn sierpinski() -> Self {
        Self::new("Sierpinski", IndexCategory::sierpinski())
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn index(&self) -> &IndexCategory {
        &self.0.cat
    }

    pub fn same(&self, other: &Topos) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    // ----- objects and morphisms -----

    pub fn object(&self, sizes: Vec<usize>, restrict: Vec<Vec<usize>>) -> Result<Object> {
        Object::new(self.index(), sizes, restrict)
    }

    /// A constant presheaf / finite set with `n` elements at every stage.
    pub fn constant(&self, n: usize) -> Object {
        let cat = self.index();
        Object::new_unchecked(vec![n; cat.num_stages()], vec![(0..n).collect(); cat.num_arrows()])
    }

    /// Convenience for presheaves on a poset-like index: sizes per stage and a
    /// restriction table per non-identity arrow.
    pub fn presheaf(&self, sizes: &[usize], restrictions: &[(&str, Vec<usize>)]) -> Result<Object> {
        let cat = self.index();
        let mut restrict: Vec<Vec<usize>> = (0..cat.num_arrows())
            .map(|a| {
                if cat.is_identity(a) {
                    (0..sizes[cat.arrow(a).dst]).collect()
                } else {
                    Vec::new()
                }
            })
            .collect();
        for (name, table) in restrictions {
            let a = cat
                .arrow_index(name)
                .ok_or_else(|| ToposError::Mismatch(format!("unknown arrow {name}")))?;
            restrict[a] = table.clone();
        }
        self.object(sizes.to_vec(), restrict)
    }

    pub fn morphism(&self, dom: &Object, cod: &Object, maps: Vec<Vec<usize>>) -> Result<Morphism> {
        Morphism::new(self.index(), dom.clone(), cod.clone(), maps)
    }

    pub fn compose(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        f.after(g)
    }

    pub fn identity(&self, a: &Object) -> Morphism {
        Morphism::identity(a)
    }

    pub fn terminal(&self) -> &Object {
        &self.0.terminal
    }

    pub fn initial(&self) -> &Object {
        &self.0.initial
    }

    pub fn representable(&self, c: usize) -> &Object {
        &self.0.representables[c]
    }

    /// `!_A: A → 1`.
    pub fn to_terminal(&self, a: &Object) -> Morphism {
        Morphism::from_fn(a, self.terminal(), |_, _| 0)
    }

    pub fn from_initial(&self, a: &Object) -> Morphism {
        Morphism::from_fn(self.initial(), a, |_, _| 0)
    }

    /// Global elements `1 → A`.
    pub fn global_elements(&self, a: &Object) -> Vec<Morphism> {
        HomSearch::new(self.index(), self.terminal(), a)
            .collect(DEFAULT_LIMIT)
            .unwrap_or_default()
    }

    pub fn homs(&self, a: &Object, b: &Object, limit: usize) -> Result<Vec<Morphism>> {
        HomSearch::new(self.index(), a, b)
            .collect(limit)
            .ok_or_else(|| ToposError::TooLarge {
                what: "hom-set".into(),
                limit,
            })
    }

    pub fn count_homs(&self, a: &Object, b: &Object) -> usize {
        HomSearch::new(self.index(), a, b).count()
    }

    pub fn isos(&self, a: &Object, b: &Object, limit: usize) -> Result<Vec<Morphism>> {
        if a.sizes() != b.sizes() {
            return Ok(Vec::new());
        }
        HomSearch::new(self.index(), a, b)
            .injective()
            .collect(limit)
            .ok_or_else(|| ToposError::TooLarge {
                what: "iso-set".into(),
                limit,
            })
    }

    pub fn subobjects(&self, a: &Object, limit: usize) -> Result<Vec<Subobject>> {
        all_subobjects(self.index(), a, limit).ok_or_else(|| ToposError::TooLarge {
            what: "subobject lattice".into(),
            limit,
        })
    }

    pub fn subobject(&self, carrier: &Object, mem: Vec<Vec<bool>>) -> Result<Subobject> {
        Subobject::new(self.index(), carrier.clone(), mem)
    }

    /// Subobject from the labelled elements at each stage.
    pub fn subobject_of_elements(&self, carrier: &Object, elems: &[Vec<usize>]) -> Result<Subobject> {
        let mem = (0..carrier.num_stages())
            .map(|c| {
                let mut m = vec![false; carrier.size(c)];
                for &x in &elems[c] {
                    m[x] = true;
                }
                m
            })
            .collect();
        self.subobject(carrier, mem)
    }

    // ----- limits and colimits -----

    pub fn product(&self, a: &Object, b: &Object) -> Product {
        let key = (a.clone(), b.clone());
        if let Some(p) = self.0.products.lock().unwrap().get(&key) {
            return p.clone();
        }
        let p = self.build_product(a, b);
        self.0.products.lock().unwrap().entry(key).or_insert(p).clone()
    }

    fn build_product(&self, a: &Object, b: &Object) -> Product {
        let cat = self.index();
        let sizes: Vec<usize> = (0..cat.num_stages()).map(|c| a.size(c) * b.size(c)).collect();
        let restrict = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(f, arrow)| {
                let nb_src = b.size(arrow.src);
                let nb = b.size(arrow.dst);
                (0..sizes[arrow.dst])
                    .map(|p| a.restrict(f, p / nb) * nb_src + b.restrict(f, p % nb))
                    .collect()
            })
            .collect();
        let labels = (0..cat.num_stages())
            .map(|c| {
                (0..sizes[c])
                    .map(|p| {
                        let nb = b.size(c);
                        format!("({},{})", a.label(c, p / nb), b.label(c, p % nb))
                    })
                    .collect()
            })
            .collect();
        let object = Object::new_unchecked(sizes, restrict).with_labels(labels);
        let p1 = Morphism::from_fn(&object, a, |c, p| p / b.size(c));
        let p2 = Morphism::from_fn(&object, b, |c, p| p % b.size(c));
        Product { object, p1, p2 }
    }

    /// `⟨f, g⟩: X → A × B`.
    pub fn pair(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        if f.dom() != g.dom() {
            return Err(ToposError::Mismatch("pairing needs a common domain".into()));
        }
        let prod = self.product(f.cod(), g.cod());
        let nb = g.cod();
        Ok(Morphism::from_fn(f.dom(), &prod.object, |c, x| {
            f.apply(c, x) * nb.size(c) + g.apply(c, x)
        }))
    }

    /// `f × g: A × B → C × D`.
    pub fn product_map(&self, f: &Morphism, g: &Morphism) -> Morphism {
        let dom = self.product(f.dom(), g.dom()).object;
        let cod = self.product(f.cod(), g.cod()).object;
        let (nb, nd) = (g.dom(), g.cod());
        Morphism::from_fn(&dom, &cod, |c, p| {
            f.apply(c, p / nb.size(c)) * nd.size(c) + g.apply(c, p % nb.size(c))
        })
    }

    /// Left-associated product `((A1 × A2) × A3) …`; the empty product is `1`.
    pub fn product_many(&self, objs: &[Object]) -> Object {
        match objs {
            [] => self.terminal().clone(),
            [a] => a.clone(),
            [rest @ .., last] => self.product(&self.product_many(rest), last).object,
        }
    }

    /// Projection from the left-associated product onto factor `i`.
    pub fn project_many(&self, objs: &[Object], i: usize) -> Morphism {
        let prod = self.product_many(objs);
        let objs = objs.to_vec();
        Morphism::from_fn(&prod, &objs[i].clone(), move |c, p| decode_tuple(&objs, c, p)[i])
    }

    /// `⟨f1, …, fn⟩` into the left-associated product of the codomains.
    pub fn tuple(&self, dom: &Object, maps: &[Morphism]) -> Result<Morphism> {
        if maps.iter().any(|m| m.dom() != dom) {
            return Err(ToposError::Mismatch("tupling needs a common domain".into()));
        }
        let cods: Vec<Object> = maps.iter().map(|m| m.cod().clone()).collect();
        let prod = self.product_many(&cods);
        Ok(Morphism::from_fn(dom, &prod, |c, x| {
            let t: Vec<usize> = maps.iter().map(|m| m.apply(c, x)).collect();
            encode_tuple(&cods, c, &t)
        }))
    }

    pub fn coproduct(&self, a: &Object, b: &Object) -> Coproduct {
        let cat = self.index();
        let sizes: Vec<usize> = (0..cat.num_stages()).map(|c| a.size(c) + b.size(c)).collect();
        let restrict = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(f, arrow)| {
                let na = a.size(arrow.dst);
                (0..sizes[arrow.dst])
                    .map(|x| {
                        if x < na {
                            a.restrict(f, x)
                        } else {
                            a.size(arrow.src) + b.restrict(f, x - na)
                        }
                    })
                    .collect()
            })
            .collect();
        let object = Object::new_unchecked(sizes, restrict);
        let i1 = Morphism::from_fn(a, &object, |_, x| x);
        let i2 = Morphism::from_fn(b, &object, |c, x| a.size(c) + x);
        Coproduct { object, i1, i2 }
    }

    /// `[f, g]: A + B → C`.
    pub fn copair(&self, f: &Morphism, g: &Morphism) -> Result<Morphism> {
        if f.cod() != g.cod() {
            return Err(ToposError::Mismatch("copairing needs a common codomain".into()));
        }
        let co = self.coproduct(f.dom(), g.dom());
        let na = f.dom().clone();
        Ok(Morphism::from_fn(&co.object, f.cod(), |c, x| {
            if x < na.size(c) {
                f.apply(c, x)
            } else {
                g.apply(c, x - na.size(c))
            }
        }))
    }

    pub fn pullback(&self, f: &Morphism, g: &Morphism) -> Result<Pullback> {
        if f.cod() != g.cod() {
            return Err(ToposError::Mismatch("pullback needs a common codomain".into()));
        }
        let prod = self.product(f.dom(), g.dom());
        let nb = g.dom().clone();
        let sub = Subobject::from_fn(&prod.object, |c, p| {
            f.apply(c, p / nb.size(c)) == g.apply(c, p % nb.size(c))
        });
        let (object, incl) = sub.to_object(self.index());
        Ok(Pullback {
            p1: prod.p1.after(&incl)?,
            p2: prod.p2.after(&incl)?,
            object,
        })
    }

    /// Kernel pair of `f`: the pullback of `f` against itself.
    pub fn kernel_pair(&self, f: &Morphism) -> Pullback {
        self.pullback(f, f).expect("a map has a common codomain with itself")
    }

    pub fn equalizer(&self, f: &Morphism, g: &Morphism) -> Result<(Object, Morphism)> {
        if f.dom() != g.dom() || f.cod() != g.cod() {
            return Err(ToposError::Mismatch("equalizer needs parallel maps".into()));
        }
        let sub = Subobject::from_fn(f.dom(), |c, x| f.apply(c, x) == g.apply(c, x));
        Ok(sub.to_object(self.index()))
    }

    // ----- images and subobject operations -----

    pub fn image(&self, f: &Morphism) -> Image {
        let sub = self.exists_along(f, &Subobject::top(f.dom()));
        let (obj, mono) = sub.to_object(self.index());
        let mut index: Vec<HashMap<usize, usize>> = vec![HashMap::new(); obj.num_stages()];
        for (c, ix) in index.iter_mut().enumerate() {
            for (i, &y) in mono.component(c).iter().enumerate() {
                ix.insert(y, i);
            }
        }
        let epi = Morphism::from_fn(f.dom(), &obj, |c, x| index[c][&f.apply(c, x)]);
        Image {
            subobject: sub,
            epi,
            mono,
        }
    }

    /// Image of a mono (or any map) as a subobject of its codomain.
    pub fn image_subobject(&self, f: &Morphism) -> Subobject {
        self.exists_along(f, &Subobject::top(f.dom()))
    }

    /// `g*(U)`.
    pub fn pullback_subobject(&self, g: &Morphism, u: &Subobject) -> Subobject {
        Subobject::from_fn(g.dom(), |c, x| u.contains(c, g.apply(c, x)))
    }

    /// `∃_g(S)`: the image of `S` under `g`.
    pub fn exists_along(&self, g: &Morphism, s: &Subobject) -> Subobject {
        let mut mem: Vec<Vec<bool>> = (0..g.cod().num_stages())
            .map(|c| vec![false; g.cod().size(c)])
            .collect();
        for (c, row) in mem.iter_mut().enumerate() {
            for x in 0..g.dom().size(c) {
                if s.contains(c, x) {
                    row[g.apply(c, x)] = true;
                }
            }
        }
        Subobject::new_unchecked(g.cod().clone(), mem)
    }

    /// `∀_g(S)`: `y ∈ B(c)` is included iff every `x ∈ A(d)` lying over a
    /// restriction `B(f)y`, for any `f: d → c`, belongs to `S`.
    pub fn forall_along(&self, g: &Morphism, s: &Subobject) -> Subobject {
        let cat = self.index();
        let (a, b) = (g.dom(), g.cod());
        // bad[d][z]: some element of A(d) over z ∈ B(d) lies outside S
        let bad: Vec<Vec<bool>> = (0..cat.num_stages())
            .map(|d| {
                let mut v = vec![false; b.size(d)];
                for x in 0..a.size(d) {
                    if !s.contains(d, x) {
                        v[g.apply(d, x)] = true;
                    }
                }
                v
            })
            .collect();
        Subobject::from_fn(b, |c, y| {
            cat.arrows_into(c)
                .iter()
                .all(|&f| !bad[cat.arrow(f).src][b.restrict(f, y)])
        })
    }

    // ----- subobject classifier -----

    pub fn omega(&self) -> Arc<Omega> {
        self.0.omega.get_or_init(|| Arc::new(self.build_omega())).clone()
    }

    fn build_omega(&self) -> Omega {
        let cat = self.index();
        let n = cat.num_stages();
        let m = cat.num_arrows();
        let mut sieves = Vec::with_capacity(n);
        for c in 0..n {
            let into = cat.arrows_into(c);
            let mut found: Vec<Vec<bool>> = Vec::new();
            for bits in 0u64..(1u64 << into.len()) {
                let mut s = vec![false; m];
                for (i, &f) in into.iter().enumerate() {
                    s[f] = bits >> i & 1 == 1;
                }
                let closed = into.iter().all(|&f| {
                    !s[f]
                        || cat
                            .arrows_into(cat.arrow(f).src)
                            .iter()
                            .all(|&g| s[cat.compose(f, g).unwrap()])
                });
                if closed {
                    found.push(s);
                }
            }
            found.sort_by(|x, y| {
                let cx = x.iter().filter(|&&b| b).count();
                let cy = y.iter().filter(|&&b| b).count();
                cx.cmp(&cy).then_with(|| x.iter().rev().cmp(y.iter().rev()))
            });
            sieves.push(found);
        }
        let lookup: Vec<HashMap<Vec<bool>, usize>> = sieves
            .iter()
            .map(|ss: &Vec<Vec<bool>>| ss.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let restrict = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(f, arrow)| {
                sieves[arrow.dst]
                    .iter()
                    .map(|s| {
                        let mut r = vec![false; m];
                        for &g in cat.arrows_into(arrow.src) {
                            r[g] = s[cat.compose(f, g).unwrap()];
                        }
                        lookup[arrow.src][&r]
                    })
                    .collect()
            })
            .collect();
        let labels = (0..n)
            .map(|c| {
                sieves[c]
                    .iter()
                    .map(|s| {
                        let names: Vec<&str> = (0..m).filter(|&f| s[f]).map(|f| cat.arrow(f).name.as_str()).collect();
                        format!("{{{}}}", names.join(","))
                    })
                    .collect()
            })
            .collect();
        let sizes = sieves.iter().map(Vec::len).collect();
        let object = Object::new_unchecked(sizes, restrict).with_labels(labels);
        let top: Vec<usize> = (0..n).map(|c| sieves[c].len() - 1).collect();
        let bottom = vec![0; n];
        let truth = Morphism::from_fn(self.terminal(), &object, |c, _| top[c]);
        let falsity = Morphism::from_fn(self.terminal(), &object, |_, _| 0);
        Omega {
            object,
            sieves,
            lookup,
            top,
            bottom,
            truth,
            falsity,
        }
    }

    pub fn truth(&self) -> Morphism {
        self.omega().truth.clone()
    }

    /// Characteristic map `χ_S: A → Ω`.
    pub fn char_of(&self, s: &Subobject) -> Morphism {
        let cat = self.index();
        let om = self.omega();
        let a = s.carrier();
        Morphism::from_fn(a, &om.object, |c, x| {
            let mut sieve = vec![false; cat.num_arrows()];
            for &f in cat.arrows_into(c) {
                sieve[f] = s.contains(cat.arrow(f).src, a.restrict(f, x));
            }
            om.index_of(c, &sieve)
        })
    }

    /// The subobject classified by `χ: A → Ω`.
    pub fn sub_of_char(&self, chi: &Morphism) -> Result<Subobject> {
        let om = self.omega();
        if chi.cod() != &om.object {
            return Err(ToposError::Mismatch("not a map into Ω".into()));
        }
        Ok(Subobject::from_fn(chi.dom(), |c, x| chi.apply(c, x) == om.top(c)))
    }

    /// Characteristic map of the image of a mono.
    pub fn classify(&self, m: &Morphism) -> Morphism {
        self.char_of(&self.image_subobject(m))
    }

    pub fn omega_ops(&self) -> Arc<OmegaOps> {
        self.0.ops.get_or_init(|| Arc::new(self.build_ops())).clone()
    }

    fn build_ops(&self) -> OmegaOps {
        let om = self.omega();
        let o = om.object.clone();
        let sq = self.product(&o, &o);
        let t = om.truth.clone();
        let tt = self.pair(&t, &t).unwrap();
        let and = self.classify(&tt);
        let left = self.product_map(&t, &Morphism::identity(&o));
        let right = self.product_map(&Morphism::identity(&o), &t);
        let left_img = self.image_subobject(&left);
        let right_img = self.image_subobject(&right);
        let or = self.char_of(&left_img.join(&right_img));
        let (_, eq) = self.equalizer(&and, &sq.p1).unwrap();
        let implies = self.classify(&eq);
        let not = self.classify(&om.falsity);
        OmegaOps {
            and,
            or,
            implies,
            not,
            omega_squared: sq,
        }
    }

    /// `1 + 1` with `b = [false, true]: 1 + 1 → Ω`.
    pub fn one_plus_one(&self) -> (Coproduct, Morphism) {
        let one = self.terminal();
        let co = self.coproduct(one, one);
        let om = self.omega();
        let b = self.copair(&om.falsity, &om.truth).unwrap();
        (co, b)
    }

    // ----- exponentials and power objects -----

    pub fn exponential(&self, a: &Object, b: &Object) -> Arc<Exponential> {
        let key = (a.clone(), b.clone());
        if let Some(e) = self.0.exps.lock().unwrap().get(&key) {
            return e.clone();
        }
        let e = Arc::new(self.build_exponential(a, b));
        self.0.exps.lock().unwrap().entry(key).or_insert(e).clone()
    }

    fn build_exponential(&self, a: &Object, b: &Object) -> Exponential {
        let cat = self.index();
        let n = cat.num_stages();
        let ya: Vec<Product> = (0..n).map(|c| self.product(self.representable(c), a)).collect();
        let families: Vec<Vec<Vec<Vec<usize>>>> = (0..n)
            .map(|c| {
                let mut fams = Vec::new();
                HomSearch::new(cat, &ya[c].object, b).for_each(|maps| {
                    fams.push(maps.to_vec());
                    std::ops::ControlFlow::Continue(())
                });
                fams
            })
            .collect();
        let lookup: Vec<HashMap<Vec<Vec<usize>>, usize>> = families
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect())
            .collect();
        // restriction along h: c' → c precomposes with y(h) × 1
        let restrict = cat
            .arrows()
            .iter()
            .enumerate()
            .map(|(h, arrow)| {
                let (cp, c) = (arrow.src, arrow.dst);
                families[c]
                    .iter()
                    .map(|theta| {
                        let fam: Vec<Vec<usize>> = (0..n)
                            .map(|d| {
                                let na = a.size(d);
                                (0..ya[cp].object.size(d))
                                    .map(|p| {
                                        let (g, x) = (p / na, p % na);
                                        let g_arrow = hom_list(cat, d, cp)[g];
                                        let hg = cat.compose(h, g_arrow).unwrap();
                                        let pos = hom_position(cat, d, c, hg);
                                        theta[d][pos * na + x]
                                    })
                                    .collect()
                            })
                            .collect();
                        lookup[cp][&fam]
                    })
                    .collect()
            })
            .collect();
        let sizes = families.iter().map(Vec::len).collect();
        let object = Object::new_unchecked(sizes, restrict);
        let eval_domain = self.product(&object, a);
        let eval = Morphism::from_fn(&eval_domain.object, b, |c, p| {
            let na = a.size(c);
            let (theta, x) = (p / na, p % na);
            let id_pos = hom_position(cat, c, c, cat.identity(c));
            families[c][theta][c][id_pos * na + x]
        });
        Exponential {
            object,
            eval,
            eval_domain,
            base: a.clone(),
            target: b.clone(),
            families,
            lookup,
        }
    }

    /// Exponential transpose of `f: C × A → B`, i.e. the unique `f̃: C → B^A`
    /// with `ev ∘ (f̃ × 1) = f`. `c` and `a` name the factors of `dom(f)`.
    pub fn transpose(&self, f: &Morphism, c_obj: &Object, a: &Object) -> Result<Morphism> {
        let prod = self.product(c_obj, a);
        if f.dom() != &prod.object {
            return Err(ToposError::Mismatch("transpose expects a map out of C × A".into()));
        }
        let cat = self.index();
        let n = cat.num_stages();
        let exp = self.exponential(a, f.cod());
        let mut maps = Vec::with_capacity(n);
        for c in 0..n {
            let mut row = Vec::with_capacity(c_obj.size(c));
            for z in 0..c_obj.size(c) {
                let fam: Vec<Vec<usize>> = (0..n)
                    .map(|d| {
                        let na = a.size(d);
                        let homs = hom_list(cat, d, c);
                        (0..homs.len() * na)
                            .map(|p| {
                                let (g, x) = (homs[p / na], p % na);
                                let zc = c_obj.restrict(g, z);
                                f.apply(d, zc * na + x)
                            })
                            .collect()
                    })
                    .collect();
                row.push(
                    *exp.lookup[c]
                        .get(&fam)
                        .ok_or_else(|| ToposError::Naturality("transpose produced a non-natural family".into()))?,
                );
            }
            maps.push(row);
        }
        Ok(Morphism::new_unchecked(c_obj.clone(), exp.object.clone(), maps))
    }

    /// `PA = Ω^A`.
    pub fn power(&self, a: &Object) -> Power {
        let om = self.omega();
        let exp = self.exponential(a, &om.object);
        let membership = self.sub_of_char(&exp.eval).expect("ev lands in Ω");
        Power {
            object: exp.object.clone(),
            product: exp.eval_domain.clone(),
            membership,
        }
    }

    /// The name `1 → PA` of a subobject `S ≤ A`.
    pub fn name_of(&self, s: &Subobject) -> Morphism {
        let a = s.carrier();
        let one = self.terminal();
        let prod = self.product(one, a);
        let chi = self.char_of(s).after(&prod.p2).unwrap();
        self.transpose(&chi, one, a).unwrap()
    }

    /// The subobject of `A` named by a global element `1 → PA`.
    pub fn named_subobject(&self, a: &Object, name: &Morphism) -> Subobject {
        let p = self.power(a);
        Subobject::from_fn(a, |c, x| {
            let theta = name.apply(c, 0);
            p.membership.contains(c, theta * a.size(c) + x)
        })
    }

    /// `∀_A: PA → Ω`, classifying the name of the top subobject.
    pub fn forall_map(&self, a: &Object) -> Morphism {
        self.classify(&self.name_of(&Subobject::top(a)))
    }

    /// `∃_A: PA → Ω`, classifying the image of `∈_A → PA`.
    pub fn exists_map(&self, a: &Object) -> Morphism {
        let p = self.power(a);
        let (_, incl) = p.membership.to_object(self.index());
        let proj = p.product.p1.after(&incl).unwrap();
        self.classify(&proj)
    }
}

#[derive(Debug, Clone)]
pub struct Power {
    pub object: Object,
    /// `PA × A`.
    pub product: Product,
    /// `∈_A ≤ PA × A`.
    pub membership: Subobject,
}

fn representable(cat: &IndexCategory, c: usize) -> Object {
    let n = cat.num_stages();
    let sizes: Vec<usize> = (0..n).map(|d| cat.hom(d, c).count()).collect();
    let restrict = cat
        .arrows()
        .iter()
        .enumerate()
        .map(|(a, arrow)| {
            hom_list(cat, arrow.dst, c)
                .iter()
                .map(|&g| hom_position(cat, arrow.src, c, cat.compose(g, a).unwrap()))
                .collect()
        })
        .collect();
    let labels = (0..n)
        .map(|d| hom_list(cat, d, c).iter().map(|&g| cat.arrow(g).name.clone()).collect())
        .collect();
    Object::new_unchecked(sizes, restrict).with_labels(labels)
}

fn hom_list(cat: &IndexCategory, d: usize, c: usize) -> Vec<usize> {
    cat.hom(d, c).collect()
}

fn hom_position(cat: &IndexCategory, d: usize, c: usize, f: usize) -> usize {
    cat.hom(d, c).position(|g| g == f).expect("arrow in hom-set")
}

/// Mixed-radix encoding of a tuple in the left-associated product.
pub fn encode_tuple(objs: &[Object], c: usize, t: &[usize]) -> usize {
    objs.iter().zip(t).fold(0, |acc, (o, &x)| acc * o.size(c) + x)
}

pub fn decode_tuple(objs: &[Object], c: usize, mut p: usize) -> Vec<usize> {
    let mut out = vec![0; objs.len()];
    for (i, o) in objs.iter().enumerate().rev() {
        let n = o.size(c);
        out[i] = p % n;
        p /= n;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sier_two_one() -> (Topos, Object) {
        // X(1) = {p}, X(0) = {q, r}, p|u = q
        let t = Topos::sierpinski();
        let x = t.presheaf(&[2, 1], &[("u", vec![0])]).unwrap();
        (t, x)
    }

    #[test]
    fn omega_sizes() {
        assert_eq!(Topos::finset().omega().object.sizes(), &[2]);
        assert_eq!(Topos::sierpinski().omega().object.sizes(), &[2, 3]);
    }

    #[test]
    fn char_and_sub_of_char_are_inverse() {
        let (t, x) = sier_two_one();
        for s in t.subobjects(&x, 100).unwrap() {
            assert_eq!(t.sub_of_char(&t.char_of(&s)).unwrap(), s);
        }
        assert_eq!(
            t.subobjects(&x, 100).unwrap().len(),
            t.count_homs(&x, &t.omega().object)
        );
    }

    #[test]
    fn exponential_counts_functions() {
        let t = Topos::finset();
        let e = t.exponential(&t.constant(2), &t.constant(3));
        assert_eq!(e.object.size(0), 9);
    }

    #[test]
    fn transpose_of_eval_is_identity() {
        let (t, x) = sier_two_one();
        let e = t.exponential(&x, &x);
        let tr = t.transpose(&e.eval, &e.object, &x).unwrap();
        assert_eq!(tr, Morphism::identity(&e.object));
    }

    #[test]
    fn quantifiers_on_a_fibred_example() {
        let t = Topos::finset();
        let (a, b) = (t.constant(3), t.constant(2));
        let g = t.morphism(&a, &b, vec![vec![0, 0, 1]]).unwrap();
        let s = t.subobject_of_elements(&a, &[vec![0, 2]]).unwrap();
        assert_eq!(t.forall_along(&g, &s).stage(0), &[false, true]);
        assert_eq!(t.exists_along(&g, &s).stage(0), &[true, true]);
    }

    #[test]
    fn power_object_membership() {
        let t = Topos::finset();
        let p = t.power(&t.constant(2));
        assert_eq!(p.object.size(0), 4);
        assert_eq!(p.membership.count(), 4);
    }

    #[test]
    fn b_is_iso_exactly_when_boolean() {
        let (_, b) = Topos::finset().one_plus_one();
        assert!(b.is_iso());
        let (_, b) = Topos::sierpinski().one_plus_one();
        assert!(b.is_mono() && !b.is_iso());
    }

    #[test]
    fn negation_table_on_sierpinski() {
        let t = Topos::sierpinski();
        let om = t.omega();
        let ops = t.omega_ops();
        // at stage 1: ¬⊥ = ⊤, ¬{u} = ⊥, ¬⊤ = ⊥
        assert_eq!(ops.not.component(1), &[om.top(1), 0, 0]);
        assert_eq!(ops.not.component(0), &[om.top(0), 0]);
    }

    #[test]
    fn pullback_of_constants_is_product() {
        let t = Topos::finset();
        let a = t.constant(2);
        let f = t.to_terminal(&a);
        assert_eq!(t.pullback(&f, &f).unwrap().object.size(0), 4);
    }

    #[test]
    fn image_factorization() {
        let t = Topos::finset();
        let f = t.morphism(&t.constant(3), &t.constant(2), vec![vec![0, 0, 0]]).unwrap();
        let im = t.image(&f);
        assert_eq!(im.subobject.stage(0), &[true, false]);
        assert_eq!(im.mono.after(&im.epi).unwrap(), f);
        assert!(im.epi.is_epi() && im.mono.is_mono());
    }
}
