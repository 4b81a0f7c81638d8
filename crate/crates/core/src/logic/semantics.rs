//! Typechecking and interpretation of formulas as morphisms out of the
//! context product, equivalently classes `[!_Γ, f]` over named indeterminates.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::syntax::{parse, Connective, Expr, ExprKind, Pos, Quantifier, TypeExpr};
use super::LogicError;
use crate::error::{Result as ToposResult, ToposError};
use crate::indeterminates::{IndeterminateCategory, Sort, Term};
use crate::object::{Morphism, Object};
use crate::subobject::Subobject;
use crate::topos::Topos;

/// A named morphism with optional declared source and target types.
#[derive(Debug, Clone)]
pub struct Declared {
    pub morphism: Morphism,
    pub dom: Option<TypeExpr>,
    pub cod: Option<TypeExpr>,
}

/// Names available to formulas: objects as types, morphisms as function
/// symbols, global elements and subobjects as constants.
#[derive(Debug, Clone)]
pub struct Env {
    topos: Topos,
    objects: BTreeMap<String, Object>,
    morphisms: BTreeMap<String, Declared>,
    constants: BTreeMap<String, Declared>,
    subobjects: BTreeMap<String, (TypeExpr, Subobject)>,
}

impl Env {
    pub fn new(t: &Topos) -> Self {
        Env {
            topos: t.clone(),
            objects: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            constants: BTreeMap::new(),
            subobjects: BTreeMap::new(),
        }
    }

    pub fn topos(&self) -> &Topos {
        &self.topos
    }

    pub fn add_object(&mut self, name: &str, obj: &Object) {
        self.objects.insert(name.into(), obj.clone());
    }

    pub fn object(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    pub fn objects(&self) -> &BTreeMap<String, Object> {
        &self.objects
    }

    pub fn add_morphism(&mut self, name: &str, m: &Morphism) {
        let decl = Declared {
            morphism: m.clone(),
            dom: self.type_of_object(m.dom()),
            cod: self.type_of_object(m.cod()),
        };
        self.morphisms.insert(name.into(), decl);
    }

    /// Registers `m` with explicit types, checked against its objects.
    pub fn add_morphism_typed(&mut self, name: &str, m: &Morphism, dom: TypeExpr, cod: TypeExpr) -> ToposResult<()> {
        if &self.resolve(&dom)? != m.dom() || &self.resolve(&cod)? != m.cod() {
            return Err(ToposError::Mismatch(format!(
                "declared type of '{name}' disagrees with its morphism"
            )));
        }
        self.morphisms.insert(
            name.into(),
            Declared {
                morphism: m.clone(),
                dom: Some(dom),
                cod: Some(cod),
            },
        );
        Ok(())
    }

    pub fn morphism(&self, name: &str) -> Option<&Declared> {
        self.morphisms.get(name)
    }

    /// Registers a global element `1 → X`.
    pub fn add_constant(&mut self, name: &str, m: &Morphism) -> ToposResult<()> {
        if m.dom() != self.topos.terminal() {
            return Err(ToposError::Mismatch(format!(
                "constant '{name}' must be a global element"
            )));
        }
        let decl = Declared {
            morphism: m.clone(),
            dom: Some(TypeExpr::One),
            cod: self.type_of_object(m.cod()),
        };
        self.constants.insert(name.into(), decl);
        Ok(())
    }

    pub fn constant(&self, name: &str) -> Option<&Declared> {
        self.constants.get(name)
    }

    /// Registers `S ≤ A` as a constant of type `P(A)`.
    pub fn add_subobject(&mut self, name: &str, carrier: TypeExpr, s: &Subobject) -> ToposResult<()> {
        if &self.resolve(&carrier)? != s.carrier() {
            return Err(ToposError::Mismatch(format!(
                "subobject '{name}' is not of type {carrier}"
            )));
        }
        let decl = Declared {
            morphism: self.topos.name_of(s),
            dom: Some(TypeExpr::One),
            cod: Some(TypeExpr::Power(Box::new(carrier.clone()))),
        };
        self.constants.insert(name.into(), decl);
        self.subobjects.insert(name.into(), (carrier, s.clone()));
        Ok(())
    }

    pub fn subobject(&self, name: &str) -> Option<&(TypeExpr, Subobject)> {
        self.subobjects.get(name)
    }

    /// A type expression naming `obj`, when one is registered.
    pub fn type_of_object(&self, obj: &Object) -> Option<TypeExpr> {
        if let Some((n, _)) = self.objects.iter().find(|(_, o)| *o == obj) {
            return Some(TypeExpr::Named(n.clone()));
        }
        if obj == self.topos.terminal() {
            return Some(TypeExpr::One);
        }
        if obj == &self.topos.omega().object {
            return Some(TypeExpr::Omega);
        }
        None
    }

    pub fn resolve(&self, ty: &TypeExpr) -> ToposResult<Object> {
        let t = &self.topos;
        Ok(match ty {
            TypeExpr::Named(n) => self
                .objects
                .get(n)
                .cloned()
                .ok_or_else(|| ToposError::Mismatch(format!("unknown type '{n}'")))?,
            TypeExpr::One => t.terminal().clone(),
            TypeExpr::Omega => t.omega().object.clone(),
            TypeExpr::Prod(a, b) => t.product(&self.resolve(a)?, &self.resolve(b)?).object,
            TypeExpr::Power(a) => t.power(&self.resolve(a)?).object,
        })
    }

    fn label(&self, obj: &Object) -> String {
        self.type_of_object(obj)
            .map(|t| t.to_string())
            .unwrap_or_else(|| format!("{obj:?}"))
    }
}

/// The type of a term: its object and, when known, a type expression.
#[derive(Debug, Clone)]
pub struct Ty {
    pub object: Object,
    pub expr: Option<TypeExpr>,
}

impl Ty {
    fn new(object: Object, expr: Option<TypeExpr>) -> Self {
        Ty { object, expr }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            Some(e) => write!(f, "{e}"),
            None => write!(f, "{:?}", self.object),
        }
    }
}

/// A free variable of a formula, in first-occurrence order.
#[derive(Debug, Clone)]
pub struct ContextVar {
    pub name: String,
    pub ty: TypeExpr,
    pub object: Object,
}

/// Result of typechecking.
#[derive(Debug, Clone)]
pub struct Typed {
    pub context: Vec<ContextVar>,
    pub ty: Ty,
    core: Core,
}

/// Elaborated term: variables as positions in the context list.
#[derive(Debug, Clone)]
enum Core {
    Var(usize),
    Const(bool),
    Global(Morphism),
    Apply(Morphism, Box<Core>),
    Pair(Box<Core>, Box<Core>),
    Eq(Object, Box<Core>, Box<Core>),
    Mem(Object, Box<Core>, Box<Core>),
    Bin(Connective, Box<Core>, Box<Core>),
    Not(Box<Core>),
    Quant(Quantifier, Object, Box<Core>),
    Compr(Object, Box<Core>),
}

fn type_error<T>(pos: Pos, message: String) -> Result<T, LogicError> {
    Err(LogicError::Type { pos, message })
}

struct Checker<'a> {
    env: &'a Env,
    annotated: HashMap<String, (TypeExpr, Object)>,
}

impl Checker<'_> {
    fn collect_annotations(&mut self, e: &Expr, bound: &mut Vec<String>) -> Result<(), LogicError> {
        match &e.kind {
            ExprKind::Var { name, ty: Some(ty) } if !bound.contains(name) => {
                let obj = self.env.resolve(ty).map_err(|err| LogicError::Type {
                    pos: e.pos,
                    message: err.to_string(),
                })?;
                match self.annotated.get(name) {
                    Some((_, o)) if *o != obj => {
                        return type_error(e.pos, format!("variable '{name}' annotated with two different types"));
                    }
                    _ => {
                        self.annotated.insert(name.clone(), (ty.clone(), obj));
                    }
                }
            }
            ExprKind::Var { .. } | ExprKind::Const(_) => {}
            ExprKind::Apply { arg, .. } | ExprKind::Not(arg) => self.collect_annotations(arg, bound)?,
            ExprKind::Pair(a, b) | ExprKind::Eq(a, b) | ExprKind::Mem(a, b) | ExprKind::Binary(_, a, b) => {
                self.collect_annotations(a, bound)?;
                self.collect_annotations(b, bound)?;
            }
            ExprKind::Quant { var, body, .. } | ExprKind::Compr { var, body, .. } => {
                bound.push(var.clone());
                self.collect_annotations(body, bound)?;
                bound.pop();
            }
        }
        Ok(())
    }

    fn collect_free(&self, e: &Expr, bound: &mut Vec<String>, out: &mut Vec<ContextVar>) -> Result<(), LogicError> {
        match &e.kind {
            ExprKind::Var { name, .. } if !bound.contains(name) => {
                if let Some((ty, obj)) = self.annotated.get(name) {
                    if !out.iter().any(|v| &v.name == name) {
                        out.push(ContextVar {
                            name: name.clone(),
                            ty: ty.clone(),
                            object: obj.clone(),
                        });
                    }
                } else if self.env.constant(name).is_none() {
                    return type_error(
                        e.pos,
                        format!("unknown identifier '{name}' (annotate free variables with a type)"),
                    );
                }
            }
            ExprKind::Var { .. } | ExprKind::Const(_) => {}
            ExprKind::Apply { arg, .. } | ExprKind::Not(arg) => self.collect_free(arg, bound, out)?,
            ExprKind::Pair(a, b) | ExprKind::Eq(a, b) | ExprKind::Mem(a, b) | ExprKind::Binary(_, a, b) => {
                self.collect_free(a, bound, out)?;
                self.collect_free(b, bound, out)?;
            }
            ExprKind::Quant { var, body, .. } | ExprKind::Compr { var, body, .. } => {
                bound.push(var.clone());
                self.collect_free(body, bound, out)?;
                bound.pop();
            }
        }
        Ok(())
    }

    fn resolve(&self, ty: &TypeExpr, pos: Pos) -> Result<Object, LogicError> {
        self.env.resolve(ty).map_err(|err| LogicError::Type {
            pos,
            message: err.to_string(),
        })
    }

    fn omega(&self) -> Ty {
        Ty::new(self.env.topos.omega().object.clone(), Some(TypeExpr::Omega))
    }

    fn formula(&self, e: &Expr, scope: &mut Vec<(String, Ty)>) -> Result<Core, LogicError> {
        let (core, ty) = self.elab(e, scope)?;
        if ty.object != self.env.topos.omega().object {
            return type_error(e.pos, format!("expected a formula, found a term of type {ty}"));
        }
        Ok(core)
    }

    fn elab(&self, e: &Expr, scope: &mut Vec<(String, Ty)>) -> Result<(Core, Ty), LogicError> {
        let t = &self.env.topos;
        match &e.kind {
            ExprKind::Var { name, ty } => {
                if let Some(i) = scope.iter().rposition(|(n, _)| n == name) {
                    let vty = scope[i].1.clone();
                    if let Some(ann) = ty {
                        if self.resolve(ann, e.pos)? != vty.object {
                            return type_error(e.pos, format!("'{name}' has type {vty}, not {ann}"));
                        }
                    }
                    return Ok((Core::Var(i), vty));
                }
                let c = self.env.constant(name).expect("free identifiers were resolved");
                Ok((
                    Core::Global(c.morphism.clone()),
                    Ty::new(c.morphism.cod().clone(), c.cod.clone()),
                ))
            }
            ExprKind::Const(b) => Ok((Core::Const(*b), self.omega())),
            ExprKind::Apply { func, arg } => {
                let Some(decl) = self.env.morphism(func) else {
                    return type_error(e.pos, format!("unknown function symbol '{func}'"));
                };
                let (a, aty) = self.elab(arg, scope)?;
                if &aty.object != decl.morphism.dom() {
                    return type_error(
                        arg.pos,
                        format!("'{func}' expects {}, found {aty}", self.env.label(decl.morphism.dom())),
                    );
                }
                let cod = Ty::new(decl.morphism.cod().clone(), decl.cod.clone());
                Ok((Core::Apply(decl.morphism.clone(), Box::new(a)), cod))
            }
            ExprKind::Pair(a, b) => {
                let (ca, ta) = self.elab(a, scope)?;
                let (cb, tb) = self.elab(b, scope)?;
                let expr = match (&ta.expr, &tb.expr) {
                    (Some(x), Some(y)) => Some(TypeExpr::Prod(Box::new(x.clone()), Box::new(y.clone()))),
                    _ => None,
                };
                let obj = t.product(&ta.object, &tb.object).object;
                Ok((Core::Pair(Box::new(ca), Box::new(cb)), Ty::new(obj, expr)))
            }
            ExprKind::Eq(a, b) => {
                let (ca, ta) = self.elab(a, scope)?;
                let (cb, tb) = self.elab(b, scope)?;
                if ta.object != tb.object {
                    return type_error(e.pos, format!("cannot equate {ta} with {tb}"));
                }
                Ok((Core::Eq(ta.object, Box::new(ca), Box::new(cb)), self.omega()))
            }
            ExprKind::Mem(a, s) => {
                let (ca, ta) = self.elab(a, scope)?;
                let (cs, ts) = self.elab(s, scope)?;
                if ts.object != t.power(&ta.object).object {
                    return type_error(s.pos, format!("mem expects a term of type P({ta}), found {ts}"));
                }
                Ok((Core::Mem(ta.object, Box::new(ca), Box::new(cs)), self.omega()))
            }
            ExprKind::Binary(c, a, b) => {
                let ca = self.formula(a, scope)?;
                let cb = self.formula(b, scope)?;
                Ok((Core::Bin(*c, Box::new(ca), Box::new(cb)), self.omega()))
            }
            ExprKind::Not(a) => Ok((Core::Not(Box::new(self.formula(a, scope)?)), self.omega())),
            ExprKind::Quant { q, var, ty, body } => {
                let obj = self.resolve(ty, e.pos)?;
                scope.push((var.clone(), Ty::new(obj.clone(), Some(ty.clone()))));
                let cb = self.formula(body, scope);
                scope.pop();
                Ok((Core::Quant(*q, obj, Box::new(cb?)), self.omega()))
            }
            ExprKind::Compr { var, ty, body } => {
                let obj = self.resolve(ty, e.pos)?;
                scope.push((var.clone(), Ty::new(obj.clone(), Some(ty.clone()))));
                let cb = self.formula(body, scope);
                scope.pop();
                let pty = Ty::new(t.power(&obj).object, Some(TypeExpr::Power(Box::new(ty.clone()))));
                Ok((Core::Compr(obj, Box::new(cb?)), pty))
            }
        }
    }
}

/// Typechecks `e`; the context is its free variables in first-occurrence order.
pub fn typecheck(e: &Expr, env: &Env) -> Result<Typed, LogicError> {
    typecheck_in(e, env, &[])
}

/// Typechecks `e` in a context extended by `extra` variables after its own.
pub fn typecheck_in(e: &Expr, env: &Env, extra: &[(String, TypeExpr)]) -> Result<Typed, LogicError> {
    let mut ck = Checker {
        env,
        annotated: HashMap::new(),
    };
    ck.collect_annotations(e, &mut Vec::new())?;
    let mut context = Vec::new();
    ck.collect_free(e, &mut Vec::new(), &mut context)?;
    for (name, ty) in extra {
        if context.iter().any(|v| &v.name == name) {
            return type_error(e.pos, format!("'{name}' is already free in the term"));
        }
        let object = ck.resolve(ty, e.pos)?;
        context.push(ContextVar {
            name: name.clone(),
            ty: ty.clone(),
            object,
        });
    }
    let mut scope: Vec<(String, Ty)> = context
        .iter()
        .map(|v| (v.name.clone(), Ty::new(v.object.clone(), Some(v.ty.clone()))))
        .collect();
    let (core, ty) = ck.elab(e, &mut scope)?;
    Ok(Typed { context, ty, core })
}

struct Interp<'a> {
    t: &'a Topos,
    /// When set, every quantifier over `A` is computed as one over `A × C`
    /// of the body precomposed with the projection.
    pad: Option<Object>,
}

impl Interp<'_> {
    fn run(&self, core: &Core, ctx: &[Object]) -> ToposResult<Morphism> {
        let t = self.t;
        let g = t.product_many(ctx);
        let bang = || t.to_terminal(&g);
        Ok(match core {
            Core::Var(i) => t.project_many(ctx, *i),
            Core::Const(b) => {
                let om = t.omega();
                let v = if *b { &om.truth } else { &om.falsity };
                v.after(&bang())?
            }
            Core::Global(m) => m.after(&bang())?,
            Core::Apply(f, a) => f.after(&self.run(a, ctx)?)?,
            Core::Pair(a, b) => t.pair(&self.run(a, ctx)?, &self.run(b, ctx)?)?,
            Core::Eq(b, x, y) => {
                let id = Morphism::identity(b);
                let chi = t.classify(&t.pair(&id, &id)?);
                chi.after(&t.pair(&self.run(x, ctx)?, &self.run(y, ctx)?)?)?
            }
            Core::Mem(a, x, s) => {
                let ev = t.exponential(a, &t.omega().object).eval.clone();
                ev.after(&t.pair(&self.run(s, ctx)?, &self.run(x, ctx)?)?)?
            }
            Core::Bin(c, x, y) => {
                let ops = t.omega_ops();
                let op = match c {
                    Connective::And => &ops.and,
                    Connective::Or => &ops.or,
                    Connective::Implies => &ops.implies,
                };
                op.after(&t.pair(&self.run(x, ctx)?, &self.run(y, ctx)?)?)?
            }
            Core::Not(x) => t.omega_ops().not.after(&self.run(x, ctx)?)?,
            Core::Quant(q, a, body) => {
                let (tilde, base) = self.transposed(body, ctx, a, self.pad.as_ref())?;
                let quant = match q {
                    Quantifier::Forall => t.forall_map(&base),
                    Quantifier::Exists => t.exists_map(&base),
                };
                quant.after(&tilde)?
            }
            Core::Compr(a, body) => self.transposed(body, ctx, a, None)?.0,
        })
    }

    /// `f̃: Γ → Ω^A` for the body `f: Γ × A → Ω`, or `Ω^{A×C}` of `f∘(1×π)`.
    fn transposed(
        &self,
        body: &Core,
        ctx: &[Object],
        a: &Object,
        pad: Option<&Object>,
    ) -> ToposResult<(Morphism, Object)> {
        let t = self.t;
        let g = t.product_many(ctx);
        let mut ext = ctx.to_vec();
        ext.push(a.clone());
        let m = self.run(body, &ext)?;
        let ga = t.product(&g, a);
        let f = if ctx.is_empty() { m.after(&ga.p2)? } else { m };
        match pad {
            None => Ok((t.transpose(&f, &g, a)?, a.clone())),
            Some(c) => {
                let ac = t.product(a, c);
                let shift = t.product_map(&Morphism::identity(&g), &ac.p1);
                let fp = f.after(&shift)?;
                Ok((t.transpose(&fp, &g, &ac.object)?, ac.object.clone()))
            }
        }
    }
}

/// The denotation of a term: a morphism out of its context product.
#[derive(Debug, Clone)]
pub struct Denotation {
    pub context: Vec<ContextVar>,
    pub ty: Ty,
    pub morphism: Morphism,
}

impl Denotation {
    pub fn is_closed(&self) -> bool {
        self.context.is_empty()
    }

    pub fn context_objects(&self) -> Vec<Object> {
        self.context.iter().map(|v| v.object.clone()).collect()
    }

    /// The class `[!_Γ, f]` with one named indeterminate per free variable.
    pub fn class(&self, t: &Topos) -> ToposResult<Term> {
        let sorts: Vec<Sort> = self
            .context
            .iter()
            .map(|v| Sort::new(v.name.clone(), &v.object))
            .collect();
        let one = t.terminal().clone();
        let core = if sorts.is_empty() {
            self.morphism.clone()
        } else {
            let g = t.product_many(&self.context_objects());
            self.morphism.after(&t.product(&g, &one).p1)?
        };
        Term::new(t, sorts, one, core)
    }

    /// Truth of a formula at a context element.
    pub fn holds_at(&self, t: &Topos, c: usize, x: usize) -> bool {
        self.morphism.apply(c, x) == t.omega().top(c)
    }
}

pub fn interpret(e: &Expr, env: &Env) -> Result<Denotation, LogicError> {
    interpret_typed(typecheck(e, env)?, env, None)
}

/// Interprets `e` with extra (unused) context variables appended.
pub fn interpret_in(e: &Expr, env: &Env, extra: &[(String, TypeExpr)]) -> Result<Denotation, LogicError> {
    interpret_typed(typecheck_in(e, env, extra)?, env, None)
}

fn interpret_typed(typed: Typed, env: &Env, pad: Option<Object>) -> Result<Denotation, LogicError> {
    let ctx: Vec<Object> = typed.context.iter().map(|v| v.object.clone()).collect();
    let morphism = Interp { t: &env.topos, pad }.run(&typed.core, &ctx)?;
    Ok(Denotation {
        context: typed.context,
        ty: typed.ty,
        morphism,
    })
}

pub fn interpret_str(src: &str, env: &Env) -> Result<Denotation, LogicError> {
    interpret(&parse(src)?, env)
}

/// Value of a closed term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Truth(bool),
    Element(Morphism),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Truth(b) => write!(f, "{b}"),
            Value::Element(m) => write!(f, "{m:?}"),
        }
    }
}

/// Compares a closed formula with `true`; returns the element otherwise.
pub fn eval_closed(e: &Expr, env: &Env) -> Result<Value, LogicError> {
    let d = interpret(e, env)?;
    if !d.is_closed() {
        return Err(LogicError::NotClosed(
            d.context.iter().map(|v| v.name.clone()).collect(),
        ));
    }
    let t = &env.topos;
    if d.ty.object == t.omega().object {
        Ok(Value::Truth(d.morphism == t.truth()))
    } else {
        Ok(Value::Element(d.morphism))
    }
}

/// Outcome of the dummy-variable checks for one term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DummyReport {
    /// Padded-context denotation equals the original after projection.
    pub context_padding: bool,
    /// The two denotations are the same class over named indeterminates.
    pub class_equal: bool,
    /// Quantifying over `A × C` a body that ignores `C` agrees with quantifying over `A`.
    pub quantifier_padding: bool,
}

impl DummyReport {
    pub fn holds(&self) -> bool {
        self.context_padding && self.class_equal && self.quantifier_padding
    }
}

/// Pads `e` with an unused variable `var: ty` and compares denotations.
pub fn dummy_invariance_check(e: &Expr, env: &Env, var: &str, ty: &TypeExpr) -> Result<DummyReport, LogicError> {
    let t = &env.topos;
    let typed = typecheck(e, env)?;
    let c_obj = env.resolve(ty)?;
    let plain = interpret_typed(typed.clone(), env, None)?;
    let padded = interpret_in(e, env, &[(var.to_string(), ty.clone())])?;
    let g = t.product_many(&plain.context_objects());
    let proj = if plain.is_closed() {
        t.to_terminal(&t.product_many(&padded.context_objects()))
    } else {
        t.product(&g, &c_obj).p1
    };
    let context_padding = padded.morphism == plain.morphism.after(&proj)?;
    let pi = IndeterminateCategory::pi(t);
    let class_equal = pi.class_equal(&plain.class(t)?, &padded.class(t)?);
    let quantified = interpret_typed(typed, env, Some(c_obj))?;
    Ok(DummyReport {
        context_padding,
        class_equal,
        quantifier_padding: quantified.morphism == plain.morphism,
    })
}

/// For `φ` with free variables among `var: ty`, compares the subobject
/// classified by `φ` with the one named by `{ var:ty | φ }`.
pub fn comprehension_roundtrip(body: &Expr, env: &Env, var: &str, ty: &TypeExpr) -> Result<bool, LogicError> {
    let t = &env.topos;
    let a = env.resolve(ty)?;
    let d = interpret_in(body, env, &[])?;
    let chi = match d.context.as_slice() {
        [] => d.morphism.after(&t.to_terminal(&a))?,
        [v] if v.name == var && v.object == a => d.morphism,
        _ => {
            return Err(LogicError::Topos(ToposError::Precondition(format!(
                "comprehension body may only mention '{var}'"
            ))))
        }
    };
    let compr = Expr::compr(var, ty.clone(), body.clone());
    let named = match eval_closed(&compr, env)? {
        Value::Element(m) => m,
        Value::Truth(_) => unreachable!("a comprehension has power type"),
    };
    Ok(t.sub_of_char(&chi)? == t.named_subobject(&a, &named))
}

/// Stage-wise sieve semantics of the connectives, checked through the
/// language on `p, q: Omega` at every pair of sieves.
pub fn connective_tables_check(env: &Env) -> Result<bool, LogicError> {
    let t = &env.topos;
    let cat = t.index();
    let om = t.omega();
    let omega = om.object.clone();
    let cases = [
        ("and(p:Omega, q:Omega)", 0),
        ("or(p:Omega, q:Omega)", 1),
        ("implies(p:Omega, q:Omega)", 2),
        ("not(p:Omega) and q:Omega = q", 3),
    ];
    for (src, op) in cases {
        let d = interpret_str(src, env)?;
        for c in 0..cat.num_stages() {
            for p in 0..omega.size(c) {
                for q in 0..omega.size(c) {
                    let (sp, sq) = (om.sieve(c, p), om.sieve(c, q));
                    let expected: Vec<bool> = (0..cat.num_arrows())
                        .map(|f| {
                            if cat.arrow(f).dst != c {
                                return false;
                            }
                            let pulled = |s: &[bool], g: usize| cat.compose(f, g).is_some_and(|h| s[h]);
                            let into_src = cat.arrows_into(cat.arrow(f).src);
                            match op {
                                0 => sp[f] && sq[f],
                                1 => sp[f] || sq[f],
                                2 => into_src.iter().all(|&g| !pulled(sp, g) || pulled(sq, g)),
                                _ => into_src.iter().all(|&g| !pulled(sp, g)),
                            }
                        })
                        .collect();
                    let x = p * omega.size(c) + q;
                    if d.morphism.apply(c, x) != om.index_of(c, &expected) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse_type;

    fn finset_env() -> Env {
        let t = Topos::finset();
        let mut env = Env::new(&t);
        let a = t.constant(2);
        env.add_object("A", &a);
        env.add_object("E", &t.constant(0));
        let c0 = t.morphism(&a, &a, vec![vec![0, 0]]).unwrap();
        env.add_morphism("c_a0", &c0);
        let s = t.subobject_of_elements(&a, &[vec![1]]).unwrap();
        env.add_subobject("S", TypeExpr::Named("A".into()), &s).unwrap();
        env
    }

    fn eval(src: &str, env: &Env) -> Value {
        eval_closed(&parse(src).unwrap(), env).unwrap()
    }

    #[test]
    fn closed_formulas() {
        let env = finset_env();
        assert_eq!(eval("not true", &env), Value::Truth(false));
        assert_eq!(eval("forall x:A. x = x", &env), Value::Truth(true));
        assert_eq!(eval("exists x:E. x = x", &env), Value::Truth(false));
        assert_eq!(
            eval("forall x:A. or(mem(x, S), not mem(x, S))", &env),
            Value::Truth(true)
        );
        assert_eq!(eval("exists x:A. mem(x, S) and x = c_a0(x)", &env), Value::Truth(false));
    }

    #[test]
    fn open_formula_reports_context() {
        let env = finset_env();
        let e = parse("x:A = x:A").unwrap();
        assert!(matches!(eval_closed(&e, &env), Err(LogicError::NotClosed(v)) if v == ["x"]));
        let d = interpret(&e, &env).unwrap();
        assert!((0..2).all(|x| d.holds_at(env.topos(), 0, x)));
    }

    #[test]
    fn comprehension_names_a0() {
        let env = finset_env();
        let t = env.topos().clone();
        let v = eval("{ x:A | x = c_a0(x) }", &env);
        let Value::Element(m) = v else { panic!() };
        let s = t.named_subobject(env.object("A").unwrap(), &m);
        assert_eq!(s.stage(0), &[true, false]);
        let body = parse("x:A = c_a0(x)").unwrap();
        assert!(comprehension_roundtrip(&body, &env, "x", &parse_type("A").unwrap()).unwrap());
    }

    #[test]
    fn dummy_invariance_on_quantifiers() {
        let env = finset_env();
        for src in ["forall x:A. mem(x, S)", "exists x:A. mem(x, S)", "y:A = c_a0(y)"] {
            let r = dummy_invariance_check(&parse(src).unwrap(), &env, "z", &TypeExpr::Named("A".into())).unwrap();
            assert!(r.holds(), "{src}: {r:?}");
        }
    }

    #[test]
    fn excluded_middle_fails_in_sierpinski() {
        let t = Topos::sierpinski();
        let mut env = Env::new(&t);
        let y1 = t.representable(1).clone();
        env.add_object("Y", &y1);
        // the subobject of y1 missing the identity at stage 1
        let s = t.subobject(&y1, vec![vec![true], vec![false]]).unwrap();
        env.add_subobject("S", TypeExpr::Named("Y".into()), &s).unwrap();
        assert_eq!(
            eval("forall x:Y. or(mem(x, S), not mem(x, S))", &env),
            Value::Truth(false)
        );
        assert!(connective_tables_check(&env).unwrap());
    }

    #[test]
    fn type_errors_have_positions() {
        let env = finset_env();
        match interpret_str("forall x:A. mem(S, x)", &env) {
            Err(LogicError::Type { pos, .. }) => assert_eq!(pos.col, 20),
            other => panic!("{other:?}"),
        }
        assert!(matches!(interpret_str("y = y", &env), Err(LogicError::Type { .. })));
    }
}
