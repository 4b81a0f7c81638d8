//! A direct set-theoretic evaluator for FinSet, independent of the
//! classifier, transposes and quantifier maps used by the interpreter.

use std::collections::BTreeSet;

use super::semantics::{interpret, Env};
use super::syntax::{Connective, Expr, ExprKind, Quantifier, TypeExpr};
use super::LogicError;
use crate::error::ToposError;
use crate::object::Object;
use crate::topos::{encode_tuple, Topos};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SetValue {
    Elem(usize),
    Bool(bool),
    Pair(Box<SetValue>, Box<SetValue>),
    Set(BTreeSet<SetValue>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Atom(usize),
    Omega,
    Prod(Box<Shape>, Box<Shape>),
    Power(Box<Shape>),
}

impl Shape {
    fn of_type(env: &Env, ty: &TypeExpr) -> Result<Shape, LogicError> {
        Ok(match ty {
            TypeExpr::Named(_) => Shape::Atom(env.resolve(ty)?.size(0)),
            TypeExpr::One => Shape::Atom(1),
            TypeExpr::Omega => Shape::Omega,
            TypeExpr::Prod(a, b) => Shape::Prod(Box::new(Self::of_type(env, a)?), Box::new(Self::of_type(env, b)?)),
            TypeExpr::Power(a) => Shape::Power(Box::new(Self::of_type(env, a)?)),
        })
    }

    fn of_declared(env: &Env, ty: Option<&TypeExpr>, obj: &Object) -> Result<Shape, LogicError> {
        match ty {
            Some(t) => Self::of_type(env, t),
            None if obj == &env.topos().omega().object => Ok(Shape::Omega),
            None => Ok(Shape::Atom(obj.size(0))),
        }
    }

    /// All values of this shape, in index order of its carrier.
    pub fn elements(&self) -> Vec<SetValue> {
        match self {
            Shape::Atom(n) => (0..*n).map(SetValue::Elem).collect(),
            Shape::Omega => vec![SetValue::Bool(false), SetValue::Bool(true)],
            Shape::Prod(a, b) => {
                let bs = b.elements();
                a.elements()
                    .into_iter()
                    .flat_map(|x| {
                        bs.iter()
                            .map(move |y| SetValue::Pair(Box::new(x.clone()), Box::new(y.clone())))
                    })
                    .collect()
            }
            Shape::Power(a) => {
                let xs = a.elements();
                (0..1usize << xs.len())
                    .map(|bits| {
                        SetValue::Set(
                            xs.iter()
                                .enumerate()
                                .filter(|(i, _)| bits >> i & 1 == 1)
                                .map(|(_, x)| x.clone())
                                .collect(),
                        )
                    })
                    .collect()
            }
        }
    }

    fn object(&self, t: &Topos) -> Object {
        match self {
            Shape::Atom(n) => t.constant(*n),
            Shape::Omega => t.omega().object.clone(),
            Shape::Prod(a, b) => t.product(&a.object(t), &b.object(t)).object,
            Shape::Power(a) => t.power(&a.object(t)).object,
        }
    }

    /// Position of `v` in the topos's carrier for this shape.
    fn to_index(&self, t: &Topos, v: &SetValue) -> usize {
        match (self, v) {
            (Shape::Atom(_), SetValue::Elem(i)) => *i,
            (Shape::Omega, SetValue::Bool(b)) => {
                let om = t.omega();
                if *b {
                    om.top(0)
                } else {
                    om.bottom(0)
                }
            }
            (Shape::Prod(a, b), SetValue::Pair(x, y)) => a.to_index(t, x) * b.object(t).size(0) + b.to_index(t, y),
            (Shape::Power(a), SetValue::Set(s)) => {
                let aobj = a.object(t);
                let p = t.power(&aobj);
                let xs = a.elements();
                (0..p.object.size(0))
                    .find(|theta| {
                        xs.iter()
                            .all(|x| p.membership.contains(0, theta * aobj.size(0) + a.to_index(t, x)) == s.contains(x))
                    })
                    .expect("every subset has a name")
            }
            _ => unreachable!("value does not match its shape"),
        }
    }

    fn value_at(&self, t: &Topos, i: usize) -> SetValue {
        self.elements()
            .into_iter()
            .find(|v| self.to_index(t, v) == i)
            .expect("index within the carrier")
    }
}

struct Oracle<'a> {
    env: &'a Env,
    assign: Vec<(String, SetValue, Shape)>,
}

impl Oracle<'_> {
    fn truth(&mut self, e: &Expr) -> Result<bool, LogicError> {
        match self.eval(e)?.0 {
            SetValue::Bool(b) => Ok(b),
            _ => Err(LogicError::Type {
                pos: e.pos,
                message: "oracle expected a formula".into(),
            }),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<(SetValue, Shape), LogicError> {
        let t = self.env.topos().clone();
        Ok(match &e.kind {
            ExprKind::Var { name, .. } => {
                if let Some((_, v, s)) = self.assign.iter().rev().find(|(n, _, _)| n == name) {
                    (v.clone(), s.clone())
                } else if let Some((carrier, sub)) = self.env.subobject(name) {
                    let cs = Shape::of_type(self.env, carrier)?;
                    let members = cs
                        .elements()
                        .into_iter()
                        .filter(|x| sub.contains(0, cs.to_index(&t, x)))
                        .collect();
                    (SetValue::Set(members), Shape::Power(Box::new(cs)))
                } else {
                    let c = self.env.constant(name).ok_or_else(|| LogicError::Type {
                        pos: e.pos,
                        message: format!("oracle: unknown identifier '{name}'"),
                    })?;
                    let sh = Shape::of_declared(self.env, c.cod.as_ref(), c.morphism.cod())?;
                    (sh.value_at(&t, c.morphism.apply(0, 0)), sh)
                }
            }
            ExprKind::Const(b) => (SetValue::Bool(*b), Shape::Omega),
            ExprKind::Apply { func, arg } => {
                let decl = self.env.morphism(func).ok_or_else(|| LogicError::Type {
                    pos: e.pos,
                    message: format!("oracle: unknown function '{func}'"),
                })?;
                let decl = decl.clone();
                let (v, sh) = self.eval(arg)?;
                let out = decl.morphism.apply(0, sh.to_index(&t, &v));
                let cod = Shape::of_declared(self.env, decl.cod.as_ref(), decl.morphism.cod())?;
                (cod.value_at(&t, out), cod)
            }
            ExprKind::Pair(a, b) => {
                let (va, sa) = self.eval(a)?;
                let (vb, sb) = self.eval(b)?;
                (
                    SetValue::Pair(Box::new(va), Box::new(vb)),
                    Shape::Prod(Box::new(sa), Box::new(sb)),
                )
            }
            ExprKind::Eq(a, b) => {
                let (va, _) = self.eval(a)?;
                let (vb, _) = self.eval(b)?;
                (SetValue::Bool(va == vb), Shape::Omega)
            }
            ExprKind::Mem(a, s) => {
                let (va, _) = self.eval(a)?;
                let SetValue::Set(set) = self.eval(s)?.0 else {
                    return Err(LogicError::Type {
                        pos: s.pos,
                        message: "oracle expected a set".into(),
                    });
                };
                (SetValue::Bool(set.contains(&va)), Shape::Omega)
            }
            ExprKind::Binary(c, a, b) => {
                let (x, y) = (self.truth(a)?, self.truth(b)?);
                let v = match c {
                    Connective::And => x && y,
                    Connective::Or => x || y,
                    Connective::Implies => !x || y,
                };
                (SetValue::Bool(v), Shape::Omega)
            }
            ExprKind::Not(a) => (SetValue::Bool(!self.truth(a)?), Shape::Omega),
            ExprKind::Quant { q, var, ty, body } => {
                let sh = Shape::of_type(self.env, ty)?;
                let mut results = Vec::new();
                for v in sh.elements() {
                    self.assign.push((var.clone(), v, sh.clone()));
                    let r = self.truth(body);
                    self.assign.pop();
                    results.push(r?);
                }
                let v = match q {
                    Quantifier::Forall => results.iter().all(|&b| b),
                    Quantifier::Exists => results.iter().any(|&b| b),
                };
                (SetValue::Bool(v), Shape::Omega)
            }
            ExprKind::Compr { var, ty, body } => {
                let sh = Shape::of_type(self.env, ty)?;
                let mut members = BTreeSet::new();
                for v in sh.elements() {
                    self.assign.push((var.clone(), v.clone(), sh.clone()));
                    let r = self.truth(body);
                    self.assign.pop();
                    if r? {
                        members.insert(v);
                    }
                }
                (SetValue::Set(members), Shape::Power(Box::new(sh)))
            }
        })
    }
}

/// Evaluates a closed term directly on finite sets.
pub fn oracle_eval(e: &Expr, env: &Env) -> Result<SetValue, LogicError> {
    require_finset(env)?;
    Oracle {
        env,
        assign: Vec::new(),
    }
    .eval(e)
    .map(|(v, _)| v)
}

fn require_finset(env: &Env) -> Result<(), LogicError> {
    if env.topos().index().num_stages() != 1 || env.topos().index().num_arrows() != 1 {
        return Err(LogicError::Topos(ToposError::Precondition(
            "the set-theoretic oracle needs the one-stage index".into(),
        )));
    }
    Ok(())
}

/// Compares the interpreter with the oracle at every assignment of the
/// free variables. Returns the number of assignments checked, or the first
/// disagreeing assignment.
pub fn oracle_agrees(e: &Expr, env: &Env) -> Result<Result<usize, Vec<SetValue>>, LogicError> {
    require_finset(env)?;
    let t = env.topos().clone();
    let d = interpret(e, env)?;
    let shapes: Vec<Shape> = d
        .context
        .iter()
        .map(|v| Shape::of_type(env, &v.ty))
        .collect::<Result<_, _>>()?;
    let out_shape = Shape::of_declared(env, d.ty.expr.as_ref(), &d.ty.object)?;
    let objs = d.context_objects();
    let domains: Vec<Vec<SetValue>> = shapes.iter().map(Shape::elements).collect();
    let total: usize = domains.iter().map(Vec::len).product();
    for mut k in 0..total {
        let mut values = Vec::with_capacity(domains.len());
        for dom in domains.iter().rev() {
            values.push(dom[k % dom.len()].clone());
            k /= dom.len();
        }
        values.reverse();
        let idx: Vec<usize> = shapes.iter().zip(&values).map(|(s, v)| s.to_index(&t, v)).collect();
        let x = if objs.is_empty() {
            0
        } else {
            encode_tuple(&objs, 0, &idx)
        };
        let mut oracle = Oracle {
            env,
            assign: d
                .context
                .iter()
                .zip(&values)
                .zip(&shapes)
                .map(|((c, v), s)| (c.name.clone(), v.clone(), s.clone()))
                .collect(),
        };
        let (v, _) = oracle.eval(e)?;
        if out_shape.to_index(&t, &v) != d.morphism.apply(0, x) {
            return Ok(Err(values));
        }
    }
    Ok(Ok(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::parse;

    #[test]
    fn oracle_matches_interpreter() {
        let t = Topos::finset();
        let mut env = Env::new(&t);
        let a = t.constant(2);
        let b = t.constant(3);
        env.add_object("A", &a);
        env.add_object("B", &b);
        let f = t.morphism(&a, &b, vec![vec![2, 0]]).unwrap();
        env.add_morphism("f", &f);
        let s = t.subobject_of_elements(&b, &[vec![0, 2]]).unwrap();
        env.add_subobject("S", TypeExpr::Named("B".into()), &s).unwrap();
        for src in [
            "forall x:A. mem(f(x), S)",
            "exists y:B. not mem(y, S)",
            "x:A = x:A implies mem(f(x), S)",
            "{ y:B | mem(y, S) or y = f(x:A) } = { y:B | mem(y, S) }",
            "forall p:P(A). exists x:A. mem(x, p) or p = { z:A | false }",
            "(x:A, y:B) = (x, y) and q:Omega",
        ] {
            let e = parse(src).unwrap();
            assert!(matches!(oracle_agrees(&e, &env).unwrap(), Ok(n) if n >= 1), "{src}");
        }
    }
}
