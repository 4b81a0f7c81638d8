//! Invariants as proptest properties over random small FinSet and Sierpinski data.

use proptest::prelude::*;
use spantopos::allegory::{Allegory, Relation};
use spantopos::indeterminates::IndeterminateCategory;
use spantopos::logic::{eval_closed, parse, Env, TypeExpr};
use spantopos::span::{span_compose, stable_equiv, vertical_iso, Isos, Span, Verdict};
use spantopos::subobject::Subobject;
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::{Object, Topos};

/// FinSet (`stages = 1`) or Sierpinski (`stages = 2`).
fn topos(stages: usize) -> Topos {
    if stages == 1 {
        Topos::finset()
    } else {
        Topos::sierpinski()
    }
}

/// Raw description of a presheaf: stage sizes and the restriction table.
#[derive(Debug, Clone)]
struct Shape {
    stages: usize,
    s0: usize,
    s1: usize,
    table: Vec<usize>,
}

impl Shape {
    fn build(&self, t: &Topos) -> Object {
        if self.stages == 1 {
            t.constant(self.s0)
        } else {
            t.presheaf(&[self.s0, self.s1], &[("u", self.table.clone())]).unwrap()
        }
    }
}

fn shape(stages: usize, max: usize) -> impl Strategy<Value = Shape> {
    (0..=max, 0..=max).prop_flat_map(move |(s0, s1)| {
        let s1 = if stages == 1 || s0 == 0 { 0 } else { s1 };
        proptest::collection::vec(0..s0.max(1), s1).prop_map(move |table| Shape { stages, s0, s1, table })
    })
}

/// A topos with two objects of it.
fn pair_of_objects(max: usize) -> impl Strategy<Value = (usize, Shape, Shape)> {
    (1..=2usize).prop_flat_map(move |st| (Just(st), shape(st, max), shape(st, max)))
}

fn pick<T: Clone>(items: &[T], i: usize) -> Option<T> {
    (!items.is_empty()).then(|| items[i % items.len()].clone())
}

fn subobjects(t: &Topos, a: &Object) -> Vec<Subobject> {
    t.subobjects(a, DEFAULT_LIMIT).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn quantifiers_are_adjoint_to_pullback(
        (st, a, b) in pair_of_objects(3),
        (gi, si, ui) in (any::<usize>(), any::<usize>(), any::<usize>()),
    ) {
        let t = topos(st);
        let (a, b) = (a.build(&t), b.build(&t));
        let Some(g) = pick(&t.homs(&a, &b, DEFAULT_LIMIT).unwrap(), gi) else { return Ok(()) };
        let s = pick(&subobjects(&t, &a), si).unwrap();
        let u = pick(&subobjects(&t, &b), ui).unwrap();
        let pulled = t.pullback_subobject(&g, &u);
        prop_assert_eq!(u.leq(&t.forall_along(&g, &s)), pulled.leq(&s));
        prop_assert_eq!(t.exists_along(&g, &s).leq(&u), s.leq(&pulled));
    }

    #[test]
    fn forall_along_projection_undoes_pullback(
        (st, a, b) in pair_of_objects(2),
        si in any::<usize>(),
    ) {
        let t = topos(st);
        let (a, b) = (a.build(&t), b.build(&t));
        prop_assume!(!t.global_elements(&b).is_empty());
        let p = t.product(&a, &b);
        let s = pick(&subobjects(&t, &a), si).unwrap();
        prop_assert_eq!(t.forall_along(&p.p1, &t.pullback_subobject(&p.p1, &s)), s);
    }

    #[test]
    fn span_composition_is_associative_and_unital_up_to_iso(
        st in 1..=2usize,
        shapes in proptest::collection::vec(shape(2, 2), 4),
        picks in proptest::collection::vec(any::<usize>(), 6),
    ) {
        let t = topos(st);
        let objs: Vec<Object> = shapes
            .iter()
            .map(|s| Shape { stages: st, ..s.clone() }.build(&t))
            .collect();
        let leg = |d: &Object, c: &Object, i: usize| pick(&t.homs(d, c, DEFAULT_LIMIT).unwrap(), i);
        // spans A <- D -> B <- E -> C <- G -> H with apexes drawn from the same objects
        let (a, b, c, h) = (&objs[0], &objs[1], &objs[2], &objs[3]);
        let mk = |x: &Object, y: &Object, i: usize, j: usize| -> Option<Span> {
            let apex = t.product(x, y).object;
            let l = leg(&apex, x, i)?;
            let r = leg(&apex, y, j)?;
            Span::new(l, r).ok()
        };
        let (Some(s1), Some(s2), Some(s3)) = (
            mk(a, b, picks[0], picks[1]),
            mk(b, c, picks[2], picks[3]),
            mk(c, h, picks[4], picks[5]),
        ) else { return Ok(()) };
        let left = span_compose(&t, &span_compose(&t, &s1, &s2).unwrap(), &s3).unwrap();
        let right = span_compose(&t, &s1, &span_compose(&t, &s2, &s3).unwrap()).unwrap();
        prop_assert!(vertical_iso(&t, &left, &right).is_some());
        let unit = span_compose(&t, &Span::identity(a), &s1).unwrap();
        prop_assert!(vertical_iso(&t, &unit, &s1).is_some());
        let unit = span_compose(&t, &s1, &Span::identity(b)).unwrap();
        prop_assert!(vertical_iso(&t, &unit, &s1).is_some());
        prop_assert_eq!(stable_equiv(&t, &Isos, &left, &right, &[]).unwrap(), Verdict::Related);
    }

    #[test]
    fn converse_is_an_anti_involution(
        (n, m, k) in (0..=3usize, 0..=3usize, 0..=3usize),
        bits in proptest::collection::vec(any::<bool>(), 27),
    ) {
        let t = Topos::finset();
        let al = Allegory::new(&t);
        let (a, b, c) = (t.constant(n), t.constant(m), t.constant(k));
        let rel = |x: &Object, y: &Object, off: usize| {
            let pairs: Vec<(usize, usize)> = (0..x.size(0))
                .flat_map(|i| (0..y.size(0)).map(move |j| (i, j)))
                .filter(|&(i, j)| bits[(off + 3 * i + j) % bits.len()])
                .collect();
            Relation::from_pairs(&t, x, y, &[pairs]).unwrap()
        };
        let (r, s, r2) = (rel(&a, &b, 0), rel(&b, &c, 9), rel(&a, &b, 18));
        let comp = al.compose(&r, &s).unwrap();
        prop_assert_eq!(al.converse(&comp), al.compose(&al.converse(&s), &al.converse(&r)).unwrap());
        prop_assert_eq!(al.converse(&al.converse(&r)), r.clone());
        prop_assert_eq!(
            al.converse(&al.meet(&r, &r2).unwrap()),
            al.meet(&al.converse(&r), &al.converse(&r2)).unwrap()
        );
        if r.leq(&r2) {
            prop_assert!(al.converse(&r).leq(&al.converse(&r2)));
        }
        // division adjunction with X = s
        let target = rel(&a, &c, 5);
        let div = al.right_division(&target, &r).unwrap();
        prop_assert_eq!(comp.leq(&target), s.leq(&div));
    }

    #[test]
    fn graph_and_ungraph_are_inverse(
        (st, a, b) in pair_of_objects(2),
        i in any::<usize>(),
    ) {
        let t = topos(st);
        let al = Allegory::new(&t);
        let (a, b) = (a.build(&t), b.build(&t));
        let Some(f) = pick(&t.homs(&a, &b, DEFAULT_LIMIT).unwrap(), i) else { return Ok(()) };
        let g = al.graph(&f);
        prop_assert!(al.is_map(&g));
        prop_assert_eq!(al.ungraph(&g), Some(f));
    }

    #[test]
    fn class_equal_is_an_equivalence_and_congruence(
        n in 0..=2usize,
        picks in proptest::collection::vec(any::<usize>(), 4),
    ) {
        let t = Topos::finset();
        let cx = IndeterminateCategory::adjoin(&t, &t.constant(n));
        let two = t.constant(2);
        let homs = cx.hom_classes(&two, &two, DEFAULT_LIMIT).unwrap();
        let u = pick(&homs, picks[0]).unwrap();
        let v = pick(&homs, picks[1]).unwrap();
        let w = pick(&homs, picks[2]).unwrap();
        prop_assert!(cx.class_equal(&u, &u));
        prop_assert_eq!(cx.class_equal(&u, &v), cx.class_equal(&v, &u));
        // a second representative of u's class: u composed with an identity
        let u2 = cx.compose(&u, &cx.identity(&two)).unwrap();
        prop_assert!(cx.class_equal(&u, &u2));
        prop_assert!(cx.class_equal(&cx.compose(&u, &w).unwrap(), &cx.compose(&u2, &w).unwrap()));
        prop_assert!(cx.class_equal(&cx.compose(&w, &u).unwrap(), &cx.compose(&w, &u2).unwrap()));
    }

    #[test]
    fn bound_variable_renaming_preserves_truth(
        var in "[a-w]",
        template in 0..4usize,
    ) {
        let t = Topos::finset();
        let mut env = Env::new(&t);
        let (a, b) = (t.constant(2), t.constant(3));
        env.add_object("A", &a);
        env.add_object("B", &b);
        env.add_morphism("f", &t.morphism(&a, &b, vec![vec![2, 0]]).unwrap());
        let s = t.subobject(&b, vec![vec![true, false, true]]).unwrap();
        env.add_subobject("S", TypeExpr::Named("B".into()), &s).unwrap();
        let forms = [
            "forall {v}:A. mem(f({v}), S)",
            "exists {v}:B. not mem({v}, S)",
            "forall {v}:A. exists w:B. f({v}) = w",
            "exists {v}:A. f({v}) = f({v}) and mem(f({v}), S)",
        ];
        prop_assume!(var != "w" || template != 2);
        let src = forms[template];
        let reference = eval_closed(&parse(&src.replace("{v}", "x")).unwrap(), &env).unwrap();
        let renamed = eval_closed(&parse(&src.replace("{v}", &var)).unwrap(), &env).unwrap();
        prop_assert_eq!(reference, renamed);
    }
}

#[test]
fn exhaustive_adjunction_at_size_two_sierpinski() {
    let t = Topos::sierpinski();
    let objs: Vec<Object> = [(1, 1, vec![0]), (2, 1, vec![1]), (1, 2, vec![0, 0]), (2, 2, vec![0, 1])]
        .into_iter()
        .map(|(s0, s1, table)| t.presheaf(&[s0, s1], &[("u", table)]).unwrap())
        .collect();
    for a in &objs {
        for b in &objs {
            for g in t.homs(a, b, DEFAULT_LIMIT).unwrap() {
                for s in subobjects(&t, a) {
                    let fa = t.forall_along(&g, &s);
                    let ex = t.exists_along(&g, &s);
                    for u in subobjects(&t, b) {
                        let pulled = t.pullback_subobject(&g, &u);
                        assert_eq!(u.leq(&fa), pulled.leq(&s));
                        assert_eq!(ex.leq(&u), s.leq(&pulled));
                    }
                }
            }
        }
    }
}

#[test]
fn generators_of_the_boolean_class_are_honoured() {
    use spantopos::boolean::booleanize;
    use spantopos::congruence::ObjectUniverse;
    let t = Topos::sierpinski();
    let fork = t.presheaf(&[1, 2], &[("u", vec![0, 0])]).unwrap();
    let u = ObjectUniverse::new(&t, &[("y0", t.representable(0).clone()), ("F", fork)]);
    let view = booleanize(&t, &u).unwrap();
    let al = view.allegory();
    let members = view.class().members(&u);
    assert!(!members.is_empty());
    for (_, _, w) in members {
        let diag = al.rel_of_span(&Span::diagonal(&w));
        assert_eq!(view.closure(&diag), view.identity(w.cod()));
    }
}
