use criterion::{black_box, criterion_group, criterion_main, Criterion};
use spantopos::allegory::Allegory;
use spantopos::boolean::booleanize;
use spantopos::congruence::ObjectUniverse;
use spantopos::topos::DEFAULT_LIMIT;
use spantopos::Topos;
use spantopos_bench::fork;

fn kernel(c: &mut Criterion) {
    let fin = Topos::finset();
    let (a, b) = (fin.constant(3), fin.constant(3));
    c.bench_function("finset/homs 3->3", |bch| {
        bch.iter(|| fin.homs(black_box(&a), &b, DEFAULT_LIMIT))
    });
    c.bench_function("finset/exponential 3^3", |bch| {
        bch.iter(|| fin.exponential(black_box(&a), &b))
    });

    let sie = Topos::sierpinski();
    let f = fork(&sie);
    c.bench_function("sierpinski/subobjects F×F", |bch| {
        let p = sie.product(&f, &f).object;
        bch.iter(|| sie.subobjects(black_box(&p), DEFAULT_LIMIT))
    });
}

fn allegory(c: &mut Criterion) {
    let t = Topos::finset();
    let al = Allegory::new(&t);
    let three = t.constant(3);
    let rels = al.relations(&three, &three, DEFAULT_LIMIT).expect("512 relations");
    let (r, phi) = (&rels[137], &rels[301]);
    c.bench_function("finset/right_division 3", |bch| {
        bch.iter(|| al.right_division(black_box(r), phi))
    });
    c.bench_function("finset/compose 3", |bch| bch.iter(|| al.compose(black_box(r), phi)));
}

fn boolean(c: &mut Criterion) {
    let t = Topos::sierpinski();
    let u = ObjectUniverse::new(&t, &[("y0", t.representable(0).clone()), ("F", fork(&t))]);
    c.bench_function("sierpinski/booleanize", |bch| {
        bch.iter(|| booleanize(black_box(&t), &u))
    });
}

criterion_group!(benches, kernel, allegory, boolean);
criterion_main!(benches);
