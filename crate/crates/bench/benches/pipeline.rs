use criterion::{black_box, criterion_group, criterion_main, Criterion};
use cusp_bench::{charge_three, four_six_five};
use cusp_core::{build_complex, close_surface, dual_cycle, monodromy, sl2z_word, verify_type_iii, CloseOptions, Cycle};

fn cycles(c: &mut Criterion) {
    let long = Cycle::new(vec![3, 2, 2, 2, 3, 2, 2, 2, 2, 2, 2]).unwrap();
    c.bench_function("dual (6,9)", |b| b.iter(|| dual_cycle(black_box(&Cycle::new(vec![6, 9]).unwrap()))));
    c.bench_function("monodromy word", |b| b.iter(|| sl2z_word(&monodromy(black_box(&long)))));
}

fn four_six_five_bench(c: &mut Criterion) {
    let base = four_six_five();
    let dual = dual_cycle(&base.bookkeeping_cycle()).unwrap();
    let surface = close_surface(&base, CloseOptions::default()).unwrap();
    let complex = build_complex(&surface).unwrap();
    c.bench_function("(4,6,5) close", |b| b.iter(|| close_surface(black_box(&base), CloseOptions::default())));
    c.bench_function("(4,6,5) triangulate", |b| b.iter(|| build_complex(black_box(&surface))));
    c.bench_function("(4,6,5) verify", |b| b.iter(|| verify_type_iii(black_box(&complex), &dual)));
}

fn collapsed(c: &mut Criterion) {
    let base = charge_three();
    let dual = dual_cycle(&base.bookkeeping_cycle()).unwrap();
    c.bench_function("charge three pipeline", |b| {
        b.iter(|| {
            let s = close_surface(black_box(&base), CloseOptions::default()).unwrap();
            verify_type_iii(&build_complex(&s).unwrap(), &dual).unwrap()
        })
    });
}

criterion_group!(benches, cycles, four_six_five_bench, collapsed);
criterion_main!(benches);
