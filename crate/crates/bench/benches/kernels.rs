//! Benchmarks for the hot kernels: Wick products, RTT residuals, transfer
//! matrices and Q-operator construction.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ortholax::context::{standard_context, std_vars};
use ortholax::lax::{self, LaxFamily, LaxSpec};
use ortholax::osc::Register;
use ortholax::poly::MultiPoly;
use ortholax::qsystem::{q_operator, transfer_matrix, ChainSpec, QFamily};
use ortholax::verify::check_rtt;
use ortholax_bench::{default_twists, random_elements};

fn bench_wick(c: &mut Criterion) {
    let (_, elems) = random_elements(64, 1);
    c.bench_function("wick_multiply_deg3_pairs", |b| {
        b.iter(|| {
            let mut acc = 0usize;
            for pair in elems.chunks(2) {
                acc += black_box(pair[0].mul(&pair[1])).terms.len();
            }
            acc
        })
    });
}

fn bench_rtt(c: &mut Criterion) {
    let ctx = standard_context(3);
    let spec = LaxSpec::new(LaxFamily::SpinorDegenerate, 3);
    let x = MultiPoly::var(&ctx, std_vars::X);
    let y = MultiPoly::var(&ctx, std_vars::Y);
    let lx = lax::build_lax(&ctx, &spec, &x).unwrap();
    let ly = lax::build_lax(&ctx, &spec, &y).unwrap();
    c.bench_function("rtt_spinor_r3", |b| {
        b.iter(|| {
            let rep = check_rtt(&ctx, &lx, &ly, 3, serde_json::json!({}));
            assert!(black_box(rep).passed());
        })
    });
}

fn bench_lax_build(c: &mut Criterion) {
    let ctx = standard_context(4);
    let z = MultiPoly::var(&ctx, std_vars::Z);
    let s = MultiPoly::var(&ctx, std_vars::S);
    c.bench_function("build_quad_with_spinor_r4", |b| {
        b.iter(|| black_box(lax::quad_with_spinor(&ctx, 4, Register::None, &z, &s)))
    });
}

fn bench_transfer(c: &mut Criterion) {
    let ctx = standard_context(2);
    let spec = ChainSpec::new(2, 2, default_twists(2)).unwrap();
    c.bench_function("transfer_matrix_r2_n2", |b| {
        b.iter(|| black_box(transfer_matrix(&ctx, &spec, std_vars::Z).unwrap()))
    });
}

fn bench_q_operator(c: &mut Criterion) {
    let ctx = standard_context(3);
    let spec = ChainSpec::new(3, 1, default_twists(3)).unwrap();
    c.bench_function("q_spinor_r3_n1", |b| {
        b.iter(|| {
            black_box(
                q_operator(&ctx, &spec, &QFamily::Spinor { minus: vec![] }, std_vars::Z).unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    bench_wick,
    bench_rtt,
    bench_lax_build,
    bench_transfer,
    bench_q_operator
);
criterion_main!(benches);
