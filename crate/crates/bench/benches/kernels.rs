use criterion::{criterion_group, criterion_main, Criterion};
use itercode::analysis::{m_matrix, min_det_scan, ScanMode};
use itercode::catalog::{make_code, CodeName, Overrides};
use itercode::decode::{build_real_lattice, sphere_decode, vectorize};
use itercode::sim::{sample_channel, sample_noise};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_field_mul(c: &mut Criterion) {
    let l = itercode::builtin_field("Q(zeta7,i)").unwrap();
    let x = l.constant("sqrtm7").unwrap();
    let y = l.constant("nu2").unwrap().add(&l.constant("i").unwrap()).unwrap();
    c.bench_function("field_mul_deg12", |b| {
        b.iter(|| black_box(&x).mul(black_box(&y)).unwrap())
    });
}

fn bench_m_matrix(c: &mut Criterion) {
    let silver = make_code(
        CodeName::IterSilver,
        &Overrides {
            theta: Some("-1".into()),
            ..Default::default()
        },
    )
    .unwrap();
    c.bench_function("m_matrix_exact_iter_silver", |b| {
        b.iter(|| m_matrix(black_box(&silver.basis), None).unwrap())
    });
}

fn bench_sphere_decode(c: &mut Criterion) {
    let code = make_code(CodeName::IterSilver, &Overrides::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let h: DMatrix<Complex64> = sample_channel(2, 4, &mut rng);
    let lattice = build_real_lattice(&code, &h).unwrap();
    let g = vec![1i64; 16];
    let x = itercode::algebra::encode(&code.float_basis(), &g).unwrap();
    let y_mat = &h * &x + sample_noise(2, 4, 0.5, &mut rng);
    let y = vectorize(&y_mat);
    c.bench_function("sphere_decode_iter_silver_2pam", |b| {
        b.iter(|| sphere_decode(black_box(&lattice), black_box(&y), &[-1, 1], None).unwrap())
    });
}

fn bench_det_scan(c: &mut Criterion) {
    let code = make_code(CodeName::IterSilver, &Overrides::default()).unwrap();
    c.bench_function("min_det_scan_10k_samples", |b| {
        b.iter(|| {
            min_det_scan(
                black_box(&code),
                &[-2, 0, 2],
                ScanMode::Random {
                    samples: 10_000,
                    seed: 3,
                },
                1 << 24,
            )
            .unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_field_mul,
    bench_m_matrix,
    bench_sphere_decode,
    bench_det_scan
);
criterion_main!(benches);
