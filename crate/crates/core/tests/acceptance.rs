//! Acceptance suite: one test per criterion, each printing a pass line with
//! its runtime and asserting the stated budget. Tests serialize on a global
//! lock so the runtime budgets are measured without contention.
//!
//! Run with `cargo test -p itercode --test acceptance -- --nocapture`.

use itercode::algebra::encode;
use itercode::analysis::{
    degree3_theta_check, detect_grouping, implied_r_zero_pairs, m13_exponent, m_matrix,
    min_det_scan, norm_equation_search, quaternion_theta_check, springer_residues,
    anisotropic_over_fq, GroupKind, QuadraticForm, ScanMode, Verdict,
};
use itercode::analysis::modular::exact_combination;
use itercode::analysis::squares::{sqrt_in_quadratic_ext, KPair};
use itercode::catalog::{make_code, CodeName, CodeSpec, Overrides};
use itercode::decode::{
    brute_force_ml, build_real_lattice, qr_structure, sphere_decode, vectorize,
};
use itercode::numfield::builtin_field;
use itercode::sim::{run_bler, SimConfig};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use std::sync::Mutex;
use std::time::Instant;

static LOCK: Mutex<()> = Mutex::new(());

fn serialized() -> std::sync::MutexGuard<'static, ()> {
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn budget(criterion: u32, start: Instant, limit_s: f64, detail: &str) {
    let elapsed = start.elapsed().as_secs_f64();
    println!("ACCEPTANCE {criterion} pass ({elapsed:.2}s, budget {limit_s}s): {detail}");
    assert!(
        elapsed < limit_s,
        "criterion {criterion} exceeded its runtime budget: {elapsed:.2}s >= {limit_s}s"
    );
}

fn code_with(name: CodeName, theta: Option<&str>, scaled: Option<bool>) -> CodeSpec {
    make_code(
        name,
        &Overrides {
            theta: theta.map(|s| s.to_string()),
            scaled,
            ..Default::default()
        },
    )
    .unwrap()
}

fn random_h(side: usize, rng: &mut StdRng) -> DMatrix<Complex64> {
    DMatrix::from_fn(side / 2, side, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

#[test]
fn criterion_01_leading_orthogonality_and_exponent_13() {
    let _g = serialized();
    let start = Instant::now();
    for theta in ["-17", "-1", "i"] {
        let code = code_with(CodeName::IterSilver, Some(theta), None);
        let m = m_matrix(&code.basis, None).unwrap();
        assert!(m.exact);
        for k in 0..4 {
            for l in 0..4 {
                if k != l {
                    assert!(
                        m.is_zero(k, l),
                        "theta={theta}: B_{}B_{}* + B_{}B_{}* != 0",
                        k + 1,
                        l + 1,
                        l + 1,
                        k + 1
                    );
                }
            }
        }
        assert_eq!(m13_exponent(&m), 13, "theta={theta}");
    }
    budget(
        1,
        start,
        1.0,
        "iter_silver theta in {-17,-1,i}: leading 4x4 exactly orthogonal, exponent 13",
    );
}

#[test]
fn criterion_02_conditional_four_group_exponent_10() {
    let _g = serialized();
    let start = Instant::now();
    let code = code_with(CodeName::IterSilver, Some("-1"), Some(true));
    let m = m_matrix(&code.basis, None).unwrap();
    assert!(m.exact);
    // The tabulated 8-row pattern lists the symbols group by group
    // (Gamma_1..Gamma_4, then Gamma^C): in that order the first 8 rows are
    // 2x2-block diagonal on the left half and dense against the
    // conditioned right half. Verified here against the exact mask.
    let order: [usize; 16] = [1, 11, 3, 9, 4, 10, 2, 12, 5, 6, 7, 8, 13, 14, 15, 16];
    let idx = |k: usize| order[k] - 1;
    for br in 0..4usize {
        for bc in 0..8usize {
            let block_zero = bc < 4 && bc != br;
            let mut any_nonzero = false;
            for r in 2 * br..2 * br + 2 {
                for c in 2 * bc..2 * bc + 2 {
                    if block_zero {
                        assert!(
                            m.is_zero(idx(r), idx(c)),
                            "block ({br},{bc}) should vanish, M[{}][{}] != 0",
                            order[r],
                            order[c]
                        );
                    } else if !m.is_zero(idx(r), idx(c)) {
                        any_nonzero = true;
                    }
                }
            }
            if !block_zero {
                assert!(any_nonzero, "block ({br},{bc}) should be nonzero");
            }
        }
    }
    let hint = code.paper_hint.clone().expect("paper partition ships with the code");
    let report = detect_grouping(&m, Some(&hint));
    assert_eq!(report.hint_verified, Some(true));
    assert_eq!(report.result.kind, GroupKind::Conditional);
    assert_eq!(report.result.exponent, 10);
    budget(
        2,
        start,
        1.0,
        "scaled theta=-1 silver: group-ordered 8-row block pattern and partition exponent 10",
    );
}

#[test]
fn criterion_03_non_diversity_witness_for_jafarkhani() {
    let _g = serialized();
    let start = Instant::now();
    let code = code_with(CodeName::Jafarkhani, None, None);
    // X = alpha_{-1}(lambda(j), I): coefficient vector e3 + e5
    let mut g = vec![0i64; 8];
    g[2] = 1;
    g[4] = 1;
    let x = exact_combination(&code.basis, &g).unwrap();
    assert!(!x.is_zero());
    assert!(x.det().unwrap().is_zero(), "det of the witness must vanish exactly");
    // the norm-equation search reproduces z = lambda(j) at bound <= 2
    let (alg, tau, theta, gens) = code.norm_search_setup().unwrap();
    let search = norm_equation_search(&alg, &tau, &theta, 2, &gens).unwrap();
    let z = search.falsifier.expect("z with z*tau(z) = -1 exists");
    let prod = z.mul(&z.apply_aut(&tau).unwrap()).unwrap();
    assert_eq!(prod, alg.from_scalar(theta));
    budget(
        3,
        start,
        1.0,
        "jafarkhani theta=-1: exact zero determinant from z = lambda(j), found at bound <= 2",
    );
}

#[test]
fn criterion_04_diversity_scans_find_no_zeros() {
    let _g = serialized();
    let start = Instant::now();
    for (name, theta) in [(CodeName::IterSilver, "-17"), (CodeName::IterGolden, "1-i")] {
        let code = code_with(name, Some(theta), None);
        // (a) difference alphabet {-2,0,2}: 3^16 exceeds the 2^24 budget, so
        // the scan falls back to 10^6 random samples
        let exhaustive_size = 3u128.pow(16);
        assert!(exhaustive_size > (1u128 << 24));
        let scan_a = min_det_scan(
            &code,
            &[-2, 0, 2],
            ScanMode::Random {
                samples: 1_000_000,
                seed: 2024,
            },
            1 << 24,
        )
        .unwrap();
        assert_eq!(scan_a.count_zero, 0, "{}: zero determinant in (a)", code.label);
        assert!(scan_a.min_abs_det > 0.0, "{}", code.label);
        // (b) 10^6 random integer vectors with entries in [-4, 4]
        let scan_b = min_det_scan(
            &code,
            &[-4, -3, -2, -1, 0, 1, 2, 3, 4],
            ScanMode::Random {
                samples: 1_000_000,
                seed: 4096,
            },
            1 << 24,
        )
        .unwrap();
        assert_eq!(scan_b.count_zero, 0, "{}: zero determinant in (b)", code.label);
        assert!(scan_b.min_abs_det > 0.0);
        println!(
            "  {}: min|det| = {:.6e} (alphabet a), {:.6e} (alphabet b)",
            code.label, scan_a.min_abs_det, scan_b.min_abs_det
        );
    }
    budget(
        4,
        start,
        300.0,
        "iter_silver(-17) and iter_golden(1-i): 4 x 10^6 samples, no vanishing determinant",
    );
}

#[test]
fn criterion_05_quadratic_form_certificates() {
    let _g = serialized();
    let start = Instant::now();
    // the Q(i) quaternion tower with a=3, gamma=1+i, theta=1-i
    let f = builtin_field("Q(i)").unwrap();
    let report = quaternion_theta_check(
        &f,
        &f.from_int(3),
        &f.parse_element("1+i").unwrap(),
        &f.parse_element("1-i").unwrap(),
        2,
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::DivisionCertified);
    assert!(!report.square_class_is_square);
    assert!(report
        .springer_certificates
        .iter()
        .any(|s| s.certifies && s.prime == "3"));

    // golden chain: <1,-5,5i,-(1-i)> at 2+i; unit form <1,-theta> and the
    // (2-i)-residue form both anisotropic over F5
    let theta = f.parse_element("1-i").unwrap();
    let form = QuadraticForm::new(
        f.clone(),
        vec![
            f.one(),
            f.from_int(-5),
            f.parse_element("5i").unwrap(),
            theta.neg(),
        ],
    )
    .unwrap();
    let (unit, residue) = springer_residues(&form, &f.parse_element("2+i").unwrap()).unwrap();
    assert_eq!(unit.fq.q(), 5);
    assert!(anisotropic_over_fq(&unit.fq, &unit.coeffs).unwrap());
    assert!(anisotropic_over_fq(&residue.fq, &residue.coeffs).unwrap());

    // theta/gamma = (1-i)/i not in K^x2; the inner obstruction is the
    // rational non-square 2 (i.e. sqrt2 outside K)
    let w = theta
        .mul(&f.parse_element("i").unwrap().inv().unwrap())
        .unwrap();
    let sq = sqrt_in_quadratic_ext(&f, &f.from_int(5), &KPair::from_f(w, &f)).unwrap();
    assert!(sq.is_none());
    budget(
        5,
        start,
        1.0,
        "quaternion-tower and golden-code certificate chains reach the expected verdicts",
    );
}

#[test]
fn criterion_06_degree3_checks_and_exponent_30() {
    let _g = serialized();
    let start = Instant::now();
    let l = builtin_field("Q(zeta7,i)").unwrap();
    let tau = l.aut("tau").unwrap();
    assert!(degree3_theta_check(&l.constant("sqrtm7").unwrap(), &tau).unwrap());
    assert!(!degree3_theta_check(&l.from_int(-1), &tau).unwrap());

    // 18-matrix basis: mu1 V_j Gamma^p vs mu2 V_k Gamma^p orthogonality,
    // exactly, for all j,k and every power p
    let base = code_with(CodeName::Deg3Ex1, None, None);
    let m_base = m_matrix(&base.basis, None).unwrap();
    assert!(m_base.exact);
    for p in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let a = 6 * p + j;
                let b = 6 * p + 3 + k;
                assert!(
                    m_base.is_zero(a, b),
                    "D_{} vs D_{} should be orthogonal",
                    a + 1,
                    b + 1
                );
            }
        }
    }

    // iterated code with theta=-1: the shipped paper partition verifies on
    // the exact mask with exponent 24 + 6 = 30
    let iter = code_with(CodeName::IterDeg3Ex1, Some("-1"), None);
    assert_eq!(iter.claimed_exponent, Some(30));
    let m = m_matrix(&iter.basis, None).unwrap();
    assert!(m.exact);
    let hint = iter.paper_hint.clone().unwrap();
    let report = detect_grouping(&m, Some(&hint));
    assert_eq!(report.hint_verified, Some(true));
    assert_eq!(report.result.exponent, 30);
    // the mask actually supports a smaller exponent (the within-block
    // mu-orthogonality splits each group of six); record what the free
    // search finds without gating on it
    let free = detect_grouping(&m, None);
    println!(
        "  free grouping search: kind {:?}, exponent {}",
        free.result.kind, free.result.exponent
    );
    budget(
        6,
        start,
        10.0,
        "degree-3 theta criterion, 18-matrix orthogonality, exponent 30 from the mask",
    );
}

#[test]
fn criterion_07_sphere_decoder_matches_oracle() {
    let _g = serialized();
    let start = Instant::now();
    // 1000 random instances, kappa <= 8, 4-PAM
    let mut rng = StdRng::seed_from_u64(7777);
    let alphabet4 = [-3i64, -1, 1, 3];
    for i in 0..1000 {
        let kappa = 4 + (i % 5); // 4..8
        let b = DMatrix::from_fn(kappa, kappa, |_, _| {
            let x: f64 = StandardNormal.sample(&mut rng);
            x
        });
        let lattice = itercode::decode::RealLattice {
            b,
            rank: kappa,
            side: 0,
            kappa,
        };
        let y = DVector::from_fn(kappa, |_, _| {
            let x: f64 = StandardNormal.sample(&mut rng);
            3.0 * x
        });
        let sd = sphere_decode(&lattice, &y, &alphabet4, None).unwrap();
        let bf = brute_force_ml(&lattice, &y, &alphabet4, 1 << 24).unwrap();
        assert_eq!(sd.g_hat, bf.g_hat, "instance {i}");
        assert_eq!(sd.metric, bf.metric, "instance {i}");
        assert!(sd.nodes_visited <= bf.nodes_visited);
    }
    // 100 instances of the full iter_silver kappa=16 with 2-PAM
    let code = code_with(CodeName::IterSilver, None, None);
    let floats = code.float_basis();
    let mut done = 0;
    while done < 100 {
        let h = random_h(4, &mut rng);
        let lattice = build_real_lattice(&code, &h).unwrap();
        if lattice.rank < 16 {
            continue;
        }
        let g: Vec<i64> = (0..16).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        let x = encode(&floats, &g).unwrap();
        let mut y_mat = &h * &x;
        for entry in y_mat.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *entry += Complex64::new(re, im) * 0.5;
        }
        let y = vectorize(&y_mat);
        let sd = sphere_decode(&lattice, &y, &[-1, 1], None).unwrap();
        let bf = brute_force_ml(&lattice, &y, &[-1, 1], 1 << 24).unwrap();
        assert_eq!(sd.g_hat, bf.g_hat);
        assert_eq!(sd.metric, bf.metric);
        assert!(sd.nodes_visited <= bf.nodes_visited);
        done += 1;
    }
    budget(
        7,
        start,
        300.0,
        "sphere decoder equals the exhaustive oracle on 1000 + 100 instances",
    );
}

#[test]
fn criterion_08_r_structure_follows_m_mask() {
    let _g = serialized();
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(888);
    for name in CodeName::ALL {
        let code = make_code(name, &Overrides::default()).unwrap();
        let m = m_matrix(&code.basis, None).unwrap();
        assert!(m.exact, "{}", code.label);
        let implied = implied_r_zero_pairs(&m);
        for _ in 0..50 {
            let h = random_h(code.side, &mut rng);
            let lattice = build_real_lattice(&code, &h).unwrap();
            let qr = qr_structure(&lattice);
            let scale = qr.r.norm();
            for &(k, l) in &implied {
                assert!(
                    qr.r[(k, l)].abs() <= 1e-9 * scale,
                    "{}: R[{k}][{l}] = {} escapes the implied zero",
                    code.label,
                    qr.r[(k, l)]
                );
            }
        }
    }
    budget(
        8,
        start,
        30.0,
        "QR zero structure contains every M-implied zero for all 11 catalog codes x 50 channels",
    );
}

#[test]
fn criterion_09_rank_deficiency_reproduction() {
    let _g = serialized();
    let start = Instant::now();
    let sqrt2 = make_code(
        CodeName::IterAlamouti,
        &Overrides {
            base: Some("Q(sqrt2)".into()),
            ..Default::default()
        },
    )
    .unwrap();
    let identity_padded = DMatrix::from_fn(2, 4, |r, c| {
        Complex64::new(if r == c { 1.0 } else { 0.0 }, 0.0)
    });
    let lattice = build_real_lattice(&sqrt2, &identity_padded).unwrap();
    assert!(
        lattice.rank < sqrt2.kappa,
        "totally real base must collapse the rank (rank {} of {})",
        lattice.rank,
        sqrt2.kappa
    );
    let silver = code_with(CodeName::IterSilver, None, None);
    let lattice = build_real_lattice(&silver, &identity_padded).unwrap();
    assert_eq!(lattice.rank, 16, "imaginary quadratic base stays full rank");
    budget(
        9,
        start,
        1.0,
        "Q(sqrt2)-based iterated Alamouti rank-deficient; silver full rank",
    );
}

#[test]
fn criterion_10_simulation_properties() {
    let _g = serialized();
    let start = Instant::now();
    let grid = vec![6.0, 10.0, 14.0, 18.0, 22.0];
    let trials = 10_000;
    let mut results = Vec::new();
    for (name, theta) in [(CodeName::IterSilver, "-17"), (CodeName::Jafarkhani, "-1")] {
        let cfg = SimConfig {
            code: code_with(name, Some(theta), None),
            snr_db_grid: grid.clone(),
            trials_per_point: trials,
            alphabet: vec![-1, 1],
            seed: 20240,
            workers: 0,
            noiseless: false,
        };
        let result = run_bler(&cfg).unwrap();
        for row in &result.rows {
            println!(
                "  {} snr={} bler={:.5} ({} errors, ci {:.5}, mean nodes {:.1})",
                cfg.code.label, row.snr_db, row.bler, row.block_errors, row.ci95_halfwidth,
                row.mean_nodes
            );
        }
        // (a) BLER non-increasing within twice the binomial CI
        for w in result.rows.windows(2) {
            assert!(
                w[1].bler <= w[0].bler + 2.0 * (w[0].ci95_halfwidth + w[1].ci95_halfwidth),
                "{}: BLER rose from {} to {} between {} and {} dB",
                cfg.code.label,
                w[0].bler,
                w[1].bler,
                w[0].snr_db,
                w[1].snr_db
            );
        }
        results.push(result);
    }
    // (b) high-SNR slope: the fully diverse iterated silver decays faster
    let slope = |rows: &[itercode::sim::SimRow]| {
        let floor = 0.5 / trials as f64;
        let b18 = rows[3].bler.max(floor);
        let b22 = rows[4].bler.max(floor);
        (b18.log10() - b22.log10()) / 0.4
    };
    let silver_slope = slope(&results[0].rows);
    let jafarkhani_slope = slope(&results[1].rows);
    println!("  slope 18->22 dB: iter_silver {silver_slope:.2}, jafarkhani {jafarkhani_slope:.2}");
    assert!(
        silver_slope > jafarkhani_slope,
        "full diversity must show in the high-SNR slope"
    );
    // (c) fixed seed: bit-identical rows for 1 and 8 workers
    let small = SimConfig {
        code: code_with(CodeName::IterSilver, Some("-17"), None),
        snr_db_grid: vec![10.0, 14.0],
        trials_per_point: 500,
        alphabet: vec![-1, 1],
        seed: 99,
        workers: 1,
        noiseless: false,
    };
    let one = run_bler(&small).unwrap();
    let mut cfg8 = small.clone();
    cfg8.workers = 8;
    let eight = run_bler(&cfg8).unwrap();
    let render = |r: &itercode::sim::SimResult| {
        r.rows
            .iter()
            .map(|row| {
                format!(
                    "{},{},{},{},{},{}",
                    row.snr_db, row.trials, row.block_errors, row.bler, row.mean_nodes,
                    row.ci95_halfwidth
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(render(&one), render(&eight));
    budget(
        10,
        start,
        1800.0,
        "BLER monotone within 2xCI, diversity slope ordering, worker-invariant output",
    );
}
