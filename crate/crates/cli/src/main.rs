//! `itercode`: construct codes from the catalog, analyze their decoding
//! complexity, hunt for diversity counterexamples, check the algebraic
//! division criteria, benchmark the sphere decoder, and run Monte Carlo
//! link simulations.
//!
//! Exit codes: 0 success; 1 when `--expect diverse` was given and a
//! counterexample was found; 2 usage errors (including unreadable inputs).

mod emit;

use clap::{Args, Parser, Subcommand};
use emit::{fmt_float, to_json_string, write_output, Csv};
use itercode::analysis::{
    degree3_theta_check, derive_stream, detect_grouping, m13_exponent, m_matrix, min_det_scan,
    quaternion_theta_check, GroupingReport, ScanMode, Verdict,
};
use itercode::catalog::{
    make_code_by_name, CodeName, CodeSpec, CodeSpecJson, Overrides, PartitionHint,
};
use itercode::decode::{build_real_lattice, order_from_grouping, sphere_decode, vectorize};
use itercode::numfield::builtin_field;
use itercode::sim::{noise_variance_for, run_bler, sample_channel, sample_noise, SimConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(
    name = "itercode",
    version,
    about = "Space-time codes from cyclic division algebras: construction, decodability analysis, diversity checks, sphere decoding, link simulation"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// Catalog name (see `itercode catalog list`)
    code: String,
    /// Theta override parsed in the coordinate field, e.g. -17, -1, i, 1-i, sqrtm7
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Use the scaled determinant-preserving map (true/false)
    #[arg(long)]
    scaled: Option<bool>,
    /// Base field override for iter_alamouti: Q or Q(sqrt2)
    #[arg(long)]
    base: Option<String>,
    /// Degree-3 mu1 override (real), e.g. 1 or sqrt7
    #[arg(long)]
    mu1: Option<String>,
    /// Degree-3 mu2 override (totally imaginary), e.g. sqrtm7 or i
    #[arg(long)]
    mu2: Option<String>,
}

impl CodeArgs {
    fn build(&self) -> Result<CodeSpec, String> {
        let mu = match (&self.mu1, &self.mu2) {
            (None, None) => None,
            (Some(a), Some(b)) => Some((a.clone(), b.clone())),
            _ => return Err("--mu1 and --mu2 must be given together".into()),
        };
        let overrides = Overrides {
            theta: self.theta.clone(),
            scaled: self.scaled,
            base: self.base.clone(),
            mu,
        };
        make_code_by_name(&self.code, &overrides).map_err(|e| e.to_string())
    }

    fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "code": self.code,
            "theta": self.theta,
            "scaled": self.scaled,
            "base": self.base,
            "mu": self.mu1.as_ref().zip(self.mu2.as_ref()),
        })
    }

    fn echo_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("code={}", self.code)];
        if let Some(t) = &self.theta {
            lines.push(format!("theta={t}"));
        }
        if let Some(s) = self.scaled {
            lines.push(format!("scaled={s}"));
        }
        if let Some(b) = &self.base {
            lines.push(format!("base={b}"));
        }
        if let (Some(a), Some(b)) = (&self.mu1, &self.mu2) {
            lines.push(format!("mu=({a},{b})"));
        }
        lines
    }
}

#[derive(Subcommand)]
enum Verb {
    /// List catalog codes or print one
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// M-matrix zero structure, grouping, and complexity exponents
    Analyze {
        #[command(flatten)]
        code: CodeArgs,
        /// Partition hint: a JSON file ({"groups": [[...]], "conditioned":
        /// [...]}, 1-based) or "paper" for the shipped paper partition
        #[arg(long)]
        hint: Option<String>,
        /// Write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Determinant scan over a symmetric difference alphabet
    Diversity {
        #[command(flatten)]
        code: CodeArgs,
        /// Comma-separated symmetric alphabet, e.g. -2,0,2
        #[arg(long, default_value = "-2,0,2", allow_hyphen_values = true)]
        alphabet: String,
        /// exhaustive or random
        #[arg(long, default_value = "random")]
        mode: String,
        /// Sample count for random mode
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// RNG seed for random mode
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Candidate budget for exhaustive mode
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
        /// With "diverse": exit 1 when a zero determinant is found
        #[arg(long)]
        expect: Option<String>,
        /// Worker threads for the random scan (default ITERCODE_WORKERS or all cores)
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Algebraic division/diversity criteria for theta
    CheckTheta {
        #[command(subcommand)]
        action: CheckThetaAction,
    },
    /// Sphere-decoder node counts per trial at one SNR
    DecodeBench {
        #[command(flatten)]
        code: CodeArgs,
        /// SNR in dB
        #[arg(long, allow_negative_numbers = true)]
        snr: f64,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Column order: "paper" (basis order) or "grouping" (conditioned last)
        #[arg(long, default_value = "paper")]
        order: String,
        /// Comma-separated PAM alphabet
        #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
        alphabet: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo BLER over an SNR grid (JSON config, CSV output)
    Simulate {
        /// JSON configuration file
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (default stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (overrides config and ITERCODE_WORKERS; 0 = all cores)
        #[arg(long)]
        workers: Option<usize>,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Names with one-line summaries
    List,
    /// Construct one code and print it
    Show {
        #[command(flatten)]
        code: CodeArgs,
        /// Emit the full exact CodeSpec JSON instead of a summary
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckThetaAction {
    /// Quaternion criteria: square class, sign shortcut, Springer residues,
    /// bounded counterexample search
    Quaternion {
        /// Base field F: Q, Q(i), Q(sqrt-7), Q(sqrt2), Q(sqrt5)
        #[arg(long, default_value = "Q")]
        field: String,
        /// a with K = F(sqrt a)
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Integer coordinate bound of the counterexample search
        #[arg(long, default_value_t = 2)]
        bound: i64,
        /// With "diverse": exit 1 on a counterexample verdict
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree-3 criterion: tau(theta^3) != theta^3
    Degree3 {
        /// Coordinate field, e.g. Q(zeta7,i) or Q(zeta7)
        #[arg(long, default_value = "Q(zeta7,i)")]
        field: String,
        /// Automorphism name of tau in that field
        #[arg(long, default_value = "tau")]
        tau: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// With "diverse": exit 1 when the criterion fails
        #[arg(long)]
        expect: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn parse_alphabet(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| format!("bad alphabet entry {t:?}: {e}")))
        .collect()
}

#[derive(Serialize)]
struct AnalyzeReport {
    config: serde_json::Value,
    label: String,
    kappa: usize,
    side: usize,
    exact_mask: bool,
    zero_pairs: usize,
    m13_exponent: usize,
    claimed_exponent: Option<usize>,
    grouping: GroupingReport,
}

#[derive(Serialize)]
struct DiversityReport {
    config: serde_json::Value,
    label: String,
    alphabet: Vec<i64>,
    mode: String,
    evaluated: u64,
    count_zero: u64,
    min_abs_det: f64,
    argmin: Vec<i64>,
    zero_witness: Option<Vec<i64>>,
    fully_diverse_claim: itercode::catalog::Claim,
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.verb {
        Verb::Catalog { action } => match action {
            CatalogAction::List => {
                let mut lines = Vec::new();
                for name in CodeName::ALL {
                    lines.push(format!("{:<16} {}", name.as_str(), name.summary()));
                }
                write_output(None, &lines.join("\n"))?;
                Ok(0)
            }
            CatalogAction::Show { code, json, out } => {
                let spec = code.build()?;
                if json {
                    let payload = CodeSpecJson::from_spec(&spec);
                    write_output(out.as_deref(), &to_json_string(&payload)?)?;
                } else {
                    let mut s = String::new();
                    s.push_str(&format!("label:           {}\n", spec.label));
                    s.push_str(&format!("codeword size:   {0} x {0}\n", spec.side));
                    s.push_str(&format!("kappa:           {}\n", spec.kappa));
                    s.push_str(&format!("field:           {} (degree {})\n", spec.field.name(), spec.field.degree()));
                    s.push_str(&format!("fully diverse:   {:?}\n", spec.fully_diverse_claim));
                    s.push_str(&format!("claimed exponent: {:?}\n", spec.claimed_exponent));
                    s.push_str(&format!("normalization:   {}\n", fmt_float(spec.normalization)));
                    write_output(out.as_deref(), &s)?;
                }
                Ok(0)
            }
        },
        Verb::Analyze { code, hint, out } => {
            let spec = code.build()?;
            let m = m_matrix(&spec.basis, None).map_err(|e| e.to_string())?;
            let hint_partition: Option<PartitionHint> = match hint.as_deref() {
                None => None,
                Some("paper") => Some(spec.paper_hint.clone().ok_or_else(|| {
                    format!("{} ships no paper partition for these parameters", spec.label)
                })?),
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| format!("cannot read hint {path}: {e}"))?;
                    Some(serde_json::from_str(&text).map_err(|e| format!("bad hint JSON: {e}"))?)
                }
            };
            let grouping = detect_grouping(&m, hint_partition.as_ref());
            let zero_pairs = (0..m.kappa)
                .flat_map(|k| ((k + 1)..m.kappa).map(move |l| (k, l)))
                .filter(|&(k, l)| m.is_zero(k, l))
                .count();
            let report = AnalyzeReport {
                config: code.echo(),
                label: spec.label.clone(),
                kappa: spec.kappa,
                side: spec.side,
                exact_mask: m.exact,
                zero_pairs,
                m13_exponent: m13_exponent(&m),
                claimed_exponent: spec.claimed_exponent,
                grouping,
            };
            write_output(out.as_deref(), &to_json_string(&report)?)?;
            Ok(0)
        }
        Verb::Diversity {
            code,
            alphabet,
            mode,
            samples,
            seed,
            budget,
            expect,
            workers,
            out,
        } => {
            let spec = code.build()?;
            let alpha = parse_alphabet(&alphabet)?;
            let scan_mode = match mode.as_str() {
                "exhaustive" => ScanMode::Exhaustive,
                "random" => ScanMode::Random { samples, seed },
                other => return Err(format!("mode must be exhaustive or random, got {other}")),
            };
            let env_workers = std::env::var("ITERCODE_WORKERS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok());
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.or(env_workers).unwrap_or(0))
                .build()
                .map_err(|e| e.to_string())?;
            let scan = pool
                .install(|| min_det_scan(&spec, &alpha, scan_mode, budget))
                .map_err(|e| e.to_string())?;
            let mut config = code.echo();
            config["alphabet"] = serde_json::json!(alpha);
            config["mode"] = serde_json::json!(mode);
            config["samples"] = serde_json::json!(samples);
            config["seed"] = serde_json::json!(seed);
            config["budget"] = serde_json::json!(budget);
            let found_zero = scan.count_zero > 0;
            let report = DiversityReport {
                config,
                label: spec.label.clone(),
                alphabet: alpha,
                mode,
                evaluated: scan.evaluated,
                count_zero: scan.count_zero,
                min_abs_det: scan.min_abs_det,
                argmin: scan.argmin,
                zero_witness: scan.zero_witness,
                fully_diverse_claim: spec.fully_diverse_claim,
            };
            write_output(out.as_deref(), &to_json_string(&report)?)?;
            if expect.as_deref() == Some("diverse") && found_zero {
                return Ok(EXIT_COUNTEREXAMPLE);
            }
            Ok(0)
        }
        Verb::CheckTheta { action } => match action {
            CheckThetaAction::Quaternion {
                field,
                a,
                gamma,
                theta,
                bound,
                expect,
                out,
            } => {
                let f = builtin_field(&field).map_err(|e| e.to_string())?;
                let pa = f.parse_element(&a).map_err(|e| e.to_string())?;
                let pg = f.parse_element(&gamma).map_err(|e| e.to_string())?;
                let pt = f.parse_element(&theta).map_err(|e| e.to_string())?;
                let report =
                    quaternion_theta_check(&f, &pa, &pg, &pt, bound).map_err(|e| e.to_string())?;
                let payload = serde_json::json!({
                    "config": {"field": field, "a": a, "gamma": gamma, "theta": theta, "bound": bound},
                    "report": report,
                });
                write_output(out.as_deref(), &to_json_string(&payload)?)?;
                if expect.as_deref() == Some("diverse") && report.verdict == Verdict::Counterexample
                {
                    return Ok(EXIT_COUNTEREXAMPLE);
                }
                Ok(0)
            }
            CheckThetaAction::Degree3 {
                field,
                tau,
                theta,
                expect,
                out,
            } => {
                let f = builtin_field(&field).map_err(|e| e.to_string())?;
                let t = f.aut(&tau).map_err(|e| e.to_string())?;
                let pt = f.parse_element(&theta).map_err(|e| e.to_string())?;
                let passes = degree3_theta_check(&pt, &t).map_err(|e| e.to_string())?;
                let payload = serde_json::json!({
                    "config": {"field": field, "tau": tau, "theta": theta},
                    "criterion": "tau(theta^3) != theta^3",
                    "passes": passes,
                });
                write_output(out.as_deref(), &to_json_string(&payload)?)?;
                if expect.as_deref() == Some("diverse") && !passes {
                    return Ok(EXIT_COUNTEREXAMPLE);
                }
                Ok(0)
            }
        },
        Verb::DecodeBench {
            code,
            snr,
            trials,
            seed,
            order,
            alphabet,
            out,
        } => {
            let spec = code.build()?;
            let alpha = parse_alphabet(&alphabet)?;
            let column_order: Option<Vec<usize>> = match order.as_str() {
                "paper" => None,
                "grouping" => {
                    let m = m_matrix(&spec.basis, None).map_err(|e| e.to_string())?;
                    let report = detect_grouping(&m, spec.paper_hint.as_ref());
                    Some(
                        order_from_grouping(&report.result, spec.kappa)
                            .ok_or("grouping produced no usable order")?,
                    )
                }
                other => return Err(format!("order must be paper or grouping, got {other}")),
            };
            let mut config_lines = code.echo_lines();
            config_lines.push(format!("snr={}", fmt_float(snr)));
            config_lines.push(format!("trials={trials}"));
            config_lines.push(format!("seed={seed}"));
            config_lines.push(format!("order={order}"));
            config_lines.push(format!(
                "alphabet={}",
                alpha.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ")
            ));
            let mut csv = Csv::new(&config_lines, "trial,snr,nodes,correct");
            let n0 = noise_variance_for(&spec, &alpha, snr);
            let n_rx = (spec.side / 2).max(1);
            let floats = spec.float_basis();
            let mut skipped = 0u64;
            for trial in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_stream(seed, 0, trial));
                let g: Vec<i64> = (0..spec.kappa)
                    .map(|_| alpha[rng.random_range(0..alpha.len())])
                    .collect();
                let h = sample_channel(n_rx, spec.side, &mut rng);
                let x = itercode::algebra::encode(&floats, &g).map_err(|e| e.to_string())?;
                let mut y_mat = &h * &x;
                if n0 > 0.0 {
                    y_mat += sample_noise(n_rx, spec.side, n0, &mut rng);
                }
                let y = vectorize(&y_mat);
                let lattice = build_real_lattice(&spec, &h).map_err(|e| e.to_string())?;
                if lattice.rank < spec.kappa {
                    skipped += 1;
                    continue;
                }
                let result = sphere_decode(&lattice, &y, &alpha, column_order.as_deref())
                    .map_err(|e| e.to_string())?;
                csv.row(&[
                    trial.to_string(),
                    fmt_float(snr),
                    result.nodes_visited.to_string(),
                    u8::from(result.g_hat == g).to_string(),
                ]);
            }
            let mut text = csv.finish();
            if skipped > 0 {
                text.push_str(&format!("# skipped_rank_failures={skipped}\n"));
            }
            write_output(out.as_deref(), &text)?;
            Ok(0)
        }
        Verb::Simulate {
            config,
            out,
            workers,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| format!("cannot read config {}: {e}", config.display()))?;
            let parsed: SimConfigJson =
                serde_json::from_str(&text).map_err(|e| format!("bad config JSON: {e}"))?;
            let env_workers = std::env::var("ITERCODE_WORKERS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok());
            let resolved_workers = workers.or(parsed.workers).or(env_workers).unwrap_or(0);
            let overrides = Overrides {
                theta: parsed.code.theta.clone(),
                scaled: parsed.code.scaled,
                base: parsed.code.base.clone(),
                mu: None,
            };
            let spec =
                make_code_by_name(&parsed.code.name, &overrides).map_err(|e| e.to_string())?;
            let sim = SimConfig {
                code: spec,
                snr_db_grid: parsed.snr_db_grid.clone(),
                trials_per_point: parsed.trials_per_point,
                alphabet: parsed.alphabet.clone(),
                seed: parsed.seed,
                workers: resolved_workers,
                noiseless: parsed.noiseless,
            };
            let result = run_bler(&sim).map_err(|e| e.to_string())?;
            // the worker count is deliberately not echoed: output is
            // worker-invariant and must stay byte-identical
            let config_lines = vec![
                format!("code={}", sim.code.label),
                format!(
                    "snr_db_grid={}",
                    sim.snr_db_grid
                        .iter()
                        .map(|s| fmt_float(*s))
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                format!("trials_per_point={}", sim.trials_per_point),
                format!(
                    "alphabet={}",
                    sim.alphabet
                        .iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                ),
                format!("seed={}", sim.seed),
                format!("noiseless={}", sim.noiseless),
                format!("skipped_rank_failures={}", result.skipped_rank_failures),
            ];
            let mut csv = Csv::new(
                &config_lines,
                "snr_db,trials,block_errors,bler,mean_nodes,ci95",
            );
            for row in &result.rows {
                csv.row(&[
                    fmt_float(row.snr_db),
                    row.trials.to_string(),
                    row.block_errors.to_string(),
                    fmt_float(row.bler),
                    fmt_float(row.mean_nodes),
                    fmt_float(row.ci95_halfwidth),
                ]);
            }
            write_output(out.as_deref(), &csv.finish())?;
            Ok(0)
        }
    }
}

#[derive(Deserialize)]
struct CodeRefJson {
    name: String,
    #[serde(default)]
    theta: Option<String>,
    #[serde(default)]
    scaled: Option<bool>,
    #[serde(default)]
    base: Option<String>,
}

fn default_alphabet() -> Vec<i64> {
    vec![-1, 1]
}

#[derive(Deserialize)]
struct SimConfigJson {
    code: CodeRefJson,
    snr_db_grid: Vec<f64>,
    trials_per_point: u64,
    #[serde(default = "default_alphabet")]
    alphabet: Vec<i64>,
    seed: u64,
    #[serde(default)]
    workers: Option<usize>,
    #[serde(default)]
    noiseless: bool,
}
