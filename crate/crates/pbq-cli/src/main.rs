//! `pbq` command-line front end.
//!
//! Exit status: 0 success, 1 failed verification, 2 usage, 3 parse,
//! 4 validation, 5 factorization, 6 encoding, 7 resource limit.
//! Verbosity is controlled by `PBQ_LOG` (`error`, `warn`, `info`, `debug`).

mod pipeline;

use clap::{Args, Parser, Subcommand};
use pbq::encoding::compare_encodings;
use pbq::pbham::MAX_DENSE_ORBITALS;
use pbq::qrom::{cost_model, optimal_lambda, Variant};
use pbq::simulate::{diagonalize, qpe};
use pipeline::{tag, usage, LayoutArg, ModeArg, PipelineConfig, Stage, StageError, StageResult, ToffoliArg};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pbq", version, about = "Block encodings and resource estimates for Pauli-Breit Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the Hamiltonian and report its dense spectrum.
    Build {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "sm")]
        layout: LayoutArg,
    },
    /// Low-rank and double factorization of the integrals.
    Factorize(Common),
    /// Synthesize the block-encoding circuit.
    Encode {
        #[command(flatten)]
        common: Common,
        /// Write the gate listing here.
        #[arg(long)]
        emit: Option<PathBuf>,
        /// Write the resource report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Compare the encoded block against the dense Hamiltonian.
    Verify(Common),
    /// Phase estimation on an eigenstate of the dense Hamiltonian.
    Qpe {
        #[command(flatten)]
        common: Common,
        /// Phase register size.
        #[arg(long, default_value_t = 8)]
        qpe_bits: u32,
        /// Index of the input eigenstate in ascending energy order.
        #[arg(long, default_value_t = 0)]
        eigenstate: usize,
        /// Number of peaks to print.
        #[arg(long, default_value_t = 4)]
        peaks: usize,
    },
    /// Logical resource counts of the block encoding.
    Estimate(Common),
    /// Closed-form QROM costs.
    QromCost {
        /// Table length.
        #[arg(long)]
        n: u64,
        /// Word size in bits.
        #[arg(long)]
        beta: u64,
        /// SELECTSWAP multiplexing factor; defaults to the optimum.
        #[arg(long)]
        lambda: Option<u64>,
    },
    /// Pauli weights of one-body couplings under OM and SM ordering.
    CompareEncodings {
        input: PathBuf,
        /// Print a text table instead of JSON.
        #[arg(long)]
        table: bool,
    },
    /// Full pipeline with report files written to `--out-dir`.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Integral file (PBINT v1).
    input: PathBuf,
    /// Rank kept per one-body block and per leaf.
    #[arg(long)]
    l: Option<usize>,
    /// Maximum number of double-factorization leaves.
    #[arg(long)]
    m: Option<usize>,
    /// Frobenius threshold that stops the double factorization.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Rotation angle precision in bits.
    #[arg(short = 'b', long = "bits", visible_alias = "b", default_value_t = 10)]
    bits: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "sm")]
    layout: LayoutArg,
    /// Toffoli decomposition used for T counts.
    #[arg(long, value_enum, default_value = "7t")]
    toffoli: ToffoliArg,
    /// Entrywise tolerance for verification.
    #[arg(long, default_value_t = 1e-8)]
    verify_tol: f64,
}

impl Common {
    fn config(&self, output_dir: Option<PathBuf>) -> StageResult<PipelineConfig> {
        let cfg = PipelineConfig {
            input: self.input.clone(),
            l: self.l,
            m: self.m,
            tol: self.tol,
            bits: self.bits,
            mode: self.mode,
            layout: self.layout,
            toffoli: self.toffoli,
            verify_tol: self.verify_tol,
            output_dir,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_file(path: &Path, contents: &str) -> StageResult<()> {
    std::fs::write(path, contents).map_err(|e| StageError { stage: Stage::Resource, message: format!("{}: {e}", path.display()) })
}

fn check_dense(n: usize) -> StageResult<()> {
    if n > MAX_DENSE_ORBITALS {
        return Err(StageError {
            stage: Stage::Resource,
            message: format!("dense simulation is limited to {MAX_DENSE_ORBITALS} orbitals, input has {n}"),
        });
    }
    Ok(())
}

fn run(cli: Cli) -> StageResult<ExitCode> {
    let mut status = ExitCode::SUCCESS;
    match cli.command {
        Command::Build { input, layout } => {
            let loaded = pipeline::load(&input)?;
            check_dense(loaded.set.n_orbitals)?;
            let h = pbq::pbham::build_dense_normal_ordered(&loaded.set, layout.into()).map_err(tag(Stage::Resource))?;
            let (energies, _) = diagonalize(&h).map_err(tag(Stage::Validate))?;
            let norms: Vec<f64> = loaded.h.one_body_total.iter().map(pbq::linalg::spectral_norm).collect();
            print!(
                "{}",
                pipeline::to_json(&json!({
                    "n_orbitals": loaded.set.n_orbitals,
                    "layout": layout,
                    "dimension": h.dim,
                    "one_body_block_norms": norms,
                    "two_body_frobenius_norm": loaded.h.two_body.frobenius_norm(),
                    "hermiticity_error": h.hermiticity_error(),
                    "eigenvalues": energies,
                }))
            );
        }
        Command::Factorize(common) => {
            let cfg = common.config(None)?;
            let loaded = pipeline::load(&cfg.input)?;
            print!("{}", pipeline::to_json(&pipeline::factorize(&loaded, &cfg)?));
        }
        Command::Encode { common, emit, report } => {
            let cfg = common.config(None)?;
            let loaded = pipeline::load(&cfg.input)?;
            let be = pipeline::encode(&pipeline::factorize(&loaded, &cfg)?, &cfg)?;
            let res = pipeline::resources(&be, &cfg)?;
            if let Some(path) = emit {
                write_file(&path, &be.circuit.dump())?;
            }
            if let Some(path) = report {
                write_file(&path, &pipeline::to_json(&res))?;
            }
            print!(
                "{}",
                pipeline::to_json(&json!({
                    "zeta": be.zeta,
                    "offset": be.offset,
                    "qubits": be.circuit.n_qubits,
                    "ancilla_qubits": be.anc_qubits().len(),
                    "gates": be.circuit.gates.len(),
                    "resources": res,
                }))
            );
        }
        Command::Verify(common) => {
            let cfg = common.config(None)?;
            let loaded = pipeline::load(&cfg.input)?;
            check_dense(loaded.set.n_orbitals)?;
            let be = pipeline::encode(&pipeline::factorize(&loaded, &cfg)?, &cfg)?;
            let res = pipeline::resources(&be, &cfg)?;
            let report = pipeline::verify(&loaded, &be, &cfg, &res)?;
            print!("{}", pipeline::to_json(&report));
            if !report.passed {
                status = ExitCode::from(Stage::Verify as u8);
            }
        }
        Command::Qpe { common, qpe_bits, eigenstate, peaks } => {
            let cfg = common.config(None)?;
            let loaded = pipeline::load(&cfg.input)?;
            check_dense(loaded.set.n_orbitals)?;
            let be = pipeline::encode(&pipeline::factorize(&loaded, &cfg)?, &cfg)?;
            let h = pipeline::reference(&loaded, &cfg)?;
            let (energies, states) = diagonalize(&h).map_err(tag(Stage::Validate))?;
            let Some(state) = states.get(eigenstate) else {
                return Err(usage(format!("--eigenstate {eigenstate} out of range 0..{}", states.len())));
            };
            let found = qpe(&be, state, qpe_bits).map_err(tag(Stage::Resource))?;
            print!(
                "{}",
                pipeline::to_json(&json!({
                    "exact_energy": energies[eigenstate],
                    "resolution": be.zeta * std::f64::consts::PI / 2f64.powi(qpe_bits as i32),
                    "peaks": &found[..found.len().min(peaks)],
                }))
            );
        }
        Command::Estimate(common) => {
            let cfg = common.config(None)?;
            let loaded = pipeline::load(&cfg.input)?;
            let be = pipeline::encode(&pipeline::factorize(&loaded, &cfg)?, &cfg)?;
            let res = pipeline::resources(&be, &cfg)?;
            print!("{}", pipeline::to_json(&json!({ "zeta": be.zeta, "offset": be.offset, "resources": res })));
        }
        Command::QromCost { n, beta, lambda } => {
            let qrom = tag(Stage::Validate);
            let best = optimal_lambda(n, beta).map_err(&qrom)?;
            let lambda = lambda.unwrap_or(best);
            print!(
                "{}",
                pipeline::to_json(&json!({
                    "n": n,
                    "beta": beta,
                    "optimal_lambda": best,
                    "select": cost_model(Variant::Select, n, beta, 1).map_err(&qrom)?,
                    "selectswap": cost_model(Variant::SelectSwap, n, beta, lambda).map_err(&qrom)?,
                }))
            );
        }
        Command::CompareEncodings { input, table } => {
            let loaded = pipeline::load(&input)?;
            let cmp = compare_encodings(&loaded.h.one_body_total).map_err(tag(Stage::Validate))?;
            if table {
                println!("{:>3} {:>3} {:>5} {:>5} {:>12} {:>4} {:>4}", "p", "q", "sigma", "rho", "coupling", "OM", "SM");
                for r in &cmp.rows {
                    println!("{:>3} {:>3} {:>5} {:>5} {:>12.6e} {:>4} {:>4}", r.p, r.q, r.sigma, r.rho, r.coupling, r.om, r.sm);
                }
                println!("aggregate OM {:.6e}  SM {:.6e}", cmp.om_aggregate, cmp.sm_aggregate);
                println!("recommendation: {}", cmp.recommendation);
            } else {
                print!("{}", pipeline::to_json(&cmp));
            }
        }
        Command::Run { common, out_dir } => {
            let cfg = common.config(Some(out_dir.clone()))?;
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| StageError { stage: Stage::Resource, message: format!("{}: {e}", out_dir.display()) })?;
            write_file(&out_dir.join("config.json"), &pipeline::to_json(&cfg))?;
            let loaded = pipeline::load(&cfg.input)?;
            check_dense(loaded.set.n_orbitals)?;
            let factors = pipeline::factorize(&loaded, &cfg)?;
            write_file(&out_dir.join("factors.json"), &pipeline::to_json(&factors))?;
            let be = pipeline::encode(&factors, &cfg)?;
            write_file(&out_dir.join("circuit.txt"), &be.circuit.dump())?;
            let res = pipeline::resources(&be, &cfg)?;
            write_file(&out_dir.join("resources.json"), &pipeline::to_json(&res))?;
            let report = pipeline::verify(&loaded, &be, &cfg, &res)?;
            write_file(&out_dir.join("verification.json"), &pipeline::to_json(&report))?;
            println!(
                "passed={} deviation={:.3e} zeta={:.6} qubits={} T={} rotations={}",
                report.passed, report.max_abs_deviation, be.zeta, res.qubit_count, res.t_count, res.rotation_count
            );
            if !report.passed {
                status = ExitCode::from(Stage::Verify as u8);
            }
        }
    }
    Ok(status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PBQ_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pbq: {e}");
            ExitCode::from(e.stage as u8)
        }
    }
}
