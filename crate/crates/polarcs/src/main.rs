//! Command-line front end: construct sensing systems, print dimension
//! profiles, run Monte Carlo error-rate sweeps, recover sparse vectors
//! from measurement files, and estimate information dimensions.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 decode/convergence
//! failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::Rng;

use polarcs::channel::{apply_sanc, NoiseModel};
use polarcs::decode::{recover_sparse, DecodeStatus, RecoverMethod};
use polarcs::infodim::{estimate_dim, estimate_mid, MixtureSpec, DEFAULT_CLIP};
use polarcs::io;
use polarcs::mid::MidProfile;
use polarcs::rng::substream;
use polarcs::sensing::SensingSystem;
use polarcs::sweep::{
    parse_grid, run_point, ExperimentConfig, MatrixKind, SweepAxis, DEFAULT_DESIGN_P,
    DEFAULT_ERROR_THRESHOLD, DEFAULT_TRIALS,
};
use polarcs::transform::PolarTransform;

#[derive(Parser)]
#[command(
    name = "polarcs",
    version,
    about = "Polarizing transforms, the sensing systems they induce, and the \
             Monte Carlo harness around them"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixArg {
    Polar,
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    Sparsity,
    Rate,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    L1,
    L0,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawArg {
    /// Point mass at zero plus a short uniform component of weight p.
    Mixture,
    /// Additive sparse-noise channel fed with uniform [0, 1] inputs.
    Sanc,
    /// Uniform law on [0, 1].
    Uniform,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a sensing system and write it as one JSON document.
    Construct {
        /// Transform depth; the block length is M = 2^n.
        #[arg(long)]
        n: u32,
        /// Design noise sparsity used to rank coordinates.
        #[arg(long)]
        p: f64,
        /// Code rate N/M (rounded to the nearest dimension).
        #[arg(long, conflicts_with = "dim")]
        rate: Option<f64>,
        /// Explicit signal dimension N; default is ceil((1-p) M).
        #[arg(long = "N")]
        dim: Option<usize>,
        /// Kernel scaling.
        #[arg(long, default_value_t = polarcs::DEFAULT_BETA)]
        beta: f64,
        /// Output path for the JSON document.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the per-coordinate dimension profile as CSV.
    Mids {
        /// Transform depth; the profile has 2^n rows.
        #[arg(long)]
        n: u32,
        /// Noise sparsity.
        #[arg(long)]
        p: f64,
        /// Sort from best coordinate to worst (rank,mid instead of
        /// index,mid).
        #[arg(long)]
        sorted: bool,
        /// Write here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo error-rate sweep over noise sparsity or code rate.
    Simulate {
        /// Codeword length M (a power of two for the polar family).
        #[arg(long)]
        m: usize,
        /// Code rate N/M (sparsity sweeps; the grid supplies it on rate
        /// sweeps).
        #[arg(long, default_value_t = 0.25)]
        rate: f64,
        /// Explicit signal dimension overriding --rate.
        #[arg(long = "N")]
        dim: Option<usize>,
        /// Coding-matrix family.
        #[arg(long, value_enum, default_value = "polar")]
        matrix: MatrixArg,
        /// Which parameter the grid walks.
        #[arg(long, value_enum, default_value = "sparsity")]
        sweep: SweepArg,
        /// Grid as start:end:step; defaults to 0:0.6:0.05 for sparsity
        /// sweeps and 0.05:0.65:0.05 for rate sweeps.
        #[arg(long)]
        grid: Option<String>,
        /// Noise sparsity used at every point of a rate sweep.
        #[arg(long, default_value_t = 0.2)]
        sparsity: f64,
        /// Trials per grid point.
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        /// Master seed; every trial derives its own substream from it.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Codeword-error threshold on the per-coordinate average l1
        /// error.
        #[arg(long, default_value_t = DEFAULT_ERROR_THRESHOLD)]
        threshold: f64,
        /// Design sparsity for the polar good-column selection.
        #[arg(long, default_value_t = DEFAULT_DESIGN_P)]
        design_p: f64,
        /// Kernel scaling of the polar family.
        #[arg(long, default_value_t = polarcs::DEFAULT_BETA)]
        beta: f64,
        /// Draw one Gaussian matrix per grid point instead of one per
        /// trial.
        #[arg(long)]
        fixed_matrix: bool,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a sparse vector from its measurements.
    Recover {
        /// Construction JSON written by `construct`.
        #[arg(long)]
        system: PathBuf,
        /// Measurement vector y' (JSON array, single-row/column matrix
        /// JSON, or one number per line).
        #[arg(long)]
        measurements: PathBuf,
        /// Decoder.
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Output CSV path for the estimate.
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate an information dimension or mutual information dimension
    /// by mesh quantization; prints one JSON record.
    Infodim {
        /// Test law.
        #[arg(long, value_enum)]
        law: LawArg,
        /// Sparsity / continuous weight, as the law demands.
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Noise standard deviation (sanc law).
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Mesh resolution m.
        #[arg(long, default_value_t = 1024)]
        levels: u32,
        /// Sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        /// Master seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Clipping half-width for unbounded laws.
        #[arg(long, default_value_t = DEFAULT_CLIP)]
        clip: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Cmd) -> polarcs::Result<u8> {
    match cmd {
        Cmd::Construct { n, p, rate, dim, beta, out } => {
            let m = 1usize << n;
            let dim = match (dim, rate) {
                (Some(d), _) => d,
                (None, Some(r)) => (r * m as f64).round() as usize,
                (None, None) => ((1.0 - p) * m as f64).ceil() as usize,
            };
            let t = PolarTransform::new(n, beta)?;
            let sys = SensingSystem::from_design(n, beta, p, dim)?;
            io::write_text(&out, &io::construction_to_json(&t, &sys, p))?;
            eprintln!(
                "wrote M={} N={} system ({} measurement rows) to {}",
                sys.block_size(),
                sys.dimension(),
                sys.measurement_count(),
                out.display()
            );
            Ok(0)
        }
        Cmd::Mids { n, p, sorted, out } => {
            let profile = MidProfile::compute(n, p)?;
            let csv = io::mids_to_csv(&profile, sorted);
            match out {
                Some(path) => io::write_text(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Cmd::Simulate {
            m,
            rate,
            dim,
            matrix,
            sweep,
            grid,
            sparsity,
            trials,
            seed,
            sigma,
            threshold,
            design_p,
            beta,
            fixed_matrix,
            out,
        } => {
            let axis = match sweep {
                SweepArg::Sparsity => SweepAxis::Sparsity,
                SweepArg::Rate => SweepAxis::Rate,
            };
            let grid_text = grid.unwrap_or_else(|| {
                match axis {
                    SweepAxis::Sparsity => "0:0.6:0.05",
                    SweepAxis::Rate => "0.05:0.65:0.05",
                }
                .to_string()
            });
            let cfg = ExperimentConfig {
                m,
                rate,
                explicit_n: dim,
                sparsity,
                matrix: match matrix {
                    MatrixArg::Polar => MatrixKind::Polar,
                    MatrixArg::Gaussian => MatrixKind::Gaussian,
                },
                axis,
                grid: parse_grid(&grid_text)?,
                trials,
                seed,
                sigma,
                error_threshold: threshold,
                design_p,
                beta,
                fixed_matrix,
            };
            eprintln!("master seed: {seed}");
            let mut rows = Vec::with_capacity(cfg.grid.len());
            for i in 0..cfg.grid.len() {
                let row = run_point(&cfg, i)?;
                eprintln!(
                    "  point {:>2}/{}: value {:<6} error_rate {:.4} ({} failures, {:.1}s)",
                    i + 1,
                    cfg.grid.len(),
                    row.sweep_value,
                    row.error_rate,
                    row.solver_failures,
                    row.wall_time_s
                );
                rows.push(row);
            }
            io::write_text(&out, &io::results_to_csv(&rows))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(0)
        }
        Cmd::Recover { system, measurements, method, out } => {
            let doc = io::construction_from_json(&io::read_text(&system)?)?;
            let sys = doc.into_system()?;
            let y_prime = io::vector_from_text(&io::read_text(&measurements)?)?;
            let method = match method {
                MethodArg::L1 => RecoverMethod::L1,
                MethodArg::L0 => RecoverMethod::L0Oracle,
            };
            let res = recover_sparse(&sys, &y_prime, method)?;
            io::write_text(&out, &io::estimate_to_csv(&res.estimate))?;
            if res.status == DecodeStatus::Success {
                eprintln!(
                    "recovered {} coordinates, objective {:.6e}, wrote {}",
                    res.estimate.len(),
                    res.certificate.objective,
                    out.display()
                );
                Ok(0)
            } else {
                eprintln!("decode failed: {:?}", res.status);
                Ok(2)
            }
        }
        Cmd::Infodim { law, p, sigma, levels, samples, seed, clip } => {
            eprintln!("master seed: {seed}");
            let mut rng = substream(seed, 0);
            let record = match law {
                LawArg::Mixture => {
                    let spec = MixtureSpec::unit_atom_with_uniform(p)?;
                    spec.validate()?;
                    let xs = spec.samples(samples, &mut rng);
                    let est = estimate_dim(&xs, levels, clip)?;
                    serde_json::json!({
                        "law": "mixture",
                        "p": p,
                        "levels": levels,
                        "samples": samples,
                        "seed": seed,
                        "dim_estimate": est.dim_estimate,
                        "entropy_bits": est.entropy_bits,
                        "occupied_cells": est.occupied_cells,
                        "saturated": est.saturated,
                    })
                }
                LawArg::Sanc => {
                    let model = NoiseModel::new(p, sigma)?;
                    let x = DVector::from_iterator(
                        samples,
                        (0..samples).map(|_| rng.random::<f64>()),
                    );
                    let y = apply_sanc(&x, &model, &mut rng);
                    let pairs: Vec<(f64, f64)> =
                        x.iter().copied().zip(y.iter().copied()).collect();
                    let est = estimate_mid(&pairs, levels, clip)?;
                    serde_json::json!({
                        "law": "sanc",
                        "p": p,
                        "sigma": sigma,
                        "levels": levels,
                        "samples": samples,
                        "seed": seed,
                        "mid_estimate": est.mid,
                        "saturated": est.saturated,
                    })
                }
                LawArg::Uniform => {
                    let xs: Vec<f64> = (0..samples).map(|_| rng.random::<f64>()).collect();
                    let est = estimate_dim(&xs, levels, clip)?;
                    serde_json::json!({
                        "law": "uniform",
                        "levels": levels,
                        "samples": samples,
                        "seed": seed,
                        "dim_estimate": est.dim_estimate,
                        "entropy_bits": est.entropy_bits,
                        "occupied_cells": est.occupied_cells,
                        "saturated": est.saturated,
                    })
                }
            };
            println!("{record}");
            Ok(0)
        }
    }
}
