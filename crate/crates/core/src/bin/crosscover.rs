//! Command-line front end: covering and polarization computations plus the
//! batch verification commands.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 a mathematical check
//! found a violation (which would indicate an implementation bug).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crosscover::covering::{self, CoveringMethod};
use crosscover::geom;
use crosscover::hull;
use crosscover::io::{read_points, PointFile};
use crosscover::polarization::{self, PotentialFunction};
use crosscover::search;
use crosscover::solid_angle;
use crosscover::CrossError;

#[derive(Parser)]
#[command(
    name = "crosscover",
    about = "Covering and polarization quantities for antipodal configurations on S^{d-1}",
    long_about = None,
    version
)]
struct Cli {
    /// Cap on rayon worker threads (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Unit-norm validation slack.
    #[arg(long, global = true, default_value_t = geom::EPS_UNIT)]
    tol_unit: f64,

    /// Supporting-hyperplane / boundary-cover slack.
    #[arg(long, global = true, default_value_t = hull::EPS_HULL)]
    tol_hull: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArg {
    /// Point file (see README for the text format).
    #[arg(long, conflicts_with = "cross_polytope")]
    input: Option<PathBuf>,

    /// Use the regular cross-polytope in the given dimension instead of a file.
    #[arg(long, value_name = "D")]
    cross_polytope: Option<usize>,
}

impl InputArg {
    fn load(&self, tol_unit: f64) -> Result<PointFile, CrossError> {
        match (&self.input, self.cross_polytope) {
            (Some(path), None) => load_file(path, tol_unit),
            (None, Some(d)) => Ok(PointFile::Antipodal(geom::cross_polytope(d)?)),
            _ => Err(CrossError::Parse(
                "exactly one of --input or --cross-polytope is required".into(),
            )),
        }
    }
}

fn load_file(path: &PathBuf, tol_unit: f64) -> Result<PointFile, CrossError> {
    let file = read_points(path)?;
    for p in file.as_generic().points() {
        let n2 = p.coords().norm_squared();
        if (n2 - 1.0).abs() > tol_unit {
            return Err(CrossError::ZeroVector { norm: n2.sqrt() });
        }
    }
    Ok(file)
}

#[derive(Subcommand)]
enum Command {
    /// Compute the covering measure eta and the mesh norm rho.
    Eta {
        #[command(flatten)]
        input: InputArg,
        /// Exact facet path (antipodal general-position configurations only).
        #[arg(long, conflicts_with = "sampled")]
        exact: bool,
        /// Sampled path with this many sphere samples.
        #[arg(long, value_name = "N")]
        sampled: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append a CSV row (d, N, method, eta, rho, seed) to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Minimize a potential over the sphere for a configuration.
    Polarize {
        #[arg(long)]
        input: PathBuf,
        /// Potential kind: riesz:S, log, or gauss:ALPHA.
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo spherical measure of the cone over d unit vectors.
    SolidAngle {
        /// Point file whose d points are the cone generators.
        #[arg(long)]
        cone: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximize the projected volume of a simplex inscribed in a cap rim.
    LemmaP {
        #[arg(long)]
        d: usize,
        /// Cap height in (0, 1).
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Optimize over antipodal configurations for eta or polarization.
    Search {
        /// Objective: eta or polarization.
        #[arg(long)]
        objective: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        potential: Option<String>,
        #[arg(long, default_value_t = 16)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the (iteration, objective) trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check eta <= 1/sqrt(d) over random antipodal configurations.
    VerifyCovering {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the polarization bound over random antipodal configurations.
    VerifyPolarization {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        potential: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write CSV rows (trial, lhs, rhs, holds, equality) to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the 2^d facet structure and boundary cover on random configurations.
    VerifyFacets {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 50)]
        trials: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_potential(spec: &str) -> Result<PotentialFunction, CrossError> {
    let lower = spec.to_ascii_lowercase();
    let (kind, param) = match lower.split_once(':') {
        Some((k, p)) => (k, Some(p)),
        None => (lower.as_str(), None),
    };
    let param_value = |p: Option<&str>| -> Result<f64, CrossError> {
        p.ok_or_else(|| CrossError::Parse(format!("potential `{kind}` needs a parameter")))?
            .parse()
            .map_err(|_| CrossError::Parse(format!("bad potential parameter in `{spec}`")))
    };
    match kind {
        "riesz" => Ok(PotentialFunction::Riesz {
            s: param_value(param)?,
        }),
        "log" => Ok(PotentialFunction::Log),
        "gauss" => Ok(PotentialFunction::Gauss {
            alpha: param_value(param)?,
        }),
        _ => Err(CrossError::Parse(format!(
            "unknown potential `{spec}` (expected riesz:S, log, or gauss:ALPHA)"
        ))),
    }
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn coords17(u: &crosscover::UnitVector) -> String {
    u.coords()
        .iter()
        .map(|c| fmt17(*c))
        .collect::<Vec<_>>()
        .join(" ")
}

fn append_csv(path: &PathBuf, header: &str, row: &str) -> Result<(), CrossError> {
    use std::io::Write;
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    if fresh {
        writeln!(f, "{header}")?;
    }
    writeln!(f, "{row}")?;
    Ok(())
}

/// Exit status 2 carrier: a mathematical check failed.
struct CheckFailed(String);

fn run(cli: Cli) -> Result<Result<(), CheckFailed>, CrossError> {
    if cli.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }

    match cli.command {
        Command::Eta {
            input,
            exact,
            sampled,
            seed,
            csv,
        } => {
            let file = input.load(cli.tol_unit)?;
            let generic = file.as_generic();
            let report = if exact {
                let anti = file
                    .as_antipodal()
                    .cloned()
                    .or_else(|| covering::detect_antipodal(&generic))
                    .ok_or_else(|| {
                        CrossError::Parse("--exact requires an antipodal configuration".into())
                    })?;
                covering::eta_exact(&anti)?
            } else {
                let n = sampled.unwrap_or(200_000);
                covering::eta_sampled(&generic, n, 300, seed)
            };
            println!("eta = {}", fmt17(report.eta));
            println!("rho = {}", fmt17(report.rho));
            println!("witness = {}", coords17(&report.witness));
            if let Some(path) = csv {
                let method = match report.method {
                    CoveringMethod::ExactFacet => "exact",
                    CoveringMethod::Sampled => "sampled",
                };
                append_csv(
                    &path,
                    "d,N,method,eta,rho,seed",
                    &format!(
                        "{},{},{method},{},{},{seed}",
                        generic.dim(),
                        generic.points().len(),
                        fmt17(report.eta),
                        fmt17(report.rho)
                    ),
                )?;
            }
            Ok(Ok(()))
        }

        Command::Polarize {
            input,
            potential,
            starts,
            seed,
        } => {
            let g = parse_potential(&potential)?;
            let cfg = load_file(&input, cli.tol_unit)?.as_generic();
            let report = polarization::polarization_value(&cfg, &g, starts, seed)?;
            println!("value = {}", fmt17(report.value));
            println!("minimizer = {}", coords17(&report.minimizer));
            println!("gap_to_cross_polytope_bound = {}", fmt17(report.gap_to_bound));
            Ok(Ok(()))
        }

        Command::SolidAngle {
            cone,
            samples,
            seed,
        } => {
            let cfg = load_file(&cone, cli.tol_unit)?.as_generic();
            let est = solid_angle::projected_volume_mc(cfg.points(), samples, seed)?;
            println!("value = {}", fmt17(est.value));
            println!("stderr = {}", fmt17(est.stderr));
            println!("samples = {}", est.n_samples);
            Ok(Ok(()))
        }

        Command::LemmaP {
            d,
            a,
            restarts,
            seed,
        } => {
            let result = solid_angle::maximize_cap_simplex(d, a, restarts, seed)?;
            println!("volume = {}", fmt17(result.volume.value));
            println!("stderr = {}", fmt17(result.volume.stderr));
            println!("regularity_defect = {}", fmt17(result.regularity_defect));
            Ok(Ok(()))
        }

        Command::Search {
            objective,
            d,
            potential,
            restarts,
            seed,
            trace,
        } => {
            let result = match objective.as_str() {
                "eta" => search::maximize_eta(d, restarts, seed)?,
                "polarization" => {
                    let spec = potential.ok_or_else(|| {
                        CrossError::Parse("--potential is required for polarization".into())
                    })?;
                    search::maximize_polarization(d, &parse_potential(&spec)?, restarts, seed)?
                }
                other => {
                    return Err(CrossError::Parse(format!(
                        "unknown objective `{other}` (expected eta or polarization)"
                    )))
                }
            };
            println!("objective = {}", fmt17(result.objective));
            println!("converged = {}", result.converged);
            println!(
                "distance_to_cross_polytope = {}",
                fmt17(result.distance_to_cross_polytope)
            );
            for y in result.best.representatives() {
                println!("rep = {}", coords17(y));
            }
            if let Some(path) = trace {
                let mut out = String::from("iteration,objective\n");
                for (it, v) in &result.trace {
                    let _ = writeln!(out, "{it},{}", fmt17(*v));
                }
                std::fs::write(path, out)?;
            }
            Ok(Ok(()))
        }

        Command::VerifyCovering { d, trials, seed } => {
            let bound = 1.0 / (d as f64).sqrt();
            let mut worst_margin = f64::INFINITY;
            for t in 0..trials {
                let cfg = geom::random_antipodal(d, seed.wrapping_add(t))?;
                let check = covering::check_covering_bound(&cfg);
                let margin = check.bound - check.eta;
                worst_margin = worst_margin.min(margin);
                if !check.satisfied {
                    println!(
                        "trial {t}: VIOLATION eta = {} > bound = {}",
                        fmt17(check.eta),
                        fmt17(check.bound)
                    );
                    return Ok(Err(CheckFailed(format!(
                        "covering bound violated at trial {t}"
                    ))));
                }
            }
            println!("bound = {}", fmt17(bound));
            println!("trials = {trials}, all satisfied");
            println!("worst_margin = {}", fmt17(worst_margin));
            Ok(Ok(()))
        }

        Command::VerifyPolarization {
            d,
            potential,
            trials,
            seed,
            csv,
        } => {
            let g = parse_potential(&potential)?;
            let bound = polarization::cross_polytope_closed_form(d, &g);
            let mut rows = String::from("trial,lhs,rhs,holds,equality\n");
            let mut worst_margin = f64::INFINITY;
            let mut failed = None;
            for t in 0..trials {
                let cfg = geom::random_antipodal(d, seed.wrapping_add(t))?;
                let chain = polarization::verify_polarization_chain(&cfg, &g, 8, seed)?;
                worst_margin = worst_margin.min(chain.rhs - chain.lhs);
                let _ = writeln!(
                    rows,
                    "{t},{},{},{},{}",
                    fmt17(chain.lhs),
                    fmt17(chain.rhs),
                    chain.holds,
                    chain.equality
                );
                if !chain.holds && failed.is_none() {
                    failed = Some(t);
                }
            }
            if let Some(path) = csv {
                std::fs::write(path, &rows)?;
            }
            println!("bound = {}", fmt17(bound));
            println!("worst_margin = {}", fmt17(worst_margin));
            match failed {
                None => {
                    println!("trials = {trials}, all satisfied");
                    Ok(Ok(()))
                }
                Some(t) => Ok(Err(CheckFailed(format!(
                    "polarization bound violated at trial {t}"
                )))),
            }
        }

        Command::VerifyFacets {
            d,
            trials,
            samples,
            seed,
        } => {
            let expected = 1u64 << d;
            let mut passed = 0u64;
            for t in 0..trials {
                let cfg = geom::random_antipodal(d, seed.wrapping_add(t))?;
                let h = hull::enumerate_facets(&cfg)?;
                let count_ok = h.facets.len() as u64 == expected
                    && h.facets.iter().all(|f| f.offset > 0.0);
                // Decorrelate the cover sampler from the config generator:
                // with a shared seed the first samples reproduce the
                // representatives exactly, which sit on cone boundaries.
                let cover_seed = seed.wrapping_add(t) ^ 0x9e37_79b9_7f4a_7c15;
                let cover_ok =
                    hull::verify_boundary_cover_with_eps(&h, samples, cover_seed, cli.tol_hull)?;
                if count_ok && cover_ok {
                    passed += 1;
                } else {
                    println!("trial {t}: FAILED (facets = {}, cover = {cover_ok})", h.facets.len());
                }
            }
            println!("expected_facets = {expected}");
            println!("passed = {passed}/{trials}");
            if passed == trials {
                Ok(Ok(()))
            } else {
                Ok(Err(CheckFailed("facet structure check failed".into())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(CheckFailed(msg))) => {
            eprintln!("mathematical check failed: {msg}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
