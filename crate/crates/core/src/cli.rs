//! Command-line interface: validation, spectra, drift assembly, density
//! slices, decoherence curves, figure presets, parameter sweeps and the
//! verification suite. All figure outputs are plot-ready CSV.
//!
//! Exit codes: 0 success, 1 validation/runtime failure, 2 verification
//! failure, 64 usage error.
//!
//! Environment: `DCL_OUT_DIR` overrides the configured output directory,
//! `DCL_THREADS` caps the worker pool.

use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config::{self, Scenario};
use crate::decoherence::{
    self, build_state, decoherence_series, figure_curves, StateKind,
};
use crate::master_eq;
use crate::model::ValidatedModel;
use crate::normal_modes;
use crate::oracle;
use crate::propagator::{grid_eval, GridDomain, GridSpec};
use crate::spectral;

const EXIT_OK: i32 = 0;
const EXIT_FAILURE: i32 = 1;
const EXIT_VERIFY: i32 = 2;
const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "dcl",
    version,
    about = "Coupled dissipative oscillator pair: master-equation coefficients, closed-form Gaussian evolution and decoherence analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every parameter invariant plus the normal-mode stability gate.
    Validate {
        /// Scenario config file; the built-in benchmark scenario when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Normal-mode frequencies, stability verdict and closed-form audit
    /// diagnostics, as key=value text.
    Spectrum {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Drift matrix M over (r1,K1,r2,K2) and the (r1,r2) diffusion form, as CSV.
    Drift {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Eigenvalues of the drift matrix, condition number and defectiveness.
    Eig {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Decoherence curve of the configured scenario: CSV t,gamma,D,visibility
    /// with t in units of 1/gamma_1.
    Curve {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (overrides config and DCL_OUT_DIR).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Benchmark figure preset (1-4): five decoherence curves (decoupled
    /// reference plus topology x coupling-form combinations) and a manifest.
    Figure {
        /// Figure number, 1 through 4.
        #[arg(value_parser = clap::value_parser!(u8).range(1..=4))]
        number: u8,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        /// Curve extent in units of gamma_1 t.
        #[arg(long)]
        t_max_scaled: Option<f64>,
    },
    /// Dense 2D slice of the evolved density: CSV coord1,coord2,re,im plus a
    /// metadata sidecar.
    DensitySlice {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Evaluation time in units of gamma_1 t.
        #[arg(long, default_value_t = 0.0)]
        t_scaled: f64,
        /// Two free axes from R1,r1,R2,r2 (or K1,r1,K2,r2 with --fourier).
        #[arg(long, default_value = "R1,R2")]
        axes: String,
        /// First axis range as lo:hi:count.
        #[arg(long, default_value = "-15:15:101", allow_hyphen_values = true)]
        range1: String,
        /// Second axis range as lo:hi:count.
        #[arg(long, default_value = "-15:15:101", allow_hyphen_values = true)]
        range2: String,
        /// Evaluate the partially Fourier-transformed density instead.
        #[arg(long)]
        fourier: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-parameter sweep from the [sweep] config section: CSV parameter,t,D.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full oracle verification suite; CSV report, exit 2 on failure.
    Verify,
}

/// Entry point; argv excludes the program name.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let args = std::iter::once("dcl".to_string()).chain(argv);
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Ok(threads) = std::env::var("DCL_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_FAILURE
        }
    }
}

fn load_scenario(path: &Option<PathBuf>) -> Result<Scenario, String> {
    match path {
        None => Ok(Scenario::default_scenario()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
            config::parse_scenario(&text).map_err(|e| e.to_string())
        }
    }
}

fn validated(scenario: &Scenario) -> Result<ValidatedModel, String> {
    scenario.model.validate().map_err(|errs| {
        errs.iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    })
}

fn out_dir(flag: &Option<PathBuf>, scenario_dir: &str) -> PathBuf {
    if let Some(p) = flag {
        return p.clone();
    }
    if let Ok(env_dir) = std::env::var("DCL_OUT_DIR") {
        if !env_dir.is_empty() {
            return PathBuf::from(env_dir);
        }
    }
    PathBuf::from(scenario_dir)
}

fn scaled_time_grid(scenario: &Scenario) -> Result<Vec<f64>, String> {
    let gamma_1 = scenario.model.reservoir.gamma(1);
    if gamma_1 <= 0.0 {
        return Err("scaled time axis needs gamma_1 > 0".to_string());
    }
    let n = scenario.samples.max(2);
    Ok((0..n)
        .map(|k| scenario.t_max_scaled * k as f64 / (n - 1) as f64 / gamma_1)
        .collect())
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| format!("mkdir {}: {e}", parent.display()))?;
    }
    fs::write(path, contents).map_err(|e| format!("write {}: {e}", path.display()))
}

fn curve_csv(
    model: &ValidatedModel,
    state: StateKind,
    scenario: &Scenario,
    grid: &[f64],
) -> Result<String, String> {
    let st = build_state(state, model.params(), &scenario.magnitudes)
        .map_err(|e| e.to_string())?
        .realized;
    let series = decoherence_series(model, &st, grid).map_err(|e| e.to_string())?;
    let gamma_1 = model.params().reservoir.gamma(1);
    let mut csv = String::from("t,gamma,D,visibility\n");
    for (i, t) in series.times.iter().enumerate() {
        csv.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e}\n",
            t * gamma_1,
            series.gamma_t[i],
            series.d_t[i],
            series.visibility_t[i]
        ));
    }
    Ok(csv)
}

fn dispatch(cmd: Command) -> Result<i32, String> {
    match cmd {
        Command::Validate { config } => {
            let scenario = load_scenario(&config)?;
            match scenario.model.validate() {
                Ok(v) => {
                    println!("valid");
                    for w in v.warnings() {
                        println!("warning: {w:?}");
                    }
                    Ok(EXIT_OK)
                }
                Err(errs) => {
                    for e in &errs {
                        println!("violation: {e}");
                    }
                    Ok(EXIT_FAILURE)
                }
            }
        }
        Command::Spectrum { config } => {
            let scenario = load_scenario(&config)?;
            let report = normal_modes::stability_check(&scenario.model);
            let cs = normal_modes::coupling_strengths(&scenario.model);
            println!("stable = {}", report.stable);
            println!("degenerate = {}", report.degenerate);
            println!("Omega_1 = {:.12e}", report.frequencies[0]);
            println!("Omega_2 = {:.12e}", report.frequencies[1]);
            println!("g_1 = {:.12e}{:+.12e}i", cs.g_1.re, cs.g_1.im);
            println!("g_2 = {:.12e}{:+.12e}i", cs.g_2.re, cs.g_2.im);
            println!("detuning_inequality_holds = {}", report.detuning_inequality_holds);
            println!("product_inequality_holds = {}", report.product_inequality_holds);
            println!("inequalities_match_oracle = {}", report.closed_form_agrees);
            match cs.closed_form_frequencies {
                [Some(a), Some(b)] => {
                    println!("closed_form_Omega_1 = {a:.12e}");
                    println!("closed_form_Omega_2 = {b:.12e}");
                    println!("closed_form_frequency_rel_dev = {:.3e}", cs.closed_form_rel_dev);
                }
                _ => println!("closed_form_Omega = undefined"),
            }
            if report.stable {
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_FAILURE)
            }
        }
        Command::Drift { config } => {
            let scenario = load_scenario(&config)?;
            validated(&scenario)?;
            let sys = master_eq::build_drift_system(&scenario.model).map_err(|e| e.to_string())?;
            println!("# drift matrix M over (r1,K1,r2,K2)");
            for r in 0..4 {
                let row: Vec<String> = (0..4).map(|c| format!("{:.12e}", sys.m[(r, c)])).collect();
                println!("{}", row.join(","));
            }
            println!("# diffusion form over (r1,r2)");
            for r in 0..2 {
                let row: Vec<String> =
                    (0..2).map(|c| format!("{:.12e}", sys.diffusion[(r, c)])).collect();
                println!("{}", row.join(","));
            }
            Ok(EXIT_OK)
        }
        Command::Eig { config } => {
            let scenario = load_scenario(&config)?;
            validated(&scenario)?;
            let sys = master_eq::build_drift_system(&scenario.model).map_err(|e| e.to_string())?;
            let spec = spectral::eigendecompose(&sys.m);
            println!("re,im");
            for l in &spec.lambdas {
                println!("{:.12e},{:.12e}", l.re, l.im);
            }
            println!("# condition_number = {:.6e}", spec.condition_number);
            println!("# defective = {}", spec.defective);
            Ok(EXIT_OK)
        }
        Command::Curve { config, out } => {
            let scenario = load_scenario(&config)?;
            let model = validated(&scenario)?;
            let grid = scaled_time_grid(&scenario)?;
            let csv = curve_csv(&model, scenario.state_kind, &scenario, &grid)?;
            let dir = out_dir(&out, &scenario.out_dir);
            let topology = if scenario.model.reservoir.is_common() { "common" } else { "distinct" };
            let path = dir.join(format!(
                "curve_{}_{}.csv",
                scenario.state_kind.name(),
                topology
            ));
            write_file(&path, &csv)?;
            let manifest = format!(
                "# decoherence curve\n# t column is gamma_1*t (scaled time)\n{}",
                config::serialize_scenario(&scenario)
            );
            write_file(&dir.join("curve_manifest.txt"), &manifest)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::Figure {
            number,
            out,
            samples,
            t_max_scaled,
        } => {
            let Some(curves) = figure_curves(number) else {
                return Err(format!("figure number must be 1..=4, got {number}"));
            };
            let mut scenario = Scenario::default_scenario();
            if let Some(s) = samples {
                scenario.samples = s;
            }
            if let Some(t) = t_max_scaled {
                scenario.t_max_scaled = t;
            }
            let dir = out_dir(&out, &scenario.out_dir).join(format!("figure{number}"));
            let mut manifest = String::new();
            manifest.push_str(&format!(
                "# figure {number} preset: decoherence D(t) against scaled time gamma_1*t\n\
                 # samples = {}, t_max_scaled = {:?}\n\
                 # columns: t,gamma,D,visibility (t is gamma_1*t)\n\n",
                scenario.samples, scenario.t_max_scaled
            ));
            for curve in &curves {
                let model = curve.model.validate().map_err(|e| format!("{e:?}"))?;
                let mut sc = scenario.clone();
                sc.model = curve.model.clone();
                let grid = scaled_time_grid(&sc)?;
                let csv = curve_csv(&model, curve.state, &sc, &grid)?;
                let file = format!("{}.csv", curve.label);
                write_file(&dir.join(&file), &csv)?;
                manifest.push_str(&format!("[curve {}]\nfile = {}\nstate = {}\n", curve.label, file, curve.state.name()));
                manifest.push_str(&config::serialize_scenario(&Scenario {
                    model: curve.model.clone(),
                    state_kind: curve.state,
                    ..sc.clone()
                }));
                manifest.push('\n');
            }
            write_file(&dir.join("manifest.txt"), &manifest)?;
            println!("{}", dir.display());
            Ok(EXIT_OK)
        }
        Command::DensitySlice {
            config,
            t_scaled,
            axes,
            range1,
            range2,
            fourier,
            out,
        } => {
            let scenario = load_scenario(&config)?;
            let model = validated(&scenario)?;
            let state = build_state(scenario.state_kind, model.params(), &scenario.magnitudes)
                .map_err(|e| e.to_string())?
                .realized;
            let gamma_1 = scenario.model.reservoir.gamma(1);
            if gamma_1 <= 0.0 && t_scaled != 0.0 {
                return Err("scaled time needs gamma_1 > 0".to_string());
            }
            let t = if t_scaled == 0.0 { 0.0 } else { t_scaled / gamma_1 };
            let domain = if fourier { GridDomain::Fourier } else { GridDomain::Position };
            let axis_index = |name: &str| -> Result<usize, String> {
                let names: [&str; 4] = if fourier {
                    ["K1", "r1", "K2", "r2"]
                } else {
                    ["R1", "r1", "R2", "r2"]
                };
                names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| format!("unknown axis `{name}` (expected one of {names:?})"))
            };
            let mut parts = axes.split(',');
            let (a1, a2) = (
                parts.next().ok_or("axes needs two comma-separated names")?.trim().to_string(),
                parts.next().ok_or("axes needs two comma-separated names")?.trim().to_string(),
            );
            let parse_range = |s: &str| -> Result<(f64, f64, usize), String> {
                let p: Vec<&str> = s.split(':').collect();
                if p.len() != 3 {
                    return Err(format!("range `{s}` must be lo:hi:count"));
                }
                Ok((
                    p[0].parse().map_err(|e| format!("range `{s}`: {e}"))?,
                    p[1].parse().map_err(|e| format!("range `{s}`: {e}"))?,
                    p[2].parse().map_err(|e| format!("range `{s}`: {e}"))?,
                ))
            };
            let (lo1, hi1, n1) = parse_range(&range1)?;
            let (lo2, hi2, n2) = parse_range(&range2)?;
            let spec = GridSpec {
                domain,
                free: (axis_index(&a1)?, axis_index(&a2)?),
                fixed: [0.0; 4],
                ranges: [(lo1, hi1), (lo2, hi2)],
                counts: (n1, n2),
            };
            let samples = grid_eval(&model, &state, t, &spec).map_err(|e| e.to_string())?;
            let mut csv = String::from("coord1,coord2,re,im\n");
            for s in &samples {
                csv.push_str(&format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    s.coords[spec.free.0], s.coords[spec.free.1], s.value.re, s.value.im
                ));
            }
            let dir = out_dir(&out, &scenario.out_dir);
            let path = dir.join("density_slice.csv");
            write_file(&path, &csv)?;
            let meta = format!(
                "# density slice\naxes = {a1},{a2}\ndomain = {}\nt = {t:?}\nt_scaled = {t_scaled:?}\nrange1 = {range1}\nrange2 = {range2}\n\n{}",
                if fourier { "fourier" } else { "position" },
                config::serialize_scenario(&scenario)
            );
            write_file(&dir.join("density_slice.meta.txt"), &meta)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let scenario = config::parse_scenario(&text).map_err(|e| e.to_string())?;
            let sweep = config::parse_sweep(&text)
                .map_err(|e| e.to_string())?
                .ok_or("config has no [sweep] section")?;
            let gamma_1 = scenario.model.reservoir.gamma(1);
            if gamma_1 <= 0.0 {
                return Err("sweep needs gamma_1 > 0 for the scaled time axis".to_string());
            }
            let mut csv = String::from("parameter,t,D\n");
            for &value in &sweep.values {
                let params = sweep.axis.apply(&scenario.model, value);
                let model = params.validate().map_err(|e| format!("{e:?}"))?;
                let state = build_state(scenario.state_kind, &params, &scenario.magnitudes)
                    .map_err(|e| e.to_string())?
                    .realized;
                for &ts in &sweep.times_scaled {
                    let d = decoherence::decoherence_function(&model, &state, ts / gamma_1)
                        .map_err(|e| e.to_string())?;
                    csv.push_str(&format!("{value:?},{ts:?},{d:.12e}\n"));
                }
            }
            let dir = out_dir(&out, &scenario.out_dir);
            let path = dir.join(format!("sweep_{}.csv", sweep.axis.name()));
            write_file(&path, &csv)?;
            println!("{}", path.display());
            Ok(EXIT_OK)
        }
        Command::Verify => {
            let reports = oracle::verification_suite();
            println!("{}", oracle::OracleReport::csv_header());
            let mut all_pass = true;
            for r in &reports {
                println!("{}", r.csv_row());
                all_pass &= r.pass;
            }
            Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY })
        }
    }
}
