//! `gdkp`: band structures, Zak phases, zero modes, edge states and
//! bulk-boundary checks for generalized Dirac-Kronig-Penney chains.

mod config;
mod output;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use config::Config;
use gdkp::boundary::{self, BbcOptions, EdgeSweepPoint};
use gdkp::kurasov::{coupling_to_strengths, strengths_to_coupling};
use gdkp::spectral::{band_structure, default_window, zero_modes_tol, DEFAULT_EPS_SCAN};
use gdkp::zak::{self, ParamPoint, DEFAULT_LOOP};
use gdkp::{from_family, make_coupling, Coupling, Family};
use output::{Format, Out};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "gdkp", version, about = "Generalized Dirac-Kronig-Penney chains")]
struct Cli {
    /// Particle mass m > 0 [default: 1]
    #[arg(long, global = true)]
    mass: Option<f64>,
    /// Output format [default: csv for bands, edges and sweeps, json otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel work [default: all cores]
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Tolerance: zero-mode degeneracy for zero-modes, on Z̃/π for bbc
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// JSON file of defaults keyed by long flag name; explicit flags win
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
struct CouplingArgs {
    /// Named family: D, BDI or AIII
    #[arg(long)]
    family: Option<Family>,
    /// Family angle θ in [-π, π)
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    /// AIII parameter m2 in [-1, 1] [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    m2: Option<f64>,
    /// Raw phase η (with --m)
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Raw unit 4-vector m0 m1 m2 m3 (with --eta)
    #[arg(long, num_args = 4, allow_negative_numbers = true)]
    m: Option<Vec<f64>>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energy bands over a uniform k grid
    Bands {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Number of k points [default: 201]
        #[arg(long)]
        k: Option<usize>,
        /// Energy window lo hi [default: ±(3π + m)]
        #[arg(long, num_args = 2, allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
        /// Energy scan points per k [default: 4000]
        #[arg(long)]
        eps_scan: Option<usize>,
    },
    /// Zak phase of one band
    Zak {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Band label n ≠ 0 [default: 1]
        #[arg(long, allow_negative_numbers = true)]
        band: Option<i32>,
        /// Wilson loop size [default: 2048]
        #[arg(long = "M")]
        m_loop: Option<usize>,
        /// Edge position; adds the translated phase Z̃(d)
        #[arg(long)]
        d: Option<f64>,
    },
    /// Zero-energy states of the bulk chain
    ZeroModes {
        #[command(flatten)]
        coupling: CouplingArgs,
    },
    /// Edge states of the chain truncated at d with boundary angle α
    Edges {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Edge position in [0, 1) [default: 0.5]
        #[arg(long)]
        d: Option<f64>,
        /// Boundary angle in [-π, π) [default: π/2]
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        /// Search gaps between bands -n..n [default: 2]
        #[arg(long)]
        n_max: Option<u32>,
        /// Scan points per gap [default: 2000]
        #[arg(long)]
        scan: Option<usize>,
    },
    /// Bulk-boundary verdict for one band and truncation
    Bbc {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Band label n ≠ 0 [default: 1]
        #[arg(long, allow_negative_numbers = true)]
        band: Option<i32>,
        /// Edge position in [0, 1) [default: 0.5]
        #[arg(long)]
        d: Option<f64>,
        /// Boundary angle in [-π, π) [default: π/2]
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        /// Wilson loop size [default: 2048]
        #[arg(long = "M")]
        m_loop: Option<usize>,
        /// Scan points per gap [default: 2000]
        #[arg(long)]
        scan: Option<usize>,
        /// Count every gap below and above the band, not only the adjacent ones
        #[arg(long)]
        cumulative: bool,
    },
    /// Parameter sweeps producing phase-diagram tables
    #[command(subcommand)]
    Sweep(Sweep),
    /// Convert between couplings and δ-potential strengths
    Kurasov {
        #[command(flatten)]
        coupling: CouplingArgs,
        /// Strengths g0 g1 g2 g3; converts to a coupling instead
        #[arg(long, num_args = 4, allow_negative_numbers = true)]
        g: Option<Vec<f64>>,
    },
}

#[derive(Subcommand, Debug)]
enum Sweep {
    /// Zak phases over θ (and m2 for AIII)
    Zak {
        /// Named family: D, BDI or AIII
        #[arg(long)]
        family: Option<Family>,
        /// θ grid lo hi count, sampled at cell midpoints [default: -π π 64]
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        theta_range: Option<Vec<f64>>,
        /// m2 grid lo hi count for AIII [default: -0.95 0.95 20; 0 0 1 otherwise]
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        m2_range: Option<Vec<f64>>,
        /// Bands [default: -1,1]
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        bands: Option<Vec<i32>>,
        /// Wilson loop size [default: 2048]
        #[arg(long = "M")]
        m_loop: Option<usize>,
        /// Rows this close to a gap-closing θ are flagged [default: 0.02]
        #[arg(long)]
        margin: Option<f64>,
    },
    /// Edge-state counts over θ × α (fixed d) or θ × d (fixed α)
    #[command(group(ArgGroup::new("axis").args(["alpha_axis", "d_axis"])))]
    Edges {
        /// Named family: D, BDI or AIII
        #[arg(long)]
        family: Option<Family>,
        /// AIII parameter m2 in [-1, 1] [default: 0]
        #[arg(long, allow_negative_numbers = true)]
        m2: Option<f64>,
        /// Vary α at fixed --d (the default axis)
        #[arg(long)]
        alpha_axis: bool,
        /// Vary d at fixed --alpha
        #[arg(long)]
        d_axis: bool,
        /// Fixed d for the α axis [default: 0.5]
        #[arg(long)]
        d: Option<f64>,
        /// Fixed α for the d axis [default: π/2]
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
        /// θ grid lo hi count [default: -π π 64]
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        theta_range: Option<Vec<f64>>,
        /// α grid lo hi count [default: -π π 64]
        #[arg(long, num_args = 3, allow_negative_numbers = true)]
        alpha_range: Option<Vec<f64>>,
        /// d grid lo hi count [default: 0 1 20]
        #[arg(long, num_args = 3)]
        d_range: Option<Vec<f64>>,
        /// Gaps as below:above band pairs [default: -1:1,1:2]
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        gaps: Option<Vec<String>>,
        /// Scan points per gap [default: 2000]
        #[arg(long)]
        scan: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let kind = e.downcast_ref::<gdkp::Error>().map_or("Error", |g| g.kind());
            let msg = serde_json::json!({ "error": format!("{e:#}"), "kind": kind });
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref())?;
    let mass: f64 = cfg.or(cli.mass, "mass", 1.0)?;
    if !(mass > 0.0 && mass.is_finite()) {
        bail!(gdkp::Error::InvalidInput("mass must be positive".into()));
    }
    if let Some(w) = cfg.pick(cli.workers, "workers")? {
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().context("starting worker pool")?;
    }
    let format = match cli.format {
        Some(FormatArg::Csv) => Some(Format::Csv),
        Some(FormatArg::Json) => Some(Format::Json),
        None => match cfg.get::<String>("format")?.as_deref() {
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            Some(other) => bail!("unknown format {other:?}"),
            None => None,
        },
    };
    let out = Out::new(cfg.pick(cli.out, "out")?);
    let tol: Option<f64> = cfg.pick(cli.tol, "tol")?;

    match cli.command {
        Command::Bands { coupling, k, window, eps_scan } => {
            let c = resolve_coupling(&cfg, &coupling)?;
            let k = cfg.or(k, "k", 201)?;
            let window = match cfg.pick(window, "window")? {
                Some(w) => pair(&w, "window")?,
                None => default_window(2, mass),
            };
            let scan = cfg.or(eps_scan, "eps-scan", DEFAULT_EPS_SCAN)?;
            let bs = band_structure(&c, mass, k, window, scan)?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => out.text(&bs.to_csv()),
                Format::Json => out.json(&bs),
            }
        }
        Command::Zak { coupling, band, m_loop, d } => {
            let c = resolve_coupling(&cfg, &coupling)?;
            let band = cfg.or(band, "band", 1)?;
            let m_loop = cfg.or(m_loop, "M", DEFAULT_LOOP)?;
            let d: Option<f64> = cfg.pick(d, "d")?;
            let z = zak::zak_phase(&c, mass, band, m_loop)?;
            let rec = output::ZakOut { translated_phase: d.map(|d| zak::translated_zak(&z, d)), d, zak: z };
            output::emit(&out, format.unwrap_or(Format::Json), &rec)
        }
        Command::ZeroModes { coupling } => {
            let c = resolve_coupling(&cfg, &coupling)?;
            let z = zero_modes_tol(&c, mass, tol.unwrap_or(1e-10));
            output::emit(&out, format.unwrap_or(Format::Json), &z)
        }
        Command::Edges { coupling, d, alpha, n_max, scan } => {
            let c = resolve_coupling(&cfg, &coupling)?;
            let d = check_d(cfg.or(d, "d", 0.5)?)?;
            let alpha = cfg.or(alpha, "alpha", FRAC_PI_2)?;
            let n_max = cfg.or(n_max, "n-max", 2)?;
            let scan = cfg.or(scan, "scan", boundary::DEFAULT_GAP_SCAN)?;
            let spec = boundary::edge_spectrum(&c, mass, d, alpha, n_max, scan)?;
            match format.unwrap_or(Format::Csv) {
                Format::Csv => out.text(&output::edges_csv(&spec)?),
                Format::Json => out.json(&spec),
            }
        }
        Command::Bbc { coupling, band, d, alpha, m_loop, scan, cumulative } => {
            let family = cfg.pick(coupling.family, "family")?.context("bbc needs --family")?;
            let theta = cfg.pick(coupling.theta, "theta")?.context("bbc needs --theta")?;
            let m2 = cfg.or(coupling.m2, "m2", 0.0)?;
            let defaults = BbcOptions::<f64>::default();
            let opts = BbcOptions {
                m_loop: cfg.or(m_loop, "M", defaults.m_loop)?,
                scan: cfg.or(scan, "scan", defaults.scan)?,
                cumulative: cfg.flag(cumulative, "cumulative")?,
                tol: tol.unwrap_or(defaults.tol),
            };
            let band = cfg.or(band, "band", 1)?;
            let d = check_d(cfg.or(d, "d", 0.5)?)?;
            let alpha = cfg.or(alpha, "alpha", FRAC_PI_2)?;
            let rec = boundary::bbc_verdict(family, theta, m2, mass, band, d, alpha, &opts)?;
            output::emit(&out, format.unwrap_or(Format::Json), &rec)
        }
        Command::Sweep(Sweep::Zak { family, theta_range, m2_range, bands, m_loop, margin }) => {
            let family = cfg.pick(family, "family")?.context("sweep needs --family")?;
            let thetas = grid(cfg.pick(theta_range, "theta-range")?, [-PI, PI, 64.0])?;
            let m2_default = if family == Family::Aiii { [-0.95, 0.95, 20.0] } else { [0.0, 0.0, 1.0] };
            let m2s = grid(cfg.pick(m2_range, "m2-range")?, m2_default)?;
            let points: Vec<ParamPoint<f64>> =
                thetas.iter().flat_map(|&theta| m2s.iter().map(move |&m2| ParamPoint { theta, m2 })).collect();
            let bands = cfg.or(bands, "bands", vec![-1, 1])?;
            let m_loop = cfg.or(m_loop, "M", DEFAULT_LOOP)?;
            let margin = cfg.or(margin, "margin", 0.02)?;
            let rows = zak::zak_sweep(family, &points, mass, &bands, m_loop, margin);
            match format.unwrap_or(Format::Csv) {
                Format::Csv => out.text(&output::zak_rows_csv(&rows)?),
                Format::Json => out.json(&rows),
            }
        }
        Command::Sweep(Sweep::Edges {
            family,
            m2,
            alpha_axis: _,
            d_axis,
            d,
            alpha,
            theta_range,
            alpha_range,
            d_range,
            gaps,
            scan,
        }) => {
            let family = cfg.pick(family, "family")?.context("sweep needs --family")?;
            let m2 = cfg.or(m2, "m2", 0.0)?;
            let thetas = grid(cfg.pick(theta_range, "theta-range")?, [-PI, PI, 64.0])?;
            let d_axis = cfg.flag(d_axis, "d-axis")?;
            let (ds, alphas) = if d_axis {
                let ds = grid(cfg.pick(d_range, "d-range")?, [0.0, 1.0, 20.0])?;
                (ds, vec![cfg.or(alpha, "alpha", FRAC_PI_2)?])
            } else {
                let a = grid(cfg.pick(alpha_range, "alpha-range")?, [-PI, PI, 64.0])?;
                (vec![check_d(cfg.or(d, "d", 0.5)?)?], a)
            };
            let gaps = parse_gaps(&cfg.or(gaps, "gaps", vec!["-1:1".into(), "1:2".into()])?)?;
            let scan = cfg.or(scan, "scan", boundary::DEFAULT_GAP_SCAN)?;
            let mut points = Vec::new();
            for &theta in &thetas {
                for &d in &ds {
                    for &alpha in &alphas {
                        points.push(EdgeSweepPoint { theta, m2, d: check_d(d)?, alpha });
                    }
                }
            }
            let rows = boundary::edge_sweep(family, &points, mass, &gaps, scan);
            match format.unwrap_or(Format::Csv) {
                Format::Csv => out.text(&output::edge_rows_csv(&rows, &gaps)?),
                Format::Json => out.json(&rows),
            }
        }
        Command::Kurasov { coupling, g } => match cfg.pick(g, "g")? {
            Some(g) => {
                let g: [f64; 4] = g.try_into().map_err(|_| anyhow::anyhow!("--g takes four values"))?;
                let c = strengths_to_coupling(g)?;
                output::emit(
                    &out,
                    format.unwrap_or(Format::Json),
                    &output::KurasovOut { coupling: c, strengths: Some(g) },
                )
            }
            None => {
                let c = resolve_coupling(&cfg, &coupling)?;
                let rec = output::KurasovOut { coupling: c, strengths: coupling_to_strengths(&c).finite() };
                output::emit(&out, format.unwrap_or(Format::Json), &rec)
            }
        },
    }
}

fn resolve_coupling(cfg: &Config, a: &CouplingArgs) -> Result<Coupling> {
    let eta: Option<f64> = cfg.pick(a.eta, "eta")?;
    let m: Option<Vec<f64>> = cfg.pick(a.m.clone(), "m")?;
    let family: Option<Family> = cfg.pick(a.family, "family")?;
    match (eta, m, family) {
        (Some(eta), Some(m), None) => {
            let m: [f64; 4] = m.try_into().map_err(|_| anyhow::anyhow!("--m takes four values"))?;
            Ok(make_coupling(eta, m)?)
        }
        (None, None, Some(family)) => {
            let theta = cfg.pick(a.theta, "theta")?.context("--family needs --theta")?;
            let m2: Option<f64> = cfg.pick(a.m2, "m2")?;
            if family != Family::Aiii && m2.is_some_and(|v| v != 0.0) {
                bail!(gdkp::Error::InvalidInput("m2 applies only to the AIII family".into()));
            }
            Ok(from_family(family, theta, m2.unwrap_or(0.0))?)
        }
        (None, None, None) => bail!("give a coupling: --family with --theta, or --eta with --m"),
        _ => bail!("give either --family or --eta with --m, not both"),
    }
}

fn check_d(d: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&d) {
        bail!(gdkp::Error::InvalidInput("d out of range [0, 1)".into()));
    }
    Ok(d)
}

fn pair(v: &[f64], name: &str) -> Result<(f64, f64)> {
    match v {
        [a, b] => Ok((*a, *b)),
        _ => bail!("--{name} takes two values"),
    }
}

/// `count` cell midpoints of `[lo, hi]`; a single point when `lo == hi`.
fn grid(spec: Option<Vec<f64>>, default: [f64; 3]) -> Result<Vec<f64>> {
    let spec = spec.unwrap_or_else(|| default.to_vec());
    let [lo, hi, n] = spec[..] else { bail!("ranges take lo hi count") };
    if n < 1.0 || n.fract() != 0.0 || hi < lo || hi.is_nan() || lo.is_nan() {
        bail!("bad range {lo} {hi} {n}");
    }
    let n = n as usize;
    if lo == hi {
        return Ok(vec![lo; 1]);
    }
    Ok((0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect())
}

fn parse_gaps(specs: &[String]) -> Result<Vec<(i32, i32)>> {
    specs
        .iter()
        .map(|s| {
            let (a, b) = s.split_once(':').with_context(|| format!("gap {s:?} is not below:above"))?;
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}
