//! Command-line front end: excitation profiles, coupling-ratio curves,
//! narrowband phase solving, catalog verification, fidelity landscape scans,
//! gate-level phase optimization, and addressing-selectivity curves.
//!
//! Units: angles (pulse areas, phases) are read and written in units of pi;
//! numeric tokens may carry an optional `pi` suffix. Lamb-Dicke parameters,
//! area scales and leak fractions are dimensionless.

mod config;
mod range;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{pick, required, ConfigMap};
use iongate_core as core;
use range::{parse_phase_list, parse_range, RangeSpec, Unit};

#[derive(Debug)]
enum CliError {
    /// Bad flags, ranges, names or files: exit code 1.
    Usage(String),
    /// Non-convergence or truncation: exit code 2.
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<String> for CliError {
    fn from(m: String) -> Self {
        CliError::Usage(m)
    }
}

impl From<core::Error> for CliError {
    fn from(e: core::Error) -> Self {
        match e {
            core::Error::SolverStalled { .. }
            | core::Error::Truncation { .. }
            | core::Error::ScanCell { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("io error: {e}"))
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "iongate",
    version,
    about = "Composite-pulse design and trapped-ion C^n-NOT gate simulation",
    after_help = "Angles are in units of pi on every input and output; an optional `pi` \
                  suffix on numeric tokens is accepted (0:4pi:2000 equals 0:4:2000). \
                  Ranges are min:max:count."
)]
struct Cli {
    /// Optional key = value file mirroring every flag; flags win on conflict
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for scans (default: IONGATE_THREADS or all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Excitation profile p(A) of a composite sequence
    Profile(ProfileArgs),
    /// Sideband pulse-area ratio curves vs the Lamb-Dicke parameter
    Couplings(CouplingsArgs),
    /// Solve the narrowband flat-bottom conditions for m free phases
    Solve(SolveArgs),
    /// Regression-check the built-in catalog and the fidelity oracle
    VerifyCatalog(VerifyArgs),
    /// Scan gate fidelity over the (eta, area-scale) plane
    Scan(ScanArgs),
    /// Optimize narrowband phases against the gate-level objective
    Optimize(OptimizeArgs),
    /// Excitation leakage onto a neighbor ion vs its area fraction
    Selectivity(SelectivityArgs),
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

fn load_config(path: &Option<PathBuf>) -> CliResult<ConfigMap> {
    match path {
        Some(p) => Ok(ConfigMap::load(p)?),
        None => Ok(ConfigMap::default()),
    }
}

fn setup_threads(flag: Option<usize>) -> CliResult<()> {
    let from_env = std::env::var("IONGATE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    if let Some(n) = flag.or(from_env) {
        if n == 0 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        // A second initialization in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Sequence from a catalog name or a phase file (one value per line, units
/// of pi).
fn load_sequence(
    name: &Option<String>,
    phase_file: &Option<PathBuf>,
) -> CliResult<core::CompositeSequence> {
    match (name, phase_file) {
        (Some(n), None) => Ok(core::catalog(n)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let mut phases = Vec::new();
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let value: f64 = line.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "{}:{}: `{line}` is not a phase in units of pi",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                phases.push(value * PI);
            }
            let label = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "file".into());
            Ok(core::CompositeSequence::new(label, phases)?)
        }
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either a sequence name or a phase file, not both".into(),
        )),
        (None, None) => Err(CliError::Usage(
            "missing sequence: pass a catalog name or a phase file".into(),
        )),
    }
}

fn write_phase_file(path: &Path, seq: &core::CompositeSequence) -> CliResult<()> {
    let mut out = String::new();
    for phase in seq.phases() {
        out.push_str(&format!("{:.6}\n", phase / PI));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn create(path: &Path) -> CliResult<std::io::BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", path.display())))?;
    Ok(std::io::BufWriter::new(file))
}

fn axis_of(r: RangeSpec) -> CliResult<core::Axis> {
    Ok(core::Axis::new(r.min, r.max, r.count)?)
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ProfileArgs {
    /// Catalog sequence name (N5, N9, ..., N13o, B3)
    #[arg(long)]
    sequence: Option<String>,
    /// Phase file: one phase per line, units of pi
    #[arg(long, value_name = "FILE")]
    phases: Option<PathBuf>,
    /// Pulse-area range in units of pi, e.g. 0:4pi:2000
    #[arg(long)]
    area: Option<String>,
    /// Output CSV (area_pi,probability)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn run_profile(args: &ProfileArgs, cfg: &ConfigMap) -> CliResult<()> {
    let sequence = pick(&args.sequence, cfg, "sequence")?;
    let phases = pick(&args.phases, cfg, "phases")?;
    let area = required(pick(&args.area, cfg, "area")?, "area")?;
    let out = required(pick(&args.out, cfg, "out")?, "out")?;

    let seq = load_sequence(&sequence, &phases)?;
    let r = parse_range(&area, Unit::AngleInPi)?;
    let profile = core::excitation_profile(&seq, r.min, r.max, r.count)?;
    let mut w = create(&out)?;
    writeln!(w, "area_pi,probability")?;
    for (a, p) in profile.areas.iter().zip(&profile.probabilities) {
        writeln!(w, "{:.9e},{:.9e}", a / PI, p)?;
    }
    w.flush()?;
    println!(
        "profile of {} over [{:.4}, {:.4}] pi, {} points -> {}",
        seq.label(),
        r.min / PI,
        r.max / PI,
        r.count,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// couplings
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CouplingsArgs {
    /// Lamb-Dicke range, e.g. 0.01:1:200
    #[arg(long)]
    eta: Option<String>,
    /// Sideband order (1 or 2)
    #[arg(long)]
    s: Option<u8>,
    /// Initial phonon number the defaults are built around
    #[arg(long)]
    v0: Option<usize>,
    /// Comma-separated lower levels v of the plotted transitions
    #[arg(long)]
    transitions: Option<String>,
    /// Lower level of the reference transition
    #[arg(long)]
    reference: Option<usize>,
    /// Output CSV (eta,<label>,...)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn run_couplings(args: &CouplingsArgs, cfg: &ConfigMap) -> CliResult<()> {
    let eta = required(pick(&args.eta, cfg, "eta")?, "eta")?;
    let s = pick(&args.s, cfg, "s")?.unwrap_or(2);
    let v0 = pick(&args.v0, cfg, "v0")?.unwrap_or(5);
    let transitions_text = pick(&args.transitions, cfg, "transitions")?;
    let reference = pick(&args.reference, cfg, "reference")?;
    let out = required(pick(&args.out, cfg, "out")?, "out")?;

    // Defaults mirror the second-sideband gate pairs (reference = weakest
    // Toffoli pair) and the first-sideband dressing ladder around v0.
    let (transitions, v_ref) = match (transitions_text, reference, s) {
        (Some(text), r, _) => {
            let list: Vec<usize> = text
                .split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| format!("bad transition `{t}`")))
                .collect::<Result<_, _>>()?;
            let r = r.ok_or_else(|| {
                CliError::Usage("explicit --transitions needs --reference".into())
            })?;
            (list, r)
        }
        (None, r, 2) => {
            let low = v0
                .checked_sub(3)
                .ok_or_else(|| CliError::Usage(format!("v0 = {v0} too small for s = 2 defaults")))?;
            (vec![v0 - 1, v0 + 1], r.unwrap_or(low))
        }
        (None, r, _) => {
            let low = v0
                .checked_sub(3)
                .ok_or_else(|| CliError::Usage(format!("v0 = {v0} too small for s = 1 defaults")))?;
            ((low..=v0 + 2).collect(), r.unwrap_or(v0 - 1))
        }
    };

    let r = parse_range(&eta, Unit::Dimensionless)?;
    let etas = axis_of(r)?.values();
    let curve = core::area_ratio_curve(&etas, s, &transitions, v_ref)?;
    let mut w = create(&out)?;
    curve.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "coupling ratios (s = {s}, reference v = {v_ref}) at {} eta samples -> {}",
        etas.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SolveArgs {
    /// Number of free phases; the sequence has N = 2m + 1 pulses
    #[arg(long)]
    m: Option<usize>,
    /// Seed half-phases phi_2..phi_{m+1}, comma separated, units of pi
    #[arg(long)]
    seed: Option<String>,
    /// Label for the solved sequence
    #[arg(long)]
    label: Option<String>,
    /// Output phase file (one phase per line, units of pi)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn run_solve(args: &SolveArgs, cfg: &ConfigMap) -> CliResult<()> {
    let m = required(pick(&args.m, cfg, "m")?, "m")?;
    let seed_text = required(pick(&args.seed, cfg, "seed")?, "seed")?;
    let out = required(pick(&args.out, cfg, "out")?, "out")?;
    let label = pick(&args.label, cfg, "label")?;

    let seed = parse_phase_list(&seed_text)?;
    if seed.len() != m {
        return Err(CliError::Usage(format!(
            "seed has {} phases but m = {m}",
            seed.len()
        )));
    }
    let solved = core::solve_nb_phases(m, &seed)?;
    let solved = match label {
        Some(l) => core::CompositeSequence::new(l, solved.phases().to_vec())?,
        None => solved,
    };
    let residual = core::residual_norm(&core::nb_residuals(&solved)?);
    write_phase_file(&out, &solved)?;
    println!(
        "solved N = {} narrowband phases, residual norm {:.3e} -> {}",
        solved.len(),
        residual,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// verify-catalog
// ---------------------------------------------------------------------------

#[derive(Args)]
struct VerifyArgs {
    /// RNG seed for the Monte-Carlo fidelity oracle
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count per unitary pair
    #[arg(long)]
    mc_samples: Option<usize>,
}

fn run_verify(args: &VerifyArgs, cfg: &ConfigMap) -> CliResult<()> {
    let seed = pick(&args.seed, cfg, "seed")?.unwrap_or(1234);
    let mc_samples = pick(&args.mc_samples, cfg, "mc-samples")?.unwrap_or(10_000);
    let mut all_ok = true;
    let mut report = |name: &str, ok: bool, details: String| {
        println!("{}: {name} ({details})", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    };

    // Table round-trip.
    let mut ok = true;
    let mut detail = String::new();
    for entry in core::CATALOG {
        let seq = core::catalog(entry.name)?;
        let half = seq.half_phases()?;
        for (value, table) in half.iter().zip(entry.half_phases_pi) {
            if format!("{:.3}", value / PI) != format!("{table:.3}") {
                ok = false;
                detail = format!("{} drifted", entry.name);
            }
        }
    }
    report(
        "catalog round-trip",
        ok,
        if ok { "10 sequences".into() } else { detail },
    );

    // Newton refinement of the standard narrowband rows.
    for entry in core::CATALOG {
        if entry.family != core::SequenceFamily::NbStandard {
            continue;
        }
        let seed_phases: Vec<f64> = entry.half_phases_pi.iter().map(|p| p * PI).collect();
        match core::solve_nb_phases(seed_phases.len(), &seed_phases) {
            Ok(solved) => {
                let residual = core::residual_norm(&core::nb_residuals(&solved)?);
                let moved = solved
                    .half_phases()?
                    .iter()
                    .zip(&seed_phases)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let ok = residual <= core::NB_RESIDUAL_TOL && moved <= 5e-3 * PI;
                report(
                    &format!("refine {}", entry.name),
                    ok,
                    format!("residual {residual:.2e}, moved {:.2e} pi", moved / PI),
                );
            }
            Err(e) => report(&format!("refine {}", entry.name), false, e.to_string()),
        }
    }

    // Broadband plateau width against the single-pulse baseline.
    let b3 = core::catalog("B3")?;
    let single = core::CompositeSequence::new("single", vec![0.0])?;
    let w_b3 = core::flat_top_width(&b3, 1e-4)?;
    let w_single = core::flat_top_width(&single, 1e-4)?;
    report(
        "broadband plateau",
        w_b3 >= 10.0 * w_single,
        format!("B3 {w_b3:.3} rad vs single {w_single:.3} rad"),
    );

    // Small-eta coupling limits.
    let etas = [1e-4];
    let c2 = core::area_ratio_curve(&etas, 2, &[4, 6], 2)?;
    let l1 = (c2.ratios[0][0].unwrap() - (30f64 / 12.0).sqrt()).abs();
    let l2 = (c2.ratios[1][0].unwrap() - (56f64 / 12.0).sqrt()).abs();
    report(
        "coupling limits",
        l1 < 1e-6 && l2 < 1e-6,
        format!("deviations {l1:.1e}, {l2:.1e}"),
    );

    // Closed-form Haar average against Monte-Carlo.
    let mut worst = 0.0f64;
    let mut ok = true;
    for pair in 0..20u64 {
        let s = core::random_unitary(8, seed.wrapping_mul(2).wrapping_add(pair));
        let c = core::random_unitary(8, seed.wrapping_mul(3).wrapping_add(pair));
        let exact = core::average_fidelity(&s, &c)?;
        let (mc, se) = core::monte_carlo_average_fidelity(&s, &c, mc_samples, seed + pair)?;
        let sigmas = (mc - exact).abs() / se;
        worst = worst.max(sigmas);
        ok &= sigmas <= 3.0;
    }
    report(
        "fidelity oracle",
        ok,
        format!("20 pairs, worst deviation {worst:.2} sigma"),
    );

    if all_ok {
        Ok(())
    } else {
        Err(CliError::Numeric("catalog verification failed".into()))
    }
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ScanArgs {
    /// Gate family; only `cnnot` is implemented
    #[arg(long)]
    gate: Option<String>,
    /// Number of control ions
    #[arg(long)]
    n: Option<usize>,
    /// Catalog sequence name for step 3
    #[arg(long)]
    sequence: Option<String>,
    /// Phase file for step 3 (units of pi)
    #[arg(long, value_name = "FILE")]
    phases: Option<PathBuf>,
    /// Initial phonon number
    #[arg(long)]
    v0: Option<usize>,
    /// Lamb-Dicke range, e.g. 0.02:0.5:150
    #[arg(long)]
    eta: Option<String>,
    /// Area-scale range (A/A_min), e.g. 0.7:1.3:150
    #[arg(long)]
    area: Option<String>,
    /// Output CSV (eta,area_scale,fidelity)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Optional SVG heatmap
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
    /// Optional gate-matrix dump (re,im CSV) at the best cell
    #[arg(long, value_name = "FILE")]
    gate_csv: Option<PathBuf>,
}

fn run_scan(args: &ScanArgs, cfg: &ConfigMap) -> CliResult<()> {
    let gate = pick(&args.gate, cfg, "gate")?.unwrap_or_else(|| "cnnot".into());
    if gate != "cnnot" {
        return Err(CliError::Usage(format!(
            "unknown gate `{gate}`: only cnnot is implemented"
        )));
    }
    let n = pick(&args.n, cfg, "n")?.unwrap_or(2);
    let sequence = pick(&args.sequence, cfg, "sequence")?;
    let phases = pick(&args.phases, cfg, "phases")?;
    let v0 = required(pick(&args.v0, cfg, "v0")?, "v0")?;
    let eta = required(pick(&args.eta, cfg, "eta")?, "eta")?;
    let area = required(pick(&args.area, cfg, "area")?, "area")?;
    let out = required(pick(&args.out, cfg, "out")?, "out")?;
    let svg_path = pick(&args.svg, cfg, "svg")?;
    let gate_csv = pick(&args.gate_csv, cfg, "gate-csv")?;

    let nb = load_sequence(&sequence, &phases)?;
    let eta_axis = axis_of(parse_range(&eta, Unit::Dimensionless)?)?;
    let area_axis = axis_of(parse_range(&area, Unit::Dimensionless)?)?;
    let grid = core::scan_fidelity(n, v0, &nb, eta_axis, area_axis)?;
    let (i, j, best) = grid.max_cell();

    let mut w = create(&out)?;
    grid.write_csv(&mut w)?;
    w.flush()?;
    if let Some(path) = svg_path {
        let title = format!(
            "C^{n}-NOT, {} (v0 = {v0}): max F* = {best:.6}",
            nb.label()
        );
        std::fs::write(&path, svg::render_heatmap(&grid, &title))?;
    }
    if let Some(path) = gate_csv {
        let spec = core::ChainSpec::new(n, v0, grid.etas[i])?;
        let gate = core::simulate_gate(&spec, &nb, grid.area_scales[j])?;
        let mut w = create(&path)?;
        gate.write_csv(&mut w)?;
        w.flush()?;
    }
    println!(
        "max F* = {best:.6} at eta = {:.4}, area_scale = {:.4} ({} cells) -> {}",
        grid.etas[i],
        grid.area_scales[j],
        grid.values.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

#[derive(Args)]
struct OptimizeArgs {
    /// Number of control ions
    #[arg(long)]
    n: Option<usize>,
    /// Initial phonon number
    #[arg(long)]
    v0: Option<usize>,
    /// Seed catalog sequence
    #[arg(long)]
    seed_sequence: Option<String>,
    /// Seed phase file (units of pi)
    #[arg(long, value_name = "FILE")]
    phases: Option<PathBuf>,
    /// Window `eta_lo:eta_hi,area_lo:area_hi`; defaults to the seed's best
    /// 0.99-region
    #[arg(long)]
    window: Option<String>,
    /// Objective evaluation budget
    #[arg(long)]
    budget: Option<usize>,
    /// Output phase file for the optimized sequence
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_window(text: &str) -> CliResult<core::Window> {
    let (eta_part, area_part) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("window `{text}` must be e0:e1,a0:a1")))?;
    let pair = |part: &str| -> CliResult<(f64, f64)> {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| CliError::Usage(format!("window part `{part}` must be lo:hi")))?;
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad number `{lo}`"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad number `{hi}`"))?;
        Ok((lo, hi))
    };
    Ok(core::Window {
        eta: pair(eta_part)?,
        area: pair(area_part)?,
    })
}

fn run_optimize(args: &OptimizeArgs, cfg: &ConfigMap) -> CliResult<()> {
    let n = pick(&args.n, cfg, "n")?.unwrap_or(2);
    let v0 = required(pick(&args.v0, cfg, "v0")?, "v0")?;
    let seed_sequence = pick(&args.seed_sequence, cfg, "seed-sequence")?;
    let phases = pick(&args.phases, cfg, "phases")?;
    let window_text = pick(&args.window, cfg, "window")?;
    let budget = pick(&args.budget, cfg, "budget")?.unwrap_or(core::DEFAULT_OPTIMIZER_BUDGET);
    let out = required(pick(&args.out, cfg, "out")?, "out")?;

    let seed = load_sequence(&seed_sequence, &phases)?;
    let window = match window_text {
        Some(text) => parse_window(&text)?,
        None => {
            // The seed's own best 0.99-region on a coarse sweep; fall back to
            // a band just under the observed maximum if 0.99 is out of reach.
            let grid = core::scan_fidelity(
                n,
                v0,
                &seed,
                core::Axis::new(0.01, 0.5, 40)?,
                core::Axis::new(0.7, 1.3, 40)?,
            )?;
            let (_, _, max) = grid.max_cell();
            let mut region = core::best_region(&grid, 0.99);
            if region.is_empty() {
                region = core::best_region(&grid, max - 0.005);
            }
            let window = core::Window::from_region(&region).ok_or_else(|| {
                CliError::Numeric("no usable high-fidelity region for the seed".into())
            })?;
            println!(
                "auto window from {} region: eta {:.4}..{:.4}, area {:.4}..{:.4}",
                region.threshold, window.eta.0, window.eta.1, window.area.0, window.area.1
            );
            window
        }
    };
    let result = core::optimize_phases(n, v0, window, &seed, budget)?;
    write_phase_file(&out, &result.sequence)?;
    println!(
        "mean infidelity {:.6e} -> {:.6e} after {} evaluations -> {}",
        result.seed_objective,
        result.final_objective,
        result.evaluations,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// selectivity
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SelectivityArgs {
    /// Catalog sequence name
    #[arg(long)]
    sequence: Option<String>,
    /// Phase file (units of pi)
    #[arg(long, value_name = "FILE")]
    phases: Option<PathBuf>,
    /// Leak-fraction range, e.g. 0:1:200
    #[arg(long)]
    r: Option<String>,
    /// Area scale of the addressed ion
    #[arg(long)]
    area_scale: Option<f64>,
    /// Output CSV (leak_fraction,probability)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn run_selectivity(args: &SelectivityArgs, cfg: &ConfigMap) -> CliResult<()> {
    let sequence = pick(&args.sequence, cfg, "sequence")?;
    let phases = pick(&args.phases, cfg, "phases")?;
    let r_text = pick(&args.r, cfg, "r")?.unwrap_or_else(|| "0:1:201".into());
    let area_scale = pick(&args.area_scale, cfg, "area-scale")?.unwrap_or(1.0);
    let out = required(pick(&args.out, cfg, "out")?, "out")?;

    let seq = load_sequence(&sequence, &phases)?;
    let r = parse_range(&r_text, Unit::Dimensionless)?;
    let fractions = axis_of(r)?.values();
    let mut w = create(&out)?;
    writeln!(w, "leak_fraction,probability")?;
    for &f in &fractions {
        writeln!(
            w,
            "{f:.9e},{:.9e}",
            core::addressing_selectivity(&seq, f, area_scale)
        )?;
    }
    w.flush()?;
    println!(
        "selectivity of {} at area_scale {area_scale} over {} fractions -> {}",
        seq.label(),
        fractions.len(),
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> CliResult<()> {
    let cfg = load_config(&cli.config)?;
    setup_threads(cli.threads)?;
    match &cli.command {
        Command::Profile(args) => run_profile(args, &cfg),
        Command::Couplings(args) => run_couplings(args, &cfg),
        Command::Solve(args) => run_solve(args, &cfg),
        Command::VerifyCatalog(args) => run_verify(args, &cfg),
        Command::Scan(args) => run_scan(args, &cfg),
        Command::Optimize(args) => run_optimize(args, &cfg),
        Command::Selectivity(args) => run_selectivity(args, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
