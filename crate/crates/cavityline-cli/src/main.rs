//! Command-line front end for the cavityline model.
//!
//! Four subcommands: `dynamics` samples the atomic inversion over a time
//! window, `lineshape` sweeps its long-time average over detuning (one
//! curve, or a surface over the coherent mean photon number),
//! `discriminate` maps the even-minus-odd cat line-shape difference, and
//! `verify` runs the closed forms against the brute-force oracle.
//! Output is CSV with `#` provenance comments; identical flags produce
//! byte-identical files regardless of thread count.

use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use cavityline::csvfmt::CsvBuilder;
use cavityline::dynamics::{evolve, inversion, state_from_raw};
use cavityline::lineshape::{
    avg_inversion_excited, avg_inversion_ground, discrimination_map, odd_cat_alpha_floor, sweep,
};
use cavityline::verify::{run_verification, VerifyConfig};
use cavityline::{AtomInit, Error, FieldSpec, ModelParams, PhotonDistribution, TruncationPolicy};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "cavityline", version, about = "Exact cavity QED dynamics and line shapes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Atomic inversion W(t) for one field and atom preparation
    Dynamics(DynamicsArgs),
    /// Time-averaged inversion vs detuning: one curve, or a coherent surface
    Lineshape(LineshapeArgs),
    /// Even-cat minus odd-cat line-shape difference over an (alpha, delta) grid
    Discriminate(DiscriminateArgs),
    /// Check the closed forms against the brute-force oracle
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DynamicsArgs {
    /// Field preparation: fock:<n>, coherent:<re>[,<im>], cat:<re>[,<im>]:<phi>
    #[arg(long, default_value = "coherent:4")]
    field: FieldSpec,
    /// Atom preparation: excited or ground
    #[arg(long, default_value_t = AtomInit::Excited)]
    atom: AtomInit,
    /// Detuning (units of g)
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    delta: f64,
    /// AC Stark shift (units of g)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    chi: f64,
    /// Coupling g > 0
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// End of the time window [0, t-max]
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    /// Number of samples across the window
    #[arg(long, default_value_t = 5001)]
    t_samples: usize,
    /// Per-sector initial phases theta_n, comma separated (radians)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,
    /// Photon-tail truncation target
    #[arg(long, default_value = "1e-12")]
    trunc_tail: f64,
    /// Output path (stdout when omitted); written atomically
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LineshapeArgs {
    /// Field for a single curve; omit to sweep a coherent surface over nbar
    #[arg(long)]
    field: Option<FieldSpec>,
    /// Atom preparation: excited or ground
    #[arg(long, default_value_t = AtomInit::Excited)]
    atom: AtomInit,
    /// AC Stark shift (units of g)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    chi: f64,
    /// Coupling g > 0
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Detuning grid start:stop:count
    #[arg(long, default_value = "-20:20:801", allow_hyphen_values = true)]
    delta_range: RangeSpec,
    /// Mean photon number grid for the surface
    #[arg(long, default_value = "0:20:81", allow_hyphen_values = true)]
    nbar_range: RangeSpec,
    /// Photon-tail truncation target
    #[arg(long, default_value = "1e-12")]
    trunc_tail: f64,
    /// Output path (stdout when omitted); written atomically
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscriminateArgs {
    /// Atom preparation; omit to emit both excited and ground blocks
    #[arg(long)]
    atom: Option<AtomInit>,
    /// AC Stark shift (units of g)
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    chi: f64,
    /// Coupling g > 0
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Cat amplitude grid start:stop:count
    #[arg(long, default_value = "0.025:2:80", allow_hyphen_values = true)]
    alpha_range: RangeSpec,
    /// Detuning grid start:stop:count
    #[arg(long, default_value = "-20:20:801", allow_hyphen_values = true)]
    delta_range: RangeSpec,
    /// Photon-tail truncation target
    #[arg(long, default_value = "1e-12")]
    trunc_tail: f64,
    /// Output path (stdout when omitted); written atomically
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Override the default detuning grid {0, 1, 5}
    #[arg(long, allow_hyphen_values = true)]
    delta_range: Option<RangeSpec>,
    /// Override the default Stark grid {0, 0.25, 0.5} with one value
    #[arg(long, allow_negative_numbers = true)]
    chi: Option<f64>,
    /// Coupling g > 0
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Field to check (repeatable); default: fock:0, fock:3, coherent:2, cat:2:0, cat:2:pi
    #[arg(long)]
    field: Vec<FieldSpec>,
    /// End of the comparison time window
    #[arg(long, default_value_t = 50.0)]
    t_max: f64,
    /// Sample times per case
    #[arg(long, default_value_t = 200)]
    t_samples: usize,
    /// Photon-tail truncation target
    #[arg(long, default_value = "1e-12")]
    trunc_tail: f64,
    /// Skew the oracle's coupling by a relative amount, corrupting its
    /// Rabi frequencies while the closed forms stay honest (fault hook)
    #[arg(long, hide = true, default_value_t = 0.0, allow_negative_numbers = true)]
    inject_beta_skew: f64,
}

/// Inclusive `start:stop:count` grid axis.
#[derive(Debug, Clone)]
struct RangeSpec {
    start: f64,
    stop: f64,
    count: usize,
}

impl RangeSpec {
    /// Evenly spaced values. Endpoints are exact and a symmetric range
    /// is exactly antisymmetric (the midpoint of -a:a:odd is 0, not
    /// roundoff), which keeps chi = 0 line shapes exactly even.
    fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => {
                let den = (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        (self.start * ((n - 1 - i) as f64) + self.stop * (i as f64)) / den
                    })
                    .collect()
            }
        }
    }
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected start:stop:count, got {s:?}"));
        }
        let start: f64 =
            parts[0].parse().map_err(|_| format!("range start {:?} is not a number", parts[0]))?;
        let stop: f64 =
            parts[1].parse().map_err(|_| format!("range stop {:?} is not a number", parts[1]))?;
        let count: usize =
            parts[2].parse().map_err(|_| format!("range count {:?} is not an integer", parts[2]))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(format!("range endpoints must be finite, got {s:?}"));
        }
        if count >= 2 && stop <= start {
            return Err(format!("range needs stop > start when count >= 2, got {s:?}"));
        }
        Ok(Self { start, stop, count })
    }
}

impl fmt::Display for RangeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

enum CliError {
    /// Bad configuration: exit 2.
    Usage(String),
    /// A computation or write failed: exit 1.
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::StepFailure { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dynamics(a) => cmd_dynamics(a),
        Command::Lineshape(a) => cmd_lineshape(a),
        Command::Discriminate(a) => cmd_discriminate(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// CAVITYLINE_THREADS caps the rayon pool; unset means one thread per
/// core. Ordering of every output is index-driven, so the count never
/// changes the bytes.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("CAVITYLINE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring CAVITYLINE_THREADS={v:?} (want a positive integer)"),
        }
    }
}

fn cmd_dynamics(a: DynamicsArgs) -> Result<ExitCode, CliError> {
    let params = ModelParams::new(a.delta, a.chi, a.coupling)?;
    warn_validity(&params);
    if a.t_samples == 0 {
        return Err(CliError::Usage("--t-samples must be at least 1".into()));
    }
    if !a.t_max.is_finite() || a.t_max <= 0.0 {
        return Err(CliError::Usage(format!("--t-max must be positive and finite, got {}", a.t_max)));
    }
    if let Some(ph) = &a.phases {
        if ph.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Usage("--phases entries must be finite".into()));
        }
    }
    let trunc = TruncationPolicy { tail_eps: a.trunc_tail };
    let dist = a.field.distribution(trunc)?;
    note_ground_vacuum(a.atom, dist.prob(0));
    let state = state_from_raw(&dist, a.atom, a.phases.as_deref());
    let times = RangeSpec { start: 0.0, stop: a.t_max, count: a.t_samples }.values();
    let vals: Vec<f64> =
        times.par_iter().map(|&t| inversion(&evolve(&state, &params, t))).collect();

    let mut cmd = format!(
        "cavityline dynamics --field {} --atom {} --delta {} --chi {} --coupling {} \
         --t-max {} --t-samples {} --trunc-tail {}",
        a.field,
        a.atom,
        fmt_param(a.delta),
        fmt_param(a.chi),
        fmt_param(a.coupling),
        fmt_param(a.t_max),
        a.t_samples,
        fmt_param(a.trunc_tail),
    );
    if let Some(ph) = &a.phases {
        let list: Vec<String> = ph.iter().copied().map(fmt_param).collect();
        cmd.push_str(" --phases ");
        cmd.push_str(&list.join(","));
    }

    let mut b = CsvBuilder::new("atomic inversion vs time");
    b.comment("command", &cmd)
        .comment("field", a.field)
        .comment("atom_init", a.atom)
        .comment("delta", a.delta)
        .comment("chi", a.chi)
        .comment("coupling", a.coupling)
        .comment("trunc_tail", fmt_param(a.trunc_tail))
        .comment("n_terms", dist.len())
        .header(&["t", "inversion"]);
    for (&t, &w) in times.iter().zip(&vals) {
        b.row(&[t, w]);
    }
    emit(a.out.as_deref(), &b.finish())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_lineshape(a: LineshapeArgs) -> Result<ExitCode, CliError> {
    let params = ModelParams::new(0.0, a.chi, a.coupling)?;
    warn_validity(&params);
    let trunc = TruncationPolicy { tail_eps: a.trunc_tail };
    let deltas = a.delta_range.values();
    if deltas.is_empty() {
        return Err(CliError::Usage("--delta-range produced an empty grid".into()));
    }
    let text = match a.field {
        Some(field) => {
            let dist = field.distribution(trunc)?;
            note_ground_vacuum(a.atom, dist.prob(0));
            let ls = sweep(field, a.atom, a.chi, a.coupling, &deltas, trunc)?;
            let cmd = format!(
                "cavityline lineshape --field {} --atom {} --chi {} --coupling {} \
                 --delta-range {} --trunc-tail {}",
                field,
                a.atom,
                fmt_param(a.chi),
                fmt_param(a.coupling),
                a.delta_range,
                fmt_param(a.trunc_tail),
            );
            let mut b = CsvBuilder::new("time-averaged atomic inversion vs detuning");
            b.comment("command", &cmd)
                .comment("field", field)
                .comment("atom_init", ls.atom_init)
                .comment("chi", ls.chi)
                .comment("coupling", ls.coupling)
                .comment("trunc_tail", fmt_param(ls.tail_eps))
                .comment("n_terms", ls.n_terms)
                .header(&["delta", "value"]);
            for (&d, &v) in ls.deltas.iter().zip(&ls.values) {
                b.row(&[d, v]);
            }
            b.finish()
        }
        None => {
            let nbars = a.nbar_range.values();
            if nbars.is_empty() {
                return Err(CliError::Usage("--nbar-range produced an empty grid".into()));
            }
            if nbars[0] < 0.0 {
                return Err(CliError::Usage("mean photon number cannot be negative".into()));
            }
            if a.atom == AtomInit::Ground {
                eprintln!(
                    "note: ground-state values use raw photon weights P_(n+1); each \
                     coherent field's vacuum weight has no partner level, so totals \
                     are 1 - P_0, not 1"
                );
            }
            let rows: Vec<Vec<f64>> = nbars
                .par_iter()
                .map(|&nbar| {
                    let dist =
                        PhotonDistribution::coherent(Complex64::new(nbar.sqrt(), 0.0), trunc);
                    deltas
                        .iter()
                        .map(|&delta| match a.atom {
                            AtomInit::Excited => {
                                avg_inversion_excited(&dist, a.chi, a.coupling, delta)
                            }
                            AtomInit::Ground => {
                                avg_inversion_ground(&dist, a.chi, a.coupling, delta)
                            }
                        })
                        .collect()
                })
                .collect();
            let cmd = format!(
                "cavityline lineshape --atom {} --chi {} --coupling {} --delta-range {} \
                 --nbar-range {} --trunc-tail {}",
                a.atom,
                fmt_param(a.chi),
                fmt_param(a.coupling),
                a.delta_range,
                a.nbar_range,
                fmt_param(a.trunc_tail),
            );
            let mut b = CsvBuilder::new(
                "time-averaged atomic inversion vs detuning and coherent mean photon number",
            );
            b.comment("command", &cmd)
                .comment("field", "coherent, alpha = sqrt(nbar)")
                .comment("atom_init", a.atom)
                .comment("chi", a.chi)
                .comment("coupling", a.coupling)
                .comment("trunc_tail", fmt_param(a.trunc_tail))
                .header(&["nbar", "delta", "value"]);
            for (i, &nbar) in nbars.iter().enumerate() {
                for (j, &delta) in deltas.iter().enumerate() {
                    b.row(&[nbar, delta, rows[i][j]]);
                }
            }
            b.finish()
        }
    };
    emit(a.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_discriminate(a: DiscriminateArgs) -> Result<ExitCode, CliError> {
    let params = ModelParams::new(0.0, a.chi, a.coupling)?;
    warn_validity(&params);
    let trunc = TruncationPolicy { tail_eps: a.trunc_tail };
    let deltas = a.delta_range.values();
    if deltas.is_empty() {
        return Err(CliError::Usage("--delta-range produced an empty grid".into()));
    }
    let requested = a.alpha_range.values();
    if requested.is_empty() {
        return Err(CliError::Usage("--alpha-range produced an empty grid".into()));
    }
    // An alpha below the odd-cat normalization floor cannot produce a
    // difference row; report it and keep going with the rest.
    let mut alphas = Vec::with_capacity(requested.len());
    for &alpha in &requested {
        match PhotonDistribution::cat(Complex64::new(alpha, 0.0), std::f64::consts::PI, trunc) {
            Ok(_) => alphas.push(alpha),
            Err(e) => eprintln!("warning: alpha = {}: {e}; row skipped", fmt_param(alpha)),
        }
    }
    if alphas.is_empty() {
        return Err(CliError::Usage(
            "no alpha in --alpha-range clears the odd-cat normalization floor".into(),
        ));
    }
    let inits: Vec<AtomInit> = match a.atom {
        Some(init) => vec![init],
        None => vec![AtomInit::Excited, AtomInit::Ground],
    };

    let mut cmd = String::from("cavityline discriminate");
    if let Some(init) = a.atom {
        cmd.push_str(&format!(" --atom {init}"));
    }
    cmd.push_str(&format!(
        " --chi {} --coupling {} --alpha-range {} --delta-range {} --trunc-tail {}",
        fmt_param(a.chi),
        fmt_param(a.coupling),
        a.alpha_range,
        a.delta_range,
        fmt_param(a.trunc_tail),
    ));

    let mut b = CsvBuilder::new("even-cat minus odd-cat line shape difference");
    b.comment("command", &cmd)
        .comment("chi", a.chi)
        .comment("coupling", a.coupling)
        .comment("trunc_tail", fmt_param(a.trunc_tail))
        .comment("alpha_floor", fmt_param(odd_cat_alpha_floor()))
        .header(&["alpha", "delta", "diff"]);
    for &init in &inits {
        let maps: Vec<Result<_, Error>> = alphas
            .par_iter()
            .map(|&alpha| discrimination_map(&[alpha], init, a.chi, a.coupling, &deltas, trunc))
            .collect();
        b.comment("atom_init", init);
        for m in maps {
            let m = m?;
            for (j, &delta) in deltas.iter().enumerate() {
                b.row(&[m.alphas[0], delta, m.value(0, j)]);
            }
        }
    }
    emit(a.out.as_deref(), &b.finish())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode, CliError> {
    let mut cfg = VerifyConfig::default();
    if let Some(r) = &a.delta_range {
        cfg.deltas = r.values();
    }
    if let Some(chi) = a.chi {
        cfg.chis = vec![chi];
    }
    cfg.coupling = a.coupling;
    if !a.field.is_empty() {
        cfg.fields = a.field.clone();
    }
    cfg.t_max = a.t_max;
    cfg.t_samples = a.t_samples;
    cfg.trunc = TruncationPolicy { tail_eps: a.trunc_tail };
    cfg.oracle_coupling_skew = a.inject_beta_skew;
    if cfg.chis.iter().any(|c| c.abs() > 1.0) {
        eprintln!("warning: grid includes |chi| > 1, outside the Stark validity window; proceeding");
    }
    let report = run_verification(&cfg)?;
    print!("{}", report.render_text());
    Ok(if report.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// |chi| <= 1 (units of g) is the Stark term's stated validity window.
/// The propagators stay exact for the Hamiltonian outside it, so this
/// warns rather than refuses.
fn warn_validity(params: &ModelParams) {
    if !params.stark_within_validity() {
        eprintln!(
            "warning: chi = {} has |chi| > 1, outside the Stark validity window; proceeding",
            fmt_param(params.stark)
        );
    }
}

/// The ground-state ladder pairs |n+1> with the lowered atom; the
/// field's vacuum term has no partner, and the closed forms keep the raw
/// weights P_(n+1), so traces start at -(1 - P_0) rather than -1.
fn note_ground_vacuum(atom: AtomInit, p0: f64) {
    if atom == AtomInit::Ground && p0 > 0.0 {
        eprintln!(
            "note: ground-state values use raw photon weights P_(n+1); the vacuum weight \
             (P_0 = {p0:.3e} here) has no partner level, so totals are 1 - P_0, not 1"
        );
    }
}

/// Shortest round-trip rendering for provenance comments: plain decimal
/// in a readable band, exponent form outside it (1e-12, not a wall of
/// zeros).
fn fmt_param(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Write to stdout, or atomically to a path: temp file in the same
/// directory, then rename, so readers never see a half-written file.
fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Failure(format!("writing stdout: {e}"))),
        Some(path) => {
            let parent = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(|e| {
                CliError::Usage(format!("cannot create a temp file next to {}: {e}", path.display()))
            })?;
            tmp.write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            tmp.persist(path)
                .map_err(|e| CliError::Usage(format!("cannot finalize {}: {e}", path.display())))?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_lands_on_exact_endpoints_and_midpoint() {
        let r: RangeSpec = "-20:20:801".parse().unwrap();
        let v = r.values();
        assert_eq!(v.len(), 801);
        assert_eq!(v[0], -20.0);
        assert_eq!(v[800], 20.0);
        assert_eq!(v[400], 0.0);
        for (lo, hi) in v.iter().zip(v.iter().rev()) {
            assert_eq!(*lo, -*hi);
        }
    }

    #[test]
    fn range_parse_rejects_malformed_input() {
        assert!("1:2".parse::<RangeSpec>().is_err());
        assert!("a:2:3".parse::<RangeSpec>().is_err());
        assert!("2:1:5".parse::<RangeSpec>().is_err());
        assert!("0:1:x".parse::<RangeSpec>().is_err());
        assert!("nan:1:4".parse::<RangeSpec>().is_err());
    }

    #[test]
    fn range_degenerate_counts() {
        let empty: RangeSpec = "0:0:0".parse().unwrap();
        assert!(empty.values().is_empty());
        let single: RangeSpec = "3:3:1".parse().unwrap();
        assert_eq!(single.values(), vec![3.0]);
    }

    #[test]
    fn param_format_round_trips() {
        for x in [0.0, 1.0, -20.0, 0.025, 50.0, 1e-12, 3.5e8, -1.58e-5] {
            let s = fmt_param(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(s.len() < 24, "{s} should be compact");
        }
    }

    #[test]
    fn cli_definition_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
