//! Closed-form vs. brute-force equivalence runner.
//!
//! Walks a grid of detunings, Stark shifts, field preparations, and atom
//! initializations, propagating every case both through the sector closed
//! forms and through the oracle, and records the worst deviation per
//! check. A fault-injection knob skews the oracle's coupling so the
//! harness itself can be shown to catch a corrupted Rabi frequency.

use crate::dynamics::{evolve, inversion_excited, inversion_ground, state_from_raw, AtomInit};
use crate::error::Error;
use crate::field::{FieldSpec, TruncationPolicy};
use crate::lineshape::check_grid;
use crate::oracle::{build_hamiltonian, EigenPropagator};
use crate::params::ModelParams;

/// Grid and tolerances for one verification run.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub deltas: Vec<f64>,
    pub chis: Vec<f64>,
    pub coupling: f64,
    pub fields: Vec<FieldSpec>,
    pub t_max: f64,
    pub t_samples: usize,
    /// Tolerance for inversion and amplitude agreement.
    pub tolerance: f64,
    /// Sectors checked by the Rabi-gap comparison.
    pub rabi_n_max: usize,
    pub rabi_tolerance: f64,
    pub trunc: TruncationPolicy,
    /// Fault injection: the oracle Hamiltonian is built with coupling
    /// `g (1 + skew)`, corrupting its Rabi frequencies while the closed
    /// forms keep the honest value. Zero disables the fault.
    pub oracle_coupling_skew: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            deltas: vec![0.0, 1.0, 5.0],
            chis: vec![0.0, 0.25, 0.5],
            coupling: 1.0,
            fields: vec![
                FieldSpec::Fock { n0: 0 },
                FieldSpec::Fock { n0: 3 },
                FieldSpec::Coherent { alpha: num_complex::Complex64::new(2.0, 0.0) },
                FieldSpec::Cat { alpha: num_complex::Complex64::new(2.0, 0.0), phi: 0.0 },
                FieldSpec::Cat {
                    alpha: num_complex::Complex64::new(2.0, 0.0),
                    phi: std::f64::consts::PI,
                },
            ],
            t_max: 50.0,
            t_samples: 200,
            tolerance: 1e-8,
            rabi_n_max: 200,
            rabi_tolerance: 1e-10,
            trunc: TruncationPolicy::default(),
            oracle_coupling_skew: 0.0,
        }
    }
}

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: String, max_deviation: f64, tolerance: f64) -> Self {
        let pass = max_deviation.is_finite() && max_deviation <= tolerance;
        Self { name, max_deviation, tolerance, pass }
    }
}

/// All check results of a verification run.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per check: PASS/FAIL, name, worst deviation, tolerance.
    pub fn render_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{verdict}  {:width$}  max dev {:.3e}  tol {:.1e}\n",
                c.name, c.max_deviation, c.tolerance
            ));
        }
        let n_fail = self.checks.iter().filter(|c| !c.pass).count();
        if n_fail == 0 {
            out.push_str(&format!("all {} checks passed\n", self.checks.len()));
        } else {
            out.push_str(&format!("{n_fail} of {} checks FAILED\n", self.checks.len()));
        }
        out
    }
}

fn time_grid(t_max: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![t_max];
    }
    (0..samples).map(|i| t_max * i as f64 / (samples - 1) as f64).collect()
}

/// Run the equivalence grid and collect per-check worst deviations.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerifyReport, Error> {
    check_grid("delta", &cfg.deltas)?;
    check_grid("chi", &cfg.chis)?;
    if cfg.fields.is_empty() {
        return Err(Error::InvalidGrid { name: "fields", reason: "no field specs given".into() });
    }
    if cfg.t_samples == 0 {
        return Err(Error::InvalidGrid { name: "time", reason: "t_samples must be >= 1".into() });
    }
    if !cfg.t_max.is_finite() || cfg.t_max <= 0.0 {
        return Err(Error::InvalidGrid {
            name: "time",
            reason: "t_max must be positive and finite".into(),
        });
    }
    // surfaces InvalidCoupling for bad g
    ModelParams::new(0.0, 0.0, cfg.coupling)?;

    let times = time_grid(cfg.t_max, cfg.t_samples);
    let mut checks = Vec::new();

    // Rabi gaps: oracle sector blocks vs. the closed-form frequency
    let mut gap_dev = 0.0f64;
    for &delta in &cfg.deltas {
        for &chi in &cfg.chis {
            let honest = ModelParams::new(delta, chi, cfg.coupling)?;
            let skewed = oracle_params(&honest, cfg.oracle_coupling_skew)?;
            let h = build_hamiltonian(&skewed, cfg.rabi_n_max);
            for n in 0..=cfg.rabi_n_max {
                gap_dev = gap_dev.max((h.sector_gap(n) - honest.rabi_freq(n)).abs());
            }
        }
    }
    checks.push(CheckResult::new("rabi gaps".into(), gap_dev, cfg.rabi_tolerance));

    let mut norm_dev = 0.0f64;
    for &field in &cfg.fields {
        let dist = field.distribution(cfg.trunc)?;
        for atom in [AtomInit::Excited, AtomInit::Ground] {
            let state0 = state_from_raw(&dist, atom, None);
            let norm0 = state0.norm_sqr();
            let mut w_dev = 0.0f64;
            let mut amp_dev = 0.0f64;
            for &delta in &cfg.deltas {
                for &chi in &cfg.chis {
                    let honest = ModelParams::new(delta, chi, cfg.coupling)?;
                    let skewed = oracle_params(&honest, cfg.oracle_coupling_skew)?;
                    let eigen = if state0.is_empty() {
                        None
                    } else {
                        let h = build_hamiltonian(&skewed, state0.len() - 1);
                        Some(EigenPropagator::new(&h))
                    };
                    let psi0: Vec<num_complex::Complex64> =
                        state0.sectors.iter().flat_map(|&(c, d)| [c, d]).collect();
                    for &t in &times {
                        let w_closed = match atom {
                            AtomInit::Excited => inversion_excited(&dist, &honest, t),
                            AtomInit::Ground => inversion_ground(&dist, &honest, t),
                        };
                        let closed_state = evolve(&state0, &honest, t);
                        let (w_oracle, worst_amp, norm) = match &eigen {
                            Some(p) => {
                                let psi = p.propagate(&psi0, t);
                                let w: f64 = psi
                                    .chunks_exact(2)
                                    .map(|s| s[0].norm_sqr() - s[1].norm_sqr())
                                    .sum();
                                let amp = closed_state
                                    .sectors
                                    .iter()
                                    .zip(psi.chunks_exact(2))
                                    .map(|(a, b)| (a.0 - b[0]).norm().max((a.1 - b[1]).norm()))
                                    .fold(0.0f64, f64::max);
                                let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
                                (w, amp, norm)
                            }
                            None => (0.0, 0.0, norm0),
                        };
                        w_dev = w_dev.max((w_closed - w_oracle).abs());
                        amp_dev = amp_dev.max(worst_amp);
                        norm_dev = norm_dev.max((norm - norm0).abs());
                    }
                }
            }
            checks.push(CheckResult::new(
                format!("inversion {field} {atom}"),
                w_dev,
                cfg.tolerance,
            ));
            checks.push(CheckResult::new(
                format!("amplitudes {field} {atom}"),
                amp_dev,
                cfg.tolerance,
            ));
        }
    }
    checks.push(CheckResult::new("oracle norm conservation".into(), norm_dev, 1e-9));

    Ok(VerifyReport { checks })
}

fn oracle_params(honest: &ModelParams, skew: f64) -> Result<ModelParams, Error> {
    ModelParams::new(honest.detuning, honest.stark, honest.coupling * (1.0 + skew))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> VerifyConfig {
        VerifyConfig {
            deltas: vec![1.0],
            chis: vec![0.5],
            fields: vec![
                FieldSpec::Fock { n0: 0 },
                FieldSpec::Coherent { alpha: num_complex::Complex64::new(1.0, 0.0) },
            ],
            t_max: 10.0,
            t_samples: 20,
            rabi_n_max: 40,
            ..VerifyConfig::default()
        }
    }

    #[test]
    fn honest_run_passes() {
        let report = run_verification(&small_cfg()).unwrap();
        assert!(report.all_pass(), "{}", report.render_text());
        // rabi gaps + 2 per field-atom combo + norm conservation
        assert_eq!(report.checks.len(), 1 + 2 * 2 * 2 + 1);
    }

    #[test]
    fn corrupted_oracle_is_caught() {
        let cfg = VerifyConfig { oracle_coupling_skew: 1e-3, ..small_cfg() };
        let report = run_verification(&cfg).unwrap();
        assert!(!report.all_pass());
        // the corruption shows up in the gap check specifically
        assert!(!report.checks[0].pass);
    }

    #[test]
    fn empty_grids_are_rejected() {
        let cfg = VerifyConfig { deltas: vec![], ..VerifyConfig::default() };
        assert!(matches!(run_verification(&cfg), Err(Error::InvalidGrid { .. })));
        let cfg = VerifyConfig { fields: vec![], ..VerifyConfig::default() };
        assert!(matches!(run_verification(&cfg), Err(Error::InvalidGrid { .. })));
        let cfg = VerifyConfig { t_samples: 0, ..VerifyConfig::default() };
        assert!(matches!(run_verification(&cfg), Err(Error::InvalidGrid { .. })));
    }

    #[test]
    fn report_renders_one_line_per_check() {
        let report = run_verification(&small_cfg()).unwrap();
        let text = report.render_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), report.checks.len() + 1);
        assert!(lines.iter().take(report.checks.len()).all(|l| l.starts_with("PASS")));
        assert!(lines.last().unwrap().contains("all"));
    }
}
