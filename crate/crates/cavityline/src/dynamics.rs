//! Exact time evolution, sector by sector, and the atomic inversion W(t).
//!
//! The joint state is a list of amplitude pairs (C_n, D_n) over the
//! excitation sectors {|n, e>, |n+1, g>}. Each pair evolves under a 2x2
//! unitary with an overall phase e^{i chi t / 2} coming from the trace of
//! the sector Hamiltonian; populations never mix across sectors.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::field::PhotonDistribution;
use crate::params::ModelParams;

/// Which bare atomic state the atom starts in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomInit {
    Excited,
    Ground,
}

impl FromStr for AtomInit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "excited" | "e" => Ok(AtomInit::Excited),
            "ground" | "g" => Ok(AtomInit::Ground),
            other => Err(format!("unknown atom state {other:?}; expected excited or ground")),
        }
    }
}

impl fmt::Display for AtomInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomInit::Excited => f.write_str("excited"),
            AtomInit::Ground => f.write_str("ground"),
        }
    }
}

/// The 2x2 evolution block of one excitation sector at a fixed time.
///
/// The full block is `global_phase * [[m11, m12], [m12, conj(m11)]]`; the
/// bracket is special-unitary, so `|m11|^2 + |m12|^2 = 1`.
#[derive(Debug, Clone, Copy)]
pub struct SectorPropagator {
    pub n: usize,
    /// Generalized Rabi frequency of the sector.
    pub beta: f64,
    pub m11: Complex64,
    pub m12: Complex64,
    /// The unit-modulus factor e^{i chi t / 2} shared by both components.
    pub global_phase: Complex64,
}

impl SectorPropagator {
    /// Apply the sector unitary to an amplitude pair (C_n, D_n).
    #[inline]
    pub fn apply(&self, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
        let c1 = self.m11 * c + self.m12 * d;
        let d1 = self.m12 * c + self.m11.conj() * d;
        (self.global_phase * c1, self.global_phase * d1)
    }
}

/// Evolution block of sector `n` for duration `t`:
///
/// ```text
/// m11 = cos(beta t/2) - i [delta + chi (2n+1)]/beta sin(beta t/2)
/// m12 = -i [2 g sqrt(n+1)]/beta sin(beta t/2)
/// ```
///
/// with the overall phase e^{i chi t / 2}.
pub fn sector_propagator(params: &ModelParams, n: usize, t: f64) -> SectorPropagator {
    let beta = params.rabi_freq(n);
    let a = params.sector_detuning(n);
    let (sin, cos) = (0.5 * beta * t).sin_cos();
    let m11 = Complex64::new(cos, -a / beta * sin);
    let m12 = Complex64::new(0.0, -2.0 * params.coupling * ((n + 1) as f64).sqrt() / beta * sin);
    let half_chi_t = 0.5 * params.stark * t;
    let global_phase = Complex64::new(half_chi_t.cos(), half_chi_t.sin());
    SectorPropagator { n, beta, m11, m12, global_phase }
}

/// Joint atom-field state as sector amplitude pairs (C_n, D_n).
///
/// C_n multiplies |n, e> and D_n multiplies |n+1, g>. The stationary
/// component |0, g> sits outside every excitation sector and is not part
/// of this ansatz; ground-atom preparations therefore drop the field's
/// vacuum weight P_0 (raw) or condition it away (renormalized).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub sectors: Vec<(Complex64, Complex64)>,
}

impl JointState {
    pub fn new(sectors: Vec<(Complex64, Complex64)>) -> Self {
        Self { sectors }
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    /// Total probability carried by the represented sectors.
    pub fn norm_sqr(&self) -> f64 {
        self.sectors.iter().map(|(c, d)| c.norm_sqr() + d.norm_sqr()).sum()
    }
}

fn phase_factor(phases: Option<&[f64]>, n: usize) -> Complex64 {
    match phases.and_then(|p| p.get(n)) {
        Some(&theta) => Complex64::new(theta.cos(), theta.sin()),
        None => Complex64::new(1.0, 0.0),
    }
}

/// Joint state of a field distribution with the atom in a bare state,
/// normalized to unit norm.
///
/// Excited: C_n = sqrt(P_n) e^{i theta_n}. Ground: D_n = sqrt(P_{n+1})
/// e^{i theta_n}; the vacuum component of the field cannot enter the
/// {|n+1, g>} ladder, so the remaining weight 1 - P_0 is scaled back up
/// to 1 (a physical preparation conditions on the field actually being
/// there). See [`state_from_raw`] for the unnormalized bookkeeping that
/// matches the ground-state inversion closed form.
pub fn state_from(
    dist: &PhotonDistribution,
    atom: AtomInit,
    phases: Option<&[f64]>,
) -> JointState {
    let mut state = state_from_raw(dist, atom, phases);
    let w = state.norm_sqr();
    if w > 0.0 && w != 1.0 {
        let s = 1.0 / w.sqrt();
        for (c, d) in &mut state.sectors {
            *c *= s;
            *d *= s;
        }
    }
    state
}

/// Like [`state_from`] but without renormalization: the ground-state
/// ladder keeps raw weights P_{n+1} and total 1 - P_0. This is exactly
/// the weighting under which [`inversion_ground`] equals
/// `inversion(evolve(...))`.
pub fn state_from_raw(
    dist: &PhotonDistribution,
    atom: AtomInit,
    phases: Option<&[f64]>,
) -> JointState {
    let sectors = match atom {
        AtomInit::Excited => (0..dist.len())
            .map(|n| {
                let c = dist.prob(n).sqrt() * phase_factor(phases, n);
                (c, Complex64::new(0.0, 0.0))
            })
            .collect(),
        AtomInit::Ground => (0..dist.len().saturating_sub(1))
            .map(|n| {
                let d = dist.prob(n + 1).sqrt() * phase_factor(phases, n);
                (Complex64::new(0.0, 0.0), d)
            })
            .collect(),
    };
    JointState { sectors }
}

/// Evolve a joint state for duration `t`. Norm is preserved to roundoff.
pub fn evolve(initial: &JointState, params: &ModelParams, t: f64) -> JointState {
    let sectors = initial
        .sectors
        .iter()
        .enumerate()
        .map(|(n, &(c, d))| sector_propagator(params, n, t).apply(c, d))
        .collect();
    JointState { sectors }
}

/// Atomic inversion <sigma_z> = sum |C_n|^2 - |D_n|^2.
pub fn inversion(state: &JointState) -> f64 {
    state.sectors.iter().map(|(c, d)| c.norm_sqr() - d.norm_sqr()).sum()
}

/// Closed-form inversion for an atom prepared excited in a field with
/// number distribution P_n:
///
/// ```text
/// W(t) = sum_n P_n/beta_n^2 { a_n^2 + 4 g^2 (n+1) cos(beta_n t) },
/// a_n = delta + chi (2n+1)
/// ```
pub fn inversion_excited(dist: &PhotonDistribution, params: &ModelParams, t: f64) -> f64 {
    let g2 = params.coupling * params.coupling;
    dist.probs()
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let a = params.sector_detuning(n);
            let beta = params.rabi_freq(n);
            let osc = 4.0 * g2 * (n as f64 + 1.0) * (beta * t).cos();
            p / (beta * beta) * (a * a + osc)
        })
        .sum()
}

/// Closed-form inversion for an atom prepared in its ground state; sector
/// n starts as |n+1, g> with raw weight P_{n+1} (the vacuum term P_0 has
/// no partner in this ladder and drops out):
///
/// ```text
/// W(t) = -sum_n P_{n+1}/beta_n^2 { a_n^2 + 4 g^2 (n+1) cos(beta_n t) }
/// ```
///
/// At t = 0 this sums to -(1 - P_0), not -1; see [`state_from`] for the
/// renormalized preparation.
pub fn inversion_ground(dist: &PhotonDistribution, params: &ModelParams, t: f64) -> f64 {
    let g2 = params.coupling * params.coupling;
    let mut acc = 0.0;
    for n in 0..dist.len().saturating_sub(1) {
        let p = dist.prob(n + 1);
        let a = params.sector_detuning(n);
        let beta = params.rabi_freq(n);
        let osc = 4.0 * g2 * (n as f64 + 1.0) * (beta * t).cos();
        acc -= p / (beta * beta) * (a * a + osc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::TruncationPolicy;
    use num_complex::Complex64;

    const TR: TruncationPolicy = TruncationPolicy { tail_eps: 1e-12 };

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn params(delta: f64, chi: f64, g: f64) -> ModelParams {
        ModelParams::new(delta, chi, g).unwrap()
    }

    #[test]
    fn propagator_is_identity_at_t_zero() {
        let u = sector_propagator(&params(1.3, 0.4, 0.8), 5, 0.0);
        assert_eq!(u.m11, c(1.0));
        assert_eq!(u.m12, c(0.0));
        assert_eq!(u.global_phase, c(1.0));
    }

    #[test]
    fn propagator_unitarity() {
        for &(d, chi, g, n, t) in
            &[(0.0, 0.0, 1.0, 0, 1.0), (1.0, 0.5, 1.0, 3, 7.7), (-2.0, 0.9, 0.3, 11, 100.0)]
        {
            let u = sector_propagator(&params(d, chi, g), n, t);
            let s = u.m11.norm_sqr() + u.m12.norm_sqr();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn resonant_equal_split_at_quarter_rabi_period() {
        // beta_0 = 2, so the resonant vacuum sector reaches a 50/50
        // split at t = pi/4 (a quarter of the 2 pi / beta cycle).
        let p = params(0.0, 0.0, 1.0);
        let u = sector_propagator(&p, 0, std::f64::consts::FRAC_PI_4);
        assert!((u.m11.norm_sqr() - 0.5).abs() < 1e-15);

        let state = JointState::new(vec![(c(1.0), c(0.0))]);
        let out = evolve(&state, &p, std::f64::consts::FRAC_PI_4);
        assert!((out.sectors[0].0.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((out.sectors[0].1.norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn propagator_off_diagonal_vanishes_at_full_cycle() {
        let p = params(0.7, 0.2, 1.1);
        for n in [0, 4] {
            let u = sector_propagator(&p, n, 2.0 * std::f64::consts::PI / p.rabi_freq(n));
            assert!(u.m12.norm() < 1e-12);
            assert!((u.m11.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_preserves_norm() {
        let p = params(1.0, 0.5, 1.0);
        let dist = PhotonDistribution::coherent(c(2.0), TR);
        let state = state_from(&dist, AtomInit::Excited, None);
        let out = evolve(&state, &p, 33.3);
        assert!((out.norm_sqr() - state.norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn inversion_sign_conventions() {
        let up = JointState::new(vec![(c(1.0), c(0.0))]);
        assert_eq!(inversion(&up), 1.0);
        let down = JointState::new(vec![(c(0.0), c(1.0))]);
        assert_eq!(inversion(&down), -1.0);
        let even = JointState::new(vec![(c(0.5f64.sqrt()), c(0.5f64.sqrt()))]);
        assert!(inversion(&even).abs() < 1e-15);
    }

    #[test]
    fn vacuum_excited_is_bare_rabi_cosine() {
        let p = params(0.0, 0.0, 1.0);
        let d = PhotonDistribution::vacuum();
        for &t in &[0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2, 12.0] {
            assert!((inversion_excited(&d, &p, t) - (2.0 * t).cos()).abs() < 1e-12);
        }
        // W(pi/2) = cos(pi) = -1: full transfer to |1, g>
        assert!((inversion_excited(&d, &p, std::f64::consts::FRAC_PI_2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_photon_ground_mirrors_vacuum_excited() {
        let p = params(0.0, 0.0, 1.0);
        let d = PhotonDistribution::fock(1);
        for &t in &[0.0, 0.4, 2.0, 9.0] {
            assert!((inversion_ground(&d, &p, t) + (2.0 * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_inversion_at_t_zero_telescopes() {
        let p = params(0.3, 0.2, 1.0);
        let d = PhotonDistribution::coherent(c(1.5), TR);
        let w0 = inversion_ground(&d, &p, 0.0);
        assert!((w0 + (1.0 - d.prob(0))).abs() < 1e-10);
    }

    #[test]
    fn state_from_weights() {
        let d = PhotonDistribution::fock(3);
        let exc = state_from(&d, AtomInit::Excited, None);
        assert_eq!(exc.len(), 4);
        assert_eq!(exc.sectors[3].0, c(1.0));
        assert!((exc.norm_sqr() - 1.0).abs() < 1e-15);

        // |3> + ground atom sits in sector n = 2 (the |3, g> component)
        let gnd = state_from(&d, AtomInit::Ground, None);
        assert_eq!(gnd.len(), 3);
        assert_eq!(gnd.sectors[2].1, c(1.0));

        // ground + coherent field: raw weight is 1 - P_0, renormalized to 1
        let dc = PhotonDistribution::coherent(c(1.0), TR);
        let raw = state_from_raw(&dc, AtomInit::Ground, None);
        assert!((raw.norm_sqr() - (1.0 - dc.prob(0))).abs() < 1e-12);
        let norm = state_from(&dc, AtomInit::Ground, None);
        assert!((norm.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_from_applies_phases() {
        let d = PhotonDistribution::fock(0);
        let theta = 0.77;
        let s = state_from(&d, AtomInit::Excited, Some(&[theta]));
        assert!((s.sectors[0].0 - Complex64::new(theta.cos(), theta.sin())).norm() < 1e-15);
    }

    #[test]
    fn ground_state_of_vacuum_field_has_no_sectors() {
        let d = PhotonDistribution::vacuum();
        let s = state_from(&d, AtomInit::Ground, None);
        assert!(s.is_empty());
        assert_eq!(inversion(&s), 0.0);
    }
}
