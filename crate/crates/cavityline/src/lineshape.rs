//! Time-averaged inversion, spectral line shapes, and even/odd cat
//! discrimination.
//!
//! Averaging the sector closed forms over time kills every cos(beta_n t)
//! exactly, so the infinite-time average needs no integration:
//!
//! ```text
//! Wbar_e(Delta) =  sum_n P_n     [a_n / beta_n]^2
//! Wbar_b(Delta) = -sum_n P_{n+1} [a_n / beta_n]^2,   a_n = Delta + chi (2n+1)
//! ```
//!
//! Plotted against the detuning these are the steady line shapes; the
//! difference of the even-cat and odd-cat line shapes over an (alpha,
//! Delta) grid is the discrimination map.

use crate::csvfmt::CsvBuilder;
use crate::dynamics::{AtomInit, JointState};
use crate::error::Error;
use crate::field::{FieldSpec, PhotonDistribution, TruncationPolicy, CAT_NORM_FLOOR};
use crate::params::generalized_rabi;

/// Time-averaged inversion for an initially excited atom:
/// `sum_n P_n [a_n/beta_n]^2`, always in [0, 1].
pub fn avg_inversion_excited(dist: &PhotonDistribution, chi: f64, g: f64, delta: f64) -> f64 {
    debug_assert!(g > 0.0);
    dist.probs()
        .iter()
        .enumerate()
        .map(|(n, &p)| {
            let r = sector_ratio(delta, chi, g, n);
            p * r * r
        })
        .sum()
}

/// Time-averaged inversion for an atom starting in its ground state:
/// `-sum_n P_{n+1} [a_n/beta_n]^2`, always in [-1, 0]. As in the
/// time-domain closed form, the field's vacuum weight P_0 has no partner
/// in the ground ladder and drops out.
pub fn avg_inversion_ground(dist: &PhotonDistribution, chi: f64, g: f64, delta: f64) -> f64 {
    debug_assert!(g > 0.0);
    let mut acc = 0.0;
    for n in 0..dist.len().saturating_sub(1) {
        let r = sector_ratio(delta, chi, g, n);
        acc -= dist.prob(n + 1) * r * r;
    }
    acc
}

/// Time-averaged inversion of an arbitrary real-amplitude initial state:
///
/// ```text
/// Wbar = sum_n [a_n/beta_n]^2 (C_n^2 - D_n^2)
///      + sum_n 4 g sqrt(n+1) a_n / beta_n^2 * C_n D_n
/// ```
///
/// The cross term assumes the amplitudes are real; for complex input the
/// correct generalization is not established here, so such states are
/// rejected rather than silently mishandled.
pub fn avg_inversion_general(
    state0: &JointState,
    chi: f64,
    g: f64,
    delta: f64,
) -> Result<f64, Error> {
    debug_assert!(g > 0.0);
    for (n, (c, d)) in state0.sectors.iter().enumerate() {
        if c.im != 0.0 {
            return Err(Error::ComplexAmplitudes { sector: n, imag: c.im });
        }
        if d.im != 0.0 {
            return Err(Error::ComplexAmplitudes { sector: n, imag: d.im });
        }
    }
    let mut acc = 0.0;
    for (n, (c, d)) in state0.sectors.iter().enumerate() {
        let (c, d) = (c.re, d.re);
        let a = delta + chi * (2.0 * n as f64 + 1.0);
        let beta = generalized_rabi(delta, chi, g, n);
        let r = a / beta;
        acc += r * r * (c * c - d * d);
        acc += 4.0 * g * ((n + 1) as f64).sqrt() * a / (beta * beta) * c * d;
    }
    Ok(acc)
}

#[inline]
fn sector_ratio(delta: f64, chi: f64, g: f64, n: usize) -> f64 {
    let a = delta + chi * (2.0 * n as f64 + 1.0);
    a / generalized_rabi(delta, chi, g, n)
}

/// A line shape: the time-averaged inversion sampled over a detuning grid
/// for one field preparation and atom initialization.
#[derive(Debug, Clone)]
pub struct LineShape {
    pub deltas: Vec<f64>,
    pub values: Vec<f64>,
    pub atom_init: AtomInit,
    pub field: FieldSpec,
    pub chi: f64,
    pub coupling: f64,
    /// Truncation tail target the distribution was built with.
    pub tail_eps: f64,
    /// Number of photon-number terms actually summed.
    pub n_terms: usize,
}

impl LineShape {
    /// Render as CSV: `#` metadata comments, then `delta,value` rows.
    pub fn to_csv(&self) -> String {
        let mut b = CsvBuilder::new("time-averaged atomic inversion vs detuning");
        b.comment("field", self.field)
            .comment("atom_init", self.atom_init)
            .comment("chi", self.chi)
            .comment("coupling", self.coupling)
            .comment("trunc_tail", self.tail_eps)
            .comment("n_terms", self.n_terms)
            .header(&["delta", "value"]);
        for (&d, &v) in self.deltas.iter().zip(&self.values) {
            b.row(&[d, v]);
        }
        b.finish()
    }
}

/// Check that a sweep axis is nonempty, finite, and strictly increasing.
pub(crate) fn check_grid(name: &'static str, grid: &[f64]) -> Result<(), Error> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid { name, reason: "grid is empty".into() });
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid { name, reason: "grid contains non-finite values".into() });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidGrid { name, reason: "grid must be strictly increasing".into() });
    }
    Ok(())
}

/// Sweep the time-averaged inversion over a detuning grid.
pub fn sweep(
    field: FieldSpec,
    atom_init: AtomInit,
    chi: f64,
    g: f64,
    delta_grid: &[f64],
    trunc: TruncationPolicy,
) -> Result<LineShape, Error> {
    check_grid("delta", delta_grid)?;
    let dist = field.distribution(trunc)?;
    let values = delta_grid
        .iter()
        .map(|&delta| match atom_init {
            AtomInit::Excited => avg_inversion_excited(&dist, chi, g, delta),
            AtomInit::Ground => avg_inversion_ground(&dist, chi, g, delta),
        })
        .collect();
    Ok(LineShape {
        deltas: delta_grid.to_vec(),
        values,
        atom_init,
        field,
        chi,
        coupling: g,
        tail_eps: trunc.tail_eps,
        n_terms: dist.len(),
    })
}

/// Difference of even-cat and odd-cat line shapes over an (alpha, Delta)
/// grid, the quantity that discriminates the two parities.
#[derive(Debug, Clone)]
pub struct DiscriminationMap {
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Row-major: `diff[i * deltas.len() + j]` is the value at
    /// (alphas[i], deltas[j]).
    pub diff: Vec<f64>,
    pub atom_init: AtomInit,
    pub chi: f64,
    pub coupling: f64,
    pub tail_eps: f64,
    /// Smallest alpha whose odd cat clears the normalization floor;
    /// grid points below it cannot appear in the map.
    pub alpha_floor: f64,
}

impl DiscriminationMap {
    #[inline]
    pub fn value(&self, alpha_idx: usize, delta_idx: usize) -> f64 {
        self.diff[alpha_idx * self.deltas.len() + delta_idx]
    }

    /// max over the detuning axis of |diff|, one value per alpha.
    pub fn max_abs_per_alpha(&self) -> Vec<f64> {
        self.alphas
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let row = &self.diff[i * self.deltas.len()..(i + 1) * self.deltas.len()];
                row.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            })
            .collect()
    }

    /// Render as CSV: `#` metadata comments, then `alpha,delta,diff` rows.
    pub fn to_csv(&self) -> String {
        let mut b = CsvBuilder::new("even-cat minus odd-cat line shape difference");
        b.comment("atom_init", self.atom_init)
            .comment("chi", self.chi)
            .comment("coupling", self.coupling)
            .comment("trunc_tail", self.tail_eps)
            .comment("alpha_floor", self.alpha_floor)
            .header(&["alpha", "delta", "diff"]);
        for (i, &alpha) in self.alphas.iter().enumerate() {
            for (j, &delta) in self.deltas.iter().enumerate() {
                b.row(&[alpha, delta, self.value(i, j)]);
            }
        }
        b.finish()
    }
}

/// Smallest real alpha whose odd cat (phi = pi) has squared norm at the
/// rejection floor: `N^2 = 2(1 - e^{-2 alpha^2}) = CAT_NORM_FLOOR`.
pub fn odd_cat_alpha_floor() -> f64 {
    (-(-CAT_NORM_FLOOR / 2.0).ln_1p() / 2.0).sqrt()
}

/// Build the even-minus-odd discrimination map on an (alpha, Delta) grid.
///
/// Every alpha must produce valid even and odd cat distributions; an
/// alpha below [`odd_cat_alpha_floor`] surfaces as `DegenerateCat`.
/// Callers that want to skip such rows filter the grid first.
pub fn discrimination_map(
    alphas: &[f64],
    atom_init: AtomInit,
    chi: f64,
    g: f64,
    delta_grid: &[f64],
    trunc: TruncationPolicy,
) -> Result<DiscriminationMap, Error> {
    check_grid("alpha", alphas)?;
    check_grid("delta", delta_grid)?;
    let mut diff = Vec::with_capacity(alphas.len() * delta_grid.len());
    for &alpha in alphas {
        let a = num_complex::Complex64::new(alpha, 0.0);
        let even = PhotonDistribution::cat(a, 0.0, trunc)?;
        let odd = PhotonDistribution::cat(a, std::f64::consts::PI, trunc)?;
        for &delta in delta_grid {
            let (we, wo) = match atom_init {
                AtomInit::Excited => (
                    avg_inversion_excited(&even, chi, g, delta),
                    avg_inversion_excited(&odd, chi, g, delta),
                ),
                AtomInit::Ground => (
                    avg_inversion_ground(&even, chi, g, delta),
                    avg_inversion_ground(&odd, chi, g, delta),
                ),
            };
            diff.push(we - wo);
        }
    }
    Ok(DiscriminationMap {
        alphas: alphas.to_vec(),
        deltas: delta_grid.to_vec(),
        diff,
        atom_init,
        chi,
        coupling: g,
        tail_eps: trunc.tail_eps,
        alpha_floor: odd_cat_alpha_floor(),
    })
}
