//! Model constants and the generalized Rabi frequency.
//!
//! The bare atomic and cavity frequencies never appear on their own; the
//! rotating frame leaves only the detuning `delta`, the dispersive shift
//! per photon `chi`, and the dipole coupling `g`.

use crate::error::Error;

/// Constants of the atom-cavity model in angular-frequency units.
///
/// Times throughout the crate are in units of `1/g` once `g = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Atom-field detuning.
    pub detuning: f64,
    /// Dispersive (AC Stark) shift per photon.
    pub stark: f64,
    /// Dipole coupling constant; strictly positive.
    pub coupling: f64,
}

impl ModelParams {
    /// Validated constructor. The coupling must be a positive finite
    /// number; detuning and Stark shift must be finite.
    pub fn new(detuning: f64, stark: f64, coupling: f64) -> Result<Self, Error> {
        if !coupling.is_finite() || coupling <= 0.0 {
            return Err(Error::InvalidCoupling(coupling));
        }
        if !detuning.is_finite() {
            return Err(Error::NonFiniteParam { name: "detuning", value: detuning });
        }
        if !stark.is_finite() {
            return Err(Error::NonFiniteParam { name: "stark", value: stark });
        }
        Ok(Self { detuning, stark, coupling })
    }

    /// Effective detuning seen by sector `n`: `delta + chi (2n+1)`.
    #[inline]
    pub fn sector_detuning(&self, n: usize) -> f64 {
        self.detuning + self.stark * (2.0 * n as f64 + 1.0)
    }

    /// Generalized Rabi frequency of sector `n`,
    /// `beta_n = sqrt([delta + chi (2n+1)]^2 + 4 g^2 (n+1))`.
    ///
    /// Strictly positive for every sector because the coupling term
    /// `4 g^2 (n+1)` never vanishes.
    #[inline]
    pub fn rabi_freq(&self, n: usize) -> f64 {
        generalized_rabi(self.detuning, self.stark, self.coupling, n)
    }

    /// The dispersive treatment of the far-off-resonant levels behind the
    /// Stark term holds for `|chi| <= 1` (in units of `g = 1`). Outside
    /// that range results are still computed but should be flagged.
    #[inline]
    pub fn stark_within_validity(&self) -> bool {
        self.stark.abs() <= 1.0
    }
}

/// `beta_n` as a free function, for callers that sweep one of the
/// constants without building a [`ModelParams`] per point.
#[inline]
pub fn generalized_rabi(delta: f64, chi: f64, g: f64, n: usize) -> f64 {
    debug_assert!(g > 0.0);
    let a = delta + chi * (2.0 * n as f64 + 1.0);
    let np1 = n as f64 + 1.0;
    (a * a + 4.0 * g * g * np1).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonant_vacuum_rabi_is_twice_coupling() {
        let p = ModelParams::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.rabi_freq(0), 2.0);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen independently computed digits
    fn rabi_freq_matches_hand_value() {
        // sqrt(2.5^2 + 8) = sqrt(14.25)
        let p = ModelParams::new(1.0, 0.5, 1.0).unwrap();
        assert!((p.rabi_freq(1) - 3.7749172176353748).abs() < 1e-15);
    }

    #[test]
    fn sector_resonance_cancels_bracket() {
        // delta = -chi (2n+1) leaves beta_n = 2 g sqrt(n+1)
        let n = 7;
        let chi = 0.3;
        let g = 1.7;
        let p = ModelParams::new(-chi * (2.0 * n as f64 + 1.0), chi, g).unwrap();
        let expect = 2.0 * g * ((n + 1) as f64).sqrt();
        assert!((p.rabi_freq(n as usize) - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn constructor_rejects_bad_inputs() {
        assert!(ModelParams::new(0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, -1.0).is_err());
        assert!(ModelParams::new(0.0, 0.0, f64::NAN).is_err());
        assert!(ModelParams::new(f64::INFINITY, 0.0, 1.0).is_err());
        assert!(ModelParams::new(0.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn validity_flag_trips_above_unit_stark() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).unwrap().stark_within_validity());
        assert!(!ModelParams::new(0.0, 1.5, 1.0).unwrap().stark_within_validity());
        assert!(ModelParams::new(0.0, -0.5, 1.0).unwrap().stark_within_validity());
    }
}
