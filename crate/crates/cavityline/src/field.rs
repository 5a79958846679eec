//! Photon-number statistics of the cavity field.
//!
//! Supported preparations: Fock states, coherent states, and coherent
//! superpositions of |alpha> and |-alpha> with relative phase phi (the
//! even cat at phi = 0, the odd cat at phi = pi). Only the number
//! distribution P_n matters downstream, so that is all this module
//! stores. Infinite sums are truncated with an explicit analytic tail
//! bound rather than a fixed cutoff.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;

/// Cat states with squared norm below this floor are rejected: their
/// distribution is pure cancellation noise in `e^{-2|alpha|^2} cos(phi)`.
pub const CAT_NORM_FLOOR: f64 = 1e-9;

/// Controls where photon-number sums are cut off.
///
/// The cutoff starts at `max(32, ceil(nbar + 12 sqrt(nbar + 1)))` and is
/// extended until a geometric bound on the dropped mass falls at or below
/// `tail_eps`. Twelve standard deviations past the mean costs little and
/// makes the extension loop almost always a no-op.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Accepted upper bound on the probability mass beyond the cutoff.
    pub tail_eps: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { tail_eps: 1e-12 }
    }
}

impl TruncationPolicy {
    fn initial_cutoff(nbar: f64) -> usize {
        let guess = (nbar + 12.0 * (nbar + 1.0).sqrt()).ceil();
        (guess as usize).max(32)
    }
}

/// A truncated photon-number distribution P_0 .. P_{N}.
///
/// `probs` sums to 1 minus the (bounded) truncated tail; no renormalization
/// is applied after truncation, so `tail_bound` is an honest certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    probs: Vec<f64>,
    tail_bound: f64,
    mean: f64,
}

impl PhotonDistribution {
    /// Fock state |n0>: all probability on a single occupation number.
    pub fn fock(n0: usize) -> Self {
        let mut probs = vec![0.0; n0 + 1];
        probs[n0] = 1.0;
        Self { probs, tail_bound: 0.0, mean: n0 as f64 }
    }

    /// The vacuum, a Fock state with zero photons.
    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// Coherent state |alpha>: Poissonian with mean `|alpha|^2`.
    ///
    /// Only the modulus of `alpha` enters the number distribution.
    pub fn coherent(alpha: Complex64, trunc: TruncationPolicy) -> Self {
        let nbar = alpha.norm_sqr();
        let (probs, tail_bound) = poisson_weights(nbar, trunc.tail_eps);
        Self { probs, tail_bound, mean: nbar }
    }

    /// Superposition (|alpha> + e^{i phi} |-alpha>)/N:
    ///
    /// ```text
    /// P_n = (2/N^2) e^{-|alpha|^2} |alpha|^{2n}/n! [1 + (-1)^n cos(phi)]
    /// N^2 = 2 [1 + e^{-2|alpha|^2} cos(phi)]
    /// ```
    ///
    /// phi = 0 kills every odd term exactly, phi = pi every even term;
    /// the parity factor is applied as written so those zeros are bitwise
    /// zeros. Rejects combinations whose `N^2` falls below
    /// [`CAT_NORM_FLOOR`] (the near-degenerate odd cat at small alpha).
    pub fn cat(alpha: Complex64, phi: f64, trunc: TruncationPolicy) -> Result<Self, Error> {
        let nbar = alpha.norm_sqr();
        let n2 = cat_norm_sqr(nbar, phi);
        if n2 < CAT_NORM_FLOOR {
            return Err(Error::DegenerateCat { norm_sqr: n2, floor: CAT_NORM_FLOOR });
        }
        let cos_phi = phi.cos();
        // A dropped Poisson tail of mass m contributes at most 2m/(N^2/2)
        // to the cat tail, so aim the Poisson bound accordingly.
        let pois_eps = trunc.tail_eps * n2 / 4.0;
        let (pois, pois_bound) = poisson_weights(nbar, pois_eps);
        let scale = 2.0 / n2;
        let probs = pois
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
                scale * p * (1.0 + parity * cos_phi)
            })
            .collect();
        let mean = if nbar == 0.0 {
            0.0
        } else {
            // <n> = nbar (1 - E cos phi)/(1 + E cos phi), E = e^{-2 nbar}
            let e = (-2.0 * nbar).exp();
            nbar * (1.0 - e * cos_phi) / (1.0 + e * cos_phi)
        };
        Ok(Self { probs, tail_bound: scale * 2.0 * pois_bound, mean })
    }

    /// Number of retained occupation numbers (the cutoff plus one).
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// P_n, with zero beyond the cutoff.
    #[inline]
    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    /// The retained probabilities as a slice.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Certified upper bound on the probability mass beyond the cutoff.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Exact mean occupation of the untruncated distribution.
    pub fn mean_occupation(&self) -> f64 {
        self.mean
    }

    /// Sum of the retained probabilities.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Poisson weights with mean `nbar` up to a cutoff certified to leave at
/// most `tail_eps` of mass behind. Returns (weights, tail bound).
fn poisson_weights(nbar: f64, tail_eps: f64) -> (Vec<f64>, f64) {
    debug_assert!(nbar >= 0.0 && nbar.is_finite());
    if nbar == 0.0 {
        return (vec![1.0], 0.0);
    }
    let cutoff = TruncationPolicy::initial_cutoff(nbar);
    let mut probs = Vec::with_capacity(cutoff + 1);
    probs.push((-nbar).exp());
    while probs.len() <= cutoff {
        let n = probs.len() as f64;
        let last = *probs.last().unwrap();
        probs.push(last * nbar / n);
    }
    loop {
        // First dropped term p_m with m = probs.len(); terms beyond decay
        // at least geometrically with ratio nbar/(m+1) < 1, so
        //   tail <= p_m / (1 - nbar/(m+1)).
        let m = probs.len() as f64;
        let p_m = *probs.last().unwrap() * nbar / m;
        let ratio = nbar / (m + 1.0);
        debug_assert!(ratio < 1.0);
        let bound = p_m / (1.0 - ratio);
        if bound <= tail_eps {
            return (probs, bound);
        }
        probs.push(p_m);
    }
}

fn cat_norm_sqr(nbar: f64, phi: f64) -> f64 {
    let n2 = 2.0 * (1.0 + (-2.0 * nbar).exp() * phi.cos());
    n2.max(0.0)
}

/// Norm N of the unnormalized superposition |alpha> + e^{i phi} |-alpha>,
/// `N = sqrt(2 [1 + e^{-2|alpha|^2} cos(phi)])`.
///
/// Returns the value even when it is tiny; constructors enforce the floor.
pub fn cat_norm(alpha: Complex64, phi: f64) -> f64 {
    cat_norm_sqr(alpha.norm_sqr(), phi).sqrt()
}

/// Field preparation, parseable from a config string.
///
/// Accepted forms: `fock:<n>`, `coherent:<re>[,<im>]`,
/// `cat:<re>[,<im>]:<phi>` where `<phi>` is a number or the word `pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Fock { n0: usize },
    Coherent { alpha: Complex64 },
    Cat { alpha: Complex64, phi: f64 },
}

impl FieldSpec {
    /// Build the photon-number distribution for this preparation.
    pub fn distribution(&self, trunc: TruncationPolicy) -> Result<PhotonDistribution, Error> {
        match *self {
            FieldSpec::Fock { n0 } => Ok(PhotonDistribution::fock(n0)),
            FieldSpec::Coherent { alpha } => Ok(PhotonDistribution::coherent(alpha, trunc)),
            FieldSpec::Cat { alpha, phi } => PhotonDistribution::cat(alpha, phi, trunc),
        }
    }
}

fn parse_complex(s: &str, input: &str) -> Result<Complex64, Error> {
    let bad = |reason: &str| Error::BadFieldSpec {
        input: input.to_owned(),
        reason: reason.to_owned(),
    };
    let mut it = s.splitn(2, ',');
    let re_str = it.next().unwrap_or("");
    let re: f64 = re_str
        .trim()
        .parse()
        .map_err(|_| bad("amplitude real part is not a number"))?;
    let im: f64 = match it.next() {
        Some(im_str) => im_str
            .trim()
            .parse()
            .map_err(|_| bad("amplitude imaginary part is not a number"))?,
        None => 0.0,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad("amplitude must be finite"));
    }
    Ok(Complex64::new(re, im))
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = |reason: &str| Error::BadFieldSpec {
            input: s.to_owned(),
            reason: reason.to_owned(),
        };
        let mut parts = s.trim().split(':');
        let kind = parts.next().unwrap_or("");
        match kind {
            "fock" => {
                let n_str = parts.next().ok_or_else(|| bad("expected fock:<n>"))?;
                if parts.next().is_some() {
                    return Err(bad("expected fock:<n>"));
                }
                let n0 = n_str
                    .trim()
                    .parse()
                    .map_err(|_| bad("occupation number is not a nonnegative integer"))?;
                Ok(FieldSpec::Fock { n0 })
            }
            "coherent" => {
                let a_str = parts.next().ok_or_else(|| bad("expected coherent:<re>[,<im>]"))?;
                if parts.next().is_some() {
                    return Err(bad("expected coherent:<re>[,<im>]"));
                }
                Ok(FieldSpec::Coherent { alpha: parse_complex(a_str, s)? })
            }
            "cat" => {
                let a_str = parts.next().ok_or_else(|| bad("expected cat:<re>[,<im>]:<phi>"))?;
                let phi_str = parts.next().ok_or_else(|| bad("expected cat:<re>[,<im>]:<phi>"))?;
                if parts.next().is_some() {
                    return Err(bad("expected cat:<re>[,<im>]:<phi>"));
                }
                let alpha = parse_complex(a_str, s)?;
                let phi_str = phi_str.trim();
                let phi = match phi_str {
                    "pi" => std::f64::consts::PI,
                    "-pi" => -std::f64::consts::PI,
                    _ => phi_str
                        .parse()
                        .map_err(|_| bad("phase must be a number or `pi`"))?,
                };
                if !phi.is_finite() {
                    return Err(bad("phase must be finite"));
                }
                Ok(FieldSpec::Cat { alpha, phi })
            }
            _ => Err(bad("unknown field kind; expected fock:, coherent:, or cat:")),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn amp(f: &mut fmt::Formatter<'_>, alpha: Complex64) -> fmt::Result {
            if alpha.im == 0.0 {
                write!(f, "{}", alpha.re)
            } else {
                write!(f, "{},{}", alpha.re, alpha.im)
            }
        }
        match *self {
            FieldSpec::Fock { n0 } => write!(f, "fock:{n0}"),
            FieldSpec::Coherent { alpha } => {
                write!(f, "coherent:")?;
                amp(f, alpha)
            }
            FieldSpec::Cat { alpha, phi } => {
                write!(f, "cat:")?;
                amp(f, alpha)?;
                if phi == std::f64::consts::PI {
                    write!(f, ":pi")
                } else {
                    write!(f, ":{phi}")
                }
            }
        }
    }
}
