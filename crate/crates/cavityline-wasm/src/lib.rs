//! Browser bindings: thin wasm exports over the cavityline closed forms.
//!
//! Each export parses plain-string field and atom specifications,
//! evaluates on an evenly spaced grid with both endpoints included, and
//! returns the y values as a `Float64Array`; the page rebuilds the x
//! axis from the same endpoints and sample count. The math lives in
//! ordinary functions so the crate tests on a host target, where no
//! JavaScript value can exist.

use cavityline::dynamics::{evolve, inversion, state_from_raw};
use cavityline::lineshape::{discrimination_map, sweep};
use cavityline::{AtomInit, FieldSpec, ModelParams, TruncationPolicy};
use wasm_bindgen::prelude::*;

/// Hard cap on grid sizes so a typo cannot hang the page.
const MAX_SAMPLES: usize = 200_000;

/// Atomic inversion W(t) on `samples` evenly spaced times in [0, t_max].
#[wasm_bindgen]
pub fn inversion_trace(
    field: &str,
    atom: &str,
    delta: f64,
    chi: f64,
    coupling: f64,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    trace_values(field, atom, delta, chi, coupling, t_max, samples).map_err(|e| JsError::new(&e))
}

/// Time-averaged inversion on `samples` detunings in [delta_min, delta_max].
#[wasm_bindgen]
pub fn lineshape_curve(
    field: &str,
    atom: &str,
    chi: f64,
    coupling: f64,
    delta_min: f64,
    delta_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    curve_values(field, atom, chi, coupling, delta_min, delta_max, samples)
        .map_err(|e| JsError::new(&e))
}

/// Even-cat minus odd-cat line-shape difference at one real amplitude,
/// over `samples` detunings in [delta_min, delta_max].
#[wasm_bindgen]
pub fn discrimination_profile(
    alpha: f64,
    atom: &str,
    chi: f64,
    coupling: f64,
    delta_min: f64,
    delta_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsError> {
    profile_values(alpha, atom, chi, coupling, delta_min, delta_max, samples)
        .map_err(|e| JsError::new(&e))
}

fn trace_values(
    field: &str,
    atom: &str,
    delta: f64,
    chi: f64,
    coupling: f64,
    t_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let params = ModelParams::new(delta, chi, coupling).map_err(|e| e.to_string())?;
    let times = grid(0.0, t_max, samples)?;
    let dist = parse_field(field)?
        .distribution(TruncationPolicy::default())
        .map_err(|e| e.to_string())?;
    let state = state_from_raw(&dist, parse_atom(atom)?, None);
    Ok(times.iter().map(|&t| inversion(&evolve(&state, &params, t))).collect())
}

fn curve_values(
    field: &str,
    atom: &str,
    chi: f64,
    coupling: f64,
    delta_min: f64,
    delta_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    ModelParams::new(0.0, chi, coupling).map_err(|e| e.to_string())?;
    let deltas = grid(delta_min, delta_max, samples)?;
    sweep(
        parse_field(field)?,
        parse_atom(atom)?,
        chi,
        coupling,
        &deltas,
        TruncationPolicy::default(),
    )
    .map(|ls| ls.values)
    .map_err(|e| e.to_string())
}

fn profile_values(
    alpha: f64,
    atom: &str,
    chi: f64,
    coupling: f64,
    delta_min: f64,
    delta_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    ModelParams::new(0.0, chi, coupling).map_err(|e| e.to_string())?;
    let deltas = grid(delta_min, delta_max, samples)?;
    discrimination_map(
        &[alpha],
        parse_atom(atom)?,
        chi,
        coupling,
        &deltas,
        TruncationPolicy::default(),
    )
    .map(|m| m.diff)
    .map_err(|e| e.to_string())
}

/// Evenly spaced values with exact endpoints; a symmetric range is
/// exactly antisymmetric, so chi = 0 curves render exactly even.
fn grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>, String> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("need finite bounds with min < max, got {a} .. {b}"));
    }
    if !(2..=MAX_SAMPLES).contains(&n) {
        return Err(format!("samples must be in 2..={MAX_SAMPLES}, got {n}"));
    }
    let den = (n - 1) as f64;
    Ok((0..n).map(|i| (a * ((n - 1 - i) as f64) + b * (i as f64)) / den).collect())
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    s.parse::<FieldSpec>().map_err(|e| e.to_string())
}

fn parse_atom(s: &str) -> Result<AtomInit, String> {
    s.parse::<AtomInit>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavityline::lineshape::avg_inversion_excited;

    #[test]
    fn trace_matches_vacuum_rabi() {
        let n = 9;
        let t_max = std::f64::consts::PI;
        let w = trace_values("fock:0", "excited", 0.0, 0.0, 1.0, t_max, n).unwrap();
        for (i, &wi) in w.iter().enumerate() {
            let t = t_max * i as f64 / (n - 1) as f64;
            assert!((wi - (2.0 * t).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_matches_direct_library_call() {
        let w = curve_values("coherent:2", "excited", 0.25, 1.0, -3.0, 3.0, 7).unwrap();
        let dist = parse_field("coherent:2")
            .unwrap()
            .distribution(TruncationPolicy::default())
            .unwrap();
        let expect = avg_inversion_excited(&dist, 0.25, 1.0, -3.0);
        assert_eq!(w[0], expect);
        assert_eq!(w.len(), 7);
    }

    #[test]
    fn profile_is_odd_free_of_even_terms_at_chi_zero() {
        let w = profile_values(1.0, "excited", 0.0, 1.0, -2.0, 2.0, 5).unwrap();
        assert_eq!(w.len(), 5);
        assert_eq!(w[0], w[4]);
        assert_eq!(w[1], w[3]);
    }

    #[test]
    fn errors_come_back_as_strings() {
        assert!(trace_values("fock:x", "excited", 0.0, 0.0, 1.0, 1.0, 4).is_err());
        assert!(trace_values("fock:0", "sideways", 0.0, 0.0, 1.0, 1.0, 4).is_err());
        assert!(curve_values("fock:0", "excited", 0.0, 0.0, -1.0, 1.0, 4).is_err());
        assert!(profile_values(1e-9, "excited", 0.5, 1.0, -1.0, 1.0, 4)
            .unwrap_err()
            .contains("cat"));
        assert!(grid(0.0, 1.0, 1).is_err());
        assert!(grid(1.0, 0.0, 4).is_err());
    }

    #[test]
    fn grid_endpoints_are_exact() {
        let v = grid(-20.0, 20.0, 801).unwrap();
        assert_eq!(v[0], -20.0);
        assert_eq!(v[400], 0.0);
        assert_eq!(v[800], 20.0);
    }
}
