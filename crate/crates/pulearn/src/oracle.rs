//! Population references for discrete instances.
//!
//! On a finite support the identifiable lower bound has a closed form,
//! `alpha0 = 1 - min f(x)/f1(x)` over the support of `f1`, and its
//! score-space counterpart can be computed exactly from the calibrated
//! classifier values. Both are exposed so tests (and users working with
//! synthetic instances) have an implementation-independent ground truth.

use crate::error::{Error, Result};

/// Grid resolution of the feasibility scan used by [`alpha0_gspace_discrete`].
pub const GSPACE_SCAN_STEP: f64 = 1e-4;

fn check_pmf(name: &str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::Domain(format!("{name} has empty support")));
    }
    if p.iter().any(|&v| !v.is_finite() || v < 0.0) {
        return Err(Error::Domain(format!("{name} has negative or non-finite mass")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("{name} sums to {total}, expected 1")));
    }
    Ok(())
}

fn check_pair(f: &[f64], f1: &[f64]) -> Result<()> {
    check_pmf("f", f)?;
    check_pmf("f1", f1)?;
    if f.len() != f1.len() {
        return Err(Error::Domain("f and f1 have different support sizes".into()));
    }
    if f1.iter().all(|&v| v == 0.0) {
        return Err(Error::Domain("f1 is identically zero".into()));
    }
    Ok(())
}

/// Exact mixture proportion lower bound for discrete `f` and `f1` sharing a
/// support of equal size.
///
/// Cross-checked in debug builds against a feasibility scan over gamma: the
/// remainder `(f - (1-gamma) f1) / gamma` must be a valid pmf.
pub fn alpha0_discrete(f: &[f64], f1: &[f64]) -> Result<f64> {
    check_pair(f, f1)?;
    let min_ratio = f
        .iter()
        .zip(f1)
        .filter(|(_, &q)| q > 0.0)
        .map(|(&p, &q)| p / q)
        .fold(f64::INFINITY, f64::min);
    let alpha0 = (1.0 - min_ratio).max(0.0);
    debug_assert!({
        let scanned = feasibility_scan(&f.iter().copied().zip(f1.iter().copied()).collect::<Vec<_>>());
        (scanned - alpha0).abs() <= GSPACE_SCAN_STEP + 1e-9
    });
    Ok(alpha0)
}

/// Smallest grid gamma such that `dg - (1-gamma) dgl >= 0` for every jump.
fn feasibility_scan(jumps: &[(f64, f64)]) -> f64 {
    let cells = (1.0 / GSPACE_SCAN_STEP).round() as usize;
    for i in 1..=cells {
        let gamma = i as f64 / cells as f64;
        if jumps.iter().all(|&(dg, dgl)| dg - (1.0 - gamma) * dgl >= -1e-12) {
            return gamma;
        }
    }
    1.0
}

/// Mixture proportion lower bound computed in the score space of the
/// calibrated classifier `C(x) = pi f1(x) / (pi f1(x) + (1-pi) f(x))`.
///
/// Builds the exact distributions of `C(X)` under `f` and `f1` (atoms with
/// tied classifier values are pooled into one jump) and scans gamma at
/// resolution [`GSPACE_SCAN_STEP`] for the smallest value whose remainder is
/// a valid CDF. Agrees with [`alpha0_discrete`] up to the scan resolution.
pub fn alpha0_gspace_discrete(f: &[f64], f1: &[f64], pi: f64) -> Result<f64> {
    check_pair(f, f1)?;
    if !(pi > 0.0 && pi < 1.0) {
        return Err(Error::Domain(format!("pi must lie in (0,1), got {pi}")));
    }

    // Classifier value per atom; atoms with no mass under either law are inert.
    let mut atoms: Vec<(f64, f64, f64)> = f
        .iter()
        .zip(f1)
        .filter(|(&p, &q)| p > 0.0 || q > 0.0)
        .map(|(&p, &q)| {
            let c = pi * q / (pi * q + (1.0 - pi) * p);
            (c, p, q)
        })
        .collect();
    atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite classifier values"));

    // Pool ties in C into single jumps of (dG, dG_L). A remainder CDF needs
    // every increment of G - (1-gamma) G_L nonnegative.
    let mut jumps: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    let mut prev_c = f64::NEG_INFINITY;
    for (c, p, q) in atoms {
        if (c - prev_c).abs() <= 1e-12 {
            let last = jumps.last_mut().expect("tie implies a previous jump");
            last.0 += p;
            last.1 += q;
        } else {
            jumps.push((p, q));
            prev_c = c;
        }
    }

    Ok(feasibility_scan(&jumps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_two_atoms() {
        let a = alpha0_discrete(&[0.5, 0.5], &[0.2, 0.8]).unwrap();
        assert!((a - 0.375).abs() < 1e-12, "got {a}");
    }

    #[test]
    fn identical_distributions_give_zero() {
        let f = [0.3, 0.3, 0.4];
        assert_eq!(alpha0_discrete(&f, &f).unwrap(), 0.0);
    }

    #[test]
    fn mass_outside_f1_support() {
        let a = alpha0_discrete(&[0.3, 0.7], &[1.0, 0.0]).unwrap();
        assert!((a - 0.7).abs() < 1e-12, "got {a}");
    }

    #[test]
    fn gspace_matches_closed_form_on_spec_instance() {
        let g = alpha0_gspace_discrete(&[0.5, 0.5], &[0.2, 0.8], 0.5).unwrap();
        assert!((g - 0.375).abs() <= 1e-3, "got {g}");
    }

    #[test]
    fn gspace_identical_distributions() {
        let f = [0.25, 0.25, 0.5];
        let g = alpha0_gspace_discrete(&f, &f, 0.5).unwrap();
        assert!(g <= GSPACE_SCAN_STEP + 1e-12, "got {g}");
    }

    #[test]
    fn zero_f1_is_rejected() {
        assert!(alpha0_discrete(&[0.5, 0.5], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        assert!(alpha0_discrete(&[0.5, 0.6], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn disjoint_supports_force_one() {
        // All f1 mass sits where f has none: nothing can be removed.
        let a = alpha0_discrete(&[0.0, 1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(a, 1.0);
        let g = alpha0_gspace_discrete(&[0.0, 1.0], &[1.0, 0.0], 0.5).unwrap();
        assert_eq!(g, 1.0);
    }
}
