//! Synthetic generators with known ground truth.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{FeatureMatrix, PuDataset};
use crate::error::{Error, Result};
use crate::seeding;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha must lie in [0,1], got {alpha}")));
    }
    Ok(())
}

fn check_sizes(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("both samples need at least one row".into()));
    }
    Ok(())
}

/// Gaussian location model: positives from `N(0, I)`, unlabeled rows from
/// `N(mu0, I)` with probability `alpha` (truth 0) where
/// `mu0 = (separation, 0, ..., 0)`, otherwise from the positive component
/// (truth 1).
pub fn simulate_gaussian(
    alpha: f64,
    m: usize,
    n: usize,
    dim: usize,
    separation: f64,
    seed: u64,
) -> Result<PuDataset> {
    check_alpha(alpha)?;
    check_sizes(m, n)?;
    if dim == 0 {
        return Err(Error::Domain("dim must be at least 1".into()));
    }
    if !(separation >= 0.0) || !separation.is_finite() {
        return Err(Error::Domain(format!("separation must be >= 0, got {separation}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0x6741_5553));
    let mut positives = Vec::with_capacity(m * dim);
    for _ in 0..m * dim {
        positives.push(rng.sample::<f64, _>(StandardNormal));
    }

    let mut unlabeled = Vec::with_capacity(n * dim);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let novel = rng.random::<f64>() < alpha;
        truth.push(if novel { 0u8 } else { 1u8 });
        for j in 0..dim {
            let mut v: f64 = rng.sample(StandardNormal);
            if novel && j == 0 {
                v += separation;
            }
            unlabeled.push(v);
        }
    }

    PuDataset::new(
        FeatureMatrix::new(m, dim, positives)?,
        FeatureMatrix::new(n, dim, unlabeled)?,
        Some(truth),
    )
}

/// The three 21-point triangle waves underlying the waveform benchmark,
/// peaking at positions 11, 15, and 7.
pub fn waveform_bases() -> [[f64; 21]; 3] {
    let mut h = [[0.0; 21]; 3];
    for idx in 0..21 {
        let j = (idx + 1) as f64;
        h[0][idx] = (6.0 - (j - 11.0).abs()).max(0.0);
        h[1][idx] = (6.0 - (j - 15.0).abs()).max(0.0);
        h[2][idx] = (6.0 - (j - 7.0).abs()).max(0.0);
    }
    h
}

fn waveform_row(
    bases: &[[f64; 21]; 3],
    positive_class: bool,
    u: f64,
    noise_scale: f64,
    rng: &mut ChaCha8Rng,
) -> [f64; 21] {
    // Positive rows blend waves 1 and 2, negative rows waves 1 and 3.
    let other = if positive_class { &bases[1] } else { &bases[2] };
    let mut row = [0.0; 21];
    for idx in 0..21 {
        let noise: f64 = rng.sample(StandardNormal);
        row[idx] = u * bases[0][idx] + (1.0 - u) * other[idx] + noise_scale * noise;
    }
    row
}

/// Waveform benchmark generator with an adjustable noise scale. Scale 0
/// exposes the pure triangle-blend signal for tests.
pub fn simulate_waveform_with_noise(
    alpha: f64,
    m: usize,
    n: usize,
    noise_scale: f64,
    seed: u64,
) -> Result<PuDataset> {
    check_alpha(alpha)?;
    check_sizes(m, n)?;
    if !(noise_scale >= 0.0) || !noise_scale.is_finite() {
        return Err(Error::Domain(format!("noise scale must be >= 0, got {noise_scale}")));
    }

    let bases = waveform_bases();
    let mut rng = ChaCha8Rng::seed_from_u64(seeding::derive(seed, 0x7741_5645));

    let mut positives = Vec::with_capacity(m * 21);
    for _ in 0..m {
        let u = rng.random::<f64>();
        positives.extend_from_slice(&waveform_row(&bases, true, u, noise_scale, &mut rng));
    }

    let mut unlabeled = Vec::with_capacity(n * 21);
    let mut truth = Vec::with_capacity(n);
    for _ in 0..n {
        let novel = rng.random::<f64>() < alpha;
        truth.push(if novel { 0u8 } else { 1u8 });
        let u = rng.random::<f64>();
        unlabeled.extend_from_slice(&waveform_row(&bases, !novel, u, noise_scale, &mut rng));
    }

    PuDataset::new(
        FeatureMatrix::new(m, 21, positives)?,
        FeatureMatrix::new(n, 21, unlabeled)?,
        Some(truth),
    )
}

/// Standard waveform benchmark: 21 features, unit noise.
pub fn simulate_waveform(alpha: f64, m: usize, n: usize, seed: u64) -> Result<PuDataset> {
    simulate_waveform_with_noise(alpha, m, n, 1.0, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_alpha_zero_is_all_positive() {
        let ds = simulate_gaussian(0.0, 5, 20, 3, 4.0, 1).unwrap();
        assert!(ds.truth().unwrap().iter().all(|&t| t == 1));
    }

    #[test]
    fn gaussian_alpha_one_centers_on_mu0() {
        let n = 4000;
        let sep = 6.0;
        let ds = simulate_gaussian(1.0, 2, n, 2, sep, 7).unwrap();
        assert!(ds.truth().unwrap().iter().all(|&t| t == 0));
        let tol = 3.0 / (n as f64).sqrt();
        for j in 0..2 {
            let mean: f64 = ds.unlabeled().column(j).iter().sum::<f64>() / n as f64;
            let target = if j == 0 { sep } else { 0.0 };
            assert!((mean - target).abs() <= tol, "coordinate {j}: {mean} vs {target}");
        }
    }

    #[test]
    fn gaussian_rejects_bad_alpha() {
        assert!(simulate_gaussian(1.5, 2, 2, 1, 1.0, 0).is_err());
        assert!(simulate_gaussian(-0.1, 2, 2, 1, 1.0, 0).is_err());
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = simulate_gaussian(0.4, 10, 15, 4, 2.0, 99).unwrap();
        let b = simulate_gaussian(0.4, 10, 15, 4, 2.0, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_waveform(0.4, 10, 15, 99).unwrap();
        let d = simulate_waveform(0.4, 10, 15, 99).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn waveform_has_21_features() {
        let ds = simulate_waveform(0.3, 4, 6, 5).unwrap();
        assert_eq!(ds.positives().cols(), 21);
        assert_eq!(ds.unlabeled().cols(), 21);
    }

    #[test]
    fn noiseless_pure_wave_recovers_base() {
        // With u = 1 a positive row is exactly h1: peak 6 at position 11.
        let bases = waveform_bases();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let row = waveform_row(&bases, true, 1.0, 0.0, &mut rng);
        assert_eq!(row, bases[0]);
        assert_eq!(row[10], 6.0);
        assert!(row.iter().all(|&v| v <= 6.0));
    }

    #[test]
    fn truth_fraction_concentrates() {
        let n = 10_000;
        let ds = simulate_waveform_with_noise(0.5, 2, n, 1.0, 11).unwrap();
        let zeros = ds.truth().unwrap().iter().filter(|&&t| t == 0).count();
        let frac = zeros as f64 / n as f64;
        assert!((frac - 0.5).abs() <= 0.02, "fraction {frac}");
    }

    #[test]
    fn mixing_fraction_within_binomial_band() {
        // 5 sigma binomial band for each simulator.
        for (alpha, seed) in [(0.2, 3u64), (0.7, 4)] {
            let n = 5000;
            let band = 5.0 * (alpha * (1.0 - alpha) / n as f64).sqrt();
            let g = simulate_gaussian(alpha, 5, n, 2, 3.0, seed).unwrap();
            let zg = g.truth().unwrap().iter().filter(|&&t| t == 0).count() as f64 / n as f64;
            assert!((zg - alpha).abs() <= band, "gaussian {zg} vs {alpha}");
            let w = simulate_waveform(alpha, 5, n, seed).unwrap();
            let zw = w.truth().unwrap().iter().filter(|&&t| t == 0).count() as f64 / n as f64;
            assert!((zw - alpha).abs() <= band, "waveform {zw} vs {alpha}");
        }
    }
}
