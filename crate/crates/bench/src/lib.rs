//! Fixed inputs shared by the benchmarks.

use hartogs_core::hartogs::HartogsPoint;
use hartogs_core::{CVector, Domain, HartogsDomain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x5eed)
}

/// `n` interior pairs of every catalog domain.
pub fn base_pairs(n: usize) -> Vec<(&'static str, Domain, Vec<(CVector, CVector)>)> {
    let mut r = rng();
    Domain::catalog()
        .into_iter()
        .map(|(name, d)| {
            let pts = (0..n).map(|_| (d.sample_interior(&mut r), d.sample_interior(&mut r))).collect();
            (name, d, pts)
        })
        .collect()
}

/// Pairs inside the fast-convergence region of the series evaluator.
pub fn series_pairs(h: &HartogsDomain, n: usize) -> Vec<(HartogsPoint, HartogsPoint)> {
    let mut r = rng();
    (0..n).map(|_| (h.sample_series_point(&mut r), h.sample_series_point(&mut r))).collect()
}

pub fn boundary_points(h: &HartogsDomain, n: usize) -> Vec<HartogsPoint> {
    let mut r = rng();
    (0..n).map(|_| h.sample_boundary0(&mut r)).collect()
}
