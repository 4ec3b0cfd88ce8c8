//! Seeded random signals for the verification harnesses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph::SignalSpace;
use crate::network::FeatureBundle;
use crate::scalar::{cplx, cre, lit, CVector, Real};

/// RNG for sample `index` of a run seeded with `seed`.
pub fn derived_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

pub fn complex_gaussian<R: Real>(rng: &mut impl Rng, n: usize) -> CVector<R> {
    CVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(lit(re), lit(im))
    })
}

pub fn real_gaussian<R: Real>(rng: &mut impl Rng, n: usize) -> CVector<R> {
    CVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        cre(lit(re))
    })
}

/// Complex Gaussian bundle scaled to unit norm in the weighted space.
pub fn unit_bundle<R: Real>(rng: &mut impl Rng, space: &SignalSpace<R>, channels: usize) -> FeatureBundle<R> {
    let raw: Vec<CVector<R>> = (0..channels).map(|_| complex_gaussian(rng, space.dim())).collect();
    let bundle = FeatureBundle::new(space, raw).expect("lengths match by construction");
    bundle.normalized()
}

/// Real Gaussian bundle scaled to unit norm.
pub fn real_unit_bundle<R: Real>(rng: &mut impl Rng, space: &SignalSpace<R>, channels: usize) -> FeatureBundle<R> {
    let raw: Vec<CVector<R>> = (0..channels).map(|_| real_gaussian(rng, space.dim())).collect();
    let bundle = FeatureBundle::new(space, raw).expect("lengths match by construction");
    bundle.normalized()
}
