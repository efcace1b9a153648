#![allow(dead_code)]

use leafwise_core::cohomology::TrigPoly;
use leafwise_core::groupoid::{AffineMap, BaseModel, FiberedGSpace, FiniteGroup, TorusGrid};
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn half_shift(n: usize) -> FiberedGSpace {
    let g = FiniteGroup::cyclic(2);
    let maps = [
        AffineMap::identity(2),
        AffineMap::translation(vec![Rational64::new(1, 2), Rational64::from_integer(0)]),
    ];
    FiberedGSpace::from_group_action(
        BaseModel::uniform(1),
        &g,
        &[vec![0], vec![0]],
        &maps,
        TorusGrid::new(2, n).unwrap(),
    )
    .unwrap()
}

pub fn flip(n: usize) -> FiberedGSpace {
    let g = FiniteGroup::cyclic(2);
    let maps = [
        AffineMap::identity(2),
        AffineMap::linear(2, vec![-1, 0, 0, -1]).unwrap(),
    ];
    FiberedGSpace::from_group_action(
        BaseModel::uniform(1),
        &g,
        &[vec![0], vec![0]],
        &maps,
        TorusGrid::new(2, n).unwrap(),
    )
    .unwrap()
}

/// Z/2 swapping two base points, fibers shifted by a quarter on the way.
pub fn swap_two_points(n: usize) -> FiberedGSpace {
    let g = FiniteGroup::cyclic(2);
    let maps = [
        AffineMap::identity(2),
        AffineMap::translation(vec![Rational64::new(1, 2), Rational64::new(1, 2)]),
    ];
    FiberedGSpace::from_group_action(
        BaseModel::new(vec![1.0, 2.0], vec![1, 1]).unwrap(),
        &g,
        &[vec![0, 1], vec![1, 0]],
        &maps,
        TorusGrid::new(2, n).unwrap(),
    )
    .unwrap()
}

pub fn random_trig(rng: &mut ChaCha8Rng, dim: usize, band: i64, terms: usize) -> TrigPoly {
    let t = (0..terms)
        .map(|_| {
            let nu = (0..dim).map(|_| rng.random_range(-band..=band)).collect();
            (
                nu,
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        })
        .collect();
    TrigPoly { dim, terms: t }.simplify()
}
