#![allow(dead_code)]

use nalgebra::DMatrix;
use nosignal::qcore::{Space, StateVector};
use nosignal::C64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn random_vec(r: &mut impl Rng, dim: usize) -> Vec<C64> {
    // Gaussian entries via Box-Muller so the direction is uniform on the sphere.
    (0..dim)
        .map(|_| {
            let u1: f64 = 1.0 - r.gen::<f64>();
            let u2: f64 = r.gen();
            let rad = (-2.0 * u1.ln()).sqrt();
            let th = std::f64::consts::TAU * u2;
            c(rad * th.cos(), rad * th.sin())
        })
        .collect()
}

pub fn normalize(v: Vec<C64>) -> Vec<C64> {
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

pub fn random_state(r: &mut impl Rng, space: &Space) -> StateVector {
    let v = normalize(random_vec(r, space.dimension()));
    StateVector::new(space.clone(), v).unwrap()
}

/// Unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(r: &mut impl Rng, dim: usize) -> DMatrix<C64> {
    let m = DMatrix::from_vec(dim, dim, random_vec(r, dim * dim));
    m.qr().q()
}

/// `(α, β)` with `|α|² + |β|² = 1`.
pub fn random_target(r: &mut impl Rng) -> (C64, C64) {
    let v = normalize(random_vec(r, 2));
    (v[0], v[1])
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn arb_vec(dim: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
        .prop_filter("non-zero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

pub fn arb_state(space: Space) -> impl Strategy<Value = StateVector> {
    arb_vec(space.dimension()).prop_map(move |v| StateVector::new(space.clone(), normalize(v)).unwrap())
}

/// Photon 2 on its own, so `tensor(photon, photon2)` is the photon pair.
pub fn photon2() -> Space {
    Space::single("2", &["H", "V"])
}
