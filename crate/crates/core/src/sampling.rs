//! Seeded random fixtures: states, operators, separable mixtures.
//!
//! Used by the test suites, benches and the `selfcheck`-style CLI runs. All
//! generators take an explicit RNG so every batch is reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::qlinalg::{normalize, schmidt_decompose, Op2, Op4, Vec2, Vec4, C64};
use crate::states::{make_state, TwoQubitState};

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gauss<R: Rng>(r: &mut R) -> f64 {
    StandardNormal.sample(r)
}

fn cgauss<R: Rng>(r: &mut R) -> C64 {
    C64::new(gauss(r), gauss(r))
}

pub fn random_op2<R: Rng>(r: &mut R) -> Op2 {
    Op2::from_fn(|_, _| cgauss(r))
}

/// GUE-like random 4×4 Hermitian matrix.
pub fn random_hermitian<R: Rng>(r: &mut R) -> Op4 {
    Op4::from_fn(|_, _| cgauss(r)).hermitian_part()
}

/// Haar-random single-qubit pure state.
pub fn random_qubit<R: Rng>(r: &mut R) -> Vec2 {
    loop {
        if let Ok(v) = normalize(&[cgauss(r), cgauss(r)]) {
            return v;
        }
    }
}

pub fn random_pure<R: Rng>(r: &mut R) -> Vec4 {
    loop {
        if let Ok(v) = normalize(&[cgauss(r), cgauss(r), cgauss(r), cgauss(r)]) {
            return v;
        }
    }
}

/// Random real unit 4-vector with both Schmidt coefficients above `min_coeff`.
pub fn random_real_entangled<R: Rng>(r: &mut R, min_coeff: f64) -> [f64; 4] {
    loop {
        let v = [gauss(r), gauss(r), gauss(r), gauss(r)];
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-6 {
            continue;
        }
        let v = v.map(|x| x / n);
        let cv = v.map(|x| C64::new(x, 0.0));
        if let Ok(s) = schmidt_decompose(&cv) {
            if s.coefficients[1] > min_coeff {
                return v;
            }
        }
    }
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a 4×rank Ginibre matrix.
pub fn random_state_of_rank<R: Rng>(r: &mut R, rank: usize) -> TwoQubitState {
    let rank = rank.clamp(1, 4);
    let g = Op4::from_fn(|_, j| if j < rank { cgauss(r) } else { C64::new(0.0, 0.0) });
    let m = g * g.adjoint();
    let rho = m.scale_real(1.0 / m.trace().re).hermitian_part();
    make_state(rho, 1e-10).expect("Ginibre construction yields a valid state")
}

/// Random state with a uniformly chosen rank in 1..=4.
pub fn random_state<R: Rng>(r: &mut R) -> TwoQubitState {
    let rank = r.random_range(1..=4);
    random_state_of_rank(r, rank)
}

/// Random probability vector of length `k` (flat Dirichlet).
pub fn random_simplex<R: Rng>(r: &mut R, k: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - r.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

/// Explicit separable mixture `Σ q_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|` with `k` terms.
pub fn random_product_mixture<R: Rng>(r: &mut R, k: usize) -> Vec<(f64, Vec2, Vec2)> {
    let q = random_simplex(r, k.max(1));
    q.into_iter().map(|w| (w, random_qubit(r), random_qubit(r))).collect()
}
