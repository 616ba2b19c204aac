//! Seeded generators for test and verification inputs.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{Element, MatrixBlock, StateAlgebra};
use crate::rational::Rational;

/// Positive rational weights summing to 1, each `cᵢ/Σc` with `cᵢ ∈ 1..=max_count`.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize, max_count: i64) -> Vec<Rational> {
    let counts: Vec<i64> = (0..n).map(|_| rng.random_range(1..=max_count)).collect();
    let total: i64 = counts.iter().sum();
    counts
        .iter()
        .map(|&c| Rational::new(c.into(), total.into()))
        .collect()
}

/// Like [`random_weights`] but every weight is at most `1/2`; needs `n ≥ 2`.
pub fn random_weights_at_most_half<R: Rng>(rng: &mut R, n: usize, max_count: i64) -> Vec<Rational> {
    assert!(n >= 2, "a single weight is 1");
    loop {
        let counts: Vec<i64> = (0..n).map(|_| rng.random_range(1..=max_count)).collect();
        let total: i64 = counts.iter().sum();
        if counts.iter().all(|&c| 2 * c <= total) {
            return counts
                .iter()
                .map(|&c| Rational::new(c.into(), total.into()))
                .collect();
        }
    }
}

/// Sorted decreasing weights for one block, so `λ₁` is the largest.
pub fn random_weights_sorted<R: Rng>(rng: &mut R, n: usize, max_count: i64) -> Vec<Rational> {
    let mut w = random_weights(rng, n, max_count);
    w.sort_by(|a, b| b.cmp(a));
    w
}

/// Random direct sum of matrix blocks with `Σ nₖ² ≤ max_linear_dim`.
///
/// The state weights are drawn jointly over all minimal projections.
pub fn random_algebra<R: Rng>(
    rng: &mut R,
    max_blocks: usize,
    max_size: usize,
    max_linear_dim: usize,
) -> StateAlgebra {
    let sizes = random_block_sizes(rng, max_blocks, max_size, max_linear_dim);
    let weights = random_weights(rng, sizes.iter().sum(), 12);
    assemble(sizes, weights)
}

/// Like [`random_algebra`] with every weight at most `1/2`.
pub fn random_algebra_at_most_half<R: Rng>(
    rng: &mut R,
    max_blocks: usize,
    max_size: usize,
    max_linear_dim: usize,
) -> StateAlgebra {
    let mut sizes = random_block_sizes(rng, max_blocks, max_size, max_linear_dim);
    if sizes.iter().sum::<usize>() < 2 {
        sizes = vec![2];
    }
    let weights = random_weights_at_most_half(rng, sizes.iter().sum(), 12);
    assemble(sizes, weights)
}

fn random_block_sizes<R: Rng>(
    rng: &mut R,
    max_blocks: usize,
    max_size: usize,
    max_linear_dim: usize,
) -> Vec<usize> {
    let blocks = rng.random_range(1..=max_blocks);
    let mut sizes = Vec::new();
    let mut used = 0;
    for _ in 0..blocks {
        let size = rng.random_range(1..=max_size);
        if used + size * size > max_linear_dim {
            break;
        }
        used += size * size;
        sizes.push(size);
    }
    if sizes.is_empty() {
        sizes.push(1);
    }
    sizes
}

fn assemble(sizes: Vec<usize>, weights: Vec<Rational>) -> StateAlgebra {
    let mut it = weights.into_iter();
    let blocks = sizes
        .iter()
        .map(|&n| MatrixBlock::new(it.by_ref().take(n).collect()))
        .collect();
    StateAlgebra::matrix_blocks("random", blocks)
}

/// Rational in the open interval `(lo, hi)` with denominator `den`.
pub fn random_rational_between<R: Rng>(
    rng: &mut R,
    lo: &Rational,
    hi: &Rational,
    den: i64,
) -> Rational {
    loop {
        let t = Rational::new(rng.random_range(1..den).into(), den.into());
        let r = lo + (hi - lo) * t;
        if &r > lo && &r < hi {
            return r;
        }
    }
}

/// Element with entries uniform in the unit square of ℂ.
pub fn random_element<R: Rng>(rng: &mut R, shape: &[MatrixBlock]) -> Element {
    let mut x = Element::zeros(shape);
    for b in x.blocks.iter_mut() {
        for z in b.iter_mut() {
            *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        }
    }
    x
}

/// Random element with state zero.
pub fn random_centered<R: Rng>(rng: &mut R, shape: &[MatrixBlock]) -> Element {
    random_element(rng, shape).centered(shape)
}
