//! Finite-dimensional von Neumann algebras `⊕ₖ M_{nₖ}(ℂ)` with faithful states
//! given by diagonal densities, plus a symbolic diffuse abelian algebra.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{int, q, to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("weight {index} of block {block} is not strictly positive ({value})")]
    NonPositiveWeight {
        block: usize,
        index: usize,
        value: Rational,
    },
    #[error("state weights sum to {0}, expected 1")]
    WeightSumNotOne(Rational),
    #[error("algebra has no blocks")]
    EmptyAlgebra,
    #[error("block {block} has size {size} but {weights} weights")]
    BlockShape {
        block: usize,
        size: usize,
        weights: usize,
    },
    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("operation needs a matrix-block algebra, got the diffuse abelian token `{0}`")]
    DiffuseUnsupported(String),
}

/// One summand `M_n(ℂ)` with the diagonal entries of its density.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixBlock {
    pub size: usize,
    pub weights: Vec<Rational>,
}

impl MatrixBlock {
    pub fn new(weights: Vec<Rational>) -> Self {
        Self {
            size: weights.len(),
            weights,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    MatrixBlocks(Vec<MatrixBlock>),
    DiffuseAbelian,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateAlgebra {
    pub label: String,
    pub kind: AlgebraKind,
}

/// Linear dimension, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dimension {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => f.write_str("inf"),
        }
    }
}

impl StateAlgebra {
    pub fn matrix_blocks(label: impl Into<String>, blocks: Vec<MatrixBlock>) -> Self {
        Self {
            label: label.into(),
            kind: AlgebraKind::MatrixBlocks(blocks),
        }
    }

    /// `ℂⁿ` with the given weights on its minimal projections.
    pub fn commutative(label: impl Into<String>, weights: Vec<Rational>) -> Self {
        let blocks = weights
            .into_iter()
            .map(|w| MatrixBlock::new(vec![w]))
            .collect();
        Self::matrix_blocks(label, blocks)
    }

    /// A single `M_n(ℂ)` with diagonal density `weights`.
    pub fn matrix(label: impl Into<String>, weights: Vec<Rational>) -> Self {
        Self::matrix_blocks(label, vec![MatrixBlock::new(weights)])
    }

    pub fn diffuse_abelian(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: AlgebraKind::DiffuseAbelian,
        }
    }

    pub fn is_diffuse(&self) -> bool {
        matches!(self.kind, AlgebraKind::DiffuseAbelian)
    }

    pub fn blocks(&self) -> Result<&[MatrixBlock], AlgebraError> {
        match &self.kind {
            AlgebraKind::MatrixBlocks(b) => Ok(b),
            AlgebraKind::DiffuseAbelian => {
                Err(AlgebraError::DiffuseUnsupported(self.label.clone()))
            }
        }
    }

    /// True when every block has size one.
    pub fn is_commutative(&self) -> bool {
        match &self.kind {
            AlgebraKind::MatrixBlocks(b) => b.iter().all(|b| b.size == 1),
            AlgebraKind::DiffuseAbelian => true,
        }
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let AlgebraKind::MatrixBlocks(blocks) = &self.kind else {
            return Ok(());
        };
        if blocks.is_empty() {
            return Err(AlgebraError::EmptyAlgebra);
        }
        let mut total = Rational::zero();
        for (k, block) in blocks.iter().enumerate() {
            if block.size == 0 || block.weights.len() != block.size {
                return Err(AlgebraError::BlockShape {
                    block: k,
                    size: block.size,
                    weights: block.weights.len(),
                });
            }
            for (i, w) in block.weights.iter().enumerate() {
                if !w.is_positive() {
                    return Err(AlgebraError::NonPositiveWeight {
                        block: k,
                        index: i,
                        value: w.clone(),
                    });
                }
                total += w;
            }
        }
        if !total.is_one() {
            return Err(AlgebraError::WeightSumNotOne(total));
        }
        Ok(())
    }

    pub fn linear_dimension(&self) -> Dimension {
        match &self.kind {
            AlgebraKind::MatrixBlocks(b) => {
                Dimension::Finite(b.iter().map(|b| b.size * b.size).sum())
            }
            AlgebraKind::DiffuseAbelian => Dimension::Infinite,
        }
    }

    /// Largest value of the state on a minimal projection; `None` when there
    /// are no minimal projections. Within a block the supremum over rank-one
    /// projections is the largest density eigenvalue.
    pub fn max_minimal_projection_weight(&self) -> Option<Rational> {
        match &self.kind {
            AlgebraKind::MatrixBlocks(b) => b.iter().flat_map(|b| b.weights.iter()).max().cloned(),
            AlgebraKind::DiffuseAbelian => None,
        }
    }

    /// Sum of block sizes, i.e. the size of a maximal family of orthogonal
    /// minimal projections.
    pub fn total_rank(&self) -> usize {
        match &self.kind {
            AlgebraKind::MatrixBlocks(b) => b.iter().map(|b| b.size).sum(),
            AlgebraKind::DiffuseAbelian => 0,
        }
    }
}

pub(crate) fn out_of_range(
    name: &'static str,
    value: &Rational,
    range: &'static str,
) -> AlgebraError {
    AlgebraError::ParameterOutOfRange {
        name,
        value: value.to_string(),
        range,
    }
}

/// `M₂` with `e₁₁ ↦ 1/(1+λ)`, `e₂₂ ↦ λ/(1+λ)`, for `0 < λ < 1`.
pub fn make_psi_lambda(lambda: &Rational) -> Result<StateAlgebra, AlgebraError> {
    if !(lambda.is_positive() && *lambda < int(1)) {
        return Err(out_of_range("lambda", lambda, "(0, 1)"));
    }
    let denom = int(1) + lambda;
    Ok(StateAlgebra::matrix(
        format!("psi_{lambda}"),
        vec![denom.recip(), lambda / &denom],
    ))
}

/// `M₂` with diagonal density `(λ, 1−λ)` for `1/2 ≤ λ < 1`.
pub fn make_phi_lambda(lambda: &Rational) -> Result<StateAlgebra, AlgebraError> {
    if !(*lambda >= q(1, 2) && *lambda < int(1)) {
        return Err(out_of_range("lambda", lambda, "[1/2, 1)"));
    }
    Ok(StateAlgebra::matrix(
        format!("phi_{lambda}"),
        vec![lambda.clone(), int(1) - lambda],
    ))
}

/// `ℂⁿ` with every minimal projection weighted `1/n`.
pub fn make_uniform(n: usize) -> Result<StateAlgebra, AlgebraError> {
    if n == 0 {
        return Err(out_of_range("n", &int(0), "n >= 1"));
    }
    Ok(StateAlgebra::commutative(
        format!("C^{n}"),
        vec![q(1, n as i64); n],
    ))
}

/// `M_n` with the normalized trace.
pub fn make_trace(n: usize) -> Result<StateAlgebra, AlgebraError> {
    if n == 0 {
        return Err(out_of_range("n", &int(0), "n >= 1"));
    }
    Ok(StateAlgebra::matrix(
        format!("M_{n}"),
        vec![q(1, n as i64); n],
    ))
}

/// Matrix unit `e^k_{ij}` (zero-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl fmt::Display for MatrixUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "e^{}_{{{}{}}}",
            self.block + 1,
            self.row + 1,
            self.col + 1
        )
    }
}

/// Enumerates all matrix units block by block, row-major inside a block.
pub fn matrix_units(blocks: &[MatrixBlock]) -> Vec<MatrixUnit> {
    blocks
        .iter()
        .enumerate()
        .flat_map(|(k, b)| {
            (0..b.size).flat_map(move |i| {
                (0..b.size).map(move |j| MatrixUnit {
                    block: k,
                    row: i,
                    col: j,
                })
            })
        })
        .collect()
}

/// A numeric element of `⊕ₖ M_{nₖ}(ℂ)`, one dense complex matrix per block.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub blocks: Vec<DMatrix<Complex64>>,
}

impl Element {
    pub fn zeros(shape: &[MatrixBlock]) -> Self {
        Self {
            blocks: shape
                .iter()
                .map(|b| DMatrix::zeros(b.size, b.size))
                .collect(),
        }
    }

    pub fn identity(shape: &[MatrixBlock]) -> Self {
        Self {
            blocks: shape
                .iter()
                .map(|b| DMatrix::identity(b.size, b.size))
                .collect(),
        }
    }

    pub fn unit(shape: &[MatrixBlock], u: MatrixUnit) -> Self {
        let mut e = Self::zeros(shape);
        e.blocks[u.block][(u.row, u.col)] = Complex64::one();
        e
    }

    pub fn adjoint(&self) -> Self {
        Self {
            blocks: self.blocks.iter().map(|m| m.adjoint()).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|m| m * c).collect(),
        }
    }

    /// Largest entry modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| (a - b).iter().map(|z| z.norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// `φ(x) = Σₖ Σᵢ λᵏᵢ xᵏᵢᵢ`.
    pub fn state(&self, shape: &[MatrixBlock]) -> Complex64 {
        shape
            .iter()
            .zip(&self.blocks)
            .map(|(b, m)| {
                b.weights
                    .iter()
                    .enumerate()
                    .map(|(i, w)| m[(i, i)] * to_f64(w))
                    .sum::<Complex64>()
            })
            .sum()
    }

    /// `x − φ(x)·1`, which lies in the kernel of the state.
    pub fn centered(&self, shape: &[MatrixBlock]) -> Self {
        let s = self.state(shape);
        self.add(&Self::identity(shape).scale(-s))
    }
}
