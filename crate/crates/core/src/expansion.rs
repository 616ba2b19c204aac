//! Expansion factor `ef(A, φ)`.
//!
//! For a finite-dimensional algebra `ef²` is the minimum of
//! `‖(P∘⊗P∘)X‖²` over left–right equivariant `X` with `⟨X, ξ⊗ξ⟩ = 1`.
//! Writing `X = Σ v_m b_m` in an exact equivariant basis turns this into
//! `min vᵀGv` subject to `aᵀv = 1`, with `G` the PSD corner Gram matrix and
//! `a` the pairing vector. [`ef_exact`] solves that problem in rational
//! arithmetic; the closed forms for `ℂⁿ` and `M_n` are kept separately and
//! serve as independent checks.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{AlgebraError, StateAlgebra};
use crate::gns::{build_gns, equivariant_basis};
use crate::linalg;
use crate::rational::{dot, int, q, to_f64, Rational};

/// The square `ef²`, either an exact non-negative rational or `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExpansionFactor {
    Finite(Rational),
    Infinite,
}

impl ExpansionFactor {
    pub fn squared(&self) -> Option<&Rational> {
        match self {
            ExpansionFactor::Finite(r) => Some(r),
            ExpansionFactor::Infinite => None,
        }
    }

    /// `ef` itself as a float.
    pub fn value_f64(&self) -> f64 {
        match self {
            ExpansionFactor::Finite(r) => to_f64(r).sqrt(),
            ExpansionFactor::Infinite => f64::INFINITY,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExpansionFactor::Finite(r) if r.is_zero())
    }

    /// `ef(A)·ef(B) ≥ 1` with `0·(+∞) = 0` and `c·(+∞) = +∞` for `c > 0`.
    pub fn product_at_least_one(&self, other: &Self) -> bool {
        use ExpansionFactor::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a * b >= int(1),
            (Finite(a), Infinite) | (Infinite, Finite(a)) => !a.is_zero(),
            (Infinite, Infinite) => true,
        }
    }

    /// Exact product of squares, `None` when it is `+∞`; `0·(+∞) = 0`.
    pub fn product_squared(&self, other: &Self) -> Option<Rational> {
        use ExpansionFactor::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Some(a * b),
            (Finite(a), Infinite) | (Infinite, Finite(a)) if a.is_zero() => Some(Rational::zero()),
            _ => None,
        }
    }
}

impl PartialOrd for ExpansionFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExpansionFactor::*;
        Some(match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => Ordering::Less,
            (Infinite, Finite(_)) => Ordering::Greater,
            (Infinite, Infinite) => Ordering::Equal,
        })
    }
}

impl fmt::Display for ExpansionFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpansionFactor::Finite(r) => write!(f, "{r}"),
            ExpansionFactor::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExpansionFactor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpansionError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `min vᵀGv` subject to `aᵀv = 1` for symmetric PSD `G`.
///
/// `a = 0` makes the constraint infeasible and gives `+∞`. If some null
/// direction `d` of `G` has `aᵀd ≠ 0` the minimum is `0`. Otherwise `a` lies
/// in the range of `G`, the KKT system `Gv = μa, aᵀv = 1` is consistent, and
/// every solution attains the same value.
pub fn minimize_on_hyperplane(gram: &[Vec<Rational>], pairing: &[Rational]) -> ExpansionFactor {
    let m = pairing.len();
    assert_eq!(gram.len(), m);
    if pairing.iter().all(Zero::is_zero) {
        return ExpansionFactor::Infinite;
    }
    let null = linalg::nullspace(gram, m);
    if null.iter().any(|d| !dot(pairing, d).is_zero()) {
        return ExpansionFactor::Finite(Rational::zero());
    }
    // [G  -a] [v]   [0]
    // [aᵀ  0] [μ] = [1]
    let mut kkt = Vec::with_capacity(m + 1);
    for (row, a) in gram.iter().zip(pairing) {
        let mut r = row.clone();
        r.push(-a.clone());
        kkt.push(r);
    }
    let mut last = pairing.to_vec();
    last.push(Rational::zero());
    kkt.push(last);
    let mut rhs = vec![Rational::zero(); m];
    rhs.push(Rational::one());
    let sol = linalg::solve(&kkt, &rhs).expect("KKT system is consistent when a ⊥ ker G");
    let v = &sol[..m];
    ExpansionFactor::Finite(linalg::quadratic_form(gram, v))
}

pub fn ef_exact(algebra: &StateAlgebra) -> Result<ExpansionFactor, AlgebraError> {
    algebra.validate()?;
    if algebra.is_diffuse() {
        return Ok(ExpansionFactor::Infinite);
    }
    let gns = build_gns(algebra)?;
    let eb = equivariant_basis(&gns);
    Ok(minimize_on_hyperplane(&eb.corner_gram, &eb.pairing))
}

fn check_weights(weights: &[Rational]) -> Result<(), ExpansionError> {
    if weights.is_empty() {
        return Err(ExpansionError::InvalidWeights("no weights".into()));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_positive()) {
        return Err(ExpansionError::InvalidWeights(format!(
            "non-positive weight {w}"
        )));
    }
    let total: Rational = weights.iter().cloned().sum();
    if !total.is_one() {
        return Err(ExpansionError::InvalidWeights(format!(
            "weights sum to {total}"
        )));
    }
    Ok(())
}

/// Closed form for `ℂⁿ`: `ef² = 1 + (Σ λ²/(1−2λ))⁻¹`, equal to `1` when some
/// weight is exactly `1/2`.
pub fn ef_commutative_closed(weights: &[Rational]) -> Result<ExpansionFactor, ExpansionError> {
    check_weights(weights)?;
    let half = q(1, 2);
    if weights.contains(&half) {
        return Ok(ExpansionFactor::Finite(int(1)));
    }
    let s: Rational = weights.iter().map(|l| l * l / (int(1) - int(2) * l)).sum();
    if s.is_zero() {
        return Err(ExpansionError::InvalidWeights(
            "degenerate weight sum".into(),
        ));
    }
    Ok(ExpansionFactor::Finite(int(1) + s.recip()))
}

/// Closed form for `M_n` with diagonal density:
/// `ef² = 1 + (Σ λ³/(1−2λ²))⁻¹`. The special value at `λ₁ = 1/√2` cannot
/// occur for rational weights.
pub fn ef_matrix_closed(weights: &[Rational]) -> Result<ExpansionFactor, ExpansionError> {
    check_weights(weights)?;
    let s: Rational = weights
        .iter()
        .map(|l| l * l * l / (int(1) - int(2) * l * l))
        .sum();
    if s.is_zero() {
        return Err(ExpansionError::InvalidWeights(
            "degenerate weight sum".into(),
        ));
    }
    Ok(ExpansionFactor::Finite(int(1) + s.recip()))
}

/// True when no minimal projection carries more than half the state, which
/// guarantees `ef ≥ 1`.
pub fn ef_lower_bound_certificate(algebra: &StateAlgebra) -> Result<bool, AlgebraError> {
    algebra.validate()?;
    Ok(match algebra.max_minimal_projection_weight() {
        Some(w) => w <= q(1, 2),
        None => true,
    })
}

/// `(λ + λ² − 4λ³ + 2λ⁴)/(1 − 3λ + λ² + 4λ³ − 2λ⁴)`, the expanded form of
/// `ef²(M₂, diag(λ, 1−λ))`.
pub fn m2_rational_function(lambda: &Rational) -> Rational {
    let l = lambda;
    let l2 = l * l;
    let l3 = &l2 * l;
    let l4 = &l3 * l;
    let num = l + &l2 - int(4) * &l3 + int(2) * &l4;
    let den = int(1) - int(3) * l + &l2 + int(4) * &l3 - int(2) * &l4;
    num / den
}
