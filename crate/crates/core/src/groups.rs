//! Closed subgroups of ℝ that arise as modular invariant groups, represented
//! symbolically.
//!
//! `LogCyclic { base: g, divisor: k }` denotes `(2π/(k·ln g))ℤ`. The base is
//! kept primitive: `g > 1` and the gcd of its prime exponents (numerator and
//! denominator together) is 1. Under that normalization two representations
//! denote the same group iff they are identical, and two distinct primitive
//! bases are never multiplicatively related.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraKind, StateAlgebra};
use crate::primes::factorize;
use crate::rational::{pow, to_f64, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("argument equals 1, which has no logarithmic relation")]
    UnitArgument,
    #[error("argument {0} is not strictly positive")]
    NonPositive(Rational),
    #[error("base {0} must exceed 1")]
    BaseNotAboveOne(Rational),
    #[error("divisor must be positive")]
    ZeroDivisor,
    #[error("{0} is too large to factor")]
    TooLarge(Rational),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClosedSubgroup {
    /// ℝ
    Full,
    /// {0}
    Trivial,
    /// `(2π/(divisor·ln base))ℤ`
    LogCyclic { base: Rational, divisor: u64 },
}

type ExponentVector = BTreeMap<u64, i64>;

fn exponent_vector(r: &Rational) -> Result<ExponentVector, GroupError> {
    if !r.is_positive() {
        return Err(GroupError::NonPositive(r.clone()));
    }
    let too_large = || GroupError::TooLarge(r.clone());
    let num = r.numer().to_u64().ok_or_else(too_large)?;
    let den = r.denom().to_u64().ok_or_else(too_large)?;
    let mut v = ExponentVector::new();
    for (p, e) in factorize(num) {
        *v.entry(p).or_default() += e as i64;
    }
    for (p, e) in factorize(den) {
        *v.entry(p).or_default() -= e as i64;
    }
    v.retain(|_, e| *e != 0);
    Ok(v)
}

fn from_exponents(v: &ExponentVector) -> Rational {
    v.iter().fold(Rational::one(), |acc, (&p, &e)| {
        acc * pow(&Rational::from_integer(BigInt::from(p)), e)
    })
}

/// Writes `r ≠ 1` as `g^(sign·m)` with `g > 1` primitive and `m ≥ 1`.
fn primitive_power(r: &Rational) -> Result<(Rational, i64), GroupError> {
    let v = exponent_vector(r)?;
    if v.is_empty() {
        return Err(GroupError::UnitArgument);
    }
    let m = v.values().fold(0i64, |acc, e| acc.gcd(e));
    let mut root: ExponentVector = v.iter().map(|(&p, &e)| (p, e / m)).collect();
    let mut g = from_exponents(&root);
    let mut signed = m;
    if g < Rational::one() {
        for e in root.values_mut() {
            *e = -*e;
        }
        g = from_exponents(&root);
        signed = -m;
    }
    Ok((g, signed))
}

/// Coprime `(p, q)` with `p > 0` and `r^p = s^q`, or `None` when `ln r` and
/// `ln s` are rationally independent.
pub fn multiplicative_relation(
    r: &Rational,
    s: &Rational,
) -> Result<Option<(i64, i64)>, GroupError> {
    let (gr, er) = primitive_power(r)?;
    let (gs, es) = primitive_power(s)?;
    if gr != gs {
        return Ok(None);
    }
    // r = g^er, s = g^es; r^p = s^q  ⇔  p·er = q·es
    let d = er.gcd(&es);
    let (mut p, mut q) = (es / d, er / d);
    if p < 0 {
        p = -p;
        q = -q;
    }
    Ok(Some((p, q)))
}

impl ClosedSubgroup {
    /// `(2π/(divisor·ln base))ℤ`, normalized to a primitive base.
    pub fn log_cyclic(base: &Rational, divisor: u64) -> Result<Self, GroupError> {
        if divisor == 0 {
            return Err(GroupError::ZeroDivisor);
        }
        if *base <= Rational::one() {
            return Err(GroupError::BaseNotAboveOne(base.clone()));
        }
        let (g, m) = primitive_power(base)?;
        Ok(ClosedSubgroup::LogCyclic {
            base: g,
            divisor: divisor * m as u64,
        })
    }

    /// Positive generator of the group; `None` for ℝ and {0}.
    pub fn generator(&self) -> Option<f64> {
        match self {
            ClosedSubgroup::LogCyclic { base, divisor } => {
                Some(2.0 * PI / (*divisor as f64 * ln(base)))
            }
            _ => None,
        }
    }

    /// Membership test for a real number, to relative tolerance `tol`.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        match self {
            ClosedSubgroup::Full => true,
            ClosedSubgroup::Trivial => t.abs() <= tol,
            ClosedSubgroup::LogCyclic { .. } => {
                let g = self.generator().unwrap();
                let m = t / g;
                (m - m.round()).abs() <= tol * m.abs().max(1.0)
            }
        }
    }

    pub fn symbolic(&self) -> String {
        match self {
            ClosedSubgroup::Full => "R".into(),
            ClosedSubgroup::Trivial => "{0}".into(),
            ClosedSubgroup::LogCyclic { base, divisor: 1 } => format!("(2π/ln {base})Z"),
            ClosedSubgroup::LogCyclic { base, divisor } => format!("(2π/({divisor}·ln {base}))Z"),
        }
    }
}

impl fmt::Display for ClosedSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbolic())
    }
}

impl Serialize for ClosedSubgroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            kind: &'a str,
            symbolic: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            base: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            divisor: Option<u64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            generator: Option<f64>,
        }
        let (kind, base, divisor) = match self {
            ClosedSubgroup::Full => ("full", None, None),
            ClosedSubgroup::Trivial => ("trivial", None, None),
            ClosedSubgroup::LogCyclic { base, divisor } => {
                ("log_cyclic", Some(base.to_string()), Some(*divisor))
            }
        };
        Repr {
            kind,
            symbolic: self.symbolic(),
            base,
            divisor,
            generator: self.generator(),
        }
        .serialize(s)
    }
}

fn ln(r: &Rational) -> f64 {
    let num = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
    num.ln() - den.ln()
}

/// Intersection of two canonical groups.
pub fn intersect(a: &ClosedSubgroup, b: &ClosedSubgroup) -> ClosedSubgroup {
    use ClosedSubgroup::*;
    match (a, b) {
        (Full, g) | (g, Full) => g.clone(),
        (Trivial, _) | (_, Trivial) => Trivial,
        (
            LogCyclic {
                base: g1,
                divisor: k1,
            },
            LogCyclic {
                base: g2,
                divisor: k2,
            },
        ) => {
            if g1 == g2 {
                LogCyclic {
                    base: g1.clone(),
                    divisor: k1.gcd(k2),
                }
            } else {
                Trivial
            }
        }
    }
}

/// Intersection of all `{t : r^{it} = 1}` over the given ratios `r > 1`.
pub fn group_of_ratios<'a>(
    ratios: impl IntoIterator<Item = &'a Rational>,
) -> Result<ClosedSubgroup, GroupError> {
    let mut acc = ClosedSubgroup::Full;
    for r in ratios {
        acc = intersect(&acc, &ClosedSubgroup::log_cyclic(r, 1)?);
    }
    Ok(acc)
}

/// `I(A, φ) = {t : σ_t = id}`. Since `σ_t = Ad h^{it}`, `σ_t` is trivial iff
/// `h^{it}` is central, i.e. scalar on each block; only ratios of weights in
/// the same block matter.
pub fn modular_invariant_group(algebra: &StateAlgebra) -> Result<ClosedSubgroup, GroupError> {
    algebra.validate()?;
    let AlgebraKind::MatrixBlocks(blocks) = &algebra.kind else {
        return Ok(ClosedSubgroup::Full);
    };
    let mut ratios = Vec::new();
    for b in blocks {
        for wi in &b.weights {
            for wj in &b.weights {
                if wi > wj {
                    ratios.push(wi / wj);
                }
            }
        }
    }
    group_of_ratios(&ratios)
}

/// What `T(M)` says about the type of a factor with separable predual.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TypeCandidates {
    /// `T = ℝ`: semifinite, type I or II.
    NotTypeIII,
    /// `T = {0}`: type III₁ or III₀.
    III1OrIII0,
    /// `T = (2π/−ln ν)ℤ`: type III_ν or III₀.
    IIILambdaOrIII0 {
        #[serde(serialize_with = "ser_display")]
        lambda: Rational,
    },
}

fn ser_display<S: serde::Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl fmt::Display for TypeCandidates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeCandidates::NotTypeIII => f.write_str("not type III (semifinite: type I or II)"),
            TypeCandidates::III1OrIII0 => f.write_str("type III_1 or III_0"),
            TypeCandidates::IIILambdaOrIII0 { lambda } => {
                write!(f, "type III_{{{lambda}}} or III_0")
            }
        }
    }
}

pub fn type_candidates(t: &ClosedSubgroup) -> TypeCandidates {
    match t {
        ClosedSubgroup::Full => TypeCandidates::NotTypeIII,
        ClosedSubgroup::Trivial => TypeCandidates::III1OrIII0,
        ClosedSubgroup::LogCyclic { base, divisor } => TypeCandidates::IIILambdaOrIII0 {
            lambda: pow(base, -(*divisor as i64)),
        },
    }
}

/// Float value of `ν` for reporting.
pub fn lambda_f64(t: &TypeCandidates) -> Option<f64> {
    match t {
        TypeCandidates::IIILambdaOrIII0 { lambda } => Some(to_f64(lambda)),
        _ => None,
    }
}
