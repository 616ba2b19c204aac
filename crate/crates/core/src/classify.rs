//! Factoriality test for a free product of two algebras.
//!
//! The free product is certified to be a factor when each algebra has
//! dimension at least 2, the dimensions sum to at least 5, and
//! `ef(A₁)·ef(A₂) ≥ 1` with `0·(+∞) = 0`. In that case the T-invariant is the
//! intersection of the two modular invariant groups. A failed check only
//! means the test does not apply; it never certifies non-factoriality.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{out_of_range, AlgebraError, Dimension, StateAlgebra};
use crate::expansion::{ef_exact, ef_matrix_closed, ExpansionError, ExpansionFactor};
use crate::groups::{
    intersect, modular_invariant_group, type_candidates, ClosedSubgroup, GroupError, TypeCandidates,
};
use crate::rational::{int, q, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "reason", rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Inconclusive(String),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Certified => f.write_str("Certified factor"),
            Verdict::Inconclusive(reason) => write!(f, "Inconclusive: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorReport {
    pub labels: [String; 2],
    pub hypothesis_log: Vec<HypothesisCheck>,
    pub verdict: Verdict,
    /// Present only when certified.
    pub t_invariant: Option<ClosedSubgroup>,
    /// Present only when certified.
    pub type_candidates: Option<TypeCandidates>,
    pub ef_values: [ExpansionFactor; 2],
    pub invariant_groups: [ClosedSubgroup; 2],
}

impl FactorReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn dim_at_least(d: Dimension, n: usize) -> bool {
    match d {
        Dimension::Finite(k) => k >= n,
        Dimension::Infinite => true,
    }
}

fn dim_sum(a: Dimension, b: Dimension) -> Dimension {
    match (a, b) {
        (Dimension::Finite(x), Dimension::Finite(y)) => Dimension::Finite(x + y),
        _ => Dimension::Infinite,
    }
}

pub fn classify_pair(a1: &StateAlgebra, a2: &StateAlgebra) -> Result<FactorReport, ClassifyError> {
    a1.validate()?;
    a2.validate()?;
    let dims = [a1.linear_dimension(), a2.linear_dimension()];
    let ef_values = [ef_exact(a1)?, ef_exact(a2)?];
    let invariant_groups = [modular_invariant_group(a1)?, modular_invariant_group(a2)?];

    let mut log = Vec::new();
    let each_ok = dims.iter().all(|d| dim_at_least(*d, 2));
    log.push(HypothesisCheck {
        name: "dimension of each algebra at least 2".into(),
        passed: each_ok,
        detail: format!(
            "dim {} = {}, dim {} = {}",
            a1.label, dims[0], a2.label, dims[1]
        ),
    });
    let sum = dim_sum(dims[0], dims[1]);
    let sum_ok = dim_at_least(sum, 5);
    log.push(HypothesisCheck {
        name: "dimension sum at least 5".into(),
        passed: sum_ok,
        detail: format!("sum = {sum}"),
    });
    let ef_ok = ef_values[0].product_at_least_one(&ef_values[1]);
    let product = match ef_values[0].product_squared(&ef_values[1]) {
        Some(p) => p.to_string(),
        None => "inf".to_string(),
    };
    log.push(HypothesisCheck {
        name: "ef product at least 1".into(),
        passed: ef_ok,
        detail: format!(
            "ef^2 = {} and {}, product of squares = {product}",
            ef_values[0], ef_values[1]
        ),
    });

    let verdict = if !each_ok {
        let smallest = dims[0].min(dims[1]);
        Verdict::Inconclusive(format!(
            "dimension of each algebra must be at least 2 (smallest is {smallest})"
        ))
    } else if !sum_ok {
        Verdict::Inconclusive(format!("dimension sum {sum} < 5"))
    } else if !ef_ok {
        Verdict::Inconclusive(format!("ef product < 1 (product of squares = {product})"))
    } else {
        Verdict::Certified
    };
    let (t_invariant, candidates) = if verdict.is_certified() {
        let t = intersect(&invariant_groups[0], &invariant_groups[1]);
        let c = type_candidates(&t);
        (Some(t), Some(c))
    } else {
        (None, None)
    };
    Ok(FactorReport {
        labels: [a1.label.clone(), a2.label.clone()],
        hypothesis_log: log,
        verdict,
        t_invariant,
        type_candidates: candidates,
        ef_values,
        invariant_groups,
    })
}

fn check_region_parameter(name: &'static str, v: &Rational) -> Result<(), AlgebraError> {
    if *v < q(1, 2) || *v >= int(1) {
        return Err(out_of_range(name, v, "[1/2, 1)"));
    }
    Ok(())
}

/// `ef²` of `M₂` with density `diag(λ, 1−λ)`.
pub fn ef2_m2(lambda: &Rational) -> Result<Rational, ExpansionError> {
    match ef_matrix_closed(&[lambda.clone(), int(1) - lambda])? {
        ExpansionFactor::Finite(r) => Ok(r),
        ExpansionFactor::Infinite => unreachable!("finite-dimensional closed form"),
    }
}

/// Whether `ef(M₂, φ_λ)·ef(M₂, φ_μ) ≥ 1`, compared exactly on squares.
pub fn region_membership(lambda: &Rational, mu: &Rational) -> Result<bool, AlgebraError> {
    check_region_parameter("lambda", lambda)?;
    check_region_parameter("mu", mu)?;
    let a = ef2_m2(lambda).expect("weights in range");
    let b = ef2_m2(mu).expect("weights in range");
    Ok(a * b >= int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_phi_lambda, make_psi_lambda, make_trace, make_uniform};

    #[test]
    fn certified_trace_pair() {
        let r = classify_pair(&make_uniform(2).unwrap(), &make_trace(2).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Certified);
        assert_eq!(r.t_invariant, Some(ClosedSubgroup::Full));
        assert_eq!(r.type_candidates, Some(TypeCandidates::NotTypeIII));
        assert!(r.hypothesis_log.iter().all(|c| c.passed));
    }

    #[test]
    fn zero_ef_is_inconclusive() {
        let c2 = StateAlgebra::commutative("C2", vec![q(3, 5), q(2, 5)]);
        let r = classify_pair(&c2, &make_trace(2).unwrap()).unwrap();
        match &r.verdict {
            Verdict::Inconclusive(reason) => assert!(reason.contains("ef product < 1")),
            v => panic!("{v:?}"),
        }
        assert_eq!(r.t_invariant, None);
    }

    #[test]
    fn diffuse_with_psi() {
        let r = classify_pair(
            &StateAlgebra::diffuse_abelian("L"),
            &make_psi_lambda(&q(1, 2)).unwrap(),
        )
        .unwrap();
        assert!(r.verdict.is_certified());
        assert_eq!(
            r.t_invariant,
            Some(ClosedSubgroup::log_cyclic(&int(2), 1).unwrap())
        );
        assert_eq!(
            r.type_candidates,
            Some(TypeCandidates::IIILambdaOrIII0 { lambda: q(1, 2) })
        );
        assert_eq!(r.ef_values[0], ExpansionFactor::Infinite);
    }

    #[test]
    fn dimension_failures() {
        let c2 = make_uniform(2).unwrap();
        let r = classify_pair(&c2, &c2).unwrap();
        match &r.verdict {
            Verdict::Inconclusive(reason) => assert!(reason.contains("dimension")),
            v => panic!("{v:?}"),
        }
        let c1 = make_uniform(1).unwrap();
        let r = classify_pair(&c1, &make_trace(3).unwrap()).unwrap();
        assert!(matches!(&r.verdict, Verdict::Inconclusive(s) if s.contains("at least 2")));
    }

    #[test]
    fn two_small_ef_values() {
        let a = make_psi_lambda(&q(1, 2)).unwrap();
        let b = StateAlgebra::matrix("M2", vec![q(4, 5), q(1, 5)]);
        let r = classify_pair(&a, &b).unwrap();
        assert_eq!(r.ef_values[0], ExpansionFactor::Finite(q(26, 19)));
        assert_eq!(r.ef_values[1], ExpansionFactor::Finite(q(132, 293)));
        assert!(!r.verdict.is_certified());
    }

    #[test]
    fn phi_family_only_at_half() {
        let tau = make_trace(2).unwrap();
        let c2 = |l: Rational| StateAlgebra::commutative("C2", vec![l.clone(), int(1) - l]);
        assert!(classify_pair(&c2(q(1, 2)), &tau)
            .unwrap()
            .verdict
            .is_certified());
        for l in [q(3, 5), q(7, 10)] {
            assert!(!classify_pair(&c2(l), &tau).unwrap().verdict.is_certified());
        }
        // the matrix family with the same weights still passes against the trace
        assert!(classify_pair(&make_phi_lambda(&q(3, 5)).unwrap(), &tau)
            .unwrap()
            .verdict
            .is_certified());
    }

    #[test]
    fn region_examples() {
        assert!(region_membership(&q(1, 2), &q(1, 2)).unwrap());
        assert!(!region_membership(&q(3, 4), &q(3, 4)).unwrap());
        assert!(region_membership(&q(1, 2), &q(3, 4)).unwrap());
        assert!(matches!(
            region_membership(&q(2, 5), &q(1, 2)),
            Err(AlgebraError::ParameterOutOfRange { .. })
        ));
        assert!(region_membership(&q(1, 2), &int(1)).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = classify_pair(&make_uniform(2).unwrap(), &make_trace(2).unwrap()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["verdict"]["verdict"], "certified");
        assert_eq!(v["ef_values"][0], "1");
        assert_eq!(v["ef_values"][1], "3");
        assert_eq!(v["hypothesis_log"].as_array().unwrap().len(), 3);
    }
}
