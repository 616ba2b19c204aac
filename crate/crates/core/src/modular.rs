//! Modular operator and modular automorphism group of a finite-dimensional
//! algebra with a diagonal faithful state.
//!
//! `Δ` is built twice: as `S*S` from the Tomita conjugation `x̂ ↦ (x*)^`
//! (realified, since `S` is antilinear), and as the diagonal operator with
//! eigenvalue `λᵏᵢ/λᵏⱼ` on `êᵏᵢⱼ`. `σ_t` is conjugation by `h^{it}`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, MatrixBlock, MatrixUnit, StateAlgebra};
use crate::gns::{build_gns, GnsSpace};
use crate::groups::ClosedSubgroup;
use crate::rational::{to_f64, Rational};

/// Tolerance for "σ_t is the identity".
pub const IDENTITY_TOL: f64 = 1e-9;
/// Minimum displacement that counts as "σ_t moves something".
pub const MOVE_TOL: f64 = 1e-2;

#[derive(Debug, Clone)]
pub struct ModularFlow {
    pub blocks: Vec<MatrixBlock>,
    pub gns: GnsSpace,
    /// Exact eigenvalue of `Δ` on each GNS basis vector.
    pub delta_ratios: Vec<Rational>,
    log_ratios: Vec<f64>,
    log_weights: Vec<Vec<f64>>,
    /// Realified `S` in orthonormal coordinates `(Re, Im)` per basis vector.
    pub conjugation: DMatrix<f64>,
    /// `S*S`.
    pub delta_tomita: DMatrix<f64>,
    /// Realified diagonal ratio operator.
    pub delta_diag: DMatrix<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("witness failure at t = {t}: {unit} {detail}")]
pub struct WitnessFailure {
    pub t: f64,
    pub unit: MatrixUnit,
    pub detail: String,
}

fn to_orthonormal(gns: &GnsSpace, x: &Element) -> Vec<Complex64> {
    gns.basis
        .iter()
        .zip(&gns.norms2)
        .map(|(u, n)| x.blocks[u.block][(u.row, u.col)] * to_f64(n).sqrt())
        .collect()
}

fn from_orthonormal(gns: &GnsSpace, c: &[Complex64]) -> Element {
    let mut x = Element::zeros(&gns.blocks);
    for ((u, n), z) in gns.basis.iter().zip(&gns.norms2).zip(c) {
        x.blocks[u.block][(u.row, u.col)] = z / to_f64(n).sqrt();
    }
    x
}

pub fn build_modular(algebra: &StateAlgebra) -> Result<ModularFlow, AlgebraError> {
    let gns = build_gns(algebra)?;
    let blocks = gns.blocks.clone();
    let d = gns.dim();

    let delta_ratios: Vec<Rational> = gns
        .basis
        .iter()
        .map(|u| &blocks[u.block].weights[u.row] / &blocks[u.block].weights[u.col])
        .collect();
    let log_ratios = delta_ratios.iter().map(|r| to_f64(r).ln()).collect();
    let log_weights = blocks
        .iter()
        .map(|b| b.weights.iter().map(|w| to_f64(w).ln()).collect())
        .collect();

    let mut conjugation = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for col in 0..2 * d {
        let mut c = vec![Complex64::new(0.0, 0.0); d];
        c[col / 2] = if col % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 1.0)
        };
        let image = to_orthonormal(&gns, &from_orthonormal(&gns, &c).adjoint());
        for (u, z) in image.iter().enumerate() {
            conjugation[(2 * u, col)] = z.re;
            conjugation[(2 * u + 1, col)] = z.im;
        }
    }
    let delta_tomita = conjugation.transpose() * &conjugation;
    let mut delta_diag = DMatrix::<f64>::zeros(2 * d, 2 * d);
    for (u, r) in delta_ratios.iter().enumerate() {
        let r = to_f64(r);
        delta_diag[(2 * u, 2 * u)] = r;
        delta_diag[(2 * u + 1, 2 * u + 1)] = r;
    }

    Ok(ModularFlow {
        blocks,
        gns,
        delta_ratios,
        log_ratios,
        log_weights,
        conjugation,
        delta_tomita,
        delta_diag,
    })
}

impl ModularFlow {
    /// Largest entry of `|S*S − Δ_diag|`.
    pub fn delta_discrepancy(&self) -> f64 {
        (&self.delta_tomita - &self.delta_diag).amax()
    }

    /// Exact application of `Δ` to GNS coordinates.
    pub fn apply_delta(&self, v: &[Rational]) -> Vec<Rational> {
        v.iter()
            .zip(&self.delta_ratios)
            .map(|(a, r)| a * r)
            .collect()
    }

    /// Eigenvalue of `Δ^{it}` on the basis vector `u`.
    pub fn delta_it_phase(&self, u: usize, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, t * self.log_ratios[u])
    }

    /// `h^{it}` as an algebra element.
    pub fn density_power(&self, t: f64) -> Element {
        Element {
            blocks: self
                .log_weights
                .iter()
                .map(|lw| {
                    DMatrix::from_fn(lw.len(), lw.len(), |i, j| {
                        if i == j {
                            Complex64::from_polar(1.0, t * lw[i])
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                })
                .collect(),
        }
    }

    /// `σ_t(x) = h^{it} x h^{−it}`.
    pub fn sigma(&self, t: f64, x: &Element) -> Element {
        self.density_power(t).mul(x).mul(&self.density_power(-t))
    }

    /// Largest displacement `‖σ_t(e_u) − e_u‖` over matrix units, with the
    /// unit attaining it.
    pub fn max_unit_displacement(&self, t: f64) -> (f64, MatrixUnit) {
        self.gns
            .basis
            .iter()
            .map(|&u| {
                let e = Element::unit(&self.blocks, u);
                (self.sigma(t, &e).max_abs_diff(&e), u)
            })
            .fold((0.0, self.gns.basis[0]), |best, cur| {
                if cur.0 > best.0 {
                    cur
                } else {
                    best
                }
            })
    }
}

/// Checks a claimed `I(A, φ)` against the flow.
///
/// For `(2π/(k ln g))ℤ` with generator `τ`: `σ_τ` must fix every matrix unit
/// and `σ_{τ/2}`, `σ_{τ/3}` must each move one. For ℝ, ten random times must
/// act trivially; for {0}, ten random nonzero times must not.
pub fn witness_check(
    flow: &ModularFlow,
    group: &ClosedSubgroup,
    seed: u64,
) -> Result<(), WitnessFailure> {
    let expect_identity = |t: f64| {
        let (disp, unit) = flow.max_unit_displacement(t);
        if disp > IDENTITY_TOL {
            Err(WitnessFailure {
                t,
                unit,
                detail: format!("moved by {disp:.3e}, expected identity"),
            })
        } else {
            Ok(())
        }
    };
    let expect_motion = |t: f64| {
        let (disp, unit) = flow.max_unit_displacement(t);
        if disp < MOVE_TOL {
            Err(WitnessFailure {
                t,
                unit,
                detail: format!(
                    "largest displacement {disp:.3e}, expected a non-identity automorphism"
                ),
            })
        } else {
            Ok(())
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match group {
        ClosedSubgroup::LogCyclic { .. } => {
            let tau = group.generator().expect("log-cyclic group has a generator");
            expect_identity(tau)?;
            for frac in [2.0, 3.0] {
                let t = tau / frac;
                if !group.contains(t, 1e-12) {
                    expect_motion(t)?;
                }
            }
        }
        ClosedSubgroup::Full => {
            for _ in 0..10 {
                expect_identity(rng.random_range(-50.0..50.0))?;
            }
        }
        ClosedSubgroup::Trivial => {
            for _ in 0..10 {
                let t: f64 = rng.random_range(0.5..20.0);
                let t = if rng.random_bool(0.5) { t } else { -t };
                expect_motion(t)?;
            }
        }
    }
    Ok(())
}

/// `2π/ln r` for a ratio `r > 1`, the period of `r^{it}`.
pub fn ratio_period(r: f64) -> f64 {
    2.0 * PI / r.ln()
}
