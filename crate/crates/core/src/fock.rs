//! Free product of two GNS spaces, truncated at a maximal word length.
//!
//! Basis vectors are alternating words `ζ₁⊗…⊗ζₙ` with `ζⱼ` taken from an
//! orthogonal basis of `H∘_{ιⱼ}`; the empty word is `ξ`. Each `H∘_ι` basis is
//! obtained by exact Gram–Schmidt of the matrix-unit basis against `ξ`, so
//! every letter is an eigenvector of the component modular operator.
//! Coordinates are taken with respect to these orthogonal (not normalized)
//! words, and `metric` holds their squared norms.
//!
//! Operators drop components that would exceed the maximal length and report
//! the norm of what was dropped.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{AlgebraError, Element, StateAlgebra};
use crate::modular::{build_modular, ModularFlow};
use crate::rational::{to_f64, Rational};

pub const DEFAULT_MAX_LEN: usize = 4;
pub const DEFAULT_DIMENSION_CAP: usize = 200_000;
/// Leakage above which a computed moment is rejected.
pub const LEAKAGE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("truncated space would have dimension {dim}, above the cap {cap}")]
    TruncationTooLarge { dim: u128, cap: usize },
    #[error("maximal word length must be at least 1")]
    ZeroLength,
    #[error("result leaked {0:.3e} of norm past the truncation")]
    TruncationLeakage(f64),
    #[error("word of length {len} exceeds the truncation length {max}")]
    WordTooLong { len: usize, max: usize },
    #[error("component index {0} is not 0 or 1")]
    BadComponent(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub owner: u8,
    pub index: u32,
}

pub type FockWord = Vec<Letter>;
pub type FockVector = Vec<Complex64>;

/// `H_ι = ℂξ ⊕ H∘_ι` with an orthogonal basis whose first vector is `ξ`.
#[derive(Debug, Clone)]
pub struct ComponentSpace {
    pub algebra: StateAlgebra,
    pub flow: ModularFlow,
    /// Exact basis vectors in GNS coordinates; entry 0 is `ξ`.
    pub basis: Vec<Vec<Rational>>,
    pub norms2: Vec<Rational>,
    basis_f64: Vec<Vec<f64>>,
    norms2_f64: Vec<f64>,
    /// `ln` of the modular eigenvalue of each basis vector.
    pub log_delta: Vec<f64>,
}

impl ComponentSpace {
    pub fn new(algebra: &StateAlgebra) -> Result<Self, AlgebraError> {
        let flow = build_modular(algebra)?;
        let gns = &flow.gns;
        let mut basis: Vec<Vec<Rational>> = vec![gns.xi.clone()];
        let mut norms2 = vec![gns.inner(&gns.xi, &gns.xi)];
        for u in 0..gns.dim() {
            let mut w = gns.unit_vector(u);
            let src = w.clone();
            for (c, n) in basis.iter().zip(&norms2) {
                let coef = gns.inner(&src, c) / n;
                if coef.is_zero() {
                    continue;
                }
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= &coef * ci;
                }
            }
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            norms2.push(gns.inner(&w, &w));
            basis.push(w);
        }
        assert_eq!(basis.len(), gns.dim(), "Gram–Schmidt must produce a basis");

        let log_delta = basis
            .iter()
            .map(|w| {
                let mut ratios = w
                    .iter()
                    .zip(&flow.delta_ratios)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(_, r)| r);
                let first = ratios.next().expect("nonzero basis vector");
                assert!(
                    ratios.all(|r| r == first),
                    "letter is not a modular eigenvector"
                );
                to_f64(first).ln()
            })
            .collect();

        let basis_f64 = basis
            .iter()
            .map(|w| w.iter().map(to_f64).collect())
            .collect();
        let norms2_f64 = norms2.iter().map(to_f64).collect();
        Ok(Self {
            algebra: algebra.clone(),
            flow,
            basis,
            norms2,
            basis_f64,
            norms2_f64,
            log_delta,
        })
    }

    /// `dim H_ι`, including `ξ`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `dim H∘_ι`.
    pub fn letter_count(&self) -> usize {
        self.basis.len() - 1
    }

    /// Matrix of `π_ι(x)` in the orthogonal basis: entry `[c][b]` is the
    /// coefficient of basis vector `c` in `π(x)·b`.
    pub fn action_matrix(&self, x: &Element) -> Vec<Vec<Complex64>> {
        let gns = &self.flow.gns;
        let n = self.dim();
        let images: Vec<Vec<Complex64>> = self
            .basis_f64
            .iter()
            .map(|b| {
                // (π(x)y)ᵏ_pj = Σᵢ xᵏ_pi yᵏ_ij
                gns.basis
                    .iter()
                    .map(|u| {
                        let size = gns.blocks[u.block].size;
                        (0..size)
                            .map(|i| {
                                let src = gns.index(crate::algebra::MatrixUnit {
                                    block: u.block,
                                    row: i,
                                    col: u.col,
                                });
                                x.blocks[u.block][(u.row, i)] * b[src]
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let gns_norms: Vec<f64> = gns.norms2.iter().map(to_f64).collect();
        let mut m = vec![vec![Complex64::zero(); n]; n];
        for (b, img) in images.iter().enumerate() {
            for ((row, basis), n2) in m.iter_mut().zip(&self.basis_f64).zip(&self.norms2_f64) {
                let ip: Complex64 = img
                    .iter()
                    .zip(basis)
                    .zip(&gns_norms)
                    .map(|((y, w), nu)| y * (w * nu))
                    .sum();
                row[b] = ip / n2;
            }
        }
        m
    }
}

/// Result of applying an operator on the truncated space.
#[derive(Debug, Clone)]
pub struct Applied {
    pub vector: FockVector,
    /// Norm of the components dropped at the truncation boundary.
    pub leakage: f64,
}

#[derive(Debug, Clone)]
pub struct TruncatedFock {
    pub components: [ComponentSpace; 2],
    pub max_len: usize,
    pub words: Vec<FockWord>,
    index: HashMap<FockWord, usize>,
    /// Squared norm of each basis word.
    pub metric: Vec<f64>,
    log_phase: Vec<f64>,
}

/// `1 + Σ_{n=1..L} Σ_{alternating (ι₁…ιₙ)} Π d_{ιⱼ}` for two components.
pub fn fock_dimension(d1: u128, d2: u128, max_len: usize) -> u128 {
    let mut total = 1u128;
    for n in 1..=max_len as u32 {
        let (hi, lo) = (n.div_ceil(2), n / 2);
        total += d1.pow(hi) * d2.pow(lo) + d2.pow(hi) * d1.pow(lo);
    }
    total
}

pub fn build_fock(
    a1: &StateAlgebra,
    a2: &StateAlgebra,
    max_len: usize,
) -> Result<TruncatedFock, FockError> {
    build_fock_with_cap(a1, a2, max_len, DEFAULT_DIMENSION_CAP)
}

pub fn build_fock_with_cap(
    a1: &StateAlgebra,
    a2: &StateAlgebra,
    max_len: usize,
    cap: usize,
) -> Result<TruncatedFock, FockError> {
    if max_len == 0 {
        return Err(FockError::ZeroLength);
    }
    let components = [ComponentSpace::new(a1)?, ComponentSpace::new(a2)?];
    let letters = [components[0].letter_count(), components[1].letter_count()];
    let dim = fock_dimension(letters[0] as u128, letters[1] as u128, max_len);
    if dim > cap as u128 {
        return Err(FockError::TruncationTooLarge { dim, cap });
    }

    let mut words: Vec<FockWord> = vec![Vec::new()];
    let mut layer: Vec<FockWord> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for owner in 0..2u8 {
                if w.last().is_some_and(|l| l.owner == owner) {
                    continue;
                }
                for index in 0..letters[owner as usize] as u32 {
                    let mut nw = w.clone();
                    nw.push(Letter { owner, index });
                    next.push(nw);
                }
            }
        }
        words.extend(next.iter().cloned());
        layer = next;
    }
    debug_assert_eq!(words.len() as u128, dim);

    let index = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let metric = words.iter().map(|w| word_metric(&components, w)).collect();
    let log_phase = words
        .iter()
        .map(|w| {
            w.iter()
                .map(|l| components[l.owner as usize].log_delta[l.index as usize + 1])
                .sum()
        })
        .collect();
    Ok(TruncatedFock {
        components,
        max_len,
        words,
        index,
        metric,
        log_phase,
    })
}

fn word_metric(components: &[ComponentSpace; 2], w: &[Letter]) -> f64 {
    w.iter()
        .map(|l| components[l.owner as usize].norms2_f64[l.index as usize + 1])
        .product()
}

impl TruncatedFock {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn index_of(&self, w: &[Letter]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn zero(&self) -> FockVector {
        vec![Complex64::zero(); self.dim()]
    }

    pub fn xi(&self) -> FockVector {
        let mut v = self.zero();
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn inner(&self, v: &[Complex64], w: &[Complex64]) -> Complex64 {
        v.iter()
            .zip(w)
            .zip(&self.metric)
            .map(|((a, b), m)| a * b.conj() * m)
            .sum()
    }

    pub fn norm(&self, v: &[Complex64]) -> f64 {
        self.inner(v, v).re.max(0.0).sqrt()
    }

    pub fn sub(&self, v: &[Complex64], w: &[Complex64]) -> FockVector {
        v.iter().zip(w).map(|(a, b)| a - b).collect()
    }

    fn check_component(&self, iota: usize) -> Result<(), FockError> {
        if iota > 1 {
            return Err(FockError::BadComponent(iota));
        }
        Ok(())
    }

    /// `λ_ι(x) v`: `π_ι(x)` acts on the leading `H_ι` factor of each word,
    /// where a word that does not start in `H∘_ι` is read as `ξ ⊗ word`.
    pub fn left_action(
        &self,
        iota: usize,
        x: &Element,
        v: &[Complex64],
    ) -> Result<Applied, FockError> {
        self.check_component(iota)?;
        let comp = &self.components[iota];
        let m = comp.action_matrix(x);
        let owner = iota as u8;
        let mut out = self.zero();
        let mut leaked: HashMap<FockWord, Complex64> = HashMap::new();
        for (wi, alpha) in v.iter().enumerate() {
            if alpha.is_zero() {
                continue;
            }
            let word = &self.words[wi];
            let (b, tail): (usize, &[Letter]) = match word.first() {
                Some(l) if l.owner == owner => (l.index as usize + 1, &word[1..]),
                _ => (0, &word[..]),
            };
            for (c, row) in m.iter().enumerate() {
                let coef = alpha * row[b];
                if coef.is_zero() {
                    continue;
                }
                let mut target = Vec::with_capacity(tail.len() + 1);
                if c > 0 {
                    target.push(Letter {
                        owner,
                        index: (c - 1) as u32,
                    });
                }
                target.extend_from_slice(tail);
                match self.index.get(&target) {
                    Some(&ti) => out[ti] += coef,
                    None => *leaked.entry(target).or_insert_with(Complex64::zero) += coef,
                }
            }
        }
        let leakage = leaked
            .iter()
            .map(|(w, c)| c.norm_sqr() * word_metric(&self.components, w))
            .sum::<f64>()
            .sqrt();
        Ok(Applied {
            vector: out,
            leakage,
        })
    }

    /// `Δ^{it}` acting letterwise by the component modular phases.
    pub fn delta_action(&self, t: f64, v: &[Complex64]) -> FockVector {
        v.iter()
            .zip(&self.log_phase)
            .map(|(a, lp)| a * Complex64::from_polar(1.0, t * lp))
            .collect()
    }

    /// `‖Δ^{it} λ_ι(x) Δ^{−it} ξ − λ_ι(σ^ι_t(x)) ξ‖`, where `σ^ι` is the
    /// modular group of the component. Only length ≤ 1 vectors occur, so the
    /// truncation is exact here.
    pub fn vacuum_modular_residual(
        &self,
        iota: usize,
        x: &Element,
        t: f64,
    ) -> Result<f64, FockError> {
        self.operator_residual(iota, x, t, &self.xi())
    }

    /// Same comparison applied to an arbitrary vector `v`; meaningful when no
    /// component of `v` sits at the maximal length.
    pub fn operator_residual(
        &self,
        iota: usize,
        x: &Element,
        t: f64,
        v: &[Complex64],
    ) -> Result<f64, FockError> {
        self.check_component(iota)?;
        let conj = self.left_action(iota, x, &self.delta_action(-t, v))?;
        let lhs = self.delta_action(t, &conj.vector);
        let sx = self.components[iota].flow.sigma(t, x);
        let rhs = self.left_action(iota, &sx, v)?;
        Ok(self.norm(&self.sub(&lhs, &rhs.vector)))
    }

    /// `φ(a₁⋯a_m) = ⟨λ(a₁)⋯λ(a_m)ξ, ξ⟩`.
    pub fn free_moment(&self, word: &[(usize, Element)]) -> Result<Complex64, FockError> {
        if word.len() > self.max_len {
            return Err(FockError::WordTooLong {
                len: word.len(),
                max: self.max_len,
            });
        }
        let mut v = self.xi();
        let mut leakage = 0.0;
        for (iota, a) in word.iter().rev() {
            let applied = self.left_action(*iota, a, &v)?;
            leakage += applied.leakage;
            v = applied.vector;
        }
        if leakage > LEAKAGE_TOL {
            return Err(FockError::TruncationLeakage(leakage));
        }
        Ok(self.inner(&v, &self.xi()))
    }

    /// Largest word length carrying a nonzero coefficient of `v`.
    pub fn support_length(&self, v: &[Complex64]) -> usize {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| self.words[i].len())
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_trace, make_uniform, MatrixUnit};
    use crate::rational::q;

    fn brute_dimension(d: [u128; 2], max_len: usize) -> u128 {
        // enumerate owner sequences directly
        let mut total = 1;
        let mut seqs: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &seqs {
                for o in 0..2 {
                    if s.last() != Some(&o) {
                        let mut n = s.clone();
                        n.push(o);
                        total += n.iter().map(|&o| d[o]).product::<u128>();
                        next.push(n);
                    }
                }
            }
            seqs = next;
        }
        total
    }

    #[test]
    fn dimension_formula_examples() {
        let c2 = make_uniform(2).unwrap();
        assert_eq!(build_fock(&c2, &c2, 3).unwrap().dim(), 7);
        assert_eq!(build_fock(&c2, &c2, 1).unwrap().dim(), 3);
        let f = build_fock(&make_trace(2).unwrap(), &c2, 2).unwrap();
        assert_eq!(f.dim(), 11);
        for d1 in 0..4 {
            for d2 in 0..4 {
                for l in 1..5 {
                    assert_eq!(fock_dimension(d1, d2, l), brute_dimension([d1, d2], l));
                }
            }
        }
    }

    #[test]
    fn size_cap_and_zero_length() {
        let m3 = make_trace(3).unwrap();
        assert!(matches!(
            build_fock_with_cap(&m3, &m3, 4, 1000),
            Err(FockError::TruncationTooLarge { .. })
        ));
        assert_eq!(build_fock(&m3, &m3, 0).unwrap_err(), FockError::ZeroLength);
        assert!(matches!(
            build_fock(&StateAlgebra::diffuse_abelian("L"), &m3, 2),
            Err(FockError::Algebra(AlgebraError::DiffuseUnsupported(_)))
        ));
    }

    #[test]
    fn left_action_on_xi_is_gns_vector() {
        let m2 = StateAlgebra::matrix("M2", vec![q(2, 3), q(1, 3)]);
        let f = build_fock(&m2, &make_uniform(2).unwrap(), 3).unwrap();
        let shape = m2.blocks().unwrap();
        let e12 = Element::unit(
            shape,
            MatrixUnit {
                block: 0,
                row: 0,
                col: 1,
            },
        );
        let out = f.left_action(0, &e12, &f.xi()).unwrap();
        assert_eq!(out.leakage, 0.0);
        // x̂ = ê₁₂ has norm² 1/3 and is orthogonal to ξ
        assert!(out.vector[0].norm() < 1e-15);
        assert!((f.norm(&out.vector).powi(2) - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(f.support_length(&out.vector), 1);
    }

    #[test]
    fn unit_acts_trivially() {
        let m2 = make_trace(2).unwrap();
        let c2 = make_uniform(2).unwrap();
        let f = build_fock(&m2, &c2, 3).unwrap();
        let v: FockVector = (0..f.dim())
            .map(|i| Complex64::new(i as f64, 1.0))
            .collect();
        for iota in 0..2 {
            let one = Element::identity(f.components[iota].algebra.blocks().unwrap());
            let out = f.left_action(iota, &one, &v).unwrap();
            assert_eq!(out.leakage, 0.0);
            assert!(f.norm(&f.sub(&out.vector, &v)) < 1e-12);
        }
    }

    #[test]
    fn single_letter_phase() {
        let m2 = StateAlgebra::matrix("M2", vec![q(2, 3), q(1, 3)]);
        let f = build_fock(&m2, &make_uniform(2).unwrap(), 2).unwrap();
        let shape = m2.blocks().unwrap();
        let e12 = Element::unit(
            shape,
            MatrixUnit {
                block: 0,
                row: 0,
                col: 1,
            },
        );
        let v = f.left_action(0, &e12, &f.xi()).unwrap().vector;
        let t = 0.37;
        let dv = f.delta_action(t, &v);
        let expected = Complex64::from_polar(1.0, t * 2f64.ln());
        for (a, b) in dv.iter().zip(&v) {
            assert!((a - b * expected).norm() < 1e-14);
        }
        assert_eq!(f.delta_action(5.0, &f.xi()), f.xi());
    }

    #[test]
    fn bad_component_and_long_word() {
        let c2 = make_uniform(2).unwrap();
        let f = build_fock(&c2, &c2, 1).unwrap();
        let one = Element::identity(c2.blocks().unwrap());
        assert_eq!(
            f.left_action(2, &one, &f.xi()).unwrap_err(),
            FockError::BadComponent(2)
        );
        let word = vec![(0, one.clone()), (1, one)];
        assert!(matches!(
            f.free_moment(&word),
            Err(FockError::WordTooLong { .. })
        ));
    }

    fn random_centered(shape: &[crate::algebra::MatrixBlock], seed: u64) -> Element {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut x = Element::zeros(shape);
        for b in x.blocks.iter_mut() {
            for z in b.iter_mut() {
                *z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        x.centered(shape)
    }

    #[test]
    fn freeness_of_centered_words() {
        let a1 = StateAlgebra::matrix("M2", vec![q(2, 3), q(1, 3)]);
        let a2 = StateAlgebra::commutative("C3", vec![q(1, 2), q(1, 3), q(1, 6)]);
        let f = build_fock(&a1, &a2, 4).unwrap();
        let a = random_centered(a1.blocks().unwrap(), 1);
        let b = random_centered(a2.blocks().unwrap(), 2);
        let ab = f.free_moment(&[(0, a.clone()), (1, b.clone())]).unwrap();
        let abab = f
            .free_moment(&[
                (0, a.clone()),
                (1, b.clone()),
                (0, a.clone()),
                (1, b.clone()),
            ])
            .unwrap();
        assert!(ab.norm() < 1e-12, "{ab}");
        assert!(abab.norm() < 1e-12, "{abab}");
        // φ(a a*) is the component state
        let aa = f.free_moment(&[(0, a.clone()), (0, a.adjoint())]).unwrap();
        let direct = a.mul(&a.adjoint()).state(a1.blocks().unwrap());
        assert!((aa - direct).norm() < 1e-12);
        let abba = f
            .free_moment(&[
                (0, a.clone()),
                (1, b.clone()),
                (1, b.adjoint()),
                (0, a.adjoint()),
            ])
            .unwrap();
        let expect = direct * b.mul(&b.adjoint()).state(a2.blocks().unwrap());
        assert!((abba - expect).norm() < 1e-12);
    }

    #[test]
    fn leakage_is_reported() {
        let a1 = make_trace(2).unwrap();
        let f = build_fock(&a1, &make_uniform(2).unwrap(), 1).unwrap();
        let shape = a1.blocks().unwrap();
        let a = random_centered(shape, 4);
        let v = f.left_action(0, &a, &f.xi()).unwrap().vector;
        let out = f
            .left_action(
                1,
                &random_centered(make_uniform(2).unwrap().blocks().unwrap(), 5),
                &v,
            )
            .unwrap();
        assert!(out.leakage > 1e-3);
    }

    #[test]
    fn conjugation_by_delta_matches_sigma() {
        let a1 = StateAlgebra::matrix("M2", vec![q(3, 4), q(1, 4)]);
        let a2 = StateAlgebra::matrix("M2b", vec![q(2, 3), q(1, 3)]);
        let f = build_fock(&a1, &a2, 3).unwrap();
        for (iota, alg) in [(0, &a1), (1, &a2)] {
            let x = random_centered(alg.blocks().unwrap(), 9 + iota as u64);
            for t in [0.4, -1.3, 7.0] {
                assert!(f.vacuum_modular_residual(iota, &x, t).unwrap() <= 1e-9);
            }
            // on every vector of length below the cap
            let v: FockVector = f
                .words
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    if w.len() < 3 {
                        Complex64::new(1.0 + i as f64, 0.5)
                    } else {
                        Complex64::zero()
                    }
                })
                .collect();
            assert!(f.operator_residual(iota, &x, 0.9, &v).unwrap() <= 1e-9);
        }
    }
}
