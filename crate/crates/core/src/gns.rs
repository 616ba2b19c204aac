//! GNS space `L²(A, φ)` in the orthogonal matrix-unit basis, and the exact
//! left–right equivariant subspace of `H ⊗ H`.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use num_traits::{One, Zero};

use crate::algebra::{matrix_units, AlgebraError, MatrixBlock, MatrixUnit, StateAlgebra};
use crate::linalg::{self, SparseRow};
use crate::rational::{dot, Rational};

/// Label of the GNS basis vector `êᵏᵢⱼ`.
pub type GnsIndex = MatrixUnit;

#[derive(Debug, Clone)]
pub struct GnsSpace {
    pub blocks: Vec<MatrixBlock>,
    pub basis: Vec<GnsIndex>,
    /// `‖êᵏᵢⱼ‖² = λᵏⱼ`.
    pub norms2: Vec<Rational>,
    /// Coordinates of `ξ = 1̂`.
    pub xi: Vec<Rational>,
    offsets: Vec<usize>,
}

pub fn build_gns(algebra: &StateAlgebra) -> Result<GnsSpace, AlgebraError> {
    algebra.validate()?;
    let blocks = algebra.blocks()?.to_vec();
    let basis = matrix_units(&blocks);
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for b in &blocks {
        offsets.push(acc);
        acc += b.size * b.size;
    }
    let norms2 = basis
        .iter()
        .map(|u| blocks[u.block].weights[u.col].clone())
        .collect();
    let xi = basis
        .iter()
        .map(|u| {
            if u.row == u.col {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    Ok(GnsSpace {
        blocks,
        basis,
        norms2,
        xi,
        offsets,
    })
}

impl GnsSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self, u: MatrixUnit) -> usize {
        self.offsets[u.block] + u.row * self.blocks[u.block].size + u.col
    }

    /// `π(a) ê_u` for a matrix unit `a`: `π(eᵏ_pq) êᵏ_ij = [q = i] êᵏ_pj`.
    pub fn left(&self, a: MatrixUnit, u: usize) -> Option<usize> {
        let b = self.basis[u];
        (b.block == a.block && b.row == a.col).then(|| {
            self.index(MatrixUnit {
                block: b.block,
                row: a.row,
                col: b.col,
            })
        })
    }

    /// `ρ(a) ê_u`: `ρ(eᵏ_pq) êᵏ_ij = [j = p] êᵏ_iq`.
    pub fn right(&self, a: MatrixUnit, u: usize) -> Option<usize> {
        let b = self.basis[u];
        (b.block == a.block && b.col == a.row).then(|| {
            self.index(MatrixUnit {
                block: b.block,
                row: b.row,
                col: a.col,
            })
        })
    }

    pub fn inner(&self, x: &[Rational], y: &[Rational]) -> Rational {
        x.iter()
            .zip(y)
            .zip(&self.norms2)
            .fold(Rational::zero(), |acc, ((a, b), n)| acc + a * b * n)
    }

    /// `⟨ê_u, ξ⟩`.
    pub fn xi_overlap(&self, u: usize) -> Rational {
        &self.xi[u] * &self.norms2[u]
    }

    /// `P_ξ v = ⟨v, ξ⟩ ξ` (‖ξ‖ = 1).
    pub fn project_xi(&self, v: &[Rational]) -> Vec<Rational> {
        let c = self.inner(v, &self.xi);
        self.xi.iter().map(|x| x * &c).collect()
    }

    pub fn unit_vector(&self, u: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[u] = Rational::one();
        v
    }

    pub fn units(&self) -> &[MatrixUnit] {
        &self.basis
    }
}

/// Exact basis of the left–right equivariant subspace of `H ⊗ H`. Vectors are
/// coefficient arrays over `ê_u ⊗ ê_v`, flattened as `u·D + v`.
#[derive(Debug, Clone)]
pub struct EquivariantBasis {
    pub dim_h: usize,
    pub vectors: Vec<Vec<Rational>>,
    /// `a_m = ⟨b_m, ξ⊗ξ⟩`.
    pub pairing: Vec<Rational>,
    /// `G_mn = ⟨(P∘⊗P∘) b_m, (P∘⊗P∘) b_n⟩`.
    pub corner_gram: Vec<Vec<Rational>>,
}

/// The intertwining equations `(π(a)⊗1)X = (1⊗ρ(a))X` for every matrix unit
/// `a`. Each equation compares one coordinate of both sides.
fn intertwining_rows(gns: &GnsSpace) -> Vec<SparseRow> {
    let d = gns.dim();
    let mut left_pre: HashMap<(MatrixUnit, usize), usize> = HashMap::new();
    let mut right_pre: HashMap<(MatrixUnit, usize), usize> = HashMap::new();
    let units = gns.units().to_vec();
    for &a in &units {
        for u in 0..d {
            if let Some(img) = gns.left(a, u) {
                left_pre.insert((a, img), u);
            }
            if let Some(img) = gns.right(a, u) {
                right_pre.insert((a, img), u);
            }
        }
    }
    let one = Rational::one();
    let mut rows = Vec::new();
    for &a in &units {
        for u_out in 0..d {
            for v_out in 0..d {
                let mut row = SparseRow::new();
                if let Some(&u) = left_pre.get(&(a, u_out)) {
                    row.insert(u * d + v_out, one.clone());
                }
                if let Some(&v) = right_pre.get(&(a, v_out)) {
                    let key = u_out * d + v;
                    let entry = row.entry(key).or_insert_with(Rational::zero);
                    *entry -= &one;
                }
                row.retain(|_, c| !c.is_zero());
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    rows
}

// The intertwining system has 0/±1 coefficients that depend on the block
// sizes only, so its nullspace is shared by every state on the same algebra.
type Nullspace = Arc<Vec<Vec<Rational>>>;

static NULLSPACE_CACHE: LazyLock<Mutex<HashMap<Vec<usize>, Nullspace>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn equivariant_nullspace(gns: &GnsSpace) -> Nullspace {
    let key: Vec<usize> = gns.blocks.iter().map(|b| b.size).collect();
    if let Some(hit) = NULLSPACE_CACHE.lock().unwrap().get(&key) {
        return Arc::clone(hit);
    }
    let d = gns.dim();
    let ns = Arc::new(linalg::rref(intertwining_rows(gns), d * d).nullspace());
    NULLSPACE_CACHE
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&ns));
    ns
}

/// Checks `(π(a)⊗1)X = (1⊗ρ(a))X` for every matrix unit, exactly.
pub fn is_equivariant(gns: &GnsSpace, x: &[Rational]) -> bool {
    let d = gns.dim();
    assert_eq!(x.len(), d * d);
    gns.units().iter().all(|&a| {
        let mut lhs = vec![Rational::zero(); d * d];
        let mut rhs = vec![Rational::zero(); d * d];
        for u in 0..d {
            for v in 0..d {
                let c = &x[u * d + v];
                if c.is_zero() {
                    continue;
                }
                if let Some(lu) = gns.left(a, u) {
                    lhs[lu * d + v] += c;
                }
                if let Some(rv) = gns.right(a, v) {
                    rhs[u * d + rv] += c;
                }
            }
        }
        lhs == rhs
    })
}

/// Inner product on `H ⊗ H`.
pub fn tensor_inner(gns: &GnsSpace, x: &[Rational], y: &[Rational]) -> Rational {
    let d = gns.dim();
    let mut acc = Rational::zero();
    for u in 0..d {
        for v in 0..d {
            let (a, b) = (&x[u * d + v], &y[u * d + v]);
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc += a * b * &gns.norms2[u] * &gns.norms2[v];
        }
    }
    acc
}

/// `⟨X, ξ⊗ξ⟩`.
pub fn xi_pairing(gns: &GnsSpace, x: &[Rational]) -> Rational {
    let d = gns.dim();
    let s: Vec<Rational> = (0..d).map(|u| gns.xi_overlap(u)).collect();
    let mut acc = Rational::zero();
    for u in 0..d {
        if s[u].is_zero() {
            continue;
        }
        for v in 0..d {
            if !s[v].is_zero() && !x[u * d + v].is_zero() {
                acc += &x[u * d + v] * &s[u] * &s[v];
            }
        }
    }
    acc
}

/// `(P∘ ⊗ P∘) X = X − (P_ξ⊗1)X − (1⊗P_ξ)X + (P_ξ⊗P_ξ)X`.
pub fn corner_projection(gns: &GnsSpace, x: &[Rational]) -> Vec<Rational> {
    let d = gns.dim();
    let s: Vec<Rational> = (0..d).map(|u| gns.xi_overlap(u)).collect();
    // (P_ξ⊗1)X = Σ_v col[v] ξ⊗ê_v,  (1⊗P_ξ)X = Σ_u row[u] ê_u⊗ξ
    let mut col = vec![Rational::zero(); d];
    let mut row = vec![Rational::zero(); d];
    for u in 0..d {
        for v in 0..d {
            let c = &x[u * d + v];
            if c.is_zero() {
                continue;
            }
            if !s[u].is_zero() {
                col[v] += c * &s[u];
            }
            if !s[v].is_zero() {
                row[u] += c * &s[v];
            }
        }
    }
    let total = dot(&row, &s);
    let xi = &gns.xi;
    let mut out = x.to_vec();
    for u in 0..d {
        for v in 0..d {
            let mut delta = Rational::zero();
            if !xi[u].is_zero() {
                delta -= &xi[u] * &col[v];
            }
            if !xi[v].is_zero() {
                delta -= &row[u] * &xi[v];
                if !xi[u].is_zero() {
                    delta += &total * &xi[u] * &xi[v];
                }
            }
            out[u * d + v] += delta;
        }
    }
    out
}

pub fn equivariant_basis(gns: &GnsSpace) -> EquivariantBasis {
    let vectors: Vec<Vec<Rational>> = equivariant_nullspace(gns).as_ref().clone();
    let pairing = vectors.iter().map(|b| xi_pairing(gns, b)).collect();
    let corners: Vec<Vec<Rational>> = vectors.iter().map(|b| corner_projection(gns, b)).collect();
    let m = corners.len();
    let mut corner_gram = vec![vec![Rational::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let g = tensor_inner(gns, &corners[i], &corners[j]);
            corner_gram[j][i] = g.clone();
            corner_gram[i][j] = g;
        }
    }
    EquivariantBasis {
        dim_h: gns.dim(),
        vectors,
        pairing,
        corner_gram,
    }
}
