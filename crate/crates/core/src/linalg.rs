//! Exact linear algebra over the rationals: sparse row reduction, nullspaces,
//! particular solutions and a symmetric-pivoted LDLᵀ used as a PSD test.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::rational::{height, Rational};

pub type SparseRow = BTreeMap<usize, Rational>;

/// Reduced row echelon form of a sparse system.
#[derive(Debug, Clone)]
pub struct Rref {
    pub ncols: usize,
    pub rows: Vec<SparseRow>,
    /// `(pivot column, row index)` in increasing column order.
    pub pivots: Vec<(usize, usize)>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let pivot_cols: BTreeSet<usize> = self.pivots.iter().map(|&(c, _)| c).collect();
        (0..self.ncols)
            .filter(|c| !pivot_cols.contains(c))
            .collect()
    }

    /// One basis vector per free column: coefficient 1 on the free column,
    /// pivots solved for, other free columns 0.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        self.free_columns()
            .into_iter()
            .map(|free| {
                let mut v = vec![Rational::zero(); self.ncols];
                v[free] = Rational::from_integer(1.into());
                for &(pc, r) in &self.pivots {
                    if let Some(c) = self.rows[r].get(&free) {
                        v[pc] = -c.clone();
                    }
                }
                v
            })
            .collect()
    }
}

fn axpy_row(
    target: &mut SparseRow,
    target_idx: usize,
    factor: &Rational,
    source: &SparseRow,
    col_rows: &mut [BTreeSet<usize>],
) {
    for (&c, v) in source {
        let updated = target.get(&c).cloned().unwrap_or_else(Rational::zero) - factor * v;
        if updated.is_zero() {
            target.remove(&c);
            col_rows[c].remove(&target_idx);
        } else {
            target.insert(c, updated);
            col_rows[c].insert(target_idx);
        }
    }
}

/// Gauss–Jordan elimination on sparse rows. Columns are processed left to
/// right; the pivot among candidate rows is the one whose entry has the
/// smallest `|num·den|`, ties going to the lowest row index.
pub fn rref(rows: Vec<SparseRow>, ncols: usize) -> Rref {
    let mut rows: Vec<SparseRow> = rows
        .into_iter()
        .map(|r| {
            r.into_iter()
                .filter(|(_, v)| !v.is_zero())
                .collect::<SparseRow>()
        })
        .filter(|r| !r.is_empty())
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    for (i, r) in rows.iter().enumerate() {
        for &c in r.keys() {
            assert!(c < ncols, "column {c} out of range");
            col_rows[c].insert(i);
        }
    }
    let mut used = vec![false; rows.len()];
    let mut pivots = Vec::new();

    for col in 0..ncols {
        let pivot = col_rows[col]
            .iter()
            .copied()
            .filter(|&r| !used[r])
            .min_by(|&a, &b| {
                height(&rows[a][&col])
                    .cmp(&height(&rows[b][&col]))
                    .then(a.cmp(&b))
            });
        let Some(p) = pivot else { continue };

        let inv = rows[p][&col].recip();
        for v in rows[p].values_mut() {
            *v *= &inv;
        }
        let pivot_row = rows[p].clone();
        let others: Vec<usize> = col_rows[col].iter().copied().filter(|&r| r != p).collect();
        for r in others {
            let factor = rows[r][&col].clone();
            let mut target = std::mem::take(&mut rows[r]);
            axpy_row(&mut target, r, &factor, &pivot_row, &mut col_rows);
            rows[r] = target;
        }
        used[p] = true;
        pivots.push((col, p));
    }

    Rref {
        ncols,
        rows,
        pivots,
    }
}

pub fn dense_to_sparse(m: &[Vec<Rational>]) -> Vec<SparseRow> {
    m.iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (c, v.clone()))
                .collect()
        })
        .collect()
}

/// Basis of `{x : M x = 0}` for a dense `rows × ncols` matrix.
pub fn nullspace(m: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    rref(dense_to_sparse(m), ncols).nullspace()
}

/// Some solution of `M x = b`, or `None` if the system is inconsistent.
/// Free variables are set to zero.
pub fn solve(m: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    assert_eq!(m.len(), b.len());
    let ncols = m.first().map_or(0, Vec::len);
    let mut rows = dense_to_sparse(m);
    for (row, rhs) in rows.iter_mut().zip(b) {
        if !rhs.is_zero() {
            row.insert(ncols, rhs.clone());
        }
    }
    let reduced = rref(rows, ncols + 1);
    if reduced.pivots.iter().any(|&(c, _)| c == ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for &(c, r) in &reduced.pivots {
        if let Some(v) = reduced.rows[r].get(&ncols) {
            x[c] = v.clone();
        }
    }
    Some(x)
}

pub fn mat_vec(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter().map(|row| crate::rational::dot(row, v)).collect()
}

/// Quadratic form `vᵀ M v`.
pub fn quadratic_form(m: &[Vec<Rational>], v: &[Rational]) -> Rational {
    crate::rational::dot(v, &mat_vec(m, v))
}

/// Pivots of a symmetric-pivoted LDLᵀ factorization, or `None` if the matrix
/// is not positive semidefinite. At each step the lowest-index strictly
/// positive diagonal entry is eliminated; once none remain the trailing block
/// must vanish identically.
pub fn ldlt_pivots(m: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);

    while !remaining.is_empty() {
        if remaining.iter().any(|&i| a[i][i].is_negative()) {
            return None;
        }
        let Some(pos) = remaining.iter().position(|&i| a[i][i].is_positive()) else {
            let trailing_zero = remaining
                .iter()
                .all(|&i| remaining.iter().all(|&j| a[i][j].is_zero()));
            if !trailing_zero {
                return None;
            }
            pivots.extend(remaining.iter().map(|_| Rational::zero()));
            break;
        };
        let p = remaining.remove(pos);
        let d = a[p][p].clone();
        for &j in &remaining {
            if a[j][p].is_zero() {
                continue;
            }
            let f = &a[j][p] / &d;
            for &k in &remaining {
                let delta = &f * &a[p][k];
                a[j][k] -= delta;
            }
        }
        pivots.push(d);
    }
    Some(pivots)
}

pub fn is_psd(m: &[Vec<Rational>]) -> bool {
    ldlt_pivots(m).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, q};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn nullspace_of_rank_one() {
        let m = mat(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mat_vec(&m, v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let m = mat(&[&[2, 1], &[1, 3]]);
        assert!(nullspace(&m, 2).is_empty());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = mat(&[&[1, 1], &[1, -1]]);
        let x = solve(&m, &[int(3), int(1)]).unwrap();
        assert_eq!(x, vec![int(2), int(1)]);

        let singular = mat(&[&[1, 1], &[2, 2]]);
        assert!(solve(&singular, &[int(1), int(3)]).is_none());
        let x = solve(&singular, &[int(1), int(2)]).unwrap();
        assert_eq!(mat_vec(&singular, &x), vec![int(1), int(2)]);
    }

    #[test]
    fn ldlt_detects_definiteness() {
        assert!(is_psd(&mat(&[&[2, -1], &[-1, 2]])));
        assert!(is_psd(&mat(&[&[1, 1], &[1, 1]])));
        assert!(!is_psd(&mat(&[&[1, 2], &[2, 1]])));
        assert!(!is_psd(&mat(&[&[0, 1], &[1, 0]])));
        let p = ldlt_pivots(&[vec![q(1, 2), q(1, 4)], vec![q(1, 4), q(1, 8)]]).unwrap();
        assert_eq!(p, vec![q(1, 2), int(0)]);
    }

    #[test]
    fn pivot_prefers_small_entries() {
        // column 0 has entries 7 and 1; the row with 1 must be chosen
        let rows = dense_to_sparse(&mat(&[&[7, 1], &[1, 0]]));
        let r = rref(rows, 2);
        assert_eq!(r.pivots[0], (0, 1));
    }
}
