//! Exact linear algebra over ℤ and ℚ for the small matrices that occur in
//! polytope and lattice computations.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn int_to_rat(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Result of [`column_echelon`]: `reduced = rows · transform` is in column
/// echelon form and `inverse = transform⁻¹` (both unimodular).
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    pub reduced: IntMatrix,
    pub transform: IntMatrix,
    pub inverse: IntMatrix,
    /// Pivot column introduced by each row, `None` if the row lies in the
    /// ℚ-span of the rows before it.
    pub pivots: Vec<Option<usize>>,
    pub rank: usize,
}

struct ColumnOps<'a> {
    a: &'a mut IntMatrix,
    w: &'a mut IntMatrix,
    winv: &'a mut IntMatrix,
}

impl ColumnOps<'_> {
    fn swap(&mut self, p: usize, q: usize) {
        if p == q {
            return;
        }
        for row in self.a.iter_mut().chain(self.w.iter_mut()) {
            row.swap(p, q);
        }
        self.winv.swap(p, q);
    }

    /// col_k -= q · col_p
    fn axpy(&mut self, k: usize, p: usize, q: i64) {
        if q == 0 {
            return;
        }
        for row in self.a.iter_mut().chain(self.w.iter_mut()) {
            row[k] -= q * row[p];
        }
        // W ← W E with E = I - q e_p e_kᵀ, so W⁻¹ ← E⁻¹ W⁻¹: row_p += q row_k
        let rk = self.winv[k].clone();
        for (x, y) in self.winv[p].iter_mut().zip(rk) {
            *x += q * y;
        }
    }

    fn negate(&mut self, p: usize) {
        for row in self.a.iter_mut().chain(self.w.iter_mut()) {
            row[p] = -row[p];
        }
        for x in self.winv[p].iter_mut() {
            *x = -*x;
        }
    }
}

/// Column-style Hermite normal form of the row list, processed in order.
///
/// Row `i` of `reduced` is supported on the first `rank_i` columns, where
/// `rank_i` is the rank of rows `0..=i`; pivots are positive and the entries
/// to their left are reduced modulo the pivot. Consequently
/// `rows[i] = Σ_k reduced[i][k] · inverse[k]` with integer coefficients, and
/// the first `rank_i` rows of `inverse` span the saturation of the lattice
/// generated by rows `0..=i`.
pub fn column_echelon(rows: &[Vec<i64>], n: usize) -> ColumnEchelon {
    let mut a: IntMatrix = rows.to_vec();
    let mut w = identity(n);
    let mut winv = identity(n);
    let mut pivots = Vec::with_capacity(rows.len());
    let mut rank = 0usize;
    {
        let mut ops = ColumnOps { a: &mut a, w: &mut w, winv: &mut winv };
        for i in 0..rows.len() {
            if rank == n {
                pivots.push(None);
                continue;
            }
            loop {
                let nz: Vec<usize> = (rank..n).filter(|&c| ops.a[i][c] != 0).collect();
                if nz.len() <= 1 {
                    if let Some(&c) = nz.first() {
                        ops.swap(rank, c);
                    }
                    break;
                }
                let p = *nz.iter().min_by_key(|&&c| ops.a[i][c].abs()).unwrap();
                ops.swap(rank, p);
                for c in rank + 1..n {
                    if ops.a[i][c] != 0 {
                        let q = ops.a[i][c].div_euclid(ops.a[i][rank]);
                        ops.axpy(c, rank, q);
                    }
                }
            }
            if ops.a[i][rank] == 0 {
                pivots.push(None);
                continue;
            }
            if ops.a[i][rank] < 0 {
                ops.negate(rank);
            }
            let piv = ops.a[i][rank];
            for c in 0..rank {
                let q = ops.a[i][c].div_euclid(piv);
                ops.axpy(c, rank, q);
            }
            pivots.push(Some(rank));
            rank += 1;
        }
    }
    ColumnEchelon { reduced: a, transform: w, inverse: winv, pivots, rank }
}

/// Diagonalization `u · m · v = diag(s)` with `u`, `v` unimodular (the
/// divisibility chain of the Smith form is not enforced). `s` has
/// `min(rows, cols)` entries, some possibly zero.
pub fn diagonalize(m: &[Vec<i64>]) -> (IntMatrix, Vec<i64>, IntMatrix) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a: IntMatrix = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let piv = a[t][t];
            let mut clean = true;
            for i in t + 1..rows {
                let q = a[i][t].div_euclid(piv);
                if q != 0 {
                    for j in 0..cols {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..cols {
                let q = a[t][j].div_euclid(piv);
                if q != 0 {
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                }
                clean &= a[t][j] == 0;
            }
            if clean {
                break;
            }
        }
    }
    let s = (0..rows.min(cols)).map(|i| a[i][i]).collect();
    (u, s, v)
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IntMatrix {
    let k = b.len();
    let cols = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| (0..k).map(|t| row[t] * b[t][j]).sum()).collect())
        .collect()
}

/// Rank of a rational matrix.
pub fn rank(m: &[Vec<Rational>]) -> usize {
    row_reduce(m.to_vec()).1.len()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn row_reduce(mut a: RatMatrix) -> (RatMatrix, Vec<usize>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let d = &f * &a[r][j];
                    a[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Solution set `{x : A x = b}` as a particular solution plus a basis of the
/// null space, or `None` if inconsistent.
pub fn affine_solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let n = if a.is_empty() { 0 } else { a[0].len() };
    let aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (red, pivots) = row_reduce(aug);
    if pivots.contains(&n) {
        return None;
    }
    let mut x0 = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x0[c] = red[r][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); n];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -red[r][f].clone();
            }
            v
        })
        .collect();
    Some((x0, basis))
}

/// Unique solution of a square system, `None` when singular.
pub fn solve_unique(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    match affine_solve(a, b) {
        Some((x, basis)) if basis.is_empty() => Some(x),
        _ => None,
    }
}

pub fn dot_int_rat(v: &[i64], u: &[Rational]) -> Rational {
    v.iter().zip(u).map(|(&a, b)| b * Rational::from_integer(a.into())).sum()
}

pub fn is_unimodular(m: &[Vec<i64>]) -> bool {
    det(m).abs() == 1
}
