//! Dense integer matrices and the Smith normal form.

use std::fmt;

use num_integer::Integer;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    /// Matrix with the given vectors as columns, all of length `dim`.
    pub fn from_cols(dim: usize, cols: &[Vec<i64>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column has wrong length");
            for (i, &x) in col.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Vec<i64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == 0))
    }

    /// Determinant by fraction-free elimination; square matrices only.
    pub fn det(&self) -> i64 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| self[(i, j)] as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, p);
                sign = -sign;
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

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: i64) {
        for j in 0..self.cols {
            let v = self[(src, j)];
            self[(dst, j)] += q * v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: i64) {
        for i in 0..self.rows {
            let v = self[(i, src)];
            self[(i, dst)] += q * v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)];
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

/// `u * m * v == s` with `u`, `v` unimodular and `s` diagonal, its diagonal
/// forming a divisibility chain of non-negative entries.
#[derive(Debug, Clone)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    /// Diagonal entries `d_1 | d_2 | ...` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&d| d != 0).count()
    }

    /// The abelian group presented by `m` (rows are relations on the columns):
    /// torsion invariant factors (entries > 1) and free rank.
    pub fn cokernel(&self) -> (Vec<i64>, usize) {
        let diag = self.diagonal();
        let torsion = diag.iter().copied().filter(|&d| d > 1).collect();
        let free = self.s.cols - self.rank();
        (torsion, free)
    }

    /// Saturated basis of `{x : m x = 0}` as columns.
    pub fn kernel_basis(&self) -> Vec<Vec<i64>> {
        (self.rank()..self.v.cols).map(|j| self.v.col(j)).collect()
    }

    /// An integer solution of `m x = b`, if one exists.
    pub fn solve(&self, b: &[i64]) -> Option<Vec<i64>> {
        let ub = self.u.mul_vec(b);
        let mut y = vec![0i64; self.v.cols];
        for (i, &c) in ub.iter().enumerate() {
            let d = if i < self.s.cols { self.s[(i, i)] } else { 0 };
            if d == 0 {
                if c != 0 {
                    return None;
                }
            } else {
                if c % d != 0 {
                    return None;
                }
                y[i] = c / d;
            }
        }
        Some(self.v.mul_vec(&y))
    }
}

/// Smith normal form with smallest-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = a[(i, j)];
                    if x != 0 && pivot.is_none_or(|(pi, pj)| x.abs() < a[(pi, pj)].abs()) {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return Smith { s: a, u, v, v_inv };
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = a[(t, t)];
            let mut clean = true;
            for i in t + 1..r {
                let q = a[(i, t)] / p;
                if q != 0 {
                    a.add_row(i, t, -q);
                    u.add_row(i, t, -q);
                }
                clean &= a[(i, t)] == 0;
            }
            for j in t + 1..c {
                let q = a[(t, j)] / p;
                if q != 0 {
                    a.add_col(j, t, -q);
                    v.add_col(j, t, -q);
                    v_inv.add_row(t, j, q);
                }
                clean &= a[(t, j)] == 0;
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| a[(i, j)] % p != 0));
            match offender {
                Some(i) => {
                    a.add_row(t, i, 1);
                    u.add_row(t, i, 1);
                }
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    Smith { s: a, u, v, v_inv }
}

/// Primitive part of an integer vector: divide by the gcd of its entries.
pub fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g == 0 {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / g).collect()
    }
}

/// Flip sign so the first nonzero entry is positive.
pub fn normalize_sign(v: &mut [i64]) {
    if let Some(&first) = v.iter().find(|&&x| x != 0) {
        if first < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Integer coefficients `c` with `sum c_i * values_i == gcd(values)`.
pub fn bezout(values: &[i64]) -> (i64, Vec<i64>) {
    let mut g = 0i64;
    let mut coeffs = vec![0i64; values.len()];
    for (i, &x) in values.iter().enumerate() {
        let ext = g.extended_gcd(&x);
        // ext.gcd = ext.x * g + ext.y * x
        for c in coeffs.iter_mut().take(i) {
            *c *= ext.x;
        }
        coeffs[i] = ext.y;
        g = ext.gcd;
    }
    if g < 0 {
        g = -g;
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    (g, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Smith {
        let snf = smith_normal_form(m);
        assert_eq!(snf.u.mul(m).mul(&snf.v), snf.s, "U M V != S for {m:?}");
        assert!(snf.s.is_diagonal());
        assert_eq!(snf.u.det().abs(), 1);
        assert_eq!(snf.v.det().abs(), 1);
        assert_eq!(snf.v.mul(&snf.v_inv), IntMatrix::identity(m.cols()));
        let d = snf.diagonal();
        for w in d.windows(2) {
            if w[0] != 0 {
                assert_eq!(w[1] % w[0], 0, "divisibility chain broken: {d:?}");
            } else {
                assert_eq!(w[1], 0);
            }
        }
        snf
    }

    #[test]
    fn diag_2_3_normalizes_to_1_6() {
        let snf = check(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(snf.diagonal(), vec![1, 6]);
    }

    #[test]
    fn zero_and_unit_matrices() {
        let snf = check(&IntMatrix::zeros(2, 3));
        assert_eq!(snf.diagonal(), vec![0, 0]);
        let snf = check(&IntMatrix::from_rows(&[vec![1]]));
        assert_eq!(snf.diagonal(), vec![1]);
    }

    #[test]
    fn kernel_and_solve() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 6], vec![1, 1, 1]]);
        let snf = check(&m);
        let ker = snf.kernel_basis();
        assert_eq!(ker.len(), 1);
        assert_eq!(m.mul_vec(&ker[0]), vec![0, 0]);
        let x = snf.solve(&[4, 1]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![4, 1]);
        assert!(snf.solve(&[1, 0]).is_none());
    }

    #[test]
    fn bezout_combination() {
        let (g, c) = bezout(&[6, 10, 15]);
        assert_eq!(g, 1);
        assert_eq!(dot(&c, &[6, 10, 15]), 1);
        let (g, c) = bezout(&[0, -4]);
        assert_eq!(g, 4);
        assert_eq!(dot(&c, &[0, -4]), 4);
    }

    proptest::proptest! {
        #[test]
        fn snf_factorization_holds(entries in proptest::collection::vec(-9i64..10, 12)) {
            let m = IntMatrix::from_rows(&[
                entries[0..4].to_vec(),
                entries[4..8].to_vec(),
                entries[8..12].to_vec(),
            ]);
            check(&m);
        }
    }
}
