//! Dense complex linear algebra for the small matrices that appear in
//! few-qudit problems: Kronecker products, a cyclic Jacobi Hermitian
//! eigensolver, one-sided Jacobi SVD and Gram-Schmidt QR.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        check_size(rows)?;
        check_size(cols)?;
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix must be nonempty".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&d| Complex64::new(d, 0.0)).collect();
        Self::from_diag(&diag)
    }

    /// Builds a matrix from real row slices; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[Complex64], v: &[Complex64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, &ui) in u.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                m.data[i * v.len() + j] = ui * vj.conj();
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

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex64]) {
        for (i, &z) in col.iter().enumerate() {
            self.data[i * self.cols + j] = z;
        }
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |m - m†|` over all entries; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest modulus of any entry off the main diagonal.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    worst = worst.max(self.data[i * self.cols + j].norm());
                }
            }
        }
        worst
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > tol::MAX_DIM {
        Err(Error::Size(n))
    } else {
        Ok(())
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    check_size(rows)?;
    check_size(cols)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two vectors.
pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Eigenvalues in descending order, with matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }

    /// Rebuilds `Σ_k f(e_k) v_k v_k†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &e) in self.values.iter().enumerate() {
            let w = f(e);
            if w == 0.0 {
                continue;
            }
            let v = self.vector(k);
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `m[p][q]` with a
/// diagonal unitary and then applies the real symmetric Jacobi rotation.
/// Pivots that are already zero are never touched, so matrices that are
/// block diagonal in the computational basis keep their block structure.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigensystem needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let herm_err = m.hermiticity_error();
    if herm_err > tol::HERMITIAN {
        return Err(Error::NotHermitian(herm_err));
    }
    let n = m.rows;
    // Symmetrize so round-off in the input cannot accumulate.
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);

    let mut converged = n == 1;
    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let off: f64 = off_diagonal_norm(&a);
        if off < tol::JACOBI_OFF_DIAGONAL * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, g);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) >= tol::JACOBI_OFF_DIAGONAL * scale {
        return Err(Error::NoConvergence(tol::JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    Ok(Eigensystem { values, vectors })
}

/// Eigenvalues only, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    hermitian_eigensystem(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: Complex64, g: f64) {
    let n = a.rows;
    let phase = apq / g; // e^{iφ}
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // W restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let wpp = Complex64::new(c, 0.0);
    let wpq = Complex64::new(s, 0.0);
    let wqp = -phase.conj() * s;
    let wqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * wpp + akq * wqp;
        a[(k, q)] = akp * wpq + akq * wqq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * wpp + vkq * wqp;
        v[(k, q)] = vkp * wpq + vkq * wqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = wpp.conj() * apk + wqp.conj() * aqk;
        a[(q, k)] = wpq.conj() * apk + wqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

/// Thin singular value decomposition `m = left · diag(s) · right_adjoint`.
///
/// `left` is `rows × k`, `right_adjoint` is `k × cols`, `k = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub left: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub right_adjoint: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.left.clone();
        for i in 0..scaled.rows {
            for (j, &s) in self.singular_values.iter().enumerate() {
                scaled[(i, j)] *= s;
            }
        }
        scaled.matmul(&self.right_adjoint)
    }
}

/// One-sided (Hestenes) Jacobi SVD.
///
/// Column pairs that are already orthogonal are left alone, so when the
/// input has structure in the computational basis the returned singular
/// vectors inherit it.
pub fn svd(m: &ComplexMatrix) -> Svd {
    if m.rows >= m.cols {
        let (u, s, v) = hestenes(m);
        Svd {
            left: u,
            singular_values: s,
            right_adjoint: v.adjoint(),
        }
    } else {
        // m† = u s v†  =>  m = v s u†
        let (u, s, v) = hestenes(&m.adjoint());
        Svd {
            left: v,
            singular_values: s,
            right_adjoint: u.adjoint(),
        }
    }
}

/// Requires rows >= cols. Returns (u: rows×cols, s, v: cols×cols).
fn hestenes(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let rows = m.rows;
    let cols = m.cols;
    // Work column-major for cache-friendly column updates.
    let mut a: Vec<Vec<Complex64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> = (0..cols)
        .map(|j| {
            let mut e = vec![ZERO; cols];
            e[j] = ONE;
            e
        })
        .collect();

    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha: f64 = a[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = a[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = a[p].iter().zip(&a[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= 1e-15 * (alpha * beta).sqrt() || g <= f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                // Make the Gram entry real by rephasing column q.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for col in [&mut a, &mut v] {
                    let (left, right) = col.split_at_mut(q);
                    let cp = &mut left[p];
                    let cq = &mut right[0];
                    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                        let yq = *y * phase;
                        let xp = *x;
                        *x = xp * c - yq * s;
                        *y = xp * s + yq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = a
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let largest = norms.iter().cloned().fold(0.0, f64::max);
    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    let mut s = Vec::with_capacity(cols);
    let mut v_out = ComplexMatrix::zeros(cols, cols);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        s.push(sigma);
        v_out.set_column(dst, &v[src]);
        if sigma > largest * 1e-13 && sigma > 0.0 {
            u_cols.push(a[src].iter().map(|z| z / sigma).collect());
        } else {
            u_cols.push(Vec::new());
        }
    }
    // Complete left vectors belonging to (numerically) zero singular values.
    for j in 0..cols {
        if u_cols[j].is_empty() {
            u_cols[j] = orthonormal_complement(&u_cols, rows);
        }
    }
    let mut u = ComplexMatrix::zeros(rows, cols);
    for (j, c) in u_cols.iter().enumerate() {
        u.set_column(j, c);
    }
    (u, s, v_out)
}

/// A unit vector orthogonal to every nonempty vector in `basis`.
fn orthonormal_complement(basis: &[Vec<Complex64>], dim: usize) -> Vec<Complex64> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for k in 0..dim {
        let mut e = vec![ZERO; dim];
        e[k] = ONE;
        for _ in 0..2 {
            for b in basis.iter().filter(|b| !b.is_empty()) {
                let overlap: Complex64 = b.iter().zip(&e).map(|(x, y)| x.conj() * y).sum();
                for (ei, bi) in e.iter_mut().zip(b) {
                    *ei -= overlap * bi;
                }
            }
        }
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(n, _)| norm > *n) {
            best = Some((norm, e));
        }
        if norm > 0.5 {
            break;
        }
    }
    let (norm, e) = best.expect("dim > 0");
    e.into_iter().map(|z| z / norm).collect()
}

/// QR factorization by modified Gram-Schmidt with one reorthogonalization
/// pass. `R` has a real, positive diagonal by construction.
pub fn qr(g: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !g.is_square() {
        return Err(Error::Shape("QR expects a square matrix".into()));
    }
    let n = g.rows;
    let scale = g.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut q_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut w = g.column(j);
        for _ in 0..2 {
            for (i, qi) in q_cols.iter().enumerate() {
                let proj: Complex64 = qi.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                r[(i, j)] += proj;
                for (wk, qk) in w.iter_mut().zip(qi) {
                    *wk -= proj * qk;
                }
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= tol::RANK_DEFICIENT * scale {
            return Err(Error::RankDeficient);
        }
        r[(j, j)] = Complex64::new(norm, 0.0);
        q_cols.push(w.into_iter().map(|z| z / norm).collect());
    }
    let mut q = ComplexMatrix::zeros(n, n);
    for (j, c) in q_cols.iter().enumerate() {
        q.set_column(j, c);
    }
    Ok((q, r))
}

/// Unitary `Q·Λ` from the QR factorization of `g`, where `Λ` rotates each
/// column so the matching diagonal entry of `R` is real positive. Applied to
/// a Ginibre matrix this yields a Haar-distributed unitary.
pub fn unitary_from_qr(g: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (mut q, r) = qr(g)?;
    for j in 0..q.cols {
        let d = r[(j, j)];
        let phase = d / d.norm();
        for i in 0..q.rows {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// `exp(iH)` for Hermitian `h`, via its eigensystem.
pub fn exp_i_hermitian(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(h)?;
    let n = h.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &e) in eig.values.iter().enumerate() {
        let w = Complex64::from_polar(1.0, e);
        let v = eig.vector(k);
        for i in 0..n {
            let vi = v[i] * w;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    Ok(out)
}
