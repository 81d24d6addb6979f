//! Small dense complex linear algebra: Hermitian eigenvalues, determinants,
//! unitarity checks.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Matrices up to this size are diagonalised by cyclic Jacobi, larger ones by
/// Householder tridiagonalisation followed by implicit QL.
pub const JACOBI_MAX_DIM: usize = 64;

const MAX_SWEEPS: usize = 100;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
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

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in orow.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise `|a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Largest entrywise deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if self.rows != self.cols {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: Complex64 = self
                    .row(i)
                    .iter()
                    .zip(self.row(j))
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((dot - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Determinant by LU decomposition with partial pivoting.
pub fn determinant(a: &CMatrix) -> Result<Complex64> {
    if a.rows != a.cols {
        return Err(invalid("determinant of a non-square matrix"));
    }
    let n = a.rows;
    let mut m = a.data.clone();
    let mut det = ONE;
    for k in 0..n {
        let mut piv = k;
        let mut best = m[k * n + k].norm();
        for i in k + 1..n {
            let v = m[i * n + k].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best == 0.0 {
            return Ok(ZERO);
        }
        if piv != k {
            for j in 0..n {
                m.swap(k * n + j, piv * n + j);
            }
            det = -det;
        }
        let p = m[k * n + k];
        det *= p;
        for i in k + 1..n {
            let f = m[i * n + k] / p;
            if f == ZERO {
                continue;
            }
            for j in k + 1..n {
                let v = m[k * n + j];
                m[i * n + j] -= f * v;
            }
        }
    }
    Ok(det)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// Only the Hermitian part is used; callers check hermiticity beforehand.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    if a.rows != a.cols {
        return Err(invalid("eigenvalues of a non-square matrix"));
    }
    let mut ev = if a.rows <= JACOBI_MAX_DIM {
        jacobi_eigenvalues(a)?
    } else {
        tridiagonal_eigenvalues(a)?
    };
    ev.sort_by(|x, y| y.total_cmp(x));
    Ok(ev)
}

/// Cyclic Jacobi with complex rotations. Stops once the off-diagonal
/// Frobenius norm drops below `1e-12 * max(1, ||A||_F)`.
pub fn jacobi_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.rows;
    let mut m = a.data.clone();
    let scale = a.frobenius_norm().max(1.0);
    let tol = 1e-12 * scale;
    let off = |m: &[Complex64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) >= tol {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NumericalFailure(format!(
                "Jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let mag = apq.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let e = apq / mag;
                let tau = (aqq - app) / (2.0 * mag);
                let t =
                    if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();
                // A <- A J
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = akp * c - akq * ec * s;
                    m[k * n + q] = akp * s + akq * ec * c;
                }
                // A <- J^dagger A
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = apk * c - aqk * e * s;
                    m[q * n + k] = apk * s + aqk * e * c;
                }
                m[p * n + q] = ZERO;
                m[q * n + p] = ZERO;
                m[p * n + p] = Complex64::new(app - t * mag, 0.0);
                m[q * n + q] = Complex64::new(aqq + t * mag, 0.0);
            }
        }
    }
    Ok((0..n).map(|i| m[i * n + i].re).collect())
}

/// Householder reduction to a real symmetric tridiagonal matrix, then
/// implicit QL with Wilkinson-style shifts.
pub fn tridiagonal_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.data.clone();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    let mut v = vec![ZERO; n];
    let mut p = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x0 = m[(k + 1) * n + k];
        let xnorm = (k + 1..n)
            .map(|i| m[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if xnorm == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -phase * xnorm;
        // v = x - alpha e1, normalised
        for i in 0..len {
            v[i] = m[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            off[k] = xnorm;
            continue;
        }
        for z in &mut v[..len] {
            *z /= vnorm;
        }
        // p = 2 A v on the trailing block
        for i in 0..len {
            let row = &m[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let s: Complex64 = row.iter().zip(&v[..len]).map(|(a, b)| a * b).sum();
            p[i] = s * 2.0;
        }
        let kk = v[..len]
            .iter()
            .zip(&p[..len])
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re;
        for i in 0..len {
            p[i] -= v[i] * kk;
        }
        // A <- A - v w^dagger - w v^dagger
        for i in 0..len {
            let vi = v[i];
            let wi = p[i];
            let row = &mut m[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for (j, a) in row.iter_mut().enumerate() {
                *a -= vi * p[j].conj() + wi * v[j].conj();
            }
        }
        off[k] = xnorm;
        for i in k + 1..n {
            m[i * n + k] = ZERO;
            m[k * n + i] = ZERO;
        }
    }
    for k in 0..n {
        diag[k] = m[k * n + k].re;
    }
    if n >= 2 {
        // the last sub-diagonal entry is never reflected
        off[n - 2] = m[(n - 1) * n + n - 2].norm();
    }
    // off[k] couples k and k+1; the QL routine wants e[i] coupling i and i+1
    tql_eigenvalues(&mut diag, &mut off)?;
    Ok(diag)
}

/// Implicit QL on a symmetric tridiagonal matrix. `e[i]` couples rows `i` and
/// `i + 1`; `e` is destroyed and `d` receives the eigenvalues.
fn tql_eigenvalues(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NumericalFailure(
                    "tridiagonal QL did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[mm] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = mm;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    Ok(())
}
