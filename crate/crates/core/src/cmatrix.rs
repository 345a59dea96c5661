//! Dense complex matrices.
//!
//! [`CMat`] wraps a `nalgebra` dense matrix of `Complex64` and adds the
//! pieces the symbol calculus needs on top of LU and Schur: a checked
//! inverse, 2x2 block assembly, and the branch-controlled
//! `det(a)^{-1/2}` used by every Gaussian integral in the crate.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Tolerances for the checked linear-algebra entry points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinalgTolerances {
    /// Upper bound on the 1-norm condition estimate accepted by `inverse`.
    pub max_condition: f64,
    /// Relative symmetry tolerance, `|a - a^t| <= tol * max(1, |a|)`.
    pub symmetry: f64,
    /// Relative Hermiticity tolerance.
    pub hermitian: f64,
    /// Right-half-plane margin, `Re(lambda) > rhp_margin * |a|`.
    pub rhp_margin: f64,
    /// Minimum accepted eigenvalue of the Hermitian part.
    pub pd_epsilon: f64,
}

impl Default for LinalgTolerances {
    fn default() -> Self {
        LinalgTolerances {
            max_condition: 1e14,
            symmetry: 1e-10,
            hermitian: 1e-10,
            rhp_margin: 1e-12,
            pd_epsilon: 0.0,
        }
    }
}

#[derive(Clone, PartialEq)]
pub struct CMat(DMatrix<C64>);

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        CMat(DMatrix::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        CMat(DMatrix::from_fn(rows, cols, f))
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let n = d.len();
        CMat::from_fn(n, n, |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(dim_err("from_row_major", rows * cols, entries.len()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(CMat(DMatrix::from_row_slice(rows, cols, entries)))
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self[(i, j)]);
            }
        }
        out
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        CMat(m)
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        CMat(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        CMat(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat(&self.0 * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(a + a^t) / 2`.
    pub fn symmetrized(&self) -> Self {
        CMat((&self.0 + self.0.transpose()) * re(0.5))
    }

    /// `(a + a^*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        CMat((&self.0 + self.0.adjoint()) * re(0.5))
    }

    pub fn try_mul(&self, other: &CMat) -> Result<CMat> {
        if self.cols() != other.rows() {
            return Err(dim_err(
                "multiply",
                format!("{} rows", self.cols()),
                format!("{} rows", other.rows()),
            ));
        }
        Ok(CMat(&self.0 * &other.0))
    }

    pub fn try_add(&self, other: &CMat) -> Result<CMat> {
        self.same_shape("add", other)?;
        Ok(CMat(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &CMat) -> Result<CMat> {
        self.same_shape("sub", other)?;
        Ok(CMat(&self.0 - &other.0))
    }

    fn same_shape(&self, op: &'static str, other: &CMat) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(dim_err(
                op,
                format!("{}x{}", self.rows(), self.cols()),
                format!("{}x{}", other.rows(), other.cols()),
            ));
        }
        Ok(())
    }

    fn require_square(&self, op: &'static str) -> Result<()> {
        if !self.is_square() {
            return Err(dim_err(op, "square matrix", format!("{}x{}", self.rows(), self.cols())));
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols() {
            return Err(dim_err("mul_vec", self.cols(), v.len()));
        }
        Ok((0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// Bilinear form `u^t a v` (no conjugation).
    pub fn bilinear(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        if u.len() != self.rows() {
            return Err(dim_err("bilinear", self.rows(), u.len()));
        }
        let av = self.mul_vec(v)?;
        Ok(dot(u, &av))
    }

    pub fn determinant(&self) -> Result<C64> {
        self.require_square("determinant")?;
        if self.rows() == 0 {
            return Ok(re(1.0));
        }
        Ok(self.0.clone().lu().determinant())
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.inverse_with(&LinalgTolerances::default())
    }

    /// LU inverse, refused when the 1-norm condition estimate exceeds
    /// `tol.max_condition`.
    pub fn inverse_with(&self, tol: &LinalgTolerances) -> Result<CMat> {
        self.require_square("inverse")?;
        let inv = self.0.clone().lu().try_inverse().ok_or_else(|| Error::Singular {
            op: "inverse",
            detail: "zero pivot".into(),
        })?;
        let out = CMat(inv);
        if !out.is_finite() {
            return Err(Error::Singular {
                op: "inverse",
                detail: "non-finite inverse".into(),
            });
        }
        let cond = self.norm1() * out.norm1();
        if !(cond <= tol.max_condition) {
            return Err(Error::Singular {
                op: "inverse",
                detail: format!("condition estimate {cond:.3e}"),
            });
        }
        Ok(out)
    }

    pub fn norm1(&self) -> f64 {
        (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Assembles `(a b; c d)`.
    pub fn block_compose(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Result<CMat> {
        if a.rows() != b.rows() || c.rows() != d.rows() || a.cols() != c.cols() || b.cols() != d.cols()
        {
            return Err(dim_err(
                "block_compose",
                "compatible blocks",
                format!(
                    "{}x{}, {}x{}, {}x{}, {}x{}",
                    a.rows(),
                    a.cols(),
                    b.rows(),
                    b.cols(),
                    c.rows(),
                    c.cols(),
                    d.rows(),
                    d.cols()
                ),
            ));
        }
        let (r1, c1) = (a.rows(), a.cols());
        Ok(CMat::from_fn(r1 + c.rows(), c1 + b.cols(), |i, j| match (i < r1, j < c1) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - c1)],
            (false, true) => c[(i - r1, j)],
            (false, false) => d[(i - r1, j - c1)],
        }))
    }

    /// Splits into `(a b; c d)` with `a` of size `rows x cols`.
    pub fn block_extract(&self, rows: usize, cols: usize) -> Result<(CMat, CMat, CMat, CMat)> {
        if rows > self.rows() || cols > self.cols() {
            return Err(dim_err(
                "block_extract",
                format!("split within {}x{}", self.rows(), self.cols()),
                format!("{rows}x{cols}"),
            ));
        }
        Ok((
            self.submatrix(0, 0, rows, cols),
            self.submatrix(0, cols, rows, self.cols() - cols),
            self.submatrix(rows, 0, self.rows() - rows, cols),
            self.submatrix(rows, cols, self.rows() - rows, self.cols() - cols),
        ))
    }

    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
        CMat::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &CMat) {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, block: &CMat) {
        for i in 0..block.rows() {
            for j in 0..block.cols() {
                self[(r0 + i, c0 + j)] += block[(i, j)];
            }
        }
    }

    pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
        let mut out = CMat::zeros(a.rows() + b.rows(), a.cols() + b.cols());
        out.set_block(0, 0, a);
        out.set_block(a.rows(), a.cols(), b);
        out
    }

    pub fn symmetry_residual(&self) -> f64 {
        CMat(&self.0 - self.0.transpose()).frobenius_norm()
    }

    pub fn hermitian_residual(&self) -> f64 {
        CMat(&self.0 - self.0.adjoint()).frobenius_norm()
    }

    /// Matrix exponential (Padé scaling and squaring).
    pub fn expm(&self) -> Result<CMat> {
        self.require_square("expm")?;
        if self.rows() == 0 {
            return Ok(self.clone());
        }
        Ok(CMat(self.0.exp()))
    }

    /// Eigenvalues of a general square matrix, computed on the balanced
    /// matrix through a complex Schur decomposition.
    pub fn eigenvalues(&self) -> Result<Vec<C64>> {
        self.require_square("eigenvalues")?;
        let balanced = balance(self);
        let schur = nalgebra::linalg::Schur::try_new(balanced.0, f64::EPSILON, 10_000)
            .ok_or(Error::NoConvergence { op: "eigenvalues" })?;
        let (_, t) = schur.unpack();
        let n = t.nrows();
        // Complex Schur form is upper triangular.
        Ok((0..n).map(|i| t[(i, i)]).collect())
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &CMat {
    type Output = CMat;
    /// Panics on a shape mismatch; use [`CMat::try_mul`] for checked input.
    fn mul(self, rhs: &CMat) -> CMat {
        self.try_mul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        self.try_add(rhs).expect("matrix sum shape mismatch")
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        self.try_sub(rhs).expect("matrix difference shape mismatch")
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        CMat(-&self.0)
    }
}

/// Bilinear dot product `sum u_j v_j`.
pub fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Hermitian norm squared `sum |v_j|^2`.
pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn conj_vec(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| z.conj()).collect()
}

pub fn vec_dist(u: &[C64], v: &[C64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Diagonal similarity balancing (Parlett-Reinsch, powers of two), so the
/// balanced matrix has exactly the same spectrum.
fn balance(a: &CMat) -> CMat {
    let n = a.rows();
    let mut m = a.clone();
    let radix = 2.0_f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += m[(j, i)].norm();
                    row += m[(i, j)].norm();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let s = col + row;
            let mut f = 1.0;
            let mut g = row / radix;
            while col < g {
                f *= radix;
                col *= radix * radix;
            }
            g = row * radix;
            while col > g {
                f /= radix;
                col /= radix * radix;
            }
            if (col + row) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eig_hermitian(a: &CMat) -> Result<Vec<f64>> {
    eig_hermitian_with(a, &LinalgTolerances::default())
}

pub fn eig_hermitian_with(a: &CMat, tol: &LinalgTolerances) -> Result<Vec<f64>> {
    a.require_square("eig_hermitian")?;
    let residual = a.hermitian_residual();
    if residual > tol.hermitian * a.frobenius_norm().max(1.0) {
        return Err(Error::NotHermitian {
            op: "eig_hermitian",
            residual,
        });
    }
    let h = a.hermitian_part();
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.0, f64::EPSILON, 10_000)
        .ok_or(Error::NoConvergence { op: "eig_hermitian" })?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    Ok(vals)
}

/// `det(a)^{-1/2}` for complex symmetric `a` with positive definite
/// Hermitian part.
///
/// The branch is the product of reciprocal principal square roots of the
/// eigenvalues of `a`. Every eigenvalue lies in the open right half-plane,
/// so this is the continuous branch on that cone taking the value 1 at the
/// identity, and the positive root for real positive definite `a`.
pub fn inv_sqrt_det_rhp(a: &CMat) -> Result<C64> {
    inv_sqrt_det_rhp_with(a, &LinalgTolerances::default())
}

pub fn inv_sqrt_det_rhp_with(a: &CMat, tol: &LinalgTolerances) -> Result<C64> {
    a.require_square("inv_sqrt_det_rhp")?;
    let norm = a.frobenius_norm();
    let residual = a.symmetry_residual();
    if residual > tol.symmetry * norm.max(1.0) {
        return Err(Error::NotSymmetric {
            op: "inv_sqrt_det_rhp",
            residual,
        });
    }
    let herm = a.hermitian_part();
    let min_eig = eig_hermitian_with(&herm, tol)?[0];
    if min_eig <= tol.pd_epsilon {
        return Err(Error::NotPositiveDefinite {
            op: "inv_sqrt_det_rhp",
            min_eigenvalue: min_eig,
        });
    }
    let eigs = a.eigenvalues()?;
    let mut out = re(1.0);
    for lam in eigs {
        if lam.re <= tol.rhp_margin * norm {
            return Err(Error::NotPositiveDefinite {
                op: "inv_sqrt_det_rhp",
                min_eigenvalue: lam.re,
            });
        }
        out /= lam.sqrt();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_mat(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
        CMat::from_fn(n, n, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        })
    }

    fn close(a: &CMat, b: &CMat) -> f64 {
        (a - b).frobenius_norm()
    }

    #[test]
    fn identity_inverse_and_diag_det() {
        let id = CMat::identity(4);
        assert_eq!(id.inverse().unwrap(), id);
        let d = CMat::from_diag(&[re(2.0), re(3.0)]);
        assert!((d.determinant().unwrap() - re(6.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_residual_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for dim in 2..=8 {
            // diagonally shifted to stay well-conditioned
            let k = &random_mat(&mut rng, dim, 0.5) + &CMat::identity(dim).scale_re(2.0);
            let prod = &k.inverse().unwrap() * &k;
            assert!(close(&prod, &CMat::identity(dim)) < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn singular_inverse_refused() {
        let m = CMat::from_row_major(2, 2, &[re(1.0), re(2.0), re(2.0), re(4.0)]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::Singular { .. })));
        let rect = CMat::zeros(2, 3);
        assert!(matches!(rect.inverse(), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn block_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_mat(&mut rng, 5, 1.0);
        let (a, b, cc, d) = m.block_extract(2, 2).unwrap();
        assert_eq!(CMat::block_compose(&a, &b, &cc, &d).unwrap(), m);
        assert!(CMat::block_compose(&a, &d, &cc, &b).is_err());
    }

    #[test]
    fn determinant_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..6 {
            let a = random_mat(&mut rng, n, 1.0);
            let b = random_mat(&mut rng, n, 1.0);
            let lhs = (&a * &b).determinant().unwrap();
            let rhs = a.determinant().unwrap() * b.determinant().unwrap();
            assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1e-300));
        }
    }

    #[test]
    fn expm_trivial_cases() {
        assert_eq!(CMat::zeros(3, 3).expm().unwrap(), CMat::identity(3));
        let x = CMat::from_diag(&[c(0.0, std::f64::consts::PI), c(0.0, -std::f64::consts::PI)]);
        let e = x.expm().unwrap();
        assert!(close(&e, &CMat::identity(2).scale_re(-1.0)) < 1e-12);
    }

    #[test]
    fn expm_matches_series_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = rng.random_range(2..6);
            let mut x = random_mat(&mut rng, n, 1.0);
            let nx = x.frobenius_norm();
            x = x.scale_re(2.0 * rng.random_range(0.1..1.0) / nx);
            // partial sums of the exponential series
            let mut term = CMat::identity(n);
            let mut sum = CMat::identity(n);
            for k in 1..=60 {
                term = (&term * &x).scale_re(1.0 / k as f64);
                sum = &sum + &term;
            }
            assert!(close(&x.expm().unwrap(), &sum) <= 1e-12 * sum.frobenius_norm());
        }
    }

    #[test]
    fn expm_inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..10 {
            let x = random_mat(&mut rng, 4, 1.0);
            let x = x.scale_re(5.0 * rng.random_range(0.0..1.0) / x.frobenius_norm());
            let prod = &x.expm().unwrap() * &(-&x).expm().unwrap();
            assert!(close(&prod, &CMat::identity(4)) < 1e-10);
        }
    }

    #[test]
    fn inv_sqrt_det_trivial() {
        assert!((inv_sqrt_det_rhp(&CMat::identity(3)).unwrap() - re(1.0)).norm() < 1e-15);
        let d = CMat::from_diag(&[re(4.0), re(4.0)]);
        assert!((inv_sqrt_det_rhp(&d).unwrap() - re(0.25)).norm() < 1e-15);
    }

    #[test]
    fn inv_sqrt_det_rejects_bad_input() {
        let asym = CMat::from_row_major(2, 2, &[re(1.0), re(0.5), re(0.0), re(1.0)]).unwrap();
        assert!(matches!(inv_sqrt_det_rhp(&asym), Err(Error::NotSymmetric { .. })));
        let indefinite = CMat::from_diag(&[re(1.0), re(-1.0)]);
        assert!(matches!(
            inv_sqrt_det_rhp(&indefinite),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    /// Tracks `t -> det(I + t eps s)^{-1/2}` by continuation: many small
    /// steps, picking at each step the square root closest to the previous
    /// value.
    fn homotopy_oracle(a: &CMat) -> C64 {
        let n = a.rows();
        let id = CMat::identity(n);
        let delta = a - &id;
        let steps = 2000;
        let mut prev = re(1.0);
        for k in 1..=steps {
            let t = k as f64 / steps as f64;
            let m = &id + &delta.scale_re(t);
            let det = m.determinant().unwrap();
            let root = 1.0 / det.sqrt();
            prev = if (root - prev).norm() <= (-root - prev).norm() { root } else { -root };
        }
        prev
    }

    #[test]
    fn inv_sqrt_det_matches_homotopy() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 2..=6 {
            let s = random_mat(&mut rng, n, 1.0).symmetrized();
            let a = &CMat::identity(n) + &s.scale_re(0.1);
            let got = inv_sqrt_det_rhp(&a).unwrap();
            let want = homotopy_oracle(&a);
            assert!((got - want).norm() < 1e-10, "n={n} got {got} want {want}");
            assert!((got * got * a.determinant().unwrap() - re(1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn inv_sqrt_det_follows_branch_beyond_principal() {
        // Eigenvalues with large phases: the product of principal roots
        // differs from the principal root of the product.
        let a = CMat::from_diag(&[c(1.0, 3.0), c(1.0, 3.0), c(1.0, 3.0)]);
        let got = inv_sqrt_det_rhp(&a).unwrap();
        let want = homotopy_oracle(&a);
        assert!((got - want).norm() < 1e-10);
        let naive = 1.0 / a.determinant().unwrap().sqrt();
        assert!((naive - want).norm() > 1e-3);
    }

    #[test]
    fn eig_hermitian_cases() {
        let v = eig_hermitian(&CMat::identity(3)).unwrap();
        assert!(v.iter().all(|x| (x - 1.0).abs() < 1e-14));
        let v = eig_hermitian(&CMat::from_diag(&[re(5.0), re(-1.0)])).unwrap();
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 5.0).abs() < 1e-14);
        let nonherm = CMat::from_row_major(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]).unwrap();
        assert!(matches!(eig_hermitian(&nonherm), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn eig_hermitian_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for n in 2..=6 {
            let v: Vec<C64> = (0..n)
                .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let m = CMat::from_fn(n, n, |i, j| v[i] * v[j].conj());
            let spec = eig_hermitian(&m).unwrap();
            let nv = norm_sqr(&v);
            for x in &spec[..n - 1] {
                assert!(x.abs() < 1e-10);
            }
            assert!((spec[n - 1] - nv).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_of_triangular() {
        let m = CMat::from_row_major(
            3,
            3,
            &[c(1.0, 1.0), re(5.0), re(-2.0), re(0.0), c(2.0, -1.0), re(7.0), re(0.0), re(0.0), re(3.0)],
        )
        .unwrap();
        let mut ev = m.eigenvalues().unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-12);
        assert!((ev[1] - c(2.0, -1.0)).norm() < 1e-12);
        assert!((ev[2] - re(3.0)).norm() < 1e-12);
    }
}
