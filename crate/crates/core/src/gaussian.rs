//! Gaussian integral calculus.
//!
//! Closed forms for `int_{R^N} exp(-x A x + b x + c) dx`, the measure
//! `dm_lambda = (lambda / 2 pi)^n dm` on `C^n`, and a tensor Gauss-Hermite
//! oracle. Integrals over `C^n` are realified with `w_j = x_j + i y_j`,
//! real coordinates ordered `(x_1..x_n, y_1..y_n)`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cmatrix::{dot, inv_sqrt_det_rhp_with, re, CMat, LinalgTolerances, C64, I};
use crate::error::{dim_err, Error, Result};
use crate::fock::GaussKernel;

/// Default Gauss-Hermite order per real dimension.
pub const DEFAULT_QUAD_ORDER: usize = 40;
/// Default cap on the number of tensor grid points.
pub const DEFAULT_POINT_BUDGET: f64 = 1e7;

/// `x -> exp(-x A x + b x + c)` on `R^N`, `A` complex symmetric.
#[derive(Clone, Debug)]
pub struct QuadForm {
    pub a: CMat,
    pub b: Vec<C64>,
    pub c: C64,
}

impl QuadForm {
    pub fn new(a: CMat, b: Vec<C64>, c: C64) -> Result<Self> {
        if !a.is_square() || a.rows() != b.len() {
            return Err(dim_err("QuadForm", a.rows(), b.len()));
        }
        let r = a.symmetry_residual();
        if r > 1e-10 * a.frobenius_norm().max(1.0) {
            return Err(Error::NotSymmetric { op: "QuadForm", residual: r });
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        let xc: Vec<C64> = x.iter().map(|&v| re(v)).collect();
        let q = self.a.bilinear(&xc, &xc).expect("dimension");
        (-q + dot(&self.b, &xc) + self.c).exp()
    }
}

/// Factorization of a Gaussian quadratic form: `A^{-1}` and the branch of
/// `det(A)^{-1/2}`.
pub(crate) struct GaussianSolve {
    inv: CMat,
    inv_sqrt_det: C64,
}

impl GaussianSolve {
    pub(crate) fn new(a: &CMat, tol: &LinalgTolerances) -> Result<Self> {
        let inv_sqrt_det = inv_sqrt_det_rhp_with(a, tol)?;
        let inv = a.inverse_with(tol)?;
        Ok(GaussianSolve { inv, inv_sqrt_det })
    }
}

pub fn gauss_integral(f: &QuadForm) -> Result<C64> {
    gauss_integral_with(f, &LinalgTolerances::default())
}

/// `det(A)^{-1/2} pi^{N/2} exp(b A^{-1} b / 4 + c)`.
pub fn gauss_integral_with(f: &QuadForm, tol: &LinalgTolerances) -> Result<C64> {
    let solve = GaussianSolve::new(&f.a, tol)?;
    let ab = solve.inv.mul_vec(&f.b)?;
    let n = f.dim() as f64;
    Ok(solve.inv_sqrt_det * PI.powf(n / 2.0) * (0.25 * dot(&f.b, &ab) + f.c).exp())
}

/// Density of `m_lambda` with respect to Lebesgue measure on `C^n`.
pub fn m_lambda_density(lambda: f64, n: usize) -> f64 {
    (lambda / (2.0 * PI)).powi(n as i32)
}

/// `(u, conj u) = U x` with `x = (Re u, Im u)`.
pub fn realification(n: usize) -> CMat {
    let id = CMat::identity(n);
    let iid = id.scale(I);
    CMat::block_compose(&id, &iid, &id, &(-&iid)).expect("square blocks")
}

/// `prefactor * exp(y^t Q y + L y)` over complex variables `y`, where
/// entries of `y` may be coordinates paired with their conjugates.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussExponent {
    pub quad: CMat,
    pub lin: Vec<C64>,
    pub prefactor: C64,
}

impl GaussExponent {
    pub fn zero(dim: usize) -> Self {
        GaussExponent {
            quad: CMat::zeros(dim, dim),
            lin: vec![re(0.0); dim],
            prefactor: re(1.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    /// Adds `val * y_i * y_j`, keeping `quad` symmetric.
    pub fn add_term(&mut self, i: usize, j: usize, val: C64) {
        if i == j {
            self.quad[(i, i)] += val;
        } else {
            self.quad[(i, j)] += val * 0.5;
            self.quad[(j, i)] += val * 0.5;
        }
    }

    /// Adds `val * sum_k y_{i0+k} y_{j0+k}` for `k < len`.
    pub fn add_diag_terms(&mut self, i0: usize, j0: usize, len: usize, val: C64) {
        for k in 0..len {
            self.add_term(i0 + k, j0 + k, val);
        }
    }

    /// Adds `u^t M v` where `u = y[i0..i0+rows]`, `v = y[j0..j0+cols]`.
    pub fn add_bilinear_block(&mut self, i0: usize, j0: usize, m: &CMat) {
        for a in 0..m.rows() {
            for b in 0..m.cols() {
                self.add_term(i0 + a, j0 + b, m[(a, b)]);
            }
        }
    }

    /// Adds `other`, whose variable `k` sits at position `idx[k]` here.
    pub fn accumulate(&mut self, other: &GaussExponent, idx: &[usize]) {
        assert_eq!(other.dim(), idx.len());
        for (a, &ia) in idx.iter().enumerate() {
            self.lin[ia] += other.lin[a];
            for (b, &ib) in idx.iter().enumerate() {
                self.quad[(ia, ib)] += other.quad[(a, b)];
            }
        }
        self.prefactor *= other.prefactor;
    }

    pub fn eval(&self, y: &[C64]) -> C64 {
        let q = self.quad.bilinear(y, y).expect("dimension");
        self.prefactor * (q + dot(&self.lin, y)).exp()
    }

    pub fn exponent(&self, y: &[C64]) -> C64 {
        self.quad.bilinear(y, y).expect("dimension") + dot(&self.lin, y)
    }

    /// Applies `y = T y'` (so the new form is in `y'`).
    pub fn substitute(&self, t: &CMat) -> GaussExponent {
        let quad = (&(&t.transpose() * &self.quad) * t).symmetrized();
        let lin = t.transpose().mul_vec(&self.lin).expect("dimension");
        GaussExponent {
            quad,
            lin,
            prefactor: self.prefactor,
        }
    }

    /// Integrates out the trailing `2n` variables, read as `(u, conj u)`
    /// for `u` in `C^n`, against Lebesgue measure `dm(u)`. The leading
    /// variables stay as independent complex parameters.
    pub fn integrate_complex_tail(&self, n: usize, tol: &LinalgTolerances) -> Result<GaussExponent> {
        let m = self.dim().checked_sub(2 * n).ok_or_else(|| dim_err("integrate_complex_tail", 2 * n, self.dim()))?;
        let t = CMat::block_diag(&CMat::identity(m), &realification(n));
        let real = self.substitute(&t);
        let qvv = real.quad.submatrix(0, 0, m, m);
        let qvx = real.quad.submatrix(0, m, m, 2 * n);
        let a = real.quad.submatrix(m, m, 2 * n, 2 * n).scale_re(-1.0).symmetrized();
        let lv = &real.lin[..m];
        let lx = &real.lin[m..];
        let solve = GaussianSolve::new(&a, tol)?;
        // exponent: v Qvv v + 2 v Qvx x - x A x + lv v + lx x
        let ai_qxv = &solve.inv * &qvx.transpose();
        let quad = (&qvv + &(&qvx * &ai_qxv)).symmetrized();
        let ai_lx = solve.inv.mul_vec(lx)?;
        let lin_shift = qvx.mul_vec(&ai_lx)?;
        let lin: Vec<C64> = lv.iter().zip(&lin_shift).map(|(a, b)| a + b).collect();
        let constant = 0.25 * dot(lx, &ai_lx);
        let prefactor = self.prefactor * solve.inv_sqrt_det * PI.powi(n as i32) * constant.exp();
        Ok(GaussExponent { quad, lin, prefactor })
    }
}

/// Kernel of the product operator,
/// `int k1(z, u) k2(u, w) e^{-lambda |u|^2 / 2} dm_lambda(u)`, in closed form.
pub fn compose_gauss_kernels(k1: &GaussKernel, k2: &GaussKernel) -> Result<GaussKernel> {
    compose_gauss_kernels_with(k1, k2, &LinalgTolerances::default())
}

pub fn compose_gauss_kernels_with(
    k1: &GaussKernel,
    k2: &GaussKernel,
    tol: &LinalgTolerances,
) -> Result<GaussKernel> {
    let n = k1.n();
    if k2.n() != n {
        return Err(dim_err("compose_gauss_kernels", n, k2.n()));
    }
    if k1.lambda() != k2.lambda() {
        return Err(Error::InvalidParameter(format!(
            "kernels built for different lambda ({} vs {})",
            k1.lambda(),
            k2.lambda()
        )));
    }
    let lambda = k1.lambda();
    // y = (z, conj w, u, conj u)
    let mut form = GaussExponent::zero(4 * n);
    let z: Vec<usize> = (0..n).collect();
    let wbar: Vec<usize> = (n..2 * n).collect();
    let u: Vec<usize> = (2 * n..3 * n).collect();
    let ubar: Vec<usize> = (3 * n..4 * n).collect();
    form.accumulate(&k1.raw_exponent(), &[z, ubar].concat());
    form.accumulate(&k2.raw_exponent(), &[u, wbar].concat());
    form.add_diag_terms(2 * n, 3 * n, n, re(-lambda / 2.0));
    let mut out = form.integrate_complex_tail(n, tol)?;
    out.prefactor *= m_lambda_density(lambda, n);
    Ok(GaussKernel::from_raw_exponent(n, lambda, &out))
}

// ---------------------------------------------------------------------------
// Quadrature rules
// ---------------------------------------------------------------------------

/// Gauss-Hermite rule for the weight `e^{-t^2}` on `R`.
#[derive(Clone, Debug)]
pub struct GHRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `w_i e^{t_i^2}`, for integrands that carry their own decay.
    scaled_weights: Vec<f64>,
}

impl GHRule {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 || order > 200 {
            return Err(Error::InvalidParameter(format!("Gauss-Hermite order {order} out of range 1..=200")));
        }
        let (nodes, weights) = hermite_nodes(order);
        let scaled_weights = nodes.iter().zip(&weights).map(|(t, w)| w * (t * t).exp()).collect();
        Ok(GHRule {
            nodes,
            weights,
            scaled_weights,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Newton iteration on the orthonormal Hermite recurrence, with the
/// classical asymptotic starting guesses.
fn hermite_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0_f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    // ascending order
    x.reverse();
    w.reverse();
    (x, w)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn pairwise_sum(v: &[C64]) -> C64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// `int_{R^N} f(x) dx` on the tensor grid `x = width * t`, with the
/// Gaussian weight `e^{-|t|^2}` divided back out of the nodes, so `f` is the
/// full integrand.
///
/// Summation runs over the grid in lexicographic order and reduces
/// pairwise in a fixed tree, so the result is bit-identical for any number
/// of worker threads.
pub fn gh_integrate<F>(f: F, dim: usize, rule: &GHRule, width: f64, budget: f64) -> Result<C64>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let q = rule.order();
    let points = (q as f64).powi(dim as i32);
    if points > budget {
        return Err(Error::BudgetExceeded { points, budget });
    }
    if dim == 0 {
        return Ok(f(&[]));
    }
    let inner: usize = q.pow(dim as u32 - 1);
    let nodes = &rule.nodes;
    let sw = &rule.scaled_weights;
    let slabs: Vec<C64> = (0..q)
        .into_par_iter()
        .map(|i0| {
            let mut x = vec![0.0; dim];
            let mut vals = Vec::with_capacity(inner);
            for lin in 0..inner {
                let mut rem = lin;
                let mut w = sw[i0];
                x[0] = width * nodes[i0];
                for d in (1..dim).rev() {
                    let id = rem % q;
                    rem /= q;
                    x[d] = width * nodes[id];
                    w *= sw[id];
                }
                vals.push(f(&x) * w);
            }
            pairwise_sum(&vals)
        })
        .collect();
    Ok(pairwise_sum(&slabs) * width.powi(dim as i32))
}
