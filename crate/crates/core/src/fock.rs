//! The Fock space `F_lambda` on `C^n`: monomial basis, coherent states,
//! Gaussian operator kernels and their truncated matrices.
//!
//! An operator `A` is described by its kernel `k_A(z, w) = <A e_w, e_z>`,
//! holomorphic in `z` and in `conj w`. Truncated matrices are taken over
//! the orthonormal monomials `phi_a = z^a / ||z^a||` with `|a| <= N`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cmatrix::{conj_vec, norm_sqr, re, CMat, C64};
use crate::error::{dim_err, Error, Result};
use crate::gaussian::GaussExponent;
use crate::groups::{s_involution, HeisElement, SUpqElement, Signature};
use crate::json::{self, WireComplex, WireMatrix, WireVector};

/// Default cap on stored Taylor coefficients in [`op_from_kernel`].
pub const DEFAULT_EXPANSION_BUDGET: usize = 50_000_000;

/// Smallest `|det A|` accepted by [`sigma_kernel`].
pub const DET_A_EPSILON: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockParams {
    sig: Signature,
    lambda: f64,
    cutoff: usize,
}

impl FockParams {
    pub fn new(sig: Signature, lambda: f64, cutoff: usize) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be a positive real, got {lambda}")));
        }
        Ok(FockParams { sig, lambda, cutoff })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    pub fn n(&self) -> usize {
        self.sig.n()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Self {
        FockParams { cutoff, ..*self }
    }
}

/// Multi-indices `a` in `N^n` with `|a| <= N`, sorted by degree, then
/// lexicographically descending within a degree.
#[derive(Clone, Debug)]
pub struct FockBasis {
    n: usize,
    cutoff: usize,
    indices: Vec<Vec<u32>>,
    degrees: Vec<usize>,
    norms: Vec<f64>,
    /// `lower[a][j]` is the position of `a - e_j`, if it exists.
    lower: Vec<Vec<Option<usize>>>,
}

fn compositions(n: usize, d: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n - 1 {
        prefix.push(d as u32);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in (0..=d).rev() {
        prefix.push(first as u32);
        compositions(n, d - first, prefix, out);
        prefix.pop();
    }
}

impl FockBasis {
    pub fn new(params: &FockParams) -> Self {
        let n = params.n();
        let mut indices = Vec::new();
        for d in 0..=params.cutoff {
            compositions(n, d, &mut Vec::new(), &mut indices);
        }
        let degrees: Vec<usize> = indices.iter().map(|a| a.iter().sum::<u32>() as usize).collect();
        let scale = 2.0 / params.lambda;
        let norms = indices
            .iter()
            .zip(&degrees)
            .map(|(a, &d)| {
                let fact: f64 = a.iter().map(|&k| (1..=k).map(f64::from).product::<f64>()).product();
                (fact * scale.powi(d as i32)).sqrt()
            })
            .collect();
        let pos: HashMap<&[u32], usize> = indices.iter().enumerate().map(|(i, a)| (a.as_slice(), i)).collect();
        let lower = indices
            .iter()
            .map(|a| {
                (0..n)
                    .map(|j| {
                        if a[j] == 0 {
                            return None;
                        }
                        let mut b = a.clone();
                        b[j] -= 1;
                        pos.get(b.as_slice()).copied()
                    })
                    .collect()
            })
            .collect();
        FockBasis {
            n,
            cutoff: params.cutoff,
            indices,
            degrees,
            norms,
            lower,
        }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn index(&self, i: usize) -> &[u32] {
        &self.indices[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    /// `||z^a||`.
    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    pub fn position(&self, a: &[u32]) -> Option<usize> {
        self.indices.iter().position(|b| b.as_slice() == a)
    }

    /// Number of basis elements of degree at most `d`.
    pub fn prefix_len(&self, d: usize) -> usize {
        self.degrees.partition_point(|&x| x <= d)
    }

    /// `phi_a(z)` for every basis element.
    pub fn eval(&self, z: &[C64]) -> Vec<C64> {
        assert_eq!(z.len(), self.n);
        let mut out = vec![re(0.0); self.len()];
        out[0] = re(1.0 / self.norms[0]);
        // phi_a = phi_{a - e_j} * z_j * ||a - e_j|| / ||a||
        for i in 1..self.len() {
            let j = self.indices[i].iter().position(|&k| k > 0).expect("nonzero index");
            let prev = self.lower[i][j].expect("lower index in basis");
            out[i] = out[prev] * z[j] * (self.norms[prev] / self.norms[i]);
        }
        out
    }
}

/// Expansion of `e_z` over the orthonormal basis: `conj(phi_a(z))`.
pub fn coherent_coeffs(z: &[C64], basis: &FockBasis) -> Result<Vec<C64>> {
    if z.len() != basis.n() {
        return Err(dim_err("coherent_coeffs", basis.n(), z.len()));
    }
    Ok(conj_vec(&basis.eval(z)))
}

// ---------------------------------------------------------------------------
// Gaussian kernels
// ---------------------------------------------------------------------------

/// `k(z, w) = prefactor * exp((lambda / 2) (y Q y + L y))` with
/// `y = (z, conj w)` in `C^{2n}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussKernel {
    n: usize,
    lambda: f64,
    pub prefactor: C64,
    pub quad: CMat,
    pub linear: Vec<C64>,
}

impl GaussKernel {
    pub fn new(n: usize, lambda: f64, prefactor: C64, quad: CMat, linear: Vec<C64>) -> Result<Self> {
        if quad.rows() != 2 * n || quad.cols() != 2 * n || linear.len() != 2 * n {
            return Err(dim_err("GaussKernel", 2 * n, quad.rows().max(linear.len())));
        }
        Ok(GaussKernel {
            n,
            lambda,
            prefactor,
            quad: quad.symmetrized(),
            linear,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `exp((lambda / 2) z . conj w)`, the reproducing kernel.
    pub fn identity(n: usize, lambda: f64) -> Self {
        let mut e = GaussExponent::zero(2 * n);
        e.add_diag_terms(0, n, n, re(1.0));
        GaussKernel {
            n,
            lambda,
            prefactor: re(1.0),
            quad: e.quad,
            linear: e.lin,
        }
    }

    /// The exponent with the `lambda / 2` factor multiplied in.
    pub fn raw_exponent(&self) -> GaussExponent {
        let s = self.lambda / 2.0;
        GaussExponent {
            quad: self.quad.scale_re(s),
            lin: self.linear.iter().map(|v| v * s).collect(),
            prefactor: self.prefactor,
        }
    }

    pub fn from_raw_exponent(n: usize, lambda: f64, e: &GaussExponent) -> Self {
        assert_eq!(e.dim(), 2 * n);
        let s = 2.0 / lambda;
        GaussKernel {
            n,
            lambda,
            prefactor: e.prefactor,
            quad: e.quad.scale_re(s),
            linear: e.lin.iter().map(|v| v * s).collect(),
        }
    }

    fn stacked(&self, z: &[C64], w: &[C64]) -> Vec<C64> {
        assert!(z.len() == self.n && w.len() == self.n, "kernel arguments must lie in C^{}", self.n);
        let mut y = z.to_vec();
        y.extend(conj_vec(w));
        y
    }

    pub fn eval(&self, z: &[C64], w: &[C64]) -> C64 {
        self.raw_exponent().eval(&self.stacked(z, w))
    }

    /// `log k(z, w)` on the branch given by the exponent.
    pub fn log_eval(&self, z: &[C64], w: &[C64]) -> C64 {
        let y = self.stacked(z, w);
        self.prefactor.ln() + self.raw_exponent().exponent(&y)
    }

    /// Kernel of the adjoint, `conj(k(w, z))`.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let swap = CMat::from_fn(2 * n, 2 * n, |i, j| re(if (i + n) % (2 * n) == j { 1.0 } else { 0.0 }));
        let quad = &(&swap * &self.quad.conj()) * &swap;
        let linear = swap.mul_vec(&conj_vec(&self.linear)).expect("dimension");
        GaussKernel {
            n,
            lambda: self.lambda,
            prefactor: self.prefactor.conj(),
            quad,
            linear,
        }
    }

    /// Largest entrywise difference of the parameters, relative to the
    /// prefactor for the prefactor itself.
    pub fn param_dist(&self, other: &GaussKernel) -> f64 {
        if self.n != other.n {
            return f64::INFINITY;
        }
        let dp = (self.prefactor - other.prefactor).norm() / self.prefactor.norm().max(1e-300);
        let dq = (&self.quad - &other.quad).to_row_major().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let dl = self.linear.iter().zip(&other.linear).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        dp.max(dq).max(dl)
    }
}

/// Kernel of `rho_lambda(h)`:
/// `exp(i lambda c_0 - (lambda/4)|z_0|^2 + (lambda/2)(z . conj w + conj s_0 . z - s_0 . conj w))`
/// with `s_0 = s(z_0)`.
pub fn rho_kernel(h: &HeisElement, params: &FockParams) -> Result<GaussKernel> {
    let n = params.n();
    let s0 = s_involution(&h.z, params.sig())?;
    let lambda = params.lambda();
    let mut k = GaussKernel::identity(n, lambda);
    for j in 0..n {
        k.linear[j] = s0[j].conj();
        k.linear[n + j] = -s0[j];
    }
    k.prefactor = (C64::new(-lambda / 4.0 * norm_sqr(&h.z), lambda * h.c)).exp();
    Ok(k)
}

/// Kernel `b_k` of `sigma(k)`, with `z = (z_1, z_2)` split along `(p, q)`:
/// `(det A)^{-1} exp((lambda/2)(-(D'^{-1} C' w_1') . w_2' + (D'^{-1} z_2) . w_2'
///  + (A^{-1} z_1) . w_1' + z_1 . (B' D'^{-1} z_2)))`, primes denoting conjugation.
pub fn sigma_kernel(k: &SUpqElement, params: &FockParams) -> Result<GaussKernel> {
    let sig = params.sig();
    if k.sig() != sig {
        return Err(dim_err("sigma_kernel", format!("{sig:?}"), format!("{:?}", k.sig())));
    }
    let (p, n) = (sig.p(), sig.n());
    let det_a = k.a().determinant()?;
    if det_a.norm() <= DET_A_EPSILON {
        return Err(Error::Precondition {
            identity: "det A != 0",
            value: det_a.norm(),
            epsilon: DET_A_EPSILON,
        });
    }
    let a_inv = k.a().inverse()?;
    let dbar_inv = k.d().conj().inverse()?;
    let (z1, z2, w1, w2) = (0, p, n, n + p);
    let mut e = GaussExponent::zero(2 * n);
    e.add_bilinear_block(w2, w1, &(-&(&dbar_inv * &k.c().conj())));
    e.add_bilinear_block(w2, z2, &dbar_inv);
    e.add_bilinear_block(w1, z1, &a_inv);
    e.add_bilinear_block(z1, z2, &(&k.b().conj() * &dbar_inv));
    GaussKernel::new(n, params.lambda(), det_a.inv(), e.quad, e.lin)
}

/// Kernel of the quantizer `Omega(z)`, `(Omega(z) f)(w) = 2^n exp(lambda(conj z . w - |z|^2)) f(2z - w)`:
/// `2^n e^{-lambda |z|^2} exp((lambda/2)(-u . conj v + 2 conj z . u + 2 z . conj v))`.
pub fn quantizer_kernel(z: &[C64], params: &FockParams) -> Result<GaussKernel> {
    let n = params.n();
    if z.len() != n {
        return Err(dim_err("quantizer_kernel", n, z.len()));
    }
    let lambda = params.lambda();
    let mut k = GaussKernel::identity(n, lambda);
    k.quad = k.quad.scale_re(-1.0);
    for j in 0..n {
        k.linear[j] = z[j].conj() * 2.0;
        k.linear[n + j] = z[j] * 2.0;
    }
    k.prefactor = re(2f64.powi(n as i32) * (-lambda * norm_sqr(z)).exp());
    Ok(k)
}

/// Kernel of the parity operator, `2^n exp(-(lambda/2) z . conj w)`.
pub fn parity_kernel(params: &FockParams) -> GaussKernel {
    quantizer_kernel(&vec![re(0.0); params.n()], params).expect("dimension")
}

// ---------------------------------------------------------------------------
// Truncated operators
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FockOp {
    params: FockParams,
    pub matrix: CMat,
}

impl FockOp {
    pub fn new(params: FockParams, basis: &FockBasis, matrix: CMat) -> Result<Self> {
        if matrix.rows() != basis.len() || matrix.cols() != basis.len() {
            return Err(dim_err("FockOp", basis.len(), matrix.rows()));
        }
        Ok(FockOp { params, matrix })
    }

    pub fn identity(params: FockParams, basis: &FockBasis) -> Self {
        FockOp {
            params,
            matrix: CMat::identity(basis.len()),
        }
    }

    pub fn params(&self) -> &FockParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `sum_{a,b} A_{ab} phi_a(z) conj(phi_b(w))`, the truncated kernel.
    pub fn kernel_eval(&self, basis: &FockBasis, z: &[C64], w: &[C64]) -> C64 {
        let pz = basis.eval(z);
        let cw = coherent_coeffs(w, basis).expect("dimension");
        self.matrix.bilinear(&pz, &cw).expect("dimension")
    }

    /// `<A e_z, e_z> / <e_z, e_z>` over the truncated coherent state.
    pub fn berezin_at(&self, basis: &FockBasis, z: &[C64]) -> C64 {
        let cz = coherent_coeffs(z, basis).expect("dimension");
        let az = self.matrix.mul_vec(&cz).expect("dimension");
        let num: C64 = cz.iter().zip(&az).map(|(c, a)| c.conj() * a).sum();
        num / norm_sqr(&cz)
    }

    /// The leading block on monomials of degree `<= d`.
    pub fn leading_block(&self, basis: &FockBasis, d: usize) -> CMat {
        let m = basis.prefix_len(d);
        self.matrix.submatrix(0, 0, m, m)
    }
}

fn check_params(op: &'static str, a: &FockParams, b: &FockParams) -> Result<()> {
    if a != b {
        return Err(dim_err(op, format!("{a:?}"), format!("{b:?}")));
    }
    Ok(())
}

pub fn op_compose(a: &FockOp, b: &FockOp) -> Result<FockOp> {
    check_params("op_compose", &a.params, &b.params)?;
    Ok(FockOp {
        params: a.params,
        matrix: a.matrix.try_mul(&b.matrix)?,
    })
}

pub fn op_trace(a: &FockOp) -> C64 {
    a.matrix.trace()
}

pub fn op_adjoint(a: &FockOp) -> FockOp {
    FockOp {
        params: a.params,
        matrix: a.matrix.adjoint(),
    }
}

/// `(R f)(z) = 2^n f(-z)`: diagonal with entries `2^n (-1)^{|a|}`.
pub fn parity_op(params: &FockParams, basis: &FockBasis) -> FockOp {
    let scale = 2f64.powi(params.n() as i32);
    let d: Vec<C64> = (0..basis.len())
        .map(|i| re(if basis.degree(i) % 2 == 0 { scale } else { -scale }))
        .collect();
    FockOp {
        params: *params,
        matrix: CMat::from_diag(&d),
    }
}

pub fn op_from_kernel(kern: &GaussKernel, params: &FockParams, basis: &FockBasis) -> Result<FockOp> {
    op_from_kernel_with(kern, params, basis, DEFAULT_EXPANSION_BUDGET)
}

/// Truncated matrix of the operator with kernel `kern`.
///
/// Taylor coefficients `F_{ab}` of `kern` in `(z, conj w)` follow from the
/// Euler identity for `F = P e^E`:
/// `|m| F_m = sum_j l_j F_{m - e_j} + 2 sum_{i <= j} q_ij F_{m - e_i - e_j}`
/// where `E = l . y + sum_{i <= j} q_ij y_i y_j`. Rows are filled in basis
/// order, so every lower index is already known. Then
/// `A_{ab} = F_{ab} ||z^a|| ||z^b||`.
pub fn op_from_kernel_with(
    kern: &GaussKernel,
    params: &FockParams,
    basis: &FockBasis,
    budget: usize,
) -> Result<FockOp> {
    let n = params.n();
    if kern.n() != n || basis.n() != n {
        return Err(dim_err("op_from_kernel", n, kern.n()));
    }
    if kern.lambda() != params.lambda() {
        return Err(Error::InvalidParameter(format!(
            "kernel built for lambda = {}, operator space has lambda = {}",
            kern.lambda(),
            params.lambda()
        )));
    }
    let b = basis.len();
    if b * b > budget {
        return Err(Error::ExpansionBudget {
            needed: b * b,
            budget,
        });
    }
    let e = kern.raw_exponent();
    let l = &e.lin;
    // q_ii = Q_ii, q_ij = 2 Q_ij for i < j
    let q = |i: usize, j: usize| if i == j { e.quad[(i, i)] } else { e.quad[(i, j)] * 2.0 };
    let mut f = vec![re(0.0); b * b];
    f[0] = e.prefactor;
    // decrement of the stacked index m = (a, b) in coordinate j
    let dec = |ra: usize, cb: usize, j: usize| -> Option<(usize, usize)> {
        if j < n {
            basis.lower[ra][j].map(|r| (r, cb))
        } else {
            basis.lower[cb][j - n].map(|c| (ra, c))
        }
    };
    for ra in 0..b {
        for cb in 0..b {
            if ra == 0 && cb == 0 {
                continue;
            }
            let total = (basis.degree(ra) + basis.degree(cb)) as f64;
            let mut acc = re(0.0);
            for j in 0..2 * n {
                let Some((r1, c1)) = dec(ra, cb, j) else { continue };
                acc += l[j] * f[r1 * b + c1];
                for i in 0..=j {
                    if let Some((r2, c2)) = dec(r1, c1, i) {
                        acc += q(i, j) * 2.0 * f[r2 * b + c2];
                    }
                }
            }
            f[ra * b + cb] = acc / total;
        }
    }
    let matrix = CMat::from_fn(b, b, |ra, cb| f[ra * b + cb] * (basis.norm(ra) * basis.norm(cb)));
    Ok(FockOp {
        params: *params,
        matrix,
    })
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaussKernelWire {
    pub n: usize,
    pub lambda: f64,
    pub prefactor: WireComplex,
    pub quad: WireMatrix,
    pub linear: WireVector,
}

impl From<&GaussKernel> for GaussKernelWire {
    fn from(k: &GaussKernel) -> Self {
        GaussKernelWire {
            n: k.n,
            lambda: k.lambda,
            prefactor: json::complex_out(k.prefactor),
            quad: json::matrix_out(&k.quad),
            linear: json::vector_out(&k.linear),
        }
    }
}

impl TryFrom<GaussKernelWire> for GaussKernel {
    type Error = Error;

    fn try_from(w: GaussKernelWire) -> Result<Self> {
        let quad = json::matrix_in(&w.quad, 2 * w.n, 2 * w.n, "GaussKernel.quad")?;
        if quad.symmetry_residual() > 1e-10 * quad.frobenius_norm().max(1.0) {
            return Err(Error::NotSymmetric {
                op: "GaussKernel",
                residual: quad.symmetry_residual(),
            });
        }
        GaussKernel::new(
            w.n,
            w.lambda,
            json::complex_in(w.prefactor)?,
            quad,
            json::vector_in(&w.linear)?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FockOpWire {
    pub p: usize,
    pub q: usize,
    pub lambda: f64,
    pub cutoff: usize,
    pub matrix: WireMatrix,
}

impl From<&FockOp> for FockOpWire {
    fn from(op: &FockOp) -> Self {
        FockOpWire {
            p: op.params.sig().p(),
            q: op.params.sig().q(),
            lambda: op.params.lambda(),
            cutoff: op.params.cutoff(),
            matrix: json::matrix_out(&op.matrix),
        }
    }
}
