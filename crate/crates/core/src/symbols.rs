//! Berezin and Weyl symbols of Gaussian operators.
//!
//! Symbols are functions of `z` in `C^n`, written over the stacked variable
//! `v = (z, conj z)`. Gaussian symbols are `c exp(v M v + L v + c_0)` with
//! `M` symmetric; polynomial symbols are `v M v + L v + c_0`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{conj_vec, dot, norm_sqr, re, CMat, LinalgTolerances, C64, I};
use crate::error::{dim_err, Error, Result};
use crate::fock::{rho_kernel, sigma_kernel, FockBasis, FockOp, FockParams, GaussKernel};
use crate::gaussian::{compose_gauss_kernels, gh_integrate, m_lambda_density, GHRule, GaussExponent};
use crate::groups::{embed_tilde, s_involution, s_pair, symplectic_j, GAlgebra, GElement, SUpqAlgebra, SUpqElement};
use crate::json::{self, WireComplex, WireMatrix, WireVector};

/// Default lower bound on `|det(k + I)|` for the Weyl-symbol closed forms.
pub const DET_EPSILON: f64 = 1e-8;
/// Entrywise agreement required between the two closed forms of `W(sigma(k))`.
pub const FORM_TOLERANCE: f64 = 1e-10;
/// Coherent states are trusted on truncated spaces while `lambda |z|^2 / 2`
/// stays below this bound.
pub const TRUST_REGION: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadSymbol {
    pub prefactor: C64,
    pub exponent_matrix: CMat,
    pub linear: Vec<C64>,
    pub constant: C64,
}

impl QuadSymbol {
    pub fn new(prefactor: C64, exponent_matrix: CMat, linear: Vec<C64>, constant: C64) -> Result<Self> {
        let m = exponent_matrix.rows();
        if !exponent_matrix.is_square() || m % 2 != 0 || linear.len() != m {
            return Err(dim_err("QuadSymbol", m, linear.len()));
        }
        Ok(QuadSymbol {
            prefactor,
            exponent_matrix: exponent_matrix.symmetrized(),
            linear,
            constant,
        })
    }

    pub fn constant_one(n: usize) -> Self {
        QuadSymbol {
            prefactor: re(1.0),
            exponent_matrix: CMat::zeros(2 * n, 2 * n),
            linear: vec![re(0.0); 2 * n],
            constant: re(0.0),
        }
    }

    pub fn n(&self) -> usize {
        self.linear.len() / 2
    }

    fn from_exponent(e: GaussExponent) -> Self {
        QuadSymbol {
            prefactor: e.prefactor,
            exponent_matrix: e.quad.symmetrized(),
            linear: e.lin,
            constant: re(0.0),
        }
    }

    fn to_exponent(&self) -> GaussExponent {
        GaussExponent {
            quad: self.exponent_matrix.clone(),
            lin: self.linear.clone(),
            prefactor: self.prefactor * self.constant.exp(),
        }
    }

    pub fn log_eval(&self, z: &[C64]) -> C64 {
        let v = stack(z);
        self.prefactor.ln() + self.constant + self.exponent_matrix.bilinear(&v, &v).expect("dimension") + dot(&self.linear, &v)
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        assert_eq!(z.len(), self.n(), "symbol argument must lie in C^{}", self.n());
        let v = stack(z);
        let e = self.exponent_matrix.bilinear(&v, &v).expect("dimension") + dot(&self.linear, &v) + self.constant;
        self.prefactor * e.exp()
    }

    /// Largest relative difference of the values at `points`.
    pub fn max_rel_dist(&self, other: &QuadSymbol, points: &[Vec<C64>]) -> f64 {
        points
            .iter()
            .map(|z| {
                let (a, b) = (self.eval(z), other.eval(z));
                (a - b).norm() / b.norm().max(1e-300)
            })
            .fold(0.0, f64::max)
    }

    /// Entrywise difference of exponent matrices.
    pub fn exponent_dist(&self, other: &QuadSymbol) -> f64 {
        (&self.exponent_matrix - &other.exponent_matrix)
            .to_row_major()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

fn stack(z: &[C64]) -> Vec<C64> {
    let mut v = z.to_vec();
    v.extend(conj_vec(z));
    v
}

/// Quadratic polynomial `v M v + L v + c_0` in `v = (z, conj z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySymbol {
    pub constant: C64,
    pub quad: CMat,
    pub linear: Vec<C64>,
}

impl PolySymbol {
    pub fn zero(n: usize) -> Self {
        PolySymbol {
            constant: re(0.0),
            quad: CMat::zeros(2 * n, 2 * n),
            linear: vec![re(0.0); 2 * n],
        }
    }

    pub fn n(&self) -> usize {
        self.linear.len() / 2
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        let v = stack(z);
        self.quad.bilinear(&v, &v).expect("dimension") + dot(&self.linear, &v) + self.constant
    }

    pub fn add(&self, other: &PolySymbol) -> Result<PolySymbol> {
        if self.n() != other.n() {
            return Err(dim_err("PolySymbol::add", self.n(), other.n()));
        }
        Ok(PolySymbol {
            constant: self.constant + other.constant,
            quad: &self.quad + &other.quad,
            linear: self.linear.iter().zip(&other.linear).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, t: C64) -> PolySymbol {
        PolySymbol {
            constant: self.constant * t,
            quad: self.quad.scale(t),
            linear: self.linear.iter().map(|v| v * t).collect(),
        }
    }

    fn from_exponent(e: &GaussExponent, constant: C64) -> Self {
        PolySymbol {
            constant,
            quad: e.quad.symmetrized(),
            linear: e.lin.clone(),
        }
    }

    /// `exp(t Delta) f = f + t Delta f` with `Delta = 4 sum_k d^2 / dz_k d conj z_k`.
    pub fn heat(&self, t: f64) -> PolySymbol {
        let n = self.n();
        let lap: C64 = (0..n).map(|k| self.quad[(k, n + k)] * 8.0).sum();
        PolySymbol {
            constant: self.constant + lap * t,
            ..self.clone()
        }
    }
}

// ---------------------------------------------------------------------------
// Berezin symbols
// ---------------------------------------------------------------------------

/// `S(A)(z) = k_A(z, z) e^{-lambda |z|^2 / 2}`.
pub fn berezin_s_kernel(kern: &GaussKernel, z: &[C64]) -> C64 {
    kern.eval(z, z) * (-kern.lambda() / 2.0 * norm_sqr(z)).exp()
}

/// `S(A)` of a truncated operator through truncated coherent states.
/// Points outside the trust region still evaluate, with a warning.
pub fn berezin_s_op(op: &FockOp, basis: &FockBasis, z: &[C64]) -> C64 {
    let r = op.params().lambda() * norm_sqr(z) / 2.0;
    if r > TRUST_REGION {
        log::warn!("Berezin symbol at lambda|z|^2/2 = {r:.3} outside the trust region {TRUST_REGION}");
    }
    op.berezin_at(basis, z)
}

/// `S'(A)(z, w) = k_A(z, w) / <e_w, e_z> = k_A(z, w) exp(-lambda conj w . z / 2)`.
pub fn berezin_s_prime(kern: &GaussKernel, z: &[C64], w: &[C64]) -> C64 {
    kern.eval(z, w) * (-kern.lambda() / 2.0 * dot(&conj_vec(w), z)).exp()
}

/// `S(A)` as a closed-form symbol: put `w = z` in the kernel.
pub fn berezin_symbol_of_kernel(kern: &GaussKernel) -> QuadSymbol {
    let n = kern.n();
    let mut e = kern.raw_exponent();
    e.add_diag_terms(0, n, n, re(-kern.lambda() / 2.0));
    QuadSymbol::from_exponent(e)
}

/// `exp(t Delta) f = int f(w) (4 pi t)^{-n} exp(-|z - w|^2 / 4t) dm(w)`.
/// The Berezin transform is `t = 1 / (2 lambda)`.
pub fn berezin_transform(f: &QuadSymbol, t: f64) -> Result<QuadSymbol> {
    berezin_transform_with(f, t, &LinalgTolerances::default())
}

pub fn berezin_transform_with(f: &QuadSymbol, t: f64, tol: &LinalgTolerances) -> Result<QuadSymbol> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("heat time must be positive, got {t}")));
    }
    let n = f.n();
    // y = (z, conj z, w, conj w)
    let mut form = GaussExponent::zero(4 * n);
    let w_idx: Vec<usize> = (2 * n..4 * n).collect();
    form.accumulate(&f.to_exponent(), &w_idx);
    let g = re(-1.0 / (4.0 * t));
    form.add_diag_terms(0, n, n, g);
    form.add_diag_terms(2 * n, 3 * n, n, g);
    form.add_diag_terms(0, 3 * n, n, -g);
    form.add_diag_terms(n, 2 * n, n, -g);
    let mut out = form.integrate_complex_tail(n, tol)?;
    out.prefactor *= (4.0 * PI * t).powi(-(n as i32));
    Ok(QuadSymbol::from_exponent(out))
}

// ---------------------------------------------------------------------------
// Weyl symbols
// ---------------------------------------------------------------------------

/// `W(A)(z) = 2^n int k_A(z + w, z - w) exp((lambda/2)(-z.conj z - w.conj w + z.conj w - conj z.w)) dm_lambda(w)`
/// by tensor Gauss-Hermite quadrature over `w`.
pub fn weyl_numeric(kern: &GaussKernel, z: &[C64], rule: &GHRule, budget: f64) -> Result<C64> {
    let n = kern.n();
    if z.len() != n {
        return Err(dim_err("weyl_numeric", n, z.len()));
    }
    let lambda = kern.lambda();
    let h = lambda / 2.0;
    let zz = norm_sqr(z);
    let scale = 2f64.powi(n as i32) * m_lambda_density(lambda, n);
    let width = (2.0 / lambda).sqrt();
    let v = gh_integrate(
        |x| {
            let w: Vec<C64> = (0..n).map(|j| C64::new(x[j], x[n + j])).collect();
            let plus: Vec<C64> = z.iter().zip(&w).map(|(a, b)| a + b).collect();
            let minus: Vec<C64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
            let cross = dot(z, &conj_vec(&w)) - dot(&conj_vec(z), &w);
            let weight = (h * (cross - zz - norm_sqr(&w))).exp();
            (kern.log_eval(&plus, &minus)).exp() * weight
        },
        2 * n,
        rule,
        width,
        budget,
    )?;
    Ok(v * scale)
}

/// The same integral in closed form, as a symbol in `z`.
pub fn weyl_gaussian(kern: &GaussKernel) -> Result<QuadSymbol> {
    weyl_gaussian_with(kern, &LinalgTolerances::default())
}

pub fn weyl_gaussian_with(kern: &GaussKernel, tol: &LinalgTolerances) -> Result<QuadSymbol> {
    let n = kern.n();
    let lambda = kern.lambda();
    // y = (z, conj z, w, conj w); the kernel sees (z + w, conj z - conj w)
    let mut p = CMat::zeros(2 * n, 4 * n);
    for j in 0..n {
        p[(j, j)] = re(1.0);
        p[(j, 2 * n + j)] = re(1.0);
        p[(n + j, n + j)] = re(1.0);
        p[(n + j, 3 * n + j)] = re(-1.0);
    }
    let mut form = kern.raw_exponent().substitute(&p);
    let h = re(lambda / 2.0);
    form.add_diag_terms(0, n, n, -h);
    form.add_diag_terms(2 * n, 3 * n, n, -h);
    form.add_diag_terms(0, 3 * n, n, h);
    form.add_diag_terms(n, 2 * n, n, -h);
    let mut out = form.integrate_complex_tail(n, tol)?;
    out.prefactor *= 2f64.powi(n as i32) * m_lambda_density(lambda, n);
    Ok(QuadSymbol::from_exponent(out))
}

fn check_det(k: &SUpqElement, eps: f64) -> Result<f64> {
    let d = k.det_k_plus_one();
    if d <= eps {
        return Err(Error::Precondition {
            identity: "det(k + I) != 0",
            value: d,
            epsilon: eps,
        });
    }
    Ok(d)
}

/// The blocks `R, S, T` and `M = (R S; S^t T)` attached to `k`.
#[derive(Clone, Debug)]
pub struct PrepMatrices {
    pub r: CMat,
    pub s: CMat,
    pub t: CMat,
    pub m: CMat,
}

pub fn prep_matrices(k: &SUpqElement) -> Result<PrepMatrices> {
    let sig = k.sig();
    let (p, q) = (sig.p(), sig.q());
    let dbar_inv = k.d().conj().inverse()?;
    let dstar_inv = k.d().adjoint().inverse()?;
    let at_inv = k.a().transpose().inverse()?;
    let zpp = CMat::zeros(p, p);
    let zqq = CMat::zeros(q, q);
    let r = CMat::block_compose(
        &zpp,
        &(-&(&k.b().conj() * &dbar_inv)),
        &(-&(&dstar_inv * &k.b().adjoint())),
        &zqq,
    )?;
    let s = CMat::block_diag(&(&CMat::identity(p) + &at_inv), &(&CMat::identity(q) + &dstar_inv));
    let t = CMat::block_compose(&zpp, &(&k.c().adjoint() * &dstar_inv), &(&dbar_inv * &k.c().conj()), &zqq)?;
    let m = CMat::block_compose(&r, &s, &s.transpose(), &t)?;
    Ok(PrepMatrices { r, s, t, m })
}

/// `(lambda/2) J (k~ + I)^{-1} (k~ - I)`, symmetrized.
fn sigma_exponent_j(k: &SUpqElement, lambda: f64) -> Result<CMat> {
    let n = k.sig().n();
    let kt = embed_tilde(k);
    let id = CMat::identity(2 * n);
    let kinv = (&kt + &id).inverse()?;
    Ok((&(&symplectic_j(n) * &kinv) * &(&kt - &id)).scale_re(lambda / 2.0).symmetrized())
}

/// `lambda (gamma, I/2 - beta^t; I/2 - beta, alpha)` with `M^{-1} = (alpha beta; beta^t gamma)`.
fn sigma_exponent_abg(k: &SUpqElement, lambda: f64) -> Result<CMat> {
    let n = k.sig().n();
    let minv = prep_matrices(k)?.m.inverse()?;
    let (alpha, beta, _, gamma) = minv.block_extract(n, n)?;
    let half = CMat::identity(n).scale_re(0.5);
    let e = CMat::block_compose(&gamma, &(&half - &beta.transpose()), &(&half - &beta), &alpha)?;
    Ok(e.scale_re(lambda).symmetrized())
}

/// Both closed forms of `W(sigma(k))`; the first uses the `(alpha, beta, gamma)`
/// blocks, the second `J (k~ + I)^{-1} (k~ - I)`.
pub fn weyl_sigma_forms(k: &SUpqElement, lambda: f64, eps: f64) -> Result<(QuadSymbol, QuadSymbol)> {
    let n = k.sig().n();
    let d = check_det(k, eps)?;
    let pref = re(2f64.powi(n as i32) / d);
    let zero = vec![re(0.0); 2 * n];
    let abg = QuadSymbol::new(pref, sigma_exponent_abg(k, lambda)?, zero.clone(), re(0.0))?;
    let jf = QuadSymbol::new(pref, sigma_exponent_j(k, lambda)?, zero, re(0.0))?;
    Ok((abg, jf))
}

pub fn weyl_sigma_closed(k: &SUpqElement, lambda: f64) -> Result<QuadSymbol> {
    weyl_sigma_closed_with(k, lambda, DET_EPSILON)
}

/// `W(sigma(k))(z) = 2^n |det(k + I)|^{-1} exp((lambda/2) v J (k~ + I)^{-1} (k~ - I) v)`,
/// after checking it against the `(alpha, beta, gamma)` form.
pub fn weyl_sigma_closed_with(k: &SUpqElement, lambda: f64, eps: f64) -> Result<QuadSymbol> {
    let (abg, jf) = weyl_sigma_forms(k, lambda, eps)?;
    let scale = jf.exponent_matrix.frobenius_norm().max(1.0);
    let r = abg.exponent_dist(&jf);
    if r > FORM_TOLERANCE * scale {
        return Err(Error::Inconsistent {
            what: "W(sigma(k)) closed forms",
            residual: r,
            tolerance: FORM_TOLERANCE * scale,
        });
    }
    Ok(jf)
}

pub fn weyl_pi_closed(g: &GElement, lambda: f64) -> Result<QuadSymbol> {
    weyl_pi_closed_with(g, lambda, DET_EPSILON)
}

/// `W(pi(g))` for `g = (((z_0, conj z_0), c_0), k)`, with `S_0 = (s(z_0), conj s(z_0))`
/// and `K = k~ + I`:
/// `2^n |det(k + I)|^{-1} e^{i lambda c_0} exp((lambda/2) v J K^{-1}(k~ - I) v)
///  exp(lambda v J K^{-1} S_0) exp(-(lambda/4) S_0 J K^{-1} S_0)`.
pub fn weyl_pi_closed_with(g: &GElement, lambda: f64, eps: f64) -> Result<QuadSymbol> {
    let k = &g.k;
    let sig = k.sig();
    let n = sig.n();
    let d = check_det(k, eps)?;
    let kt = embed_tilde(k);
    let kinv = (&kt + &CMat::identity(2 * n)).inverse()?;
    let jk = &symplectic_j(n) * &kinv;
    let s0 = s_pair(&g.h.z, sig)?;
    let jks = jk.mul_vec(&s0)?;
    let linear: Vec<C64> = jks.iter().map(|v| v * lambda).collect();
    let constant = -lambda / 4.0 * dot(&s0, &jks) + I * lambda * g.h.c;
    QuadSymbol::new(
        re(2f64.powi(n as i32) / d),
        sigma_exponent_j(k, lambda)?,
        linear,
        constant,
    )
}

/// Index layout of `v = (z_1, z_2, conj z_1, conj z_2)`.
struct Slots {
    z1: usize,
    z2: usize,
    zb1: usize,
    zb2: usize,
}

fn slots(k_sig: crate::groups::Signature) -> Slots {
    let (p, n) = (k_sig.p(), k_sig.n());
    Slots {
        z1: 0,
        z2: p,
        zb1: n,
        zb2: n + p,
    }
}

/// `S(sigma(k))(z) = (det A)^{-1} exp((lambda/2)(-|z|^2 - (D'^{-1} C' z_1') . z_2'
///  + (D'^{-1} z_2) . z_2' + (A^{-1} z_1) . z_1' + z_1 . (B' D'^{-1} z_2)))`, primes
/// denoting conjugation.
pub fn berezin_sigma_closed(k: &SUpqElement, lambda: f64) -> Result<QuadSymbol> {
    let sig = k.sig();
    let n = sig.n();
    let sl = slots(sig);
    let det_a = k.a().determinant()?;
    let a_inv = k.a().inverse()?;
    let dbar_inv = k.d().conj().inverse()?;
    let bd = &k.b().conj() * &dbar_inv;
    let h = lambda / 2.0;
    let mut e = GaussExponent::zero(2 * n);
    e.add_diag_terms(0, n, n, re(-h));
    e.add_bilinear_block(sl.zb2, sl.zb1, &(&dbar_inv * &k.c().conj()).scale_re(-h));
    e.add_bilinear_block(sl.zb2, sl.z2, &dbar_inv.scale_re(h));
    e.add_bilinear_block(sl.zb1, sl.z1, &a_inv.scale_re(h));
    e.add_bilinear_block(sl.z1, sl.z2, &bd.scale_re(h));
    e.prefactor = det_a.inv();
    Ok(QuadSymbol::from_exponent(e))
}

/// `S(pi(g))(z) = <sigma(k) e_z, rho(h)^{-1} e_z> / <e_z, e_z>`
/// `= exp(i lambda c_0 - (lambda/4)|z_0|^2 + (lambda/2) z . conj s(z_0)) b_k(z - s(z_0), z) e^{-lambda |z|^2 / 2}`,
/// expanded with `z_0 = (z_0^+, z_0^-)`.
pub fn berezin_pi_closed(g: &GElement, lambda: f64) -> Result<QuadSymbol> {
    let k = &g.k;
    let sig = k.sig();
    let (p, n) = (sig.p(), sig.n());
    let sl = slots(sig);
    let mut sym = berezin_sigma_closed(k, lambda)?.to_exponent();
    let h = lambda / 2.0;
    let s0 = s_involution(&g.h.z, sig)?;
    let a0 = &g.h.z[..p];
    let b0bar = conj_vec(&g.h.z[p..]);
    let a_inv = k.a().inverse()?;
    let dbar_inv = k.d().conj().inverse()?;
    let bd = &k.b().conj() * &dbar_inv;
    // (lambda/2) z . conj s(z_0)
    for j in 0..n {
        sym.lin[j] += s0[j].conj() * h;
    }
    let db0 = dbar_inv.mul_vec(&b0bar)?;
    let aa0 = a_inv.mul_vec(a0)?;
    let a0bd = bd.transpose().mul_vec(a0)?;
    let bdb0 = bd.mul_vec(&b0bar)?;
    for (j, v) in db0.iter().enumerate() {
        sym.lin[sl.zb2 + j] -= v * h;
    }
    for (j, v) in aa0.iter().enumerate() {
        sym.lin[sl.zb1 + j] -= v * h;
    }
    for (j, v) in a0bd.iter().enumerate() {
        sym.lin[sl.z2 + j] -= v * h;
    }
    for (j, v) in bdb0.iter().enumerate() {
        sym.lin[sl.z1 + j] -= v * h;
    }
    let constant = I * lambda * g.h.c - lambda / 4.0 * norm_sqr(&g.h.z) + dot(a0, &bdb0) * h;
    let mut out = QuadSymbol::from_exponent(sym);
    out.constant = constant;
    Ok(out)
}

/// Kernel of `pi(g) = rho(h) sigma(k)`.
pub fn pi_kernel(g: &GElement, params: &FockParams) -> Result<GaussKernel> {
    compose_gauss_kernels(&rho_kernel(&g.h, params)?, &sigma_kernel(&g.k, params)?)
}

// ---------------------------------------------------------------------------
// Derived representations
// ---------------------------------------------------------------------------

/// `S(d sigma(X))` and `W(d sigma(X))`:
/// `W = -(lambda/2)((C' z_1') . z_2' + (D' z_2) . z_2' + (A z_1) . z_1' - z_1 . (B' z_2))`,
/// `S = W - Tr(A)`.
pub fn dsigma_symbols(x: &SUpqAlgebra, lambda: f64) -> (PolySymbol, PolySymbol) {
    let sig = x.sig();
    let n = sig.n();
    let sl = slots(sig);
    let h = -lambda / 2.0;
    let mut e = GaussExponent::zero(2 * n);
    e.add_bilinear_block(sl.zb2, sl.zb1, &x.c().conj().scale_re(h));
    e.add_bilinear_block(sl.zb2, sl.z2, &x.d().conj().scale_re(h));
    e.add_bilinear_block(sl.zb1, sl.z1, &x.a().scale_re(h));
    e.add_bilinear_block(sl.z1, sl.z2, &x.b().conj().scale_re(-h));
    let w = PolySymbol::from_exponent(&e, re(0.0));
    let s = PolySymbol::from_exponent(&e, -x.a().trace());
    (s, w)
}

/// `S(d pi(X))` and `W(d pi(X))` for `X = ((z_0, conj z_0), c_0, Y)`: the
/// `d sigma(Y)` symbols plus `(lambda/2)(conj s(z_0) . z - conj z . s(z_0)) + i lambda c_0`.
pub fn dpi_symbols(x: &GAlgebra, lambda: f64) -> Result<(PolySymbol, PolySymbol)> {
    let sig = x.sig();
    let n = sig.n();
    let s0 = s_involution(&x.z0, sig)?;
    let mut rho = PolySymbol::zero(n);
    for j in 0..n {
        rho.linear[j] = s0[j].conj() * (lambda / 2.0);
        rho.linear[n + j] = -s0[j] * (lambda / 2.0);
    }
    rho.constant = I * lambda * x.c0;
    let (s, w) = dsigma_symbols(&x.y, lambda);
    Ok((s.add(&rho)?, w.add(&rho)?))
}

// ---------------------------------------------------------------------------
// Covariance and tables
// ---------------------------------------------------------------------------

/// `|W(A)(h . z) - W(rho(h)^{-1} A rho(h))(z)|`, both sides in closed form.
pub fn weyl_rho_covariance_check(
    kern: &GaussKernel,
    h: &crate::groups::HeisElement,
    z: &[C64],
    params: &FockParams,
) -> Result<f64> {
    let left = weyl_gaussian(kern)?.eval(&h.act_on_point(z, params.sig())?);
    let conj = compose_gauss_kernels(
        &compose_gauss_kernels(&rho_kernel(&h.inverse(), params)?, kern)?,
        &rho_kernel(h, params)?,
    )?;
    let right = weyl_gaussian(&conj)?.eval(z);
    Ok((left - right).norm())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointValue {
    pub z: WireVector,
    pub value: WireComplex,
}

/// Evaluates `f` at every point, in parallel, keeping the input order.
pub fn point_table<F>(points: &[Vec<C64>], f: F) -> Vec<PointValue>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    points
        .par_iter()
        .map(|z| PointValue {
            z: json::vector_out(z),
            value: json::complex_out(f(z)),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadSymbolWire {
    pub prefactor: WireComplex,
    pub exponent_matrix: WireMatrix,
    pub linear: WireVector,
    pub constant: WireComplex,
}

impl From<&QuadSymbol> for QuadSymbolWire {
    fn from(s: &QuadSymbol) -> Self {
        QuadSymbolWire {
            prefactor: json::complex_out(s.prefactor),
            exponent_matrix: json::matrix_out(&s.exponent_matrix),
            linear: json::vector_out(&s.linear),
            constant: json::complex_out(s.constant),
        }
    }
}

impl TryFrom<QuadSymbolWire> for QuadSymbol {
    type Error = Error;

    fn try_from(w: QuadSymbolWire) -> Result<Self> {
        QuadSymbol::new(
            json::complex_in(w.prefactor)?,
            json::matrix_in_square(&w.exponent_matrix, "QuadSymbol.exponent_matrix")?,
            json::vector_in(&w.linear)?,
            json::complex_in(w.constant)?,
        )
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolySymbolWire {
    pub exponent_matrix: WireMatrix,
    pub linear: WireVector,
    pub constant: WireComplex,
}

impl From<&PolySymbol> for PolySymbolWire {
    fn from(s: &PolySymbol) -> Self {
        PolySymbolWire {
            exponent_matrix: json::matrix_out(&s.quad),
            linear: json::vector_out(&s.linear),
            constant: json::complex_out(s.constant),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::c;
    use crate::fock::{op_from_kernel, quantizer_kernel};
    use crate::groups::{
        g_exp, g_mul, random_algebra, random_heis_rng, random_point, random_supq_rng, supq_exp, HeisElement, Signature,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SIGS: [(usize, usize); 4] = [(1, 1), (2, 1), (1, 2), (2, 2)];

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    fn rotation(t: f64) -> SUpqElement {
        let e = C64::from_polar(1.0, t);
        SUpqElement::from_blocks(
            sig(1, 1),
            CMat::from_diag(&[e]),
            CMat::zeros(1, 1),
            CMat::zeros(1, 1),
            CMat::from_diag(&[e.conj()]),
        )
        .unwrap()
    }

    fn points(rng: &mut ChaCha8Rng, n: usize, r: f64, count: usize) -> Vec<Vec<C64>> {
        (0..count).map(|_| random_point(rng, r, n)).collect()
    }

    #[test]
    fn berezin_of_identity_and_prime() {
        let k = GaussKernel::identity(2, 2.0);
        let z = [c(0.3, 0.7), c(-1.1, 0.2)];
        let w = [c(0.5, -0.3), c(0.0, 0.9)];
        assert!((berezin_s_kernel(&k, &z) - re(1.0)).norm() < 1e-14);
        assert!((berezin_s_prime(&k, &z, &w) - re(1.0)).norm() < 1e-14);
        let s = berezin_symbol_of_kernel(&k);
        assert!((s.eval(&z) - re(1.0)).norm() < 1e-14);
    }

    #[test]
    fn berezin_sigma_matches_kernel_route() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, q) in SIGS {
            let sg = sig(p, q);
            let fp = FockParams::new(sg, 1.6, 4).unwrap();
            for _ in 0..5 {
                let k = random_supq_rng(&mut rng, 0.6, sg);
                let closed = berezin_sigma_closed(&k, fp.lambda()).unwrap();
                let kern = sigma_kernel(&k, &fp).unwrap();
                for z in points(&mut rng, sg.n(), 1.0, 5) {
                    let a = closed.eval(&z);
                    let b = berezin_s_kernel(&kern, &z);
                    assert!((a - b).norm() <= 1e-12 * b.norm());
                    assert!((berezin_s_prime(&kern, &z, &z) - b).norm() <= 1e-12 * b.norm());
                }
            }
        }
        let id = berezin_sigma_closed(&SUpqElement::identity(sig(1, 2)), 2.0).unwrap();
        assert!(id.exponent_matrix.frobenius_norm() < 1e-15);
    }

    #[test]
    fn berezin_op_route_agrees() {
        let sg = sig(1, 1);
        let fp = FockParams::new(sg, 2.0, 14).unwrap();
        let basis = FockBasis::new(&fp);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let k = random_supq_rng(&mut rng, 0.3, sg);
        let op = op_from_kernel(&sigma_kernel(&k, &fp).unwrap(), &fp, &basis).unwrap();
        let closed = berezin_sigma_closed(&k, 2.0).unwrap();
        for z in points(&mut rng, 2, 1.0, 8) {
            let a = berezin_s_op(&op, &basis, &z);
            let b = closed.eval(&z);
            assert!((a - b).norm() <= 1e-6 * b.norm());
        }
    }

    #[test]
    fn prime_is_holomorphic_in_z() {
        let sg = sig(1, 1);
        let fp = FockParams::new(sg, 2.0, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let kern = sigma_kernel(&random_supq_rng(&mut rng, 0.5, sg), &fp).unwrap();
        let (z, w) = (random_point(&mut rng, 0.7, 2), random_point(&mut rng, 0.7, 2));
        let step = 1e-4;
        for j in 0..2 {
            let shift = |d: C64| {
                let mut zz = z.clone();
                zz[j] += d;
                berezin_s_prime(&kern, &zz, &w)
            };
            let dx = (shift(re(step)) - shift(re(-step))) / (2.0 * step);
            let dy = (shift(c(0.0, step)) - shift(c(0.0, -step))) / (2.0 * step);
            // d/d conj z = (d/dx + i d/dy) / 2
            assert!(((dx + I * dy) * 0.5).norm() < 1e-6);
        }
    }

    #[test]
    fn heat_transform_properties() {
        let one = QuadSymbol::constant_one(2);
        for t in [0.1, 0.5, 2.0] {
            let b = berezin_transform(&one, t).unwrap();
            assert!((b.eval(&[c(0.4, 0.1), c(-0.3, 0.9)]) - re(1.0)).norm() < 1e-12);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let k = random_supq_rng(&mut rng, 0.5, sig(1, 1));
        let w = weyl_sigma_closed(&k, 2.0).unwrap();
        let a = berezin_transform(&berezin_transform(&w, 0.05).unwrap(), 0.07).unwrap();
        let b = berezin_transform(&w, 0.12).unwrap();
        assert!(a.max_rel_dist(&b, &points(&mut rng, 2, 1.0, 6)) < 1e-10);
        assert!(berezin_transform(&one, 0.0).is_err());
    }

    #[test]
    fn heat_on_quadratic_polynomial() {
        // f = z conj z on C^1 for lambda = 1.5
        let lambda: f64 = 1.5;
        let t = 1.0 / (2.0 * lambda);
        let mut f = PolySymbol {
            constant: re(0.0),
            quad: CMat::zeros(2, 2),
            linear: vec![re(0.0); 2],
        };
        f.quad[(0, 1)] = re(0.5);
        f.quad[(1, 0)] = re(0.5);
        let hf = f.heat(t);
        assert!((hf.constant - re(2.0 / lambda)).norm() < 1e-15);
        // quadrature of (Bf)(z) = int f(w) e^{-lambda |z - w|^2 / 2} dm_lambda(w)
        let z = c(0.6, -0.4);
        let rule = GHRule::new(40).unwrap();
        let width = (2.0 / lambda).sqrt();
        let v = gh_integrate(
            |x| {
                let w = c(x[0], x[1]);
                re(w.norm_sqr() * m_lambda_density(lambda, 1) * (-lambda * (z - w).norm_sqr() / 2.0).exp())
            },
            2,
            &rule,
            width,
            1e7,
        )
        .unwrap();
        assert!((v - hf.eval(&[z])).norm() < 1e-10);
        // derivative in eps of the Gaussian transform of exp(eps z conj z)
        let eps = 1e-5;
        let g = |e: f64| {
            let mut m = CMat::zeros(2, 2);
            m[(0, 1)] = re(e / 2.0);
            m[(1, 0)] = re(e / 2.0);
            berezin_transform(&QuadSymbol::new(re(1.0), m, vec![re(0.0); 2], re(0.0)).unwrap(), t)
                .unwrap()
                .eval(&[z])
        };
        let fd = (g(eps) - g(-eps)) / (2.0 * eps);
        assert!((fd - hf.eval(&[z])).norm() < 1e-7);
    }

    #[test]
    fn weyl_of_identity_and_rho() {
        let fp = FockParams::new(sig(1, 1), 2.0, 4).unwrap();
        let rule = GHRule::new(40).unwrap();
        let z = [c(0.2, -0.5), c(0.7, 0.1)];
        let id = GaussKernel::identity(2, 2.0);
        assert!((weyl_numeric(&id, &z, &rule, 1e7).unwrap() - re(1.0)).norm() < 1e-10);
        assert!((weyl_gaussian(&id).unwrap().eval(&z) - re(1.0)).norm() < 1e-13);
        let h = HeisElement::new(vec![c(0.3, 0.2), c(-0.4, 0.1)], 0.25).unwrap();
        let kern = rho_kernel(&h, &fp).unwrap();
        let s0 = s_involution(&h.z, fp.sig()).unwrap();
        let lambda = 2.0;
        let want = C64::from_polar(1.0, lambda * h.c)
            * ((dot(&z, &conj_vec(&s0)) - dot(&conj_vec(&z), &s0)) * (lambda / 2.0)).exp();
        assert!((weyl_numeric(&kern, &z, &rule, 1e7).unwrap() - want).norm() < 1e-8);
        assert!((weyl_gaussian(&kern).unwrap().eval(&z) - want).norm() < 1e-12);
    }

    #[test]
    fn weyl_sigma_rotation_example() {
        let lambda = 1.3;
        for t in [0.3, 1.1, -2.0] {
            let w = weyl_sigma_closed(&rotation(t), lambda).unwrap();
            for z in [[c(0.3, 0.1), c(-0.5, 0.4)], [c(0.0, 0.0), c(1.0, 0.0)]] {
                let want = 2.0 / (1.0 + f64::cos(t)) * (-I * lambda * norm_sqr(&z) * (t / 2.0).tan()).exp();
                assert!((w.eval(&z) - want).norm() < 1e-12);
            }
        }
        let id = weyl_sigma_closed(&SUpqElement::identity(sig(2, 1)), 2.0).unwrap();
        assert!((id.prefactor - re(1.0)).norm() < 1e-15 && id.exponent_matrix.frobenius_norm() < 1e-15);
    }

    #[test]
    fn weyl_sigma_forms_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut checked = 0;
        while checked < 100 {
            let (p, q) = SIGS[checked % 4];
            let k = random_supq_rng(&mut rng, 1.0, sig(p, q));
            if k.det_k_plus_one() <= 0.1 {
                continue;
            }
            let (a, b) = weyl_sigma_forms(&k, 2.0, DET_EPSILON).unwrap();
            assert!(a.exponent_dist(&b) <= 1e-10, "forms differ by {}", a.exponent_dist(&b));
            checked += 1;
        }
    }

    #[test]
    fn weyl_sigma_matches_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let rule = GHRule::new(40).unwrap();
        let fp = FockParams::new(sig(1, 1), 2.0, 4).unwrap();
        let mut done = 0;
        while done < 6 {
            let k = random_supq_rng(&mut rng, 0.8, fp.sig());
            if k.det_k_plus_one() <= 0.3 {
                continue;
            }
            let closed = weyl_sigma_closed(&k, 2.0).unwrap();
            let kern = sigma_kernel(&k, &fp).unwrap();
            let gauss = weyl_gaussian(&kern).unwrap();
            let z = random_point(&mut rng, 1.0, 2);
            let want = closed.eval(&z);
            assert!((gauss.eval(&z) - want).norm() <= 1e-10 * want.norm());
            let num = weyl_numeric(&kern, &z, &rule, 1e7).unwrap();
            assert!((num - want).norm() <= 1e-6 * want.norm());
            if done == 0 {
                let at0 = weyl_numeric(&kern, &[re(0.0), re(0.0)], &rule, 1e7).unwrap();
                assert!((at0 - re(4.0 / k.det_k_plus_one())).norm() <= 1e-6 * at0.norm());
            }
            done += 1;
        }
        // closed route for larger signatures
        for (p, q) in [(2, 1), (1, 2), (2, 2)] {
            let sg = sig(p, q);
            let fp = FockParams::new(sg, 1.4, 2).unwrap();
            let k = random_supq_rng(&mut rng, 0.7, sg);
            let gauss = weyl_gaussian(&sigma_kernel(&k, &fp).unwrap()).unwrap();
            let closed = weyl_sigma_closed(&k, 1.4).unwrap();
            assert!(gauss.max_rel_dist(&closed, &points(&mut rng, sg.n(), 1.0, 5)) < 1e-10);
        }
    }

    #[test]
    fn weyl_sigma_refuses_singular() {
        // k = diag(-1, -1) has det(k + I) = 0
        let k = rotation(PI);
        assert!(matches!(weyl_sigma_closed(&k, 2.0), Err(Error::Precondition { .. })));
    }

    #[test]
    fn weyl_pi_examples_and_oracle() {
        let lambda = 1.7;
        let sg = sig(1, 1);
        for (t, z0, c0) in [(0.4, [c(0.3, -0.2), c(0.5, 0.1)], 0.6), (-1.2, [c(-0.1, 0.4), c(0.2, 0.3)], -0.3)] {
            let g = GElement::new(HeisElement::new(z0.to_vec(), c0).unwrap(), rotation(t)).unwrap();
            let w = weyl_pi_closed(&g, lambda).unwrap();
            let s0 = s_involution(&z0, sg).unwrap();
            let e = C64::from_polar(1.0, t);
            let tan = (t / 2.0).tan();
            for z in [[c(0.2, 0.1), c(-0.4, 0.6)], [c(1.0, -0.3), c(0.0, 0.2)]] {
                let want = 2.0 / (1.0 + t.cos())
                    * C64::from_polar(1.0, lambda * c0)
                    * (-I * lambda * norm_sqr(&z) * tan).exp()
                    * (lambda / (re(1.0) + e) * (e * dot(&z, &conj_vec(&s0)) - dot(&conj_vec(&z), &s0))).exp()
                    * (-I * lambda / 4.0 * norm_sqr(&z0) * tan).exp();
                assert!((w.eval(&z) - want).norm() <= 1e-12 * want.norm());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let rule = GHRule::new(40).unwrap();
        let fp = FockParams::new(sg, 2.0, 4).unwrap();
        for _ in 0..3 {
            let k = random_supq_rng(&mut rng, 0.6, sg);
            let h = random_heis_rng(&mut rng, 0.6, 2);
            let g = GElement::new(h, k.clone()).unwrap();
            let closed = weyl_pi_closed(&g, 2.0).unwrap();
            let kern = pi_kernel(&g, &fp).unwrap();
            let z = random_point(&mut rng, 1.0, 2);
            let want = closed.eval(&z);
            assert!((weyl_numeric(&kern, &z, &rule, 1e7).unwrap() - want).norm() <= 1e-6 * want.norm());
            let bare = GElement::new(HeisElement::identity(2), k.clone()).unwrap();
            let ws = weyl_sigma_closed(&k, 2.0).unwrap();
            assert!(weyl_pi_closed(&bare, 2.0).unwrap().max_rel_dist(&ws, &[z.clone()]) < 1e-14);
        }
    }

    #[test]
    fn weyl_pi_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let sg = sig(1, 2);
        let fp = FockParams::new(sg, 1.1, 2).unwrap();
        for _ in 0..3 {
            let g1 = GElement::new(random_heis_rng(&mut rng, 0.5, 3), random_supq_rng(&mut rng, 0.4, sg)).unwrap();
            let g2 = GElement::new(random_heis_rng(&mut rng, 0.5, 3), random_supq_rng(&mut rng, 0.4, sg)).unwrap();
            let g12 = g_mul(&g1, &g2).unwrap();
            let kern = compose_gauss_kernels(&pi_kernel(&g1, &fp).unwrap(), &pi_kernel(&g2, &fp).unwrap()).unwrap();
            let w = weyl_gaussian(&kern).unwrap();
            let closed = weyl_pi_closed(&g12, 1.1).unwrap();
            assert!(w.max_rel_dist(&closed, &points(&mut rng, 3, 1.0, 5)) < 1e-9);
        }
    }

    #[test]
    fn berezin_pi_matches_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (p, q) in SIGS {
            let sg = sig(p, q);
            let fp = FockParams::new(sg, 1.9, 2).unwrap();
            for _ in 0..3 {
                let g = GElement::new(random_heis_rng(&mut rng, 0.8, sg.n()), random_supq_rng(&mut rng, 0.6, sg)).unwrap();
                let closed = berezin_pi_closed(&g, fp.lambda()).unwrap();
                let kern = pi_kernel(&g, &fp).unwrap();
                for z in points(&mut rng, sg.n(), 1.0, 4) {
                    let b = berezin_s_kernel(&kern, &z);
                    assert!((closed.eval(&z) - b).norm() <= 1e-12 * b.norm().max(1.0));
                }
                let bare = GElement::new(HeisElement::identity(sg.n()), g.k.clone()).unwrap();
                let s = berezin_sigma_closed(&g.k, fp.lambda()).unwrap();
                assert!(berezin_pi_closed(&bare, fp.lambda()).unwrap().max_rel_dist(&s, &points(&mut rng, sg.n(), 1.0, 3)) < 1e-14);
            }
        }
    }

    #[test]
    fn polar_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for (p, q) in SIGS {
            let sg = sig(p, q);
            let lambda = 1.3;
            let k = random_supq_rng(&mut rng, 0.6, sg);
            let lhs = berezin_transform(&weyl_sigma_closed(&k, lambda).unwrap(), 1.0 / (4.0 * lambda)).unwrap();
            let rhs = berezin_sigma_closed(&k, lambda).unwrap();
            assert!(lhs.max_rel_dist(&rhs, &points(&mut rng, sg.n(), 1.0, 6)) < 1e-8);
        }
    }

    #[test]
    fn adjoint_symbols_conjugate() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let sg = sig(2, 1);
        let fp = FockParams::new(sg, 2.0, 2).unwrap();
        let kerns = [
            sigma_kernel(&random_supq_rng(&mut rng, 0.6, sg), &fp).unwrap(),
            quantizer_kernel(&random_point(&mut rng, 0.6, 3), &fp).unwrap(),
        ];
        for kern in &kerns {
            for z in points(&mut rng, 3, 1.0, 4) {
                let a = berezin_s_kernel(&kern.adjoint(), &z);
                let b = berezin_s_kernel(kern, &z).conj();
                assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
            }
        }
    }

    #[test]
    fn dsigma_symbols_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for (p, q) in SIGS {
            let sg = sig(p, q);
            let lambda = 1.5;
            let (s0, w0) = dsigma_symbols(&SUpqAlgebra::zero(sg), lambda);
            assert_eq!(s0, PolySymbol::zero(sg.n()));
            assert_eq!(w0, PolySymbol::zero(sg.n()));
            let x = random_algebra(&mut rng, 0.7, sg);
            let y = random_algebra(&mut rng, 0.7, sg);
            let (s, w) = dsigma_symbols(&x, lambda);
            let t = 1e-4;
            for z in points(&mut rng, sg.n(), 1.0, 4) {
                assert!((w.eval(&z) - s.eval(&z) - x.a().trace()).norm() < 1e-14);
                let plus = weyl_sigma_closed(&supq_exp(&x.scale(t)).unwrap(), lambda).unwrap().eval(&z);
                let minus = weyl_sigma_closed(&supq_exp(&x.scale(-t)).unwrap(), lambda).unwrap().eval(&z);
                let fd = (plus - minus) / (2.0 * t);
                assert!((fd - w.eval(&z)).norm() <= 1e-5, "fd {} vs {}", fd, w.eval(&z));
                // S from the Berezin closed form
                let plus = berezin_sigma_closed(&supq_exp(&x.scale(t)).unwrap(), lambda).unwrap().eval(&z);
                let minus = berezin_sigma_closed(&supq_exp(&x.scale(-t)).unwrap(), lambda).unwrap().eval(&z);
                assert!(((plus - minus) / (2.0 * t) - s.eval(&z)).norm() <= 1e-5);
                // linearity
                let (_, wxy) = dsigma_symbols(&x.add(&y.scale(0.3)).unwrap(), lambda);
                let (_, wy) = dsigma_symbols(&y, lambda);
                let lin = w.add(&wy.scale(re(0.3))).unwrap();
                assert!((wxy.eval(&z) - lin.eval(&z)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn dpi_symbols_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for (p, q) in SIGS {
            let sg = sig(p, q);
            let n = sg.n();
            let lambda = 1.2;
            let y = random_algebra(&mut rng, 0.6, sg);
            let x = GAlgebra::new(random_point(&mut rng, 0.6, n), 0.4, y.clone()).unwrap();
            let (s, w) = dpi_symbols(&x, lambda).unwrap();
            let bare = GAlgebra::new(vec![re(0.0); n], 0.0, y.clone()).unwrap();
            let (sb, wb) = dpi_symbols(&bare, lambda).unwrap();
            let (ss, ws) = dsigma_symbols(&y, lambda);
            let t = 1e-4;
            let s0 = s_involution(&x.z0, sg).unwrap();
            let heis = GAlgebra::new(x.z0.clone(), x.c0, SUpqAlgebra::zero(sg)).unwrap();
            let (_, wh) = dpi_symbols(&heis, lambda).unwrap();
            for z in points(&mut rng, n, 1.0, 3) {
                assert!((sb.eval(&z) - ss.eval(&z)).norm() < 1e-15);
                assert!((wb.eval(&z) - ws.eval(&z)).norm() < 1e-15);
                assert!((w.eval(&z) - s.eval(&z) - y.a().trace()).norm() < 1e-14);
                let want = I * lambda * x.c0 + (dot(&conj_vec(&s0), &z) - dot(&conj_vec(&z), &s0)) * (lambda / 2.0);
                assert!((wh.eval(&z) - want).norm() < 1e-14);
                let plus = weyl_pi_closed(&g_exp(&x, t).unwrap(), lambda).unwrap().eval(&z);
                let minus = weyl_pi_closed(&g_exp(&x, -t).unwrap(), lambda).unwrap().eval(&z);
                assert!(((plus - minus) / (2.0 * t) - w.eval(&z)).norm() <= 1e-5);
                let plus = berezin_pi_closed(&g_exp(&x, t).unwrap(), lambda).unwrap().eval(&z);
                let minus = berezin_pi_closed(&g_exp(&x, -t).unwrap(), lambda).unwrap().eval(&z);
                assert!(((plus - minus) / (2.0 * t) - s.eval(&z)).norm() <= 1e-5);
            }
        }
    }

    #[test]
    fn weyl_rho_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let sg = sig(1, 1);
        let fp = FockParams::new(sg, 2.0, 2).unwrap();
        let kern = sigma_kernel(&random_supq_rng(&mut rng, 0.5, sg), &fp).unwrap();
        let z = random_point(&mut rng, 0.8, 2);
        assert!(weyl_rho_covariance_check(&kern, &HeisElement::identity(2), &z, &fp).unwrap() < 1e-12);
        for _ in 0..4 {
            let h = random_heis_rng(&mut rng, 0.6, 2);
            let z = random_point(&mut rng, 0.8, 2);
            assert!(weyl_rho_covariance_check(&kern, &h, &z, &fp).unwrap() < 1e-9);
            let q = quantizer_kernel(&random_point(&mut rng, 0.5, 2), &fp).unwrap();
            // Omega(u) is not trace class; its symbol is a delta, so the closed
            // route must refuse the divergent integral
            assert!(weyl_rho_covariance_check(&q, &h, &z, &fp).is_err());
        }
    }

    #[test]
    fn point_table_order_and_json() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let pts = points(&mut rng, 2, 1.0, 20);
        let w = weyl_sigma_closed(&random_supq_rng(&mut rng, 0.5, sig(1, 1)), 2.0).unwrap();
        let table = point_table(&pts, |z| w.eval(z));
        for (row, z) in table.iter().zip(&pts) {
            assert_eq!(row.value, json::complex_out(w.eval(z)));
        }
        let s = serde_json::to_string(&QuadSymbolWire::from(&w)).unwrap();
        let back = QuadSymbol::try_from(serde_json::from_str::<QuadSymbolWire>(&s).unwrap()).unwrap();
        assert_eq!(back, w);
    }
}
