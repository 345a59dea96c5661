//! Numerical certificates for the block-matrix identities behind the Weyl
//! symbol formulas.

use serde::{Deserialize, Serialize};

use crate::cmatrix::{c, eig_hermitian, re, CMat, C64};
use crate::error::{dim_err, Result};
use crate::groups::{embed_tilde, s_pair, swap_j1, symplectic_j, SUpqElement, Signature};
use crate::symbols::prep_matrices;

/// Default pass threshold for identity residuals.
pub const LEMMA_TOL: f64 = 1e-9;
/// `check_prep3` asserts positivity only above this `|det(k + I)|`.
pub const PREP3_DET_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// passes when `value <= tolerance`
    Residual,
    /// passes when `value > 0`
    Positive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub kind: CheckKind,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<SUpqElement>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl LemmaReport {
    fn new(lemma: &str, tol: f64) -> Builder {
        Builder {
            report: LemmaReport {
                lemma: lemma.to_string(),
                checks: Vec::new(),
                pass: true,
                seed: None,
                k: None,
                notes: Vec::new(),
            },
            tol,
        }
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.kind == CheckKind::Residual)
            .map(|c| c.value)
            .fold(0.0, f64::max)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

struct Builder {
    report: LemmaReport,
    tol: f64,
}

impl Builder {
    fn residual(&mut self, name: &str, value: f64) {
        let pass = value <= self.tol;
        self.push(name, CheckKind::Residual, value, pass);
    }

    fn positive(&mut self, name: &str, value: f64) {
        self.push(name, CheckKind::Positive, value, value > 0.0);
    }

    fn push(&mut self, name: &str, kind: CheckKind, value: f64, pass: bool) {
        // NaN never passes
        let pass = pass && !value.is_nan();
        self.report.pass &= pass;
        self.report.checks.push(IdentityCheck {
            name: name.to_string(),
            kind,
            value,
            tolerance: self.tol,
            pass,
        });
    }

    fn note(&mut self, s: String) {
        self.report.notes.push(s);
    }

    fn fail(&mut self, name: &str, why: String) {
        self.push(name, CheckKind::Residual, f64::INFINITY, false);
        self.note(why);
    }

    fn finish(self, k: Option<&SUpqElement>) -> LemmaReport {
        let mut r = self.report;
        r.k = k.cloned();
        r
    }
}

/// `||a - b||_F / max(1, ||b||_F)`.
fn rel(a: &CMat, b: &CMat) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(1.0)
}

/// The change of variables `U` on `C^p x C^q` with real coordinates ordered
/// `(x_1, y_1, x_2, y_2)`.
pub fn u_matrix(sig: Signature) -> CMat {
    let (p, q) = (sig.p(), sig.q());
    let n = p + q;
    let mut u = CMat::zeros(2 * n, 2 * n);
    for j in 0..p {
        u[(j, j)] = re(1.0);
        u[(j, p + j)] = c(0.0, 1.0);
        u[(n + j, j)] = re(1.0);
        u[(n + j, p + j)] = c(0.0, -1.0);
    }
    for j in 0..q {
        u[(p + j, 2 * p + j)] = re(1.0);
        u[(p + j, 2 * p + q + j)] = c(0.0, 1.0);
        u[(n + p + j, 2 * p + j)] = re(1.0);
        u[(n + p + j, 2 * p + q + j)] = c(0.0, -1.0);
    }
    u
}

/// `(-R, 2I - S; S^t - 2I, T) M^{-1} (-R, S - 2I; 2I - S^t, T) = (R + 4 gamma, 4I - S - 4 beta^t; 4I - S^t - 4 beta, T + 4 alpha)`
/// where `M = (R S; S^t T)` and `M^{-1} = (alpha beta; beta^t gamma)`.
pub fn check_prep1(r: &CMat, s: &CMat, t: &CMat, tol: f64) -> Result<LemmaReport> {
    let n = r.rows();
    if !r.is_square() || s.rows() != n || s.cols() != n || t.rows() != n || t.cols() != n {
        return Err(dim_err("check_prep1", n, s.rows().max(t.rows())));
    }
    let mut b = LemmaReport::new("prep1", tol);
    let scale = |m: &CMat| m.frobenius_norm().max(1.0);
    b.residual("R symmetric", r.symmetry_residual() / scale(r));
    b.residual("T symmetric", t.symmetry_residual() / scale(t));
    let m = CMat::block_compose(r, s, &s.transpose(), t)?;
    let minv = match m.inverse() {
        Ok(x) => x,
        Err(e) => {
            b.fail("(R S; S^t T) invertible", e.to_string());
            return Ok(b.finish(None));
        }
    };
    let (alpha, beta, _, gamma) = minv.block_extract(n, n)?;
    let i2 = CMat::identity(n).scale_re(2.0);
    let i4 = CMat::identity(n).scale_re(4.0);
    let left = CMat::block_compose(&(-r), &(&i2 - s), &(&s.transpose() - &i2), t)?;
    let right = CMat::block_compose(&(-r), &(s - &i2), &(&i2 - &s.transpose()), t)?;
    let lhs = &(&left * &minv) * &right;
    let rhs = CMat::block_compose(
        &(r + &gamma.scale_re(4.0)),
        &(&(&i4 - s) - &beta.transpose().scale_re(4.0)),
        &(&(&i4 - &s.transpose()) - &beta.scale_re(4.0)),
        &(t + &alpha.scale_re(4.0)),
    )?;
    b.residual("triple product identity", rel(&lhs, &rhs));
    Ok(b.finish(None))
}

/// Parts (1)-(3) of the factorization of `k~ + I` through `M`.
pub fn check_prep2(k: &SUpqElement, tol: f64) -> Result<LemmaReport> {
    let sig = k.sig();
    let n = sig.n();
    let mut b = LemmaReport::new("prep2", tol);
    let prep = match prep_matrices(k) {
        Ok(p) => p,
        Err(e) => {
            b.fail("A, conj D invertible", e.to_string());
            return Ok(b.finish(Some(k)));
        }
    };
    let kt = embed_tilde(k);
    let id2 = CMat::identity(2 * n);
    let kt_plus = &kt + &id2;
    // P = diag(A, conj D), Q = (0 B; conj C 0)
    let p_blk = CMat::block_diag(k.a(), &k.d().conj());
    let q_blk = CMat::block_compose(
        &CMat::zeros(sig.p(), sig.p()),
        k.b(),
        &k.c().conj(),
        &CMat::zeros(sig.q(), sig.q()),
    )?;
    let left = CMat::block_compose(&CMat::zeros(n, n), &p_blk, &CMat::identity(n), &q_blk.conj())?;
    b.residual("(0 P; I conj Q) M = k~ + I", rel(&(&left * &prep.m), &kt_plus));
    let det_m = prep.m.determinant()?;
    let det_kt = kt_plus.determinant()?;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let formula = det_kt * sign / (k.a().determinant()? * k.d().conj().determinant()?);
    b.residual(
        "det M = (-1)^n (det A det conj D)^{-1} det(k~ + I)",
        (det_m - formula).norm() / formula.norm().max(1.0),
    );
    let dk = k.det_k_plus_one();
    b.residual(
        "det(k~ + I) = |det(k + I)|^2",
        (det_kt - re(dk * dk)).norm() / (dk * dk).max(1.0),
    );
    if dk > 0.0 {
        match (prep.m.inverse(), kt_plus.inverse()) {
            (Ok(minv), Ok(kinv)) => {
                let (alpha, beta, _, gamma) = minv.block_extract(n, n)?;
                let half = CMat::identity(n).scale_re(0.5);
                let lhs = CMat::block_compose(&gamma, &(&half - &beta.transpose()), &(&half - &beta), &alpha)?;
                let rhs = (&(&symplectic_j(n) * &kinv) * &(&kt - &id2)).scale_re(0.5);
                b.residual("(gamma, I/2 - beta^t; I/2 - beta, alpha) = J (k~ + I)^{-1} (k~ - I) / 2", rel(&lhs, &rhs));
            }
            (Err(e), _) | (_, Err(e)) => b.fail("part (3) inverses", e.to_string()),
        }
    } else {
        b.note("part (3) skipped: det(k + I) = 0".into());
    }
    Ok(b.finish(Some(k)))
}

/// Unitarity of `M' = M - J_1` and positive definiteness of `Re(U^t M U)`.
pub fn check_prep3(k: &SUpqElement, tol: f64) -> Result<LemmaReport> {
    let sig = k.sig();
    let n = sig.n();
    let mut b = LemmaReport::new("prep3", tol);
    let u = u_matrix(sig);
    let j1 = swap_j1(n);
    b.residual("U U* = 2I", rel(&(&u * &u.adjoint()), &CMat::identity(2 * n).scale_re(2.0)));
    b.residual("U U^t = 2 J_1", rel(&(&u * &u.transpose()), &j1.scale_re(2.0)));
    let prep = match prep_matrices(k) {
        Ok(p) => p,
        Err(e) => {
            b.fail("A, conj D invertible", e.to_string());
            return Ok(b.finish(Some(k)));
        }
    };
    let mp = &prep.m - &j1;
    b.residual("M' M'* = I", rel(&(&mp * &mp.adjoint()), &CMat::identity(2 * n)));
    let dk = k.det_k_plus_one();
    if dk > PREP3_DET_FLOOR {
        let nmat = &(&u.transpose() * &prep.m) * &u;
        let real = CMat::from_fn(2 * n, 2 * n, |i, j| re(nmat[(i, j)].re));
        // Re(N) is symmetric up to rounding
        let min = eig_hermitian(&real.symmetrized())?[0];
        b.positive("Re(U^t M U) positive definite", min);
    } else {
        b.note(format!("positivity not asserted: |det(k + I)| = {dk:.3e}"));
    }
    Ok(b.finish(Some(k)))
}

/// `(s(z'), conj s(z')) = (k~ - I)(s(z), conj s(z))` for `z' = (k - I) z`,
/// `k~ J k~^t = J`, `k~^t J k~ = J` and `phi(k~^t) J = J phi(k~^{-1})`.
pub fn check_prepth(k: &SUpqElement, z: &[C64], tol: f64) -> Result<LemmaReport> {
    let sig = k.sig();
    let n = sig.n();
    if z.len() != n {
        return Err(dim_err("check_prepth", n, z.len()));
    }
    let mut b = LemmaReport::new("prepth", tol);
    let kt = embed_tilde(k);
    let id2 = CMat::identity(2 * n);
    let j = symplectic_j(n);
    let kz = k.apply(z)?;
    let zp: Vec<C64> = kz.iter().zip(z).map(|(a, b)| a - b).collect();
    let lhs = s_pair(&zp, sig)?;
    let rhs = (&kt - &id2).mul_vec(&s_pair(z, sig)?)?;
    let num: f64 = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let den = rhs.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    b.residual("s-pair of (k - I) z", num / den);
    b.residual("k~ J k~^t = J", rel(&(&(&kt * &j) * &kt.transpose()), &j));
    b.residual("k~^t J k~ = J", rel(&(&(&kt.transpose() * &j) * &kt), &j));
    let kt_t = kt.transpose();
    let kt_inv = kt.inverse()?;
    let cubic = |x: &CMat| &(&(x * x) * x) - x;
    b.residual("phi(k~^t) J = J phi(k~^{-1}), phi = x^3 - x", rel(&(&cubic(&kt_t) * &j), &(&j * &cubic(&kt_inv))));
    let cayley = |x: &CMat| -> Result<CMat> { Ok(&(x - &id2) * &(x + &id2).inverse()?) };
    match (cayley(&kt_t), cayley(&kt_inv)) {
        (Ok(a), Ok(c_)) => b.residual("phi(k~^t) J = J phi(k~^{-1}), phi = (x - I)(x + I)^{-1}", rel(&(&a * &j), &(&j * &c_))),
        (Err(e), _) | (_, Err(e)) => b.fail("k~ + I invertible", e.to_string()),
    }
    Ok(b.finish(Some(k)))
}
