//! The Heisenberg group `H_n`, the group `SU(p,q)` with its Lie algebra,
//! and the semidirect product `G = H_n x| SU(p,q)`.
//!
//! Vectors are columns and matrices act by left multiplication. A
//! Heisenberg element stores `z` only; the conjugate half of the pair
//! `(z, conj z)` is implicit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cmatrix::{c, conj_vec, dot, re, CMat, C64, I};
use crate::error::{dim_err, Error, Result};
use crate::gaussian::gauss_legendre;
use crate::json::{self, WireMatrix, WireVector};

/// Default tolerance for the `SU(p,q)` membership relations.
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    p: usize,
    q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!(
                "signature needs p >= 1 and q >= 1, got ({p}, {q})"
            )));
        }
        Ok(Signature { p, q })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// `J_0 = diag(I_p, -I_q)`.
    pub fn j0(&self) -> CMat {
        let d: Vec<C64> = (0..self.n())
            .map(|i| if i < self.p { re(1.0) } else { re(-1.0) })
            .collect();
        CMat::from_diag(&d)
    }
}

/// `s(z) = (z^+, conj z^-)`.
pub fn s_involution(z: &[C64], sig: Signature) -> Result<Vec<C64>> {
    if z.len() != sig.n() {
        return Err(dim_err("s_involution", sig.n(), z.len()));
    }
    Ok(z.iter()
        .enumerate()
        .map(|(i, v)| if i < sig.p() { *v } else { v.conj() })
        .collect())
}

/// The stacked vector `(s(z), conj s(z))` of length `2n`.
pub fn s_pair(z: &[C64], sig: Signature) -> Result<Vec<C64>> {
    let s = s_involution(z, sig)?;
    let mut out = s.clone();
    out.extend(conj_vec(&s));
    Ok(out)
}

/// The symplectic form evaluated on conjugate pairs,
/// `(i/2)(z J_0 conj z' - z' J_0 conj z)`.
pub fn omega(z: &[C64], zp: &[C64], sig: Signature) -> Result<f64> {
    let n = sig.n();
    if z.len() != n || zp.len() != n {
        return Err(dim_err("omega", n, z.len().max(zp.len())));
    }
    let form = |a: &[C64], b: &[C64]| -> C64 {
        (0..n)
            .map(|j| {
                let s = if j < sig.p() { 1.0 } else { -1.0 };
                a[j] * b[j].conj() * s
            })
            .sum()
    };
    let val = I * 0.5 * (form(z, zp) - form(zp, z));
    let scale = 1.0 + z.iter().chain(zp).map(|v| v.norm_sqr()).sum::<f64>();
    debug_assert!(val.im.abs() <= 1e-14 * scale, "omega not real: {val}");
    Ok(val.re)
}

// ---------------------------------------------------------------------------
// SU(p,q)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "BlockWire", try_from = "BlockWire")]
pub struct SUpqElement {
    sig: Signature,
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
}

/// Per-relation Frobenius residuals of the `SU(p,q)` membership test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SUpqResiduals {
    pub aa_minus_bb: f64,
    pub cc_minus_dd: f64,
    pub a_a_minus_c_c: f64,
    pub b_b_minus_d_d: f64,
    pub a_b_minus_c_d: f64,
    pub b_d_minus_a_c: f64,
    pub det_minus_one: f64,
    pub det_d_minus_conj_det_a: f64,
}

impl SUpqResiduals {
    pub fn max(&self) -> f64 {
        [
            self.aa_minus_bb,
            self.cc_minus_dd,
            self.a_a_minus_c_c,
            self.b_b_minus_d_d,
            self.a_b_minus_c_d,
            self.b_d_minus_a_c,
            self.det_minus_one,
            self.det_d_minus_conj_det_a,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

impl SUpqElement {
    pub fn identity(sig: Signature) -> Self {
        SUpqElement {
            sig,
            a: CMat::identity(sig.p()),
            b: CMat::zeros(sig.p(), sig.q()),
            c: CMat::zeros(sig.q(), sig.p()),
            d: CMat::identity(sig.q()),
        }
    }

    /// Wraps blocks without validating membership; see [`Self::validate`].
    pub fn from_blocks(sig: Signature, a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let (p, q) = (sig.p(), sig.q());
        let shapes = [
            (a.rows(), a.cols(), p, p),
            (b.rows(), b.cols(), p, q),
            (c.rows(), c.cols(), q, p),
            (d.rows(), d.cols(), q, q),
        ];
        for (r, cl, er, ec) in shapes {
            if r != er || cl != ec {
                return Err(dim_err("SUpqElement", format!("{er}x{ec}"), format!("{r}x{cl}")));
            }
        }
        Ok(SUpqElement { sig, a, b, c, d })
    }

    pub fn from_matrix(sig: Signature, m: &CMat) -> Result<Self> {
        if m.rows() != sig.n() || m.cols() != sig.n() {
            return Err(dim_err("SUpqElement", sig.n(), m.rows()));
        }
        let (a, b, c, d) = m.block_extract(sig.p(), sig.p())?;
        Ok(SUpqElement { sig, a, b, c, d })
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }
    pub fn a(&self) -> &CMat {
        &self.a
    }
    pub fn b(&self) -> &CMat {
        &self.b
    }
    pub fn c(&self) -> &CMat {
        &self.c
    }
    pub fn d(&self) -> &CMat {
        &self.d
    }

    pub fn matrix(&self) -> CMat {
        CMat::block_compose(&self.a, &self.b, &self.c, &self.d).expect("block shapes checked at construction")
    }

    pub fn validate(&self) -> SUpqResiduals {
        supq_validate(self)
    }

    /// `k^{-1} = J_0 k^* J_0`, read off the defining relation `k^* J_0 k = J_0`.
    pub fn inverse(&self) -> Self {
        let j0 = self.sig.j0();
        let inv = &(&j0 * &self.matrix().adjoint()) * &j0;
        SUpqElement::from_matrix(self.sig, &inv).expect("shape preserved")
    }

    pub fn mul(&self, other: &SUpqElement) -> Result<Self> {
        if self.sig != other.sig {
            return Err(dim_err("SUpqElement::mul", format!("{:?}", self.sig), format!("{:?}", other.sig)));
        }
        SUpqElement::from_matrix(self.sig, &(&self.matrix() * &other.matrix()))
    }

    pub fn apply(&self, z: &[C64]) -> Result<Vec<C64>> {
        self.matrix().mul_vec(z)
    }

    /// `|det(k + I_n)|`, the quantity every Weyl-symbol formula divides by.
    pub fn det_k_plus_one(&self) -> f64 {
        let m = &self.matrix() + &CMat::identity(self.sig.n());
        m.determinant().map(|d| d.norm()).unwrap_or(0.0)
    }
}

pub fn supq_validate(k: &SUpqElement) -> SUpqResiduals {
    let (a, b, cc, d) = (&k.a, &k.b, &k.c, &k.d);
    let (p, q) = (k.sig.p(), k.sig.q());
    let ip = CMat::identity(p);
    let iq = CMat::identity(q);
    let f = |m: CMat| m.frobenius_norm();
    let det = k.matrix().determinant().unwrap_or(re(f64::NAN));
    let det_a = a.determinant().unwrap_or(re(f64::NAN));
    let det_d = d.determinant().unwrap_or(re(f64::NAN));
    let nan_to_inf = |x: f64| if x.is_nan() { f64::INFINITY } else { x };
    SUpqResiduals {
        aa_minus_bb: f(&(&(a * &a.adjoint()) - &(b * &b.adjoint())) - &ip),
        cc_minus_dd: f(&(&(cc * &cc.adjoint()) - &(d * &d.adjoint())) + &iq),
        a_a_minus_c_c: f(&(&(&a.adjoint() * a) - &(&cc.adjoint() * cc)) - &ip),
        b_b_minus_d_d: f(&(&(&b.adjoint() * b) - &(&d.adjoint() * d)) + &iq),
        a_b_minus_c_d: f(&(&a.adjoint() * b) - &(&cc.adjoint() * d)),
        b_d_minus_a_c: f(&(b * &d.adjoint()) - &(a * &cc.adjoint())),
        det_minus_one: nan_to_inf((det - re(1.0)).norm()),
        det_d_minus_conj_det_a: nan_to_inf((det_d - det_a.conj()).norm()),
    }
}

/// `k~`, the `2n x 2n` image of `k` laid out as
/// `(A 0 0 B; 0 conj D conj C 0; 0 conj B conj A 0; C 0 0 D)`.
pub fn embed_tilde(k: &SUpqElement) -> CMat {
    let (p, q) = (k.sig.p(), k.sig.q());
    let n = p + q;
    let mut out = CMat::zeros(2 * n, 2 * n);
    // row/col block offsets: [0, p), [p, n), [n, n+p), [n+p, 2n)
    out.set_block(0, 0, &k.a);
    out.set_block(0, n + p, &k.b);
    out.set_block(p, p, &k.d.conj());
    out.set_block(p, n, &k.c.conj());
    out.set_block(n, p, &k.b.conj());
    out.set_block(n, n, &k.a.conj());
    out.set_block(n + p, 0, &k.c);
    out.set_block(n + p, n + p, &k.d);
    out
}

/// `J = (0 I_n; -I_n 0)`.
pub fn symplectic_j(n: usize) -> CMat {
    let id = CMat::identity(n);
    CMat::block_compose(&CMat::zeros(n, n), &id, &(-&id), &CMat::zeros(n, n)).expect("square blocks")
}

/// `J_1 = (0 I_n; I_n 0)`.
pub fn swap_j1(n: usize) -> CMat {
    let id = CMat::identity(n);
    CMat::block_compose(&CMat::zeros(n, n), &id, &id, &CMat::zeros(n, n)).expect("square blocks")
}

// ---------------------------------------------------------------------------
// su(p,q)
// ---------------------------------------------------------------------------

pub const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "BlockWire", try_from = "BlockWire")]
pub struct SUpqAlgebra {
    sig: Signature,
    a: CMat,
    b: CMat,
    c: CMat,
    d: CMat,
}

impl SUpqAlgebra {
    pub fn zero(sig: Signature) -> Self {
        SUpqAlgebra {
            sig,
            a: CMat::zeros(sig.p(), sig.p()),
            b: CMat::zeros(sig.p(), sig.q()),
            c: CMat::zeros(sig.q(), sig.p()),
            d: CMat::zeros(sig.q(), sig.q()),
        }
    }

    /// Checks `A^* = -A`, `D^* = -D`, `C = B^*`, `Tr A + Tr D = 0`.
    pub fn new(sig: Signature, a: CMat, b: CMat, c: CMat, d: CMat) -> Result<Self> {
        let shell = SUpqElement::from_blocks(sig, a, b, c, d)?;
        let x = SUpqAlgebra {
            sig,
            a: shell.a,
            b: shell.b,
            c: shell.c,
            d: shell.d,
        };
        let r = x.residual();
        if r > ALGEBRA_TOL * (1.0 + x.matrix().frobenius_norm()) {
            return Err(Error::InvalidParameter(format!(
                "not an element of su({}, {}): residual {r:.3e}",
                sig.p(),
                sig.q()
            )));
        }
        Ok(x)
    }

    pub fn residual(&self) -> f64 {
        let r1 = (&self.a.adjoint() + &self.a).frobenius_norm();
        let r2 = (&self.d.adjoint() + &self.d).frobenius_norm();
        let r3 = (&self.c - &self.b.adjoint()).frobenius_norm();
        let r4 = (self.a.trace() + self.d.trace()).norm();
        r1.max(r2).max(r3).max(r4)
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }
    pub fn a(&self) -> &CMat {
        &self.a
    }
    pub fn b(&self) -> &CMat {
        &self.b
    }
    pub fn c(&self) -> &CMat {
        &self.c
    }
    pub fn d(&self) -> &CMat {
        &self.d
    }

    pub fn matrix(&self) -> CMat {
        CMat::block_compose(&self.a, &self.b, &self.c, &self.d).expect("block shapes checked")
    }

    pub fn scale(&self, t: f64) -> Self {
        SUpqAlgebra {
            sig: self.sig,
            a: self.a.scale_re(t),
            b: self.b.scale_re(t),
            c: self.c.scale_re(t),
            d: self.d.scale_re(t),
        }
    }

    pub fn add(&self, other: &SUpqAlgebra) -> Result<Self> {
        if self.sig != other.sig {
            return Err(dim_err("SUpqAlgebra::add", format!("{:?}", self.sig), format!("{:?}", other.sig)));
        }
        Ok(SUpqAlgebra {
            sig: self.sig,
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
            d: &self.d + &other.d,
        })
    }
}

pub fn supq_exp(x: &SUpqAlgebra) -> Result<SUpqElement> {
    SUpqElement::from_matrix(x.sig, &x.matrix().expm()?)
}

fn disc_sample(rng: &mut ChaCha8Rng, scale: f64) -> C64 {
    let r = scale * rng.random::<f64>().sqrt();
    let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    c(r * theta.cos(), r * theta.sin())
}

/// Random algebra element: raw entries uniform in the disc of radius
/// `scale`, projected onto `su(p,q)`.
pub fn random_algebra(rng: &mut ChaCha8Rng, scale: f64, sig: Signature) -> SUpqAlgebra {
    let (p, q) = (sig.p(), sig.q());
    let mut raw = |r, cl| CMat::from_fn(r, cl, |_, _| disc_sample(rng, scale));
    let ra = raw(p, p);
    let b = raw(p, q);
    let rd = raw(q, q);
    let skew = |m: &CMat| (m - &m.adjoint()).scale_re(0.5);
    let mut a = skew(&ra);
    let mut d = skew(&rd);
    let shift = (a.trace() + d.trace()) / sig.n() as f64;
    a = &a - &CMat::identity(p).scale(shift);
    d = &d - &CMat::identity(q).scale(shift);
    let c = b.adjoint();
    SUpqAlgebra { sig, a, b, c, d }
}

/// Deterministic `SU(p,q)` element: `exp` of [`random_algebra`].
pub fn random_supq(seed: u64, scale: f64, sig: Signature) -> Result<SUpqElement> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale must be >= 0, got {scale}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    supq_exp(&random_algebra(&mut rng, scale, sig))
}

pub fn random_supq_rng(rng: &mut ChaCha8Rng, scale: f64, sig: Signature) -> SUpqElement {
    supq_exp(&random_algebra(rng, scale, sig)).expect("expm of a square matrix")
}

/// Random Heisenberg element with `z` entries in the disc of radius `scale`
/// and `c` uniform in `[-scale, scale]`.
pub fn random_heis_rng(rng: &mut ChaCha8Rng, scale: f64, n: usize) -> HeisElement {
    let z = (0..n).map(|_| disc_sample(rng, scale)).collect();
    let cc = scale * (2.0 * rng.random::<f64>() - 1.0);
    HeisElement { z, c: cc }
}

pub fn random_point(rng: &mut ChaCha8Rng, radius: f64, n: usize) -> Vec<C64> {
    (0..n).map(|_| disc_sample(rng, radius)).collect()
}

// ---------------------------------------------------------------------------
// H_n and G
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "HeisWire", try_from = "HeisWire")]
pub struct HeisElement {
    pub z: Vec<C64>,
    pub c: f64,
}

impl HeisElement {
    pub fn new(z: Vec<C64>, c: f64) -> Result<Self> {
        if !c.is_finite() || z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite Heisenberg element".into()));
        }
        Ok(HeisElement { z, c })
    }

    pub fn identity(n: usize) -> Self {
        HeisElement {
            z: vec![re(0.0); n],
            c: 0.0,
        }
    }

    pub fn central(n: usize, c: f64) -> Self {
        HeisElement { z: vec![re(0.0); n], c }
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn inverse(&self) -> Self {
        HeisElement {
            z: self.z.iter().map(|v| -v).collect(),
            c: -self.c,
        }
    }

    /// `h . z = z + s(z_0)`, the action on `C^n`.
    pub fn act_on_point(&self, z: &[C64], sig: Signature) -> Result<Vec<C64>> {
        let s = s_involution(&self.z, sig)?;
        if z.len() != s.len() {
            return Err(dim_err("act_on_point", s.len(), z.len()));
        }
        Ok(z.iter().zip(&s).map(|(a, b)| a + b).collect())
    }

    pub fn max_dist(&self, other: &HeisElement) -> f64 {
        let dz = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        dz.max((self.c - other.c).abs())
    }
}

pub fn heis_mul(a: &HeisElement, b: &HeisElement, sig: Signature) -> Result<HeisElement> {
    if a.n() != sig.n() || b.n() != sig.n() {
        return Err(dim_err("heis_mul", sig.n(), a.n().max(b.n())));
    }
    let w = omega(&a.z, &b.z, sig)?;
    Ok(HeisElement {
        z: a.z.iter().zip(&b.z).map(|(x, y)| x + y).collect(),
        c: a.c + b.c + 0.5 * w,
    })
}

pub fn heis_inverse(h: &HeisElement) -> HeisElement {
    h.inverse()
}

/// `k . ((z, conj z), c) = ((kz, conj kz), c)`.
pub fn action_on_heis(k: &SUpqElement, h: &HeisElement) -> Result<HeisElement> {
    Ok(HeisElement {
        z: k.apply(&h.z)?,
        c: h.c,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GElement {
    pub h: HeisElement,
    pub k: SUpqElement,
}

impl GElement {
    pub fn new(h: HeisElement, k: SUpqElement) -> Result<Self> {
        if h.n() != k.sig().n() {
            return Err(dim_err("GElement", k.sig().n(), h.n()));
        }
        Ok(GElement { h, k })
    }

    pub fn identity(sig: Signature) -> Self {
        GElement {
            h: HeisElement::identity(sig.n()),
            k: SUpqElement::identity(sig),
        }
    }

    pub fn sig(&self) -> Signature {
        self.k.sig()
    }

    pub fn inverse(&self) -> GElement {
        g_inverse(self)
    }

    pub fn max_dist(&self, other: &GElement) -> f64 {
        self.h
            .max_dist(&other.h)
            .max((&self.k.matrix() - &other.k.matrix()).frobenius_norm())
    }
}

/// `(z, c, k)(z', c', k') = (z + kz', c + c' + omega(z, kz')/2, kk')`.
pub fn g_mul(a: &GElement, b: &GElement) -> Result<GElement> {
    let sig = a.sig();
    if b.sig() != sig {
        return Err(dim_err("g_mul", format!("{sig:?}"), format!("{:?}", b.sig())));
    }
    let kz = a.k.apply(&b.h.z)?;
    let w = omega(&a.h.z, &kz, sig)?;
    Ok(GElement {
        h: HeisElement {
            z: a.h.z.iter().zip(&kz).map(|(x, y)| x + y).collect(),
            c: a.h.c + b.h.c + 0.5 * w,
        },
        k: a.k.mul(&b.k)?,
    })
}

/// `(z, c, k)^{-1} = (-k^{-1} z, -c, k^{-1})`.
pub fn g_inverse(g: &GElement) -> GElement {
    let kinv = g.k.inverse();
    let z = kinv.apply(&g.h.z).expect("matching dimension");
    GElement {
        h: HeisElement {
            z: z.into_iter().map(|v| -v).collect(),
            c: -g.h.c,
        },
        k: kinv,
    }
}

/// Lie algebra element `((z_0, conj z_0), c_0, Y)` of `G`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GAlgebra {
    #[serde(with = "wire_vec")]
    pub z0: Vec<C64>,
    pub c0: f64,
    #[serde(rename = "Y")]
    pub y: SUpqAlgebra,
}

impl GAlgebra {
    pub fn new(z0: Vec<C64>, c0: f64, y: SUpqAlgebra) -> Result<Self> {
        if z0.len() != y.sig().n() {
            return Err(dim_err("GAlgebra", y.sig().n(), z0.len()));
        }
        Ok(GAlgebra { z0, c0, y })
    }

    pub fn sig(&self) -> Signature {
        self.y.sig()
    }

    pub fn scale(&self, t: f64) -> Self {
        GAlgebra {
            z0: self.z0.iter().map(|v| v * t).collect(),
            c0: self.c0 * t,
            y: self.y.scale(t),
        }
    }

    pub fn add(&self, other: &GAlgebra) -> Result<Self> {
        Ok(GAlgebra {
            z0: self.z0.iter().zip(&other.z0).map(|(a, b)| a + b).collect(),
            c0: self.c0 + other.c0,
            y: self.y.add(&other.y)?,
        })
    }
}

/// `exp(tX)` for `X = (v, c_0, Y)`: `k(t) = e^{tY}`,
/// `z(t) = int_0^t e^{sY} v ds` and
/// `c(t) = c_0 t + (1/2) int_0^t omega(z(s), e^{sY} v) ds`,
/// which solves `g'(t) = g(t) X` under the semidirect law.
pub fn g_exp(x: &GAlgebra, t: f64) -> Result<GElement> {
    let sig = x.sig();
    let flow_z = |s: f64| -> Result<(Vec<C64>, SUpqElement)> {
        // exp((sY  s v; 0 0)) carries int_0^s e^{uY} v du in its last column.
        let n = sig.n();
        let mut aug = CMat::zeros(n + 1, n + 1);
        aug.set_block(0, 0, &x.y.matrix().scale_re(s));
        for i in 0..n {
            aug[(i, n)] = x.z0[i] * s;
        }
        let e = aug.expm()?;
        let z: Vec<C64> = (0..n).map(|i| e[(i, n)]).collect();
        let k = SUpqElement::from_matrix(sig, &e.submatrix(0, 0, n, n))?;
        Ok((z, k))
    };
    let (z, k) = flow_z(t)?;
    let (nodes, weights) = gauss_legendre(24);
    let mut integral = 0.0;
    for (u, w) in nodes.iter().zip(&weights) {
        let s = 0.5 * t * (u + 1.0);
        let (zs, ks) = flow_z(s)?;
        let kv = ks.apply(&x.z0)?;
        integral += w * omega(&zs, &kv, sig)?;
    }
    integral *= 0.5 * t;
    GElement::new(HeisElement::new(z, x.c0 * t + 0.5 * integral)?, k)
}

// ---------------------------------------------------------------------------
// JSON wire forms
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BlockWire {
    p: usize,
    q: usize,
    #[serde(rename = "A")]
    a: WireMatrix,
    #[serde(rename = "B")]
    b: WireMatrix,
    #[serde(rename = "C")]
    c: WireMatrix,
    #[serde(rename = "D")]
    d: WireMatrix,
}

impl BlockWire {
    fn blocks(&self) -> Result<(Signature, CMat, CMat, CMat, CMat)> {
        let sig = Signature::new(self.p, self.q)?;
        let (p, q) = (self.p, self.q);
        Ok((
            sig,
            json::matrix_in(&self.a, p, p, "A")?,
            json::matrix_in(&self.b, p, q, "B")?,
            json::matrix_in(&self.c, q, p, "C")?,
            json::matrix_in(&self.d, q, q, "D")?,
        ))
    }
}

macro_rules! block_wire_impls {
    ($ty:ident, $ctor:path) => {
        impl From<$ty> for BlockWire {
            fn from(x: $ty) -> Self {
                BlockWire {
                    p: x.sig.p(),
                    q: x.sig.q(),
                    a: json::matrix_out(&x.a),
                    b: json::matrix_out(&x.b),
                    c: json::matrix_out(&x.c),
                    d: json::matrix_out(&x.d),
                }
            }
        }

        impl TryFrom<BlockWire> for $ty {
            type Error = Error;
            fn try_from(w: BlockWire) -> Result<Self> {
                let (sig, a, b, c, d) = w.blocks()?;
                $ctor(sig, a, b, c, d)
            }
        }
    };
}

block_wire_impls!(SUpqElement, SUpqElement::from_blocks);
block_wire_impls!(SUpqAlgebra, SUpqAlgebra::new);

#[derive(Serialize, Deserialize)]
struct HeisWire {
    z: WireVector,
    c: f64,
}

impl From<HeisElement> for HeisWire {
    fn from(h: HeisElement) -> Self {
        HeisWire {
            z: json::vector_out(&h.z),
            c: h.c,
        }
    }
}

impl TryFrom<HeisWire> for HeisElement {
    type Error = Error;
    fn try_from(w: HeisWire) -> Result<Self> {
        HeisElement::new(json::vector_in(&w.z)?, w.c)
    }
}

pub(crate) mod wire_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
        json::vector_out(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<C64>, D::Error> {
        let w = WireVector::deserialize(d)?;
        json::vector_in(&w).map_err(serde::de::Error::custom)
    }
}

/// Bilinear `u^t J v` helper used by the symbol formulas.
pub fn j_form(u: &[C64], v: &[C64]) -> C64 {
    let n = u.len() / 2;
    // J v = (v_lower, -v_upper)
    let jv: Vec<C64> = v[n..].iter().copied().chain(v[..n].iter().map(|x| -x)).collect();
    dot(u, &jv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::vec_dist;

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn signature_rejects_zero() {
        assert!(Signature::new(0, 1).is_err());
        assert!(Signature::new(1, 0).is_err());
        assert_eq!(sig(2, 3).n(), 5);
    }

    #[test]
    fn omega_examples() {
        let s = sig(1, 1);
        let v = vec![c(0.3, 1.0), c(-2.0, 0.5)];
        assert_eq!(omega(&v, &v, s).unwrap(), 0.0);
        let z = vec![re(1.0), re(0.0)];
        let zp = vec![I, re(0.0)];
        assert!((omega(&z, &zp, s).unwrap() - 1.0).abs() < 1e-15);
        assert!(omega(&z, &[re(1.0)], s).is_err());
    }

    #[test]
    fn omega_invariant_under_supq() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(p, q) in &[(1, 1), (1, 2), (2, 2)] {
            let s = sig(p, q);
            for _ in 0..100 {
                let k = random_supq_rng(&mut rng, 0.8, s);
                let z = random_point(&mut rng, 1.0, s.n());
                let zp = random_point(&mut rng, 1.0, s.n());
                let lhs = omega(&k.apply(&z).unwrap(), &k.apply(&zp).unwrap(), s).unwrap();
                let rhs = omega(&z, &zp, s).unwrap();
                assert!((lhs - rhs).abs() < 1e-10);
                assert!((omega(&z, &zp, s).unwrap() + omega(&zp, &z, s).unwrap()).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn s_involution_examples() {
        let s = sig(1, 1);
        let z = vec![c(1.0, 1.0), c(1.0, 1.0)];
        assert_eq!(s_involution(&z, s).unwrap(), vec![c(1.0, 1.0), c(1.0, -1.0)]);
        let back = s_involution(&s_involution(&z, s).unwrap(), s).unwrap();
        assert_eq!(back, z);
        let real = vec![re(2.0), re(-3.0)];
        assert_eq!(s_involution(&real, s).unwrap(), real);
        assert!(s_involution(&z[..1], s).is_err());
    }

    #[test]
    fn heis_group_laws() {
        let s = sig(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = HeisElement::identity(3);
        let h = random_heis_rng(&mut rng, 1.0, 3);
        assert_eq!(heis_mul(&e, &h, s).unwrap(), h);
        assert!(heis_mul(&h, &heis_inverse(&h), s).unwrap().max_dist(&e) < 1e-15);
        let (a, b, cc) = (
            random_heis_rng(&mut rng, 1.0, 3),
            random_heis_rng(&mut rng, 1.0, 3),
            random_heis_rng(&mut rng, 1.0, 3),
        );
        let l = heis_mul(&heis_mul(&a, &b, s).unwrap(), &cc, s).unwrap();
        let r = heis_mul(&a, &heis_mul(&b, &cc, s).unwrap(), s).unwrap();
        assert!(l.max_dist(&r) < 1e-12);
    }

    #[test]
    fn validate_identity_and_perturbed() {
        let s = sig(2, 1);
        let id = SUpqElement::identity(s);
        assert_eq!(id.validate().max(), 0.0);
        let k = random_supq(4, 0.7, s).unwrap();
        assert!(k.validate().passes(1e-10));
        let mut a = k.a().clone();
        a[(0, 0)] += re(0.01);
        let bad = SUpqElement::from_blocks(s, a, k.b().clone(), k.c().clone(), k.d().clone()).unwrap();
        assert!(bad.validate().max() >= 1e-3);
    }

    #[test]
    fn supq_exp_examples() {
        let s = sig(1, 1);
        assert_eq!(supq_exp(&SUpqAlgebra::zero(s)).unwrap(), SUpqElement::identity(s));
        let t = 0.7;
        let x = SUpqAlgebra::new(
            s,
            CMat::from_diag(&[c(0.0, t)]),
            CMat::zeros(1, 1),
            CMat::zeros(1, 1),
            CMat::from_diag(&[c(0.0, -t)]),
        )
        .unwrap();
        let k = supq_exp(&x).unwrap();
        assert!((k.a()[(0, 0)] - C64::from_polar(1.0, t)).norm() < 1e-14);
        assert!((k.d()[(0, 0)] - C64::from_polar(1.0, -t)).norm() < 1e-14);
        assert!(k.b()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn algebra_rejects_non_members() {
        let s = sig(1, 1);
        let bad = SUpqAlgebra::new(
            s,
            CMat::from_diag(&[re(1.0)]),
            CMat::zeros(1, 1),
            CMat::zeros(1, 1),
            CMat::from_diag(&[re(-1.0)]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn random_supq_determinism_and_membership() {
        let s = sig(2, 2);
        assert_eq!(random_supq(5, 0.5, s).unwrap(), random_supq(5, 0.5, s).unwrap());
        assert_eq!(random_supq(5, 0.0, s).unwrap(), SUpqElement::identity(s));
        for seed in 0..100 {
            let k = random_supq(seed, 1.0, s).unwrap();
            assert!(k.validate().passes(1e-10), "seed {seed}: {:?}", k.validate());
        }
        assert!(random_supq(1, -1.0, s).is_err());
    }

    #[test]
    fn inverse_from_group_law() {
        let s = sig(1, 2);
        let k = random_supq(8, 1.0, s).unwrap();
        let prod = k.mul(&k.inverse()).unwrap();
        assert!((&prod.matrix() - &CMat::identity(3)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn action_homomorphism_and_equivariance() {
        let s = sig(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        assert_eq!(
            action_on_heis(&SUpqElement::identity(s), &random_heis_rng(&mut rng, 1.0, 3)).unwrap().n(),
            3
        );
        for _ in 0..20 {
            let k1 = random_supq_rng(&mut rng, 0.8, s);
            let k2 = random_supq_rng(&mut rng, 0.8, s);
            let h1 = random_heis_rng(&mut rng, 1.0, 3);
            let h2 = random_heis_rng(&mut rng, 1.0, 3);
            let lhs = action_on_heis(&k1.mul(&k2).unwrap(), &h1).unwrap();
            let rhs = action_on_heis(&k1, &action_on_heis(&k2, &h1).unwrap()).unwrap();
            assert!(lhs.max_dist(&rhs) < 1e-12);
            let lhs = action_on_heis(&k1, &heis_mul(&h1, &h2, s).unwrap()).unwrap();
            let rhs = heis_mul(
                &action_on_heis(&k1, &h1).unwrap(),
                &action_on_heis(&k1, &h2).unwrap(),
                s,
            )
            .unwrap();
            assert!(lhs.max_dist(&rhs) < 1e-10);
        }
    }

    #[test]
    fn tilde_properties() {
        let s = sig(2, 1);
        assert_eq!(embed_tilde(&SUpqElement::identity(s)), CMat::identity(6));
        let j = symplectic_j(3);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let k1 = random_supq_rng(&mut rng, 0.9, s);
            let k2 = random_supq_rng(&mut rng, 0.9, s);
            let t1 = embed_tilde(&k1);
            let lhs = embed_tilde(&k1.mul(&k2).unwrap());
            let rhs = &t1 * &embed_tilde(&k2);
            assert!((&lhs - &rhs).frobenius_norm() < 1e-10);
            assert!((&(&(&t1 * &j) * &t1.transpose()) - &j).frobenius_norm() < 1e-10);
            assert!((&(&(&t1.transpose() * &j) * &t1) - &j).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn g_group_laws() {
        let s = sig(1, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mk = |rng: &mut ChaCha8Rng| {
            GElement::new(random_heis_rng(rng, 1.0, 2), random_supq_rng(rng, 0.8, s)).unwrap()
        };
        let g = mk(&mut rng);
        let e = GElement::identity(s);
        assert!(g_mul(&e, &g).unwrap().max_dist(&g) < 1e-15);
        assert!(g_mul(&g, &g_inverse(&g)).unwrap().max_dist(&e) < 1e-10);
        for _ in 0..20 {
            let (a, b, cc) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let l = g_mul(&g_mul(&a, &b).unwrap(), &cc).unwrap();
            let r = g_mul(&a, &g_mul(&b, &cc).unwrap()).unwrap();
            assert!(l.max_dist(&r) < 1e-10);
        }
    }

    #[test]
    fn g_exp_is_one_parameter_subgroup() {
        let s = sig(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let y = random_algebra(&mut rng, 0.7, s);
        let x = GAlgebra::new(random_point(&mut rng, 1.0, 3), 0.4, y).unwrap();
        let (t1, t2) = (0.3, 0.45);
        let lhs = g_mul(&g_exp(&x, t1).unwrap(), &g_exp(&x, t2).unwrap()).unwrap();
        let rhs = g_exp(&x, t1 + t2).unwrap();
        assert!(lhs.max_dist(&rhs) < 1e-12);
        let id = g_exp(&x, 0.0).unwrap();
        assert!(id.max_dist(&GElement::identity(s)) < 1e-15);
        // first-order behaviour
        let h = 1e-6;
        let g = g_exp(&x, h).unwrap();
        assert!(vec_dist(&g.h.z.iter().map(|v| v / h).collect::<Vec<_>>(), &x.z0) < 1e-5);
    }

    #[test]
    fn json_roundtrip_elements() {
        let s = sig(2, 1);
        let k = random_supq(3, 0.5, s).unwrap();
        let text = serde_json::to_string(&k).unwrap();
        assert!(text.contains("\"A\""));
        let back: SUpqElement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, k);
        let g = GElement::new(HeisElement::new(vec![c(0.1, 0.2), re(0.0), c(0.0, -1.0)], 0.5).unwrap(), k).unwrap();
        let back: GElement = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
        let bad = r#"{"p":1,"q":1,"A":[[[1,0]]],"B":[[[0,0]]],"C":[[[0,0]]],"D":[[[1,0],[0,0]]]}"#;
        assert!(serde_json::from_str::<SUpqElement>(bad).is_err());
    }
}
