use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::config::{Config, Suite};
use crate::cmatrix::{conj_vec, dot, norm_sqr, re, CMat, C64, I};
use crate::error::{Error, Result};
use crate::fock::{
    op_from_kernel, quantizer_kernel, rho_kernel, sigma_kernel, FockBasis, GaussKernel,
};
use crate::gaussian::{compose_gauss_kernels, GHRule, DEFAULT_POINT_BUDGET};
use crate::groups::{
    action_on_heis, g_exp, g_inverse, g_mul, heis_mul, random_algebra, random_heis_rng, random_point, random_supq_rng,
    s_involution, supq_exp, GAlgebra, GElement, HeisElement, SUpqElement, Signature, VALIDATION_TOL,
};
use crate::lemmas::{check_prep1, check_prep2, check_prep3, check_prepth, LemmaReport, LEMMA_TOL};
use crate::symbols::{
    berezin_pi_closed, berezin_s_kernel, berezin_s_op, berezin_sigma_closed, berezin_transform, dpi_symbols,
    dsigma_symbols, pi_kernel, prep_matrices, weyl_gaussian, weyl_numeric, weyl_pi_closed_with, weyl_rho_covariance_check,
    weyl_sigma_closed_with, weyl_sigma_forms, QuadSymbol, TRUST_REGION,
};

pub const KERNEL_TOL: f64 = 1e-9;
pub const CLOSED_TOL: f64 = 1e-12;
pub const ORACLE_TOL: f64 = 1e-6;
pub const FORMS_TOL: f64 = 1e-10;
pub const POLAR_TOL: f64 = 1e-8;
pub const FD_TOL: f64 = 1e-5;
pub const FD_STEP: f64 = 1e-4;

/// Oracle checks only use `k` with `|det(k + I)|` above this.
pub const ORACLE_DET_FLOOR: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub suite: &'static str,
    pub id: String,
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    /// Exit code the error maps to, when `status` is `error`.
    #[serde(skip)]
    pub error_code: Option<i32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub suites: Vec<&'static str>,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub skipped: usize,
    pub max_residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

/// Result of one check body.
pub struct Outcome {
    residual: f64,
    pass: Option<bool>,
    detail: Option<String>,
}

impl Outcome {
    fn residual(residual: f64) -> Self {
        Outcome {
            residual,
            pass: None,
            detail: None,
        }
    }

    fn lemma(rep: &LemmaReport) -> Self {
        let failing: Vec<&str> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        Outcome {
            residual: rep.max_residual(),
            pass: Some(rep.pass),
            detail: if failing.is_empty() {
                None
            } else {
                Some(format!("failing: {}", failing.join(", ")))
            },
        }
    }

    fn skipped(detail: String) -> Self {
        Outcome {
            residual: f64::NAN,
            pass: None,
            detail: Some(detail),
        }
    }
}

type Body = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Outcome> + Send + Sync>;

struct Task {
    suite: Suite,
    id: String,
    tolerance: f64,
    body: Body,
}

struct Registry<'a> {
    cfg: &'a Config,
    suite: Suite,
    tasks: Vec<Task>,
}

impl Registry<'_> {
    fn add<F>(&mut self, name: &str, index: usize, tolerance: f64, body: F)
    where
        F: Fn(&mut ChaCha8Rng) -> Result<Outcome> + Send + Sync + 'static,
    {
        self.tasks.push(Task {
            suite: self.suite,
            id: format!("{}/{}/{:03}", self.suite.name(), name, index),
            tolerance: self.cfg.tol(tolerance),
            body: Box::new(body),
        });
    }

    fn skip(&mut self, name: &str, why: String) {
        self.tasks.push(Task {
            suite: self.suite,
            id: format!("{}/{}", self.suite.name(), name),
            tolerance: 0.0,
            body: Box::new(move |_| Ok(Outcome::skipped(why.clone()))),
        });
    }
}

/// FNV-1a, so that every check draws from its own stream regardless of
/// which other checks are selected.
fn stream_of(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn check_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_of(id));
    rng
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::Precondition { .. } => 3,
        Error::BudgetExceeded { .. } | Error::ExpansionBudget { .. } | Error::InvalidParameter(_) => 2,
        _ => 1,
    }
}

fn run_task(task: &Task, seed: u64, timings: bool) -> CheckRecord {
    let start = Instant::now();
    let mut rng = check_rng(seed, &task.id);
    let out = (task.body)(&mut rng);
    let wall_ms = timings.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut rec = CheckRecord {
        suite: task.suite.name(),
        id: task.id.clone(),
        status: Status::Pass,
        residual: None,
        tolerance: task.tolerance,
        detail: None,
        wall_ms,
        error_code: None,
    };
    match out {
        Ok(o) => {
            let skipped = o.residual.is_nan() && o.pass.is_none() && o.detail.is_some();
            rec.residual = o.residual.is_finite().then_some(o.residual);
            rec.detail = o.detail;
            rec.status = if skipped {
                Status::Skipped
            } else if o.pass.unwrap_or(o.residual <= task.tolerance) {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        Err(e) => {
            rec.status = Status::Error;
            rec.error_code = Some(exit_code_of(&e));
            rec.detail = Some(e.to_string());
        }
    }
    rec
}

pub fn run_verify(cfg: &Config, suites: &[Suite]) -> VerifyReport {
    let start = Instant::now();
    let mut selected: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    selected.sort();
    selected.dedup();
    let mut tasks = Vec::new();
    for &suite in &selected {
        let mut reg = Registry {
            cfg,
            suite,
            tasks: Vec::new(),
        };
        match suite {
            Suite::Groups => groups_suite(&mut reg),
            Suite::Lemmas => lemmas_suite(&mut reg),
            Suite::Kernels => kernels_suite(&mut reg),
            Suite::Berezin => berezin_suite(&mut reg),
            Suite::Weyl => weyl_suite(&mut reg),
            Suite::Extended => extended_suite(&mut reg),
            Suite::Derivatives => derivatives_suite(&mut reg),
        }
        tasks.extend(reg.tasks);
    }
    tasks.sort_by(|a, b| a.id.cmp(&b.id));
    let records: Vec<CheckRecord> = tasks.par_iter().map(|t| run_task(t, cfg.seed, cfg.timings)).collect();
    let count = |s: Status| records.iter().filter(|r| r.status == s).count();
    let (passed, failed, errors, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Error), count(Status::Skipped));
    let summary = Summary {
        suites: selected.iter().map(|s| s.name()).collect(),
        checks: records.len(),
        passed,
        failed,
        errors,
        skipped,
        max_residual: records.iter().filter_map(|r| r.residual).fold(0.0, f64::max),
        pass: failed == 0 && errors == 0,
        wall_ms: cfg.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    VerifyReport { records, summary }
}

impl VerifyReport {
    /// 0 when everything passes, else the most severe code among the
    /// failures: 2 for budget or parameter problems, 3 for violated
    /// preconditions, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            return 0;
        }
        let codes: Vec<i32> = self.records.iter().filter_map(|r| r.error_code).collect();
        if codes.contains(&2) {
            2
        } else if codes.contains(&3) {
            3
        } else {
            1
        }
    }
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

fn points(rng: &mut ChaCha8Rng, n: usize, radius: f64, count: usize) -> Vec<Vec<C64>> {
    (0..count).map(|_| random_point(rng, radius, n)).collect()
}

/// Per-coordinate radius keeping `|z| <= r`.
fn coord_radius(r: f64, n: usize) -> f64 {
    r / (n as f64).sqrt()
}

fn rel_err(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn max_rel_err(f: &QuadSymbol, g: impl Fn(&[C64]) -> Result<C64>, pts: &[Vec<C64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for z in pts {
        worst = worst.max(rel_err(f.eval(z), g(z)?));
    }
    Ok(worst)
}

/// Draws `k` until `|det(k + I)| > floor`.
fn supq_away_from_minus_one(rng: &mut ChaCha8Rng, scale: f64, sig: Signature, floor: f64) -> SUpqElement {
    loop {
        let k = random_supq_rng(rng, scale, sig);
        if k.det_k_plus_one() > floor {
            return k;
        }
    }
}

fn g_element(rng: &mut ChaCha8Rng, h_scale: f64, k_scale: f64, sig: Signature) -> GElement {
    let h = random_heis_rng(rng, h_scale, sig.n());
    let k = random_supq_rng(rng, k_scale, sig);
    GElement::new(h, k).expect("matching dimensions")
}

fn g_algebra(rng: &mut ChaCha8Rng, scale: f64, sig: Signature) -> GAlgebra {
    let y = random_algebra(rng, scale, sig);
    let h = random_heis_rng(rng, scale, sig.n());
    GAlgebra::new(h.z, h.c, y).expect("matching dimensions")
}

fn rotation_pair(t: f64) -> SUpqElement {
    let e = C64::from_polar(1.0, t);
    SUpqElement::from_blocks(
        Signature::new(1, 1).expect("signature"),
        CMat::from_diag(&[e]),
        CMat::zeros(1, 1),
        CMat::zeros(1, 1),
        CMat::from_diag(&[e.conj()]),
    )
    .expect("1x1 blocks")
}

/// Closed value of `W(pi(h, diag(e^{it}, e^{-it})))(z)` for `p = q = 1`.
pub fn rotation_example_value(t: f64, z0: &[C64], c0: f64, z: &[C64], lambda: f64) -> C64 {
    let sig = Signature::new(1, 1).expect("signature");
    let s0 = s_involution(z0, sig).expect("two coordinates");
    let e = C64::from_polar(1.0, t);
    let tan = (t / 2.0).tan();
    2.0 / (1.0 + t.cos())
        * C64::from_polar(1.0, lambda * c0)
        * (-I * lambda * norm_sqr(z) * tan).exp()
        * (lambda / (re(1.0) + e) * (e * dot(z, &conj_vec(&s0)) - dot(&conj_vec(z), &s0))).exp()
        * (-I * lambda / 4.0 * norm_sqr(z0) * tan).exp()
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

fn groups_suite(reg: &mut Registry) {
    let sig = reg.cfg.sig();
    for i in 0..100 {
        reg.add("supq_relations", i, VALIDATION_TOL, move |rng| {
            let k = supq_exp(&random_algebra(rng, 1.0, sig))?;
            Ok(Outcome::residual(k.validate().max()))
        });
    }
    for i in 0..20 {
        reg.add("heis_law", i, VALIDATION_TOL, move |rng| {
            let n = sig.n();
            let (a, b, c) = (random_heis_rng(rng, 1.0, n), random_heis_rng(rng, 1.0, n), random_heis_rng(rng, 1.0, n));
            let l = heis_mul(&heis_mul(&a, &b, sig)?, &c, sig)?;
            let r = heis_mul(&a, &heis_mul(&b, &c, sig)?, sig)?;
            let inv = heis_mul(&a, &a.inverse(), sig)?;
            Ok(Outcome::residual(l.max_dist(&r).max(inv.max_dist(&HeisElement::identity(n)))))
        });
        reg.add("action_automorphism", i, VALIDATION_TOL, move |rng| {
            let n = sig.n();
            let k1 = random_supq_rng(rng, 0.8, sig);
            let k2 = random_supq_rng(rng, 0.8, sig);
            let (a, b) = (random_heis_rng(rng, 1.0, n), random_heis_rng(rng, 1.0, n));
            let l = action_on_heis(&k1, &heis_mul(&a, &b, sig)?)?;
            let r = heis_mul(&action_on_heis(&k1, &a)?, &action_on_heis(&k1, &b)?, sig)?;
            let l2 = action_on_heis(&k1.mul(&k2)?, &a)?;
            let r2 = action_on_heis(&k1, &action_on_heis(&k2, &a)?)?;
            Ok(Outcome::residual(l.max_dist(&r).max(l2.max_dist(&r2))))
        });
        reg.add("g_law", i, VALIDATION_TOL, move |rng| {
            let (a, b, c) = (g_element(rng, 1.0, 0.8, sig), g_element(rng, 1.0, 0.8, sig), g_element(rng, 1.0, 0.8, sig));
            let l = g_mul(&g_mul(&a, &b)?, &c)?;
            let r = g_mul(&a, &g_mul(&b, &c)?)?;
            let inv = g_mul(&a, &g_inverse(&a))?;
            Ok(Outcome::residual(l.max_dist(&r).max(inv.max_dist(&GElement::identity(sig)))))
        });
        reg.add("g_exp_flow", i, VALIDATION_TOL, move |rng| {
            let x = g_algebra(rng, 0.7, sig);
            let (s, t) = (0.37, 0.81);
            let l = g_exp(&x, s + t)?;
            let r = g_mul(&g_exp(&x, s)?, &g_exp(&x, t)?)?;
            Ok(Outcome::residual(l.max_dist(&r)))
        });
    }
}

fn lemmas_suite(reg: &mut Registry) {
    let sig = reg.cfg.sig();
    let tol = reg.cfg.tol(LEMMA_TOL);
    for i in 0..25 {
        reg.add("prep1", i, LEMMA_TOL, move |rng| {
            let k = random_supq_rng(rng, 1.0, sig);
            let pm = prep_matrices(&k)?;
            Ok(Outcome::lemma(&check_prep1(&pm.r, &pm.s, &pm.t, tol)?))
        });
        reg.add("prep2", i, LEMMA_TOL, move |rng| {
            let k = random_supq_rng(rng, 1.0, sig);
            Ok(Outcome::lemma(&check_prep2(&k, tol)?))
        });
        reg.add("prep3", i, LEMMA_TOL, move |rng| {
            let k = random_supq_rng(rng, 1.0, sig);
            Ok(Outcome::lemma(&check_prep3(&k, tol)?))
        });
        reg.add("prepth", i, LEMMA_TOL, move |rng| {
            let k = random_supq_rng(rng, 1.0, sig);
            let z = random_point(rng, 1.0, sig.n());
            Ok(Outcome::lemma(&check_prepth(&k, &z, tol)?))
        });
    }
}

fn kernels_suite(reg: &mut Registry) {
    let fp = reg.cfg.fock_params();
    let (sig, n, lambda) = (fp.sig(), fp.n(), fp.lambda());
    for i in 0..10 {
        reg.add("sigma_homomorphism", i, KERNEL_TOL, move |rng| {
            let k1 = random_supq_rng(rng, 0.5, sig);
            let k2 = random_supq_rng(rng, 0.5, sig);
            let prod = compose_gauss_kernels(&sigma_kernel(&k1, &fp)?, &sigma_kernel(&k2, &fp)?)?;
            Ok(Outcome::residual(prod.param_dist(&sigma_kernel(&k1.mul(&k2)?, &fp)?)))
        });
        reg.add("sigma_inverse", i, KERNEL_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.5, sig);
            let prod = compose_gauss_kernels(&sigma_kernel(&k, &fp)?, &sigma_kernel(&k.inverse(), &fp)?)?;
            Ok(Outcome::residual(prod.param_dist(&GaussKernel::identity(n, lambda))))
        });
        reg.add("sigma_unitary", i, KERNEL_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.5, sig);
            let b = sigma_kernel(&k, &fp)?;
            Ok(Outcome::residual(b.adjoint().param_dist(&sigma_kernel(&k.inverse(), &fp)?)))
        });
        reg.add("intertwining", i, KERNEL_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.5, sig);
            let h = random_heis_rng(rng, 0.6, n);
            let b = sigma_kernel(&k, &fp)?;
            let lhs = compose_gauss_kernels(&rho_kernel(&action_on_heis(&k, &h)?, &fp)?, &b)?;
            let rhs = compose_gauss_kernels(&b, &rho_kernel(&h, &fp)?)?;
            Ok(Outcome::residual(lhs.param_dist(&rhs)))
        });
        reg.add("rho_homomorphism", i, KERNEL_TOL, move |rng| {
            let (h1, h2) = (random_heis_rng(rng, 0.7, n), random_heis_rng(rng, 0.7, n));
            let lhs = compose_gauss_kernels(&rho_kernel(&h1, &fp)?, &rho_kernel(&h2, &fp)?)?;
            Ok(Outcome::residual(lhs.param_dist(&rho_kernel(&heis_mul(&h1, &h2, sig)?, &fp)?)))
        });
        reg.add("quantizer_covariance", i, KERNEL_TOL, move |rng| {
            let h = random_heis_rng(rng, 0.7, n);
            let z = random_point(rng, 0.7, n);
            let conj = compose_gauss_kernels(
                &compose_gauss_kernels(&rho_kernel(&h, &fp)?, &quantizer_kernel(&z, &fp)?)?,
                &rho_kernel(&h.inverse(), &fp)?,
            )?;
            Ok(Outcome::residual(conj.param_dist(&quantizer_kernel(&h.act_on_point(&z, sig)?, &fp)?)))
        });
    }
}

fn berezin_suite(reg: &mut Registry) {
    let fp = reg.cfg.fock_params();
    let eps = reg.cfg.det_epsilon;
    let (sig, n, lambda) = (fp.sig(), fp.n(), fp.lambda());
    let unit = coord_radius(1.0, n);
    for i in 0..10 {
        reg.add("sigma_closed", i, CLOSED_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.6, sig);
            let closed = berezin_sigma_closed(&k, lambda)?;
            let kern = sigma_kernel(&k, &fp)?;
            max_rel_err(&closed, |z| Ok(berezin_s_kernel(&kern, z)), &points(rng, n, unit, 5)).map(Outcome::residual)
        });
        reg.add("pi_closed", i, CLOSED_TOL, move |rng| {
            let g = g_element(rng, 0.8, 0.6, sig);
            let closed = berezin_pi_closed(&g, lambda)?;
            let kern = pi_kernel(&g, &fp)?;
            max_rel_err(&closed, |z| Ok(berezin_s_kernel(&kern, z)), &points(rng, n, unit, 5)).map(Outcome::residual)
        });
        reg.add("polar", i, POLAR_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.6, sig);
            let lhs = berezin_transform(&weyl_sigma_closed_with(&k, lambda, eps)?, 1.0 / (4.0 * lambda))?;
            let rhs = berezin_sigma_closed(&k, lambda)?;
            max_rel_err(&lhs, |z| Ok(rhs.eval(z)), &points(rng, n, unit, 10)).map(Outcome::residual)
        });
        reg.add("adjoint", i, FORMS_TOL, move |rng| {
            let kern = sigma_kernel(&random_supq_rng(rng, 0.6, sig), &fp)?;
            let adj = kern.adjoint();
            let mut worst = 0.0f64;
            for z in points(rng, n, unit, 5) {
                let b = berezin_s_kernel(&kern, &z).conj();
                worst = worst.max(rel_err(berezin_s_kernel(&adj, &z), b));
            }
            Ok(Outcome::residual(worst))
        });
    }
    // at most lambda |z|^2 / 2 = TRUST_REGION
    let trust = coord_radius((2.0 * TRUST_REGION / lambda).sqrt(), n);
    for i in 0..3 {
        reg.add("fock_route", i, ORACLE_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.3, sig);
            let basis = FockBasis::new(&fp);
            let op = op_from_kernel(&sigma_kernel(&k, &fp)?, &fp, &basis)?;
            let closed = berezin_sigma_closed(&k, lambda)?;
            max_rel_err(&closed, |z| Ok(berezin_s_op(&op, &basis, z)), &points(rng, n, trust, 8)).map(Outcome::residual)
        });
    }
}

fn weyl_suite(reg: &mut Registry) {
    let fp = reg.cfg.fock_params();
    let (sig, n, lambda) = (fp.sig(), fp.n(), fp.lambda());
    let eps = reg.cfg.det_epsilon;
    let unit = coord_radius(1.0, n);
    for i in 0..100 {
        reg.add("two_forms", i, FORMS_TOL, move |rng| {
            let k = supq_away_from_minus_one(rng, 1.0, sig, 0.1);
            let (a, b) = weyl_sigma_forms(&k, lambda, eps)?;
            Ok(Outcome::residual(a.exponent_dist(&b)))
        });
    }
    for i in 0..10 {
        reg.add("gaussian_route", i, FORMS_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.7, sig);
            let gauss = weyl_gaussian(&sigma_kernel(&k, &fp)?)?;
            let closed = weyl_sigma_closed_with(&k, lambda, eps)?;
            max_rel_err(&gauss, |z| Ok(closed.eval(z)), &points(rng, n, unit, 5)).map(Outcome::residual)
        });
        reg.add("rho_covariance", i, KERNEL_TOL, move |rng| {
            let kern = sigma_kernel(&random_supq_rng(rng, 0.5, sig), &fp)?;
            let h = random_heis_rng(rng, 0.6, n);
            let z = random_point(rng, unit, n);
            Ok(Outcome::residual(weyl_rho_covariance_check(&kern, &h, &z, &fp)?))
        });
    }
    let order = reg.cfg.quad_order;
    let grid = (order as f64).powi(2 * n as i32);
    if grid > DEFAULT_POINT_BUDGET {
        reg.skip(
            "quadrature",
            format!("{order}^{} = {grid:.3e} quadrature points exceed the budget {DEFAULT_POINT_BUDGET:.0e}", 2 * n),
        );
        return;
    }
    for i in 0..20 {
        reg.add("sigma_oracle", i, ORACLE_TOL, move |rng| {
            let rule = GHRule::new(order)?;
            let k = supq_away_from_minus_one(rng, 0.8, sig, ORACLE_DET_FLOOR);
            let closed = weyl_sigma_closed_with(&k, lambda, eps)?;
            let kern = sigma_kernel(&k, &fp)?;
            max_rel_err(&closed, |z| weyl_numeric(&kern, z, &rule, DEFAULT_POINT_BUDGET), &points(rng, n, unit, 5))
                .map(Outcome::residual)
        });
    }
    for i in 0..5 {
        reg.add("pi_oracle", i, ORACLE_TOL, move |rng| {
            let rule = GHRule::new(order)?;
            let k = supq_away_from_minus_one(rng, 0.6, sig, ORACLE_DET_FLOOR);
            let g = GElement::new(random_heis_rng(rng, 0.3, n), k)?;
            let closed = weyl_pi_closed_with(&g, lambda, eps)?;
            let kern = pi_kernel(&g, &fp)?;
            max_rel_err(&closed, |z| weyl_numeric(&kern, z, &rule, DEFAULT_POINT_BUDGET), &points(rng, n, unit, 5))
                .map(Outcome::residual)
        });
    }
}

fn extended_suite(reg: &mut Registry) {
    let fp = reg.cfg.fock_params();
    let eps = reg.cfg.det_epsilon;
    let (sig, n, lambda) = (fp.sig(), fp.n(), fp.lambda());
    let unit = coord_radius(1.0, n);
    for i in 0..10 {
        reg.add("pi_product", i, KERNEL_TOL, move |rng| {
            let g1 = g_element(rng, 0.5, 0.4, sig);
            let g2 = g_element(rng, 0.5, 0.4, sig);
            let kern = compose_gauss_kernels(&pi_kernel(&g1, &fp)?, &pi_kernel(&g2, &fp)?)?;
            let w = weyl_gaussian(&kern)?;
            let closed = weyl_pi_closed_with(&g_mul(&g1, &g2)?, lambda, eps)?;
            max_rel_err(&w, |z| Ok(closed.eval(z)), &points(rng, n, unit, 5)).map(Outcome::residual)
        });
        reg.add("sigma_reduction", i, CLOSED_TOL, move |rng| {
            let k = random_supq_rng(rng, 0.6, sig);
            let bare = GElement::new(HeisElement::identity(n), k.clone())?;
            let (wp, ws) = (weyl_pi_closed_with(&bare, lambda, eps)?, weyl_sigma_closed_with(&k, lambda, eps)?);
            let (sp, ss) = (berezin_pi_closed(&bare, lambda)?, berezin_sigma_closed(&k, lambda)?);
            let pts = points(rng, n, unit, 5);
            let a = max_rel_err(&wp, |z| Ok(ws.eval(z)), &pts)?;
            let b = max_rel_err(&sp, |z| Ok(ss.eval(z)), &pts)?;
            Ok(Outcome::residual(a.max(b)))
        });
    }
    if (sig.p(), sig.q()) != (1, 1) {
        reg.skip("rotation_example", "the rotation example is stated for p = q = 1".into());
        return;
    }
    // 50 angles in (-pi, pi) away from |t| close to pi
    for i in 0..50 {
        let t = -2.9 + 5.8 * (i as f64) / 49.0;
        reg.add("rotation_example", i, CLOSED_TOL, move |rng| {
            let k = rotation_pair(t);
            let mut worst = 0.0f64;
            for _ in 0..5 {
                let h = random_heis_rng(rng, 0.8, 2);
                let z = random_point(rng, 0.7, 2);
                let w = weyl_pi_closed_with(&GElement::new(h.clone(), k.clone())?, lambda, eps)?;
                worst = worst.max(rel_err(w.eval(&z), rotation_example_value(t, &h.z, h.c, &z, lambda)));
            }
            Ok(Outcome::residual(worst))
        });
    }
}

fn derivatives_suite(reg: &mut Registry) {
    let cfg = reg.cfg;
    let (sig, lambda, eps) = (cfg.sig(), cfg.lambda, cfg.det_epsilon);
    let n = sig.n();
    let unit = coord_radius(1.0, n);
    for i in 0..20 {
        reg.add("dsigma_difference", i, FD_TOL, move |rng| {
            let x = random_algebra(rng, 0.7, sig);
            let (_, w) = dsigma_symbols(&x, lambda);
            let plus = weyl_sigma_closed_with(&supq_exp(&x.scale(FD_STEP))?, lambda, eps)?;
            let minus = weyl_sigma_closed_with(&supq_exp(&x.scale(-FD_STEP))?, lambda, eps)?;
            let mut worst = 0.0f64;
            for z in points(rng, n, unit, 5) {
                let fd = (plus.eval(&z) - minus.eval(&z)) / (2.0 * FD_STEP);
                worst = worst.max((fd - w.eval(&z)).norm());
            }
            Ok(Outcome::residual(worst))
        });
        reg.add("dpi_difference", i, FD_TOL, move |rng| {
            let x = g_algebra(rng, 0.6, sig);
            let (_, w) = dpi_symbols(&x, lambda)?;
            let plus = weyl_pi_closed_with(&g_exp(&x, FD_STEP)?, lambda, eps)?;
            let minus = weyl_pi_closed_with(&g_exp(&x, -FD_STEP)?, lambda, eps)?;
            let mut worst = 0.0f64;
            for z in points(rng, n, unit, 5) {
                let fd = (plus.eval(&z) - minus.eval(&z)) / (2.0 * FD_STEP);
                worst = worst.max((fd - w.eval(&z)).norm());
            }
            Ok(Outcome::residual(worst))
        });
        reg.add("trace_identity", i, CLOSED_TOL, move |rng| {
            let x = g_algebra(rng, 0.7, sig);
            let tr = x.y.a().trace();
            let (s, w) = dsigma_symbols(&x.y, lambda);
            let (sp, wp) = dpi_symbols(&x, lambda)?;
            let mut worst = 0.0f64;
            for z in points(rng, n, unit, 5) {
                worst = worst.max((w.eval(&z) - s.eval(&z) - tr).norm());
                worst = worst.max((wp.eval(&z) - sp.eval(&z) - tr).norm());
            }
            Ok(Outcome::residual(worst))
        });
        reg.add("linearity", i, CLOSED_TOL, move |rng| {
            let (x, y) = (random_algebra(rng, 0.7, sig), random_algebra(rng, 0.7, sig));
            let a = 0.3;
            let (_, wxy) = dsigma_symbols(&x.add(&y.scale(a))?, lambda);
            let (_, wx) = dsigma_symbols(&x, lambda);
            let (_, wy) = dsigma_symbols(&y, lambda);
            let lin = wx.add(&wy.scale(re(a)))?;
            let mut worst = 0.0f64;
            for z in points(rng, n, unit, 5) {
                worst = worst.max((wxy.eval(&z) - lin.eval(&z)).norm());
            }
            Ok(Outcome::residual(worst))
        });
    }
}
