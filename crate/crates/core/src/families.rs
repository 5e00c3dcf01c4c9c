//! Constructors for every solution and near-solution family of the
//! classification, the sine/cosine building blocks, and the dependent-branch
//! normal forms.
//!
//! Each constructor assembles (f, g, h) exactly per the printed formulas and
//! reports two numbers alongside:
//! - `exact_sup`, the sup of psi when every bounded slot is zero (0 for all
//!   families except case 7, whose psi is identically
//!   -lambda^2 m(x) m(y) even with zero slots);
//! - `lipschitz`, an explicit constant C such that replacing bounded slots
//!   by functions of amplitude eps <= 1 moves sup psi by at most C eps.
//!
//! The constants come from the closed forms of psi per case:
//!   case 1: psi = -h(x)h(y)
//!   case 2: psi = f(xy) - f(x)g(y) - g(x)f(y) - h(x)h(y), all slots bounded
//!   case 3: psi = phi(xy) - phi(x)m(y) - m(x)phi(y) - b(x)b(y)
//!   case 4: psi = alpha [b(x)b(y) - b(xy)] - phi(x)phi(y)
//!   case 5: psi = -b(x)b(y)
//!   case 6: psi = lambda^2 [b(xy) - b(x)b(y)]
//!   case 7: psi = b(xy) - b(x)m(y) - m(x)b(y) - lambda^2 m(x)m(y)
//!   case 8: psi = b(xy) - b(x)m(y) - m(x)b(y)
//! (case 9 ties psi to its side condition; its constant covers only the
//! -b(x)b(y) term and the family is verify-only.)

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deviation::{single_radius_scan, CosineKernel, SineKernel};
use crate::error::{CoreError, Result};
use crate::funcspace::{boundedness, default_schedule, sup_norm, FnDescriptor, GFunction, DEFAULT_TAU};
use crate::group::GroupSpec;
use crate::json::complex_pair_opt;

/// Window radius for pair-law checks and Lipschitz cofactor sups.
pub const CHECK_RADIUS: u32 = 64;

/// Relative kernel tolerance for exact sine/cosine pairs.
pub const PAIR_TOL: f64 = 1e-9;

/// Amplitude cap under which the reported Lipschitz constants are valid.
pub const SLOT_AMPLITUDE_CAP: f64 = 1.0;

/// Which classical equation a building-block pair solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Sine,
    Cosine,
}

/// An exact solution pair of the sine or cosine equation.
#[derive(Debug, Clone)]
pub struct SineCosinePair {
    pub f0: GFunction,
    pub g0: GFunction,
    pub kind: PairKind,
}

/// Parameter record for a family constructor; unused fields stay None.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FamilyParams {
    #[serde(rename = "case")]
    pub case_id: u8,
    #[serde(with = "complex_pair_opt", skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Complex64>,
    #[serde(with = "complex_pair_opt", skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Complex64>,
    #[serde(with = "complex_pair_opt", skip_serializing_if = "Option::is_none")]
    pub beta: Option<Complex64>,
    #[serde(with = "complex_pair_opt", skip_serializing_if = "Option::is_none")]
    pub rho: Option<Complex64>,
    /// Additive part a.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<FnDescriptor>,
    /// Second additive part a_1 (case 8).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<FnDescriptor>,
    /// Multiplicative part m (bounded in cases 3, 7, 8, 9).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<FnDescriptor>,
    /// Unbounded multiplicative part M (case 7).
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub big_m: Option<FnDescriptor>,
    /// Bounded slot b.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<FnDescriptor>,
    /// Bounded slot phi.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<FnDescriptor>,
    /// Explicit sine/cosine pair members.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f0: Option<FnDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<FnDescriptor>,
    /// Multiplicative generators for built pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<FnDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m2: Option<FnDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_kind: Option<PairKind>,
    /// Free functions (case 1 g; case 2 triple; case 9 f).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_f: Option<FnDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_g: Option<FnDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free_h: Option<FnDescriptor>,
    /// Inner parameters for the case-10 delegate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delegate: Option<Box<FamilyParams>>,
}

/// A constructed family instance.
#[derive(Debug, Clone)]
pub struct FamilyBuild {
    pub case_id: u8,
    pub f: GFunction,
    pub g: GFunction,
    pub h: GFunction,
    /// Explicit slot-sensitivity constant (valid for amplitudes <= 1).
    pub lipschitz: f64,
    /// sup psi with all bounded slots zero.
    pub exact_sup: f64,
}

fn invalid(case: u8, clause: impl Into<String>) -> CoreError {
    CoreError::InvalidParams { case, clause: clause.into() }
}

fn need_scalar(v: Option<Complex64>, case: u8, name: &str) -> Result<Complex64> {
    v.ok_or_else(|| invalid(case, format!("missing scalar '{name}'")))
}

fn slot(params_desc: &Option<FnDescriptor>) -> FnDescriptor {
    params_desc.clone().unwrap_or(FnDescriptor::Zero)
}

fn require_bounded(group: &Arc<GroupSpec>, desc: &FnDescriptor, case: u8, name: &str) -> Result<f64> {
    if let Some(bound) = desc.structural_bound() {
        return Ok(bound);
    }
    if group.is_finite() {
        let f = GFunction::new(Arc::clone(group), desc.clone())?;
        return Ok(sup_norm(&f, 0)?.sup);
    }
    let f = GFunction::new(Arc::clone(group), desc.clone())?;
    let v = boundedness(&f, &default_schedule(), DEFAULT_TAU)?;
    v.bound()
        .ok_or_else(|| invalid(case, format!("slot '{name}' does not pass the Bounded verdict")))
}

fn require_additive(desc: &Option<FnDescriptor>, group: &Arc<GroupSpec>, case: u8, name: &str) -> Result<FnDescriptor> {
    let d = slot(desc);
    match &d {
        FnDescriptor::Zero => {
            let dim = group.dim().unwrap_or(0);
            Ok(FnDescriptor::Additive { coeffs: vec![Complex64::ZERO; dim.max(1)] })
        }
        FnDescriptor::Additive { .. } => Ok(d),
        other => Err(invalid(case, format!("'{name}' must be an additive descriptor, got {other:?}"))),
    }
}

fn require_multiplicative(desc: &Option<FnDescriptor>, case: u8, name: &str) -> Result<FnDescriptor> {
    let d = desc
        .clone()
        .ok_or_else(|| invalid(case, format!("missing multiplicative '{name}'")))?;
    if !d.is_multiplicative() {
        return Err(invalid(case, format!("'{name}' is not multiplicative by structure")));
    }
    Ok(d)
}

fn mult_sup(group: &Arc<GroupSpec>, desc: &FnDescriptor) -> Result<f64> {
    if let Some(b) = desc.structural_bound() {
        return Ok(b);
    }
    let f = GFunction::new(Arc::clone(group), desc.clone())?;
    Ok(sup_norm(&f, CHECK_RADIUS)?.sup)
}

fn additive_is_zero(desc: &FnDescriptor) -> bool {
    match desc {
        FnDescriptor::Zero => true,
        FnDescriptor::Additive { coeffs } => coeffs.iter().all(|c| c.norm() <= 1e-12),
        _ => false,
    }
}

/// The exact sine-equation family f0 = a m, g0 = m.
pub fn sine_solution(
    group: Arc<GroupSpec>,
    a: &FnDescriptor,
    m: &FnDescriptor,
) -> Result<SineCosinePair> {
    let a = require_additive(&Some(a.clone()), &group, 5, "a")?;
    if !m.is_multiplicative() {
        return Err(invalid(5, "sine pair needs a multiplicative m"));
    }
    let f0 = GFunction::new(Arc::clone(&group), FnDescriptor::prod(vec![a, m.clone()]))?;
    let g0 = GFunction::new(Arc::clone(&group), m.clone())?;
    let pair = SineCosinePair { f0, g0, kind: PairKind::Sine };
    check_pair(&pair)?;
    Ok(pair)
}

/// The two-character solutions f0 = (m1 + m2)/2, g0 = (m1 - m2)/(2i) of the
/// cosine equation.
pub fn cosine_solution(
    group: Arc<GroupSpec>,
    m1: &FnDescriptor,
    m2: &FnDescriptor,
) -> Result<SineCosinePair> {
    for (name, d) in [("m1", m1), ("m2", m2)] {
        if !d.is_multiplicative() {
            return Err(invalid(6, format!("cosine pair needs multiplicative {name}")));
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let inv_2i = Complex64::new(0.0, -0.5);
    let f0 = GFunction::new(
        Arc::clone(&group),
        FnDescriptor::scale(half, FnDescriptor::sum(vec![m1.clone(), m2.clone()])),
    )?;
    let g0 = GFunction::new(
        Arc::clone(&group),
        FnDescriptor::scale(
            inv_2i,
            FnDescriptor::sum(vec![m1.clone(), FnDescriptor::scale(-Complex64::ONE, m2.clone())]),
        ),
    )?;
    let pair = SineCosinePair { f0, g0, kind: PairKind::Cosine };
    check_pair(&pair)?;
    Ok(pair)
}

/// The two-character sine solutions f0 = (m1 - m2)/2, g0 = (m1 + m2)/2.
pub fn sine_two_character(
    group: Arc<GroupSpec>,
    m1: &FnDescriptor,
    m2: &FnDescriptor,
) -> Result<SineCosinePair> {
    for (name, d) in [("m1", m1), ("m2", m2)] {
        if !d.is_multiplicative() {
            return Err(invalid(5, format!("sine pair needs multiplicative {name}")));
        }
    }
    let half = Complex64::new(0.5, 0.0);
    let f0 = GFunction::new(
        Arc::clone(&group),
        FnDescriptor::scale(
            half,
            FnDescriptor::sum(vec![m1.clone(), FnDescriptor::scale(-Complex64::ONE, m2.clone())]),
        ),
    )?;
    let g0 = GFunction::new(
        Arc::clone(&group),
        FnDescriptor::scale(half, FnDescriptor::sum(vec![m1.clone(), m2.clone()])),
    )?;
    let pair = SineCosinePair { f0, g0, kind: PairKind::Sine };
    check_pair(&pair)?;
    Ok(pair)
}

/// Verify the pair's defining equation on the check window (magnitude
/// normalized, so exponentially growing legs are judged by relative error).
pub fn check_pair(pair: &SineCosinePair) -> Result<()> {
    let group = pair.f0.group();
    let (_, rel) = match pair.kind {
        PairKind::Sine => {
            single_radius_scan(&SineKernel { f0: &pair.f0, g0: &pair.g0 }, group, CHECK_RADIUS)?
        }
        PairKind::Cosine => {
            single_radius_scan(&CosineKernel { f0: &pair.f0, g0: &pair.g0 }, group, CHECK_RADIUS)?
        }
    };
    if rel > PAIR_TOL {
        return Err(invalid(
            match pair.kind {
                PairKind::Sine => 5,
                PairKind::Cosine => 6,
            },
            format!("pair kernel relative sup {rel:.3e} exceeds {PAIR_TOL:.0e}"),
        ));
    }
    Ok(())
}

fn pair_from_params(group: &Arc<GroupSpec>, params: &FamilyParams, kind: PairKind) -> Result<SineCosinePair> {
    if let (Some(f0), Some(g0)) = (&params.f0, &params.g0) {
        let pair = SineCosinePair {
            f0: GFunction::new(Arc::clone(group), f0.clone())?,
            g0: GFunction::new(Arc::clone(group), g0.clone())?,
            kind,
        };
        check_pair(&pair)?;
        return Ok(pair);
    }
    match kind {
        PairKind::Sine => {
            if let (Some(m1), Some(m2)) = (&params.m1, &params.m2) {
                return sine_two_character(Arc::clone(group), m1, m2);
            }
            let a = params
                .a
                .clone()
                .ok_or_else(|| invalid(5, "sine pair needs (f0, g0), (m1, m2) or (a, m)"))?;
            let m = require_multiplicative(&params.m, 5, "m")?;
            sine_solution(Arc::clone(group), &a, &m)
        }
        PairKind::Cosine => {
            let m1 = require_multiplicative(&params.m1, 6, "m1")?;
            let m2 = require_multiplicative(&params.m2, 6, "m2")?;
            cosine_solution(Arc::clone(group), &m1, &m2)
        }
    }
}

/// Build (f, g, h) for one of the ten families.
pub fn construct_case(group: Arc<GroupSpec>, params: &FamilyParams) -> Result<FamilyBuild> {
    let case = params.case_id;
    let gf = |d: FnDescriptor| GFunction::new(Arc::clone(&group), d);
    match case {
        1 => {
            let h_desc = slot(&params.b);
            let h_bound = require_bounded(&group, &h_desc, 1, "h")?;
            let _ = h_bound;
            Ok(FamilyBuild {
                case_id: 1,
                f: gf(FnDescriptor::Zero)?,
                g: gf(slot(&params.free_g))?,
                h: gf(h_desc)?,
                lipschitz: 1.0,
                exact_sup: 0.0,
            })
        }
        2 => {
            let (fd, gd, hd) = (slot(&params.free_f), slot(&params.free_g), slot(&params.free_h));
            for (name, d) in [("f", &fd), ("g", &gd), ("h", &hd)] {
                require_bounded(&group, d, 2, name)?;
            }
            Ok(FamilyBuild {
                case_id: 2,
                f: gf(fd)?,
                g: gf(gd)?,
                h: gf(hd)?,
                lipschitz: 1.0 + 3.0 * SLOT_AMPLITUDE_CAP,
                exact_sup: 0.0,
            })
        }
        3 => {
            let lambda = need_scalar(params.lambda, 3, "lambda")?;
            let a = require_additive(&params.a, &group, 3, "a")?;
            let m = require_multiplicative(&params.m, 3, "m")?;
            let sup_m = mult_sup(&group, &m)?;
            if m.structural_bound().is_none() {
                require_bounded(&group, &m, 3, "m")?;
            }
            let (b, phi) = (slot(&params.b), slot(&params.phi));
            require_bounded(&group, &b, 3, "b")?;
            require_bounded(&group, &phi, 3, "phi")?;
            let f_desc = FnDescriptor::sum(vec![
                FnDescriptor::prod(vec![a, m.clone()]),
                phi,
            ]);
            let g_desc = FnDescriptor::sum(vec![
                m,
                FnDescriptor::scale(-lambda * lambda * 0.5, f_desc.clone()),
                FnDescriptor::scale(-lambda, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![FnDescriptor::scale(lambda, f_desc.clone()), b]);
            Ok(FamilyBuild {
                case_id: 3,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: 2.0 + 2.0 * sup_m,
                exact_sup: 0.0,
            })
        }
        4 => {
            let alpha = need_scalar(params.alpha, 4, "alpha")?;
            let lambda = need_scalar(params.lambda, 4, "lambda")?;
            let m = require_multiplicative(&params.m, 4, "m")?;
            let (b, phi) = (slot(&params.b), slot(&params.phi));
            require_bounded(&group, &b, 4, "b")?;
            require_bounded(&group, &phi, 4, "phi")?;
            let al2 = alpha * lambda * lambda;
            let f_desc = FnDescriptor::scale(
                alpha,
                FnDescriptor::sum(vec![m.clone(), FnDescriptor::scale(-Complex64::ONE, b.clone())]),
            );
            let g_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale((Complex64::ONE - al2) * 0.5, m.clone()),
                FnDescriptor::scale((Complex64::ONE + al2) * 0.5, b.clone()),
                FnDescriptor::scale(-lambda, phi.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(alpha * lambda, m),
                FnDescriptor::scale(-alpha * lambda, b),
                phi,
            ]);
            Ok(FamilyBuild {
                case_id: 4,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: 2.0 * alpha.norm() + SLOT_AMPLITUDE_CAP,
                exact_sup: 0.0,
            })
        }
        5 => {
            let lambda = need_scalar(params.lambda, 5, "lambda")?;
            let pair = pair_from_params(&group, params, PairKind::Sine)?;
            let b = slot(&params.b);
            require_bounded(&group, &b, 5, "b")?;
            let g_desc = FnDescriptor::sum(vec![
                pair.g0.desc().clone(),
                FnDescriptor::scale(-lambda * lambda * 0.5, pair.f0.desc().clone()),
                FnDescriptor::scale(-lambda, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(lambda, pair.f0.desc().clone()),
                b,
            ]);
            Ok(FamilyBuild {
                case_id: 5,
                f: pair.f0.clone(),
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: SLOT_AMPLITUDE_CAP,
                exact_sup: 0.0,
            })
        }
        6 => {
            let lambda = need_scalar(params.lambda, 6, "lambda")?;
            if lambda.norm() <= 1e-12 {
                return Err(invalid(6, "lambda must be nonzero"));
            }
            let rho = need_scalar(params.rho, 6, "rho")?;
            let pair = pair_from_params(&group, params, PairKind::Cosine)?;
            let b = slot(&params.b);
            require_bounded(&group, &b, 6, "b")?;
            let l2 = lambda * lambda;
            let f_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(-l2, pair.f0.desc().clone()),
                FnDescriptor::scale(l2, b.clone()),
            ]);
            let g_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale((Complex64::ONE + rho * rho) * 0.5, pair.f0.desc().clone()),
                FnDescriptor::scale(rho, pair.g0.desc().clone()),
                FnDescriptor::scale((Complex64::ONE - rho * rho) * 0.5, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(lambda * rho, pair.f0.desc().clone()),
                FnDescriptor::scale(lambda, pair.g0.desc().clone()),
                FnDescriptor::scale(-lambda * rho, b),
            ]);
            Ok(FamilyBuild {
                case_id: 6,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: 2.0 * lambda.norm_sqr(),
                exact_sup: 0.0,
            })
        }
        7 => {
            let lambda = need_scalar(params.lambda, 7, "lambda")?;
            if lambda.norm() <= 1e-12 {
                return Err(invalid(7, "lambda must be nonzero"));
            }
            let beta = params.beta.unwrap_or(Complex64::ZERO);
            let m = require_multiplicative(&params.m, 7, "m")?;
            if m.structural_bound().is_none() {
                require_bounded(&group, &m, 7, "m")?;
            }
            let sup_m = mult_sup(&group, &m)?;
            let big_m = require_multiplicative(&params.big_m, 7, "M")?;
            let a = require_additive(&params.a, &group, 7, "a")?;
            let b = slot(&params.b);
            require_bounded(&group, &b, 7, "b")?;
            let am = FnDescriptor::prod(vec![a, m.clone()]);
            let l2 = lambda * lambda;
            let bl = beta * lambda;
            let f_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(l2, big_m.clone()),
                am.clone(),
                b.clone(),
            ]);
            let g_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(bl * (Complex64::ONE - bl * 0.5), big_m.clone()),
                FnDescriptor::scale(Complex64::ONE - bl, m.clone()),
                FnDescriptor::scale(-beta * beta * 0.5, am.clone()),
                FnDescriptor::scale(-beta * beta * 0.5, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(lambda * (Complex64::ONE - bl), big_m),
                FnDescriptor::scale(-lambda, m),
                FnDescriptor::scale(-beta, am),
                FnDescriptor::scale(-beta, b),
            ]);
            Ok(FamilyBuild {
                case_id: 7,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: 1.0 + 2.0 * sup_m,
                exact_sup: lambda.norm_sqr() * sup_m * sup_m,
            })
        }
        8 => {
            let beta = params.beta.unwrap_or(Complex64::ZERO);
            let m = require_multiplicative(&params.m, 8, "m")?;
            if m.structural_bound().is_none() {
                require_bounded(&group, &m, 8, "m")?;
            }
            let sup_m = mult_sup(&group, &m)?;
            if sup_m <= 1e-12 {
                return Err(invalid(8, "m must be nonzero"));
            }
            let a = require_additive(&params.a, &group, 8, "a")?;
            if additive_is_zero(&a) {
                return Err(invalid(8, "a must be nonzero"));
            }
            let a1 = require_additive(&params.a1, &group, 8, "a1")?;
            let b = slot(&params.b);
            require_bounded(&group, &b, 8, "b")?;
            let a2m = FnDescriptor::prod(vec![
                FnDescriptor::Pow { inner: Box::new(a.clone()), k: 2 },
                m.clone(),
            ]);
            let a1m = FnDescriptor::prod(vec![a1, m.clone()]);
            let am = FnDescriptor::prod(vec![a, m.clone()]);
            let half = Complex64::new(0.5, 0.0);
            let quarter_b2 = beta * beta * 0.25;
            let f_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(half, a2m.clone()),
                FnDescriptor::scale(half, a1m.clone()),
                b.clone(),
            ]);
            let g_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(-quarter_b2, a2m.clone()),
                FnDescriptor::scale(beta, am.clone()),
                FnDescriptor::scale(-quarter_b2, a1m.clone()),
                m,
                FnDescriptor::scale(-beta * beta * 0.5, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(-beta * 0.5, a2m),
                am,
                FnDescriptor::scale(-beta * 0.5, a1m),
                FnDescriptor::scale(-beta, b),
            ]);
            Ok(FamilyBuild {
                case_id: 8,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: 1.0 + 2.0 * sup_m,
                exact_sup: 0.0,
            })
        }
        9 => {
            let beta = params.beta.unwrap_or(Complex64::ZERO);
            let m = require_multiplicative(&params.m, 9, "m")?;
            if m.structural_bound().is_none() {
                require_bounded(&group, &m, 9, "m")?;
            }
            if mult_sup(&group, &m)? <= 1e-12 {
                return Err(invalid(9, "m must be nonzero"));
            }
            let a = require_additive(&params.a, &group, 9, "a")?;
            let b = slot(&params.b);
            require_bounded(&group, &b, 9, "b")?;
            let f_desc = params
                .free_f
                .clone()
                .ok_or_else(|| invalid(9, "case 9 takes f as the free input"))?;
            let am = FnDescriptor::prod(vec![a, m.clone()]);
            let g_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(-beta * beta * 0.5, f_desc.clone()),
                m,
                FnDescriptor::scale(beta, am.clone()),
                FnDescriptor::scale(beta, b.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(-beta, f_desc.clone()),
                am,
                b,
            ]);
            Ok(FamilyBuild {
                case_id: 9,
                f: gf(f_desc)?,
                g: gf(g_desc)?,
                h: gf(h_desc)?,
                lipschitz: SLOT_AMPLITUDE_CAP,
                exact_sup: 0.0,
            })
        }
        10 => {
            if let Some(kind) = params.pair_kind {
                let pair = pair_from_params(&group, params, kind)?;
                let (f, g, h) = match kind {
                    PairKind::Sine => (
                        pair.f0.clone(),
                        pair.g0.clone(),
                        gf(FnDescriptor::Zero)?,
                    ),
                    PairKind::Cosine => (
                        pair.f0.clone(),
                        gf(FnDescriptor::scale(Complex64::new(0.5, 0.0), pair.f0.desc().clone()))?,
                        gf(FnDescriptor::scale(Complex64::new(0.0, 1.0), pair.g0.desc().clone()))?,
                    ),
                };
                return Ok(FamilyBuild { case_id: 10, f, g, h, lipschitz: 0.0, exact_sup: 0.0 });
            }
            let inner = params
                .delegate
                .as_ref()
                .ok_or_else(|| invalid(10, "case 10 needs a pair_kind or a delegate"))?;
            if !matches!(inner.case_id, 3..=8) {
                return Err(invalid(10, "delegate case must be one of 3..8"));
            }
            for (name, d) in [("b", &inner.b), ("phi", &inner.phi)] {
                if let Some(d) = d {
                    if d.structural_bound().map_or(true, |s| s > 1e-12) {
                        return Err(invalid(10, format!("delegate slot '{name}' must be zero")));
                    }
                }
            }
            if inner.case_id == 7 {
                return Err(invalid(10, "case 7 is never exact (psi = -lambda^2 m m)"));
            }
            let built = construct_case(group, inner)?;
            Ok(FamilyBuild { case_id: 10, lipschitz: built.lipschitz, exact_sup: 0.0, ..built })
        }
        other => Err(invalid(other, "case id must be 1..=10")),
    }
}

/// Normal forms of the dependent branch (five possibilities).
pub fn lemma33_form(
    group: Arc<GroupSpec>,
    branch: u8,
    params: &FamilyParams,
) -> Result<(GFunction, GFunction, GFunction)> {
    let gf = |d: FnDescriptor| GFunction::new(Arc::clone(&group), d);
    match branch {
        1 => {
            let phi = slot(&params.phi);
            require_bounded(&group, &phi, 1, "phi")?;
            Ok((gf(FnDescriptor::Zero)?, gf(slot(&params.free_g))?, gf(phi)?))
        }
        2 => {
            let b = construct_case(
                group,
                &FamilyParams { case_id: 2, ..params.clone() },
            )?;
            Ok((b.f, b.g, b.h))
        }
        3 => {
            let lambda = params.lambda.unwrap_or(Complex64::ZERO);
            let m = require_multiplicative(&params.m, 3, "m")?;
            let phi = slot(&params.phi);
            require_bounded(&group, &phi, 3, "phi")?;
            let f_desc = slot(&params.free_f);
            let g_desc = FnDescriptor::sum(vec![
                m,
                FnDescriptor::scale(-lambda, phi.clone()),
                FnDescriptor::scale(-lambda * lambda * 0.5, f_desc.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(lambda, f_desc.clone()),
                phi,
            ]);
            Ok((gf(f_desc)?, gf(g_desc)?, gf(h_desc)?))
        }
        4 => {
            let b = construct_case(group, &FamilyParams { case_id: 4, ..params.clone() })?;
            Ok((b.f, b.g, b.h))
        }
        5 => {
            let lambda = need_scalar(params.lambda, 5, "lambda")?;
            let pair = pair_from_params(&group, params, PairKind::Sine)?;
            let phi = slot(&params.phi);
            require_bounded(&group, &phi, 5, "phi")?;
            let g_desc = FnDescriptor::sum(vec![
                pair.g0.desc().clone(),
                FnDescriptor::scale(-lambda * lambda * 0.5, pair.f0.desc().clone()),
                FnDescriptor::scale(-lambda, phi.clone()),
            ]);
            let h_desc = FnDescriptor::sum(vec![
                FnDescriptor::scale(lambda, pair.f0.desc().clone()),
                phi,
            ]);
            Ok((pair.f0, gf(g_desc)?, gf(h_desc)?))
        }
        other => Err(invalid(other, "lemma branch must be 1..=5")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deviation::{psi_point, sup_deviation};
    use crate::group::Element;

    fn zgroup() -> Arc<GroupSpec> {
        Arc::new(GroupSpec::z())
    }

    fn x_desc() -> FnDescriptor {
        FnDescriptor::additive1(Complex64::ONE)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Independent evaluation of the per-case psi closed form at a pair.
    fn psi_formula(
        build: &FamilyBuild,
        params: &FamilyParams,
        x: &Element,
        y: &Element,
    ) -> Complex64 {
        let group = build.f.group();
        let xy = group.mul(x, y).unwrap();
        let at = |d: &FnDescriptor, p: &Element| {
            GFunction::new(Arc::clone(group), d.clone()).unwrap().eval(p).unwrap()
        };
        let b = slot(&params.b);
        let phi = slot(&params.phi);
        match build.case_id {
            3 => {
                let m = params.m.clone().unwrap();
                at(&phi, &xy) - at(&phi, x) * at(&m, y) - at(&m, x) * at(&phi, y)
                    - at(&b, x) * at(&b, y)
            }
            4 => {
                let alpha = params.alpha.unwrap();
                alpha * (at(&b, x) * at(&b, y) - at(&b, &xy)) - at(&phi, x) * at(&phi, y)
            }
            5 => -at(&b, x) * at(&b, y),
            6 => {
                let l2 = params.lambda.unwrap() * params.lambda.unwrap();
                l2 * (at(&b, &xy) - at(&b, x) * at(&b, y))
            }
            7 => {
                let l2 = params.lambda.unwrap() * params.lambda.unwrap();
                let m = params.m.clone().unwrap();
                at(&b, &xy) - at(&b, x) * at(&m, y) - at(&m, x) * at(&b, y)
                    - l2 * at(&m, x) * at(&m, y)
            }
            8 => {
                let m = params.m.clone().unwrap();
                at(&b, &xy) - at(&b, x) * at(&m, y) - at(&m, x) * at(&b, y)
            }
            other => panic!("no closed form registered for case {other}"),
        }
    }

    fn assert_psi_matches_formula(build: &FamilyBuild, params: &FamilyParams) {
        for (xv, yv) in [(0i64, 0i64), (3, -5), (17, 29), (-40, 40), (11, 13)] {
            let x = Element::LatticePoint(vec![xv]);
            let y = Element::LatticePoint(vec![yv]);
            let direct = psi_point(&build.f, &build.g, &build.h, &x, &y).unwrap();
            let formula = psi_formula(build, params, &x, &y);
            let scale = 1.0 + direct.norm().max(formula.norm());
            assert!(
                (direct - formula).norm() / scale <= 1e-9,
                "case {} at ({xv},{yv}): direct {direct}, formula {formula}",
                build.case_id
            );
        }
    }

    #[test]
    fn case_8_parabola_instance_is_exact() {
        let params = FamilyParams {
            case_id: 8,
            beta: Some(Complex64::ZERO),
            m: Some(FnDescriptor::one()),
            a: Some(x_desc()),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        // (x^2/2, 1, x)
        let p = Element::LatticePoint(vec![4]);
        assert!((b.f.eval(&p).unwrap() - c(8.0)).norm() <= 1e-12);
        assert!((b.g.eval(&p).unwrap() - c(1.0)).norm() <= 1e-12);
        assert!((b.h.eval(&p).unwrap() - c(4.0)).norm() <= 1e-12);
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[16, 32, 64]).unwrap();
        assert!(rep.sup <= 1e-9, "case 8 exact instance: sup {}", rep.sup);
    }

    #[test]
    fn case_7_doubling_instance_has_constant_psi() {
        let params = FamilyParams {
            case_id: 7,
            lambda: Some(Complex64::ONE),
            beta: Some(Complex64::ZERO),
            m: Some(FnDescriptor::one()),
            big_m: Some(FnDescriptor::ExpChar { mu: vec![c(2f64.ln())] }),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        let p = Element::LatticePoint(vec![5]);
        assert!((b.f.eval(&p).unwrap() - c(32.0)).norm() <= 1e-12);
        assert!((b.g.eval(&p).unwrap() - c(1.0)).norm() <= 1e-12);
        assert!((b.h.eval(&p).unwrap() - c(31.0)).norm() <= 1e-12);
        assert_eq!(b.exact_sup, 1.0);
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[8, 16, 24]).unwrap();
        assert_eq!(rep.sup, 1.0);
    }

    #[test]
    fn case_1_noise_bound() {
        let params = FamilyParams {
            case_id: 1,
            free_g: Some(FnDescriptor::Pow { inner: Box::new(x_desc()), k: 3 }),
            b: Some(FnDescriptor::noise(11, 0.4)),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[16, 32, 64]).unwrap();
        assert!(rep.sup <= 0.16, "psi = -h h should be below amp^2: {}", rep.sup);
    }

    #[test]
    fn closed_form_psi_matches_direct_psi_per_case() {
        let noise = |seed: u64| Some(FnDescriptor::noise(seed, 0.1));
        let cases = vec![
            FamilyParams {
                case_id: 3,
                lambda: Some(Complex64::new(0.8, 0.3)),
                a: Some(x_desc()),
                m: Some(FnDescriptor::Character { angles: vec![1.3] }),
                b: noise(1),
                phi: noise(2),
                ..Default::default()
            },
            FamilyParams {
                case_id: 4,
                alpha: Some(Complex64::new(1.5, -0.5)),
                lambda: Some(Complex64::new(0.7, 0.0)),
                m: Some(FnDescriptor::ExpChar { mu: vec![Complex64::new(0.04, 1.1)] }),
                b: noise(3),
                phi: noise(4),
                ..Default::default()
            },
            FamilyParams {
                case_id: 5,
                lambda: Some(Complex64::new(1.2, 0.1)),
                a: Some(x_desc()),
                m: Some(FnDescriptor::Character { angles: vec![2.1] }),
                b: noise(5),
                ..Default::default()
            },
            FamilyParams {
                case_id: 6,
                lambda: Some(Complex64::new(0.9, 0.2)),
                rho: Some(Complex64::new(0.4, -0.1)),
                m1: Some(FnDescriptor::ExpChar { mu: vec![Complex64::new(0.05, 0.9)] }),
                m2: Some(FnDescriptor::ExpChar { mu: vec![Complex64::new(-0.05, -0.9)] }),
                b: noise(6),
                ..Default::default()
            },
            FamilyParams {
                case_id: 7,
                lambda: Some(Complex64::new(1.1, 0.0)),
                beta: Some(Complex64::new(0.5, 0.2)),
                m: Some(FnDescriptor::Character { angles: vec![0.7] }),
                big_m: Some(FnDescriptor::ExpChar { mu: vec![Complex64::new(0.05, 0.3)] }),
                a: Some(FnDescriptor::additive1(Complex64::new(1.5, 0.0))),
                b: noise(7),
                ..Default::default()
            },
            FamilyParams {
                case_id: 8,
                beta: Some(Complex64::new(0.6, -0.3)),
                m: Some(FnDescriptor::Character { angles: vec![1.9] }),
                a: Some(FnDescriptor::additive1(Complex64::new(0.8, 0.1))),
                a1: Some(FnDescriptor::additive1(Complex64::new(-0.5, 0.0))),
                b: noise(8),
                ..Default::default()
            },
        ];
        for params in cases {
            let build = construct_case(zgroup(), &params).unwrap();
            assert_psi_matches_formula(&build, &params);
        }
    }

    #[test]
    fn exact_families_have_zero_psi() {
        // Cases 3, 4, 5, 6, 8 with zero slots: sup psi <= 1e-9 on window 64.
        for params in [
            FamilyParams {
                case_id: 3,
                lambda: Some(Complex64::new(1.4, -0.2)),
                a: Some(x_desc()),
                m: Some(FnDescriptor::Character { angles: vec![0.9] }),
                ..Default::default()
            },
            FamilyParams {
                case_id: 4,
                alpha: Some(Complex64::new(2.0, 0.0)),
                lambda: Some(Complex64::new(0.5, 0.5)),
                m: Some(FnDescriptor::ExpChar { mu: vec![Complex64::new(0.05, 0.4)] }),
                ..Default::default()
            },
            FamilyParams {
                case_id: 5,
                lambda: Some(Complex64::new(0.8, 0.0)),
                a: Some(x_desc()),
                m: Some(FnDescriptor::Character { angles: vec![std::f64::consts::PI] }),
                ..Default::default()
            },
            FamilyParams {
                case_id: 6,
                lambda: Some(Complex64::new(1.0, 0.0)),
                rho: Some(Complex64::new(0.3, 0.0)),
                m1: Some(FnDescriptor::Character { angles: vec![1.0] }),
                m2: Some(FnDescriptor::Character { angles: vec![-1.0] }),
                ..Default::default()
            },
            FamilyParams {
                case_id: 8,
                beta: Some(Complex64::new(0.4, 0.0)),
                m: Some(FnDescriptor::Character { angles: vec![2.2] }),
                a: Some(x_desc()),
                a1: Some(FnDescriptor::additive1(Complex64::new(0.7, 0.0))),
                ..Default::default()
            },
        ] {
            let case = params.case_id;
            let b = construct_case(zgroup(), &params).unwrap();
            let rep = sup_deviation(&b.f, &b.g, &b.h, &[16, 32, 64]).unwrap();
            assert!(rep.sup <= 1e-9, "case {case}: exact sup {}", rep.sup);
        }
    }

    #[test]
    fn sine_solution_examples() {
        let g = zgroup();
        // a = x, m = 1 gives (x, 1).
        let p = sine_solution(Arc::clone(&g), &x_desc(), &FnDescriptor::one()).unwrap();
        let e3 = Element::LatticePoint(vec![3]);
        assert_eq!(p.f0.eval(&e3).unwrap(), c(3.0));
        assert_eq!(p.g0.eval(&e3).unwrap(), c(1.0));

        // a = x, m = (-1)^x: f0 = x(-1)^x.
        let m = FnDescriptor::Character { angles: vec![std::f64::consts::PI] };
        let p = sine_solution(Arc::clone(&g), &x_desc(), &m).unwrap();
        assert!((p.f0.eval(&e3).unwrap() - c(-3.0)).norm() <= 1e-10);

        // a = 0 gives (0, m).
        let p = sine_solution(g, &FnDescriptor::Zero, &m).unwrap();
        assert_eq!(p.f0.eval(&e3).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn cosine_solution_examples() {
        let g = zgroup();
        // m1 = e^{ix}, m2 = e^{-ix} gives (cos, sin).
        let m1 = FnDescriptor::Character { angles: vec![1.0] };
        let m2 = FnDescriptor::Character { angles: vec![-1.0] };
        let p = cosine_solution(Arc::clone(&g), &m1, &m2).unwrap();
        let e2 = Element::LatticePoint(vec![2]);
        assert!((p.f0.eval(&e2).unwrap() - c(2.0f64.cos())).norm() <= 1e-12);
        assert!((p.g0.eval(&e2).unwrap() - c(2.0f64.sin())).norm() <= 1e-12);

        // m1 = m2 = m gives (m, 0).
        let p = cosine_solution(Arc::clone(&g), &m1, &m1).unwrap();
        assert!(p.g0.eval(&e2).unwrap().norm() <= 1e-15);

        // Doubling pair: relative kernel stays tiny despite huge magnitudes.
        let b1 = FnDescriptor::ExpChar { mu: vec![c(2f64.ln())] };
        let b2 = FnDescriptor::ExpChar { mu: vec![c(-(2f64.ln()))] };
        let p = cosine_solution(g, &b1, &b2).unwrap();
        assert_eq!(p.kind, PairKind::Cosine);
    }

    #[test]
    fn lemma33_branch_3_with_zero_lambda() {
        let params = FamilyParams {
            case_id: 3,
            lambda: Some(Complex64::ZERO),
            m: Some(FnDescriptor::Character { angles: vec![0.5] }),
            phi: Some(FnDescriptor::noise(2, 0.2)),
            free_f: Some(x_desc()),
            ..Default::default()
        };
        let (f, g, h) = lemma33_form(zgroup(), 3, &params).unwrap();
        let p = Element::LatticePoint(vec![7]);
        // lambda = 0: g = m and h = phi.
        let m = GFunction::new(zgroup(), FnDescriptor::Character { angles: vec![0.5] }).unwrap();
        let phi = GFunction::new(zgroup(), FnDescriptor::noise(2, 0.2)).unwrap();
        assert!((g.eval(&p).unwrap() - m.eval(&p).unwrap()).norm() <= 1e-15);
        assert!((h.eval(&p).unwrap() - phi.eval(&p).unwrap()).norm() <= 1e-15);
        assert_eq!(f.eval(&p).unwrap(), c(7.0));
    }

    #[test]
    fn lemma33_branch_5_substitution() {
        // branch 5 with lambda = 1, f0 = x, g0 = 1, phi = noise(0.1):
        // f = x, g = 1 - x/2 - phi, h = x + phi.
        let params = FamilyParams {
            case_id: 5,
            lambda: Some(Complex64::ONE),
            a: Some(x_desc()),
            m: Some(FnDescriptor::one()),
            phi: Some(FnDescriptor::noise(4, 0.1)),
            ..Default::default()
        };
        let (f, g, h) = lemma33_form(zgroup(), 5, &params).unwrap();
        let phi = GFunction::new(zgroup(), FnDescriptor::noise(4, 0.1)).unwrap();
        let p = Element::LatticePoint(vec![6]);
        let pv = phi.eval(&p).unwrap();
        assert_eq!(f.eval(&p).unwrap(), c(6.0));
        assert!((g.eval(&p).unwrap() - (c(1.0) - c(3.0) - pv)).norm() <= 1e-12);
        assert!((h.eval(&p).unwrap() - (c(6.0) + pv)).norm() <= 1e-12);
    }

    #[test]
    fn lemma33_branch_1_requires_bounded_h() {
        let params = FamilyParams {
            case_id: 1,
            phi: Some(x_desc()),
            ..Default::default()
        };
        assert!(matches!(
            lemma33_form(zgroup(), 1, &params),
            Err(CoreError::InvalidParams { .. })
        ));
    }

    #[test]
    fn case_10_delegates_and_pairs_are_exact() {
        // Sine pair as a raw solution triple.
        let params = FamilyParams {
            case_id: 10,
            pair_kind: Some(PairKind::Sine),
            a: Some(x_desc()),
            m: Some(FnDescriptor::Character { angles: vec![1.1] }),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[8, 16, 32]).unwrap();
        assert!(rep.sup <= 1e-9);

        // Cosine pair embeds as (f0, f0/2, i g0).
        let params = FamilyParams {
            case_id: 10,
            pair_kind: Some(PairKind::Cosine),
            m1: Some(FnDescriptor::Character { angles: vec![0.8] }),
            m2: Some(FnDescriptor::Character { angles: vec![-0.3] }),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[8, 16, 32]).unwrap();
        assert!(rep.sup <= 1e-9);

        // Delegate to an exact case 8.
        let params = FamilyParams {
            case_id: 10,
            delegate: Some(Box::new(FamilyParams {
                case_id: 8,
                beta: Some(c(0.3)),
                m: Some(FnDescriptor::one()),
                a: Some(x_desc()),
                ..Default::default()
            })),
            ..Default::default()
        };
        let b = construct_case(zgroup(), &params).unwrap();
        assert_eq!(b.case_id, 10);
        let rep = sup_deviation(&b.f, &b.g, &b.h, &[8, 16, 32]).unwrap();
        assert!(rep.sup <= 1e-9);
    }

    #[test]
    fn invalid_params_are_rejected_with_the_clause() {
        // Case 8 with a = 0.
        let params = FamilyParams {
            case_id: 8,
            m: Some(FnDescriptor::one()),
            a: Some(FnDescriptor::Zero),
            ..Default::default()
        };
        match construct_case(zgroup(), &params) {
            Err(CoreError::InvalidParams { case: 8, clause }) => {
                assert!(clause.contains("a must be nonzero"), "clause: {clause}");
            }
            other => panic!("expected InvalidParams, got {other:?}"),
        }

        // Case 6 with lambda = 0.
        let params = FamilyParams {
            case_id: 6,
            lambda: Some(Complex64::ZERO),
            rho: Some(c(0.5)),
            m1: Some(FnDescriptor::Character { angles: vec![1.0] }),
            m2: Some(FnDescriptor::Character { angles: vec![-1.0] }),
            ..Default::default()
        };
        assert!(matches!(
            construct_case(zgroup(), &params),
            Err(CoreError::InvalidParams { case: 6, .. })
        ));

        // Case 3 with an unbounded slot.
        let params = FamilyParams {
            case_id: 3,
            lambda: Some(Complex64::ONE),
            a: Some(x_desc()),
            m: Some(FnDescriptor::one()),
            b: Some(x_desc()),
            ..Default::default()
        };
        assert!(matches!(
            construct_case(zgroup(), &params),
            Err(CoreError::InvalidParams { case: 3, .. })
        ));
    }

    #[test]
    fn lipschitz_bound_holds_for_sampled_noise_slots() {
        // A spot check of the converse property at two amplitudes; the full
        // 50-draw grid lives in the acceptance suite.
        for eps in [0.01, 0.1] {
            let params = FamilyParams {
                case_id: 3,
                lambda: Some(Complex64::new(1.5, 0.0)),
                a: Some(x_desc()),
                m: Some(FnDescriptor::Character { angles: vec![1.0] }),
                b: Some(FnDescriptor::noise(41, eps)),
                phi: Some(FnDescriptor::noise(42, eps)),
                ..Default::default()
            };
            let b = construct_case(zgroup(), &params).unwrap();
            let rep = sup_deviation(&b.f, &b.g, &b.h, &[16, 32, 64]).unwrap();
            assert!(
                rep.sup <= b.exact_sup + b.lipschitz * eps + 1e-9,
                "eps {eps}: sup {} vs bound {}",
                rep.sup,
                b.exact_sup + b.lipschitz * eps
            );
        }
    }
}
