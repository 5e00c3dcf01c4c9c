//! Constructive Hyers projections on lattices.
//!
//! A function with bounded Cauchy defect is a bounded distance from an
//! additive map; on Z^d that map is linear in the coordinates and its
//! coefficients are the dyadic limits a_j = lim f(2^n e_j) / 2^n. The
//! iteration stops on Cauchy agreement of successive iterates, keeps the
//! best-agreeing iterate when pollution makes the tail diverge again, and
//! certifies the result by measuring sup |f - a| on a check window against
//! the classical |f - a| <= delta bound.
//!
//! On finite groups every additive function vanishes (elements have finite
//! order), so the projection degenerates to coefficients zero; the
//! certificate still holds because |f(x) - mean_y(f(xy) - f(y))| <= delta
//! and the mean is additive, hence zero.

use num_complex::Complex64;
use serde::Serialize;

use crate::deviation::cauchy_defect;
use crate::error::{CoreError, Result};
use crate::funcspace::{default_schedule, sup_norm, FnDescriptor, GFunction, Verdict, DEFAULT_TAU};
use crate::group::Element;
use crate::json::complex_vec;

/// Hard cap on dyadic depth; 2^40 times a generator stays far inside i64.
pub const MAX_DEPTH: u32 = 40;

/// Radius of the residual-certificate window.
pub const CERTIFICATE_RADIUS: u32 = 32;

/// Outcome of an additive-part extraction.
#[derive(Debug, Clone, Serialize)]
pub struct HyersResult {
    /// Coefficients of the additive part, one per lattice generator.
    #[serde(with = "complex_vec")]
    pub coeffs: Vec<Complex64>,
    /// Certified sup bound of the Cauchy defect that was used.
    pub delta: f64,
    /// Observed sup |f - a| over the certificate window.
    pub residual_bound: f64,
    /// Dyadic iterations actually executed (max over generators).
    pub iterations: u32,
}

/// One dyadic limit v_n = f(2^n g) / s^n with s in {2, 4}.
///
/// Returns the best iterate (smallest successive difference) together with
/// the number of iterations executed. Exp overflow past the current depth
/// ends the iteration with the best value so far; other errors propagate.
pub(crate) fn dyadic_limit(
    f: &GFunction,
    generator: &Element,
    shrink: f64,
    depth: u32,
    tol: f64,
) -> Result<(Complex64, u32)> {
    let group = f.group().clone();
    let depth = depth.min(MAX_DEPTH);
    // Stop below tol/4: the geometric tail after stopping is about twice the
    // last difference, which keeps each limit within tol/2 of its target and
    // sums of limits within the documented 2 tol.
    let stop = tol * 0.25;
    let mut point = generator.clone();
    let mut scale = 1.0f64;
    let mut prev = match f.eval(&point) {
        Ok(v) => v,
        Err(CoreError::ExpOverflow { .. }) => return Ok((Complex64::ZERO, 0)),
        Err(e) => return Err(e),
    };
    let mut best = (f64::INFINITY, prev, 0u32);
    let mut n = 0u32;
    while n < depth {
        let doubled = match group.mul(&point, &point) {
            Ok(p) => p,
            Err(CoreError::Overflow(_)) => break,
            Err(e) => return Err(e),
        };
        point = doubled;
        scale *= shrink;
        n += 1;
        let value = match f.eval(&point) {
            Ok(v) => v / scale,
            Err(CoreError::ExpOverflow { .. }) => break,
            Err(e) => return Err(e),
        };
        let diff = (value - prev).norm();
        if diff < best.0 {
            best = (diff, value, n);
        }
        prev = value;
        if diff < stop {
            return Ok((value, n));
        }
    }
    Ok((best.1, n.max(best.2)))
}

fn lattice_generators(dim: usize) -> Vec<Element> {
    (0..dim)
        .map(|j| {
            let mut c = vec![0i64; dim];
            c[j] = 1;
            Element::LatticePoint(c)
        })
        .collect()
}

/// Additive descriptor from coefficients.
pub fn additive_descriptor(coeffs: &[Complex64]) -> FnDescriptor {
    FnDescriptor::Additive { coeffs: coeffs.to_vec() }
}

/// Extract the additive part of f by dyadic projection.
///
/// Preconditions: on lattices the Cauchy defect of f must scan Bounded (its
/// bound becomes the certificate delta). Finite groups take the degenerate
/// zero-coefficient path.
pub fn additive_part(f: &GFunction, depth: u32, tol: f64) -> Result<HyersResult> {
    additive_part_with(f, depth, tol, &default_schedule(), DEFAULT_TAU)
}

/// As [`additive_part`], with an explicit defect schedule and tolerance.
pub fn additive_part_with(
    f: &GFunction,
    depth: u32,
    tol: f64,
    schedule: &[u32],
    tau: f64,
) -> Result<HyersResult> {
    if f.group().is_finite() {
        let defect = cauchy_defect(f, schedule)?;
        let sup = sup_norm(f, 0)?.sup;
        return Ok(HyersResult {
            coeffs: vec![],
            delta: defect.sup,
            residual_bound: sup,
            iterations: 0,
        });
    }
    let kernel = crate::deviation::CauchyKernel { f };
    let (defect, verdict) =
        crate::deviation::kernel_verdict_hardened(&kernel, f.group(), schedule, tau)?;
    let delta = match verdict {
        Verdict::Bounded { bound } => bound,
        other => {
            return Err(CoreError::UnboundedCauchyDefect(format!(
                "cauchy defect verdict {other:?} (sup {:.3e} at radius {})",
                defect.sup, defect.radius
            )))
        }
    };
    let dim = f.group().dim()?;
    let mut coeffs = Vec::with_capacity(dim);
    let mut iterations = 0u32;
    for g in lattice_generators(dim) {
        let (c, n) = dyadic_limit(f, &g, 2.0, depth.min(MAX_DEPTH), tol)?;
        coeffs.push(c);
        iterations = iterations.max(n);
    }
    let additive = f.with_desc(additive_descriptor(&coeffs))?;
    let residual = GFunction::combine(&[(Complex64::ONE, f), (-Complex64::ONE, &additive)])?;
    let residual_bound = sup_norm(&residual, CERTIFICATE_RADIUS)?.sup;
    Ok(HyersResult { coeffs, delta, residual_bound, iterations })
}

/// Pointwise twist x -> f(x) m(x)^{-1} for a nowhere-zero multiplicative m.
pub fn twist_by_character(f: &GFunction, m: &GFunction) -> Result<GFunction> {
    if !m.desc().is_multiplicative() {
        return Err(CoreError::DescriptorMismatch(
            "twist requires a multiplicative descriptor".into(),
        ));
    }
    let inv = m.desc().invert_multiplicative()?;
    let inv_fn = m.with_desc(inv)?;
    f.pointwise_mul(&inv_fn)
}

/// Outcome of the quadratic/additive split 2 f m^{-1} - a^2 = a_1 + b_0.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticSplit {
    /// Coefficients of the extracted second additive part a_1.
    #[serde(with = "complex_vec")]
    pub a1: Vec<Complex64>,
    /// Sup bound of the remainder b_0 over the certificate window.
    pub b_bound: f64,
    pub iterations: u32,
}

/// Split f = (1/2) a^2 m + (1/2) a_1 m + b given m and a: forms
/// r = 2 f m^{-1} - a^2, projects its additive part a_1, and reports the
/// remainder bound (the implied bounded slot is b = (1/2) m b_0).
pub fn quadratic_split(
    f: &GFunction,
    m: &GFunction,
    a_coeffs: &[Complex64],
    depth: u32,
    tol: f64,
) -> Result<QuadraticSplit> {
    if !f.group().is_lattice() {
        return Err(CoreError::NotLattice);
    }
    let r = split_remainder_input(f, m, a_coeffs)?;
    let result = additive_part(&r, depth, tol)?;
    Ok(QuadraticSplit {
        a1: result.coeffs,
        b_bound: result.residual_bound,
        iterations: result.iterations,
    })
}

/// r = 2 f m^{-1} - a^2, the function whose additive part is a_1.
pub fn split_remainder_input(
    f: &GFunction,
    m: &GFunction,
    a_coeffs: &[Complex64],
) -> Result<GFunction> {
    let twisted = twist_by_character(f, m)?;
    let a_sq = FnDescriptor::Pow {
        inner: Box::new(additive_descriptor(a_coeffs)),
        k: 2,
    };
    f.with_desc(FnDescriptor::Sum {
        args: vec![
            FnDescriptor::scale(Complex64::new(2.0, 0.0), twisted.desc().clone()),
            FnDescriptor::scale(-Complex64::ONE, a_sq),
        ],
    })
}
