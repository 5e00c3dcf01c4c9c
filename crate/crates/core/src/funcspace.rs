//! Evaluable complex-valued functions on a group.
//!
//! A [`FnDescriptor`] is a small expression tree whose leaves are the
//! structured functions of the theory — additive maps a(x) = sum c_j x_j,
//! bounded characters m(x) = exp(i theta.x), exponential characters
//! M(x) = exp(mu.x), finite-group characters and tables, and reproducible
//! bounded noise — combined by sums, products, scalings and small powers.
//! A [`GFunction`] pairs a descriptor with the group it lives on; evaluation
//! is exact per the closed forms and defined on the whole group, not just
//! inside scan windows.
//!
//! Boundedness of a function is undecidable from finite data; the committed
//! proxy is a three-valued verdict from sup-norm scans over a doubling
//! radius schedule (see [`boundedness`]).

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::group::{Element, GroupSpec};
use crate::json::{complex_pair, complex_vec};
use crate::noise::noise_value;

/// Values with modulus below this are treated as identically zero by scans.
pub const ZERO_FLOOR: f64 = 1e-12;

/// Natural-log magnitude at which exponential-character evaluation errors out.
pub const EXP_OVERFLOW_LIMIT: f64 = 700.0;

/// Default radius schedule for boundedness scans.
pub fn default_schedule() -> Vec<u32> {
    vec![16, 32, 64, 128]
}

/// Default growth-ratio tolerance for boundedness verdicts.
pub const DEFAULT_TAU: f64 = 0.05;

/// Expression tree for an evaluable function on a group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum FnDescriptor {
    /// The zero function.
    Zero,
    /// A constant.
    Const {
        #[serde(with = "complex_pair")]
        c: Complex64,
    },
    /// Additive map on a lattice: a(x) = sum_j coeffs[j] * x_j.
    Additive {
        #[serde(with = "complex_vec")]
        coeffs: Vec<Complex64>,
    },
    /// Unitary character on a lattice: m(x) = exp(i * sum_j angles[j] * x_j).
    Character { angles: Vec<f64> },
    /// Exponential character on a lattice: M(x) = exp(sum_j mu[j] * x_j).
    ExpChar {
        #[serde(with = "complex_vec")]
        mu: Vec<Complex64>,
    },
    /// Multiplicative function with explicit bases: M(x) = prod_j bases[j]^(x_j).
    ///
    /// Equivalent to `ExpChar` with mu = log(bases) but lets fixtures pin
    /// f64-exact bases such as 2.0.
    Geom {
        #[serde(with = "complex_vec")]
        bases: Vec<Complex64>,
    },
    /// Multiplicative function on a finite group given by its value table.
    FiniteChar {
        #[serde(with = "complex_vec")]
        values: Vec<Complex64>,
    },
    /// Reproducible bounded noise, real-valued in [-amp, amp).
    Noise { seed: u64, amp: f64 },
    /// Arbitrary value table over a finite group.
    Table {
        #[serde(with = "complex_vec")]
        values: Vec<Complex64>,
    },
    Sum { args: Vec<FnDescriptor> },
    Prod { args: Vec<FnDescriptor> },
    Scale {
        #[serde(with = "complex_pair")]
        c: Complex64,
        inner: Box<FnDescriptor>,
    },
    Pow { inner: Box<FnDescriptor>, k: u32 },
}

impl FnDescriptor {
    pub fn constant(re: f64) -> Self {
        FnDescriptor::Const { c: Complex64::new(re, 0.0) }
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn additive1(c: Complex64) -> Self {
        FnDescriptor::Additive { coeffs: vec![c] }
    }

    pub fn noise(seed: u64, amp: f64) -> Self {
        FnDescriptor::Noise { seed, amp }
    }

    pub fn sum(args: Vec<FnDescriptor>) -> Self {
        FnDescriptor::Sum { args }
    }

    pub fn prod(args: Vec<FnDescriptor>) -> Self {
        FnDescriptor::Prod { args }
    }

    pub fn scale(c: Complex64, inner: FnDescriptor) -> Self {
        FnDescriptor::Scale { c, inner: Box::new(inner) }
    }

    /// inner - other, as a descriptor.
    pub fn minus(self, other: FnDescriptor) -> Self {
        FnDescriptor::Sum { args: vec![self, FnDescriptor::scale(-Complex64::ONE, other)] }
    }

    /// sin(angle * x) on Z, built from two characters.
    pub fn sin_character(angle: f64) -> Self {
        let half_i = Complex64::new(0.0, -0.5); // 1/(2i)
        FnDescriptor::Sum {
            args: vec![
                FnDescriptor::scale(half_i, FnDescriptor::Character { angles: vec![angle] }),
                FnDescriptor::scale(-half_i, FnDescriptor::Character { angles: vec![-angle] }),
            ],
        }
    }

    /// A sup bound derivable from structure alone, when one exists.
    pub fn structural_bound(&self) -> Option<f64> {
        match self {
            FnDescriptor::Zero => Some(0.0),
            FnDescriptor::Const { c } => Some(c.norm()),
            FnDescriptor::Character { .. } => Some(1.0),
            FnDescriptor::Noise { amp, .. } => Some(amp.abs()),
            FnDescriptor::ExpChar { mu } => {
                if mu.iter().all(|m| m.re == 0.0) {
                    Some(1.0)
                } else {
                    None
                }
            }
            FnDescriptor::Geom { bases } => {
                if bases.iter().all(|b| (b.norm() - 1.0).abs() <= ZERO_FLOOR) {
                    Some(1.0)
                } else {
                    None
                }
            }
            FnDescriptor::FiniteChar { values } | FnDescriptor::Table { values } => {
                Some(values.iter().fold(0.0f64, |m, v| m.max(v.norm())))
            }
            FnDescriptor::Additive { coeffs } => {
                if coeffs.iter().all(|c| c.norm() <= ZERO_FLOOR) {
                    Some(0.0)
                } else {
                    None
                }
            }
            FnDescriptor::Sum { args } => {
                args.iter().map(|a| a.structural_bound()).sum::<Option<f64>>()
            }
            FnDescriptor::Prod { args } => args
                .iter()
                .map(|a| a.structural_bound())
                .try_fold(1.0, |acc, b| b.map(|b| acc * b)),
            FnDescriptor::Scale { c, inner } => inner.structural_bound().map(|b| c.norm() * b),
            FnDescriptor::Pow { inner, k } => {
                inner.structural_bound().map(|b| b.powi(*k as i32))
            }
        }
    }

    /// True when the descriptor is multiplicative by structure alone.
    pub fn is_multiplicative(&self) -> bool {
        match self {
            FnDescriptor::Zero
            | FnDescriptor::Character { .. }
            | FnDescriptor::ExpChar { .. }
            | FnDescriptor::Geom { .. }
            | FnDescriptor::FiniteChar { .. } => true,
            FnDescriptor::Const { c } => {
                (c * c - c).norm() <= ZERO_FLOOR // only 0 and 1 are multiplicative constants
            }
            FnDescriptor::Prod { args } => args.iter().all(|a| a.is_multiplicative()),
            FnDescriptor::Pow { inner, .. } => inner.is_multiplicative(),
            FnDescriptor::Scale { c, inner } => {
                (c.norm() <= ZERO_FLOOR) || (*c == Complex64::ONE && inner.is_multiplicative())
            }
            _ => false,
        }
    }

    /// Pointwise inverse of a nowhere-zero multiplicative descriptor.
    pub fn invert_multiplicative(&self) -> Result<FnDescriptor> {
        match self {
            FnDescriptor::Zero => Err(CoreError::ZeroCharacter),
            FnDescriptor::Const { c } => {
                if c.norm() <= ZERO_FLOOR {
                    Err(CoreError::ZeroCharacter)
                } else {
                    Ok(FnDescriptor::Const { c: c.inv() })
                }
            }
            FnDescriptor::Character { angles } => Ok(FnDescriptor::Character {
                angles: angles.iter().map(|a| -a).collect(),
            }),
            FnDescriptor::ExpChar { mu } => Ok(FnDescriptor::ExpChar {
                mu: mu.iter().map(|m| -m).collect(),
            }),
            FnDescriptor::Geom { bases } => {
                if bases.iter().any(|b| b.norm() <= ZERO_FLOOR) {
                    return Err(CoreError::ZeroCharacter);
                }
                Ok(FnDescriptor::Geom { bases: bases.iter().map(|b| b.inv()).collect() })
            }
            FnDescriptor::FiniteChar { values } => {
                if values.iter().any(|v| v.norm() <= ZERO_FLOOR) {
                    return Err(CoreError::ZeroCharacter);
                }
                Ok(FnDescriptor::FiniteChar { values: values.iter().map(|v| v.inv()).collect() })
            }
            FnDescriptor::Prod { args } => Ok(FnDescriptor::Prod {
                args: args
                    .iter()
                    .map(|a| a.invert_multiplicative())
                    .collect::<Result<Vec<_>>>()?,
            }),
            FnDescriptor::Pow { inner, k } => Ok(FnDescriptor::Pow {
                inner: Box::new(inner.invert_multiplicative()?),
                k: *k,
            }),
            FnDescriptor::Scale { c, inner } => {
                if c.norm() <= ZERO_FLOOR {
                    Err(CoreError::ZeroCharacter)
                } else {
                    Ok(FnDescriptor::Scale {
                        c: c.inv(),
                        inner: Box::new(inner.invert_multiplicative()?),
                    })
                }
            }
            other => Err(CoreError::DescriptorMismatch(format!(
                "cannot invert non-multiplicative descriptor {other:?}"
            ))),
        }
    }

    fn validate(&self, group: &GroupSpec) -> Result<()> {
        match self {
            FnDescriptor::Zero | FnDescriptor::Const { .. } | FnDescriptor::Noise { .. } => Ok(()),
            FnDescriptor::Additive { coeffs } => {
                let dim = group.dim().map_err(|_| {
                    CoreError::DescriptorMismatch("additive leaf on a finite group".into())
                })?;
                if coeffs.len() != dim {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "additive coefficient count {} != lattice dimension {dim}",
                        coeffs.len()
                    )));
                }
                Ok(())
            }
            FnDescriptor::Character { angles } => {
                let dim = group.dim().map_err(|_| {
                    CoreError::DescriptorMismatch("character leaf on a finite group".into())
                })?;
                if angles.len() != dim {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "character angle count {} != lattice dimension {dim}",
                        angles.len()
                    )));
                }
                Ok(())
            }
            FnDescriptor::ExpChar { mu } => {
                let dim = group.dim().map_err(|_| {
                    CoreError::DescriptorMismatch("exp-character leaf on a finite group".into())
                })?;
                if mu.len() != dim {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "exp-character exponent count {} != lattice dimension {dim}",
                        mu.len()
                    )));
                }
                Ok(())
            }
            FnDescriptor::Geom { bases } => {
                let dim = group.dim().map_err(|_| {
                    CoreError::DescriptorMismatch("geom leaf on a finite group".into())
                })?;
                if bases.len() != dim {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "geom base count {} != lattice dimension {dim}",
                        bases.len()
                    )));
                }
                Ok(())
            }
            FnDescriptor::FiniteChar { values } => {
                let order = group.order().map_err(|_| {
                    CoreError::DescriptorMismatch("finite-character leaf on a lattice".into())
                })?;
                if values.len() != order {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "finite-character table length {} != group order {order}",
                        values.len()
                    )));
                }
                // The multiplicative law must hold exactly over all pairs.
                for i in 0..order {
                    for j in 0..order {
                        let xy = group
                            .mul(&Element::FiniteIndex(i), &Element::FiniteIndex(j))
                            .expect("indices in range");
                        let Element::FiniteIndex(k) = xy else { unreachable!() };
                        if (values[k] - values[i] * values[j]).norm() > ZERO_FLOOR {
                            return Err(CoreError::DescriptorMismatch(format!(
                                "finite-character law fails at pair ({i}, {j})"
                            )));
                        }
                    }
                }
                Ok(())
            }
            FnDescriptor::Table { values } => {
                let order = group.order().map_err(|_| {
                    CoreError::DescriptorMismatch("table leaf on a lattice".into())
                })?;
                if values.len() != order {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "table length {} != group order {order}",
                        values.len()
                    )));
                }
                Ok(())
            }
            FnDescriptor::Sum { args } | FnDescriptor::Prod { args } => {
                args.iter().try_for_each(|a| a.validate(group))
            }
            FnDescriptor::Scale { inner, .. } => inner.validate(group),
            FnDescriptor::Pow { inner, k } => {
                if *k == 0 || *k > 16 {
                    return Err(CoreError::DescriptorMismatch(format!(
                        "pow exponent {k} outside 1..=16"
                    )));
                }
                inner.validate(group)
            }
        }
    }
}

/// Integer power of a complex base by binary powering; exact for exact
/// bases. Negative exponents invert the base first so shrinking powers
/// underflow cleanly instead of overflowing midway.
fn powi(base: Complex64, n: i64) -> Complex64 {
    if n == 0 {
        return Complex64::ONE;
    }
    let mut e = n.unsigned_abs();
    let mut acc = Complex64::ONE;
    let mut b = if n < 0 { base.inv() } else { base };
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

/// An evaluable function bound to its group.
#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    group: Arc<GroupSpec>,
    desc: FnDescriptor,
}

impl GFunction {
    /// Bind a descriptor to a group, validating leaf compatibility.
    pub fn new(group: Arc<GroupSpec>, desc: FnDescriptor) -> Result<Self> {
        desc.validate(&group)?;
        Ok(GFunction { group, desc })
    }

    pub fn zero(group: Arc<GroupSpec>) -> Self {
        GFunction { group, desc: FnDescriptor::Zero }
    }

    pub fn group(&self) -> &Arc<GroupSpec> {
        &self.group
    }

    pub fn desc(&self) -> &FnDescriptor {
        &self.desc
    }

    /// Same group, different descriptor; skips re-validation of shared leaves.
    pub fn with_desc(&self, desc: FnDescriptor) -> Result<Self> {
        GFunction::new(Arc::clone(&self.group), desc)
    }

    /// Linear combination sum_i c_i * f_i over a shared group.
    pub fn combine(parts: &[(Complex64, &GFunction)]) -> Result<Self> {
        let group = Arc::clone(parts.first().expect("nonempty combination").1.group());
        let mut args = Vec::with_capacity(parts.len());
        for (c, f) in parts {
            if f.group.as_ref() != group.as_ref() {
                return Err(CoreError::ElementMismatch("combining functions on different groups".into()));
            }
            args.push(FnDescriptor::scale(*c, f.desc.clone()));
        }
        Ok(GFunction { group, desc: FnDescriptor::Sum { args } })
    }

    /// Pointwise product f * g.
    pub fn pointwise_mul(&self, other: &GFunction) -> Result<Self> {
        if self.group.as_ref() != other.group.as_ref() {
            return Err(CoreError::ElementMismatch("product of functions on different groups".into()));
        }
        Ok(GFunction {
            group: Arc::clone(&self.group),
            desc: FnDescriptor::Prod { args: vec![self.desc.clone(), other.desc.clone()] },
        })
    }

    /// Evaluate at a point; exact per the leaf closed forms.
    pub fn eval(&self, x: &Element) -> Result<Complex64> {
        if !self.group.contains(x) {
            return Err(CoreError::ElementMismatch(format!("{x:?} not in the function's group")));
        }
        eval_desc(&self.desc, &self.group, x)
    }

    /// Evaluate over a slice of elements.
    pub fn eval_many(&self, xs: &[Element]) -> Result<Vec<Complex64>> {
        xs.iter().map(|x| self.eval(x)).collect()
    }
}

fn eval_desc(desc: &FnDescriptor, group: &GroupSpec, x: &Element) -> Result<Complex64> {
    match desc {
        FnDescriptor::Zero => Ok(Complex64::ZERO),
        FnDescriptor::Const { c } => Ok(*c),
        FnDescriptor::Additive { coeffs } => match x {
            Element::LatticePoint(p) => {
                let mut acc = Complex64::ZERO;
                for (c, &xi) in coeffs.iter().zip(p) {
                    acc += c * (xi as f64);
                }
                Ok(acc)
            }
            _ => Err(CoreError::DescriptorMismatch("additive leaf needs a lattice point".into())),
        },
        FnDescriptor::Character { angles } => match x {
            Element::LatticePoint(p) => {
                let mut phase = 0.0f64;
                for (a, &xi) in angles.iter().zip(p) {
                    phase += a * (xi as f64);
                }
                Ok(Complex64::new(phase.cos(), phase.sin()))
            }
            _ => Err(CoreError::DescriptorMismatch("character leaf needs a lattice point".into())),
        },
        FnDescriptor::ExpChar { mu } => match x {
            Element::LatticePoint(p) => {
                let mut log_sum = Complex64::ZERO;
                for (m, &xi) in mu.iter().zip(p) {
                    log_sum += m * (xi as f64);
                }
                // Values above the f64 range are a hard error; values below
                // it underflow to an exact zero, which is the limit.
                if log_sum.re > EXP_OVERFLOW_LIMIT {
                    return Err(CoreError::ExpOverflow { magnitude: log_sum.re });
                }
                if log_sum.re < -745.0 {
                    return Ok(Complex64::ZERO);
                }
                // Per-coordinate base powering: exact when exp(mu_j) is exact.
                let mut acc = Complex64::ONE;
                for (m, &xi) in mu.iter().zip(p) {
                    acc *= powi(m.exp(), xi);
                }
                Ok(acc)
            }
            _ => Err(CoreError::DescriptorMismatch("exp-character leaf needs a lattice point".into())),
        },
        FnDescriptor::Geom { bases } => match x {
            Element::LatticePoint(p) => {
                let mut log_mag = 0.0f64;
                for (b, &xi) in bases.iter().zip(p) {
                    let n = b.norm();
                    if n <= 0.0 {
                        return Err(CoreError::ZeroCharacter);
                    }
                    log_mag += n.ln() * (xi as f64);
                }
                if log_mag > EXP_OVERFLOW_LIMIT {
                    return Err(CoreError::ExpOverflow { magnitude: log_mag });
                }
                if log_mag < -745.0 {
                    return Ok(Complex64::ZERO);
                }
                let mut acc = Complex64::ONE;
                for (b, &xi) in bases.iter().zip(p) {
                    acc *= powi(*b, xi);
                }
                Ok(acc)
            }
            _ => Err(CoreError::DescriptorMismatch("geom leaf needs a lattice point".into())),
        },
        FnDescriptor::FiniteChar { values } | FnDescriptor::Table { values } => match x {
            Element::FiniteIndex(i) => Ok(values[*i]),
            _ => Err(CoreError::DescriptorMismatch("table leaf needs a finite index".into())),
        },
        FnDescriptor::Noise { seed, amp } => {
            Ok(Complex64::new(noise_value(*seed, &x.digest_coords(), *amp), 0.0))
        }
        FnDescriptor::Sum { args } => {
            let mut acc = Complex64::ZERO;
            for a in args {
                acc += eval_desc(a, group, x)?;
            }
            Ok(acc)
        }
        FnDescriptor::Prod { args } => {
            let mut acc = Complex64::ONE;
            for a in args {
                acc *= eval_desc(a, group, x)?;
            }
            Ok(acc)
        }
        FnDescriptor::Scale { c, inner } => Ok(c * eval_desc(inner, group, x)?),
        FnDescriptor::Pow { inner, k } => {
            let v = eval_desc(inner, group, x)?;
            Ok(powi(v, *k as i64))
        }
    }
}

/// Result of a sup-norm scan: the sup and where it was attained.
#[derive(Debug, Clone, Serialize)]
pub struct SupNorm {
    pub sup: f64,
    pub argmax: Element,
}

/// Max of |F| over a precomputed window, ties broken by the earlier element
/// (windows are in lexicographic order, so the argmax is deterministic).
pub fn sup_norm_over(f: &GFunction, window: &[Element]) -> Result<SupNorm> {
    let mut best = f64::NEG_INFINITY;
    let mut arg = None;
    for x in window {
        let v = f.eval(x)?.norm();
        if v > best {
            best = v;
            arg = Some(x.clone());
        }
    }
    Ok(SupNorm {
        sup: best.max(0.0),
        argmax: arg.expect("window is nonempty"),
    })
}

/// Max of |F| over `window(group, radius)`.
pub fn sup_norm(f: &GFunction, radius: u32) -> Result<SupNorm> {
    let w = f.group().window(radius);
    sup_norm_over(f, &w)
}

/// Three-valued boundedness verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Bounded { bound: f64 },
    Unbounded { growth_ratio: f64 },
    Inconclusive,
}

/// Boundedness verdict plus the per-radius sup trace behind it.
#[derive(Debug, Clone, Serialize)]
pub struct BoundVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub trace: Vec<(u32, f64)>,
}

impl BoundVerdict {
    pub fn is_bounded(&self) -> bool {
        matches!(self.verdict, Verdict::Bounded { .. })
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self.verdict, Verdict::Unbounded { .. })
    }

    pub fn bound(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Bounded { bound } => Some(bound),
            _ => None,
        }
    }
}

pub(crate) fn validate_schedule(schedule: &[u32]) -> Result<()> {
    if schedule.len() < 3 {
        return Err(CoreError::BadSchedule(format!(
            "schedule needs at least 3 radii, got {}",
            schedule.len()
        )));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CoreError::BadSchedule("schedule must be strictly increasing".into()));
    }
    Ok(())
}

/// Verdict from an already-computed non-decreasing sup trace.
pub(crate) fn verdict_from_trace(trace: &[(u32, f64)], tau: f64) -> Verdict {
    let max = trace.iter().fold(0.0f64, |m, &(_, s)| m.max(s));
    if max <= ZERO_FLOOR {
        return Verdict::Bounded { bound: max };
    }
    let mut ratios = Vec::with_capacity(trace.len() - 1);
    for w in trace.windows(2) {
        let (prev, next) = (w[0].1, w[1].1);
        let r = if prev <= ZERO_FLOOR {
            if next <= ZERO_FLOOR {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            next / prev
        };
        ratios.push(r);
    }
    let last = *ratios.last().expect("trace has >= 2 entries");
    if last <= 1.0 + tau {
        Verdict::Bounded { bound: max }
    } else if ratios.iter().all(|&r| r >= 1.0 + 3.0 * tau) {
        Verdict::Unbounded {
            growth_ratio: ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    } else {
        Verdict::Inconclusive
    }
}

/// Boundedness heuristic over a radius schedule.
///
/// Bounded when the last two sups agree within tau (or everything is at the
/// zero floor); Unbounded when every consecutive ratio exceeds 1 + 3 tau;
/// Inconclusive otherwise. Finite groups get an exact Bounded verdict from a
/// single full scan.
pub fn boundedness(f: &GFunction, schedule: &[u32], tau: f64) -> Result<BoundVerdict> {
    validate_schedule(schedule)?;
    if f.group().is_finite() {
        let s = sup_norm(f, *schedule.last().expect("nonempty"))?;
        return Ok(BoundVerdict {
            verdict: Verdict::Bounded { bound: s.sup },
            trace: vec![(*schedule.last().expect("nonempty"), s.sup)],
        });
    }
    let mut trace = Vec::with_capacity(schedule.len());
    for &r in schedule {
        let s = sup_norm(f, r)?;
        trace.push((r, s.sup));
    }
    Ok(BoundVerdict { verdict: verdict_from_trace(&trace, tau), trace })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zgroup() -> Arc<GroupSpec> {
        Arc::new(GroupSpec::z())
    }

    fn gf(desc: FnDescriptor) -> GFunction {
        GFunction::new(zgroup(), desc).unwrap()
    }

    fn at(x: i64) -> Element {
        Element::LatticePoint(vec![x])
    }

    #[test]
    fn additive_eval() {
        let f = gf(FnDescriptor::additive1(Complex64::new(3.0, 0.0)));
        assert_eq!(f.eval(&at(5)).unwrap(), Complex64::new(15.0, 0.0));
    }

    #[test]
    fn character_eval_is_unit_modulus() {
        let f = gf(FnDescriptor::Character { angles: vec![std::f64::consts::PI] });
        let v = f.eval(&at(1)).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        for x in -50..50 {
            let v = f.eval(&at(x)).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sum_of_additive_and_noise() {
        let f = gf(FnDescriptor::sum(vec![
            FnDescriptor::additive1(Complex64::ONE),
            FnDescriptor::noise(7, 0.3),
        ]));
        let v = f.eval(&at(10)).unwrap();
        let eta = v - Complex64::new(10.0, 0.0);
        assert!(eta.norm() <= 0.3, "noise escaped amplitude: {eta}");
        // The value is exactly 10 + the committed noise algorithm's output.
        assert_eq!(v.re, 10.0 + noise_value(7, &[10], 0.3));
    }

    #[test]
    fn exp_char_base_two_is_exact() {
        let f = gf(FnDescriptor::ExpChar { mu: vec![Complex64::new(2.0f64.ln(), 0.0)] });
        assert_eq!(f.eval(&at(10)).unwrap(), Complex64::new(1024.0, 0.0));
        assert_eq!(f.eval(&at(-3)).unwrap(), Complex64::new(0.125, 0.0));
        assert_eq!(f.eval(&at(52)).unwrap().re, 4503599627370496.0);
    }

    #[test]
    fn exp_char_overflow_is_an_error() {
        let f = gf(FnDescriptor::ExpChar { mu: vec![Complex64::new(1.0, 0.0)] });
        assert!(matches!(f.eval(&at(701)), Err(CoreError::ExpOverflow { .. })));
        assert!(f.eval(&at(700)).is_ok());
        // Deep underflow is the exact limit, not an error.
        assert_eq!(f.eval(&at(-800)).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn finite_char_law_is_checked_at_construction() {
        let z2 = Arc::new(GroupSpec::cyclic(2).unwrap());
        let ok = GFunction::new(
            Arc::clone(&z2),
            FnDescriptor::FiniteChar {
                values: vec![Complex64::ONE, -Complex64::ONE],
            },
        );
        assert!(ok.is_ok());
        let bad = GFunction::new(
            z2,
            FnDescriptor::FiniteChar {
                values: vec![Complex64::ONE, Complex64::new(0.5, 0.0)],
            },
        );
        assert!(matches!(bad, Err(CoreError::DescriptorMismatch(_))));
    }

    #[test]
    fn sup_norm_examples() {
        let zero = gf(FnDescriptor::Zero);
        assert_eq!(sup_norm(&zero, 16).unwrap().sup, 0.0);

        let lin = gf(FnDescriptor::additive1(Complex64::ONE));
        let s = sup_norm(&lin, 8).unwrap();
        assert_eq!(s.sup, 8.0);
        // Lexicographic tie-break: -8 comes before 8.
        assert_eq!(s.argmax, at(-8));

        let ch = gf(FnDescriptor::Character { angles: vec![1.0] });
        assert!((sup_norm(&ch, 13).unwrap().sup - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundedness_verdicts() {
        let sched = default_schedule();
        let ch = gf(FnDescriptor::Character { angles: vec![2.0] });
        let v = boundedness(&ch, &sched, DEFAULT_TAU).unwrap();
        assert!(v.is_bounded());
        assert!((v.bound().unwrap() - 1.0).abs() < 1e-12);

        let lin = gf(FnDescriptor::additive1(Complex64::ONE));
        let v = boundedness(&lin, &sched, DEFAULT_TAU).unwrap();
        assert!(v.is_unbounded());

        let noise = gf(FnDescriptor::noise(11, 0.5));
        let v = boundedness(&noise, &sched, DEFAULT_TAU).unwrap();
        assert!(v.is_bounded());
        assert!(v.bound().unwrap() <= 0.5);
    }

    #[test]
    fn boundedness_rejects_bad_schedules() {
        let f = gf(FnDescriptor::Zero);
        assert!(matches!(
            boundedness(&f, &[16, 32], DEFAULT_TAU),
            Err(CoreError::BadSchedule(_))
        ));
        assert!(matches!(
            boundedness(&f, &[16, 16, 32], DEFAULT_TAU),
            Err(CoreError::BadSchedule(_))
        ));
    }

    #[test]
    fn bounded_verdict_bound_is_trace_max() {
        let noise = gf(FnDescriptor::noise(3, 0.25));
        let v = boundedness(&noise, &default_schedule(), DEFAULT_TAU).unwrap();
        let trace_max = v.trace.iter().fold(0.0f64, |m, &(_, s)| m.max(s));
        assert_eq!(v.bound().unwrap(), trace_max);
    }

    #[test]
    fn finite_groups_are_always_bounded() {
        let z6 = Arc::new(GroupSpec::cyclic(6).unwrap());
        let f = GFunction::new(
            z6,
            FnDescriptor::Table {
                values: (0..6).map(|i| Complex64::new(i as f64, 0.0)).collect(),
            },
        )
        .unwrap();
        let v = boundedness(&f, &default_schedule(), DEFAULT_TAU).unwrap();
        assert!(v.is_bounded());
        assert_eq!(v.bound().unwrap(), 5.0);
    }

    #[test]
    fn descriptor_json_matches_documented_shape() {
        let d = FnDescriptor::sum(vec![
            FnDescriptor::Additive { coeffs: vec![Complex64::ONE] },
            FnDescriptor::noise(7, 0.3),
        ]);
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"op":"sum","args":[{"op":"additive","coeffs":[[1.0,0.0]]},{"op":"noise","seed":7,"amp":0.3}]}"#
        );
        let back: FnDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn multiplicative_structure_checks() {
        assert!(FnDescriptor::Character { angles: vec![1.0] }.is_multiplicative());
        assert!(FnDescriptor::one().is_multiplicative());
        assert!(!FnDescriptor::constant(2.0).is_multiplicative());
        assert!(!FnDescriptor::additive1(Complex64::ONE).is_multiplicative());
        let inv = FnDescriptor::Character { angles: vec![0.7] }
            .invert_multiplicative()
            .unwrap();
        assert_eq!(inv, FnDescriptor::Character { angles: vec![-0.7] });
        assert!(matches!(
            FnDescriptor::Zero.invert_multiplicative(),
            Err(CoreError::ZeroCharacter)
        ));
    }
}
