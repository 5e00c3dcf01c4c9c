//! Independent brute-force verification: exhaustive deviation sups on finite
//! groups, exhaustive enumeration of multiplicative functions on small
//! groups, and the construct / perturb / classify round-trip harness.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::classifier::{classify, CaseReport, CaseVerdict, ClassifierConfig};
use crate::error::{CoreError, Result};
use crate::families::{construct_case, FamilyParams, PairKind};
use crate::funcspace::FnDescriptor;
use crate::group::GroupSpec;
use crate::json::complex_vec;
use crate::noise::SplitMix64Stream;

/// Order cap for multiplicative-map enumeration.
pub const ENUMERATION_LIMIT: usize = 12;

/// Exact sup of |psi| over all pairs of a finite group, by double loop over
/// raw value tables. Written independently of the descriptor machinery so it
/// can serve as the oracle for `sup_deviation`.
pub fn exhaustive_deviation(
    group: &GroupSpec,
    f: &[Complex64],
    g: &[Complex64],
    h: &[Complex64],
) -> Result<f64> {
    let GroupSpec::Finite { table, .. } = group else {
        return Err(CoreError::NotFinite);
    };
    let order = table.len();
    for (name, values) in [("f", f), ("g", g), ("h", h)] {
        if values.len() != order {
            return Err(CoreError::BadTable(format!(
                "{name} table has length {} on an order-{order} group",
                values.len()
            )));
        }
    }
    let mut sup = 0.0f64;
    for x in 0..order {
        for y in 0..order {
            let xy = table[x][y];
            let psi = f[xy] - f[x] * g[y] - g[x] * f[y] - h[x] * h[y];
            sup = sup.max(psi.norm());
        }
    }
    Ok(sup)
}

/// One multiplicative map found by enumeration.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplicativeMap {
    #[serde(with = "complex_vec")]
    pub values: Vec<Complex64>,
    /// Exponent vector k with values[x] = exp(2 pi i k[x] / order), or None
    /// for the zero map.
    pub exponents: Option<Vec<usize>>,
}

/// All multiplicative maps G -> C on a finite group of order <= 12.
///
/// Nonzero multiplicative maps on a group never vanish and take order-th
/// root-of-unity values, so the search assigns exponents to a greedy
/// generating set, propagates through the Cayley table in exact integer
/// arithmetic, checks the law over all pairs, and appends the zero map.
pub fn enumerate_multiplicative(group: &GroupSpec) -> Result<Vec<MultiplicativeMap>> {
    let GroupSpec::Finite { table, identity, .. } = group else {
        return Err(CoreError::NotFinite);
    };
    let order = table.len();
    if order > ENUMERATION_LIMIT {
        return Err(CoreError::TooLarge { order, limit: ENUMERATION_LIMIT });
    }

    // Greedy generating set: extend with the smallest element outside the
    // generated subgroup until it covers the group.
    let mut generators: Vec<usize> = Vec::new();
    let mut generated = vec![false; order];
    generated[*identity] = true;
    let closure = |gens: &[usize], seen: &mut Vec<bool>| {
        seen.iter_mut().for_each(|s| *s = false);
        seen[*identity] = true;
        let mut frontier = vec![*identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = table[x][g];
                if !seen[y] {
                    seen[y] = true;
                    frontier.push(y);
                }
            }
        }
    };
    while let Some(missing) = (0..order).find(|&x| !generated[x]) {
        generators.push(missing);
        closure(&generators, &mut generated);
    }

    let mut maps: Vec<Vec<usize>> = Vec::new();
    let gen_count = generators.len();
    let total = order.pow(gen_count as u32);
    'assignment: for code in 0..total {
        let mut exps = vec![usize::MAX; order];
        exps[*identity] = 0;
        let mut gen_exp = Vec::with_capacity(gen_count);
        let mut c = code;
        for _ in 0..gen_count {
            gen_exp.push(c % order);
            c /= order;
        }
        // Propagate: exp(x g) = exp(x) + exp(g) mod order.
        let mut frontier = vec![*identity];
        while let Some(x) = frontier.pop() {
            for (gi, &g) in generators.iter().enumerate() {
                let y = table[x][g];
                let e = (exps[x] + gen_exp[gi]) % order;
                if exps[y] == usize::MAX {
                    exps[y] = e;
                    frontier.push(y);
                } else if exps[y] != e {
                    continue 'assignment;
                }
            }
        }
        // The law must hold exactly over all pairs.
        for x in 0..order {
            for y in 0..order {
                if exps[table[x][y]] != (exps[x] + exps[y]) % order {
                    continue 'assignment;
                }
            }
        }
        if !maps.contains(&exps) {
            maps.push(exps);
        }
    }
    maps.sort();

    let root = |k: usize| {
        let angle = 2.0 * std::f64::consts::PI * (k as f64) / (order as f64);
        Complex64::new(angle.cos(), angle.sin())
    };
    let mut out: Vec<MultiplicativeMap> = maps
        .into_iter()
        .map(|exps| MultiplicativeMap {
            values: exps.iter().map(|&k| root(k)).collect(),
            exponents: Some(exps),
        })
        .collect();
    out.push(MultiplicativeMap { values: vec![Complex64::ZERO; order], exponents: None });
    Ok(out)
}

/// Outcome of one construct / perturb / classify round trip.
#[derive(Debug, Clone, Serialize)]
pub struct RoundTripOutcome {
    pub case_in: u8,
    pub seed: u64,
    pub noise_amp: f64,
    /// Structural verdict, when one was reached.
    pub case_out: Option<u8>,
    pub exact: bool,
    /// Max relative error over the compared fitted scalars.
    pub param_error: f64,
    pub passed: bool,
    /// A verdict naming a case other than case_in (and not excused by the
    /// exactness rule) — a hard failure for the acceptance suite.
    pub wrong_case: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unclassified: Option<String>,
    pub psi_sup: f64,
}

fn unit(stream: &mut SplitMix64Stream) -> Complex64 {
    let phase = stream.uniform(0.0, 2.0 * std::f64::consts::PI);
    Complex64::new(phase.cos(), phase.sin())
}

fn scalar_in(stream: &mut SplitMix64Stream, lo: f64, hi: f64) -> Complex64 {
    stream.uniform(lo, hi) * unit(stream)
}

fn exp_mu(stream: &mut SplitMix64Stream) -> Complex64 {
    let re = stream.uniform(0.03, 0.05) * if stream.next_f64() < 0.5 { 1.0 } else { -1.0 };
    let im = stream.uniform(-std::f64::consts::PI, std::f64::consts::PI);
    Complex64::new(re, im)
}

fn noise_slot(stream: &mut SplitMix64Stream, amp: f64) -> FnDescriptor {
    FnDescriptor::Noise { seed: stream.next_u64(), amp }
}

/// Documented parameter draw per case: |lambda|, |alpha| in [0.5, 2] with a
/// uniform phase, |beta|, |rho| <= 1, character angles in [0, 2 pi),
/// exp-character exponents with |Re mu| in [0.03, 0.05] (pair-scan
/// cancellation noise stays 10 orders below the slot amplitudes), additive
/// coefficients with modulus in [0.5, 2]. Bounded slots are seeded noise at
/// `amp`.
pub fn draw_params(case_id: u8, seed: u64, amp: f64) -> FamilyParams {
    let mut s = SplitMix64Stream::new(seed ^ (0x5EED_0000 + case_id as u64));
    let angle = |s: &mut SplitMix64Stream| s.uniform(0.0, 2.0 * std::f64::consts::PI);
    let additive = |s: &mut SplitMix64Stream| FnDescriptor::Additive {
        coeffs: vec![scalar_in(s, 0.5, 2.0)],
    };
    match case_id {
        1 => FamilyParams {
            case_id,
            free_g: Some(FnDescriptor::scale(
                scalar_in(&mut s, 0.5, 2.0),
                FnDescriptor::Pow {
                    inner: Box::new(FnDescriptor::additive1(Complex64::ONE)),
                    k: 3,
                },
            )),
            b: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        2 => FamilyParams {
            case_id,
            free_f: Some(noise_slot(&mut s, amp)),
            free_g: Some(noise_slot(&mut s, amp)),
            free_h: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        3 => FamilyParams {
            case_id,
            lambda: Some(scalar_in(&mut s, 0.5, 2.0)),
            a: Some(additive(&mut s)),
            m: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
            b: Some(noise_slot(&mut s, amp)),
            phi: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        4 => FamilyParams {
            case_id,
            alpha: Some(scalar_in(&mut s, 0.5, 2.0)),
            lambda: Some(scalar_in(&mut s, 0.5, 2.0)),
            m: Some(FnDescriptor::ExpChar { mu: vec![exp_mu(&mut s)] }),
            b: Some(noise_slot(&mut s, amp)),
            phi: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        5 => {
            let lambda = Some(scalar_in(&mut s, 0.5, 2.0));
            if s.next_f64() < 0.5 {
                // Two-character sine pair with opposite growth.
                let mu = exp_mu(&mut s);
                FamilyParams {
                    case_id,
                    lambda,
                    m1: Some(FnDescriptor::ExpChar { mu: vec![mu] }),
                    m2: Some(FnDescriptor::ExpChar {
                        mu: vec![Complex64::new(-mu.re, angle(&mut s) - std::f64::consts::PI)],
                    }),
                    b: Some(noise_slot(&mut s, amp)),
                    ..Default::default()
                }
            } else {
                // f0 = a M with an unbounded multiplicative M.
                FamilyParams {
                    case_id,
                    lambda,
                    a: Some(additive(&mut s)),
                    m: Some(FnDescriptor::ExpChar { mu: vec![exp_mu(&mut s)] }),
                    b: Some(noise_slot(&mut s, amp)),
                    ..Default::default()
                }
            }
        }
        6 => {
            let mu = exp_mu(&mut s);
            FamilyParams {
                case_id,
                lambda: Some(scalar_in(&mut s, 0.5, 2.0)),
                rho: Some(scalar_in(&mut s, 0.0, 1.0)),
                m1: Some(FnDescriptor::ExpChar { mu: vec![mu] }),
                m2: Some(FnDescriptor::ExpChar {
                    mu: vec![Complex64::new(-mu.re, angle(&mut s) - std::f64::consts::PI)],
                }),
                b: Some(noise_slot(&mut s, amp)),
                ..Default::default()
            }
        }
        7 => FamilyParams {
            case_id,
            lambda: Some(scalar_in(&mut s, 0.5, 2.0)),
            beta: Some(scalar_in(&mut s, 0.0, 1.0)),
            m: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
            big_m: Some(FnDescriptor::ExpChar { mu: vec![exp_mu(&mut s)] }),
            a: Some(additive(&mut s)),
            b: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        8 => FamilyParams {
            case_id,
            beta: Some(scalar_in(&mut s, 0.0, 1.0)),
            m: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
            a: Some(additive(&mut s)),
            a1: Some(additive(&mut s)),
            b: Some(noise_slot(&mut s, amp)),
            ..Default::default()
        },
        10 => {
            let which = (s.next_u64() % 7) as u8;
            match which {
                0 => FamilyParams {
                    case_id,
                    pair_kind: Some(PairKind::Sine),
                    a: Some(additive(&mut s)),
                    m: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
                    ..Default::default()
                },
                1 => FamilyParams {
                    case_id,
                    pair_kind: Some(PairKind::Cosine),
                    m1: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
                    m2: Some(FnDescriptor::Character { angles: vec![angle(&mut s)] }),
                    ..Default::default()
                },
                _ => {
                    let inner_case = [3u8, 4, 5, 6, 8][(which - 2) as usize];
                    let mut inner = draw_params(inner_case, s.next_u64(), 0.0);
                    inner.b = None;
                    inner.phi = None;
                    FamilyParams {
                        case_id,
                        delegate: Some(Box::new(inner)),
                        ..Default::default()
                    }
                }
            }
        }
        other => FamilyParams { case_id: other, ..Default::default() },
    }
}

fn relative_error(fitted: Complex64, truth: Complex64) -> f64 {
    (fitted - truth).norm() / truth.norm().max(1.0)
}

fn additive_coeffs(d: &Option<FnDescriptor>) -> Vec<Complex64> {
    match d {
        Some(FnDescriptor::Additive { coeffs }) => coeffs.clone(),
        _ => vec![],
    }
}

/// Max relative error over the scalars a case pins down, honoring the sign
/// pair (lambda, rho) <-> (-lambda, -rho) of the cosine reduction.
fn param_error(case_id: u8, drawn: &FamilyParams, report: &CaseReport) -> f64 {
    let Some(fitted) = report.fitted.as_ref() else {
        return 0.0;
    };
    let mut err = 0.0f64;
    let mut cmp = |a: Option<Complex64>, b: Option<Complex64>| {
        if let (Some(a), Some(b)) = (a, b) {
            err = err.max(relative_error(a, b));
        }
    };
    match case_id {
        3 => {
            cmp(fitted.lambda, drawn.lambda);
            let (fa, da) = (additive_coeffs(&fitted.a), additive_coeffs(&drawn.a));
            for (x, y) in fa.iter().zip(&da) {
                err = err.max(relative_error(*x, *y));
            }
        }
        4 => {
            cmp(fitted.alpha, drawn.alpha);
            cmp(fitted.lambda, drawn.lambda);
        }
        5 => cmp(fitted.lambda, drawn.lambda),
        6 => {
            // Sign-pair freedom: compare against both representatives.
            let (fl, fr) = (fitted.lambda, fitted.rho);
            let (dl, dr) = (drawn.lambda, drawn.rho);
            if let (Some(fl), Some(fr), Some(dl), Some(dr)) = (fl, fr, dl, dr) {
                let direct = relative_error(fl, dl).max(relative_error(fr, dr));
                let flipped = relative_error(-fl, dl).max(relative_error(-fr, dr));
                err = err.max(direct.min(flipped));
            }
        }
        7 => {
            cmp(fitted.lambda, drawn.lambda);
            cmp(fitted.beta, drawn.beta);
            let (fa, da) = (additive_coeffs(&fitted.a), additive_coeffs(&drawn.a));
            for (x, y) in fa.iter().zip(&da) {
                err = err.max(relative_error(*x, *y));
            }
        }
        8 => {
            cmp(fitted.beta, drawn.beta);
            for (slot_f, slot_d) in [(&fitted.a, &drawn.a), (&fitted.a1, &drawn.a1)] {
                let (fa, da) = (additive_coeffs(slot_f), additive_coeffs(slot_d));
                for (x, y) in fa.iter().zip(&da) {
                    err = err.max(relative_error(*x, *y));
                }
            }
        }
        _ => {}
    }
    err
}

/// Draw, construct, perturb (the draw already carries noise slots at
/// `noise_amp`), classify, and compare.
pub fn roundtrip(
    case_id: u8,
    seed: u64,
    noise_amp: f64,
    cfg: &ClassifierConfig,
) -> Result<RoundTripOutcome> {
    if case_id == 9 {
        return Err(CoreError::InvalidParams {
            case: 9,
            clause: "case 9 is verify-only; the harness cannot draw its free f".into(),
        });
    }
    let group = Arc::new(GroupSpec::z());
    let params = draw_params(case_id, seed, noise_amp);
    let build = construct_case(group, &params)?;
    let report = classify(&build.f, &build.g, &build.h, cfg)?;

    let (case_out, unclassified) = match &report.verdict {
        CaseVerdict::Case(k) => (Some(*k), None),
        CaseVerdict::Unclassified(reason) => (None, Some(reason.clone())),
    };
    let err = match case_out {
        Some(k) if k == case_id => param_error(case_id, &params, &report),
        _ => 0.0,
    };
    let passed = match case_out {
        Some(k) if case_id == 10 => report.exact && k != 9,
        Some(k) => (k == case_id && err <= 1e-2) || (k == 10 && report.exact),
        None => false,
    };
    let wrong_case = match case_out {
        Some(k) => {
            if case_id == 10 {
                !report.exact
            } else {
                k != case_id && !(k == 10 && report.exact) && !report.exact
            }
        }
        None => false,
    };
    Ok(RoundTripOutcome {
        case_in: case_id,
        seed,
        noise_amp,
        case_out,
        exact: report.exact,
        param_error: err,
        passed,
        wrong_case,
        unclassified,
        psi_sup: report.psi_sup,
    })
}

/// Deterministic random value tables for the finite-group oracle runs.
pub fn random_tables(order: usize, seed: u64) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let mut s = SplitMix64Stream::new(seed ^ 0xF1117E);
    let mut draw = |n: usize| -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(s.uniform(-2.0, 2.0), s.uniform(-2.0, 2.0)))
            .collect()
    };
    (draw(order), draw(order), draw(order))
}
