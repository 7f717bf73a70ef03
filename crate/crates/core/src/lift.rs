//! Assembly of half-integral-weight theta-lift Fourier expansions from the
//! trace functionals, together with their consistency machinery: pointwise
//! evaluation with tail certification, a termwise lowering-operator check
//! against finite differences, the weight-3/2 shadow map, and a direct
//! theta-kernel quadrature oracle for individual cycle-trace coefficients.
//!
//! A lift expansion is a finite list of *terms*. Each term carries an index
//! d, a shape kind, a complex coefficient, and shape parameters; its value at
//! τ = x + iy (y > 0, q = e^{2πiτ}) is
//!
//! - `holo`:                c·q^d
//! - `ypow`,  params [b]:   c·q^d/(16πy)^b
//! - `h_shape`, params [l]: c·h_l(ξ)/ξ^l·q^d,        ξ = 2√(2π|d|y), d < 0
//! - `J_shape`, params [l,r]: c·J_l(η)/η^l·q^d,      η = 2r√(2πy),   d = r²
//! - `I_shape`, params [k,a]: c·(I_k−Ω̃_k)(η)/η^k·q^d, η = 2a√(2πy), d = a²
//! - `log_shape`, params [k]: c·(log(8πy)/2 + C_k)/(16πy)^{k/2}
//! - `const`, params [p]:   c/(8πy)^p   (p may be half-integral or negative)
//!
//! The builders produce the expansions of weight k + 1/2 attached to the
//! twisted Hauptmodul lift (k = 1), to the powers of the completed weight-2
//! Eisenstein series, and to a general nearly holomorphic input of weight 2k
//! whose layer-k constant term vanishes.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bqf::{hurwitz, is_fundamental};
use crate::lattice::ipow;
use crate::modular::{Coeff, NearlyHolForm};
use crate::poly::{bernoulli_number, factorial, omega_tilde, q_at_zero, rat_to_f64};
use crate::quad::gauss_legendre_nodes;
use crate::special::{c_const, h_fn, i_simple, j_fn};
use crate::trace::{trace_cm, trace_cycle, trace_square, trace_zero, twisted_cm, twisted_trace};
use crate::{Error, Result};

const SQRT_2PI: f64 = 2.5066282746310002;

/// Point-evaluation tolerance used inside quadratures and term evaluation.
const EVAL_TOL: f64 = 1e-11;

/// Truncation order for forms built internally by the lift constructors.
const FORM_ORDER: i64 = 64;

// ---------------------------------------------------------------------------
// Terms and expansions
// ---------------------------------------------------------------------------

/// The shape of a single term of a lift expansion (see module docs).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftKind {
    #[serde(rename = "holo")]
    Holo,
    #[serde(rename = "ypow")]
    YPow,
    #[serde(rename = "h_shape")]
    HShape,
    #[serde(rename = "J_shape")]
    JShape,
    #[serde(rename = "I_shape")]
    IShape,
    #[serde(rename = "log_shape")]
    LogShape,
    #[serde(rename = "const")]
    Const,
}

impl LiftKind {
    fn rank(self) -> u8 {
        match self {
            LiftKind::Const => 0,
            LiftKind::LogShape => 1,
            LiftKind::Holo => 2,
            LiftKind::YPow => 3,
            LiftKind::HShape => 4,
            LiftKind::JShape => 5,
            LiftKind::IShape => 6,
        }
    }
}

/// One term of a lift expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftTerm {
    pub d: i64,
    pub kind: LiftKind,
    pub coeff_re: f64,
    pub coeff_im: f64,
    pub params: Vec<f64>,
}

impl LiftTerm {
    pub fn new(d: i64, kind: LiftKind, coeff: Complex64, params: Vec<f64>) -> Self {
        LiftTerm {
            d,
            kind,
            coeff_re: coeff.re,
            coeff_im: coeff.im,
            params,
        }
    }

    /// The complex coefficient.
    pub fn coeff(&self) -> Complex64 {
        Complex64::new(self.coeff_re, self.coeff_im)
    }

    fn param(&self, i: usize) -> Result<f64> {
        self.params.get(i).copied().ok_or_else(|| {
            Error::Precondition(format!("term kind {:?} needs params[{i}]", self.kind))
        })
    }

    /// Evaluate the term at τ in the upper half-plane.
    pub fn evaluate(&self, tau: Complex64) -> Result<Complex64> {
        let y = tau.im;
        if y <= 0.0 {
            return Err(Error::Domain("τ must lie in the upper half-plane".into()));
        }
        let c = self.coeff();
        let qd = (Complex64::new(0.0, 2.0 * PI) * tau * self.d as f64).exp();
        match self.kind {
            LiftKind::Holo => Ok(c * qd),
            LiftKind::YPow => {
                let b = self.param(0)?;
                Ok(c * qd * (16.0 * PI * y).powf(-b))
            }
            LiftKind::HShape => {
                let l = self.param(0)? as i64;
                let xi = 2.0 * (2.0 * PI * self.d.unsigned_abs() as f64 * y).sqrt();
                Ok(c * qd * h_fn(l, xi)? * xi.powi(-(l as i32)))
            }
            LiftKind::JShape => {
                let l = self.param(0)? as i64;
                let r = self.param(1)?;
                let eta = 2.0 * r * (2.0 * PI * y).sqrt();
                Ok(c * qd * j_fn(l, eta) * eta.powi(-(l as i32)))
            }
            LiftKind::IShape => {
                let k = self.param(0)? as i64;
                let a = self.param(1)?;
                let eta = 2.0 * a * (2.0 * PI * y).sqrt();
                let val = i_simple(k, eta, 1e-12)?.value - omega_tilde(k as usize).eval_f64(eta);
                Ok(c * qd * val * eta.powi(-(k as i32)))
            }
            LiftKind::LogShape => {
                let k = self.param(0)? as i64;
                let v = (8.0 * PI * y).ln() / 2.0 + c_const(k as usize);
                Ok(c * qd * v * (16.0 * PI * y).powf(-(k as f64) / 2.0))
            }
            LiftKind::Const => {
                let p = self.param(0)?;
                Ok(c * qd * (8.0 * PI * y).powf(-p))
            }
        }
    }
}

/// Tolerances recorded alongside an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftTolerances {
    pub tol: f64,
    pub reg_t: f64,
    pub quad_nodes: usize,
}

/// Metadata of an expansion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftMeta {
    pub d_max: i64,
    pub tolerances: LiftTolerances,
}

/// A lift expansion of weight k + 1/2: a provenance label, the integer k,
/// an optional twisting discriminant, the terms, and metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftExpansion {
    pub theorem: String,
    pub k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<i64>,
    pub terms: Vec<LiftTerm>,
    pub meta: LiftMeta,
}

impl LiftExpansion {
    /// Half-integral weight k + 1/2.
    pub fn half_weight(&self) -> f64 {
        self.k as f64 + 0.5
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::Domain(format!("serialization failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Domain(format!("deserialization failed: {e}")))
    }
}

fn sort_terms(terms: &mut [LiftTerm]) {
    terms.sort_by(|a, b| {
        (a.d, a.kind.rank())
            .cmp(&(b.d, b.kind.rank()))
            .then_with(|| {
                a.params
                    .partial_cmp(&b.params)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
}

// ---------------------------------------------------------------------------
// Trace dispatch with a global cache
// ---------------------------------------------------------------------------

fn square_root_of(d: i64) -> Option<i64> {
    if d < 0 {
        return None;
    }
    let mut r = (d as f64).sqrt().round() as i64;
    while r * r > d {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= d {
        r += 1;
    }
    (r * r == d).then_some(r)
}

fn form_key(f: &NearlyHolForm) -> u64 {
    let s = serde_json::to_string(f).expect("forms serialize");
    let mut h = DefaultHasher::new();
    s.hash(&mut h);
    h.finish()
}

static TRACE_CACHE: OnceLock<Mutex<HashMap<(u64, i64), f64>>> = OnceLock::new();

/// The index-d trace of f, dispatched on the sign and squareness of d and
/// memoized across lift constructions (keyed by a hash of the form).
fn cached_trace(f: &NearlyHolForm, key: u64, d: i64, reg_t: f64, nodes: usize) -> Result<f64> {
    let cache = TRACE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&(key, d)) {
        return Ok(v);
    }
    let tv = if d == 0 {
        trace_zero(f)?
    } else if d < 0 {
        trace_cm(f, d)?
    } else if square_root_of(d).is_some() {
        trace_square(f, d, reg_t, nodes)?
    } else {
        trace_cycle(f, d, nodes)?
    };
    cache.lock().unwrap().insert((key, d), tv.value);
    Ok(tv.value)
}

fn fact(n: usize) -> f64 {
    rat_to_f64(&factorial(n))
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Lift of the product J·E₂* twisted by a fundamental discriminant Δ < 0
/// (weight 3/2, k = 1). Coefficient support sits at exponents d with
/// −d ≡ 0, 1 (mod 4): twisted traces of J·E₂* at d > 0, genus-character CM
/// sums of J against an h-shape at d < 0, a J-shape at d = |Δ|, and the
/// constant 48·|Δ|·H(|Δ|).
#[allow(non_snake_case)]
pub fn lift_jE2(delta: i64, d_max: i64, nodes: usize, reg_t: f64) -> Result<LiftExpansion> {
    if delta >= 0 || !is_fundamental(delta) {
        return Err(Error::Precondition(format!(
            "the twist needs a fundamental discriminant Δ < 0, got {delta}"
        )));
    }
    if d_max < 1 {
        return Err(Error::Precondition(format!(
            "d_max must be ≥ 1, got {d_max}"
        )));
    }
    let j = NearlyHolForm::j_normalized(FORM_ORDER)?;
    let je2 = j.multiply(&NearlyHolForm::e2_star(FORM_ORDER));
    let abs_delta = -delta;

    let mut terms = Vec::new();
    let h_abs = rat_to_f64(&hurwitz(abs_delta as u64));
    terms.push(LiftTerm::new(
        0,
        LiftKind::Const,
        Complex64::new(48.0 * abs_delta as f64 * h_abs, 0.0),
        vec![0.0],
    ));
    for dd in 1..=d_max {
        // Support: −dd must be ≡ 0, 1 (mod 4), i.e. dd ≡ 0, 3 (mod 4).
        if (-dd).rem_euclid(4) > 1 {
            continue;
        }
        let tv = twisted_trace(&je2, delta, -dd, reg_t, nodes)?;
        terms.push(LiftTerm::new(
            dd,
            LiftKind::Holo,
            Complex64::new(tv.value, 0.0),
            vec![],
        ));

        let disc = delta * dd;
        if disc.rem_euclid(4) <= 1 {
            let s = twisted_cm(&j, delta, disc)?;
            terms.push(LiftTerm::new(
                -dd,
                LiftKind::HShape,
                Complex64::new(-12.0 / SQRT_2PI * s.value, 0.0),
                vec![1.0],
            ));
        }
    }
    terms.push(LiftTerm::new(
        abs_delta,
        LiftKind::JShape,
        Complex64::new(12.0 / SQRT_2PI * (abs_delta as f64).sqrt(), 0.0),
        vec![1.0, (abs_delta as f64).sqrt()],
    ));
    sort_terms(&mut terms);
    Ok(LiftExpansion {
        theorem: "cycjE2".into(),
        k: 1,
        delta: Some(delta),
        terms,
        meta: LiftMeta {
            d_max,
            tolerances: LiftTolerances {
                tol: EVAL_TOL,
                reg_t,
                quad_nodes: nodes,
            },
        },
    })
}

/// Lift of (π/3·E₂*)^k for even k ≥ 2, divided by k! (weight k + 1/2):
/// y-power terms carrying traces of the lower powers, h-shapes carrying
/// Hurwitz class numbers, one log-shape, one constant, and I-shapes at the
/// positive squares.
pub fn lift_e2k(k: i64, d_max: i64, nodes: usize, reg_t: f64) -> Result<LiftExpansion> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::Precondition(format!(
            "k must be even and ≥ 2, got {k}"
        )));
    }
    if d_max < 1 {
        return Err(Error::Precondition(format!(
            "d_max must be ≥ 1, got {d_max}"
        )));
    }
    let base = NearlyHolForm::e2_star(FORM_ORDER).scale(&Coeff::Float(PI / 3.0));
    let powers: Vec<NearlyHolForm> = (0..=k as u32).map(|m| base.power(m)).collect();
    let keys: Vec<u64> = powers.iter().map(form_key).collect();

    let mut terms = Vec::new();
    for d in 0..=d_max {
        if d.rem_euclid(4) > 1 {
            continue;
        }
        for b in 0..=(k / 2) {
            let m = (k - 2 * b) as usize;
            let tr = cached_trace(&powers[m], keys[m], d, reg_t, nodes)?;
            let coeff = tr / (fact(m) * fact(b as usize));
            if b == 0 {
                terms.push(LiftTerm::new(
                    d,
                    LiftKind::Holo,
                    Complex64::new(coeff, 0.0),
                    vec![],
                ));
            } else {
                terms.push(LiftTerm::new(
                    d,
                    LiftKind::YPow,
                    Complex64::new(coeff, 0.0),
                    vec![b as f64],
                ));
            }
        }
    }
    for dd in 1..=d_max {
        if (-dd).rem_euclid(4) > 1 {
            continue;
        }
        let coeff = 2.0
            * SQRT_2PI
            * rat_to_f64(&hurwitz(dd as u64))
            * (dd as f64).powf((k - 1) as f64 / 2.0);
        terms.push(LiftTerm::new(
            -dd,
            LiftKind::HShape,
            Complex64::new(coeff, 0.0),
            vec![k as f64],
        ));
    }
    terms.push(LiftTerm::new(
        0,
        LiftKind::LogShape,
        Complex64::new(-1.0 / fact((k / 2) as usize), 0.0),
        vec![k as f64],
    ));
    terms.push(LiftTerm::new(
        0,
        LiftKind::Const,
        Complex64::new(SQRT_2PI * rat_to_f64(&q_at_zero(k - 1)) / 6.0, 0.0),
        vec![(k - 1) as f64 / 2.0],
    ));
    let mut a = 1i64;
    while a * a <= d_max {
        let coeff = -2.0 * ipow(k) * (a as f64).powi(k as i32);
        terms.push(LiftTerm::new(
            a * a,
            LiftKind::IShape,
            coeff,
            vec![k as f64, a as f64],
        ));
        a += 1;
    }
    sort_terms(&mut terms);
    Ok(LiftExpansion {
        theorem: "E2klift".into(),
        k,
        delta: None,
        terms,
        meta: LiftMeta {
            d_max,
            tolerances: LiftTolerances {
                tol: EVAL_TOL,
                reg_t,
                quad_nodes: nodes,
            },
        },
    })
}

/// The main-term families of the lift of a nearly holomorphic form f of
/// weight 2k (k even ≥ 0) and depth p, indexed by d up to d_max:
///
/// 1. y-powers: Σ_d Tr_d(L^{2b}f)/b!·q^d/(16πy)^b for 0 ≤ b ≤ p/2;
/// 2. h-shapes at d < 0: √(2π)·Tr^{cm}_d(R^{l−k}L^l f)·|d|^{(k−1)/2}
///    /(2^{l−k}(l−k)!) against h_l, for k ≤ l ≤ p;
/// 3. constants from the layer constant terms c(0, l) at odd l ≥ k−1;
/// 4. J-shapes at the positive squares from the principal parts of the
///    layers l ≥ k.
///
/// These families constitute the full expansion exactly when the layer-k
/// constant term c(0, k) vanishes; the assembler itself does not enforce
/// that hypothesis, so that the families can be compared against other
/// constructions on inputs where it fails.
pub fn lift_families(
    f: &NearlyHolForm,
    d_max: i64,
    nodes: usize,
    reg_t: f64,
) -> Result<Vec<LiftTerm>> {
    let w = f.weight();
    if w % 4 != 0 || w < 0 {
        return Err(Error::Precondition(format!(
            "the lift needs weight 2k with k even and ≥ 0, got weight {w}"
        )));
    }
    let k = w / 2;
    let p = f.depth() as i64;
    let mut terms = Vec::new();
    if f.is_zero() {
        return Ok(terms);
    }

    // Powers of the lowering operator, L^j f for j = 0..p.
    let mut lows = vec![f.clone()];
    for _ in 0..p {
        let next = lows.last().unwrap().lower();
        lows.push(next);
    }
    let low_keys: Vec<u64> = lows.iter().map(form_key).collect();

    // Family 1: y-powers at d ≥ 0.
    for d in 0..=d_max {
        if d.rem_euclid(4) > 1 {
            continue;
        }
        for b in 0..=(p / 2) {
            let g = &lows[(2 * b) as usize];
            let tr = cached_trace(g, low_keys[(2 * b) as usize], d, reg_t, nodes)?;
            let coeff = tr / fact(b as usize);
            if b == 0 {
                terms.push(LiftTerm::new(
                    d,
                    LiftKind::Holo,
                    Complex64::new(coeff, 0.0),
                    vec![],
                ));
            } else {
                terms.push(LiftTerm::new(
                    d,
                    LiftKind::YPow,
                    Complex64::new(coeff, 0.0),
                    vec![b as f64],
                ));
            }
        }
    }

    // Family 2: h-shapes at d < 0 from R^{l−k}L^l f (weight 0).
    let mut cm_inputs = Vec::new();
    for l in k..=p {
        let mut g = lows[l as usize].clone();
        for _ in 0..(l - k) {
            g = g.raise();
        }
        cm_inputs.push((l, g));
    }
    for dd in 1..=d_max {
        if (-dd).rem_euclid(4) > 1 {
            continue;
        }
        for (l, g) in &cm_inputs {
            // Both orientations of each definite class contribute with the
            // same sign (even ambient k and a common CM point), doubling the
            // positive-definite CM trace.
            let tr = 2.0 * trace_cm(g, -dd)?.value;
            let coeff = SQRT_2PI * tr * (dd as f64).powf((k - 1) as f64 / 2.0)
                / (2f64.powi((l - k) as i32) * fact((l - k) as usize));
            terms.push(LiftTerm::new(
                -dd,
                LiftKind::HShape,
                Complex64::new(coeff, 0.0),
                vec![*l as f64],
            ));
        }
    }

    // Family 3: constants from the layer constant terms at odd l ≥ k−1.
    let l_start = if k == 0 { 1 } else { k - 1 };
    let mut l = l_start;
    while l <= p {
        let c0l = f.coeff(0, l as usize).to_f64();
        if c0l != 0.0 {
            let half = ((l - 1) / 2) as usize;
            let sign_k = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            let coeff = fact(half)
                * (-2f64).powi(half as i32)
                * rat_to_f64(&bernoulli_number((l + 1 - k) as usize))
                * sign_k
                * c0l
                / ((2.0 * PI).powf(k as f64 - l as f64 - 0.5) * fact((l + 1 - k) as usize));
            terms.push(LiftTerm::new(
                0,
                LiftKind::Const,
                Complex64::new(coeff, 0.0),
                vec![l as f64 / 2.0],
            ));
        }
        l += 2;
    }

    // Family 4: J-shapes at the positive squares from the principal parts.
    let sign_k = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let mut r = 1i64;
    while r * r <= d_max {
        for l in k..=p {
            let mut acc = 0.0;
            for (n, c) in f.layer(l as usize).iter() {
                if n < 0 && n % r == 0 {
                    acc += (2.0 * PI * n as f64).powi((l - k) as i32) * c.to_f64();
                }
            }
            if acc != 0.0 {
                let coeff = -(8.0 * PI).sqrt() * sign_k * fact(l as usize) / fact((l - k) as usize)
                    * (r as f64).powi(k as i32)
                    * acc;
                terms.push(LiftTerm::new(
                    r * r,
                    LiftKind::JShape,
                    Complex64::new(coeff, 0.0),
                    vec![l as f64, r as f64],
                ));
            }
        }
        r += 1;
    }

    sort_terms(&mut terms);
    Ok(terms)
}

/// The regularized average ∫_Y f dμ of a weight-0 form over the modular
/// curve, dμ = dx·dy/y²: above height 1 only the layer constant terms
/// survive the x-integral and integrate in closed form; the remaining
/// region (below the unit-circle-to-height-1 lens) is integrated by tensor
/// Gauss–Legendre quadrature.
pub fn reg_average(f: &NearlyHolForm, nodes: usize) -> Result<f64> {
    if f.weight() != 0 {
        return Err(Error::Domain(format!(
            "regularized averages need weight 0, got {}",
            f.weight()
        )));
    }
    let mut exact = 0.0;
    for (l, _) in f.layers().iter().enumerate() {
        exact += f.coeff(0, l).to_f64() / (l as f64 + 1.0);
    }
    let gl = gauss_legendre_nodes(nodes);
    let mut numeric = Complex64::new(0.0, 0.0);
    for &(xu, wx) in &gl {
        let x = 0.5 * xu; // x ∈ [−1/2, 1/2]
        let y0 = (1.0 - x * x).sqrt();
        let half = 0.5 * (1.0 - y0);
        let mid = 0.5 * (1.0 + y0);
        for &(yu, wy) in &gl {
            let y = mid + half * yu;
            let z = Complex64::new(x, y);
            numeric += f.evaluate(z, EVAL_TOL)? * (wx * 0.5 * wy * half / (y * y));
        }
    }
    Ok(exact + numeric.re)
}

/// Lift of a nearly holomorphic form f of weight 2k (k even ≥ 0) whose
/// layer-k constant term c(0, k) vanishes: the main-term families of
/// [`lift_families`], plus (for k = 0) the 2√y term carrying the regularized
/// average of f.
pub fn lift_nearly_hol(
    f: &NearlyHolForm,
    d_max: i64,
    nodes: usize,
    reg_t: f64,
) -> Result<LiftExpansion> {
    let w = f.weight();
    if w % 4 != 0 || w < 0 {
        return Err(Error::Precondition(format!(
            "the lift needs weight 2k with k even and ≥ 0, got weight {w}"
        )));
    }
    let k = w / 2;
    let c0k = f.coeff(0, k as usize).to_f64();
    if c0k != 0.0 {
        return Err(Error::Precondition(format!(
            "the hypothesis c(0, k) = 0 fails: the layer-{k} constant term is {c0k}"
        )));
    }
    let mut terms = lift_families(f, d_max, nodes, reg_t)?;
    if k == 0 && !f.is_zero() {
        let mu = reg_average(f, nodes.max(48))?;
        terms.push(LiftTerm::new(
            0,
            LiftKind::Const,
            Complex64::new(2.0 * mu / (8.0 * PI).sqrt(), 0.0),
            vec![-0.5],
        ));
        sort_terms(&mut terms);
    }
    Ok(LiftExpansion {
        theorem: "liftnoc0k".into(),
        k,
        delta: None,
        terms,
        meta: LiftMeta {
            d_max,
            tolerances: LiftTolerances {
                tol: EVAL_TOL,
                reg_t,
                quad_nodes: nodes,
            },
        },
    })
}

// ---------------------------------------------------------------------------
// Evaluation with tail certification
// ---------------------------------------------------------------------------

/// Project a geometric tail from the last two occupied index groups of one
/// term family. Returns the tail bound, or an error if the magnitudes fail
/// to decay or only one group is available.
fn family_tail(label: &str, d_max: i64, groups: &BTreeMap<i64, f64>) -> Result<f64> {
    let mut it = groups.iter().rev();
    let Some((&d2, &m2)) = it.next() else {
        return Ok(0.0);
    };
    if m2 == 0.0 {
        return Ok(0.0);
    }
    let (&d1, &m1) = it.next().ok_or_else(|| {
        Error::Certification(format!(
            "cannot project the {label} truncation tail from a single coefficient group; \
             increase d_max (currently {d_max})"
        ))
    })?;
    if m1 == 0.0 {
        return Ok(m2);
    }
    let rho = (m2 / m1).powf(1.0 / (d2 - d1) as f64);
    if rho >= 1.0 {
        return Err(Error::Certification(format!(
            "{label} term magnitudes fail to decay at d_max = {d_max} (ratio {rho:.3e} ≥ 1); \
             increase d_max"
        )));
    }
    Ok(m2 * rho / (1.0 - rho))
}

/// Evaluate the expansion at τ. Each truncated term family — the
/// holomorphic-side terms at d > 0, the h-shapes at d < 0, and the
/// square-index I/J-shapes — decays at its own geometric rate, so the
/// truncation tail beyond d_max is certified per family from the magnitudes
/// of its last two occupied index groups; if any family fails to decay, or
/// the combined projected tail exceeds tol, a certification error asks for
/// a larger d_max. The twisted lift's single J-shape term is intrinsic to
/// the expansion (not a truncated family) and carries no tail.
pub fn evaluate_lift(lift: &LiftExpansion, tau: Complex64, tol: f64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut cusp: BTreeMap<i64, f64> = BTreeMap::new();
    let mut neg: BTreeMap<i64, f64> = BTreeMap::new();
    let mut square: BTreeMap<i64, f64> = BTreeMap::new();
    let square_family_truncated = lift.theorem != "cycjE2";
    for term in &lift.terms {
        let v = term.evaluate(tau)?;
        total += v;
        if term.d == 0 {
            continue;
        }
        match term.kind {
            LiftKind::IShape | LiftKind::JShape => {
                if square_family_truncated {
                    // Index by the square root: successive family members
                    // sit at d = 1, 4, 9, …
                    let a = (term.d as f64).sqrt().round() as i64;
                    *square.entry(a).or_insert(0.0) += v.norm();
                }
            }
            LiftKind::HShape => {
                *neg.entry(term.d.abs()).or_insert(0.0) += v.norm();
            }
            _ => {
                *cusp.entry(term.d.abs()).or_insert(0.0) += v.norm();
            }
        }
    }
    let d_max = lift.meta.d_max;
    let tail = family_tail("holomorphic-side", d_max, &cusp)?
        + family_tail("h-shape", d_max, &neg)?
        + family_tail("square-index", d_max, &square)?;
    if tail > tol {
        return Err(Error::Certification(format!(
            "projected truncation tail {tail:.3e} exceeds tolerance {tol:.3e}; increase d_max"
        )));
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Termwise lowering and the finite-difference check
// ---------------------------------------------------------------------------

/// The image of the terms under the lowering operator L = −2iy²∂_τ̄,
/// computed termwise and symbolically: each shape lowers to the shape two
/// steps down (h-shapes with factor −1/(16π|d|), J- and I-shapes with factor
/// +1/(16πr²), y-powers with −b/(16π), constants with −p/(8π)), the
/// log-shape additionally sheds a constant, and the I-shape sheds the
/// polynomial correction needed because its subtracted polynomial part is
/// not itself in the shape's kernel chain.
pub fn lower_terms(terms: &[LiftTerm]) -> Result<Vec<LiftTerm>> {
    let mut out = Vec::new();
    for t in terms {
        let c = t.coeff();
        match t.kind {
            LiftKind::Holo => {}
            LiftKind::YPow => {
                let b = t.param(0)?;
                let nc = c * (-b / (16.0 * PI));
                if b >= 2.0 {
                    out.push(LiftTerm::new(t.d, LiftKind::YPow, nc, vec![b - 1.0]));
                } else {
                    out.push(LiftTerm::new(t.d, LiftKind::Holo, nc, vec![]));
                }
            }
            LiftKind::HShape => {
                let l = t.param(0)?;
                let nc = c * (-1.0 / (16.0 * PI * t.d.unsigned_abs() as f64));
                out.push(LiftTerm::new(t.d, LiftKind::HShape, nc, vec![l - 2.0]));
            }
            LiftKind::JShape => {
                let l = t.param(0)?;
                let r = t.param(1)?;
                let nc = c * (1.0 / (16.0 * PI * r * r));
                out.push(LiftTerm::new(t.d, LiftKind::JShape, nc, vec![l - 2.0, r]));
            }
            LiftKind::IShape => {
                let k = t.param(0)? as i64;
                let a = t.param(1)?;
                if k < 2 {
                    return Err(Error::Precondition(format!(
                        "cannot lower an I-shape of index {k}"
                    )));
                }
                let scale = 1.0 / (16.0 * PI * a * a);
                out.push(LiftTerm::new(
                    t.d,
                    LiftKind::IShape,
                    c * scale,
                    vec![(k - 2) as f64, a],
                ));
                // Polynomial correction N(η) = Ω̃_{k−2} + k·Ω̃_k − η·Ω̃_k′,
                // re-expressed through η² = 8πa²y as y-power terms.
                let om_k = omega_tilde(k as usize);
                let om_km2 = omega_tilde((k - 2) as usize);
                let n_poly = &(&om_km2 + &om_k.scale(&crate::poly::rat(k, 1)))
                    - &om_k.derivative().mul_xpow(1);
                for (j, cj) in n_poly.coeffs().iter().enumerate() {
                    let nj = rat_to_f64(cj);
                    if nj == 0.0 {
                        continue;
                    }
                    // η^j / η^{k−2} = (8πa²y)^e with e = (j−k+2)/2 ≤ 0.
                    debug_assert!(j % 2 == 0);
                    let e = (j as i64 - k + 2) / 2;
                    let nc = c
                        * scale
                        * nj
                        * (8.0 * PI * a * a).powi(e as i32)
                        * (16.0 * PI).powi(-e as i32);
                    if e == 0 {
                        out.push(LiftTerm::new(t.d, LiftKind::Holo, nc, vec![]));
                    } else {
                        out.push(LiftTerm::new(t.d, LiftKind::YPow, nc, vec![-e as f64]));
                    }
                }
            }
            LiftKind::LogShape => {
                let k = t.param(0)? as i64;
                if k < 2 {
                    return Err(Error::Precondition(format!(
                        "cannot lower a log-shape of index {k}"
                    )));
                }
                out.push(LiftTerm::new(
                    t.d,
                    LiftKind::LogShape,
                    c * (-(k as f64) / (32.0 * PI)),
                    vec![(k - 2) as f64],
                ));
                // (16πy)^{1−k/2}·[1/(32π) − k/(32π)·(C_k − C_{k−2})], written
                // over the (8πy)-normalized constant shape.
                let shift = c_const(k as usize) - c_const((k - 2) as usize);
                let nc =
                    c * ((1.0 - k as f64 * shift) / (32.0 * PI)) * 2f64.powi(-((k - 2) / 2) as i32);
                out.push(LiftTerm::new(
                    t.d,
                    LiftKind::Const,
                    nc,
                    vec![(k - 2) as f64 / 2.0],
                ));
            }
            LiftKind::Const => {
                let p = t.param(0)?;
                if p != 0.0 {
                    out.push(LiftTerm::new(
                        t.d,
                        LiftKind::Const,
                        c * (-p / (8.0 * PI)),
                        vec![p - 1.0],
                    ));
                }
            }
        }
    }
    Ok(out)
}

fn sum_terms(terms: &[LiftTerm], tau: Complex64) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    for t in terms {
        total += t.evaluate(tau)?;
    }
    Ok(total)
}

/// Self-consistency of the termwise lowering: compares the symbolic image
/// of [`lower_terms`] against a Richardson-extrapolated finite-difference
/// evaluation of L = −iy²(∂_x + i∂_y) applied to the summed expansion, at
/// five points x = 0.13, y ∈ [0.8, 1.5]. Returns the largest deviation.
pub fn lower_check(lift: &LiftExpansion) -> Result<f64> {
    let lowered = lower_terms(&lift.terms)?;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    for i in 0..5 {
        let y = 0.8 + 0.7 * i as f64 / 4.0;
        let tau = Complex64::new(0.13, y);
        let sym = sum_terms(&lowered, tau)?;
        let deriv = |dir: Complex64, step: f64| -> Result<Complex64> {
            Ok((sum_terms(&lift.terms, tau + dir * step)?
                - sum_terms(&lift.terms, tau - dir * step)?)
                / (2.0 * step))
        };
        let rich = |dir: Complex64| -> Result<Complex64> {
            let d1 = deriv(dir, h)?;
            let d2 = deriv(dir, h / 2.0)?;
            Ok((d2 * 4.0 - d1) / 3.0)
        };
        let fx = rich(Complex64::new(1.0, 0.0))?;
        let fy = rich(Complex64::new(0.0, 1.0))?;
        let fd = Complex64::new(0.0, -y * y) * (fx + Complex64::new(0.0, 1.0) * fy);
        worst = worst.max((sym - fd).norm());
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Weight-3/2 shadow
// ---------------------------------------------------------------------------

/// The shadow of a weight-3/2 expansion (k = 1) under the ξ-operator,
/// returned as (exponent, coefficient) pairs of a weight-1/2 q-series:
/// an h-shape h₁ at d < 0 maps to exponent |d| with coefficient
/// −c/(4√(2π|d|)); a J-shape J₁ at d > 0 maps to exponent −d with
/// coefficient +c/(4√(2πd)). All other shapes are annihilated.
pub fn xi_shadow(lift: &LiftExpansion) -> Result<Vec<(i64, f64)>> {
    if lift.k != 1 {
        return Err(Error::Precondition(format!(
            "the shadow map is implemented for weight 3/2 (k = 1), got k = {}",
            lift.k
        )));
    }
    let mut out: BTreeMap<i64, f64> = BTreeMap::new();
    for t in &lift.terms {
        match t.kind {
            LiftKind::HShape if t.param(0)? == 1.0 && t.d < 0 => {
                let d = -t.d;
                *out.entry(d).or_insert(0.0) += -t.coeff_re / (4.0 * (2.0 * PI * d as f64).sqrt());
            }
            LiftKind::JShape if t.param(0)? == 1.0 && t.d > 0 => {
                *out.entry(-t.d).or_insert(0.0) +=
                    t.coeff_re / (4.0 * (2.0 * PI * t.d as f64).sqrt());
            }
            _ => {}
        }
    }
    Ok(out.into_iter().collect())
}

// ---------------------------------------------------------------------------
// Theta-kernel quadrature oracle
// ---------------------------------------------------------------------------

/// Lattice vectors (A, B, C), B² − AC = m, within Gaussian reach of the
/// truncated fundamental domain: |A|z|² − 2Bx + C|/y ≤ reach for some z with
/// |x| ≤ 1/2, √3/2 ≤ y ≤ t_cap.
fn enumerate_lattice(m: i64, reach: f64, t_cap: f64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let rt = reach * t_cap;
    let a_max = ((rt + (rt * rt + 3.0 * m as f64).sqrt()) / 1.5).ceil() as i64 + 1;
    for a in -a_max..=a_max {
        if a == 0 {
            continue; // impossible for nonsquare m
        }
        let af = a.abs() as f64;
        let slack = rt + af * t_cap * t_cap + m as f64 / af;
        let b_max = (af / 2.0 + (af * slack).sqrt()).ceil() as i64 + 1;
        for b in -b_max..=b_max {
            let num = b * b - m;
            if num % a == 0 {
                out.push((a, b, num / a));
            }
        }
    }
    out
}

/// Direct quadrature of the weight-0 theta integral
/// ∫ √v·f(z)·Σ_λ exp(−πv(λ, Z^⊥(z))²) dμ(z) over the fundamental domain
/// truncated at height t_cap, for a positive nonsquare index m. The value
/// approximates the index-4m cycle trace of f, independently of v. The
/// reported error combines the contribution of an outer lattice shell
/// (vectors beyond the nominal Gaussian reach) with a geometric projection
/// of the height tail from the two top strips; if it exceeds tol, a
/// certification error asks for a larger t_cap or reach.
pub fn theta_oracle(
    f: &NearlyHolForm,
    m: i64,
    v: f64,
    t_cap: f64,
    nodes: usize,
    tol: f64,
) -> Result<crate::trace::TraceValue> {
    if f.weight() != 0 {
        return Err(Error::Domain(format!(
            "the theta oracle needs weight 0, got {}",
            f.weight()
        )));
    }
    if m <= 0 || square_root_of(m).is_some() {
        return Err(Error::Precondition(format!(
            "the theta oracle needs a positive nonsquare index, got {m}"
        )));
    }
    if v <= 0.0 || t_cap < 2.0 {
        return Err(Error::Domain("need v > 0 and t_cap ≥ 2".into()));
    }
    // Nominal reach: the Gaussian drops below 1e−14 beyond it.
    let r0 = (14.0 * std::f64::consts::LN_10 / (PI * v)).sqrt();
    let core: HashSet<(i64, i64, i64)> = enumerate_lattice(m, r0, t_cap).into_iter().collect();
    let full = enumerate_lattice(m, 1.5 * r0, t_cap);

    let gl = gauss_legendre_nodes(nodes);
    let gl_small = gauss_legendre_nodes(nodes.div_ceil(3));
    let sqrt_v = v.sqrt();
    // y-panels: the bulk, then two top strips used for the tail projection.
    let panels = [
        (0.0, t_cap - 1.0),
        (t_cap - 1.0, t_cap - 0.5),
        (t_cap - 0.5, t_cap),
    ];

    let mut panel_vals = [Complex64::new(0.0, 0.0); 3];
    let mut shell_abs = 0.0;
    for &(xu, wx) in &gl {
        let x = 0.5 * xu;
        let y_floor = (1.0 - x * x).sqrt();
        for (pi_idx, &(plo, phi)) in panels.iter().enumerate() {
            let lo = plo.max(y_floor);
            if lo >= phi {
                continue;
            }
            let yg = if pi_idx == 0 { &gl } else { &gl_small };
            let half = 0.5 * (phi - lo);
            let mid = 0.5 * (phi + lo);
            for &(yu, wy) in yg {
                let y = mid + half * yu;
                let z = Complex64::new(x, y);
                let fz = f.evaluate(z, EVAL_TOL)?;
                let mut s_core = 0.0;
                let mut s_shell = 0.0;
                for &(a, b, cc) in &full {
                    let q = (a as f64 * (x * x + y * y) - 2.0 * b as f64 * x + cc as f64) / y;
                    let g = (-PI * v * q * q).exp();
                    if core.contains(&(a, b, cc)) {
                        s_core += g;
                    } else {
                        s_shell += g;
                    }
                }
                let w = wx * 0.5 * wy * half * sqrt_v / (y * y);
                panel_vals[pi_idx] += fz * (w * (s_core + s_shell));
                shell_abs += fz.norm() * w.abs() * s_shell;
            }
        }
    }
    let total: Complex64 = panel_vals.iter().sum();
    // Geometric projection of the y > t_cap tail from the two top strips.
    let (s1, s2) = (panel_vals[1].norm(), panel_vals[2].norm());
    let tail = if s2 == 0.0 {
        0.0
    } else if s1 > 0.0 && s2 < s1 {
        let rho = s2 / s1;
        s2 * rho / (1.0 - rho)
    } else {
        f64::INFINITY
    };
    let err = shell_abs + tail + total.im.abs();
    if !err.is_finite() || err > tol {
        return Err(Error::Certification(format!(
            "theta-integral residual {err:.3e} (lattice shell {shell_abs:.3e} + height tail \
             {tail:.3e}) exceeds tolerance {tol:.3e}; increase t_cap or the reach"
        )));
    }
    Ok(crate::trace::TraceValue {
        value: total.re,
        err,
        regularization_t: Some(t_cap),
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
