//! Trace functionals of nearly holomorphic modular forms at level 1:
//! CM-value traces, closed-geodesic cycle integrals by quadrature,
//! regularized traces along split-hyperbolic (square-discriminant) geodesics,
//! zero-index traces, and genus-character twists.
//!
//! Conventions. For a form f of even weight 2k and a discriminant d:
//! - d < 0 (k = 0): Tr_d(f) = Σ over positive-definite classes of
//!   (2/|Γ_λ|)·f(z_λ) at the CM points.
//! - d > 0 nonsquare: Tr_d(f) = Σ over classes of the closed-geodesic
//!   integral ∫ f(z)·λ(z)^{k−1} dz with λ(z) = Az² + Bz + C.
//! - d = r² > 0: each split geodesic runs between two cusps; the cycle
//!   integral over the truncated modular curve plus the singular corrections
//!   Sing_{±λ} has a T-independent limit. Here the principal part of f is
//!   integrated in closed form (incomplete gamma), which cancels the
//!   T-dependence of Sing exactly, so the returned value is the T → ∞ limit.
//! - d = 0: Tr_0(f) = c(0,0) times the constant term of ζ at s = 1−k.
//!
//! The geodesic orientation is a single global sign, pinned by the classical
//! evaluation of the twisted cycle integrals of E₂* (−12·H(−Δ)·H(−D)).

use num::complex::Complex64;
use num::integer::gcd;
use std::f64::consts::PI;

use crate::bqf::{class_reps, cm_point, genus_char, geodesic_data, is_fundamental, QuadForm};
use crate::lattice::ipow;
use crate::modular::{moebius, NearlyHolForm};
use crate::poly::{bernoulli_number, rat, rat_to_f64};
use crate::quad::gauss_legendre_nodes;
use crate::special::{inc_gamma_ext, phi_sing, EULER_GAMMA};
use crate::{Error, Result};

/// Global orientation of the geodesic cycles (see module docs).
const ORIENT: f64 = -1.0;

/// Internal evaluation tolerance for point evaluations inside quadratures.
const EVAL_TOL: f64 = 1e-11;

/// A computed trace: the value, an honest error estimate from quadrature
/// node-doubling (plus any imaginary residue of a mathematically real
/// result), and the regularization cutoff where one applies.
#[derive(Clone, Debug)]
pub struct TraceValue {
    /// The (real) trace value.
    pub value: f64,
    /// Error estimate (node-doubling delta + imaginary residue + tail cuts).
    pub err: f64,
    /// Regularization cutoff T for regularized traces.
    pub regularization_t: Option<f64>,
}

/// e(x) = e^{2πix}.
fn e_of(x: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * x).exp()
}

fn even_k(f: &NearlyHolForm) -> Result<i64> {
    let w = f.weight();
    if w % 2 != 0 {
        return Err(Error::Precondition(format!("weight {w} is not even")));
    }
    Ok(w / 2)
}

// ---------------------------------------------------------------------------
// CM traces and the zero-index trace
// ---------------------------------------------------------------------------

/// CM-value trace Σ (2/|Γ_λ|)·f(z_λ) over positive-definite classes of
/// discriminant d < 0, for f of weight 0.
pub fn trace_cm(f: &NearlyHolForm, d: i64) -> Result<TraceValue> {
    if f.weight() != 0 {
        return Err(Error::Domain(format!(
            "CM traces are defined for weight 0, got weight {}",
            f.weight()
        )));
    }
    if d >= 0 {
        return Err(Error::Precondition(format!(
            "CM trace needs d < 0, got {d}"
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    for form in class_reps(d)?.iter().filter(|f| f.is_positive_definite()) {
        let cm = cm_point(form)?;
        value += f.evaluate(cm.z, EVAL_TOL)? * (2.0 / cm.stabilizer_order as f64);
    }
    Ok(TraceValue {
        value: value.re,
        err: value.im.abs() + 1e-10,
        regularization_t: None,
    })
}

/// Zero-index trace: c(0,0) times the constant term of ζ(s) at s = 1−k,
/// which is γ for k = 0 and ζ(1−k) = −B_k/k for even k > 0.
pub fn trace_zero(f: &NearlyHolForm) -> Result<TraceValue> {
    let k = even_k(f)?;
    if k < 0 {
        return Err(Error::Precondition(format!(
            "zero-index trace needs k ≥ 0, got {k}"
        )));
    }
    let zeta_ct = if k == 0 {
        EULER_GAMMA
    } else {
        rat_to_f64(&(-bernoulli_number(k as usize) / rat(k, 1)))
    };
    let value = f.coeff(0, 0).to_f64() * zeta_ct;
    Ok(TraceValue {
        value,
        err: 0.0,
        regularization_t: None,
    })
}

// ---------------------------------------------------------------------------
// Closed-geodesic cycle integrals (nonsquare d > 0)
// ---------------------------------------------------------------------------

/// Single-class cycle integral ∫_w^{Mw} f(z)·λ(z)^{k−1} dz along the geodesic
/// of an indefinite form λ of nonsquare discriminant, with w the topmost
/// point and M the fundamental automorph, by Gauss–Legendre quadrature in the
/// geodesic angle.
pub fn cycle_integral(f: &NearlyHolForm, form: &QuadForm, nodes: usize) -> Result<Complex64> {
    let k = even_k(f)?;
    let gd = geodesic_data(form)?;
    let c0 = Complex64::new(gd.center, 0.0);
    let radius = gd.radius;
    let w = c0 + Complex64::new(0.0, radius);
    let mw = moebius(gd.automorph, w);
    let theta_end = (mw - c0).arg();
    // Integrate in hyperbolic arc length u, θ = 2·atan(eᵘ): the weight-2k
    // density |f(z)|·yᵏ is Γ-invariant, so the integrand stays smooth even
    // where the geodesic dips toward the real axis near its endpoints.
    let (a, b) = (0.0, (theta_end / 2.0).tan().ln());
    let mut sum = Complex64::new(0.0, 0.0);
    for &(t, wt) in &gauss_legendre_nodes(nodes) {
        let u: f64 = 0.5 * (a + b) + 0.5 * (b - a) * t;
        let eith = Complex64::new(-u.tanh(), 1.0 / u.cosh());
        let z = c0 + eith * radius;
        let dz_du = Complex64::new(0.0, radius / u.cosh()) * eith;
        let lam = form.eval_z(z).powi(k as i32 - 1);
        sum += f.evaluate(z, EVAL_TOL)? * lam * dz_du * (wt * 0.5 * (b - a));
    }
    Ok(sum * ORIENT)
}

/// Geodesic-cycle trace Σ over classes of discriminant d > 0 nonsquare.
/// The error estimate comes from doubling the quadrature nodes.
pub fn trace_cycle(f: &NearlyHolForm, d: i64, nodes: usize) -> Result<TraceValue> {
    if d <= 0 {
        return Err(Error::Precondition(format!(
            "cycle trace needs d > 0, got {d}"
        )));
    }
    let r = (d as f64).sqrt().round() as i64;
    if r * r == d {
        return Err(Error::Precondition(format!(
            "d = {d} is a perfect square; use the regularized square-index trace"
        )));
    }
    let reps = class_reps(d)?;
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut fine = Complex64::new(0.0, 0.0);
    for form in &reps {
        coarse += cycle_integral(f, form, nodes)?;
        fine += cycle_integral(f, form, 2 * nodes)?;
    }
    Ok(TraceValue {
        value: fine.re,
        err: (fine - coarse).norm() + fine.im.abs(),
        regularization_t: None,
    })
}

// ---------------------------------------------------------------------------
// Split-hyperbolic (square-discriminant) regularized traces
// ---------------------------------------------------------------------------

/// Modular inverse of a mod m (m ≥ 1).
fn mod_inv(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m, a.rem_euclid(m));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    t.rem_euclid(m)
}

/// The real parts of the two cusps of the split geodesic of λ = [0,r,j]
/// in their respective local coordinates: r_λ = −j/r at the λ-side cusp, and
/// the inverse fraction at the −λ-side cusp.
fn cusp_real_parts(r: i64, j: i64) -> (f64, f64) {
    let g0 = gcd(j.rem_euclid(r), r).max(1);
    let rp = r / g0;
    let jp = (j / g0).rem_euclid(rp.max(1));
    let r_plus = -(j as f64) / r as f64;
    let r_minus = if rp <= 1 {
        0.0
    } else {
        mod_inv(jp, rp) as f64 / rp as f64
    };
    (r_plus, r_minus)
}

/// Closed-form ∫_S^T y^{κ−1}e^{−2πny} dy combined with the T-dependence of
/// the singular kernel φ_n(κ,T;2π): the Γ(κ,2πnT) parts cancel exactly,
/// leaving Γ(κ,2πnS)/(2πn)^κ for n ≠ 0 and −S^κ/κ (resp. −log S) for n = 0.
fn principal_tail(n: i64, kappa: i64, s: f64) -> Result<f64> {
    if n == 0 {
        if kappa == 0 {
            Ok(-s.ln())
        } else {
            Ok(-s.powi(kappa as i32) / kappa as f64)
        }
    } else {
        let tpn = 2.0 * PI * n as f64;
        Ok(inc_gamma_ext(kappa, tpn * s)? / tpn.powi(kappa as i32))
    }
}

/// Cuspidal part g⁰(z) = Σ_{l} Σ_{n ≥ 1} c(n,l) qⁿ / y^l, summed directly
/// (intended for y large enough that the series converges fast).
fn cuspidal_eval(f: &NearlyHolForm, z: Complex64) -> Complex64 {
    let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    let mut total = Complex64::new(0.0, 0.0);
    let mut ypow = 1.0;
    for layer in f.layers() {
        let mut s = Complex64::new(0.0, 0.0);
        for (n, c) in layer.iter() {
            if n >= 1 {
                s += q.powi(n as i32) * c.to_f64();
            }
        }
        total += s / ypow;
        ypow *= z.im;
    }
    total
}

/// Gauss–Legendre quadrature of a complex integrand with node-doubling error.
fn gl_complex<F: Fn(f64) -> Result<Complex64>>(
    f: &F,
    a: f64,
    b: f64,
    nodes: usize,
) -> Result<(Complex64, f64)> {
    let mut vals = [Complex64::new(0.0, 0.0); 2];
    for (pass, n) in [nodes, 2 * nodes].iter().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        for &(t, wt) in &gauss_legendre_nodes(*n) {
            let y = 0.5 * (a + b) + 0.5 * (b - a) * t;
            sum += f(y)? * (wt * 0.5 * (b - a));
        }
        vals[pass] = sum;
    }
    Ok((vals[1], (vals[1] - vals[0]).norm()))
}

/// Regularized trace Tr_λ(f) of a single split-hyperbolic class λ = [0,r,j]
/// (discriminant r²), in the T → ∞ limit.
///
/// The geodesic is split at its height minimum ("waist"); each half maps to a
/// vertical segment at one of the two cusps. On each segment, f is integrated
/// numerically up to a fixed height S and the cuspidal part beyond S, while
/// the principal part beyond S is combined with Sing_λ + (−1)^k Sing_{−λ} in
/// closed form, which removes the cutoff T exactly. `reg_t` only gates the
/// "cutoff below the waist" error condition.
pub fn line_trace(
    f: &NearlyHolForm,
    r: i64,
    j: i64,
    reg_t: f64,
    nodes: usize,
) -> Result<(Complex64, f64)> {
    let k = even_k(f)?;
    if r <= 0 {
        return Err(Error::Precondition(format!(
            "split geodesic needs r > 0, got {r}"
        )));
    }
    let g0 = gcd(j.rem_euclid(r), r).max(1);
    let waist = g0 as f64 / r as f64;
    if reg_t <= waist {
        return Err(Error::Precondition(format!(
            "regularization cutoff T = {reg_t} is below the geodesic waist {waist}"
        )));
    }
    let s_split = 2.5f64.min(reg_t).max(waist * 1.5);
    let (r_plus, r_minus) = cusp_real_parts(r, j);
    let sign_minus = if k % 2 == 0 { 1.0 } else { -1.0 };

    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for (x, sgn) in [(r_plus, 1.0), (r_minus, sign_minus)] {
        // Waist-to-split segment: the full form, evaluated with reduction.
        let integrand = |y: f64| -> Result<Complex64> {
            let z = Complex64::new(x, y);
            Ok(f.evaluate(z, EVAL_TOL)? * y.powi(k as i32 - 1))
        };
        let (seg, seg_err) = gl_complex(&integrand, waist, s_split, nodes)?;
        total += seg * sgn;
        err += seg_err;
        // Cuspidal tail beyond the split, in unit chunks until negligible.
        let cusp_part = |y: f64| -> Result<Complex64> {
            Ok(cuspidal_eval(f, Complex64::new(x, y)) * y.powi(k as i32 - 1))
        };
        let mut lo = s_split;
        for _ in 0..60 {
            let (chunk, chunk_err) = gl_complex(&cusp_part, lo, lo + 1.0, nodes.min(32))?;
            total += chunk * sgn;
            err += chunk_err;
            lo += 1.0;
            if chunk.norm() < 1e-14 {
                break;
            }
        }
    }
    // Principal part beyond the split combined with the singular terms.
    let mut analytic = Complex64::new(0.0, 0.0);
    for (l, layer) in f.layers().iter().enumerate() {
        for (n, c) in layer.iter() {
            if n > 0 {
                continue;
            }
            let phase = e_of(n as f64 * r_plus) + e_of(n as f64 * r_minus) * sign_minus;
            analytic += phase * c.to_f64() * principal_tail(n, k - l as i64, s_split)?;
        }
    }
    total += analytic;
    let prefactor = ipow(k) * (r as f64).powi(k as i32 - 1);
    Ok((total * prefactor * ORIENT, err))
}

/// The singular correction Sing_λ(f,T) of a split-hyperbolic form λ = [0,r,j]
/// at finite cutoff T: i^k·r^{k−1}·Σ_{l,n} c(n,l)·e(n·r_λ)·φ_n(k−l,T;2π).
pub fn sing_term(f: &NearlyHolForm, form: &QuadForm, t_cut: f64) -> Result<Complex64> {
    let k = even_k(f)?;
    let d = form.disc();
    let r = (d as f64).sqrt().round() as i64;
    if d <= 0 || r * r != d {
        return Err(Error::Domain(format!(
            "singular term needs a positive square discriminant, got {d}"
        )));
    }
    if form.a != 0 {
        return Err(Error::Domain(
            "singular term expects a cusp-normalized representative [0,r,j]".into(),
        ));
    }
    // [0,−r,−j] has the same r_λ bookkeeping with the orientation sign i^k ↦ (−i)^k.
    let (b, c_coef) = (form.b, form.c);
    let (orient, j) = if b > 0 {
        (1.0, c_coef)
    } else {
        (if k % 2 == 0 { 1.0 } else { -1.0 }, -c_coef)
    };
    let r_lambda = -(j as f64) / r as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, layer) in f.layers().iter().enumerate() {
        for (n, c) in layer.iter() {
            let term = phi_sing(n, k - l as i64, t_cut, 2.0 * PI)?;
            sum += e_of(n as f64 * r_lambda) * c.to_f64() * term;
        }
    }
    Ok(sum * ipow(k) * (r as f64).powi(k as i32 - 1) * orient)
}

/// Square-index trace Tr_{r²}(f) for f of weight 2k with k even: twice the
/// sum of the per-class regularized line traces over the classes ±[0,r,j].
pub fn trace_square(f: &NearlyHolForm, d: i64, reg_t: f64, nodes: usize) -> Result<TraceValue> {
    let k = even_k(f)?;
    if k % 2 != 0 {
        return Err(Error::Precondition(format!(
            "untwisted square-index traces need even k, got k = {k}"
        )));
    }
    let r = (d as f64).sqrt().round() as i64;
    if d < 0 || r * r != d {
        return Err(Error::Precondition(format!(
            "expected a positive square discriminant, got {d}"
        )));
    }
    if d == 0 {
        return trace_zero(f);
    }
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..r {
        let (v, e) = line_trace(f, r, j, reg_t, nodes)?;
        value += v * 2.0;
        err += 2.0 * e;
    }
    Ok(TraceValue {
        value: value.re,
        err: err + value.im.abs(),
        regularization_t: Some(reg_t),
    })
}

// ---------------------------------------------------------------------------
// Genus-character twists
// ---------------------------------------------------------------------------

/// Genus-character-weighted CM sum Σ χ_Δ(λ)·(2/|Γ_λ|)·f(z_λ) over the
/// positive-definite classes of discriminant d < 0, for f of weight 0
/// (the same stabilizer weights as the untwisted CM trace).
pub fn twisted_cm(f: &NearlyHolForm, delta: i64, d: i64) -> Result<TraceValue> {
    if f.weight() != 0 {
        return Err(Error::Domain(format!(
            "CM sums are defined for weight 0, got weight {}",
            f.weight()
        )));
    }
    if d >= 0 || !(d % 4 == 0 || d.rem_euclid(4) == 1) {
        return Err(Error::Precondition(format!(
            "twisted CM sum needs a discriminant d < 0, got {d}"
        )));
    }
    let mut value = Complex64::new(0.0, 0.0);
    for form in class_reps(d)?.iter().filter(|f| f.is_positive_definite()) {
        let chi = genus_char(delta, form)? as f64;
        if chi == 0.0 {
            continue;
        }
        let cm = cm_point(form)?;
        value += f.evaluate(cm.z, EVAL_TOL)? * (2.0 * chi / cm.stabilizer_order as f64);
    }
    Ok(TraceValue {
        value: value.re,
        err: value.im.abs() + 1e-10,
        regularization_t: None,
    })
}

/// Twisted trace Tr_{Δ,D}(f) = Σ over classes of discriminant ΔD of
/// χ_Δ(λ)·Tr_λ(f), for Δ < 0 fundamental and D < 0 a discriminant. Nonsquare
/// ΔD uses closed-geodesic quadrature; square ΔD uses the regularized
/// split-geodesic traces.
pub fn twisted_trace(
    f: &NearlyHolForm,
    delta: i64,
    dd: i64,
    reg_t: f64,
    nodes: usize,
) -> Result<TraceValue> {
    let k = even_k(f)?;
    if delta >= 0 || !is_fundamental(delta) {
        return Err(Error::Domain(format!(
            "twist needs a negative fundamental discriminant, got Δ = {delta}"
        )));
    }
    if dd >= 0 || !(dd % 4 == 0 || dd.rem_euclid(4) == 1) {
        return Err(Error::Domain(format!(
            "D = {dd} is not a negative discriminant"
        )));
    }
    let d = delta * dd;
    let r = (d as f64).sqrt().round() as i64;
    if r * r == d {
        // Split-hyperbolic: classes ±[0,r,j]; χ_Δ(−λ) = −χ_Δ(λ) and
        // Tr_{−λ} = (−1)^k·Tr_λ, so the two orientations add for odd k and
        // cancel for even k.
        if k % 2 == 0 {
            return Ok(TraceValue {
                value: 0.0,
                err: 0.0,
                regularization_t: Some(reg_t),
            });
        }
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for j in 0..r {
            let chi = genus_char(delta, &QuadForm::new(0, r, j))? as f64;
            if chi == 0.0 {
                continue;
            }
            let (v, e) = line_trace(f, r, j, reg_t, nodes)?;
            value += v * (2.0 * chi);
            err += 2.0 * e;
        }
        Ok(TraceValue {
            value: value.re,
            err: err + value.im.abs(),
            regularization_t: Some(reg_t),
        })
    } else {
        let mut coarse = Complex64::new(0.0, 0.0);
        let mut fine = Complex64::new(0.0, 0.0);
        for form in &class_reps(d)? {
            let chi = genus_char(delta, form)? as f64;
            if chi == 0.0 {
                continue;
            }
            coarse += cycle_integral(f, form, nodes)? * chi;
            fine += cycle_integral(f, form, 2 * nodes)? * chi;
        }
        Ok(TraceValue {
            value: fine.re,
            err: (fine - coarse).norm() + fine.im.abs(),
            regularization_t: None,
        })
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
