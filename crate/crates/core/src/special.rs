//! Floating-point evaluation of the special functions built on the exact
//! polynomial families: the Gaussian and its antiderivative, the extended
//! incomplete gamma function, the singular Schwartz functions h_ν and their
//! Fourier transforms, the auxiliary integrals I_{ν,j} and J_ν, the
//! regularization kernel φ_n, and the lattice-sum asymptotics constants
//! (periodic Bernoulli functions, polygamma, F(q,−j), Φ_κ, Ξ_κ, C_l).
//!
//! Domain violations (jump points, poles) are explicit errors; NaN never
//! escapes.

use num::complex::Complex64;

use crate::poly::{
    self, bernoulli_number, bernoulli_poly, harmonic, p_at_zero, p_poly, pq_modified, q_poly, rat,
    rat_to_f64, Rat,
};
use crate::quad::{self, QuadResult};
use crate::{Error, Result};

/// √(2π).
pub const SQRT_2PI: f64 = 2.506_628_274_631_000_7;
/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// The Gaussian g(ξ) = e^{−ξ²/2}.
pub fn gauss(xi: f64) -> f64 {
    (-xi * xi / 2.0).exp()
}

/// Complementary error function, accurate to ~1e−15 (series for small
/// arguments, Lentz continued fraction for large).
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        // erf(x) = (2/√π) Σ (−1)^n x^{2n+1} / (n!(2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0usize;
        loop {
            n += 1;
            term *= -x2 / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs().max(1e-300) || n > 200 {
                break;
            }
        }
        1.0 - sum * 2.0 / std::f64::consts::PI.sqrt()
    } else {
        // erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut h = x;
        // Evaluate the continued fraction bottom-up with a fixed depth.
        let depth = 60;
        let mut frac = 0.0;
        for n in (1..=depth).rev() {
            frac = (n as f64 / 2.0) / (x + frac);
        }
        h += frac;
        (-x * x).exp() / std::f64::consts::PI.sqrt() / h
    }
}

/// The antiderivative e(ξ) = −sgn(ξ)·∫_{|ξ|}^∞ e^{−w²/2} dw for ξ ≠ 0.
///
/// Has a jump of −√(2π) at ξ = 0, which is therefore a domain error.
pub fn err_anti(xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Err(Error::Domain(
            "e(ξ) has a jump at ξ = 0; evaluate one-sided limits instead".into(),
        ));
    }
    let tail = (std::f64::consts::PI / 2.0).sqrt() * erfc(xi.abs() / std::f64::consts::SQRT_2);
    Ok(-xi.signum() * tail)
}

// ---------------------------------------------------------------------------
// Exponential integrals and the extended incomplete gamma function
// ---------------------------------------------------------------------------

/// Exponential integral Ei(x) for x > 0.
pub fn ei(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain("Ei requires a positive argument here".into()));
    }
    if x <= 40.0 {
        // Ei(x) = γ + ln x + Σ_{k≥1} x^k/(k·k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..500 {
            term *= x / k as f64;
            sum += term / k as f64;
            if term / k as f64 <= 1e-17 * sum.abs() {
                break;
            }
        }
        Ok(EULER_GAMMA + x.ln() + sum)
    } else {
        // Asymptotic series e^x/x Σ k!/x^k, truncated at the smallest term.
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=((x as usize).min(40)) {
            let next = term * k as f64 / x;
            if next > term {
                break;
            }
            term = next;
            sum += term;
        }
        Ok(x.exp() / x * sum)
    }
}

/// E₁(x) = Γ(0, x) for x > 0.
pub fn e1(x: f64) -> Result<f64> {
    if x <= 0.0 {
        return Err(Error::Domain("E1 requires a positive argument".into()));
    }
    if x <= 3.0 {
        // E1(x) = −γ − ln x + Σ (−1)^{k+1} x^k/(k·k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..200 {
            term *= -x / k as f64;
            sum -= term / k as f64;
            if (term / k as f64).abs() < 1e-18 {
                break;
            }
        }
        Ok(-EULER_GAMMA - x.ln() + sum)
    } else {
        // Continued fraction Γ(0,x) = e^{−x}·1/(x+1 − 1/(x+3 − 4/(x+5 − …)))
        // (modified Lentz, a_n = −n²).
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..300 {
            let an = -(i as f64) * (i as f64);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok((-x).exp() * h)
    }
}

/// Γ(0, t) for t ≠ 0: E₁(t) for t > 0 and the principal value −Ei(−t) for t < 0.
pub fn gamma0(t: f64) -> Result<f64> {
    if t > 0.0 {
        e1(t)
    } else if t < 0.0 {
        Ok(-ei(-t)?)
    } else {
        Err(Error::Domain("Γ(0, t) has a pole at t = 0".into()))
    }
}

/// The incomplete gamma function Γ(μ, t), extended to all integer μ:
/// for μ ≥ 1 the finite sum e^{−t}(μ−1)!Σ_{a<μ} t^a/a! (any real t);
/// for μ ≤ 0 the continuation ((−1)^μ/|μ|!)(Γ(0,t) + e^{−t}Σ_{a<|μ|} a!/(−t)^{a+1}),
/// requiring t ≠ 0 (principal value at negative t through Γ(0,t) = −Ei(−t)).
pub fn inc_gamma_ext(mu: i64, t: f64) -> Result<f64> {
    if mu >= 1 {
        let mut fact = 1.0; // (μ−1)!
        for a in 2..mu {
            fact *= a as f64;
        }
        let mut term = 1.0; // t^a/a!
        let mut sum = 1.0;
        for a in 1..mu {
            term *= t / a as f64;
            sum += term;
        }
        Ok((-t).exp() * fact * sum)
    } else {
        if t == 0.0 {
            return Err(Error::Domain(format!("Γ({mu}, t) has a pole at t = 0")));
        }
        let m = (-mu) as usize;
        let sign = if mu % 2 == 0 { 1.0 } else { -1.0 };
        let mut mfact = 1.0;
        for a in 2..=m {
            mfact *= a as f64;
        }
        let mut sum = 0.0;
        let mut afact_over_pow = 1.0 / -t; // a!/(−t)^{a+1}
        for a in 0..m {
            if a > 0 {
                afact_over_pow *= a as f64 / -t;
            }
            sum += afact_over_pow;
        }
        Ok(sign / mfact * (gamma0(t)? + (-t).exp() * sum))
    }
}

// ---------------------------------------------------------------------------
// Singular Schwartz functions h_ν and their Fourier transforms
// ---------------------------------------------------------------------------

/// h_ν(ξ) = P_ν(ξ)·e(ξ) + Q_ν(ξ)·g(ξ).
///
/// For ν ≥ 0 the point ξ = 0 is a jump (domain error); for ν ≤ −1 the
/// function is smooth (P_ν = 0).
pub fn h_fn(nu: i64, xi: f64) -> Result<f64> {
    if nu >= 0 && xi == 0.0 {
        return Err(Error::Domain(format!(
            "h_{nu} has a jump at ξ = 0 of size −√(2π)·P_{nu}(0)"
        )));
    }
    let q_val = q_poly(nu).eval_f64(xi) * gauss(xi);
    if nu < 0 {
        return Ok(q_val);
    }
    Ok(p_poly(nu).eval_f64(xi) * err_anti(xi)? + q_val)
}

/// Taylor coefficient He_μ(0)/μ! of the Gaussian: (−1)^{μ/2}/(2^{μ/2}(μ/2)!)
/// for even μ, zero for odd μ.
fn gauss_taylor_coeff(mu: usize) -> f64 {
    if mu % 2 == 1 {
        return 0.0;
    }
    let half = mu / 2;
    let mut denom = 1.0;
    for a in 1..=half {
        denom *= 2.0 * a as f64;
    }
    if half % 2 == 0 {
        1.0 / denom
    } else {
        -1.0 / denom
    }
}

/// Fourier transform ĥ_ν(t) = ∫ h_ν(ξ)e(−ξt)dξ for ν ≥ −1:
/// √(2π)(g(2πt)/(2πit)^{ν+1} − Σ_{r=0}^{ν} P_r(0)/(2πit)^{ν−r+1}),
/// evaluated through the convergent tail series near t = 0.
pub fn h_hat(nu: i64, t: f64) -> Result<Complex64> {
    if nu < -1 {
        return Err(Error::Precondition("h_hat requires ν ≥ −1".into()));
    }
    if (2.0 * std::f64::consts::PI * t).abs() < 0.5 {
        Ok(h_hat_series(nu, t))
    } else {
        Ok(h_hat_closed(nu, t))
    }
}

/// Tail series √(2π) Σ_{r>ν} P_r(0) (2πit)^{r−ν−1}; entire in t, used near 0
/// where the closed form cancels catastrophically.
fn h_hat_series(nu: i64, t: f64) -> Complex64 {
    let ix = Complex64::new(0.0, 2.0 * std::f64::consts::PI * t);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for r in (nu + 1)..=(nu + 90) {
        let p0 = rat_to_f64(&p_at_zero(r));
        sum += p0 * pow;
        pow *= ix;
    }
    SQRT_2PI * sum
}

/// Closed form √(2π)(g(2πt)/(2πit)^{ν+1} − Σ_{r≤ν} P_r(0)/(2πit)^{ν−r+1}).
fn h_hat_closed(nu: i64, t: f64) -> Complex64 {
    let x = 2.0 * std::f64::consts::PI * t;
    let ix = Complex64::new(0.0, x);
    let mut sum = Complex64::new(gauss(x), 0.0) / ix.powi(nu as i32 + 1);
    for r in 0..=nu {
        let p0 = rat_to_f64(&p_at_zero(r));
        if p0 != 0.0 {
            sum -= p0 / ix.powi((nu - r) as i32 + 1);
        }
    }
    SQRT_2PI * sum
}

/// (g(w) − Σ_{μ≤ν} He_μ(0)w^μ/μ!)/w^{ν+1}, evaluated stably: a tail Taylor
/// series near w = 0, direct subtraction elsewhere. For ν ≤ −1 this is just
/// g(w)·w^{|ν|−1}.
fn gauss_defect(nu: i64, w: f64) -> f64 {
    if nu < 0 {
        return gauss(w) * w.powi((-nu - 1) as i32);
    }
    let nu = nu as usize;
    if w.abs() < 0.7 {
        // Σ_{μ≥ν+1} c_μ w^{μ−ν−1}
        let mut sum = 0.0;
        let mut mu = nu + 1;
        if mu % 2 == 1 {
            mu += 1;
        }
        let mut pow = w.powi((mu - nu - 1) as i32);
        while mu < nu + 90 {
            sum += gauss_taylor_coeff(mu) * pow;
            pow *= w * w;
            mu += 2;
        }
        sum
    } else {
        let mut taylor = 0.0;
        let mut pow = 1.0;
        for mu in 0..=nu {
            taylor += gauss_taylor_coeff(mu) * pow;
            pow *= w;
        }
        (gauss(w) - taylor) / w.powi(nu as i32 + 1)
    }
}

/// The auxiliary integral
/// I_{ν,j}(η,t) = ∫_{−t}^∞ ((w+t)^j/j!)·e^{−ηw}·(g(w) − T_ν g(w)) dw/w^{ν+1},
/// where T_ν g is the order-ν Taylor polynomial of the Gaussian (making the
/// integrand regular at w = 0). Requires η > 0 when ν ≥ 0.
pub fn i_fn(nu: i64, j: usize, eta: f64, t: f64, tol: f64) -> Result<QuadResult> {
    if nu >= 0 && eta <= 0.0 {
        return Err(Error::Domain(format!(
            "I_({nu},{j}) diverges for η ≤ 0 (got η = {eta})"
        )));
    }
    let jfact: f64 = (1..=j).map(|a| a as f64).product::<f64>().max(1.0);
    let integrand =
        |w: f64| (w + t).powi(j as i32) / jfact * (-eta * w).exp() * gauss_defect(nu, w);
    let mut lo = -t;
    let mut hi = (-t + 12.0).max(12.0);
    let mut total = quad::adaptive(&integrand, lo, hi, tol / 4.0);
    // Extend the upper limit in doubling chunks until a chunk is negligible.
    let mut guard = 0;
    loop {
        lo = hi;
        hi = 2.0 * hi.abs().max(12.0);
        let chunk = quad::adaptive(&integrand, lo, hi, tol / 8.0);
        total.value += chunk.value;
        total.abs_error += chunk.abs_error;
        guard += 1;
        if chunk.value.abs() + chunk.abs_error < tol / 20.0 {
            break;
        }
        if guard > 20 {
            return Err(Error::Certification(format!(
                "I_({nu},{j}) tail did not certify below tol = {tol} by w = {hi}"
            )));
        }
    }
    Ok(total)
}

/// I_ν(η) = I_{ν,0}(η, 0).
pub fn i_simple(nu: i64, eta: f64, tol: f64) -> Result<QuadResult> {
    i_fn(nu, 0, eta, 0.0, tol)
}

/// J_{−1}(η) = e^{η²/2}, J_0(η) = −∫_0^η e^{r²/2} dr (entire-series
/// evaluation), and J_ν = P̃_ν J_0 − Q̃_ν J_{−1} for all ν ∈ ℤ.
pub fn j_fn(nu: i64, eta: f64) -> f64 {
    let j_m1 = (eta * eta / 2.0).exp();
    if nu == -1 {
        return j_m1;
    }
    // J_0(η) = −Σ_k η^{2k+1}/(2^k k! (2k+1))
    let mut term = eta;
    let mut sum = eta;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= eta * eta / (2.0 * k as f64);
        let add = term / (2 * k + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) || k > 400 {
            break;
        }
    }
    let j_0 = -sum;
    if nu == 0 {
        return j_0;
    }
    let (p_mod, q_mod) = pq_modified(nu);
    p_mod.eval_f64(eta) * j_0 - q_mod.eval_f64(eta) * j_m1
}

// ---------------------------------------------------------------------------
// Regularization kernel and lattice-sum constants
// ---------------------------------------------------------------------------

/// The regularization kernel
/// φ_n(κ,T;r) = Γ(κ,rnT)/(rn)^κ for n ≠ 0; −T^κ/κ for n = 0, κ ≠ 0;
/// −log T for n = κ = 0. Requires T > 0, r > 0.
pub fn phi_sing(n: i64, kappa: i64, t_cut: f64, r: f64) -> Result<f64> {
    if t_cut <= 0.0 || r <= 0.0 {
        return Err(Error::Precondition("φ_n requires T > 0 and r > 0".into()));
    }
    if n == 0 {
        if kappa == 0 {
            Ok(-t_cut.ln())
        } else {
            Ok(-t_cut.powi(kappa as i32) / kappa as f64)
        }
    } else {
        let rn = r * n as f64;
        Ok(inc_gamma_ext(kappa, rn * t_cut)? / rn.powi(kappa as i32))
    }
}

/// C_l = (γ + log 2 − 2H_l + H_{⌊l/2⌋})/2, with the harmonic part exact.
pub fn c_const(l: usize) -> f64 {
    let h_part = harmonic(l).clone() * rat(2, 1) - harmonic(l / 2);
    (EULER_GAMMA + std::f64::consts::LN_2 - rat_to_f64(&h_part)) / 2.0
}

/// The 1-periodic Bernoulli function 𝔹_μ: equals B_μ(ω) on (0,1), and on the
/// integers equals 0 for μ = 1 and B_μ otherwise.
pub fn periodic_bernoulli(mu: usize, omega: f64) -> f64 {
    let frac = omega - omega.floor();
    if frac.abs() < 1e-12 || (1.0 - frac).abs() < 1e-12 {
        if mu == 1 {
            return 0.0;
        }
        return rat_to_f64(&bernoulli_number(mu));
    }
    bernoulli_poly(mu).eval_f64(frac)
}

/// Polygamma function ψ^{(m)}(z) for z > 0: upward recurrence into the
/// asymptotic regime, then the Bernoulli-number asymptotic series.
pub fn polygamma(m: usize, z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Err(Error::Domain("polygamma requires z > 0".into()));
    }
    let mut z = z;
    let mut acc = 0.0;
    // ψ^{(m)}(z) = ψ^{(m)}(z+1) − (−1)^m m! z^{−(m+1)} ... shift until z ≥ 16.
    let mfact: f64 = (1..=m).map(|a| a as f64).product::<f64>().max(1.0);
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    while z < 16.0 {
        acc -= sign_m * mfact / z.powi(m as i32 + 1);
        z += 1.0;
    }
    // Asymptotic: ψ(z) ~ ln z − 1/(2z) − Σ B_{2k}/(2k z^{2k});
    // ψ^{(m)}(z) ~ (−1)^{m−1}[(m−1)!/z^m + m!/(2z^{m+1})
    //               + Σ_k B_{2k}(2k+m−1)!/((2k)! z^{2k+m})].
    let series = if m == 0 {
        let mut s = z.ln() - 0.5 / z;
        for k in 1..=8usize {
            let b2k = rat_to_f64(&bernoulli_number(2 * k));
            s -= b2k / (2.0 * k as f64 * z.powi(2 * k as i32));
        }
        s
    } else {
        let mut s = fact(m - 1) / z.powi(m as i32) + mfact / (2.0 * z.powi(m as i32 + 1));
        for k in 1..=8usize {
            let b2k = rat_to_f64(&bernoulli_number(2 * k));
            s += b2k * fact(2 * k + m - 1) / fact(2 * k) / z.powi((2 * k + m) as i32);
        }
        -sign_m * s
    };
    Ok(acc + series)
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|a| a as f64).product::<f64>().max(1.0)
}

/// Stirling numbers of the second kind S(j, i), small table per call.
fn stirling2(j: usize) -> Vec<Vec<f64>> {
    let mut s = vec![vec![0.0; j + 1]; j + 1];
    s[0][0] = 1.0;
    for n in 1..=j {
        for k in 1..=n {
            s[n][k] = k as f64 * s[n - 1][k] + s[n - 1][k - 1];
        }
    }
    s
}

/// F(e(ω), −j) = Σ_{m≥1} m^j e(mω), continued as the rational closed form
/// Σ_i S(j,i)·i!·q^i/(1−q)^{i+1} − δ_{j,0}; requires ω ∉ ℤ.
pub fn f_neg(omega: f64, j: usize) -> Result<Complex64> {
    let frac = omega - omega.floor();
    if frac.abs() < 1e-12 || (1.0 - frac).abs() < 1e-12 {
        return Err(Error::Domain("F(e(ω), −j) has a pole at integral ω".into()));
    }
    let q = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * frac);
    let one_minus_q = Complex64::new(1.0, 0.0) - q;
    let s = stirling2(j);
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..=j {
        let coeff = s[j][i] * fact(i);
        if coeff != 0.0 {
            sum += coeff * q.powu(i as u32) / one_minus_q.powu(i as u32 + 1);
        }
    }
    if j == 0 {
        sum -= 1.0;
    }
    Ok(sum)
}

/// Φ_κ(ω): −𝔹_κ(ω)/κ for κ ≥ 1, and the symmetrized periodic-polygamma
/// combination −[ψ̃^{(|κ|)}(−ω) + (−1)^κ ψ̃^{(|κ|)}(ω)]/(2|κ|!) for κ ≤ 0,
/// where ψ̃ is 1-periodic and coincides with ψ^{(m)} on (0, 1].
pub fn phi_cap(kappa: i64, omega: f64) -> Result<f64> {
    if kappa >= 1 {
        Ok(-periodic_bernoulli(kappa as usize, omega) / kappa as f64)
    } else {
        let m = (-kappa) as usize;
        let sign = if kappa % 2 == 0 { 1.0 } else { -1.0 };
        // Representative of ω in (0, 1].
        let rep = |w: f64| {
            let f = w - w.floor();
            if f < 1e-12 {
                1.0
            } else {
                f
            }
        };
        let a = polygamma(m, rep(-omega))?;
        let b = polygamma(m, rep(omega))?;
        Ok(-(a + sign * b) / (2.0 * fact(m)))
    }
}

/// Ξ_κ(ω) per its three-branch definition (prefactor (−2πi)^{1−κ}/√(2π)).
pub fn xi_cap(kappa: i64, omega: f64) -> Result<Complex64> {
    let frac = omega - omega.floor();
    let is_int = frac.abs() < 1e-12 || (1.0 - frac).abs() < 1e-12;
    let body: Complex64 = if kappa <= 0 && !is_int {
        let j = (-kappa) as usize;
        let delta = if kappa == 0 { 0.5 } else { 0.0 };
        f_neg(omega, j)? / fact(j) + delta
    } else if kappa <= 1 && is_int {
        let mu = (1 - kappa) as usize;
        let b = if mu == 1 {
            0.0
        } else {
            rat_to_f64(&bernoulli_number(mu))
        };
        Complex64::new(-b / fact(mu), 0.0)
    } else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let pref = Complex64::new(0.0, -2.0 * std::f64::consts::PI).powi(1 - kappa as i32) / SQRT_2PI;
    Ok(pref * body)
}

/// Constant term of ζ(s) at s = 1 − κ for even κ: γ at κ = 0 (the pole),
/// otherwise the value ζ(1−κ) = −B_κ/κ.
pub fn zeta_constant_term(kappa: i64) -> f64 {
    if kappa == 0 {
        EULER_GAMMA
    } else {
        debug_assert!(kappa > 0);
        -rat_to_f64(&bernoulli_number(kappa as usize)) / kappa as f64
    }
}

/// Exact-rational helpers re-exported for callers working at the boundary of
/// the exact and floating layers.
pub fn harmonic_rat(n: usize) -> Rat {
    poly::harmonic(n)
}
