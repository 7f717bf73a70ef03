//! Lattice sums of singular Schwartz functions over shifted integer lattices:
//! the building blocks 𝐠_{κ,l}, their Fourier transforms ĝ_{κ,l} (assembled
//! from closed forms plus a polynomial differential action), direct summation
//! with certified Gaussian tails, and the small-scale asymptotic value.

use num::complex::Complex64;

use crate::poly::{p_at_zero, pi_poly, q_at_zero, rat_to_f64};
use crate::special::{c_const, gauss, h_fn, i_fn, phi_cap, xi_cap, SQRT_2PI};

#[cfg(test)]
use crate::special::err_anti;
use crate::{Error, Result};

const TAU: f64 = 2.0 * std::f64::consts::PI;

/// i^k for any integer k.
pub fn ipow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// 𝐠_{κ,l}(ξ;η) = Σ_{ν=0}^{l} ((−1)^ν/(l−ν)!) (ξ+iη)^{κ+l−ν−1} h_ν(ξ).
pub fn g_bold(kappa: i64, l: usize, xi: f64, eta: f64) -> Result<Complex64> {
    if xi == 0.0 {
        return Err(Error::Domain("g_bold requires ξ ≠ 0".into()));
    }
    let base = Complex64::new(xi, eta);
    let mut sum = Complex64::new(0.0, 0.0);
    for nu in 0..=l {
        let sign = if nu % 2 == 0 { 1.0 } else { -1.0 };
        let fact: f64 = (1..=(l - nu)).map(|a| a as f64).product::<f64>().max(1.0);
        let power = kappa + l as i64 - nu as i64 - 1;
        sum += sign / fact * base.powi(power as i32) * h_fn(nu as i64, xi)?;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// Fourier transforms
// ---------------------------------------------------------------------------

/// Small dense polynomial over f64, used for the symbolic derivative stacks.
#[derive(Clone)]
struct FPoly(Vec<f64>);

impl FPoly {
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
    fn derivative(&self) -> FPoly {
        FPoly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        )
    }
    /// p(u) ↦ p'(u) − u·p(u), the effect of d/du on p(u)e^{−u²/2}.
    fn gaussian_step(&self) -> FPoly {
        let d = self.derivative();
        let mut out = vec![0.0; self.0.len() + 1];
        for (i, c) in d.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in self.0.iter().enumerate() {
            out[i + 1] -= c;
        }
        FPoly(out)
    }
}

/// Hermite polynomial He_n with argument shifted by −η, as an FPoly in u.
fn hermite_shifted(n: usize, eta: f64) -> FPoly {
    let he: Vec<f64> = crate::poly::hermite(n)
        .coeffs()
        .iter()
        .map(rat_to_f64)
        .collect();
    // Expand Σ c_k (u−η)^k by repeated synthetic multiplication.
    let mut out = vec![0.0; n + 1];
    let mut pow = vec![1.0]; // (u−η)^k coefficients
    for (k, &c) in he.iter().enumerate() {
        for (i, &p) in pow.iter().enumerate() {
            out[i] += c * p;
        }
        if k < n {
            // multiply pow by (u − η)
            let mut next = vec![0.0; pow.len() + 1];
            for (i, &p) in pow.iter().enumerate() {
                next[i + 1] += p;
                next[i] -= eta * p;
            }
            pow = next;
        }
    }
    FPoly(out)
}

/// μ-th u-derivative of (g(u)−1)/u: a convergent tail series near 0, a
/// Leibniz closed form elsewhere.
fn gm1_over_u_deriv(mu: usize, u: f64) -> f64 {
    // Taylor coefficient of g at order r (He_r(0)/r!).
    let gtc = |r: i64| rat_to_f64(&p_at_zero(r)) * ipow(r).re;
    if u.abs() < 0.5 {
        // Σ_{r≥2} gtc(r)·(r−1)!/(r−1−μ)!·u^{r−1−μ}
        let mut sum = 0.0;
        for r in 2i64..(mu as i64 + 80) {
            let k = r - 1 - mu as i64;
            if k < 0 {
                continue;
            }
            let mut fall = 1.0;
            for a in 0..mu {
                fall *= (r - 1 - a as i64) as f64;
            }
            sum += gtc(r) * fall * u.powi(k as i32);
        }
        sum
    } else {
        // Leibniz: Σ_a C(μ,a)·d^a(g−1)·d^{μ−a}(1/u), with
        // d^a g = (−1)^a He_a(u) g(u).
        let mut sum = 0.0;
        let mut binom = 1.0;
        for a in 0..=mu {
            let b = mu - a;
            let mut bfact = 1.0;
            for j in 1..=b {
                bfact *= j as f64;
            }
            let inv_deriv = if b % 2 == 0 { bfact } else { -bfact } / u.powi(b as i32 + 1);
            let he_a = crate::poly::hermite(a)
                .coeffs()
                .iter()
                .map(rat_to_f64)
                .rev()
                .fold(0.0, |acc, c| acc * u + c);
            let sign_a = if a % 2 == 0 { 1.0 } else { -1.0 };
            let g_part = sign_a * he_a * gauss(u) - if a == 0 { 1.0 } else { 0.0 };
            sum += binom * g_part * inv_deriv;
            binom *= (mu - a) as f64 / (a + 1) as f64;
        }
        sum
    }
}

/// ê_κ(t;η) for κ ≥ 1:
/// √(2π) Σ_{μ<κ} C(κ−1,μ)(iη)^{κ−1−μ}(−2πi)^{−μ}(d/dt)^μ[(g(2πt)−1)/(2πit)].
fn e_hat_pos(kappa: i64, t: f64, eta: f64) -> Complex64 {
    let n = (kappa - 1) as usize;
    let u = TAU * t;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut binom = 1.0;
    for mu in 0..=n {
        // (d/dt)^μ [(g(2πt)−1)/(2πit)] = (2π)^μ/i · d^μ/du^μ[(g(u)−1)/u]
        let deriv = Complex64::new(0.0, -1.0) * TAU.powi(mu as i32) * gm1_over_u_deriv(mu, u);
        let pref = (Complex64::new(0.0, eta)).powu((n - mu) as u32)
            / Complex64::new(0.0, -TAU).powu(mu as u32);
        sum += binom * pref * deriv;
        binom *= (n - mu) as f64 / (mu + 1) as f64;
    }
    SQRT_2PI * sum
}

/// ê_κ(t;η) for κ ≤ 0 (requires η > 0): √(2π) i^κ e^{−2πηt} I_{0,−κ}(η,2πt).
fn e_hat_neg(kappa: i64, t: f64, eta: f64) -> Result<Complex64> {
    let i_val = i_fn(0, (-kappa) as usize, eta, TAU * t, 1e-12)?.value;
    Ok(SQRT_2PI * ipow(kappa) * (-TAU * eta * t).exp() * i_val)
}

/// Linear combination Σ_j c_j·e^{−2πηt}I_{−1,j}(η,2πt) + q(t)·g(2πt), the
/// closed derivative algebra of ĝ_κ for κ ≤ 0.
#[derive(Clone)]
struct NegRep {
    d: Vec<Complex64>,
    q: Vec<Complex64>,
}

impl NegRep {
    fn derivative(&self, eta: f64) -> NegRep {
        let mut d = vec![Complex64::new(0.0, 0.0); self.d.len()];
        let mut q = vec![Complex64::new(0.0, 0.0); self.q.len() + 1];
        for (j, &c) in self.d.iter().enumerate() {
            d[j] -= TAU * eta * c;
            if j >= 1 {
                d[j - 1] += TAU * c;
            } else {
                q[0] += TAU * c;
            }
        }
        // d/dt [t^p g(2πt)] = p t^{p−1} g(2πt) − (2π)² t^{p+1} g(2πt)
        for (p, &c) in self.q.iter().enumerate() {
            if p >= 1 {
                q[p - 1] += p as f64 * c;
            }
            q[p + 1] -= TAU * TAU * c;
        }
        NegRep { d, q }
    }

    fn eval(&self, t: f64, eta: f64) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        let damp = (-TAU * eta * t).exp();
        for (j, &c) in self.d.iter().enumerate() {
            if c.norm() != 0.0 {
                sum += c * damp * i_fn(-1, j, eta, TAU * t, 1e-12)?.value;
            }
        }
        let mut qval = Complex64::new(0.0, 0.0);
        for &c in self.q.iter().rev() {
            qval = qval * t + c;
        }
        sum += qval * gauss(TAU * t);
        Ok(sum)
    }
}

/// j-th t-derivatives of ĝ_κ(t;η), j = 0..=l.
fn g_hat_derivs(kappa: i64, l: usize, t: f64, eta: f64) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(l + 1);
    if kappa >= 1 {
        // ĝ_κ = √(2π)(−i)^{κ−1} He_{κ−1}(u−η) g(u), u = 2πt; each d/dt is
        // 2π·(d/du), acting on the polynomial prefactor by the Gaussian step.
        let pref = SQRT_2PI * ipow(-(kappa - 1));
        let mut p = hermite_shifted((kappa - 1) as usize, eta);
        let u = TAU * t;
        for j in 0..=l {
            out.push(pref * TAU.powi(j as i32) * p.eval(u) * gauss(u));
            p = p.gaussian_step();
        }
    } else {
        if eta <= 0.0 {
            return Err(Error::Domain("g_bold_hat requires η > 0 when κ ≤ 0".into()));
        }
        // ĝ_κ = √(2π) i^{κ−1} e^{−2πηt} I_{−1,−κ}(η,2πt).
        let jj = (-kappa) as usize;
        let mut d = vec![Complex64::new(0.0, 0.0); jj + 1];
        d[jj] = SQRT_2PI * ipow(kappa - 1);
        let mut rep = NegRep { d, q: vec![] };
        for _ in 0..=l {
            out.push(rep.eval(t, eta)?);
            rep = rep.derivative(eta);
        }
    }
    Ok(out)
}

/// ĝ_{κ,l}(t;η) = P_l(iη)·ê_κ(t;η) + Π_l(∂_t/(−2πi), iη)·ĝ_κ(t;η), the
/// Fourier transform of ξ ↦ 𝐠_{κ,l}(ξ;η). Requires η > 0 when κ ≤ 0.
pub fn g_bold_hat(kappa: i64, l: usize, t: f64, eta: f64) -> Result<Complex64> {
    let ieta = Complex64::new(0.0, eta);
    // P_l(iη)
    let p_l: Complex64 = crate::poly::p_poly(l as i64)
        .coeffs()
        .iter()
        .map(rat_to_f64)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * ieta + c);
    let e_part = if kappa >= 1 {
        e_hat_pos(kappa, t, eta)
    } else {
        e_hat_neg(kappa, t, eta)?
    };
    // Π_l(ξ,ζ) with ξ ↦ ∂_t/(−2πi), ζ ↦ iη: collect the coefficient of ξ^j.
    let pi = pi_poly(l);
    let derivs = g_hat_derivs(kappa, l, t, eta)?;
    let mut g_part = Complex64::new(0.0, 0.0);
    for j in 0..=l {
        let mut a_j = Complex64::new(0.0, 0.0);
        let mut zpow = Complex64::new(1.0, 0.0);
        for m in 0..=l {
            a_j += rat_to_f64(&pi.coeff(j, m)) * zpow;
            zpow *= ieta;
        }
        if a_j.norm() != 0.0 {
            g_part += a_j * derivs[j] / Complex64::new(0.0, -TAU).powu(j as u32);
        }
    }
    Ok(p_l * e_part + g_part)
}

// ---------------------------------------------------------------------------
// Lattice sums
// ---------------------------------------------------------------------------

/// Outcome of a direct lattice summation with a certified Gaussian tail.
pub struct LatticeSumResult {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

/// 𝐆_{κ,l}(ω;υ) = Σ_{0≠ξ∈ℤ+ω} 𝐠_{κ,l}(υξ;0), summed in increasing |ξ|
/// (negative before positive on ties) and truncated once the Gaussian
/// envelope certifies the tail below `tol`.
pub fn lattice_sum(
    kappa: i64,
    l: usize,
    omega: f64,
    upsilon: f64,
    tol: f64,
) -> Result<LatticeSumResult> {
    if upsilon <= 0.0 {
        return Err(Error::Precondition("lattice_sum requires υ > 0".into()));
    }
    let frac = omega - omega.floor();
    // Cursors over the two arms of the lattice.
    let mut next_pos = if frac == 0.0 { 1.0 } else { frac };
    let mut next_neg = frac - 1.0;
    let mut value = 0.0;
    let mut terms_used = 0usize;
    let mut last_pair = f64::INFINITY;
    loop {
        // Next point: smaller |ξ| first, negative on ties.
        let take_neg = next_neg.abs() <= next_pos.abs();
        let xi = if take_neg { next_neg } else { next_pos };
        let term = g_bold(kappa, l, upsilon * xi, 0.0)?.re;
        value += term;
        terms_used += 1;
        if take_neg {
            next_neg -= 1.0;
        } else {
            next_pos += 1.0;
        }
        let min_abs = next_neg.abs().min(next_pos.abs());
        if take_neg {
            last_pair = term.abs();
        } else {
            last_pair += term.abs();
            // Both arms of the current ring consumed: check the stop rule.
            if upsilon * min_abs >= 8.0 && last_pair < tol / 100.0 {
                let r = (-(upsilon * upsilon * min_abs)).exp().min(0.5);
                let tail_bound = last_pair * r / (1.0 - r) + tol / 100.0;
                return Ok(LatticeSumResult {
                    value,
                    terms_used,
                    tail_bound,
                });
            }
        }
        if terms_used > 5_000_000 {
            return Err(Error::Certification(
                "lattice_sum failed to certify its tail".into(),
            ));
        }
    }
}

/// The small-υ asymptotic value of 𝐆_{κ,l}(ω;υ):
/// −√(2π)υ^{κ−1}[P_l(0)Φ_κ(ω) + Q_l(0)Ξ_κ(ω)] plus the branch-dependent
/// extra term (−√(2π)i^{κ+l}He_{κ+l}(0)/(υκl!) for κ ≥ 1; the logarithmic
/// (log υ + C_l)/υ term for κ = 0; nothing extra for κ < 0).
pub fn lattice_sum_asymptotic(kappa: i64, l: usize, omega: f64, upsilon: f64) -> Result<f64> {
    if upsilon <= 0.0 {
        return Err(Error::Precondition("requires υ > 0".into()));
    }
    let p0 = rat_to_f64(&p_at_zero(l as i64));
    let q0 = rat_to_f64(&q_at_zero(l as i64));
    let xi_term = if q0 != 0.0 {
        q0 * xi_cap(kappa, omega)?.re
    } else {
        0.0
    };
    let mut value =
        -SQRT_2PI * upsilon.powi(kappa as i32 - 1) * (p0 * phi_cap(kappa, omega)? + xi_term);
    if kappa >= 1 {
        // i^{κ+l}He_{κ+l}(0) is real: He_n(0) vanishes for odd n.
        let he0 = crate::poly::hermite((kappa + l as i64) as usize).eval(&crate::poly::rat(0, 1));
        let lfact: f64 = (1..=l).map(|a| a as f64).product::<f64>().max(1.0);
        let signed = rat_to_f64(&he0) * ipow(kappa + l as i64).re;
        value -= SQRT_2PI * signed / (upsilon * kappa as f64 * lfact);
    } else if kappa == 0 {
        value += SQRT_2PI * p0 * (upsilon.ln() + c_const(l)) / upsilon;
    }
    Ok(value)
}
