//! Shared check routines used by both the per-module identity tests and the
//! acceptance harness. Each returns `Err` with a description of the first
//! failing case.

#![allow(dead_code)]

pub mod polychecks {
    use nearlift::poly::*;
    use num::{One, Zero};

    /// P_ν' = P_{ν−1} and P_ν + Q_ν' − ξQ_ν = Q_{ν−1}, exactly, ν ∈ [−10, 30].
    pub fn recursions() -> Result<(), String> {
        for nu in -10i64..=30 {
            let p = p_poly(nu);
            if p.derivative() != p_poly(nu - 1) {
                return Err(format!("P_{nu}' != P_{}", nu - 1));
            }
            let q = q_poly(nu);
            let lhs = &(&p + &q.derivative()) - &(&Poly::x() * &q);
            if lhs != q_poly(nu - 1) {
                return Err(format!("P_{nu} + Q_{nu}' - xQ_{nu} != Q_{}", nu - 1));
            }
        }
        Ok(())
    }

    /// νP_ν − ξP_{ν−1} = P_{ν−2} and νQ_ν − ξQ_{ν−1} = Q_{ν−2}, ν ∈ [−8, 30].
    pub fn three_term() -> Result<(), String> {
        for nu in -8i64..=30 {
            let c = rat(nu, 1);
            let lhs_p = &p_poly(nu).scale(&c) - &(&Poly::x() * &p_poly(nu - 1));
            if lhs_p != p_poly(nu - 2) {
                return Err(format!("three-term P failed at nu={nu}"));
            }
            let lhs_q = &q_poly(nu).scale(&c) - &(&Poly::x() * &q_poly(nu - 1));
            if lhs_q != q_poly(nu - 2) {
                return Err(format!("three-term Q failed at nu={nu}"));
            }
        }
        Ok(())
    }

    /// The t-Taylor coefficients of e^{ξt + t²/2} up to order 20 equal P_ν(ξ),
    /// computed independently by convolving the two exponential series.
    pub fn generating_series() -> Result<(), String> {
        const N: usize = 20;
        // e^{ξt}: coefficient of t^m is ξ^m/m!.
        let exp_xi: Vec<Poly> = (0..=N)
            .map(|m| {
                let mut coeffs = vec![Rat::zero(); m + 1];
                coeffs[m] = Rat::one() / factorial(m);
                Poly::from_coeffs(coeffs)
            })
            .collect();
        for n in 0..=N {
            let mut acc = Poly::zero();
            let mut a = 0usize;
            while 2 * a <= n {
                // e^{t²/2}: coefficient of t^{2a} is 1/(2^a a!).
                let mut half = Rat::one() / factorial(a);
                for _ in 0..a {
                    half = half / rat(2, 1);
                }
                acc = &acc + &exp_xi[n - 2 * a].scale(&half);
                a += 1;
            }
            if acc != p_poly(n as i64) {
                return Err(format!("generating series mismatch at order {n}"));
            }
        }
        Ok(())
    }

    /// Appell property P_ν(ξ+η) = Σ_j η^j P_{ν−j}(ξ)/j!, exact for ν ≤ 20
    /// (polynomial identity in η certified by 21 distinct rational samples).
    pub fn appell() -> Result<(), String> {
        for nu in 0i64..=20 {
            for j in -10i64..=10 {
                let eta = rat(j, 3);
                let lhs = p_poly(nu).compose_shift(&eta);
                let mut rhs = Poly::zero();
                let mut eta_pow = Rat::one();
                for jj in 0..=(nu as usize) {
                    let c = &eta_pow / factorial(jj);
                    rhs = &rhs + &p_poly(nu - jj as i64).scale(&c);
                    eta_pow = &eta_pow * &eta;
                }
                if lhs != rhs {
                    return Err(format!("Appell failed at nu={nu}, eta={eta}"));
                }
            }
        }
        Ok(())
    }

    /// Σ_ν (−1)^ν (ξ+ζ)^{l−ν} P_ν(ξ)/(l−ν)! = P_l(ζ), exact for l ≤ 15
    /// (identity in ζ certified by 17 distinct rational samples).
    pub fn p_taylor_inversion() -> Result<(), String> {
        for l in 0usize..=15 {
            for j in -8i64..=8 {
                let zeta = rat(j, 2);
                let base = Poly::from_coeffs(vec![zeta.clone(), Rat::one()]); // ξ + ζ
                let mut pow = Poly::from_coeffs(vec![Rat::one()]);
                let mut powers = vec![pow.clone()];
                for _ in 0..l {
                    pow = &pow * &base;
                    powers.push(pow.clone());
                }
                let mut lhs = Poly::zero();
                for nu in 0..=l {
                    let sign = if nu % 2 == 0 { Rat::one() } else { -Rat::one() };
                    let c = sign / factorial(l - nu);
                    lhs = &lhs + &(&powers[l - nu] * &p_poly(nu as i64)).scale(&c);
                }
                let rhs = Poly::from_coeffs(vec![p_poly(l as i64).eval(&zeta)]);
                if lhs != rhs {
                    return Err(format!("P-Taylor inversion failed at l={l}, zeta={zeta}"));
                }
            }
        }
        Ok(())
    }

    /// ∂_ζ Π_l = Π_{l−1} exactly for 1 ≤ l ≤ 12.
    pub fn pi_derivative() -> Result<(), String> {
        for l in 1usize..=12 {
            if pi_poly(l).derivative_z() != pi_poly(l - 1) {
                return Err(format!("d/dzeta Pi_{l} != Pi_{}", l - 1));
            }
        }
        Ok(())
    }

    /// Π_l(−ζ,ζ) = −Q_l(ζ) and Π̃_l(ω,ζ) divisible by ω, for l ≤ 20.
    pub fn pi_structure() -> Result<(), String> {
        for l in 0usize..=20 {
            let pi = pi_poly(l);
            for j in -4i64..=4 {
                let zeta = rat(j, 3);
                if pi.eval(&-zeta.clone(), &zeta) != -q_poly(l as i64).eval(&zeta) {
                    return Err(format!("Pi_{l}(-z,z) != -Q_{l}(z) at z={zeta}"));
                }
            }
            pi_tilde(l).map_err(|e| format!("Pi-tilde_{l} not divisible by omega: {e}"))?;
        }
        Ok(())
    }

    /// ν!P_ν and ν!Q_ν have integer coefficients for 0 ≤ ν ≤ 30.
    pub fn integrality() -> Result<(), String> {
        for nu in 0i64..=30 {
            let f = factorial(nu as usize);
            for (name, poly) in [("P", p_poly(nu)), ("Q", q_poly(nu))] {
                for c in poly.scale(&f).coeffs() {
                    if !c.denom().is_one() {
                        return Err(format!("{nu}!·{name}_{nu} has non-integer coefficient {c}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Q_ν(0) = ∏_{j=1}^{(ν−1)/2} 1/(2j+1) for odd ν ≥ 1, and 0 for even ν ≥ 0.
    pub fn q_at_zero_closed_form() -> Result<(), String> {
        for nu in 0i64..=29 {
            let got = q_at_zero(nu);
            if nu % 2 == 0 {
                if !got.is_zero() {
                    return Err(format!("Q_{nu}(0) != 0"));
                }
            } else {
                let mut expect = Rat::one();
                for j in 1..=((nu - 1) / 2) {
                    expect = expect / rat(2 * j + 1, 1);
                }
                if got != expect {
                    return Err(format!("Q_{nu}(0) = {got}, expected {expect}"));
                }
            }
        }
        Ok(())
    }

    /// E_l parity (−1)^l and E_l(0) = −P_l(0)·Σ_{odd a ≤ l} 1/a, for l ≤ 30.
    pub fn e_poly_properties() -> Result<(), String> {
        for l in 0usize..=30 {
            let e = e_poly(l);
            for (m, c) in e.coeffs().iter().enumerate() {
                if (m + l) % 2 == 1 && !c.is_zero() {
                    return Err(format!("E_{l} violates parity at degree {m}"));
                }
            }
            let mut odd_harmonic = Rat::zero();
            let mut a = 1i64;
            while a <= l as i64 {
                odd_harmonic += rat(1, a);
                a += 2;
            }
            let expect = -p_at_zero(l as i64) * odd_harmonic;
            if e.eval(&Rat::zero()) != expect {
                return Err(format!("E_{l}(0) != closed form"));
            }
        }
        Ok(())
    }

    /// Ω_l degree and parity; Ω̃_k realness is structural (rational output).
    pub fn omega_properties() -> Result<(), String> {
        for l in 0usize..=20 {
            let om = omega_poly(l);
            match om.degree() {
                None => {
                    if l >= 2 {
                        return Err(format!("Omega_{l} unexpectedly zero"));
                    }
                }
                Some(d) => {
                    if d != l - 2 {
                        return Err(format!("deg Omega_{l} = {d}, expected {}", l - 2));
                    }
                }
            }
            for (m, c) in om.coeffs().iter().enumerate() {
                if (m + l) % 2 == 1 && !c.is_zero() {
                    return Err(format!("Omega_{l} violates parity at degree {m}"));
                }
            }
            let _ = omega_tilde(l);
        }
        Ok(())
    }

    /// Run the whole exact-polynomial identity suite.
    pub fn run_all() -> Result<(), String> {
        recursions()?;
        three_term()?;
        generating_series()?;
        appell()?;
        p_taylor_inversion()?;
        pi_derivative()?;
        pi_structure()?;
        integrality()?;
        q_at_zero_closed_form()?;
        e_poly_properties()?;
        omega_properties()?;
        Ok(())
    }
}

pub mod specchecks {
    use nearlift::poly::{factorial, hermite, p_at_zero, rat, rat_to_f64};
    use nearlift::quad;
    use nearlift::special::*;
    use num::complex::Complex64;

    /// Richardson-extrapolated central difference (fourth-order accurate).
    pub fn fd<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
        let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
        let d2 = (f(x + h / 2.0) - f(x - h / 2.0)) / h;
        (4.0 * d2 - d1) / 3.0
    }

    /// Jump of h_ν at 0 equals −√(2π)P_ν(0), within 1e−9 for ν ∈ [0, 10].
    pub fn h_jump() -> Result<(), String> {
        for nu in 0i64..=10 {
            let jump = h_fn(nu, 1e-10).unwrap() - h_fn(nu, -1e-10).unwrap();
            let expect = -SQRT_2PI * rat_to_f64(&p_at_zero(nu));
            if (jump - expect).abs() > 1e-9 {
                return Err(format!("h_{nu} jump {jump} != {expect}"));
            }
        }
        Ok(())
    }

    /// h_ν(−ξ) = (−1)^{ν−1} h_ν(ξ) within 1e−12.
    pub fn h_parity() -> Result<(), String> {
        for nu in -4i64..=10 {
            for xi in [0.3, 1.0, 2.5, 4.0] {
                let sign = if (nu - 1).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                let lhs = h_fn(nu, -xi).unwrap();
                let rhs = sign * h_fn(nu, xi).unwrap();
                if (lhs - rhs).abs() > 1e-12 {
                    return Err(format!("h_{nu} parity fails at xi={xi}: {lhs} vs {rhs}"));
                }
            }
        }
        Ok(())
    }

    /// d/dξ h_ν = h_{ν−1} away from 0, within 1e−7, ν ∈ [−3, 10].
    pub fn h_derivative() -> Result<(), String> {
        for nu in -3i64..=10 {
            for xi in [-2.5f64, -1.0, -0.3, 0.3, 1.0, 2.5] {
                let h = 1e-5 * (xi.abs() + 1.0);
                let num = fd(|x| h_fn(nu, x).unwrap(), xi, h);
                let exact = h_fn(nu - 1, xi).unwrap();
                if (num - exact).abs() > 1e-7 {
                    return Err(format!(
                        "d/dxi h_{nu} at xi={xi}: fd {num} vs h_{} = {exact}",
                        nu - 1
                    ));
                }
            }
        }
        Ok(())
    }

    /// νh_ν(ξ) − ξh_{ν−1}(ξ) = h_{ν−2}(ξ) within 1e−10 on a ξ > 0 grid.
    pub fn h_three_term() -> Result<(), String> {
        for nu in -3i64..=10 {
            for xi in [0.2, 0.5, 1.0, 1.7, 3.0] {
                let lhs = nu as f64 * h_fn(nu, xi).unwrap() - xi * h_fn(nu - 1, xi).unwrap();
                let rhs = h_fn(nu - 2, xi).unwrap();
                if (lhs - rhs).abs() > 1e-10 {
                    return Err(format!("three-term h at nu={nu}, xi={xi}: {lhs} vs {rhs}"));
                }
            }
        }
        Ok(())
    }

    /// ĥ_ν closed form vs direct quadrature ∫ h_ν(ξ)e(−ξt)dξ (split at the
    /// jump, truncated at |ξ| = 10 where the Gaussian tail is < 1e−20),
    /// within 1e−7 for ν ∈ [−1, 4], t ∈ {0, ±0.1, ±0.7}.
    pub fn h_fourier() -> Result<(), String> {
        for nu in -1i64..=4 {
            for t in [0.0, 0.1, -0.1, 0.7, -0.7] {
                let phase = 2.0 * std::f64::consts::PI * t;
                let re = |xi: f64| h_fn(nu, xi).unwrap() * (phase * xi).cos();
                let im = |xi: f64| -h_fn(nu, xi).unwrap() * (phase * xi).sin();
                let mut oracle = Complex64::new(0.0, 0.0);
                for (a, b) in [(-10.0, 0.0), (0.0, 10.0)] {
                    oracle.re += quad::adaptive(&re, a, b, 1e-10).value;
                    oracle.im += quad::adaptive(&im, a, b, 1e-10).value;
                }
                let closed = h_hat(nu, t).unwrap();
                if (closed - oracle).norm() > 1e-7 {
                    return Err(format!(
                        "h_hat({nu}, {t}) = {closed} vs quadrature {oracle}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// ∂_η I_{ν,j} = He_ν(0)e^{ηt}/(ν!η^{j+1}) − I_{ν−1,j}, by FD, < 1e−6.
    pub fn i_eta_derivative() -> Result<(), String> {
        for (nu, j, eta, t) in [(0i64, 0usize, 0.8, 0.3), (2, 1, 1.2, 0.5), (1, 0, 0.7, 0.0)] {
            let num = fd(|e| i_fn(nu, j, e, t, 1e-11).unwrap().value, eta, 1e-3);
            let he0 = rat_to_f64(&(hermite(nu as usize).eval(&rat(0, 1)) / factorial(nu as usize)));
            let exact = he0 * (eta * t).exp() / eta.powi(j as i32 + 1)
                - i_fn(nu - 1, j, eta, t, 1e-11).unwrap().value;
            if (num - exact).abs() > 1e-6 {
                return Err(format!(
                    "d/deta I_({nu},{j}) at eta={eta}, t={t}: {num} vs {exact}"
                ));
            }
        }
        Ok(())
    }

    /// ∂_t I_{ν,j} = I_{ν,j−1} for j ≥ 1, and e^{ηt}g(t) at (ν,j) = (−1,0).
    pub fn i_t_derivative() -> Result<(), String> {
        for (nu, j, eta, t) in [(0i64, 1usize, 0.9, 0.4), (2, 2, 1.1, 0.2)] {
            let num = fd(|tt| i_fn(nu, j, eta, tt, 1e-11).unwrap().value, t, 1e-3);
            let exact = i_fn(nu, j - 1, eta, t, 1e-11).unwrap().value;
            if (num - exact).abs() > 1e-6 {
                return Err(format!("d/dt I_({nu},{j}): {num} vs {exact}"));
            }
        }
        let (eta, t) = (0.6, 0.8);
        let num = fd(|tt| i_fn(-1, 0, eta, tt, 1e-11).unwrap().value, t, 1e-3);
        let exact = (eta * t).exp() * gauss(t);
        if (num - exact).abs() > 1e-6 {
            return Err(format!("d/dt I_(-1,0): {num} vs {exact}"));
        }
        Ok(())
    }

    /// η³ d/dη (I_ν/η^ν) = I_{ν−2}/η^{ν−2}, by FD, < 1e−6.
    pub fn i_lowering() -> Result<(), String> {
        for nu in 1i64..=3 {
            for eta in [0.7f64, 1.2] {
                let num = eta.powi(3)
                    * fd(
                        |e: f64| i_simple(nu, e, 1e-11).unwrap().value / e.powi(nu as i32),
                        eta,
                        1e-3,
                    );
                let exact = i_simple(nu - 2, eta, 1e-11).unwrap().value / eta.powi(nu as i32 - 2);
                if (num - exact).abs() > 1e-6 {
                    return Err(format!(
                        "I lowering at nu={nu}, eta={eta}: {num} vs {exact}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// J_ν' = −J_{ν−1} by FD (< 1e−6), the lowering analogue
    /// η³ d/dη (J_ν/η^ν) = J_{ν−2}/η^{ν−2}, and the parity (−1)^{ν−1}.
    pub fn j_identities() -> Result<(), String> {
        for nu in -3i64..=6 {
            for eta in [0.4, 1.0, 1.8] {
                let num = fd(|e| j_fn(nu, e), eta, 1e-4);
                let exact = -j_fn(nu - 1, eta);
                if (num - exact).abs() > 1e-6 {
                    return Err(format!("J_{nu}' at eta={eta}: {num} vs {exact}"));
                }
                let sign = if (nu - 1).rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                if (j_fn(nu, -eta) - sign * j_fn(nu, eta)).abs() > 1e-10 {
                    return Err(format!("J_{nu} parity fails at eta={eta}"));
                }
            }
        }
        for nu in 1i64..=3 {
            let eta = 0.9f64;
            let num = eta.powi(3) * fd(|e: f64| j_fn(nu, e) / e.powi(nu as i32), eta, 1e-4);
            let exact = j_fn(nu - 2, eta) / eta.powi(nu as i32 - 2);
            if (num - exact).abs() > 1e-6 {
                return Err(format!("J lowering at nu={nu}: {num} vs {exact}"));
            }
        }
        Ok(())
    }

    /// I_{−1,0}(η,t) → √(2π)J_{−1}(η) with residual < 1e−8 by t = 8, and the
    /// two-sided closed form e^{η²/2}(√(2π) + e(t−η)) / −e^{η²/2}e(η−t),
    /// both from ∫_{−t}^∞ e^{−ηw}g(w)dw = e^{η²/2}∫_{η−t}^∞ g.
    pub fn i_asymptotic() -> Result<(), String> {
        for eta in [0.5, 1.0] {
            let v8 = i_fn(-1, 0, eta, 8.0, 1e-12).unwrap().value;
            let limit = SQRT_2PI * j_fn(-1, eta);
            if (v8 - limit).abs() > 1e-8 {
                return Err(format!(
                    "I_(-1,0)({eta}, 8) residual {}",
                    (v8 - limit).abs()
                ));
            }
            for t in [-1.0, 0.2, 3.0] {
                let v = i_fn(-1, 0, eta, t, 1e-12).unwrap().value;
                let closed = if t > eta {
                    (eta * eta / 2.0).exp() * (SQRT_2PI + err_anti(t - eta).unwrap())
                } else {
                    -(eta * eta / 2.0).exp() * err_anti(eta - t).unwrap()
                };
                if (v - closed).abs() > 1e-9 {
                    return Err(format!("I_(-1,0)({eta},{t}) = {v} vs closed {closed}"));
                }
            }
        }
        Ok(())
    }

    /// I_{−1,j}(0,0) = Q_j(0) + √(π/2)P_j(0) for j ≤ 4.
    pub fn i_at_origin() -> Result<(), String> {
        use nearlift::poly::q_at_zero;
        for j in 0usize..=4 {
            let v = i_fn(-1, j, 0.0, 0.0, 1e-12).unwrap().value;
            let expect = rat_to_f64(&q_at_zero(j as i64))
                + (std::f64::consts::PI / 2.0).sqrt() * rat_to_f64(&p_at_zero(j as i64));
            if (v - expect).abs() > 1e-9 {
                return Err(format!("I_(-1,{j})(0,0) = {v} vs {expect}"));
            }
        }
        Ok(())
    }

    /// I_0(1) = (1/√(2π)) ∫ h_0(ξ)/(ξ+i) dξ (real part; the imaginary part
    /// vanishes by parity), within 1e−8.
    pub fn i_fourier_link() -> Result<(), String> {
        let integrand = |xi: f64| h_fn(0, xi).unwrap() * xi / (xi * xi + 1.0);
        let mut oracle = 0.0;
        for (a, b) in [(-12.0, 0.0), (0.0, 12.0)] {
            oracle += quad::adaptive(&integrand, a, b, 1e-11).value;
        }
        oracle /= SQRT_2PI;
        let v = i_simple(0, 1.0, 1e-12).unwrap().value;
        if (v - oracle).abs() > 1e-8 {
            return Err(format!("I_0(1) = {v} vs Fourier-side {oracle}"));
        }
        Ok(())
    }

    /// |h_ν(ξ)|·e^{0.9ξ²/2} decays along ξ ∈ [7, 10]: strictly decreasing
    /// (past the polynomial-prefactor peak) and down by at least half.
    pub fn h_decay() -> Result<(), String> {
        for nu in [-1i64, 0, 2, 5] {
            let env = |xi: f64| h_fn(nu, xi).unwrap().abs() * (0.9 * xi * xi / 2.0).exp();
            let first = env(7.0);
            let mut prev = first;
            for i in 1..=6 {
                let xi = 7.0 + 0.5 * i as f64;
                let v = env(xi);
                if v > prev {
                    return Err(format!("decay envelope not monotone for h_{nu} at xi={xi}"));
                }
                prev = v;
            }
            if prev > 0.5 * first {
                return Err(format!(
                    "h_{nu} envelope only fell {first} -> {prev} on [7,10]"
                ));
            }
        }
        Ok(())
    }

    /// Γ(μ+1, t) = μΓ(μ, t) + t^μ e^{−t} across all branches of the extension.
    pub fn gamma_recurrence() -> Result<(), String> {
        for mu in -4i64..=3 {
            for t in [-2.0, -0.5, 0.7, 3.0] {
                let lhs = inc_gamma_ext(mu + 1, t).unwrap();
                let rhs = mu as f64 * inc_gamma_ext(mu, t).unwrap()
                    + t.powi(mu as i32) * (-t as f64).exp();
                let scale = lhs.abs().max(rhs.abs()).max(1.0);
                if (lhs - rhs).abs() > 1e-10 * scale {
                    return Err(format!(
                        "Gamma recurrence at mu={mu}, t={t}: {lhs} vs {rhs}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Φ_2(0) = ζ(−1) with ζ(−1) computed by an Euler–Maclaurin oracle.
    pub fn phi_zeta_link() -> Result<(), String> {
        // ζ(s) at s = −1 by Euler–Maclaurin: Σ_{n<N} n + correction terms.
        // ζ(−1) = lim (Σ_{n=1}^{N} n − N²/2 − N/2) = −B_2/2 evaluated via
        // the tail formula ζ(s) = Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2
        // + (s/12)N^{−s−1} at s = −1.
        let n = 50.0f64;
        let mut zeta = 0.0;
        for m in 1..50u32 {
            zeta += m as f64;
        }
        zeta += n * n / (-2.0) + n / 2.0 + (-1.0 / 12.0) * 1.0;
        let phi = phi_cap(2, 0.0).unwrap();
        if (phi - zeta).abs() > 1e-10 {
            return Err(format!("Phi_2(0) = {phi} vs zeta(-1) oracle {zeta}"));
        }
        Ok(())
    }

    /// Run the whole special-function identity suite (acceptance item).
    pub fn run_all() -> Result<(), String> {
        h_jump()?;
        h_parity()?;
        h_derivative()?;
        h_three_term()?;
        h_fourier()?;
        i_eta_derivative()?;
        i_t_derivative()?;
        i_lowering()?;
        j_identities()?;
        i_asymptotic()?;
        i_at_origin()?;
        i_fourier_link()?;
        h_decay()?;
        gamma_recurrence()?;
        phi_zeta_link()?;
        Ok(())
    }
}

pub mod latchecks {
    use nearlift::lattice::*;
    use num::complex::Complex64;

    /// Poisson summation for κ ≥ 1, η > 0:
    /// Σ_{ξ∈ℤ+ω} 𝐠_{κ,l}(υξ;η) = (1/υ)Σ_m e(mω)ĝ_{κ,l}(m/υ;η), < 1e−8.
    ///
    /// The ê_κ part of the transform decays only algebraically (the summand
    /// jumps at ξ = 0), so its exact algebraic tail Σ_p c_p/m^p is summed in
    /// closed form via Σ_{m≠0} e(mω)/(2πim)^p = −𝔹_p(ω)/p!, and only the
    /// Gaussian-decaying remainder is summed numerically.
    pub fn poisson() -> Result<(), String> {
        use nearlift::poly::{p_poly, rat_to_f64};
        use nearlift::special::periodic_bernoulli;
        let (omega, upsilon, eta) = (1.0 / 3.0, 1.0, 0.7);
        let tau = 2.0 * std::f64::consts::PI;
        let sqrt_2pi = nearlift::special::SQRT_2PI;
        for (kappa, l) in [(1i64, 0usize), (1, 1), (2, 0), (2, 2), (3, 1)] {
            let mut direct = Complex64::new(0.0, 0.0);
            for n in -45i64..=45 {
                let xi = n as f64 + omega;
                direct += g_bold(kappa, l, upsilon * xi, eta)
                    .map_err(|e| format!("direct side ({kappa},{l}): {e}"))?;
            }
            // Algebraic 1/m^p coefficients of ê_κ(m;η): from the closed form,
            // the term d^μ/du^μ[(g(u)−1)/u] contributes d^μ(−1/u) =
            // −(−1)^μ μ!/u^{μ+1} once the Gaussian factor is negligible.
            let n_top = (kappa - 1) as usize;
            let mut c = vec![Complex64::new(0.0, 0.0); n_top + 2]; // c[p] multiplies 1/m^p
            let mut binom = 1.0;
            for mu in 0..=n_top {
                let mut mufact = 1.0;
                for a in 1..=mu {
                    mufact *= a as f64;
                }
                let sign = if mu % 2 == 0 { -1.0 } else { 1.0 };
                let coeff = sqrt_2pi * binom * Complex64::new(0.0, eta).powu((n_top - mu) as u32)
                    / Complex64::new(0.0, -tau).powu(mu as u32)
                    * Complex64::new(0.0, -1.0)
                    * tau.powi(mu as i32)
                    * sign
                    * mufact
                    / tau.powi(mu as i32 + 1);
                c[mu + 1] += coeff;
                binom *= (n_top - mu) as f64 / (mu + 1) as f64;
            }
            let e_alg = |m: f64| -> Complex64 {
                let mut v = Complex64::new(0.0, 0.0);
                for (p, &cp) in c.iter().enumerate().skip(1) {
                    v += cp / m.powi(p as i32);
                }
                v
            };
            // P_l(iη)
            let ieta = Complex64::new(0.0, eta);
            let p_l = p_poly(l as i64)
                .coeffs()
                .iter()
                .map(|r| rat_to_f64(r))
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, cc| acc * ieta + cc);
            // Numeric part: full transform minus the algebraic ê tail.
            let mut fourier = Complex64::new(0.0, 0.0);
            for m in -8i64..=8 {
                let phase = Complex64::from_polar(1.0, tau * m as f64 * omega);
                let mut hat = g_bold_hat(kappa, l, m as f64 / upsilon, eta)
                    .map_err(|e| format!("fourier side ({kappa},{l},m={m}): {e}"))?;
                if m != 0 {
                    hat -= p_l * e_alg(m as f64 / upsilon);
                }
                fourier += phase * hat;
            }
            // Guard: at m = 6 the algebraic part must already be the whole
            // transform of the l = 0 piece to near machine precision.
            let guard = {
                let full = g_bold_hat(kappa, 0, 6.0, eta).unwrap();
                (full - e_alg(6.0)).norm()
            };
            if guard > 1e-12 {
                return Err(format!(
                    "algebraic tail model wrong for kappa={kappa}: residual {guard} at m=6"
                ));
            }
            // Closed-form algebraic tail over all m ≠ 0:
            // Σ_{m≠0} e(mω)/m^p = −(2πi)^p 𝔹_p(ω)/p!.
            let mut tail = Complex64::new(0.0, 0.0);
            for (p, &cp) in c.iter().enumerate().skip(1) {
                let mut pfact = 1.0;
                for a in 1..=p {
                    pfact *= a as f64;
                }
                let full_sum =
                    -Complex64::new(0.0, tau).powu(p as u32) * periodic_bernoulli(p, omega) / pfact;
                // subtract the |m| ≤ 8 part already summed numerically
                let mut inner = Complex64::new(0.0, 0.0);
                for m in -8i64..=8 {
                    if m != 0 {
                        inner += Complex64::from_polar(1.0, tau * m as f64 * omega)
                            / (m as f64).powi(p as i32);
                    }
                }
                tail += cp * (full_sum - inner);
            }
            fourier += p_l * tail;
            // numeric |m| ≤ 8 already contains (ĝ − ê_alg) and the closed
            // form re-adds all of ê_alg, so combine and compare.
            let mut fourier_total = Complex64::new(0.0, 0.0);
            for m in -8i64..=8 {
                if m != 0 {
                    fourier_total +=
                        Complex64::from_polar(1.0, tau * m as f64 * omega) * p_l * e_alg(m as f64);
                }
            }
            fourier += fourier_total;
            fourier /= upsilon;
            if (direct - fourier).norm() > 1e-8 {
                return Err(format!(
                    "Poisson mismatch at kappa={kappa}, l={l}: {direct} vs {fourier} (diff {})",
                    (direct - fourier).norm()
                ));
            }
        }
        Ok(())
    }

    /// Empirical convergence order of |direct − asymptotic| under υ-halving
    /// from 0.2 to 0.025 on the (κ,l,ω) grid. For κ ≥ 1 the predicted
    /// residual is beyond-all-orders small, so the error must sit at the
    /// numerical noise floor; for κ ≤ 0 the predicted order is κ and the
    /// empirical log₂ slope must be ≥ κ − 0.1.
    pub fn asymptotic_order() -> Result<(), String> {
        let upsilons = [0.2, 0.1, 0.05, 0.025];
        for kappa in -2i64..=3 {
            for l in 0usize..=3 {
                for omega in [0.0, 1.0 / 3.0, 0.5] {
                    let mut errs = [0.0f64; 4];
                    let mut scale = 1.0f64;
                    for (i, &u) in upsilons.iter().enumerate() {
                        let direct = lattice_sum(kappa, l, omega, u, 1e-11)
                            .map_err(|e| format!("lattice_sum({kappa},{l},{omega},{u}): {e}"))?;
                        let asym = lattice_sum_asymptotic(kappa, l, omega, u)
                            .map_err(|e| format!("asymptotic({kappa},{l},{omega},{u}): {e}"))?;
                        errs[i] = (direct.value - asym).abs();
                        scale = scale.max(direct.value.abs());
                    }
                    if kappa >= 1 {
                        for (i, &e) in errs.iter().enumerate() {
                            if e > 1e-8 * (1.0 + scale) {
                                return Err(format!(
                                    "kappa={kappa}, l={l}, omega={omega}: residual {e} at upsilon={} above noise floor (scale {scale})",
                                    upsilons[i]
                                ));
                            }
                        }
                    } else {
                        // slope of log2(err) vs log2(upsilon) over the 3-octave span
                        let e0 = errs[0].max(1e-300);
                        let e3 = errs[3].max(1e-300);
                        let slope = (e3.ln() - e0.ln()) / (upsilons[3].ln() - upsilons[0].ln());
                        // If the error already sits at the noise floor the
                        // slope is meaningless but the bound is met a fortiori.
                        let at_floor = errs.iter().all(|&e| e < 1e-9 * (1.0 + scale));
                        if !at_floor && slope < kappa as f64 - 0.1 {
                            return Err(format!(
                                "kappa={kappa}, l={l}, omega={omega}: empirical order {slope:.3} < {} (errs {errs:?})",
                                kappa as f64 - 0.1
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn run_all() -> Result<(), String> {
        poisson()?;
        asymptotic_order()?;
        Ok(())
    }
}

pub mod qfchecks {
    use nearlift::bqf::*;
    use nearlift::poly::{rat, Rat};

    /// Independent Hurwitz class-number oracle: divisor-pair enumeration of
    /// reduced triples (a, b, c) with b² − 4ac = −n, −a < b ≤ a ≤ c (b ≥ 0
    /// when a = c), weighted 1/3 for (t,t,t) and 1/2 for (t,0,t).
    pub fn hurwitz_oracle(n: u64) -> Rat {
        if n == 0 {
            return rat(-1, 12);
        }
        let n = n as i64;
        let mut total = rat(0, 1);
        let mut b = -(isqrt(n));
        while b * b <= n {
            if (b * b + n) % 4 == 0 {
                let m = (b * b + n) / 4;
                let mut a = 1;
                while a * a <= m {
                    if m % a == 0 {
                        let c = m / a;
                        let ok = -a < b && b <= a && a <= c && !(a == c && b < 0);
                        if ok {
                            total += if a == b && b == c {
                                rat(1, 3)
                            } else if b == 0 && a == c {
                                rat(1, 2)
                            } else {
                                rat(1, 1)
                            };
                        }
                    }
                    a += 1;
                }
            }
            b += 1;
        }
        total
    }

    fn isqrt(n: i64) -> i64 {
        let mut r = (n as f64).sqrt() as i64 + 1;
        while r * r > n {
            r -= 1;
        }
        r
    }

    /// H(n) for n ≤ 200 matches the independent oracle exactly, with the
    /// printed anchor values.
    pub fn hurwitz_table() -> Result<(), String> {
        for n in 0u64..=200 {
            let got = hurwitz(n);
            let expect = hurwitz_oracle(n);
            if got != expect {
                return Err(format!("H({n}) = {got}, oracle {expect}"));
            }
        }
        if hurwitz(3) != rat(1, 3) || hurwitz(4) != rat(1, 2) || hurwitz(23) != rat(3, 1) {
            return Err("anchor values wrong".into());
        }
        Ok(())
    }

    /// Σ_{r² ≤ 4n} H(4n − r²) = Σ_{d|n} max(d, n/d), an independent identity
    /// tying the whole table together.
    pub fn hurwitz_convolution() -> Result<(), String> {
        for n in 1i64..=40 {
            let mut lhs = rat(0, 1);
            let mut r = -isqrt(4 * n);
            while r * r <= 4 * n {
                lhs += hurwitz((4 * n - r * r) as u64);
                r += 1;
            }
            let mut rhs = rat(0, 1);
            for d in 1..=n {
                if n % d == 0 {
                    rhs += rat(d.max(n / d), 1);
                }
            }
            if lhs != rhs {
                return Err(format!(
                    "Hurwitz convolution fails at n={n}: {lhs} vs {rhs}"
                ));
            }
        }
        Ok(())
    }

    /// Deterministic pseudo-random SL₂(ℤ) words in the generators.
    pub fn random_gamma(seed: u64) -> [[i64; 2]; 2] {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let mut m = [[1i64, 0], [0, 1]];
        let mul = |x: [[i64; 2]; 2], y: [[i64; 2]; 2]| {
            [
                [
                    x[0][0] * y[0][0] + x[0][1] * y[1][0],
                    x[0][0] * y[0][1] + x[0][1] * y[1][1],
                ],
                [
                    x[1][0] * y[0][0] + x[1][1] * y[1][0],
                    x[1][0] * y[0][1] + x[1][1] * y[1][1],
                ],
            ]
        };
        for _ in 0..6 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let k = ((state >> 33) % 5) as i64 - 2;
            m = mul(m, [[1, k], [0, 1]]);
            m = mul(m, [[0, -1], [1, 0]]);
        }
        m
    }

    /// Reducing any Γ-translate of a representative recovers the same class.
    pub fn reduction_idempotence() -> Result<(), String> {
        for d in [-3i64, -4, -15, -23, -47] {
            for f in class_reps(d).map_err(|e| e.to_string())? {
                if !f.is_positive_definite() {
                    continue;
                }
                for seed in 0..100u64 {
                    let moved = f.act(random_gamma(seed.wrapping_add(d as u64)));
                    let back = reduce_posdef(&moved).map_err(|e| e.to_string())?;
                    if back != f {
                        return Err(format!("reduction lost the class of {f:?} (seed {seed})"));
                    }
                }
            }
        }
        for d in [5i64, 8, 12, 21] {
            for f in class_reps(d).map_err(|e| e.to_string())? {
                for seed in 0..40u64 {
                    let moved = f.act(random_gamma(seed * 7 + 1));
                    let back = reduce_indefinite(&moved).map_err(|e| e.to_string())?;
                    // back must lie on the same rho-cycle as f
                    let mut g = f;
                    let mut found = false;
                    loop {
                        if g == back {
                            found = true;
                            break;
                        }
                        g = rho(&g);
                        if g == f {
                            break;
                        }
                    }
                    if !found {
                        return Err(format!("indefinite reduction left the cycle of {f:?}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// χ_Δ is a class function and flips sign under f ↦ −f.
    pub fn genus_char_properties() -> Result<(), String> {
        for delta in [-3i64, -4, -7, -8] {
            for dcap in -30i64..=30 {
                // D must itself be a discriminant coprime to Δ.
                if dcap == 0 || dcap.rem_euclid(4) > 1 || num::integer::gcd(dcap, delta) != 1 {
                    continue;
                }
                let d = delta * dcap;
                let Ok(reps) = class_reps(d) else { continue };
                for f in reps {
                    let chi = genus_char(delta, &f).map_err(|e| e.to_string())?;
                    for seed in 0..20u64 {
                        let moved = f.act(random_gamma(seed * 13 + 5));
                        let chi2 = genus_char(delta, &moved).map_err(|e| e.to_string())?;
                        if chi != chi2 {
                            return Err(format!(
                                "chi_{delta} not a class function on {f:?} (got {chi} vs {chi2})"
                            ));
                        }
                    }
                    let chi_neg = genus_char(delta, &f.neg()).map_err(|e| e.to_string())?;
                    if chi_neg != -chi {
                        return Err(format!(
                            "chi_{delta}(−f) != −chi_{delta}(f) for {f:?}: {chi_neg} vs {chi}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn run_all() -> Result<(), String> {
        hurwitz_table()?;
        hurwitz_convolution()?;
        reduction_idempotence()?;
        genus_char_properties()?;
        Ok(())
    }
}

pub mod modchecks {
    use num::complex::Complex64;
    use std::f64::consts::PI;

    use nearlift::modular::{moebius, Coeff, NearlyHolForm};

    /// Deterministic point in the upper half-plane with Im z ∈ [0.2, 2].
    fn random_point(seed: u64) -> Complex64 {
        let mut state = seed
            .wrapping_mul(0x9e3779b97f4a7c15)
            .wrapping_add(0xd1b54a32d192ed03);
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let x = next() - 0.5;
        let y = 0.2 + 1.8 * next();
        Complex64::new(x, y)
    }

    /// The five workhorse forms: j, J, E₂*, J·E₂*, (π/3·E₂*)².
    fn test_suite(order: i64) -> Result<Vec<NearlyHolForm>, String> {
        let j = NearlyHolForm::j_invariant(order).map_err(|e| e.to_string())?;
        let jn = NearlyHolForm::j_normalized(order).map_err(|e| e.to_string())?;
        let e2 = NearlyHolForm::e2_star(order);
        let je2 = jn.multiply(&e2);
        let pe2 = e2.scale(&Coeff::Float(PI / 3.0)).power(2);
        Ok(vec![j, jn, e2, je2, pe2])
    }

    /// Modularity: |f(γz) − (cz+d)^{2k} f(z)| < 1e−7 for 20 random (γ, z)
    /// pairs per form, Im z ∈ [0.2, 2].
    pub fn modularity_residuals() -> Result<(), String> {
        for (fi, f) in test_suite(48)?.iter().enumerate() {
            for trial in 0..20u64 {
                let seed = fi as u64 * 1000 + trial;
                let gamma = super::qfchecks::random_gamma(seed.wrapping_add(17));
                let z = random_point(seed);
                let gz = moebius(gamma, z);
                let lhs = f.evaluate(gz, 1e-10).map_err(|e| e.to_string())?;
                let jfac = Complex64::new(gamma[1][0] as f64, 0.0) * z + gamma[1][1] as f64;
                let rhs = jfac.powi(f.weight() as i32)
                    * f.evaluate(z, 1e-10).map_err(|e| e.to_string())?;
                // Scale by the value's magnitude: j reaches ~e^{2πy} at
                // points reducing to large height, where one ulp of the
                // reduced point already exceeds an absolute 1e−7.
                let resid = (lhs - rhs).norm() / (1.0 + lhs.norm());
                if resid >= 1e-7 {
                    return Err(format!(
                        "modularity residual {resid:.3e} for form #{fi} at z = {z}, gamma = {gamma:?}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Layer-by-layer identity for the weight-κ Laplacian: composing the
    /// lowering and raising operators must reproduce the direct layer action
    /// (Δ_κ f)_l(n) = −4πn(l+1) f_{l+1}(n) + l(κ−1−l) f_l(n)
    /// exactly, for forms of depth up to 3.
    pub fn laplacian_layer_identity() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(24);
        let jn = NearlyHolForm::j_normalized(24).map_err(|e| e.to_string())?;
        let forms = [e2.clone(), e2.power(2), e2.power(3), jn.multiply(&e2)];
        for (fi, f) in forms.iter().enumerate() {
            if f.depth() > 3 {
                return Err(format!("test form #{fi} exceeds depth 3"));
            }
            let lap = f.laplacian();
            let kappa = f.weight();
            for l in 0..=f.depth() + 1 {
                for n in -2..=f.order() {
                    let direct =
                        -4.0 * PI * n as f64 * (l as f64 + 1.0) * f.coeff(n, l + 1).to_f64()
                            + (l as i64 * (kappa - 1 - l as i64)) as f64 * f.coeff(n, l).to_f64();
                    let got = lap.coeff(n, l).to_f64();
                    if (got - direct).abs() > 1e-12 * (1.0 + direct.abs()) {
                        return Err(format!(
                            "Laplacian layer mismatch for form #{fi} at (n, l) = ({n}, {l}): \
                             composed {got:.17e}, direct {direct:.17e}"
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Finite-difference oracle for the weight-κ hyperbolic Laplacian
    /// Δ_κ = −y²(∂²_x + ∂²_y) + iκy(∂_x + i∂_y), checked pointwise against
    /// the layer-operator composition at z = 0.1 + i.
    pub fn laplacian_fd_oracle() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(48);
        let forms = [e2.clone(), e2.power(2)];
        let z = Complex64::new(0.1, 1.0);
        for (fi, f) in forms.iter().enumerate() {
            let eval = |w: Complex64| f.evaluate(w, 1e-13).map_err(|e| e.to_string());
            // Richardson-extrapolated central second differences.
            let second = |dir: Complex64| -> Result<Complex64, String> {
                let d = |h: f64| -> Result<Complex64, String> {
                    Ok((eval(z + dir * h)? - eval(z)? * 2.0 + eval(z - dir * h)?) / (h * h))
                };
                let h = 1e-3;
                Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
            };
            let first = |dir: Complex64| -> Result<Complex64, String> {
                let d = |h: f64| -> Result<Complex64, String> {
                    Ok((eval(z + dir * h)? - eval(z - dir * h)?) / (2.0 * h))
                };
                let h = 1e-4;
                Ok((d(h / 2.0)? * 4.0 - d(h)?) / 3.0)
            };
            let ex = Complex64::new(1.0, 0.0);
            let ey = Complex64::new(0.0, 1.0);
            let y = z.im;
            let kappa = f.weight() as f64;
            let fd = -(second(ex)? + second(ey)?) * y * y
                + Complex64::new(0.0, kappa * y)
                    * (first(ex)? + Complex64::new(0.0, 1.0) * first(ey)?);
            let sym = f
                .laplacian()
                .evaluate(z, 1e-13)
                .map_err(|e| e.to_string())?;
            let resid = (fd - sym).norm();
            if resid >= 1e-6 {
                return Err(format!(
                    "Laplacian FD mismatch for form #{fi}: finite differences {fd}, layer operator {sym}"
                ));
            }
        }
        Ok(())
    }

    /// The lowering operator removes exactly one layer of depth.
    pub fn lowering_depth_bookkeeping() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(16);
        let mut f = e2.power(3);
        let mut depth = f.depth();
        if depth != 3 {
            return Err(format!(
                "cube of a depth-1 form should have depth 3, got {depth}"
            ));
        }
        while depth > 0 {
            let low = f.lower();
            if low.depth() != depth - 1 || low.weight() != f.weight() - 2 {
                return Err(format!(
                    "lowering from depth {depth}: got depth {}, weight {} (want {}, {})",
                    low.depth(),
                    low.weight(),
                    depth - 1,
                    f.weight() - 2
                ));
            }
            f = low;
            depth -= 1;
        }
        if !f.lower().is_zero() {
            return Err("lowering a depth-0 form should annihilate it".into());
        }
        Ok(())
    }

    pub fn run_all() -> Result<(), String> {
        modularity_residuals()?;
        laplacian_layer_identity()?;
        laplacian_fd_oracle()?;
        lowering_depth_bookkeeping()?;
        Ok(())
    }
}

pub mod tracechecks {
    use nearlift::bqf::{class_reps, hurwitz};
    use nearlift::modular::NearlyHolForm;
    use nearlift::poly::rat_to_f64;
    use nearlift::trace::{cycle_integral, trace_cm, trace_cycle, trace_square, twisted_trace};

    /// CM-value traces of the normalized hauptmodul J = j − 744:
    /// Tr_{−3}(J) = −248 and Tr_{−4}(J) = 492 within 1e−6, plus the
    /// stabilizer bookkeeping example Tr_{−3}(1) = 2/6 = 1/3.
    pub fn cm_value_examples() -> Result<(), String> {
        let jn = NearlyHolForm::j_normalized(48).map_err(|e| e.to_string())?;
        for (d, want) in [(-3i64, -248.0), (-4, 492.0)] {
            let t = trace_cm(&jn, d).map_err(|e| e.to_string())?;
            if (t.value - want).abs() >= 1e-6 {
                return Err(format!("CM trace at {d}: got {:.12}, want {want}", t.value));
            }
        }
        let one = NearlyHolForm::constant(nearlift::modular::Coeff::int(1), 48);
        let t = trace_cm(&one, -3).map_err(|e| e.to_string())?;
        if (t.value - 1.0 / 3.0).abs() >= 1e-12 {
            return Err(format!(
                "CM trace of 1 at -3: got {:.15}, want 1/3",
                t.value
            ));
        }
        Ok(())
    }

    /// Twisted cycle integrals of E₂* against the class-number product:
    /// Tr_{Δ,D}(E₂*) = −12·H(−Δ)·H(−D) within 1e−5 for every coprime
    /// ordered pair from {−3, −4, −7, −8} (all fundamental).
    pub fn twisted_class_number_products() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(48);
        let grid = [-3i64, -4, -7, -8];
        for &delta in &grid {
            for &dd in &grid {
                if num::integer::gcd(delta, dd) != 1 {
                    continue;
                }
                let want = -12.0
                    * rat_to_f64(&hurwitz((-delta) as u64))
                    * rat_to_f64(&hurwitz((-dd) as u64));
                let t = twisted_trace(&e2, delta, dd, 8.0, 64).map_err(|e| e.to_string())?;
                if (t.value - want).abs() >= 1e-5 {
                    return Err(format!(
                        "twisted trace ({delta}, {dd}): got {:.10} ± {:.2e}, want {want}",
                        t.value, t.err
                    ));
                }
            }
        }
        Ok(())
    }

    /// Regularized split-geodesic traces are stable in the cutoff: for the
    /// square product ΔD = 16 from (Δ, D) = (−4, −4), and for both E₂* and
    /// J·E₂*, the values at T ∈ {4, 8, 16} agree within 3 times the
    /// reported error.
    pub fn square_pair_cutoff_stability() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(64);
        let je2 = NearlyHolForm::j_normalized(64)
            .map_err(|e| e.to_string())?
            .multiply(&e2);
        for (name, f) in [("E2*", &e2), ("J*E2*", &je2)] {
            let vals: Vec<_> = [4.0, 8.0, 16.0]
                .iter()
                .map(|&t_cut| twisted_trace(f, -4, -4, t_cut, 64).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            for pair in vals.windows(2) {
                let tol = 3.0 * (pair[0].err + pair[1].err) + 1e-12;
                if (pair[0].value - pair[1].value).abs() > tol {
                    return Err(format!(
                        "{name}: cutoff instability {:.12} vs {:.12} (tol {tol:.2e})",
                        pair[0].value, pair[1].value
                    ));
                }
            }
        }
        Ok(())
    }

    /// Node-doubling convergence of the closed-geodesic quadrature: the
    /// reported error of Tr_d(E₂*) stays below 1e−9 for every nonsquare
    /// discriminant d ≤ 40.
    pub fn cycle_node_doubling() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(48);
        for d in (1..=40i64).filter(|d| d.rem_euclid(4) <= 1) {
            let r = (d as f64).sqrt().round() as i64;
            if r * r == d {
                continue;
            }
            let t = trace_cycle(&e2, d, 64).map_err(|e| e.to_string())?;
            if t.err >= 1e-9 {
                return Err(format!("node-doubling error {:.3e} at d = {d}", t.err));
            }
        }
        Ok(())
    }

    /// The cycle integral is a class function: replacing a representative by
    /// a random SL₂(ℤ)-translate changes the value by < 1e−10.
    pub fn class_function_consistency() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(48);
        for d in [5i64, 12, 13, 21] {
            for (ci, form) in class_reps(d).map_err(|e| e.to_string())?.iter().enumerate() {
                let base = cycle_integral(&e2, form, 96).map_err(|e| e.to_string())?;
                let gamma = super::qfchecks::random_gamma(d as u64 * 31 + ci as u64);
                let moved = cycle_integral(&e2, &form.act(gamma), 96).map_err(|e| e.to_string())?;
                if (base - moved).norm() >= 1e-10 {
                    return Err(format!(
                        "class-function violation at d = {d}, class #{ci}: {base} vs {moved}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Reversing the geodesic orientation (λ ↦ −λ) negates the weight-2
    /// cycle integral.
    pub fn orientation_flip_negates() -> Result<(), String> {
        let e2 = NearlyHolForm::e2_star(48);
        for form in class_reps(12).map_err(|e| e.to_string())? {
            let plus = cycle_integral(&e2, &form, 96).map_err(|e| e.to_string())?;
            let minus = cycle_integral(&e2, &form.neg(), 96).map_err(|e| e.to_string())?;
            if (plus + minus).norm() >= 1e-9 {
                return Err(format!("orientation flip: {plus} + {minus} != 0"));
            }
        }
        Ok(())
    }

    /// The regularized square-index trace does not depend on the declared
    /// cutoff (here for J at d = 1, where the principal part is nontrivial).
    pub fn square_trace_cutoff_free() -> Result<(), String> {
        let jn = NearlyHolForm::j_normalized(64).map_err(|e| e.to_string())?;
        let a = trace_square(&jn, 1, 4.0, 64).map_err(|e| e.to_string())?;
        let b = trace_square(&jn, 1, 16.0, 64).map_err(|e| e.to_string())?;
        let tol = 3.0 * (a.err + b.err) + 1e-12;
        if (a.value - b.value).abs() > tol {
            return Err(format!(
                "square trace cutoff dependence: {:.12} vs {:.12}",
                a.value, b.value
            ));
        }
        Ok(())
    }

    pub fn run_all() -> Result<(), String> {
        cm_value_examples()?;
        twisted_class_number_products()?;
        square_pair_cutoff_stability()?;
        cycle_node_doubling()?;
        class_function_consistency()?;
        orientation_flip_negates()?;
        square_trace_cutoff_free()?;
        Ok(())
    }
}

pub mod liftchecks {
    use std::collections::BTreeMap;

    use nearlift::lift::{
        lift_e2k, lift_families, lift_jE2, lower_check, theta_oracle, xi_shadow, LiftExpansion,
        LiftKind,
    };
    use nearlift::modular::{Coeff, NearlyHolForm};
    use nearlift::trace::trace_cycle;

    fn build_twisted() -> Result<LiftExpansion, String> {
        lift_jE2(-3, 12, 64, 8.0).map_err(|e| e.to_string())
    }

    /// Structure of the twisted weight-3/2 lift of J·E₂* at Δ = −3: the
    /// constant term is exactly 48, nothing is supported at d ∈ {1, 2}, and
    /// the ξ-shadow is (3/2π)(q^{−3} + 26752·q⁴ + 1707264·q⁸ + 44330496·q¹² + …),
    /// whose positive coefficients are the classical singular-moduli traces.
    pub fn twisted_lift_structure() -> Result<(), String> {
        let lift = build_twisted()?;
        let const_term = lift
            .terms
            .iter()
            .find(|t| t.d == 0 && t.kind == LiftKind::Const)
            .ok_or("missing constant term")?;
        if (const_term.coeff_re - 48.0).abs() >= 1e-9 {
            return Err(format!(
                "constant term {:.12}, want 48",
                const_term.coeff_re
            ));
        }
        for t in &lift.terms {
            if t.d == 1 || t.d == 2 {
                return Err(format!("unexpected support at d = {}", t.d));
            }
        }
        let shadow = xi_shadow(&lift).map_err(|e| e.to_string())?;
        let lookup = |d: i64| -> Result<f64, String> {
            shadow
                .iter()
                .find(|(e, _)| *e == d)
                .map(|&(_, c)| c)
                .ok_or_else(|| format!("shadow misses exponent {d}"))
        };
        let unit = 3.0 / (2.0 * std::f64::consts::PI);
        if (lookup(-3)? - unit).abs() >= 1e-12 {
            return Err(format!(
                "shadow principal coefficient {:.15}, want 3/2π",
                lookup(-3)?
            ));
        }
        for (d, want) in [(4i64, 26752.0), (8, 1707264.0), (12, 44330496.0)] {
            let got = lookup(d)? / unit;
            if (got - want).abs() >= 1e-6 * want {
                return Err(format!("shadow trace at q^{d}: got {got:.6}, want {want}"));
            }
        }
        Ok(())
    }

    /// Every emitted exponent d obeys the parity law (−1)^k·d ≡ 0, 1 mod 4
    /// of the plus space of weight k + 1/2, both for the twisted k = 1 lift
    /// and for the k = 2 Eisenstein-square family.
    pub fn support_parity() -> Result<(), String> {
        let twisted = build_twisted()?;
        let square = lift_e2k(2, 8, 64, 8.0).map_err(|e| e.to_string())?;
        for lift in [&twisted, &square] {
            let sign = if lift.k % 2 == 0 { 1 } else { -1 };
            for t in &lift.terms {
                if (sign * t.d).rem_euclid(4) > 1 {
                    return Err(format!(
                        "k = {}: exponent {} violates the plus-space parity",
                        lift.k, t.d
                    ));
                }
            }
        }
        Ok(())
    }

    /// A lift built from real trace data survives a JSON round trip exactly.
    pub fn json_round_trip() -> Result<(), String> {
        let lift = build_twisted()?;
        let text = lift.to_json().map_err(|e| e.to_string())?;
        let back = LiftExpansion::from_json(&text).map_err(|e| e.to_string())?;
        if back != lift {
            return Err("JSON round trip changed the expansion".into());
        }
        Ok(())
    }

    /// The Siegel theta kernel reproduces the closed-geodesic trace at the
    /// nonsquare index m = 5 (discriminant 20) within 1e−3, for both the
    /// constant function and the normalized hauptmodul.
    pub fn theta_oracle_agreement() -> Result<(), String> {
        let one = NearlyHolForm::constant(Coeff::int(1), 48);
        let jn = NearlyHolForm::j_normalized(64).map_err(|e| e.to_string())?;
        for (name, f) in [("1", &one), ("J", &jn)] {
            let direct = trace_cycle(f, 20, 96).map_err(|e| e.to_string())?;
            let theta = theta_oracle(f, 5, 1.0, 7.0, 48, 1e-3).map_err(|e| e.to_string())?;
            let diff = (theta.value - direct.value).abs();
            if diff >= 1e-3 {
                return Err(format!(
                    "theta kernel vs geodesic trace for {name}: {:.10} vs {:.10} (diff {diff:.3e})",
                    theta.value, direct.value
                ));
            }
        }
        Ok(())
    }

    /// Applying the symbolic lowering rules to the k = 2 Eisenstein-square
    /// lift matches a finite-difference lowering of its evaluation to
    /// better than 1e−5 across sample points.
    pub fn lowering_finite_difference() -> Result<(), String> {
        let lift = lift_e2k(2, 8, 64, 8.0).map_err(|e| e.to_string())?;
        let worst = lower_check(&lift).map_err(|e| e.to_string())?;
        if worst >= 1e-5 {
            return Err(format!("lowering deviation {worst:.3e} exceeds 1e-5"));
        }
        Ok(())
    }

    /// The generic family assembler applied to (π/3·E₂*)² reproduces the
    /// dedicated k = 2 Eisenstein-square lift term by term, scaled by
    /// k! = 2, on every shared shape. The log- and I-shapes of the dedicated
    /// lift come from the nonzero layer-2 constant term, which the generic
    /// families exclude by hypothesis, so they have no generic counterpart.
    pub fn factorial_scaling_of_square() -> Result<(), String> {
        let e2k = lift_e2k(2, 8, 64, 8.0).map_err(|e| e.to_string())?;
        let base = NearlyHolForm::e2_star(64).scale(&Coeff::Float(std::f64::consts::PI / 3.0));
        let fams = lift_families(&base.power(2), 8, 64, 8.0).map_err(|e| e.to_string())?;

        let key = |d: i64, kind: LiftKind, params: &[f64]| format!("{d} {kind:?} {params:?}");
        let mut table: BTreeMap<String, f64> = fams
            .iter()
            .map(|t| (key(t.d, t.kind, &t.params), t.coeff_re))
            .collect();
        if table.len() != fams.len() {
            return Err("duplicate (d, shape, params) in the generic families".into());
        }
        for t in &e2k.terms {
            if matches!(t.kind, LiftKind::LogShape | LiftKind::IShape) {
                continue;
            }
            let k = key(t.d, t.kind, &t.params);
            let got = table
                .remove(&k)
                .ok_or_else(|| format!("generic lift misses {k}"))?;
            let want = 2.0 * t.coeff_re;
            if (got - want).abs() >= 1e-9 * (1.0 + want.abs()) {
                return Err(format!(
                    "{k}: generic {got:.12e} vs 2x dedicated {want:.12e}"
                ));
            }
        }
        if let Some((k, _)) = table.into_iter().next() {
            return Err(format!("generic lift has an unmatched term {k}"));
        }
        Ok(())
    }

    pub fn run_all() -> Result<(), String> {
        twisted_lift_structure()?;
        support_parity()?;
        json_round_trip()?;
        theta_oracle_agreement()?;
        lowering_finite_difference()?;
        factorial_scaling_of_square()?;
        Ok(())
    }
}
