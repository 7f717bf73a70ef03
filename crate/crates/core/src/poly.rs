//! Exact rational polynomial families.
//!
//! This module provides:
//! - [`Poly`] / [`BiPoly`]: dense univariate/bivariate polynomials over ℚ.
//! - The probabilists' Hermite polynomials He_n and the Appell pair (P_ν, Q_ν)
//!   defined by P_0 = 1, Q_0 = 0 and the recursion P_ν' = P_{ν−1},
//!   P_ν + Q_ν' − ξQ_ν = Q_{ν−1}, extended to negative indices by P_ν = 0 and
//!   Q_ν = (−1)^{1−ν} He_{−1−ν}.
//! - Their real "imaginary-axis" modifications P̃_ν(η) = i^ν P_ν(iη),
//!   Q̃_ν(η) = i^{ν−1} Q_ν(iη).
//! - The bivariate combinations Π_l(ξ,ζ) = Σ_ν (−1)^ν (ξ+ζ)^{l−ν} Q_ν(ξ)/(l−ν)!
//!   and the ω-divisible shift Π̃_l(ω,ζ) = Π_l(ω−ζ,ζ) + Q_l(ζ).
//! - The logarithmic-correction polynomials Ω_l, Ω̃_k and the integral
//!   polynomials E_l (computed by their defining recurrence).
//! - Bernoulli polynomials/numbers and harmonic numbers.
//!
//! Everything here is exact; floating evaluation lives in [`crate::special`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{LazyLock, Mutex};

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Exact conversion of a rational to binary64 (sufficient for the coefficient
/// sizes arising at the indices this project uses).
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
}

// ---------------------------------------------------------------------------
// Univariate polynomials
// ---------------------------------------------------------------------------

/// Dense univariate polynomial with exact rational coefficients.
///
/// Invariant: the highest-degree stored coefficient is nonzero unless the
/// polynomial is zero (empty coefficient vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// The constant polynomial `c`.
    pub fn constant(c: Rat) -> Self {
        Poly { coeffs: vec![c] }.normalized()
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly {
            coeffs: vec![Rat::zero(), Rat::one()],
        }
    }

    /// Build from coefficients indexed by degree (trailing zeros trimmed).
    pub fn from_coeffs(coeffs: Vec<Rat>) -> Self {
        Poly { coeffs }.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        self
    }

    /// `true` for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// Coefficients indexed by degree.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64, 1))
                .collect(),
        }
    }

    /// Multiply by `x^n`.
    pub fn mul_xpow(&self, n: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); n];
        coeffs.extend(self.coeffs.iter().cloned());
        Poly { coeffs }
    }

    /// Exact evaluation at a rational point (Horner).
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Floating evaluation at a real point (Horner).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// Substitute `x ↦ a·x` for a rational `a`.
    pub fn compose_scale(&self, a: &Rat) -> Self {
        let mut pow = Rat::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * &pow;
                pow = &pow * a;
                out
            })
            .collect();
        Poly { coeffs }.normalized()
    }

    /// Substitute `x ↦ x + a` for a rational `a` (Taylor shift).
    pub fn compose_shift(&self, a: &Rat) -> Self {
        let mut out = Poly::zero();
        // Horner in (x + a).
        let shift = Poly::from_coeffs(vec![a.clone(), Rat::one()]);
        for c in self.coeffs.iter().rev() {
            out = &(&out * &shift) + &Poly::constant(c.clone());
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Poly { coeffs }.normalized()
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect();
        Poly { coeffs }.normalized()
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly { coeffs }.normalized()
    }
}

impl fmt::Display for Poly {
    /// Render as e.g. `1/2*x^2 + 1/2`, `x^3 - 3*x`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{}", mag)?;
            }
            if i > 0 {
                if !unit_coeff {
                    write!(f, "*")?;
                }
                write!(f, "x")?;
                if i > 1 {
                    write!(f, "^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Bivariate polynomials
// ---------------------------------------------------------------------------

/// Dense bivariate polynomial over ℚ; `coeffs[i][j]` multiplies `x^i z^j`.
///
/// Invariant: no all-zero trailing row or column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    coeffs: Vec<Vec<Rat>>,
}

impl fmt::Display for BiPoly {
    /// Render as e.g. `x^2*z - 1/2*x*z^3 + 2`, highest x-power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            for j in (0..self.coeffs[i].len()).rev() {
                let c = &self.coeffs[i][j];
                if c.is_zero() {
                    continue;
                }
                let mag = c.abs();
                if first {
                    if c.is_negative() {
                        write!(f, "-")?;
                    }
                    first = false;
                } else if c.is_negative() {
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
                let unit_coeff = mag.is_one() && (i > 0 || j > 0);
                if !unit_coeff {
                    write!(f, "{}", mag)?;
                }
                let mut star = !unit_coeff;
                for (var, pow) in [("x", i), ("z", j)] {
                    if pow == 0 {
                        continue;
                    }
                    if star {
                        write!(f, "*")?;
                    }
                    star = true;
                    write!(f, "{var}")?;
                    if pow > 1 {
                        write!(f, "^{pow}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl BiPoly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    /// Embed a univariate polynomial in the first variable.
    pub fn from_poly_in_x(p: &Poly) -> Self {
        BiPoly {
            coeffs: p.coeffs().iter().map(|c| vec![c.clone()]).collect(),
        }
        .normalized()
    }

    /// Embed a univariate polynomial in the second variable.
    pub fn from_poly_in_z(p: &Poly) -> Self {
        if p.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            coeffs: vec![p.coeffs().to_vec()],
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        for row in &mut self.coeffs {
            while row.last().is_some_and(|c| c.is_zero()) {
                row.pop();
            }
        }
        while self.coeffs.last().is_some_and(|row| row.is_empty()) {
            self.coeffs.pop();
        }
        self
    }

    /// `true` for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|row| row.is_empty())
    }

    /// Coefficient of `x^i z^j`.
    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.coeffs
            .get(i)
            .and_then(|row| row.get(j))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    fn add_assign_term(coeffs: &mut Vec<Vec<Rat>>, i: usize, j: usize, c: Rat) {
        if c.is_zero() {
            return;
        }
        if coeffs.len() <= i {
            coeffs.resize(i + 1, Vec::new());
        }
        if coeffs[i].len() <= j {
            coeffs[i].resize(j + 1, Rat::zero());
        }
        coeffs[i][j] += c;
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return BiPoly::zero();
        }
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| row.iter().map(|a| a * c).collect())
                .collect(),
        }
    }

    /// Partial derivative in the second variable.
    pub fn derivative_z(&self) -> Self {
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(j, c)| c * rat(j as i64, 1))
                        .collect()
                })
                .collect(),
        }
        .normalized()
    }

    /// Partial derivative in the first variable.
    pub fn derivative_x(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return BiPoly::zero();
        }
        BiPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, row)| row.iter().map(|c| c * rat(i as i64, 1)).collect())
                .collect(),
        }
        .normalized()
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Rat, z: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut xpow = Rat::one();
        for row in &self.coeffs {
            let mut inner = Rat::zero();
            for c in row.iter().rev() {
                inner = inner * z + c;
            }
            acc += inner * &xpow;
            xpow = &xpow * x;
        }
        acc
    }

    /// Floating evaluation at a real point.
    pub fn eval_f64(&self, x: f64, z: f64) -> f64 {
        let mut acc = 0.0;
        let mut xpow = 1.0;
        for row in &self.coeffs {
            let mut inner = 0.0;
            for c in row.iter().rev() {
                inner = inner * z + rat_to_f64(c);
            }
            acc += inner * xpow;
            xpow *= x;
        }
        acc
    }

    /// Partial evaluation: fix the first variable, leaving a polynomial in z.
    pub fn eval_x(&self, x: &Rat) -> Poly {
        let mut out = Poly::zero();
        let mut xpow = Rat::one();
        for row in &self.coeffs {
            let p = Poly::from_coeffs(row.clone()).scale(&xpow);
            out = &out + &p;
            xpow = &xpow * x;
        }
        out
    }

    /// Substitute `x ↦ x − z`, i.e. return `q(x, z) = p(x − z, z)`.
    pub fn subst_x_minus_z(&self) -> Self {
        let mut coeffs: Vec<Vec<Rat>> = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            // (x − z)^i = Σ_a C(i,a) x^{i−a} (−z)^a
            let binoms = binomial_row(i);
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (a, b) in binoms.iter().enumerate() {
                    let sign = if a % 2 == 0 { Rat::one() } else { -Rat::one() };
                    Self::add_assign_term(&mut coeffs, i - a, j + a, c * b * sign);
                }
            }
        }
        BiPoly { coeffs }.normalized()
    }

    /// Exact division by the first variable; errors if not divisible.
    pub fn div_x(&self) -> crate::Result<Self> {
        if !self.coeffs.is_empty() && !self.coeffs[0].is_empty() {
            return Err(crate::Error::Domain(
                "bivariate polynomial is not divisible by its first variable".into(),
            ));
        }
        if self.is_zero() {
            return Ok(BiPoly::zero());
        }
        Ok(BiPoly {
            coeffs: self.coeffs[1..].to_vec(),
        }
        .normalized())
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut coeffs = self.coeffs.clone();
        for (i, row) in rhs.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                BiPoly::add_assign_term(&mut coeffs, i, j, c.clone());
            }
        }
        BiPoly { coeffs }.normalized()
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        self + &rhs.scale(&-Rat::one())
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut coeffs: Vec<Vec<Rat>> = Vec::new();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, rrow) in rhs.coeffs.iter().enumerate() {
                    for (l, b) in rrow.iter().enumerate() {
                        BiPoly::add_assign_term(&mut coeffs, i + k, j + l, a * b);
                    }
                }
            }
        }
        BiPoly { coeffs }.normalized()
    }
}

/// Row `n` of Pascal's triangle as exact rationals.
fn binomial_row(n: usize) -> Vec<Rat> {
    let mut row = vec![Rat::one()];
    for k in 0..n {
        let next = &row[k] * rat((n - k) as i64, 1) / rat(k as i64 + 1, 1);
        row.push(next);
    }
    row
}

/// Exact factorial.
pub fn factorial(n: usize) -> Rat {
    let mut acc = Rat::one();
    for i in 2..=n {
        acc = acc * rat(i as i64, 1);
    }
    acc
}

/// Harmonic number H_n = Σ_{j=1}^n 1/j.
pub fn harmonic(n: usize) -> Rat {
    let mut acc = Rat::zero();
    for j in 1..=n {
        acc += rat(1, j as i64);
    }
    acc
}

// ---------------------------------------------------------------------------
// Memoized families
// ---------------------------------------------------------------------------

/// A memoized ascending family of polynomials: `table[n]` is the n-th member.
/// Entries are fully constructed before publication (mutex-guarded).
struct Family {
    table: Mutex<Vec<Poly>>,
    rule: fn(&[Poly], usize) -> Poly,
}

impl Family {
    const fn new(rule: fn(&[Poly], usize) -> Poly) -> Self {
        Family {
            table: Mutex::new(Vec::new()),
            rule,
        }
    }

    fn get(&self, n: usize) -> Poly {
        let mut table = self.table.lock().unwrap();
        while table.len() <= n {
            let next = (self.rule)(&table, table.len());
            table.push(next);
        }
        table[n].clone()
    }
}

static HERMITE: LazyLock<Family> = LazyLock::new(|| {
    Family::new(|table, n| match n {
        0 => Poly::constant(Rat::one()),
        1 => Poly::x(),
        _ => {
            // He_n = x·He_{n−1} − (n−1)·He_{n−2}
            let a = &Poly::x() * &table[n - 1];
            &a - &table[n - 2].scale(&rat(n as i64 - 1, 1))
        }
    })
});

static P_FAMILY: LazyLock<Family> = LazyLock::new(|| {
    Family::new(|_, n| {
        // P_n(x) = Σ_a x^{n−2a} / (a! (n−2a)! 2^a)
        let mut coeffs = vec![Rat::zero(); n + 1];
        let mut a = 0usize;
        while 2 * a <= n {
            let denom = factorial(a) * factorial(n - 2 * a) * rat(1, 1) * pow2(a);
            coeffs[n - 2 * a] = Rat::one() / denom;
            a += 1;
        }
        Poly::from_coeffs(coeffs)
    })
});

fn pow2(a: usize) -> Rat {
    let mut acc = Rat::one();
    for _ in 0..a {
        acc = acc * rat(2, 1);
    }
    acc
}

static Q_FAMILY: LazyLock<Family> = LazyLock::new(|| {
    Family::new(|_, n| {
        // Q_0 = 0; Q_n = Σ_a (n−1−a)!/n! · P_{n−1−2a}, a ≤ (n−1)/2
        if n == 0 {
            return Poly::zero();
        }
        let mut acc = Poly::zero();
        let nfact = factorial(n);
        let mut a = 0usize;
        while 2 * a <= n - 1 {
            let c = factorial(n - 1 - a) / nfact.clone();
            acc = &acc + &p_poly((n - 1 - 2 * a) as i64).scale(&c);
            a += 1;
        }
        acc
    })
});

static BERNOULLI_NUMBERS: LazyLock<Mutex<Vec<Rat>>> = LazyLock::new(|| Mutex::new(Vec::new()));

/// Probabilists' Hermite polynomial He_n.
pub fn hermite(n: usize) -> Poly {
    HERMITE.get(n)
}

/// The Appell-sequence polynomial P_ν: for ν ≥ 0 the Hermite-type sum
/// Σ_a ξ^{ν−2a}/(a!(ν−2a)!2^a); identically zero for ν ≤ −1.
pub fn p_poly(nu: i64) -> Poly {
    if nu < 0 {
        Poly::zero()
    } else {
        P_FAMILY.get(nu as usize)
    }
}

/// The companion polynomial Q_ν: Q_0 = 0, for ν ≥ 1 the sum
/// Σ_a (ν−1−a)!/ν!·P_{ν−1−2a}, and for ν ≤ −1 the Hermite continuation
/// (−1)^{1−ν} He_{−1−ν}.
pub fn q_poly(nu: i64) -> Poly {
    if nu >= 0 {
        Q_FAMILY.get(nu as usize)
    } else {
        let n = (-1 - nu) as usize;
        let sign = if (1 - nu) % 2 == 0 { 1 } else { -1 };
        hermite(n).scale(&rat(sign, 1))
    }
}

/// P_ν(0): 1/(2^{ν/2}(ν/2)!) for even ν ≥ 0, zero otherwise.
pub fn p_at_zero(nu: i64) -> Rat {
    if nu < 0 || nu % 2 != 0 {
        return Rat::zero();
    }
    let half = (nu / 2) as usize;
    Rat::one() / (pow2(half) * factorial(half))
}

/// Q_ν(0): ∏_{j=1}^{(ν−1)/2} 1/(2j+1) for odd ν ≥ 1 (and Q_1(0) = 1),
/// zero for even ν ≥ 0; for ν ≤ −1 the Hermite continuation value.
pub fn q_at_zero(nu: i64) -> Rat {
    q_poly(nu).eval(&Rat::zero())
}

/// The bivariate combination Π_l(ξ,ζ) = Σ_{ν=0}^{l} (−1)^ν (ξ+ζ)^{l−ν} Q_ν(ξ) / (l−ν)!.
pub fn pi_poly(l: usize) -> BiPoly {
    // (ξ+ζ)^m expanded once per power.
    let xi_plus_zeta = {
        let mut b = BiPoly::zero();
        BiPoly::add_assign_term(&mut b.coeffs, 1, 0, Rat::one());
        BiPoly::add_assign_term(&mut b.coeffs, 0, 1, Rat::one());
        b
    };
    let mut powers = vec![BiPoly::from_poly_in_x(&Poly::constant(Rat::one()))];
    for m in 1..=l {
        let next = &powers[m - 1] * &xi_plus_zeta;
        powers.push(next);
    }
    let mut acc = BiPoly::zero();
    for nu in 0..=l {
        let q = BiPoly::from_poly_in_x(&q_poly(nu as i64));
        let sign = if nu % 2 == 0 { Rat::one() } else { -Rat::one() };
        let c = sign / factorial(l - nu);
        acc = &acc + &(&powers[l - nu] * &q).scale(&c);
    }
    acc
}

/// Π̃_l(ω,ζ) = Π_l(ω−ζ,ζ) + Q_l(ζ), exactly divisible by ω (checked).
///
/// The first variable of the result is ω.
pub fn pi_tilde(l: usize) -> crate::Result<BiPoly> {
    let shifted = pi_poly(l).subst_x_minus_z();
    let sum = &shifted + &BiPoly::from_poly_in_z(&q_poly(l as i64));
    // Divisibility by ω is a structural theorem; failure signals a bug.
    let _ = sum.div_x()?;
    Ok(sum)
}

/// Ω_l(ζ) = (−1)^l Σ_{ν=1}^{l} P_ν(0) (H_l − H_{l−ν}) ζ^{l−ν} / (l−ν)!.
pub fn omega_poly(l: usize) -> Poly {
    let h_l = harmonic(l);
    let mut coeffs = vec![Rat::zero(); l + 1];
    for nu in 1..=l {
        let p0 = p_at_zero(nu as i64);
        if p0.is_zero() {
            continue;
        }
        let m = l - nu;
        coeffs[m] = p0 * (&h_l - harmonic(m)) / factorial(m);
    }
    let sign = if l % 2 == 0 { Rat::one() } else { -Rat::one() };
    Poly::from_coeffs(coeffs).scale(&sign)
}

/// Real twist i^{power}·p(i·x) of a polynomial whose monomial degrees are all
/// ≡ −power (mod 2), so the result is real.
fn twist(p: &Poly, power: i64) -> Poly {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            if c.is_zero() {
                return Rat::zero();
            }
            let e = power + m as i64;
            debug_assert!(e % 2 == 0, "twist parity violated");
            // i^e = ±1 for even e.
            if e.rem_euclid(4) == 0 {
                c.clone()
            } else {
                -c.clone()
            }
        })
        .collect();
    Poly::from_coeffs(coeffs)
}

/// Ω̃_k(η) = (−i)^k Ω_k(iη) (real by the parity of Ω_k).
pub fn omega_tilde(k: usize) -> Poly {
    twist(&omega_poly(k), -(k as i64))
}

/// The modified pair (P̃_ν, Q̃_ν) with P̃_ν(η) = i^ν P_ν(iη) and
/// Q̃_ν(η) = i^{ν−1} Q_ν(iη); both real by parity.
pub fn pq_modified(nu: i64) -> (Poly, Poly) {
    (twist(&p_poly(nu), nu), twist(&q_poly(nu), nu - 1))
}

/// E_l by the recurrence (l+1)E_{l+1} = ζE_l + E_{l−1} − P_{l−1}(ζ)/l with
/// E_0 = E_1 = 0; E_l(0) matches the closed form −P_l(0)·Σ_{odd a ≤ l} 1/a.
pub fn e_poly(l: usize) -> Poly {
    let mut e_prev = Poly::zero(); // E_0
    let mut e_cur = Poly::zero(); // E_1
    if l == 0 {
        return e_prev;
    }
    for m in 1..l {
        // E_{m+1} = (ζ·E_m + E_{m−1} − P_{m−1}/m) / (m+1)
        let num =
            &(&(&Poly::x() * &e_cur) + &e_prev) - &p_poly(m as i64 - 1).scale(&rat(1, m as i64));
        let next = num.scale(&rat(1, m as i64 + 1));
        e_prev = e_cur;
        e_cur = next;
    }
    e_cur
}

/// Bernoulli number B_μ (B_1 = −1/2).
pub fn bernoulli_number(mu: usize) -> Rat {
    let mut table = BERNOULLI_NUMBERS.lock().unwrap();
    while table.len() <= mu {
        let m = table.len();
        let b = if m == 0 {
            Rat::one()
        } else {
            // Σ_{j=0}^{m} C(m+1, j) B_j = 0
            let row = binomial_row(m + 1);
            let mut acc = Rat::zero();
            for (j, bj) in table.iter().enumerate() {
                acc += &row[j] * bj;
            }
            -acc / &row[m]
        };
        table.push(b);
    }
    table[mu].clone()
}

/// Bernoulli polynomial B_μ(ω) = Σ_j C(μ,j) B_j ω^{μ−j}, with B_μ(0) = B_μ.
pub fn bernoulli_poly(mu: usize) -> Poly {
    let row = binomial_row(mu);
    let mut coeffs = vec![Rat::zero(); mu + 1];
    for j in 0..=mu {
        coeffs[mu - j] = &row[j] * bernoulli_number(j);
    }
    Poly::from_coeffs(coeffs)
}
