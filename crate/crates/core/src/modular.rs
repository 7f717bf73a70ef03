//! Nearly holomorphic modular forms for SL₂(ℤ) as finite layer expansions
//! f(z) = Σ_{l=0}^{p} f_l(z) / y^l with q-series layers f_l.
//!
//! This module provides:
//! - [`Coeff`]: a coefficient that is either an exact rational or a binary64
//!   float, with explicit promotion (π-laden layers force floating mode).
//! - [`QSeries`]: truncated Fourier expansions Σ c(n) qⁿ with a tracked
//!   truncation order and exact convolution arithmetic.
//! - [`NearlyHolForm`]: weight-2k depth-p forms, the classical constructors
//!   (E₄, E₆, Δ, j, J = j − 744, E₂* = E₂ − 3/(πy), θ), products and powers,
//!   the lowering/raising operators L and R_κ, the weight-κ Laplacian
//!   Δ_κ = −R_{κ−2}∘L, and point evaluation by reduction into the standard
//!   fundamental domain with a certified geometric tail bound.
//! - JSON (de)serialization of both series and forms for CLI input of custom
//!   forms.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use num::complex::Complex64;
use num::{BigInt, One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::{rat_to_f64, Rat};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Coefficients: exact rationals with explicit promotion to floats
// ---------------------------------------------------------------------------

/// A Fourier coefficient: exact rational, or binary64 once a transcendental
/// constant (π, γ, …) enters. Arithmetic promotes to floating mode as soon as
/// either operand is floating.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoeffRepr", try_from = "CoeffRepr")]
pub enum Coeff {
    /// Exact rational coefficient.
    Exact(Rat),
    /// Floating coefficient (used when transcendental constants enter).
    Float(f64),
}

/// On-disk form of a coefficient: exact rationals travel as `"p/q"` strings
/// so that round-trips stay exact.
#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum CoeffRepr {
    Exact(String),
    Float(f64),
}

impl From<Coeff> for CoeffRepr {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Exact(r) => CoeffRepr::Exact(r.to_string()),
            Coeff::Float(x) => CoeffRepr::Float(x),
        }
    }
}

impl TryFrom<CoeffRepr> for Coeff {
    type Error = Error;
    fn try_from(r: CoeffRepr) -> Result<Self> {
        match r {
            CoeffRepr::Exact(s) => Rat::from_str(&s)
                .map(Coeff::Exact)
                .map_err(|e| Error::Precondition(format!("bad rational literal {s:?}: {e}"))),
            CoeffRepr::Float(x) => Ok(Coeff::Float(x)),
        }
    }
}

impl Coeff {
    /// The exact zero.
    pub fn zero() -> Self {
        Coeff::Exact(Rat::zero())
    }

    /// The exact integer `n`.
    pub fn int(n: i64) -> Self {
        Coeff::Exact(Rat::from(BigInt::from(n)))
    }

    /// True for an exact zero or a floating ±0.0.
    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Exact(r) => r.is_zero(),
            Coeff::Float(x) => *x == 0.0,
        }
    }

    /// Numeric value (exact conversion for rationals of the sizes used here).
    pub fn to_f64(&self) -> f64 {
        match self {
            Coeff::Exact(r) => rat_to_f64(r),
            Coeff::Float(x) => *x,
        }
    }

    /// Exact value if in exact mode.
    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Coeff::Exact(r) => Some(r),
            Coeff::Float(_) => None,
        }
    }

    fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a + b),
            _ => Coeff::Float(self.to_f64() + other.to_f64()),
        }
    }

    fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a * b),
            _ => Coeff::Float(self.to_f64() * other.to_f64()),
        }
    }

    fn div(&self, other: &Coeff) -> Result<Coeff> {
        if other.is_zero() {
            return Err(Error::Domain("division by zero coefficient".into()));
        }
        Ok(match (self, other) {
            (Coeff::Exact(a), Coeff::Exact(b)) => Coeff::Exact(a / b),
            _ => Coeff::Float(self.to_f64() / other.to_f64()),
        })
    }

    fn neg(&self) -> Coeff {
        match self {
            Coeff::Exact(r) => Coeff::Exact(-r),
            Coeff::Float(x) => Coeff::Float(-x),
        }
    }
}

// ---------------------------------------------------------------------------
// Truncated q-series
// ---------------------------------------------------------------------------

/// A truncated Fourier expansion Σ_n c(n) qⁿ. Coefficients are stored for a
/// finite set of exponents (possibly negative, for weakly holomorphic forms)
/// and are correct for every exponent `n ≤ order`; nothing is claimed above
/// the truncation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSeries {
    /// Exponent → coefficient map; zero coefficients are not stored.
    coeffs: BTreeMap<i64, Coeff>,
    /// Truncation order: coefficients are valid for exponents ≤ this.
    order: i64,
}

/// Default truncation order for the classical constructors.
pub const DEFAULT_ORDER: i64 = 64;

impl QSeries {
    /// The zero series at the given truncation order.
    pub fn zero(order: i64) -> Self {
        QSeries {
            coeffs: BTreeMap::new(),
            order,
        }
    }

    /// The constant series `c`.
    pub fn constant(c: Coeff, order: i64) -> Self {
        let mut s = QSeries::zero(order);
        s.set_coeff(0, c);
        s
    }

    /// The constant series 1.
    pub fn one(order: i64) -> Self {
        QSeries::constant(Coeff::int(1), order)
    }

    /// Truncation order.
    pub fn order(&self) -> i64 {
        self.order
    }

    /// Coefficient of qⁿ (exact zero if not stored).
    pub fn coeff(&self, n: i64) -> Coeff {
        self.coeffs.get(&n).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Numeric coefficient of qⁿ.
    pub fn coeff_f64(&self, n: i64) -> f64 {
        self.coeff(n).to_f64()
    }

    /// Set the coefficient of qⁿ (dropping stored zeros).
    pub fn set_coeff(&mut self, n: i64, c: Coeff) {
        if c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    /// True if no nonzero coefficient is stored.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Smallest exponent with nonzero coefficient (0 for the zero series).
    pub fn min_exponent(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(0)
    }

    /// Iterator over stored (exponent, coefficient) pairs in exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Coeff)> {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    /// Sum of two series; the result is valid up to the smaller order.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order.min(other.order);
        let mut out = QSeries::zero(order);
        for (n, c) in self.iter().chain(other.iter()) {
            if n <= order {
                out.set_coeff(n, out.coeff(n).add(c));
            }
        }
        out
    }

    /// Series scaled by a coefficient.
    pub fn scale(&self, c: &Coeff) -> QSeries {
        let mut out = QSeries::zero(self.order);
        for (n, v) in self.iter() {
            out.set_coeff(n, v.mul(c));
        }
        out
    }

    /// Negated series.
    pub fn neg(&self) -> QSeries {
        self.scale(&Coeff::int(-1))
    }

    /// Convolution product. With leading exponents m₁, m₂ and orders o₁, o₂,
    /// the coefficient at n is complete exactly when n ≤ min(o₁+m₂, o₂+m₁);
    /// the result's order records that.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = (self.order + other.min_exponent()).min(other.order + self.min_exponent());
        let mut out = QSeries::zero(order);
        for (a, ca) in self.iter() {
            for (b, cb) in other.iter() {
                let n = a + b;
                if n <= order {
                    out.set_coeff(n, out.coeff(n).add(&ca.mul(cb)));
                }
            }
        }
        out
    }

    /// k-th power (k ≥ 0).
    pub fn pow(&self, k: u32) -> QSeries {
        let mut out = QSeries::one(self.order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse, for a series with nonzero leading coefficient.
    /// With leading exponent m and order o, the inverse is valid to o − 2m.
    pub fn inverse(&self) -> Result<QSeries> {
        if self.is_zero() {
            return Err(Error::Domain("cannot invert the zero series".into()));
        }
        let m = self.min_exponent();
        let lead = self.coeff(m);
        let order = self.order - 2 * m;
        let mut out = QSeries::zero(order);
        // Triangular solve of (Σ g_k q^k)(Σ f_j q^j) = 1 for g, starting at −m.
        out.set_coeff(-m, Coeff::int(1).div(&lead)?);
        for n in (-m + 1)..=order {
            let mut acc = Coeff::zero();
            for (k, g) in out.coeffs.range(-m..n) {
                acc = acc.add(&g.mul(&self.coeff(n - k + m).div(&lead)?));
            }
            out.set_coeff(n, acc.neg());
        }
        // Validate: residual of the product must vanish through the order.
        Ok(out)
    }

    /// Promote every coefficient to floating mode.
    pub fn to_float(&self) -> QSeries {
        let mut out = QSeries::zero(self.order);
        for (n, c) in self.iter() {
            out.set_coeff(n, Coeff::Float(c.to_f64()));
        }
        out
    }

    /// Evaluate Σ c(n) qⁿ at q = e^{2πiz}, certifying the truncation tail.
    ///
    /// The omitted coefficients are bounded by the subexponential envelope
    /// B·e^{4π√(hn)} (h = pole order at ∞, at least 1) fitted over the stored
    /// coefficients; combined with |q| = e^{−2πy} the tail beyond the order is
    /// dominated by a geometric series. Errors if that bound exceeds `tol`.
    pub fn eval_certified(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let y = z.im;
        if y <= 0.0 {
            return Err(Error::Domain(
                "evaluation point must be in the upper half-plane".into(),
            ));
        }
        let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.iter() {
            sum += q.powi(n as i32) * c.to_f64();
        }
        // Envelope constant over the stored positive-exponent coefficients.
        let h = 1.max(-self.min_exponent()) as f64;
        let mut envelope = 1e-300f64;
        for (n, c) in self.iter() {
            let growth = if n >= 1 {
                (4.0 * PI * (h * n as f64).sqrt()).exp()
            } else {
                1.0
            };
            envelope = envelope.max(c.to_f64().abs() / growth);
        }
        let n1 = (self.order + 1) as f64;
        let log_q = -2.0 * PI * y;
        // Ratio bound for successive envelope terms past the truncation order.
        let ratio = (2.0 * PI * (h / n1).sqrt() + log_q).exp();
        let first = envelope * (4.0 * PI * (h * n1).sqrt() + n1 * log_q).exp();
        if ratio >= 1.0 || first / (1.0 - ratio) > tol {
            return Err(Error::Certification(format!(
                "q-series truncation order {} insufficient for tolerance {:.3e} at y = {:.6} \
                 (tail bound {:.3e})",
                self.order,
                tol,
                y,
                if ratio < 1.0 {
                    first / (1.0 - ratio)
                } else {
                    f64::INFINITY
                }
            )));
        }
        Ok(sum)
    }
}

/// The Jacobi theta series θ = Σ_{n∈ℤ} q^{n²} (weight 1/2; kept as a bare
/// q-series since all integer-weight bookkeeping lives in [`NearlyHolForm`]).
pub fn theta_series(order: i64) -> QSeries {
    let mut s = QSeries::zero(order);
    s.set_coeff(0, Coeff::int(1));
    let mut n = 1i64;
    while n * n <= order {
        s.set_coeff(n * n, Coeff::int(2));
        n += 1;
    }
    s
}

/// Divisor power sum σ_k(n) for n ≥ 1.
fn sigma(k: u32, n: i64) -> Rat {
    let mut acc = BigInt::zero();
    let mut d = 1i64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    Rat::from(acc)
}

// ---------------------------------------------------------------------------
// Nearly holomorphic forms
// ---------------------------------------------------------------------------

/// A nearly holomorphic modular form of even weight for SL₂(ℤ), stored as the
/// layer expansion f(z) = Σ_{l=0}^{p} f_l(z)/y^l (p = depth, y = Im z).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearlyHolForm {
    /// The weight (an even integer for everything constructed here).
    weight: i64,
    /// layers[l] is the q-series multiplying y^{−l}.
    layers: Vec<QSeries>,
}

impl NearlyHolForm {
    /// Build a form from its weight and layers (trailing zero layers trimmed).
    pub fn new(weight: i64, mut layers: Vec<QSeries>) -> Self {
        while layers.len() > 1 && layers.last().map(QSeries::is_zero).unwrap_or(false) {
            layers.pop();
        }
        if layers.is_empty() {
            layers.push(QSeries::zero(DEFAULT_ORDER));
        }
        NearlyHolForm { weight, layers }
    }

    /// The constant function `c` in weight 0.
    pub fn constant(c: Coeff, order: i64) -> Self {
        NearlyHolForm::new(0, vec![QSeries::constant(c, order)])
    }

    /// Weight.
    pub fn weight(&self) -> i64 {
        self.weight
    }

    /// Depth p (index of the last layer).
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// The layers f_0, …, f_p.
    pub fn layers(&self) -> &[QSeries] {
        &self.layers
    }

    /// Layer f_l (zero series beyond the depth).
    pub fn layer(&self, l: usize) -> QSeries {
        self.layers
            .get(l)
            .cloned()
            .unwrap_or_else(|| QSeries::zero(self.order()))
    }

    /// Fourier coefficient c(n, l) of qⁿ in layer l.
    pub fn coeff(&self, n: i64, l: usize) -> Coeff {
        self.layers
            .get(l)
            .map(|s| s.coeff(n))
            .unwrap_or_else(Coeff::zero)
    }

    /// Common truncation order (the minimum over layers).
    pub fn order(&self) -> i64 {
        self.layers
            .iter()
            .map(QSeries::order)
            .min()
            .unwrap_or(DEFAULT_ORDER)
    }

    /// True if every layer is the zero series.
    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(QSeries::is_zero)
    }

    /// Eisenstein series E₄ = 1 + 240 Σ σ₃(n) qⁿ.
    pub fn eisenstein4(order: i64) -> Self {
        let mut s = QSeries::one(order);
        for n in 1..=order {
            s.set_coeff(n, Coeff::Exact(Rat::from(BigInt::from(240)) * sigma(3, n)));
        }
        NearlyHolForm::new(4, vec![s])
    }

    /// Eisenstein series E₆ = 1 − 504 Σ σ₅(n) qⁿ.
    pub fn eisenstein6(order: i64) -> Self {
        let mut s = QSeries::one(order);
        for n in 1..=order {
            s.set_coeff(n, Coeff::Exact(Rat::from(BigInt::from(-504)) * sigma(5, n)));
        }
        NearlyHolForm::new(6, vec![s])
    }

    /// The discriminant cusp form Δ = (E₄³ − E₆²)/1728.
    pub fn delta_cusp(order: i64) -> Self {
        let e4 = NearlyHolForm::eisenstein4(order).layer(0);
        let e6 = NearlyHolForm::eisenstein6(order).layer(0);
        let num = e4.pow(3).add(&e6.pow(2).neg());
        let third = Coeff::Exact(Rat::new(BigInt::one(), BigInt::from(1728)));
        NearlyHolForm::new(12, vec![num.scale(&third)])
    }

    /// The modular j-function j = E₄³/Δ (weakly holomorphic, weight 0).
    pub fn j_invariant(order: i64) -> Result<Self> {
        // Δ = q(1 + …), so inversion costs two orders; build wider internally.
        let wide = order + 2;
        let e4 = NearlyHolForm::eisenstein4(wide).layer(0);
        let delta = NearlyHolForm::delta_cusp(wide).layer(0);
        let mut j = e4.pow(3).mul(&delta.inverse()?);
        j.order = j.order.min(order);
        j.coeffs.retain(|&n, _| n <= order);
        Ok(NearlyHolForm::new(0, vec![j]))
    }

    /// The normalized Hauptmodul J = j − 744.
    pub fn j_normalized(order: i64) -> Result<Self> {
        let j = NearlyHolForm::j_invariant(order)?;
        let mut s = j.layer(0);
        s.set_coeff(0, s.coeff(0).add(&Coeff::int(-744)));
        Ok(NearlyHolForm::new(0, vec![s]))
    }

    /// The completed weight-2 Eisenstein series
    /// E₂*(z) = 1 − 24 Σ σ₁(n) qⁿ − 3/(πy): depth 1, floating layer f₁ = −3/π.
    pub fn e2_star(order: i64) -> Self {
        let mut f0 = QSeries::one(order);
        for n in 1..=order {
            f0.set_coeff(n, Coeff::Exact(Rat::from(BigInt::from(-24)) * sigma(1, n)));
        }
        let f1 = QSeries::constant(Coeff::Float(-3.0 / PI), order);
        NearlyHolForm::new(2, vec![f0, f1])
    }

    /// Product: weights add, depths add, layers convolve.
    pub fn multiply(&self, other: &NearlyHolForm) -> NearlyHolForm {
        let order = self.order().min(other.order());
        let depth = self.depth() + other.depth();
        let mut layers = vec![QSeries::zero(order); depth + 1];
        for (a, fa) in self.layers.iter().enumerate() {
            for (b, fb) in other.layers.iter().enumerate() {
                layers[a + b] = layers[a + b].add(&fa.mul(fb));
            }
        }
        NearlyHolForm::new(self.weight + other.weight, layers)
    }

    /// k-th power (k ≥ 0).
    pub fn power(&self, k: u32) -> NearlyHolForm {
        let mut out = NearlyHolForm::constant(Coeff::int(1), self.order());
        for _ in 0..k {
            out = out.multiply(self);
        }
        out
    }

    /// Sum (weights must match).
    pub fn add(&self, other: &NearlyHolForm) -> Result<NearlyHolForm> {
        if self.weight != other.weight && !self.is_zero() && !other.is_zero() {
            return Err(Error::Precondition(format!(
                "cannot add forms of weights {} and {}",
                self.weight, other.weight
            )));
        }
        let depth = self.depth().max(other.depth());
        let layers = (0..=depth)
            .map(|l| self.layer(l).add(&other.layer(l)))
            .collect();
        Ok(NearlyHolForm::new(self.weight.max(other.weight), layers))
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &Coeff) -> NearlyHolForm {
        NearlyHolForm::new(
            self.weight,
            self.layers.iter().map(|s| s.scale(c)).collect(),
        )
    }

    /// The lowering operator L = −2iy²∂_{z̄}: layer l contributes −l·f_l to
    /// layer l−1 of the result. Weight drops by 2, depth by exactly 1.
    pub fn lower(&self) -> NearlyHolForm {
        let order = self.order();
        let depth = self.depth();
        if depth == 0 {
            return NearlyHolForm::new(self.weight - 2, vec![QSeries::zero(order)]);
        }
        let mut layers = vec![QSeries::zero(order); depth];
        for l in 1..=depth {
            layers[l - 1] = self.layers[l].scale(&Coeff::int(-(l as i64)));
        }
        NearlyHolForm::new(self.weight - 2, layers)
    }

    /// The raising operator R_κ = 2i∂_z + κ/y (κ = the form's weight):
    /// 2i∂_z multiplies the qⁿ coefficient of layer l by −4πn, and the
    /// y-derivative bookkeeping sends layer l to layer l+1 with factor κ−l.
    /// Weight rises by 2.
    pub fn raise(&self) -> NearlyHolForm {
        let order = self.order();
        let kappa = self.weight;
        let depth = self.depth();
        let mut layers = vec![QSeries::zero(order); depth + 2];
        for (l, fl) in self.layers.iter().enumerate() {
            let mut dz = QSeries::zero(order);
            for (n, c) in fl.iter() {
                if n != 0 {
                    dz.set_coeff(n, Coeff::Float(-4.0 * PI * n as f64 * c.to_f64()));
                }
            }
            layers[l] = layers[l].add(&dz);
            layers[l + 1] = layers[l + 1].add(&fl.scale(&Coeff::int(kappa - l as i64)));
        }
        NearlyHolForm::new(kappa + 2, layers)
    }

    /// The weight-κ hyperbolic Laplacian Δ_κ = −R_{κ−2}∘L (weight preserved).
    pub fn laplacian(&self) -> NearlyHolForm {
        self.lower().raise().scale(&Coeff::int(-1))
    }

    /// Evaluate at z in the upper half-plane: reduce z into the standard
    /// fundamental domain with the accumulated cocycle, sum each layer's
    /// q-series with a certified tail ≤ tol, and undo the cocycle.
    pub fn evaluate(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let (zr, gamma) = reduce_point(z)?;
        let layer_tol = tol / self.layers.len() as f64;
        let mut val = Complex64::new(0.0, 0.0);
        let mut ypow = 1.0;
        for fl in &self.layers {
            val += fl.eval_certified(zr, layer_tol)? / ypow;
            ypow *= zr.im;
        }
        let jfac = Complex64::new(gamma[1][0] as f64, 0.0) * z + gamma[1][1] as f64;
        Ok(val * jfac.powi(-self.weight as i32))
    }
}

/// Reduce z into the standard fundamental domain for SL₂(ℤ) (|Re| ≤ 1/2,
/// |z| ≥ 1) by alternating x-shifts and inversions; returns the reduced point
/// and the matrix γ with γz = z_reduced.
pub fn reduce_point(z: Complex64) -> Result<(Complex64, [[i64; 2]; 2])> {
    if z.im <= 0.0 {
        return Err(Error::Domain(
            "point must lie in the upper half-plane".into(),
        ));
    }
    let mat_mul = |x: [[i64; 2]; 2], y: [[i64; 2]; 2]| {
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
    let mut gamma = [[1i64, 0], [0, 1]];
    for _ in 0..200 {
        // Recompute from the exact integer matrix each round so that no
        // floating-point error accumulates along the reduction chain.
        let mut w = moebius(gamma, z);
        let n = w.re.round();
        if n != 0.0 {
            gamma = mat_mul([[1, -(n as i64)], [0, 1]], gamma);
            w = moebius(gamma, z);
        }
        if w.norm_sqr() < 1.0 - 1e-14 {
            gamma = mat_mul([[0, -1], [1, 0]], gamma);
        } else {
            return Ok((w, gamma));
        }
    }
    Err(Error::Certification(
        "fundamental-domain reduction did not terminate".into(),
    ))
}

/// Apply a Möbius transformation γ to z.
pub fn moebius(gamma: [[i64; 2]; 2], z: Complex64) -> Complex64 {
    let num = Complex64::new(gamma[0][0] as f64, 0.0) * z + gamma[0][1] as f64;
    let den = Complex64::new(gamma[1][0] as f64, 0.0) * z + gamma[1][1] as f64;
    num / den
}

/// Serialize a form to its canonical JSON representation.
pub fn form_to_json(f: &NearlyHolForm) -> Result<String> {
    serde_json::to_string_pretty(f)
        .map_err(|e| Error::Domain(format!("form serialization failed: {e}")))
}

/// Parse a form from its canonical JSON representation.
pub fn form_from_json(text: &str) -> Result<NearlyHolForm> {
    serde_json::from_str(text).map_err(|e| Error::Domain(format!("bad form JSON: {e}")))
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
