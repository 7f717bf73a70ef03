//! Integral binary quadratic forms under SL₂(ℤ): reduction, class
//! representatives for negative, positive-nonsquare, and square
//! discriminants, Hurwitz class numbers, genus characters, CM points, and
//! closed-geodesic data (center, radius, automorph from the Pell equation).

use num::complex::Complex64;

use crate::poly::{rat, Rat};
use crate::{Error, Result};

/// The form ax² + bxy + cy².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a.abs(), self.b.abs()), self.c.abs()).max(1)
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    /// λ(z) = az² + bz + c at a complex point.
    pub fn eval_z(&self, z: Complex64) -> Complex64 {
        (self.a as f64) * z * z + (self.b as f64) * z + self.c as f64
    }

    pub fn neg(&self) -> QuadForm {
        QuadForm::new(-self.a, -self.b, -self.c)
    }

    /// The right action (f·γ)(x,y) = f(px+qy, rx+sy) for γ = [[p,q],[r,s]].
    pub fn act(&self, m: [[i64; 2]; 2]) -> QuadForm {
        let [[p, q], [r, s]] = m;
        QuadForm::new(
            self.a * p * p + self.b * p * r + self.c * r * r,
            2 * self.a * p * q + self.b * (p * s + q * r) + 2 * self.c * r * s,
            self.a * q * q + self.b * q * s + self.c * s * s,
        )
    }

    pub fn is_positive_definite(&self) -> bool {
        self.disc() < 0 && self.a > 0
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn isqrt(n: i64) -> i64 {
    if n < 0 {
        return -1;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn is_square(n: i64) -> bool {
    n >= 0 && {
        let r = isqrt(n);
        r * r == n
    }
}

// ---------------------------------------------------------------------------
// Reduction
// ---------------------------------------------------------------------------

/// Gauss reduction of a positive-definite form to the canonical reduced
/// representative (|b| ≤ a ≤ c, with b ≥ 0 when |b| = a or a = c).
pub fn reduce_posdef(f: &QuadForm) -> Result<QuadForm> {
    if !f.is_positive_definite() {
        return Err(Error::Precondition(
            "reduce_posdef requires a positive-definite form".into(),
        ));
    }
    let mut g = *f;
    loop {
        // Translate b into (−a, a].
        let a2 = 2 * g.a;
        let mut b = g.b.rem_euclid(a2);
        if b > g.a {
            b -= a2;
        }
        let t = (b - g.b) / a2;
        g = QuadForm::new(g.a, b, g.a * t * t + g.b * t + g.c);
        if g.a > g.c {
            g = QuadForm::new(g.c, -g.b, g.a);
        } else {
            break;
        }
    }
    if (g.a == g.c || g.a == g.b.abs()) && g.b < 0 {
        g = QuadForm::new(g.a, -g.b, g.c);
    }
    Ok(g)
}

/// Whether an indefinite form of nonsquare discriminant is reduced:
/// 0 < b and √d − b < 2|a| < √d + b (equivalently for c).
pub fn is_reduced_indefinite(f: &QuadForm) -> bool {
    let d = f.disc();
    if d <= 0 || is_square(d) {
        return false;
    }
    let sd = (d as f64).sqrt();
    let b = f.b as f64;
    b > 0.0 && b < sd && sd - b < 2.0 * (f.a.abs() as f64) && 2.0 * (f.a.abs() as f64) < sd + b
}

/// The right-neighbor (rho) step on indefinite forms: [a,b,c] ↦ [c,b',c']
/// with b' ≡ −b (mod 2|c|) in the standard window.
pub fn rho(f: &QuadForm) -> QuadForm {
    let d = f.disc();
    let c2 = 2 * f.c.abs();
    let sd = (d as f64).sqrt();
    // Choose b' ≡ −b (mod 2|c|).
    let base = (-f.b).rem_euclid(c2);
    let bp = if (f.c.abs() as f64) < sd {
        // window (√d − 2|c|, √d)
        let lo = sd - c2 as f64;
        let mut b = base;
        while (b as f64) <= lo {
            b += c2;
        }
        while (b as f64) > sd {
            b -= c2;
        }
        b
    } else {
        // window (−|c|, |c|]
        let mut b = base;
        if b > f.c.abs() {
            b -= c2;
        }
        b
    };
    QuadForm::new(f.c, bp, (bp * bp - d) / (4 * f.c))
}

/// Reduce an indefinite form (nonsquare d > 0) into its cycle of reduced
/// forms, returning the first reduced form reached.
pub fn reduce_indefinite(f: &QuadForm) -> Result<QuadForm> {
    let d = f.disc();
    if d <= 0 || is_square(d) {
        return Err(Error::Precondition(
            "reduce_indefinite requires nonsquare positive discriminant".into(),
        ));
    }
    let mut g = *f;
    for _ in 0..10_000 {
        if is_reduced_indefinite(&g) {
            return Ok(g);
        }
        g = rho(&g);
    }
    Err(Error::Certification(
        "indefinite reduction did not terminate".into(),
    ))
}

// ---------------------------------------------------------------------------
// Class representatives and class numbers
// ---------------------------------------------------------------------------

/// One representative per SL₂(ℤ)-orbit of forms of discriminant d:
/// for d < 0 the reduced positive-definite forms and their negatives; for
/// nonsquare d > 0 one reduced form per cycle; for d = r² the 2r forms
/// ±[0, r, j] with 0 ≤ j < r.
pub fn class_reps(d: i64) -> Result<Vec<QuadForm>> {
    if d == 0 || d.rem_euclid(4) > 1 {
        return Err(Error::Domain(format!(
            "discriminant must be ≡ 0, 1 (mod 4) and nonzero, got {d}"
        )));
    }
    if d < 0 {
        let mut out = Vec::new();
        let n = -d;
        let mut a = 1;
        while 3 * a * a <= n {
            let mut b = -(a - 1);
            while b <= a {
                if (b * b + n) % (4 * a) == 0 {
                    let c = (b * b + n) / (4 * a);
                    let reduced = c >= a && !((a == c || b.abs() == a) && b < 0);
                    if reduced && b.rem_euclid(2) == d.rem_euclid(2) {
                        out.push(QuadForm::new(a, b, c));
                    }
                }
                b += 1;
            }
            a += 1;
        }
        let negs: Vec<QuadForm> = out.iter().map(|f| QuadForm::new(-f.a, f.b, -f.c)).collect();
        out.extend(negs);
        Ok(out)
    } else if is_square(d) {
        let r = isqrt(d);
        let mut out = Vec::new();
        for j in 0..r {
            out.push(QuadForm::new(0, r, j));
        }
        for j in 0..r {
            out.push(QuadForm::new(0, -r, -j));
        }
        Ok(out)
    } else {
        // Enumerate all reduced indefinite forms, then group into rho-cycles.
        let sd = (d as f64).sqrt();
        let mut all = Vec::new();
        for b in 1..=isqrt(d) {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let lo = ((sd - b as f64) / 2.0).floor() as i64;
            let hi = ((sd + b as f64) / 2.0).ceil() as i64;
            for aa in lo.max(1)..=hi {
                if (b * b - d) % (4 * aa) == 0 {
                    for a in [aa, -aa] {
                        let f = QuadForm::new(a, b, (b * b - d) / (4 * a));
                        if is_reduced_indefinite(&f) {
                            all.push(f);
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for f in &all {
            if seen.contains(f) {
                continue;
            }
            out.push(*f);
            let mut g = *f;
            loop {
                seen.insert(g);
                g = rho(&g);
                if g == *f {
                    break;
                }
            }
        }
        Ok(out)
    }
}

/// Hurwitz class number H(n): the class count of discriminant −n weighted by
/// 2/|automorphisms| (1/3 for the −3 class scalings, 1/2 for −4), with the
/// conventions H(0) = −1/12 and H(n) = 0 for n ≡ 1, 2 (mod 4).
pub fn hurwitz(n: u64) -> Rat {
    if n == 0 {
        return rat(-1, 12);
    }
    if n % 4 == 1 || n % 4 == 2 {
        return rat(0, 1);
    }
    let reps = class_reps(-(n as i64)).expect("n ≡ 0,3 mod 4 gives a valid discriminant");
    let mut total = rat(0, 1);
    for f in reps.iter().filter(|f| f.is_positive_definite()) {
        total += class_weight(f);
    }
    total
}

/// The weight 2/|Γ_λ| · |Γ_λ|/2 bookkeeping: 1/3 for forms equivalent to a
/// scaling of x²+xy+y², 1/2 for scalings of x²+y², 1 otherwise.
pub fn class_weight(f: &QuadForm) -> Rat {
    let t = f.content();
    let core = f.disc() / (t * t);
    if core == -3 {
        rat(1, 3)
    } else if core == -4 {
        rat(1, 2)
    } else {
        rat(1, 1)
    }
}

// ---------------------------------------------------------------------------
// Kronecker symbol and genus characters
// ---------------------------------------------------------------------------

/// The Kronecker symbol (a/b).
pub fn kronecker(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a, b);
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let tab2 = |x: i64| {
        if matches!(x.rem_euclid(8), 1 | 7) {
            1
        } else {
            -1
        }
    };
    let mut v = 0;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 { 1 } else { tab2(a) };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        let mut v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= tab2(b);
        }
        if a.rem_euclid(4) == 3 && b.rem_euclid(4) == 3 {
            k = -k;
        }
        let r = a.abs();
        a = b.rem_euclid(r);
        b = r;
    }
}

/// Whether Δ is a fundamental discriminant (including Δ = 1).
pub fn is_fundamental(delta: i64) -> bool {
    if delta == 0 {
        return false;
    }
    let squarefree = |m: i64| {
        let m = m.abs();
        let mut p = 2;
        while p * p <= m {
            if m % (p * p) == 0 {
                return false;
            }
            p += 1;
        }
        true
    };
    if delta.rem_euclid(4) == 1 {
        squarefree(delta)
    } else if delta % 4 == 0 {
        let m = delta / 4;
        matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
    } else {
        false
    }
}

/// Genus character χ_Δ(f) = (Δ/n) for any value n represented by f with
/// gcd(n, Δ) = 1, and 0 if no such value exists.
pub fn genus_char(delta: i64, f: &QuadForm) -> Result<i64> {
    if !is_fundamental(delta) {
        return Err(Error::Precondition(format!(
            "genus_char requires a fundamental discriminant, got {delta}"
        )));
    }
    if f.disc() % delta != 0 {
        return Err(Error::Precondition(
            "genus_char requires Δ to divide the discriminant".into(),
        ));
    }
    for r in 0..=24i64 {
        for x in -r..=r {
            for y in [-r, r] {
                for (xx, yy) in [(x, y), (y, x)] {
                    let n = f.eval(xx, yy);
                    if n != 0 && gcd(n.abs(), delta.abs()) == 1 {
                        return Ok(kronecker(delta, n));
                    }
                }
            }
        }
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// CM points and geodesics
// ---------------------------------------------------------------------------

/// A CM point with its stabilizer order in SL₂(ℤ) (counting ±I).
pub struct CmPoint {
    pub z: Complex64,
    pub stabilizer_order: u32,
}

/// The root z = (−b + i√|d|)/(2a) ∈ ℋ of a positive-definite form.
pub fn cm_point(f: &QuadForm) -> Result<CmPoint> {
    if !f.is_positive_definite() {
        return Err(Error::Domain(
            "cm_point requires a positive-definite form".into(),
        ));
    }
    let d = f.disc();
    let z = Complex64::new(-(f.b as f64), ((-d) as f64).sqrt()) / (2.0 * f.a as f64);
    let t = f.content();
    let core = d / (t * t);
    let stabilizer_order = match core {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    Ok(CmPoint {
        z,
        stabilizer_order,
    })
}

/// Geodesic data of an indefinite form of nonsquare discriminant: the
/// semicircle with center −b/2a and radius √d/(2|a|), and the automorph
/// generating Γ_λ/{±1} from the fundamental solution of t² − d′u² = 4 at
/// the discriminant d′ of the form's primitive part.
pub struct GeodesicData {
    pub center: f64,
    pub radius: f64,
    pub automorph: [[i64; 2]; 2],
}

/// Fundamental Pell solution of t² − du² = 4 with minimal u ≥ 1, t > 0.
pub fn pell_fundamental(d: i64) -> Result<(i64, i64)> {
    if d <= 0 || is_square(d) {
        return Err(Error::Precondition("Pell requires nonsquare d > 0".into()));
    }
    for u in 1..=200_000_000i64 {
        let t2 = d * u * u + 4;
        if is_square(t2) {
            return Ok((isqrt(t2), u));
        }
        if t2 > i64::MAX / (d + 4) {
            break;
        }
    }
    Err(Error::Certification(format!(
        "Pell search exhausted for d = {d}"
    )))
}

pub fn geodesic_data(f: &QuadForm) -> Result<GeodesicData> {
    let d = f.disc();
    if d <= 0 || is_square(d) {
        return Err(Error::Domain(
            "geodesic_data requires a nonsquare positive discriminant".into(),
        ));
    }
    // The stabilizer of an imprimitive form equals that of its primitive
    // part (scaling changes neither the geodesic nor the automorphs), so the
    // Pell equation must be solved at the primitive discriminant; using d
    // itself would wrap the closed geodesic multiple times.
    let g = f.content();
    let (pa, pb, pc) = (f.a / g, f.b / g, f.c / g);
    let (t, u) = pell_fundamental(d / (g * g))?;
    let automorph = [[(t - pb * u) / 2, -pc * u], [pa * u, (t + pb * u) / 2]];
    Ok(GeodesicData {
        center: -(f.b as f64) / (2.0 * f.a as f64),
        radius: (d as f64).sqrt() / (2.0 * f.a.abs() as f64),
        automorph,
    })
}
