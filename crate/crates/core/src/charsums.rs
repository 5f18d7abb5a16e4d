//! Complete sums over residues: Ramanujan and Kloosterman sums, and sums of
//! `e(f(u)/p)` for rational functions `f` over a prime field, compared
//! against the Weil bound.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, gcd, gcd_i, inv_mod_u, is_prime, mul_mod, rem_euclid, Factorization};
use crate::expsums::{e_frac, ComplexAccumulator, SweepReport};

pub const RAMANUJAN_DIRECT_LIMIT: u64 = 100_000;
pub const KLOOSTERMAN_LIMIT: u64 = 10_000_000;
/// Largest prime for which point-by-point sums are evaluated.
pub const FIELD_LIMIT: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharSumError {
    #[error("modulus {0} exceeds the direct-evaluation limit")]
    Scale(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("rational function is constant")]
    Constant,
    #[error("parameters violate the divisibility conditions: {0}")]
    Parameters(&'static str),
    #[error("|sum| = {sum} exceeds the bound {bound}")]
    BoundViolated { sum: f64, bound: f64 },
}

/// `c_q(t) = μ(q/(q,t)) φ(q)/φ(q/(q,t))`.
pub fn ramanujan(q: &Factorization, t: i64) -> i64 {
    let qv = q.value();
    let g = if t == 0 { qv } else { gcd_i(t, qv as i64) };
    let mut mu = 1i64;
    let mut phi_q = 1u64;
    let mut phi_r = 1u64;
    for (p, e, pe) in q.prime_powers() {
        phi_q *= pe / p * (p - 1);
        let mut ve = 0;
        let mut gg = g;
        while gg % p == 0 {
            gg /= p;
            ve += 1;
        }
        let er = e - ve.min(e);
        match er {
            0 => {}
            1 => {
                mu = -mu;
                phi_r *= p - 1;
            }
            _ => return 0,
        }
    }
    mu * (phi_q / phi_r) as i64
}

/// Oracle for [`ramanujan`]: `Σ_{(a,q)=1} e(ta/q)` term by term.
pub fn ramanujan_direct(q: u64, t: i64) -> Result<Complex64, CharSumError> {
    if q == 0 {
        return Err(CharSumError::ZeroModulus);
    }
    if q > RAMANUJAN_DIRECT_LIMIT {
        return Err(CharSumError::Scale(q));
    }
    let tq = rem_euclid(t, q);
    let mut acc = ComplexAccumulator::new();
    for a in 0..q {
        if gcd(a, q) == 1 {
            acc.add(e_frac(mul_mod(tq, a, q), q));
        }
    }
    Ok(acc.value())
}

/// `K(a, b; q) = Σ_{(x,q)=1} e((a x̄ + b x)/q)`.
pub fn kloosterman(a: i64, b: i64, q: u64) -> Result<Complex64, CharSumError> {
    if q == 0 {
        return Err(CharSumError::ZeroModulus);
    }
    if q > KLOOSTERMAN_LIMIT {
        return Err(CharSumError::Scale(q));
    }
    let (aq, bq) = (rem_euclid(a, q), rem_euclid(b, q));
    let mut acc = ComplexAccumulator::new();
    for x in 0..q {
        if let Some(xi) = inv_mod_u(x, q) {
            let t = (mul_mod(aq, xi, q) + mul_mod(bq, x, q)) % q;
            acc.add(e_frac(t, q));
        }
    }
    Ok(acc.value())
}

/// `√(q (a,q)) τ(q)`.
pub fn kloosterman_bound(a: i64, _b: i64, q: &Factorization) -> f64 {
    let qv = q.value();
    let g = if a == 0 { qv } else { gcd_i(a, qv as i64) };
    ((qv as f64) * (g as f64)).sqrt() * arith::mult_functions(q).tau as f64
}

/// Polynomials over `F_p`, coefficients ascending, no trailing zeros.
pub mod poly {
    use super::*;

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(a: &[u64]) -> Option<usize> {
        a.len().checked_sub(1)
    }

    pub fn from_signed(c: &[i64], p: u64) -> Vec<u64> {
        trim(c.iter().map(|&x| rem_euclid(x, p)).collect())
    }

    pub fn eval(a: &[u64], u: u64, p: u64) -> u64 {
        a.iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, u, p) + c) % p)
    }

    pub fn add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        trim(
            (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
                .collect(),
        )
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let nb: Vec<u64> = b.iter().map(|&c| (p - c) % p).collect();
        add(a, &nb, p)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    pub fn scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
        trim(a.iter().map(|&x| mul_mod(x, c, p)).collect())
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = inv_mod_u(b[db], p).expect("field element");
        let mut r = a.to_vec();
        if r.len() <= db {
            return (Vec::new(), trim(r));
        }
        let mut q = vec![0u64; r.len() - db];
        for i in (0..q.len()).rev() {
            let c = mul_mod(r[i + db], lead_inv, p);
            q[i] = c;
            if c != 0 {
                for (j, &bj) in b.iter().enumerate() {
                    r[i + j] = (r[i + j] + p - mul_mod(c, bj, p)) % p;
                }
            }
        }
        r.truncate(db);
        (trim(q), trim(r))
    }

    pub fn monic(a: &[u64], p: u64) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&l) => scale(a, inv_mod_u(l, p).expect("field element"), p),
        }
    }

    /// Monic gcd.
    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = divrem(&x, &y, p).1;
            x = y;
            y = r;
        }
        monic(&x, p)
    }

    /// `base^e mod m`.
    pub fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut result = divrem(&[1], m, p).1;
        let mut b = divrem(base, m, p).1;
        while e > 0 {
            if e & 1 == 1 {
                result = divrem(&mul(&result, &b, p), m, p).1;
            }
            b = divrem(&mul(&b, &b, p), m, p).1;
            e >>= 1;
        }
        result
    }
}

/// `num/den` over `F_p`, kept reduced with a monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunctionModP {
    p: u64,
    num: Vec<u64>,
    den: Vec<u64>,
}

impl RationalFunctionModP {
    pub fn new(p: u64, num: &[i64], den: &[i64]) -> Result<Self, CharSumError> {
        if !is_prime(p) {
            return Err(CharSumError::NotPrime(p));
        }
        Self::from_residues(p, poly::from_signed(num, p), poly::from_signed(den, p))
    }

    pub fn from_residues(p: u64, num: Vec<u64>, den: Vec<u64>) -> Result<Self, CharSumError> {
        let (num, den) = (poly::trim(num), poly::trim(den));
        if den.is_empty() {
            return Err(CharSumError::ZeroDenominator);
        }
        let g = poly::gcd(&num, &den, p);
        let num = poly::divrem(&num, &g, p).0;
        let den = poly::divrem(&den, &g, p).0;
        let l = inv_mod_u(*den.last().expect("nonzero"), p).expect("field element");
        Ok(RationalFunctionModP {
            p,
            num: poly::scale(&num, l, p),
            den: poly::scale(&den, l, p),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn num(&self) -> &[u64] {
        &self.num
    }

    pub fn den(&self) -> &[u64] {
        &self.den
    }

    pub fn is_constant(&self) -> bool {
        self.num.len() <= 1 && self.den.len() == 1
    }

    /// `f(u)`, or `None` at a pole.
    pub fn eval(&self, u: u64) -> Option<u64> {
        let d = poly::eval(&self.den, u, self.p);
        let di = inv_mod_u(d, self.p)?;
        Some(mul_mod(poly::eval(&self.num, u, self.p), di, self.p))
    }

    /// Value at the point at infinity when it is finite.
    pub fn eval_infinity(&self) -> Option<u64> {
        let dn = self.num.len();
        let dd = self.den.len();
        if dn > dd {
            None
        } else if dn < dd {
            Some(0)
        } else {
            // den is monic
            Some(self.num[dn - 1])
        }
    }
}

/// A place of the projective line over the algebraic closure of `F_p`,
/// grouped into Frobenius orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Finite(u64),
    Infinity,
    /// The `poly.len() - 1` conjugate roots of a product of distinct
    /// irreducible factors of degree `degree >= 2`.
    Conjugates {
        degree: usize,
        poly: Vec<u64>,
    },
}

impl Place {
    /// Number of geometric points the entry stands for.
    pub fn points(&self) -> usize {
        match self {
            Place::Finite(_) | Place::Infinity => 1,
            Place::Conjugates { poly, .. } => poly.len() - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleDivisor {
    pub poles: Vec<(Place, u32)>,
}

impl PoleDivisor {
    /// `Σ (1 + v_u)` over geometric poles.
    pub fn weight(&self) -> u64 {
        self.poles
            .iter()
            .map(|(pl, v)| pl.points() as u64 * (1 + *v as u64))
            .sum()
    }
}

/// Poles of `f` with their orders, rational points ascending, then
/// higher-degree orbits, then infinity.
pub fn pole_divisor(f: &RationalFunctionModP) -> Result<PoleDivisor, CharSumError> {
    if f.is_constant() {
        return Err(CharSumError::Constant);
    }
    let p = f.p;
    if p > FIELD_LIMIT {
        return Err(CharSumError::Scale(p));
    }
    let mut poles = Vec::new();
    let den = f.den.clone();
    let dd = poly::degree(&den).unwrap_or(0);
    // (degree, product of the distinct irreducible factors of that degree)
    let mut found: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut frob = vec![0, 1]; // X^{p^i} mod den
    for i in 1..=dd {
        if den.len() <= 1 {
            break;
        }
        frob = poly::pow_mod(&frob, p, &den, p);
        let mut g = poly::gcd(&den, &poly::sub(&frob, &[0, 1], p), p);
        for (d, h) in &found {
            if i % d == 0 {
                g = poly::divrem(&g, h, p).0;
            }
        }
        if poly::degree(&g).unwrap_or(0) == 0 {
            continue;
        }
        // split the distinct-degree product by multiplicity in den
        let mut layers: Vec<Vec<u64>> = Vec::new();
        let mut t = den.clone();
        loop {
            let a = poly::gcd(&t, &g, p);
            if poly::degree(&a).unwrap_or(0) == 0 {
                break;
            }
            t = poly::divrem(&t, &a, p).0;
            layers.push(a);
        }
        for (j, layer) in layers.iter().enumerate() {
            let exact = match layers.get(j + 1) {
                Some(next) => poly::divrem(layer, next, p).0,
                None => layer.clone(),
            };
            if poly::degree(&exact).unwrap_or(0) == 0 {
                continue;
            }
            let order = j as u32 + 1;
            if i == 1 {
                for u in 0..p {
                    if poly::eval(&exact, u, p) == 0 {
                        poles.push((Place::Finite(u), order));
                    }
                }
            } else {
                poles.push((
                    Place::Conjugates {
                        degree: i,
                        poly: exact,
                    },
                    order,
                ));
            }
        }
        found.push((i, g));
    }
    poles.sort_by_key(|(pl, _)| match pl {
        Place::Finite(u) => (0, *u),
        Place::Conjugates { degree, .. } => (1, *degree as u64),
        Place::Infinity => (2, 0),
    });
    if f.num.len() > f.den.len() {
        poles.push((Place::Infinity, (f.num.len() - f.den.len()) as u32));
    }
    Ok(PoleDivisor { poles })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeilCheck {
    pub sum: Complex64,
    /// Contribution of the point at infinity (zero when it is a pole).
    pub infinity_term: Complex64,
    pub bound: f64,
    pub ok: bool,
}

/// `Σ_{u ∈ P^1, f(u) ≠ ∞} e(f(u)/p)` against `Σ_{poles} (1 + v_u) √p`.
pub fn weil_check(f: &RationalFunctionModP) -> Result<WeilCheck, CharSumError> {
    let div = pole_divisor(f)?;
    let p = f.p;
    let mut acc = ComplexAccumulator::new();
    for u in 0..p {
        if let Some(v) = f.eval(u) {
            acc.add(e_frac(v, p));
        }
    }
    let infinity_term = f
        .eval_infinity()
        .map_or(Complex64::new(0.0, 0.0), |v| e_frac(v, p));
    acc.add(infinity_term);
    let sum = acc.value();
    let bound = div.weight() as f64 * (p as f64).sqrt();
    Ok(WeilCheck {
        sum,
        infinity_term,
        bound,
        ok: sum.norm() <= bound + 1e-6,
    })
}

/// Checks the conditions on `(k₂, k₁, s, p)` and returns the reduced
/// `(Q, k₂, C, s)` with `Q = rad(k₂)` and `C = Q² k₂² (k₁s/p)²`, all mod p.
fn kp_parameters(k2: u64, k1: u64, s: u64, p: u64) -> Result<[u64; 4], CharSumError> {
    if !is_prime(p) {
        return Err(CharSumError::NotPrime(p));
    }
    if p == 2 || s % p == 0 {
        return Err(CharSumError::Parameters("p must not divide 2s"));
    }
    let ks = (k1 as u128) * (s as u128);
    let p2 = (p as u128) * (p as u128);
    if ks % (p as u128) != 0 || ks % p2 == 0 {
        return Err(CharSumError::Parameters("p must divide k1*s exactly once"));
    }
    if k2 == 0 || k2 % p == 0 {
        return Err(CharSumError::Parameters("p must not divide k2"));
    }
    let q = arith::factor(k2)
        .map_err(|_| CharSumError::Parameters("k2 too large"))?
        .radical();
    let rest = ((ks / p as u128) % p as u128) as u64;
    let (qm, k2m) = (q % p, k2 % p);
    let c = mul_mod(
        mul_mod(qm, qm, p),
        mul_mod(mul_mod(k2m, k2m, p), mul_mod(rest, rest, p), p),
        p,
    );
    Ok([qm, k2m, c, s % p])
}

/// `Σ_{a mod p} K_p(a) e(ha/p)` term by term, where
/// `K_p(a) = e(-a Q \overline{k₂ (C a² + s²)} / p)` and `e(·) = 0` when the
/// inverse does not exist.
pub fn kp_factor_sum_direct(
    k2: u64,
    k1: u64,
    s: u64,
    p: u64,
    h: i64,
) -> Result<Complex64, CharSumError> {
    let [q, k2m, c, sm] = kp_parameters(k2, k1, s, p)?;
    if p > FIELD_LIMIT {
        return Err(CharSumError::Scale(p));
    }
    let hm = rem_euclid(h, p);
    let s2 = mul_mod(sm, sm, p);
    let mut acc = ComplexAccumulator::new();
    for a in 0..p {
        let d = mul_mod(k2m, (mul_mod(c, mul_mod(a, a, p), p) + s2) % p, p);
        if let Some(di) = inv_mod_u(d, p) {
            let t = (p - mul_mod(mul_mod(a, q, p), di, p)) % p;
            acc.add(e_frac((t + mul_mod(hm, a, p)) % p, p));
        }
    }
    Ok(acc.value())
}

/// The rational function `a ↦ -Q a / (k₂ (C a² + s²)) + h a` over `F_p`.
pub fn kp_rational_function(
    k2: u64,
    k1: u64,
    s: u64,
    p: u64,
    h: i64,
) -> Result<RationalFunctionModP, CharSumError> {
    let [q, k2m, c, sm] = kp_parameters(k2, k1, s, p)?;
    let den = vec![mul_mod(k2m, mul_mod(sm, sm, p), p), 0, mul_mod(k2m, c, p)];
    let lin = poly::mul(&poly::from_signed(&[0, h], p), &den, p);
    let num = poly::add(&lin, &[0, (p - q) % p], p);
    RationalFunctionModP::from_residues(p, num, den)
}

/// `Σ_{a mod p} K_p(a) e(ha/p)` through the rational-function path; the
/// point at infinity is not part of this sum. Fails if `|sum| > 6√p`.
pub fn kp_factor_sum(k2: u64, k1: u64, s: u64, p: u64, h: i64) -> Result<Complex64, CharSumError> {
    let f = kp_rational_function(k2, k1, s, p, h)?;
    let w = weil_check(&f)?;
    let sum = w.sum - w.infinity_term;
    let bound = 6.0 * (p as f64).sqrt();
    if sum.norm() > bound + 1e-6 {
        return Err(CharSumError::BoundViolated {
            sum: sum.norm(),
            bound,
        });
    }
    Ok(sum)
}

/// Closed form against direct summation of `c_q(t)` for `1 ≤ q ≤ qmax`,
/// `|t| ≤ tmax`; the direct value is rounded to the nearest integer.
pub fn ramanujan_sweep(qmax: u64, tmax: i64) -> Result<SweepReport, CharSumError> {
    let mut report = SweepReport::new();
    for q in 1..=qmax {
        let qf = arith::factor(q).map_err(|_| CharSumError::Scale(q))?;
        for t in -tmax..=tmax {
            let direct = ramanujan_direct(q, t)?;
            let exact = ramanujan(&qf, t);
            let bad = direct.re.round() as i64 != exact || direct.im.abs() > 1e-6;
            report.record(0.0, bad, || format!("q={q} t={t}"));
        }
    }
    Ok(report)
}

/// A seeded random non-constant reduced rational function with numerator
/// and denominator of degree at most `max_deg`, over a prime `p ≤ pmax`.
pub fn random_rational_function(
    rng: &mut ChaCha8Rng,
    primes: &[u64],
    max_deg: usize,
) -> RationalFunctionModP {
    loop {
        let p = primes[rng.gen_range(0..primes.len())];
        let mut draw = |p: u64| -> Vec<u64> {
            let d = rng.gen_range(0..=max_deg);
            (0..=d).map(|_| rng.gen_range(0..p)).collect()
        };
        let (num, den) = (draw(p), draw(p));
        if let Ok(f) = RationalFunctionModP::from_residues(p, num, den) {
            if !f.is_constant() {
                return f;
            }
        }
    }
}

/// [`weil_check`] on `count` seeded random functions from
/// [`random_rational_function`]; the ratio is `|sum| / bound`.
pub fn weil_sweep(
    seed: u64,
    count: u64,
    pmax: u64,
    max_deg: usize,
) -> Result<SweepReport, CharSumError> {
    let primes: Vec<u64> = arith::primes_below(pmax + 1);
    if primes.is_empty() {
        return Err(CharSumError::NotPrime(pmax));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<RationalFunctionModP> = (0..count)
        .map(|_| random_rational_function(&mut rng, &primes, max_deg))
        .collect();
    let checks = cases
        .par_iter()
        .map(weil_check)
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = SweepReport::new();
    for (f, w) in cases.iter().zip(checks) {
        report.record(w.sum.norm() / w.bound, !w.ok, || {
            format!(
                "p={} num={:?} den={:?} |sum|={:.6} bound={:.6}",
                f.p,
                f.num,
                f.den,
                w.sum.norm(),
                w.bound
            )
        });
    }
    Ok(report)
}

/// `|K(a, b; p)| ≤ 2√p` for all `1 ≤ a, b < p` and primes `p ≤ pmax`.
/// Substituting `x → a x` gives `K(a, b; p) = K(1, ab; p)`, so each prime
/// needs the `p − 1` sums `K(1, c; p)`, each standing for `p − 1` pairs.
pub fn kloosterman_prime_sweep(pmax: u64) -> Result<SweepReport, CharSumError> {
    let per_prime = arith::primes_below(pmax + 1)
        .into_par_iter()
        .map(|p| {
            let mut report = SweepReport::new();
            let bound = 2.0 * (p as f64).sqrt();
            for c in 1..p {
                let k = kloosterman(1, c as i64, p)?.norm();
                let mut one = SweepReport::new();
                one.record(k / bound, k > bound + 1e-9, || format!("p={p} a=1 b={c}"));
                one.checked = p - 1;
                report = report.merge(one);
            }
            Ok(report)
        })
        .collect::<Result<Vec<_>, CharSumError>>()?;
    Ok(per_prime
        .into_iter()
        .fold(SweepReport::new(), SweepReport::merge))
}
