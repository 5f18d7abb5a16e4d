//! Main-term constants: truncated Euler products and finite sums over
//! divisors of a fixed prime set, each with an explicit tail bound.

use std::f64::consts::PI;

use thiserror::Error;

use num_complex::Complex64;

use crate::arith::{self, factor, gcd, inv_mod_u, mobius, mul_mod, rem_euclid};
use crate::charsums::ramanujan;
use crate::expsums::{e_frac, ComplexAccumulator};
use crate::roots::FactoredPoly;

/// Largest truncation prime accepted by the product routines.
pub const MAX_PMAX: u64 = 1_000_000_000;
/// Largest divisor cutoff accepted by [`c_general`].
pub const MAX_DELTA_MAX: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstantError {
    #[error("coefficients must be nonzero")]
    ZeroCoefficient,
    #[error("h must be nonzero")]
    ZeroFrequency,
    #[error("(h, acΔ) = {0}, expected 1")]
    NotCoprime(u64),
    #[error("pmax = {0} is outside [2, {MAX_PMAX}]")]
    BadPmax(u64),
    #[error("δmax = {0} is outside [1, {MAX_DELTA_MAX}]")]
    BadDeltaMax(u64),
    #[error("expected exactly two linear factors and no X^2 + 1")]
    NotTwoLinear,
}

/// A truncated product or series: `value` with `|true - value| <= tail_bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerProduct {
    pub value: f64,
    pub pmax: u64,
    pub tail_bound: f64,
}

fn check_pmax(pmax: u64) -> Result<(), ConstantError> {
    if !(2..=MAX_PMAX).contains(&pmax) {
        return Err(ConstantError::BadPmax(pmax));
    }
    Ok(())
}

/// `exp(Σ log1p(t_p))` over primes `p <= pmax` passing `keep`.
fn log_product(pmax: u64, keep: impl Fn(u64) -> bool, term: impl Fn(f64) -> f64) -> f64 {
    arith::primes_below(pmax + 1)
        .into_iter()
        .filter(|&p| keep(p))
        .map(|p| term(p as f64).ln_1p())
        .sum::<f64>()
        .exp()
}

fn prime_divisors(n: u64) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    factor(n).expect("n >= 1").primes().collect()
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// `(μ(a)/a + μ(c)/c) (6/π²) ∏_{p | ac} (1 - 1/p²)^{-1}`, with `|a|, |c|`.
pub fn c_f1_quadratic(a: i64, c: i64) -> Result<f64, ConstantError> {
    if a == 0 || c == 0 {
        return Err(ConstantError::ZeroCoefficient);
    }
    let (a, c) = (a.unsigned_abs(), c.unsigned_abs());
    let mut primes = prime_divisors(a);
    primes.extend(prime_divisors(c));
    primes.sort_unstable();
    primes.dedup();
    let euler: f64 = primes
        .iter()
        .map(|&p| 1.0 / (1.0 - 1.0 / (p * p) as f64))
        .product();
    let mu = mobius(a) as f64 / a as f64 + mobius(c) as f64 / c as f64;
    Ok(mu * 6.0 / (PI * PI) * euler)
}

/// `λ_h(k) = μ(k/(k,h)) φ(k) / (k² φ(k/(k,h)))`.
pub fn lambda_h(h: i64, k: u64) -> f64 {
    let kf = factor(k).expect("k >= 1");
    let g = arith::gcd_i(h, k as i64);
    let r = factor(k / g).expect("k/(k,h) >= 1");
    let m = arith::mult_functions(&r);
    let phi_k = arith::mult_functions(&kf).phi as f64;
    m.mobius as f64 * phi_k / ((k as f64) * (k as f64) * m.phi as f64)
}

/// `Σ_{ν >= 0} λ_h(p^ν)` for `p | h` with `v = v_p(h)`:
/// `1 + 1/p - p^{-v-1} - p^{-v-2}`.
pub fn lambda_local_dividing(p: u64, v: u32) -> f64 {
    let p = p as f64;
    1.0 + 1.0 / p - p.powi(-(v as i32) - 1) - p.powi(-(v as i32) - 2)
}

/// `Σ_{(k, E)=1} λ_h(k)` as a product over `p ∤ E`, truncated at `pmax`;
/// `excluded` lists the primes of `E`.
fn lambda_product(h: u64, excluded: &[u64], pmax: u64) -> EulerProduct {
    let base = log_product(pmax, |p| !excluded.contains(&p), |p| -1.0 / (p * p));
    let mut value = base;
    for p in prime_divisors(h) {
        if excluded.contains(&p) {
            continue;
        }
        let local = lambda_local_dividing(p, valuation(h, p));
        let generic = if p <= pmax {
            1.0 - 1.0 / (p * p) as f64
        } else {
            1.0
        };
        value *= local / generic;
    }
    // the missing factors lie in (1 - 1/(pmax - 1), 1]
    EulerProduct {
        value,
        pmax,
        tail_bound: value.abs() / (pmax as f64 - 1.0).max(1.0),
    }
}

/// The finite factors of one of the two symmetric terms:
/// `μ(c/(c,h))/φ(c/(c,h)) ∏_{p | cΔ₁} (1 - 1/p) ∏_{p | Δ₁, p ∤ ac} (1 + 1/p)`.
fn finite_prefactor(h: u64, a: u64, c: u64, delta1: u64) -> f64 {
    let red = c / gcd(c, h);
    let mu = mobius(red) as f64;
    if mu == 0.0 {
        return 0.0;
    }
    let phi_red = arith::euler_phi(red) as f64;
    let mut cd = prime_divisors(c);
    cd.extend(prime_divisors(delta1));
    cd.sort_unstable();
    cd.dedup();
    let density: f64 = cd.iter().map(|&p| 1.0 - 1.0 / p as f64).product();
    let mut extra = 1.0;
    for p in prime_divisors(delta1) {
        if a % p != 0 && c % p != 0 {
            extra *= 1.0 + 1.0 / p as f64;
        }
    }
    mu * density / phi_red * extra
}

/// One term `C₁(h, a, c, Δ)`, for `(h, acΔ) = 1`, as a truncated product.
pub fn c1(h: i64, a: i64, c: i64, delta: i64, pmax: u64) -> Result<EulerProduct, ConstantError> {
    check_pmax(pmax)?;
    if h == 0 {
        return Err(ConstantError::ZeroFrequency);
    }
    if a == 0 || c == 0 || delta == 0 {
        return Err(ConstantError::ZeroCoefficient);
    }
    let (h, a, c, delta) = (
        h.unsigned_abs(),
        a.unsigned_abs(),
        c.unsigned_abs(),
        delta.unsigned_abs(),
    );
    let g = gcd(h, a) * gcd(h, c) * gcd(h, delta);
    if g != 1 {
        return Err(ConstantError::NotCoprime(g));
    }
    Ok(symmetric_term(h, a, c, delta, &[], pmax))
}

/// `C₁(h, a, c, Δ)` with the Euler product in closed form through `6/π²`.
pub fn c1_closed_form(h: i64, a: i64, c: i64, delta: i64) -> Result<f64, ConstantError> {
    if h == 0 {
        return Err(ConstantError::ZeroFrequency);
    }
    if a == 0 || c == 0 || delta == 0 {
        return Err(ConstantError::ZeroCoefficient);
    }
    let (h, a, c, delta) = (
        h.unsigned_abs(),
        a.unsigned_abs(),
        c.unsigned_abs(),
        delta.unsigned_abs(),
    );
    let g = gcd(h, a) * gcd(h, c) * gcd(h, delta);
    if g != 1 {
        return Err(ConstantError::NotCoprime(g));
    }
    let mut all = prime_divisors(a);
    all.extend(prime_divisors(c));
    all.extend(prime_divisors(delta));
    all.extend(prime_divisors(h));
    all.sort_unstable();
    all.dedup();
    let mut value = 6.0 / (PI * PI) * finite_prefactor(h, a, c, delta);
    for &p in &all {
        value /= 1.0 - 1.0 / (p * p) as f64;
    }
    for p in prime_divisors(h) {
        value *= lambda_local_dividing(p, valuation(h, p));
    }
    Ok(value)
}

/// `prefactor × Σ_{(k, acΔ E)=1} λ_h(k)`, with `E` the primes in `coprime_to`.
fn symmetric_term(
    h: u64,
    a: u64,
    c: u64,
    delta1: u64,
    coprime_to: &[u64],
    pmax: u64,
) -> EulerProduct {
    let mut excluded = prime_divisors(a);
    excluded.extend(prime_divisors(c));
    excluded.extend(prime_divisors(delta1));
    excluded.extend_from_slice(coprime_to);
    excluded.sort_unstable();
    excluded.dedup();
    let pre = finite_prefactor(h, a, c, delta1);
    let lp = lambda_product(h, &excluded, pmax);
    EulerProduct {
        value: pre * lp.value,
        pmax,
        tail_bound: pre.abs() * lp.tail_bound,
    }
}

/// All `δ <= dmax` whose prime factors lie in `primes`, ascending.
pub fn smooth_numbers(primes: &[u64], dmax: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for &p in primes {
        let mut next = Vec::new();
        for &d in &out {
            let mut m = d;
            while let Some(v) = m.checked_mul(p).filter(|&v| v <= dmax) {
                next.push(v);
                m = v;
            }
        }
        out.extend(next);
    }
    out.sort_unstable();
    out
}

/// `Σ_{f(r₀) ≡ 0 (δ)} c_δ(h r₀)`, the sum over `α` coprime to `δ` of the
/// local root sums `Σ e(h r₀ ᾱ/δ)`.
pub fn delta_root_sum(f: &FactoredPoly, h: i64, delta: u64) -> i64 {
    let fd = factor(delta).expect("δ >= 1");
    let roots = f.roots_mod_n(&fd).expect("δ within range");
    let hd = arith::rem_euclid(h, delta);
    roots
        .residues
        .iter()
        .map(|&r| ramanujan(&fd, arith::mul_mod(hd, r, delta) as i64))
        .sum()
}

/// `Σ_{δ > dmax, δ | P^∞} 1/δ` bounded by Rankin's trick.
fn smooth_reciprocal_tail(primes: &[u64], dmax: u64) -> f64 {
    if primes.is_empty() {
        return 0.0;
    }
    (1..100)
        .map(|i| {
            let s = i as f64 / 100.0;
            let prod: f64 = primes
                .iter()
                .map(|&p| 1.0 / (1.0 - (p as f64).powf(-s)))
                .product();
            (dmax as f64).powf(s - 1.0) * prod
        })
        .fold(f64::INFINITY, f64::min)
}

/// Splits `n` into its part supported on `primes` and the rest.
fn split_by(n: u64, primes: &[u64]) -> (u64, u64) {
    let mut rest = n;
    for &p in primes {
        while rest % p == 0 {
            rest /= p;
        }
    }
    (n / rest, rest)
}

/// `(1/M) Σ e(h d \overline{c'λ} / c_P)` over units `λ mod M` with
/// `λ ≡ α (mod δ)`, where `M = lcm(δ, c_P, rad P)`.
fn class_weight(
    h: i64,
    d: i64,
    c_rest: u64,
    c_p: u64,
    delta: u64,
    rad_p: u64,
    alpha: u64,
) -> Complex64 {
    let lcm = |x: u64, y: u64| x / gcd(x, y) * y;
    let m = lcm(lcm(delta, c_p), rad_p);
    let hd = mul_mod(rem_euclid(h, c_p), rem_euclid(d, c_p), c_p);
    let mut acc = ComplexAccumulator::new();
    let mut lam = alpha;
    while lam < m {
        if gcd(lam, rad_p) == 1 {
            let inv = inv_mod_u(mul_mod(c_rest % c_p, lam % c_p, c_p), c_p).expect("unit");
            acc.add(e_frac(mul_mod(hd, inv, c_p), c_p));
        }
        lam += delta;
    }
    acc.value() / m as f64
}

/// `C(f, h)` for `f = (aX + b)(cX + d)` and any nonzero `h`.
///
/// Let `P` be the primes of `(h, acΔ)` and `Δ₁` the part of `Δ` prime to
/// `h`. Writing `n = δm` with `δ | P^∞` and `(m, P) = 1`,
///
/// `C = Σ_δ δ^{-1} Σ_{α ∈ (Z/δ)^*} G_δ(α) [T(a_δ, c_δ) W_c(δ, α) + T(c_δ, a_δ) W_a(δ, α)]`
///
/// where `G_δ(α) = Σ_{f(ρ) ≡ 0 (δ)} e(hρᾱ/δ)`, `(a_δ X + b_δ)(c_δ X + d_δ)`
/// is `f(δX)` with each factor made primitive, `T` is the coprime-case term
/// for the part of the coefficients prime to `P`, and `W` is
/// [`class_weight`], which carries the `P`-part of the coefficient together
/// with the condition `m ≡ α (mod δ)`. With `P` empty this is
/// `C₁(h, a, c, Δ) + C₁(h, c, a, Δ)`.
pub fn c_general(
    f: &FactoredPoly,
    h: i64,
    delta_max: u64,
    pmax: u64,
) -> Result<EulerProduct, ConstantError> {
    check_pmax(pmax)?;
    if h == 0 {
        return Err(ConstantError::ZeroFrequency);
    }
    if delta_max == 0 || delta_max > MAX_DELTA_MAX {
        return Err(ConstantError::BadDeltaMax(delta_max));
    }
    let &[(a, b), (c, d)] = f.linear_factors() else {
        return Err(ConstantError::NotTwoLinear);
    };
    if f.has_x2p1() {
        return Err(ConstantError::NotTwoLinear);
    }
    let (a, b) = if a < 0 { (-a, -b) } else { (a, b) };
    let (c, d) = if c < 0 { (-c, -d) } else { (c, d) };
    let delta = (a as i128 * d as i128 - b as i128 * c as i128).unsigned_abs() as u64;
    let hu = h.unsigned_abs();
    let (au, cu) = (a as u64, c as u64);
    let big_p: Vec<u64> = prime_divisors(hu)
        .into_iter()
        .filter(|&p| au % p == 0 || cu % p == 0 || delta % p == 0)
        .collect();
    let rad_p: u64 = big_p.iter().product();
    let (delta_p, delta1) = split_by(delta, &big_p);
    let mut excluded = prime_divisors(au);
    excluded.extend(prime_divisors(cu));
    excluded.extend(prime_divisors(delta1));
    excluded.extend_from_slice(&big_p);
    excluded.sort_unstable();
    excluded.dedup();
    let lp = lambda_product(hu, &excluded, pmax);

    let mut value = Complex64::new(0.0, 0.0);
    let mut weight = 0.0;
    for dd in smooth_numbers(&big_p, delta_max) {
        let roots = f
            .roots_mod_n(&factor(dd).expect("δ >= 1"))
            .expect("δ in range")
            .residues;
        if roots.is_empty() {
            continue;
        }
        // f(δX) with primitive factors
        let g1 = gcd(dd, b.unsigned_abs());
        let g2 = gcd(dd, d.unsigned_abs());
        let (ad, bd) = (au * (dd / g1), b / g1 as i64);
        let (cd, dd_) = (cu * (dd / g2), d / g2 as i64);
        let (a_p, a_rest) = split_by(ad, &big_p);
        let (c_p, c_rest) = split_by(cd, &big_p);
        let t_ac = finite_prefactor(hu, a_rest, c_rest, delta1);
        let t_ca = finite_prefactor(hu, c_rest, a_rest, delta1);
        let hd = arith::rem_euclid(h, dd);
        let mut inner = Complex64::new(0.0, 0.0);
        for alpha in (0..dd.max(1)).filter(|&x| gcd(x, dd) == 1) {
            let abar = inv_mod_u(alpha, dd).expect("unit");
            let mut g = ComplexAccumulator::new();
            for &r in &roots {
                g.add(e_frac(mul_mod(mul_mod(hd, r, dd), abar, dd), dd));
            }
            let g = g.value();
            let wc = if t_ac != 0.0 {
                class_weight(h, dd_, c_rest, c_p, dd, rad_p, alpha)
            } else {
                Complex64::new(0.0, 0.0)
            };
            let wa = if t_ca != 0.0 {
                class_weight(h, bd, a_rest, a_p, dd, rad_p, alpha)
            } else {
                Complex64::new(0.0, 0.0)
            };
            inner += g * (wc * t_ac + wa * t_ca);
        }
        value += inner / dd as f64;
        weight += roots.len() as f64 / dd as f64;
    }
    // |T| <= ∏_{p | Δ₁ h} (1 + 1/p) including the λ factors at p | h
    let t_max: f64 = prime_divisors(delta1)
        .iter()
        .chain(prime_divisors(hu).iter())
        .map(|&p| 1.0 + 1.0 / p as f64)
        .product();
    // per δ: |G| <= #roots(δ), |W| <= 1/δ, and #roots(p^e) <= 6 p^{v_p(Δ)}
    let roots_bound = 6f64.powi(big_p.len() as i32) * delta_p as f64;
    let delta_tail = 2.0 * t_max * roots_bound * smooth_reciprocal_tail(&big_p, delta_max);
    let product_tail = 2.0 * t_max * weight * lp.tail_bound;
    Ok(EulerProduct {
        value: value.re * lp.value,
        pmax,
        tail_bound: delta_tail * (lp.value.abs() + lp.tail_bound)
            + product_tail
            + value.im.abs() * lp.value.abs(),
    })
}

/// `(3/4) ∏_{p ≡ 1 (4), p <= pmax} (1 - 2/p²)`.
pub fn theorem2_constant(pmax: u64) -> Result<EulerProduct, ConstantError> {
    check_pmax(pmax)?;
    let value = 0.75 * log_product(pmax, |p| p % 4 == 1, |p| -2.0 / (p * p));
    Ok(EulerProduct {
        value,
        pmax,
        tail_bound: 2.0 * value / (pmax as f64 - 1.0),
    })
}

/// `∏_{3 <= p <= pmax} (1 - 2/p²)`.
pub fn theorem3_constant(pmax: u64) -> Result<EulerProduct, ConstantError> {
    check_pmax(pmax)?;
    let value = log_product(pmax, |p| p >= 3, |p| -2.0 / (p * p));
    Ok(EulerProduct {
        value,
        pmax,
        tail_bound: 2.0 * value / (pmax as f64 - 1.0),
    })
}

/// The same constant as [`theorem3_constant`] written as
/// `(8/π²) ∏_{3 <= p <= pmax} (1 - 1/(p² - 1))`.
pub fn theorem3_constant_via_zeta(pmax: u64) -> Result<EulerProduct, ConstantError> {
    check_pmax(pmax)?;
    let value = 8.0 / (PI * PI) * log_product(pmax, |p| p >= 3, |p| -1.0 / (p * p - 1.0));
    Ok(EulerProduct {
        value,
        pmax,
        tail_bound: value / (pmax as f64 - 1.0),
    })
}

/// Exact check of `(1 - 2/p²) = (1 - 1/p²)(1 - 1/(p² - 1))` in reduced
/// fractions.
pub fn euler_factor_identity(p: u64) -> bool {
    fn reduced(n: u128, d: u128) -> (u128, u128) {
        let (mut x, mut y) = (n, d);
        while y != 0 {
            (x, y) = (y, x % y);
        }
        (n / x, d / x)
    }
    let p2 = p as u128 * p as u128;
    let lhs = reduced(p2 - 2, p2);
    let rhs = reduced((p2 - 1) * (p2 - 2), p2 * (p2 - 1));
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(a: i64, b: i64, c: i64, d: i64) -> FactoredPoly {
        FactoredPoly::linear(&[(a, b), (c, d)]).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        assert!((c_f1_quadratic(1, 1).unwrap() - 12.0 / (PI * PI)).abs() < 1e-12);
        assert_eq!(c_f1_quadratic(4, 9).unwrap(), 0.0);
        assert!((c_f1_quadratic(1, 2).unwrap() - 4.0 / (PI * PI)).abs() < 1e-12);
        assert_eq!(c_f1_quadratic(0, 1), Err(ConstantError::ZeroCoefficient));
    }

    #[test]
    fn theorem_examples() {
        let t2 = theorem2_constant(5).unwrap();
        assert!((t2.value - 0.75 * (1.0 - 2.0 / 25.0)).abs() < 1e-15);
        let t3 = theorem3_constant(3).unwrap();
        assert!((t3.value - 7.0 / 9.0).abs() < 1e-15);
        assert_eq!(theorem3_constant(1), Err(ConstantError::BadPmax(1)));
    }

    #[test]
    fn truncations_decrease_within_tail() {
        let mut prev = theorem3_constant(1000).unwrap();
        for pmax in [10_000u64, 100_000, 1_000_000] {
            let next = theorem3_constant(pmax).unwrap();
            assert!(next.value <= prev.value);
            assert!(prev.value - next.value <= prev.tail_bound);
            prev = next;
        }
        let a = theorem2_constant(100_000).unwrap();
        let b = theorem2_constant(1_000_000).unwrap();
        assert!(b.value <= a.value && a.value - b.value <= a.tail_bound);
    }

    #[test]
    fn euler_identity_exact() {
        for p in arith::primes_below(10_000) {
            assert!(euler_factor_identity(p), "p={p}");
        }
    }

    #[test]
    fn theorem3_two_routes_agree() {
        let a = theorem3_constant(1_000_000).unwrap();
        let b = theorem3_constant_via_zeta(1_000_000).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound + b.tail_bound);
    }

    #[test]
    fn lambda_values() {
        // p ∤ h
        assert!((lambda_h(1, 3) + 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(lambda_h(1, 9), 0.0);
        // p | h, v = 1: φ(p)/p² at ν = 1, -1/p³ at ν = 2, 0 beyond
        assert!((lambda_h(2, 2) - 0.25).abs() < 1e-15);
        assert!((lambda_h(2, 4) + 0.125).abs() < 1e-15);
        assert_eq!(lambda_h(2, 8), 0.0);
        for h in [1i64, 2, 6, 12] {
            for k in 1..2000u64 {
                assert!(lambda_h(h, k).abs() <= h as f64 / (k * k) as f64 + 1e-15);
            }
        }
    }

    #[test]
    fn lambda_partial_sums_converge_to_product() {
        for h in [1i64, 2, 3, 4, 12] {
            let excluded = [5u64, 7];
            let partial: f64 = (1..200_000u64)
                .filter(|k| k % 5 != 0 && k % 7 != 0)
                .map(|k| lambda_h(h, k))
                .sum();
            let prod = lambda_product(h as u64, &excluded, 1_000_000).value;
            assert!(
                (partial - prod).abs() < 1e-3 * h as f64,
                "h={h} {partial} {prod}"
            );
        }
    }

    #[test]
    fn c1_product_matches_closed_form() {
        for (h, a, c, d) in [
            (1, 1, 1, 1),
            (2, 1, 3, 5),
            (4, 3, 1, 7),
            (9, 2, 5, 7),
            (10, 3, 7, 1),
            (1, 6, 5, 1),
        ] {
            let p = c1(h, a, c, d, 1_000_000).unwrap();
            let cf = c1_closed_form(h, a, c, d).unwrap();
            assert!(
                (p.value - cf).abs() <= p.tail_bound + 1e-12,
                "{h} {a} {c} {d}"
            );
        }
        assert_eq!(c1(2, 2, 1, 1, 1000), Err(ConstantError::NotCoprime(2)));
    }

    #[test]
    fn c1_h1_reduces_to_quadratic_formula() {
        // pairs with b, d chosen so that the factors are not proportional
        for (a, b, c, d) in [
            (1, 0, 1, 1),
            (2, 1, 3, 1),
            (4, 1, 9, 2),
            (1, 1, 2, 1),
            (5, 2, 3, 1),
            (6, 1, 1, 3),
            (7, 3, 10, 1),
        ] {
            let delta = a * d - b * c;
            let sum = c1(1, a, c, delta, 1_000_000).unwrap().value
                + c1(1, c, a, delta, 1_000_000).unwrap().value;
            let q = c_f1_quadratic(a, c).unwrap();
            assert!((sum - q).abs() < 1e-5, "({a},{b})({c},{d}): {sum} vs {q}");
        }
    }

    #[test]
    fn c1_symmetric_sum_is_label_free() {
        for (h, a, b, c, d) in [(1, 2, 1, 3, 1), (5, 3, 1, 7, 2)] {
            let d1 = a * d - b * c;
            let d2 = c * b - d * a;
            let s1 =
                c1(h, a, c, d1, 10_000).unwrap().value + c1(h, c, a, d1, 10_000).unwrap().value;
            let s2 =
                c1(h, c, a, d2, 10_000).unwrap().value + c1(h, a, c, d2, 10_000).unwrap().value;
            assert!((s1 - s2).abs() < 1e-14);
        }
    }

    #[test]
    fn general_reduces_to_c1_when_coprime() {
        let f = two(2, 1, 3, 1);
        let g = c_general(&f, 5, 1000, 100_000).unwrap();
        let s = c1(5, 2, 3, -1, 100_000).unwrap().value + c1(5, 3, 2, -1, 100_000).unwrap().value;
        assert!((g.value - s).abs() < 1e-12);
    }

    #[test]
    fn smooth_enumeration() {
        assert_eq!(
            smooth_numbers(&[2, 3], 20),
            vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]
        );
        assert_eq!(smooth_numbers(&[], 20), vec![1]);
    }

    #[test]
    fn delta_root_sums_for_n_n_plus_2() {
        let f = two(1, 0, 1, 2);
        let g: Vec<i64> = [1u64, 2, 4, 8, 16, 32]
            .iter()
            .map(|&d| delta_root_sum(&f, 2, d))
            .collect();
        assert_eq!(g, vec![1, 1, 4, 0, 16, 32]);
    }
    #[test]
    fn general_matches_sieve_when_not_coprime() {
        for (f, h) in [
            (two(1, 0, 1, 2), 2i64),
            (two(2, 1, 1, 1), 2),
            (two(4, 1, 9, 2), 6),
        ] {
            let g = c_general(&f, h, 100_000, 100_000).unwrap();
            let x = 1_000_000u64;
            let (_, s, _) = crate::expsums::s_sieve(&f, x, h, &[], 0)
                .unwrap()
                .last()
                .unwrap();
            assert!(
                (s.re / x as f64 - g.value).abs() < 0.02,
                "{} vs {}",
                s.re / x as f64,
                g.value
            );
        }
    }

    #[test]
    fn general_truncation_change_within_tail() {
        let f = two(1, 0, 1, 2);
        let a = c_general(&f, 2, 1000, 100_000).unwrap();
        let b = c_general(&f, 2, 10_000, 100_000).unwrap();
        assert!((a.value - b.value).abs() <= a.tail_bound);
    }

    #[test]
    fn quadratic_constant_matches_sieve_at_h1() {
        for (f, a, c) in [(two(1, 0, 2, 1), 1, 2), (two(1, 0, 1, 1), 1, 1)] {
            let x = 1_000_000u64;
            let (_, s, _) = crate::expsums::s_sieve(&f, x, 1, &[], 0)
                .unwrap()
                .last()
                .unwrap();
            let q = c_f1_quadratic(a, c).unwrap();
            assert!(
                (s.re / x as f64 - q).abs() < 0.01,
                "{} vs {q}",
                s.re / x as f64
            );
        }
    }
}
