//! Polynomials given as products of linear factors (optionally times
//! `X^2 + 1`) and their roots modulo prime powers, moduli `n`, and every
//! `n <= x`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::arith::{self, gcd_i, inv_mod_u, mul_mod, pow_mod, rem_euclid, Factorization};
use crate::sieve::{FactorSegment, PrimePower, SEGMENT_LEN};

/// Moduli handled by the sieve paths stay below this bound.
pub const MAX_MODULUS: u64 = 1 << 48;

/// Largest modulus accepted by [`roots_brute`].
pub const BRUTE_LIMIT: u64 = 1_000_000;

/// Coefficients are bounded so every pairwise resultant fits in an `i64`.
pub const MAX_COEFF: i64 = 1 << 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("leading coefficient of a linear factor is zero")]
    ZeroLeading,
    #[error("factor ({0}, {1}) has gcd(a, b) > 1")]
    NotPrimitive(i64, i64),
    #[error("factors ({0}, {1}) and ({2}, {3}) are proportional")]
    Proportional(i64, i64, i64, i64),
    #[error("coefficient magnitude exceeds {MAX_COEFF}")]
    CoefficientTooLarge,
    #[error("polynomial has no factors")]
    Empty,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootsError {
    #[error("modulus {0} exceeds the supported bound")]
    Overflow(u64),
    #[error("modulus {0} exceeds the brute-force oracle limit")]
    Scale(u64),
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// Resultant data used to locate primes where factor roots can collide.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultantData {
    /// `ad - bc` when the polynomial is exactly two linear factors.
    pub delta: Option<i64>,
    /// Product of pairwise resultants and leading coefficients; `None` on overflow.
    pub a: Option<i128>,
    /// Primes dividing some factor of `a`, ascending.
    pub bad_primes: Vec<u64>,
}

/// `∏ (a_i X + b_i)`, times `X^2 + 1` when `has_x2p1` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredPoly {
    linear: Vec<(i64, i64)>,
    has_x2p1: bool,
    h_default: i64,
    resultant: ResultantData,
}

impl FactoredPoly {
    pub fn new(linear: Vec<(i64, i64)>, has_x2p1: bool) -> Result<Self, PolyError> {
        if linear.is_empty() && !has_x2p1 {
            return Err(PolyError::Empty);
        }
        for &(a, b) in &linear {
            if a == 0 {
                return Err(PolyError::ZeroLeading);
            }
            if a.abs() > MAX_COEFF || b.abs() > MAX_COEFF {
                return Err(PolyError::CoefficientTooLarge);
            }
            if gcd_i(a, b) != 1 {
                return Err(PolyError::NotPrimitive(a, b));
            }
        }
        for (i, &(a, b)) in linear.iter().enumerate() {
            for &(c, d) in &linear[i + 1..] {
                if a * d == b * c {
                    return Err(PolyError::Proportional(a, b, c, d));
                }
            }
        }
        let resultant = resultant_data(&linear, has_x2p1);
        Ok(FactoredPoly {
            linear,
            has_x2p1,
            h_default: 1,
            resultant,
        })
    }

    /// Shorthand for a product of linear factors only.
    pub fn linear(factors: &[(i64, i64)]) -> Result<Self, PolyError> {
        Self::new(factors.to_vec(), false)
    }

    pub fn with_h_default(mut self, h: i64) -> Self {
        self.h_default = h;
        self
    }

    pub fn linear_factors(&self) -> &[(i64, i64)] {
        &self.linear
    }

    pub fn has_x2p1(&self) -> bool {
        self.has_x2p1
    }

    pub fn h_default(&self) -> i64 {
        self.h_default
    }

    pub fn degree(&self) -> usize {
        self.linear.len() + if self.has_x2p1 { 2 } else { 0 }
    }

    pub fn resultant(&self) -> &ResultantData {
        &self.resultant
    }

    /// Number of distinct irreducible factors over the rationals.
    pub fn kappa(&self) -> usize {
        self.linear.len() + usize::from(self.has_x2p1)
    }

    pub fn is_bad_prime(&self, p: u64) -> bool {
        self.resultant.bad_primes.binary_search(&p).is_ok()
    }

    /// `f(r) mod n`.
    pub fn eval_mod(&self, r: u64, n: u64) -> u64 {
        if n == 1 {
            return 0;
        }
        let r = r % n;
        let mut acc = 1u64 % n;
        for &(a, b) in &self.linear {
            let v = (mul_mod(rem_euclid(a, n), r, n) + rem_euclid(b, n)) % n;
            acc = mul_mod(acc, v, n);
        }
        if self.has_x2p1 {
            let v = (mul_mod(r, r, n) + 1) % n;
            acc = mul_mod(acc, v, n);
        }
        acc
    }

    /// `f'(r) mod n`.
    fn deriv_mod(&self, r: u64, n: u64) -> u64 {
        if n == 1 {
            return 0;
        }
        let r = r % n;
        // (value, derivative) of the running product
        let mut val = 1u64 % n;
        let mut der = 0u64;
        let mut push = |fv: u64, fd: u64| {
            der = (mul_mod(der, fv, n) + mul_mod(val, fd, n)) % n;
            val = mul_mod(val, fv, n);
        };
        for &(a, b) in &self.linear {
            let a = rem_euclid(a, n);
            push((mul_mod(a, r, n) + rem_euclid(b, n)) % n, a);
        }
        if self.has_x2p1 {
            push((mul_mod(r, r, n) + 1) % n, mul_mod(2, r, n));
        }
        der
    }

    /// Roots modulo `p^e`, sorted.
    pub fn roots_mod_prime_power(&self, p: u64, e: u32) -> Result<Vec<u64>, RootsError> {
        let q = checked_prime_power(p, e)?;
        let mut out = Vec::new();
        if self.is_bad_prime(p) {
            self.singular_roots(p, e, q, &mut out);
        } else {
            self.regular_roots(p, q, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Fast path for `p` not dividing `A`: factors have disjoint simple roots.
    fn regular_roots(&self, p: u64, q: u64, out: &mut Vec<u64>) {
        for &(a, b) in &self.linear {
            if let Some(inv) = inv_mod_u(rem_euclid(a, q), q) {
                out.push(mul_mod(rem_euclid(-b, q), inv, q));
            }
        }
        if self.has_x2p1 && p % 4 == 1 {
            let r = sqrt_minus_one_mod_prime_power(p, q);
            out.push(r);
            out.push(q - r);
        }
    }

    /// Roots mod p from each factor, then level-by-level lifting: Newton for
    /// simple roots, all `p` candidates for singular ones.
    fn singular_roots(&self, p: u64, e: u32, q: u64, out: &mut Vec<u64>) {
        let mut level = Vec::new();
        self.regular_roots_mod_p(p, &mut level);
        level.sort_unstable();
        level.dedup();
        let mut pj = p;
        for _ in 1..e {
            let next_mod = pj * p;
            let mut next = Vec::new();
            for &r in &level {
                let d = self.deriv_mod(r, p);
                if d != 0 {
                    // unique lift r + t p^j
                    let fr = self.eval_mod(r, next_mod);
                    debug_assert_eq!(fr % pj, 0);
                    let k = fr / pj;
                    let dinv = inv_mod_u(d, p).expect("p prime");
                    let t = mul_mod(p - k % p, dinv, p) % p;
                    next.push(r + t * pj);
                } else {
                    for t in 0..p {
                        let cand = r + t * pj;
                        if self.eval_mod(cand, next_mod) == 0 {
                            next.push(cand);
                        }
                    }
                }
            }
            next.sort_unstable();
            level = next;
            pj = next_mod;
        }
        debug_assert_eq!(pj, q);
        out.extend(level);
    }

    fn regular_roots_mod_p(&self, p: u64, out: &mut Vec<u64>) {
        for &(a, b) in &self.linear {
            if let Some(inv) = inv_mod_u(rem_euclid(a, p), p) {
                out.push(mul_mod(rem_euclid(-b, p), inv, p));
            }
        }
        if self.has_x2p1 {
            if p == 2 {
                out.push(1);
            } else if p % 4 == 1 {
                let r = sqrt_minus_one_mod_prime(p);
                out.push(r);
                out.push(p - r);
            }
        }
    }

    /// Roots modulo `n`, combined from its prime powers by CRT.
    pub fn roots_mod_n(&self, n: &Factorization) -> Result<RootSet, RootsError> {
        if n.value() > MAX_MODULUS {
            return Err(RootsError::Overflow(n.value()));
        }
        let mut locals = Vec::with_capacity(n.factors().len());
        for (p, e, q) in n.prime_powers() {
            locals.push((q, self.roots_mod_prime_power(p, e)?));
        }
        Ok(combine_local_roots(n.value(), &locals))
    }

    /// Oracle: scans all residues.
    pub fn roots_brute(&self, n: u64) -> Result<RootSet, RootsError> {
        if n == 0 {
            return Err(RootsError::ZeroModulus);
        }
        if n > BRUTE_LIMIT {
            return Err(RootsError::Scale(n));
        }
        let residues = (0..n).filter(|&r| self.eval_mod(r, n) == 0).collect();
        Ok(RootSet { n, residues })
    }
}

impl fmt::Display for FactoredPoly {
    /// Uses the CLI grammar, e.g. `(1,0)(1,1)*q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(a, b) in &self.linear {
            write!(f, "({a},{b})")?;
        }
        if self.has_x2p1 {
            write!(f, "*q")?;
        }
        Ok(())
    }
}

fn resultant_data(linear: &[(i64, i64)], has_x2p1: bool) -> ResultantData {
    let mut parts: Vec<i128> = Vec::new();
    for (i, &(a, b)) in linear.iter().enumerate() {
        for &(c, d) in &linear[i + 1..] {
            parts.push(a as i128 * d as i128 - b as i128 * c as i128);
        }
    }
    parts.extend(linear.iter().map(|&(a, _)| a as i128));
    if has_x2p1 {
        // X^2 + 1 is a square mod 2; it meets aX + b wherever p | a^2 + b^2.
        parts.push(2);
        parts.extend(
            linear
                .iter()
                .map(|&(a, b)| a as i128 * a as i128 + b as i128 * b as i128),
        );
    }
    let delta = match (linear, has_x2p1) {
        ([(a, b), (c, d)], false) => Some(a * d - b * c),
        _ => None,
    };
    let a = parts.iter().try_fold(1i128, |acc, &v| acc.checked_mul(v));
    let mut bad: Vec<u64> = parts
        .iter()
        .filter(|v| v.unsigned_abs() > 1)
        .flat_map(|v| {
            arith::factor(v.unsigned_abs() as u64)
                .expect("resultant parts fit in 63 bits")
                .primes()
                .collect::<Vec<_>>()
        })
        .collect();
    bad.sort_unstable();
    bad.dedup();
    ResultantData {
        delta,
        a,
        bad_primes: bad,
    }
}

fn checked_prime_power(p: u64, e: u32) -> Result<u64, RootsError> {
    match p.checked_pow(e) {
        Some(q) if q <= MAX_MODULUS => Ok(q),
        _ => Err(RootsError::Overflow(p)),
    }
}

/// A square root of -1 modulo a prime `p ≡ 1 (mod 4)`.
///
/// The non-residue is the least `z >= 2` with `z^((p-1)/2) = -1`, so the
/// result is reproducible; `z^((p-1)/4)` then squares to -1.
pub fn sqrt_minus_one_mod_prime(p: u64) -> u64 {
    assert!(p % 4 == 1, "-1 is a square only for p = 1 mod 4");
    let half = (p - 1) / 2;
    let z = (2..p)
        .find(|&z| pow_mod(z, half, p) == p - 1)
        .expect("a non-residue exists");
    let r = pow_mod(z, (p - 1) / 4, p);
    r.min(p - r)
}

/// Hensel lift of [`sqrt_minus_one_mod_prime`] to `q = p^e`.
pub fn sqrt_minus_one_mod_prime_power(p: u64, q: u64) -> u64 {
    let mut r = sqrt_minus_one_mod_prime(p);
    if q == p {
        return r;
    }
    // Newton: r <- r - (r^2 + 1) / (2r), converges p-adically.
    loop {
        let f = (mul_mod(r, r, q) + 1) % q;
        if f == 0 {
            return r;
        }
        let inv = inv_mod_u(mul_mod(2, r, q), q).expect("2r is a unit for odd p");
        r = (r + q - mul_mod(f, inv, q)) % q;
    }
}

/// Residues `r` in `[0, n)` with `f(r) ≡ 0 (mod n)`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSet {
    pub n: u64,
    pub residues: Vec<u64>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }
}

/// CRT idempotent for the factor `q` of `n`: `c ≡ (n/q)^{-1} (mod q)`.
#[inline]
pub fn crt_cofactor_inverse(n: u64, q: u64) -> u64 {
    inv_mod_u((n / q) % q, q).expect("n/q is coprime to q")
}

fn combine_local_roots(n: u64, locals: &[(u64, Vec<u64>)]) -> RootSet {
    let mut residues = vec![0u64];
    for (q, roots) in locals {
        let q = *q;
        // idempotent e_q = (n/q) * ((n/q)^{-1} mod q) mod n
        let e = mul_mod(n / q, crt_cofactor_inverse(n, q), n);
        let mut next = Vec::with_capacity(residues.len() * roots.len());
        for &acc in &residues {
            for &r in roots {
                next.push((acc + mul_mod(r, e, n)) % n);
            }
        }
        residues = next;
    }
    if n == 1 {
        residues = vec![0];
    }
    residues.sort_unstable();
    RootSet { n, residues }
}

/// Number of roots of `X^2 + 1` modulo `m`.
pub fn rho(m: &Factorization) -> u64 {
    m.factors()
        .iter()
        .map(|&(p, e)| match p {
            2 => u64::from(e == 1),
            _ if p % 4 == 1 => 2,
            _ => 0,
        })
        .product()
}

/// Root lists for the finitely many primes dividing `A`, precomputed up to a
/// bound; other primes are solved on the fly.
#[derive(Debug, Clone)]
pub struct LocalRootSolver {
    poly: FactoredPoly,
    singular: HashMap<(u64, u32), Vec<u64>>,
}

impl LocalRootSolver {
    pub fn new(poly: &FactoredPoly, x: u64) -> Result<Self, RootsError> {
        if x > MAX_MODULUS {
            return Err(RootsError::Overflow(x));
        }
        let mut singular = HashMap::new();
        for &p in &poly.resultant.bad_primes {
            let mut e = 1;
            while p.checked_pow(e).is_some_and(|q| q <= x) {
                singular.insert((p, e), poly.roots_mod_prime_power(p, e)?);
                e += 1;
            }
        }
        Ok(LocalRootSolver {
            poly: poly.clone(),
            singular,
        })
    }

    pub fn poly(&self) -> &FactoredPoly {
        &self.poly
    }

    /// Writes the roots modulo `pp.q` into `out` (cleared first), unsorted.
    pub fn local_roots(&self, pp: PrimePower, out: &mut Vec<u64>) {
        out.clear();
        if let Some(r) = self.singular.get(&(pp.p, pp.e)) {
            out.extend_from_slice(r);
        } else if self.poly.is_bad_prime(pp.p) {
            out.extend(
                self.poly
                    .roots_mod_prime_power(pp.p, pp.e)
                    .expect("bounded modulus"),
            );
        } else {
            self.poly.regular_roots(pp.p, pp.q, out);
        }
    }
}

/// Calls `visitor(n, roots)` for `n = 1..=x` in ascending order.
pub fn enumerate_roots_up_to<F>(f: &FactoredPoly, x: u64, mut visitor: F) -> Result<(), RootsError>
where
    F: FnMut(u64, &RootSet),
{
    let solver = LocalRootSolver::new(f, x)?;
    let base = arith::base_primes(x + 1);
    let mut scratch = Vec::new();
    let mut lo = 1;
    while lo <= x {
        let hi = (lo + SEGMENT_LEN).min(x + 1);
        let seg = FactorSegment::new(lo, hi, &base).expect("segment within bounds");
        for (n, fs) in seg.iter() {
            let mut locals = Vec::with_capacity(fs.len());
            for &pp in fs {
                solver.local_roots(pp, &mut scratch);
                locals.push((pp.q, scratch.clone()));
            }
            visitor(n, &combine_local_roots(n, &locals));
        }
        lo = hi;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;

    fn fp(lin: &[(i64, i64)], q: bool) -> FactoredPoly {
        FactoredPoly::new(lin.to_vec(), q).unwrap()
    }

    pub(crate) fn family() -> Vec<FactoredPoly> {
        vec![
            fp(&[(1, 0), (1, 1)], false),
            fp(&[(2, 1), (3, 1)], false),
            fp(&[(4, 1), (9, 2)], false),
            fp(&[(1, 0), (1, 1), (2, 1)], false),
            fp(&[(1, 0), (1, 1), (2, 1), (3, 1)], false),
            fp(&[(1, 0)], true),
        ]
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FactoredPoly::linear(&[(0, 1)]), Err(PolyError::ZeroLeading));
        assert_eq!(
            FactoredPoly::linear(&[(2, 4)]),
            Err(PolyError::NotPrimitive(2, 4))
        );
        assert_eq!(
            FactoredPoly::linear(&[(1, 1), (-1, -1)]),
            Err(PolyError::Proportional(1, 1, -1, -1))
        );
        assert_eq!(FactoredPoly::new(vec![], false), Err(PolyError::Empty));
    }

    #[test]
    fn resultant_values() {
        let f = fp(&[(1, 0), (1, 1)], false);
        assert_eq!(f.resultant().delta, Some(1));
        assert_eq!(f.resultant().a, Some(1));
        assert!(f.resultant().bad_primes.is_empty());
        let g = fp(&[(2, 1), (3, 1)], false);
        assert_eq!(g.resultant().delta, Some(-1));
        assert_eq!(g.resultant().bad_primes, vec![2, 3]);
        let t = fp(&[(1, 0), (1, 1), (2, 1)], false);
        // (1*1-0*1)(1*1-0*2)(1*1-1*2) * 1*1*2
        assert_eq!(t.resultant().a, Some(-2));
        assert_eq!(fp(&[(1, 0)], true).resultant().bad_primes, vec![2]);
    }

    #[test]
    fn prime_power_examples() {
        let f = fp(&[(1, 0), (1, 1)], false);
        assert_eq!(f.roots_mod_prime_power(3, 1).unwrap(), vec![0, 2]);
        let q = FactoredPoly::new(vec![], true).unwrap();
        assert_eq!(q.roots_mod_prime_power(5, 1).unwrap(), vec![2, 3]);
        assert!(q.roots_mod_prime_power(2, 2).unwrap().is_empty());
        assert_eq!(q.roots_mod_prime_power(2, 1).unwrap(), vec![1]);
        assert!(q.roots_mod_prime_power(3, 4).unwrap().is_empty());
        assert!(matches!(
            f.roots_mod_prime_power(2, 60),
            Err(RootsError::Overflow(_))
        ));
    }

    #[test]
    fn mod_n_examples() {
        let f = fp(&[(1, 0), (1, 1)], false);
        assert_eq!(
            f.roots_mod_n(&factor(6).unwrap()).unwrap().residues,
            vec![0, 2, 3, 5]
        );
        let g = fp(&[(1, 0)], true);
        assert_eq!(
            g.roots_mod_n(&factor(5).unwrap()).unwrap().residues,
            vec![0, 2, 3]
        );
        for h in family() {
            assert_eq!(
                h.roots_mod_n(&Factorization::one()).unwrap().residues,
                vec![0]
            );
        }
    }

    #[test]
    fn brute_examples() {
        let f = fp(&[(1, 0), (1, 1), (2, 1)], false);
        assert_eq!(f.roots_brute(5).unwrap().residues, vec![0, 2, 4]);
        let g = fp(&[(2, 1), (3, 1)], false);
        assert_eq!(g.roots_brute(2).unwrap().residues, vec![1]);
        assert_eq!(
            g.roots_brute(BRUTE_LIMIT + 1),
            Err(RootsError::Scale(BRUTE_LIMIT + 1))
        );
    }

    #[test]
    fn oracle_equivalence_family() {
        for f in family() {
            for n in 1..=3000u64 {
                let fast = f.roots_mod_n(&factor(n).unwrap()).unwrap();
                assert_eq!(fast, f.roots_brute(n).unwrap(), "f={f} n={n}");
            }
        }
    }

    #[test]
    fn singular_lifting_high_powers() {
        // n(n+2): Δ = 2, roots collide mod 2
        let f = fp(&[(1, 0), (1, 2)], false);
        for e in 1..=12 {
            let q = 1u64 << e;
            assert_eq!(
                f.roots_mod_prime_power(2, e).unwrap(),
                f.roots_brute(q).unwrap().residues,
                "2^{e}"
            );
        }
        // (n+1)(n+10): Δ = 9
        let g = fp(&[(1, 1), (1, 10)], false);
        for e in 1..=7 {
            let q = 3u64.pow(e);
            assert_eq!(
                g.roots_mod_prime_power(3, e).unwrap(),
                g.roots_brute(q).unwrap().residues
            );
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&factor(3).unwrap()), 0);
        assert_eq!(rho(&factor(5).unwrap()), 2);
        assert_eq!(rho(&factor(65).unwrap()), 4);
        let q = FactoredPoly::new(vec![], true).unwrap();
        for m in 1..=2000u64 {
            assert_eq!(
                rho(&factor(m).unwrap()),
                q.roots_brute(m).unwrap().len() as u64,
                "m={m}"
            );
        }
    }

    #[test]
    fn sqrt_minus_one() {
        for p in crate::arith::primes_below(5000)
            .into_iter()
            .filter(|p| p % 4 == 1)
        {
            let r = sqrt_minus_one_mod_prime(p);
            assert_eq!((r * r + 1) % p, 0);
            let q = p * p * p;
            let s = sqrt_minus_one_mod_prime_power(p, q);
            assert_eq!(((s as u128 * s as u128 + 1) % q as u128), 0);
        }
    }

    #[test]
    fn enumerate_examples() {
        let f = fp(&[(1, 0), (1, 1)], false);
        let mut total = 0;
        let mut seen = Vec::new();
        enumerate_roots_up_to(&f, 10, |n, rs| {
            total += rs.len();
            seen.push(n);
        })
        .unwrap();
        assert_eq!(total, 23);
        assert_eq!(seen, (1..=10).collect::<Vec<_>>());

        let mut calls = Vec::new();
        enumerate_roots_up_to(&f, 1, |n, rs| calls.push((n, rs.clone()))).unwrap();
        assert_eq!(
            calls,
            vec![(
                1,
                RootSet {
                    n: 1,
                    residues: vec![0]
                }
            )]
        );
    }

    #[test]
    fn enumerate_matches_brute() {
        for f in family() {
            enumerate_roots_up_to(&f, 2000, |n, rs| {
                assert_eq!(rs, &f.roots_brute(n).unwrap());
            })
            .unwrap();
        }
    }

    #[test]
    fn multiplicativity_and_bounds() {
        for f in family() {
            for m in 1..=60u64 {
                for n in 1..=60u64 {
                    if crate::arith::gcd(m, n) != 1 {
                        continue;
                    }
                    let c = |k| f.roots_mod_n(&factor(k).unwrap()).unwrap().len();
                    assert_eq!(c(m * n), c(m) * c(n));
                }
            }
            if f.has_x2p1() {
                continue;
            }
            let k = f.linear_factors().len();
            for p in crate::arith::primes_below(400) {
                if f.is_bad_prime(p) {
                    continue;
                }
                for e in 1..=3 {
                    if p.pow(e) > 1_000_000 {
                        break;
                    }
                    assert!(f.roots_mod_prime_power(p, e).unwrap().len() <= k);
                }
            }
        }
    }

    #[test]
    fn quadratic_root_count_bound_squarefree() {
        // |roots mod δ| <= sqrt|Δ| 2^ω(δ) for squarefree δ
        let polys = [
            fp(&[(1, 0), (1, 1)], false),
            fp(&[(2, 1), (3, 1)], false),
            fp(&[(1, 0), (1, 6)], false),
            fp(&[(4, 1), (9, 2)], false),
        ];
        for f in polys {
            let delta = f.resultant().delta.unwrap().unsigned_abs() as f64;
            for d in 1..=10_000u64 {
                let fac = factor(d).unwrap();
                if !fac.is_squarefree() {
                    continue;
                }
                let n = f.roots_mod_n(&fac).unwrap().len() as f64;
                assert!(n <= delta.sqrt() * 2f64.powi(fac.factors().len() as i32) + 1e-9);
            }
        }
    }
}
