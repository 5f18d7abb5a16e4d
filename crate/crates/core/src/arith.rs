//! Exact integer primitives: factorization, segmented smallest-prime-factor
//! tables, multiplicative functions, CRT and modular inverses.
//!
//! Everything works on `u64` with `u128` intermediates for products, so
//! moduli up to 2^63 are safe for `mul_mod`.

use once_cell::sync::Lazy;
use thiserror::Error;

/// Primes below this bound are kept in a static table for trial division.
pub const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Largest segment accepted by [`spf_table`].
pub const MAX_SEGMENT_LEN: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("zero has no factorization")]
    Zero,
    #[error("input {0} exceeds 2^63 - 1")]
    TooLarge(u64),
    #[error("segment [{lo}, {hi}) is empty or longer than {max}")]
    BadSegment { lo: u64, hi: u64, max: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(u64, u64),
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("product of moduli overflows u64")]
    Overflow,
}

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| primes_below(TRIAL_DIVISION_LIMIT));

/// All primes `< limit`, by a plain sieve of Eratosthenes.
pub fn primes_below(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    if limit < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; limit];
    let mut primes = Vec::with_capacity(limit / 10 + 16);
    for i in 2..limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j < limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub fn small_primes() -> &'static [u64] {
    &SMALL_PRIMES
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn rem_euclid(a: i64, m: u64) -> u64 {
    if m <= i64::MAX as u64 {
        a.rem_euclid(m as i64) as u64
    } else {
        (a as i128).rem_euclid(m as i128) as u64
    }
}

/// Multiplicative inverse of `a` modulo `m`.
///
/// `None` when `(a, m) > 1`: exponentials built from such an inverse are
/// taken to be 0. Modulo 1 the unique residue 0 is returned.
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    if m == 0 {
        return None;
    }
    if m == 1 {
        return Some(0);
    }
    inv_mod_u(rem_euclid(a, m), m)
}

/// [`inv_mod`] for an already reduced residue.
pub fn inv_mod_u(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Prime factorization with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds a factorization from `(prime, exponent)` pairs, sorting and
    /// merging them. Primality is asserted in debug builds.
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            debug_assert!(is_prime(p), "{p} is not prime");
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        let value = merged.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e));
        Factorization {
            value,
            factors: merged,
        }
    }

    pub fn one() -> Self {
        Factorization {
            value: 1,
            factors: Vec::new(),
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Prime powers `p^e` dividing the value exactly.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u32, u64)> + '_ {
        self.factors.iter().map(|&(p, e)| (p, e, p.pow(e)))
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mult(&self) -> MultValues {
        mult_functions(self)
    }
}

pub fn factor(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    if n > i64::MAX as u64 {
        return Err(ArithError::TooLarge(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        let mut large = Vec::new();
        split_large(rest, &mut large);
        large.sort_unstable();
        for p in large {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { value: n, factors })
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Deterministic Miller–Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; n is odd, composite and has no factor below 10^6.
fn pollard_rho(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Smallest-prime-factor table for `[lo, hi)`. Entries for 0 and 1 are 0.
pub fn spf_table(lo: u64, hi: u64) -> Result<Vec<u64>, ArithError> {
    if lo >= hi || hi - lo > MAX_SEGMENT_LEN {
        return Err(ArithError::BadSegment {
            lo,
            hi,
            max: MAX_SEGMENT_LEN,
        });
    }
    let len = (hi - lo) as usize;
    let mut spf = vec![0u64; len];
    for p in base_primes(hi) {
        let first = first_multiple(lo, p);
        let mut m = first;
        while m < hi {
            let slot = &mut spf[(m - lo) as usize];
            if *slot == 0 {
                *slot = p;
            }
            m += p;
        }
    }
    for (i, slot) in spf.iter_mut().enumerate() {
        let n = lo + i as u64;
        if n >= 2 && *slot == 0 {
            *slot = n;
        }
    }
    Ok(spf)
}

fn first_multiple(lo: u64, p: u64) -> u64 {
    // Start at p itself so the prime's own entry is marked by p.
    let m = lo.div_ceil(p) * p;
    m.max(p)
}

/// Primes `p` with `p * p < hi`.
pub fn base_primes(hi: u64) -> Vec<u64> {
    let root = isqrt(hi.saturating_sub(1));
    if root < TRIAL_DIVISION_LIMIT {
        SMALL_PRIMES
            .iter()
            .copied()
            .take_while(|&p| p <= root)
            .collect()
    } else {
        primes_below(root + 1)
    }
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Values of μ, φ, τ and ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultValues {
    pub mobius: i64,
    pub phi: u64,
    pub tau: u64,
    pub omega: u32,
}

pub fn mult_functions(n: &Factorization) -> MultValues {
    let mut mobius = 1i64;
    let mut phi = 1u64;
    let mut tau = 1u64;
    for &(p, e) in n.factors() {
        mobius = if e > 1 { 0 } else { -mobius };
        phi *= (p - 1) * p.pow(e - 1);
        tau *= e as u64 + 1;
    }
    MultValues {
        mobius,
        phi,
        tau,
        omega: n.factors().len() as u32,
    }
}

pub fn mobius(n: u64) -> i64 {
    factor(n).map(|f| mult_functions(&f).mobius).unwrap_or(0)
}

pub fn euler_phi(n: u64) -> u64 {
    factor(n).map(|f| mult_functions(&f).phi).unwrap_or(0)
}

/// Chinese remainder theorem for pairwise coprime moduli.
pub fn crt(residues: &[(i64, u64)]) -> Result<(u64, u64), ArithError> {
    let mut r = 0u64;
    let mut m = 1u64;
    for &(ri, mi) in residues {
        if mi == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if gcd(m, mi) != 1 {
            return Err(ArithError::NotCoprime(m, mi));
        }
        let ri = rem_euclid(ri, mi);
        let new_m = m.checked_mul(mi).ok_or(ArithError::Overflow)?;
        // r + m * t ≡ ri (mod mi)
        let inv = inv_mod_u(m % mi, mi).expect("coprime moduli");
        let diff = (ri + mi - r % mi) % mi;
        let t = mul_mod(diff, inv, mi);
        r = (r as u128 + m as u128 * t as u128) as u64;
        m = new_m;
    }
    Ok((r, m))
}

/// Squarefree part (primes to exponent one) and squarefull part.
pub fn flat_sharp_split(n: &Factorization) -> (u64, u64) {
    let flat: u64 = n
        .factors()
        .iter()
        .filter(|&&(_, e)| e == 1)
        .map(|&(p, _)| p)
        .product();
    (flat, n.value() / flat)
}

/// Splits `k = k1 * k2` with `k2 = (k, r^∞)`; also returns the radical of `k2`.
pub fn coprime_part_split(k: u64, r: u64) -> (u64, u64, u64) {
    assert!(k >= 1 && r >= 1);
    let mut k1 = k;
    loop {
        let g = gcd(k1, r);
        if g == 1 {
            break;
        }
        // Primes of g left in k1 after this pass are picked up on the next one.
        while k1 % g == 0 {
            k1 /= g;
        }
    }
    let k2 = k / k1;
    let kernel = factor(k2).expect("k2 >= 1").radical();
    (k1, k2, kernel)
}

/// Splits `n = c * d` with every prime of `c` at most `z` and every prime of `d` above `z`.
pub fn smooth_rough_split(n: u64, z: u64) -> (u64, u64) {
    assert!(n >= 1 && z >= 2);
    let f = factor(n).expect("n >= 1");
    let smooth: u64 = f
        .factors()
        .iter()
        .filter(|&&(p, _)| p <= z)
        .map(|&(p, e)| p.pow(e))
        .product();
    (smooth, n / smooth)
}
