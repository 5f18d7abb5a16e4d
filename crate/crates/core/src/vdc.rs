//! Short inverse sums and the q-analogue van der Corput inequalities.
//!
//! Implied constants of the `≪` bounds are measured over fixed grids and
//! committed below as calibration maxima.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{factor, gcd, inv_mod, is_prime, mul_mod, rem_euclid};
use crate::expsums::{e_frac, ComplexAccumulator, SweepReport};

/// Longest interval accepted by [`short_sum_exact`].
pub const SHORT_SUM_LIMIT: u64 = 10_000_000;
/// Largest `k` for the subset enumeration.
pub const SUBSET_K_LIMIT: usize = 20;
/// Moduli (`q` and `δ`) are capped so residue products fit a `u128`.
pub const MODULUS_LIMIT: u64 = 1 << 40;

/// Empirical maximum of `|short sum| / lemma_exp_bound` over [`exp_grid`].
pub const EXP_CALIBRATION: f64 = 0.876713;
/// Empirical maximum of `|short sum| / lemma_akb_bound` over [`akb_grid`].
pub const AKB_CALIBRATION: f64 = 0.062024;
/// Empirical maximum of `lhs / rhs` in [`a_process_check`] over
/// [`a_process_sweep`] with [`A_PROCESS_SEED`] and [`A_PROCESS_TRIALS`].
pub const A_PROCESS_CALIBRATION: f64 = 0.684669;
pub const A_PROCESS_SEED: u64 = 0x5eed_a9c0;
pub const A_PROCESS_TRIALS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VdcError {
    #[error("interval length {0} exceeds the direct-evaluation limit")]
    Scale(u64),
    #[error("modulus must be positive and at most 2^40")]
    Modulus,
    #[error("gcd(alpha*delta, q) = {0}")]
    NotCoprime(u64),
    #[error("zero denominator polynomial")]
    ZeroDenominator,
    #[error("q = {0} is not squarefree (or its factors are not coprime)")]
    NotSquarefree(u64),
    #[error("L = {l} outside [1, N/q2] with N/q2 = {max}")]
    LRange { l: u64, max: u64 },
    #[error("k = {0} too large for subset enumeration")]
    TooManyShifts(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("table length does not match its modulus")]
    Table,
}

/// `Σ_{A<n≤A+N, (n,q)=1} e(α n̄/q + R(n)/δ)` with `R = num/den` read
/// modulo `δ`. Coefficients are listed from the constant term up.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortSumSpec {
    pub start: i64,
    pub len: u64,
    pub alpha: i64,
    pub q: u64,
    pub delta: u64,
    pub num: Vec<i64>,
    pub den: Vec<i64>,
}

impl ShortSumSpec {
    /// Sum with `R = 0`.
    pub fn new(start: i64, len: u64, alpha: i64, q: u64) -> Result<Self, VdcError> {
        Self::with_rational(start, len, alpha, q, 1, vec![], vec![1])
    }

    pub fn with_rational(
        start: i64,
        len: u64,
        alpha: i64,
        q: u64,
        delta: u64,
        num: Vec<i64>,
        den: Vec<i64>,
    ) -> Result<Self, VdcError> {
        if q == 0 || delta == 0 || q > MODULUS_LIMIT || delta > MODULUS_LIMIT {
            return Err(VdcError::Modulus);
        }
        if den.iter().all(|&c| c == 0) {
            return Err(VdcError::ZeroDenominator);
        }
        let g = gcd(mul_mod(rem_euclid(alpha, q), delta % q, q), q);
        if g != 1 {
            return Err(VdcError::NotCoprime(g));
        }
        Ok(ShortSumSpec {
            start,
            len,
            alpha,
            q,
            delta,
            num,
            den,
        })
    }

    /// `R(n) mod δ`, or `None` when the denominator is not invertible.
    pub fn rational_residue(&self, n: i64) -> Option<u64> {
        if self.delta == 1 {
            return Some(0);
        }
        let top = eval_signed(&self.num, n, self.delta);
        let bottom = eval_signed(&self.den, n, self.delta);
        let inv = inv_mod(bottom as i64, self.delta)?;
        Some(mul_mod(top, inv, self.delta))
    }
}

fn eval_signed(coeffs: &[i64], n: i64, m: u64) -> u64 {
    let x = rem_euclid(n, m);
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| (mul_mod(acc, x, m) + rem_euclid(c, m)) % m)
}

/// Direct evaluation of the short sum; terms with a non-invertible
/// denominator of `R` are dropped.
pub fn short_sum_exact(spec: &ShortSumSpec) -> Result<Complex64, VdcError> {
    if spec.len > SHORT_SUM_LIMIT {
        return Err(VdcError::Scale(spec.len));
    }
    let alpha = rem_euclid(spec.alpha, spec.q);
    let mut acc = ComplexAccumulator::new();
    for i in 1..=spec.len as i64 {
        let n = spec.start + i;
        let Some(inv) = inv_mod(n, spec.q) else {
            continue;
        };
        let Some(r) = spec.rational_residue(n) else {
            continue;
        };
        acc.add(e_frac(mul_mod(alpha, inv, spec.q), spec.q) * e_frac(r, spec.delta));
    }
    Ok(acc.value())
}

/// Numerator and denominator of the twice-differenced phase
/// `λ[n̄ − (n+s₃)‾ − (n+s₂)‾ + (n+s₂+s₃)‾]` with `λ = α·(q₂q₃)⁻¹ mod q₁`,
/// as a rational function reduced modulo `q₁`.
pub fn differenced_phase(
    alpha: i64,
    q2q3: u64,
    s2: i64,
    s3: i64,
    q1: u64,
) -> Result<(Vec<i64>, Vec<i64>), VdcError> {
    if q1 == 0 || q1 > MODULUS_LIMIT {
        return Err(VdcError::Modulus);
    }
    let inv = inv_mod(q2q3 as i64, q1).ok_or(VdcError::NotCoprime(gcd(q2q3, q1)))?;
    let lambda = mul_mod(rem_euclid(alpha, q1), inv, q1);
    let lin = |s: i64| vec![rem_euclid(s, q1), 1u64];
    let shifts = [0i64, s3, s2, s2 + s3];
    let signs = [1u64, q1 - 1, q1 - 1, 1];
    let mut num = vec![0u64; 4];
    for (k, &sign) in signs.iter().enumerate() {
        // product of the three linear factors other than the k-th
        let mut prod = vec![1u64];
        for (j, &s) in shifts.iter().enumerate() {
            if j != k {
                prod = poly_mul(&prod, &lin(s), q1);
            }
        }
        for (c, p) in num.iter_mut().zip(prod) {
            *c = (*c + mul_mod(mul_mod(p, sign % q1, q1), lambda, q1)) % q1;
        }
    }
    let mut den = vec![1u64];
    for &s in &shifts {
        den = poly_mul(&den, &lin(s), q1);
    }
    let to_signed = |v: Vec<u64>| v.into_iter().map(|c| c as i64).collect();
    Ok((to_signed(num), to_signed(den)))
}

fn poly_mul(a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, m)) % m;
        }
    }
    out
}

/// Right-hand side of the three-factor bound with implied constant 1.
pub fn lemma_exp_bound(n: f64, q1: f64, q2: f64, q3: f64, delta: f64, omega_q1: u32) -> f64 {
    n.sqrt() * q3.sqrt()
        + n.powf(0.75) * q2.powf(0.25)
        + n.powf(0.75)
            * q1.powf(0.125)
            * delta.powf(0.25)
            * 3f64.powi(omega_q1 as i32)
            * (n / q1 + (q1 * delta).ln()).powf(0.25)
}

/// Right-hand side of the `k`-fold bound, `qs = [q₀, q₁, …, q_k]`, implied
/// constant 1. The product of the `qs` must be squarefree.
pub fn lemma_akb_bound(n: f64, qs: &[u64], delta: f64) -> Result<f64, VdcError> {
    if qs.len() < 2 || qs.contains(&0) {
        return Err(VdcError::Modulus);
    }
    let mut log_q = 0.0;
    for (i, &a) in qs.iter().enumerate() {
        if !factor(a).map_err(|_| VdcError::Modulus)?.is_squarefree() {
            return Err(VdcError::NotSquarefree(a));
        }
        if let Some(&b) = qs[..i].iter().find(|&&b| gcd(a, b) != 1) {
            return Err(VdcError::NotSquarefree(gcd(a, b)));
        }
        log_q += (a as f64).ln();
    }
    let k = qs.len() - 1;
    let q0 = qs[0] as f64;
    let omega = factor(qs[0])
        .map_err(|_| VdcError::Modulus)?
        .factors()
        .len() as i32;
    let mut total = 0.0;
    for (j, &qj) in qs.iter().enumerate().skip(1) {
        let e = 0.5f64.powi(j as i32);
        total += n.powf(1.0 - e) * (qj as f64).powf(e);
    }
    let ek = 0.5f64.powi(k as i32);
    let base = (2f64.powi(k as i32 + 2) + 4.0).powf(ek);
    total += n.powf(1.0 - ek)
        * q0.powf(ek / 2.0)
        * delta.powf(ek)
        * base.powi(omega)
        * ((n / q0).powf(ek) + log_q.powf(ek));
    Ok(total)
}

/// Both sides of the A-process inequality for `Ψ₁` of period `q₁`, `Ψ₂` of
/// period `q₂` (given as tables), `J = (A, A+N]` and shift bound `L`.
pub fn a_process_check(
    psi1: &[Complex64],
    psi2: &[Complex64],
    start: i64,
    len: u64,
    l: u64,
) -> Result<(f64, f64), VdcError> {
    let (q1, q2) = (psi1.len() as u64, psi2.len() as u64);
    if q1 == 0 || q2 == 0 {
        return Err(VdcError::Table);
    }
    if gcd(q1, q2) != 1 {
        return Err(VdcError::NotCoprime(gcd(q1, q2)));
    }
    if len > SHORT_SUM_LIMIT {
        return Err(VdcError::Scale(len));
    }
    let max = len / q2;
    if l == 0 || l > max {
        return Err(VdcError::LRange { l, max });
    }
    let at = |t: &[Complex64], n: i64| t[rem_euclid(n, t.len() as u64) as usize];
    let mut acc = ComplexAccumulator::new();
    for i in 1..=len as i64 {
        let n = start + i;
        acc.add(at(psi1, n) * at(psi2, n));
    }
    let lhs = acc.value().norm_sqr();
    let sup = psi2.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nf = len as f64;
    let mut shifted = 0.0;
    for ell in 1..=l as i64 {
        for shift in [ell * q2 as i64, -ell * (q2 as i64)] {
            let mut s = ComplexAccumulator::new();
            for i in 1..=len as i64 {
                let n = start + i;
                let m = n + shift;
                if m > start && m <= start + len as i64 {
                    s.add(at(psi1, n) * at(psi1, m).conj());
                }
            }
            shifted += s.value().norm();
        }
    }
    let lf = l as f64;
    Ok((lhs, sup * (nf * nf / lf + nf / lf * shifted)))
}

/// True iff some `b` is hit by an odd number of subset sums of `h` in `𝔽_p`.
pub fn subset_parity_check(p: u64, h: &[u64]) -> Result<bool, VdcError> {
    if p < 3 || !is_prime(p) {
        return Err(VdcError::NotOddPrime(p));
    }
    if h.len() > SUBSET_K_LIMIT {
        return Err(VdcError::TooManyShifts(h.len()));
    }
    let mut parity = vec![false; p as usize];
    for mask in 0u32..(1 << h.len()) {
        let b = h
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(0u64, |acc, (_, &x)| (acc + x % p) % p);
        parity[b as usize] ^= true;
    }
    Ok(parity.into_iter().any(|odd| odd))
}

/// Checks every tuple of nonzero residues for odd primes `p ≤ pmax` and
/// lengths `1..=kmax`; a violation is a tuple with all subset-sum counts even.
pub fn subset_parity_sweep(pmax: u64, kmax: usize) -> Result<SweepReport, VdcError> {
    if kmax > SUBSET_K_LIMIT {
        return Err(VdcError::TooManyShifts(kmax));
    }
    let mut report = SweepReport::new();
    for p in (3..=pmax).filter(|&p| is_prime(p)) {
        for k in 1..=kmax {
            let mut h = vec![1u64; k];
            loop {
                let odd = subset_parity_check(p, &h)?;
                report.record(0.0, !odd, || format!("p={p} h={h:?}"));
                // odometer over (𝔽_p*)^k
                let mut i = 0;
                while i < k && h[i] == p - 1 {
                    h[i] = 1;
                    i += 1;
                }
                if i == k {
                    break;
                }
                h[i] += 1;
            }
        }
    }
    Ok(report)
}

/// A point of a calibration grid: the short sum and its factorization of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPoint {
    pub spec: ShortSumSpec,
    pub factors: Vec<u64>,
}

const GRID_PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 31, 101, 257, 1009, 4099];
const GRID_LENGTHS: [u64; 4] = [64, 256, 1024, 4096];

fn grid_rationals() -> [(u64, Vec<i64>, Vec<i64>); 3] {
    [
        (1, vec![], vec![1]),
        (2, vec![0, 0, 1], vec![1]),
        (4, vec![1, 0, 1], vec![1, 1]),
    ]
}

fn push_points(out: &mut Vec<GridPoint>, factors: Vec<u64>, n: u64) {
    let q: u64 = factors.iter().product();
    for (delta, num, den) in grid_rationals() {
        for alpha in [1i64, 2] {
            if gcd(alpha as u64 * delta, q) != 1 {
                continue;
            }
            for start in [0i64, n as i64 / 3] {
                let spec = ShortSumSpec::with_rational(
                    start,
                    n,
                    alpha,
                    q,
                    delta,
                    num.clone(),
                    den.clone(),
                )
                .expect("grid point is valid");
                out.push(GridPoint {
                    spec,
                    factors: factors.clone(),
                });
            }
        }
    }
}

/// Committed grid for the three-factor bound: pairwise distinct grid
/// primes (or 1) as `[q₁, q₂, q₃]` with `q₁q₂q₃ ≤ N^{3/2}`.
pub fn exp_grid() -> Vec<GridPoint> {
    let choices: Vec<u64> = std::iter::once(1).chain(GRID_PRIMES).collect();
    let mut out = Vec::new();
    for &n in &GRID_LENGTHS {
        let cap = (n as f64).powf(1.5);
        for &a in &choices {
            for &b in &choices {
                for &c in &choices {
                    let distinct = (a == 1 || (a != b && a != c)) && (b == 1 || b != c);
                    if distinct && (a * b * c) as f64 <= cap {
                        push_points(&mut out, vec![a, b, c], n);
                    }
                }
            }
        }
    }
    out
}

/// Committed grid for the `k`-fold bound, `k ∈ {1, 2, 3}`, with
/// `q₀ ≥ q₁ ≥ …` distinct grid primes and `q ≤ N^{3/2}`.
pub fn akb_grid() -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &n in &GRID_LENGTHS {
        let cap = (n as f64).powf(1.5);
        for k in 1..=3usize {
            let mut idx: Vec<usize> = (0..=k).collect();
            loop {
                let factors: Vec<u64> = idx.iter().rev().map(|&i| GRID_PRIMES[i]).collect();
                if factors.iter().product::<u64>() as f64 <= cap {
                    push_points(&mut out, factors, n);
                }
                // next strictly increasing index tuple
                let m = GRID_PRIMES.len();
                let mut i = k + 1;
                while i > 0 && idx[i - 1] == m - (k + 1) + (i - 1) {
                    i -= 1;
                }
                if i == 0 {
                    break;
                }
                idx[i - 1] += 1;
                for j in i..=k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
        }
    }
    out
}

fn max_ratio(grid: &[GridPoint], bound: impl Fn(&GridPoint) -> f64 + Sync) -> f64 {
    grid.par_iter()
        .map(|pt| {
            short_sum_exact(&pt.spec)
                .expect("grid sums are in range")
                .norm()
                / bound(pt)
        })
        .reduce(|| 0.0, f64::max)
}

/// Maximum of `|short sum| / lemma_exp_bound` over [`exp_grid`].
pub fn exp_calibration_max() -> f64 {
    max_ratio(&exp_grid(), |pt| {
        let f = &pt.factors;
        let omega = u32::from(f[0] > 1);
        lemma_exp_bound(
            pt.spec.len as f64,
            f[0] as f64,
            f[1] as f64,
            f[2] as f64,
            pt.spec.delta as f64,
            omega,
        )
    })
}

/// Maximum of `|short sum| / lemma_akb_bound` over [`akb_grid`].
pub fn akb_calibration_max() -> f64 {
    max_ratio(&akb_grid(), |pt| {
        lemma_akb_bound(pt.spec.len as f64, &pt.factors, pt.spec.delta as f64)
            .expect("grid moduli are squarefree")
    })
}

/// `lhs / rhs` of [`a_process_check`] over `trials` seeded random unimodular
/// table pairs; ratios above `limit` are violations.
pub fn a_process_sweep(seed: u64, trials: usize, limit: f64) -> SweepReport {
    const MODULI: [(u64, u64); 6] = [(7, 3), (11, 5), (13, 4), (9, 8), (31, 7), (5, 11)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<_> = (0..trials)
        .map(|i| {
            let (q1, q2) = MODULI[i % MODULI.len()];
            let mut table = |q: u64| -> Vec<Complex64> {
                (0..q)
                    .map(|_| Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU))
                    .collect()
            };
            let psi1 = table(q1);
            let psi2 = table(q2);
            let len = rng.gen_range(q2..=400);
            let l = rng.gen_range(1..=len / q2);
            let start = rng.gen_range(-500i64..500);
            (psi1, psi2, start, len, l)
        })
        .collect();
    let ratios: Vec<f64> = cases
        .par_iter()
        .map(|(p1, p2, start, len, l)| {
            let (lhs, rhs) =
                a_process_check(p1, p2, *start, *len, *l).expect("sweep parameters are valid");
            lhs / rhs
        })
        .collect();
    let mut report = SweepReport::new();
    for (i, (ratio, (p1, p2, start, len, l))) in ratios.into_iter().zip(&cases).enumerate() {
        report.record(ratio, ratio > limit, || {
            format!(
                "trial={i} q1={} q2={} A={start} N={len} L={l}",
                p1.len(),
                p2.len()
            )
        });
    }
    report
}
