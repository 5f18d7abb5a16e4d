//! The sums `S(f, x, h) = Σ_{n ≤ x} Σ_{f(r) ≡ 0 (n)} e(hr/n)`, incomplete
//! sums of modular inverses, and their predicted main terms.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, gcd, gcd_i, inv_mod_u, mul_mod, rem_euclid, Factorization};
use crate::charsums;
use crate::roots::{crt_cofactor_inverse, FactoredPoly, LocalRootSolver, RootsError, MAX_MODULUS};
use crate::sieve::{FactorSegment, SEGMENT_LEN};

/// Largest `x` accepted by [`s_naive`].
pub const NAIVE_LIMIT: u64 = 10_000;

/// Longest range accepted by the incomplete-sum routines.
pub const INCOMPLETE_RANGE_LIMIT: i64 = 10_000_000;

/// Segments handed to the thread pool per batch.
const BATCH_SEGMENTS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpSumError {
    #[error("x = {0} exceeds the limit for this routine")]
    Scale(u64),
    #[error("x must be at least 1")]
    EmptyRange,
    #[error("frequency h must be nonzero")]
    ZeroFrequency,
    #[error("checkpoint {0} is outside [1, x]")]
    BadCheckpoint(u64),
    #[error("resume point {0} is not below the requested x")]
    BadResume(u64),
    #[error("(m, q) = ({0}, {1}) are not coprime")]
    NotCoprime(u64, u64),
    #[error("modulus q = {0} is below the supported minimum")]
    SmallModulus(u64),
    #[error("range length exceeds {INCOMPLETE_RANGE_LIMIT}")]
    RangeTooLong,
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

/// `e(t/q) = exp(2πi t/q)`, with `t` reduced first.
#[inline]
pub fn e_frac(t: u64, q: u64) -> Complex64 {
    let mut frac = (t % q) as f64 / q as f64;
    if frac > 0.5 {
        frac -= 1.0;
    }
    let (s, c) = (TAU * frac).sin_cos();
    Complex64::new(c, s)
}

/// Signed-numerator variant of [`e_frac`].
#[inline]
pub fn e_frac_i(t: i64, q: u64) -> Complex64 {
    e_frac(rem_euclid(t, q), q)
}

/// Compensated (Kahan) complex sum with a count of summands.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexAccumulator {
    pub re: f64,
    pub im: f64,
    pub re_c: f64,
    pub im_c: f64,
    pub count: u64,
}

#[inline]
fn kahan(sum: &mut f64, comp: &mut f64, v: f64) {
    let y = v - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

impl ComplexAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts from a known partial sum.
    pub fn from_value(value: Complex64, count: u64) -> Self {
        ComplexAccumulator {
            re: value.re,
            im: value.im,
            re_c: 0.0,
            im_c: 0.0,
            count,
        }
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.add_terms(z, 1);
    }

    /// Adds `z` standing for `terms` summands (a grouped local product).
    #[inline]
    pub fn add_terms(&mut self, z: Complex64, terms: u64) {
        kahan(&mut self.re, &mut self.re_c, z.re);
        kahan(&mut self.im, &mut self.im_c, z.im);
        self.count += terms;
    }

    pub fn merge(&mut self, other: &ComplexAccumulator) {
        kahan(&mut self.re, &mut self.re_c, other.re);
        kahan(&mut self.re, &mut self.re_c, -other.re_c);
        kahan(&mut self.im, &mut self.im_c, other.im);
        kahan(&mut self.im, &mut self.im_c, -other.im_c);
        self.count += other.count;
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re - self.re_c, self.im - self.im_c)
    }
}

/// Partial sums recorded at ascending checkpoints.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SumSeries {
    pub checkpoints: Vec<u64>,
    pub values: Vec<Complex64>,
    pub counts: Vec<u64>,
}

impl SumSeries {
    pub fn last(&self) -> Option<(u64, Complex64, u64)> {
        let i = self.checkpoints.len().checked_sub(1)?;
        Some((self.checkpoints[i], self.values[i], self.counts[i]))
    }

    pub fn value_at(&self, x: u64) -> Option<Complex64> {
        self.checkpoints
            .binary_search(&x)
            .ok()
            .map(|i| self.values[i])
    }

    pub fn len(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.checkpoints.is_empty()
    }
}

/// Oracle: double loop over `n ≤ x` and all residues `r mod n`.
pub fn s_naive(f: &FactoredPoly, x: u64, h: i64) -> Result<ComplexAccumulator, ExpSumError> {
    if x > NAIVE_LIMIT {
        return Err(ExpSumError::Scale(x));
    }
    let mut acc = ComplexAccumulator::new();
    for n in 1..=x {
        let hn = rem_euclid(h, n);
        for r in 0..n {
            if f.eval_mod(r, n) == 0 {
                acc.add(e_frac(mul_mod(hn, r, n), n));
            }
        }
    }
    Ok(acc)
}

/// `S(f, x, h)` at each checkpoint (and at `x`), evaluated through the
/// segmented sieve. `threads = 0` uses the global rayon pool size.
pub fn s_sieve(
    f: &FactoredPoly,
    x: u64,
    h: i64,
    checkpoints: &[u64],
    threads: usize,
) -> Result<SumSeries, ExpSumError> {
    if h == 0 {
        return Err(ExpSumError::ZeroFrequency);
    }
    sieve_series(f, h, None, x, checkpoints, threads)
}

/// Continues a series produced by [`s_sieve`] from its last checkpoint up
/// to `x`; earlier checkpoints are carried over unchanged.
pub fn s_sieve_resume(
    f: &FactoredPoly,
    h: i64,
    prior: &SumSeries,
    x: u64,
    checkpoints: &[u64],
    threads: usize,
) -> Result<SumSeries, ExpSumError> {
    if h == 0 {
        return Err(ExpSumError::ZeroFrequency);
    }
    sieve_series(f, h, Some(prior), x, checkpoints, threads)
}

/// Total number of roots `Σ_{n ≤ x} #{r : f(r) ≡ 0 (n)}` at each checkpoint;
/// this is the `h = 0` evaluation of the sieve, so `values` equal `counts`.
pub fn root_count_series(
    f: &FactoredPoly,
    x: u64,
    checkpoints: &[u64],
    threads: usize,
) -> Result<SumSeries, ExpSumError> {
    sieve_series(f, 0, None, x, checkpoints, threads)
}

fn sieve_series(
    f: &FactoredPoly,
    h: i64,
    prior: Option<&SumSeries>,
    x: u64,
    checkpoints: &[u64],
    threads: usize,
) -> Result<SumSeries, ExpSumError> {
    if x == 0 {
        return Err(ExpSumError::EmptyRange);
    }
    if x > MAX_MODULUS {
        return Err(ExpSumError::Scale(x));
    }
    let (start, mut acc, mut series) = match prior.and_then(|s| s.last().map(|l| (s, l))) {
        Some((s, (x0, value, count))) => {
            if x0 >= x {
                return Err(ExpSumError::BadResume(x0));
            }
            (
                x0 + 1,
                ComplexAccumulator::from_value(value, count),
                s.clone(),
            )
        }
        None => (1, ComplexAccumulator::new(), SumSeries::default()),
    };
    let mut cuts: Vec<u64> = Vec::with_capacity(checkpoints.len() + 1);
    for &c in checkpoints {
        if c == 0 || c > x {
            return Err(ExpSumError::BadCheckpoint(c));
        }
        if c >= start {
            cuts.push(c);
        }
    }
    cuts.push(x);
    cuts.sort_unstable();
    cuts.dedup();

    let solver = LocalRootSolver::new(f, x)?;
    let base = arith::base_primes(x + 1);
    let segments: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        // segment boundaries are aligned to multiples of SEGMENT_LEN
        let mut lo = start;
        while lo <= x {
            let hi = ((lo / SEGMENT_LEN + 1) * SEGMENT_LEN).min(x + 1);
            v.push((lo, hi));
            lo = hi;
        }
        v
    };
    let run = |batch: &[(u64, u64)]| -> Vec<Vec<(u64, ComplexAccumulator)>> {
        batch
            .par_iter()
            .map(|&(lo, hi)| segment_pieces(&solver, &base, h, lo, hi, &cuts))
            .collect()
    };
    let pool = build_pool(threads)?;
    let mut next_cut = 0;
    for batch in segments.chunks(BATCH_SEGMENTS.max(4 * pool.current_num_threads())) {
        let results = pool.install(|| run(batch));
        for pieces in results {
            for (end, part) in pieces {
                acc.merge(&part);
                if next_cut < cuts.len() && end == cuts[next_cut] {
                    series.checkpoints.push(end);
                    series.values.push(acc.value());
                    series.counts.push(acc.count);
                    next_cut += 1;
                }
            }
        }
    }
    debug_assert_eq!(next_cut, cuts.len());
    Ok(series)
}

fn build_pool(threads: usize) -> Result<rayon::ThreadPool, ExpSumError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| ExpSumError::ThreadPool(e.to_string()))
}

/// Partial sums over `[lo, hi)`, split after every cut inside the segment.
/// Each piece is tagged with its last `n`.
fn segment_pieces(
    solver: &LocalRootSolver,
    base: &[u64],
    h: i64,
    lo: u64,
    hi: u64,
    cuts: &[u64],
) -> Vec<(u64, ComplexAccumulator)> {
    let seg = FactorSegment::new(lo, hi, base).expect("segment bounds checked");
    let mut pieces = Vec::new();
    let mut acc = ComplexAccumulator::new();
    let mut scratch = Vec::with_capacity(8);
    let mut ci = cuts.partition_point(|&c| c < lo);
    for (n, fs) in seg.iter() {
        let (z, count) = inner_sum(solver, h, n, fs, &mut scratch);
        acc.add_terms(z, count);
        if ci < cuts.len() && cuts[ci] == n {
            pieces.push((n, acc));
            acc = ComplexAccumulator::new();
            ci += 1;
        }
    }
    if pieces.last().is_none_or(|&(end, _)| end != hi - 1) {
        pieces.push((hi - 1, acc));
    }
    pieces
}

/// `Σ_{f(r) ≡ 0 (n)} e(hr/n)` as the product over `q = p^e ∥ n` of the local
/// sums `Σ_{f(s) ≡ 0 (q)} e(h s c_q / q)` with `c_q = (n/q)^{-1} mod q`
/// (CRT: `r/n ≡ Σ s c_q / q (mod 1)`). Returns the value and the root count.
#[inline]
fn inner_sum(
    solver: &LocalRootSolver,
    h: i64,
    n: u64,
    fs: &[crate::sieve::PrimePower],
    scratch: &mut Vec<u64>,
) -> (Complex64, u64) {
    let mut value = Complex64::new(1.0, 0.0);
    let mut count = 1u64;
    for &pp in fs {
        solver.local_roots(pp, scratch);
        if scratch.is_empty() {
            return (Complex64::new(0.0, 0.0), 0);
        }
        count *= scratch.len() as u64;
        if h == 0 {
            value *= scratch.len() as f64;
            continue;
        }
        let q = pp.q;
        let hc = mul_mod(rem_euclid(h, q), crt_cofactor_inverse(n, q), q);
        let mut local = Complex64::new(0.0, 0.0);
        for &s in scratch.iter() {
            local += e_frac(mul_mod(hc, s, q), q);
        }
        value *= local;
    }
    (value, count)
}

/// `Σ_{y<n≤z, (n,q)=1, n≡u (m)} e(t n̄/q)` by visiting every `n`.
pub fn incomplete_inverse_sum_direct(
    y: i64,
    z: i64,
    q: u64,
    t: i64,
    m: u64,
    u: i64,
) -> Result<Complex64, ExpSumError> {
    check_incomplete(y, z, q, m)?;
    let tq = rem_euclid(t, q);
    let mut acc = ComplexAccumulator::new();
    let first = y + 1 + rem_euclid(u - (y + 1), m) as i64;
    let mut n = first;
    while n <= z {
        if let Some(inv) = inv_mod_u(rem_euclid(n, q), q) {
            acc.add(e_frac(mul_mod(tq, inv, q), q));
        }
        n += m as i64;
    }
    Ok(acc.value())
}

/// Same sum as [`incomplete_inverse_sum_direct`], grouped by `n mod q`: each
/// class `a` contributes `e(t ā/q)` times the number of `n ∈ (y, z]` with
/// `n ≡ a (q)` and `n ≡ u (m)`. Cost is `O(q)` regardless of the range.
pub fn incomplete_inverse_sum(
    y: i64,
    z: i64,
    q: u64,
    t: i64,
    m: u64,
    u: i64,
) -> Result<Complex64, ExpSumError> {
    check_incomplete(y, z, q, m)?;
    let table = inverse_phase_table(q, t);
    Ok(incomplete_from_table(&table, y, z, q, m, u))
}

/// `e(t ā/q)` for every `a mod q`; `None` where `(a, q) > 1`.
pub fn inverse_phase_table(q: u64, t: i64) -> Vec<Option<Complex64>> {
    let tq = rem_euclid(t, q);
    (0..q)
        .map(|a| inv_mod_u(a, q).map(|inv| e_frac(mul_mod(tq, inv, q), q)))
        .collect()
}

/// Class-count evaluation against a precomputed [`inverse_phase_table`].
pub fn incomplete_from_table(
    table: &[Option<Complex64>],
    y: i64,
    z: i64,
    q: u64,
    m: u64,
    u: i64,
) -> Complex64 {
    let qm = (q * m) as i64;
    let inv_q_mod_m = inv_mod_u(q % m, m).expect("(m, q) = 1");
    let mut acc = ComplexAccumulator::new();
    for (a, phase) in table.iter().enumerate() {
        let Some(phase) = phase else { continue };
        // c ≡ a (q), c ≡ u (m): c = a + q * ((u - a) q^{-1} mod m)
        let a = a as i64;
        let k = mul_mod(rem_euclid(u - a, m), inv_q_mod_m, m) as i64;
        let c = a + q as i64 * k;
        let count = (z - c).div_euclid(qm) - (y - c).div_euclid(qm);
        if count != 0 {
            acc.add(*phase * count as f64);
        }
    }
    acc.value()
}

fn check_incomplete(y: i64, z: i64, q: u64, m: u64) -> Result<(), ExpSumError> {
    if q < 2 {
        return Err(ExpSumError::SmallModulus(q));
    }
    if m == 0 || gcd(m, q) != 1 {
        return Err(ExpSumError::NotCoprime(m, q));
    }
    if z < y || z - y > INCOMPLETE_RANGE_LIMIT {
        return Err(ExpSumError::RangeTooLong);
    }
    Ok(())
}

/// `((z - y)/(mq)) μ(q/(q,t)) φ(q)/φ(q/(q,t))`.
pub fn lemma1_mainterm(y: f64, z: f64, q: &Factorization, t: i64, m: u64) -> f64 {
    (z - y) / (m as f64 * q.value() as f64) * charsums::ramanujan(q, t) as f64
}

/// `√(q (t,q)) τ(q) max(log q, 1)`.
pub fn lemma1_error_scale(q: &Factorization, t: i64) -> f64 {
    let qv = q.value();
    let g = gcd_i(t, qv as i64).max(if t == 0 { qv } else { 1 });
    let tau = arith::mult_functions(q).tau as f64;
    ((qv * g) as f64).sqrt() * tau * (qv as f64).ln().max(1.0)
}

/// `|exact - main| / (√(q (t,q)) τ(q) max(log q, 1))`.
pub fn lemma1_error_ratio(
    y: i64,
    z: i64,
    q: &Factorization,
    t: i64,
    m: u64,
    u: i64,
) -> Result<f64, ExpSumError> {
    let exact = incomplete_inverse_sum(y, z, q.value(), t, m, u)?;
    let main = lemma1_mainterm(y as f64, z as f64, q, t, m);
    Ok((exact - main).norm() / lemma1_error_scale(q, t))
}

/// Outcome of a property sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub checked: u64,
    pub violations: u64,
    pub max_ratio: f64,
    /// The first violation, else where a positive `max_ratio` was attained.
    pub witness: Option<String>,
}

impl SweepReport {
    pub fn new() -> Self {
        SweepReport {
            checked: 0,
            violations: 0,
            max_ratio: 0.0,
            witness: None,
        }
    }

    /// Records one case; a violation pins the witness to the first one seen.
    pub fn record(&mut self, ratio: f64, violated: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if violated {
            if self.violations == 0 {
                self.witness = Some(witness());
            }
            self.violations += 1;
        } else if self.violations == 0 && ratio > self.max_ratio {
            self.witness = Some(witness());
        }
        self.max_ratio = self.max_ratio.max(ratio);
    }

    /// Combines reports in order, as if their cases had been recorded in turn.
    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        if self.violations == 0 && (other.violations > 0 || other.max_ratio > self.max_ratio) {
            self.witness = other.witness;
        }
        self.checked += other.checked;
        self.violations += other.violations;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self
    }
}

impl Default for SweepReport {
    fn default() -> Self {
        Self::new()
    }
}

/// Largest modulus in the committed calibration grid for `lemma1_sweep`.
pub const LEMMA1_GRID_QMAX: u64 = 5000;
/// Empirical maximum of [`lemma1_error_ratio`] over [`lemma1_sweep`] with
/// `qmax = LEMMA1_GRID_QMAX`.
pub const LEMMA1_CALIBRATION: f64 = 0.294628;

/// Incomplete inverse-sum error ratios over `2 ≤ q ≤ qmax`, `t ∈ {0, 1, 2, ⌊q/2⌋}`,
/// `m ∈ {1, 2, 3}` coprime to `q`, every class `u mod m` and the ranges
/// `(0, z]` with `z = ⌊q^e⌋`, `e ∈ {1/2, 3/4, 1, 5/4, 3/2}`. A case is a
/// violation when its ratio exceeds `limit`.
pub fn lemma1_sweep(qmax: u64, limit: f64) -> SweepReport {
    (2..=qmax)
        .into_par_iter()
        .map(|q| {
            let qf = arith::factor(q).expect("small modulus");
            let inverses: Vec<Option<u64>> = (0..q).map(|a| inv_mod_u(a, q)).collect();
            let mut ts = vec![0i64, 1, 2, (q / 2) as i64];
            ts.dedup();
            let mut report = SweepReport::new();
            for t in ts {
                let tq = rem_euclid(t, q);
                let table: Vec<Option<Complex64>> = inverses
                    .iter()
                    .map(|inv| inv.map(|i| e_frac(mul_mod(tq, i, q), q)))
                    .collect();
                let scale = lemma1_error_scale(&qf, t);
                for m in [1u64, 2, 3].into_iter().filter(|&m| gcd(m, q) == 1) {
                    for e in [0.5f64, 0.75, 1.0, 1.25, 1.5] {
                        let z = (q as f64).powf(e).floor() as i64;
                        let main = lemma1_mainterm(0.0, z as f64, &qf, t, m);
                        for u in 0..m as i64 {
                            let exact = incomplete_from_table(&table, 0, z, q, m, u);
                            let ratio = (exact - main).norm() / scale;
                            report.record(ratio, ratio > limit, || {
                                format!("q={q} t={t} m={m} u={u} z={z}")
                            });
                        }
                    }
                }
            }
            report
        })
        .reduce(SweepReport::new, SweepReport::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor;
    use std::f64::consts::PI;

    fn fp(lin: &[(i64, i64)], q: bool) -> FactoredPoly {
        FactoredPoly::new(lin.to_vec(), q).unwrap()
    }

    #[test]
    fn accumulator_beats_naive_summation() {
        let mut acc = ComplexAccumulator::new();
        let mut naive = 0.0f64;
        acc.add(Complex64::new(1.0, 0.0));
        naive += 1.0;
        for _ in 0..1_000_000 {
            acc.add(Complex64::new(1e-16, 0.0));
            naive += 1e-16;
        }
        assert!((acc.value().re - (1.0 + 1e-10)).abs() < 1e-15);
        assert_eq!(naive, 1.0);
        assert_eq!(acc.count, 1_000_001);
    }

    #[test]
    fn accumulator_merge() {
        let mut a = ComplexAccumulator::new();
        let mut b = ComplexAccumulator::new();
        let mut all = ComplexAccumulator::new();
        for k in 0..1000 {
            let z = e_frac(k, 997);
            if k < 400 {
                a.add(z)
            } else {
                b.add(z)
            }
            all.add(z);
        }
        a.merge(&b);
        assert!((a.value() - all.value()).norm() < 1e-13);
        assert_eq!(a.count, 1000);
    }

    #[test]
    fn naive_examples() {
        let f = fp(&[(1, 0), (1, 1)], false);
        let s = s_naive(&f, 2, 1).unwrap();
        assert!((s.value() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(s.count, 3);
        let one = s_naive(&f, 1, 1).unwrap();
        assert_eq!(one.value(), Complex64::new(1.0, 0.0));
        assert!(matches!(
            s_naive(&f, NAIVE_LIMIT + 1, 1),
            Err(ExpSumError::Scale(_))
        ));
    }

    #[test]
    fn sieve_matches_naive_small() {
        let f = fp(&[(1, 0), (1, 1), (2, 1)], false);
        let cps: Vec<u64> = (1..=300).collect();
        let series = s_sieve(&f, 300, 2, &cps, 1).unwrap();
        for (i, &x) in series.checkpoints.iter().enumerate() {
            let naive = s_naive(&f, x, 2).unwrap();
            assert!((series.values[i] - naive.value()).norm() < 1e-9, "x={x}");
            assert_eq!(series.counts[i], naive.count);
        }
    }

    #[test]
    fn sieve_rejects_bad_input() {
        let f = fp(&[(1, 0), (1, 1)], false);
        assert_eq!(s_sieve(&f, 10, 0, &[], 1), Err(ExpSumError::ZeroFrequency));
        assert_eq!(s_sieve(&f, 0, 1, &[], 1), Err(ExpSumError::EmptyRange));
        assert_eq!(
            s_sieve(&f, 10, 1, &[11], 1),
            Err(ExpSumError::BadCheckpoint(11))
        );
    }

    #[test]
    fn resume_matches_fresh() {
        let f = fp(&[(1, 0), (1, 1), (2, 1)], false);
        let fresh = s_sieve(&f, 200_000, 1, &[50_000, 100_000], 1).unwrap();
        let first = s_sieve(&f, 50_000, 1, &[], 1).unwrap();
        let resumed = s_sieve_resume(&f, 1, &first, 200_000, &[100_000], 1).unwrap();
        assert_eq!(resumed.checkpoints, fresh.checkpoints);
        for (a, b) in resumed.values.iter().zip(&fresh.values) {
            assert!((a - b).norm() < 1e-9);
        }
        assert_eq!(resumed.counts, fresh.counts);
        assert_eq!(
            s_sieve_resume(&f, 1, &fresh, 100, &[], 1),
            Err(ExpSumError::BadResume(200_000))
        );
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = fp(&[(1, 0)], true);
        let one = s_sieve(&f, 300_000, 1, &[1000, 100_000], 1).unwrap();
        let four = s_sieve(&f, 300_000, 1, &[1000, 100_000], 4).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn counting_path_matches_root_enumeration() {
        let f = fp(&[(2, 1), (3, 1)], false);
        let series = root_count_series(&f, 5000, &[], 1).unwrap();
        let mut total = 0u64;
        crate::roots::enumerate_roots_up_to(&f, 5000, |_, rs| total += rs.len() as u64).unwrap();
        assert_eq!(series.counts, vec![total]);
        assert_eq!(series.values[0].re, total as f64);
    }

    #[test]
    fn linear_polynomial_sum_is_x_plus_log() {
        // f(n) = n + 1 has the single root -1 mod n
        let f = fp(&[(1, 1)], false);
        let cps = [1000, 10_000, 100_000];
        let s = s_sieve(&f, 100_000, 1, &cps, 1).unwrap();
        for (i, &x) in cps.iter().enumerate() {
            let diff = (s.values[i] - Complex64::new(x as f64, 0.0)).norm();
            // real deficit ≤ Σ 2π²/n², imaginary part ≈ 2π log x
            let allowed = TAU * ((x as f64).ln() + 1.0) + 2.0 * PI * PI * PI * PI / 6.0;
            assert!(diff < allowed, "x={x} diff={diff}");
            assert_eq!(s.counts[i], x);
        }
    }

    #[test]
    fn incomplete_examples() {
        // t ≡ 0: plain count
        let v = incomplete_inverse_sum(0, 100, 6, 12, 5, 2).unwrap();
        let count = (1..=100).filter(|n| gcd(*n, 6) == 1 && n % 5 == 2).count();
        assert!((v - Complex64::new(count as f64, 0.0)).norm() < 1e-9);
        // complete period with m = 1 is the Ramanujan sum
        for q in 2..60u64 {
            for t in -5..=5 {
                let v = incomplete_inverse_sum(0, q as i64, q, t, 1, 0).unwrap();
                let c = charsums::ramanujan(&factor(q).unwrap(), t) as f64;
                assert!((v - Complex64::new(c, 0.0)).norm() < 1e-9, "q={q} t={t}");
            }
        }
        let v = incomplete_inverse_sum(0, 5, 5, 1, 1, 0).unwrap();
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert_eq!(
            incomplete_inverse_sum(0, 5, 6, 1, 2, 0),
            Err(ExpSumError::NotCoprime(2, 6))
        );
        assert_eq!(
            incomplete_inverse_sum(0, 5, 1, 1, 1, 0),
            Err(ExpSumError::SmallModulus(1))
        );
    }

    #[test]
    fn class_count_matches_direct() {
        for (y, z, q, t, m, u) in [
            (-17i64, 1000i64, 35u64, 3i64, 4u64, 1i64),
            (3, 3, 7, 1, 1, 0),
            (10, 9000, 97, 2, 3, 2),
            (-500, 20, 128, 64, 5, -3),
            (0, 12345, 210, 1, 11, 7),
        ] {
            let a = incomplete_inverse_sum(y, z, q, t, m, u).unwrap();
            let b = incomplete_inverse_sum_direct(y, z, q, t, m, u).unwrap();
            assert!((a - b).norm() < 1e-8, "{y} {z} {q} {t} {m} {u}");
        }
    }

    #[test]
    fn mainterm_examples() {
        let q = factor(12).unwrap();
        assert!((lemma1_mainterm(0.0, 120.0, &q, 0, 1) - 120.0 * 4.0 / 12.0).abs() < 1e-12);
        let q = factor(30).unwrap();
        assert!((lemma1_mainterm(0.0, 90.0, &q, 7, 3) - -90.0 / 90.0).abs() < 1e-12);
        let q = factor(4).unwrap();
        assert!((lemma1_mainterm(0.0, 40.0, &q, 2, 1) - 10.0 * -2.0).abs() < 1e-12);
    }

    #[test]
    fn mainterm_tracks_long_range_average() {
        // q = 4, t = 2: c_4(2) = -2 governs the average over many periods
        let q = factor(4).unwrap();
        let z = 4_000_001i64;
        let exact = incomplete_inverse_sum(0, z, 4, 2, 1, 0).unwrap();
        let main = lemma1_mainterm(0.0, z as f64, &q, 2, 1);
        assert!((exact.re - main).abs() <= 2.0);
    }

    #[test]
    fn error_ratio_counting_case_is_small() {
        for q in [10u64, 77, 360, 1001] {
            let f = factor(q).unwrap();
            let r = lemma1_error_ratio(0, 12_345, &f, 0, 1, 0).unwrap();
            assert!(r < 1.0, "q={q} ratio={r}");
        }
    }

    #[test]
    fn lemma1_small_grid_within_calibration() {
        let r = lemma1_sweep(400, 1.05 * LEMMA1_CALIBRATION);
        assert_eq!(r.violations, 0, "{r:?}");
        assert!(r.checked > 10_000);
    }

    #[test]
    fn sweep_report_keeps_first_violation() {
        let mut a = SweepReport::new();
        a.record(0.5, false, || "a".into());
        a.record(2.0, true, || "b".into());
        a.record(3.0, true, || "c".into());
        assert_eq!(
            (a.checked, a.violations, a.max_ratio, a.witness.as_deref()),
            (3, 2, 3.0, Some("b"))
        );
        let mut b = SweepReport::new();
        b.record(0.9, false, || "d".into());
        let m = b.clone().merge(a.clone());
        assert_eq!(
            (m.checked, m.violations, m.witness.as_deref()),
            (4, 2, Some("b"))
        );
        let m = a.merge(b);
        assert_eq!(m.witness.as_deref(), Some("b"));
    }
}
