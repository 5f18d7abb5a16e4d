//! Segmented factorization of every integer in a window `[lo, hi)`.

use arrayvec::ArrayVec;

use crate::arith::{self, ArithError};

/// Segment length used by the drivers. It does not depend on the thread
/// count, which keeps reductions bit-identical across thread counts.
pub const SEGMENT_LEN: u64 = 1 << 15;

/// Integers below 2^48 have at most 12 distinct prime factors.
pub const MAX_DISTINCT_PRIMES: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    /// `p^e`
    pub q: u64,
}

pub type LocalFactors = ArrayVec<PrimePower, MAX_DISTINCT_PRIMES>;

/// Factorizations of all `n` in a window, primes ascending per entry.
pub struct FactorSegment {
    lo: u64,
    factors: Vec<LocalFactors>,
}

impl FactorSegment {
    /// `base` must contain every prime `p` with `p * p < hi`, ascending.
    pub fn new(lo: u64, hi: u64, base: &[u64]) -> Result<Self, ArithError> {
        if lo >= hi || hi - lo > arith::MAX_SEGMENT_LEN {
            return Err(ArithError::BadSegment {
                lo,
                hi,
                max: arith::MAX_SEGMENT_LEN,
            });
        }
        let len = (hi - lo) as usize;
        let mut rest: Vec<u64> = (lo..hi).collect();
        let mut factors: Vec<LocalFactors> = vec![LocalFactors::new(); len];
        for &p in base {
            if p * p >= hi {
                break;
            }
            let mut m = lo.div_ceil(p) * p;
            while m < hi {
                let i = (m - lo) as usize;
                let mut e = 0;
                let mut q = 1;
                while rest[i] % p == 0 {
                    rest[i] /= p;
                    q *= p;
                    e += 1;
                }
                factors[i].push(PrimePower { p, e, q });
                m += p;
            }
        }
        for (i, r) in rest.into_iter().enumerate() {
            if r > 1 {
                factors[i].push(PrimePower { p: r, e: 1, q: r });
            }
        }
        Ok(FactorSegment { lo, factors })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factors of `lo + i`; entry for 0 is empty.
    pub fn get(&self, i: usize) -> &LocalFactors {
        &self.factors[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &LocalFactors)> + '_ {
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| (self.lo + i as u64, f))
    }
}
