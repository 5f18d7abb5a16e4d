//! Roots of `v^2 + 1 ≡ 0 (mod ℓ)` and primitive representations
//! `ℓ = r^2 + s^2`, with exact arithmetic modulo 1.

use std::ops::{Add, Neg, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{coprime_part_split, factor, gcd, inv_mod_u, isqrt};
use crate::expsums::SweepReport;
use crate::roots::{rho, FactoredPoly, RootsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaussError {
    #[error("ℓ must be at least 2")]
    SmallModulus,
    #[error("invalid representation: {0}")]
    BadRep(&'static str),
    #[error("side condition fails: gcd(k, ℓ) = {0}")]
    SideCondition(u64),
    #[error("k must be positive")]
    ZeroK,
    #[error(transparent)]
    Roots(#[from] RootsError),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A rational number modulo 1, stored as `num/den` with `0 <= num < den`
/// and `gcd(num, den) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModOneRational {
    num: i128,
    den: i128,
}

impl ModOneRational {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den > 0, "denominator must be positive");
        let num = num.rem_euclid(den);
        let g = gcd_u128(num as u128, den as u128) as i128;
        ModOneRational {
            num: num / g,
            den: den / g,
        }
    }

    pub fn zero() -> Self {
        ModOneRational { num: 0, den: 1 }
    }

    /// `(x^{-1} mod m) / m`, with the inverse modulo 1 taken as 0.
    pub fn inverse_over(x: i128, m: u64) -> Option<Self> {
        let xm = x.rem_euclid(m as i128) as u64;
        let inv = inv_mod_u(xm, m)?;
        Some(Self::new(inv as i128, m as i128))
    }

    pub fn num(&self) -> i128 {
        self.num
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Integer multiple, reduced mod 1.
    pub fn times(self, k: i128) -> Self {
        Self::new((self.num % self.den) * (k % self.den), self.den)
    }
}

impl Add for ModOneRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let g = gcd_u128(self.den as u128, o.den as u128) as i128;
        let den = self.den / g * o.den;
        Self::new(self.num * (den / self.den) + o.num * (den / o.den), den)
    }
}

impl Neg for ModOneRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.num, self.den)
    }
}

impl Sub for ModOneRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

/// `ℓ = r^2 + s^2` with `r, s > 0` and `gcd(r, s) = 1`. `(r, s)` and
/// `(s, r)` count as different representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitiveRep {
    pub l: u64,
    pub r: u64,
    pub s: u64,
}

impl PrimitiveRep {
    pub fn new(r: u64, s: u64) -> Result<Self, GaussError> {
        if r == 0 || s == 0 {
            return Err(GaussError::BadRep("r and s must be positive"));
        }
        if gcd(r, s) != 1 {
            return Err(GaussError::BadRep("r and s must be coprime"));
        }
        let l = r
            .checked_mul(r)
            .and_then(|r2| s.checked_mul(s).and_then(|s2| r2.checked_add(s2)))
            .ok_or(GaussError::BadRep("r^2 + s^2 overflows"))?;
        Ok(PrimitiveRep { l, r, s })
    }
}

/// All ordered primitive representations of `ℓ`, by `r` ascending.
pub fn primitive_reps(l: u64) -> Vec<PrimitiveRep> {
    let mut out = Vec::new();
    let mut r = 1;
    while r * r < l {
        let s2 = l - r * r;
        let s = isqrt(s2);
        if s * s == s2 && gcd(r, s) == 1 {
            out.push(PrimitiveRep { l, r, s });
        }
        r += 1;
    }
    out
}

/// The root `v` of `v^2 + 1 ≡ 0 (mod ℓ)` attached to `(r, s)`:
/// `v ≡ (ℓ (s^{-1} mod r) - s) / r (mod ℓ)`.
pub fn rep_to_root(rep: &PrimitiveRep) -> u64 {
    let PrimitiveRep { l, r, s } = *rep;
    let sbar = if r == 1 {
        0
    } else {
        inv_mod_u(s % r, r).expect("(r, s) = 1")
    };
    let numer = l as i128 * sbar as i128 - s as i128;
    assert_eq!(
        numer.rem_euclid(r as i128),
        0,
        "ℓ s̄ - s must be divisible by r"
    );
    let v = (numer / r as i128).rem_euclid(l as i128) as u64;
    let check = ((v as u128 * v as u128 + 1) % l as u128) as u64;
    assert_eq!(check, 0, "v^2 + 1 must vanish mod ℓ for {rep:?}");
    v
}

/// Roots of `X^2 + 1` modulo `ℓ`, sorted.
pub fn sqrt_minus_one_roots(l: u64) -> Result<Vec<u64>, GaussError> {
    let f = FactoredPoly::new(Vec::new(), true).expect("X^2 + 1 is valid");
    let fl = factor(l).map_err(|_| GaussError::SmallModulus)?;
    Ok(f.roots_mod_n(&fl)?.residues)
}

/// Whether `rep_to_root` maps the representations of `ℓ` one-to-one onto
/// the roots of `v^2 + 1` modulo `ℓ`.
pub fn check_gauss_bijection(l: u64) -> Result<bool, GaussError> {
    if l < 2 {
        return Err(GaussError::SmallModulus);
    }
    let mut image: Vec<u64> = primitive_reps(l).iter().map(rep_to_root).collect();
    let n = image.len();
    image.sort_unstable();
    image.dedup();
    Ok(image.len() == n && image == sqrt_minus_one_roots(l)?)
}

/// Both sides of the three-term decomposition of `k̄v/ℓ (mod 1)`, where
/// `k = k₁k₂` with `k₂ = (k, r^∞)`:
/// `-r·(k₂ℓ)‾/(k₁s) + r/(ksℓ) - r·(k₁sℓ)‾/k₂`.
pub fn k1k2_sides(
    k: u64,
    rep: &PrimitiveRep,
) -> Result<(ModOneRational, ModOneRational), GaussError> {
    if k == 0 {
        return Err(GaussError::ZeroK);
    }
    let PrimitiveRep { l, r, s } = *rep;
    let g = gcd(k, l);
    if g != 1 {
        return Err(GaussError::SideCondition(g));
    }
    let v = rep_to_root(rep);
    let lhs = ModOneRational::inverse_over(k as i128, l)
        .expect("(k, ℓ) = 1")
        .times(v as i128);
    let (k1, k2, _) = coprime_part_split(k, r);
    let (r, s, l) = (r as i128, s as i128, l as i128);
    let (k1, k2, k) = (k1 as i128, k2 as i128, k as i128);
    let t1 = ModOneRational::inverse_over(k2 * l, (k1 * s) as u64)
        .expect("(k₂ℓ, k₁s) = 1")
        .times(r);
    let t2 = ModOneRational::new(r, k * s * l);
    let t3 = ModOneRational::inverse_over(k1 * s * l, k2 as u64)
        .expect("(k₁sℓ, k₂) = 1")
        .times(r);
    Ok((lhs, -t1 + t2 - t3))
}

/// Checks the three-term decomposition exactly. Side-condition failures are
/// returned as errors, never as `false`.
pub fn verify_k1k2(k: u64, rep: &PrimitiveRep) -> Result<bool, GaussError> {
    let (lhs, rhs) = k1k2_sides(k, rep)?;
    Ok(lhs == rhs)
}

/// `ū/v + v̄/u ≡ 1/(uv) (mod 1)` for coprime `u, v ≥ 1`.
pub fn inversion_identity_holds(u: u64, v: u64) -> bool {
    let (Some(a), Some(b)) = (
        ModOneRational::inverse_over(u as i128, v),
        ModOneRational::inverse_over(v as i128, u),
    ) else {
        return false;
    };
    a + b == ModOneRational::new(1, u as i128 * v as i128)
}

/// [`check_gauss_bijection`] and `|primitive_reps(ℓ)| = ρ(ℓ)` for every
/// `2 ≤ ℓ ≤ lmax`.
pub fn gauss_sweep(lmax: u64) -> Result<SweepReport, GaussError> {
    let outcomes: Vec<(u64, bool)> = (2..=lmax)
        .into_par_iter()
        .map(|l| {
            let count_ok = primitive_reps(l).len() as u64
                == rho(&factor(l).map_err(|_| GaussError::SmallModulus)?);
            Ok((l, count_ok && check_gauss_bijection(l)?))
        })
        .collect::<Result<_, GaussError>>()?;
    let mut report = SweepReport::new();
    for (l, ok) in outcomes {
        report.record(0.0, !ok, || format!("l={l}"));
    }
    Ok(report)
}

/// `instances` seeded random checks of [`verify_k1k2`] with `ℓ ≤ lmax`.
/// Half of the `k` carry a power of `r`, so that `k₂ = (k, r^∞) > 1`.
pub fn k1k2_sweep(seed: u64, instances: u64, lmax: u64) -> Result<SweepReport, GaussError> {
    if lmax < 2 {
        return Err(GaussError::SmallModulus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = isqrt(lmax - 1).max(1);
    let mut report = SweepReport::new();
    while report.checked < instances {
        let (r, s) = (rng.gen_range(1..=side), rng.gen_range(1..=side));
        let Ok(rep) = PrimitiveRep::new(r, s) else {
            continue;
        };
        if rep.l > lmax {
            continue;
        }
        let k = rng.gen_range(1..=10_000u64) * r.pow(rng.gen_range(0..=2));
        if gcd(k, rep.l) != 1 {
            continue;
        }
        let ok = verify_k1k2(k, &rep)?;
        report.record(0.0, !ok, || format!("k={k} r={r} s={s}"));
    }
    Ok(report)
}
