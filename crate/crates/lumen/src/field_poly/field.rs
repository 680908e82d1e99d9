//! Prime-field scalars.
//!
//! `Fp<P>` is a canonical residue modulo a 64-bit prime `P` chosen at the type
//! level. The protocol layers use [`FieldElement`], the 64-bit prime
//! `2^64 - 2^32 + 1`, which has two-adicity 32 and so carries power-of-two
//! evaluation domains up to `2^32`. Smaller primes are useful in tests where
//! hand-checkable values matter (e.g. `Fp<17>`).

use core::fmt;
use core::iter::{Product, Sum};
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use crate::error::{LumenError, Result};

/// `2^64 - 2^32 + 1`.
pub const GOLDILOCKS: u64 = 0xFFFF_FFFF_0000_0001;

/// The protocol field.
pub type FieldElement = Fp<GOLDILOCKS>;

/// Encoded width of a field element on the wire.
pub const FIELD_BYTES: usize = 8;

const EPSILON: u64 = 0xFFFF_FFFF; // 2^64 mod GOLDILOCKS

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Fp<const P: u64>(u64);

#[inline(always)]
fn reduce_goldilocks(x: u128) -> u64 {
    let lo = x as u64;
    let hi = (x >> 64) as u64;
    let hi_hi = hi >> 32;
    let hi_lo = hi & EPSILON;
    let (mut t0, borrow) = lo.overflowing_sub(hi_hi);
    if borrow {
        t0 = t0.wrapping_sub(EPSILON);
    }
    let t1 = hi_lo * EPSILON;
    let (res, carry) = t0.overflowing_add(t1);
    let r = res.wrapping_add(EPSILON * carry as u64);
    if r >= GOLDILOCKS {
        r - GOLDILOCKS
    } else {
        r
    }
}

impl<const P: u64> Fp<P> {
    pub const MODULUS: u64 = P;
    pub const ZERO: Self = Fp(0);
    pub const ONE: Self = Fp(1);

    /// Reduces an arbitrary `u64` into the field.
    #[inline]
    pub const fn new(v: u64) -> Self {
        Fp(v % P)
    }

    #[inline]
    pub fn from_u128(v: u128) -> Self {
        if P == GOLDILOCKS {
            Fp(reduce_goldilocks(v))
        } else {
            Fp((v % P as u128) as u64)
        }
    }

    pub fn from_i64(v: i64) -> Self {
        if v >= 0 {
            Self::new(v as u64)
        } else {
            -Self::new(v.unsigned_abs())
        }
    }

    /// Canonical residue in `[0, P)`.
    #[inline]
    pub const fn value(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.pow(P - 2))
        }
    }

    /// Largest `s` with `2^s | P - 1`.
    pub const fn two_adicity() -> u32 {
        (P - 1).trailing_zeros()
    }

    /// A generator of the multiplicative subgroup of order `2^log_size`, or
    /// `None` when `2^log_size` does not divide `P - 1`.
    ///
    /// Deterministic: the smallest candidate `c >= 2` whose odd-part power has
    /// full two-power order is lifted and then squared down.
    pub fn two_adic_root(log_size: u32) -> Option<Self> {
        let s = Self::two_adicity();
        if log_size > s {
            return None;
        }
        let odd = (P - 1) >> s;
        let mut c = 2u64;
        let full = loop {
            if c >= P {
                return None;
            }
            let x = Fp::<P>::new(c).pow(odd);
            // order of x is exactly 2^s iff x^(2^(s-1)) != 1
            let mut y = x;
            for _ in 0..s.saturating_sub(1) {
                y = y * y;
            }
            if s == 0 || y != Self::ONE {
                break x;
            }
            c += 1;
        };
        let mut root = full;
        for _ in 0..(s - log_size) {
            root = root * root;
        }
        Some(root)
    }

    pub fn to_bytes(self) -> [u8; FIELD_BYTES] {
        self.0.to_le_bytes()
    }

    /// Parses an 8-byte little-endian residue, rejecting non-canonical values.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; FIELD_BYTES] = bytes
            .try_into()
            .map_err(|_| LumenError::Malformed("field element must be 8 bytes".into()))?;
        let v = u64::from_le_bytes(arr);
        if v >= P {
            return Err(LumenError::Malformed(format!("non-canonical field element {v}")));
        }
        Ok(Fp(v))
    }

    /// Reduces a little-endian byte string of any length (e.g. a 256-bit
    /// digest) modulo `P`.
    pub fn from_le_bytes_mod_order(bytes: &[u8]) -> Self {
        let radix = Self::from_u128(1u128 << 64);
        let mut acc = Self::ZERO;
        for chunk in bytes.chunks(8).rev() {
            let mut limb = [0u8; 8];
            limb[..chunk.len()].copy_from_slice(chunk);
            acc = acc * radix + Self::new(u64::from_le_bytes(limb));
        }
        acc
    }
}

impl<const P: u64> From<u64> for Fp<P> {
    fn from(v: u64) -> Self {
        Self::new(v)
    }
}

impl<const P: u64> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Add for Fp<P> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, over) = self.0.overflowing_add(rhs.0);
        if over || s >= P {
            Fp(s.wrapping_sub(P))
        } else {
            Fp(s)
        }
    }
}

impl<const P: u64> Sub for Fp<P> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        let (d, under) = self.0.overflowing_sub(rhs.0);
        if under {
            Fp(d.wrapping_add(P))
        } else {
            Fp(d)
        }
    }
}

impl<const P: u64> Neg for Fp<P> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        if self.0 == 0 {
            self
        } else {
            Fp(P - self.0)
        }
    }
}

impl<const P: u64> Mul for Fp<P> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Self::from_u128(self.0 as u128 * rhs.0 as u128)
    }
}

impl<const P: u64> Div for Fp<P> {
    type Output = Self;
    /// Panics on division by zero; callers check invertibility first.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inverse().expect("division by zero field element")
    }
}

impl<const P: u64> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u64> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u64> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u64> Sum for Fp<P> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

impl<const P: u64> Product for Fp<P> {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ONE, |a, b| a * b)
    }
}

/// Inverts every element with one field inversion. Zeros are left as zero.
pub fn batch_inverse<const P: u64>(values: &[Fp<P>]) -> Vec<Fp<P>> {
    let mut prefix = Vec::with_capacity(values.len());
    let mut acc = Fp::<P>::ONE;
    for v in values {
        prefix.push(acc);
        if !v.is_zero() {
            acc *= *v;
        }
    }
    let mut inv = acc.inverse().unwrap_or(Fp::ZERO);
    let mut out = vec![Fp::ZERO; values.len()];
    for i in (0..values.len()).rev() {
        if values[i].is_zero() {
            continue;
        }
        out[i] = inv * prefix[i];
        inv *= values[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type F17 = Fp<17>;

    #[test]
    fn small_field_basics() {
        assert_eq!(F17::new(16) + F17::new(3), F17::new(2));
        assert_eq!(F17::new(3) - F17::new(5), F17::new(15));
        assert_eq!(F17::new(4).pow(4), F17::ONE);
        assert_eq!(F17::new(3).inverse().unwrap() * F17::new(3), F17::ONE);
        assert!(F17::ZERO.inverse().is_none());
    }

    #[test]
    fn two_adic_roots_have_exact_order() {
        assert_eq!(FieldElement::two_adicity(), 32);
        for log in [0u32, 1, 2, 5, 16, 32] {
            let w = FieldElement::two_adic_root(log).unwrap();
            assert_eq!(w.pow(1u64 << log), FieldElement::ONE);
            if log > 0 {
                assert_ne!(w.pow(1u64 << (log - 1)), FieldElement::ONE);
            }
        }
        assert!(FieldElement::two_adic_root(33).is_none());
        let w4 = F17::two_adic_root(2).unwrap();
        assert_eq!(w4.pow(4), F17::ONE);
        assert_ne!(w4.pow(2), F17::ONE);
    }

    #[test]
    fn rejects_non_canonical_bytes() {
        assert!(FieldElement::from_bytes(&GOLDILOCKS.to_le_bytes()).is_err());
        assert!(FieldElement::from_bytes(&[1, 2, 3]).is_err());
        let x = FieldElement::new(123456789);
        assert_eq!(FieldElement::from_bytes(&x.to_bytes()).unwrap(), x);
    }

    #[test]
    fn wide_reduction_matches_bigint() {
        use num_bigint::BigUint;
        let bytes: Vec<u8> = (0u8..32).map(|i| i.wrapping_mul(37).wrapping_add(11)).collect();
        let expect = BigUint::from_bytes_le(&bytes) % BigUint::from(GOLDILOCKS);
        let got = FieldElement::from_le_bytes_mod_order(&bytes);
        assert_eq!(BigUint::from(got.value()), expect);
    }

    #[test]
    fn batch_inverse_skips_zero() {
        let xs = [FieldElement::new(3), FieldElement::ZERO, FieldElement::new(7)];
        let inv = batch_inverse(&xs);
        assert_eq!(inv[0] * xs[0], FieldElement::ONE);
        assert_eq!(inv[1], FieldElement::ZERO);
        assert_eq!(inv[2] * xs[2], FieldElement::ONE);
    }

    proptest! {
        #[test]
        fn goldilocks_mul_matches_u128_mod(a in any::<u64>(), b in any::<u64>()) {
            let x = FieldElement::new(a);
            let y = FieldElement::new(b);
            let expect = ((x.value() as u128 * y.value() as u128) % GOLDILOCKS as u128) as u64;
            prop_assert_eq!((x * y).value(), expect);
        }

        #[test]
        fn add_sub_roundtrip(a in any::<u64>(), b in any::<u64>()) {
            let x = FieldElement::new(a);
            let y = FieldElement::new(b);
            prop_assert_eq!(x + y - y, x);
            prop_assert_eq!(x + (-x), FieldElement::ZERO);
        }
    }
}
