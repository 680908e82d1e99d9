//! Dense univariate polynomials, coefficients lowest degree first.

use core::ops::{Add, Mul, Neg, Sub};

use super::field::{Fp, GOLDILOCKS};
use super::ntt::{intt_in_place, ntt_in_place};
use crate::error::{LumenError, Result};

/// Below this operand length multiplication stays schoolbook.
pub const NTT_THRESHOLD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DensePolynomial<const P: u64 = GOLDILOCKS> {
    coeffs: Vec<Fp<P>>,
}

impl<const P: u64> core::fmt::Debug for DensePolynomial<P> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Poly{:?}", self.coeffs)
    }
}

impl<const P: u64> DensePolynomial<P> {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Fp<P>) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: Fp<P>, k: usize) -> Self {
        let mut coeffs = vec![Fp::ZERO; k + 1];
        coeffs[k] = c;
        Self::from_coeffs(coeffs)
    }

    /// `x - a`
    pub fn linear_root(a: Fp<P>) -> Self {
        Self::from_coeffs(vec![-a, Fp::ONE])
    }

    pub fn from_coeffs(mut coeffs: Vec<Fp<P>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_u64s(values: &[u64]) -> Self {
        Self::from_coeffs(values.iter().map(|&v| Fp::new(v)).collect())
    }

    pub fn coeffs(&self) -> &[Fp<P>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Fp<P>> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the end.
    pub fn coeff(&self, i: usize) -> Fp<P> {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Number of stored coefficients (degree + 1, or 0).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coeff(&self) -> Fp<P> {
        self.coeffs.last().copied().unwrap_or(Fp::ZERO)
    }

    pub fn eval(&self, x: Fp<P>) -> Fp<P> {
        self.coeffs.iter().rev().fold(Fp::ZERO, |acc, c| acc * x + *c)
    }

    pub fn scale(&self, k: Fp<P>) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self::from_coeffs(self.coeffs.iter().map(|c| *c * k).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Fp::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn mul_schoolbook(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Fp::ZERO; self.len() + other.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += *a * *b;
            }
        }
        Self::from_coeffs(out)
    }

    /// Multiplication via NTT; `None` when the field lacks a large enough
    /// two-power subgroup.
    pub fn mul_ntt(&self, other: &Self) -> Option<Self> {
        if self.is_zero() || other.is_zero() {
            return Some(Self::zero());
        }
        let out_len = self.len() + other.len() - 1;
        let size = out_len.next_power_of_two();
        let root = Fp::<P>::two_adic_root(size.trailing_zeros())?;
        let mut a = self.coeffs.clone();
        a.resize(size, Fp::ZERO);
        let mut b = other.coeffs.clone();
        b.resize(size, Fp::ZERO);
        ntt_in_place(&mut a, root);
        ntt_in_place(&mut b, root);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= *y;
        }
        intt_in_place(&mut a, root);
        a.truncate(out_len);
        Some(Self::from_coeffs(a))
    }

    /// Schoolbook below [`NTT_THRESHOLD`], radix-2 NTT above.
    pub fn mul_ref(&self, other: &Self) -> Self {
        if self.len().min(other.len()) < NTT_THRESHOLD {
            return self.mul_schoolbook(other);
        }
        self.mul_ntt(other).unwrap_or_else(|| self.mul_schoolbook(other))
    }

    /// Euclidean division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dlen = divisor.len();
        if dlen == 0 {
            return Err(LumenError::DivisionByZeroPolynomial);
        }
        if self.len() < dlen {
            return Ok((Self::zero(), self.clone()));
        }
        let lead_inv = divisor.leading_coeff().inverse().expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fp::ZERO; self.len() - dlen + 1];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dlen - 1] * lead_inv;
            quot[i] = c;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= c * *d;
            }
        }
        rem.truncate(dlen - 1);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    /// Division by `x^n - c`, linear time. Returns `(quotient, remainder)`.
    pub fn div_rem_binomial(&self, n: usize, c: Fp<P>) -> (Self, Self) {
        assert!(n > 0);
        if self.len() <= n {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Fp::ZERO; self.len() - n];
        for i in (n..rem.len()).rev() {
            let q = rem[i];
            if q.is_zero() {
                continue;
            }
            quot[i - n] = q;
            rem[i] = Fp::ZERO;
            rem[i - n] += q * c;
        }
        rem.truncate(n);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Reduction modulo `x^d - 1`: coefficient `i` folds onto `i mod d`.
    pub fn mod_cyclotomic(&self, d: usize) -> Self {
        assert!(d > 0, "cyclotomic modulus degree must be positive");
        if self.len() <= d {
            return self.clone();
        }
        let mut out = vec![Fp::ZERO; d];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i % d] += *c;
        }
        Self::from_coeffs(out)
    }

    /// `self(x + c)` (Taylor shift).
    pub fn shift(&self, c: Fp<P>) -> Self {
        if c.is_zero() || self.len() <= 1 {
            return self.clone();
        }
        let n = self.len();
        if n < NTT_THRESHOLD {
            // Horner on polynomials: ((a_n)(x+c) + a_{n-1})(x+c) + ...
            let mut acc = vec![Fp::ZERO; n];
            let mut len = 0usize;
            for a in self.coeffs.iter().rev() {
                // acc <- acc * (x + c) + a
                let mut next = vec![Fp::ZERO; n];
                for i in 0..len {
                    next[i + 1] += acc[i];
                    next[i] += acc[i] * c;
                }
                next[0] += *a;
                len = (len + 1).min(n);
                acc = next;
            }
            return Self::from_coeffs(acc);
        }
        // g_j = (1/j!) * sum_i (a_i i!) c^(i-j) / (i-j)!  as one convolution
        let mut fact = vec![Fp::<P>::ONE; n];
        for i in 1..n {
            fact[i] = fact[i - 1] * Fp::new(i as u64);
        }
        let mut inv_fact = vec![Fp::<P>::ONE; n];
        inv_fact[n - 1] = fact[n - 1].inverse().expect("n < p");
        for i in (1..n).rev() {
            inv_fact[i - 1] = inv_fact[i] * Fp::new(i as u64);
        }
        let a: Vec<Fp<P>> = (0..n).map(|i| self.coeffs[n - 1 - i] * fact[n - 1 - i]).collect();
        let mut cp = Fp::<P>::ONE;
        let b: Vec<Fp<P>> = (0..n)
            .map(|k| {
                let v = cp * inv_fact[k];
                cp *= c;
                v
            })
            .collect();
        let prod = Self::from_coeffs(a).mul_ref(&Self::from_coeffs(b));
        let coeffs = (0..n)
            .map(|j| prod.coeff(n - 1 - j) * inv_fact[j])
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// `self(a*x + b)`.
    pub fn compose_linear(&self, a: Fp<P>, b: Fp<P>) -> Self {
        // f(ax + b) = f_b(ax) where f_b = f(x + b)
        let shifted = self.shift(b);
        let mut pow = Fp::<P>::ONE;
        let coeffs = shifted
            .coeffs
            .iter()
            .map(|c| {
                let v = *c * pow;
                pow *= a;
                v
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    /// Keeps coefficients below `n`.
    pub fn truncate(&self, n: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().take(n).copied().collect())
    }

    /// Wire form: 4-byte little-endian length, then 8-byte LE coefficients.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 8 * self.len());
        self.write_bytes(&mut out);
        out
    }

    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.coeffs.len() as u32).to_le_bytes());
        for c in &self.coeffs {
            out.extend_from_slice(&c.to_bytes());
        }
    }

    /// Parses a polynomial from the front of `bytes`, returning the rest.
    /// Rejects trailing zero coefficients so the encoding stays canonical.
    pub fn read_bytes(bytes: &[u8]) -> Result<(Self, &[u8])> {
        if bytes.len() < 4 {
            return Err(LumenError::Malformed("truncated polynomial length".into()));
        }
        let len = u32::from_le_bytes(bytes[..4].try_into().unwrap()) as usize;
        let body = &bytes[4..];
        let need = len
            .checked_mul(8)
            .ok_or_else(|| LumenError::Malformed("polynomial length overflow".into()))?;
        if body.len() < need {
            return Err(LumenError::Malformed("truncated polynomial body".into()));
        }
        let coeffs = body[..need]
            .chunks_exact(8)
            .map(Fp::from_bytes)
            .collect::<Result<Vec<_>>>()?;
        if coeffs.last().is_some_and(|c| c.is_zero()) {
            return Err(LumenError::Malformed("non-canonical polynomial (trailing zero)".into()));
        }
        Ok((Self { coeffs }, &body[need..]))
    }
}

impl<const P: u64> Add for &DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn add(self, rhs: Self) -> DensePolynomial<P> {
        let n = self.len().max(rhs.len());
        DensePolynomial::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<const P: u64> Sub for &DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn sub(self, rhs: Self) -> DensePolynomial<P> {
        let n = self.len().max(rhs.len());
        DensePolynomial::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<const P: u64> Mul for &DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn mul(self, rhs: Self) -> DensePolynomial<P> {
        DensePolynomial::mul_ref(self, rhs)
    }
}

impl<const P: u64> Neg for &DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn neg(self) -> DensePolynomial<P> {
        DensePolynomial::from_coeffs(self.coeffs.iter().map(|c| -*c).collect())
    }
}

impl<const P: u64> Add for DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<const P: u64> Sub for DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<const P: u64> Mul for DensePolynomial<P> {
    type Output = DensePolynomial<P>;
    fn mul(self, rhs: Self) -> Self {
        DensePolynomial::mul_ref(&self, &rhs)
    }
}

/// Free-function forms of the ring operations.
pub fn add<const P: u64>(a: &DensePolynomial<P>, b: &DensePolynomial<P>) -> DensePolynomial<P> {
    a + b
}

pub fn sub<const P: u64>(a: &DensePolynomial<P>, b: &DensePolynomial<P>) -> DensePolynomial<P> {
    a - b
}

pub fn mul<const P: u64>(a: &DensePolynomial<P>, b: &DensePolynomial<P>) -> DensePolynomial<P> {
    a.mul_ref(b)
}

pub fn div_rem<const P: u64>(
    a: &DensePolynomial<P>,
    b: &DensePolynomial<P>,
) -> Result<(DensePolynomial<P>, DensePolynomial<P>)> {
    a.div_rem(b)
}

pub fn eval<const P: u64>(f: &DensePolynomial<P>, x: Fp<P>) -> Fp<P> {
    f.eval(x)
}

pub fn mod_cyclotomic<const P: u64>(f: &DensePolynomial<P>, d: usize) -> DensePolynomial<P> {
    f.mod_cyclotomic(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_poly::field::FieldElement;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    type Poly = DensePolynomial;

    fn random_poly(rng: &mut ChaCha20Rng, len: usize) -> Poly {
        Poly::from_coeffs((0..len).map(|_| FieldElement::new(rng.gen())).collect())
    }

    #[test]
    fn x_plus_one_times_x_minus_one() {
        let a = Poly::from_coeffs(vec![FieldElement::ONE, FieldElement::ONE]);
        let b = Poly::from_coeffs(vec![-FieldElement::ONE, FieldElement::ONE]);
        assert_eq!(
            &a * &b,
            Poly::from_coeffs(vec![-FieldElement::ONE, FieldElement::ZERO, FieldElement::ONE])
        );
    }

    #[test]
    fn cyclotomic_wraparound() {
        for d in [1usize, 2, 8, 64] {
            assert_eq!(Poly::monomial(FieldElement::ONE, d).mod_cyclotomic(d), Poly::constant(FieldElement::ONE));
        }
    }

    #[test]
    fn zero_polynomial_is_empty() {
        let z = Poly::from_coeffs(vec![FieldElement::ZERO; 5]);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
        assert_eq!(z.to_bytes(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn division_by_zero_errors() {
        let a = Poly::from_u64s(&[1, 2, 3]);
        assert_eq!(a.div_rem(&Poly::zero()), Err(LumenError::DivisionByZeroPolynomial));
    }

    #[test]
    fn degree_nine_by_degree_four_recomposes() {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let a = random_poly(&mut rng, 10);
        let b = random_poly(&mut rng, 5);
        let (q, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.len() < b.len());
    }

    #[test]
    fn div_rem_recomposition_500_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(500);
        for _ in 0..500 {
            let la = rng.gen_range(0..40);
            let lb = rng.gen_range(1..20);
            let a = random_poly(&mut rng, la);
            let mut b = random_poly(&mut rng, lb);
            if b.is_zero() {
                b = Poly::constant(FieldElement::ONE);
            }
            let (q, r) = a.div_rem(&b).unwrap();
            assert_eq!(&(&q * &b) + &r, a);
            assert!(r.len() < b.len());
        }
    }

    #[test]
    fn cyclotomic_reduction_is_multiplicative_200_pairs() {
        let mut rng = ChaCha20Rng::seed_from_u64(200);
        for _ in 0..200 {
            let d = 1usize << rng.gen_range(0..6);
            let (lf, lg) = (rng.gen_range(0..3 * d + 2), rng.gen_range(0..3 * d + 2));
            let f = random_poly(&mut rng, lf);
            let g = random_poly(&mut rng, lg);
            let lhs = (&f * &g).mod_cyclotomic(d);
            let rhs = (&f.mod_cyclotomic(d) * &g.mod_cyclotomic(d)).mod_cyclotomic(d);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ntt_and_schoolbook_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let a = random_poly(&mut rng, 300);
        let b = random_poly(&mut rng, 129);
        assert_eq!(a.mul_schoolbook(&b), a.mul_ntt(&b).unwrap());
    }

    #[test]
    fn shift_matches_pointwise_large_and_small() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for len in [0usize, 1, 5, 63, 64, 200] {
            let f = random_poly(&mut rng, len);
            let c = FieldElement::new(rng.gen());
            let g = f.shift(c);
            for _ in 0..4 {
                let x = FieldElement::new(rng.gen());
                assert_eq!(g.eval(x), f.eval(x + c));
            }
            let a = FieldElement::new(rng.gen());
            let h = f.compose_linear(a, c);
            let x = FieldElement::new(rng.gen());
            assert_eq!(h.eval(x), f.eval(a * x + c));
        }
    }

    #[test]
    fn binomial_division_matches_generic() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let a = random_poly(&mut rng, 40);
        let c = FieldElement::new(7);
        let divisor = &Poly::monomial(FieldElement::ONE, 8) - &Poly::constant(c);
        assert_eq!(a.div_rem_binomial(8, c), a.div_rem(&divisor).unwrap());
    }

    #[test]
    fn small_field_arithmetic() {
        type P17 = DensePolynomial<17>;
        let f = P17::from_u64s(&[16, 0, 0, 0, 1]);
        assert_eq!(f.eval(Fp::new(2)), Fp::new(15));
    }

    proptest! {
        #[test]
        fn wire_roundtrip(vals in proptest::collection::vec(any::<u64>(), 0..40)) {
            let p = Poly::from_u64s(&vals);
            let bytes = p.to_bytes();
            let (q, rest) = Poly::read_bytes(&bytes).unwrap();
            prop_assert!(rest.is_empty());
            prop_assert_eq!(p, q);
        }
    }
}
