//! Multiplicative subgroups `H = {w^0, .., w^(n-1)}` and the vanishing,
//! Lagrange and bivariate-Lagrange constructions over them.
//!
//! Nodes are ordered as powers of the generator: node `i` is `w^i`.

use super::field::{batch_inverse, Fp, GOLDILOCKS};
use super::ntt::{intt_in_place, ntt_in_place};
use super::poly::DensePolynomial;
use crate::error::{LumenError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationDomain<const P: u64 = GOLDILOCKS> {
    size: usize,
    log_size: u32,
    generator: Fp<P>,
    size_inv: Fp<P>,
}

impl<const P: u64> EvaluationDomain<P> {
    /// The subgroup of order `size`; `size` must be a power of two dividing `P - 1`.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(LumenError::InvalidDomain(size));
        }
        let log_size = size.trailing_zeros();
        let generator = Fp::<P>::two_adic_root(log_size).ok_or(LumenError::InvalidDomain(size))?;
        let size_inv = Fp::<P>::new(size as u64)
            .inverse()
            .ok_or(LumenError::InvalidDomain(size))?;
        Ok(Self { size, log_size, generator, size_inv })
    }

    /// Smallest domain with at least `min_size` elements.
    pub fn at_least(min_size: usize) -> Result<Self> {
        Self::new(min_size.max(1).next_power_of_two())
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn log_size(&self) -> u32 {
        self.log_size
    }

    pub fn generator(&self) -> Fp<P> {
        self.generator
    }

    pub fn size_as_field(&self) -> Fp<P> {
        Fp::new(self.size as u64)
    }

    pub fn element(&self, i: usize) -> Fp<P> {
        self.generator.pow((i % self.size) as u64)
    }

    pub fn elements(&self) -> Vec<Fp<P>> {
        let mut out = Vec::with_capacity(self.size);
        let mut x = Fp::<P>::ONE;
        for _ in 0..self.size {
            out.push(x);
            x *= self.generator;
        }
        out
    }

    pub fn contains(&self, x: Fp<P>) -> bool {
        !x.is_zero() && x.pow(self.size as u64) == Fp::ONE
    }

    /// `x^|H| - 1`
    pub fn vanishing_poly(&self) -> DensePolynomial<P> {
        let mut coeffs = vec![Fp::ZERO; self.size + 1];
        coeffs[0] = -Fp::<P>::ONE;
        coeffs[self.size] = Fp::ONE;
        DensePolynomial::from_coeffs(coeffs)
    }

    pub fn eval_vanishing(&self, x: Fp<P>) -> Fp<P> {
        x.pow(self.size as u64) - Fp::ONE
    }

    /// Lagrange basis polynomial for node `node` evaluated at `x`, concise form
    /// `(node/|H|) * (x^|H| - 1)/(x - node)`; equals 1 at `x = node`.
    pub fn lagrange_eval(&self, node: Fp<P>, x: Fp<P>) -> Result<Fp<P>> {
        if !self.contains(node) {
            return Err(LumenError::DomainMismatch);
        }
        if x == node {
            return Ok(Fp::ONE);
        }
        Ok(node * self.size_inv * self.eval_vanishing(x) / (x - node))
    }

    /// Product form `prod_{m != n} (x - x_m)/(x_n - x_m)` over the subgroup nodes.
    pub fn lagrange_eval_product(&self, node: Fp<P>, x: Fp<P>) -> Result<Fp<P>> {
        if !self.contains(node) {
            return Err(LumenError::DomainMismatch);
        }
        let mut num = Fp::<P>::ONE;
        let mut den = Fp::<P>::ONE;
        for m in self.elements() {
            if m == node {
                continue;
            }
            num *= x - m;
            den *= node - m;
        }
        Ok(num / den)
    }

    /// `[Δ_{w^0}(x), .., Δ_{w^(n-1)}(x)]` in linear time.
    pub fn lagrange_coefficients(&self, x: Fp<P>) -> Vec<Fp<P>> {
        let elems = self.elements();
        let z = self.eval_vanishing(x);
        if z.is_zero() {
            return elems.iter().map(|h| if *h == x { Fp::ONE } else { Fp::ZERO }).collect();
        }
        let denoms: Vec<Fp<P>> = elems.iter().map(|h| x - *h).collect();
        let inv = batch_inverse(&denoms);
        let scale = z * self.size_inv;
        elems.iter().zip(inv).map(|(h, d)| scale * *h * d).collect()
    }

    /// `Λ_H(X, Y) = (Z_H(X)·Y − X·Z_H(Y)) / (n·(X − Y))` off the diagonal and the
    /// kernel sum `Σ_h Δ_h(X)·Δ_h(Y)` on it, where the quotient is 0/0.
    pub fn bivariate_lambda(&self, x: Fp<P>, y: Fp<P>) -> Fp<P> {
        if x == y {
            return self.bivariate_lambda_sum(x, y);
        }
        let num = self.eval_vanishing(x) * y - x * self.eval_vanishing(y);
        num * self.size_inv / (x - y)
    }

    /// The kernel-sum form `Σ_h Δ_h(X)·Δ_h(Y)`, always defined.
    pub fn bivariate_lambda_sum(&self, x: Fp<P>, y: Fp<P>) -> Fp<P> {
        let lx = self.lagrange_coefficients(x);
        let ly = self.lagrange_coefficients(y);
        lx.iter().zip(&ly).map(|(a, b)| *a * *b).sum()
    }

    /// Coefficients from values on the domain (node order).
    pub fn interpolate(&self, evals: &[Fp<P>]) -> DensePolynomial<P> {
        assert!(evals.len() <= self.size);
        let mut a = evals.to_vec();
        a.resize(self.size, Fp::ZERO);
        intt_in_place(&mut a, self.generator);
        DensePolynomial::from_coeffs(a)
    }

    /// Values on the domain. Polynomials longer than the domain are folded
    /// first, which preserves values on `H`.
    pub fn evaluate(&self, poly: &DensePolynomial<P>) -> Vec<Fp<P>> {
        let mut a = poly.mod_cyclotomic(self.size).into_coeffs();
        a.resize(self.size, Fp::ZERO);
        ntt_in_place(&mut a, self.generator);
        a
    }

    /// `Σ_{h∈H} f(h)`, read off the coefficients: `n · Σ_{j ≡ 0 mod n} f_j`.
    pub fn sum_over(&self, poly: &DensePolynomial<P>) -> Fp<P> {
        let s: Fp<P> = poly.coeffs().iter().step_by(self.size).copied().sum();
        s * self.size_as_field()
    }
}

/// `z_H = x^|H| − 1` for the domain.
pub fn vanishing_poly<const P: u64>(domain: &EvaluationDomain<P>) -> DensePolynomial<P> {
    domain.vanishing_poly()
}

pub fn lagrange_eval<const P: u64>(domain: &EvaluationDomain<P>, node: Fp<P>, x: Fp<P>) -> Result<Fp<P>> {
    domain.lagrange_eval(node, x)
}

pub fn bivariate_lambda<const P: u64>(domain: &EvaluationDomain<P>, x: Fp<P>, y: Fp<P>) -> Fp<P> {
    domain.bivariate_lambda(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_poly::field::FieldElement;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    type F17 = Fp<17>;

    #[test]
    fn vanishing_over_f17() {
        let h = EvaluationDomain::<17>::new(4).unwrap();
        assert_eq!(h.vanishing_poly(), DensePolynomial::<17>::from_u64s(&[16, 0, 0, 0, 1]));
        assert_eq!(h.vanishing_poly().eval(F17::new(4)), F17::ZERO);
        assert_eq!(h.vanishing_poly().eval(F17::new(2)), F17::new(15));
        // 4 has order 4 mod 17
        assert!(h.contains(F17::new(4)));
    }

    #[test]
    fn trivial_domain_is_x_minus_one() {
        let h = EvaluationDomain::<17>::new(1).unwrap();
        assert_eq!(h.vanishing_poly(), DensePolynomial::<17>::from_u64s(&[16, 1]));
        assert_eq!(h.vanishing_poly().eval(F17::ONE), F17::ZERO);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(EvaluationDomain::<17>::new(3), Err(LumenError::InvalidDomain(3)));
        assert_eq!(EvaluationDomain::<17>::new(32), Err(LumenError::InvalidDomain(32)));
        assert_eq!(EvaluationDomain::<17>::new(0), Err(LumenError::InvalidDomain(0)));
    }

    #[test]
    fn lagrange_on_nodes() {
        let h = EvaluationDomain::<17>::new(4).unwrap();
        for a in h.elements() {
            for b in h.elements() {
                let v = h.lagrange_eval(a, b).unwrap();
                assert_eq!(v, if a == b { F17::ONE } else { F17::ZERO });
            }
        }
        assert_eq!(h.lagrange_eval(F17::new(2), F17::new(3)), Err(LumenError::DomainMismatch));
    }

    #[test]
    fn concise_and_product_forms_agree_f17() {
        let h = EvaluationDomain::<17>::new(4).unwrap();
        let concise = h.lagrange_eval(F17::ONE, F17::new(2)).unwrap();
        let product = h.lagrange_eval_product(F17::ONE, F17::new(2)).unwrap();
        assert_eq!(concise, product);
        // (1/4)·(2^4 − 1)/(2 − 1) = 15·13 = 195 = 8 mod 17
        assert_eq!(concise, F17::new(8));
    }

    #[test]
    fn concise_and_product_agree_goldilocks() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let h = EvaluationDomain::<GOLDILOCKS>::new(16).unwrap();
        for _ in 0..20 {
            let node = h.element(rng.gen_range(0..16));
            let x = FieldElement::new(rng.gen());
            assert_eq!(h.lagrange_eval(node, x).unwrap(), h.lagrange_eval_product(node, x).unwrap());
        }
    }

    #[test]
    fn partition_of_unity_200_points() {
        let mut rng = ChaCha20Rng::seed_from_u64(200);
        let h = EvaluationDomain::<GOLDILOCKS>::new(32).unwrap();
        for _ in 0..200 {
            let x = FieldElement::new(rng.gen());
            let s: FieldElement = h.lagrange_coefficients(x).into_iter().sum();
            assert_eq!(s, FieldElement::ONE);
        }
    }

    #[test]
    fn lambda_on_subgroup() {
        let h = EvaluationDomain::<GOLDILOCKS>::new(8).unwrap();
        for a in h.elements() {
            for b in h.elements() {
                let v = h.bivariate_lambda(a, b);
                assert_eq!(v, if a == b { FieldElement::ONE } else { FieldElement::ZERO });
            }
        }
    }

    #[test]
    fn lambda_diagonal_off_subgroup_uses_sum() {
        let h = EvaluationDomain::<GOLDILOCKS>::new(8).unwrap();
        let x = FieldElement::new(12345);
        assert_eq!(h.bivariate_lambda(x, x), h.bivariate_lambda_sum(x, x));
    }

    #[test]
    fn interpolate_evaluate_roundtrip() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let h = EvaluationDomain::<GOLDILOCKS>::new(64).unwrap();
        let vals: Vec<FieldElement> = (0..64).map(|_| FieldElement::new(rng.gen())).collect();
        let p = h.interpolate(&vals);
        assert_eq!(h.evaluate(&p), vals);
        for (i, v) in vals.iter().enumerate().take(5) {
            assert_eq!(p.eval(h.element(i)), *v);
        }
        let expect: FieldElement = vals.iter().copied().sum();
        assert_eq!(h.sum_over(&p), expect);
    }
}
