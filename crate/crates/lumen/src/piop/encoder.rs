//! Offline phase: the relation encoder producing `P1..P4`, `Q`, `Q1..Q4`,
//! the row-sum polynomials `A`, `B`, and the sparse-position polynomials
//! `row, col, rowcol, val1, val2` over the domain of nonzero positions.

use std::collections::BTreeSet;

use super::relation::{RelationIndex, SparseMatrix};
use crate::error::{LumenError, Result};
use crate::field_poly::{Domain, FieldElement, Poly};
use crate::transcript_hash::{keccak256, Digest32, Transcript};

type F = FieldElement;

pub const INDEX_MAGIC: &[u8; 4] = b"LUMX";
pub const INDEX_VERSION: u8 = 1;
pub const OFFLINE_CHECK_POINTS: usize = 16;

/// Coefficient matrix: `coeffs[i][j]` multiplies `x^i y^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivariate {
    pub coeffs: Vec<Vec<F>>,
}

impl Bivariate {
    /// `a(x)·b(y)` padded to `dim × dim`.
    pub fn outer(a: &Poly, b: &Poly, dim: usize) -> Self {
        let mut coeffs = vec![vec![F::ZERO; dim]; dim];
        for (i, ai) in a.coeffs().iter().enumerate() {
            for (j, bj) in b.coeffs().iter().enumerate() {
                coeffs[i][j] = *ai * *bj;
            }
        }
        Self { coeffs }
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(a, b)| *a + *b).collect())
            .collect();
        Self { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// The univariate polynomial `x ↦ P(x, y)`.
    pub fn at_y(&self, y: F) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|row| Poly::from_coeffs(row.clone()).eval(y)).collect())
    }

    /// The univariate polynomial `y ↦ P(x, y)`.
    pub fn at_x(&self, x: F) -> Poly {
        let dim = self.dim();
        let mut out = vec![F::ZERO; dim];
        let mut xi = F::ONE;
        for row in &self.coeffs {
            for (j, c) in row.iter().enumerate() {
                out[j] += *c * xi;
            }
            xi *= x;
        }
        Poly::from_coeffs(out)
    }

    pub fn eval(&self, x: F, y: F) -> F {
        self.at_y(y).eval(x)
    }

    fn write_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        for row in &self.coeffs {
            for c in row {
                out.extend_from_slice(&c.to_bytes());
            }
        }
    }
}

/// Sparse positions shared by both matrices, padded to a power of two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionSet {
    pub positions: Vec<(usize, usize)>,
    pub real_len: usize,
}

#[derive(Clone, Debug)]
pub struct EncodedIndex {
    pub relation: RelationIndex,
    pub k_set: Vec<F>,
    /// Index scalar `α` (the auxiliary degree bound, as a field element).
    pub alpha: F,
    pub p1: Bivariate,
    pub p2: Bivariate,
    pub p3: Bivariate,
    pub p4: Bivariate,
    pub q: Poly,
    pub q1: Poly,
    pub q2: Poly,
    pub q3: Poly,
    pub q4: Poly,
    pub a_poly: Poly,
    pub b_poly: Poly,
    pub h_domain: Domain,
    pub m_domain: Domain,
    pub positions: PositionSet,
    pub row: Poly,
    pub col: Poly,
    pub rowcol: Poly,
    pub val1: Poly,
    pub val2: Poly,
    bytes: Vec<u8>,
    digest: Digest32,
}

/// `Q(x) = Π_{k∈K} (P1(k+1, 1) − P2(k² − x, 1))`
fn q_poly(p1: &Bivariate, p2: &Bivariate, k_set: &[F]) -> Poly {
    let p2_y1 = p2.at_y(F::ONE);
    let mut acc = Poly::constant(F::ONE);
    for &k in k_set {
        let c = p1.eval(k + F::ONE, F::ONE);
        // P2(k² − x, 1) as a polynomial in x
        let inner = p2_y1.compose_linear(-F::ONE, k * k);
        acc = &acc * &(&Poly::constant(c) - &inner);
    }
    acc
}

fn positions(m1: &SparseMatrix, m2: &SparseMatrix) -> PositionSet {
    let set: BTreeSet<(usize, usize)> = m1.entries.iter().chain(&m2.entries).map(|e| (e.0, e.1)).collect();
    let real_len = set.len();
    let mut positions: Vec<_> = set.into_iter().collect();
    let padded = real_len.max(1).next_power_of_two();
    positions.resize(padded, (0, 0));
    PositionSet { positions, real_len }
}

pub fn index(relation: &RelationIndex) -> Result<EncodedIndex> {
    relation.validate()?;
    let rel = relation;
    let dim = rel.m;
    let alpha = F::new(rel.h_bound as u64);
    let n_f = F::new(rel.n as u64);
    let k_set = rel.k_set();

    let p1 = Bivariate::outer(&rel.h, &rel.h_prime, dim);
    let p2 = Bivariate::outer(&rel.h_prime, &rel.h_dblprime, dim);
    let p3 = Bivariate::outer(&rel.h_dblprime, &rel.h, dim);
    let p4 = Bivariate::outer(&rel.h, &rel.h, dim).add(&Bivariate::outer(&rel.h_prime, &rel.h_dblprime, dim));

    let q = q_poly(&p1, &p2, &k_set);
    let s1 = rel.m1.value_sum();
    let s2 = rel.m2.value_sum();

    let h_domain = Domain::new(rel.n)?;
    let a_poly = h_domain.interpolate(&rel.m1.row_sums());
    let b_poly = h_domain.interpolate(&rel.m2.row_sums());

    let x = Poly::monomial(F::ONE, 1);
    let q1 = &(&q.shift(-alpha) + &p1.at_y(F::ONE).scale(s1)) + &p3.at_y(alpha).scale(n_f);
    let q2 = &q.shift(alpha) + &(&p2.at_y(F::ONE) - &q1).scale(s2);
    let q3 = &(&x * &p1.at_y(alpha)) - &(&a_poly * &q1.shift(-p1.eval(alpha, F::ONE)));
    let k0 = k_set[0];
    let q4 = &(&x * &p2.at_y(alpha)) - &(&b_poly * &q2.shift(-p2.eval(k0, F::ONE)));

    let positions = positions(&rel.m1, &rel.m2);
    let m_domain = Domain::new(positions.positions.len())?;
    let omega = h_domain.generator();
    let row_vals: Vec<F> = positions.positions.iter().map(|p| omega.pow(p.0 as u64)).collect();
    let col_vals: Vec<F> = positions.positions.iter().map(|p| omega.pow(p.1 as u64)).collect();
    let rowcol_vals: Vec<F> = row_vals.iter().zip(&col_vals).map(|(a, b)| *a * *b).collect();
    let val = |m: &SparseMatrix| -> Vec<F> {
        positions
            .positions
            .iter()
            .enumerate()
            .map(|(i, p)| if i < positions.real_len { m.get(p.0, p.1) } else { F::ZERO })
            .collect()
    };
    let row = m_domain.interpolate(&row_vals);
    let col = m_domain.interpolate(&col_vals);
    let rowcol = m_domain.interpolate(&rowcol_vals);
    let val1 = m_domain.interpolate(&val(&rel.m1));
    let val2 = m_domain.interpolate(&val(&rel.m2));

    let mut out = EncodedIndex {
        relation: rel.clone(),
        k_set,
        alpha,
        p1,
        p2,
        p3,
        p4,
        q,
        q1,
        q2,
        q3,
        q4,
        a_poly,
        b_poly,
        h_domain,
        m_domain,
        positions,
        row,
        col,
        rowcol,
        val1,
        val2,
        bytes: Vec::new(),
        digest: [0; 32],
    };
    out.bytes = out.encode();
    out.digest = keccak256(&out.bytes);
    offline_check(&out)?;
    Ok(out)
}

/// Pointwise recomputation of `Q, Q1..Q4` and `P4` straight from `h, h′, h″`.
pub struct PointwiseFormulas<'a> {
    rel: &'a RelationIndex,
    k_set: &'a [F],
    alpha: F,
    a_poly: &'a Poly,
    b_poly: &'a Poly,
}

impl<'a> PointwiseFormulas<'a> {
    pub fn new(idx: &'a EncodedIndex) -> Self {
        Self {
            rel: &idx.relation,
            k_set: &idx.k_set,
            alpha: idx.alpha,
            a_poly: &idx.a_poly,
            b_poly: &idx.b_poly,
        }
    }

    fn h(&self, x: F) -> F {
        self.rel.h.eval(x)
    }
    fn hp(&self, x: F) -> F {
        self.rel.h_prime.eval(x)
    }
    fn hpp(&self, x: F) -> F {
        self.rel.h_dblprime.eval(x)
    }

    pub fn q(&self, x: F) -> F {
        self.k_set
            .iter()
            .map(|&k| self.h(k + F::ONE) * self.hp(F::ONE) - self.hp(k * k - x) * self.hpp(F::ONE))
            .product()
    }

    pub fn q1(&self, x: F) -> F {
        let n = F::new(self.rel.n as u64);
        self.q(x - self.alpha) + self.rel.m1.value_sum() * self.h(x) * self.hp(F::ONE) + n * self.hpp(x) * self.h(self.alpha)
    }

    pub fn q2(&self, x: F) -> F {
        self.q(x + self.alpha) + self.rel.m2.value_sum() * (self.hp(x) * self.hpp(F::ONE) - self.q1(x))
    }

    pub fn q3(&self, x: F) -> F {
        let shift = self.h(self.alpha) * self.hp(F::ONE);
        x * self.h(x) * self.hp(self.alpha) - self.a_poly.eval(x) * self.q1(x - shift)
    }

    pub fn q4(&self, x: F) -> F {
        let shift = self.hp(self.k_set[0]) * self.hpp(F::ONE);
        x * self.hp(x) * self.hpp(self.alpha) - self.b_poly.eval(x) * self.q2(x - shift)
    }

    pub fn p4(&self, x: F, y: F) -> F {
        self.h(x) * self.h(y) + self.hp(x) * self.hpp(y)
    }
}

fn offline_check(idx: &EncodedIndex) -> Result<()> {
    let pw = PointwiseFormulas::new(idx);
    let mut t = Transcript::new(b"lumen/offline-check");
    t.absorb(b"index", &idx.digest);
    for _ in 0..OFFLINE_CHECK_POINTS {
        let x = t.challenge_field(b"x");
        let y = t.challenge_field(b"y");
        let checks = [
            ("Q", idx.q.eval(x), pw.q(x)),
            ("Q1", idx.q1.eval(x), pw.q1(x)),
            ("Q2", idx.q2.eval(x), pw.q2(x)),
            ("Q3", idx.q3.eval(x), pw.q3(x)),
            ("Q4", idx.q4.eval(x), pw.q4(x)),
            ("P4", idx.p4.eval(x, y), pw.p4(x, y)),
        ];
        for (name, coeff_form, pointwise) in checks {
            if coeff_form != pointwise {
                return Err(LumenError::IndexInconsistency(format!("{name} disagrees with its pointwise formula")));
            }
        }
    }
    Ok(())
}

impl EncodedIndex {
    pub fn n(&self) -> usize {
        self.relation.n
    }

    /// Padded number of sparse positions.
    pub fn s(&self) -> usize {
        self.positions.positions.len()
    }

    pub fn digest(&self) -> Digest32 {
        self.digest
    }

    pub fn to_bytes(&self) -> &[u8] {
        &self.bytes
    }

    fn encode(&self) -> Vec<u8> {
        let rel = &self.relation;
        let mut out = Vec::new();
        out.extend_from_slice(INDEX_MAGIC);
        out.push(INDEX_VERSION);
        for v in [rel.n, rel.k, rel.m, rel.h_bound, self.s(), self.positions.real_len] {
            out.extend_from_slice(&(v as u64).to_le_bytes());
        }
        for m in [&rel.m1, &rel.m2] {
            out.extend_from_slice(&(m.nnz() as u64).to_le_bytes());
            for &(r, c, v) in &m.entries {
                out.extend_from_slice(&(r as u64).to_le_bytes());
                out.extend_from_slice(&(c as u64).to_le_bytes());
                out.extend_from_slice(&v.to_bytes());
            }
        }
        for p in [&rel.h, &rel.h_prime, &rel.h_dblprime] {
            p.write_bytes(&mut out);
        }
        for b in [&self.p1, &self.p2, &self.p3, &self.p4] {
            b.write_bytes(&mut out);
        }
        for p in [
            &self.q, &self.q1, &self.q2, &self.q3, &self.q4, &self.a_poly, &self.b_poly, &self.row, &self.col,
            &self.rowcol, &self.val1, &self.val2,
        ] {
            p.write_bytes(&mut out);
        }
        out
    }

    /// `M̃_ε(τ, X) = Σ_{(r,c)} (M1 + ε·M2)[r][c]·Δ_{ω^r}(τ)·Δ_{ω^c}(X)` as a polynomial in `X`.
    pub fn matrix_slice(&self, tau: F, eps: F) -> Poly {
        let lag = self.h_domain.lagrange_coefficients(tau);
        let mut vals = vec![F::ZERO; self.n()];
        for &(r, c, v) in &self.relation.m1.entries {
            vals[c] += v * lag[r];
        }
        for &(r, c, v) in &self.relation.m2.entries {
            vals[c] += eps * v * lag[r];
        }
        self.h_domain.interpolate(&vals)
    }

    /// `Λ_H(τ, X)` as a polynomial in `X`: its values on `H` are `Δ_h(τ)`.
    pub fn lambda_slice(&self, tau: F) -> Poly {
        self.h_domain.interpolate(&self.h_domain.lagrange_coefficients(tau))
    }

    /// `Σ_{κ∈M} val_ε(κ)·Δ_{row κ}(τ)·Δ_{col κ}(β)`, straight from the sparse entries.
    pub fn matrix_eval(&self, tau: F, eps: F, beta: F) -> F {
        let lt = self.h_domain.lagrange_coefficients(tau);
        let lb = self.h_domain.lagrange_coefficients(beta);
        let mut acc = F::ZERO;
        for &(r, c, v) in &self.relation.m1.entries {
            acc += v * lt[r] * lb[c];
        }
        for &(r, c, v) in &self.relation.m2.entries {
            acc += eps * v * lt[r] * lb[c];
        }
        acc
    }
}
