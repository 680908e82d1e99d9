//! The indexed relation: square sparse matrices `M1`, `M2` over `F^n` with
//! witness `z` satisfying `(M1·z) ∘ (M2·z) = z`, plus the auxiliary
//! polynomials `h, h′, h″` (degree `< h_bound`) and `K = {h″(1), .., h″(m)}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LumenError, Result};
use crate::field_poly::{FieldElement, Poly};

type F = FieldElement;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub n: usize,
    /// `(row, col, value)`, sorted row-major, no duplicates, no zero values.
    pub entries: Vec<(usize, usize, F)>,
}

impl SparseMatrix {
    pub fn new(n: usize, mut entries: Vec<(usize, usize, F)>) -> Result<Self> {
        entries.retain(|e| !e.2.is_zero());
        entries.sort_by_key(|e| (e.0, e.1));
        for w in entries.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(LumenError::IndexInconsistency(format!("duplicate entry at ({}, {})", w[0].0, w[0].1)));
            }
        }
        if let Some(e) = entries.iter().find(|e| e.0 >= n || e.1 >= n) {
            return Err(LumenError::IndexInconsistency(format!("entry ({}, {}) outside {n}x{n}", e.0, e.1)));
        }
        Ok(Self { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn mul_vec(&self, z: &[F]) -> Vec<F> {
        let mut out = vec![F::ZERO; self.n];
        for &(r, c, v) in &self.entries {
            out[r] += v * z[c];
        }
        out
    }

    pub fn value_sum(&self) -> F {
        self.entries.iter().map(|e| e.2).sum()
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.entries
            .binary_search_by_key(&(row, col), |e| (e.0, e.1))
            .map(|i| self.entries[i].2)
            .unwrap_or(F::ZERO)
    }

    /// Sum of each row's values.
    pub fn row_sums(&self) -> Vec<F> {
        let mut out = vec![F::ZERO; self.n];
        for &(r, _, v) in &self.entries {
            out[r] += v;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationIndex {
    /// Matrix dimension; a power of two so rows map onto a subgroup.
    pub n: usize,
    /// Sparsity bound on both matrices.
    pub k: usize,
    pub m1: SparseMatrix,
    pub m2: SparseMatrix,
    pub h: Poly,
    pub h_prime: Poly,
    pub h_dblprime: Poly,
    /// `|K|`
    pub m: usize,
    /// Degree bound for `h, h′, h″`; also the index scalar `α` in the encoder.
    pub h_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub z: Vec<F>,
}

impl RelationIndex {
    /// `K = [h″(1), .., h″(m)]`
    pub fn k_set(&self) -> Vec<F> {
        (1..=self.m as u64).map(|i| self.h_dblprime.eval(F::new(i))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(LumenError::IndexInconsistency(m));
        if self.n == 0 || !self.n.is_power_of_two() {
            return bad(format!("n = {} must be a power of two", self.n));
        }
        if self.m1.n != self.n || self.m2.n != self.n {
            return bad("matrix dimensions differ from n".into());
        }
        if self.m1.nnz() > self.k || self.m2.nnz() > self.k {
            return bad(format!("sparsity exceeds k = {}", self.k));
        }
        if self.h_bound == 0 || self.h_bound > self.m {
            return bad(format!("need 1 <= h_bound <= m, got h_bound = {}, m = {}", self.h_bound, self.m));
        }
        for p in [&self.h, &self.h_prime, &self.h_dblprime] {
            if p.len() > self.h_bound {
                return bad(format!("auxiliary polynomial exceeds degree bound {}", self.h_bound));
            }
        }
        let mut ks = self.k_set();
        ks.sort();
        ks.dedup();
        if ks.len() != self.m {
            return bad("K has repeated elements".into());
        }
        Ok(())
    }

    /// Direct evaluation of `(M1 z) ∘ (M2 z) = z`.
    pub fn check_witness(&self, w: &Witness) -> Result<()> {
        if w.z.len() != self.n {
            return Err(LumenError::WitnessMismatch(format!("witness length {} != {}", w.z.len(), self.n)));
        }
        let y1 = self.m1.mul_vec(&w.z);
        let y2 = self.m2.mul_vec(&w.z);
        for i in 0..self.n {
            if y1[i] * y2[i] != w.z[i] {
                return Err(LumenError::WitnessMismatch(format!("row {i} violated")));
            }
        }
        Ok(())
    }
}

fn nonzero(rng: &mut impl Rng) -> F {
    loop {
        let x = F::new(rng.gen());
        if !x.is_zero() {
            return x;
        }
    }
}

fn random_poly(rng: &mut impl Rng, len: usize) -> Poly {
    Poly::from_coeffs((0..len).map(|_| F::new(rng.gen())).collect())
}

pub const DEFAULT_H_BOUND: usize = 8;

/// A random satisfiable instance of dimension `n`.
pub fn generate_satisfiable(n: usize, rng: &mut impl Rng) -> Result<(RelationIndex, Witness)> {
    generate_with(n, DEFAULT_H_BOUND, DEFAULT_H_BOUND, rng)
}

pub fn generate_with(n: usize, h_bound: usize, m: usize, rng: &mut impl Rng) -> Result<(RelationIndex, Witness)> {
    if n == 0 || !n.is_power_of_two() {
        return Err(LumenError::InvalidParams(format!("relation size {n} must be a power of two")));
    }
    let z: Vec<F> = (0..n).map(|_| nonzero(rng)).collect();
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for i in 0..n {
        loop {
            let j1 = rng.gen_range(0..n);
            let a = nonzero(rng);
            let mut row = vec![(i, j1, a)];
            let mut y1 = a * z[j1];
            if n > 1 && rng.gen_bool(0.5) {
                let j = (j1 + 1 + rng.gen_range(0..n - 1)) % n;
                let b = nonzero(rng);
                row.push((i, j, b));
                y1 += b * z[j];
            }
            if y1.is_zero() {
                continue;
            }
            let j2 = rng.gen_range(0..n);
            e2.push((i, j2, z[i] / (y1 * z[j2])));
            e1.extend(row);
            break;
        }
    }
    let m1 = SparseMatrix::new(n, e1)?;
    let m2 = SparseMatrix::new(n, e2)?;
    loop {
        let rel = RelationIndex {
            n,
            k: m1.nnz().max(m2.nnz()),
            m1: m1.clone(),
            m2: m2.clone(),
            h: random_poly(rng, h_bound),
            h_prime: random_poly(rng, h_bound),
            h_dblprime: random_poly(rng, h_bound),
            m,
            h_bound,
        };
        if rel.validate().is_ok() {
            let w = Witness { z };
            rel.check_witness(&w)?;
            return Ok((rel, w));
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RelationJson {
    n: usize,
    k: usize,
    m: usize,
    h_bound: usize,
    m1: Vec<(usize, usize, u64)>,
    m2: Vec<(usize, usize, u64)>,
    h: Vec<u64>,
    h_prime: Vec<u64>,
    h_dblprime: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct WitnessJson {
    z: Vec<u64>,
}

fn field_from_json(v: u64) -> Result<F> {
    if v >= F::MODULUS {
        return Err(LumenError::Malformed(format!("{v} is not a canonical field element")));
    }
    Ok(F::new(v))
}

fn poly_to_json(p: &Poly) -> Vec<u64> {
    p.coeffs().iter().map(|c| c.value()).collect()
}

fn poly_from_json(v: &[u64]) -> Result<Poly> {
    Ok(Poly::from_coeffs(v.iter().map(|x| field_from_json(*x)).collect::<Result<_>>()?))
}

fn entries_from_json(v: &[(usize, usize, u64)]) -> Result<Vec<(usize, usize, F)>> {
    v.iter().map(|&(r, c, x)| Ok((r, c, field_from_json(x)?))).collect()
}

impl RelationIndex {
    pub fn to_json(&self) -> String {
        let j = RelationJson {
            n: self.n,
            k: self.k,
            m: self.m,
            h_bound: self.h_bound,
            m1: self.m1.entries.iter().map(|&(r, c, v)| (r, c, v.value())).collect(),
            m2: self.m2.entries.iter().map(|&(r, c, v)| (r, c, v.value())).collect(),
            h: poly_to_json(&self.h),
            h_prime: poly_to_json(&self.h_prime),
            h_dblprime: poly_to_json(&self.h_dblprime),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: RelationJson = serde_json::from_str(s).map_err(|e| LumenError::Malformed(e.to_string()))?;
        let rel = Self {
            n: j.n,
            k: j.k,
            m1: SparseMatrix::new(j.n, entries_from_json(&j.m1)?)?,
            m2: SparseMatrix::new(j.n, entries_from_json(&j.m2)?)?,
            h: poly_from_json(&j.h)?,
            h_prime: poly_from_json(&j.h_prime)?,
            h_dblprime: poly_from_json(&j.h_dblprime)?,
            m: j.m,
            h_bound: j.h_bound,
        };
        rel.validate()?;
        Ok(rel)
    }
}

impl Witness {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&WitnessJson { z: self.z.iter().map(|x| x.value()).collect() }).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: WitnessJson = serde_json::from_str(s).map_err(|e| LumenError::Malformed(e.to_string()))?;
        Ok(Self { z: j.z.into_iter().map(field_from_json).collect::<Result<_>>()? })
    }
}
