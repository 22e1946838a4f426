//! Prime-field arithmetic and the small amount of linear algebra the protocol needs.
//!
//! Messages live in `F_{q^m}` but every coefficient the protocol ever applies lies in
//! the base field `F_q`, so a message is stored as a length-`m` vector over `F_q` and
//! scalars act coordinatewise. No extension-field multiplication is required.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported modulus. Keeps `a * b` inside a `u64`.
pub const MAX_MODULUS: u64 = u32::MAX as u64;

/// The prime field `GF(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q > MAX_MODULUS || !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    /// Smallest prime field with at least `n` elements.
    pub fn at_least(n: u64) -> Self {
        Self::new(next_prime(n.max(2))).expect("next_prime returns a prime")
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem {
            value: v % self.q,
            modulus: self.q,
        }
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.q
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    /// `base^exp` with `0^0 = 1`.
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.q;
        let mut b = base % self.q;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.q) {
            return Err(Error::NoInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Rows `j = 0..n_rows` of the power matrix, row `j` being `(w_1^j, ..., w_n^j)`.
    pub fn power_rows(&self, nodes: &[u64], n_rows: usize) -> Vec<Vec<u64>> {
        (0..n_rows as u64)
            .map(|j| nodes.iter().map(|&w| self.pow(w, j)).collect())
            .collect()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn next_prime(mut n: u64) -> u64 {
    while !is_prime(n) {
        n += 1;
    }
    n
}

/// An element of `GF(q)` that remembers its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElem {
    value: u64,
    modulus: u64,
}

impl FieldElem {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    fn field(&self) -> PrimeField {
        PrimeField { q: self.modulus }
    }

    fn check(&self, other: &FieldElem) -> Result<PrimeField> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(self.modulus, other.modulus));
        }
        Ok(self.field())
    }

    fn wrap(&self, value: u64) -> FieldElem {
        FieldElem {
            value,
            modulus: self.modulus,
        }
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(self.wrap(f.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(self.wrap(f.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        let f = self.check(other)?;
        Ok(self.wrap(f.mul(self.value, other.value)))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        Ok(self.wrap(self.field().inv(self.value)?))
    }

    pub fn pow(&self, exp: u64) -> FieldElem {
        self.wrap(self.field().pow(self.value, exp))
    }
}

/// A message: `m` symbols over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MessageVec {
    pub symbols: Vec<u64>,
}

impl MessageVec {
    pub fn new(symbols: Vec<u64>) -> Self {
        Self { symbols }
    }

    pub fn zero(len: usize) -> Self {
        Self {
            symbols: vec![0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, field: &PrimeField, c: u64, other: &MessageVec) {
        debug_assert_eq!(self.len(), other.len());
        if c == 0 {
            return;
        }
        for (s, &o) in self.symbols.iter_mut().zip(&other.symbols) {
            *s = field.add(*s, field.mul(c, o));
        }
    }

    /// `self -= c * other`
    pub fn sub_scaled(&mut self, field: &PrimeField, c: u64, other: &MessageVec) {
        self.add_scaled(field, field.neg(field.reduce(c)), other);
    }

    pub fn scale(&mut self, field: &PrimeField, c: u64) {
        for s in &mut self.symbols {
            *s = field.mul(*s, c);
        }
    }

    pub fn add(&self, field: &PrimeField, other: &MessageVec) -> MessageVec {
        let mut out = self.clone();
        out.add_scaled(field, 1, other);
        out
    }
}

/// Solves `sum_l w_l^j x_l = rhs_j` for `j = 0..n`.
///
/// Uses the Lagrange basis of the nodes: if `L_l(t) = sum_j c_{l,j} t^j` is the
/// basis polynomial that is 1 at `w_l` and 0 at the other nodes, then
/// `x_l = sum_j c_{l,j} rhs_j`. Runs in `O(n^2)` field operations per symbol.
pub fn vandermonde_solve(
    field: &PrimeField,
    omegas: &[u64],
    rhs: &[MessageVec],
) -> Result<Vec<MessageVec>> {
    let n = omegas.len();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = rhs[0].len();
    if let Some(bad) = rhs.iter().find(|r| r.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: bad.len(),
        });
    }
    let nodes: Vec<u64> = omegas.iter().map(|&w| field.reduce(w)).collect();
    for i in 0..n {
        if nodes[i + 1..].contains(&nodes[i]) {
            return Err(Error::SingularSystem);
        }
    }

    // master(t) = prod (t - w_k), coefficients low degree first, degree n
    let mut master = vec![0u64; n + 1];
    master[0] = 1;
    for (deg, &w) in nodes.iter().enumerate() {
        for i in (1..=deg + 1).rev() {
            master[i] = field.sub(master[i - 1], field.mul(w, master[i]));
        }
        master[0] = field.neg(field.mul(w, master[0]));
    }

    let mut out = Vec::with_capacity(n);
    let mut basis = vec![0u64; n];
    for &w in &nodes {
        // synthetic division master(t) / (t - w), quotient of degree n-1
        basis[n - 1] = master[n];
        for i in (0..n - 1).rev() {
            basis[i] = field.add(master[i + 1], field.mul(w, basis[i + 1]));
        }
        // quotient(w) = prod_{k != l} (w - w_k)
        let denom = basis
            .iter()
            .rev()
            .fold(0u64, |acc, &c| field.add(field.mul(acc, w), c));
        let scale = field.inv(denom)?;
        let mut x = MessageVec::zero(width);
        for (c, r) in basis.iter().zip(rhs) {
            x.add_scaled(field, field.mul(*c, scale), r);
        }
        out.push(x);
    }
    Ok(out)
}

/// A rectangular coefficient matrix over `F_q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffMatrix {
    field: PrimeField,
    n_cols: usize,
    rows: Vec<Vec<u64>>,
}

impl CoeffMatrix {
    pub fn new(field: PrimeField, n_cols: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        let mut rows = rows;
        for r in &mut rows {
            if r.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    expected: n_cols,
                    got: r.len(),
                });
            }
            for v in r.iter_mut() {
                *v = field.reduce(*v);
            }
        }
        Ok(Self {
            field,
            n_cols,
            rows,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn push_row(&mut self, row: Vec<u64>) -> Result<()> {
        if row.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                got: row.len(),
            });
        }
        self.rows
            .push(row.into_iter().map(|v| self.field.reduce(v)).collect());
        Ok(())
    }

    pub fn transpose(&self) -> CoeffMatrix {
        let rows = (0..self.n_cols)
            .map(|c| self.rows.iter().map(|r| r[c]).collect())
            .collect();
        CoeffMatrix {
            field: self.field,
            n_cols: self.rows.len(),
            rows,
        }
    }

    pub fn row_space(&self) -> RowSpace {
        let mut space = RowSpace::new(self.field, self.n_cols);
        for r in &self.rows {
            space.insert(r.clone());
        }
        space
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank()
    }

    pub fn in_row_space(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                got: v.len(),
            });
        }
        Ok(self.row_space().contains(v))
    }

    /// Gauss-Jordan solve of a square nonsingular system with message right-hand sides.
    pub fn solve(&self, rhs: &[MessageVec]) -> Result<Vec<MessageVec>> {
        let n = self.n_cols;
        if self.rows.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.rows.len(),
            });
        }
        if rhs.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let f = &self.field;
        let mut a = self.rows.clone();
        let mut b = rhs.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a[r][col] != 0)
                .ok_or(Error::SingularSystem)?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            let inv = f.inv(a[col][col])?;
            for v in &mut a[col] {
                *v = f.mul(*v, inv);
            }
            b[col].scale(f, inv);
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let factor = a[r][col];
                    let (pivot_row, pivot_rhs) = (a[col].clone(), b[col].clone());
                    for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                        *x = f.sub(*x, f.mul(factor, *p));
                    }
                    b[r].sub_scaled(f, factor, &pivot_rhs);
                }
            }
        }
        Ok(b)
    }
}

/// Incrementally maintained reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct RowSpace {
    field: PrimeField,
    n_cols: usize,
    // (pivot column, row normalised so the pivot is 1 and other basis rows are 0 there)
    basis: Vec<(usize, Vec<u64>)>,
}

impl RowSpace {
    pub fn new(field: PrimeField, n_cols: usize) -> Self {
        Self {
            field,
            n_cols,
            basis: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn reduce(&self, mut v: Vec<u64>) -> Vec<u64> {
        let f = &self.field;
        for (p, row) in &self.basis {
            let c = v[*p];
            if c != 0 {
                for (x, r) in v.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, *r));
                }
            }
        }
        v
    }

    /// Adds `v` to the span. Returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.n_cols);
        let f = self.field;
        let mut v = self.reduce(v.into_iter().map(|x| f.reduce(x)).collect());
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[p]).expect("pivot is nonzero");
        for x in &mut v {
            *x = f.mul(*x, inv);
        }
        for (_, row) in &mut self.basis {
            let c = row[p];
            if c != 0 {
                for (x, r) in row.iter_mut().zip(&v) {
                    *x = f.sub(*x, f.mul(c, *r));
                }
            }
        }
        self.basis.push((p, v));
        true
    }

    pub fn insert_unit(&mut self, col: usize) -> bool {
        let mut e = vec![0; self.n_cols];
        e[col] = 1;
        self.insert(e)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let f = self.field;
        self.reduce(v.iter().map(|&x| f.reduce(x)).collect())
            .iter()
            .all(|&x| x == 0)
    }

    pub fn contains_unit(&self, col: usize) -> bool {
        let mut e = vec![0; self.n_cols];
        e[col] = 1;
        self.contains(&e)
    }
}
