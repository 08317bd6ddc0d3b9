//! Exact linear algebra over a [`Field`]: row echelon forms, kernels, linear
//! membership and joint eigenspace decompositions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::scalar::{Field, Q};

/// Sparse vector entries, sorted by index, without explicit zeros.
pub type SparseRow<F> = Vec<(usize, F)>;

/// Matrices at or above this size in either dimension use sparse storage.
pub const SPARSE_THRESHOLD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrices {0} and {1} do not commute")]
    CommutationFailure(usize, usize),
    #[error("characteristic polynomial of matrix {matrix} does not split over the rationals")]
    IrrationalSpectrum { matrix: usize },
    #[error("matrix {matrix} is not diagonalizable")]
    NotDiagonalizable { matrix: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Storage<F> {
    Dense(Vec<F>),
    Sparse(Vec<SparseRow<F>>),
}

/// A `rows x cols` matrix; dense below [`SPARSE_THRESHOLD`], sparse above.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    storage: Storage<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        if rows >= SPARSE_THRESHOLD || cols >= SPARSE_THRESHOLD {
            Matrix {
                rows,
                cols,
                storage: Storage::Sparse(vec![Vec::new(); rows]),
            }
        } else {
            Matrix {
                rows,
                cols,
                storage: Storage::Dense(vec![F::zero(); rows * cols]),
            }
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, x) in row.into_iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x);
                }
            }
        }
        m
    }

    pub fn from_sparse_rows(cols: usize, rows: Vec<SparseRow<F>>) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, x) in row {
                assert!(j < cols, "column index out of range");
                m.set(i, j, x);
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(len: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Self::zeros(len, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), len);
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x.clone());
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols + j].clone(),
            Storage::Sparse(s) => match s[i].binary_search_by_key(&j, |e| e.0) {
                Ok(p) => s[i][p].1.clone(),
                Err(_) => F::zero(),
            },
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        match &mut self.storage {
            Storage::Dense(d) => d[i * self.cols + j] = x,
            Storage::Sparse(s) => {
                let row = &mut s[i];
                match row.binary_search_by_key(&j, |e| e.0) {
                    Ok(p) if x.is_zero() => {
                        row.remove(p);
                    }
                    Ok(p) => row[p].1 = x,
                    Err(_) if x.is_zero() => {}
                    Err(p) => row.insert(p, (j, x)),
                }
            }
        }
    }

    /// Nonzero entries of row `i`, by increasing column.
    pub fn row_entries(&self, i: usize) -> SparseRow<F> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols..(i + 1) * self.cols]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect(),
            Storage::Sparse(s) => s[i].clone(),
        }
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for (j, x) in self.row_entries(i) {
                t.set(j, i, x);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.row_entries(i)
                    .into_iter()
                    .fold(F::zero(), |acc, (j, x)| acc + x * &v[j])
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "matrix product shapes");
        let mut out = Matrix::zeros(self.rows, other.cols);
        let other_rows: Vec<SparseRow<F>> = (0..other.rows).map(|k| other.row_entries(k)).collect();
        for i in 0..self.rows {
            let mut acc: BTreeMap<usize, F> = BTreeMap::new();
            for (k, a) in self.row_entries(i) {
                for (j, b) in &other_rows[k] {
                    let e = acc.entry(*j).or_insert_with(F::zero);
                    *e = e.clone() + a.clone() * b;
                }
            }
            for (j, x) in acc {
                if !x.is_zero() {
                    out.set(i, j, x);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..other.rows {
            for (j, x) in other.row_entries(i) {
                let v = out.get(i, j) - x;
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn scale(&self, s: &F) -> Matrix<F> {
        let mut out = Matrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, x) in self.row_entries(i) {
                out.set(i, j, x * s);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        (0..self.rows).all(|i| self.row_entries(i).is_empty())
    }

    pub fn trace(&self) -> F {
        (0..self.rows.min(self.cols)).fold(F::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn rank(&self) -> usize {
        rank(self)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut ech = Echelon::new(2 * n);
        for i in 0..n {
            let mut row = self.row_entries(i);
            row.push((n + i, F::one()));
            if !ech.insert(row) {
                return None;
            }
        }
        ech.reduce_fully();
        if (0..n).any(|c| !ech.pivots.contains_key(&c)) {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for (c, row) in &ech.pivots {
            for (j, x) in row {
                if *j >= n {
                    inv.set(*c, j - n, x.clone());
                }
            }
        }
        Some(inv)
    }
}

/// Incremental row echelon form with unit pivots.
///
/// Stored rows always have zeros in the pivot columns of rows inserted before
/// them; [`Echelon::reduce_fully`] turns the collection into reduced form.
#[derive(Clone, Debug)]
pub struct Echelon<F> {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow<F>>,
}

impl<F: Field> Echelon<F> {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduce `row` against the stored pivots.
    pub fn reduce(&self, row: SparseRow<F>) -> SparseRow<F> {
        let mut work: BTreeMap<usize, F> = row.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        let mut cursor = 0usize;
        loop {
            let next = work
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, x)| (*c, x.clone()));
            let Some((c, coef)) = next else { break };
            for (j, x) in &self.pivots[&c] {
                let e = work.entry(*j).or_insert_with(F::zero);
                *e = e.clone() - coef.clone() * x;
                if e.is_zero() {
                    work.remove(j);
                }
            }
            cursor = c + 1;
        }
        work.into_iter().collect()
    }

    /// Insert a row; returns false if it was dependent on the stored rows.
    pub fn insert(&mut self, row: SparseRow<F>) -> bool {
        debug_assert!(row.iter().all(|(j, _)| *j < self.cols));
        let reduced = self.reduce(row);
        let Some((lead, lead_val)) = reduced.first().cloned() else {
            return false;
        };
        let inv = lead_val.inverse().expect("nonzero pivot");
        let normalized: SparseRow<F> = reduced.into_iter().map(|(j, x)| (j, x * &inv)).collect();
        self.pivots.insert(lead, normalized);
        true
    }

    /// Bring the stored rows into reduced row echelon form.
    pub fn reduce_fully(&mut self) {
        let keys: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for c in keys {
            let row = self.pivots.remove(&c).unwrap();
            let (lead, rest) = row.split_first().unwrap();
            let tail = self.reduce_tail(rest.to_vec());
            let mut new_row = vec![lead.clone()];
            new_row.extend(tail);
            self.pivots.insert(c, new_row);
        }
    }

    fn reduce_tail(&self, row: SparseRow<F>) -> SparseRow<F> {
        self.reduce(row)
    }

    /// Kernel basis of the stored rows, as sparse vectors with a unit entry at
    /// each free column.
    pub fn kernel_sparse(&mut self) -> Vec<SparseRow<F>> {
        self.reduce_fully();
        let mut by_free: BTreeMap<usize, Vec<(usize, F)>> = BTreeMap::new();
        for (p, row) in &self.pivots {
            for (j, x) in row.iter().skip(1) {
                by_free.entry(*j).or_default().push((*p, -x.clone()));
            }
        }
        (0..self.cols)
            .filter(|c| !self.pivots.contains_key(c))
            .map(|f| {
                let mut v = by_free.remove(&f).unwrap_or_default();
                v.push((f, F::one()));
                v.sort_by_key(|e| e.0);
                v
            })
            .collect()
    }

    pub fn into_pivot_rows(mut self) -> Vec<(usize, SparseRow<F>)> {
        self.reduce_fully();
        self.pivots.into_iter().collect()
    }
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut ech = Echelon::new(m.cols());
    for i in 0..m.rows() {
        ech.insert(m.row_entries(i));
    }
    ech.rank()
}

/// Basis of the kernel of `m`, as dense vectors.
pub fn nullspace<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    nullspace_sparse(m.cols(), (0..m.rows()).map(|i| m.row_entries(i)))
        .into_iter()
        .map(|v| densify(&v, m.cols()))
        .collect()
}

/// Kernel of the matrix with the given sparse rows.
pub fn nullspace_sparse<F: Field>(
    cols: usize,
    rows: impl IntoIterator<Item = SparseRow<F>>,
) -> Vec<SparseRow<F>> {
    let mut ech = Echelon::new(cols);
    for r in rows {
        ech.insert(r);
    }
    ech.kernel_sparse()
}

pub fn densify<F: Field>(v: &[(usize, F)], len: usize) -> Vec<F> {
    let mut out = vec![F::zero(); len];
    for (j, x) in v {
        out[*j] = x.clone();
    }
    out
}

pub fn sparsify<F: Field>(v: &[F]) -> SparseRow<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(j, x)| (j, x.clone()))
        .collect()
}

/// Coordinates of `v` in terms of `basis`, or `None` if `v` is not in their
/// span. For dependent bases one particular solution is returned.
pub fn solve_membership<F: Field>(v: &[F], basis: &[Vec<F>]) -> Option<Vec<F>> {
    let n = v.len();
    let k = basis.len();
    for b in basis {
        assert_eq!(b.len(), n, "vector lengths differ");
    }
    let mut ech = Echelon::new(k + 1);
    for i in 0..n {
        let mut row: SparseRow<F> = basis
            .iter()
            .enumerate()
            .filter(|(_, b)| !b[i].is_zero())
            .map(|(j, b)| (j, b[i].clone()))
            .collect();
        if !v[i].is_zero() {
            row.push((k, v[i].clone()));
        }
        ech.insert(row);
    }
    if ech.pivots.contains_key(&k) {
        return None;
    }
    let mut x = vec![F::zero(); k];
    for (p, row) in ech.into_pivot_rows() {
        if let Some((_, rhs)) = row.iter().find(|(j, _)| *j == k) {
            x[p] = rhs.clone();
        }
    }
    Some(x)
}

/// Solve `m x = v` for `x`.
pub fn solve<F: Field>(m: &Matrix<F>, v: &[F]) -> Option<Vec<F>> {
    let cols: Vec<Vec<F>> = (0..m.cols()).map(|j| m.column(j)).collect();
    solve_membership(v, &cols)
}

/// Basis of the span of `vectors` (a maximal independent subset, in order).
pub fn independent_subset<F: Field>(vectors: &[Vec<F>]) -> Vec<usize> {
    let len = vectors.first().map_or(0, |v| v.len());
    let mut ech = Echelon::new(len);
    vectors
        .iter()
        .enumerate()
        .filter(|(_, v)| ech.insert(sparsify(v)))
        .map(|(i, _)| i)
        .collect()
}

pub fn span_rank<F: Field>(vectors: &[Vec<F>]) -> usize {
    independent_subset(vectors).len()
}

/// Basis of the intersection of two subspaces given by spanning vectors.
pub fn intersect_spans<F: Field>(a: &[Vec<F>], b: &[Vec<F>], len: usize) -> Vec<Vec<F>> {
    // x in both iff x = sum s_i a_i = sum t_j b_j
    let k = a.len() + b.len();
    let mut rows = Vec::with_capacity(len);
    for i in 0..len {
        let mut row: SparseRow<F> = Vec::new();
        for (j, v) in a.iter().enumerate() {
            if !v[i].is_zero() {
                row.push((j, v[i].clone()));
            }
        }
        for (j, v) in b.iter().enumerate() {
            if !v[i].is_zero() {
                row.push((a.len() + j, -v[i].clone()));
            }
        }
        rows.push(row);
    }
    let ker = nullspace_sparse(k, rows);
    let mut out: Vec<Vec<F>> = ker
        .iter()
        .map(|coeffs| {
            let mut x = vec![F::zero(); len];
            for (j, s) in coeffs.iter().filter(|(j, _)| *j < a.len()) {
                for i in 0..len {
                    x[i] = x[i].clone() + s.clone() * &a[*j][i];
                }
            }
            x
        })
        .collect();
    let keep = independent_subset(&out);
    out = keep.into_iter().map(|i| out[i].clone()).collect();
    out
}

/// Dense univariate polynomial over the rationals, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::int(0), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Q::int(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::int(0); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let c = &rem[top] / &lead;
            if !c.is_zero() {
                let shift = top - dd;
                quot[shift] = c.clone();
                for (i, dc) in d.coeffs.iter().enumerate() {
                    rem[shift + i] = &rem[shift + i] - &(&c * dc);
                }
            }
            rem.pop();
        }
        (UPoly::new(quot), UPoly::new(rem))
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while b.degree().is_some() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> UPoly {
        match self.coeffs.last() {
            Some(l) => UPoly::new(self.coeffs.iter().map(|c| c / l).collect()),
            None => self.clone(),
        }
    }

    /// Distinct rational roots, in increasing order.
    ///
    /// Works on the square-free part with integer coefficients and tests all
    /// candidates `p/q` with `p | a_0`, `q | a_n`.
    pub fn rational_roots(&self) -> Option<Vec<Q>> {
        let Some(deg) = self.degree() else {
            return Some(Vec::new());
        };
        if deg == 0 {
            return Some(Vec::new());
        }
        let sqf = {
            let g = self.gcd(&self.derivative());
            self.div_rem(&g).0
        };
        let mut roots = Vec::new();
        let mut p = sqf.clone();
        if p.coeffs[0].is_zero() {
            roots.push(Q::int(0));
            p = p.div_rem(&UPoly::new(vec![Q::int(0), Q::int(1)])).0;
        }
        if p.degree().unwrap_or(0) > 0 {
            let ints = p.integer_coefficients();
            let a0 = ints[0].abs();
            let an = ints.last().unwrap().abs();
            let num_divs = divisors(&a0)?;
            let den_divs = divisors(&an)?;
            for n in &num_divs {
                for d in &den_divs {
                    for sign in [1i64, -1] {
                        let cand = Q::from_big(num_rational::BigRational::new(
                            n * BigInt::from(sign),
                            d.clone(),
                        ));
                        if p.eval(&cand).is_zero() && !roots.contains(&cand) {
                            roots.push(cand);
                        }
                    }
                }
            }
        }
        roots.sort();
        Some(roots)
    }

    fn integer_coefficients(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::from(1), |acc, c| {
            let d = c.denom();
            num_integer::Integer::lcm(&acc, &d)
        });
        self.coeffs
            .iter()
            .map(|c| (c.numer() * &lcm) / c.denom())
            .collect()
    }
}

/// Positive divisors by trial division; `None` if the number is too large to
/// factor by this method.
fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    if n.is_zero() {
        return Some(vec![BigInt::from(1)]);
    }
    let mut m = n.abs().to_u128()?;
    let mut factors: Vec<(u128, u32)> = Vec::new();
    let mut p: u128 = 2;
    let mut steps = 0u64;
    while p * p <= m {
        steps += 1;
        if steps > 5_000_000 {
            return None;
        }
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        factors.push((m, 1));
    }
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut x = *d;
            for _ in 0..=e {
                next.push(x);
                x *= p;
            }
        }
        divs = next;
    }
    divs.sort();
    Some(divs.into_iter().map(BigInt::from).collect())
}

/// Characteristic polynomial `det(x I - m)` by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &Matrix<Q>) -> UPoly {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix required");
    let mut coeffs = vec![Q::int(0); n + 1];
    coeffs[n] = Q::int(1);
    let mut mk = Matrix::<Q>::zeros(n, n);
    let id = Matrix::<Q>::identity(n);
    for k in 1..=n {
        let shifted = {
            let mut t = m.mul(&mk);
            let c = coeffs[n - k + 1].clone();
            for i in 0..n {
                let v = t.get(i, i) + c.clone();
                t.set(i, i, v);
            }
            t
        };
        mk = shifted;
        let tr = m.mul(&mk).trace();
        coeffs[n - k] = -(tr / Q::int(k as i64));
    }
    let _ = id;
    UPoly::new(coeffs)
}

/// A joint eigenspace: eigenvalue of each input matrix and a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenBlock {
    pub eigenvalues: Vec<Q>,
    pub basis: Vec<Vec<Q>>,
}

/// Decompose the ambient space into joint eigenspaces of commuting matrices.
///
/// Blocks come back sorted by eigenvalue tuple. Fails when two matrices do not
/// commute, when a characteristic polynomial has a non-rational root, or when
/// some matrix is not diagonalizable.
pub fn simultaneous_eigenspaces(ms: &[Matrix<Q>]) -> Result<Vec<EigenBlock>, LinalgError> {
    let n = match ms.first() {
        Some(m) => m.rows(),
        None => return Err(LinalgError::Dimension("no matrices".into())),
    };
    for (i, m) in ms.iter().enumerate() {
        if m.rows() != n || m.cols() != n {
            return Err(LinalgError::Dimension(format!("matrix {i} is not {n}x{n}")));
        }
    }
    for i in 0..ms.len() {
        for j in i + 1..ms.len() {
            if !ms[i].mul(&ms[j]).sub(&ms[j].mul(&ms[i])).is_zero() {
                return Err(LinalgError::CommutationFailure(i, j));
            }
        }
    }
    let identity: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut e = vec![Q::int(0); n];
            e[i] = Q::int(1);
            e
        })
        .collect();
    let mut blocks = vec![EigenBlock {
        eigenvalues: Vec::new(),
        basis: identity,
    }];
    for (t, m) in ms.iter().enumerate() {
        let mut refined = Vec::new();
        for block in blocks {
            let dim = block.basis.len();
            if dim == 0 {
                continue;
            }
            // restriction of m to the block, in block coordinates
            let cols: Vec<Vec<Q>> = block
                .basis
                .iter()
                .map(|b| {
                    solve_membership(&m.mul_vec(b), &block.basis)
                        .expect("commuting matrices preserve joint eigenspaces")
                })
                .collect();
            let restricted = Matrix::from_columns(dim, &cols);
            let cp = characteristic_polynomial(&restricted);
            let roots = cp
                .rational_roots()
                .ok_or(LinalgError::IrrationalSpectrum { matrix: t })?;
            let mut found = 0;
            for r in roots {
                let shifted = restricted.sub(&Matrix::identity(dim).scale(&r));
                let ker = nullspace(&shifted);
                found += ker.len();
                let basis: Vec<Vec<Q>> = ker
                    .iter()
                    .map(|coords| {
                        let mut v = vec![Q::int(0); n];
                        for (c, b) in coords.iter().zip(&block.basis) {
                            if !c.is_zero() {
                                for i in 0..n {
                                    v[i] = &v[i] + &(c * &b[i]);
                                }
                            }
                        }
                        v
                    })
                    .collect();
                let mut ev = block.eigenvalues.clone();
                ev.push(r);
                refined.push(EigenBlock {
                    eigenvalues: ev,
                    basis,
                });
            }
            if found < dim {
                // multiplicity of rational roots in the char poly vs geometric
                let mut algebraic = 0;
                let mut rest = cp.clone();
                for r in cp.rational_roots().unwrap_or_default() {
                    let lin = UPoly::new(vec![-r, Q::int(1)]);
                    loop {
                        let (qt, rm) = rest.div_rem(&lin);
                        if rm.degree().is_some() {
                            break;
                        }
                        rest = qt;
                        algebraic += 1;
                    }
                }
                return Err(if algebraic < dim {
                    LinalgError::IrrationalSpectrum { matrix: t }
                } else {
                    LinalgError::NotDiagonalizable { matrix: t }
                });
            }
        }
        blocks = refined;
    }
    blocks.sort_by(|a, b| a.eigenvalues.cmp(&b.eigenvalues));
    Ok(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QuadScalar;
    use proptest::prelude::*;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Q::int(x)).collect())
                .collect(),
        )
    }

    fn is_zero_vec(v: &[Q]) -> bool {
        v.iter().all(|x| x.is_zero())
    }

    #[test]
    fn nullspace_of_identity_is_trivial() {
        assert!(nullspace(&qm(&[&[1, 0], &[0, 1]])).is_empty());
    }

    #[test]
    fn nullspace_of_zero_is_everything() {
        let ns = nullspace(&qm(&[&[0, 0], &[0, 0]]));
        assert_eq!(
            ns,
            vec![vec![Q::int(1), Q::int(0)], vec![Q::int(0), Q::int(1)]]
        );
    }

    #[test]
    fn nullspace_rank_one() {
        let m = qm(&[&[1, 2], &[2, 4]]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        // direct multiplication oracle
        assert!(is_zero_vec(&m.mul_vec(&ns[0])));
        assert_eq!(ns[0], vec![Q::int(-2), Q::int(1)]);
    }

    #[test]
    fn sparse_storage_above_threshold() {
        let m = Matrix::<Q>::identity(SPARSE_THRESHOLD);
        assert!(m.is_sparse());
        assert!(!Matrix::<Q>::identity(3).is_sparse());
        assert_eq!(m.rank(), SPARSE_THRESHOLD);
        let mut z = Matrix::<Q>::zeros(70, 3);
        z.set(69, 2, Q::int(5));
        assert_eq!(z.get(69, 2), Q::int(5));
        z.set(69, 2, Q::int(0));
        assert!(z.is_zero());
    }

    #[test]
    fn membership_examples() {
        let b1 = vec![Q::int(1), Q::int(0), Q::int(2)];
        let b2 = vec![Q::int(0), Q::int(1), Q::int(-1)];
        let basis = vec![b1.clone(), b2.clone()];
        assert_eq!(
            solve_membership(&b1, &basis),
            Some(vec![Q::int(1), Q::int(0)])
        );
        assert_eq!(
            solve_membership(&vec![Q::int(0); 3], &basis),
            Some(vec![Q::int(0), Q::int(0)])
        );
        let v: Vec<Q> = b1
            .iter()
            .zip(&b2)
            .map(|(x, y)| x * &Q::int(2) - y * &Q::int(3))
            .collect();
        assert_eq!(
            solve_membership(&v, &basis),
            Some(vec![Q::int(2), Q::int(-3)])
        );
        assert_eq!(
            solve_membership(&[Q::int(0), Q::int(0), Q::int(1)], &basis),
            None
        );
    }

    #[test]
    fn inverse_roundtrip() {
        let m = qm(&[&[2, 1, 0], &[1, 1, 0], &[0, 3, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(3));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn nullspace_over_quadratic_field() {
        let s = QuadScalar::sqrt_of(2).unwrap();
        let one = QuadScalar::one();
        // [[sqrt2, 2], [1, sqrt2]] has rank 1
        let m = Matrix::from_rows(vec![
            vec![s.clone(), &one + &one],
            vec![one.clone(), s.clone()],
        ]);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn characteristic_polynomial_and_roots() {
        let m = qm(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 3]]);
        let cp = characteristic_polynomial(&m);
        // (x-2)(x-3)^2 = x^3 - 8x^2 + 21x - 18
        assert_eq!(
            cp.coeffs(),
            &[Q::int(-18), Q::int(21), Q::int(-8), Q::int(1)]
        );
        assert_eq!(cp.rational_roots().unwrap(), vec![Q::int(2), Q::int(3)]);
        let irr = UPoly::new(vec![Q::int(-2), Q::int(0), Q::int(1)]);
        assert_eq!(irr.rational_roots().unwrap(), Vec::<Q>::new());
        let half = UPoly::new(vec![Q::int(-1), Q::int(2)]);
        assert_eq!(half.rational_roots().unwrap(), vec![Q::new(1, 2)]);
    }

    #[test]
    fn eigenspaces_identity_and_diagonal() {
        let blocks = simultaneous_eigenspaces(&[Matrix::identity(2)]).unwrap();
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].eigenvalues, vec![Q::int(1)]);
        assert_eq!(blocks[0].basis.len(), 2);
        let blocks = simultaneous_eigenspaces(&[qm(&[&[1, 0], &[0, 2]])]).unwrap();
        let evs: Vec<_> = blocks
            .iter()
            .map(|b| (b.eigenvalues.clone(), b.basis.len()))
            .collect();
        assert_eq!(evs, vec![(vec![Q::int(1)], 1), (vec![Q::int(2)], 1)]);
    }

    #[test]
    fn eigenspaces_of_ad_h_on_sl2() {
        // basis e, f, h: ad h = diag(2, -2, 0)
        let ad_h = qm(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]);
        let blocks = simultaneous_eigenspaces(std::slice::from_ref(&ad_h)).unwrap();
        let evs: Vec<Q> = blocks.iter().map(|b| b.eigenvalues[0].clone()).collect();
        assert_eq!(evs, vec![Q::int(-2), Q::int(0), Q::int(2)]);
        // brute-force oracle: for each integer candidate in a window, solve (ad h - c) v = 0
        for c in -3..=3 {
            let shifted = ad_h.sub(&Matrix::identity(3).scale(&Q::int(c)));
            let dim = nullspace(&shifted).len();
            let block_dim = blocks
                .iter()
                .find(|b| b.eigenvalues[0] == Q::int(c))
                .map_or(0, |b| b.basis.len());
            assert_eq!(dim, block_dim, "candidate {c}");
        }
    }

    #[test]
    fn eigenspace_errors() {
        let a = qm(&[&[1, 1], &[0, 1]]);
        let b = qm(&[&[1, 0], &[1, 1]]);
        assert_eq!(
            simultaneous_eigenspaces(&[a.clone(), b]),
            Err(LinalgError::CommutationFailure(0, 1))
        );
        assert_eq!(
            simultaneous_eigenspaces(&[a]),
            Err(LinalgError::NotDiagonalizable { matrix: 0 })
        );
        let rot = qm(&[&[0, -1], &[1, 0]]);
        assert_eq!(
            simultaneous_eigenspaces(&[rot]),
            Err(LinalgError::IrrationalSpectrum { matrix: 0 })
        );
    }

    fn arb_matrix() -> impl Strategy<Value = Matrix<Q>> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-3i64..4, c), r).prop_map(|rows| {
                Matrix::from_rows(
                    rows.into_iter()
                        .map(|r| r.into_iter().map(Q::int).collect())
                        .collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn rank_nullity(m in arb_matrix()) {
            let ns = nullspace(&m);
            prop_assert_eq!(m.rank() + ns.len(), m.cols());
            for v in &ns {
                prop_assert!(is_zero_vec(&m.mul_vec(v)));
            }
            prop_assert_eq!(span_rank(&ns), ns.len());
        }

        #[test]
        fn eigen_dims_sum_to_ambient(d in proptest::collection::vec(-3i64..4, 1..6)) {
            let n = d.len();
            let mut m = Matrix::<Q>::zeros(n, n);
            for (i, x) in d.iter().enumerate() {
                m.set(i, i, Q::int(*x));
            }
            let blocks = simultaneous_eigenspaces(&[m]).unwrap();
            prop_assert_eq!(blocks.iter().map(|b| b.basis.len()).sum::<usize>(), n);
        }
    }
}
