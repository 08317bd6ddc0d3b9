//! Lie superalgebras given by structure constants in a homogeneous basis.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    independent_subset, nullspace, nullspace_sparse, solve_membership, Matrix, SparseRow,
};
use crate::scalar::{Field, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn add(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// Koszul sign `(-1)^{|x||y|}`.
    pub fn swap_sign(self, other: Parity) -> Q {
        if self.is_odd() && other.is_odd() {
            Q::int(-1)
        } else {
            Q::int(1)
        }
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            other => Err(format!("parity must be 0 or 1, got {other}")),
        }
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        match p {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("vector of length {got} used with an algebra of dimension {dim}")]
    MixedAlgebras { dim: usize, got: usize },
    #[error("algebra has no involution")]
    MissingInvolution,
    #[error("algebra has no invariant form")]
    MissingForm,
    #[error("invalid algebra data: {0}")]
    Schema(String),
    #[error("span of the given matrices is not closed under the supercommutator")]
    NotClosed,
    #[error("vector is not homogeneous")]
    NotHomogeneous,
    #[error("no valid strong reductivity certificate: {0}")]
    NoCertificate(String),
}

/// Element of a Lie superalgebra as a sparse coefficient map over its basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SuperVector {
    dim: usize,
    coeffs: BTreeMap<usize, Q>,
}

impl SuperVector {
    pub fn zero(dim: usize) -> Self {
        SuperVector {
            dim,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut v = Self::zero(dim);
        v.coeffs.insert(i, Q::int(1));
        v
    }

    pub fn from_dense(v: &[Q]) -> Self {
        let coeffs = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        SuperVector {
            dim: v.len(),
            coeffs,
        }
    }

    pub fn from_sparse(dim: usize, entries: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut v = Self::zero(dim);
        for (i, x) in entries {
            assert!(i < dim, "basis index out of range");
            v.add_term(i, &x);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> Q {
        self.coeffs.get(&i).cloned().unwrap_or_else(|| Q::int(0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.coeffs.iter().map(|(i, x)| (*i, x))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn to_dense(&self) -> Vec<Q> {
        let mut out = vec![Q::int(0); self.dim];
        for (i, x) in &self.coeffs {
            out[*i] = x.clone();
        }
        out
    }

    pub fn to_sparse(&self) -> SparseRow<Q> {
        self.coeffs.iter().map(|(i, x)| (*i, x.clone())).collect()
    }

    pub fn add_term(&mut self, i: usize, x: &Q) {
        if x.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(|| Q::int(0));
        *e = &*e + x;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &SuperVector, s: &Q) {
        assert_eq!(self.dim, other.dim, "vectors from different algebras");
        for (i, x) in &other.coeffs {
            self.add_term(*i, &(x * s));
        }
    }

    pub fn scale(&self, s: &Q) -> SuperVector {
        let mut out = SuperVector::zero(self.dim);
        out.add_scaled(self, s);
        out
    }

    pub fn add(&self, other: &SuperVector) -> SuperVector {
        let mut out = self.clone();
        out.add_scaled(other, &Q::int(1));
        out
    }

    pub fn sub(&self, other: &SuperVector) -> SuperVector {
        let mut out = self.clone();
        out.add_scaled(other, &Q::int(-1));
        out
    }
}

/// Declared decomposition `g = z(g) ⊕ (ideals)` certifying strong reductivity.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub center: Vec<SuperVector>,
    pub ideals: Vec<Vec<SuperVector>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Antisymmetry { i: usize, j: usize },
    Parity { i: usize, j: usize },
    Jacobi { i: usize, j: usize, k: usize },
    FormShape,
    FormNotEven { i: usize, j: usize },
    FormNotSupersymmetric { i: usize, j: usize },
    FormNotInvariant { i: usize, j: usize, k: usize },
    FormDegenerate,
    FormNotThetaInvariant { i: usize, j: usize },
    ThetaShape,
    ThetaNotEven { i: usize, j: usize },
    ThetaNotInvolution,
    ThetaNotAutomorphism { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Antisymmetry { i, j } => write!(f, "super-antisymmetry fails at ({i},{j})"),
            Violation::Parity { i, j } => write!(f, "bracket ({i},{j}) has wrong parity"),
            Violation::Jacobi { i, j, k } => write!(f, "graded Jacobi fails at ({i},{j},{k})"),
            Violation::FormShape => write!(f, "form has wrong shape"),
            Violation::FormNotEven { i, j } => {
                write!(f, "form pairs opposite parities at ({i},{j})")
            }
            Violation::FormNotSupersymmetric { i, j } => {
                write!(f, "form is not supersymmetric at ({i},{j})")
            }
            Violation::FormNotInvariant { i, j, k } => {
                write!(f, "form is not invariant at ({i},{j},{k})")
            }
            Violation::FormDegenerate => write!(f, "form is degenerate"),
            Violation::FormNotThetaInvariant { i, j } => {
                write!(f, "form is not theta-invariant at ({i},{j})")
            }
            Violation::ThetaShape => write!(f, "theta has wrong shape"),
            Violation::ThetaNotEven { i, j } => write!(f, "theta mixes parities at ({i},{j})"),
            Violation::ThetaNotInvolution => write!(f, "theta does not square to the identity"),
            Violation::ThetaNotAutomorphism { i, j } => {
                write!(f, "theta is not an automorphism at ({i},{j})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A finite-dimensional Lie superalgebra with optional form `b` and
/// involution `theta`.
#[derive(Clone, Debug)]
pub struct LieSuperalgebra {
    names: Vec<String>,
    parity: Vec<Parity>,
    // full n*n bracket table, derived from the stored constants
    table: Vec<SparseRow<Q>>,
    form: Option<Matrix<Q>>,
    theta: Option<Matrix<Q>>,
    decomposition: Option<Decomposition>,
}

impl LieSuperalgebra {
    /// Build from structure constants. Entries `(i, j)` with `i <= j` define
    /// `[x_i, x_j]`; the opposite entry follows from super-antisymmetry unless
    /// it is given explicitly (which is only useful for testing validation).
    pub fn new(
        names: Vec<String>,
        parity: Vec<Parity>,
        brackets: impl IntoIterator<Item = ((usize, usize), SparseRow<Q>)>,
    ) -> Result<Self, LieError> {
        let n = names.len();
        if parity.len() != n {
            return Err(LieError::Schema(
                "names and parities differ in length".into(),
            ));
        }
        let mut given: BTreeMap<(usize, usize), SparseRow<Q>> = BTreeMap::new();
        for ((i, j), out) in brackets {
            if i >= n || j >= n || out.iter().any(|(k, _)| *k >= n) {
                return Err(LieError::Schema(format!("bracket ({i},{j}) out of range")));
            }
            let mut v = SuperVector::zero(n);
            for (k, x) in out {
                v.add_term(k, &x);
            }
            let e = given.entry((i, j)).or_default();
            let mut acc = SuperVector::from_sparse(n, e.drain(..));
            acc.add_scaled(&v, &Q::int(1));
            *e = acc.to_sparse();
        }
        let mut table = vec![Vec::new(); n * n];
        for ((i, j), out) in &given {
            table[i * n + j] = out.clone();
        }
        for ((i, j), out) in &given {
            if i < j && !given.contains_key(&(*j, *i)) {
                let s = -parity[*i].swap_sign(parity[*j]);
                table[j * n + i] = out.iter().map(|(k, x)| (*k, x * &s)).collect();
            }
        }
        Ok(LieSuperalgebra {
            names,
            parity,
            table,
            form: None,
            theta: None,
            decomposition: None,
        })
    }

    pub fn with_form(mut self, form: Matrix<Q>) -> Self {
        self.form = Some(form);
        self
    }

    pub fn with_theta(mut self, theta: Matrix<Q>) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_decomposition(mut self, d: Decomposition) -> Self {
        self.decomposition = Some(d);
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parity[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parity
    }

    pub fn form(&self) -> Option<&Matrix<Q>> {
        self.form.as_ref()
    }

    pub fn theta(&self) -> Option<&Matrix<Q>> {
        self.theta.as_ref()
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        self.decomposition.as_ref()
    }

    pub fn basis_vector(&self, i: usize) -> SuperVector {
        SuperVector::basis(self.dim(), i)
    }

    pub fn basis_vectors(&self) -> Vec<SuperVector> {
        (0..self.dim()).map(|i| self.basis_vector(i)).collect()
    }

    /// `[x_i, x_j]` on basis elements.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &SparseRow<Q> {
        &self.table[i * self.dim() + j]
    }

    fn check(&self, v: &SuperVector) -> Result<(), LieError> {
        if v.dim() != self.dim() {
            return Err(LieError::MixedAlgebras {
                dim: self.dim(),
                got: v.dim(),
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &SuperVector, y: &SuperVector) -> Result<SuperVector, LieError> {
        self.check(x)?;
        self.check(y)?;
        let mut out = SuperVector::zero(self.dim());
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                for (k, c) in self.bracket_basis(i, j) {
                    out.add_term(*k, &(c * &ab));
                }
            }
        }
        Ok(out)
    }

    /// Parity of a homogeneous vector; `None` for inhomogeneous ones. The zero
    /// vector counts as even.
    pub fn parity_of(&self, v: &SuperVector) -> Option<Parity> {
        let mut ps = v.support().map(|i| self.parity[i]);
        let first = ps.next().unwrap_or(Parity::Even);
        ps.all(|p| p == first).then_some(first)
    }

    /// Matrix of `ad x` in the standard basis (column j is `[x, x_j]`).
    pub fn ad_matrix(&self, x: &SuperVector) -> Result<Matrix<Q>, LieError> {
        self.check(x)?;
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for j in 0..n {
            let col = self.bracket(x, &self.basis_vector(j))?;
            for (k, c) in col.iter() {
                m.set(k, j, c.clone());
            }
        }
        Ok(m)
    }

    pub fn form_value(&self, x: &SuperVector, y: &SuperVector) -> Result<Q, LieError> {
        self.check(x)?;
        self.check(y)?;
        let b = self.form.as_ref().ok_or(LieError::MissingForm)?;
        let mut acc = Q::int(0);
        for (i, a) in x.iter() {
            for (j, c) in y.iter() {
                let bij = b.get(i, j);
                if !bij.is_zero() {
                    acc += &(a * &(c * &bij));
                }
            }
        }
        Ok(acc)
    }

    pub fn apply_theta(&self, x: &SuperVector) -> Result<SuperVector, LieError> {
        self.check(x)?;
        let t = self.theta.as_ref().ok_or(LieError::MissingInvolution)?;
        Ok(SuperVector::from_dense(&t.mul_vec(&x.to_dense())))
    }

    /// `b(x, θ y)`.
    pub fn b_theta(&self, x: &SuperVector, y: &SuperVector) -> Result<Q, LieError> {
        let ty = self.apply_theta(y)?;
        self.form_value(x, &ty)
    }

    /// Check every structural invariant; the report lists each violation with
    /// its witnessing basis indices.
    pub fn verify(&self) -> ValidationReport {
        let n = self.dim();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let pij = self.parity[i].add(self.parity[j]);
                if self
                    .bracket_basis(i, j)
                    .iter()
                    .any(|(k, _)| self.parity[*k] != pij)
                {
                    violations.push(Violation::Parity { i, j });
                }
                if j < i {
                    continue;
                }
                let s = -self.parity[i].swap_sign(self.parity[j]);
                let lhs = SuperVector::from_sparse(n, self.bracket_basis(i, j).iter().cloned());
                let rhs =
                    SuperVector::from_sparse(n, self.bracket_basis(j, i).iter().cloned()).scale(&s);
                if lhs != rhs {
                    let (a, b) = if i == j { (i, j) } else { (j, i) };
                    violations.push(Violation::Antisymmetry { i: a, j: b });
                }
            }
        }
        violations.extend(self.jacobi_violations());
        if let Some(b) = &self.form {
            violations.extend(self.form_violations(b));
        }
        if let Some(t) = &self.theta {
            violations.extend(self.theta_violations(t));
        }
        ValidationReport { violations }
    }

    /// Graded Jacobi: `[x,[y,z]] = [[x,y],z] + (-1)^{|x||y|} [y,[x,z]]`.
    pub fn jacobi_violations(&self) -> Vec<Violation> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let xy = SuperVector::from_sparse(n, self.bracket_basis(i, j).iter().cloned());
                let sign = self.parity[i].swap_sign(self.parity[j]);
                for k in 0..n {
                    let x = self.basis_vector(i);
                    let y = self.basis_vector(j);
                    let z = self.basis_vector(k);
                    let yz = self.bracket(&y, &z).unwrap();
                    let xz = self.bracket(&x, &z).unwrap();
                    let lhs = self.bracket(&x, &yz).unwrap();
                    let mut rhs = self.bracket(&xy, &z).unwrap();
                    rhs.add_scaled(&self.bracket(&y, &xz).unwrap(), &sign);
                    if lhs != rhs {
                        out.push(Violation::Jacobi { i, j, k });
                    }
                }
            }
        }
        out
    }

    fn form_violations(&self, b: &Matrix<Q>) -> Vec<Violation> {
        let n = self.dim();
        if b.rows() != n || b.cols() != n {
            return vec![Violation::FormShape];
        }
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let bij = b.get(i, j);
                if self.parity[i] != self.parity[j] && !bij.is_zero() {
                    out.push(Violation::FormNotEven { i, j });
                }
                if bij != self.parity[i].swap_sign(self.parity[j]) * b.get(j, i) {
                    out.push(Violation::FormNotSupersymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let xy = SuperVector::from_sparse(n, self.bracket_basis(i, j).iter().cloned());
                for k in 0..n {
                    let yz = SuperVector::from_sparse(n, self.bracket_basis(j, k).iter().cloned());
                    let lhs = self.form_value(&xy, &self.basis_vector(k)).unwrap();
                    let rhs = self.form_value(&self.basis_vector(i), &yz).unwrap();
                    if lhs != rhs {
                        out.push(Violation::FormNotInvariant { i, j, k });
                    }
                }
            }
        }
        if b.rank() != n {
            out.push(Violation::FormDegenerate);
        }
        if let Some(t) = &self.theta {
            if t.rows() == n && t.cols() == n {
                let tbt = t.transpose().mul(b).mul(t);
                for i in 0..n {
                    for j in 0..n {
                        if tbt.get(i, j) != b.get(i, j) {
                            out.push(Violation::FormNotThetaInvariant { i, j });
                        }
                    }
                }
            }
        }
        out
    }

    fn theta_violations(&self, t: &Matrix<Q>) -> Vec<Violation> {
        let n = self.dim();
        if t.rows() != n || t.cols() != n {
            return vec![Violation::ThetaShape];
        }
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.parity[i] != self.parity[j] && !t.get(i, j).is_zero() {
                    out.push(Violation::ThetaNotEven { i, j });
                }
            }
        }
        if t.mul(t) != Matrix::identity(n) {
            out.push(Violation::ThetaNotInvolution);
        }
        for i in 0..n {
            let ti = SuperVector::from_dense(&t.column(i));
            for j in i..n {
                let tj = SuperVector::from_dense(&t.column(j));
                let lhs = self.bracket(&ti, &tj).unwrap();
                let xy = SuperVector::from_sparse(n, self.bracket_basis(i, j).iter().cloned());
                let rhs = SuperVector::from_dense(&t.mul_vec(&xy.to_dense()));
                if lhs != rhs {
                    out.push(Violation::ThetaNotAutomorphism { i, j });
                }
            }
        }
        out
    }

    /// Homogeneous bases of the `+1` and `-1` eigenspaces of θ.
    pub fn theta_eigenspaces(&self) -> Result<(Vec<SuperVector>, Vec<SuperVector>), LieError> {
        let t = self.theta.as_ref().ok_or(LieError::MissingInvolution)?;
        let n = self.dim();
        let eig = |s: i64| -> Vec<SuperVector> {
            let shifted = t.sub(&Matrix::identity(n).scale(&Q::int(s)));
            self.homogeneous_kernel(&shifted, &self.basis_vectors())
        };
        Ok((eig(1), eig(-1)))
    }

    /// Kernel of a linear map (given on the ambient space) restricted to
    /// `span(within)`, computed per parity so the result is homogeneous when
    /// `within` is.
    pub fn homogeneous_kernel(&self, map: &Matrix<Q>, within: &[SuperVector]) -> Vec<SuperVector> {
        let images: Vec<Vec<Q>> = within.iter().map(|w| map.mul_vec(&w.to_dense())).collect();
        let mut out = Vec::new();
        for group in self.parity_groups(within) {
            let cols: Vec<Vec<Q>> = group.iter().map(|&g| images[g].clone()).collect();
            let m = Matrix::from_columns(self.dim(), &cols);
            for coeffs in nullspace(&m) {
                let mut v = SuperVector::zero(self.dim());
                for (c, &g) in coeffs.iter().zip(&group) {
                    v.add_scaled(&within[g], c);
                }
                out.push(v);
            }
        }
        out
    }

    fn parity_groups(&self, vs: &[SuperVector]) -> Vec<Vec<usize>> {
        let mut even = Vec::new();
        let mut odd = Vec::new();
        let mut mixed = Vec::new();
        for (i, v) in vs.iter().enumerate() {
            match self.parity_of(v) {
                Some(Parity::Even) => even.push(i),
                Some(Parity::Odd) => odd.push(i),
                None => mixed.push(i),
            }
        }
        if mixed.is_empty() {
            vec![even, odd]
        } else {
            vec![(0..vs.len()).collect()]
        }
    }

    /// `{ y in span(within) : [s, y] = 0 for all s in S }`.
    pub fn centralizer(
        &self,
        s: &[SuperVector],
        within: &[SuperVector],
    ) -> Result<Vec<SuperVector>, LieError> {
        for v in s.iter().chain(within) {
            self.check(v)?;
        }
        let n = self.dim();
        let mut out = Vec::new();
        for group in self.parity_groups(within) {
            let rows: Vec<SparseRow<Q>> = {
                // one row per (s, coordinate), one column per element of the group
                let mut rows: BTreeMap<(usize, usize), SparseRow<Q>> = BTreeMap::new();
                for (col, &g) in group.iter().enumerate() {
                    for (si, x) in s.iter().enumerate() {
                        for (k, c) in self.bracket(x, &within[g])?.iter() {
                            rows.entry((si, k)).or_default().push((col, c.clone()));
                        }
                    }
                }
                rows.into_values().collect()
            };
            for coeffs in nullspace_sparse(group.len(), rows) {
                let mut v = SuperVector::zero(n);
                for (c, x) in coeffs {
                    v.add_scaled(&within[group[c]], &x);
                }
                out.push(v);
            }
        }
        Ok(out)
    }

    /// Bases of the derived algebra `[g, g]` and of the center `z(g)`.
    pub fn derived_and_center(&self) -> (Vec<SuperVector>, Vec<SuperVector>) {
        let n = self.dim();
        let brackets: Vec<Vec<Q>> = (0..n)
            .flat_map(|i| (i..n).map(move |j| (i, j)))
            .map(|(i, j)| SuperVector::from_sparse(n, self.bracket_basis(i, j).iter().cloned()))
            .filter(|v| !v.is_zero())
            .map(|v| v.to_dense())
            .collect();
        let derived = independent_subset(&brackets)
            .into_iter()
            .map(|i| SuperVector::from_dense(&brackets[i]))
            .collect();
        let all = self.basis_vectors();
        let center = self.centralizer(&all, &all).expect("same algebra");
        (derived, center)
    }

    /// Verify a strong reductivity certificate: the center part spans `z(g)`,
    /// each ideal is an ideal with nondegenerate restricted form, and the sum of
    /// all parts is direct and equals `g`.
    pub fn verify_certificate(&self, d: &Decomposition) -> Result<(), LieError> {
        let n = self.dim();
        let fail = |m: String| Err(LieError::NoCertificate(m));
        for v in d.center.iter().chain(d.ideals.iter().flatten()) {
            self.check(v)?;
            if self.parity_of(v).is_none() {
                return fail("certificate vectors must be homogeneous".into());
            }
        }
        let (_, center) = self.derived_and_center();
        let declared: Vec<Vec<Q>> = d.center.iter().map(|v| v.to_dense()).collect();
        let actual: Vec<Vec<Q>> = center.iter().map(|v| v.to_dense()).collect();
        if independent_subset(&declared).len() != declared.len()
            || declared.len() != actual.len()
            || declared
                .iter()
                .any(|v| solve_membership(v, &actual).is_none())
        {
            return fail("declared center does not match z(g)".into());
        }
        for (idx, ideal) in d.ideals.iter().enumerate() {
            let span: Vec<Vec<Q>> = ideal.iter().map(|v| v.to_dense()).collect();
            for x in self.basis_vectors() {
                for y in ideal {
                    let xy = self.bracket(&x, y)?;
                    if solve_membership(&xy.to_dense(), &span).is_none() {
                        return fail(format!("ideal {idx} is not stable under the bracket"));
                    }
                }
            }
            if self.form.is_some() {
                let gram = Matrix::from_rows(
                    ideal
                        .iter()
                        .map(|x| {
                            ideal
                                .iter()
                                .map(|y| self.form_value(x, y).unwrap())
                                .collect()
                        })
                        .collect(),
                );
                if gram.rank() != ideal.len() {
                    return fail(format!("form is degenerate on ideal {idx}"));
                }
            }
        }
        let all: Vec<Vec<Q>> = d
            .center
            .iter()
            .chain(d.ideals.iter().flatten())
            .map(|v| v.to_dense())
            .collect();
        if all.len() != n || independent_subset(&all).len() != n {
            return fail("sum of center and ideals is not a direct sum equal to g".into());
        }
        Ok(())
    }

    /// Re-express the algebra in a new homogeneous basis.
    pub fn change_basis(
        &self,
        new_basis: &[SuperVector],
        names: Vec<String>,
    ) -> Result<LieSuperalgebra, LieError> {
        let n = self.dim();
        if new_basis.len() != n || names.len() != n {
            return Err(LieError::Schema("new basis has the wrong size".into()));
        }
        let mut parity = Vec::with_capacity(n);
        for v in new_basis {
            self.check(v)?;
            parity.push(self.parity_of(v).ok_or(LieError::NotHomogeneous)?);
        }
        let cols: Vec<Vec<Q>> = new_basis.iter().map(|v| v.to_dense()).collect();
        let p = Matrix::from_columns(n, &cols);
        let pinv = p
            .inverse()
            .ok_or_else(|| LieError::Schema("new basis is not a basis".into()))?;
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i..n {
                let xy = self.bracket(&new_basis[i], &new_basis[j])?;
                let coords = pinv.mul_vec(&xy.to_dense());
                let out: SparseRow<Q> = crate::linalg::sparsify(&coords);
                if !out.is_empty() {
                    brackets.push(((i, j), out));
                }
            }
        }
        let mut g = LieSuperalgebra::new(names, parity, brackets)?;
        if let Some(b) = &self.form {
            g.form = Some(p.transpose().mul(b).mul(&p));
        }
        if let Some(t) = &self.theta {
            g.theta = Some(pinv.mul(t).mul(&p));
        }
        if let Some(d) = &self.decomposition {
            let tr = |v: &SuperVector| SuperVector::from_dense(&pinv.mul_vec(&v.to_dense()));
            g.decomposition = Some(Decomposition {
                center: d.center.iter().map(tr).collect(),
                ideals: d
                    .ideals
                    .iter()
                    .map(|i| i.iter().map(tr).collect())
                    .collect(),
            });
        }
        Ok(g)
    }

    /// `g ⊕ h` with block-diagonal form; basis names get the given suffixes.
    pub fn direct_sum(&self, other: &LieSuperalgebra, suffixes: (&str, &str)) -> LieSuperalgebra {
        let n = self.dim();
        let m = other.dim();
        let names: Vec<String> = self
            .names
            .iter()
            .map(|s| format!("{s}{}", suffixes.0))
            .chain(other.names.iter().map(|s| format!("{s}{}", suffixes.1)))
            .collect();
        let parity: Vec<Parity> = self.parity.iter().chain(&other.parity).copied().collect();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i..n {
                brackets.push(((i, j), self.bracket_basis(i, j).clone()));
            }
        }
        for i in 0..m {
            for j in i..m {
                let out = other
                    .bracket_basis(i, j)
                    .iter()
                    .map(|(k, x)| (k + n, x.clone()))
                    .collect();
                brackets.push(((i + n, j + n), out));
            }
        }
        let mut g = LieSuperalgebra::new(names, parity, brackets).expect("valid blocks");
        if let (Some(b1), Some(b2)) = (&self.form, &other.form) {
            let mut b = Matrix::zeros(n + m, n + m);
            for i in 0..n {
                for j in 0..n {
                    b.set(i, j, b1.get(i, j));
                }
            }
            for i in 0..m {
                for j in 0..m {
                    b.set(n + i, n + j, b2.get(i, j));
                }
            }
            g.form = Some(b);
        }
        g
    }

    pub fn to_json(&self) -> AlgebraJson {
        let n = self.dim();
        let basis = (0..n)
            .map(|i| BasisJson {
                name: self.names[i].clone(),
                parity: self.parity[i],
            })
            .collect();
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in i..n {
                let out = self.bracket_basis(i, j);
                if !out.is_empty() {
                    brackets.push(BracketJson {
                        i,
                        j,
                        out: terms_json(out),
                    });
                }
            }
        }
        let dense = |m: &Matrix<Q>| (0..m.rows()).map(|i| m.row(i)).collect::<Vec<_>>();
        AlgebraJson {
            basis,
            brackets,
            form: self.form.as_ref().map(dense),
            theta: self.theta.as_ref().map(dense),
            decomposition: self.decomposition.as_ref().map(|d| DecompositionJson {
                center: d
                    .center
                    .iter()
                    .map(|v| terms_json(&v.to_sparse()))
                    .collect(),
                ideals: d
                    .ideals
                    .iter()
                    .map(|i| i.iter().map(|v| terms_json(&v.to_sparse())).collect())
                    .collect(),
            }),
            cartan: None,
        }
    }

    pub fn from_json(j: &AlgebraJson) -> Result<LieSuperalgebra, LieError> {
        let n = j.basis.len();
        let names: Vec<String> = j.basis.iter().map(|b| b.name.clone()).collect();
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                return Err(LieError::Schema(format!("duplicate basis name {name}")));
            }
        }
        let parity = j.basis.iter().map(|b| b.parity).collect();
        let brackets = j.brackets.iter().map(|b| {
            (
                (b.i, b.j),
                b.out.iter().map(|t| (t.k, t.coeff.clone())).collect(),
            )
        });
        let mut g = LieSuperalgebra::new(names, parity, brackets)?;
        let square = |rows: &Vec<Vec<Q>>, what: &str| -> Result<Matrix<Q>, LieError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(LieError::Schema(format!("{what} must be {n}x{n}")));
            }
            Ok(Matrix::from_rows(rows.clone()))
        };
        if let Some(f) = &j.form {
            g.form = Some(square(f, "form")?);
        }
        if let Some(t) = &j.theta {
            g.theta = Some(square(t, "theta")?);
        }
        if let Some(d) = &j.decomposition {
            g.decomposition = Some(Decomposition {
                center: d
                    .center
                    .iter()
                    .map(|v| vector_from_terms(n, v))
                    .collect::<Result<_, _>>()?,
                ideals: d
                    .ideals
                    .iter()
                    .map(|i| i.iter().map(|v| vector_from_terms(n, v)).collect())
                    .collect::<Result<_, _>>()?,
            });
        }
        Ok(g)
    }
}

fn terms_json(v: &SparseRow<Q>) -> Vec<TermJson> {
    v.iter()
        .map(|(k, c)| TermJson {
            k: *k,
            coeff: c.clone(),
        })
        .collect()
}

pub fn vector_from_terms(n: usize, terms: &[TermJson]) -> Result<SuperVector, LieError> {
    if let Some(t) = terms.iter().find(|t| t.k >= n) {
        return Err(LieError::Schema(format!("index {} out of range", t.k)));
    }
    Ok(SuperVector::from_sparse(
        n,
        terms.iter().map(|t| (t.k, t.coeff.clone())),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    pub name: String,
    pub parity: Parity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub k: usize,
    pub coeff: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketJson {
    pub i: usize,
    pub j: usize,
    pub out: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub center: Vec<Vec<TermJson>>,
    pub ideals: Vec<Vec<Vec<TermJson>>>,
}

/// On-disk algebra format. `cartan` optionally lists the even Cartan
/// subspace when the file describes a symmetric pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub basis: Vec<BasisJson>,
    pub brackets: Vec<BracketJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<Vec<Vec<Q>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<Vec<Q>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<Vec<Vec<TermJson>>>,
}

/// Matrix superalgebra spanned by homogeneous supermatrices.
///
/// `row_parity` grades the underlying super vector space; the bracket is the
/// supercommutator and the form is `str(XY)` scaled by `form_scale`.
pub fn matrix_superalgebra(
    names: &[&str],
    row_parity: &[Parity],
    matrices: &[Matrix<Q>],
    form_scale: Option<Q>,
) -> Result<LieSuperalgebra, LieError> {
    let size = row_parity.len();
    let n = matrices.len();
    let mut parity = Vec::with_capacity(n);
    for m in matrices {
        let mut p = None;
        for i in 0..size {
            for (j, _) in m.row_entries(i) {
                let pij = row_parity[i].add(row_parity[j]);
                if p.is_some_and(|q| q != pij) {
                    return Err(LieError::NotHomogeneous);
                }
                p = Some(pij);
            }
        }
        parity.push(p.unwrap_or(Parity::Even));
    }
    let flat: Vec<Vec<Q>> = matrices
        .iter()
        .map(|m| (0..size).flat_map(|i| m.row(i)).collect())
        .collect();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i..n {
            let ab = matrices[i].mul(&matrices[j]);
            let ba = matrices[j].mul(&matrices[i]);
            let c = ab.sub(&ba.scale(&parity[i].swap_sign(parity[j])));
            let v: Vec<Q> = (0..size).flat_map(|r| c.row(r)).collect();
            let coords = solve_membership(&v, &flat).ok_or(LieError::NotClosed)?;
            let out = crate::linalg::sparsify(&coords);
            if !out.is_empty() {
                brackets.push(((i, j), out));
            }
        }
    }
    let names = names.iter().map(|s| s.to_string()).collect();
    let mut g = LieSuperalgebra::new(names, parity, brackets)?;
    if let Some(s) = form_scale {
        let str_of = |m: &Matrix<Q>| {
            (0..size).fold(Q::int(0), |acc, i| {
                if row_parity[i].is_odd() {
                    acc - m.get(i, i)
                } else {
                    acc + m.get(i, i)
                }
            })
        };
        let mut b = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b.set(i, j, str_of(&matrices[i].mul(&matrices[j])) * &s);
            }
        }
        g.form = Some(b);
    }
    Ok(g)
}
