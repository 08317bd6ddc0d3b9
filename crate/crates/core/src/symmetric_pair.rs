//! Symmetric superpairs of even type: Cartan subspace validation, restricted
//! roots, positive systems, ρ, the even Weyl group and Iwasawa data.

use std::collections::BTreeSet;
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::apoly::APolynomial;
use crate::liesuper::{LieError, LieSuperalgebra, Parity, SuperVector};
use crate::linalg::{
    independent_subset, intersect_spans, simultaneous_eigenspaces, solve_membership, LinalgError,
    Matrix,
};
use crate::pbw::{BasisOrder, Pbw, PbwError};
use crate::scalar::{Field, Q};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error("algebra fails validation: {0}")]
    InvalidAlgebra(String),
    #[error("a is not abelian")]
    NotAbelian,
    #[error("a-basis vector {0} is not in the even part of p")]
    NotInEvenP(usize),
    #[error("a-basis vectors are linearly dependent")]
    DependentA,
    #[error("centralizer of a in p has dimension {found}, expected {expected}")]
    CentralizerTooLarge { found: usize, expected: usize },
    #[error("form restricted to a is degenerate")]
    DegenerateFormOnA,
    #[error("direction has {got} coordinates, expected {expected}")]
    DirectionLength { expected: usize, got: usize },
    #[error("direction vanishes on root {0}")]
    DirectionOnWall(usize),
    #[error("positive system is not closed under addition")]
    NotClosed,
    #[error("even root {0} has zero length; reflection undefined")]
    NullEvenRoot(usize),
    #[error("Weyl group closure exceeded {0} elements")]
    WeylTooLarge(usize),
}

/// A symmetric pair `(g, k, θ)` with a chosen even Cartan subspace `a`.
#[derive(Clone, Debug)]
pub struct SymmetricPair {
    g: LieSuperalgebra,
    k_basis: Vec<SuperVector>,
    p_basis: Vec<SuperVector>,
    a_basis: Vec<SuperVector>,
    a_names: Vec<String>,
}

impl SymmetricPair {
    pub fn algebra(&self) -> &LieSuperalgebra {
        &self.g
    }

    pub fn k_basis(&self) -> &[SuperVector] {
        &self.k_basis
    }

    pub fn p_basis(&self) -> &[SuperVector] {
        &self.p_basis
    }

    pub fn a_basis(&self) -> &[SuperVector] {
        &self.a_basis
    }

    pub fn a_names(&self) -> &[String] {
        &self.a_names
    }

    pub fn rank(&self) -> usize {
        self.a_basis.len()
    }

    pub fn with_a_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.a_basis.len());
        self.a_names = names;
        self
    }

    /// Gram matrix of `b` on the a-basis.
    pub fn form_on_a(&self) -> Matrix<Q> {
        Matrix::from_rows(
            self.a_basis
                .iter()
                .map(|x| {
                    self.a_basis
                        .iter()
                        .map(|y| self.g.form_value(x, y).unwrap())
                        .collect()
                })
                .collect(),
        )
    }

    /// Element of `a` with the given coordinates in the a-basis.
    pub fn a_element(&self, coords: &[Q]) -> SuperVector {
        let mut v = SuperVector::zero(self.g.dim());
        for (c, x) in coords.iter().zip(&self.a_basis) {
            v.add_scaled(x, c);
        }
        v
    }

    fn split_by_parity(&self, vs: &[SuperVector], p: Parity) -> Vec<SuperVector> {
        vs.iter()
            .filter(|v| self.g.parity_of(v) == Some(p))
            .cloned()
            .collect()
    }
}

/// Validate the data and build the pair; `k` and `p` come from θ.
pub fn build_pair(
    g: LieSuperalgebra,
    a_basis: Vec<SuperVector>,
) -> Result<SymmetricPair, PairError> {
    if g.form().is_none() {
        return Err(LieError::MissingForm.into());
    }
    if g.theta().is_none() {
        return Err(LieError::MissingInvolution.into());
    }
    let report = g.verify();
    if !report.is_valid() {
        let first: Vec<String> = report
            .violations
            .iter()
            .take(3)
            .map(|v| v.to_string())
            .collect();
        return Err(PairError::InvalidAlgebra(first.join("; ")));
    }
    let (k_basis, p_basis) = g.theta_eigenspaces()?;
    for (i, a) in a_basis.iter().enumerate() {
        if a.dim() != g.dim() {
            return Err(LieError::MixedAlgebras {
                dim: g.dim(),
                got: a.dim(),
            }
            .into());
        }
        let even = g.parity_of(a) == Some(Parity::Even);
        if !even || g.apply_theta(a)? != a.scale(&Q::int(-1)) {
            return Err(PairError::NotInEvenP(i));
        }
    }
    let dense: Vec<Vec<Q>> = a_basis.iter().map(|v| v.to_dense()).collect();
    if independent_subset(&dense).len() != a_basis.len() {
        return Err(PairError::DependentA);
    }
    for x in &a_basis {
        for y in &a_basis {
            if !g.bracket(x, y)?.is_zero() {
                return Err(PairError::NotAbelian);
            }
        }
    }
    let z = g.centralizer(&a_basis, &p_basis)?;
    if z.len() != a_basis.len() {
        return Err(PairError::CentralizerTooLarge {
            found: z.len(),
            expected: a_basis.len(),
        });
    }
    let a_names = (1..=a_basis.len()).map(|i| format!("h{i}")).collect();
    let pair = SymmetricPair {
        g,
        k_basis,
        p_basis,
        a_basis,
        a_names,
    };
    if pair.form_on_a().rank() != pair.rank() {
        return Err(PairError::DegenerateFormOnA);
    }
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IsoClass {
    Isotropic,
    Anisotropic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedRoot {
    /// Values on the a-basis.
    pub lambda: Vec<Q>,
    pub m0: usize,
    pub m1: usize,
    pub even_space: Vec<SuperVector>,
    pub odd_space: Vec<SuperVector>,
}

/// Data of a positive odd root representing the pair `±λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddClass {
    pub root: usize,
    pub iso: IsoClass,
    /// `⟨λ,λ⟩`.
    pub norm: Q,
    /// Coordinates of `A_λ` in the a-basis.
    pub a_lambda: Vec<Q>,
    pub q: usize,
    /// Coordinates of `h₀` (isotropic roots only).
    pub h0: Option<Vec<Q>>,
    /// Set when `2λ` is also a root; the rank-one formulas do not apply.
    pub gated: bool,
}

#[derive(Clone, Debug)]
pub struct RestrictedRootSystem {
    pub roots: Vec<RestrictedRoot>,
    pub positive: Vec<bool>,
    /// Element of `a` (a-basis coordinates) defining positivity.
    pub direction: Vec<Q>,
    pub rho: Vec<Q>,
    pub rho0: Vec<Q>,
    pub rho1: Vec<Q>,
    pub form_a: Matrix<Q>,
    /// Induced form on `a*` in the dual coordinates.
    pub dual_form: Matrix<Q>,
    pub odd_classes: Vec<OddClass>,
    pub m_basis: Vec<SuperVector>,
}

impl RestrictedRootSystem {
    pub fn rank(&self) -> usize {
        self.direction.len()
    }

    pub fn pairing(&self, l: &[Q], m: &[Q]) -> Q {
        let dm = self.dual_form.mul_vec(m);
        l.iter().zip(&dm).fold(Q::int(0), |acc, (x, y)| acc + x * y)
    }

    pub fn find(&self, lambda: &[Q]) -> Option<usize> {
        self.roots.iter().position(|r| r.lambda == lambda)
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &RestrictedRoot> {
        self.roots
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
    }

    /// Basis of `n`, the sum of the positive root spaces (even vectors first
    /// within each root).
    pub fn n_basis(&self) -> Vec<SuperVector> {
        self.positive_roots()
            .flat_map(|r| r.even_space.iter().chain(&r.odd_space).cloned())
            .collect()
    }

    pub fn even_roots(&self) -> Vec<usize> {
        (0..self.roots.len())
            .filter(|&i| self.roots[i].m0 > 0)
            .collect()
    }

    /// `A_λ` with `b(A_λ, h) = λ(h)`.
    pub fn a_lambda(&self, lambda: &[Q]) -> Vec<Q> {
        self.dual_form.mul_vec(lambda)
    }

    pub fn active_odd_classes(&self) -> impl Iterator<Item = &OddClass> {
        self.odd_classes.iter().filter(|c| !c.gated)
    }

    /// Recompute ρ and the odd-root data after editing multiplicities.
    pub fn refresh(&mut self) {
        let (rho, rho0, rho1) = rho(self);
        self.rho = rho;
        self.rho0 = rho0;
        self.rho1 = rho1;
        self.odd_classes = odd_classes(self);
    }
}

fn lambda_at(lambda: &[Q], h: &[Q]) -> Q {
    lambda
        .iter()
        .zip(h)
        .fold(Q::int(0), |acc, (x, y)| acc + x * y)
}

/// Restricted roots with the default positivity direction.
pub fn restricted_roots(pair: &SymmetricPair) -> Result<RestrictedRootSystem, PairError> {
    restricted_roots_with(pair, None)
}

pub fn restricted_roots_with(
    pair: &SymmetricPair,
    direction: Option<Vec<Q>>,
) -> Result<RestrictedRootSystem, PairError> {
    let roots = root_decomposition(pair)?;
    let m_basis = pair.algebra().centralizer(pair.a_basis(), pair.k_basis())?;
    let direction = match direction {
        Some(d) => d,
        None => default_direction(&roots, pair.rank()),
    };
    let positive = choose_positive_system(&roots, &direction)?;
    let form_a = pair.form_on_a();
    let dual_form = form_a.inverse().ok_or(PairError::DegenerateFormOnA)?;
    let mut sys = RestrictedRootSystem {
        roots,
        positive,
        direction,
        rho: Vec::new(),
        rho0: Vec::new(),
        rho1: Vec::new(),
        form_a,
        dual_form,
        odd_classes: Vec::new(),
        m_basis,
    };
    sys.refresh();
    Ok(sys)
}

/// Joint eigenspaces of `ad(a)` on each parity; the zero weight is dropped.
fn root_decomposition(pair: &SymmetricPair) -> Result<Vec<RestrictedRoot>, PairError> {
    let g = pair.algebra();
    let mut roots: Vec<RestrictedRoot> = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let idx: Vec<usize> = (0..g.dim()).filter(|&i| g.parity(i) == parity).collect();
        if idx.is_empty() {
            continue;
        }
        let mats: Vec<Matrix<Q>> = pair
            .a_basis()
            .iter()
            .map(|h| {
                let ad = g.ad_matrix(h).unwrap();
                let mut m = Matrix::zeros(idx.len(), idx.len());
                for (r, &i) in idx.iter().enumerate() {
                    for (c, &j) in idx.iter().enumerate() {
                        m.set(r, c, ad.get(i, j));
                    }
                }
                m
            })
            .collect();
        let blocks = if mats.is_empty() {
            Vec::new()
        } else {
            simultaneous_eigenspaces(&mats)?
        };
        for b in blocks {
            if b.eigenvalues.iter().all(|x| x.is_zero()) {
                continue;
            }
            let vecs: Vec<SuperVector> = b
                .basis
                .iter()
                .map(|v| {
                    SuperVector::from_sparse(
                        g.dim(),
                        idx.iter().zip(v).map(|(&i, x)| (i, x.clone())),
                    )
                })
                .collect();
            let pos = match roots.iter().position(|r| r.lambda == b.eigenvalues) {
                Some(p) => p,
                None => {
                    roots.push(RestrictedRoot {
                        lambda: b.eigenvalues.clone(),
                        m0: 0,
                        m1: 0,
                        even_space: Vec::new(),
                        odd_space: Vec::new(),
                    });
                    roots.len() - 1
                }
            };
            let r = &mut roots[pos];
            match parity {
                Parity::Even => {
                    r.m0 = vecs.len();
                    r.even_space = vecs;
                }
                Parity::Odd => {
                    r.m1 = vecs.len();
                    r.odd_space = vecs;
                }
            }
        }
    }
    roots.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    Ok(roots)
}

/// `h = Σ t^i h_i` for the first `t = 1, 2, ...` off every wall.
pub fn default_direction(roots: &[RestrictedRoot], rank: usize) -> Vec<Q> {
    let mut t = 1i64;
    loop {
        let h: Vec<Q> = (0..rank as u32).map(|i| Q::int(t).pow(i)).collect();
        if roots.iter().all(|r| !lambda_at(&r.lambda, &h).is_zero()) {
            return h;
        }
        t += 1;
    }
}

/// `λ` is positive iff `λ(direction) > 0`.
pub fn choose_positive_system(
    roots: &[RestrictedRoot],
    direction: &[Q],
) -> Result<Vec<bool>, PairError> {
    if let Some(r) = roots.first() {
        if r.lambda.len() != direction.len() {
            return Err(PairError::DirectionLength {
                expected: r.lambda.len(),
                got: direction.len(),
            });
        }
    }
    let mut flags = Vec::with_capacity(roots.len());
    for (i, r) in roots.iter().enumerate() {
        let v = lambda_at(&r.lambda, direction);
        if v.is_zero() {
            return Err(PairError::DirectionOnWall(i));
        }
        flags.push(v.signum() > 0);
    }
    for i in 0..roots.len() {
        for j in 0..roots.len() {
            if !(flags[i] && flags[j]) {
                continue;
            }
            let sum: Vec<Q> = roots[i]
                .lambda
                .iter()
                .zip(&roots[j].lambda)
                .map(|(a, b)| a + b)
                .collect();
            if let Some(k) = roots.iter().position(|r| r.lambda == sum) {
                if !flags[k] {
                    return Err(PairError::NotClosed);
                }
            }
        }
    }
    Ok(flags)
}

/// `(ρ, ρ₀, ρ₁)` with `2ρ_j = Σ_{λ>0} m_{λ,j} λ` and `ρ = ρ₀ − ρ₁`.
pub fn rho(sys: &RestrictedRootSystem) -> (Vec<Q>, Vec<Q>, Vec<Q>) {
    let r = sys.rank();
    let mut rho0 = vec![Q::int(0); r];
    let mut rho1 = vec![Q::int(0); r];
    let half = Q::new(1, 2);
    for root in sys.positive_roots() {
        for i in 0..r {
            rho0[i] += &(&root.lambda[i] * &Q::int(root.m0 as i64) * &half);
            rho1[i] += &(&root.lambda[i] * &Q::int(root.m1 as i64) * &half);
        }
    }
    let rho = rho0.iter().zip(&rho1).map(|(a, b)| a - b).collect();
    (rho, rho0, rho1)
}

/// `ρ(h_i) = ½ str_n(ad h_i)` computed from the adjoint action on `n`.
pub fn rho_from_supertrace(pair: &SymmetricPair, sys: &RestrictedRootSystem) -> Vec<Q> {
    let g = pair.algebra();
    let n = sys.n_basis();
    let cols: Vec<Vec<Q>> = n.iter().map(|v| v.to_dense()).collect();
    pair.a_basis()
        .iter()
        .map(|h| {
            let mut s = Q::int(0);
            for (j, v) in n.iter().enumerate() {
                let img = g.bracket(h, v).unwrap();
                let coords = solve_membership(&img.to_dense(), &cols).expect("n is a-stable");
                let diag = coords[j].clone();
                if g.parity_of(v) == Some(Parity::Odd) {
                    s -= &diag;
                } else {
                    s += &diag;
                }
            }
            s * Q::new(1, 2)
        })
        .collect()
}

fn odd_classes(sys: &RestrictedRootSystem) -> Vec<OddClass> {
    let mut out = Vec::new();
    for (i, r) in sys.roots.iter().enumerate() {
        if !sys.positive[i] || r.m1 == 0 {
            continue;
        }
        let norm = sys.pairing(&r.lambda, &r.lambda);
        let a_lambda = sys.a_lambda(&r.lambda);
        let double: Vec<Q> = r.lambda.iter().map(|x| x * &Q::int(2)).collect();
        let gated = sys.find(&double).is_some();
        let (iso, h0) = if norm.is_zero() {
            // any h with λ(h) = 1, corrected to be b-isotropic
            let j = r.lambda.iter().position(|x| !x.is_zero()).unwrap();
            let mut h = vec![Q::int(0); sys.rank()];
            h[j] = r.lambda[j].inverse().unwrap();
            let bhh = lambda_at(&sys.form_a.mul_vec(&h), &h);
            let h0: Vec<Q> = h
                .iter()
                .zip(&a_lambda)
                .map(|(x, a)| x - &(&bhh * &Q::new(1, 2) * a))
                .collect();
            (IsoClass::Isotropic, Some(h0))
        } else {
            (IsoClass::Anisotropic, None)
        };
        out.push(OddClass {
            root: i,
            iso,
            norm,
            a_lambda,
            q: r.m1 / 2,
            h0,
            gated,
        });
    }
    out
}

/// The even Weyl group acting on `a*` (coordinates: values on the a-basis).
#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub generators: Vec<Matrix<Q>>,
    pub elements: Vec<Matrix<Q>>,
}

pub const WEYL_LIMIT: usize = 10_000;

pub fn even_weyl_group(sys: &RestrictedRootSystem) -> Result<WeylGroup, PairError> {
    let r = sys.rank();
    let mut generators = Vec::new();
    for i in sys.even_roots() {
        let alpha = &sys.roots[i].lambda;
        let norm = sys.pairing(alpha, alpha);
        if norm.is_zero() {
            return Err(PairError::NullEvenRoot(i));
        }
        let da = sys.dual_form.mul_vec(alpha);
        let s = Q::int(-2) / norm;
        let mut m = Matrix::identity(r);
        for a in 0..r {
            for b in 0..r {
                let v = m.get(a, b) + &s * &(&alpha[a] * &da[b]);
                m.set(a, b, v);
            }
        }
        if !generators.contains(&m) {
            generators.push(m);
        }
    }
    let mut elements = vec![Matrix::identity(r)];
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    let key = |m: &Matrix<Q>| (0..r).flat_map(|i| m.row(i)).collect::<Vec<Q>>();
    seen.insert(key(&elements[0]));
    let mut frontier = 0;
    while frontier < elements.len() {
        let cur = elements[frontier].clone();
        frontier += 1;
        for s in &generators {
            let next = s.mul(&cur);
            if seen.insert(key(&next)) {
                elements.push(next);
                if elements.len() > WEYL_LIMIT {
                    return Err(PairError::WeylTooLarge(WEYL_LIMIT));
                }
            }
        }
    }
    Ok(WeylGroup {
        generators,
        elements,
    })
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// `(w·p)(μ) = p(w⁻¹ μ)`.
    pub fn act(&self, w: &Matrix<Q>, p: &APolynomial) -> APolynomial {
        let winv = w.inverse().expect("Weyl group elements are invertible");
        let images: Vec<APolynomial> = (0..winv.rows())
            .map(|i| APolynomial::linear(&winv.row(i)))
            .collect();
        p.substitute(&images)
    }

    pub fn is_invariant(&self, p: &APolynomial) -> bool {
        self.elements.iter().all(|w| &self.act(w, p) == p)
    }

    /// Every element maps even roots to even roots with equal multiplicity.
    pub fn permutes_roots(&self, sys: &RestrictedRootSystem) -> bool {
        self.elements.iter().all(|w| {
            sys.roots.iter().filter(|r| r.m0 > 0).all(|r| {
                let img = w.mul_vec(&r.lambda);
                sys.find(&img).is_some_and(|k| sys.roots[k].m0 == r.m0)
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IwasawaReport {
    /// `(dim k_j, dim a_j, dim n_j, dim g_j)` for j = 0, 1.
    pub dims: [(usize, usize, usize, usize); 2],
    pub dims_ok: bool,
    pub k_cap_an_zero: bool,
    pub centralizer_formula_ok: bool,
    pub samples: usize,
}

impl IwasawaReport {
    pub fn ok(&self) -> bool {
        self.dims_ok && self.k_cap_an_zero && self.centralizer_formula_ok
    }
}

pub fn iwasawa_check(pair: &SymmetricPair, sys: &RestrictedRootSystem, seed: u64) -> IwasawaReport {
    iwasawa_check_with_n(pair, &sys.n_basis(), 20, seed)
}

/// Iwasawa checks for an explicit `n`; the centralizer dimension formula is
/// tested on `samples` random elements of `p₀` (plus `x = 0`).
pub fn iwasawa_check_with_n(
    pair: &SymmetricPair,
    n_basis: &[SuperVector],
    samples: usize,
    seed: u64,
) -> IwasawaReport {
    let g = pair.algebra();
    let mut dims = [(0, 0, 0, 0); 2];
    for (j, p) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        dims[j] = (
            pair.split_by_parity(pair.k_basis(), p).len(),
            pair.split_by_parity(pair.a_basis(), p).len(),
            pair.split_by_parity(n_basis, p).len(),
            (0..g.dim()).filter(|&i| g.parity(i) == p).count(),
        );
    }
    let dims_ok = dims.iter().all(|(k, a, n, t)| k + a + n == *t);
    let an: Vec<Vec<Q>> = pair
        .a_basis()
        .iter()
        .chain(n_basis)
        .map(|v| v.to_dense())
        .collect();
    let k: Vec<Vec<Q>> = pair.k_basis().iter().map(|v| v.to_dense()).collect();
    let k_cap_an_zero =
        independent_subset(&an).len() == an.len() && intersect_spans(&k, &an, g.dim()).is_empty();

    let k1 = pair.split_by_parity(pair.k_basis(), Parity::Odd);
    let p1 = pair.split_by_parity(pair.p_basis(), Parity::Odd);
    let p0 = pair.split_by_parity(pair.p_basis(), Parity::Even);
    let expected = k1.len() as i64 - p1.len() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centralizer_formula_ok = true;
    for s in 0..=samples {
        let mut x = SuperVector::zero(g.dim());
        if s > 0 {
            for v in &p0 {
                x.add_scaled(v, &Q::int(rng.gen_range(-3..=3)));
            }
        }
        let zk = g.centralizer(std::slice::from_ref(&x), &k1).unwrap().len() as i64;
        let zp = g.centralizer(std::slice::from_ref(&x), &p1).unwrap().len() as i64;
        if zk - zp != expected {
            centralizer_formula_ok = false;
        }
    }
    IwasawaReport {
        dims,
        dims_ok,
        k_cap_an_zero,
        centralizer_formula_ok,
        samples,
    }
}

/// `[g^λ, g^μ] ⊂ g^{λ+μ}` on root-space bases (with `g^0 = m ⊕ a`).
pub fn check_root_grading(pair: &SymmetricPair, sys: &RestrictedRootSystem) -> bool {
    let g = pair.algebra();
    let zero = vec![Q::int(0); sys.rank()];
    let space = |l: &[Q]| -> Option<Vec<SuperVector>> {
        if l == zero.as_slice() {
            return Some(sys.m_basis.iter().chain(pair.a_basis()).cloned().collect());
        }
        sys.find(l).map(|i| {
            let r = &sys.roots[i];
            r.even_space.iter().chain(&r.odd_space).cloned().collect()
        })
    };
    let mut weights: Vec<Vec<Q>> = sys.roots.iter().map(|r| r.lambda.clone()).collect();
    weights.push(zero.clone());
    for l in &weights {
        for m in &weights {
            let sum: Vec<Q> = l.iter().zip(m).map(|(a, b)| a + b).collect();
            let target: Vec<Vec<Q>> = space(&sum)
                .unwrap_or_default()
                .iter()
                .map(|v| v.to_dense())
                .collect();
            for x in space(l).unwrap() {
                for y in space(m).unwrap() {
                    let xy = g.bracket(&x, &y).unwrap();
                    if xy.is_zero() {
                        continue;
                    }
                    if target.is_empty() || solve_membership(&xy.to_dense(), &target).is_none() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// θ maps `g^λ` onto `g^{−λ}`.
pub fn check_theta_root_spaces(pair: &SymmetricPair, sys: &RestrictedRootSystem) -> bool {
    let g = pair.algebra();
    sys.roots.iter().all(|r| {
        let neg: Vec<Q> = r.lambda.iter().map(|x| -x.clone()).collect();
        let Some(j) = sys.find(&neg) else {
            return false;
        };
        let other = &sys.roots[j];
        if other.m0 != r.m0 || other.m1 != r.m1 {
            return false;
        }
        let target: Vec<Vec<Q>> = other
            .even_space
            .iter()
            .chain(&other.odd_space)
            .map(|v| v.to_dense())
            .collect();
        r.even_space.iter().chain(&r.odd_space).all(|v| {
            let tv = g.apply_theta(v).unwrap();
            solve_membership(&tv.to_dense(), &target).is_some()
        })
    })
}

pub fn odd_multiplicities_even(sys: &RestrictedRootSystem) -> bool {
    sys.roots.iter().all(|r| r.m1 % 2 == 0)
}

/// `dim z_{k₁}(x) − dim z_{p₁}(x) = dim k₁ − dim p₁` for random `x ∈ p₀`.
pub fn centralizer_dimension_check(
    pair: &SymmetricPair,
    samples: usize,
    seed: u64,
) -> Result<bool, PairError> {
    let g = pair.algebra();
    let split = |vs: &[SuperVector]| -> (Vec<SuperVector>, Vec<SuperVector>) {
        vs.iter()
            .cloned()
            .partition(|v| g.parity_of(v) == Some(Parity::Even))
    };
    let (p0, p1) = split(pair.p_basis());
    let (_, k1) = split(pair.k_basis());
    let expected = k1.len() as i64 - p1.len() as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut x = SuperVector::zero(g.dim());
        for v in &p0 {
            x.add_scaled(v, &Q::int(rng.gen_range(-3..=3)));
        }
        let zk = g.centralizer(std::slice::from_ref(&x), &k1)?.len() as i64;
        let zp = g.centralizer(std::slice::from_ref(&x), &p1)?.len() as i64;
        if zk - zp != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The algebra in the adapted basis `(n, a, k)` with the PBW order N < A < K.
#[derive(Debug)]
pub struct IwasawaFrame {
    pub pbw: Pbw,
    pub n_range: Range<usize>,
    pub a_range: Range<usize>,
    pub k_range: Range<usize>,
    /// Maps original coordinates to frame coordinates.
    pub to_frame: Matrix<Q>,
}

impl IwasawaFrame {
    pub fn algebra(&self) -> &LieSuperalgebra {
        self.pbw.algebra()
    }

    pub fn transform(&self, v: &SuperVector) -> SuperVector {
        SuperVector::from_dense(&self.to_frame.mul_vec(&v.to_dense()))
    }

    pub fn k_indices(&self) -> Range<usize> {
        self.k_range.clone()
    }
}

pub fn iwasawa_frame(
    pair: &SymmetricPair,
    sys: &RestrictedRootSystem,
) -> Result<IwasawaFrame, PairError> {
    iwasawa_frame_with_n(pair, sys.n_basis())
}

pub fn iwasawa_frame_with_n(
    pair: &SymmetricPair,
    n: Vec<SuperVector>,
) -> Result<IwasawaFrame, PairError> {
    let g = pair.algebra();
    let mut basis = n.clone();
    basis.extend(pair.a_basis().iter().cloned());
    basis.extend(pair.k_basis().iter().cloned());
    let label = |v: &SuperVector, fallback: String| -> String {
        let mut it = v.iter();
        match (it.next(), it.next()) {
            (Some((i, c)), None) if *c == Q::int(1) => g.names()[i].clone(),
            _ => fallback,
        }
    };
    let mut names: Vec<String> = Vec::new();
    for (i, v) in n.iter().enumerate() {
        names.push(label(v, format!("n{}", i + 1)));
    }
    names.extend(pair.a_names().iter().cloned());
    for (i, v) in pair.k_basis().iter().enumerate() {
        names.push(label(v, format!("k{}", i + 1)));
    }
    // a-names must stay unique even if they clash with basis labels
    let mut seen = BTreeSet::new();
    for (i, name) in names.iter_mut().enumerate() {
        if !seen.insert(name.clone()) {
            *name = format!("{name}_{i}");
            seen.insert(name.clone());
        }
    }
    let frame = g
        .change_basis(&basis, names)
        .map_err(|_| PairError::InvalidAlgebra("k + a + n is not a basis of g".into()))?;
    let cols: Vec<Vec<Q>> = basis.iter().map(|v| v.to_dense()).collect();
    let to_frame = Matrix::from_columns(g.dim(), &cols)
        .inverse()
        .expect("checked by change_basis");
    let nl = n.len();
    let al = pair.rank();
    let total = g.dim();
    let order = BasisOrder::iwasawa(
        &(0..nl).collect::<Vec<_>>(),
        &(nl..nl + al).collect::<Vec<_>>(),
        &(nl + al..total).collect::<Vec<_>>(),
    )?;
    Ok(IwasawaFrame {
        pbw: Pbw::new(frame, order)?,
        n_range: 0..nl,
        a_range: nl..nl + al,
        k_range: nl + al..total,
        to_frame,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liesuper::Parity;

    /// sl(2) ⊕ sl(2) with the flip, a = {(h, -h)}.
    fn group_sl2() -> SymmetricPair {
        let b = vec![
            ((0, 1), vec![(2, Q::int(1))]),
            ((0, 2), vec![(0, Q::int(-2))]),
            ((1, 2), vec![(1, Q::int(2))]),
        ];
        let g0 = LieSuperalgebra::new(
            vec!["e".into(), "f".into(), "h".into()],
            vec![Parity::Even; 3],
            b,
        )
        .unwrap()
        .with_form(Matrix::from_rows(vec![
            vec![Q::int(0), Q::int(1), Q::int(0)],
            vec![Q::int(1), Q::int(0), Q::int(0)],
            vec![Q::int(0), Q::int(0), Q::int(2)],
        ]));
        let g = g0.direct_sum(&g0, ("1", "2"));
        let mut flip = Matrix::zeros(6, 6);
        for i in 0..3 {
            flip.set(i, i + 3, Q::int(1));
            flip.set(i + 3, i, Q::int(1));
        }
        let g = g.with_theta(flip);
        let a = SuperVector::from_sparse(6, [(2, Q::int(1)), (5, Q::int(-1))]);
        build_pair(g, vec![a]).unwrap()
    }

    #[test]
    fn group_sl2_roots() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let summary: Vec<(Vec<Q>, usize, usize)> = sys
            .roots
            .iter()
            .map(|r| (r.lambda.clone(), r.m0, r.m1))
            .collect();
        assert_eq!(
            summary,
            vec![(vec![Q::int(-2)], 2, 0), (vec![Q::int(2)], 2, 0)]
        );
        assert_eq!(sys.positive, vec![false, true]);
        assert_eq!(sys.m_basis.len(), 1);
        assert_eq!(sys.rho, vec![Q::int(2)]);
        assert_eq!(rho_from_supertrace(&pair, &sys), sys.rho);
        let w = even_weyl_group(&sys).unwrap();
        assert_eq!(w.order(), 2);
        assert!(w.permutes_roots(&sys));
        let h = APolynomial::var(1, 0);
        assert!(!w.is_invariant(&h));
        assert!(w.is_invariant(&h.pow(2)));
        let rep = iwasawa_check(&pair, &sys, 1);
        assert!(rep.ok(), "{rep:?}");
        assert!(check_root_grading(&pair, &sys));
        assert!(check_theta_root_spaces(&pair, &sys));
    }

    #[test]
    fn theta_flip_eigenspaces() {
        let pair = group_sl2();
        for k in pair.k_basis() {
            assert_eq!(pair.algebra().apply_theta(k).unwrap(), *k);
        }
        for p in pair.p_basis() {
            assert_eq!(pair.algebra().apply_theta(p).unwrap(), p.scale(&Q::int(-1)));
        }
        assert_eq!((pair.k_basis().len(), pair.p_basis().len()), (3, 3));
    }

    #[test]
    fn build_pair_errors() {
        let pair = group_sl2();
        let g = pair.algebra().clone();
        assert!(matches!(
            build_pair(g.clone(), vec![]),
            Err(PairError::CentralizerTooLarge {
                found: 3,
                expected: 0
            })
        ));
        // (h, h) is in k
        let bad = SuperVector::from_sparse(6, [(2, Q::int(1)), (5, Q::int(1))]);
        assert_eq!(
            build_pair(g, vec![bad]).unwrap_err(),
            PairError::NotInEvenP(0)
        );
    }

    #[test]
    fn direction_on_wall() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        assert_eq!(
            choose_positive_system(&sys.roots, &[Q::int(0)]),
            Err(PairError::DirectionOnWall(0))
        );
        assert_eq!(
            choose_positive_system(&sys.roots, &[Q::int(-1)]).unwrap(),
            vec![true, false]
        );
    }

    #[test]
    fn truncated_n_is_detected() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let mut n = sys.n_basis();
        n.pop();
        let rep = iwasawa_check_with_n(&pair, &n, 3, 0);
        assert!(!rep.dims_ok);
        assert!(!rep.ok());
    }

    #[test]
    fn frame_order_is_iwasawa() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let fr = iwasawa_frame(&pair, &sys).unwrap();
        assert!(fr.pbw.order().is_iwasawa());
        assert!(fr.algebra().verify().is_valid());
        assert_eq!(fr.a_range, 2..3);
        assert_eq!(fr.transform(&pair.a_basis()[0]), SuperVector::basis(6, 2));
    }
}
