//! Built-in symmetric superpairs, the group-type construction and the
//! end-to-end check of the Harish-Chandra isomorphism.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::apoly::APolynomial;
use crate::harish_chandra::{
    hc_gamma, invariants_up_to_degree, verify_exact_sequence, InvariantBasis,
};
use crate::invariant_rings::{build_rank_one_model, ModelError, Ring, RingContext};
use crate::liesuper::{
    matrix_superalgebra, vector_from_terms, AlgebraJson, Decomposition, LieError, LieSuperalgebra,
    Parity, SuperVector,
};
use crate::linalg::{simultaneous_eigenspaces, Matrix};
use crate::scalar::Q;
use crate::symmetric_pair::{
    build_pair, even_weyl_group, iwasawa_check_with_n, iwasawa_frame_with_n, restricted_roots,
    restricted_roots_with, IsoClass, IwasawaFrame, PairError, RestrictedRootSystem, SymmetricPair,
    WeylGroup,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog entry {0}")]
    UnknownEntry(String),
    #[error("not of even type: {0}")]
    NotEvenType(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("algebra fails validation: {0}")]
    InvalidAlgebra(String),
    #[error("cannot read {path}: {message}")]
    Input { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Construction {
    GroupType { base: String },
    RankOne { q: usize, iso: IsoClass },
    Explicit { path: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub construction: Construction,
    pub default_degree: usize,
}

pub fn catalog() -> Vec<CatalogEntry> {
    let rank_one = |name: &str, q, iso| CatalogEntry {
        name: name.into(),
        construction: Construction::RankOne { q, iso },
        default_degree: 3,
    };
    let group = |name: &str, base: &str, d| CatalogEntry {
        name: name.into(),
        construction: Construction::GroupType { base: base.into() },
        default_degree: d,
    };
    vec![
        rank_one("rank1-aniso-q1", 1, IsoClass::Anisotropic),
        rank_one("rank1-aniso-q2", 2, IsoClass::Anisotropic),
        rank_one("rank1-iso-q1", 1, IsoClass::Isotropic),
        group("group-sl2", "sl2", 4),
        group("group-osp12", "osp12", 4),
        group("group-gl12", "gl12", 2),
    ]
}

pub fn lookup(name: &str) -> Result<CatalogEntry, CatalogError> {
    catalog()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::UnknownEntry(name.into()))
}

/// A built-in entry name, or else a path to an algebra JSON file.
pub fn resolve(name_or_path: &str) -> Result<CatalogEntry, CatalogError> {
    if let Ok(e) = lookup(name_or_path) {
        return Ok(e);
    }
    if std::path::Path::new(name_or_path).is_file() {
        return Ok(CatalogEntry {
            name: name_or_path.into(),
            construction: Construction::Explicit {
                path: name_or_path.into(),
            },
            default_degree: 2,
        });
    }
    Err(CatalogError::UnknownEntry(name_or_path.into()))
}

pub fn read_algebra_json(path: &str) -> Result<AlgebraJson, CatalogError> {
    let err = |message: String| CatalogError::Input {
        path: path.into(),
        message,
    };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| err(e.to_string()))
}

/// With `theta`, the `cartan` vectors are taken as `a`; without it the
/// algebra is doubled to group type around `cartan`.
pub fn explicit_pair(j: &AlgebraJson) -> Result<SymmetricPair, CatalogError> {
    let g = LieSuperalgebra::from_json(j)?;
    let report = g.verify();
    if let Some(v) = report.violations.first() {
        return Err(CatalogError::InvalidAlgebra(v.to_string()));
    }
    let cartan = j
        .cartan
        .as_ref()
        .ok_or_else(|| CatalogError::NotEvenType("no cartan subspace given".into()))?
        .iter()
        .map(|t| vector_from_terms(g.dim(), t))
        .collect::<Result<Vec<_>, _>>()?;
    if j.theta.is_some() {
        Ok(build_pair(g, cartan)?)
    } else {
        group_type_pair(&BaseAlgebra { algebra: g, cartan })
    }
}

fn int_matrix(size: usize, entries: &[(usize, usize, i64)]) -> Matrix<Q> {
    let mut m = Matrix::zeros(size, size);
    for &(i, j, x) in entries {
        m.set(i, j, Q::int(x));
    }
    m
}

/// A base algebra with its even Cartan subalgebra (as basis indices).
pub struct BaseAlgebra {
    pub algebra: LieSuperalgebra,
    pub cartan: Vec<SuperVector>,
}

pub fn sl2() -> BaseAlgebra {
    let g = matrix_superalgebra(
        &["e", "f", "h"],
        &[Parity::Even, Parity::Even],
        &[
            int_matrix(2, &[(0, 1, 1)]),
            int_matrix(2, &[(1, 0, 1)]),
            int_matrix(2, &[(0, 0, 1), (1, 1, -1)]),
        ],
        Some(Q::int(1)),
    )
    .expect("sl2 is closed");
    BaseAlgebra {
        cartan: vec![SuperVector::basis(3, 2)],
        algebra: g,
    }
}

pub fn osp12() -> BaseAlgebra {
    let g = matrix_superalgebra(
        &["h", "e", "f", "x", "y"],
        &[Parity::Even, Parity::Odd, Parity::Odd],
        &[
            int_matrix(3, &[(1, 1, 1), (2, 2, -1)]),
            int_matrix(3, &[(1, 2, 1)]),
            int_matrix(3, &[(2, 1, 1)]),
            int_matrix(3, &[(0, 1, 1), (2, 0, 1)]),
            int_matrix(3, &[(0, 2, -1), (1, 0, 1)]),
        ],
        Some(Q::int(1)),
    )
    .expect("osp(1|2) is closed");
    BaseAlgebra {
        cartan: vec![SuperVector::basis(5, 0)],
        algebra: g,
    }
}

/// `gl(m|n)` in the basis of matrix units `E_ij`.
pub fn gl(m: usize, n: usize) -> BaseAlgebra {
    let size = m + n;
    let rp: Vec<Parity> = (0..size)
        .map(|i| if i < m { Parity::Even } else { Parity::Odd })
        .collect();
    let mut names = Vec::new();
    let mut mats = Vec::new();
    let mut cartan_idx = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i == j {
                cartan_idx.push(names.len());
            }
            names.push(format!("E{}{}", i + 1, j + 1));
            mats.push(int_matrix(size, &[(i, j, 1)]));
        }
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let g = matrix_superalgebra(&refs, &rp, &mats, Some(Q::int(1))).expect("gl(m|n) is closed");
    let dim = g.dim();
    BaseAlgebra {
        cartan: cartan_idx
            .into_iter()
            .map(|i| SuperVector::basis(dim, i))
            .collect(),
        algebra: g,
    }
}

pub fn base_algebra(name: &str) -> Result<BaseAlgebra, CatalogError> {
    match name {
        "sl2" => Ok(sl2()),
        "osp12" => Ok(osp12()),
        "gl12" => Ok(gl(1, 2)),
        "gl11" => Ok(gl(1, 1)),
        _ => Err(CatalogError::UnknownEntry(name.into())),
    }
}

/// `z(g) ⊕ [g, g]` as a certificate candidate; verified before use.
pub fn canonical_certificate(g: &LieSuperalgebra) -> Result<Decomposition, LieError> {
    let (derived, center) = g.derived_and_center();
    let d = Decomposition {
        center,
        ideals: if derived.is_empty() {
            Vec::new()
        } else {
            vec![derived]
        },
    };
    g.verify_certificate(&d)?;
    Ok(d)
}

/// `h` is an even abelian subalgebra acting semisimply with rational
/// eigenvalues and equal to its own centralizer in `g`.
pub fn check_even_cartan(g: &LieSuperalgebra, h: &[SuperVector]) -> Result<(), CatalogError> {
    for x in h {
        if g.parity_of(x) != Some(Parity::Even) {
            return Err(CatalogError::NotEvenType(
                "Cartan element is not even".into(),
            ));
        }
        for y in h {
            if !g.bracket(x, y)?.is_zero() {
                return Err(CatalogError::NotEvenType(
                    "Cartan subalgebra is not abelian".into(),
                ));
            }
        }
    }
    let ads: Vec<Matrix<Q>> = h.iter().map(|x| g.ad_matrix(x)).collect::<Result<_, _>>()?;
    simultaneous_eigenspaces(&ads).map_err(|e| CatalogError::NotEvenType(e.to_string()))?;
    let all = g.basis_vectors();
    let z = g.centralizer(h, &all)?;
    if z.len() != h.len() {
        return Err(CatalogError::NotEvenType(format!(
            "centralizer of the Cartan subalgebra has dimension {} > {}",
            z.len(),
            h.len()
        )));
    }
    Ok(())
}

/// `(g₀ ⊕ g₀, θ = flip)` with `a = {(h, −h)}`.
pub fn group_type_pair(base: &BaseAlgebra) -> Result<SymmetricPair, CatalogError> {
    let g0 = &base.algebra;
    let cert = canonical_certificate(g0)?;
    check_even_cartan(g0, &base.cartan)?;
    let n = g0.dim();
    let g = g0.direct_sum(g0, ("_1", "_2"));
    let mut flip = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        flip.set(i, i + n, Q::int(1));
        flip.set(i + n, i, Q::int(1));
    }
    let lift = |v: &SuperVector, shift: usize| {
        SuperVector::from_sparse(2 * n, v.iter().map(|(i, x)| (i + shift, x.clone())))
    };
    let both = |vs: &[SuperVector]| -> Vec<SuperVector> {
        vs.iter()
            .map(|v| lift(v, 0))
            .chain(vs.iter().map(|v| lift(v, n)))
            .collect()
    };
    let decomposition = Decomposition {
        center: both(&cert.center),
        ideals: cert
            .ideals
            .iter()
            .map(|i| i.iter().map(|v| lift(v, 0)).collect())
            .chain(
                cert.ideals
                    .iter()
                    .map(|i| i.iter().map(|v| lift(v, n)).collect()),
            )
            .collect(),
    };
    let a: Vec<SuperVector> = base
        .cartan
        .iter()
        .map(|h| lift(h, 0).sub(&lift(h, n)))
        .collect();
    let g = g.with_theta(flip).with_decomposition(decomposition);
    let names = if a.len() == 1 {
        vec!["h".to_string()]
    } else {
        (1..=a.len()).map(|i| format!("h{i}")).collect()
    };
    Ok(build_pair(g, a)?.with_a_names(names))
}

/// A constructed entry.
pub struct BuiltEntry {
    pub entry: CatalogEntry,
    pub pair: SymmetricPair,
    /// Whether a strong reductivity certificate was verified.
    pub strongly_reductive: bool,
}

pub fn build_entry(entry: &CatalogEntry) -> Result<BuiltEntry, CatalogError> {
    let (pair, strongly_reductive) = match &entry.construction {
        Construction::GroupType { base } => (group_type_pair(&base_algebra(base)?)?, true),
        Construction::RankOne { q, iso } => {
            let c = if *iso == IsoClass::Anisotropic {
                Q::int(1)
            } else {
                Q::int(0)
            };
            let model = build_rank_one_model(*q, *iso, c)?;
            let cert = canonical_certificate(&model.algebra).is_ok();
            (model.pair()?, cert)
        }
        Construction::Explicit { path } => {
            let pair = explicit_pair(&read_algebra_json(path)?)?;
            let cert = pair.algebra().decomposition().is_some();
            (pair, cert)
        }
    };
    if let Some(d) = pair.algebra().decomposition() {
        pair.algebra().verify_certificate(d)?;
    }
    Ok(BuiltEntry {
        entry: entry.clone(),
        pair,
        strongly_reductive,
    })
}

/// Defects that can be planted to exercise the negative controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Plant {
    /// Perturb one structure constant.
    Jacobi,
    /// Drop one vector from `n`.
    TruncatedN,
    /// Raise the multiplicity of one positive root.
    Multiplicity,
}

/// Perturb `[x_i, x_j]` for the first nonzero bracket, keeping parity.
pub fn plant_jacobi(g: &LieSuperalgebra) -> LieSuperalgebra {
    let mut j = g.to_json();
    let pos = j
        .brackets
        .iter()
        .position(|b| !b.out.is_empty())
        .expect("nonabelian algebra");
    let first = &mut j.brackets[pos].out[0];
    first.coeff = &first.coeff + &Q::int(1);
    LieSuperalgebra::from_json(&j).expect("schema unchanged")
}

pub fn plant_multiplicity(sys: &mut RestrictedRootSystem) {
    let i = (0..sys.roots.len())
        .find(|&i| sys.positive[i])
        .expect("a positive root");
    let r = &mut sys.roots[i];
    if r.m1 > 0 {
        r.m1 += 2;
    } else {
        r.m0 += 1;
    }
    sys.refresh();
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationRow {
    pub degree: usize,
    pub dim_invariants: usize,
    pub dim_kernel: usize,
    pub dim_image: usize,
    #[serde(rename = "dim_J")]
    pub dim_j: usize,
    #[serde(rename = "dim_I")]
    pub dim_i: usize,
    #[serde(rename = "dim_I_without_W0")]
    pub dim_i_without_w0: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Flags {
    pub algebra_valid: bool,
    pub iwasawa: bool,
    pub weyl_invariance: bool,
    #[serde(rename = "image_in_J")]
    pub image_in_j: bool,
    pub kernel_vanishes: bool,
    pub exact: bool,
    pub dims_match: bool,
}

impl Flags {
    pub fn all(&self) -> bool {
        self.algebra_valid
            && self.iwasawa
            && self.weyl_invariance
            && self.image_in_j
            && self.kernel_vanishes
            && self.exact
            && self.dims_match
    }

    fn failed() -> Flags {
        Flags {
            algebra_valid: false,
            iwasawa: false,
            weyl_invariance: false,
            image_in_j: false,
            kernel_vanishes: false,
            exact: false,
            dims_match: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub entry: String,
    pub degree: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plant: Option<Plant>,
    pub strongly_reductive: bool,
    pub a_names: Vec<String>,
    pub rho: Vec<Q>,
    pub weyl_order: usize,
    pub rows: Vec<VerificationRow>,
    /// Basis of `Γ(U(g)^k_{≤d})`, pretty-printed.
    pub image: Vec<String>,
    pub flags: Flags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.flags.all()
    }
}

/// Everything the theorem check needs for one pair.
pub struct Pipeline {
    pub pair: SymmetricPair,
    pub sys: RestrictedRootSystem,
    pub weyl: WeylGroup,
    pub frame: IwasawaFrame,
    pub rings: RingContext,
}

impl Pipeline {
    pub fn new(pair: SymmetricPair) -> Result<Pipeline, CatalogError> {
        let sys = restricted_roots(&pair)?;
        Pipeline::with_system(pair, sys)
    }

    pub fn with_system(
        pair: SymmetricPair,
        sys: RestrictedRootSystem,
    ) -> Result<Pipeline, CatalogError> {
        let weyl = even_weyl_group(&sys)?;
        let frame = iwasawa_frame_with_n(&pair, sys.n_basis())?;
        let rings = RingContext::from_system(&sys, &weyl);
        Ok(Pipeline {
            pair,
            sys,
            weyl,
            frame,
            rings,
        })
    }

    pub fn gamma(&self, d: &crate::pbw::UEAElement) -> APolynomial {
        hc_gamma(&self.frame, &self.sys.rho, d).expect("frame order is Iwasawa")
    }

    pub fn invariants(&self, d: usize) -> InvariantBasis {
        invariants_up_to_degree(&self.frame, d)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub plant: Option<Plant>,
    pub seed: u64,
    /// Positivity direction in a-basis coordinates.
    pub direction: Option<Vec<Q>>,
    /// Worker threads for the per-degree checks; 0 or 1 runs serially.
    pub threads: usize,
}

struct DegreeOutcome {
    row: VerificationRow,
    image: Vec<APolynomial>,
    weyl: bool,
    in_j: bool,
    kernel: bool,
    exact: bool,
}

fn check_degree(pipe: &Pipeline, k: usize) -> DegreeOutcome {
    let inv = pipe.invariants(k);
    let (rep, image) = verify_exact_sequence(&pipe.frame, &pipe.sys.rho, &inv);
    let row = VerificationRow {
        degree: k,
        dim_invariants: rep.dim_invariants,
        dim_kernel: rep.dim_kernel,
        dim_image: rep.dim_image,
        dim_j: pipe.rings.filtered_dimension(Ring::J, k as u32),
        dim_i: pipe.rings.filtered_dimension(Ring::I, k as u32),
        dim_i_without_w0: pipe.rings.filtered_dimension(Ring::IWithoutW0, k as u32),
    };
    DegreeOutcome {
        weyl: image.iter().all(|p| pipe.weyl.is_invariant(p)),
        in_j: image.iter().all(|p| pipe.rings.contains(Ring::J, p)),
        kernel: rep.kernel_vanishes,
        exact: rep.dims_add_up,
        row,
        image,
    }
}

fn check_degrees(pipe: &Pipeline, d: usize, threads: usize) -> Vec<DegreeOutcome> {
    let workers = threads.clamp(1, d + 1);
    if workers == 1 {
        return (0..=d).map(|k| check_degree(pipe, k)).collect();
    }
    let mut slots: Vec<Option<DegreeOutcome>> = (0..=d).map(|_| None).collect();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..=d)
                        .step_by(workers)
                        .map(|k| (k, check_degree(pipe, k)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, out) in h.join().expect("worker panicked") {
                slots[k] = Some(out);
            }
        }
    });
    slots
        .into_iter()
        .map(|o| o.expect("every degree checked"))
        .collect()
}

pub fn verify_main_theorem(
    entry: &CatalogEntry,
    d: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport, CatalogError> {
    let start = Instant::now();
    let built = build_entry(entry)?;
    let mut report = VerificationReport {
        entry: entry.name.clone(),
        degree: d,
        plant: opts.plant,
        strongly_reductive: built.strongly_reductive,
        a_names: built.pair.a_names().to_vec(),
        rho: Vec::new(),
        weyl_order: 0,
        rows: Vec::new(),
        image: Vec::new(),
        flags: Flags::failed(),
        error: None,
        elapsed: Duration::ZERO,
    };
    let mut pair = built.pair;
    if opts.plant == Some(Plant::Jacobi) {
        let broken = plant_jacobi(pair.algebra());
        let violations = broken.verify().violations;
        if let Some(v) = violations.first() {
            report.error = Some(format!("{} violations, first: {v}", violations.len()));
            report.elapsed = start.elapsed();
            return Ok(report);
        }
        pair = build_pair(broken, pair.a_basis().to_vec())?.with_a_names(report.a_names.clone());
    }
    let mut sys = restricted_roots_with(&pair, opts.direction.clone())?;
    let mut n = sys.n_basis();
    if opts.plant == Some(Plant::TruncatedN) {
        n.pop();
    }
    report.flags.algebra_valid = true;
    if !iwasawa_check_with_n(&pair, &n, 20, opts.seed).ok() {
        report.error = Some("k + a + n is not an Iwasawa decomposition".into());
        report.elapsed = start.elapsed();
        return Ok(report);
    }
    if opts.plant == Some(Plant::Multiplicity) {
        plant_multiplicity(&mut sys);
    }
    let pipe = Pipeline::with_system(pair, sys)?;
    report.rho = pipe.sys.rho.clone();
    report.weyl_order = pipe.weyl.order();
    let outcomes = check_degrees(&pipe, d, opts.threads);
    let flags = Flags {
        algebra_valid: true,
        iwasawa: true,
        weyl_invariance: outcomes.iter().all(|o| o.weyl),
        image_in_j: outcomes.iter().all(|o| o.in_j),
        kernel_vanishes: outcomes.iter().all(|o| o.kernel),
        exact: outcomes.iter().all(|o| o.exact),
        dims_match: outcomes.iter().all(|o| o.row.dim_image == o.row.dim_j),
    };
    let names = pipe.pair.a_names().to_vec();
    report.image = outcomes
        .last()
        .map(|o| o.image.iter().map(|p| p.display(&names)).collect())
        .unwrap_or_default();
    report.rows = outcomes.into_iter().map(|o| o.row).collect();
    report.flags = flags;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// `Γ(DD') = Γ(D)Γ(D')` on `count` random pairs drawn from the invariants of
/// degree at most `d`. Returns the number of failures.
pub fn multiplicativity_failures(pipe: &Pipeline, d: usize, count: usize, seed: u64) -> usize {
    let inv = pipe.invariants(d).invariants;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..count {
        let x = &inv[rng.gen_range(0..inv.len())];
        let y = &inv[rng.gen_range(0..inv.len())];
        let xy = pipe.frame.pbw.multiply(x, y);
        if pipe.gamma(&xy) != pipe.gamma(x).mul(&pipe.gamma(y)) {
            failures += 1;
        }
    }
    failures
}

/// Coordinates of an element of `a` in the a-basis.
pub fn a_coordinates(pair: &SymmetricPair, v: &SuperVector) -> Option<Vec<Q>> {
    let cols: Vec<Vec<Q>> = pair.a_basis().iter().map(|x| x.to_dense()).collect();
    crate::linalg::solve_membership(&v.to_dense(), &cols)
}

/// `λ(h)` for a root given by its values on the a-basis.
pub fn evaluate(lambda: &[Q], h: &[Q]) -> Q {
    lambda
        .iter()
        .zip(h)
        .fold(Q::int(0), |acc, (x, y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_names() {
        let names: Vec<String> = catalog().into_iter().map(|e| e.name).collect();
        assert_eq!(names.len(), 6);
        assert!(lookup("group-sl2").is_ok());
        assert!(matches!(lookup("nope"), Err(CatalogError::UnknownEntry(_))));
    }

    #[test]
    fn base_algebras_are_valid() {
        for name in ["sl2", "osp12", "gl12", "gl11"] {
            let b = base_algebra(name).unwrap();
            assert!(b.algebra.verify().is_valid(), "{name}");
        }
    }

    #[test]
    fn group_type_roots() {
        let pair = group_type_pair(&sl2()).unwrap();
        let sys = restricted_roots(&pair).unwrap();
        let mults: Vec<(Vec<Q>, usize, usize)> = sys
            .roots
            .iter()
            .map(|r| (r.lambda.clone(), r.m0, r.m1))
            .collect();
        assert_eq!(
            mults,
            vec![(vec![Q::int(-2)], 2, 0), (vec![Q::int(2)], 2, 0)]
        );

        let pair = group_type_pair(&osp12()).unwrap();
        let sys = restricted_roots(&pair).unwrap();
        let mults: Vec<(Vec<Q>, usize, usize)> = sys
            .roots
            .iter()
            .map(|r| (r.lambda.clone(), r.m0, r.m1))
            .collect();
        assert_eq!(
            mults,
            vec![
                (vec![Q::int(-2)], 2, 0),
                (vec![Q::int(-1)], 0, 2),
                (vec![Q::int(1)], 0, 2),
                (vec![Q::int(2)], 2, 0)
            ]
        );
        assert!(sys.odd_classes.iter().all(|c| c.gated));
    }

    #[test]
    fn gl11_has_no_certificate() {
        assert!(matches!(
            group_type_pair(&gl(1, 1)),
            Err(CatalogError::Lie(LieError::NoCertificate(_)))
        ));
    }

    #[test]
    fn gl12_is_even_type() {
        let pair = group_type_pair(&gl(1, 2)).unwrap();
        let sys = restricted_roots(&pair).unwrap();
        assert_eq!(pair.rank(), 3);
        assert!(sys
            .odd_classes
            .iter()
            .all(|c| c.iso == IsoClass::Isotropic && c.q == 1));
        assert_eq!(even_weyl_group(&sys).unwrap().order(), 2);
    }

    #[test]
    fn centralizer_dimensions_balance() {
        use crate::symmetric_pair::centralizer_dimension_check;
        for name in ["osp12", "gl12"] {
            let pair = group_type_pair(&base_algebra(name).unwrap()).unwrap();
            assert!(centralizer_dimension_check(&pair, 10, 3).unwrap(), "{name}");
        }
    }

    #[test]
    fn planted_jacobi_is_invalid() {
        let g = plant_jacobi(&osp12().algebra);
        assert!(!g.verify().is_valid());
    }

    #[test]
    fn verify_group_sl2_low_degree() {
        let e = lookup("group-sl2").unwrap();
        let r = verify_main_theorem(&e, 2, &VerifyOptions::default()).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.rows.last().unwrap().dim_image, 2);
    }
}
