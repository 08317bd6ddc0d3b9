//! The projection `D ↦ D_a`, the ρ-shifted homomorphism Γ, k-invariants of
//! `U(g)` up to a filtration degree and the associated graded restriction.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::apoly::APolynomial;
use crate::liesuper::{LieSuperalgebra, Parity, SuperVector};
use crate::linalg::{independent_subset, nullspace_sparse, solve_membership, SparseRow};
use crate::pbw::{Block, Pbw, PbwError, SymElement, UEAElement, Word};
use crate::scalar::{Field, Q};
use crate::symmetric_pair::{IwasawaFrame, SymmetricPair};

/// `D_a`: the part of `D` in pure a-monomials, read off in the order
/// N < A < K, where every other monomial lies in `nU(g) + U(g)k`.
pub fn project_to_a(frame: &IwasawaFrame, d: &UEAElement) -> Result<APolynomial, PbwError> {
    let order = frame.pbw.order();
    if !order.is_iwasawa() {
        return Err(PbwError::OrderNotIwasawa);
    }
    let r = frame.a_range.len();
    let mut out = APolynomial::zero(r);
    for (w, c) in d.iter() {
        if w.iter().all(|&l| order.block(l as usize) == Block::A) {
            let mut e = vec![0u32; r];
            for &l in w {
                e[l as usize - frame.a_range.start] += 1;
            }
            out.add_term(e, c);
        }
    }
    Ok(out)
}

/// `Γ(D)(μ) = D_a(μ + ρ)`, i.e. substitute `h ↦ h + ρ(h)`.
pub fn hc_gamma(frame: &IwasawaFrame, rho: &[Q], d: &UEAElement) -> Result<APolynomial, PbwError> {
    Ok(project_to_a(frame, d)?.shift(rho))
}

/// Basis of `U(g)^k` in filtration degree `≤ d` and of its subspace
/// `(U(g)k)^k`.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    pub degree: usize,
    pub invariants: Vec<UEAElement>,
    pub companion: Vec<UEAElement>,
}

impl InvariantBasis {
    pub fn dim(&self) -> usize {
        self.invariants.len()
    }
}

fn has_k_letter(frame: &IwasawaFrame, w: &[u16]) -> bool {
    w.iter().any(|&l| frame.k_range.contains(&(l as usize)))
}

/// Invariants of the adjoint k-action on `F_d U(g)`, from one nullspace per
/// parity over all PBW monomials of degree at most `d`.
pub fn invariants_up_to_degree(frame: &IwasawaFrame, d: usize) -> InvariantBasis {
    let pbw = &frame.pbw;
    let monomials = pbw.monomials_up_to(d);
    let mut invariants = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let cols: Vec<&Word> = monomials
            .iter()
            .filter(|w| pbw.word_parity(w) == parity)
            .collect();
        let mut rows: BTreeMap<(usize, Word), SparseRow<Q>> = BTreeMap::new();
        for (c, w) in cols.iter().enumerate() {
            let m = UEAElement::monomial((*w).clone(), Q::int(1));
            for x in frame.k_indices() {
                for (out, v) in pbw.adjoint_letter(x, &m).iter() {
                    rows.entry((x, out.clone()))
                        .or_default()
                        .push((c, v.clone()));
                }
            }
        }
        for v in nullspace_sparse(cols.len(), rows.into_values()) {
            let mut u = UEAElement::zero();
            for (c, x) in v {
                u.add_term(cols[c].clone(), &x);
            }
            invariants.push(u);
        }
    }
    let companion = companion_basis(frame, &invariants);
    InvariantBasis {
        degree: d,
        invariants,
        companion,
    }
}

/// Combinations of the invariants lying in `U(g)k`, i.e. supported on
/// monomials that contain a K letter.
fn companion_basis(frame: &IwasawaFrame, invariants: &[UEAElement]) -> Vec<UEAElement> {
    let mut index: HashMap<Word, usize> = HashMap::new();
    let mut rows: BTreeMap<usize, SparseRow<Q>> = BTreeMap::new();
    for (i, u) in invariants.iter().enumerate() {
        for (w, c) in u.iter() {
            if has_k_letter(frame, w) {
                continue;
            }
            let next = index.len();
            let r = *index.entry(w.clone()).or_insert(next);
            rows.entry(r).or_default().push((i, c.clone()));
        }
    }
    nullspace_sparse(invariants.len(), rows.into_values())
        .into_iter()
        .map(|coeffs| {
            let mut u = UEAElement::zero();
            for (i, c) in coeffs {
                u.add_scaled(&invariants[i], &c);
            }
            u
        })
        .collect()
}

/// Coordinates of polynomials in the monomial basis, for rank computations.
pub fn poly_vectors(polys: &[APolynomial]) -> Vec<Vec<Q>> {
    let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for p in polys {
        for (e, _) in p.iter() {
            let n = index.len();
            index.entry(e.clone()).or_insert(n);
        }
    }
    polys
        .iter()
        .map(|p| {
            let mut v = vec![Q::int(0); index.len()];
            for (e, c) in p.iter() {
                v[index[e]] = c.clone();
            }
            v
        })
        .collect()
}

/// Linearly independent subset of the given polynomials.
pub fn poly_basis(polys: &[APolynomial]) -> Vec<APolynomial> {
    independent_subset(&poly_vectors(polys))
        .into_iter()
        .map(|i| polys[i].clone())
        .collect()
}

/// Best-effort preimage of `p` under Γ within the given invariants.
pub fn preimage(
    frame: &IwasawaFrame,
    rho: &[Q],
    inv: &InvariantBasis,
    p: &APolynomial,
) -> Option<UEAElement> {
    let mut images: Vec<APolynomial> = inv
        .invariants
        .iter()
        .map(|d| hc_gamma(frame, rho, d).unwrap())
        .collect();
    images.push(p.clone());
    let mut vecs = poly_vectors(&images);
    let target = vecs.pop().unwrap();
    let coords = solve_membership(&target, &vecs)?;
    let mut u = UEAElement::zero();
    for (c, d) in coords.iter().zip(&inv.invariants) {
        u.add_scaled(d, c);
    }
    Some(u)
}

/// Coordinates of `S(p)` adapted to `p = a ⊕ a^⊥`.
#[derive(Clone, Debug)]
pub struct AdaptedP {
    /// `a`-basis followed by a homogeneous basis of `a^⊥`.
    pub basis: Vec<SuperVector>,
    pub rank: usize,
    /// Parity carrier for symmetric-algebra products over `basis`.
    pub carrier: LieSuperalgebra,
    /// Carrier over `pair.p_basis()`.
    pub p_carrier: LieSuperalgebra,
}

pub fn adapted_p(pair: &SymmetricPair) -> AdaptedP {
    let g = pair.algebra();
    let mut perp = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let part: Vec<SuperVector> = pair
            .p_basis()
            .iter()
            .filter(|v| g.parity_of(v) == Some(parity))
            .cloned()
            .collect();
        let rows: Vec<SparseRow<Q>> = pair
            .a_basis()
            .iter()
            .map(|a| {
                part.iter()
                    .enumerate()
                    .map(|(j, v)| (j, g.form_value(a, v).unwrap()))
                    .filter(|(_, x)| !x.is_zero())
                    .collect()
            })
            .collect();
        for coeffs in nullspace_sparse(part.len(), rows) {
            let mut v = SuperVector::zero(g.dim());
            for (j, c) in coeffs {
                v.add_scaled(&part[j], &c);
            }
            perp.push(v);
        }
    }
    let mut basis: Vec<SuperVector> = pair.a_basis().to_vec();
    basis.extend(perp);
    let carrier_of = |vs: &[SuperVector]| {
        LieSuperalgebra::new(
            (0..vs.len()).map(|i| format!("p{i}")).collect(),
            vs.iter().map(|v| g.parity_of(v).unwrap()).collect(),
            Vec::new(),
        )
        .unwrap()
    };
    AdaptedP {
        carrier: carrier_of(&basis),
        p_carrier: carrier_of(pair.p_basis()),
        basis,
        rank: pair.rank(),
    }
}

/// Projection `S(p) → S(a)` along `a^⊥ S(p)`. The generators of `p` are the
/// vectors of `pair.p_basis()`.
pub fn gr_restriction(pair: &SymmetricPair, adapted: &AdaptedP, p: &SymElement) -> APolynomial {
    let cols: Vec<Vec<Q>> = adapted.basis.iter().map(|v| v.to_dense()).collect();
    let images: Vec<SymElement> = pair
        .p_basis()
        .iter()
        .map(|v| {
            let coords = solve_membership(&v.to_dense(), &cols).expect("p = a ⊕ a^⊥");
            SymElement::from_vector(&SuperVector::from_dense(&coords))
        })
        .collect();
    let q = p.substitute(&adapted.carrier, &images);
    let r = adapted.rank;
    let mut out = APolynomial::zero(r);
    for (w, c) in q.iter() {
        if w.iter().all(|&l| (l as usize) < r) {
            let mut e = vec![0u32; r];
            for &l in w {
                e[l as usize] += 1;
            }
            out.add_term(e, c);
        }
    }
    out
}

/// Rewrite an element of `S(p)` (over `pair.p_basis()`) in frame coordinates.
pub fn sym_p_to_frame(pair: &SymmetricPair, frame: &IwasawaFrame, p: &SymElement) -> SymElement {
    let images: Vec<SymElement> = pair
        .p_basis()
        .iter()
        .map(|v| SymElement::from_vector(&frame.transform(v)))
        .collect();
    p.substitute(frame.algebra(), &images)
}

/// Rewrite an element of `S(g)` (over the original basis) in frame coordinates.
pub fn sym_to_frame(frame: &IwasawaFrame, p: &SymElement) -> SymElement {
    let n = frame.algebra().dim();
    let images: Vec<SymElement> = (0..n)
        .map(|i| SymElement::from_vector(&frame.transform(&SuperVector::basis(n, i))))
        .collect();
    p.substitute(frame.algebra(), &images)
}

/// `Γ(β(p)) − p̄` has degree below `deg p` for every monomial `p ∈ S(p)` of
/// degree at most `d`. Returns the first failing monomial, if any.
pub fn degree_drop_failure(
    pair: &SymmetricPair,
    frame: &IwasawaFrame,
    rho: &[Q],
    d: usize,
) -> Option<Word> {
    let adapted = adapted_p(pair);
    let monomials = Pbw::natural(adapted.p_carrier.clone()).monomials_up_to(d);
    for w in monomials {
        let p = SymElement::from_word(&adapted.p_carrier, &w);
        let u = frame.pbw.supersymmetrize(&sym_p_to_frame(pair, frame, &p));
        let diff = hc_gamma(frame, rho, &u)
            .unwrap()
            .sub(&gr_restriction(pair, &adapted, &p));
        if diff.degree().is_some_and(|k| k as usize >= w.len()) {
            return Some(w);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactSequenceReport {
    pub degree: usize,
    pub dim_invariants: usize,
    pub dim_kernel: usize,
    pub dim_image: usize,
    pub weyl_invariant: bool,
    #[serde(rename = "in_J")]
    pub in_j: bool,
    #[serde(skip)]
    pub kernel_vanishes: bool,
    #[serde(skip)]
    pub dims_add_up: bool,
}

/// Check `0 → (U(g)k)^k → U(g)^k → Γ(U(g)^k) → 0` in filtration degree `≤ d`.
/// The `weyl_invariant` and `in_J` flags are filled in by the caller.
pub fn verify_exact_sequence(
    frame: &IwasawaFrame,
    rho: &[Q],
    inv: &InvariantBasis,
) -> (ExactSequenceReport, Vec<APolynomial>) {
    let images: Vec<APolynomial> = inv
        .invariants
        .iter()
        .map(|d| hc_gamma(frame, rho, d).unwrap())
        .collect();
    let image_basis = poly_basis(&images);
    let kernel_vanishes = inv
        .companion
        .iter()
        .all(|d| hc_gamma(frame, rho, d).unwrap().is_zero());
    let dims_add_up = inv.dim() == inv.companion.len() + image_basis.len();
    let report = ExactSequenceReport {
        degree: inv.degree,
        dim_invariants: inv.dim(),
        dim_kernel: inv.companion.len(),
        dim_image: image_basis.len(),
        weyl_invariant: true,
        in_j: true,
        kernel_vanishes,
        dims_add_up,
    };
    (report, image_basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::symmetric_pair::{build_pair, iwasawa_frame, restricted_roots};

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
        let a = SuperVector::from_sparse(6, [(2, Q::int(1)), (5, Q::int(-1))]);
        build_pair(g.with_theta(flip), vec![a]).unwrap()
    }

    #[test]
    fn gamma_of_one_and_of_h() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let fr = iwasawa_frame(&pair, &sys).unwrap();
        let one = UEAElement::one();
        assert_eq!(hc_gamma(&fr, &sys.rho, &one).unwrap(), APolynomial::one(1));
        let h = fr.pbw.letter(fr.a_range.start);
        assert_eq!(project_to_a(&fr, &h).unwrap(), APolynomial::var(1, 0));
        let expect = APolynomial::var(1, 0).add(&APolynomial::constant(1, sys.rho[0].clone()));
        assert_eq!(hc_gamma(&fr, &sys.rho, &h).unwrap(), expect);
    }

    #[test]
    fn non_iwasawa_order_is_rejected() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let mut fr = iwasawa_frame(&pair, &sys).unwrap();
        fr.pbw = crate::pbw::Pbw::natural(fr.pbw.algebra().clone());
        assert_eq!(
            project_to_a(&fr, &UEAElement::one()),
            Err(PbwError::OrderNotIwasawa)
        );
    }

    #[test]
    fn degree_zero_invariants() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let fr = iwasawa_frame(&pair, &sys).unwrap();
        let inv = invariants_up_to_degree(&fr, 0);
        assert_eq!(inv.dim(), 1);
        assert!(inv.companion.is_empty());
        let (rep, _) = verify_exact_sequence(&fr, &sys.rho, &inv);
        assert_eq!(
            (rep.dim_invariants, rep.dim_kernel, rep.dim_image),
            (1, 0, 1)
        );
    }

    #[test]
    fn group_sl2_casimir_is_invariant() {
        let pair = group_sl2();
        let sys = restricted_roots(&pair).unwrap();
        let fr = iwasawa_frame(&pair, &sys).unwrap();
        let inv = invariants_up_to_degree(&fr, 2);
        // diagonal Casimir e f + f e + h^2/2 of the first copy, in frame coordinates
        let g = pair.algebra();
        let e1 = fr.transform(&g.basis_vector(0));
        let f1 = fr.transform(&g.basis_vector(1));
        let h1 = fr.transform(&g.basis_vector(2));
        let p = &fr.pbw;
        let mut cas = p.normal_form(&[e1.clone(), f1.clone()]).unwrap();
        cas = cas.add(&p.normal_form(&[f1, e1]).unwrap());
        cas.add_scaled(&p.normal_form(&[h1.clone(), h1]).unwrap(), &Q::new(1, 2));
        for x in fr.k_indices() {
            assert!(p.adjoint_letter(x, &cas).is_zero());
        }
        let vecs: Vec<Vec<Q>> = {
            let mut all = inv.invariants.clone();
            all.push(cas);
            let mut index: BTreeMap<Word, usize> = BTreeMap::new();
            for u in &all {
                for (w, _) in u.iter() {
                    let n = index.len();
                    index.entry(w.clone()).or_insert(n);
                }
            }
            all.iter()
                .map(|u| {
                    let mut v = vec![Q::int(0); index.len()];
                    for (w, c) in u.iter() {
                        v[index[w]] = c.clone();
                    }
                    v
                })
                .collect()
        };
        let (target, basis) = vecs.split_last().unwrap();
        assert!(solve_membership(target, basis).is_some());
        let (rep, _) = verify_exact_sequence(&fr, &sys.rho, &inv);
        assert!(rep.kernel_vanishes && rep.dims_add_up, "{rep:?}");
    }

    #[test]
    fn gr_restriction_basics() {
        let pair = group_sl2();
        let ad = adapted_p(&pair);
        assert_eq!(ad.basis.len(), pair.p_basis().len());
        // a itself: find p-basis coordinates of the a vector
        let cols: Vec<Vec<Q>> = pair.p_basis().iter().map(|v| v.to_dense()).collect();
        let a_coords = solve_membership(&pair.a_basis()[0].to_dense(), &cols).unwrap();
        let a_sym = SymElement::from_vector(&SuperVector::from_dense(&a_coords));
        assert_eq!(gr_restriction(&pair, &ad, &a_sym), APolynomial::var(1, 0));
        let perp = &ad.basis[1];
        let perp_coords = solve_membership(&perp.to_dense(), &cols).unwrap();
        let perp_sym = SymElement::from_vector(&SuperVector::from_dense(&perp_coords));
        assert!(gr_restriction(&pair, &ad, &perp_sym).is_zero());
    }
}
