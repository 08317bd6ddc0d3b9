//! The universal enveloping algebra `U(g)` in a PBW basis, the symmetric
//! algebra `S(g)`, supersymmetrization and the Hopf structure maps.

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liesuper::{LieError, LieSuperalgebra, Parity, SuperVector};
use crate::scalar::{factorial, Field, Q};

/// Basis indices of a monomial, in PBW order.
pub type Word = Vec<u16>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    K,
    A,
    N,
    Other,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PbwError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("basis order is not an Iwasawa order (N block, then A, then K)")]
    OrderNotIwasawa,
    #[error("invalid basis order: {0}")]
    BadOrder(String),
    #[error("element is not homogeneous")]
    NotHomogeneous,
}

/// Total order on basis indices with an optional block tag per index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisOrder {
    perm: Vec<usize>,
    rank: Vec<usize>,
    blocks: Vec<Block>,
}

impl BasisOrder {
    pub fn natural(n: usize) -> Self {
        BasisOrder {
            perm: (0..n).collect(),
            rank: (0..n).collect(),
            blocks: vec![Block::Other; n],
        }
    }

    /// `perm[r]` is the basis index at position `r`.
    pub fn from_permutation(perm: Vec<usize>) -> Result<Self, PbwError> {
        let n = perm.len();
        let mut rank = vec![usize::MAX; n];
        for (r, &i) in perm.iter().enumerate() {
            if i >= n || rank[i] != usize::MAX {
                return Err(PbwError::BadOrder("not a permutation".into()));
            }
            rank[i] = r;
        }
        Ok(BasisOrder {
            perm,
            rank,
            blocks: vec![Block::Other; n],
        })
    }

    /// Order listing the `n`, then `a`, then `k` indices, tagged accordingly.
    pub fn iwasawa(n_idx: &[usize], a_idx: &[usize], k_idx: &[usize]) -> Result<Self, PbwError> {
        let perm: Vec<usize> = n_idx.iter().chain(a_idx).chain(k_idx).copied().collect();
        let mut order = Self::from_permutation(perm)?;
        for &i in n_idx {
            order.blocks[i] = Block::N;
        }
        for &i in a_idx {
            order.blocks[i] = Block::A;
        }
        for &i in k_idx {
            order.blocks[i] = Block::K;
        }
        Ok(order)
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.rank[i]
    }

    pub fn block(&self, i: usize) -> Block {
        self.blocks[i]
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// True when every index is tagged and the blocks appear as N, A, K.
    pub fn is_iwasawa(&self) -> bool {
        let tags: Vec<Block> = self.perm.iter().map(|&i| self.blocks[i]).collect();
        if tags.contains(&Block::Other) {
            return false;
        }
        let key = |b: &Block| match b {
            Block::N => 0,
            Block::A => 1,
            _ => 2,
        };
        tags.windows(2).all(|w| key(&w[0]) <= key(&w[1]))
    }
}

/// Element of `U(g)`: PBW monomials with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UEAElement {
    terms: BTreeMap<Word, Q>,
}

impl UEAElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Vec::new(), Q::int(1))
    }

    pub fn monomial(w: Word, c: Q) -> Self {
        let mut u = Self::zero();
        u.add_term(w, &c);
        u
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &[u16]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(|| Q::int(0))
    }

    /// Filtration degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    pub fn add_term(&mut self, w: Word, c: &Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &UEAElement, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (w, c) in &other.terms {
            self.add_term(w.clone(), &(c * s));
        }
    }

    pub fn add(&self, other: &UEAElement) -> UEAElement {
        let mut out = self.clone();
        out.add_scaled(other, &Q::int(1));
        out
    }

    pub fn sub(&self, other: &UEAElement) -> UEAElement {
        let mut out = self.clone();
        out.add_scaled(other, &Q::int(-1));
        out
    }

    pub fn scale(&self, s: &Q) -> UEAElement {
        let mut out = UEAElement::zero();
        out.add_scaled(self, s);
        out
    }

    /// Part of filtration degree exactly `d`.
    pub fn homogeneous_part(&self, d: usize) -> UEAElement {
        UEAElement {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> Vec<MonomialTerm> {
        self.terms
            .iter()
            .map(|(w, c)| MonomialTerm {
                monomial: w.iter().map(|&i| i as usize).collect(),
                coeff: c.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialTerm {
    pub monomial: Vec<usize>,
    pub coeff: Q,
}

/// Element of `U(g) ⊗ U(g)`, keyed by pairs of PBW monomials.
pub type TensorElement = BTreeMap<(Word, Word), Q>;

fn tensor_add(t: &mut TensorElement, key: (Word, Word), c: &Q) {
    if c.is_zero() {
        return;
    }
    let e = t.entry(key.clone()).or_insert_with(|| Q::int(0));
    *e += c;
    if e.is_zero() {
        t.remove(&key);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStrategy {
    Leftmost,
    Rightmost,
}

/// PBW context: an algebra together with a basis order and a memo of
/// products `m * x` of a normal monomial with a letter.
#[derive(Debug)]
pub struct Pbw {
    g: LieSuperalgebra,
    order: BasisOrder,
    memo: RwLock<HashMap<(Word, u16), UEAElement>>,
}

impl Clone for Pbw {
    fn clone(&self) -> Self {
        Pbw::new(self.g.clone(), self.order.clone()).expect("order already checked")
    }
}

impl Pbw {
    pub fn new(g: LieSuperalgebra, order: BasisOrder) -> Result<Self, PbwError> {
        if order.len() != g.dim() {
            return Err(PbwError::BadOrder("order length differs from dim g".into()));
        }
        Ok(Pbw {
            g,
            order,
            memo: RwLock::new(HashMap::new()),
        })
    }

    pub fn natural(g: LieSuperalgebra) -> Self {
        let n = g.dim();
        Pbw::new(g, BasisOrder::natural(n)).unwrap()
    }

    pub fn algebra(&self) -> &LieSuperalgebra {
        &self.g
    }

    pub fn order(&self) -> &BasisOrder {
        &self.order
    }

    fn odd(&self, i: u16) -> bool {
        self.g.parity(i as usize).is_odd()
    }

    fn rank(&self, i: u16) -> usize {
        self.order.rank(i as usize)
    }

    pub fn word_parity(&self, w: &[u16]) -> Parity {
        if w.iter().filter(|&&i| self.odd(i)).count() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// True when `w` is a PBW monomial for this order.
    pub fn is_normal(&self, w: &[u16]) -> bool {
        w.windows(2).all(|p| {
            let (a, b) = (self.rank(p[0]), self.rank(p[1]));
            a < b || (a == b && !self.odd(p[0]))
        })
    }

    pub fn letter(&self, i: usize) -> UEAElement {
        UEAElement::monomial(vec![i as u16], Q::int(1))
    }

    pub fn from_vector(&self, v: &SuperVector) -> UEAElement {
        let mut u = UEAElement::zero();
        for (i, c) in v.iter() {
            u.add_term(vec![i as u16], c);
        }
        u
    }

    /// Normal form of `m * x` for a PBW monomial `m` and a basis letter `x`.
    fn mul_monomial_letter(&self, m: &[u16], x: u16) -> UEAElement {
        let Some(&last) = m.last() else {
            return UEAElement::monomial(vec![x], Q::int(1));
        };
        let (rl, rx) = (self.rank(last), self.rank(x));
        if rl < rx || (rl == rx && !self.odd(x)) {
            let mut w = m.to_vec();
            w.push(x);
            return UEAElement::monomial(w, Q::int(1));
        }
        let key = (m.to_vec(), x);
        if let Some(hit) = self.memo.read().unwrap().get(&key) {
            return hit.clone();
        }
        let prefix = &m[..m.len() - 1];
        let mut out = UEAElement::zero();
        if last == x {
            // odd square: x x = 1/2 [x, x]
            let half = Q::new(1, 2);
            for (k, c) in self.g.bracket_basis(x as usize, x as usize) {
                out.add_scaled(&self.mul_monomial_letter(prefix, *k as u16), &(c * &half));
            }
        } else {
            // m' l x = (-1)^{|l||x|} m' x l + m' [l, x]
            let sign = self
                .g
                .parity(last as usize)
                .swap_sign(self.g.parity(x as usize));
            let px = self.mul_monomial_letter(prefix, x);
            out.add_scaled(&self.mul_letter(&px, last), &sign);
            for (k, c) in self.g.bracket_basis(last as usize, x as usize) {
                out.add_scaled(&self.mul_monomial_letter(prefix, *k as u16), c);
            }
        }
        self.memo.write().unwrap().insert(key, out.clone());
        out
    }

    /// `u * x` for a basis letter `x`.
    pub fn mul_letter(&self, u: &UEAElement, x: u16) -> UEAElement {
        let mut out = UEAElement::zero();
        for (w, c) in u.iter() {
            out.add_scaled(&self.mul_monomial_letter(w, x), c);
        }
        out
    }

    /// `x * u` for a basis letter `x`.
    pub fn letter_mul(&self, x: u16, u: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for (w, c) in u.iter() {
            let mut acc = UEAElement::monomial(vec![x], Q::int(1));
            for &l in w {
                acc = self.mul_letter(&acc, l);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Normal form of an arbitrary word of basis letters.
    pub fn normal_form_word(&self, w: &[u16]) -> UEAElement {
        let mut acc = UEAElement::one();
        for &l in w {
            acc = self.mul_letter(&acc, l);
        }
        acc
    }

    /// Normal form of a product of algebra elements.
    pub fn normal_form(&self, factors: &[SuperVector]) -> Result<UEAElement, PbwError> {
        let mut acc = UEAElement::one();
        for f in factors {
            if f.dim() != self.g.dim() {
                return Err(LieError::MixedAlgebras {
                    dim: self.g.dim(),
                    got: f.dim(),
                }
                .into());
            }
            let mut next = UEAElement::zero();
            for (i, c) in f.iter() {
                next.add_scaled(&self.mul_letter(&acc, i as u16), c);
            }
            acc = next;
        }
        Ok(acc)
    }

    pub fn multiply(&self, u: &UEAElement, v: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for (w, c) in v.iter() {
            let mut acc = u.clone();
            for &l in w {
                acc = self.mul_letter(&acc, l);
            }
            out.add_scaled(&acc, c);
        }
        out
    }

    /// Normal form by explicit rewriting of words in the free algebra,
    /// always contracting the leftmost or the rightmost redex. Used to certify
    /// that the result does not depend on the reduction order.
    pub fn rewrite(&self, w: &[u16], strategy: RewriteStrategy) -> UEAElement {
        let mut pending: BTreeMap<Word, Q> = BTreeMap::new();
        pending.insert(w.to_vec(), Q::int(1));
        let mut done = UEAElement::zero();
        while let Some((word, c)) = pending.pop_first() {
            let redexes = (0..word.len().saturating_sub(1)).filter(|&i| {
                let (a, b) = (word[i], word[i + 1]);
                self.rank(a) > self.rank(b) || (a == b && self.odd(a))
            });
            let pos = match strategy {
                RewriteStrategy::Leftmost => redexes.min(),
                RewriteStrategy::Rightmost => redexes.max(),
            };
            let Some(i) = pos else {
                done.add_term(word, &c);
                continue;
            };
            let (a, b) = (word[i], word[i + 1]);
            let mut push = |nw: Word, x: Q| {
                if x.is_zero() {
                    return;
                }
                let e = pending.entry(nw.clone()).or_insert_with(|| Q::int(0));
                *e += &x;
                if e.is_zero() {
                    pending.remove(&nw);
                }
            };
            let splice = |mid: &[u16]| -> Word {
                let mut nw = word[..i].to_vec();
                nw.extend_from_slice(mid);
                nw.extend_from_slice(&word[i + 2..]);
                nw
            };
            if a == b {
                let half = &c * &Q::new(1, 2);
                for (k, x) in self.g.bracket_basis(a as usize, a as usize) {
                    push(splice(&[*k as u16]), x * &half);
                }
            } else {
                let sign = self
                    .g
                    .parity(a as usize)
                    .swap_sign(self.g.parity(b as usize));
                push(splice(&[b, a]), &c * &sign);
                for (k, x) in self.g.bracket_basis(a as usize, b as usize) {
                    push(splice(&[*k as u16]), x * &c);
                }
            }
        }
        done
    }

    /// All PBW monomials of degree at most `d`, by degree and then
    /// lexicographically in the order.
    pub fn monomials_up_to(&self, d: usize) -> Vec<Word> {
        let letters: Vec<u16> = self.order.permutation().iter().map(|&i| i as u16).collect();
        let mut out = vec![Vec::new()];
        let mut layer: Vec<(Word, usize)> = vec![(Vec::new(), 0)];
        for _ in 0..d {
            let mut next = Vec::new();
            for (w, start) in &layer {
                for (r, &l) in letters.iter().enumerate().skip(*start) {
                    if self.odd(l) && w.last() == Some(&l) {
                        continue;
                    }
                    let mut nw = w.clone();
                    nw.push(l);
                    next.push((nw, r));
                }
            }
            out.extend(next.iter().map(|(w, _)| w.clone()));
            layer = next;
        }
        out
    }

    /// Graded commutator `x u - (-1)^{|x||u|} u x` for homogeneous `x`.
    pub fn adjoint(&self, x: &SuperVector, u: &UEAElement) -> Result<UEAElement, PbwError> {
        let px = self.g.parity_of(x).ok_or(PbwError::NotHomogeneous)?;
        let mut out = UEAElement::zero();
        for (w, c) in u.iter() {
            let sign = px.swap_sign(self.word_parity(w));
            let m = UEAElement::monomial(w.clone(), c.clone());
            for (i, xc) in x.iter() {
                let left = self.letter_mul(i as u16, &m);
                let right = self.mul_letter(&m, i as u16);
                out.add_scaled(&left, xc);
                out.add_scaled(&right, &-(xc * &sign));
            }
        }
        Ok(out)
    }

    /// `ad(x_i)` on a single basis letter index, convenient for invariants.
    pub fn adjoint_letter(&self, i: usize, u: &UEAElement) -> UEAElement {
        self.adjoint(&self.g.basis_vector(i), u)
            .expect("basis vectors are homogeneous")
    }

    /// `Δ(x) = x⊗1 + 1⊗x`, extended multiplicatively with the Koszul rule.
    pub fn coproduct(&self, u: &UEAElement) -> TensorElement {
        let mut out = TensorElement::new();
        for (w, c) in u.iter() {
            let n = w.len();
            for mask in 0u32..(1u32 << n) {
                let mut left = Vec::new();
                let mut right = Vec::new();
                let mut sign = Q::int(1);
                let mut odd_right = 0usize;
                for (pos, &l) in w.iter().enumerate() {
                    if mask & (1 << pos) != 0 {
                        if self.odd(l) && odd_right % 2 == 1 {
                            sign = -sign;
                        }
                        left.push(l);
                    } else {
                        if self.odd(l) {
                            odd_right += 1;
                        }
                        right.push(l);
                    }
                }
                tensor_add(&mut out, (left, right), &(c * &sign));
            }
        }
        out
    }

    /// `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac⊗bd`.
    pub fn tensor_multiply(&self, s: &TensorElement, t: &TensorElement) -> TensorElement {
        let mut out = TensorElement::new();
        for ((a, b), x) in s {
            for ((c, d), y) in t {
                let sign = self.word_parity(b).swap_sign(self.word_parity(c));
                let ac = self.multiply(
                    &UEAElement::monomial(a.clone(), Q::int(1)),
                    &UEAElement::monomial(c.clone(), Q::int(1)),
                );
                let bd = self.multiply(
                    &UEAElement::monomial(b.clone(), Q::int(1)),
                    &UEAElement::monomial(d.clone(), Q::int(1)),
                );
                let coef = &(x * y) * &sign;
                for (w1, c1) in ac.iter() {
                    for (w2, c2) in bd.iter() {
                        tensor_add(&mut out, (w1.clone(), w2.clone()), &(&coef * &(c1 * c2)));
                    }
                }
            }
        }
        out
    }

    /// Antipode: `S(x) = -x` on `g`, anti-multiplicative with Koszul sign.
    pub fn antipode(&self, u: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for (w, c) in u.iter() {
            let k = w.iter().filter(|&&l| self.odd(l)).count();
            let mut sign = if w.len() % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            if (k * k.saturating_sub(1) / 2) % 2 == 1 {
                sign = -sign;
            }
            let rev: Word = w.iter().rev().copied().collect();
            out.add_scaled(&self.normal_form_word(&rev), &sign);
        }
        out
    }

    pub fn counit(&self, u: &UEAElement) -> Q {
        u.coeff(&[])
    }

    /// `μ ∘ (S ⊗ id) ∘ Δ`.
    pub fn antipode_convolution(&self, u: &UEAElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for ((a, b), c) in self.coproduct(u) {
            let sa = self.antipode(&UEAElement::monomial(a, Q::int(1)));
            out.add_scaled(&self.multiply(&sa, &UEAElement::monomial(b, Q::int(1))), &c);
        }
        out
    }

    /// Supersymmetrization `β: S(g) → U(g)`.
    pub fn supersymmetrize(&self, p: &SymElement) -> UEAElement {
        let mut out = UEAElement::zero();
        for (m, c) in p.iter() {
            out.add_scaled(&self.beta_monomial(m), c);
        }
        out
    }

    fn beta_monomial(&self, m: &[u16]) -> UEAElement {
        let n = m.len();
        if n <= 1 {
            return UEAElement::monomial(m.to_vec(), Q::int(1));
        }
        // distinct arrangements of the multiset, each weighted by prod m_i! / n!
        let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
        for &l in m {
            *counts.entry(l).or_default() += 1;
        }
        let weight = counts
            .values()
            .fold(Q::int(1), |acc, &k| acc * factorial(k as u32))
            / factorial(n as u32);
        let mut out = UEAElement::zero();
        let mut arrangement = Vec::with_capacity(n);
        self.arrangements(&mut counts, &mut arrangement, n, &mut |w: &[u16]| {
            // Koszul sign relative to the sorted symmetric monomial
            let odd: Vec<u16> = w.iter().copied().filter(|&l| self.odd(l)).collect();
            let mut inv = 0usize;
            for i in 0..odd.len() {
                for j in i + 1..odd.len() {
                    if odd[i] > odd[j] {
                        inv += 1;
                    }
                }
            }
            let s = if inv % 2 == 1 {
                -weight.clone()
            } else {
                weight.clone()
            };
            out.add_scaled(&self.normal_form_word(w), &s);
        });
        out
    }

    fn arrangements(
        &self,
        counts: &mut BTreeMap<u16, usize>,
        cur: &mut Vec<u16>,
        n: usize,
        f: &mut dyn FnMut(&[u16]),
    ) {
        if cur.len() == n {
            f(cur);
            return;
        }
        let keys: Vec<u16> = counts
            .iter()
            .filter(|(_, &k)| k > 0)
            .map(|(l, _)| *l)
            .collect();
        for l in keys {
            *counts.get_mut(&l).unwrap() -= 1;
            cur.push(l);
            self.arrangements(counts, cur, n, f);
            cur.pop();
            *counts.get_mut(&l).unwrap() += 1;
        }
    }

    /// Image in `gr_d U(g) = S^d(g)` of the degree-`d` part of `u`.
    pub fn symbol(&self, u: &UEAElement, d: usize) -> SymElement {
        let mut out = SymElement::zero();
        for (w, c) in u.iter().filter(|(w, _)| w.len() == d) {
            out = out.add(&SymElement::from_word(&self.g, w).scale(c));
        }
        out
    }
}

/// Element of the supersymmetric algebra `S(g)`. Monomials are stored with
/// indices in increasing order; odd indices appear at most once.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymElement {
    terms: BTreeMap<Word, Q>,
}

impl SymElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Q::int(1))
    }

    pub fn constant(c: Q) -> Self {
        let mut s = Self::zero();
        s.add_term(Vec::new(), &c);
        s
    }

    pub fn generator(i: usize) -> Self {
        let mut s = Self::zero();
        s.add_term(vec![i as u16], &Q::int(1));
        s
    }

    pub fn from_vector(v: &SuperVector) -> Self {
        let mut s = Self::zero();
        for (i, c) in v.iter() {
            s.add_term(vec![i as u16], c);
        }
        s
    }

    /// Graded-commutative product of generators in the given order.
    pub fn from_word(g: &LieSuperalgebra, w: &[u16]) -> Self {
        let mut s = Self::one();
        for &l in w {
            s = s.mul(g, &Self::generator(l as usize));
        }
        s
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, w: &[u16]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(|| Q::int(0))
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|w| w.len()).max()
    }

    fn add_term(&mut self, w: Word, c: &Q) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(|| Q::int(0));
        *e += c;
        if e.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add(&self, other: &SymElement) -> SymElement {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &SymElement) -> SymElement {
        self.add(&other.scale(&Q::int(-1)))
    }

    pub fn scale(&self, s: &Q) -> SymElement {
        let mut out = SymElement::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &(c * s));
        }
        out
    }

    pub fn mul(&self, g: &LieSuperalgebra, other: &SymElement) -> SymElement {
        let mut out = SymElement::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((w, sign)) = merge_graded(g, a, b) {
                    out.add_term(w, &(&(x * y) * &sign));
                }
            }
        }
        out
    }

    pub fn pow(&self, g: &LieSuperalgebra, k: u32) -> SymElement {
        (0..k).fold(SymElement::one(), |acc, _| acc.mul(g, self))
    }

    /// Substitute each generator `x_i` by the image `images[i]` (an even
    /// linear map, so parities must be respected by the caller).
    pub fn substitute(&self, g: &LieSuperalgebra, images: &[SymElement]) -> SymElement {
        let mut out = SymElement::zero();
        for (w, c) in &self.terms {
            let mut acc = SymElement::constant(c.clone());
            for &l in w {
                acc = acc.mul(g, &images[l as usize]);
            }
            out = out.add(&acc);
        }
        out
    }
}

/// Adjoint action of the basis element `x_i` on `S(g)`, extended as a graded
/// derivation.
pub fn sym_adjoint(g: &LieSuperalgebra, i: usize, p: &SymElement) -> SymElement {
    let px = g.parity(i);
    let mut out = SymElement::zero();
    for (w, c) in p.iter() {
        let mut odd_before = 0usize;
        for t in 0..w.len() {
            let sign = if px.is_odd() && odd_before % 2 == 1 {
                -c.clone()
            } else {
                c.clone()
            };
            for (k, x) in g.bracket_basis(i, w[t] as usize) {
                let mut nw: Word = w[..t].to_vec();
                nw.push(*k as u16);
                nw.extend_from_slice(&w[t + 1..]);
                out = out.add(&SymElement::from_word(g, &nw).scale(&(x * &sign)));
            }
            if g.parity(w[t] as usize).is_odd() {
                odd_before += 1;
            }
        }
    }
    out
}

/// Merge two sorted monomials with the Koszul sign of sorting; `None` if an
/// odd generator repeats.
fn merge_graded(g: &LieSuperalgebra, a: &[u16], b: &[u16]) -> Option<(Word, Q)> {
    let mut w: Word = Vec::with_capacity(a.len() + b.len());
    let mut sign_odd = 0usize;
    let (mut i, mut j) = (0, 0);
    // number of odd letters of `a` not yet emitted
    let mut odd_left_in_a = a.iter().filter(|&&l| g.parity(l as usize).is_odd()).count();
    while i < a.len() || j < b.len() {
        let take_b = j < b.len() && (i >= a.len() || b[j] < a[i]);
        if take_b {
            if g.parity(b[j] as usize).is_odd() {
                sign_odd += odd_left_in_a;
            }
            w.push(b[j]);
            j += 1;
        } else {
            if g.parity(a[i] as usize).is_odd() {
                odd_left_in_a -= 1;
            }
            w.push(a[i]);
            i += 1;
        }
    }
    if w.windows(2)
        .any(|p| p[0] == p[1] && g.parity(p[0] as usize).is_odd())
    {
        return None;
    }
    Some((
        w,
        if sign_odd % 2 == 1 {
            Q::int(-1)
        } else {
            Q::int(1)
        },
    ))
}

/// `dim F_d U(g)` from the graded dimension of `S(g)`.
pub fn filtered_pbw_dimension(even: usize, odd: usize, d: usize) -> u128 {
    let binom = |n: u128, k: u128| -> u128 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
    };
    let mut total = 0u128;
    for k in 0..=d as u128 {
        for j in 0..=k.min(odd as u128) {
            let e = k - j;
            let even_count = if even == 0 {
                u128::from(e == 0)
            } else {
                binom(even as u128 + e - 1, e)
            };
            total += even_count * binom(odd as u128, j);
        }
    }
    total
}
