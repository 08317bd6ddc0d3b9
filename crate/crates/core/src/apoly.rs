//! Polynomials on `a*`, i.e. elements of `S(a)` in the coordinates of a fixed
//! basis of `a`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scalar::{Field, Q};

pub type Exponent = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct APolynomial {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl APolynomial {
    pub fn zero(nvars: usize) -> Self {
        APolynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], &c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::int(1))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, &Q::int(1));
        p
    }

    /// The linear polynomial `Σ c_i x_i`.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c);
        }
        p
    }

    pub fn monomial(exp: Exponent, c: Q) -> Self {
        let mut p = Self::zero(exp.len());
        p.add_term(exp, &c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(|| Q::int(0))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn add_term(&mut self, e: Exponent, c: &Q) {
        assert_eq!(e.len(), self.nvars, "exponent length");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(|| Q::int(0));
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &APolynomial) -> APolynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &APolynomial) -> APolynomial {
        self.add(&other.scale(&Q::int(-1)))
    }

    pub fn scale(&self, s: &Q) -> APolynomial {
        let mut out = APolynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), &(c * s));
        }
        out
    }

    pub fn mul(&self, other: &APolynomial) -> APolynomial {
        assert_eq!(self.nvars, other.nvars);
        let mut out = APolynomial::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, &(c1 * c2));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> APolynomial {
        (0..k).fold(APolynomial::one(self.nvars), |acc, _| acc.mul(self))
    }

    /// Value at the point `x`.
    pub fn eval(&self, x: &[Q]) -> Q {
        let mut acc = Q::int(0);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t = t * xi.pow(k);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Replace each variable `x_i` by `images[i]`.
    pub fn substitute(&self, images: &[APolynomial]) -> APolynomial {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map_or(0, |p| p.nvars);
        let mut out = APolynomial::zero(target);
        let mut powers: BTreeMap<(usize, u32), APolynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut t = APolynomial::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pk = powers
                    .entry((i, k))
                    .or_insert_with(|| images[i].pow(k))
                    .clone();
                t = t.mul(&pk);
            }
            out = out.add(&t);
        }
        out
    }

    /// `p(x + s)`: translate the argument by the point `s`.
    pub fn shift(&self, s: &[Q]) -> APolynomial {
        let images: Vec<APolynomial> = (0..self.nvars)
            .map(|i| {
                APolynomial::var(self.nvars, i)
                    .add(&APolynomial::constant(self.nvars, s[i].clone()))
            })
            .collect();
        self.substitute(&images)
    }

    pub fn partial(&self, i: usize) -> APolynomial {
        let mut out = APolynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, &(c * &Q::int(e[i] as i64)));
            }
        }
        out
    }

    /// Directional derivative `Σ v_i ∂_i`.
    pub fn directional(&self, v: &[Q]) -> APolynomial {
        let mut out = APolynomial::zero(self.nvars);
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                out = out.add(&self.partial(i).scale(vi));
            }
        }
        out
    }

    pub fn homogeneous_part(&self, d: u32) -> APolynomial {
        let mut out = APolynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            if e.iter().sum::<u32>() == d {
                out.add_term(e.clone(), c);
            }
        }
        out
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (idx, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.signum() < 0;
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], k)
                    }
                })
                .collect();
            if vars.is_empty() {
                let _ = write!(s, "{abs}");
            } else {
                if abs != Q::int(1) {
                    let _ = write!(s, "{abs}*");
                }
                s.push_str(&vars.join("*"));
            }
        }
        s
    }

    pub fn to_json(&self, names: &[String]) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(e, c)| PolyTerm {
                exp: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (names[i].clone(), k))
                    .collect(),
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn from_json(terms: &[PolyTerm], names: &[String]) -> Result<APolynomial, String> {
        let mut p = APolynomial::zero(names.len());
        for t in terms {
            let mut e = vec![0; names.len()];
            for (name, k) in &t.exp {
                let i = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| format!("unknown variable {name}"))?;
                e[i] += k;
            }
            p.add_term(e, &t.coeff);
        }
        Ok(p)
    }
}

/// JSON term `{"exp": {"a": 2}, "coeff": "1/2"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub exp: BTreeMap<String, u32>,
    pub coeff: Q,
}

/// All exponent vectors in `n` variables of total degree at most `d`, by
/// degree.
pub fn exponents_up_to(n: usize, d: u32) -> Vec<Exponent> {
    let mut out = Vec::new();
    for deg in 0..=d {
        let mut cur = vec![0u32; n];
        fill(&mut out, &mut cur, 0, deg);
    }
    out
}

fn fill(out: &mut Vec<Exponent>, cur: &mut Vec<u32>, i: usize, left: u32) {
    let n = cur.len();
    if n == 0 {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == n - 1 {
        cur[i] = left;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for k in (0..=left).rev() {
        cur[i] = k;
        fill(out, cur, i + 1, left - k);
    }
    cur[i] = 0;
}
