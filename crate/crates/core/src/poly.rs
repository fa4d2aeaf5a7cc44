//! Sparse multivariate polynomials over the integers and over GF(p).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::PrimeModulus;
use crate::monomial::{monomials_of_degree, Monomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("cannot reduce modulo the zero polynomial")]
    ZeroRelation,
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("relation is not homogeneous")]
    NotHomogeneous,
}

/// Polynomial with arbitrary-precision integer coefficients.
///
/// Terms are keyed by monomial in graded reverse lexicographic order; no
/// zero coefficient is ever stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPoly {
    pub fn zero(vars: &[String]) -> Self {
        Self {
            vars: vars.to_vec(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[String], c: impl Into<BigInt>) -> Self {
        Self::monomial(vars, Monomial::one(vars.len()), c)
    }

    pub fn monomial(vars: &[String], mono: Monomial, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(mono, c.into());
        p
    }

    pub fn from_terms(vars: &[String], terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &Monomial) -> BigInt {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    pub fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono);
        match slot {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(&self.vars, 1);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var] -= 1;
            out.add_term(Monomial::new(exps), c * BigInt::from(e));
        }
        out
    }

    /// Reduces every coefficient modulo `p`, dropping the ones that vanish.
    pub fn reduce_mod_p(&self, p: PrimeModulus) -> ModPoly {
        let modulus = BigInt::from(p.get());
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let r = c.mod_floor(&modulus).to_u64().expect("residue fits in u64");
            (r != 0).then(|| (m.clone(), r))
        });
        ModPoly {
            vars: self.vars.clone(),
            modulus: p,
            terms: terms.collect(),
        }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            &self.vars,
            self.terms.iter().rev().map(|(m, c)| (m, c.is_negative(), c.abs())),
        )
    }
}

fn write_terms<C: fmt::Display + One + PartialEq>(
    f: &mut fmt::Formatter<'_>,
    vars: &[String],
    terms: impl Iterator<Item = (impl std::borrow::Borrow<Monomial>, bool, C)>,
) -> fmt::Result {
    let mut first = true;
    for (m, negative, abs) in terms {
        let m = m.borrow();
        match (first, negative) {
            (true, true) => f.write_str("-")?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        first = false;
        if m.is_one() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            write!(f, "{}", m.display(vars))?;
        } else {
            write!(f, "{abs}*{}", m.display(vars))?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// Polynomial with coefficients in GF(p), stored as least nonnegative residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    vars: Vec<String>,
    modulus: PrimeModulus,
    terms: BTreeMap<Monomial, u64>,
}

impl ModPoly {
    pub fn zero(vars: &[String], modulus: PrimeModulus) -> Self {
        Self {
            vars: vars.to_vec(),
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(vars: &[String], modulus: PrimeModulus, mono: Monomial, c: u64) -> Self {
        let mut p = Self::zero(vars, modulus);
        p.add_term(mono, c);
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, mono: &Monomial) -> u64 {
        self.terms.get(mono).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Largest term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn add_term(&mut self, mono: Monomial, c: u64) {
        let p = self.modulus;
        let c = p.reduce(c);
        if c == 0 {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = p.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if self.modulus == other.modulus && self.vars.len() == other.vars.len() {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.modulus;
        let c = p.reduce(c);
        let terms = if c == 0 {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(m, &a)| (m.clone(), p.mul(a, c))).collect()
        };
        Self {
            vars: self.vars.clone(),
            modulus: p,
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.scale(self.modulus.get() - 1))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let p = self.modulus;
        let mut out = Self::zero(&self.vars, p);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), p.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: u64) -> Self {
        let p = self.modulus;
        let c = p.reduce(c);
        let terms = if c == 0 {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(m, &a)| (m.mul(mono), p.mul(a, c))).collect()
        };
        Self {
            vars: self.vars.clone(),
            modulus: p,
            terms,
        }
    }

    /// Repeated multiplication; no Frobenius shortcut.
    pub fn pow(&self, k: u64) -> Self {
        let mut acc = Self::monomial(&self.vars, self.modulus, Monomial::one(self.nvars()), 1);
        for _ in 0..k {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// `self^q` for `q` a power of the characteristic: `(sum c m)^q = sum c m^q`.
    pub fn frobenius_power(&self, q: u64) -> Self {
        let k = u32::try_from(q).expect("Frobenius exponent fits in u32");
        let terms = self.terms.iter().map(|(m, &c)| (m.pow(k), c)).collect();
        Self {
            vars: self.vars.clone(),
            modulus: self.modulus,
            terms,
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(&self.vars, self.modulus);
        for (m, &c) in &self.terms {
            let e = m.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var] -= 1;
            out.add_term(Monomial::new(exps), self.modulus.mul(c, u64::from(e)));
        }
        out
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Result<Self, PolyError> {
        let (_, lc) = self.leading_term().ok_or(PolyError::ZeroRelation)?;
        let inv = self.modulus.inverse(lc).expect("nonzero residue");
        Ok(self.scale(inv))
    }
}

impl fmt::Display for ModPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.vars, self.terms.iter().rev().map(|(m, &c)| (m, false, c)))
    }
}

/// Result of reducing integer coefficients modulo a prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientReduction {
    pub poly: ModPoly,
    /// Total degree fell (or the polynomial vanished).
    pub degree_dropped: bool,
    pub terms_dropped: usize,
}

pub fn reduce_coeffs_mod_p(f: &IntPoly, p: PrimeModulus) -> CoefficientReduction {
    let poly = f.reduce_mod_p(p);
    let degree_dropped = match (f.total_degree(), poly.total_degree()) {
        (Some(before), Some(after)) => after < before,
        (Some(_), None) => true,
        (None, _) => false,
    };
    CoefficientReduction {
        terms_dropped: f.num_terms() - poly.num_terms(),
        degree_dropped,
        poly,
    }
}

/// Remainder of `g` on division by the single polynomial `f`.
///
/// A principal ideal's generator is a Gröbner basis, so the remainder is a
/// canonical representative of `g` modulo `(f)`.
pub fn normal_form(g: &ModPoly, f: &ModPoly) -> Result<ModPoly, PolyError> {
    g.check_ring(f)?;
    let f = f.monic()?;
    let (lead, _) = f.leading_term().expect("nonzero");
    let lead = lead.clone();
    let tail: Vec<(Monomial, u64)> = f
        .terms()
        .rev()
        .skip(1)
        .map(|(m, &c)| (m.clone(), c))
        .collect();
    let p = g.modulus;
    let mut work = g.terms.clone();
    let mut done = BTreeMap::new();
    while let Some((m, c)) = work.pop_last() {
        match m.div(&lead) {
            Some(u) => {
                let neg = p.neg(c);
                for (t, tc) in &tail {
                    let key = u.mul(t);
                    let v = p.add(work.get(&key).copied().unwrap_or(0), p.mul(neg, *tc));
                    if v == 0 {
                        work.remove(&key);
                    } else {
                        work.insert(key, v);
                    }
                }
            }
            None => {
                done.insert(m, c);
            }
        }
    }
    Ok(ModPoly {
        vars: g.vars.clone(),
        modulus: p,
        terms: done,
    })
}

/// Degree-`n` monomials not divisible by the leading monomial of `f`, largest first.
pub fn std_monomials(f: &ModPoly, n: u32) -> Result<Vec<Monomial>, PolyError> {
    let (lead, _) = f.leading_term().ok_or(PolyError::ZeroRelation)?;
    if !f.is_homogeneous() {
        return Err(PolyError::NotHomogeneous);
    }
    Ok(monomials_of_degree(f.nvars(), n)
        .into_iter()
        .filter(|m| !lead.divides(m))
        .collect())
}
