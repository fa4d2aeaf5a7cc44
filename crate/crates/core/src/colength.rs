//! Colengths of Frobenius powers in `R = k[x_1..x_r]/(f)` over GF(p).
//!
//! The main path works degree by degree in the standard-monomial basis of
//! `R`: the degree-`n` piece of `I^[q]` is spanned by normal forms of
//! `m * g_j^q`, and the colength is the sum of the codimensions. Rows for
//! degree `n + 1` are obtained from those of degree `n` by multiplying by a
//! single variable, so no high-degree polynomial is ever reduced directly.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::field::{eliminate, MatrixModP, PrimeModulus};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::{IntPoly, ModPoly, PolyError};

/// Largest `dim S_n` the brute-force oracle will scan.
pub const ORACLE_DIM_GUARD: usize = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColengthError {
    #[error("colength not finite: no vanishing graded piece up to degree {cap}")]
    NotFinite { cap: u32 },
    #[error("oracle guard exceeded: dim S_{degree} = {dim} > {ORACLE_DIM_GUARD}")]
    GuardExceeded { degree: u32, dim: usize },
    #[error("{0} is not a power of the characteristic {1}")]
    NotFrobeniusPower(u64, u64),
    #[error("generators must be nonzero homogeneous polynomials")]
    BadGenerator,
    #[error("relation must be a nonzero homogeneous polynomial")]
    BadRelation,
    #[error("expected a plane curve in 3 variables, got {0} variables")]
    NotPlaneCurve(usize),
    #[error("curve vanishes modulo {0}")]
    VanishesModP(u64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

type SparseVec = Vec<(u32, u64)>;

/// `k[x_1..x_r]/(f)` for a homogeneous `f`, with `f` made monic.
#[derive(Debug, Clone)]
pub struct GradedQuotient {
    relation: ModPoly,
    lead: Monomial,
    tail: Vec<(Monomial, u64)>,
    degree: u32,
}

impl GradedQuotient {
    pub fn new(f: &ModPoly) -> Result<Self, ColengthError> {
        if f.is_zero() || !f.is_homogeneous() {
            return Err(ColengthError::BadRelation);
        }
        let relation = f.monic()?;
        let (lead, _) = relation.leading_term().expect("nonzero");
        let lead = lead.clone();
        let tail = relation
            .terms()
            .rev()
            .skip(1)
            .map(|(m, &c)| (m.clone(), c))
            .collect();
        let degree = lead.degree();
        Ok(Self {
            relation,
            lead,
            tail,
            degree,
        })
    }

    pub fn relation(&self) -> &ModPoly {
        &self.relation
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn nvars(&self) -> usize {
        self.relation.nvars()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.relation.modulus()
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        !self.lead.divides(m)
    }

    /// Normal form of a single monomial as (standard monomial, coefficient) pairs.
    fn reduce_monomial(&self, start: Monomial) -> Vec<(Monomial, u64)> {
        let p = self.modulus();
        let mut work = BTreeMap::from([(start, 1u64)]);
        let mut done = Vec::new();
        while let Some((m, c)) = work.pop_last() {
            match m.div(&self.lead) {
                Some(u) => {
                    let neg = p.neg(c);
                    for (t, tc) in &self.tail {
                        let key = u.mul(t);
                        let slot = work.entry(key).or_insert(0);
                        *slot = p.add(*slot, p.mul(neg, *tc));
                    }
                    work.retain(|_, v| *v != 0);
                }
                None => done.push((m, c)),
            }
        }
        done
    }
}

/// `(g_1^q, ..., g_k^q)` for `q` a power of the characteristic.
#[derive(Debug, Clone)]
pub struct FrobeniusPowerIdeal {
    generators: Vec<ModPoly>,
    q: u64,
}

impl FrobeniusPowerIdeal {
    pub fn new(generators: Vec<ModPoly>, q: u64) -> Result<Self, ColengthError> {
        let Some(first) = generators.first() else {
            return Err(ColengthError::BadGenerator);
        };
        let p = first.modulus().get();
        if !is_power_of(q, p) {
            return Err(ColengthError::NotFrobeniusPower(q, p));
        }
        for g in &generators {
            if g.is_zero() || !g.is_homogeneous() {
                return Err(ColengthError::BadGenerator);
            }
            if g.modulus() != first.modulus() || g.nvars() != first.nvars() {
                return Err(PolyError::RingMismatch.into());
            }
        }
        Ok(Self { generators, q })
    }

    /// The ideal generated by all variables.
    pub fn maximal(vars: &[String], modulus: PrimeModulus, q: u64) -> Result<Self, ColengthError> {
        let gens = (0..vars.len())
            .map(|i| ModPoly::monomial(vars, modulus, Monomial::var(vars.len(), i), 1))
            .collect();
        Self::new(gens, q)
    }

    pub fn generators(&self) -> &[ModPoly] {
        &self.generators
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn generator_degrees(&self) -> Vec<u32> {
        self.generators
            .iter()
            .map(|g| g.total_degree().expect("nonzero"))
            .collect()
    }

    /// Degrees beyond which a finite-colength quotient must have vanished.
    pub fn safety_cap(&self, relation_degree: u32) -> u32 {
        let total: u64 = self.generator_degrees().iter().map(|&d| u64::from(d)).sum();
        u32::try_from(self.q * total + u64::from(relation_degree)).expect("degree cap fits in u32")
    }
}

fn is_power_of(mut q: u64, p: u64) -> bool {
    if q == 0 {
        return false;
    }
    while q.is_multiple_of(p) {
        q /= p;
    }
    q == 1
}

/// Standard-monomial basis of one graded piece, with the action of each
/// variable into the next piece (filled once that piece exists).
struct Piece {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    times_var: Vec<Vec<SparseVec>>,
}

struct QuotientBasis<'a> {
    ring: &'a GradedQuotient,
    pieces: Vec<Piece>,
}

impl<'a> QuotientBasis<'a> {
    fn new(ring: &'a GradedQuotient) -> Self {
        let one = Monomial::one(ring.nvars());
        let mut basis = Self {
            ring,
            pieces: Vec::new(),
        };
        let monomials = if ring.is_standard(&one) { vec![one] } else { Vec::new() };
        basis.pieces.push(Self::piece(monomials));
        basis
    }

    fn piece(monomials: Vec<Monomial>) -> Piece {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i as u32))
            .collect();
        Piece {
            monomials,
            index,
            times_var: Vec::new(),
        }
    }

    fn top(&self) -> u32 {
        self.pieces.len() as u32 - 1
    }

    /// Ensures pieces `0..=n` exist.
    fn extend_to(&mut self, n: u32) {
        while self.top() < n {
            self.push_next();
        }
    }

    fn push_next(&mut self) {
        let nvars = self.ring.nvars();
        let current = self.pieces.last().expect("degree 0 exists");
        // Every standard monomial of degree n+1 is a variable times one of degree n.
        let mut next: Vec<Monomial> = current
            .monomials
            .iter()
            .flat_map(|m| (0..nvars).map(move |v| m.mul_var(v)))
            .filter(|m| self.ring.is_standard(m))
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        next.sort_unstable_by(|a, b| b.cmp(a));
        let next = Self::piece(next);

        let times_var = current
            .monomials
            .iter()
            .map(|m| {
                (0..nvars)
                    .map(|v| {
                        let product = m.mul_var(v);
                        if let Some(&i) = next.index.get(&product) {
                            return vec![(i, 1)];
                        }
                        let mut vec: SparseVec = self
                            .ring
                            .reduce_monomial(product)
                            .into_iter()
                            .map(|(mono, c)| (next.index[&mono], c))
                            .collect();
                        vec.sort_unstable();
                        vec
                    })
                    .collect()
            })
            .collect();
        self.pieces.last_mut().expect("exists").times_var = times_var;
        self.pieces.push(next);
    }

    fn dim(&self, n: u32) -> usize {
        self.pieces[n as usize].monomials.len()
    }

    /// `x_var * v` for `v` in degree `n`; requires piece `n + 1`.
    fn times_var(&self, v: &[(u32, u64)], n: u32, var: usize, scratch: &mut Vec<u64>) -> SparseVec {
        let p = self.ring.modulus();
        let piece = &self.pieces[n as usize];
        scratch.clear();
        scratch.resize(self.dim(n + 1), 0);
        let mut touched = Vec::new();
        for &(i, c) in v {
            for &(j, t) in &piece.times_var[i as usize][var] {
                let slot = &mut scratch[j as usize];
                if *slot == 0 {
                    touched.push(j);
                }
                *slot = p.add(*slot, p.mul(c, t));
            }
        }
        // a slot can cancel to zero and be touched again
        touched.sort_unstable();
        touched.dedup();
        touched
            .into_iter()
            .filter_map(|j| {
                let c = scratch[j as usize];
                (c != 0).then_some((j, c))
            })
            .collect()
    }

    /// Normal form of a monomial of degree `<= top()`, walked up from 1.
    fn monomial_vector(&self, m: &Monomial, scratch: &mut Vec<u64>) -> SparseVec {
        let mut vec: SparseVec = if self.dim(0) == 1 { vec![(0, 1)] } else { Vec::new() };
        let mut deg = 0;
        for (var, &e) in m.exponents().iter().enumerate() {
            for _ in 0..e {
                vec = self.times_var(&vec, deg, var, scratch);
                deg += 1;
            }
        }
        vec
    }
}

/// Rows `m * g^q` for standard `m`, tracked as the scan climbs in degree.
struct GeneratorTrack {
    start: u32,
    frobenius: ModPoly,
    rows: Vec<SparseVec>,
}

/// Spanning rows of `(I^[q])_n` in the standard basis of `R_n`.
struct DegreeRows {
    degree: u32,
    dim: usize,
    rows: Vec<SparseVec>,
}

/// Walks the degrees of `R/I^[q]` in order, producing spanning sets.
struct ColengthScan<'a> {
    basis: QuotientBasis<'a>,
    tracks: Vec<GeneratorTrack>,
    next_degree: u32,
    scratch: Vec<u64>,
}

impl<'a> ColengthScan<'a> {
    fn new(ring: &'a GradedQuotient, ideal: &FrobeniusPowerIdeal) -> Result<Self, ColengthError> {
        for g in ideal.generators() {
            if g.modulus() != ring.modulus() || g.nvars() != ring.nvars() {
                return Err(PolyError::RingMismatch.into());
            }
        }
        let tracks = ideal
            .generators()
            .iter()
            .map(|g| {
                let frobenius = g.frobenius_power(ideal.q());
                GeneratorTrack {
                    start: frobenius.total_degree().expect("nonzero"),
                    frobenius,
                    rows: Vec::new(),
                }
            })
            .collect();
        Ok(Self {
            basis: QuotientBasis::new(ring),
            tracks,
            next_degree: 0,
            scratch: Vec::new(),
        })
    }

    fn advance(&mut self) -> DegreeRows {
        let n = self.next_degree;
        self.next_degree += 1;
        self.basis.extend_to(n);
        let basis = &self.basis;
        let scratch = &mut self.scratch;
        let p = basis.ring.modulus();
        let mut rows = Vec::new();
        for track in &mut self.tracks {
            if n < track.start {
                continue;
            }
            if n == track.start {
                let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
                for (m, &c) in track.frobenius.terms() {
                    for (i, v) in basis.monomial_vector(m, scratch) {
                        let slot = acc.entry(i).or_insert(0);
                        *slot = p.add(*slot, p.mul(c, v));
                    }
                }
                track.rows = vec![acc.into_iter().filter(|&(_, c)| c != 0).collect()];
            } else {
                let k = n - 1 - track.start;
                let parents = &basis.pieces[k as usize];
                let children = &basis.pieces[k as usize + 1].monomials;
                track.rows = children
                    .iter()
                    .map(|child| {
                        let var = child.first_var().expect("positive degree");
                        let parent = child.div(&Monomial::var(child.nvars(), var)).expect("divisible");
                        let row = &track.rows[parents.index[&parent] as usize];
                        basis.times_var(row, n - 1, var, scratch)
                    })
                    .collect();
            }
            rows.extend(track.rows.iter().filter(|r| !r.is_empty()).cloned());
        }
        DegreeRows {
            degree: n,
            dim: basis.dim(n),
            rows,
        }
    }
}

/// Codimension of the span of `rows` in a space of dimension `dim`.
///
/// Rows with a single surviving entry pin their column; those columns are
/// peeled off repeatedly before dense elimination of what remains.
fn codimension(rows: &[SparseVec], dim: usize, p: PrimeModulus) -> usize {
    let mut pinned = vec![false; dim];
    let mut pinned_count = 0;
    let mut live: Vec<&SparseVec> = rows.iter().collect();
    loop {
        let mut progress = false;
        live.retain(|row| {
            let mut free = row.iter().filter(|(c, _)| !pinned[*c as usize]);
            match (free.next(), free.next()) {
                (None, _) => false,
                (Some(&(c, _)), None) => {
                    pinned[c as usize] = true;
                    pinned_count += 1;
                    progress = true;
                    false
                }
                _ => true,
            }
        });
        if !progress {
            break;
        }
    }
    let mut column = vec![u32::MAX; dim];
    let mut cols = 0;
    for (c, slot) in column.iter_mut().enumerate() {
        if !pinned[c] {
            *slot = cols;
            cols += 1;
        }
    }
    let cols = cols as usize;
    let mut data = vec![0u64; live.len() * cols];
    for (r, row) in live.iter().enumerate() {
        for &(c, v) in row.iter() {
            let j = column[c as usize];
            if j != u32::MAX {
                data[r * cols + j as usize] = v;
            }
        }
    }
    let rank = pinned_count + eliminate(&mut data, live.len(), cols, p);
    dim - rank
}

fn dimension_of(rows: &DegreeRows, p: PrimeModulus) -> u64 {
    codimension(&rows.rows, rows.dim, p) as u64
}

/// `dim (R/I^[q])_n`.
pub fn graded_piece_dim(
    ring: &GradedQuotient,
    ideal: &FrobeniusPowerIdeal,
    n: u32,
) -> Result<u64, ColengthError> {
    let mut scan = ColengthScan::new(ring, ideal)?;
    loop {
        let rows = scan.advance();
        if rows.degree == n {
            return Ok(dimension_of(&rows, ring.modulus()));
        }
    }
}

/// Hilbert function of `R/I^[q]` from degree 0 through the first vanishing piece.
pub fn hilbert_function(
    ring: &GradedQuotient,
    ideal: &FrobeniusPowerIdeal,
) -> Result<Vec<u64>, ColengthError> {
    let cap = ideal.safety_cap(ring.degree());
    let mut scan = ColengthScan::new(ring, ideal)?;
    let batch = rayon::current_num_threads().max(1);
    let mut dims = Vec::new();
    loop {
        let mut jobs = Vec::with_capacity(batch);
        while jobs.len() < batch && scan.next_degree <= cap {
            jobs.push(scan.advance());
        }
        if jobs.is_empty() {
            return Err(ColengthError::NotFinite { cap });
        }
        let p = ring.modulus();
        let batch_dims: Vec<u64> = jobs.par_iter().map(|rows| dimension_of(rows, p)).collect();
        for d in batch_dims {
            dims.push(d);
            if d == 0 {
                return Ok(dims);
            }
        }
    }
}

/// `l(R/I^[q])`. Sums graded pieces until the first zero one, which is final
/// because `R` is generated in degree 1.
pub fn colength_frobenius(
    ring: &GradedQuotient,
    ideal: &FrobeniusPowerIdeal,
) -> Result<u64, ColengthError> {
    Ok(hilbert_function(ring, ideal)?.iter().sum())
}

/// Colength of `k[x_1..x_r]/(relations)` computed in the full monomial basis.
///
/// Returns `Ok(None)` if no graded piece up to `cap` vanishes.
fn ambient_colength(relations: &[ModPoly], cap: u32) -> Result<Option<u64>, ColengthError> {
    let first = relations.first().ok_or(ColengthError::BadGenerator)?;
    let (nvars, p, vars) = (first.nvars(), first.modulus(), first.vars().to_vec());
    let mut total = 0;
    for n in 0..=cap {
        let basis = monomials_of_degree(nvars, n);
        if basis.len() > ORACLE_DIM_GUARD {
            return Err(ColengthError::GuardExceeded {
                degree: n,
                dim: basis.len(),
            });
        }
        let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut m = MatrixModP::zeros(0, basis.len(), p);
        let mut row = vec![0u64; basis.len()];
        for rel in relations {
            let d = rel.total_degree().expect("nonzero relation");
            if d > n {
                continue;
            }
            for shift in monomials_of_degree(nvars, n - d) {
                row.iter_mut().for_each(|v| *v = 0);
                let product = rel.mul(&ModPoly::monomial(&vars, p, shift, 1))?;
                for (mono, &c) in product.terms() {
                    row[index[mono]] = c;
                }
                m.push_row(&row).expect("row width matches");
            }
        }
        let dim = basis.len() - m.into_rank();
        if dim == 0 {
            return Ok(Some(total));
        }
        total += dim as u64;
    }
    Ok(None)
}

/// Independent check of [`colength_frobenius`]: works in the full polynomial
/// ring, spans `f * S_{n-d}` together with `g_j^q * S_{n - q d_j}`, and
/// raises the generators to the `q`-th power by repeated multiplication.
pub fn brute_colength_oracle(f: &ModPoly, gens: &[ModPoly], q: u64) -> Result<u64, ColengthError> {
    if f.is_zero() || !f.is_homogeneous() {
        return Err(ColengthError::BadRelation);
    }
    let ideal = FrobeniusPowerIdeal::new(gens.to_vec(), q)?;
    let cap = ideal.safety_cap(f.total_degree().expect("nonzero"));
    let mut relations = vec![f.clone()];
    relations.extend(gens.iter().map(|g| g.pow(q)));
    ambient_colength(&relations, cap)?.ok_or(ColengthError::NotFinite { cap })
}

/// Whether `f` defines a smooth plane curve over the algebraic closure of GF(p):
/// `(f, f_x, f_y, f_z)` must have finite colength. `f` itself is always kept
/// because Euler's relation fails when `p` divides the degree.
pub fn is_smooth_plane_curve(f: &IntPoly, p: PrimeModulus) -> Result<bool, ColengthError> {
    if f.nvars() != 3 {
        return Err(ColengthError::NotPlaneCurve(f.nvars()));
    }
    if !f.is_homogeneous() {
        return Err(ColengthError::BadRelation);
    }
    let reduced = f.reduce_mod_p(p);
    if reduced.is_zero() {
        return Err(ColengthError::VanishesModP(p.get()));
    }
    let mut gens = vec![reduced.clone()];
    gens.extend((0..3).map(|v| reduced.derivative(v)).filter(|g| !g.is_zero()));
    let cap: u32 = gens.iter().map(|g| g.total_degree().expect("nonzero")).sum::<u32>()
        + reduced.total_degree().expect("nonzero");
    Ok(ambient_colength(&gens, cap)?.is_some())
}
