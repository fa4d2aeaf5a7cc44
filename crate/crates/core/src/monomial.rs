use std::cmp::Ordering;
use std::fmt;

/// Exponent vector. Ordered by graded reverse lexicographic order with the
/// first variable largest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn new(exponents: impl Into<Box<[u32]>>) -> Self {
        Self(exponents.into())
    }

    pub fn one(nvars: usize) -> Self {
        Self(vec![0; nvars].into())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self(e.into())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn mul_var(&self, var: usize) -> Self {
        let mut e = self.0.clone();
        e[var] += 1;
        Self(e)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Box<[u32]>>>()
            .map(Self)
    }

    pub fn pow(&self, k: u32) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    /// Index of the first variable with a positive exponent.
    pub fn first_var(&self) -> Option<usize> {
        self.0.iter().position(|&a| a > 0)
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        MonomialDisplay { mono: self, names }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()).rev() {
                if a != b {
                    // smaller power of the last differing variable wins
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct MonomialDisplay<'a> {
    mono: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, &e) in self.names.iter().zip(self.mono.exponents()) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(name)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// All monomials of total degree `n` in `nvars` variables, largest first.
pub fn monomials_of_degree(nvars: usize, n: u32) -> Vec<Monomial> {
    fn fill(prefix: &mut Vec<u32>, left: u32, slots: usize, out: &mut Vec<Monomial>) {
        if slots == 1 {
            prefix.push(left);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for a in (0..=left).rev() {
            prefix.push(a);
            fill(prefix, left - a, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if n == 0 {
            out.push(Monomial::one(0));
        }
        return out;
    }
    fill(&mut Vec::with_capacity(nvars), n, nvars, &mut out);
    out.sort_unstable_by(|a, b| b.cmp(a));
    out
}

/// Number of monomials of degree `n` in `nvars` variables.
pub fn count_monomials(nvars: usize, n: i64) -> u64 {
    if n < 0 || nvars == 0 {
        return u64::from(n == 0 && nvars == 0);
    }
    // C(n + nvars - 1, nvars - 1)
    let k = nvars as u64 - 1;
    let mut acc: u64 = 1;
    for i in 1..=k {
        acc = acc * (n as u64 + i) / i;
    }
    acc
}
