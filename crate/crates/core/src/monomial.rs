//! Fiber monomials `y^α`, the truncated monomial basis, and sign bookkeeping
//! for anticommuting generators.

use std::cmp::Ordering;
use std::fmt;

use num_traits::One;

use crate::rational::Rational;

/// Exponent vector of a fiber monomial `y^α`.
///
/// Ordered graded-lexicographically: lower total degree first, then larger
/// exponent of `y^1` first, then `y^2`, and so on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct YMono(pub Vec<u8>);

impl YMono {
    pub fn one(dim: usize) -> Self {
        YMono(vec![0; dim])
    }

    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        YMono(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&k| k as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    pub fn mul(&self, other: &YMono) -> YMono {
        YMono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `∂/∂y^i` of the monomial: the multiplicity and the lowered monomial.
    pub fn deriv(&self, i: usize) -> Option<(u8, YMono)> {
        let k = self.0[i];
        if k == 0 {
            return None;
        }
        let mut e = self.0.clone();
        e[i] -= 1;
        Some((k, YMono(e)))
    }

    pub fn times_var(&self, i: usize) -> YMono {
        let mut e = self.0.clone();
        e[i] += 1;
        YMono(e)
    }
}

impl Ord for YMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for YMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for YMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &k) in self.0.iter().enumerate() {
            if k == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if k == 1 {
                write!(f, "y{}", i + 1)?;
            } else {
                write!(f, "y{}^{}", i + 1, k)?;
            }
        }
        Ok(())
    }
}

/// All `y`-monomials of total degree `<= order` (or `1..=order` without the
/// constant), in graded-lexicographic order.
pub fn monomial_basis(dim: usize, order: usize, include_constant: bool) -> Vec<YMono> {
    let mut out = Vec::new();
    let start = if include_constant { 0 } else { 1 };
    for deg in start..=order {
        let mut current = vec![0u8; dim];
        compositions(deg, 0, &mut current, &mut out);
    }
    out
}

fn compositions(rest: usize, pos: usize, current: &mut Vec<u8>, out: &mut Vec<YMono>) {
    if pos + 1 == current.len() {
        current[pos] = rest as u8;
        out.push(YMono(current.clone()));
        return;
    }
    for k in (0..=rest).rev() {
        current[pos] = k as u8;
        compositions(rest - k, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Number of generators in `mask` with index strictly below `i`.
pub fn bits_below(mask: u32, i: usize) -> u32 {
    (mask & ((1u32 << i) - 1)).count_ones()
}

/// Sign of the product `g_S · g_T` of two ordered products of anticommuting
/// generators, as a sorted product; `None` when they share a generator.
pub fn merge_sign(left: u32, right: u32) -> Option<bool> {
    if left & right != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut r = right;
    while r != 0 {
        let b = r.trailing_zeros();
        inversions += (left >> (b + 1)).count_ones();
        r &= r - 1;
    }
    Some(inversions % 2 == 1)
}

/// Koszul sign of reordering graded items.
///
/// `perm[k]` is the original position of the item that ends up at position
/// `k`. Every inversion of an odd pair contributes a factor `-1`.
pub fn koszul_sign(degrees: &[i64], perm: &[usize]) -> Rational {
    let mut odd = 0usize;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] && (degrees[perm[a]] * degrees[perm[b]]).rem_euclid(2) == 1 {
                odd += 1;
            }
        }
    }
    if odd % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}
