#![allow(dead_code)]

use std::collections::BTreeMap;

use hochfed::fedosov::{ChristoffelData, FedosovOperator, FiberVectorFieldForm};
use hochfed::monomial::monomial_basis;
use hochfed::rational::int;
use hochfed::{FormJet, FormKey, JetShape, PolyX, Rational, YMono};
use num_traits::{One, Zero};

/// Coefficients of `x/(e^x - 1)` up to `x^order`, by inverting the power
/// series `(e^x - 1)/x = Σ x^n/(n+1)!` term by term.
pub fn todd_oracle(order: usize) -> Vec<Rational> {
    let mut fact = Rational::one();
    let mut g = Vec::with_capacity(order + 1);
    for n in 0..=order {
        fact = fact * int(n as i64 + 1);
        g.push(Rational::one() / fact.clone());
    }
    let mut f = vec![Rational::one()];
    for n in 1..=order {
        let s: Rational = (1..=n).map(|k| &g[k] * &f[n - k]).sum();
        f.push(-s);
    }
    f
}

/// Dense rational system with polynomial right-hand sides, solved by
/// Gauss-Jordan elimination. Returns `None` unless the solution exists and
/// is unique.
fn solve(mut m: Vec<Vec<Rational>>, mut rhs: Vec<PolyX>, n: usize) -> Option<Vec<PolyX>> {
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        rhs.swap(row, p);
        let inv = m[row][col].recip();
        m[row] = m[row].iter().map(|v| v * &inv).collect();
        rhs[row] = rhs[row].scale(&inv);
        for r in 0..m.len() {
            if r == row || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in 0..n {
                let t = &m[row][c] * &f;
                m[r][c] -= t;
            }
            let t = rhs[row].scale(&f);
            rhs[r] -= &t;
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() != n || rhs[row..].iter().any(|p| !p.is_zero()) {
        return None;
    }
    Some(rhs.into_iter().take(n).collect())
}

fn d_squared_at(gamma: &ChristoffelData, a: &FiberVectorFieldForm, l: usize, degree: usize) -> FormJet {
    let op = FedosovOperator::with_correction(gamma.clone(), a.clone(), 1);
    let y = FormJet::y(a.shape(), l);
    op.apply(&op.apply(&y)).filter(|k| k.y.degree() == degree)
}

/// The Fedosov correction recovered degree by degree from the flatness of
/// `D` on the fiber coordinates together with the normalization `δ⁻¹A = 0`.
/// Each degree is an affine problem in the new unknowns; its linear part is
/// probed column by column and the system is solved exactly.
pub fn correction_oracle(gamma: &ChristoffelData, order: usize) -> Option<FiberVectorFieldForm> {
    let dim = gamma.dim();
    let shape = JetShape::new(dim, order);
    let mut comps = vec![FormJet::zero(shape); dim];
    for k in 2..=order {
        let current = FiberVectorFieldForm::from_components(shape, comps.clone()).ok()?;
        let monos: Vec<YMono> = monomial_basis(dim, k, false).into_iter().filter(|m| m.degree() == k).collect();
        let unknowns: Vec<(usize, YMono, usize)> =
            (0..dim).flat_map(|l| monos.iter().flat_map(move |m| (0..dim).map(move |i| (l, m.clone(), i)))).collect();
        let base: Vec<FormJet> = (0..dim).map(|l| d_squared_at(gamma, &current, l, k - 1)).collect();

        let mut rows: BTreeMap<(usize, FormKey), usize> = BTreeMap::new();
        let mut cols: Vec<Vec<(usize, FormKey, Rational)>> = Vec::new();
        for (l, m, i) in &unknowns {
            let mut trial = comps.clone();
            trial[*l] += &FormJet::term(shape, m.clone(), 0, 1 << i, PolyX::one(dim));
            let trial = FiberVectorFieldForm::from_components(shape, trial).ok()?;
            let mut col = Vec::new();
            for (t, b) in base.iter().enumerate() {
                let diff = &d_squared_at(gamma, &trial, t, k - 1) - b;
                for (key, c) in diff.terms() {
                    let c = c.as_constant()?;
                    let n = rows.len();
                    rows.entry((t, key.clone())).or_insert(n);
                    col.push((t, key.clone(), c));
                }
            }
            cols.push(col);
        }
        for (t, b) in base.iter().enumerate() {
            for (key, _) in b.terms() {
                let n = rows.len();
                rows.entry((t, key.clone())).or_insert(n);
            }
        }
        let flat_rows = rows.len();
        let mut norm_rows: BTreeMap<(usize, YMono), usize> = BTreeMap::new();
        for (l, m, i) in &unknowns {
            let n = flat_rows + norm_rows.len();
            norm_rows.entry((*l, m.times_var(*i))).or_insert(n);
        }

        let n = unknowns.len();
        let total = flat_rows + norm_rows.len();
        let mut mat = vec![vec![Rational::zero(); n]; total];
        let mut rhs = vec![PolyX::zero(); total];
        for (j, col) in cols.iter().enumerate() {
            for (t, key, c) in col {
                mat[rows[&(*t, key.clone())]][j] += c;
            }
            let (l, m, i) = &unknowns[j];
            mat[norm_rows[&(*l, m.times_var(*i))]][j] += Rational::one();
        }
        for (t, b) in base.iter().enumerate() {
            for (key, c) in b.terms() {
                rhs[rows[&(t, key.clone())]] -= c;
            }
        }
        let sol = solve(mat, rhs, n)?;
        for ((l, m, i), c) in unknowns.iter().zip(sol) {
            comps[*l] += &FormJet::term(shape, m.clone(), 0, 1 << i, c);
        }
    }
    FiberVectorFieldForm::from_components(shape, comps).ok()
}

/// Christoffel symbols given as `(k, i, j, [(exponent, coefficient)])`
/// with 0-based indices; symmetric partners are filled in.
pub fn christoffel(dim: usize, entries: &[(usize, usize, usize, &[(&[u32], i64)])]) -> ChristoffelData {
    let mut all = Vec::new();
    for &(k, i, j, poly) in entries {
        let p = PolyX::from_terms(poly.iter().map(|(e, c)| (e.to_vec(), int(*c))));
        all.push((k, i, j, p.clone()));
        if i != j {
            all.push((k, j, i, p));
        }
    }
    ChristoffelData::from_entries(dim, all).expect("valid Christoffel data")
}
