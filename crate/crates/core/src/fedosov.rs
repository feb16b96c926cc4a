//! Fedosov calculus on truncated jets: δ, its homotopy δ⁻¹, the connection
//! ∇, its curvature, the correction term A and the flat differential
//! D = ∇ - δ + A.
//!
//! Every operator here is of the form `X + U` with `X = dy^i ∂/∂x^i` and `U`
//! a fiberwise vector field `Σ_k U^k ∂/∂y^k` whose components are forms.

use crate::error::{Error, Result};
use crate::form::{FormJet, FormKey, JetShape};
use crate::poly::PolyX;
use crate::rational;

/// Christoffel symbols `Γ^k_{ij}(x)` of a torsion-free connection.
#[derive(Clone, Debug, PartialEq)]
pub struct ChristoffelData {
    dim: usize,
    // [k][i][j]
    entries: Vec<Vec<Vec<PolyX>>>,
}

impl ChristoffelData {
    pub fn flat(dim: usize) -> Self {
        Self { dim, entries: vec![vec![vec![PolyX::zero(); dim]; dim]; dim] }
    }

    /// Builds the table from `(k, i, j, Γ^k_{ij})` with 0-based indices.
    /// Missing entries are zero; an entry and its transpose must agree.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize, usize, PolyX)>>(dim: usize, entries: I) -> Result<Self> {
        let mut data = Self::flat(dim);
        let mut set = vec![vec![vec![false; dim]; dim]; dim];
        for (k, i, j, p) in entries {
            if k >= dim || i >= dim || j >= dim {
                return Err(Error::Config(format!("Christoffel index ({k},{i},{j}) out of range")));
            }
            if set[k][i][j] {
                return Err(Error::Config(format!("Christoffel entry ({k},{i},{j}) given twice")));
            }
            set[k][i][j] = true;
            data.entries[k][i][j] = p;
        }
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..i {
                    let (a, b) = (&data.entries[k][i][j], &data.entries[k][j][i]);
                    if a == b {
                        continue;
                    }
                    match (set[k][i][j], set[k][j][i]) {
                        (true, false) => data.entries[k][j][i] = a.clone(),
                        (false, true) => data.entries[k][i][j] = b.clone(),
                        _ => {
                            return Err(Error::Config(format!(
                                "Christoffel symbols are not symmetric at k={}, (i,j)=({},{})",
                                k + 1,
                                i + 1,
                                j + 1
                            )))
                        }
                    }
                }
            }
        }
        Ok(data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> &PolyX {
        &self.entries[k][i][j]
    }

    pub fn is_flat(&self) -> bool {
        self.entries.iter().flatten().flatten().all(PolyX::is_zero)
    }

    /// Components `V^k = -Γ^k_{ij} y^j dy^i` of the connection's fiber part.
    pub fn connection_field(&self, shape: JetShape) -> FiberVectorFieldForm {
        let mut comps = vec![FormJet::zero(shape); self.dim];
        for (k, comp) in comps.iter_mut().enumerate() {
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let g = &self.entries[k][i][j];
                    if g.is_zero() {
                        continue;
                    }
                    let key = FormKey { y: crate::monomial::YMono::var(self.dim, j), dx: 0, dy: 1 << i };
                    comp.add_term(key, &-g);
                }
            }
        }
        FiberVectorFieldForm { shape, comps }
    }
}

/// Fiberwise vector field with form coefficients, acting by
/// `U(u) = Σ_k U^k · ∂u/∂y^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVectorFieldForm {
    shape: JetShape,
    comps: Vec<FormJet>,
}

impl FiberVectorFieldForm {
    pub fn zero(shape: JetShape) -> Self {
        Self { shape, comps: vec![FormJet::zero(shape); shape.dim] }
    }

    pub fn from_components(shape: JetShape, comps: Vec<FormJet>) -> Result<Self> {
        if comps.len() != shape.dim || comps.iter().any(|c| c.shape() != shape) {
            return Err(Error::ShapeMismatch("vector field components do not match the jet shape".into()));
        }
        Ok(Self { shape, comps })
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn components(&self) -> &[FormJet] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FormJet::is_zero)
    }

    pub fn act(&self, u: &FormJet) -> FormJet {
        let mut out = FormJet::zero(self.shape);
        for (k, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out += &(c * &u.deriv_y(k));
            }
        }
        out
    }

    pub fn map<F: Fn(&FormJet) -> FormJet>(&self, f: F) -> Self {
        Self { shape: self.shape, comps: self.comps.iter().map(f).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { shape: self.shape, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { shape: self.shape, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn up_to_degree(&self, n: usize) -> Self {
        self.map(|c| c.up_to_degree(n))
    }

    pub fn term_count(&self) -> usize {
        self.comps.iter().map(FormJet::len).sum()
    }

    pub fn leading_term(&self) -> Option<String> {
        self.comps.iter().enumerate().find_map(|(k, c)| c.leading_term().map(|t| format!("({t}) d/dy{}", k + 1)))
    }
}

/// `δ = dy^i ∂/∂y^i`.
pub fn delta(u: &FormJet) -> FormJet {
    let mut out = FormJet::zero(u.shape());
    for i in 0..u.shape().dim {
        out += &u.deriv_y(i).left_dy(i);
    }
    out
}

/// The homotopy `y^k ι_{dy^k}` scaled by `1/(p+q)` on each monomial of
/// `y`-degree `p` and `dy`-degree `q > 0`.
pub fn delta_inv(u: &FormJet) -> FormJet {
    let shape = u.shape();
    let mut out = FormJet::zero(shape);
    for (key, coeff) in u.terms() {
        let q = key.dy.count_ones() as i64;
        if q == 0 {
            continue;
        }
        let p = key.y.degree() as i64;
        let single = FormJet::term(shape, key.y.clone(), key.dx, key.dy, coeff.clone());
        let scale = rational::frac(1, p + q);
        for k in 0..shape.dim {
            if key.dy & (1 << k) != 0 {
                out += &single.left_deriv_dy(k).times_y(k).scale(&scale);
            }
        }
    }
    out
}

/// Projection onto terms with no `y` and no `dy`.
pub fn sigma(u: &FormJet) -> FormJet {
    u.filter(|k| k.y.is_one() && k.dy == 0)
}

/// `X = dy^i ∂/∂x^i`, acting on coefficients.
pub fn horizontal(u: &FormJet) -> FormJet {
    let mut out = FormJet::zero(u.shape());
    for i in 0..u.shape().dim {
        out += &u.deriv_x(i).left_dy(i);
    }
    out
}

/// `∇u = dy^i ∂u/∂x^i - dy^i Γ^k_{ij} y^j ∂u/∂y^k`.
pub fn nabla(gamma: &ChristoffelData, u: &FormJet) -> FormJet {
    &horizontal(u) + &gamma.connection_field(u.shape()).act(u)
}

/// The fiberwise-linear 2-form field `R` with `∇∇u = R(u)`:
/// `R^l = X(V^l) + Σ_k V^k ∂V^l/∂y^k`.
pub fn curvature(gamma: &ChristoffelData, shape: JetShape) -> FiberVectorFieldForm {
    let v = gamma.connection_field(shape);
    v.map(|vl| &horizontal(vl) + &v.act(vl))
}

/// `C(A)^l = R^l + X(A^l) + V(A^l) + A(V^l) + A(A^l)`; flatness of
/// `∇ - δ + A` is `δA = C(A)`.
fn flatness_source(
    v: &FiberVectorFieldForm,
    r: &FiberVectorFieldForm,
    a: &FiberVectorFieldForm,
) -> FiberVectorFieldForm {
    let mut comps = Vec::with_capacity(a.comps.len());
    for l in 0..a.comps.len() {
        let al = &a.comps[l];
        let mut c = r.comps[l].clone();
        c += &horizontal(al);
        c += &v.act(al);
        c += &a.act(&v.comps[l]);
        c += &a.act(al);
        comps.push(c);
    }
    FiberVectorFieldForm { shape: a.shape, comps }
}

/// Solves `A = δ⁻¹ C(A)` one `y`-degree per pass, starting from `A = 0`.
pub fn build_a(gamma: &ChristoffelData, order: usize) -> Result<FiberVectorFieldForm> {
    if order < 2 {
        return Err(Error::Precondition(format!("truncation order must be at least 2, got {order}")));
    }
    let shape = JetShape::new(gamma.dim, order);
    let v = gamma.connection_field(shape);
    let r = curvature(gamma, shape);
    let mut a = FiberVectorFieldForm::zero(shape);
    for _ in 0..order {
        a = flatness_source(&v, &r, &a).map(delta_inv);
    }
    let again = flatness_source(&v, &r, &a).map(delta_inv);
    if again != a {
        return Err(Error::Internal("correction term did not stabilise".into()));
    }
    Ok(a)
}

/// `A - δ⁻¹ C(A)`, zero exactly when `A` solves the flatness recursion.
pub fn correction_residual(op: &FedosovOperator) -> FiberVectorFieldForm {
    let shape = op.shape();
    let v = op.christoffel.connection_field(shape);
    let r = curvature(&op.christoffel, shape);
    op.a.sub(&flatness_source(&v, &r, &op.a).map(delta_inv))
}

/// The flat differential `D = ∇ - δ + A` at truncation order `N`, with
/// identities reported on `y`-degree `≤ N_rep`.
#[derive(Clone, Debug)]
pub struct FedosovOperator {
    christoffel: ChristoffelData,
    a: FiberVectorFieldForm,
    w: FiberVectorFieldForm,
    n_rep: usize,
}

impl FedosovOperator {
    pub fn build(gamma: ChristoffelData, order: usize, n_rep: Option<usize>) -> Result<Self> {
        let n_rep = n_rep.unwrap_or(order.saturating_sub(2).max(1));
        if n_rep == 0 || n_rep >= order {
            return Err(Error::Config(format!("N_rep must lie in 1..={}, got {n_rep}", order.saturating_sub(1))));
        }
        let a = build_a(&gamma, order)?;
        Ok(Self::with_correction(gamma, a, n_rep))
    }

    /// Assembles an operator from an arbitrary correction term, which need
    /// not make `D` flat.
    pub fn with_correction(gamma: ChristoffelData, a: FiberVectorFieldForm, n_rep: usize) -> Self {
        let shape = a.shape();
        let v = gamma.connection_field(shape);
        let w = v.add(&a).sub(&delta_field(shape));
        Self { christoffel: gamma, a, w, n_rep }
    }

    pub fn shape(&self) -> JetShape {
        self.a.shape()
    }

    pub fn n_rep(&self) -> usize {
        self.n_rep
    }

    pub fn christoffel(&self) -> &ChristoffelData {
        &self.christoffel
    }

    pub fn correction(&self) -> &FiberVectorFieldForm {
        &self.a
    }

    /// The fiber part `W = V - dy^k ∂_k + A` of `D = X + W`.
    pub fn fiber_field(&self) -> &FiberVectorFieldForm {
        &self.w
    }

    pub fn apply(&self, u: &FormJet) -> FormJet {
        &horizontal(u) + &self.w.act(u)
    }
}

/// `δ` as the vector field with components `dy^k`.
fn delta_field(shape: JetShape) -> FiberVectorFieldForm {
    let comps = (0..shape.dim).map(|k| FormJet::dy(shape, k)).collect();
    FiberVectorFieldForm { shape, comps }
}

pub fn fedosov_d(op: &FedosovOperator, u: &FormJet) -> FormJet {
    op.apply(u)
}
