//! Matrix-valued jets and the twisted differential `D̃ = D + [γ, ·]` built
//! from a connection form on a trivial bundle of rank `r`.

use crate::error::{Error, Result};
use crate::fedosov::{delta_inv, horizontal, FedosovOperator};
use crate::form::{FormJet, JetShape};
use crate::poly::PolyX;
use crate::rational::Rational;

/// `r×r` matrix of forms, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EndJet {
    rank: usize,
    shape: JetShape,
    entries: Vec<FormJet>,
}

impl EndJet {
    pub fn zero(rank: usize, shape: JetShape) -> Self {
        Self { rank, shape, entries: vec![FormJet::zero(shape); rank * rank] }
    }

    pub fn identity(rank: usize, shape: JetShape) -> Self {
        Self::scalar(rank, &FormJet::one(shape))
    }

    /// `u · Id`.
    pub fn scalar(rank: usize, u: &FormJet) -> Self {
        let mut out = Self::zero(rank, u.shape());
        for i in 0..rank {
            out.entries[i * rank + i] = u.clone();
        }
        out
    }

    pub fn from_entries(rank: usize, shape: JetShape, entries: Vec<FormJet>) -> Result<Self> {
        if entries.len() != rank * rank || entries.iter().any(|e| e.shape() != shape) {
            return Err(Error::ShapeMismatch(format!("expected {rank}x{rank} entries of matching shape")));
        }
        Ok(Self { rank, shape, entries })
    }

    /// `u · E_{ij}`.
    pub fn unit(rank: usize, i: usize, j: usize, u: &FormJet) -> Self {
        let mut out = Self::zero(rank, u.shape());
        out.entries[i * rank + j] = u.clone();
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn shape(&self) -> JetShape {
        self.shape
    }

    pub fn get(&self, i: usize, j: usize) -> &FormJet {
        &self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[FormJet] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(FormJet::is_zero)
    }

    pub fn map<F: Fn(&FormJet) -> FormJet>(&self, f: F) -> Self {
        Self { rank: self.rank, shape: self.shape, entries: self.entries.iter().map(f).collect() }
    }

    fn zip<F: Fn(&FormJet, &FormJet) -> FormJet>(&self, other: &Self, f: F) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            rank: self.rank,
            shape: self.shape,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank || self.shape != other.shape {
            return Err(Error::ShapeMismatch("matrix jets of different rank or shape".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let r = self.rank;
        let mut out = Self::zero(r, self.shape);
        for i in 0..r {
            for k in 0..r {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..r {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * r + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Splits into parts of even and odd total form degree.
    pub fn parity_parts(&self) -> (Self, Self) {
        (self.map(|e| e.filter(|k| k.form_degree() % 2 == 0)), self.map(|e| e.filter(|k| k.form_degree() % 2 == 1)))
    }

    /// `[u, v] = uv - (-1)^{|u||v|} vu`, extended bilinearly over parity.
    pub fn graded_commutator(&self, other: &Self) -> Result<Self> {
        let (ue, uo) = self.parity_parts();
        let (ve, vo) = other.parity_parts();
        let mut out = self.multiply(other)?.sub(&ve.multiply(self)?)?;
        out = out.sub(&vo.multiply(&ue)?)?;
        out.add(&vo.multiply(&uo)?)
    }

    pub fn up_to_degree(&self, n: usize) -> Self {
        self.map(|e| e.up_to_degree(n))
    }

    pub fn term_count(&self) -> usize {
        self.entries.iter().map(FormJet::len).sum()
    }

    pub fn leading_term(&self) -> Option<String> {
        let r = self.rank;
        self.entries
            .iter()
            .enumerate()
            .find_map(|(n, e)| e.leading_term().map(|t| format!("[{},{}] {t}", n / r + 1, n % r + 1)))
    }
}

/// `Γ^E = Σ_i M_i(x) dy^i` with `r×r` polynomial matrices `M_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionFormE {
    dim: usize,
    rank: usize,
    // [i][row * rank + col]
    mats: Vec<Vec<PolyX>>,
}

impl ConnectionFormE {
    pub fn zero(dim: usize, rank: usize) -> Self {
        Self { dim, rank, mats: vec![vec![PolyX::zero(); rank * rank]; dim] }
    }

    /// Sets the coefficient matrix of `dy^i` (0-based), given row-major.
    pub fn with_matrix(mut self, i: usize, mat: Vec<Vec<PolyX>>) -> Result<Self> {
        if i >= self.dim {
            return Err(Error::Config(format!("connection form index {} out of range", i + 1)));
        }
        if mat.len() != self.rank || mat.iter().any(|row| row.len() != self.rank) {
            return Err(Error::Config(format!("connection matrix for dy{} must be {r}x{r}", i + 1, r = self.rank)));
        }
        self.mats[i] = mat.into_iter().flatten().collect();
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().flatten().all(PolyX::is_zero)
    }

    pub fn to_end_jet(&self, shape: JetShape) -> EndJet {
        let mut out = EndJet::zero(self.rank, shape);
        for (i, m) in self.mats.iter().enumerate() {
            let dyi = FormJet::dy(shape, i);
            for (n, p) in m.iter().enumerate() {
                if !p.is_zero() {
                    out.entries[n] += &dyi.scale_poly(p);
                }
            }
        }
        out
    }
}

/// The connection form `γ^E = Γ^E + γ̃` solving the Maurer-Cartan equation.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaE {
    gamma: EndJet,
    base: EndJet,
}

impl GammaE {
    pub fn value(&self) -> &EndJet {
        &self.gamma
    }

    /// The `y`-independent part it was built from.
    pub fn base(&self) -> &EndJet {
        &self.base
    }

    /// `γ̃ = γ - Γ^E`.
    pub fn correction(&self) -> EndJet {
        self.gamma.sub(&self.base).expect("same shape")
    }

    /// Wraps an arbitrary matrix 1-form, e.g. a corrupted one for testing.
    pub fn from_parts(gamma: EndJet, base: EndJet) -> Result<Self> {
        gamma.check(&base)?;
        Ok(Self { gamma, base })
    }
}

fn d_matrix(op: &FedosovOperator, u: &EndJet) -> EndJet {
    u.map(|e| op.apply(e))
}

/// Iterates `γ = Γ^E + δ⁻¹(∇γ + A(γ) + γ·γ)` once per `y`-degree.
pub fn build_gamma_e(op: &FedosovOperator, conn: &ConnectionFormE) -> Result<GammaE> {
    let shape = op.shape();
    if conn.dim() != shape.dim {
        return Err(Error::ShapeMismatch(format!(
            "connection form has dimension {}, jets have {}",
            conn.dim(),
            shape.dim
        )));
    }
    let base = conn.to_end_jet(shape);
    let v = op.christoffel().connection_field(shape);
    let a = op.correction();
    let mut gamma = base.clone();
    for _ in 0..shape.order {
        let nabla_a = gamma.map(|e| &(&horizontal(e) + &v.act(e)) + &a.act(e));
        let source = nabla_a.add(&gamma.multiply(&gamma)?)?;
        gamma = base.add(&source.map(delta_inv))?;
    }
    Ok(GammaE { gamma, base })
}

/// `Dγ + ½[γ, γ]` restricted to `y`-degree `≤ N_rep`.
pub fn check_maurer_cartan(gamma: &GammaE, op: &FedosovOperator) -> Result<EndJet> {
    let g = &gamma.gamma;
    let half = crate::rational::frac(1, 2);
    let res = d_matrix(op, g).add(&g.graded_commutator(g)?.scale(&half))?;
    Ok(res.up_to_degree(op.n_rep()))
}

/// `D̃u = Du + [γ, u]`.
pub fn twisted_d_element(gamma: &GammaE, op: &FedosovOperator, u: &EndJet) -> Result<EndJet> {
    d_matrix(op, u).add(&gamma.gamma.graded_commutator(u)?)
}

/// Replaces `γ` by `γ + Δ` for a `y`-independent matrix 1-form `Δ`.
pub fn gauge_shift(gamma: &GammaE, shift: &EndJet) -> Result<GammaE> {
    for e in shift.entries() {
        for (k, _) in e.terms() {
            if !k.y.is_one() {
                return Err(Error::Precondition("gauge shift must not depend on the fiber coordinates".into()));
            }
            if k.dx != 0 || k.dy.count_ones() != 1 {
                return Err(Error::Precondition("gauge shift must be a dy 1-form".into()));
            }
        }
    }
    Ok(GammaE { gamma: gamma.gamma.add(shift)?, base: gamma.base.add(shift)? })
}
