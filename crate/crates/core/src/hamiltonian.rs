//! Local operators, boundary matrices and sparse assembly of the chain
//! Hamiltonians.
//!
//! Two-site operators act on `ℂ² ⊗ ℂ²` in the order `(↑↑, ↑↓, ↓↑, ↓↓)`, i.e.
//! the row index is `2·s_left + s_right` with `s = 1` for a down spin. The
//! gauge matrix of the open XXX boundaries is fixed to the identity.

use crate::basis::{full_dimension, SectorBasis};
use crate::dense::DenseMatrix;
use crate::{invalid, invalid_dim, C64, Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Single-site operator in the basis `(↑, ↓)`.
pub type Matrix2 = [[C64; 2]; 2];

/// Two-site operator in the basis `(↑↑, ↑↓, ↓↑, ↓↓)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOperator(pub [[C64; 4]; 4]);

impl LocalOperator {
    pub fn zero() -> Self {
        Self([[ZERO; 4]; 4])
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.0
    }

    /// Act on a two-site vector.
    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (r, row) in self.0.iter().enumerate() {
            out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    fn kron(a: &Matrix2, b: &Matrix2) -> Self {
        let mut out = [[ZERO; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                    }
                }
            }
        }
        Self(out)
    }

    fn scaled_add(&mut self, s: C64, other: &Self) {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += s * other.0[i][j];
            }
        }
    }
}

fn pauli_x() -> Matrix2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

fn pauli_y() -> Matrix2 {
    let i = C64::new(0.0, 1.0);
    [[ZERO, -i], [i, ZERO]]
}

fn pauli_z() -> Matrix2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

fn identity2() -> Matrix2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

/// The permutation operator `P(u ⊗ v) = v ⊗ u`.
pub fn permutation() -> LocalOperator {
    let mut p = LocalOperator::zero();
    p.0[0][0] = ONE;
    p.0[1][2] = ONE;
    p.0[2][1] = ONE;
    p.0[3][3] = ONE;
    p
}

/// XXX bond operator `h = P - 𝕀`.
pub fn local_h_xxx() -> LocalOperator {
    let mut h = permutation();
    for i in 0..4 {
        h.0[i][i] -= ONE;
    }
    h
}

/// Anisotropy `Δ = (Q + Q⁻¹)/2` and telescoping field `𝔥 = (Q - Q⁻¹)/2`.
pub fn xxz_couplings(q: C64) -> Result<(C64, C64)> {
    if q == ZERO {
        return invalid("XXZ deformation Q must be non-zero");
    }
    Ok(((q + q.inv()) * 0.5, (q - q.inv()) * 0.5))
}

/// XXZ bond operator
/// `½{σˣσˣ + σʸσʸ + Δ(σᶻσᶻ - 𝕀) - 𝔥(σᶻ ⊗ 𝕀 - 𝕀 ⊗ σᶻ)}`, which is `P - 𝕀` at
/// `Q = 1`. In the basis `(↑↑, ↑↓, ↓↑, ↓↓)` the middle block is
/// `[[-Q, 1], [1, -Q⁻¹]]`.
pub fn local_h_xxz(q: C64) -> Result<LocalOperator> {
    let (delta, field) = xxz_couplings(q)?;
    let (x, y, z, id) = (pauli_x(), pauli_y(), pauli_z(), identity2());
    let mut h = LocalOperator::zero();
    h.scaled_add(ONE, &LocalOperator::kron(&x, &x));
    h.scaled_add(ONE, &LocalOperator::kron(&y, &y));
    h.scaled_add(delta, &LocalOperator::kron(&z, &z));
    h.scaled_add(-delta, &LocalOperator::kron(&id, &id));
    h.scaled_add(-field, &LocalOperator::kron(&z, &id));
    h.scaled_add(field, &LocalOperator::kron(&id, &z));
    for row in h.0.iter_mut() {
        for e in row.iter_mut() {
            *e *= 0.5;
        }
    }
    Ok(h)
}

/// Left boundary `B⁺ = [[α, μ], [0, β]]`; `μ` flips `↓` to `↑`.
pub fn boundary_matrix_plus(alpha: C64, beta: C64, mu: C64) -> Matrix2 {
    [[alpha, mu], [ZERO, beta]]
}

/// Right boundary `B⁻ = diag(γ, δ)`.
pub fn boundary_matrix_minus(gamma: C64, delta: C64) -> Matrix2 {
    [[gamma, ZERO], [ZERO, delta]]
}

/// XXZ boundary matrices `(B̂, B)` acting on sites 1 and L.
pub fn xxz_boundaries(
    alpha: C64,
    beta: C64,
    gamma: C64,
    delta: C64,
    s: C64,
    q: C64,
    length: usize,
) -> Result<(Matrix2, Matrix2)> {
    if q == ZERO {
        return invalid("XXZ deformation Q must be non-zero");
    }
    if length == 0 {
        return invalid("chain length must be positive");
    }
    let ql = q.powi(length as i32 - 1);
    let left = [[alpha, -gamma * (-s).exp()], [-alpha * s.exp(), gamma]];
    let right = [[delta, -beta * ql], [-delta / ql, beta]];
    Ok((left, right))
}

/// Boundary parameters of the open XXX chain (gauge `M = 𝕀`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxxBoundary {
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub mu: C64,
}

impl XxxBoundary {
    pub fn diagonal(alpha: C64, beta: C64, gamma: C64, delta: C64) -> Self {
        Self { alpha, beta, gamma, delta, mu: ZERO }
    }

    pub fn with_mu(self, mu: C64) -> Self {
        Self { mu, ..self }
    }

    pub fn is_diagonal(&self) -> bool {
        self.mu == ZERO
    }
}

/// Bulk deformation and boundary parameters of the open XXZ chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzBoundary {
    pub q: C64,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub s: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    XxxOpen(XxxBoundary),
    XxzOpen(XxzBoundary),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    XxxPeriodic,
    XxxOpen,
    XxzOpen,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::XxxPeriodic => "xxx-periodic",
            Family::XxxOpen => "xxx-open",
            Family::XxzOpen => "xxz-open",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xxx-periodic" => Ok(Family::XxxPeriodic),
            "xxx-open" | "xxx-diagonal" | "xxx-triangular" => Ok(Family::XxxOpen),
            "xxz-open" | "xxz" => Ok(Family::XxzOpen),
            other => invalid(format!("unknown model family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Periodic,
    XxxDiagonal,
    XxxTriangular,
    Xxz,
}

/// Which chain, how long, and with which boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub length: usize,
    pub boundary: Boundary,
}

impl ModelSpec {
    pub fn periodic(length: usize) -> Self {
        Self { length, boundary: Boundary::Periodic }
    }

    pub fn xxx_open(length: usize, boundary: XxxBoundary) -> Self {
        Self { length, boundary: Boundary::XxxOpen(boundary) }
    }

    pub fn xxz_open(length: usize, boundary: XxzBoundary) -> Self {
        Self { length, boundary: Boundary::XxzOpen(boundary) }
    }

    pub fn family(&self) -> Family {
        match self.boundary {
            Boundary::Periodic => Family::XxxPeriodic,
            Boundary::XxxOpen(_) => Family::XxxOpen,
            Boundary::XxzOpen(_) => Family::XxzOpen,
        }
    }

    pub fn kind(&self) -> BoundaryKind {
        match self.boundary {
            Boundary::Periodic => BoundaryKind::Periodic,
            Boundary::XxxOpen(b) if b.is_diagonal() => BoundaryKind::XxxDiagonal,
            Boundary::XxxOpen(_) => BoundaryKind::XxxTriangular,
            Boundary::XxzOpen(_) => BoundaryKind::Xxz,
        }
    }

    /// Whether the Hamiltonian commutes with `Sᶻ` for every parameter value
    /// of this kind.
    pub fn conserves_magnetization(&self) -> bool {
        matches!(self.kind(), BoundaryKind::Periodic | BoundaryKind::XxxDiagonal)
    }

    fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return invalid(format!("chain length {} < 2", self.length));
        }
        if let Boundary::XxzOpen(b) = self.boundary {
            if b.q == ZERO {
                return invalid("XXZ deformation Q must be non-zero");
            }
            let ql = b.q.powi(self.length as i32 - 1);
            if !(ql.norm() > 0.0 && ql.norm().is_finite()) {
                return Err(Error::Singular(format!("Q^(L-1) = {ql} is not invertible")));
            }
        }
        Ok(())
    }
}

/// Square sparse operator stored in compressed rows. Entries with the same
/// `(row, col)` are summed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl OperatorMatrix {
    /// Consolidate coordinate triplets; exact zeros are dropped.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = triplets.iter().find(|t| t.0 >= dim || t.1 >= dim) {
            return invalid(format!("entry ({r}, {c}) outside dimension {dim}"));
        }
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows_of = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *vals.last_mut().expect("previous entry") += v;
            } else {
                rows_of.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows_of.into_iter().zip(cols).zip(vals) {
            if v != ZERO {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { dim, row_ptr, cols: keep_cols, vals: keep_vals })
    }

    pub fn from_dense(m: &DenseMatrix) -> Result<Self> {
        if !m.is_square() {
            return invalid("operator must be square");
        }
        let mut t = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)] != ZERO {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows(), t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Iterate over stored `(row, col, value)` in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.cols[p], self.vals[p]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        if row >= self.dim {
            return ZERO;
        }
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[span.clone()].binary_search(&col) {
            Ok(p) => self.vals[span.start + p],
            Err(_) => ZERO,
        }
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return invalid_dim(self.dim, v.len());
        }
        Ok((0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1]).map(|p| self.vals[p] * v[self.cols[p]]).sum()
            })
            .collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return invalid_dim(self.dim, other.dim);
        }
        Self::from_triplets(self.dim, self.entries().chain(other.entries()).collect())
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v;
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dim)
            .map(|r| (self.row_ptr[r]..self.row_ptr[r + 1]).map(|p| self.vals[p].norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries().all(|(r, c, v)| (v - self.get(c, r).conj()).norm() <= tol)
    }

    /// Dense block on the rows and columns of a magnetization sector.
    pub fn sector_block(&self, basis: &SectorBasis) -> Result<DenseMatrix> {
        let dim = full_dimension(basis.length())?;
        if dim != self.dim {
            return invalid_dim(dim, self.dim);
        }
        let idx: Vec<usize> = basis.masks().iter().map(|&m| m as usize).collect();
        Ok(DenseMatrix::from_fn(idx.len(), idx.len(), |i, j| self.get(idx[i], idx[j])))
    }

    /// The operator with rows and columns reordered as `new[i] = old[order[i]]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dim {
            return invalid_dim(self.dim, order.len());
        }
        let mut inverse = vec![usize::MAX; self.dim];
        for (new, &old) in order.iter().enumerate() {
            if old >= self.dim || inverse[old] != usize::MAX {
                return invalid("ordering is not a permutation");
            }
            inverse[old] = new;
        }
        Self::from_triplets(
            self.dim,
            self.entries().map(|(r, c, v)| (inverse[r], inverse[c], v)).collect(),
        )
    }
}

fn push_two_site(t: &mut Vec<(usize, usize, C64)>, length: usize, i: usize, j: usize, h: &LocalOperator) {
    let (bi, bj) = (i - 1, j - 1);
    for b in 0..1usize << length {
        let si = b >> bi & 1;
        let sj = b >> bj & 1;
        let col = 2 * si + sj;
        let cleared = b & !(1 << bi) & !(1 << bj);
        for (row, hrow) in h.0.iter().enumerate() {
            let v = hrow[col];
            if v == ZERO {
                continue;
            }
            let nb = cleared | (row >> 1) << bi | (row & 1) << bj;
            t.push((nb, b, v));
        }
    }
}

fn push_one_site(t: &mut Vec<(usize, usize, C64)>, length: usize, i: usize, m: &Matrix2) {
    let bit = i - 1;
    for b in 0..1usize << length {
        let s = b >> bit & 1;
        let cleared = b & !(1 << bit);
        for (r, mrow) in m.iter().enumerate() {
            let v = mrow[s];
            if v != ZERO {
                t.push((cleared | r << bit, b, v));
            }
        }
    }
}

/// Assemble the full-space Hamiltonian.
///
/// * periodic: `Σ_{ℓ=1}^{L} h_{ℓ,ℓ+1}` with `L + 1 ≡ 1`;
/// * open XXX: `B⁺_1 + Σ_{ℓ=1}^{L-1} h_{ℓ,ℓ+1} + B⁻_L`;
/// * open XXZ: `Σ_{ℓ=1}^{L-1} h^{xxz}_{ℓ,ℓ+1} + B̂_1 + B_L`.
pub fn assemble(spec: &ModelSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let length = spec.length;
    let dim = full_dimension(length)?;
    let mut t = Vec::new();
    match spec.boundary {
        Boundary::Periodic => {
            let h = local_h_xxx();
            for l in 1..=length {
                push_two_site(&mut t, length, l, l % length + 1, &h);
            }
        }
        Boundary::XxxOpen(b) => {
            let h = local_h_xxx();
            for l in 1..length {
                push_two_site(&mut t, length, l, l + 1, &h);
            }
            push_one_site(&mut t, length, 1, &boundary_matrix_plus(b.alpha, b.beta, b.mu));
            push_one_site(&mut t, length, length, &boundary_matrix_minus(b.gamma, b.delta));
        }
        Boundary::XxzOpen(b) => {
            let h = local_h_xxz(b.q)?;
            for l in 1..length {
                push_two_site(&mut t, length, l, l + 1, &h);
            }
            let (left, right) = xxz_boundaries(b.alpha, b.beta, b.gamma, b.delta, b.s, b.q, length)?;
            push_one_site(&mut t, length, 1, &left);
            push_one_site(&mut t, length, length, &right);
        }
    }
    OperatorMatrix::from_triplets(dim, t)
}

/// Bulk part `Σ_{ℓ=1}^{L-1} h^{xxz}_{ℓ,ℓ+1}` of the open XXZ chain.
pub fn assemble_xxz_bulk(length: usize, q: C64) -> Result<OperatorMatrix> {
    if length < 2 {
        return invalid(format!("chain length {length} < 2"));
    }
    let dim = full_dimension(length)?;
    let h = local_h_xxz(q)?;
    let mut t = Vec::new();
    for l in 1..length {
        push_two_site(&mut t, length, l, l + 1, &h);
    }
    OperatorMatrix::from_triplets(dim, t)
}

/// Assemble the Hamiltonian restricted to one magnetization sector, working
/// directly in the sector basis. Only available for models that conserve
/// `Sᶻ`.
pub fn assemble_sector(spec: &ModelSpec, basis: &SectorBasis) -> Result<OperatorMatrix> {
    spec.validate()?;
    if !spec.conserves_magnetization() {
        return invalid("sector assembly requires a magnetization-conserving model");
    }
    if basis.length() != spec.length {
        return invalid_dim(spec.length, basis.length());
    }
    let length = spec.length;
    let h = local_h_xxx();
    let mut bonds: Vec<(usize, usize)> = (1..length).map(|l| (l, l + 1)).collect();
    if spec.boundary == Boundary::Periodic {
        bonds.push((length, 1));
    }
    let mut t = Vec::new();
    for (col, &mask) in basis.masks().iter().enumerate() {
        let b = mask as usize;
        for &(i, j) in &bonds {
            let (bi, bj) = (i - 1, j - 1);
            let c = 2 * (b >> bi & 1) + (b >> bj & 1);
            let cleared = b & !(1 << bi) & !(1 << bj);
            for (row, hrow) in h.0.iter().enumerate() {
                if hrow[c] != ZERO {
                    let nb = cleared | (row >> 1) << bi | (row & 1) << bj;
                    t.push((basis.rank_mask(nb as u64), col, hrow[c]));
                }
            }
        }
        if let Boundary::XxxOpen(bd) = spec.boundary {
            let first = if b & 1 == 1 { bd.beta } else { bd.alpha };
            let last = if b >> (length - 1) & 1 == 1 { bd.delta } else { bd.gamma };
            t.push((col, col, first + last));
        }
    }
    OperatorMatrix::from_triplets(basis.len(), t)
}

/// Diagonal of `Sᶻ = Σ_j σᶻ_j`: `L - 2·(number of down spins)`.
pub fn sz_value(length: usize, index: usize) -> f64 {
    length as f64 - 2.0 * index.count_ones() as f64
}

/// Frobenius norm of `[H, Sᶻ]`.
pub fn sz_commutator_norm(h: &OperatorMatrix, length: usize) -> Result<f64> {
    let dim = full_dimension(length)?;
    if h.dim() != dim {
        return invalid_dim(dim, h.dim());
    }
    Ok(h.entries()
        .map(|(r, c, v)| v.norm_sqr() * (sz_value(length, c) - sz_value(length, r)).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Full-space indices ordered by ascending number of down spins (stable
/// within a sector). With this ordering the triangular-boundary Hamiltonian
/// is block upper-triangular.
pub fn sector_ordering(length: usize) -> Result<Vec<usize>> {
    let mut order = Vec::with_capacity(full_dimension(length)?);
    for m in 0..=length {
        order.extend(SectorBasis::new(length, m)?.masks().iter().map(|&x| x as usize));
    }
    Ok(order)
}

/// Check that every stored entry maps a sector to itself or to a sector with
/// fewer down spins (zero pattern of block upper-triangularity in the
/// ascending-sector ordering).
pub fn is_sector_block_upper_triangular(h: &OperatorMatrix) -> bool {
    h.entries().all(|(r, c, _)| r.count_ones() <= c.count_ones())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn basis4(idx: usize) -> [C64; 4] {
        let mut v = [ZERO; 4];
        v[idx] = ONE;
        v
    }

    #[test]
    fn xxx_local_examples() {
        let h = local_h_xxx();
        assert_eq!(h.apply(&basis4(0)), [ZERO; 4]);
        let up_down = h.apply(&basis4(1));
        assert_eq!(up_down, [ZERO, -ONE, ONE, ZERO]);
        assert_eq!(h.trace(), c64(-2.0, 0.0));
    }

    #[test]
    fn xxz_local_examples() {
        let h1 = local_h_xxz(ONE).unwrap();
        assert!(h1.max_abs_diff(&local_h_xxx()) < 1e-15);
        let q = c64(0.4, 0.9);
        let h = local_h_xxz(q).unwrap();
        assert!((h.0[1][1] + q).norm() < 1e-15 && (h.0[2][2] + q.inv()).norm() < 1e-15);
        assert!((h.0[1][2] - ONE).norm() < 1e-15 && (h.0[2][1] - ONE).norm() < 1e-15);
        for q in [c64(2.0, 0.0), c64(0.3, 1.1), c64(-1.7, 0.2)] {
            let h = local_h_xxz(q).unwrap();
            assert!(h.apply(&basis4(0)).iter().all(|x| x.norm() < 1e-15));
        }
        let (delta, field) = xxz_couplings(c64(2.0, 0.0)).unwrap();
        assert!((delta - c64(1.25, 0.0)).norm() < 1e-15);
        assert!((field - c64(0.75, 0.0)).norm() < 1e-15);
        assert!(local_h_xxz(ZERO).is_err());
    }

    #[test]
    fn boundary_matrices() {
        assert_eq!(boundary_matrix_plus(ZERO, ZERO, ZERO), [[ZERO; 2]; 2]);
        let a = c64(0.3, 0.0);
        let b = c64(-0.2, 0.0);
        assert_eq!(boundary_matrix_plus(a, b, ZERO), [[a, ZERO], [ZERO, b]]);
        let bp = boundary_matrix_plus(a, b, ONE);
        // column of |↓⟩ carries the flip amplitude on |↑⟩
        assert_eq!(bp[0][1], ONE);
        assert_eq!(boundary_matrix_minus(ONE, ONE), identity2());
        let g = c64(0.7, 0.0);
        let d = c64(1.4, 0.0);
        let bm = boundary_matrix_minus(g, d);
        assert_eq!((bm[0][0], bm[1][0]), (g, ZERO));
        assert_eq!((bm[0][1], bm[1][1]), (ZERO, d));
    }

    #[test]
    fn xxz_boundaries_are_singular() {
        let det = |m: &Matrix2| m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let al = c64(0.4, 0.1);
        let (l, r) = xxz_boundaries(al, c64(0.7, 0.0), c64(-0.3, 0.5), c64(1.1, 0.0), c64(0.2, -0.4), c64(1.3, 0.2), 5)
            .unwrap();
        assert!(det(&l).norm() < 1e-14);
        assert!(det(&r).norm() < 1e-14);
        let (l0, _) = xxz_boundaries(al, ONE, al, ONE, ZERO, ONE, 3).unwrap();
        assert_eq!(l0, [[al, -al], [-al, al]]);
        assert!(xxz_boundaries(al, al, al, al, ZERO, ZERO, 3).is_err());
    }

    #[test]
    fn periodic_two_sites() {
        let h = assemble(&ModelSpec::periodic(2)).unwrap().to_dense();
        let two_h = {
            let l = local_h_xxx();
            DenseMatrix::from_fn(4, 4, |i, j| l.0[i][j] * 2.0)
        };
        assert_eq!(h, two_h);
    }

    #[test]
    fn triangular_is_not_hermitian() {
        let b = XxxBoundary::diagonal(c64(0.1, 0.0), c64(0.2, 0.0), c64(0.3, 0.0), c64(0.4, 0.0));
        let h0 = assemble(&ModelSpec::xxx_open(3, b)).unwrap();
        assert!(h0.is_hermitian(0.0));
        let h1 = assemble(&ModelSpec::xxx_open(3, b.with_mu(ONE))).unwrap();
        assert!(!h1.is_hermitian(1e-12));
    }

    #[test]
    fn assemble_rejects_short_chain() {
        assert!(assemble(&ModelSpec::periodic(1)).is_err());
        assert!(matches!(assemble(&ModelSpec::periodic(MAX_TEST_TOO_LONG)), Err(Error::TooLarge(_))));
    }

    const MAX_TEST_TOO_LONG: usize = crate::basis::MAX_FULL_LENGTH + 1;

    #[test]
    fn matvec_examples() {
        let h = assemble(&ModelSpec::periodic(4)).unwrap();
        assert_eq!(h.matvec(&[ZERO; 16]).unwrap(), vec![ZERO; 16]);
        let mut up = vec![ZERO; 16];
        up[0] = ONE;
        assert!(crate::norm2(&h.matvec(&up).unwrap()) < 1e-15);
        assert!(h.matvec(&[ZERO; 8]).is_err());
    }

    #[test]
    fn commutator_norms() {
        for l in 2..=6 {
            let h = assemble(&ModelSpec::periodic(l)).unwrap();
            assert!(sz_commutator_norm(&h, l).unwrap() < 1e-13);
        }
        let b = XxxBoundary::diagonal(c64(0.1, 0.0), c64(0.2, 0.0), c64(0.3, 0.0), c64(0.4, 0.0));
        let h0 = assemble(&ModelSpec::xxx_open(4, b)).unwrap();
        assert!(sz_commutator_norm(&h0, 4).unwrap() < 1e-13);
        let h1 = assemble(&ModelSpec::xxx_open(4, b.with_mu(ONE))).unwrap();
        assert!(sz_commutator_norm(&h1, 4).unwrap() > 0.1);
    }

    #[test]
    fn sector_assembly_matches_restriction() {
        let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(-0.1, 0.0), c64(0.25, 0.0), c64(0.9, 0.0));
        for spec in [ModelSpec::periodic(5), ModelSpec::xxx_open(5, b)] {
            let full = assemble(&spec).unwrap();
            for m in 0..=5 {
                let basis = SectorBasis::new(5, m).unwrap();
                let direct = assemble_sector(&spec, &basis).unwrap().to_dense();
                let block = full.sector_block(&basis).unwrap();
                for i in 0..basis.len() {
                    for j in 0..basis.len() {
                        assert!((direct[(i, j)] - block[(i, j)]).norm() < 1e-14, "m={m} ({i},{j})");
                    }
                }
            }
        }
        let tri = ModelSpec::xxx_open(4, b.with_mu(ONE));
        assert!(assemble_sector(&tri, &SectorBasis::new(4, 1).unwrap()).is_err());
    }

    #[test]
    fn triangular_zero_pattern() {
        let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(-0.1, 0.0), c64(0.25, 0.0), c64(0.9, 0.0)).with_mu(c64(2.0, 1.0));
        let h = assemble(&ModelSpec::xxx_open(5, b)).unwrap();
        assert!(is_sector_block_upper_triangular(&h));
        let order = sector_ordering(5).unwrap();
        let p = h.permuted(&order).unwrap();
        // in the permuted matrix every entry sits on or above the block diagonal
        let block_of: Vec<u32> = order.iter().map(|&i| i.count_ones()).collect();
        assert!(p.entries().all(|(r, c, _)| block_of[r] <= block_of[c]));
    }
}
