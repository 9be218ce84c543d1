//! Dense eigenvalues of general complex matrices, eigenpair residuals and
//! matching of predicted energies against an exact spectrum.
//!
//! The eigensolver reduces to upper Hessenberg form with Householder
//! reflections and then runs single-shift complex QR (Wilkinson shifts,
//! Givens rotations) on the active unreduced block, deflating from the
//! bottom. Eigenvectors come from inverse iteration on the original matrix.

use crate::dense::{DenseMatrix, Lu};
use crate::hamiltonian::OperatorMatrix;
use crate::{c64, invalid, norm2, Error, Result, C64};

/// Largest dimension handled by the dense solver.
pub const MAX_DENSE_DIM: usize = 4096;

/// QR sweeps allowed per eigenvalue before giving up on it.
const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    /// Eigenvalues in the order they deflated (bottom of the matrix first is
    /// not guaranteed; use [`SpectrumReport::sorted`] for a canonical order).
    pub eigenvalues: Vec<C64>,
    /// `false` for values read off a block whose QR iteration hit the cap.
    pub converged: Vec<bool>,
    pub iterations: usize,
    pub deflations: usize,
    /// `‖A v − λ v‖ / (‖A‖_∞ ‖v‖)` per eigenvalue, when eigenvectors were
    /// requested.
    pub backward_errors: Option<Vec<f64>>,
}

impl SpectrumReport {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }

    /// Eigenvalues sorted by (real, imaginary).
    pub fn sorted(&self) -> Vec<C64> {
        sorted_by_parts(&self.eigenvalues)
    }
}

pub fn sorted_by_parts(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

fn check_dim(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return invalid(format!("{}x{} matrix is not square", a.rows(), a.cols()));
    }
    if a.rows() > MAX_DENSE_DIM {
        return Err(Error::TooLarge(format!("dense dimension {} > {MAX_DENSE_DIM}", a.rows())));
    }
    Ok(())
}

/// Reduce to upper Hessenberg form by unitary similarity.
pub fn hessenberg(a: &DenseMatrix) -> Result<DenseMatrix> {
    check_dim(a)?;
    let n = a.rows();
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = norm2(&v);
        if xnorm == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { v[0] / v[0].norm() };
        v[0] += phase * xnorm;
        let vn = norm2(&v);
        if vn == 0.0 {
            continue;
        }
        for x in &mut v {
            *x /= vn;
        }
        for j in k..n {
            let s: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] -= 2.0 * vi * s;
            }
        }
        for i in 0..n {
            let s: C64 = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] -= 2.0 * s * vj.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    Ok(h)
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = an.hypot(b.norm());
    (an / r, (a / an) * b.conj() / r)
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mid = (a + d) * 0.5;
    let (l1, l2) = (mid + disc, mid - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR step `H - σ = QR`, `H ← RQ + σ` on rows/columns `lo..=hi`.
fn qr_step(h: &mut DenseMatrix, lo: usize, hi: usize, sigma: C64) {
    for i in lo..=hi {
        h[(i, i)] -= sigma;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let (x, y) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = c * x + s * y;
            h[(k + 1, j)] = -s.conj() * x + c * y;
        }
        h[(k + 1, k)] = ZERO;
        rots.push((c, s));
    }
    for (off, &(c, s)) in rots.iter().enumerate() {
        let k = lo + off;
        for i in lo..=(k + 1).min(hi) {
            let (x, y) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = c * x + s.conj() * y;
            h[(i, k + 1)] = -s * x + c * y;
        }
    }
    for i in lo..=hi {
        h[(i, i)] += sigma;
    }
}

/// All eigenvalues of a square complex matrix (with multiplicity).
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<SpectrumReport> {
    let mut h = hessenberg(a)?;
    let n = h.rows();
    let anorm = a.frobenius_norm();
    let mut eigenvalues = vec![ZERO; n];
    let mut converged = vec![true; n];
    let mut iterations = 0;
    let mut deflations = 0;
    let mut hi = n;
    let mut since_deflation = 0;
    while hi > 0 {
        let top = hi - 1;
        // find the start of the unreduced block ending at `top`
        let mut lo = top;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if scale == 0.0 {
                scale = anorm;
            }
            if sub <= f64::EPSILON * scale || sub <= f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == top {
            eigenvalues[top] = h[(top, top)];
            hi -= 1;
            deflations += 1;
            since_deflation = 0;
            continue;
        }
        if since_deflation >= MAX_SWEEPS_PER_EIGENVALUE {
            for i in lo..=top {
                eigenvalues[i] = h[(i, i)];
                converged[i] = false;
            }
            hi = lo;
            since_deflation = 0;
            continue;
        }
        since_deflation += 1;
        iterations += 1;
        let sigma = if since_deflation % 11 == 0 {
            // exceptional shift to break cycles
            h[(top, top)] + c64(0.75, 0.5) * h[(top, top - 1)].norm()
        } else {
            wilkinson_shift(h[(top - 1, top - 1)], h[(top - 1, top)], h[(top, top - 1)], h[(top, top)])
        };
        qr_step(&mut h, lo, top, sigma);
    }
    Ok(SpectrumReport { eigenvalues, converged, iterations, deflations, backward_errors: None })
}

/// Eigenvector for an (approximate) eigenvalue by inverse iteration.
/// Returns the unit vector and its backward error.
pub fn inverse_iteration(a: &DenseMatrix, lambda: C64) -> Result<(Vec<C64>, f64)> {
    check_dim(a)?;
    let n = a.rows();
    if n == 0 {
        return invalid("empty matrix");
    }
    let anorm = a.inf_norm().max(f64::MIN_POSITIVE);
    let mut shifted = a.clone();
    // nudge the shift off the exact eigenvalue so the factorization is usable
    shifted.add_diagonal(-(lambda + c64(1.0, 0.7) * (anorm * 1e-13)));
    let lu = Lu::factor(&shifted, anorm * f64::EPSILON)?;
    let mut v: Vec<C64> = (0..n).map(|i| c64(1.0 + ((i * 7919) % 13) as f64 * 0.1, (i % 5) as f64 * 0.05)).collect();
    let mut best = (v.clone(), f64::INFINITY);
    for _ in 0..4 {
        let w = lu.solve(&v)?;
        let wn = norm2(&w);
        if !(wn.is_finite() && wn > 0.0) {
            break;
        }
        v = w.into_iter().map(|x| x / wn).collect();
        let err = backward_error(a, &v, lambda)?;
        if err < best.1 {
            best = (v.clone(), err);
        }
        if err <= 1e-14 {
            break;
        }
    }
    Ok(best)
}

fn backward_error(a: &DenseMatrix, v: &[C64], lambda: C64) -> Result<f64> {
    let av = a.matvec(v)?;
    let r: Vec<C64> = av.iter().zip(v).map(|(x, y)| x - lambda * y).collect();
    Ok(norm2(&r) / (a.inf_norm().max(f64::MIN_POSITIVE) * norm2(v)))
}

/// Eigenvalues plus eigenvectors (inverse iteration) and backward errors.
pub fn dense_eigenpairs(a: &DenseMatrix) -> Result<(SpectrumReport, Vec<Vec<C64>>)> {
    let mut report = dense_eigenvalues(a)?;
    let mut vectors = Vec::with_capacity(report.len());
    let mut errs = Vec::with_capacity(report.len());
    for &l in &report.eigenvalues {
        let (v, e) = inverse_iteration(a, l)?;
        vectors.push(v);
        errs.push(e);
    }
    report.backward_errors = Some(errs);
    Ok((report, vectors))
}

/// Spectrum of a sparse operator through explicit dense conversion.
pub fn operator_spectrum(h: &OperatorMatrix) -> Result<SpectrumReport> {
    if h.dim() > MAX_DENSE_DIM {
        return Err(Error::TooLarge(format!("dense dimension {} > {MAX_DENSE_DIM}", h.dim())));
    }
    dense_eigenvalues(&h.to_dense())
}

fn residual_norm(h: &OperatorMatrix, psi: &[C64], e: C64) -> Result<(f64, f64)> {
    let pn = norm2(psi);
    if !(pn > 0.0) {
        return invalid("eigenpair residual of a zero vector");
    }
    let hp = h.matvec(psi)?;
    let r: Vec<C64> = hp.iter().zip(psi).map(|(x, y)| x - e * y).collect();
    Ok((norm2(&r), pn))
}

/// `‖HΨ − EΨ‖ / (‖H‖_∞ ‖Ψ‖)`.
pub fn eigenpair_residual(h: &OperatorMatrix, psi: &[C64], e: C64) -> Result<f64> {
    let (r, pn) = residual_norm(h, psi, e)?;
    Ok(r / (h.inf_norm().max(f64::MIN_POSITIVE) * pn))
}

/// `‖HΨ − EΨ‖ / ‖Ψ‖`.
pub fn relative_residual(h: &OperatorMatrix, psi: &[C64], e: C64) -> Result<f64> {
    let (r, pn) = residual_norm(h, psi, e)?;
    Ok(r / pn)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchPair {
    pub predicted: C64,
    /// Matched exact eigenvalue, or the nearest one for unmatched entries.
    pub exact: Option<C64>,
    /// Index into the (real, imaginary)-sorted exact spectrum.
    pub exact_index: Option<usize>,
    pub distance: f64,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    /// One entry per prediction, in input order.
    pub pairs: Vec<MatchPair>,
    /// Indices of predictions with no exact eigenvalue within tolerance.
    pub unmatched: Vec<usize>,
    /// Fraction of exact eigenvalues consumed by a match.
    pub coverage: f64,
}

impl MatchReport {
    pub fn all_matched(&self) -> bool {
        self.unmatched.is_empty()
    }

    pub fn max_distance(&self) -> f64 {
        self.pairs.iter().filter(|p| p.matched).map(|p| p.distance).fold(0.0, f64::max)
    }
}

/// Greedy matching: candidate pairs within `tol` are taken in order of
/// increasing distance, each exact eigenvalue at most once. Ties go to the
/// smaller index in the (real, imaginary)-sorted exact list.
pub fn match_spectra(predicted: &[C64], exact: &[C64], tol: f64) -> MatchReport {
    let exact = sorted_by_parts(exact);
    let mut cands = Vec::new();
    for (p, &e) in predicted.iter().enumerate() {
        for (x, &v) in exact.iter().enumerate() {
            let d = (e - v).norm();
            if d <= tol {
                cands.push((d, x, p));
            }
        }
    }
    cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut taken = vec![false; exact.len()];
    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; predicted.len()];
    for (d, x, p) in cands {
        if !taken[x] && assigned[p].is_none() {
            taken[x] = true;
            assigned[p] = Some((x, d));
        }
    }
    let mut pairs = Vec::with_capacity(predicted.len());
    let mut unmatched = Vec::new();
    for (p, &e) in predicted.iter().enumerate() {
        match assigned[p] {
            Some((x, d)) => pairs.push(MatchPair {
                predicted: e,
                exact: Some(exact[x]),
                exact_index: Some(x),
                distance: d,
                matched: true,
            }),
            None => {
                unmatched.push(p);
                let nearest = exact
                    .iter()
                    .enumerate()
                    .map(|(x, v)| ((e - v).norm(), x))
                    .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                pairs.push(MatchPair {
                    predicted: e,
                    exact: nearest.map(|(_, x)| exact[x]),
                    exact_index: nearest.map(|(_, x)| x),
                    distance: nearest.map_or(f64::INFINITY, |(d, _)| d),
                    matched: false,
                });
            }
        }
    }
    let used = taken.iter().filter(|&&t| t).count();
    let coverage = if exact.is_empty() { 0.0 } else { used as f64 / exact.len() as f64 };
    MatchReport { pairs, unmatched, coverage }
}

/// Largest pairing distance between two multisets of equal size (greedy
/// closest-first pairing); `∞` when the sizes differ.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let r = match_spectra(a, b, f64::INFINITY);
    r.pairs.iter().map(|p| p.distance).fold(0.0, f64::max)
}
