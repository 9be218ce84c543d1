//! Bethe equations for the periodic and open XXX chains and a damped Newton
//! solver seeded by quantum numbers.
//!
//! A solve runs in two stages. When the seed is given as quantum numbers
//! and no seed momentum sits at `k ≡ 0`, the logarithmic form of the
//! equations (phases written through rapidities `λ = ½ cot(k/2)`, branch
//! fixed by the quantum numbers) is solved first. Its root, or the raw seed
//! if that stage fails, then starts Newton on the product form, which alone
//! decides convergence.

use rayon::prelude::*;

use crate::ansatz::{build_amplitudes, predicted_energy, r_minus, r_plus, scattering, AmplitudeRule, Momenta};
use crate::dense::solve_real;
use crate::hamiltonian::{Boundary, Family, ModelSpec, XxxBoundary};
use crate::oracle::spectrum_distance;
use crate::{c64, invalid, Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);
const TAU: f64 = std::f64::consts::TAU;
const PI: f64 = std::f64::consts::PI;
/// Acceptance bound for [`BetheProblem::balanced_residual`].
pub const BALANCE_TOL: f64 = 1e-6;

/// `Π_{ℓ≠j} S(z_ℓ, z_j) − z_j^L` for each `j`.
pub fn residual_periodic(k: &[C64], length: usize) -> Result<Vec<C64>> {
    Ok(sides_periodic(k, length)?.into_iter().map(|(l, r)| l - r).collect())
}

fn sides_periodic(k: &[C64], length: usize) -> Result<Vec<(C64, C64)>> {
    let z: Vec<C64> = k.iter().map(|x| (I * x).exp()).collect();
    (0..z.len())
        .map(|j| {
            let mut lhs = C64::new(1.0, 0.0);
            for (l, &zl) in z.iter().enumerate() {
                if l != j {
                    lhs *= scattering(zl, z[j])?;
                }
            }
            Ok((lhs, z[j].powi(length as i32)))
        })
        .collect()
}

/// `Π_{ℓ≠j} S(z_ℓ, z_j) S(1/z_j, z_ℓ) − z_j^{2L} r₊(z_j) r₋(z_j) / (r₊(1/z_j) r₋(1/z_j))`.
pub fn residual_open(k: &[C64], length: usize, alpha: C64, beta: C64, gamma: C64, delta: C64) -> Result<Vec<C64>> {
    Ok(sides_open(k, length, alpha, beta, gamma, delta)?.into_iter().map(|(l, r)| l - r).collect())
}

fn sides_open(k: &[C64], length: usize, alpha: C64, beta: C64, gamma: C64, delta: C64) -> Result<Vec<(C64, C64)>> {
    let z: Vec<C64> = k.iter().map(|x| (I * x).exp()).collect();
    (0..z.len())
        .map(|j| {
            let zj = z[j];
            let mut lhs = C64::new(1.0, 0.0);
            for (l, &zl) in z.iter().enumerate() {
                if l != j {
                    lhs *= scattering(zl, zj)? * scattering(1.0 / zj, zl)?;
                }
            }
            let num = r_plus(zj, alpha, beta)? * r_minus(zj, gamma, delta)?;
            let den = r_plus(1.0 / zj, alpha, beta)? * r_minus(1.0 / zj, gamma, delta)?;
            if den.norm() < 1e-300 {
                return Err(Error::Singular("open Bethe equation: vanishing boundary factor".into()));
            }
            Ok((lhs, zj.powi(2 * length as i32) * num / den))
        })
        .collect()
}

fn rapidity(k: C64) -> C64 {
    0.5 * (k * 0.5).cos() / (k * 0.5).sin()
}

/// Inverse of `λ = ½ cot(k/2)`: `e^{ik} = (λ + i/2)/(λ − i/2)`.
pub fn momentum_of_rapidity(lambda: C64) -> C64 {
    -I * ((lambda + 0.5 * I) / (lambda - 0.5 * I)).ln()
}

/// Logarithmic periodic equations
/// `L k_j + Σ_{ℓ≠j} 2 atan(λ_j − λ_ℓ) − 2π(I_j + (m − 1)/2)`.
pub fn log_residual_periodic(k: &[C64], length: usize, quantum: &[i64]) -> Vec<C64> {
    let m = k.len();
    let lam: Vec<C64> = k.iter().map(|&x| rapidity(x)).collect();
    (0..m)
        .map(|j| {
            let mut v = length as f64 * k[j];
            for l in 0..m {
                if l != j {
                    v += 2.0 * (lam[j] - lam[l]).atan();
                }
            }
            v - TAU * (quantum[j] as f64 + (m as f64 - 1.0) / 2.0)
        })
        .collect()
}

/// Logarithmic open equations with `c = β − α`, `e = δ − γ`:
/// `2L k_j + 2 atan(2cλ_j/(2+c)) + 2 atan(2eλ_j/(2+e))
///  + Σ_{ℓ≠j} 2[atan(λ_j − λ_ℓ) + atan(λ_j + λ_ℓ)] − 2π I_j`.
pub fn log_residual_open(k: &[C64], length: usize, b: &XxxBoundary, quantum: &[i64]) -> Vec<C64> {
    let c = b.beta - b.alpha;
    let e = b.delta - b.gamma;
    let m = k.len();
    let lam: Vec<C64> = k.iter().map(|&x| rapidity(x)).collect();
    (0..m)
        .map(|j| {
            let mut v = 2.0 * length as f64 * k[j]
                + 2.0 * (2.0 * c * lam[j] / (2.0 + c)).atan()
                + 2.0 * (2.0 * e * lam[j] / (2.0 + e)).atan();
            for l in 0..m {
                if l != j {
                    v += 2.0 * ((lam[j] - lam[l]).atan() + (lam[j] + lam[l]).atan());
                }
            }
            v - TAU * quantum[j] as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Central-difference step for the Jacobian.
    pub fd_step: f64,
    /// Smallest damping factor tried by the line search.
    pub damping_floor: f64,
    /// Run the logarithmic stage for quantum-number seeds.
    pub log_stage: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { tol: 1e-11, max_iter: 200, fd_step: 1e-7, damping_floor: 2f64.powi(-20), log_stage: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Seed {
    Momenta(Vec<C64>),
    QuantumNumbers(Vec<i64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolveStatus {
    Converged,
    /// Iteration cap reached or the line search stalled.
    NotConverged,
    /// A coefficient pole was hit at the seed or could not be avoided.
    Singular,
    /// Converged to momenta the ansatz excludes (`k ≡ 0, π` on open chains,
    /// coinciding momenta, or a pole in the amplitudes).
    Irregular,
}

impl SolveStatus {
    pub fn name(self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::NotConverged => "not-converged",
            SolveStatus::Singular => "singular",
            SolveStatus::Irregular => "irregular",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetheSolution {
    pub family: Family,
    pub length: usize,
    pub count: usize,
    /// Canonical momenta: real parts in `[0, 2π)` (periodic) or `[0, π]`
    /// (open, after `k → −k`), sorted by (real, imaginary).
    pub momenta: Vec<C64>,
    /// The seed this solution was started from.
    pub seed: Seed,
    pub quantum_numbers: Option<Vec<i64>>,
    pub energy: C64,
    pub residual_norm: f64,
    pub iterations: usize,
    /// `residual_norm ≤ tol`.
    pub converged: bool,
    pub status: SolveStatus,
    /// Product-form residual norm after every Newton step, starting point
    /// included.
    pub history: Vec<f64>,
    /// Converged, but the last three residuals did not contract
    /// quadratically (within a factor 10).
    pub slow_convergence: bool,
}

impl BetheSolution {
    pub fn is_accepted(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn momenta(&self) -> Momenta {
        Momenta::new(self.momenta.clone())
    }
}

/// Bethe equations for `count` excitations on a periodic or open XXX chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetheProblem {
    pub spec: ModelSpec,
    pub count: usize,
}

impl BetheProblem {
    pub fn new(spec: ModelSpec, count: usize) -> Result<Self> {
        if matches!(spec.boundary, Boundary::XxzOpen(_)) {
            return invalid("no Bethe equations for the XXZ chain");
        }
        if spec.length < 2 {
            return invalid(format!("chain length {} < 2", spec.length));
        }
        if count > spec.length {
            return invalid(format!("{count} excitations on a chain of length {}", spec.length));
        }
        Ok(Self { spec, count })
    }

    pub fn family(&self) -> Family {
        self.spec.family()
    }

    fn is_open(&self) -> bool {
        self.family() != Family::XxxPeriodic
    }

    /// Largest `|lhs − rhs| / max(|lhs|, |rhs|)` over the equations. Small
    /// absolute residuals with both sides near zero score O(1) here.
    pub fn balanced_residual(&self, k: &[C64]) -> Result<f64> {
        let sides = match self.spec.boundary {
            Boundary::Periodic => sides_periodic(k, self.spec.length)?,
            Boundary::XxxOpen(b) => sides_open(k, self.spec.length, b.alpha, b.beta, b.gamma, b.delta)?,
            Boundary::XxzOpen(_) => return invalid("no Bethe equations for the XXZ chain"),
        };
        Ok(sides.iter().map(|(l, r)| (l - r).norm() / l.norm().max(r.norm()).max(f64::MIN_POSITIVE)).fold(0.0, f64::max))
    }

    pub fn residual(&self, k: &[C64]) -> Result<Vec<C64>> {
        match self.spec.boundary {
            Boundary::Periodic => residual_periodic(k, self.spec.length),
            Boundary::XxxOpen(b) => residual_open(k, self.spec.length, b.alpha, b.beta, b.gamma, b.delta),
            Boundary::XxzOpen(_) => invalid("no Bethe equations for the XXZ chain"),
        }
    }

    fn log_residual(&self, k: &[C64], quantum: &[i64]) -> Vec<C64> {
        match self.spec.boundary {
            Boundary::XxxOpen(b) => log_residual_open(k, self.spec.length, &b, quantum),
            _ => log_residual_periodic(k, self.spec.length, quantum),
        }
    }

    /// Free-magnon seed `2π I/L` (periodic) or `π I/L` (open).
    pub fn seed_momenta(&self, quantum: &[i64]) -> Vec<C64> {
        let scale = if self.is_open() { PI } else { TAU } / self.spec.length as f64;
        quantum.iter().map(|&q| c64(scale * q as f64, 0.0)).collect()
    }

    /// All quantum-number seeds of the sweep: strictly increasing tuples
    /// from `0..L` (periodic) or `1..L+count` (open).
    pub fn quantum_seeds(&self) -> Vec<Seed> {
        let (lo, hi) = if self.is_open() {
            (1, (self.spec.length + self.count) as i64)
        } else {
            (0, self.spec.length as i64)
        };
        combinations(lo, hi, self.count).into_iter().map(Seed::QuantumNumbers).collect()
    }

    /// Complex seeds for bound states that real free-magnon seeds miss:
    /// two-strings `λ₀ ± i/2` with total momentum `2πn/L` (periodic,
    /// `count = 2`) and boundary bound states `z = w^{±1}` with
    /// `w = 1 + β − α` or `1 + δ − γ` (open, `count ≤ 2`).
    pub fn bound_state_seeds(&self) -> Vec<Seed> {
        let l = self.spec.length;
        let mut seeds = Vec::new();
        match self.spec.boundary {
            Boundary::Periodic if self.count == 2 => {
                for n in 1..l {
                    let half = PI * n as f64 / l as f64;
                    let lam0 = 0.5 * half.cos() / half.sin();
                    // slightly off the exact string, where S has a pole
                    let w = c64(0.0, 0.5 * (1.0 + 1e-3));
                    seeds.push(Seed::Momenta(vec![momentum_of_rapidity(c64(lam0, 0.0) + w), momentum_of_rapidity(c64(lam0, 0.0) - w)]));
                }
            }
            Boundary::XxxOpen(b) if (1..=2).contains(&self.count) => {
                let mut bound = Vec::new();
                for w in [1.0 + b.beta - b.alpha, 1.0 + b.delta - b.gamma] {
                    if w.norm() > 1e-6 && (w.norm() - 1.0).abs() > 1e-6 {
                        // off the zero of the boundary factor
                        let log = (w * (1.0 + 1e-3)).ln();
                        bound.push(-I * log);
                        bound.push(I * log);
                    }
                }
                // half-shifted real momenta catch roots pushed below π/L by the boundary phases
                let shifted: Vec<C64> = (1..=l).map(|q| c64(PI * (q as f64 - 0.5) / l as f64, 0.0)).collect();
                if self.count == 1 {
                    seeds.extend(shifted.iter().map(|&k| Seed::Momenta(vec![k])));
                    seeds.extend(bound.iter().map(|&k| Seed::Momenta(vec![k])));
                } else {
                    for (i, &ka) in shifted.iter().enumerate() {
                        for &kc in &shifted[i + 1..] {
                            seeds.push(Seed::Momenta(vec![ka, kc]));
                        }
                    }
                    for (i, &kb) in bound.iter().enumerate() {
                        for q in 1..l {
                            seeds.push(Seed::Momenta(vec![kb, c64(PI * q as f64 / l as f64, 0.0)]));
                        }
                        for &kc in &bound[i + 1..] {
                            seeds.push(Seed::Momenta(vec![kb, kc]));
                        }
                    }
                }
            }
            _ => {}
        }
        seeds
    }

    /// Quantum-number seeds followed by bound-state seeds.
    pub fn sweep_seeds(&self) -> Vec<Seed> {
        let mut seeds = self.quantum_seeds();
        seeds.extend(self.bound_state_seeds());
        seeds
    }

    fn canonical(&self, k: &[C64]) -> Vec<C64> {
        let mut out: Vec<C64> = k
            .iter()
            .map(|&x| {
                let mut re = x.re.rem_euclid(TAU);
                let mut im = x.im;
                if self.is_open() {
                    if re > PI {
                        re -= TAU;
                    }
                    if re < 0.0 || (re == 0.0 && im < 0.0) {
                        re = -re;
                        im = -im;
                    }
                }
                c64(re + 0.0, im + 0.0)
            })
            .collect();
        out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        out
    }

    /// Regular momenta whose amplitudes hit no coefficient pole.
    fn admits_wavefunction(&self, k: &[C64]) -> bool {
        let k = Momenta::new(k.to_vec());
        k.check_regular(self.family()).is_ok()
            && AmplitudeRule::from_boundary(&self.spec.boundary).and_then(|r| build_amplitudes(&k, &r)).is_ok()
    }

    fn coincidence(&self, k: &[C64]) -> bool {
        coinciding(k, self.is_open())
    }

    /// Solve from one seed.
    pub fn solve(&self, seed: &Seed, settings: &SolverSettings) -> Result<BetheSolution> {
        let (start, quantum) = match seed {
            Seed::Momenta(k) => (k.clone(), None),
            Seed::QuantumNumbers(q) => (self.seed_momenta(q), Some(q.clone())),
        };
        if start.len() != self.count {
            return invalid(format!("seed has {} momenta, expected {}", start.len(), self.count));
        }
        if start.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return invalid("non-finite seed momentum");
        }
        let mut k0 = start.clone();
        if let (Some(q), true) = (&quantum, settings.log_stage) {
            if start.iter().all(|&x| (x * 0.5).sin().norm() > 1e-9) {
                let out = newton(|k| Ok(self.log_residual(k, q)), &start, settings, 1e-9, None);
                if out.converged {
                    k0 = out.k;
                }
            }
        }
        let out = newton(|k| self.residual(k), &k0, settings, settings.tol, Some(self.is_open()));
        let out = if out.status == SolveStatus::Singular && k0 != start {
            newton(|k| self.residual(k), &start, settings, settings.tol, Some(self.is_open()))
        } else {
            out
        };
        let coincident = out.converged && (self.coincidence(&out.k) || near_excluded(&out.k, self.is_open()));
        let momenta = self.canonical(&out.k);
        let regular = out.converged
            && self.balanced_residual(&out.k).is_ok_and(|r| r <= BALANCE_TOL)
            && self.admits_wavefunction(&momenta);
        let status = match out.status {
            SolveStatus::Converged if coincident || !regular => SolveStatus::Irregular,
            s => s,
        };
        let energy = predicted_energy(&self.spec, &Momenta::new(momenta.clone()))?;
        let slow = out.converged && {
            let reached = out.history.iter().position(|&r| r <= settings.tol).map_or(out.history.len(), |i| i + 1);
            let h = &out.history[..reached];
            h.len() >= 3 && {
                let (r0, r1, r2) = (h[h.len() - 3], h[h.len() - 2], h[h.len() - 1]);
                r2 * r0 > 10.0 * r1 * r1
            }
        };
        Ok(BetheSolution {
            family: self.family(),
            length: self.spec.length,
            count: self.count,
            momenta,
            seed: seed.clone(),
            quantum_numbers: quantum,
            energy,
            residual_norm: out.history.last().copied().unwrap_or(f64::INFINITY),
            iterations: out.iterations,
            converged: out.converged,
            status,
            history: out.history,
            slow_convergence: slow,
        })
    }

    /// Solve every seed (in parallel), keep accepted solutions and merge
    /// duplicates.
    pub fn sweep(&self, seeds: &[Seed], settings: &SolverSettings) -> Result<SweepReport> {
        let all: Vec<BetheSolution> = seeds.par_iter().map(|s| self.solve(s, settings)).collect::<Result<_>>()?;
        let (accepted, rejected): (Vec<_>, Vec<_>) = all.into_iter().partition(BetheSolution::is_accepted);
        Ok(SweepReport { seeds: seeds.len(), solutions: deduplicate(accepted), rejected })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub seeds: usize,
    /// Accepted, deduplicated solutions sorted by energy.
    pub solutions: Vec<BetheSolution>,
    /// Every seed that did not give an accepted solution, in seed order.
    pub rejected: Vec<BetheSolution>,
}

impl SweepReport {
    pub fn count(&self, status: SolveStatus) -> usize {
        self.rejected.iter().filter(|s| s.status == status).count()
    }
}

fn symmetric_key(s: &BetheSolution) -> Vec<C64> {
    let open = s.family != Family::XxxPeriodic;
    s.momenta
        .iter()
        .map(|k| {
            let z = (I * k).exp();
            if open {
                z + 1.0 / z
            } else {
                z
            }
        })
        .collect()
}

/// Merge solutions equal up to permutations of the momenta and, on open
/// chains, sign flips `k_j → −k_j`. The result is sorted by energy and then
/// by momenta; the first of every group of duplicates is kept.
pub fn deduplicate(mut solutions: Vec<BetheSolution>) -> Vec<BetheSolution> {
    let cmp_c = |a: &C64, b: &C64| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im));
    solutions.sort_by(|a, b| {
        cmp_c(&a.energy, &b.energy)
            .then_with(|| a.momenta.iter().zip(&b.momenta).map(|(x, y)| cmp_c(x, y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal))
            .then_with(|| a.quantum_numbers.cmp(&b.quantum_numbers))
    });
    let mut kept: Vec<(BetheSolution, Vec<C64>)> = Vec::new();
    for s in solutions {
        let key = symmetric_key(&s);
        let dup = kept
            .iter()
            .any(|(t, k)| t.family == s.family && k.len() == key.len() && spectrum_distance(k, &key) < 1e-7);
        if !dup {
            kept.push((s, key));
        }
    }
    kept.into_iter().map(|(s, _)| s).collect()
}

/// Strictly increasing `size`-tuples from `lo..hi`.
fn combinations(lo: i64, hi: i64, size: usize) -> Vec<Vec<i64>> {
    fn rec(next: i64, hi: i64, size: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for v in next..hi {
            cur.push(v);
            rec(v + 1, hi, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(lo, hi, size, &mut Vec::with_capacity(size), &mut out);
    out
}

struct NewtonOutcome {
    k: Vec<C64>,
    history: Vec<f64>,
    iterations: usize,
    converged: bool,
    status: SolveStatus,
}

fn norm_of(r: &Result<Vec<C64>>) -> f64 {
    match r {
        Ok(v) => {
            let n = crate::norm2(v);
            if n.is_finite() {
                n
            } else {
                f64::INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Damped Newton on `f(k) = 0` with `k` split into real and imaginary parts.
fn newton<F>(f: F, start: &[C64], settings: &SolverSettings, tol: f64, guard: Option<bool>) -> NewtonOutcome
where
    F: Fn(&[C64]) -> Result<Vec<C64>>,
{
    let n = start.len();
    let mut k = start.to_vec();
    let r0 = f(&k);
    let mut nr = norm_of(&r0);
    let mut history = vec![nr];
    if !nr.is_finite() {
        return NewtonOutcome { k, history, iterations: 0, converged: false, status: SolveStatus::Singular };
    }
    let mut r = r0.unwrap_or_default();
    let mut perturbed = false;
    let h = settings.fd_step;
    // extra steps once below tolerance: near-singular Jacobians (string
    // solutions) leave the momenta far less accurate than the residual
    let mut polish = POLISH_STEPS;
    for it in 0..settings.max_iter {
        let done = |k: Vec<C64>, history: Vec<f64>, iterations| NewtonOutcome {
            k,
            history,
            iterations,
            converged: true,
            status: SolveStatus::Converged,
        };
        if nr <= tol {
            if polish == 0 {
                return done(k, history, it);
            }
            polish -= 1;
        }
        // 2n x 2n real Jacobian: column 2c is d/d(Re k_c), 2c+1 is d/d(Im k_c)
        let mut jac = vec![vec![0.0; 2 * n]; 2 * n];
        for c in 0..2 * n {
            let dir = if c % 2 == 0 { c64(h, 0.0) } else { c64(0.0, h) };
            let mut kp = k.clone();
            let mut km = k.clone();
            kp[c / 2] += dir;
            km[c / 2] -= dir;
            let (Ok(fp), Ok(fm)) = (f(&kp), f(&km)) else {
                if nr <= tol {
                    return done(k, history, it);
                }
                return NewtonOutcome { k, history, iterations: it, converged: false, status: SolveStatus::Singular };
            };
            for row in 0..n {
                let d = (fp[row] - fm[row]) / (2.0 * h);
                jac[2 * row][c] = d.re;
                jac[2 * row + 1][c] = d.im;
            }
        }
        let rhs: Vec<f64> = r.iter().flat_map(|x| [-x.re, -x.im]).collect();
        let Some(dx) = solve_real(jac, rhs) else {
            if nr <= tol {
                return done(k, history, it);
            }
            return NewtonOutcome { k, history, iterations: it, converged: false, status: SolveStatus::NotConverged };
        };
        let step: Vec<C64> = (0..n).map(|j| c64(dx[2 * j], dx[2 * j + 1])).collect();
        let mut t = 1.0;
        let mut accepted = None;
        while t >= settings.damping_floor {
            let kn: Vec<C64> = k.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let rn = f(&kn);
            let nn = norm_of(&rn);
            if nn < nr {
                accepted = Some((kn, rn.unwrap_or_default(), nn));
                break;
            }
            t *= 0.5;
        }
        let Some((kn, rn, nn)) = accepted else {
            if nr <= tol {
                return done(k, history, it);
            }
            return NewtonOutcome { k, history, iterations: it + 1, converged: false, status: SolveStatus::NotConverged };
        };
        k = kn;
        r = rn;
        nr = nn;
        history.push(nr);
        if guard.is_some_and(|open| coinciding(&k, open)) && nr > tol {
            if perturbed {
                return NewtonOutcome { k, history, iterations: it + 1, converged: false, status: SolveStatus::NotConverged };
            }
            perturbed = true;
            for (j, x) in k.iter_mut().enumerate() {
                *x += 1e-6 * (j + 1) as f64;
            }
            let rp = f(&k);
            nr = norm_of(&rp);
            if !nr.is_finite() {
                return NewtonOutcome { k, history, iterations: it + 1, converged: false, status: SolveStatus::Singular };
            }
            r = rp.unwrap_or_default();
        }
    }
    let converged = nr <= tol;
    let status = if converged { SolveStatus::Converged } else { SolveStatus::NotConverged };
    NewtonOutcome { k, history, iterations: settings.max_iter, converged, status }
}

/// Converged roots this close (in `z = e^{ik}`) to an excluded point are
/// treated as landing on it: Newton approaches such points only to about
/// the square root of its tolerance.
const EXCLUSION_RADIUS: f64 = 1e-6;

const POLISH_STEPS: usize = 4;

fn near_excluded(k: &[C64], open: bool) -> bool {
    let z: Vec<C64> = k.iter().map(|x| (I * x).exp()).collect();
    let close = |a: C64, b: C64| (a - b).norm() < EXCLUSION_RADIUS * a.norm().max(1.0);
    (0..z.len()).any(|i| {
        (open && (close(z[i], c64(1.0, 0.0)) || close(z[i], c64(-1.0, 0.0))))
            || (0..i).any(|j| close(z[i], z[j]) || (open && close(z[i] * z[j], c64(1.0, 0.0))))
    })
}

fn coinciding(k: &[C64], open: bool) -> bool {
    (0..k.len()).any(|i| (0..i).any(|j| (k[i] - k[j]).norm() < 1e-8 || (open && (k[i] + k[j]).norm() < 1e-8)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::XxxBoundary;

    fn open_spec(l: usize) -> ModelSpec {
        ModelSpec::xxx_open(l, XxxBoundary::diagonal(c64(0.3, 0.0), c64(0.1, 0.0), c64(0.2, 0.0), c64(0.4, 0.0)))
    }

    #[test]
    fn periodic_residual_examples() {
        assert!(residual_periodic(&[], 4).unwrap().is_empty());
        let k = [c64(TAU * 2.0 / 6.0, 0.0)];
        assert!(residual_periodic(&k, 6).unwrap()[0].norm() < 1e-14);
        let r = residual_periodic(&[c64(0.3, 0.0), c64(1.1, 0.0)], 6).unwrap();
        assert!(crate::norm2(&r) > 1e-3);
    }

    #[test]
    fn one_magnon_periodic_seed_is_exact() {
        let p = BetheProblem::new(ModelSpec::periodic(6), 1).unwrap();
        let s = p.solve(&Seed::QuantumNumbers(vec![2]), &SolverSettings::default()).unwrap();
        assert!(s.converged);
        assert!((s.momenta[0] - c64(TAU / 3.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn open_equations_invariant_under_reflection() {
        let p = BetheProblem::new(open_spec(4), 1).unwrap();
        let s = p.solve(&Seed::QuantumNumbers(vec![1]), &SolverSettings::default()).unwrap();
        assert!(s.converged);
        let flipped: Vec<C64> = s.momenta.iter().map(|k| -k).collect();
        assert!(crate::norm2(&p.residual(&flipped).unwrap()) < 1e-10);
    }

    #[test]
    fn dedupe_symmetries() {
        let p = BetheProblem::new(open_spec(6), 2).unwrap();
        let st = SolverSettings::default();
        let s = p.solve(&Seed::QuantumNumbers(vec![2, 4]), &st).unwrap();
        assert!(s.is_accepted());
        let mut swapped = s.clone();
        swapped.momenta.reverse();
        let mut flipped = s.clone();
        flipped.momenta[0] = -flipped.momenta[0];
        assert_eq!(deduplicate(vec![s.clone(), swapped, flipped]).len(), 1);
        let other = p.solve(&Seed::QuantumNumbers(vec![3, 4]), &st).unwrap();
        assert_eq!(deduplicate(vec![s, other]).len(), 2);
    }

    #[test]
    fn sweep_seed_counts() {
        let p = BetheProblem::new(ModelSpec::periodic(6), 2).unwrap();
        assert_eq!(p.quantum_seeds().len(), 15);
        assert_eq!(p.bound_state_seeds().len(), 5);
        let p = BetheProblem::new(open_spec(4), 2).unwrap();
        assert_eq!(p.quantum_seeds().len(), 10);
        assert!(BetheProblem::new(ModelSpec::periodic(3), 4).is_err());
    }

    #[test]
    fn seed_length_mismatch() {
        let p = BetheProblem::new(ModelSpec::periodic(6), 2).unwrap();
        assert!(p.solve(&Seed::Momenta(vec![c64(0.1, 0.0)]), &SolverSettings::default()).is_err());
    }
}
