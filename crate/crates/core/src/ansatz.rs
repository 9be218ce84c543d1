//! Scattering, reflection and transmission coefficients, Bethe energies, and
//! assembly of coordinate Bethe wavefunctions for the XXX chain.
//!
//! Amplitudes are indexed by arrangements `k_g` of the momenta (see
//! [`crate::weyl`]). With `z = e^{ik}` the relations used are
//!
//! * `A_{t_j g} = S(z_{g,j}, z_{g,j+1}) A_g` (exchange of slots `j`, `j+1`),
//! * `A_{R₁ g} = R₊(z_{g,1}) A_g` (reflection of slot 1, open chains only),
//! * `A^{(m)}_g = T^{(m)}(z_{g,1}, …, z_{g,m}) A^{(m-1)}_g` (tail of the
//!   triangular boundary).

use std::collections::BTreeMap;

use crate::basis::{full_dimension, SectorBasis, StateVector};
use crate::hamiltonian::{Boundary, Family, ModelSpec, XxxBoundary};
use crate::weyl::{coset_representative, Generator, GroupKind, SignedPermutation, WeylGroup};
use crate::{c64, invalid, Error, Result, C64};

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Relative pole tolerance: `|den| < POLE_TOL · (1 + |num|)` is a pole.
pub const POLE_TOL: f64 = 1e-10;

/// Momenta closer than this (through `|e^{ik_i} - e^{ik_j}|`) count as equal.
pub const COINCIDENCE_TOL: f64 = 1e-8;

fn ratio(num: C64, den: C64, what: &str) -> Result<C64> {
    if !(den.norm() >= POLE_TOL * (1.0 + num.norm())) {
        return Err(Error::Singular(format!("{what}: pole (numerator {num}, denominator {den})")));
    }
    Ok(num / den)
}

/// `S(z₁, z₂) = -(2z₂ - z₁z₂ - 1)/(2z₁ - z₁z₂ - 1)`.
pub fn scattering(z1: C64, z2: C64) -> Result<C64> {
    ratio(-(2.0 * z2 - z1 * z2 - 1.0), 2.0 * z1 - z1 * z2 - 1.0, "S")
}

/// `r₊(z) = (z - 1)(1 - z + β - α)/(z(1 + z))`, the form entering the
/// Bethe equations.
pub fn r_plus(z: C64, alpha: C64, beta: C64) -> Result<C64> {
    ratio((z - 1.0) * (1.0 - z + beta - alpha), z * (1.0 + z), "r+")
}

/// `-r₊(z)`: the sign convention used by the transmission coefficient.
pub fn r_plus_triangular(z: C64, alpha: C64, beta: C64) -> Result<C64> {
    r_plus(z, alpha, beta).map(|v| -v)
}

/// `r₋(z) = (z - 1)/(z + 1)·(1 - z + δ - γ)`.
pub fn r_minus(z: C64, gamma: C64, delta: C64) -> Result<C64> {
    ratio((z - 1.0) * (1.0 - z + delta - gamma), z + 1.0, "r-")
}

/// Reflection factor `R₊(z) = -z²(1 - 1/z + β - α)/(1 - z + β - α)`, equal
/// to `r₊(1/z)/r₊(z)`. `z = 1` is rejected: there the ratio is `0/0`.
pub fn reflection(z: C64, alpha: C64, beta: C64) -> Result<C64> {
    if (z - 1.0).norm() < COINCIDENCE_TOL {
        return Err(Error::Singular("R+: momentum k = 0".into()));
    }
    if z.norm() < POLE_TOL {
        return Err(Error::Singular("R+: z = 0".into()));
    }
    ratio(-z * z * (1.0 - 1.0 / z + beta - alpha), 1.0 - z + beta - alpha, "R+")
}

/// `a(z₁, z₂) = i(2z₂ - z₁z₂ - 1)/(z₁z₂ - 1)`.
pub fn a_coeff(z1: C64, z2: C64) -> Result<C64> {
    ratio(I * (2.0 * z2 - z1 * z2 - 1.0), z1 * z2 - 1.0, "a")
}

/// `T^{(m)}(z₁..z_m) = μ / (r₊(z_m) Π_{j<m} a(z_m, z_j) a(z_j, 1/z_m))`
/// with the sign of [`r_plus_triangular`].
pub fn transmission(z: &[C64], alpha: C64, beta: C64, mu: C64) -> Result<C64> {
    let Some((&zm, rest)) = z.split_last() else {
        return invalid("transmission needs at least one momentum");
    };
    if zm.norm() < POLE_TOL {
        return Err(Error::Singular("T: z = 0".into()));
    }
    let mut den = r_plus_triangular(zm, alpha, beta)?;
    for &zj in rest {
        den *= a_coeff(zm, zj)? * a_coeff(zj, 1.0 / zm)?;
    }
    ratio(mu, den, "T")
}

/// `λ(z) = z + 1/z - 2`.
pub fn lambda(z: C64) -> C64 {
    z + 1.0 / z - 2.0
}

/// `Σ_j (e^{ik_j} + e^{-ik_j} - 2)`.
pub fn energy_periodic(k: &Momenta) -> C64 {
    k.z().into_iter().map(lambda).sum()
}

/// `α + γ + Σ_j λ(e^{ik_j})`.
pub fn energy_open(k: &Momenta, alpha: C64, gamma: C64) -> C64 {
    alpha + gamma + energy_periodic(k)
}

/// Quasi-momenta `k₁..k_n` (complex).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Momenta(Vec<C64>);

impl Momenta {
    pub fn new(k: Vec<C64>) -> Self {
        Self(k)
    }

    pub fn real(k: &[f64]) -> Self {
        Self(k.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `z_j = e^{ik_j}`.
    pub fn z(&self) -> Vec<C64> {
        self.0.iter().map(|k| (I * k).exp()).collect()
    }

    /// Reject momenta the ansatz cannot carry.
    ///
    /// All families: finite, pairwise distinct modulo 2π. Open chains
    /// additionally exclude `k ≡ 0, π` and `k_i ≡ -k_j`.
    pub fn check_regular(&self, family: Family) -> Result<()> {
        if self.0.iter().any(|k| !k.re.is_finite() || !k.im.is_finite()) {
            return invalid("non-finite momentum");
        }
        let z = self.z();
        let open = family != Family::XxxPeriodic;
        for (i, &zi) in z.iter().enumerate() {
            if open && ((zi - 1.0).norm() < COINCIDENCE_TOL || (zi + 1.0).norm() < COINCIDENCE_TOL) {
                return Err(Error::Singular(format!("momentum k{} ≡ 0 or π on an open chain", i + 1)));
            }
            for (j, &zj) in z.iter().enumerate().take(i) {
                if (zi - zj).norm() < COINCIDENCE_TOL {
                    return Err(Error::Singular(format!("momenta k{} and k{} coincide", j + 1, i + 1)));
                }
                if open && (zi * zj - 1.0).norm() < COINCIDENCE_TOL {
                    return Err(Error::Singular(format!("momenta k{} and -k{} coincide", j + 1, i + 1)));
                }
            }
        }
        Ok(())
    }
}

/// Which relations generate the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeRule {
    /// `S_n`, scattering only.
    Periodic,
    /// `WB_n`, scattering and reflection, plus transmission when `μ ≠ 0`.
    Open(XxxBoundary),
}

impl AmplitudeRule {
    pub fn from_boundary(b: &Boundary) -> Result<Self> {
        match *b {
            Boundary::Periodic => Ok(Self::Periodic),
            Boundary::XxxOpen(x) => Ok(Self::Open(x)),
            Boundary::XxzOpen(_) => invalid("no coordinate Bethe wavefunction for the XXZ chain"),
        }
    }

    fn group_kind(&self) -> GroupKind {
        match self {
            Self::Periodic => GroupKind::Symmetric,
            Self::Open(_) => GroupKind::Hyperoctahedral,
        }
    }
}

fn slot_z(g: &SignedPermutation, z: &[C64], j: usize) -> C64 {
    let (p, neg) = g.slot(j);
    if neg {
        1.0 / z[p]
    } else {
        z[p]
    }
}

fn generator_factor(rule: &AmplitudeRule, g: &SignedPermutation, w: Generator, z: &[C64]) -> Result<C64> {
    match (w, rule) {
        (Generator::Transposition(j), _) => scattering(slot_z(g, z, j - 1), slot_z(g, z, j)),
        (Generator::Reflection, AmplitudeRule::Open(b)) => reflection(slot_z(g, z, 0), b.alpha, b.beta),
        (Generator::Reflection, AmplitudeRule::Periodic) => invalid("reflection on a periodic chain"),
    }
}

/// Amplitude obtained by applying the relations along `word`, starting from
/// `A_id = 1`.
pub fn amplitude_along_word(k: &Momenta, rule: &AmplitudeRule, word: &[Generator]) -> Result<C64> {
    let z = k.z();
    let mut g = SignedPermutation::identity(k.len());
    let mut a = ONE;
    for &w in word {
        a *= generator_factor(rule, &g, w, &z)?;
        g = g.then(w)?;
    }
    Ok(a)
}

/// Amplitudes `A^{(n,m)}` for every tail size `m`. Level `m` is keyed by the
/// coset representatives of `WB_n / WB_m`; level 0 by group elements.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    n: usize,
    levels: Vec<BTreeMap<SignedPermutation, C64>>,
}

impl AmplitudeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored levels (1 without a tail, `n + 1` with one).
    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, m: usize) -> Option<&BTreeMap<SignedPermutation, C64>> {
        self.levels.get(m)
    }

    /// `A^{(n,m)}_g` for any element `g` (reduced to its coset first).
    /// Missing levels read as zero.
    pub fn get(&self, m: usize, g: &SignedPermutation) -> Result<C64> {
        let Some(level) = self.levels.get(m) else {
            return if m <= self.n { Ok(C64::new(0.0, 0.0)) } else { invalid(format!("tail size {m} > n")) };
        };
        let r = coset_representative(g, m)?;
        level
            .get(&r)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("{g:?} is not in the amplitude group")))
    }
}

/// Compute all amplitudes along canonical words. The tail levels are only
/// built for open chains with `μ ≠ 0`.
pub fn build_amplitudes(k: &Momenta, rule: &AmplitudeRule) -> Result<AmplitudeTable> {
    let n = k.len();
    let z = k.z();
    let group = WeylGroup::cached(rule.group_kind(), n)?;
    let mut values = Vec::with_capacity(group.len());
    for i in 0..group.len() {
        let a = match group.parent(i) {
            None => ONE,
            Some((p, w)) => values[p] * generator_factor(rule, &group.elements()[p], w, &z)?,
        };
        values.push(a);
    }
    let level0: BTreeMap<_, _> = group.elements().iter().cloned().zip(values).collect();
    let mut levels = vec![level0];
    if let AmplitudeRule::Open(b) = rule {
        if b.mu != C64::new(0.0, 0.0) {
            for m in 1..=n {
                let mut level = BTreeMap::new();
                for g in group.elements() {
                    let r = coset_representative(g, m)?;
                    if level.contains_key(&r) {
                        continue;
                    }
                    let zs: Vec<C64> = (0..m).map(|j| slot_z(&r, &z, j)).collect();
                    let prev = levels[m - 1][&coset_representative(&r, m - 1)?];
                    level.insert(r, transmission(&zs, b.alpha, b.beta, b.mu)? * prev);
                }
                levels.push(level);
            }
        }
    }
    Ok(AmplitudeTable { n, levels })
}

/// A Bethe vector in the full `2^L` space with its predicted energy.
#[derive(Debug, Clone)]
pub struct BetheState {
    pub vector: StateVector,
    pub energy: C64,
}

/// Predicted energy of the Bethe state for `spec`.
pub fn predicted_energy(spec: &ModelSpec, k: &Momenta) -> Result<C64> {
    match spec.boundary {
        Boundary::Periodic => Ok(energy_periodic(k)),
        Boundary::XxxOpen(b) => Ok(energy_open(k, b.alpha, b.gamma)),
        Boundary::XxzOpen(_) => invalid("no Bethe energy for the XXZ chain"),
    }
}

/// Assemble `Ψ = Σ_m Σ_{x_{m+1}<…<x_n} Σ_{g∈G_m} A^{(n,m)}_g Π_{j>m} z_{g,j}^{x_j} |x⟩`.
///
/// The momenta need not satisfy the Bethe equations.
pub fn build_state(spec: &ModelSpec, k: &Momenta) -> Result<BetheState> {
    let rule = AmplitudeRule::from_boundary(&spec.boundary)?;
    let length = spec.length;
    let n = k.len();
    if n > length {
        return invalid(format!("{n} momenta on a chain of length {length}"));
    }
    k.check_regular(spec.family())?;
    let dim = full_dimension(length)?;
    let table = build_amplitudes(k, &rule)?;
    let z = k.z();
    let mut psi = vec![C64::new(0.0, 0.0); dim];
    for m in 0..table.levels() {
        let terms: Vec<(C64, Vec<C64>)> = table.levels[m]
            .iter()
            .map(|(r, &a)| (a, (m..n).map(|j| slot_z(r, &z, j)).collect()))
            .collect();
        let basis = SectorBasis::new(length, n - m)?;
        for (idx, &mask) in basis.masks().iter().enumerate() {
            let xs = basis.config_of(idx)?;
            let mut acc = C64::new(0.0, 0.0);
            for (a, zs) in &terms {
                let phase: C64 = zs.iter().zip(xs.downs()).map(|(zj, &x)| zj.powi(x as i32)).product();
                acc += a * phase;
            }
            psi[mask as usize] += acc;
        }
    }
    Ok(BetheState { vector: psi, energy: predicted_energy(spec, k)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{WeylGroup, WordOrder};

    fn e(k: f64) -> C64 {
        (I * k).exp()
    }

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    #[test]
    fn scattering_golden() {
        let (z1, z2) = (e(0.7), e(1.3));
        let expected = c64(-0.327141381916368303, -0.944975405096793434);
        assert!(close(scattering(z1, z2).unwrap(), expected, 1e-14));
        // expanded real and imaginary parts of numerator and denominator
        let num = -(2.0 * z2 - z1 * z2 - 1.0);
        let den = 2.0 * z1 - z1 * z2 - 1.0;
        let d2 = den.norm_sqr();
        let alt = c64((num.re * den.re + num.im * den.im) / d2, (num.im * den.re - num.re * den.im) / d2);
        assert!(close(alt, expected, 1e-14));
    }

    #[test]
    fn r_minus_golden() {
        let got = r_minus(e(0.3), c64(0.2, 0.0), c64(0.5, 0.0)).unwrap();
        assert!(close(got, c64(0.0446635108743939771, 0.0520907948727390863), 1e-14));
        assert_eq!(r_minus(ONE, c64(0.2, 0.0), c64(0.5, 0.0)).unwrap(), C64::new(0.0, 0.0));
        assert!(r_minus(-ONE, ONE, ONE).is_err());
    }

    #[test]
    fn a_golden_and_pole() {
        let got = a_coeff(e(0.4), e(0.9)).unwrap();
        assert!(close(got, c64(0.285579156311998461, 0.408806207326526744), 1e-14));
        assert!(matches!(a_coeff(ONE, ONE), Err(Error::Singular(_))));
        assert!(a_coeff(e(0.4), e(-0.4)).is_err());
    }

    #[test]
    fn transmission_golden() {
        let (al, be, mu) = (c64(0.1, 0.0), c64(0.7, 0.0), ONE);
        let t2 = transmission(&[e(0.5), e(1.1)], al, be, mu).unwrap();
        assert!(close(t2, c64(-0.781903864782847349, 0.144619283382169509), 1e-13));
        let t1 = transmission(&[e(0.5)], al, be, mu).unwrap();
        assert!(close(t1, c64(-3.99626050964802014, 2.10540665073234051), 1e-13));
        assert_eq!(transmission(&[e(0.5), e(1.1)], al, be, C64::new(0.0, 0.0)).unwrap(), C64::new(0.0, 0.0));
        assert!(transmission(&[], al, be, mu).is_err());
    }

    #[test]
    fn reflection_rejects_zero_momentum() {
        assert!(matches!(reflection(ONE, c64(0.1, 0.0), c64(0.3, 0.0)), Err(Error::Singular(_))));
        assert_eq!(r_plus(ONE, c64(0.1, 0.0), c64(0.3, 0.0)).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn energies() {
        assert_eq!(energy_periodic(&Momenta::default()), C64::new(0.0, 0.0));
        assert!(close(energy_periodic(&Momenta::real(&[std::f64::consts::PI])), c64(-4.0, 0.0), 1e-15));
        let k = Momenta::real(&[std::f64::consts::PI / 3.0]);
        assert!(close(energy_periodic(&k), c64(-1.0, 0.0), 1e-15));
        assert_eq!(energy_open(&Momenta::default(), c64(0.3, 0.0), c64(0.2, 0.0)), c64(0.5, 0.0));
        let z = e(0.77);
        assert!(close(lambda(z), (z - 1.0) * (z - 1.0) / z, 1e-15));
    }

    #[test]
    fn regularity() {
        let pi = std::f64::consts::PI;
        assert!(Momenta::real(&[0.0, 1.0]).check_regular(Family::XxxPeriodic).is_ok());
        assert!(Momenta::real(&[0.0, 1.0]).check_regular(Family::XxxOpen).is_err());
        assert!(Momenta::real(&[pi]).check_regular(Family::XxxOpen).is_err());
        assert!(Momenta::real(&[0.5, -0.5]).check_regular(Family::XxxOpen).is_err());
        assert!(Momenta::real(&[0.5, -0.5]).check_regular(Family::XxxPeriodic).is_ok());
        assert!(Momenta::real(&[0.5, 0.5 + 2.0 * pi]).check_regular(Family::XxxPeriodic).is_err());
    }

    #[test]
    fn one_magnon_reflection_table() {
        let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(0.1, 0.0), c64(0.2, 0.0), c64(0.4, 0.0));
        let k = Momenta::real(&[0.9]);
        let t = build_amplitudes(&k, &AmplitudeRule::Open(b)).unwrap();
        let r1 = SignedPermutation::generator(1, Generator::Reflection).unwrap();
        assert_eq!(t.get(0, &SignedPermutation::identity(1)).unwrap(), ONE);
        assert!(close(t.get(0, &r1).unwrap(), reflection(e(0.9), b.alpha, b.beta).unwrap(), 1e-15));
        assert_eq!(t.levels(), 1);
        assert_eq!(t.get(1, &r1).unwrap(), C64::new(0.0, 0.0));
    }

    #[test]
    fn two_word_agreement_wb2() {
        let b = XxxBoundary::diagonal(c64(0.3, 0.0), c64(-0.2, 0.0), c64(0.2, 0.0), c64(0.4, 0.0));
        let rule = AmplitudeRule::Open(b);
        let k = Momenta::new(vec![c64(0.7, 0.1), c64(1.9, -0.05)]);
        let table = build_amplitudes(&k, &rule).unwrap();
        let rev = WeylGroup::with_order(GroupKind::Hyperoctahedral, 2, WordOrder::Reversed).unwrap();
        for g in rev.elements() {
            let a = amplitude_along_word(&k, &rule, &rev.word(g).unwrap()).unwrap();
            assert!(close(a, table.get(0, g).unwrap(), 1e-12), "{g:?}");
        }
    }

    #[test]
    fn one_magnon_periodic_plane_wave() {
        let l = 6;
        let k = Momenta::real(&[2.0 * std::f64::consts::PI / l as f64]);
        let st = build_state(&ModelSpec::periodic(l), &k).unwrap();
        for x in 1..=l {
            assert!(close(st.vector[1 << (x - 1)], e(k.as_slice()[0].re * x as f64), 1e-14));
        }
        assert!(close(st.energy, c64(-1.0, 0.0), 1e-14));
    }
}
