//! Open XXZ chain: boundary-parameter constraints, the site-dependent
//! gauged basis and numerical checks of the local telescoping identities.

use std::fmt;

use crate::basis::full_dimension;
use crate::hamiltonian::{assemble_xxz_bulk, local_h_xxz, ModelSpec, XxzBoundary};
use crate::{invalid, norm2, Error, Result, C64};

/// Absolute tolerance on a constraint defect.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Tolerance for an identity residual to count as satisfied.
pub const IDENTITY_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XxzParams {
    pub q: C64,
    pub alpha: C64,
    pub beta: C64,
    pub gamma: C64,
    pub delta: C64,
    pub s: C64,
    pub length: usize,
}

impl XxzParams {
    pub fn validate(&self) -> Result<()> {
        if self.q == ZERO {
            return invalid("XXZ deformation Q must be non-zero");
        }
        if self.length < 2 {
            return invalid(format!("chain length {} < 2", self.length));
        }
        Ok(())
    }

    pub fn boundary(&self) -> XxzBoundary {
        XxzBoundary { q: self.q, alpha: self.alpha, beta: self.beta, gamma: self.gamma, delta: self.delta, s: self.s }
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec::xxz_open(self.length, self.boundary())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `c₊(z₁, z₂) = z₁/z₂`, `c₋ = 1`.
pub fn c_eps(sign: Sign, z1: C64, z2: C64) -> Result<C64> {
    match sign {
        Sign::Minus => Ok(ONE),
        Sign::Plus if z2 == ZERO => Err(Error::Singular("c+: division by zero".into())),
        Sign::Plus => Ok(z1 / z2),
    }
}

/// One factor `c_ε(α, γ) c_ε′(β, δ) − Q^{L−1−n} e^{−s}` of the constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintTriplet {
    pub n: usize,
    pub eps: Sign,
    pub eps_prime: Sign,
    /// `Err` carries the reason a row could not be evaluated.
    pub defect: std::result::Result<C64, String>,
}

impl ConstraintTriplet {
    pub fn satisfied(&self) -> bool {
        matches!(self.defect, Ok(d) if d.norm() <= CONSTRAINT_TOL)
    }
}

const SIGNS: [(Sign, Sign); 4] =
    [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];

/// All `4L` rows, ordered by `n`, then `(ε, ε′)` with `+` first.
pub fn constraint_defects(p: &XxzParams) -> Result<Vec<ConstraintTriplet>> {
    p.validate()?;
    let mut rows = Vec::with_capacity(4 * p.length);
    for n in 0..p.length {
        let rhs = p.q.powi((p.length - 1 - n) as i32) * (-p.s).exp();
        for (eps, eps_prime) in SIGNS {
            let defect = c_eps(eps, p.alpha, p.gamma)
                .and_then(|a| Ok(a * c_eps(eps_prime, p.beta, p.delta)?))
                .map(|c| c - rhs)
                .map_err(|e| e.to_string());
            rows.push(ConstraintTriplet { n, eps, eps_prime, defect });
        }
    }
    Ok(rows)
}

/// The `s` (principal logarithm) that makes triplet `(n, ε, ε′)` vanish:
/// `e^{s} = Q^{L−1−n} / (c_ε(α, γ) c_ε′(β, δ))`.
pub fn engineer_s(p: &XxzParams, n: usize, eps: Sign, eps_prime: Sign) -> Result<C64> {
    p.validate()?;
    if n >= p.length {
        return invalid(format!("constraint index n = {n} outside 0..{}", p.length));
    }
    let c = c_eps(eps, p.alpha, p.gamma)? * c_eps(eps_prime, p.beta, p.delta)?;
    if c == ZERO {
        return Err(Error::Singular("c_ε c_ε′ = 0 admits no finite s".into()));
    }
    Ok((p.q.powi((p.length - 1 - n) as i32) / c).ln())
}

/// `(1, Q^{1−i} p)` attached to site `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugedVector {
    pub site: usize,
    pub parameter: C64,
    pub components: [C64; 2],
}

pub fn gauged_vector(site: usize, parameter: C64, q: C64) -> Result<GaugedVector> {
    if q == ZERO {
        return invalid("Q must be non-zero");
    }
    if site == 0 {
        return invalid("sites are numbered from 1");
    }
    let scale = q.powi(1 - site as i32);
    Ok(GaugedVector { site, parameter, components: [ONE, scale * parameter] })
}

/// `|t⟩ = (Q⁻¹ − Q, 0)`.
pub fn telescope_vector(q: C64) -> Result<[C64; 2]> {
    if q == ZERO {
        return invalid("Q must be non-zero");
    }
    Ok([1.0 / q - q, ZERO])
}

/// How the gauge parameter is dressed on the two sites of a bond.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GaugeConvention {
    /// `(1, Q^{1−i} p)` on site `i` and `(1, Q^{−i} p)` on site `i + 1`.
    SiteDressed,
    /// Site dressing plus `p → Q p` across the bond, so both sites carry
    /// `(1, Q^{1−i} p)`.
    Chained,
}

impl GaugeConvention {
    pub const ALL: [GaugeConvention; 2] = [GaugeConvention::SiteDressed, GaugeConvention::Chained];

    pub fn name(self) -> &'static str {
        match self {
            GaugeConvention::SiteDressed => "site-dressed",
            GaugeConvention::Chained => "chained",
        }
    }

    /// The 2-vector for parameter `p` at `site` when the bond starts at
    /// `bond_start`.
    fn vector(self, p: C64, q: C64, site: usize, bond_start: usize) -> Result<[C64; 2]> {
        let p = match self {
            GaugeConvention::SiteDressed => p,
            GaugeConvention::Chained => p * q.powi((site - bond_start) as i32),
        };
        Ok(gauged_vector(site, p, q)?.components)
    }
}

fn kron(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

fn diff_norm(a: &[C64; 4], b: &[C64; 4]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm2(&d)
}

/// Residual norms of the four local identities on the bond `(site, site+1)`:
///
/// * `h|u⟩⊗|u⟩ = 0`
/// * `h|d⟩⊗|d⟩ = |t⟩⊗|d⟩ − |d⟩⊗|t⟩`
/// * `h|d⟩⊗|u⟩ = Q⁻¹|u⟩⊗|d⟩ − |d⟩⊗|u⟩ − |d⟩⊗|t⟩`
/// * `h|u⟩⊗|d⟩ = Q|d⟩⊗|u⟩ − |u⟩⊗|d⟩ + |u⟩⊗|t⟩`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelescopingResiduals {
    pub uu: f64,
    pub dd: f64,
    pub du: f64,
    pub ud: f64,
}

impl TelescopingResiduals {
    pub fn as_array(&self) -> [f64; 4] {
        [self.uu, self.dd, self.du, self.ud]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

pub fn telescoping_check(
    q: C64,
    u: C64,
    d: C64,
    site: usize,
    convention: GaugeConvention,
) -> Result<TelescopingResiduals> {
    if u == d {
        return invalid("gauge parameters u and d must differ");
    }
    let h = local_h_xxz(q)?;
    let t = telescope_vector(q)?;
    let (i, j) = (site, site + 1);
    let u1 = convention.vector(u, q, i, i)?;
    let u2 = convention.vector(u, q, j, i)?;
    let d1 = convention.vector(d, q, i, i)?;
    let d2 = convention.vector(d, q, j, i)?;
    let comb = |terms: &[(C64, [C64; 4])]| {
        let mut out = [ZERO; 4];
        for (c, v) in terms {
            for k in 0..4 {
                out[k] += c * v[k];
            }
        }
        out
    };
    let qi = 1.0 / q;
    let uu = h.apply(&kron(&u1, &u2));
    let dd_rhs = comb(&[(ONE, kron(&t, &d2)), (-ONE, kron(&d1, &t))]);
    let du_rhs = comb(&[(qi, kron(&u1, &d2)), (-ONE, kron(&d1, &u2)), (-ONE, kron(&d1, &t))]);
    let ud_rhs = comb(&[(q, kron(&d1, &u2)), (-ONE, kron(&u1, &d2)), (ONE, kron(&u1, &t))]);
    Ok(TelescopingResiduals {
        uu: norm2(&uu),
        dd: diff_norm(&h.apply(&kron(&d1, &d2)), &dd_rhs),
        du: diff_norm(&h.apply(&kron(&d1, &u2)), &du_rhs),
        ud: diff_norm(&h.apply(&kron(&u1, &d2)), &ud_rhs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConventionReport {
    pub candidates: Vec<(GaugeConvention, TelescopingResiduals)>,
    /// First candidate meeting [`IDENTITY_TOL`] on all four identities.
    pub selected: Option<GaugeConvention>,
}

/// Evaluate every candidate convention and pick the one that satisfies all
/// four identities, if any does.
pub fn select_convention(q: C64, u: C64, d: C64, site: usize) -> Result<ConventionReport> {
    let candidates = GaugeConvention::ALL
        .iter()
        .map(|&c| Ok((c, telescoping_check(q, u, d, site, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let selected = candidates.iter().find(|(_, r)| r.max() <= IDENTITY_TOL).map(|(c, _)| *c);
    Ok(ConventionReport { candidates, selected })
}

/// `⊗_i |u⟩_i` in the full `2^L` space.
pub fn gauged_product_state(length: usize, q: C64, u: C64, convention: GaugeConvention) -> Result<Vec<C64>> {
    let dim = full_dimension(length)?;
    let downs: Vec<C64> = (1..=length).map(|x| Ok(convention.vector(u, q, x, 1)?[1])).collect::<Result<_>>()?;
    Ok((0..dim)
        .map(|b| (0..length).filter(|x| b >> x & 1 == 1).map(|x| downs[x]).product())
        .collect())
}

/// `‖H_bulk ⊗_i|u⟩_i‖ / ‖⊗_i|u⟩_i‖`.
pub fn bulk_telescoping_cancellation(length: usize, q: C64, u: C64, convention: GaugeConvention) -> Result<f64> {
    let h = assemble_xxz_bulk(length, q)?;
    let psi = gauged_product_state(length, q, u, convention)?;
    Ok(norm2(&h.matvec(&psi)?) / norm2(&psi))
}
