//! Hartogs domains `D_{N,s} = {(z, ζ) : ‖ζ‖² < K_D(z, z)^{−s}}`.
//!
//! The Bergman kernel is evaluated two ways. The operator form is
//!
//! `K((z,ζ),(z′,ζ′)) = N!/π^N · K_D(z,z′)^{sN+1} · b(t d/dt + N)[(1 − t)^{−N−1}]`,
//! `t = K_D(z,z′)^s ⟨ζ, ζ′⟩`,
//!
//! where `b(x) = c_D(s x)` and `c_D(λ)` is the ratio between the Bergman
//! kernel of the weight `K_D(z,z)^{−λ}` and `K_D^{1+λ}`. The series form sums
//! the orthonormal expansion directly from Beta-integral norms and is only
//! available for balls and their products.

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cones::{ConeDescriptor, MembershipStatus};
use crate::error::check_dim;
use crate::siegel::{random_cvector, Domain, DomainDescriptor, SiegelDomain, SiegelKind};
use crate::{CVector, Error, Result, C64};

/// Default truncation per summation index for the series evaluator.
pub const DEFAULT_TRUNCATION: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct HartogsDomain {
    base: Domain,
    n_fiber: usize,
    s: f64,
}

/// `{"base": <domain>, "N": 1, "s": 1.5}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartogsDescriptor {
    pub base: DomainDescriptor,
    #[serde(rename = "N")]
    pub n_fiber: usize,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HartogsPoint {
    pub z: CVector,
    pub zeta: CVector,
}

impl HartogsPoint {
    pub fn new(z: CVector, zeta: CVector) -> Self {
        Self { z, zeta }
    }

    pub fn to_flat(&self) -> CVector {
        crate::siegel::concat(vec![self.z.clone(), self.zeta.clone()])
    }

    pub fn from_flat(base_dim: usize, v: &CVector) -> Self {
        Self {
            z: v.rows(0, base_dim).into_owned(),
            zeta: v.rows(base_dim, v.len() - base_dim).into_owned(),
        }
    }
}

impl From<crate::wire::WirePoint> for HartogsPoint {
    fn from(w: crate::wire::WirePoint) -> Self {
        Self { z: w.z, zeta: w.zeta }
    }
}

impl From<HartogsPoint> for crate::wire::WirePoint {
    fn from(p: HartogsPoint) -> Self {
        Self { z: p.z, zeta: p.zeta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HartogsStatus {
    Interior,
    Boundary0,
    BoundaryBase,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HartogsBoundaryClass {
    pub status: HartogsStatus,
    /// `‖ζ‖² K(z,z)^s`, absent when `z` is not interior to the base.
    pub h: Option<f64>,
}

/// `P(t) / (1 − t)^k` with `P` in ascending coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerOperatorResult {
    pub numerator: Vec<f64>,
    pub pole_order: usize,
}

impl EulerOperatorResult {
    pub fn eval(&self, t: C64) -> C64 {
        let p = self.numerator.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * t + c);
        p / (C64::new(1.0, 0.0) - t).powi(self.pole_order as i32)
    }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Vec<f64>, b: &[f64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0.0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn poly_deriv(a: &[f64]) -> Vec<f64> {
    a.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect()
}

/// Apply `b(t d/dt + N)` to `(1 − t)^{−k}` exactly; `b` in ascending
/// coefficients.
pub fn apply_euler_operator(b: &[f64], n: usize, k: usize) -> EulerOperatorResult {
    let deg = b.len().saturating_sub(1);
    let nf = n as f64;
    // D^i (1−t)^{−k} = P_i / (1−t)^{k+i}
    let mut p = vec![1.0];
    let mut total = Vec::new();
    for (i, &bi) in b.iter().enumerate() {
        if bi != 0.0 {
            let mut term = p.iter().map(|c| c * bi).collect::<Vec<_>>();
            for _ in i..deg {
                term = poly_mul(&term, &[1.0, -1.0]);
            }
            poly_add(&mut total, &term);
        }
        // D[P (1−t)^{−j}] = [(tP′ + N P)(1 − t) + j t P] (1 − t)^{−j−1}
        let j = (k + i) as f64;
        let mut q = poly_mul(&[0.0, 1.0], &poly_deriv(&p));
        poly_add(&mut q, &p.iter().map(|c| c * nf).collect::<Vec<_>>());
        let mut next = poly_mul(&q, &[1.0, -1.0]);
        poly_add(&mut next, &poly_mul(&[0.0, j], &p));
        p = next;
    }
    while total.len() > 1 && total.last() == Some(&0.0) {
        total.pop();
    }
    if total.is_empty() {
        total.push(0.0);
    }
    EulerOperatorResult {
        numerator: total,
        pole_order: k + deg,
    }
}

/// Linear factors `(α λ + β)/(α λ₀ + β)` of `c_D(λ)`, stored as `(α, β)`
/// normalised so that `c_D(0) = 1`.
fn weight_ratio_factors(d: &Domain) -> Vec<(f64, f64)> {
    match d {
        Domain::Ball { m } => ball_factors(*m),
        Domain::Siegel(s) => siegel_factors(s),
        Domain::Product(fs) => fs.iter().flat_map(weight_ratio_factors).collect(),
    }
}

fn ball_factors(m: usize) -> Vec<(f64, f64)> {
    (1..=m).map(|j| ((m as f64 + 1.0) / j as f64, 1.0)).collect()
}

fn siegel_factors(s: &SiegelDomain) -> Vec<(f64, f64)> {
    match s.kind() {
        SiegelKind::HalfPlane => ball_factors(1),
        SiegelKind::SiegelBall { m } => ball_factors(m + 1),
        SiegelKind::Tube { cone } => cone_factors(cone),
        SiegelKind::Product { factors } => factors.iter().flat_map(siegel_factors).collect(),
    }
}

/// Tube over a symmetric cone of rank `r` and dimension `n`: with
/// `ν = (2n/r)(1 + λ)`, `c(λ) = G(ν)/G(2n/r)` and `G(ν) = Π (ν − ρ_i)`.
fn cone_factors(cone: &ConeDescriptor) -> Vec<(f64, f64)> {
    let (nu0, roots): (f64, Vec<f64>) = match cone {
        ConeDescriptor::HalfLine => (2.0, vec![1.0]),
        ConeDescriptor::Lorentz { n } => {
            let nf = *n as f64;
            let mut r: Vec<f64> = (1..*n).map(|i| i as f64).collect();
            r.push(nf / 2.0);
            (nf, r)
        }
        ConeDescriptor::PdHermitian { r } => {
            let mut roots = Vec::new();
            for j in 1..=*r {
                for i in 1..=*r {
                    roots.push((j - 1 + i) as f64);
                }
            }
            (2.0 * *r as f64, roots)
        }
        ConeDescriptor::Product { factors } => return factors.iter().flat_map(cone_factors).collect(),
    };
    roots
        .into_iter()
        .map(|rho| {
            let den = nu0 - rho;
            (nu0 / den, 1.0)
        })
        .collect()
}

/// `c_D(λ)`.
pub fn weight_ratio(d: &Domain, lambda: f64) -> f64 {
    weight_ratio_factors(d).iter().map(|(a, b)| a * lambda + b).product()
}

impl HartogsDomain {
    pub fn new(base: Domain, n_fiber: usize, s: f64) -> Result<Self> {
        if n_fiber == 0 {
            return Err(Error::InvalidParameter("fiber dimension N must be at least 1".into()));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent s must be positive, got {s}")));
        }
        Ok(Self { base, n_fiber, s })
    }

    pub fn from_descriptor(d: &HartogsDescriptor) -> Result<Self> {
        Self::new(Domain::from_descriptor(&d.base)?, d.n_fiber, d.s)
    }

    pub fn descriptor(&self) -> HartogsDescriptor {
        HartogsDescriptor {
            base: self.base.descriptor(),
            n_fiber: self.n_fiber,
            s: self.s,
        }
    }

    pub fn base(&self) -> &Domain {
        &self.base
    }

    pub fn n_fiber(&self) -> usize {
        self.n_fiber
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.n_fiber
    }

    fn check(&self, p: &HartogsPoint) -> Result<()> {
        check_dim("base coordinate z", self.base.dim(), p.z.len())?;
        check_dim("fiber coordinate zeta", self.n_fiber, p.zeta.len())
    }

    /// `‖ζ‖² K(z, z)^s`.
    pub fn h_value(&self, p: &HartogsPoint) -> Result<f64> {
        self.check(p)?;
        let cls = self.base.classify(&p.z, 0.0)?;
        if cls.status != MembershipStatus::Interior {
            return Err(Error::NotInterior(format!("base defect {}", cls.defect)));
        }
        let k = self.base.kernel_eval(&p.z, &p.z)?.re;
        Ok(p.zeta.norm_squared() * k.powf(self.s))
    }

    pub fn contains(&self, p: &HartogsPoint, tol: f64) -> Result<HartogsBoundaryClass> {
        self.check(p)?;
        let cls = self.base.classify(&p.z, tol)?;
        Ok(match cls.status {
            MembershipStatus::Exterior => HartogsBoundaryClass {
                status: HartogsStatus::Exterior,
                h: None,
            },
            MembershipStatus::Boundary => HartogsBoundaryClass {
                status: if p.zeta.norm() <= tol {
                    HartogsStatus::BoundaryBase
                } else {
                    HartogsStatus::Exterior
                },
                h: None,
            },
            MembershipStatus::Interior => {
                let k = self.base.kernel_eval(&p.z, &p.z)?.re;
                let h = p.zeta.norm_squared() * k.powf(self.s);
                let status = if (h - 1.0).abs() <= tol {
                    HartogsStatus::Boundary0
                } else if h < 1.0 {
                    HartogsStatus::Interior
                } else {
                    HartogsStatus::Exterior
                };
                HartogsBoundaryClass { status, h: Some(h) }
            }
        })
    }

    /// `b` in ascending coefficients, `b(x) = c_D(s x)`.
    pub fn b_polynomial(&self) -> Vec<f64> {
        weight_ratio_factors(&self.base)
            .iter()
            .fold(vec![1.0], |acc, (a, b)| poly_mul(&acc, &[*b, a * self.s]))
    }

    /// Exponent `sN + 1` of the base kernel in the operator formula.
    pub fn prefactor_exponent(&self) -> f64 {
        self.s * self.n_fiber as f64 + 1.0
    }

    /// `t = K_D(z,z′)^s ⟨ζ, ζ′⟩`.
    pub fn t_value(&self, p: &HartogsPoint, q: &HartogsPoint) -> Result<C64> {
        self.check(p)?;
        self.check(q)?;
        let ks = self.base.kernel_spec().pow(&p.z, &q.z, self.s)?;
        Ok(ks * crate::linalg::inner(&p.zeta, &q.zeta))
    }

    /// Operator-formula kernel.
    pub fn kernel_operator(&self, p: &HartogsPoint, q: &HartogsPoint) -> Result<C64> {
        self.kernel_operator_with(p, q, self.prefactor_exponent(), self.n_fiber + 1)
    }

    /// Operator formula with an explicit prefactor exponent and pole order;
    /// used to test alternative readings of the formula.
    pub fn kernel_operator_with(
        &self,
        p: &HartogsPoint,
        q: &HartogsPoint,
        prefactor: f64,
        pole: usize,
    ) -> Result<C64> {
        let t = self.t_value(p, q)?;
        if t.norm() >= 1.0 {
            return Err(Error::OutsideConvergence { t_abs: t.norm() });
        }
        let n = self.n_fiber as f64;
        let lead = (ln_gamma(n + 1.0) - n * std::f64::consts::PI.ln()).exp();
        let kp = self.base.kernel_spec().pow(&p.z, &q.z, prefactor)?;
        let op = apply_euler_operator(&self.b_polynomial(), self.n_fiber, pole);
        Ok(kp * lead * op.eval(t))
    }

    /// Orthonormal-series kernel with a tail bound; balls and products of
    /// balls only.
    pub fn kernel_series(&self, p: &HartogsPoint, q: &HartogsPoint, truncation: usize) -> Result<SeriesValue> {
        self.check(p)?;
        self.check(q)?;
        let balls = ball_factors_of(&self.base).ok_or_else(|| {
            Error::Unsupported("series evaluator needs a ball or a product of balls as base".into())
        })?;
        let truncation = truncation.max(2);
        let pi = std::f64::consts::PI;
        let nf = self.n_fiber as f64;
        let x = crate::linalg::inner(&p.zeta, &q.zeta);
        // per-factor pairings ⟨z_i, z′_i⟩
        let mut off = 0;
        let pairs: Vec<(usize, C64)> = balls
            .iter()
            .map(|&m| {
                let v = crate::linalg::inner(&p.z.rows(off, m).into_owned(), &q.z.rows(off, m).into_owned());
                off += m;
                (m, v)
            })
            .collect();
        let mut total = C64::new(0.0, 0.0);
        let mut bound = 0.0;
        let mut outer_mag = Vec::with_capacity(truncation);
        for k in 0..truncation {
            let kf = k as f64;
            let lambda = self.s * (kf + nf);
            // ⟨ζ,ζ′⟩^k/k! · (k+N)!/π^N
            let mut log_coef = ln_gamma(kf + nf + 1.0) - ln_gamma(kf + 1.0) - nf * pi.ln();
            if k > 0 && x.norm() == 0.0 {
                break;
            }
            // magnitudes stay in log form; factor sums alone can exceed f64
            let mut phase = if k == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, kf * x.arg()) };
            if k > 0 {
                log_coef += kf * x.norm().ln();
            }
            let mut rel = 1.0;
            for &(m, v) in &pairs {
                let mf = m as f64;
                let beta = (mf + 1.0) * lambda;
                // (m!/π^m)^λ / π^m
                log_coef += lambda * (ln_gamma(mf + 1.0) - mf * pi.ln()) - mf * pi.ln();
                let (sum, tail) = inner_series(v, mf, beta, truncation);
                let mag = sum.norm();
                log_coef += mag.ln();
                phase *= sum / mag;
                rel *= 1.0 + tail / mag;
            }
            let a = phase * log_coef.exp();
            // |Π(s_i + e_i) − Π s_i| ≤ Π|s_i| (Π(1 + e_i/|s_i|) − 1)
            bound += log_coef.exp() * (rel - 1.0);
            total += a;
            outer_mag.push(a.norm());
        }
        bound += geometric_tail(&outer_mag);
        Ok(SeriesValue { value: total, bound })
    }

    /// Operator and series values side by side.
    pub fn kernel_compare(&self, p: &HartogsPoint, q: &HartogsPoint, truncation: usize) -> Result<KernelComparison> {
        let operator = self.kernel_operator(p, q)?;
        let series = self.kernel_series(p, q, truncation)?;
        Ok(KernelComparison {
            operator,
            series: series.value,
            tail_bound: series.bound,
            rel_err: (operator - series.value).norm() / series.value.norm(),
        })
    }

    /// Compares the operator formula against the series at the origin pair
    /// and `pairs` sampled pairs, for the derived instantiation and for the
    /// literal prefactor exponent `N + 1`.
    pub fn calibrate<R: Rng + ?Sized>(&self, pairs: usize, truncation: usize, rng: &mut R) -> Result<CalibrationReport> {
        let origin = HartogsPoint::new(CVector::zeros(self.base.dim()), CVector::zeros(self.n_fiber));
        let mut pts = vec![(origin.clone(), origin)];
        for _ in 0..pairs {
            pts.push((self.sample_series_point(rng), self.sample_series_point(rng)));
        }
        let mut derived: f64 = 0.0;
        let mut literal: f64 = 0.0;
        for (p, q) in &pts {
            let series = self.kernel_series(p, q, truncation)?.value;
            let d = self.kernel_operator(p, q)?;
            let l = self.kernel_operator_with(p, q, self.n_fiber as f64 + 1.0, self.n_fiber + 1)?;
            derived = derived.max((d - series).norm() / series.norm());
            literal = literal.max((l - series).norm() / series.norm());
        }
        Ok(CalibrationReport {
            b: self.b_polynomial(),
            prefactor_exponent: self.prefactor_exponent(),
            pole_order: self.n_fiber + 1,
            pairs: pts.len(),
            max_rel_err: derived,
            literal_prefactor_max_rel_err: literal,
        })
    }

    /// Interior point in the region where the series converges quickly:
    /// `|z| ≤ 0.6` per ball factor and `h ≤ 0.5`.
    pub fn sample_series_point<R: Rng + ?Sized>(&self, rng: &mut R) -> HartogsPoint {
        let z = match &self.base {
            Domain::Product(fs) => {
                crate::siegel::concat(fs.iter().map(|f| shrink(f.sample_interior(rng), 0.6)).collect())
            }
            d => shrink(d.sample_interior(rng), 0.6),
        };
        let zeta = self.sample_fiber(&z, 0.5, rng);
        HartogsPoint::new(z, zeta)
    }

    /// `ζ` uniform in direction with `h ≤ h_max`.
    fn sample_fiber<R: Rng + ?Sized>(&self, z: &CVector, h_max: f64, rng: &mut R) -> CVector {
        let k = self.base.kernel_eval(z, z).map(|k| k.re).unwrap_or(1.0);
        let radius = (h_max * k.powf(-self.s)).sqrt();
        let dir = unit(random_cvector(self.n_fiber, 1.0, rng));
        let r: f64 = rng.random_range(0.0..1.0);
        dir.scale(radius * r.powf(0.5 / self.n_fiber as f64))
    }

    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> HartogsPoint {
        let z = self.base.sample_interior(rng);
        let zeta = self.sample_fiber(&z, 0.95, rng);
        HartogsPoint::new(z, zeta)
    }

    /// Point of `∂₀`: interior base point with `h = 1`.
    pub fn sample_boundary0<R: Rng + ?Sized>(&self, rng: &mut R) -> HartogsPoint {
        let z = self.base.sample_interior(rng);
        let k = self.base.kernel_eval(&z, &z).map(|k| k.re).unwrap_or(1.0);
        let zeta = unit(random_cvector(self.n_fiber, 1.0, rng)).scale(k.powf(-self.s / 2.0));
        HartogsPoint::new(z, zeta)
    }

    /// Point of `∂D × {0}`.
    pub fn sample_boundary_base<R: Rng + ?Sized>(&self, rng: &mut R) -> HartogsPoint {
        HartogsPoint::new(self.base.sample_boundary(rng), CVector::zeros(self.n_fiber))
    }
}

fn shrink(z: CVector, r: f64) -> CVector {
    let n = z.norm();
    if n > r {
        z.scale(r / n)
    } else {
        z
    }
}

fn unit(v: CVector) -> CVector {
    let n = v.norm();
    if n == 0.0 {
        let mut e = CVector::zeros(v.len());
        e[0] = C64::new(1.0, 0.0);
        e
    } else {
        v / C64::new(n, 0.0)
    }
}

fn ball_factors_of(d: &Domain) -> Option<Vec<usize>> {
    match d {
        Domain::Ball { m } => Some(vec![*m]),
        Domain::Product(fs) => fs.iter().map(ball_factors_of).collect::<Option<Vec<_>>>().map(|v| v.concat()),
        Domain::Siegel(_) => None,
    }
}

/// `Σ_l Γ(l+m+β+1)/(l! Γ(β+1)) · v^l` truncated, with a tail bound. The
/// majorant `Σ_l Γ(l+m+β+1)/(l! Γ(β+1)) |v|^l = Γ(m+β+1)/Γ(β+1) (1−|v|)^{−m−β−1}`
/// bounds the tail when the term ratio has not yet dropped below one.
fn inner_series(v: C64, m: f64, beta: f64, truncation: usize) -> (C64, f64) {
    let mut sum = C64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut mags = Vec::with_capacity(truncation);
    let (lv, av) = (v.norm().ln(), v.arg());
    for l in 0..truncation {
        let lf = l as f64;
        let lc = ln_gamma(lf + m + beta + 1.0) - ln_gamma(lf + 1.0) - ln_gamma(beta + 1.0);
        let t = if l == 0 {
            C64::new(lc.exp(), 0.0)
        } else if v.norm() == 0.0 {
            break;
        } else {
            C64::from_polar((lc + lf * lv).exp(), lf * av)
        };
        mags.push(t.norm());
        abs_sum += t.norm();
        sum += t;
    }
    let geometric = geometric_tail(&mags);
    let majorant = if v.norm() < 1.0 {
        let full = (ln_gamma(m + beta + 1.0) - ln_gamma(beta + 1.0) - (m + beta + 1.0) * (1.0 - v.norm()).ln()).exp();
        (full - abs_sum).max(0.0)
    } else {
        f64::INFINITY
    };
    (sum, geometric.min(majorant))
}

/// Geometric bound on the tail after the recorded term magnitudes, with the
/// ratio taken between the maxima of the last two windows so that phase
/// cancellation in individual terms does not spoil it.
fn geometric_tail(mags: &[f64]) -> f64 {
    let w = (mags.len() / 2).min(5);
    if w == 0 {
        return 0.0;
    }
    let max = |s: &[f64]| s.iter().copied().fold(0.0, f64::max);
    let b = max(&mags[mags.len() - w..]);
    let a = max(&mags[mags.len() - 2 * w..mags.len() - w]);
    // terms near underflow carry no usable ratio
    if b < 1e-250 || a < 1e-250 {
        return b;
    }
    let r = (b / a).powf(1.0 / w as f64);
    if r < 1.0 {
        b * r / (1.0 - r)
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: C64,
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelComparison {
    #[serde(with = "crate::wire::complex")]
    pub operator: C64,
    #[serde(with = "crate::wire::complex")]
    pub series: C64,
    pub tail_bound: f64,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub b: Vec<f64>,
    pub prefactor_exponent: f64,
    pub pole_order: usize,
    pub pairs: usize,
    pub max_rel_err: f64,
    pub literal_prefactor_max_rel_err: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn cv(v: &[C64]) -> CVector {
        CVector::from_column_slice(v)
    }

    fn disc_h(n: usize, s: f64) -> HartogsDomain {
        HartogsDomain::new(Domain::disc(), n, s).unwrap()
    }

    fn pt(z: &[C64], zeta: &[C64]) -> HartogsPoint {
        HartogsPoint::new(cv(z), cv(zeta))
    }

    #[test]
    fn membership_examples() {
        let h = disc_h(1, 1.0);
        let o = c(0.0, 0.0);
        let r = h.contains(&pt(&[o], &[c(0.5, 0.0)]), 1e-9).unwrap();
        assert_eq!(r.status, HartogsStatus::Interior);
        assert!((r.h.unwrap() - 0.25 / PI).abs() < 1e-15);
        let r = h.contains(&pt(&[o], &[c(PI.sqrt(), 0.0)]), 1e-9).unwrap();
        assert_eq!(r.status, HartogsStatus::Boundary0);
        let r = h.contains(&pt(&[o], &[o]), 1e-9).unwrap();
        assert_eq!((r.status, r.h), (HartogsStatus::Interior, Some(0.0)));
        let r = h.contains(&pt(&[c(1.0, 0.0)], &[o]), 1e-9).unwrap();
        assert_eq!(r.status, HartogsStatus::BoundaryBase);
        let r = h.contains(&pt(&[c(1.5, 0.0)], &[o]), 1e-9).unwrap();
        assert_eq!((r.status, r.h), (HartogsStatus::Exterior, None));
    }

    #[test]
    fn h_value_examples() {
        let o = c(0.0, 0.0);
        assert_eq!(disc_h(1, 1.0).h_value(&pt(&[o], &[o])).unwrap(), 0.0);
        assert!((disc_h(1, 1.0).h_value(&pt(&[o], &[c(PI.sqrt(), 0.0)])).unwrap() - 1.0).abs() < 1e-14);
        assert!((disc_h(1, 2.0).h_value(&pt(&[o], &[c(PI, 0.0)])).unwrap() - 1.0).abs() < 1e-14);
        assert!(disc_h(1, 1.0).h_value(&pt(&[c(1.0, 0.0)], &[o])).is_err());
    }

    #[test]
    fn euler_operator_examples() {
        let r = apply_euler_operator(&[0.0, 1.0], 1, 2);
        assert_eq!(r, EulerOperatorResult { numerator: vec![1.0, 1.0], pole_order: 3 });
        let r = apply_euler_operator(&[1.0], 4, 3);
        assert_eq!(r, EulerOperatorResult { numerator: vec![1.0], pole_order: 3 });
        let r = apply_euler_operator(&[0.0, 1.0], 0, 1);
        assert_eq!(r, EulerOperatorResult { numerator: vec![0.0, 1.0], pole_order: 2 });
    }

    #[test]
    fn euler_operator_matches_power_series() {
        // Σ_k b(k+N) (k+j−1 choose k) t^k
        let b = [0.5, -1.0, 0.25, 2.0];
        let (n, k) = (2usize, 3usize);
        let r = apply_euler_operator(&b, n, k);
        assert!((r.numerator[0] - b.iter().enumerate().map(|(i, c)| c * (n as f64).powi(i as i32)).sum::<f64>()).abs() < 1e-12);
        let t = c(0.2, -0.1);
        let mut series = c(0.0, 0.0);
        let mut binom = 1.0;
        for j in 0..400 {
            let x = (j + n) as f64;
            let bx: f64 = b.iter().enumerate().map(|(i, c)| c * x.powi(i as i32)).sum();
            series += t.powi(j as i32) * bx * binom;
            binom *= (j + k) as f64 / (j + 1) as f64;
        }
        assert!((r.eval(t) - series).norm() < 1e-10 * series.norm());
    }

    #[test]
    fn origin_value() {
        let h = disc_h(1, 1.0);
        let o = pt(&[c(0.0, 0.0)], &[c(0.0, 0.0)]);
        let want = 3.0 / PI.powi(3);
        assert!((h.kernel_operator(&o, &o).unwrap() - want).norm() < 1e-15);
        let s = h.kernel_series(&o, &o, DEFAULT_TRUNCATION).unwrap();
        assert!((s.value - want).norm() < 1e-15);
    }

    #[test]
    fn zeta_zero_slice_has_closed_form() {
        // ζ = ζ′ = 0 (or just ζ′ = 0): K = K_Δ^{sN+1} N!/π^N b(N)
        let h = disc_h(1, 1.0);
        let p = pt(&[c(0.0, 0.0)], &[c(0.0, 0.0)]);
        let q = pt(&[c(0.3, 0.0)], &[c(0.0, 0.0)]);
        let s = h.kernel_series(&p, &q, DEFAULT_TRUNCATION).unwrap().value;
        let closed = 3.0 / PI.powi(3);
        assert!((s - closed).norm() / closed < 1e-10);
        let p = pt(&[c(0.4, 0.1)], &[c(0.0, 0.0)]);
        let q = pt(&[c(0.3, -0.2)], &[c(0.1, 0.0)]);
        let s = h.kernel_series(&p, &q, DEFAULT_TRUNCATION).unwrap().value;
        let w = c(1.0, 0.0) - p.z[0] * q.z[0].conj();
        let closed = 3.0 / PI.powi(3) / w.powi(4);
        assert!((s - closed).norm() / closed.norm() < 1e-10);
    }

    #[test]
    fn operator_matches_series_on_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [1, 2] {
            for s in [1.0, 2.0] {
                let h = disc_h(n, s);
                for _ in 0..50 {
                    let p = h.sample_series_point(&mut rng);
                    let q = h.sample_series_point(&mut rng);
                    let cmp = h.kernel_compare(&p, &q, DEFAULT_TRUNCATION).unwrap();
                    assert!(cmp.rel_err <= 1e-8, "N={n} s={s}: {cmp:?}");
                    assert!(cmp.tail_bound <= 1e-10 * cmp.series.norm(), "{cmp:?} {p:?} {q:?}");
                }
            }
        }
    }

    #[test]
    fn operator_matches_series_on_balls_and_bidisc() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let bases = [
            Domain::ball(2),
            Domain::product(vec![Domain::disc(), Domain::disc()]).unwrap(),
            Domain::product(vec![Domain::disc(), Domain::ball(2)]).unwrap(),
        ];
        for base in bases {
            for (n, s) in [(1, 1.0), (2, 1.5), (3, 2.0)] {
                let h = HartogsDomain::new(base.clone(), n, s).unwrap();
                let rep = h.calibrate(20, DEFAULT_TRUNCATION, &mut rng).unwrap();
                assert!(rep.max_rel_err <= 1e-8, "{rep:?}");
            }
        }
    }

    #[test]
    fn literal_prefactor_only_fits_at_s_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rep = disc_h(1, 1.0).calibrate(20, DEFAULT_TRUNCATION, &mut rng).unwrap();
        assert!(rep.literal_prefactor_max_rel_err < 1e-8);
        let rep = disc_h(1, 2.0).calibrate(20, DEFAULT_TRUNCATION, &mut rng).unwrap();
        assert!(rep.literal_prefactor_max_rel_err > 1e-3);
    }

    #[test]
    fn weight_ratio_cross_checks() {
        // Λ₂ tube ≅ H × H and Λ₄ tube ≅ Herm(2) tube
        let hh = Domain::product(vec![Domain::half_plane(), Domain::half_plane()]).unwrap();
        let l2 = Domain::tube(ConeDescriptor::Lorentz { n: 2 }).unwrap();
        let l4 = Domain::tube(ConeDescriptor::Lorentz { n: 4 }).unwrap();
        let h2 = Domain::tube(ConeDescriptor::PdHermitian { r: 2 }).unwrap();
        let h1 = Domain::tube(ConeDescriptor::PdHermitian { r: 1 }).unwrap();
        for lambda in [0.0, 0.5, 1.0, 2.7] {
            assert!((weight_ratio(&hh, lambda) - weight_ratio(&l2, lambda)).abs() < 1e-12);
            assert!((weight_ratio(&l4, lambda) - weight_ratio(&h2, lambda)).abs() < 1e-9);
            assert!((weight_ratio(&h1, lambda) - weight_ratio(&Domain::disc(), lambda)).abs() < 1e-12);
            assert!((weight_ratio(&Domain::siegel_ball(1), lambda) - weight_ratio(&Domain::ball(2), lambda)).abs() < 1e-12);
        }
    }

    #[test]
    fn symmetry_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (name, base) in Domain::catalog() {
            let h = HartogsDomain::new(base, 2, 1.5).unwrap();
            for _ in 0..50 {
                let p = h.sample_interior(&mut rng);
                let q = h.sample_interior(&mut rng);
                let a = h.kernel_operator(&p, &q).unwrap();
                let b = h.kernel_operator(&q, &p).unwrap();
                assert!((a - b.conj()).norm() <= 1e-10 * a.norm(), "{name}");
                let d = h.kernel_operator(&p, &p).unwrap();
                assert!(d.re > 0.0 && d.im.abs() <= 1e-10 * d.re, "{name}");
            }
        }
    }

    #[test]
    fn continuous_past_boundary0() {
        let h = disc_h(1, 1.0);
        let z = c(0.2, 0.1);
        let k = h.base().kernel_eval(&cv(&[z]), &cv(&[z])).unwrap().re;
        let r = k.powf(-0.5);
        let p = pt(&[z], &[c(0.3 * r, 0.0)]);
        for eps in [1e-3, 1e-5] {
            let inside = pt(&[z], &[c(r * (1.0 - eps), 0.0)]);
            let outside = pt(&[z], &[c(r * (1.0 + eps), 0.0)]);
            let a = h.kernel_operator(&p, &inside).unwrap();
            let b = h.kernel_operator(&p, &outside).unwrap();
            let at = h.kernel_operator(&p, &pt(&[z], &[c(r, 0.0)])).unwrap();
            assert!(a.is_finite() && b.is_finite());
            assert!((a - at).norm() < 20.0 * eps * at.norm());
            assert!((b - at).norm() < 20.0 * eps * at.norm());
            let sa = h.kernel_series(&p, &outside, DEFAULT_TRUNCATION).unwrap().value;
            assert!((sa - b).norm() < 1e-8 * b.norm());
        }
    }

    #[test]
    fn outside_convergence_is_error() {
        let h = disc_h(1, 1.0);
        let p = pt(&[c(0.0, 0.0)], &[c(2.0, 0.0)]);
        assert!(matches!(h.kernel_operator(&p, &p), Err(Error::OutsideConvergence { .. })));
    }

    #[test]
    fn series_unsupported_on_siegel() {
        let h = HartogsDomain::new(Domain::half_plane(), 1, 1.0).unwrap();
        let p = pt(&[c(0.0, 1.0)], &[c(0.0, 0.0)]);
        assert!(matches!(h.kernel_series(&p, &p, 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn descriptor_round_trip() {
        let h = HartogsDomain::new(Domain::siegel_ball(2), 3, 1.5).unwrap();
        let js = serde_json::to_string(&h.descriptor()).unwrap();
        assert_eq!(js, r#"{"base":{"kind":"siegel_ball","m":2},"N":3,"s":1.5}"#);
        let back: HartogsDescriptor = serde_json::from_str(&js).unwrap();
        assert_eq!(HartogsDomain::from_descriptor(&back).unwrap(), h);
    }
}
