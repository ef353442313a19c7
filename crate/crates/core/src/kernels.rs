//! Closed-form Bergman kernels of catalog domains.
//!
//! Every catalog kernel has the shape `K(p, q) = c · Π_k g_k(p, q̄)^{e_k}` with
//! each factor `g_k` holomorphic in `p` and anti-holomorphic in `q`:
//!
//! | factor        | `g(p, q̄)`                                   |
//! |---------------|---------------------------------------------|
//! | `TubeLinear`  | `(w − w̄′)/(2i)`                              |
//! | `BallPairing` | `(w − w̄′)/(2i) − ⟨u, u′⟩`                    |
//! | `LorentzForm` | `Q(Y)`, `Y = (w − w̄′)/(2i)`, `Q = y₁² − Σ y_k²` |
//! | `MatrixDet`   | `det Y` in flattened Hermitian coordinates   |
//! | `BallBounded` | `1 − ⟨z, z′⟩`                                |
//!
//! Logarithms use a fixed branch that is continuous on `D × D`: every factor
//! (or, for `LorentzForm` and `MatrixDet`, every spectral factor) has positive
//! real part there, so the principal logarithm applies.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cones::{coords_to_matrix, ConeDescriptor};
use crate::error::check_dim;
use crate::linalg::{complex_eigenvalues, I};
use crate::siegel::{Domain, SiegelDomain, SiegelKind, SiegelPoint};
use crate::{CMatrix, CVector, Error, Result, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum FactorKind {
    TubeLinear,
    BallPairing,
    LorentzForm,
    MatrixDet { r: usize },
    BallBounded,
}

/// One factor `g^{exponent}` acting on the flat coordinates listed in `idx`.
/// For `BallPairing`, `idx[0]` is the tube coordinate and the rest the fiber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelFactor {
    pub kind: FactorKind,
    pub exponent: f64,
    pub idx: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub constant: f64,
    pub factors: Vec<KernelFactor>,
    pub dim: usize,
}

/// Value and log-derivatives of the kernel on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelJet {
    /// `K(p, p) > 0`.
    pub value: f64,
    /// `∂ log K` in holomorphic coordinates.
    pub grad: CVector,
    /// `∂∂̄ log K`, the Bergman metric.
    pub hess: CMatrix,
}

/// Local log-jet of a single factor at `(a, b) = (p, conj q)`.
struct FactorLogJet {
    g: C64,
    log_g: C64,
    /// true when some principal logarithm was taken off its canonical region
    off_branch: bool,
    da: CVector,
    dab: CMatrix,
}

fn two_i() -> C64 {
    C64::new(0.0, 2.0)
}

fn principal_log(z: C64, off_branch: &mut bool) -> C64 {
    if z.re <= 0.0 {
        *off_branch = true;
    }
    z.ln()
}

impl KernelFactor {
    fn name(&self) -> String {
        format!("{:?}{:?}", self.kind, self.idx)
    }

    fn local(&self, p: &CVector, q: &CVector) -> (CVector, CVector) {
        let a = CVector::from_iterator(self.idx.len(), self.idx.iter().map(|&i| p[i]));
        let b = CVector::from_iterator(self.idx.len(), self.idx.iter().map(|&i| q[i].conj()));
        (a, b)
    }

    /// `g(p, q̄)`.
    pub fn value(&self, p: &CVector, q: &CVector) -> C64 {
        let (a, b) = self.local(p, q);
        match &self.kind {
            FactorKind::TubeLinear => (a[0] - b[0]) / two_i(),
            FactorKind::BallPairing => {
                (a[0] - b[0]) / two_i() - (1..a.len()).map(|j| a[j] * b[j]).sum::<C64>()
            }
            FactorKind::BallBounded => C64::new(1.0, 0.0) - a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<C64>(),
            FactorKind::LorentzForm => {
                let y = (a - b) / two_i();
                y[0] * y[0] - y.iter().skip(1).map(|v| v * v).sum::<C64>()
            }
            FactorKind::MatrixDet { r } => {
                let y = (a - b) / two_i();
                coords_to_matrix(*r, y.as_slice()).expect("index list has r² entries").determinant()
            }
        }
    }

    fn log_jet(&self, p: &CVector, q: &CVector) -> Result<FactorLogJet> {
        let (a, b) = self.local(p, q);
        let n = a.len();
        let g = self.value(p, q);
        if g == C64::new(0.0, 0.0) || !g.is_finite() {
            return Err(Error::FactorVanishes { factor: self.name() });
        }
        let mut off_branch = false;
        let (log_g, da, dab) = match &self.kind {
            FactorKind::TubeLinear => {
                let d = a[0] - b[0];
                (
                    principal_log(g, &mut off_branch),
                    CVector::from_element(1, 1.0 / d),
                    CMatrix::from_element(1, 1, 1.0 / (d * d)),
                )
            }
            FactorKind::BallPairing | FactorKind::BallBounded => {
                let mut ga = CVector::zeros(n);
                let mut gb = CVector::zeros(n);
                let mut gab = CMatrix::zeros(n, n);
                let start = if self.kind == FactorKind::BallPairing {
                    ga[0] = 1.0 / two_i();
                    gb[0] = -1.0 / two_i();
                    1
                } else {
                    0
                };
                for j in start..n {
                    ga[j] = -b[j];
                    gb[j] = -a[j];
                    gab[(j, j)] = C64::new(-1.0, 0.0);
                }
                let da = &ga / g;
                let dab = gab / g - (&ga * gb.transpose()) / (g * g);
                (principal_log(g, &mut off_branch), da, dab)
            }
            FactorKind::LorentzForm => {
                let y = (&a - &b) / two_i();
                let sigma = |k: usize| if k == 0 { 1.0 } else { -1.0 };
                let ga = CVector::from_fn(n, |k, _| -I * sigma(k) * y[k]);
                let gb = CVector::from_fn(n, |k, _| I * sigma(k) * y[k]);
                let gab = CMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        C64::new(sigma(i) / 2.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let spatial: C64 = y.iter().skip(1).map(|v| v * v).sum();
                let s = spatial.sqrt();
                let log_g = principal_log(y[0] + s, &mut off_branch) + principal_log(y[0] - s, &mut off_branch);
                let da = &ga / g;
                let dab = gab / g - (&ga * gb.transpose()) / (g * g);
                (log_g, da, dab)
            }
            FactorKind::MatrixDet { r } => {
                let y = (&a - &b) / two_i();
                let ym = coords_to_matrix(*r, y.as_slice())?;
                let yinv = ym
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::FactorVanishes { factor: self.name() })?;
                let basis: Vec<CMatrix> = (0..n)
                    .map(|c| {
                        let mut e = vec![C64::new(0.0, 0.0); n];
                        e[c] = C64::new(1.0, 0.0);
                        &yinv * coords_to_matrix(*r, &e).expect("r² coordinates")
                    })
                    .collect();
                // ∂_y log det = tr(Y⁻¹E_c), ∂²_y log det = −tr(Y⁻¹E_c Y⁻¹E_d)
                let dy = CVector::from_fn(n, |c, _| basis[c].trace());
                let dyy = CMatrix::from_fn(n, n, |c, d| -(&basis[c] * &basis[d]).trace());
                let mut log_g = C64::new(0.0, 0.0);
                for ev in complex_eigenvalues(&ym) {
                    log_g += principal_log(ev, &mut off_branch);
                }
                (log_g, dy / two_i(), dyy * C64::new(0.25, 0.0))
            }
        };
        Ok(FactorLogJet {
            g,
            log_g,
            off_branch,
            da,
            dab,
        })
    }
}

impl KernelSpec {
    /// `Σ e_k`, the multi-index sum `2Σd − Σq` of the Siegel kernel formula.
    pub fn exponent_sum(&self) -> f64 {
        self.factors.iter().map(|f| f.exponent).sum()
    }

    /// Whether the strict bound `2Σd − Σq < −2` holds. The half-plane attains
    /// `−2`, so this is reported, not enforced.
    pub fn strict_exponent_bound(&self) -> bool {
        self.exponent_sum() < -2.0
    }

    fn check(&self, p: &CVector, q: &CVector) -> Result<()> {
        check_dim("kernel argument p", self.dim, p.len())?;
        check_dim("kernel argument q", self.dim, q.len())
    }

    /// `c · Π g_k^{e_k}` with principal powers.
    pub fn eval(&self, p: &CVector, q: &CVector) -> Result<C64> {
        self.check(p, q)?;
        let mut k = C64::new(self.constant, 0.0);
        for f in &self.factors {
            let g = f.value(p, q);
            if g == C64::new(0.0, 0.0) {
                return Err(Error::FactorVanishes { factor: f.name() });
            }
            let (v, on_cut) = crate::linalg::principal_pow(g, f.exponent);
            if on_cut {
                return Err(Error::BranchCut {
                    factor: f.name(),
                    value: g,
                });
            }
            k *= v;
        }
        Ok(k)
    }

    /// `log K(p, q)` on the continuous branch described in the module docs.
    pub fn log_eval(&self, p: &CVector, q: &CVector) -> Result<C64> {
        self.pow_log(p, q, 1.0)
    }

    /// `λ · log K(p, q)`; errors if a factor leaves its canonical region while
    /// `λ e_k` is not an integer.
    pub fn pow_log(&self, p: &CVector, q: &CVector, lambda: f64) -> Result<C64> {
        self.check(p, q)?;
        let mut acc = C64::new(lambda * self.constant.ln(), 0.0);
        for f in &self.factors {
            let j = f.log_jet(p, q)?;
            let e = lambda * f.exponent;
            if j.off_branch && e.fract() != 0.0 {
                return Err(Error::BranchCut {
                    factor: f.name(),
                    value: j.g,
                });
            }
            acc += j.log_g * e;
        }
        Ok(acc)
    }

    /// `K(p, q)^λ` on the continuous branch.
    pub fn pow(&self, p: &CVector, q: &CVector, lambda: f64) -> Result<C64> {
        Ok(self.pow_log(p, q, lambda)?.exp())
    }

    /// `(∂_p log K, ∂_p ∂_q̄ log K)` at an arbitrary pair.
    pub fn log_derivatives(&self, p: &CVector, q: &CVector) -> Result<(CVector, CMatrix)> {
        self.check(p, q)?;
        let mut grad = CVector::zeros(self.dim);
        let mut mixed = CMatrix::zeros(self.dim, self.dim);
        for f in &self.factors {
            let j = f.log_jet(p, q)?;
            for (li, &gi) in f.idx.iter().enumerate() {
                grad[gi] += j.da[li] * f.exponent;
                for (lj, &gj) in f.idx.iter().enumerate() {
                    mixed[(gi, gj)] += j.dab[(li, lj)] * f.exponent;
                }
            }
        }
        Ok((grad, mixed))
    }

    /// Diagonal jet `(K, ∂ log K, ∂∂̄ log K)` at `p`.
    pub fn jet(&self, p: &CVector) -> Result<KernelJet> {
        let value = self.eval(p, p)?;
        if !(value.re > 0.0) {
            return Err(Error::NotInterior(format!("K(p,p) = {value} is not positive")));
        }
        let (grad, hess) = self.log_derivatives(p, p)?;
        Ok(KernelJet {
            value: value.re,
            grad,
            hess,
        })
    }

    fn shifted(mut self, map: impl Fn(usize) -> usize) -> Self {
        for f in &mut self.factors {
            for i in &mut f.idx {
                *i = map(*i);
            }
        }
        self
    }

    fn merge(parts: Vec<KernelSpec>, dim: usize) -> Self {
        KernelSpec {
            constant: parts.iter().map(|p| p.constant).product(),
            factors: parts.into_iter().flat_map(|p| p.factors).collect(),
            dim,
        }
    }
}

/// Bergman constant of the tube over the Lorentz cone `Λ_n`:
/// `K = n!/(2(2π)^n) · Q((w − w̄′)/(2i))^{−n}`.
pub fn lorentz_tube_constant(n: usize) -> f64 {
    let n_f = n as f64;
    (ln_gamma(n_f + 1.0) - 2f64.ln() - n_f * (2.0 * std::f64::consts::PI).ln()).exp()
}

/// Bergman constant of the tube over positive definite Hermitian `r × r`
/// matrices in the flattened coordinates of [`crate::cones`]:
/// `2^{r(r−1)} (4π)^{−r²} Π_j Γ(2r−j+1)/Γ(r−j+1)`.
pub fn hermitian_tube_constant(r: usize) -> f64 {
    let rf = r as f64;
    let n = rf * rf;
    let mut l = rf * (rf - 1.0) * 2f64.ln() - n * (4.0 * std::f64::consts::PI).ln();
    for j in 1..=r {
        let jf = j as f64;
        l += ln_gamma(2.0 * rf - jf + 1.0) - ln_gamma(rf - jf + 1.0);
    }
    l.exp()
}

/// Bergman constant `m!/π^m` of the unit ball `B^m`.
pub fn ball_constant(m: usize) -> f64 {
    let mf = m as f64;
    (ln_gamma(mf + 1.0) - mf * std::f64::consts::PI.ln()).exp()
}

fn cone_spec(cone: &ConeDescriptor, offset: usize) -> Vec<(f64, KernelFactor)> {
    match cone {
        ConeDescriptor::HalfLine => vec![(
            1.0 / (4.0 * std::f64::consts::PI),
            KernelFactor {
                kind: FactorKind::TubeLinear,
                exponent: -2.0,
                idx: vec![offset],
            },
        )],
        ConeDescriptor::Lorentz { n } => vec![(
            lorentz_tube_constant(*n),
            KernelFactor {
                kind: FactorKind::LorentzForm,
                exponent: -(*n as f64),
                idx: (offset..offset + n).collect(),
            },
        )],
        ConeDescriptor::PdHermitian { r } => vec![(
            hermitian_tube_constant(*r),
            KernelFactor {
                kind: FactorKind::MatrixDet { r: *r },
                exponent: -2.0 * *r as f64,
                idx: (offset..offset + r * r).collect(),
            },
        )],
        ConeDescriptor::Product { factors } => ConeDescriptor::factor_offsets(factors)
            .into_iter()
            .zip(factors)
            .flat_map(|((o, _), f)| cone_spec(f, offset + o))
            .collect(),
    }
}

impl SiegelDomain {
    pub fn kernel_spec(&self) -> KernelSpec {
        let dim = self.dim();
        match self.kind() {
            SiegelKind::HalfPlane => KernelSpec {
                constant: 1.0 / (4.0 * std::f64::consts::PI),
                factors: vec![KernelFactor {
                    kind: FactorKind::TubeLinear,
                    exponent: -2.0,
                    idx: vec![0],
                }],
                dim,
            },
            SiegelKind::SiegelBall { m } => KernelSpec {
                constant: ball_constant(m + 1) / 4.0,
                factors: vec![KernelFactor {
                    kind: FactorKind::BallPairing,
                    exponent: -(*m as f64 + 2.0),
                    idx: (0..=*m).collect(),
                }],
                dim,
            },
            SiegelKind::Tube { cone } => {
                let parts = cone_spec(cone, 0);
                KernelSpec {
                    constant: parts.iter().map(|(c, _)| c).product(),
                    factors: parts.into_iter().map(|(_, f)| f).collect(),
                    dim,
                }
            }
            SiegelKind::Product { factors } => {
                let n_total = self.n();
                let (mut wo, mut uo) = (0, 0);
                let mut parts = Vec::new();
                for f in factors {
                    let (fw, fu, fnn) = (wo, uo, f.n());
                    parts.push(f.kernel_spec().shifted(move |i| {
                        if i < fnn {
                            fw + i
                        } else {
                            n_total + fu + (i - fnn)
                        }
                    }));
                    wo += f.n();
                    uo += f.m();
                }
                KernelSpec::merge(parts, dim)
            }
        }
    }

    /// Kernel value; products evaluate as the product of factor kernels.
    pub fn kernel_eval(&self, p: &SiegelPoint, q: &SiegelPoint) -> Result<C64> {
        match self.kind() {
            SiegelKind::Product { factors } => {
                let (ps, qs) = (self.split(p), self.split(q));
                let mut k = C64::new(1.0, 0.0);
                for ((f, pp), qq) in factors.iter().zip(&ps).zip(&qs) {
                    k *= f.kernel_eval(pp, qq)?;
                }
                Ok(k)
            }
            _ => self.kernel_spec().eval(&p.to_flat(), &q.to_flat()),
        }
    }
}

impl Domain {
    /// Flattened closed-form kernel description.
    pub fn kernel_spec(&self) -> KernelSpec {
        match self {
            Domain::Ball { m } => KernelSpec {
                constant: ball_constant(*m),
                factors: vec![KernelFactor {
                    kind: FactorKind::BallBounded,
                    exponent: -(*m as f64 + 1.0),
                    idx: (0..*m).collect(),
                }],
                dim: *m,
            },
            Domain::Siegel(s) => s.kernel_spec(),
            Domain::Product(fs) => {
                let parts = fs
                    .iter()
                    .zip(Domain::factor_offsets(fs))
                    .map(|(f, (o, _))| f.kernel_spec().shifted(move |i| i + o))
                    .collect();
                KernelSpec::merge(parts, self.dim())
            }
        }
    }

    /// `K_D(p, q)`; products evaluate as the product of factor kernels.
    pub fn kernel_eval(&self, p: &CVector, q: &CVector) -> Result<C64> {
        check_dim("kernel argument p", self.dim(), p.len())?;
        check_dim("kernel argument q", self.dim(), q.len())?;
        match self {
            Domain::Siegel(s) => s.kernel_eval(&SiegelPoint::from_flat(s.n(), p), &SiegelPoint::from_flat(s.n(), q)),
            Domain::Product(fs) => {
                let mut k = C64::new(1.0, 0.0);
                for (f, (o, n)) in fs.iter().zip(Domain::factor_offsets(fs)) {
                    k *= f.kernel_eval(&p.rows(o, n).into_owned(), &q.rows(o, n).into_owned())?;
                }
                Ok(k)
            }
            Domain::Ball { .. } => self.kernel_spec().eval(p, q),
        }
    }

    pub fn kernel_jet(&self, p: &CVector) -> Result<KernelJet> {
        self.kernel_spec().jet(p)
    }

    /// `det(∂²/∂p_i∂q̄_j log K(p, q))`.
    pub fn tumanov_r(&self, p: &CVector, q: &CVector) -> Result<C64> {
        let spec = self.kernel_spec();
        if spec.eval(p, q)? == C64::new(0.0, 0.0) {
            return Err(Error::FactorVanishes { factor: "K".into() });
        }
        Ok(spec.log_derivatives(p, q)?.1.determinant())
    }

    /// `|K_{D′}(φp, φq) Jφ(p) conj Jφ(q) − K_D(p, q)|` for a catalog map
    /// `φ : D → D′`.
    pub fn transformation_residual(
        &self,
        target: &Domain,
        map: &crate::automorphisms::BaseMap,
        p: &CVector,
        q: &CVector,
    ) -> Result<f64> {
        let lhs = target.kernel_eval(&map.apply(p)?, &map.apply(q)?)?
            * map.jacobian_det(p)?
            * map.jacobian_det(q)?.conj();
        Ok((lhs - self.kernel_eval(p, q)?).norm())
    }
}

/// Real-analytic `log K(z, z)` for finite-difference checks.
pub fn log_diag(domain: &Domain, z: &CVector) -> f64 {
    domain.kernel_eval(z, z).map(|k| k.re.ln()).unwrap_or(f64::NAN)
}
