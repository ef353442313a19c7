//! Defining function `ρ = ‖ζ‖² − K(z,z)^{−s}` and Levi-form certificates on
//! the smooth boundary stratum `∂₀ = {h = 1}`.
//!
//! With `L = log K`, `g = ∂L` and `H = ∂∂̄L`:
//!
//! * `∂ρ = (s K^{−s} g, ζ̄)`
//! * `∂∂̄ρ = diag(s K^{−s} (H − s g g*), I)`
//!
//! On a tangent vector `V = (X, Y)` at a `∂₀` point this becomes
//! `s K^{−s} H(X, X̄) + ‖ζ‖^{−2}(‖Y‖²‖ζ‖² − |⟨ζ, Y⟩|²)`.

use serde::{Deserialize, Serialize};

use crate::hartogs::{HartogsDomain, HartogsPoint, HartogsStatus};
use crate::linalg::{annihilator_basis, fd_levi_matrix_steps, hermitian_eigenvalues};
use crate::wire::WirePoint;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Value, holomorphic gradient and complex Hessian of `ρ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefiningJet {
    pub rho: f64,
    #[serde(with = "crate::wire::complex_vec")]
    pub d_rho: CVector,
    /// `M_ij = ∂²ρ/∂z_i∂z̄_j`.
    #[serde(with = "crate::wire::complex_matrix")]
    pub levi: CMatrix,
    /// `K(z, z)^{−s}`.
    pub k_neg_s: f64,
    /// `∂∂̄ log K` at `z`.
    #[serde(with = "crate::wire::complex_matrix")]
    pub base_hess: CMatrix,
}

/// Which coefficient on the fiber correction reproduces the Levi form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionCoefficient {
    /// `‖ζ‖^{−2}`
    InverseSquare,
    /// `‖ζ‖^{−1}`
    Inverse,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeviReport {
    pub point: WirePoint,
    #[serde(with = "crate::wire::complex_vec_list")]
    pub tangent_basis: Vec<CVector>,
    /// `max |∂ρ(V)| / ‖∂ρ‖` over the basis.
    pub tangency_residual: f64,
    pub min_eig: f64,
    /// Max entrywise deviation from the finite-difference Hessian, relative to
    /// the largest entry.
    pub fd_residual: f64,
    /// Relative deviation of the closed form with `‖ζ‖^{−2}`.
    pub closed_form_residual: f64,
    /// Same with the coefficient `‖ζ‖^{−1}`.
    pub inverse_coefficient_residual: f64,
    pub matching_coefficient: CorrectionCoefficient,
}

impl HartogsDomain {
    /// `ρ(z, ζ)`; `NaN` outside the base.
    pub fn rho(&self, p: &HartogsPoint) -> f64 {
        match self.base().kernel_eval(&p.z, &p.z) {
            Ok(k) if k.re > 0.0 => p.zeta.norm_squared() - k.re.powf(-self.s()),
            _ => f64::NAN,
        }
    }

    pub fn defining_jet(&self, p: &HartogsPoint) -> Result<DefiningJet> {
        let d = self.base().dim();
        let nf = self.n_fiber();
        crate::error::check_dim("fiber coordinate zeta", nf, p.zeta.len())?;
        let cls = self.base().classify(&p.z, 0.0)?;
        if !cls.is_interior() {
            return Err(Error::NotInterior(format!("base defect {}", cls.defect)));
        }
        let jet = self.base().kernel_jet(&p.z)?;
        let s = self.s();
        let kns = jet.value.powf(-s);
        let mut d_rho = CVector::zeros(d + nf);
        d_rho.rows_mut(0, d).copy_from(&(&jet.grad * C64::new(s * kns, 0.0)));
        d_rho.rows_mut(d, nf).copy_from(&p.zeta.map(|x| x.conj()));
        let mut levi = CMatrix::zeros(d + nf, d + nf);
        let zblock = (&jet.hess - &jet.grad * jet.grad.adjoint() * C64::new(s, 0.0)) * C64::new(s * kns, 0.0);
        levi.view_mut((0, 0), (d, d)).copy_from(&zblock);
        levi.view_mut((d, d), (nf, nf)).fill_with_identity();
        Ok(DefiningJet {
            rho: p.zeta.norm_squared() - kns,
            d_rho,
            levi,
            k_neg_s: kns,
            base_hess: jet.hess,
        })
    }

    /// Strong pseudoconvexity certificate at a `∂₀` point.
    pub fn levi_certificate(&self, p: &HartogsPoint, tol: f64) -> Result<LeviReport> {
        let cls = self.contains(p, tol)?;
        if cls.status != HartogsStatus::Boundary0 {
            return Err(Error::WrongStratum {
                stratum: "boundary0",
                detail: format!("classified as {:?} with h = {:?}", cls.status, cls.h),
            });
        }
        let jet = self.defining_jet(p)?;
        let basis = tangent_basis(&jet)?;
        let dn = jet.d_rho.norm();
        let tangency_residual = basis
            .iter()
            .map(|v| jet.d_rho.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<C64>().norm() / dn)
            .fold(0.0, f64::max);
        let restricted = restricted_form(&jet.levi, &basis);
        let min_eig = hermitian_eigenvalues(&restricted).first().copied().unwrap_or(f64::INFINITY);

        let d = self.base().dim();
        let f = |v: &CVector| self.rho(&HartogsPoint::from_flat(d, v));
        let x0 = p.to_flat();
        // base steps follow the Bergman length scale; ρ is quadratic in ζ
        let lam = hermitian_eigenvalues(&jet.base_hess).last().copied().unwrap_or(1.0);
        let zscale = 3e-4 / lam.sqrt();
        let steps: Vec<f64> = (0..x0.len())
            .map(|i| if i < d { zscale } else { 1e-3 * (1.0 + p.zeta.norm()) })
            .collect();
        let fd = fd_levi_matrix_steps(&f, &x0, &steps);
        let big = jet.levi.iter().map(|x| x.norm()).fold(0.0, f64::max);
        let fd_residual = (&fd - &jet.levi).iter().map(|x| x.norm()).fold(0.0, f64::max) / big;

        let zn2 = p.zeta.norm_squared();
        let mut res2: f64 = 0.0;
        let mut res1: f64 = 0.0;
        let probes = basis.iter().cloned().chain(pairwise_sums(&basis));
        for v in probes {
            let direct = levi_value(&jet.levi, &v);
            let x = v.rows(0, d).into_owned();
            let y = v.rows(d, self.n_fiber()).into_owned();
            let hx = levi_value(&jet.base_hess, &x) * self.s() * jet.k_neg_s;
            let cs = y.norm_squared() * zn2 - crate::linalg::inner(&y, &p.zeta).norm_sqr();
            let denom = direct.abs().max(1e-300);
            res2 = res2.max((hx + cs / zn2 - direct).abs() / denom);
            res1 = res1.max((hx + cs / zn2.sqrt() - direct).abs() / denom);
        }
        let matching_coefficient = if res2 <= 1e-8 {
            CorrectionCoefficient::InverseSquare
        } else if res1 <= 1e-8 {
            CorrectionCoefficient::Inverse
        } else {
            CorrectionCoefficient::Neither
        };
        Ok(LeviReport {
            point: p.clone().into(),
            tangent_basis: basis,
            tangency_residual,
            min_eig,
            fd_residual,
            closed_form_residual: res2,
            inverse_coefficient_residual: res1,
            matching_coefficient,
        })
    }
}

fn pairwise_sums(basis: &[CVector]) -> Vec<CVector> {
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            out.push(&basis[i] + &basis[j] * C64::new(0.6, -0.8));
        }
    }
    out
}

/// `Σ M_ij V_i V̄_j`.
pub fn levi_value(m: &CMatrix, v: &CVector) -> f64 {
    (v.transpose() * m * v.map(|x| x.conj()))[(0, 0)].re
}

/// Orthonormal basis of `{V : ∂ρ(V) = 0}`.
pub fn tangent_basis(jet: &DefiningJet) -> Result<Vec<CVector>> {
    annihilator_basis(&jet.d_rho).map_err(|_| Error::WrongStratum {
        stratum: "boundary0",
        detail: "the gradient of rho vanishes".into(),
    })
}

/// `R_kl = t_kᵀ M t̄_l` in the given basis.
pub fn restricted_form(m: &CMatrix, basis: &[CVector]) -> CMatrix {
    let k = basis.len();
    CMatrix::from_fn(k, k, |a, b| {
        (basis[a].transpose() * m * basis[b].map(|x| x.conj()))[(0, 0)]
    })
}
