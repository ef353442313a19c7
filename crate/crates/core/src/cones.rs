//! Homogeneous convex cones used as bases of Siegel domains.
//!
//! Matrix cones are stored in flattened real coordinates. For
//! `PdHermitian { r }` a Hermitian `r × r` matrix `X` is written row-major over
//! its upper triangle: the diagonal entry `X_ii` contributes one real
//! coordinate, each `X_ij` with `i < j` contributes `Re X_ij, Im X_ij`. This
//! gives `r²` coordinates in total.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::check_dim;
use crate::linalg::{hermitian_eigenvalues, pd_sqrt_pair};
use crate::{CMatrix, Error, RMatrix, RVector, Result, C64};

/// An open convex homogeneous cone from the supported catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeDescriptor {
    /// `(0, ∞) ⊂ R`.
    HalfLine,
    /// `{x ∈ R^n : x_1 > ‖(x_2, …, x_n)‖}`, `n ≥ 2`.
    Lorentz { n: usize },
    /// Positive definite Hermitian `r × r` matrices, `r ≥ 1`.
    PdHermitian { r: usize },
    /// Cartesian product, coordinates concatenated factor by factor.
    Product { factors: Vec<ConeDescriptor> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipStatus {
    Interior,
    Boundary,
    Exterior,
}

/// Membership verdict plus the signed defect it was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeClassification {
    pub status: MembershipStatus,
    pub defect: f64,
}

impl ConeClassification {
    pub fn from_defect(defect: f64, tol: f64) -> Self {
        let status = if defect.is_nan() || defect < -tol {
            MembershipStatus::Exterior
        } else if defect > tol {
            MembershipStatus::Interior
        } else {
            MembershipStatus::Boundary
        };
        Self { status, defect }
    }

    pub fn is_interior(&self) -> bool {
        self.status == MembershipStatus::Interior
    }
}

/// Variant-specific parameters for an element of `G(V)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeParams {
    HalfLine {
        lambda: f64,
    },
    /// `λ · R(angle) · Boost(rapidity)`; the boost acts in the `(x_1, x_2)`
    /// plane, the rotation in the `(x_2, x_3)` plane (requires `n ≥ 3` when
    /// non-zero).
    Lorentz {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default)]
        rapidity: f64,
        #[serde(default)]
        angle: f64,
    },
    /// `X ↦ g X g*` with `g` given row-major as `[re, im]` pairs.
    PdHermitian {
        #[serde(with = "crate::wire::complex_matrix")]
        g: CMatrix,
    },
    Product {
        factors: Vec<ConeParams>,
    },
}

fn one() -> f64 {
    1.0
}

impl ConeDescriptor {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::HalfLine => 1,
            Self::Lorentz { n } => *n,
            Self::PdHermitian { r } => r * r,
            Self::Product { factors } => factors.iter().map(Self::ambient_dim).sum(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::HalfLine => Ok(()),
            Self::Lorentz { n } if *n >= 2 => Ok(()),
            Self::Lorentz { n } => Err(Error::InvalidParameter(format!(
                "Lorentz cone needs n >= 2, got {n}"
            ))),
            Self::PdHermitian { r } if *r >= 1 => Ok(()),
            Self::PdHermitian { .. } => Err(Error::InvalidParameter(
                "PD Hermitian cone needs r >= 1".into(),
            )),
            Self::Product { factors } if factors.is_empty() => {
                Err(Error::InvalidParameter("empty cone product".into()))
            }
            Self::Product { factors } => factors.iter().try_for_each(Self::validate),
        }
    }

    /// Slices of the flat coordinate vector belonging to each product factor.
    pub fn factor_offsets(factors: &[ConeDescriptor]) -> Vec<(usize, usize)> {
        let mut off = 0;
        factors
            .iter()
            .map(|f| {
                let d = f.ambient_dim();
                let r = (off, d);
                off += d;
                r
            })
            .collect()
    }

    /// Signed distance proxy: positive inside, zero on the boundary.
    pub fn defect(&self, x: &[f64]) -> Result<f64> {
        check_dim("cone point", self.ambient_dim(), x.len())?;
        Ok(match self {
            Self::HalfLine => x[0],
            Self::Lorentz { .. } => x[0] - x[1..].iter().map(|v| v * v).sum::<f64>().sqrt(),
            Self::PdHermitian { r } => hermitian_eigenvalues(&coords_to_hermitian(*r, x)?)[0],
            Self::Product { factors } => {
                let mut d = f64::INFINITY;
                for (f, (o, n)) in factors.iter().zip(Self::factor_offsets(factors)) {
                    d = d.min(f.defect(&x[o..o + n])?);
                }
                d
            }
        })
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> Result<ConeClassification> {
        Ok(ConeClassification::from_defect(self.defect(x)?, tol))
    }

    /// Canonical interior point: `1`, `(1, 0, …, 0)`, the identity matrix.
    pub fn base_point(&self) -> RVector {
        match self {
            Self::HalfLine => RVector::from_element(1, 1.0),
            Self::Lorentz { n } => {
                let mut v = RVector::zeros(*n);
                v[0] = 1.0;
                v
            }
            Self::PdHermitian { r } => RVector::from_vec(hermitian_to_coords(&CMatrix::identity(*r, *r))),
            Self::Product { factors } => {
                RVector::from_iterator(self.ambient_dim(), factors.iter().flat_map(|f| f.base_point().data.as_vec().clone()))
            }
        }
    }

    /// Matrix of the linear automorphism described by `params`.
    pub fn linear_aut(&self, params: &ConeParams) -> Result<RMatrix> {
        match (self, params) {
            (Self::HalfLine, ConeParams::HalfLine { lambda }) => {
                positive("lambda", *lambda)?;
                Ok(RMatrix::from_element(1, 1, *lambda))
            }
            (
                Self::Lorentz { n },
                ConeParams::Lorentz {
                    lambda,
                    rapidity,
                    angle,
                },
            ) => {
                positive("lambda", *lambda)?;
                if !rapidity.is_finite() || !angle.is_finite() {
                    return Err(Error::InvalidParameter("non-finite Lorentz parameter".into()));
                }
                if *n < 3 && *angle != 0.0 {
                    return Err(Error::InvalidParameter(
                        "rotation needs a Lorentz cone with n >= 3".into(),
                    ));
                }
                let mut dir = RVector::zeros(n - 1);
                dir[0] = 1.0;
                let boost = lorentz_boost(&dir, *rapidity);
                let mut rot = RMatrix::identity(*n, *n);
                if *n >= 3 {
                    let (s, c) = angle.sin_cos();
                    rot[(1, 1)] = c;
                    rot[(1, 2)] = -s;
                    rot[(2, 1)] = s;
                    rot[(2, 2)] = c;
                }
                Ok((rot * boost).scale(*lambda))
            }
            (Self::PdHermitian { r }, ConeParams::PdHermitian { g }) => {
                if g.nrows() != *r || g.ncols() != *r {
                    return Err(Error::DimensionMismatch {
                        what: "congruence matrix g",
                        expected: *r,
                        found: g.nrows(),
                    });
                }
                if g.determinant().norm() < 1e-14 {
                    return Err(Error::InvalidParameter("congruence matrix g is singular".into()));
                }
                Ok(congruence_matrix(*r, g))
            }
            (Self::Product { factors }, ConeParams::Product { factors: ps }) => {
                check_dim("product cone parameters", factors.len(), ps.len())?;
                let blocks = factors
                    .iter()
                    .zip(ps)
                    .map(|(f, p)| f.linear_aut(p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(block_diag(&blocks))
            }
            _ => Err(Error::InvalidParameter(
                "cone parameters do not match the cone variant".into(),
            )),
        }
    }

    /// An element `A ∈ G(V)` with `A x = y`.
    pub fn transitive_map(&self, x: &[f64], y: &[f64]) -> Result<RMatrix> {
        for (name, p) in [("x", x), ("y", y)] {
            if !self.contains(p, 0.0)?.is_interior() {
                return Err(Error::NotInterior(format!("{name} is not in the open cone")));
            }
        }
        match self {
            Self::HalfLine => Ok(RMatrix::from_element(1, 1, y[0] / x[0])),
            Self::Lorentz { .. } => {
                let (dx, ex) = lorentz_frame(x);
                let (dy, ey) = lorentz_frame(y);
                let to_axis = lorentz_boost(&dx, -ex.1);
                let from_axis = lorentz_boost(&dy, ey.1);
                Ok((from_axis * to_axis).scale(ey.0 / ex.0))
            }
            Self::PdHermitian { r } => {
                let xm = coords_to_hermitian(*r, x)?;
                let ym = coords_to_hermitian(*r, y)?;
                let (_, x_isqrt) = pd_sqrt_pair(&xm)?;
                let (y_sqrt, _) = pd_sqrt_pair(&ym)?;
                Ok(congruence_matrix(*r, &(y_sqrt * x_isqrt)))
            }
            Self::Product { factors } => {
                let blocks = factors
                    .iter()
                    .zip(Self::factor_offsets(factors))
                    .map(|(f, (o, n))| f.transitive_map(&x[o..o + n], &y[o..o + n]))
                    .collect::<Result<Vec<_>>>()?;
                Ok(block_diag(&blocks))
            }
        }
    }

    /// Random interior point with defect of order one.
    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> RVector {
        match self {
            Self::HalfLine => RVector::from_element(1, rng.random_range(0.2..3.0)),
            Self::Lorentz { n } => {
                let spatial = RVector::from_fn(n - 1, |_, _| rng.random_range(-1.5..1.5));
                let mut v = RVector::zeros(*n);
                v[0] = spatial.norm() + rng.random_range(0.2..2.0);
                v.rows_mut(1, n - 1).copy_from(&spatial);
                v
            }
            Self::PdHermitian { r } => {
                let g = CMatrix::from_fn(*r, *r, |_, _| {
                    C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * 0.5
                });
                let x = &g * g.adjoint() + CMatrix::identity(*r, *r).scale(rng.random_range(0.2..1.0));
                RVector::from_vec(hermitian_to_coords(&x))
            }
            Self::Product { factors } => RVector::from_iterator(
                self.ambient_dim(),
                factors
                    .iter()
                    .flat_map(|f| f.sample_interior(rng).data.as_vec().clone())
                    .collect::<Vec<_>>(),
            ),
        }
    }

    /// Random point of the boundary `∂V` (nonzero).
    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> RVector {
        match self {
            Self::HalfLine => RVector::zeros(1),
            Self::Lorentz { n } => {
                let spatial = RVector::from_fn(n - 1, |_, _| rng.sample::<f64, _>(StandardNormal));
                let mut v = RVector::zeros(*n);
                v[0] = spatial.norm();
                v.rows_mut(1, n - 1).copy_from(&spatial);
                v
            }
            Self::PdHermitian { r } => {
                // rank-deficient PSD matrix
                let g = CMatrix::from_fn(*r, r.saturating_sub(1).max(1), |_, _| {
                    C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * 0.5
                });
                let x = if *r == 1 { CMatrix::zeros(1, 1) } else { &g * g.adjoint() };
                RVector::from_vec(hermitian_to_coords(&x))
            }
            Self::Product { factors } => {
                let k = rng.random_range(0..factors.len());
                RVector::from_iterator(
                    self.ambient_dim(),
                    factors
                        .iter()
                        .enumerate()
                        .flat_map(|(i, f)| {
                            if i == k {
                                f.sample_boundary(rng)
                            } else {
                                f.sample_interior(rng)
                            }
                            .data
                            .as_vec()
                            .clone()
                        })
                        .collect::<Vec<_>>(),
                )
            }
        }
    }

    /// Random parameters of an element of `G(V)`.
    pub fn sample_params<R: Rng + ?Sized>(&self, rng: &mut R) -> ConeParams {
        match self {
            Self::HalfLine => ConeParams::HalfLine {
                lambda: rng.random_range(0.3..3.0),
            },
            Self::Lorentz { n } => ConeParams::Lorentz {
                lambda: rng.random_range(0.3..3.0),
                rapidity: rng.random_range(-1.5..1.5),
                angle: if *n >= 3 { rng.random_range(-3.0..3.0) } else { 0.0 },
            },
            Self::PdHermitian { r } => {
                let g = CMatrix::from_fn(*r, *r, |i, j| {
                    let d = if i == j { 1.0 } else { 0.0 };
                    C64::new(d + 0.4 * rng.sample::<f64, _>(StandardNormal), 0.4 * rng.sample::<f64, _>(StandardNormal))
                });
                ConeParams::PdHermitian { g }
            }
            Self::Product { factors } => ConeParams::Product {
                factors: factors.iter().map(|f| f.sample_params(rng)).collect(),
            },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

/// `(direction, (μ, η))` with `x = μ · Boost(direction, η) · e_1`.
fn lorentz_frame(x: &[f64]) -> (RVector, (f64, f64)) {
    let spatial = RVector::from_column_slice(&x[1..]);
    let s = spatial.norm();
    let mu = ((x[0] - s) * (x[0] + s)).sqrt();
    let eta = (s / x[0]).atanh();
    let dir = if s > 0.0 {
        spatial.unscale(s)
    } else {
        let mut d = RVector::zeros(x.len() - 1);
        d[0] = 1.0;
        d
    };
    (dir, (mu, eta))
}

/// Pure Lorentz boost with unit spatial direction `dir` and rapidity `eta`.
pub fn lorentz_boost(dir: &RVector, eta: f64) -> RMatrix {
    let n = dir.len() + 1;
    let (ch, sh) = (eta.cosh(), eta.sinh());
    let mut b = RMatrix::identity(n, n);
    b[(0, 0)] = ch;
    for i in 0..dir.len() {
        b[(0, i + 1)] = sh * dir[i];
        b[(i + 1, 0)] = sh * dir[i];
        for j in 0..dir.len() {
            b[(i + 1, j + 1)] += (ch - 1.0) * dir[i] * dir[j];
        }
    }
    b
}

/// Real matrix of `X ↦ g X g*` in flattened coordinates.
pub fn congruence_matrix(r: usize, g: &CMatrix) -> RMatrix {
    let n = r * r;
    let mut m = RMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let x = coords_to_hermitian(r, &e).expect("basis vector has the right length");
        let img = hermitian_to_coords(&(g * x * g.adjoint()));
        for (i, v) in img.into_iter().enumerate() {
            m[(i, k)] = v;
        }
    }
    m
}

pub fn block_diag(blocks: &[RMatrix]) -> RMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = RMatrix::zeros(n, n);
    let mut o = 0;
    for b in blocks {
        m.view_mut((o, o), (b.nrows(), b.ncols())).copy_from(b);
        o += b.nrows();
    }
    m
}

/// Flatten a Hermitian matrix into the canonical `r²` real coordinates.
pub fn hermitian_to_coords(x: &CMatrix) -> Vec<f64> {
    let r = x.nrows();
    let mut out = Vec::with_capacity(r * r);
    for i in 0..r {
        for j in i..r {
            if i == j {
                out.push(x[(i, i)].re);
            } else {
                out.push(x[(i, j)].re);
                out.push(x[(i, j)].im);
            }
        }
    }
    out
}

/// Inverse of [`hermitian_to_coords`].
pub fn coords_to_hermitian(r: usize, x: &[f64]) -> Result<CMatrix> {
    let z: Vec<C64> = x.iter().map(|&v| C64::new(v, 0.0)).collect();
    coords_to_matrix(r, &z)
}

/// Complex-linear extension of [`coords_to_hermitian`]: with complex
/// coordinates the result is no longer Hermitian, which is exactly what the
/// tube-domain kernel needs.
pub fn coords_to_matrix(r: usize, x: &[C64]) -> Result<CMatrix> {
    check_dim("Hermitian coordinates", r * r, x.len())?;
    let i_unit = C64::new(0.0, 1.0);
    let mut m = CMatrix::zeros(r, r);
    let mut k = 0;
    for i in 0..r {
        for j in i..r {
            if i == j {
                m[(i, i)] = x[k];
                k += 1;
            } else {
                m[(i, j)] = x[k] + i_unit * x[k + 1];
                m[(j, i)] = x[k] - i_unit * x[k + 1];
                k += 2;
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn catalog() -> Vec<ConeDescriptor> {
        vec![
            ConeDescriptor::HalfLine,
            ConeDescriptor::Lorentz { n: 2 },
            ConeDescriptor::Lorentz { n: 3 },
            ConeDescriptor::Lorentz { n: 4 },
            ConeDescriptor::PdHermitian { r: 1 },
            ConeDescriptor::PdHermitian { r: 2 },
            ConeDescriptor::PdHermitian { r: 3 },
            ConeDescriptor::Product {
                factors: vec![ConeDescriptor::HalfLine, ConeDescriptor::Lorentz { n: 3 }],
            },
        ]
    }

    #[test]
    fn membership_examples() {
        let c = ConeDescriptor::HalfLine.contains(&[1.0], 1e-9).unwrap();
        assert_eq!(c.status, MembershipStatus::Interior);
        assert_eq!(c.defect, 1.0);

        let l3 = ConeDescriptor::Lorentz { n: 3 };
        let c = l3.contains(&[2.0, 1.0, 1.0], 1e-9).unwrap();
        assert_eq!(c.status, MembershipStatus::Interior);
        assert!((c.defect - (2.0 - 2f64.sqrt())).abs() < 1e-15);

        let c = l3.contains(&[1.0, 1.0, 0.0], 1e-9).unwrap();
        assert_eq!(c.status, MembershipStatus::Boundary);
        assert_eq!(c.defect, 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = ConeDescriptor::Lorentz { n: 3 }.contains(&[1.0, 0.0], 1e-9);
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ambient_dims() {
        assert_eq!(ConeDescriptor::PdHermitian { r: 3 }.ambient_dim(), 9);
        let p = ConeDescriptor::Product {
            factors: vec![ConeDescriptor::PdHermitian { r: 2 }, ConeDescriptor::Lorentz { n: 3 }],
        };
        assert_eq!(p.ambient_dim(), 7);
    }

    #[test]
    fn linear_aut_examples() {
        let a = ConeDescriptor::HalfLine
            .linear_aut(&ConeParams::HalfLine { lambda: 2.0 })
            .unwrap();
        assert_eq!(a, RMatrix::from_element(1, 1, 2.0));

        let g = CMatrix::from_element(1, 1, C64::new(2.0, 0.0));
        let a = ConeDescriptor::PdHermitian { r: 1 }
            .linear_aut(&ConeParams::PdHermitian { g })
            .unwrap();
        assert_eq!(a, RMatrix::from_element(1, 1, 4.0));

        let a = ConeDescriptor::Lorentz { n: 3 }
            .linear_aut(&ConeParams::Lorentz {
                lambda: 1.0,
                rapidity: 0.0,
                angle: 0.0,
            })
            .unwrap();
        assert_eq!(a, RMatrix::identity(3, 3));
    }

    #[test]
    fn linear_aut_rejects_bad_params() {
        assert!(ConeDescriptor::HalfLine
            .linear_aut(&ConeParams::HalfLine { lambda: -1.0 })
            .is_err());
        let g = CMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(2.0, 0.0)]);
        assert!(ConeDescriptor::PdHermitian { r: 2 }
            .linear_aut(&ConeParams::PdHermitian { g })
            .is_err());
    }

    #[test]
    fn transitive_examples() {
        let a = ConeDescriptor::HalfLine.transitive_map(&[1.0], &[3.0]).unwrap();
        assert_eq!(a[(0, 0)], 3.0);

        let id = hermitian_to_coords(&CMatrix::identity(2, 2));
        let a = ConeDescriptor::PdHermitian { r: 2 }.transitive_map(&id, &id).unwrap();
        assert!((a - RMatrix::identity(4, 4)).norm() < 1e-12);

        let a = ConeDescriptor::Lorentz { n: 3 }
            .transitive_map(&[1.0, 0.0, 0.0], &[2.0, 1.0, 0.0])
            .unwrap();
        let r = &a * RVector::from_vec(vec![1.0, 0.0, 0.0]) - RVector::from_vec(vec![2.0, 1.0, 0.0]);
        assert!(r.norm() <= 1e-10);
    }

    #[test]
    fn transitive_rejects_exterior() {
        assert!(ConeDescriptor::Lorentz { n: 3 }
            .transitive_map(&[1.0, 2.0, 0.0], &[1.0, 0.0, 0.0])
            .is_err());
    }

    #[test]
    fn cone_axioms_by_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for cone in catalog() {
            for _ in 0..1000 {
                let x = cone.sample_interior(&mut rng);
                let lambda = rng.random_range(1e-6..=10.0);
                assert!(cone.contains((x.scale(lambda)).as_slice(), 0.0).unwrap().is_interior());
            }
            for _ in 0..500 {
                let x = cone.sample_interior(&mut rng);
                let y = cone.sample_interior(&mut rng);
                assert!(cone.contains((&x + &y).as_slice(), 0.0).unwrap().is_interior());
                let neg = cone.contains((-&x).as_slice(), 0.0).unwrap();
                assert_eq!(neg.status, MembershipStatus::Exterior, "{cone:?}");
            }
        }
    }

    #[test]
    fn linear_aut_preserves_classification() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for cone in catalog() {
            for _ in 0..500 {
                let a = cone.linear_aut(&cone.sample_params(&mut rng)).unwrap();
                let x = cone.sample_interior(&mut rng);
                assert!(cone.contains((&a * &x).as_slice(), 1e-9).unwrap().is_interior());
                let b = cone.sample_boundary(&mut rng);
                let img = cone.contains((&a * &b).as_slice(), 1e-9).unwrap();
                assert_eq!(img.status, MembershipStatus::Boundary, "{cone:?} {}", img.defect);
            }
        }
    }

    #[test]
    fn transitive_maps_invert_each_other() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for cone in catalog() {
            for _ in 0..100 {
                let x = cone.sample_interior(&mut rng);
                let y = cone.sample_interior(&mut rng);
                let a = cone.transitive_map(x.as_slice(), y.as_slice()).unwrap();
                let b = cone.transitive_map(y.as_slice(), x.as_slice()).unwrap();
                assert!((&a * &x - &y).norm() <= 1e-9 * (1.0 + y.norm()));
                let n = cone.ambient_dim();
                assert!((b * a - RMatrix::identity(n, n)).amax() <= 1e-9, "{cone:?}");
            }
        }
    }

    #[test]
    fn flattening_round_trip() {
        let x = CMatrix::from_row_slice(2, 2, &[C64::new(2.0, 0.0), C64::new(0.5, -1.5), C64::new(0.5, 1.5), C64::new(3.0, 0.0)]);
        let coords = hermitian_to_coords(&x);
        assert_eq!(coords, vec![2.0, 0.5, -1.5, 3.0]);
        assert_eq!(coords_to_hermitian(2, &coords).unwrap(), x);
    }

    #[test]
    fn descriptor_json() {
        let c: ConeDescriptor = serde_json::from_str(r#"{"kind": "lorentz", "n": 3}"#).unwrap();
        assert_eq!(c, ConeDescriptor::Lorentz { n: 3 });
        let s = serde_json::to_string(&ConeDescriptor::PdHermitian { r: 2 }).unwrap();
        assert_eq!(s, r#"{"kind":"pd_hermitian","r":2}"#);
    }
}
