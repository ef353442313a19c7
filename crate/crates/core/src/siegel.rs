//! Hermitian forms, Siegel domains of type II and the shared [`Domain`] handle.
//!
//! A Siegel domain `D(V, F) = {(w, u) ∈ C^n × C^m : Im w − F(u, u) ∈ V}` is
//! represented in flat coordinates `(w_1, …, w_n, u_1, …, u_m)`. A product of
//! Siegel domains is again a Siegel domain; it keeps this convention, so all
//! tube coordinates of all factors come first, then all fiber coordinates.
//! Products that involve a bounded factor (a [`Domain::Product`]) instead
//! concatenate the coordinates factor by factor.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cones::{ConeClassification, ConeDescriptor};
use crate::error::check_dim;
use crate::linalg::hermitian_defect;
use crate::{CMatrix, CVector, Error, RMatrix, RVector, Result, C64};

/// `F(u, v) = (v* H_1 u, …, v* H_n u)`, complex-linear in `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianForm {
    n: usize,
    m: usize,
    matrices: Vec<CMatrix>,
}

impl HermitianForm {
    pub fn new(m: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        for h in &matrices {
            if h.nrows() != m || h.ncols() != m {
                return Err(Error::DimensionMismatch {
                    what: "Hermitian form matrix",
                    expected: m,
                    found: h.nrows(),
                });
            }
            if hermitian_defect(h) > 1e-12 {
                return Err(Error::InvalidParameter("form matrix is not Hermitian".into()));
            }
        }
        Ok(Self {
            n: matrices.len(),
            m,
            matrices,
        })
    }

    /// The form on `C^0`, used by tube domains.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            m: 0,
            matrices: vec![CMatrix::zeros(0, 0); n],
        }
    }

    /// `F(u, v) = ⟨u, v⟩` with values in `R`.
    pub fn standard(m: usize) -> Self {
        Self {
            n: 1,
            m,
            matrices: vec![CMatrix::identity(m, m)],
        }
    }

    /// Block sum: `F(u_1 ⊕ u_2, v_1 ⊕ v_2) = F_1(u_1, v_1) ⊕ F_2(u_2, v_2)`.
    pub fn direct_sum(forms: &[HermitianForm]) -> Self {
        let m: usize = forms.iter().map(|f| f.m).sum();
        let mut matrices = Vec::new();
        let mut off = 0;
        for f in forms {
            for h in &f.matrices {
                let mut big = CMatrix::zeros(m, m);
                big.view_mut((off, off), (f.m, f.m)).copy_from(h);
                matrices.push(big);
            }
            off += f.m;
        }
        Self {
            n: matrices.len(),
            m,
            matrices,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn eval(&self, u: &CVector, v: &CVector) -> CVector {
        CVector::from_iterator(
            self.n,
            self.matrices.iter().map(|h| (v.adjoint() * h * u)[(0, 0)]),
        )
    }

    /// `F(u, u)`, real by construction.
    pub fn eval_diag(&self, u: &CVector) -> RVector {
        self.eval(u, u).map(|z| z.re)
    }

    /// Largest deviation of `A F(u, v)` from `F(Bu, Bv)` over the supplied pairs.
    pub fn compatibility_residual(&self, a: &RMatrix, b: &CMatrix, pairs: &[(CVector, CVector)]) -> f64 {
        let ac = a.map(|x| C64::new(x, 0.0));
        pairs
            .iter()
            .map(|(u, v)| (&ac * self.eval(u, v) - self.eval(&(b * u), &(b * v))).norm())
            .fold(0.0, f64::max)
    }
}

/// A point `(w, u)` of `C^n × C^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelPoint {
    pub w: CVector,
    pub u: CVector,
}

impl SiegelPoint {
    pub fn new(w: CVector, u: CVector) -> Self {
        Self { w, u }
    }

    pub fn from_flat(n: usize, z: &CVector) -> Self {
        Self {
            w: z.rows(0, n).into_owned(),
            u: z.rows(n, z.len() - n).into_owned(),
        }
    }

    pub fn to_flat(&self) -> CVector {
        CVector::from_iterator(
            self.w.len() + self.u.len(),
            self.w.iter().chain(self.u.iter()).copied(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SiegelKind {
    HalfPlane,
    SiegelBall { m: usize },
    Tube { cone: ConeDescriptor },
    Product { factors: Vec<SiegelDomain> },
}

/// Siegel domain of type II from the catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelDomain {
    kind: SiegelKind,
    cone: ConeDescriptor,
    form: HermitianForm,
}

impl SiegelDomain {
    /// Upper half-plane `{Im w > 0}`.
    pub fn half_plane() -> Self {
        Self {
            kind: SiegelKind::HalfPlane,
            cone: ConeDescriptor::HalfLine,
            form: HermitianForm::empty(1),
        }
    }

    /// `{(w, u) ∈ C × C^m : Im w > ‖u‖²}`, the unbounded realization of `B^{m+1}`.
    pub fn siegel_ball(m: usize) -> Self {
        if m == 0 {
            return Self::half_plane();
        }
        Self {
            kind: SiegelKind::SiegelBall { m },
            cone: ConeDescriptor::HalfLine,
            form: HermitianForm::standard(m),
        }
    }

    /// Tube domain `R^n + iV`.
    pub fn tube_over(cone: ConeDescriptor) -> Result<Self> {
        cone.validate()?;
        let n = cone.ambient_dim();
        Ok(Self {
            kind: SiegelKind::Tube { cone: cone.clone() },
            cone,
            form: HermitianForm::empty(n),
        })
    }

    pub fn product(factors: Vec<SiegelDomain>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        let cone = ConeDescriptor::Product {
            factors: factors.iter().map(|f| f.cone.clone()).collect(),
        };
        let forms: Vec<_> = factors.iter().map(|f| f.form.clone()).collect();
        Ok(Self {
            kind: SiegelKind::Product { factors },
            cone,
            form: HermitianForm::direct_sum(&forms),
        })
    }

    pub fn kind(&self) -> &SiegelKind {
        &self.kind
    }

    pub fn cone(&self) -> &ConeDescriptor {
        &self.cone
    }

    pub fn form(&self) -> &HermitianForm {
        &self.form
    }

    pub fn n(&self) -> usize {
        self.form.n
    }

    pub fn m(&self) -> usize {
        self.form.m
    }

    pub fn dim(&self) -> usize {
        self.n() + self.m()
    }

    fn check(&self, p: &SiegelPoint) -> Result<()> {
        check_dim("tube coordinate w", self.n(), p.w.len())?;
        check_dim("fiber coordinate u", self.m(), p.u.len())
    }

    /// `Im w − F(u, u)`.
    pub fn defect(&self, p: &SiegelPoint) -> Result<RVector> {
        self.check(p)?;
        Ok(p.w.map(|z| z.im) - self.form.eval_diag(&p.u))
    }

    pub fn contains(&self, p: &SiegelPoint, tol: f64) -> Result<ConeClassification> {
        self.cone.contains(self.defect(p)?.as_slice(), tol)
    }

    /// Shilov boundary test `Im w = F(u, u)`; returns the verdict and the
    /// Euclidean norm of the residual.
    pub fn shilov_membership(&self, p: &SiegelPoint, tol: f64) -> Result<(bool, f64)> {
        let r = self.defect(p)?.norm();
        Ok((r <= tol, r))
    }

    /// Split a point of a product domain into factor points.
    pub fn split(&self, p: &SiegelPoint) -> Vec<SiegelPoint> {
        match &self.kind {
            SiegelKind::Product { factors } => {
                let (mut wo, mut uo) = (0, 0);
                factors
                    .iter()
                    .map(|f| {
                        let q = SiegelPoint::new(
                            p.w.rows(wo, f.n()).into_owned(),
                            p.u.rows(uo, f.m()).into_owned(),
                        );
                        wo += f.n();
                        uo += f.m();
                        q
                    })
                    .collect()
            }
            _ => vec![p.clone()],
        }
    }

    /// Fiber part `B` of an affine automorphism whose tube part is `A`, chosen
    /// so that `A F(u, v) = F(Bu, Bv)`.
    pub fn compatible_fiber_map(&self, a: &RMatrix) -> Result<CMatrix> {
        check_dim("tube linear map", self.n(), a.nrows())?;
        match &self.kind {
            SiegelKind::HalfPlane | SiegelKind::Tube { .. } => Ok(CMatrix::zeros(0, 0)),
            SiegelKind::SiegelBall { m } => {
                let lambda = a[(0, 0)];
                if lambda <= 0.0 {
                    return Err(Error::InvalidParameter("scaling must be positive".into()));
                }
                Ok(CMatrix::identity(*m, *m).scale(lambda.sqrt()))
            }
            SiegelKind::Product { factors } => {
                let mut b = CMatrix::zeros(self.m(), self.m());
                let (mut wo, mut uo) = (0, 0);
                for f in factors {
                    let block = a.view((wo, wo), (f.n(), f.n())).into_owned();
                    let bf = f.compatible_fiber_map(&block)?;
                    b.view_mut((uo, uo), (f.m(), f.m())).copy_from(&bf);
                    wo += f.n();
                    uo += f.m();
                }
                Ok(b)
            }
        }
    }

    /// Unitary maps of the fiber that commute with `F` (so `A = I` stays
    /// compatible): `U(m)` for Siegel balls, blockwise for products.
    pub fn sample_fiber_unitary<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        match &self.kind {
            SiegelKind::HalfPlane | SiegelKind::Tube { .. } => CMatrix::zeros(0, 0),
            SiegelKind::SiegelBall { m } => random_unitary(*m, rng),
            SiegelKind::Product { factors } => {
                let mut b = CMatrix::zeros(self.m(), self.m());
                let mut uo = 0;
                for f in factors {
                    b.view_mut((uo, uo), (f.m(), f.m()))
                        .copy_from(&f.sample_fiber_unitary(rng));
                    uo += f.m();
                }
                b
            }
        }
    }

    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> SiegelPoint {
        let u = random_cvector(self.m(), 0.6, rng);
        let y = self.cone.sample_interior(rng) + self.form.eval_diag(&u);
        let w = CVector::from_fn(self.n(), |i, _| C64::new(rng.random_range(-2.0..2.0), y[i]));
        SiegelPoint::new(w, u)
    }

    pub fn sample_shilov<R: Rng + ?Sized>(&self, rng: &mut R) -> SiegelPoint {
        let u = random_cvector(self.m(), 0.8, rng);
        let y = self.form.eval_diag(&u);
        let w = CVector::from_fn(self.n(), |i, _| C64::new(rng.random_range(-2.0..2.0), y[i]));
        SiegelPoint::new(w, u)
    }

    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> SiegelPoint {
        let u = random_cvector(self.m(), 0.6, rng);
        let y = self.cone.sample_boundary(rng) + self.form.eval_diag(&u);
        let w = CVector::from_fn(self.n(), |i, _| C64::new(rng.random_range(-2.0..2.0), y[i]));
        SiegelPoint::new(w, u)
    }

    fn descriptor(&self) -> DomainDescriptor {
        match &self.kind {
            SiegelKind::HalfPlane => DomainDescriptor::HalfPlane,
            SiegelKind::SiegelBall { m } => DomainDescriptor::SiegelBall { m: *m },
            SiegelKind::Tube { cone } => DomainDescriptor::Tube { cone: cone.clone() },
            SiegelKind::Product { factors } => DomainDescriptor::Product {
                factors: factors.iter().map(Self::descriptor).collect(),
            },
        }
    }
}

pub fn random_cvector<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> CVector {
    CVector::from_fn(n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal)) * sigma
    })
}

/// Haar-ish random unitary from the QR factorisation of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let g = CMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&CVector::from_fn(n, |i, _| {
        let d = r[(i, i)];
        if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        }
    }));
    q * phases
}

/// JSON domain descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainDescriptor {
    Disc,
    Ball { m: usize },
    HalfPlane,
    SiegelBall { m: usize },
    Tube { cone: ConeDescriptor },
    Product { factors: Vec<DomainDescriptor> },
}

/// Base domain handle: a bounded ball, a Siegel domain, or a product.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Unit ball of `C^m`; `m = 1` is the unit disc.
    Ball { m: usize },
    Siegel(SiegelDomain),
    /// Product with at least one bounded factor; coordinates are concatenated
    /// factor by factor.
    Product(Vec<Domain>),
}

impl Domain {
    pub fn disc() -> Self {
        Self::Ball { m: 1 }
    }

    pub fn ball(m: usize) -> Self {
        Self::Ball { m }
    }

    pub fn half_plane() -> Self {
        Self::Siegel(SiegelDomain::half_plane())
    }

    pub fn siegel_ball(m: usize) -> Self {
        Self::Siegel(SiegelDomain::siegel_ball(m))
    }

    pub fn tube(cone: ConeDescriptor) -> Result<Self> {
        Ok(Self::Siegel(SiegelDomain::tube_over(cone)?))
    }

    /// Product of domains; collapses to a Siegel product when every factor is
    /// a Siegel domain.
    pub fn product(factors: Vec<Domain>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("empty product".into()));
        }
        if factors.iter().all(|f| matches!(f, Domain::Siegel(_))) {
            let s = factors
                .into_iter()
                .map(|f| match f {
                    Domain::Siegel(s) => s,
                    _ => unreachable!(),
                })
                .collect();
            return Ok(Self::Siegel(SiegelDomain::product(s)?));
        }
        Ok(Self::Product(factors))
    }

    pub fn from_descriptor(d: &DomainDescriptor) -> Result<Self> {
        match d {
            DomainDescriptor::Disc => Ok(Self::disc()),
            DomainDescriptor::Ball { m } if *m >= 1 => Ok(Self::ball(*m)),
            DomainDescriptor::Ball { .. } => Err(Error::InvalidParameter("ball needs m >= 1".into())),
            DomainDescriptor::HalfPlane => Ok(Self::half_plane()),
            DomainDescriptor::SiegelBall { m } => Ok(Self::siegel_ball(*m)),
            DomainDescriptor::Tube { cone } => Self::tube(cone.clone()),
            DomainDescriptor::Product { factors } => Self::product(
                factors
                    .iter()
                    .map(Self::from_descriptor)
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }

    pub fn descriptor(&self) -> DomainDescriptor {
        match self {
            Self::Ball { m: 1 } => DomainDescriptor::Disc,
            Self::Ball { m } => DomainDescriptor::Ball { m: *m },
            Self::Siegel(s) => s.descriptor(),
            Self::Product(f) => DomainDescriptor::Product {
                factors: f.iter().map(Self::descriptor).collect(),
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Ball { m } => *m,
            Self::Siegel(s) => s.dim(),
            Self::Product(f) => f.iter().map(Self::dim).sum(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            Self::Ball { .. } => true,
            Self::Siegel(_) => false,
            Self::Product(f) => f.iter().all(Self::is_bounded),
        }
    }

    pub fn as_siegel(&self) -> Option<&SiegelDomain> {
        match self {
            Self::Siegel(s) => Some(s),
            _ => None,
        }
    }

    /// `(offset, dim)` of each factor of a [`Domain::Product`].
    pub fn factor_offsets(factors: &[Domain]) -> Vec<(usize, usize)> {
        let mut off = 0;
        factors
            .iter()
            .map(|f| {
                let r = (off, f.dim());
                off += f.dim();
                r
            })
            .collect()
    }

    /// Membership with a signed defect: `1 − ‖z‖²` for balls, the cone defect
    /// of `Im w − F(u, u)` for Siegel domains, the minimum over product factors.
    pub fn classify(&self, z: &CVector, tol: f64) -> Result<ConeClassification> {
        check_dim("base point", self.dim(), z.len())?;
        match self {
            Self::Ball { .. } => Ok(ConeClassification::from_defect(1.0 - z.norm_squared(), tol)),
            Self::Siegel(s) => s.contains(&SiegelPoint::from_flat(s.n(), z), tol),
            Self::Product(f) => {
                let mut defect = f64::INFINITY;
                for (d, (o, n)) in f.iter().zip(Self::factor_offsets(f)) {
                    defect = defect.min(d.classify(&z.rows(o, n).into_owned(), tol)?.defect);
                }
                Ok(ConeClassification::from_defect(defect, tol))
            }
        }
    }

    pub fn sample_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        match self {
            Self::Ball { m } => {
                let v = random_cvector(*m, 1.0, rng);
                let r = rng.random_range(0.0..0.85);
                v.unscale(v.norm()).scale(r)
            }
            Self::Siegel(s) => s.sample_interior(rng).to_flat(),
            Self::Product(f) => concat(f.iter().map(|d| d.sample_interior(rng)).collect()),
        }
    }

    pub fn sample_boundary<R: Rng + ?Sized>(&self, rng: &mut R) -> CVector {
        match self {
            Self::Ball { m } => {
                let v = random_cvector(*m, 1.0, rng);
                v.unscale(v.norm())
            }
            Self::Siegel(s) => s.sample_boundary(rng).to_flat(),
            Self::Product(f) => {
                let k = rng.random_range(0..f.len());
                concat(
                    f.iter()
                        .enumerate()
                        .map(|(i, d)| if i == k { d.sample_boundary(rng) } else { d.sample_interior(rng) })
                        .collect(),
                )
            }
        }
    }

    /// The shipped catalog used by the verification suites.
    pub fn catalog() -> Vec<(&'static str, Domain)> {
        vec![
            ("disc", Self::disc()),
            ("ball2", Self::ball(2)),
            ("bidisc", Self::Product(vec![Self::disc(), Self::disc()])),
            ("half_plane", Self::half_plane()),
            ("siegel_ball1", Self::siegel_ball(1)),
            ("siegel_ball2", Self::siegel_ball(2)),
            ("tube_lorentz3", Self::tube(ConeDescriptor::Lorentz { n: 3 }).expect("valid cone")),
            ("tube_pd_hermitian2", Self::tube(ConeDescriptor::PdHermitian { r: 2 }).expect("valid cone")),
            (
                "half_plane_x_siegel_ball1",
                Self::product(vec![Self::half_plane(), Self::siegel_ball(1)]).expect("non-empty"),
            ),
        ]
    }
}

pub(crate) fn concat(parts: Vec<CVector>) -> CVector {
    let n = parts.iter().map(|p| p.len()).sum();
    CVector::from_iterator(n, parts.iter().flat_map(|p| p.iter().copied()))
}
