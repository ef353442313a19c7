//! Base automorphisms, realization changes and the induced Hartogs maps
//! `Φ(z, ζ) = (φ(z), U ζ · Jφ(z)^s)`.
//!
//! Every base map carries a logarithm of its holomorphic Jacobian that is
//! continuous on its source domain; `Jφ^s` is `exp(s · log Jφ)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cones::{block_diag, congruence_matrix, ConeDescriptor};
use crate::error::check_dim;
use crate::hartogs::{HartogsDomain, HartogsPoint};
use crate::linalg::{inner, real_to_complex, unitary_defect, I};
use crate::siegel::{concat, random_cvector, random_unitary, Domain, DomainDescriptor, SiegelDomain, SiegelPoint};
use crate::{CMatrix, CVector, Error, RMatrix, RVector, Result, C64};

const ONE: C64 = C64 { re: 1.0, im: 0.0 };

fn log_or_cut(z: C64, what: &str) -> Result<C64> {
    if z.re <= 0.0 {
        return Err(Error::BranchCut {
            factor: what.to_string(),
            value: z,
        });
    }
    Ok(z.ln())
}

/// `u ↦ B u + c`, `w ↦ A w + a + 2i F(B u, c) + i F(c, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineSiegelAutomorphism {
    domain: SiegelDomain,
    a_mat: RMatrix,
    b_mat: CMatrix,
    a_vec: RVector,
    c_vec: CVector,
}

impl AffineSiegelAutomorphism {
    pub fn new(domain: SiegelDomain, a_mat: RMatrix, b_mat: CMatrix, a_vec: RVector, c_vec: CVector) -> Result<Self> {
        let (n, m) = (domain.n(), domain.m());
        check_dim("A rows", n, a_mat.nrows())?;
        check_dim("A columns", n, a_mat.ncols())?;
        check_dim("B rows", m, b_mat.nrows())?;
        check_dim("B columns", m, b_mat.ncols())?;
        check_dim("a", n, a_vec.len())?;
        check_dim("c", m, c_vec.len())?;
        let img = &a_mat * domain.cone().base_point();
        if !domain.cone().contains(img.as_slice(), 0.0)?.is_interior() {
            return Err(Error::InvalidParameter("A does not preserve the cone".into()));
        }
        if m > 0 && b_mat.determinant().norm() < 1e-14 {
            return Err(Error::InvalidParameter("B is singular".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let pairs: Vec<_> = (0..200)
            .map(|_| (random_cvector(m, 1.0, &mut rng), random_cvector(m, 1.0, &mut rng)))
            .collect();
        let scale = 1.0 + a_mat.norm() + b_mat.norm_squared();
        let res = domain.form().compatibility_residual(&a_mat, &b_mat, &pairs);
        if res > 1e-10 * scale {
            return Err(Error::InvalidParameter(format!(
                "A and B are not compatible with F (residual {res:.3e})"
            )));
        }
        Ok(Self {
            domain,
            a_mat,
            b_mat,
            a_vec,
            c_vec,
        })
    }

    pub fn identity(domain: SiegelDomain) -> Self {
        let (n, m) = (domain.n(), domain.m());
        Self {
            domain,
            a_mat: RMatrix::identity(n, n),
            b_mat: CMatrix::identity(m, m),
            a_vec: RVector::zeros(n),
            c_vec: CVector::zeros(m),
        }
    }

    /// Real translation `w ↦ w + a`.
    pub fn translation(domain: SiegelDomain, a: RVector) -> Result<Self> {
        let mut t = Self::identity(domain);
        check_dim("a", t.domain.n(), a.len())?;
        t.a_vec = a;
        Ok(t)
    }

    pub fn domain(&self) -> &SiegelDomain {
        &self.domain
    }

    pub fn a_mat(&self) -> &RMatrix {
        &self.a_mat
    }

    pub fn b_mat(&self) -> &CMatrix {
        &self.b_mat
    }

    pub fn a_vec(&self) -> &RVector {
        &self.a_vec
    }

    pub fn c_vec(&self) -> &CVector {
        &self.c_vec
    }

    pub fn apply(&self, p: &SiegelPoint) -> Result<SiegelPoint> {
        check_dim("tube coordinate w", self.domain.n(), p.w.len())?;
        check_dim("fiber coordinate u", self.domain.m(), p.u.len())?;
        let form = self.domain.form();
        let bu = &self.b_mat * &p.u;
        let w = real_to_complex(&self.a_mat) * &p.w
            + self.a_vec.map(|x| C64::new(x, 0.0))
            + form.eval(&bu, &self.c_vec) * C64::new(0.0, 2.0)
            + form.eval(&self.c_vec, &self.c_vec) * I;
        Ok(SiegelPoint::new(w, bu + &self.c_vec))
    }

    /// `det A · det B`, constant in the point.
    pub fn jacobian_det(&self) -> C64 {
        let db = if self.domain.m() == 0 { ONE } else { self.b_mat.determinant() };
        db * self.a_mat.determinant()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.domain != inner.domain {
            return Err(Error::InvalidParameter("affine maps act on different domains".into()));
        }
        let bc1 = &self.b_mat * &inner.c_vec;
        let f = self.domain.form().eval(&bc1, &self.c_vec);
        Ok(Self {
            domain: self.domain.clone(),
            a_mat: &self.a_mat * &inner.a_mat,
            b_mat: &self.b_mat * &inner.b_mat,
            a_vec: &self.a_mat * &inner.a_vec + &self.a_vec - f.map(|x| 2.0 * x.im),
            c_vec: bc1 + &self.c_vec,
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        let ai = self
            .a_mat
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("A is singular".into()))?;
        let bi = self
            .b_mat
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("B is singular".into()))?;
        let c = -(&bi * &self.c_vec);
        let a = -(&ai * &self.a_vec);
        Ok(Self {
            domain: self.domain.clone(),
            a_mat: ai,
            b_mat: bi,
            a_vec: a,
            c_vec: c,
        })
    }
}

/// `z ↦ e^{iθ}(z − a)/(1 − āz)` on the unit disc.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusAutomorphism {
    a: C64,
    theta: f64,
}

fn wrap_angle(t: f64) -> f64 {
    let mut x = t % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

impl MobiusAutomorphism {
    /// `θ` is reduced to `(−π, π]`.
    pub fn new(a: C64, theta: f64) -> Result<Self> {
        if !(a.norm() < 1.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("Mobius map needs |a| < 1, got {a}")));
        }
        Ok(Self {
            a,
            theta: wrap_angle(theta),
        })
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn apply(&self, z: C64) -> C64 {
        C64::from_polar(1.0, self.theta) * (z - self.a) / (ONE - self.a.conj() * z)
    }

    pub fn log_jacobian(&self, z: C64) -> Result<C64> {
        let d = log_or_cut(ONE - self.a.conj() * z, "1 - conj(a) z")?;
        Ok(I * self.theta + (1.0 - self.a.norm_sqr()).ln() - 2.0 * d)
    }

    fn matrix(&self) -> [C64; 4] {
        let e = C64::from_polar(1.0, self.theta);
        [e, -e * self.a, -self.a.conj(), ONE]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let [a2, b2, c2, d2] = self.matrix();
        let [a1, b1, c1, d1] = inner.matrix();
        let (al, be, de) = (a2 * a1 + b2 * c1, a2 * b1 + b2 * d1, c2 * b1 + d2 * d1);
        Self {
            a: -be / al,
            theta: (al / de).arg(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: -self.a * C64::from_polar(1.0, self.theta),
            theta: wrap_angle(-self.theta),
        }
    }
}

/// `z ↦ V φ_a(z)` on `B^m`, with the involution
/// `φ_a(z) = (a − P_a z − √(1−|a|²) Q_a z)/(1 − ⟨z, a⟩)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallAutomorphism {
    a: CVector,
    v: CMatrix,
}

impl BallAutomorphism {
    pub fn new(a: CVector, v: CMatrix) -> Result<Self> {
        check_dim("unitary V", a.len(), v.nrows())?;
        if !(a.norm() < 1.0) {
            return Err(Error::InvalidParameter("ball automorphism needs |a| < 1".into()));
        }
        if unitary_defect(&v) > 1e-10 {
            return Err(Error::InvalidParameter("V is not unitary".into()));
        }
        Ok(Self { a, v })
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &CVector {
        &self.a
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    fn involution(&self, z: &CVector) -> CVector {
        let aa = self.a.norm_squared();
        let za = inner(z, &self.a);
        let den = ONE - za;
        if aa == 0.0 {
            return -z;
        }
        let pz = &self.a * (za / aa);
        let qz = z - &pz;
        (&self.a - pz - qz * C64::new((1.0 - aa).sqrt(), 0.0)) / den
    }

    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        check_dim("ball point", self.m(), z.len())?;
        Ok(&self.v * self.involution(z))
    }

    pub fn log_jacobian(&self, z: &CVector) -> Result<C64> {
        check_dim("ball point", self.m(), z.len())?;
        let m = self.m() as f64;
        let d = log_or_cut(ONE - inner(z, &self.a), "1 - <z, a>")?;
        let ldv = self.v.determinant().ln();
        Ok(ldv + I * (PI * m) + 0.5 * (m + 1.0) * (1.0 - self.a.norm_squared()).ln() - (m + 1.0) * d)
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: &self.v * &self.a,
            v: self.v.adjoint(),
        }
    }
}

/// Cayley transform between `B^{m+1}` and the Siegel ball with `m` fiber
/// coordinates (`m = 0`: disc and half-plane).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CayleyTransform {
    pub m: usize,
    /// `false`: bounded to Siegel, `true`: Siegel to bounded.
    pub inverse: bool,
}

impl CayleyTransform {
    pub fn to_siegel(m: usize) -> Self {
        Self { m, inverse: false }
    }

    pub fn to_bounded(m: usize) -> Self {
        Self { m, inverse: true }
    }

    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        check_dim("Cayley argument", self.m + 1, z.len())?;
        let mut out = CVector::zeros(self.m + 1);
        if !self.inverse {
            let d = ONE - z[0];
            out[0] = I * (ONE + z[0]) / d;
            for j in 1..=self.m {
                out[j] = z[j] / d;
            }
        } else {
            let d = z[0] + I;
            out[0] = (z[0] - I) / d;
            for j in 1..=self.m {
                out[j] = 2.0 * I * z[j] / d;
            }
        }
        Ok(out)
    }

    pub fn log_jacobian(&self, z: &CVector) -> Result<C64> {
        check_dim("Cayley argument", self.m + 1, z.len())?;
        let k = self.m as f64 + 2.0;
        let l2i = C64::new(2f64.ln(), PI / 2.0);
        if !self.inverse {
            Ok(l2i - k * log_or_cut(ONE - z[0], "1 - z1")?)
        } else {
            let d = z[0] + I;
            if d.im <= 0.0 {
                return Err(Error::BranchCut {
                    factor: "w + i".into(),
                    value: d,
                });
            }
            Ok((k - 1.0) * l2i - k * d.ln())
        }
    }
}

/// Base map handle.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseMap {
    Identity { dim: usize },
    Affine(AffineSiegelAutomorphism),
    Mobius(MobiusAutomorphism),
    Ball(BallAutomorphism),
    Cayley(CayleyTransform),
    /// Blockwise action on the factors of a [`Domain::Product`].
    Product(Vec<BaseMap>),
    /// Applied first to last.
    Chain(Vec<BaseMap>),
}

impl BaseMap {
    pub fn dim(&self) -> usize {
        match self {
            Self::Identity { dim } => *dim,
            Self::Affine(a) => a.domain.dim(),
            Self::Mobius(_) => 1,
            Self::Ball(b) => b.m(),
            Self::Cayley(c) => c.m + 1,
            Self::Product(fs) => fs.iter().map(Self::dim).sum(),
            Self::Chain(ms) => ms.first().map(Self::dim).unwrap_or(0),
        }
    }

    fn blocks(fs: &[BaseMap]) -> Vec<(usize, usize)> {
        let mut o = 0;
        fs.iter()
            .map(|f| {
                let r = (o, f.dim());
                o += f.dim();
                r
            })
            .collect()
    }

    pub fn apply(&self, z: &CVector) -> Result<CVector> {
        check_dim("map argument", self.dim(), z.len())?;
        match self {
            Self::Identity { .. } => Ok(z.clone()),
            Self::Affine(a) => {
                let n = a.domain.n();
                Ok(a.apply(&SiegelPoint::from_flat(n, z))?.to_flat())
            }
            Self::Mobius(m) => Ok(CVector::from_element(1, m.apply(z[0]))),
            Self::Ball(b) => b.apply(z),
            Self::Cayley(c) => c.apply(z),
            Self::Product(fs) => Ok(concat(
                fs.iter()
                    .zip(Self::blocks(fs))
                    .map(|(f, (o, n))| f.apply(&z.rows(o, n).into_owned()))
                    .collect::<Result<Vec<_>>>()?,
            )),
            Self::Chain(ms) => {
                let mut x = z.clone();
                for m in ms {
                    x = m.apply(&x)?;
                }
                Ok(x)
            }
        }
    }

    /// Continuous logarithm of the holomorphic Jacobian determinant.
    pub fn log_jacobian(&self, z: &CVector) -> Result<C64> {
        check_dim("map argument", self.dim(), z.len())?;
        match self {
            Self::Identity { .. } => Ok(C64::new(0.0, 0.0)),
            Self::Affine(a) => Ok(a.jacobian_det().ln()),
            Self::Mobius(m) => m.log_jacobian(z[0]),
            Self::Ball(b) => b.log_jacobian(z),
            Self::Cayley(c) => c.log_jacobian(z),
            Self::Product(fs) => {
                let mut acc = C64::new(0.0, 0.0);
                for (f, (o, n)) in fs.iter().zip(Self::blocks(fs)) {
                    acc += f.log_jacobian(&z.rows(o, n).into_owned())?;
                }
                Ok(acc)
            }
            Self::Chain(ms) => {
                let mut acc = C64::new(0.0, 0.0);
                let mut x = z.clone();
                for m in ms {
                    acc += m.log_jacobian(&x)?;
                    x = m.apply(&x)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn jacobian_det(&self, z: &CVector) -> Result<C64> {
        match self {
            Self::Affine(a) => Ok(a.jacobian_det()),
            Self::Mobius(m) => {
                let d = ONE - m.a.conj() * z[0];
                Ok(C64::from_polar(1.0, m.theta) * (1.0 - m.a.norm_sqr()) / (d * d))
            }
            _ => Ok(self.log_jacobian(z)?.exp()),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(match self {
            Self::Identity { dim } => Self::Identity { dim: *dim },
            Self::Affine(a) => Self::Affine(a.inverse()?),
            Self::Mobius(m) => Self::Mobius(m.inverse()),
            Self::Ball(b) => Self::Ball(b.inverse()),
            Self::Cayley(c) => Self::Cayley(CayleyTransform {
                m: c.m,
                inverse: !c.inverse,
            }),
            Self::Product(fs) => Self::Product(fs.iter().map(Self::inverse).collect::<Result<_>>()?),
            Self::Chain(ms) => Self::Chain(ms.iter().rev().map(Self::inverse).collect::<Result<_>>()?),
        })
    }

    /// `outer ∘ inner`; Möbius and affine pairs collapse to a single map.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self> {
        check_dim("composable maps", inner.dim(), outer.dim())?;
        Ok(match (outer, inner) {
            (Self::Identity { .. }, x) | (x, Self::Identity { .. }) => x.clone(),
            (Self::Mobius(b), Self::Mobius(a)) => Self::Mobius(b.compose(a)),
            (Self::Affine(b), Self::Affine(a)) if a.domain == b.domain => Self::Affine(b.compose(a)?),
            (Self::Product(bs), Self::Product(as_)) if Self::blocks(bs) == Self::blocks(as_) => Self::Product(
                bs.iter()
                    .zip(as_)
                    .map(|(b, a)| Self::compose(b, a))
                    .collect::<Result<_>>()?,
            ),
            _ => {
                let mut ms = match inner {
                    Self::Chain(v) => v.clone(),
                    x => vec![x.clone()],
                };
                match outer {
                    Self::Chain(v) => ms.extend(v.iter().cloned()),
                    x => ms.push(x.clone()),
                }
                Self::Chain(ms)
            }
        })
    }

    /// Source domain when it is determined by the map itself.
    pub fn source_domain(&self) -> Option<Domain> {
        match self {
            Self::Identity { .. } => None,
            Self::Affine(a) => Some(Domain::Siegel(a.domain.clone())),
            Self::Mobius(_) => Some(Domain::disc()),
            Self::Ball(b) => Some(Domain::ball(b.m())),
            Self::Cayley(c) if !c.inverse => Some(Domain::ball(c.m + 1)),
            Self::Cayley(c) => Some(Domain::siegel_ball(c.m)),
            Self::Product(fs) => Domain::product(fs.iter().map(Self::source_domain).collect::<Option<Vec<_>>>()?).ok(),
            Self::Chain(ms) => ms.first()?.source_domain(),
        }
    }

    /// Deterministic interior points of the source domain.
    pub fn probe_points(&self) -> Vec<CVector> {
        match self.source_domain() {
            Some(d) => {
                let mut rng = ChaCha8Rng::seed_from_u64(0x9e37);
                (0..6).map(|_| d.sample_interior(&mut rng)).collect()
            }
            None => vec![CVector::zeros(self.dim())],
        }
    }

    pub fn to_descriptor(&self) -> MapDescriptor {
        match self {
            Self::Identity { dim } => MapDescriptor::Identity { dim: *dim },
            Self::Affine(a) => MapDescriptor::Affine {
                domain: Domain::Siegel(a.domain.clone()).descriptor(),
                a_mat: a.a_mat.clone(),
                b_mat: a.b_mat.clone(),
                a_vec: a.a_vec.clone(),
                c_vec: a.c_vec.clone(),
            },
            Self::Mobius(m) => MapDescriptor::Mobius { a: m.a, theta: m.theta },
            Self::Ball(b) => MapDescriptor::Ball {
                a: b.a.clone(),
                v: b.v.clone(),
            },
            Self::Cayley(c) => MapDescriptor::Cayley {
                m: c.m,
                inverse: c.inverse,
            },
            Self::Product(fs) => MapDescriptor::Product {
                factors: fs.iter().map(Self::to_descriptor).collect(),
            },
            Self::Chain(ms) => MapDescriptor::Chain {
                maps: ms.iter().map(Self::to_descriptor).collect(),
            },
        }
    }

    pub fn from_descriptor(d: &MapDescriptor) -> Result<Self> {
        Ok(match d {
            MapDescriptor::Identity { dim } => Self::Identity { dim: *dim },
            MapDescriptor::Affine {
                domain,
                a_mat,
                b_mat,
                a_vec,
                c_vec,
            } => {
                let dom = Domain::from_descriptor(domain)?;
                let s = dom
                    .as_siegel()
                    .ok_or_else(|| Error::InvalidParameter("affine maps need a Siegel domain".into()))?;
                Self::Affine(AffineSiegelAutomorphism::new(
                    s.clone(),
                    a_mat.clone(),
                    b_mat.clone(),
                    a_vec.clone(),
                    c_vec.clone(),
                )?)
            }
            MapDescriptor::Mobius { a, theta } => Self::Mobius(MobiusAutomorphism::new(*a, *theta)?),
            MapDescriptor::Ball { a, v } => Self::Ball(BallAutomorphism::new(a.clone(), v.clone())?),
            MapDescriptor::Cayley { m, inverse } => Self::Cayley(CayleyTransform {
                m: *m,
                inverse: *inverse,
            }),
            MapDescriptor::Product { factors } => {
                Self::Product(factors.iter().map(Self::from_descriptor).collect::<Result<_>>()?)
            }
            MapDescriptor::Chain { maps } => Self::Chain(maps.iter().map(Self::from_descriptor).collect::<Result<_>>()?),
            MapDescriptor::Induced { .. } => {
                return Err(Error::InvalidParameter("expected a base map, found an induced map".into()))
            }
        })
    }
}

/// JSON map descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapDescriptor {
    Identity {
        dim: usize,
    },
    Affine {
        domain: DomainDescriptor,
        #[serde(rename = "A", with = "crate::wire::real_matrix")]
        a_mat: RMatrix,
        #[serde(rename = "B", with = "crate::wire::complex_matrix")]
        b_mat: CMatrix,
        #[serde(rename = "a", with = "crate::wire::real_vec")]
        a_vec: RVector,
        #[serde(rename = "c", with = "crate::wire::complex_vec")]
        c_vec: CVector,
    },
    Mobius {
        #[serde(with = "crate::wire::complex")]
        a: C64,
        theta: f64,
    },
    Ball {
        #[serde(with = "crate::wire::complex_vec")]
        a: CVector,
        #[serde(rename = "V", with = "crate::wire::complex_matrix")]
        v: CMatrix,
    },
    Cayley {
        m: usize,
        #[serde(default)]
        inverse: bool,
    },
    Product {
        factors: Vec<MapDescriptor>,
    },
    Chain {
        maps: Vec<MapDescriptor>,
    },
    Induced {
        base: Box<MapDescriptor>,
        #[serde(rename = "U", with = "crate::wire::complex_matrix")]
        u: CMatrix,
        s: f64,
    },
}

/// Constant phase `e^{2πi k s}` separating `(Jψ∘φ)^s (Jφ)^s` from
/// `(J(ψ∘φ))^s`, with the spread of `k` over the probe points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDefect {
    pub k: i64,
    /// `2π · frac(k s)`; exactly zero for integer `s`.
    pub angle: f64,
    /// `max |Im(ΔL)/2π − k|` over the probe points.
    pub spread: f64,
}

impl PhaseDefect {
    fn none() -> Self {
        Self {
            k: 0,
            angle: 0.0,
            spread: 0.0,
        }
    }

    fn measure(diffs: &[C64], s: f64) -> Result<Self> {
        let ks: Vec<f64> = diffs.iter().map(|d| d.im / (2.0 * PI)).collect();
        let k = ks.first().map(|x| x.round()).unwrap_or(0.0);
        let spread = ks.iter().map(|x| (x - k).abs()).fold(0.0, f64::max);
        let re = diffs.iter().map(|d| d.re.abs()).fold(0.0, f64::max);
        if spread > 1e-6 || re > 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "Jacobian logarithms differ by a non-constant amount (spread {spread:.3e}, real part {re:.3e})"
            )));
        }
        Ok(Self {
            k: k as i64,
            angle: 2.0 * PI * (k * s).rem_euclid(1.0),
            spread,
        })
    }
}

/// `(z, ζ) ↦ (φ(z), U ζ · Jφ(z)^s)`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedHartogsAutomorphism {
    base: BaseMap,
    u: CMatrix,
    s: f64,
}

impl InducedHartogsAutomorphism {
    pub fn new(base: BaseMap, u: CMatrix, s: f64) -> Result<Self> {
        if u.nrows() == 0 || u.nrows() != u.ncols() {
            return Err(Error::InvalidParameter("U must be a non-empty square matrix".into()));
        }
        let defect = unitary_defect(&u);
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!("U is not unitary (defect {defect:.3e})")));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("exponent s must be positive, got {s}")));
        }
        Ok(Self { base, u, s })
    }

    pub fn identity(dim: usize, n_fiber: usize, s: f64) -> Result<Self> {
        Self::new(BaseMap::Identity { dim }, CMatrix::identity(n_fiber, n_fiber), s)
    }

    /// `(z, ζ) ↦ (σ(z), Jσ(z)^s ζ)` from `D_{N,s}` to `D′_{N,s}`.
    pub fn realization_change(sigma: BaseMap, n_fiber: usize, s: f64) -> Result<Self> {
        Self::new(sigma, CMatrix::identity(n_fiber, n_fiber), s)
    }

    pub fn base(&self) -> &BaseMap {
        &self.base
    }

    pub fn u(&self) -> &CMatrix {
        &self.u
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_fiber(&self) -> usize {
        self.u.nrows()
    }

    pub fn apply(&self, p: &HartogsPoint) -> Result<HartogsPoint> {
        check_dim("fiber coordinate zeta", self.n_fiber(), p.zeta.len())?;
        let z = self.base.apply(&p.z)?;
        let j = (self.base.log_jacobian(&p.z)? * self.s).exp();
        Ok(HartogsPoint::new(z, &self.u * &p.zeta * j))
    }

    /// `self ∘ inner`, with the constant branch phase folded into `U`.
    pub fn compose(&self, inner: &Self) -> Result<(Self, PhaseDefect)> {
        if self.s != inner.s || self.n_fiber() != inner.n_fiber() {
            return Err(Error::InvalidParameter("induced maps have different (N, s)".into()));
        }
        let base = BaseMap::compose(&self.base, &inner.base)?;
        let mut diffs = Vec::new();
        for z in inner.base.probe_points() {
            let sum = inner.base.log_jacobian(&z)? + self.base.log_jacobian(&inner.base.apply(&z)?)?;
            diffs.push(sum - base.log_jacobian(&z)?);
        }
        let phase = if matches!(base, BaseMap::Chain(_)) {
            PhaseDefect::none()
        } else {
            PhaseDefect::measure(&diffs, self.s)?
        };
        let u = &self.u * &inner.u * C64::from_polar(1.0, phase.angle);
        Ok((Self { base, u, s: self.s }, phase))
    }

    pub fn inverse(&self) -> Result<(Self, PhaseDefect)> {
        let base = self.base.inverse()?;
        let mut diffs = Vec::new();
        for z in self.base.probe_points() {
            let img = self.base.apply(&z)?;
            diffs.push(base.log_jacobian(&img)? + self.base.log_jacobian(&z)?);
        }
        let phase = PhaseDefect::measure(&diffs, self.s)?;
        let u = self.u.adjoint() * C64::from_polar(1.0, -phase.angle);
        Ok((Self { base, u, s: self.s }, phase))
    }

    pub fn to_descriptor(&self) -> MapDescriptor {
        MapDescriptor::Induced {
            base: Box::new(self.base.to_descriptor()),
            u: self.u.clone(),
            s: self.s,
        }
    }

    pub fn from_descriptor(d: &MapDescriptor) -> Result<Self> {
        match d {
            MapDescriptor::Induced { base, u, s } => Self::new(BaseMap::from_descriptor(base)?, u.clone(), *s),
            _ => Err(Error::InvalidParameter("expected an induced map".into())),
        }
    }

    /// Finite-difference Jacobian at a fixed point `(z₀, 0)`.
    pub fn jacobian_block(&self, z0: &CVector) -> Result<JacobianBlockReport> {
        let d = self.base.dim();
        let nf = self.n_fiber();
        let p0 = HartogsPoint::new(z0.clone(), CVector::zeros(nf));
        let img = self.apply(&p0)?;
        let residual = (&img.to_flat() - &p0.to_flat()).norm();
        if residual > 1e-9 {
            return Err(Error::NotFixed { residual });
        }
        let f = |v: &CVector| -> Result<CVector> { Ok(self.apply(&HartogsPoint::from_flat(d, v))?.to_flat()) };
        let x0 = p0.to_flat();
        let jac = |h: f64| -> Result<crate::CMatrix> {
            let n = x0.len();
            let mut j = CMatrix::zeros(n, n);
            for k in 0..n {
                let mut cols = [CVector::zeros(n), CVector::zeros(n)];
                for (slot, dir) in [ONE, I].into_iter().enumerate() {
                    let mut xp = x0.clone();
                    let mut xm = x0.clone();
                    xp[k] += dir * h;
                    xm[k] -= dir * h;
                    cols[slot] = (f(&xp)? - f(&xm)?) / C64::new(2.0 * h, 0.0);
                }
                // ∂/∂z = ½(∂_x − i ∂_y)
                j.set_column(k, &((&cols[0] - &cols[1] * I) * C64::new(0.5, 0.0)));
            }
            Ok(j)
        };
        let j1 = jac(1e-5)?;
        let j2 = jac(2e-5)?;
        let c = j1.view((d, d), (nf, nf)).into_owned();
        Ok(JacobianBlockReport {
            df1_dz: j1.view((0, 0), (d, d)).into_owned(),
            df1_dzeta_norm: j1.view((0, d), (d, nf)).norm(),
            df2_dz_norm: j1.view((d, 0), (nf, d)).norm(),
            unitary_defect: unitary_defect(&c),
            df2_dzeta: c,
            step_discrepancy: (&j1 - &j2).amax_complex(),
            fixed_residual: residual,
        })
    }
}

trait AmaxComplex {
    fn amax_complex(&self) -> f64;
}

impl AmaxComplex for CMatrix {
    fn amax_complex(&self) -> f64 {
        self.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// Block structure of `DΦ` at a fixed point `(z₀, 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianBlockReport {
    #[serde(with = "crate::wire::complex_matrix")]
    pub df1_dz: CMatrix,
    pub df1_dzeta_norm: f64,
    pub df2_dz_norm: f64,
    #[serde(with = "crate::wire::complex_matrix")]
    pub df2_dzeta: CMatrix,
    pub unitary_defect: f64,
    /// `max |J(h) − J(2h)|`.
    pub step_discrepancy: f64,
    pub fixed_residual: f64,
}

/// Affine `T` with `T(p) = (i e, 0)`, `e` the cone base point.
fn normalizing_map(d: &SiegelDomain, p: &SiegelPoint) -> Result<AffineSiegelAutomorphism> {
    let y = d.defect(p)?;
    if !d.cone().contains(y.as_slice(), 0.0)?.is_interior() {
        return Err(Error::NotInterior("point is not in the open Siegel domain".into()));
    }
    let (n, m) = (d.n(), d.m());
    let kill_u = AffineSiegelAutomorphism::new(
        d.clone(),
        RMatrix::identity(n, n),
        CMatrix::identity(m, m),
        RVector::zeros(n),
        -p.u.clone(),
    )?;
    let q = kill_u.apply(p)?;
    let kill_re = AffineSiegelAutomorphism::translation(d.clone(), -q.w.map(|x| x.re))?;
    let a = d.cone().transitive_map(y.as_slice(), d.cone().base_point().as_slice())?;
    let b = d.compatible_fiber_map(&a)?;
    let scale = AffineSiegelAutomorphism::new(d.clone(), a, b, RVector::zeros(n), CVector::zeros(m))?;
    scale.compose(&kill_re)?.compose(&kill_u)
}

/// Affine automorphism of `d` taking `p` to `q`.
pub fn transitive_base_map(d: &SiegelDomain, p: &SiegelPoint, q: &SiegelPoint) -> Result<AffineSiegelAutomorphism> {
    let tp = normalizing_map(d, p)?;
    let tq = normalizing_map(d, q)?;
    tq.inverse()?.compose(&tp)
}

/// Element of `G(V)` fixing the cone base point.
pub fn cone_stabilizer<R: Rng + ?Sized>(cone: &ConeDescriptor, rng: &mut R) -> RMatrix {
    match cone {
        ConeDescriptor::HalfLine => RMatrix::identity(1, 1),
        ConeDescriptor::Lorentz { n } => {
            let mut rot = RMatrix::identity(*n, *n);
            if *n >= 3 {
                let q = random_orthogonal(n - 1, rng);
                rot.view_mut((1, 1), (n - 1, n - 1)).copy_from(&q);
            }
            rot
        }
        ConeDescriptor::PdHermitian { r } => congruence_matrix(*r, &random_unitary(*r, rng)),
        ConeDescriptor::Product { factors } => {
            block_diag(&factors.iter().map(|f| cone_stabilizer(f, rng)).collect::<Vec<_>>())
        }
    }
}

fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RMatrix {
    let g = RMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let signs = RMatrix::from_diagonal(&RVector::from_fn(n, |i, _| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

fn affine_stabilizer<R: Rng + ?Sized>(d: &SiegelDomain, rng: &mut R) -> Result<AffineSiegelAutomorphism> {
    let a = cone_stabilizer(d.cone(), rng);
    let b = d.compatible_fiber_map(&a)? * d.sample_fiber_unitary(rng);
    AffineSiegelAutomorphism::new(d.clone(), a, b, RVector::zeros(d.n()), CVector::zeros(d.m()))
}

/// Random base automorphism fixing `z0`.
pub fn random_stabilizer<R: Rng + ?Sized>(d: &Domain, z0: &CVector, rng: &mut R) -> Result<BaseMap> {
    check_dim("base point", d.dim(), z0.len())?;
    match d {
        Domain::Ball { m: 1 } => {
            let g = MobiusAutomorphism::new(-z0[0], 0.0)?;
            let r = MobiusAutomorphism::new(C64::new(0.0, 0.0), rng.random_range(-PI..PI))?;
            Ok(BaseMap::Mobius(g.compose(&r).compose(&g.inverse())))
        }
        Domain::Ball { m } => {
            let g = BaseMap::Ball(BallAutomorphism::new(z0.clone(), CMatrix::identity(*m, *m))?);
            let r = BaseMap::Ball(BallAutomorphism::new(CVector::zeros(*m), random_unitary(*m, rng))?);
            Ok(BaseMap::Chain(vec![g.inverse()?, r, g]))
        }
        Domain::Siegel(s) => {
            let t = normalizing_map(s, &SiegelPoint::from_flat(s.n(), z0))?;
            let h = affine_stabilizer(s, rng)?;
            Ok(BaseMap::Affine(t.inverse()?.compose(&h)?.compose(&t)?))
        }
        Domain::Product(fs) => Ok(BaseMap::Product(
            fs.iter()
                .zip(Domain::factor_offsets(fs))
                .map(|(f, (o, n))| random_stabilizer(f, &z0.rows(o, n).into_owned(), rng))
                .collect::<Result<_>>()?,
        )),
    }
}

/// Random automorphism with moderate distortion: `|a| ≤ 0.7` for bounded
/// factors, a transitive map between two sampled points composed with a
/// stabilizer for Siegel domains.
pub fn random_automorphism<R: Rng + ?Sized>(d: &Domain, rng: &mut R) -> Result<BaseMap> {
    match d {
        Domain::Ball { m: 1 } => {
            let a = C64::from_polar(rng.random_range(0.0..0.7), rng.random_range(-PI..PI));
            Ok(BaseMap::Mobius(MobiusAutomorphism::new(a, rng.random_range(-PI..PI))?))
        }
        Domain::Ball { m } => {
            let v = random_cvector(*m, 1.0, rng);
            let a = v.unscale(v.norm()) * C64::new(rng.random_range(0.0..0.7), 0.0);
            Ok(BaseMap::Ball(BallAutomorphism::new(a, random_unitary(*m, rng))?))
        }
        Domain::Siegel(s) => {
            let p = s.sample_interior(rng);
            let q = s.sample_interior(rng);
            let t = transitive_base_map(s, &p, &q)?;
            let h = affine_stabilizer(s, rng)?;
            Ok(BaseMap::Affine(t.compose(&h)?))
        }
        Domain::Product(fs) => Ok(BaseMap::Product(
            fs.iter().map(|f| random_automorphism(f, rng)).collect::<Result<_>>()?,
        )),
    }
}

/// Random induced automorphism of `h`.
pub fn random_induced<R: Rng + ?Sized>(h: &HartogsDomain, rng: &mut R) -> Result<InducedHartogsAutomorphism> {
    let base = random_automorphism(h.base(), rng)?;
    InducedHartogsAutomorphism::new(base, random_unitary(h.n_fiber(), rng), h.s())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::MembershipStatus;
    use crate::hartogs::HartogsStatus;
    use crate::linalg::c;

    fn cv(v: &[C64]) -> CVector {
        CVector::from_column_slice(v)
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn half_plane_translation() {
        let hp = SiegelDomain::half_plane();
        let t = AffineSiegelAutomorphism::translation(hp.clone(), RVector::from_element(1, 1.0)).unwrap();
        let p = SiegelPoint::new(cv(&[c(0.0, 1.0)]), CVector::zeros(0));
        assert_eq!(t.apply(&p).unwrap().w[0], c(1.0, 1.0));
        assert_eq!(t.jacobian_det(), c(1.0, 0.0));
        let t2 = AffineSiegelAutomorphism::translation(hp.clone(), RVector::from_element(1, 2.0)).unwrap();
        let t3 = t2.compose(&t).unwrap();
        assert_eq!(t3.a_vec()[0], 3.0);
    }

    #[test]
    fn mobius_apply_example() {
        let m = MobiusAutomorphism::new(c(0.5, 0.0), 0.0).unwrap();
        let h = InducedHartogsAutomorphism::new(BaseMap::Mobius(m), CMatrix::identity(1, 1), 1.0).unwrap();
        let p = HartogsPoint::new(cv(&[c(0.0, 0.0)]), cv(&[c(0.1, 0.0)]));
        let q = h.apply(&p).unwrap();
        assert!((q.z[0] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((q.zeta[0] - c(0.075, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_echoes() {
        let h = InducedHartogsAutomorphism::identity(2, 2, 1.5).unwrap();
        let p = HartogsPoint::new(cv(&[c(0.1, 0.2), c(-0.3, 0.0)]), cv(&[c(0.01, 0.0), c(0.0, 0.02)]));
        assert_eq!(h.apply(&p).unwrap(), p);
    }

    #[test]
    fn swap_unitary_permutes_fiber() {
        let mut u = CMatrix::zeros(2, 2);
        u[(0, 1)] = c(1.0, 0.0);
        u[(1, 0)] = c(1.0, 0.0);
        let h = InducedHartogsAutomorphism::new(BaseMap::Identity { dim: 1 }, u, 1.0).unwrap();
        let p = HartogsPoint::new(cv(&[c(0.1, 0.0)]), cv(&[c(1.0, 0.0), c(2.0, 0.0)]));
        assert_eq!(h.apply(&p).unwrap().zeta, cv(&[c(2.0, 0.0), c(1.0, 0.0)]));
        assert!(InducedHartogsAutomorphism::new(BaseMap::Identity { dim: 1 }, CMatrix::identity(2, 2) * c(2.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn mobius_compose_matches_pointwise() {
        let a = MobiusAutomorphism::new(c(0.5, 0.0), 0.0).unwrap();
        let b = MobiusAutomorphism::new(c(-0.5, 0.0), 0.0).unwrap();
        let ab = b.compose(&a);
        assert!(ab.apply(c(0.0, 0.0)).norm() < 1e-15);
        let mut r = rng(1);
        for _ in 0..100 {
            let z = Domain::disc().sample_interior(&mut r)[0];
            assert!((ab.apply(z) - b.apply(a.apply(z))).norm() < 1e-10);
        }
        let inv = a.inverse();
        assert!((inv.apply(a.apply(c(0.3, -0.2))) - c(0.3, -0.2)).norm() < 1e-15);
    }

    #[test]
    fn phase_defect_for_fractional_s() {
        let a = MobiusAutomorphism::new(c(0.2, 0.1), 3.0).unwrap();
        let hp = |m| InducedHartogsAutomorphism::new(BaseMap::Mobius(m), CMatrix::identity(1, 1), 1.5).unwrap();
        let (comp, ph) = hp(a).compose(&hp(a)).unwrap();
        assert_eq!(ph.k, 1);
        assert!((ph.angle - PI).abs() < 1e-12);
        let mut r = rng(2);
        let h = HartogsDomain::new(Domain::disc(), 1, 1.5).unwrap();
        for _ in 0..100 {
            let p = h.sample_interior(&mut r);
            let direct = hp(a).apply(&hp(a).apply(&p).unwrap()).unwrap();
            let folded = comp.apply(&p).unwrap();
            assert!((direct.to_flat() - folded.to_flat()).norm() < 1e-10);
        }
        let a2 = MobiusAutomorphism::new(c(0.2, 0.1), 3.0).unwrap();
        let h2 = InducedHartogsAutomorphism::new(BaseMap::Mobius(a2), CMatrix::identity(1, 1), 2.0).unwrap();
        let (_, ph) = h2.compose(&h2).unwrap();
        assert_eq!(ph.angle, 0.0);
    }

    #[test]
    fn transitive_examples() {
        let hp = SiegelDomain::half_plane();
        let p = SiegelPoint::new(cv(&[c(0.0, 1.0)]), CVector::zeros(0));
        let q = SiegelPoint::new(cv(&[c(0.0, 2.0)]), CVector::zeros(0));
        let t = transitive_base_map(&hp, &p, &q).unwrap();
        assert!((t.a_mat()[(0, 0)] - 2.0).abs() < 1e-14);
        assert!((t.apply(&p).unwrap().w[0] - q.w[0]).norm() < 1e-14);
        let id = transitive_base_map(&hp, &p, &p).unwrap();
        assert!((id.a_mat() - RMatrix::identity(1, 1)).norm() < 1e-14);
        let sb = SiegelDomain::siegel_ball(1);
        let p = SiegelPoint::new(cv(&[c(0.0, 1.0)]), cv(&[c(0.0, 0.0)]));
        let q = SiegelPoint::new(cv(&[c(1.0, 2.0)]), cv(&[c(0.5, 0.0)]));
        let t = transitive_base_map(&sb, &p, &q).unwrap();
        assert!((t.apply(&p).unwrap().to_flat() - q.to_flat()).norm() < 1e-9);
        let bad = SiegelPoint::new(cv(&[c(0.0, -1.0)]), cv(&[c(0.0, 0.0)]));
        assert!(transitive_base_map(&sb, &bad, &q).is_err());
    }

    #[test]
    fn transitive_on_catalog() {
        let mut r = rng(3);
        for (name, d) in Domain::catalog() {
            if let Some(s) = d.as_siegel() {
                for _ in 0..50 {
                    let p = s.sample_interior(&mut r);
                    let q = s.sample_interior(&mut r);
                    let t = transitive_base_map(s, &p, &q).unwrap();
                    let res = (t.apply(&p).unwrap().to_flat() - q.to_flat()).norm();
                    assert!(res < 1e-9, "{name}: {res}");
                }
            }
        }
    }

    #[test]
    fn affine_preserves_defect_up_to_a() {
        let mut r = rng(4);
        for (name, d) in Domain::catalog() {
            if let Domain::Siegel(s) = &d {
                for _ in 0..20 {
                    let BaseMap::Affine(t) = random_automorphism(&d, &mut r).unwrap() else {
                        unreachable!()
                    };
                    for _ in 0..10 {
                        let p = s.sample_interior(&mut r);
                        let lhs = s.defect(&t.apply(&p).unwrap()).unwrap();
                        let rhs = t.a_mat() * s.defect(&p).unwrap();
                        assert!((lhs - &rhs).norm() <= 1e-10 * (1.0 + rhs.norm()), "{name}");
                        let b = s.sample_boundary(&mut r);
                        let img = t.apply(&b).unwrap();
                        assert_eq!(s.contains(&img, 1e-9).unwrap().status, MembershipStatus::Boundary, "{name}");
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_laws() {
        let mut r = rng(5);
        for (name, d) in Domain::catalog() {
            let h = HartogsDomain::new(d.clone(), 2, 1.5).unwrap();
            for _ in 0..10 {
                let phi = random_induced(&h, &mut r).unwrap();
                let (inv, _) = phi.inverse().unwrap();
                let (id, _) = phi.compose(&inv).unwrap();
                for _ in 0..10 {
                    let p = h.sample_interior(&mut r);
                    let q = inv.apply(&phi.apply(&p).unwrap()).unwrap();
                    let scale = 1.0 + p.to_flat().norm();
                    assert!((q.to_flat() - p.to_flat()).norm() < 1e-10 * scale, "{name}");
                    let pp = phi.apply(&p).unwrap();
                    let q = id.apply(&pp).unwrap();
                    assert!((q.to_flat() - pp.to_flat()).norm() < 1e-10 * (1.0 + pp.to_flat().norm()), "{name}");
                }
            }
        }
    }

    #[test]
    fn cayley_round_trip_and_membership() {
        let mut r = rng(6);
        for m in [0usize, 1, 2] {
            let to = BaseMap::Cayley(CayleyTransform::to_siegel(m));
            let back = to.inverse().unwrap();
            let ball = Domain::ball(m + 1);
            let sb = Domain::siegel_ball(m);
            for _ in 0..500 {
                let z = ball.sample_interior(&mut r);
                let w = to.apply(&z).unwrap();
                assert!(sb.classify(&w, 0.0).unwrap().is_interior());
                assert!((back.apply(&w).unwrap() - &z).norm() < 1e-12);
                let lj = to.log_jacobian(&z).unwrap() + back.log_jacobian(&w).unwrap();
                assert!(lj.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn siegel_ball_membership_matches_cayley() {
        let mut r = rng(7);
        let back = BaseMap::Cayley(CayleyTransform::to_bounded(1));
        let sb = Domain::siegel_ball(1);
        for _ in 0..1000 {
            let w = CVector::from_fn(2, |_, _| c(r.random_range(-2.0..2.0), r.random_range(-1.0..3.0)));
            if (w[0] + I).norm() < 1e-3 {
                continue;
            }
            let inside = sb.classify(&w, 0.0).unwrap().defect > 0.0;
            let z = back.apply(&w).unwrap();
            assert_eq!(inside, z.norm() < 1.0);
        }
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut r = rng(8);
        let maps = vec![
            BaseMap::Mobius(MobiusAutomorphism::new(c(0.3, -0.4), 2.0).unwrap()),
            BaseMap::Ball(BallAutomorphism::new(cv(&[c(0.2, 0.1), c(-0.3, 0.2)]), random_unitary(2, &mut r)).unwrap()),
            BaseMap::Cayley(CayleyTransform::to_siegel(1)),
            BaseMap::Cayley(CayleyTransform::to_bounded(2)),
            random_automorphism(&Domain::siegel_ball(2), &mut r).unwrap(),
            random_automorphism(&Domain::tube(ConeDescriptor::PdHermitian { r: 2 }).unwrap(), &mut r).unwrap(),
        ];
        for map in maps {
            let d = map.source_domain().unwrap();
            for _ in 0..10 {
                let z = d.sample_interior(&mut r);
                let n = z.len();
                let h = 1e-6;
                let j = CMatrix::from_fn(n, n, |i, k| {
                    let mut zp = z.clone();
                    let mut zm = z.clone();
                    zp[k] += c(h, 0.0);
                    zm[k] -= c(h, 0.0);
                    (map.apply(&zp).unwrap()[i] - map.apply(&zm).unwrap()[i]) / (2.0 * h)
                });
                let want = j.determinant();
                let got = map.jacobian_det(&z).unwrap();
                assert!((want - got).norm() < 1e-6 * got.norm().max(1.0), "{map:?}");
            }
        }
    }

    #[test]
    fn stabilizers_fix_points_and_have_unitary_fiber_block() {
        let mut r = rng(9);
        for (name, d) in Domain::catalog() {
            let z0 = d.sample_interior(&mut r);
            let phi = random_stabilizer(&d, &z0, &mut r).unwrap();
            assert!((phi.apply(&z0).unwrap() - &z0).norm() < 1e-9, "{name}");
            let ind = InducedHartogsAutomorphism::new(phi, random_unitary(2, &mut r), 1.5).unwrap();
            let rep = ind.jacobian_block(&z0).unwrap();
            assert!(rep.df2_dz_norm < 1e-8, "{name}: {rep:?}");
            assert!(rep.unitary_defect < 1e-8, "{name}: {rep:?}");
            assert!(rep.df1_dzeta_norm < 1e-8);
        }
    }

    #[test]
    fn jacobian_block_examples() {
        let id = InducedHartogsAutomorphism::identity(1, 1, 1.0).unwrap();
        let rep = id.jacobian_block(&cv(&[c(0.0, 0.0)])).unwrap();
        assert!((rep.df1_dz[(0, 0)] - 1.0).norm() < 1e-9);
        assert!((rep.df2_dzeta[(0, 0)] - 1.0).norm() < 1e-9);
        let theta = PI / 3.0;
        let rot = BaseMap::Mobius(MobiusAutomorphism::new(c(0.0, 0.0), theta).unwrap());
        let ind = InducedHartogsAutomorphism::new(rot, CMatrix::identity(1, 1), 1.0).unwrap();
        let rep = ind.jacobian_block(&cv(&[c(0.0, 0.0)])).unwrap();
        assert!((rep.df2_dzeta[(0, 0)] - C64::from_polar(1.0, theta)).norm() < 1e-10);
        assert!((rep.df2_dzeta[(0, 0)].norm() - 1.0).abs() < 1e-10);
        let u = CMatrix::from_diagonal(&cv(&[C64::from_polar(1.0, 0.7)]));
        let ind = InducedHartogsAutomorphism::new(BaseMap::Identity { dim: 1 }, u.clone(), 1.0).unwrap();
        let rep = ind.jacobian_block(&cv(&[c(0.0, 0.0)])).unwrap();
        assert!((rep.df2_dzeta - u).norm() < 1e-10);
        let moved = InducedHartogsAutomorphism::new(
            BaseMap::Mobius(MobiusAutomorphism::new(c(0.5, 0.0), 0.0).unwrap()),
            CMatrix::identity(1, 1),
            1.0,
        )
        .unwrap();
        assert!(matches!(moved.jacobian_block(&cv(&[c(0.0, 0.0)])), Err(Error::NotFixed { .. })));
    }

    #[test]
    fn realization_change_preserves_membership() {
        let mut r = rng(10);
        let disc_h = HartogsDomain::new(Domain::disc(), 2, 1.5).unwrap();
        let hp_h = HartogsDomain::new(Domain::half_plane(), 2, 1.5).unwrap();
        let sigma = InducedHartogsAutomorphism::realization_change(BaseMap::Cayley(CayleyTransform::to_siegel(0)), 2, 1.5).unwrap();
        for _ in 0..500 {
            let p = disc_h.sample_interior(&mut r);
            let q = sigma.apply(&p).unwrap();
            let a = disc_h.contains(&p, 1e-9).unwrap();
            let b = hp_h.contains(&q, 1e-9).unwrap();
            assert_eq!(b.status, HartogsStatus::Interior);
            assert!((a.h.unwrap() - b.h.unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn descriptors_round_trip() {
        let mut r = rng(11);
        let h = HartogsDomain::new(Domain::siegel_ball(1), 2, 1.5).unwrap();
        let phi = random_induced(&h, &mut r).unwrap();
        let js = serde_json::to_string(&phi.to_descriptor()).unwrap();
        let back = InducedHartogsAutomorphism::from_descriptor(&serde_json::from_str(&js).unwrap()).unwrap();
        let p = h.sample_interior(&mut r);
        assert!((back.apply(&p).unwrap().to_flat() - phi.apply(&p).unwrap().to_flat()).norm() < 1e-12);
        let m: MapDescriptor = serde_json::from_str(r#"{"kind":"mobius","a":[0.5,0.0],"theta":0.0}"#).unwrap();
        assert!(matches!(BaseMap::from_descriptor(&m).unwrap(), BaseMap::Mobius(_)));
        let a: MapDescriptor = serde_json::from_str(
            r#"{"kind":"affine","domain":{"kind":"half_plane"},"A":[[1.0]],"B":[],"a":[2.0],"c":[]}"#,
        )
        .unwrap();
        let BaseMap::Affine(t) = BaseMap::from_descriptor(&a).unwrap() else { panic!() };
        assert_eq!(t.a_vec()[0], 2.0);
    }

    #[test]
    fn incompatible_affine_rejected() {
        let sb = SiegelDomain::siegel_ball(1);
        let r = AffineSiegelAutomorphism::new(
            sb,
            RMatrix::identity(1, 1) * 2.0,
            CMatrix::identity(1, 1),
            RVector::zeros(1),
            CVector::zeros(1),
        );
        assert!(r.is_err());
    }
}
