//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::linalg::SymmetricEigen;

use crate::{CMatrix, CVector, Error, Result, C64};

pub const I: C64 = C64::new(0.0, 1.0);

/// `⟨a, b⟩ = Σ a_j conj(b_j)`, linear in the first slot.
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &CVector) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Largest entry modulus of `A - A*`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Largest entry modulus of `U U* - I`.
pub fn unitary_defect(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u * u.adjoint() - CMatrix::identity(n, n))
        .iter()
        .fold(0.0, |acc, x| acc.max(x.norm()))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let mut ev: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `f(M)` for Hermitian `M` via its eigen-decomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&x| C64::new(f(x), 0.0)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Square root and inverse square root of a positive definite Hermitian matrix.
pub fn pd_sqrt_pair(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let ev = hermitian_eigenvalues(m);
    if ev.first().is_some_and(|&e| e <= 0.0) {
        return Err(Error::NotInterior(format!(
            "matrix is not positive definite (min eigenvalue {:e})",
            ev[0]
        )));
    }
    Ok((
        hermitian_function(m, f64::sqrt),
        hermitian_function(m, |x| 1.0 / x.sqrt()),
    ))
}

/// Eigenvalues of a general complex square matrix.
pub fn complex_eigenvalues(m: &CMatrix) -> Vec<C64> {
    match m.nrows() {
        0 => Vec::new(),
        1 => vec![m[(0, 0)]],
        2 => {
            let tr = m[(0, 0)] + m[(1, 1)];
            let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
            let disc = (tr * tr - 4.0 * det).sqrt();
            vec![(tr + disc) * 0.5, (tr - disc) * 0.5]
        }
        _ => m
            .clone()
            .schur()
            .eigenvalues()
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default(),
    }
}

/// Orthonormal basis of `{v : Σ_i d_i v_i = 0}` built by Gram–Schmidt over the
/// standard basis, in index order.
pub fn annihilator_basis(d: &CVector) -> Result<Vec<CVector>> {
    let n = d.len();
    let dn = norm_sqr(d).sqrt();
    if dn == 0.0 || !dn.is_finite() {
        return Err(Error::InvalidParameter(
            "covector vanishes; no tangent hyperplane".into(),
        ));
    }
    // v is annihilated by d iff v ⟂ conj(d) in the Hermitian product.
    let normal = d.map(|x| x.conj()).unscale(dn);
    let mut basis: Vec<CVector> = Vec::with_capacity(n.saturating_sub(1));
    let mut frame = vec![normal];
    for k in 0..n {
        let mut v = CVector::zeros(n);
        v[k] = C64::new(1.0, 0.0);
        // two passes of classical Gram–Schmidt
        for _ in 0..2 {
            for e in &frame {
                let c = inner(&v, e);
                v -= e * c;
            }
        }
        let nv = norm_sqr(&v).sqrt();
        if nv > 1e-8 {
            let v = v.unscale(nv);
            frame.push(v.clone());
            basis.push(v);
        }
        if basis.len() + 1 == n {
            break;
        }
    }
    Ok(basis)
}

/// Principal power `z^p` together with a flag telling whether `z` sits on the
/// branch cut (the closed negative real axis) while `p` is not an integer.
pub fn principal_pow(z: C64, p: f64) -> (C64, bool) {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        return (z.powi(p as i32), false);
    }
    let on_cut = z.im == 0.0 && z.re <= 0.0;
    (z.powf(p), on_cut)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_to_complex(m: &crate::RMatrix) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}


/// Wirtinger gradient `∂f/∂z_j = ½(∂f/∂x_j − i ∂f/∂y_j)` of a real function by
/// central differences with step `h`.
pub fn fd_wirtinger_gradient(f: &dyn Fn(&CVector) -> f64, z: &CVector, h: f64) -> CVector {
    let n = z.len();
    CVector::from_fn(n, |j, _| {
        let mut d = [0.0; 2];
        for (k, dir) in [C64::new(1.0, 0.0), I].into_iter().enumerate() {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[j] += dir * h;
            zm[j] -= dir * h;
            d[k] = (f(&zp) - f(&zm)) / (2.0 * h);
        }
        C64::new(0.5 * d[0], -0.5 * d[1])
    })
}

/// Complex Hessian `∂²f/∂z_i∂z̄_j` of a real function by central differences on
/// the underlying real coordinates.
pub fn fd_levi_matrix(f: &dyn Fn(&CVector) -> f64, z: &CVector, h: f64) -> CMatrix {
    fd_levi_matrix_steps(f, z, &vec![h; z.len()])
}

/// [`fd_levi_matrix`] with one step per complex coordinate.
pub fn fd_levi_matrix_steps(f: &dyn Fn(&CVector) -> f64, z: &CVector, steps: &[f64]) -> CMatrix {
    let n = z.len();
    let dirs = [C64::new(1.0, 0.0), I];
    // real Hessian over coordinates (x_0, y_0, x_1, y_1, …)
    let m = 2 * n;
    let unit = |k: usize| -> CVector {
        let mut e = CVector::zeros(n);
        e[k / 2] = dirs[k % 2] * steps[k / 2];
        e
    };
    let f0 = f(z);
    let mut hr = crate::RMatrix::zeros(m, m);
    for a in 0..m {
        let ea = unit(a);
        let ha = steps[a / 2];
        hr[(a, a)] = (f(&(z + &ea)) - 2.0 * f0 + f(&(z - &ea))) / (ha * ha);
        for b in (a + 1)..m {
            let eb = unit(b);
            let hb = steps[b / 2];
            let v = (f(&(z + &ea + &eb)) - f(&(z + &ea - &eb)) - f(&(z - &ea + &eb)) + f(&(z - &ea - &eb)))
                / (4.0 * ha * hb);
            hr[(a, b)] = v;
            hr[(b, a)] = v;
        }
    }
    CMatrix::from_fn(n, n, |i, j| {
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        C64::new(
            0.25 * (hr[(xi, xj)] + hr[(yi, yj)]),
            0.25 * (hr[(xi, yj)] - hr[(yi, xj)]),
        )
    })
}
