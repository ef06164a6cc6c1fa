//! Small dense Hermitian helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// `(m + m^H) / 2`
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn add_diagonal(m: &mut CMatrix, value: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += value;
    }
}

/// Inverse and natural log-determinant of a Hermitian positive definite
/// matrix, `None` if the Cholesky factorization fails.
pub fn inverse_logdet(m: &CMatrix) -> Option<(CMatrix, f64)> {
    let chol = m.clone().cholesky()?;
    let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.re.ln()).sum::<f64>();
    let inv = chol.inverse();
    if !logdet.is_finite() || inv.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return None;
    }
    Some((inv, logdet))
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian
/// matrix.
pub fn hermitian_eig(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Principal generalized eigenpair of the Hermitian pencil `(a, b)` with
/// `b` positive definite: maximizes `w^H a w / w^H b w`.
pub fn principal_generalized_eig(a: &CMatrix, b: &CMatrix) -> Option<(f64, CVector)> {
    let chol = b.clone().cholesky()?;
    let l = chol.l();
    let la = l.solve_lower_triangular(a)?;
    let reduced = hermitize(&l.solve_lower_triangular(&la.adjoint())?);
    let (values, vectors) = hermitian_eig(&reduced);
    let top = values.len().checked_sub(1)?;
    let v = vectors.column(top).into_owned();
    let w = l.adjoint().solve_upper_triangular(&v)?;
    if w.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return None;
    }
    Some((values[top], w))
}

/// `x^H m x` for Hermitian `m`, real part only.
pub fn quadratic_form(m: &CMatrix, x: &[Complex64]) -> f64 {
    let n = x.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += m[(i, i)].re * x[i].norm_sqr();
        for j in i + 1..n {
            acc += 2.0 * (x[i].conj() * m[(i, j)] * x[j]).re;
        }
    }
    acc
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    pub fn random_vector(rng: &mut impl Rng, n: usize) -> CVector {
        CVector::from_fn(n, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        })
    }

    /// Random Hermitian positive definite matrix.
    pub fn random_pd(rng: &mut impl Rng, n: usize) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for _ in 0..2 * n {
            let v = random_vector(rng, n);
            m += &v * v.adjoint();
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inverse_and_logdet_match_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = random_pd(&mut rng, 5);
        let (inv, logdet) = inverse_logdet(&m).unwrap();
        let err = (&m * &inv - identity(5)).norm();
        assert!(err < 1e-10);
        let (values, _) = hermitian_eig(&m);
        let expected: f64 = values.iter().map(|v| v.ln()).sum();
        assert!((logdet - expected).abs() < 1e-9);
    }

    #[test]
    fn generalized_eigen_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let a = random_pd(&mut rng, 4);
            let b = random_pd(&mut rng, 4);
            let (lambda, w) = principal_generalized_eig(&a, &b).unwrap();
            let aw = &a * &w;
            let residual = (&aw - &b * &w * Complex64::new(lambda, 0.0)).norm() / aw.norm();
            assert!(residual < 1e-8, "{residual}");
        }
    }

    #[test]
    fn quadratic_form_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = random_pd(&mut rng, 6);
        let x = random_vector(&mut rng, 6);
        let dense = (x.adjoint() * &m * &x)[(0, 0)].re;
        assert!((quadratic_form(&m, x.as_slice()) - dense).abs() < 1e-9 * dense.abs());
    }
}
