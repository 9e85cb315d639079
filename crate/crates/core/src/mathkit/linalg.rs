use num_complex::Complex64;

use crate::{Error, Result};

/// Dense complex column vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVec {
    entries: Vec<Complex64>,
}

impl ComplexVec {
    /// Wraps `entries`, rejecting empty or non-finite input.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidConfig("non-finite vector entry".into()));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `self† other`
    pub fn inner(&self, other: &ComplexVec) -> Complex64 {
        dot_conj(&self.entries, &other.entries)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Unit-norm copy, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<ComplexVec> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(Self {
                entries: self.entries.iter().map(|z| z / n).collect(),
            })
        } else {
            None
        }
    }
}

#[inline]
fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

/// Hermitian matrix. Only the lower triangle (row-major, `i >= j`) is stored;
/// the upper triangle is implied by conjugate symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMat {
    dim: usize,
    data: Vec<Complex64>,
}

#[inline]
fn tri(i: usize, j: usize) -> usize {
    i * (i + 1) / 2 + j
}

impl HermitianMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * (dim + 1) / 2],
        }
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        m.add_diagonal(s);
        m
    }

    /// Builds from full rows, checking conjugate symmetry to 1e-12 relative.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut scale = 0.0f64;
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            for z in r {
                scale = scale.max(z.norm());
            }
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..=i {
                let gap = (rows[i][j] - rows[j][i].conj()).norm();
                if gap > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidConfig(format!(
                        "matrix is not Hermitian at ({i}, {j})"
                    )));
                }
                m.data[tri(i, j)] = if i == j {
                    Complex64::new(rows[i][i].re, 0.0)
                } else {
                    rows[i][j]
                };
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i >= j {
            self.data[tri(i, j)]
        } else {
            self.data[tri(j, i)].conj()
        }
    }

    pub fn add_diagonal(&mut self, s: f64) {
        for i in 0..self.dim {
            self.data[tri(i, i)].re += s;
        }
    }

    /// `self += w · v v†`
    pub fn add_outer(&mut self, w: f64, v: &[Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        let mut p = 0;
        for (i, vi) in v.iter().enumerate() {
            let wi = vi * w;
            for vj in &v[..=i] {
                let d = &mut self.data[p];
                d.re += wi.re * vj.re + wi.im * vj.im;
                d.im += wi.im * vj.re - wi.re * vj.im;
                p += 1;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Cholesky factor `L` with `A = L L†`.
    ///
    /// A pivot that is not positive relative to the largest diagonal entry is
    /// reported as a failure.
    pub fn cholesky(&self) -> Result<Cholesky> {
        let n = self.dim;
        let scale = (0..n)
            .map(|i| self.data[tri(i, i)].re.abs())
            .fold(0.0, f64::max);
        let floor = scale * 1e-14;
        let mut l = vec![Complex64::new(0.0, 0.0); n * (n + 1) / 2];
        for j in 0..n {
            let rj = tri(j, 0);
            let d = self.data[tri(j, j)].re - l[rj..rj + j].iter().map(|z| z.norm_sqr()).sum::<f64>();
            if !(d > floor) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let ljj = d.sqrt();
            l[tri(j, j)] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let ri = tri(i, 0);
                // Σ_k l[i][k] conj(l[j][k])
                let s = dot_conj(&l[rj..rj + j], &l[ri..ri + j]);
                l[tri(i, j)] = (self.data[tri(i, j)] - s) / ljj;
            }
        }
        Ok(Cholesky { dim: n, l })
    }
}

/// Lower-triangular Cholesky factor, packed like [`HermitianMat`].
#[derive(Clone, Debug)]
pub struct Cholesky {
    dim: usize,
    l: Vec<Complex64>,
}

impl Cholesky {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solves `L L† x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut y = b.to_vec();
        for i in 0..n {
            let r = tri(i, 0);
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[r + k] * y[k];
            }
            y[i] = s / self.l[r + i].re;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.l[tri(k, i)].conj() * y[k];
            }
            y[i] = s / self.l[tri(i, i)].re;
        }
        y
    }

    /// `L w`, used to colour white Gaussian vectors.
    pub fn mul_lower(&self, w: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| {
                let r = tri(i, 0);
                (0..=i).map(|k| self.l[r + k] * w[k]).sum()
            })
            .collect()
    }
}

/// Solves `A x = b` for Hermitian positive-definite `A`.
pub fn hermitian_solve(a: &HermitianMat, b: &ComplexVec) -> Result<ComplexVec> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let chol = a.cholesky()?;
    Ok(ComplexVec::from_vec_unchecked(chol.solve(b.entries())))
}

fn subtract_projection(w: &mut [Complex64], q: &[Complex64]) {
    let c = dot_conj(q, w);
    for (wi, qi) in w.iter_mut().zip(q) {
        *wi -= c * qi;
    }
}

/// Unit vector along the component of `h0` orthogonal to every vector in
/// `cancelled`.
///
/// Modified Gram–Schmidt with one re-orthogonalisation pass. Vectors that are
/// dependent on earlier ones (relative residual below 1e-12) add nothing.
pub fn nullspace_project(h0: &ComplexVec, cancelled: &[ComplexVec]) -> Result<ComplexVec> {
    let dim = h0.dim();
    if cancelled.len() >= dim {
        return Err(Error::TooManyCancelled {
            cancelled: cancelled.len(),
            dim,
        });
    }
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cancelled.len());
    for h in cancelled {
        if h.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: h.dim(),
            });
        }
        let mut w = h.entries().to_vec();
        for _ in 0..2 {
            for q in &basis {
                subtract_projection(&mut w, q);
            }
        }
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-12 * h.norm() {
            w.iter_mut().for_each(|z| *z /= n);
            basis.push(w);
        }
    }
    let mut r = h0.entries().to_vec();
    for _ in 0..2 {
        for q in &basis {
            subtract_projection(&mut r, q);
        }
    }
    let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n >= 1e-12 * h0.norm()) || n == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    r.iter_mut().for_each(|z| *z /= n);
    Ok(ComplexVec::from_vec_unchecked(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mathkit::{sample_channel, StreamFactory};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_pd(dim: usize, seed: u64) -> HermitianMat {
        let mut rng = StreamFactory::new(seed).stream(&[0]);
        let mut a = HermitianMat::scaled_identity(dim, 0.1);
        for _ in 0..dim + 2 {
            let v = sample_channel(dim, &mut rng);
            a.add_outer(1.0, v.entries());
        }
        a
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = ComplexVec::new(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)]).unwrap();
        let x = hermitian_solve(&HermitianMat::scaled_identity(3, 1.0), &b).unwrap();
        assert_eq!(x, b);
        let x = hermitian_solve(&HermitianMat::scaled_identity(3, 2.0), &b).unwrap();
        for (xi, bi) in x.entries().iter().zip(b.entries()) {
            assert!((xi - bi / 2.0).norm() < 1e-15);
        }
    }

    #[test]
    fn random_solve_residual() {
        for seed in 0..20 {
            let a = random_pd(4, seed);
            let mut rng = StreamFactory::new(seed).stream(&[1]);
            let b = sample_channel(4, &mut rng);
            let x = hermitian_solve(&a, &b).unwrap();
            let ax = a.mul_vec(x.entries());
            let res: f64 = ax
                .iter()
                .zip(b.entries())
                .map(|(p, q)| (p - q).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res / b.norm() < 1e-9, "seed {seed}: {res}");
        }
    }

    #[test]
    fn cholesky_reconstructs_matrix() {
        let a = random_pd(5, 7);
        let chol = a.cholesky().unwrap();
        for j in 0..5 {
            let mut e = vec![c(0.0, 0.0); 5];
            e[j] = c(1.0, 0.0);
            // column j of L L† = L (L† e_j); check via solve round trip instead
            let col = a.mul_vec(&e);
            let back = chol.solve(&col);
            for (i, z) in back.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((z - c(want, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn mul_lower_colours_identity() {
        let a = random_pd(3, 3);
        let chol = a.cholesky().unwrap();
        // L L† = A, so Σ_j (L e_j)(L e_j)† = A.
        let mut acc = HermitianMat::zeros(3);
        for j in 0..3 {
            let mut e = vec![c(0.0, 0.0); 3];
            e[j] = c(1.0, 0.0);
            acc.add_outer(1.0, &chol.mul_lower(&e));
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((acc.get(i, j) - a.get(i, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = HermitianMat::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            m.cholesky(),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
        let z = HermitianMat::zeros(2);
        assert!(z.cholesky().is_err());
    }

    #[test]
    fn non_hermitian_rows_rejected() {
        let r = HermitianMat::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0)],
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn projection_without_cancellation_is_mrc() {
        let h0 = ComplexVec::new(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        let v = nullspace_project(&h0, &[]).unwrap();
        assert_eq!(v, h0.normalized().unwrap());
    }

    #[test]
    fn projection_of_orthogonal_vector_is_identity() {
        let h0 = ComplexVec::new(vec![c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let h1 = ComplexVec::new(vec![c(0.0, 0.0), c(2.0, -1.0), c(0.0, 0.0)]).unwrap();
        let v = nullspace_project(&h0, &[h1]).unwrap();
        let want = h0.normalized().unwrap();
        for (a, b) in v.entries().iter().zip(want.entries()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn projection_two_dims() {
        let mut rng = StreamFactory::new(11).stream(&[0]);
        for _ in 0..100 {
            let h0 = sample_channel(2, &mut rng);
            let h1 = sample_channel(2, &mut rng);
            let v = nullspace_project(&h0, std::slice::from_ref(&h1)).unwrap();
            assert!(v.inner(&h1).norm_sqr() < 1e-20);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_errors() {
        let h = ComplexVec::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(
            nullspace_project(&h, &[h.clone(), h.clone()]),
            Err(Error::TooManyCancelled { .. })
        ));
        assert!(matches!(
            nullspace_project(&h, std::slice::from_ref(&h)),
            Err(Error::DegenerateProjection)
        ));
    }

    #[test]
    fn vector_construction_rejects_bad_input() {
        assert!(ComplexVec::new(vec![]).is_err());
        assert!(ComplexVec::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVec::zeros(3).normalized().is_none());
    }
}
