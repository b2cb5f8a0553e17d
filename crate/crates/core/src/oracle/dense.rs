use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

/// Dense Hermitian operator with exact evolution by eigendecomposition.
#[derive(Clone, Debug)]
pub struct DenseOperator {
    pub matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.matrix;
        m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
    }

    /// Eigen-decomposition `H = V diag(E) V†`.
    pub fn spectral(&self) -> Spectral {
        let eig = SymmetricEigen::new(self.matrix.clone());
        Spectral { energies: eig.eigenvalues, vectors: eig.eigenvectors }
    }

    /// `e^{-iHt}`.
    pub fn evolution(&self, t: f64) -> DMatrix<Complex64> {
        self.spectral().evolution(t)
    }
}

#[derive(Clone, Debug)]
pub struct Spectral {
    pub energies: DVector<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl Spectral {
    pub fn evolution(&self, t: f64) -> DMatrix<Complex64> {
        let phases = DMatrix::from_diagonal(&self.energies.map(|e| Complex64::from_polar(1.0, -e * t)));
        &self.vectors * phases * self.vectors.adjoint()
    }
}

pub fn is_unitary(u: &DMatrix<Complex64>, tol: f64) -> bool {
    let id = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    (u.adjoint() * u - id).iter().all(|z| z.norm() <= tol)
}
