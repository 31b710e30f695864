//! Cholesky factorisation for the small symmetric positive-definite systems
//! IRLS produces (one row/column per coefficient).

use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// Lower-triangular factor `L` with `A = L Lᵀ`, row-major.
pub(crate) struct Cholesky<T> {
    n: usize,
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    pub(crate) fn factor(a: &[T], n: usize) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let scale = (0..n).map(|i| a[i * n + i].abs()).fold(T::zero(), T::max);
        let floor = scale * T::epsilon() * from_usize::<T>(n.max(1)) * T::lit(16.0);
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            // also rejects NaN
            if d.is_nan() || d <= floor {
                return Err(Error::RankDeficient { column: j });
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s = s - l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, l })
    }

    pub(crate) fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut z = b.to_vec();
        for i in 0..n {
            let s = (0..i).fold(z[i], |s, k| s - self.l[i * n + k] * z[k]);
            z[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let s = ((i + 1)..n).fold(z[i], |s, k| s - self.l[k * n + i] * z[k]);
            z[i] = s / self.l[i * n + i];
        }
        z
    }

    /// Diagonal of `A⁻¹`.
    pub(crate) fn inverse_diagonal(&self) -> Vec<T> {
        let n = self.n;
        (0..n)
            .map(|j| {
                let mut e = vec![T::zero(); n];
                e[j] = T::one();
                self.solve(&e)[j]
            })
            .collect()
    }
}
