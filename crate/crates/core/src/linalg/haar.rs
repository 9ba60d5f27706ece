//! Haar-distributed unitary matrices.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::{rng, C64};

/// Haar unitary of order `n`, deterministic in `seed`.
///
/// QR of a standard complex Gaussian matrix by Gram-Schmidt with one
/// reorthogonalization pass. The resulting `R` has a positive real
/// diagonal, which is the phase normalization that makes `Q` Haar.
pub fn haar_unitary(n: usize, seed: u64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("haar_unitary needs n >= 1"));
    }
    // columns of the Ginibre matrix; column j is drawn from stream j
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut g = rng::stream(seed, j as u64);
            (0..n).map(|_| rng::complex_normal(&mut g)).collect()
        })
        .collect();
    for j in 0..n {
        let (done, rest) = cols.split_at_mut(j);
        let v = &mut rest[0];
        for _pass in 0..2 {
            for q in done.iter() {
                let proj: C64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("rank-deficient Gaussian draw"));
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| cols[j][i]))
}
