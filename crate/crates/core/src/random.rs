//! Seeded random generators for test inputs.
//!
//! Hermitian matrices are `(X + X*)/2` with standard complex normal entries,
//! states are `X X* / tr[X X*]`, and scalars are uniform on the unit disk.
//! Every check draws from its own [`ChaCha8Rng`] stream derived from the run
//! seed, so results do not depend on scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::Channel;
use crate::error::Result;
use crate::linalg::{inverse_sqrt_pd, ComplexMatrix, State};

/// Independent generator for stream `stream` of run `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stable stream id for a named check.
pub fn stream_id(name: &str) -> u64 {
    // FNV-1a; stable across platforms and compiler versions.
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn unit_disk_scalar<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    loop {
        let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm_sqr() <= 1.0 {
            return z;
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    gaussian_matrix(rng, dim, dim).hermitian_part()
}

/// `X* X` for Gaussian `X`.
pub fn psd<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let x = gaussian_matrix(rng, dim, dim);
    &x.adjoint() * &x
}

pub fn state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State {
    let x = gaussian_matrix(rng, dim, dim);
    let g = &x * &x.adjoint();
    let tr = g.trace().re;
    State::from_matrix_unchecked(g.scale_real(1.0 / tr).hermitian_part())
}

pub fn pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> State {
    let psi: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
    State::pure(&psi).expect("Gaussian vector is nonzero")
}

/// Haar-distributed unitary via Gram-Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        for u in &cols {
            let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= n);
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Channel with `n_kraus` Kraus blocks of shape `dim_in x dim_out`, obtained
/// by normalizing a Gaussian isometry so that `sum K* K = 1`.
pub fn kraus_channel<R: Rng + ?Sized>(
    rng: &mut R,
    dim_in: usize,
    dim_out: usize,
    n_kraus: usize,
) -> Result<Channel> {
    let blocks: Vec<ComplexMatrix> = (0..n_kraus)
        .map(|_| gaussian_matrix(rng, dim_in, dim_out))
        .collect();
    let mut gram = ComplexMatrix::zero(dim_out);
    for k in &blocks {
        gram = &gram + &(&k.adjoint() * k);
    }
    let norm = inverse_sqrt_pd(&gram.hermitian_part())?;
    Channel::new(blocks.iter().map(|k| k * &norm).collect())
}
