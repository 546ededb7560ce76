//! Internal dense linear-algebra helpers.
//!
//! Thin wrappers around `nalgebra` that pin down the conventions the rest of
//! the crate relies on: Hermitian eigendecompositions are always returned
//! sorted by descending eigenvalue with a deterministic tie-break, and normal
//! matrices are diagonalized by simultaneous diagonalization of their
//! Hermitian and anti-Hermitian parts (which only ever calls the Hermitian
//! eigensolver, keeping the numerics on its best-conditioned path).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

/// Complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Largest entrywise modulus.
pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`. Panics if shapes differ; callers
/// validate layouts first.
pub(crate) fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_abs_diff");
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Largest entrywise deviation from the identity.
pub(crate) fn deviation_from_identity(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expected = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            dev = dev.max((m[(i, j)] - expected).norm());
        }
    }
    dev
}

/// Hermitian part `(m + m^dagger) / 2`.
pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Anti-Hermitian part divided by `i`, i.e. `(m - m^dagger) / (2i)`; Hermitian.
pub(crate) fn skew_part_over_i(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m - m.adjoint()) * C64::new(0.0, -0.5)
}

/// Deviation of `m` from hermiticity, `max |m - m^dagger|`.
pub(crate) fn hermiticity_deviation(m: &DMatrix<C64>) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Eigendecomposition of a (numerically) Hermitian matrix.
///
/// The input is symmetrized before decomposition so that roundoff in the
/// caller's matrix cannot leak into complex eigenvalues. Returns eigenvalues
/// sorted descending together with the matching orthonormal eigenvector
/// columns; ties keep the solver's original order so results are
/// deterministic for identical inputs.
pub(crate) fn hermitian_eigen(m: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = hermitian_part(m);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::<C64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Groups a descending-sorted value list into clusters whose adjacent gaps
/// are at most `gap`. Returns `(start, len)` ranges.
pub(crate) fn cluster_sorted(values: &[f64], gap: f64) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0usize;
    for k in 1..=values.len() {
        let split = k == values.len() || (values[k - 1] - values[k]).abs() > gap;
        if split {
            clusters.push((start, k - start));
            start = k;
        }
    }
    clusters
}

/// Eigendecomposition of a normal matrix via simultaneous diagonalization of
/// its Hermitian and anti-Hermitian parts.
///
/// `group_gap` controls how close two eigenvalues of the Hermitian part must
/// be to count as one degenerate block. Returns complex eigenvalues (sorted
/// by descending real part, then descending imaginary part within a block)
/// and the common orthonormal eigenvector columns. The caller is expected to
/// have established normality already (e.g. via the commutator test); the
/// result is meaningless for non-normal input.
pub(crate) fn normal_eigen(m: &DMatrix<C64>, group_gap: f64) -> (Vec<C64>, DMatrix<C64>) {
    let h = hermitian_part(m);
    let k = skew_part_over_i(m);
    let (hvals, mut vectors) = hermitian_eigen(&h);
    for (start, len) in cluster_sorted(&hvals, group_gap) {
        if len < 2 {
            continue;
        }
        let block = vectors.columns(start, len).into_owned();
        let restricted = block.adjoint() * &k * &block;
        let (_, w) = hermitian_eigen(&restricted);
        let rotated = block * w;
        for j in 0..len {
            vectors.set_column(start + j, &rotated.column(j));
        }
    }
    let rayleigh = vectors.adjoint() * m * &vectors;
    let values: Vec<C64> = (0..m.nrows()).map(|j| rayleigh[(j, j)]).collect();
    (values, vectors)
}

/// `exp(i * scale * g)` for Hermitian `g`, via eigendecomposition. Unitary up
/// to roundoff by construction.
pub(crate) fn exp_i_hermitian(g: &DMatrix<C64>, scale: f64) -> DMatrix<C64> {
    let (values, vectors) = hermitian_eigen(g);
    let phases = DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| C64::from_polar(1.0, scale * v)),
    );
    let scaled = {
        let mut s = vectors.clone();
        for (j, phase) in phases.iter().enumerate() {
            let col = s.column(j) * *phase;
            s.set_column(j, &col);
        }
        s
    };
    scaled * vectors.adjoint()
}

/// Spectral norm (largest |eigenvalue|) of a Hermitian matrix.
pub(crate) fn spectral_norm_hermitian(g: &DMatrix<C64>) -> f64 {
    let (values, _) = hermitian_eigen(g);
    values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Seeded random Hermitian matrix with unit spectral norm: a Gaussian
/// ensemble draw symmetrized and rescaled so its largest |eigenvalue| is 1.
pub(crate) fn random_hermitian_unit_norm(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let raw = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let herm = hermitian_part(&raw);
    let norm = spectral_norm_hermitian(&herm);
    if norm > 0.0 {
        herm / C64::new(norm, 0.0)
    } else {
        herm
    }
}

/// Seeded Haar-like random unitary: QR of a complex Gaussian matrix with the
/// phases of R's diagonal folded into Q's columns.
#[allow(dead_code)]
pub(crate) fn random_unitary(dim: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    let raw = DMatrix::<C64>::from_fn(dim, dim, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let qr = raw.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / C64::new(d.norm(), 0.0)
        } else {
            C64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase;
        q.set_column(j, &col);
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn hermitian_eigen_sorts_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.25, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.75, 0.0)]);
        let (values, vectors) = hermitian_eigen(&m);
        assert!((values[0] - 0.75).abs() < 1e-14);
        assert!((values[1] - 0.25).abs() < 1e-14);
        // leading eigenvector is e1
        assert!((vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs_random_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_hermitian_unit_norm(6, &mut rng);
        let (values, vectors) = hermitian_eigen(&g);
        let diag = DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                c(values[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let rebuilt = &vectors * diag * vectors.adjoint();
        assert!(max_abs_diff(&rebuilt, &g) < 1e-12);
        assert!(deviation_from_identity(&(vectors.adjoint() * &vectors)) < 1e-12);
    }

    #[test]
    fn normal_eigen_handles_degenerate_hermitian_part() {
        // i * sigma_y is normal with eigenvalues +-1 on the imaginary axis...
        // no: pick a unitary whose Hermitian part is fully degenerate:
        // diag(i, i, -i) has H = 0 (degenerate) and K = diag(1, 1, -1).
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0, 1.0), c(0.0, 1.0), c(0.0, -1.0)]));
        let (values, vectors) = normal_eigen(&m, 1e-8);
        let diag = DMatrix::from_fn(3, 3, |i, j| if i == j { values[i] } else { c(0.0, 0.0) });
        let rebuilt = &vectors * diag * vectors.adjoint();
        assert!(max_abs_diff(&rebuilt, &m) < 1e-12);
    }

    #[test]
    fn normal_eigen_diagonalizes_random_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(5, &mut rng);
        let (values, vectors) = normal_eigen(&u, 1e-8);
        let diag = DMatrix::from_fn(5, 5, |i, j| if i == j { values[i] } else { c(0.0, 0.0) });
        let rebuilt = &vectors * diag * vectors.adjoint();
        assert!(max_abs_diff(&rebuilt, &u) < 1e-10);
        for v in &values {
            assert!((v.norm() - 1.0).abs() < 1e-10, "unitary eigenvalues lie on the circle");
        }
    }

    #[test]
    fn exp_i_hermitian_is_unitary_and_reduces_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_hermitian_unit_norm(4, &mut rng);
        let u = exp_i_hermitian(&g, 0.37);
        assert!(deviation_from_identity(&(u.adjoint() * &u)) < 1e-12);
        let id = exp_i_hermitian(&g, 0.0);
        assert!(deviation_from_identity(&id) < 1e-14);
    }

    #[test]
    fn random_hermitian_has_unit_spectral_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_hermitian_unit_norm(5, &mut rng);
        assert!(hermiticity_deviation(&g) < 1e-14);
        assert!((spectral_norm_hermitian(&g) - 1.0).abs() < 1e-12);
    }
}
