//! Shared generators and independent numeric oracles for the acceptance
//! suite.
//!
//! Everything here works on raw `nalgebra` matrices and recomputes its
//! answers from first principles, so the library's claims are checked
//! against a second route rather than against themselves. In particular,
//! copyability is decided below by an explicit search over candidate
//! copying unitaries, not by the normality test the library uses.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    max_abs(&(a - b))
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        c(standard_normal(rng), standard_normal(rng))
    })
}

/// Haar-ish random unitary via QR of a Ginibre matrix with the R diagonal's
/// phases absorbed into Q.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 1e-300 {
            d / c(d.norm(), 0.0)
        } else {
            c(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let g = ginibre(rng, n, n);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

/// Random normal matrix `V diag(lambda) V^dagger` whose eigenvalues keep a
/// pairwise distance of at least `min_gap`.
pub fn random_normal_matrix(rng: &mut ChaCha8Rng, n: usize, min_gap: f64) -> DMatrix<C64> {
    let v = random_unitary(rng, n);
    let lambdas = loop {
        let draw: Vec<C64> = (0..n)
            .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let mut ok = true;
        for i in 0..n {
            for j in (i + 1)..n {
                if (draw[i] - draw[j]).norm() < min_gap {
                    ok = false;
                }
            }
        }
        if ok {
            break draw;
        }
    };
    let diag = DMatrix::from_fn(n, n, |i, j| if i == j { lambdas[i] } else { c(0.0, 0.0) });
    &(&v * diag) * v.adjoint()
}

/// Random density matrix of the given rank: `G G^dagger` normalized.
pub fn random_mixed_density(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> DMatrix<C64> {
    let g = ginibre(rng, n, rank.max(1));
    let m = &g * g.adjoint();
    let trace: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    m * c(1.0 / trace, 0.0)
}

/// Scalar Shannon entropy in bits of a weight vector (zeros contribute
/// nothing; tiny negatives from roundoff are clamped).
pub fn shannon_bits(weights: &[f64]) -> f64 {
    let mut total = 0.0;
    for &w in weights {
        let w = w.max(0.0);
        if w > 0.0 {
            total -= w * w.log2();
        }
    }
    total
}

/// Von Neumann entropy in bits computed directly from a Hermitian matrix's
/// spectrum, bypassing the library's state machinery.
pub fn entropy_bits_hermitian(m: &DMatrix<C64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let weights: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    shannon_bits(&weights)
}

/// Operator-Schmidt rank of an operator on a bipartite space (left factor
/// most significant): singular-value count of the realigned matrix.
pub fn operator_schmidt_rank(
    u: &DMatrix<C64>,
    dim_left: usize,
    dim_right: usize,
    tol: f64,
) -> usize {
    let mut realigned = DMatrix::<C64>::zeros(dim_left * dim_left, dim_right * dim_right);
    for i in 0..dim_left {
        for j in 0..dim_left {
            for k in 0..dim_right {
                for l in 0..dim_right {
                    realigned[(i * dim_left + j, k * dim_right + l)] =
                        u[(i * dim_right + k, j * dim_right + l)];
                }
            }
        }
    }
    realigned
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Candidate copying unitary `sum_c (v_c v_c^dagger) (x) shift_c` built on
/// an orthonormal basis given as the columns of `v`: the record learns the
/// basis index of the first factor.
pub fn copy_form_unitary(v: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let mut u = DMatrix::<C64>::zeros(n * n, n * n);
    for index in 0..n {
        let column = v.column(index).into_owned();
        let projector = &column * column.adjoint();
        let mut shift = DMatrix::<C64>::zeros(n, n);
        for r in 0..n {
            shift[((r + index) % n, r)] = c(1.0, 0.0);
        }
        u += kron(&projector, &shift);
    }
    u
}

/// Brute-force copyability decision: scan a family of candidate copying
/// unitaries (basis-projector-controlled record shifts over a grid of
/// Hermitian-combination eigenbases, plus random bases and random
/// non-block unitaries) for a non-factorizing one that leaves
/// `b (x) 1` invariant under conjugation. Entirely independent of the
/// library's normality criterion.
pub fn oracle_copyable(b: &DMatrix<C64>, tol: f64, rng: &mut ChaCha8Rng) -> bool {
    let n = b.nrows();
    let hermitian_part = (b + b.adjoint()) * c(0.5, 0.0);
    let skew_part = (b - b.adjoint()) * c(0.0, -0.5);

    let mut bases: Vec<DMatrix<C64>> = vec![identity(n)];
    let mut mixing_angles = vec![
        0.0,
        0.37,
        1.0,
        1.618,
        2.414,
        std::f64::consts::E,
        std::f64::consts::PI,
        -0.73,
        -1.934,
    ];
    for _ in 0..4 {
        mixing_angles.push(rng.random_range(-3.0..3.0));
    }
    for t in mixing_angles {
        let combination = &hermitian_part + &skew_part * c(t, 0.0);
        bases.push(combination.symmetric_eigen().eigenvectors);
    }
    for _ in 0..3 {
        bases.push(random_unitary(rng, n));
    }

    let b_extended = kron(b, &identity(n));
    let invariant_under = |u: &DMatrix<C64>| -> bool {
        max_abs_diff(&(&(u.adjoint() * &b_extended) * u), &b_extended) <= tol
    };

    for basis in &bases {
        let candidate = copy_form_unitary(basis, n);
        if operator_schmidt_rank(&candidate, n, n, 1e-6) >= 2 && invariant_under(&candidate) {
            return true;
        }
    }
    for _ in 0..4 {
        let candidate = random_unitary(rng, n * n);
        if operator_schmidt_rank(&candidate, n, n, 1e-6) >= 2 && invariant_under(&candidate) {
            return true;
        }
    }
    false
}
