//! Dense operators on labeled tensor-product spaces.
//!
//! An [`Operator`] pairs a complex matrix with the [`SystemLayout`] it acts
//! on. All structural operations — matrix units, tensor products, partial
//! traces, embeddings of local operators — are addressed by subsystem label,
//! and classification predicates (Hermitian, unitary, projector, normal) are
//! pure functions of the entries under an explicit tolerance.
//!
//! Values are immutable after construction; every operation returns a new
//! operator. Arithmetic between operators on the same layout is provided via
//! the standard operator traits and panics on layout mismatch (a programming
//! error); all label- and index-driven entry points return `Result` instead.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::layout::{IndexSplit, SystemLayout};
use crate::linalg::{self, C64};

/// Classification of an operator's entries under a tolerance.
///
/// Flags are functions of the matrix at call time; since operators are
/// immutable they can be cached by callers, but re-deriving them is cheap
/// relative to any mutation-by-reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorFlags {
    /// `max |A - A^dagger| <= tol`.
    pub hermitian: bool,
    /// `max |A^dagger A - 1| <= tol`.
    pub unitary: bool,
    /// Hermitian and idempotent: `max |A^2 - A| <= tol`.
    pub projector: bool,
    /// Commutes with its adjoint: `max |A A^dagger - A^dagger A| <= tol`.
    pub normal: bool,
}

/// Dense complex operator on a labeled tensor-product space.
#[derive(Debug, Clone)]
pub struct Operator {
    layout: SystemLayout,
    matrix: DMatrix<C64>,
}

impl Operator {
    /// Wraps a square matrix whose dimension matches the layout's total
    /// dimension.
    pub fn new(layout: SystemLayout, matrix: DMatrix<C64>) -> Result<Self> {
        let expected = layout.total_dim();
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::MatrixShape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected,
            });
        }
        Ok(Operator { layout, matrix })
    }

    /// The identity on `layout`.
    pub fn identity(layout: &SystemLayout) -> Self {
        Operator {
            layout: layout.clone(),
            matrix: DMatrix::identity(layout.total_dim(), layout.total_dim()),
        }
    }

    /// The zero operator on `layout`.
    pub fn zeros(layout: &SystemLayout) -> Self {
        Operator {
            layout: layout.clone(),
            matrix: DMatrix::zeros(layout.total_dim(), layout.total_dim()),
        }
    }

    /// Diagonal operator with the given complex diagonal.
    pub fn from_diagonal(layout: &SystemLayout, diagonal: &[C64]) -> Result<Self> {
        let n = layout.total_dim();
        if diagonal.len() != n {
            return Err(Error::MatrixShape {
                rows: diagonal.len(),
                cols: 1,
                expected: n,
            });
        }
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diagonal[i]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Operator {
            layout: layout.clone(),
            matrix,
        })
    }

    /// Diagonal operator with a real diagonal.
    pub fn from_real_diagonal(layout: &SystemLayout, diagonal: &[f64]) -> Result<Self> {
        let complex: Vec<C64> = diagonal.iter().map(|&d| C64::new(d, 0.0)).collect();
        Self::from_diagonal(layout, &complex)
    }

    /// The matrix unit `S_ab = |a><b|` on the subsystem named `label`,
    /// extended by the identity on every other subsystem.
    pub fn matrix_unit(layout: &SystemLayout, label: &str, row: usize, col: usize) -> Result<Self> {
        let dim = layout.dim_of(label)?;
        for &index in &[row, col] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        let mut local = DMatrix::<C64>::zeros(dim, dim);
        local[(row, col)] = C64::new(1.0, 0.0);
        Self::embedded(layout, label, &local)
    }

    /// Embeds a local operator on one subsystem, identity elsewhere.
    pub fn embedded(layout: &SystemLayout, label: &str, local: &DMatrix<C64>) -> Result<Self> {
        Self::embedded_multi(layout, &[label], local)
    }

    /// Embeds a local operator acting jointly on the listed subsystems
    /// (which must appear in layout order), identity elsewhere. The local
    /// matrix is indexed row-major over the listed subsystems, matching the
    /// global basis convention, and the subsystems need not be adjacent in
    /// the layout.
    pub fn embedded_multi(
        layout: &SystemLayout,
        labels: &[&str],
        local: &DMatrix<C64>,
    ) -> Result<Self> {
        let positions = layout.positions_in_order(labels)?;
        let split = IndexSplit::new(layout, &positions);
        if local.nrows() != split.selected_dim || local.ncols() != split.selected_dim {
            return Err(Error::MatrixShape {
                rows: local.nrows(),
                cols: local.ncols(),
                expected: split.selected_dim,
            });
        }
        let n = layout.total_dim();
        let mut matrix = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if split.rest[i] == split.rest[j] {
                    matrix[(i, j)] = local[(split.selected[i], split.selected[j])];
                }
            }
        }
        Ok(Operator {
            layout: layout.clone(),
            matrix,
        })
    }

    /// Kronecker (tensor) product; the result lives on the concatenated
    /// layout. Fails if the layouts share a label.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Operator {
            layout,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Partial trace keeping the listed subsystems (a non-empty subset of
    /// the layout's labels, in any order; the result preserves layout
    /// order).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Operator> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let mut positions = Vec::with_capacity(keep.len());
        for &label in keep {
            let p = self.layout.position(label)?;
            if positions.contains(&p) {
                return Err(Error::LabelsOutOfOrder {
                    label: label.to_string(),
                });
            }
            positions.push(p);
        }
        positions.sort_unstable();
        let split = IndexSplit::new(&self.layout, &positions);
        let kept_layout = self.layout.restricted(&positions);
        let n = self.layout.total_dim();
        let mut reduced = DMatrix::<C64>::zeros(split.selected_dim, split.selected_dim);
        for i in 0..n {
            for j in 0..n {
                if split.rest[i] == split.rest[j] {
                    reduced[(split.selected[i], split.selected[j])] += self.matrix[(i, j)];
                }
            }
        }
        Ok(Operator {
            layout: kept_layout,
            matrix: reduced,
        })
    }

    /// Entry classification under `tol`.
    pub fn flags(&self, tol: f64) -> OperatorFlags {
        let adjoint = self.matrix.adjoint();
        let hermitian = linalg::max_abs_diff(&self.matrix, &adjoint) <= tol;
        let unitary = linalg::deviation_from_identity(&(&adjoint * &self.matrix)) <= tol;
        let projector =
            hermitian && linalg::max_abs_diff(&(&self.matrix * &self.matrix), &self.matrix) <= tol;
        let normal =
            linalg::max_abs_diff(&(&self.matrix * &adjoint), &(&adjoint * &self.matrix)) <= tol;
        OperatorFlags {
            hermitian,
            unitary,
            projector,
            normal,
        }
    }

    /// Expands the operator over matrix units of the subsystem named
    /// `label`: `op = sum_ab S_ab (x) R_ab`, where each residual `R_ab` acts
    /// on the remaining subsystems (and is a 1x1 scalar when `label` is the
    /// only subsystem).
    pub fn coefficients_over_matrix_units(&self, label: &str) -> Result<MatrixUnitExpansion> {
        let position = self.layout.position(label)?;
        let split = IndexSplit::new(&self.layout, &[position]);
        let dim = split.selected_dim;
        let n = self.layout.total_dim();
        let mut residuals =
            vec![DMatrix::<C64>::zeros(split.rest_dim, split.rest_dim); dim * dim];
        for i in 0..n {
            for j in 0..n {
                let a = split.selected[i];
                let b = split.selected[j];
                residuals[a * dim + b][(split.rest[i], split.rest[j])] = self.matrix[(i, j)];
            }
        }
        Ok(MatrixUnitExpansion {
            layout: self.layout.clone(),
            position,
            dim,
            residuals,
        })
    }

    /// The layout this operator acts on.
    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    /// The underlying matrix.
    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Total dimension.
    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    /// Adjoint (conjugate transpose).
    pub fn dagger(&self) -> Operator {
        Operator {
            layout: self.layout.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        (0..self.matrix.nrows()).map(|i| self.matrix[(i, i)]).sum()
    }

    /// Scales by a complex factor.
    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix * factor,
        }
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_same_layout(other)?;
        Ok(linalg::max_abs_diff(&self.matrix, &other.matrix))
    }

    /// Whether every entry matches `other` within `tol`.
    pub fn is_close(&self, other: &Operator, tol: f64) -> bool {
        self.layout == other.layout
            && linalg::max_abs_diff(&self.matrix, &other.matrix) <= tol
    }

    /// Fails with a layout-mismatch error unless `other` shares this
    /// operator's layout.
    pub(crate) fn check_same_layout(&self, other: &Operator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch {
                left: self.layout.describe(),
                right: other.layout.describe(),
            });
        }
        Ok(())
    }

    fn assert_same_layout(&self, other: &Operator, op: &str) {
        assert!(
            self.layout == other.layout,
            "operator {op} on mismatched layouts: [{}] vs [{}]",
            self.layout.describe(),
            other.layout.describe()
        );
    }
}

impl std::ops::Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs, "addition");
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl std::ops::Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs, "subtraction");
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl std::ops::Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.assert_same_layout(rhs, "multiplication");
        Operator {
            layout: self.layout.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl std::ops::Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            layout: self.layout.clone(),
            matrix: -&self.matrix,
        }
    }
}

/// Expansion of an operator over the matrix units of one subsystem.
///
/// `op = sum_ab S_ab (x) residual(a, b)`, with the residuals acting on the
/// remaining subsystems in layout order. For a single-subsystem layout the
/// residuals are 1x1 and [`MatrixUnitExpansion::coefficient`] exposes them as
/// plain scalars.
#[derive(Debug, Clone)]
pub struct MatrixUnitExpansion {
    layout: SystemLayout,
    position: usize,
    dim: usize,
    residuals: Vec<DMatrix<C64>>,
}

impl MatrixUnitExpansion {
    /// Dimension of the expanded subsystem.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Label of the expanded subsystem.
    pub fn label(&self) -> &str {
        self.layout.subsystems()[self.position].label()
    }

    /// Residual operator attached to the matrix unit `S_{row,col}`.
    pub fn residual(&self, row: usize, col: usize) -> &DMatrix<C64> {
        &self.residuals[row * self.dim + col]
    }

    /// Scalar coefficient `beta_{row,col}`; only defined when the expanded
    /// subsystem is the whole layout (residuals are 1x1).
    pub fn coefficient(&self, row: usize, col: usize) -> Result<C64> {
        let r = self.residual(row, col);
        if r.nrows() != 1 {
            return Err(Error::InvalidField {
                field: "coefficient".into(),
                reason: format!(
                    "residuals are {}x{} operators, not scalars; use residual()",
                    r.nrows(),
                    r.ncols()
                ),
            });
        }
        Ok(r[(0, 0)])
    }

    /// Rebuilds the operator from the expansion. Round-trips the original
    /// within floating-point reassembly error.
    pub fn reconstruct(&self) -> Operator {
        let split = IndexSplit::new(&self.layout, &[self.position]);
        let n = self.layout.total_dim();
        let mut matrix = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let a = split.selected[i];
                let b = split.selected[j];
                matrix[(i, j)] = self.residuals[a * self.dim + b][(split.rest[i], split.rest[j])];
            }
        }
        Operator {
            layout: self.layout.clone(),
            matrix,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn qubit(label: &str) -> SystemLayout {
        SystemLayout::single(label, 2).unwrap()
    }

    fn sigma_z(label: &str) -> Operator {
        Operator::from_real_diagonal(&qubit(label), &[1.0, -1.0]).unwrap()
    }

    fn sigma_x(label: &str) -> Operator {
        let layout = qubit(label);
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        Operator::new(layout, m).unwrap()
    }

    #[test]
    fn matrix_unit_product_rule_holds_on_small_dimensions() {
        for dim in [2usize, 3, 8] {
            let layout = SystemLayout::single("s", dim).unwrap();
            for a in 0..dim {
                for b in 0..dim {
                    let s_ab = Operator::matrix_unit(&layout, "s", a, b).unwrap();
                    for e in 0..dim {
                        for f in 0..dim {
                            let s_ef = Operator::matrix_unit(&layout, "s", e, f).unwrap();
                            let product = &s_ab * &s_ef;
                            let expected = if b == e {
                                Operator::matrix_unit(&layout, "s", a, f).unwrap()
                            } else {
                                Operator::zeros(&layout)
                            };
                            assert!(product.is_close(&expected, 0.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn diagonal_matrix_units_sum_to_identity() {
        for dim in [2usize, 3, 8] {
            let layout = SystemLayout::single("s", dim).unwrap();
            let mut sum = Operator::zeros(&layout);
            for a in 0..dim {
                sum = &sum + &Operator::matrix_unit(&layout, "s", a, a).unwrap();
            }
            assert!(sum.is_close(&Operator::identity(&layout), 0.0));
        }
    }

    #[test]
    fn matrix_units_on_different_subsystems_commute() {
        let layout = SystemLayout::new([("a", 2), ("b", 3)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let left = Operator::matrix_unit(&layout, "a", i, j).unwrap();
                for k in 0..3 {
                    for l in 0..3 {
                        let right = Operator::matrix_unit(&layout, "b", k, l).unwrap();
                        let forward = &left * &right;
                        let backward = &right * &left;
                        assert!(forward.is_close(&backward, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_unit_rejects_out_of_range_indices() {
        let layout = qubit("q");
        assert!(matches!(
            Operator::matrix_unit(&layout, "q", 2, 0).unwrap_err(),
            Error::IndexOutOfRange { .. }
        ));
        assert!(matches!(
            Operator::matrix_unit(&layout, "nope", 0, 0).unwrap_err(),
            Error::UnknownLabel { .. }
        ));
    }

    #[test]
    fn tensor_of_sigma_z_pair_is_the_signed_diagonal() {
        let product = sigma_z("a").tensor(&sigma_z("b")).unwrap();
        let expected = Operator::from_real_diagonal(
            &SystemLayout::new([("a", 2), ("b", 2)]).unwrap(),
            &[1.0, -1.0, -1.0, 1.0],
        )
        .unwrap();
        assert!(product.is_close(&expected, 0.0));
    }

    #[test]
    fn tensor_rejects_shared_labels() {
        let err = sigma_z("a").tensor(&sigma_z("a")).unwrap_err();
        assert!(matches!(err, Error::OverlappingLabels { .. }));
    }

    #[test]
    fn partial_trace_of_product_factorizes() {
        let a = sigma_x("a");
        let b = Operator::from_real_diagonal(&SystemLayout::single("b", 3).unwrap(), &[0.5, 0.3, 0.2])
            .unwrap();
        let joint = a.tensor(&b).unwrap();
        // tr_b(A (x) B) = tr(B) * A
        let reduced = joint.partial_trace(&["a"]).unwrap();
        assert!(reduced.is_close(&a.scale(b.trace()), 1e-15));
        // keeping everything is the identity operation
        let kept = joint.partial_trace(&["a", "b"]).unwrap();
        assert!(kept.is_close(&joint, 0.0));
    }

    #[test]
    fn partial_trace_of_bell_projector_is_maximally_mixed() {
        let layout = SystemLayout::new([("a", 2), ("b", 2)]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut bell = DMatrix::<C64>::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                bell[(i, j)] = c(h * h, 0.0);
            }
        }
        let projector = Operator::new(layout, bell).unwrap();
        for keep in [["a"], ["b"]] {
            let reduced = projector.partial_trace(&keep).unwrap();
            let expected =
                Operator::from_real_diagonal(&SystemLayout::single(keep[0], 2).unwrap(), &[0.5, 0.5])
                    .unwrap();
            assert!(reduced.is_close(&expected, 1e-15));
        }
    }

    #[test]
    fn partial_trace_rejects_empty_or_unknown_keep_sets() {
        let joint = sigma_z("a").tensor(&sigma_z("b")).unwrap();
        assert!(matches!(
            joint.partial_trace(&[]).unwrap_err(),
            Error::EmptyKeepSet
        ));
        assert!(joint.partial_trace(&["z"]).is_err());
        assert!(joint.partial_trace(&["a", "a"]).is_err());
    }

    #[test]
    fn flags_classify_the_canonical_examples() {
        let z = sigma_z("q");
        let fz = z.flags(1e-10);
        assert!(fz.hermitian && fz.unitary && fz.normal);
        assert!(!fz.projector, "sigma_z squares to 1, not to itself");

        let s01 = Operator::matrix_unit(&qubit("q"), "q", 0, 1).unwrap();
        let f01 = s01.flags(1e-10);
        assert!(!f01.hermitian && !f01.unitary && !f01.projector);
        assert!(!f01.normal, "a raising matrix unit is the canonical non-normal operator");

        let p0 = Operator::matrix_unit(&qubit("q"), "q", 0, 0).unwrap();
        let fp = p0.flags(1e-10);
        assert!(fp.hermitian && fp.projector && fp.normal && !fp.unitary);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let hadamard = Operator::new(
            qubit("q"),
            DMatrix::from_row_slice(2, 2, &[c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)]),
        )
        .unwrap();
        let fh = hadamard.flags(1e-10);
        assert!(fh.hermitian && fh.unitary && fh.normal);
    }

    #[test]
    fn coefficients_of_single_subsystem_operators_are_the_entries() {
        let z = sigma_z("q");
        let expansion = z.coefficients_over_matrix_units("q").unwrap();
        assert_eq!(expansion.coefficient(0, 0).unwrap(), c(1.0, 0.0));
        assert_eq!(expansion.coefficient(1, 1).unwrap(), c(-1.0, 0.0));
        assert_eq!(expansion.coefficient(0, 1).unwrap(), c(0.0, 0.0));

        let x = sigma_x("q");
        let expansion = x.coefficients_over_matrix_units("q").unwrap();
        assert_eq!(expansion.coefficient(0, 1).unwrap(), c(1.0, 0.0));
        assert_eq!(expansion.coefficient(1, 0).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn coefficients_round_trip_a_bipartite_operator() {
        let layout = SystemLayout::new([("a", 2), ("b", 3)]).unwrap();
        let n = layout.total_dim();
        let matrix = DMatrix::from_fn(n, n, |i, j| c((i * n + j) as f64, (i as f64) - (j as f64)));
        let op = Operator::new(layout, matrix).unwrap();
        for label in ["a", "b"] {
            let expansion = op.coefficients_over_matrix_units(label).unwrap();
            let rebuilt = expansion.reconstruct();
            assert!(rebuilt.is_close(&op, 0.0));
        }
    }

    #[test]
    fn embedded_multi_handles_non_adjacent_subsystems() {
        let layout = SystemLayout::new([("a", 2), ("b", 2), ("c", 2)]).unwrap();
        let local = sigma_z("a").tensor(&sigma_z("c")).unwrap();
        let embedded = Operator::embedded_multi(&layout, &["a", "c"], local.matrix()).unwrap();
        let direct = &Operator::embedded(&layout, "a", sigma_z("a").matrix()).unwrap()
            * &Operator::embedded(&layout, "c", sigma_z("c").matrix()).unwrap();
        assert!(embedded.is_close(&direct, 0.0));
        assert!(Operator::embedded_multi(&layout, &["c", "a"], local.matrix()).is_err());
    }

    fn small_matrix_strategy(dim: usize) -> impl Strategy<Value = DMatrix<C64>> {
        prop::collection::vec(
            (prop::num::f64::NORMAL.prop_map(|x| x % 2.0), prop::num::f64::NORMAL.prop_map(|x| x % 2.0)),
            dim * dim,
        )
        .prop_map(move |entries| {
            DMatrix::from_fn(dim, dim, |i, j| {
                let (re, im) = entries[i * dim + j];
                c(re, im)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn partial_trace_preserves_trace_and_is_linear(
            m1 in small_matrix_strategy(6),
            m2 in small_matrix_strategy(6),
            alpha in -2.0f64..2.0,
        ) {
            let layout = SystemLayout::new([("a", 2), ("b", 3)]).unwrap();
            let op1 = Operator::new(layout.clone(), m1).unwrap();
            let op2 = Operator::new(layout.clone(), m2).unwrap();
            for keep in [["a"], ["b"]] {
                let r1 = op1.partial_trace(&keep).unwrap();
                prop_assert!((r1.trace() - op1.trace()).norm() <= 1e-12);

                let combined = &op1 + &op2.scale(c(alpha, 0.0));
                let reduced_combined = combined.partial_trace(&keep).unwrap();
                let recombined = &r1 + &op2.partial_trace(&keep).unwrap().scale(c(alpha, 0.0));
                prop_assert!(reduced_combined.is_close(&recombined, 1e-12));
            }
        }

        #[test]
        fn tensor_trace_is_multiplicative(
            m1 in small_matrix_strategy(2),
            m2 in small_matrix_strategy(3),
        ) {
            let a = Operator::new(SystemLayout::single("a", 2).unwrap(), m1).unwrap();
            let b = Operator::new(SystemLayout::single("b", 3).unwrap(), m2).unwrap();
            let joint = a.tensor(&b).unwrap();
            prop_assert!((joint.trace() - a.trace() * b.trace()).norm() <= 1e-9 * (1.0 + a.trace().norm() * b.trace().norm()));
        }
    }
}
