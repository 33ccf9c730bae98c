//! Operator-valued frames: analysis operator, frame operator, bounds, frame
//! projection, classification, reconstruction, Parseval normalization and
//! dilation.
//!
//! A frame is a finite ordered family `A_j : H -> H_o`. The analysis operator
//! `θ` stacks the blocks vertically in index order, so the block selectors
//! `L_j` are implicit row ranges of `θ`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{ensure, Error, Result};
use crate::linalg::{
    hermitian_eig, projection_isometry, projection_residual, psd_power, random_matrix,
    range_projection, seeded_rng, ComplexMatrix,
};

/// Finite operator-valued frame candidate `{A_j}` with `A_j : C^dim_h -> C^dim_ho`.
#[derive(Clone, Debug, PartialEq)]
pub struct OvFrame {
    dim_h: usize,
    dim_ho: usize,
    ops: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

impl OvFrame {
    /// Every block must be `dim_ho x dim_h`; at least one block is required.
    pub fn new(dim_h: usize, dim_ho: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        if dim_h == 0 || dim_ho == 0 {
            return Err(Error::DimensionMismatch(
                "frame dimensions must be positive".into(),
            ));
        }
        if ops.is_empty() {
            return Err(Error::DimensionMismatch("frame has no blocks".into()));
        }
        for (j, op) in ops.iter().enumerate() {
            if op.shape() != (dim_ho, dim_h) {
                return Err(Error::DimensionMismatch(format!(
                    "block {j} is {}x{}, expected {dim_ho}x{dim_h}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        Ok(Self {
            dim_h,
            dim_ho,
            ops,
            labels: None,
        })
    }

    /// Attaches index labels; their count must match the number of blocks.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.ops.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} blocks",
                labels.len(),
                self.ops.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_ho(&self) -> usize {
        self.dim_ho
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn op(&self, j: usize) -> &ComplexMatrix {
        &self.ops[j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `max_j rank(A_j)` at `tol`. Reported only; never enforced.
    pub fn multiplicity(&self, tol: f64) -> usize {
        self.ops
            .iter()
            .map(|a| crate::linalg::numerical_rank(a, tol))
            .max()
            .unwrap_or(0)
    }

    /// Analysis operator: blocks stacked vertically in index order.
    pub fn theta(&self) -> ComplexMatrix {
        ComplexMatrix::vstack(&self.ops)
    }

    /// `Σ_j A_j* A_j`, reduced in index order.
    pub fn frame_operator(&self) -> ComplexMatrix {
        let mut s = ComplexMatrix::zeros(self.dim_h, self.dim_h);
        for a in &self.ops {
            s = &s + &(&a.adjoint() * a);
        }
        s
    }

    /// Blocks multiplied on the right: `{A_j T}`.
    pub fn right_multiply(&self, t: &ComplexMatrix) -> Result<Self> {
        if t.rows() != self.dim_h {
            return Err(Error::DimensionMismatch(format!(
                "right factor has {} rows, frame acts on dimension {}",
                t.rows(),
                self.dim_h
            )));
        }
        let ops = self.ops.iter().map(|a| a * t).collect();
        Self::new(t.cols(), self.dim_ho, ops)
    }

    /// Largest blockwise operator-norm distance.
    pub fn distance(&self, other: &OvFrame) -> f64 {
        if self.ops.len() != other.ops.len()
            || self.dim_h != other.dim_h
            || self.dim_ho != other.dim_ho
        {
            return f64::INFINITY;
        }
        self.ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Classification. When several apply, the first in the order
/// Orthonormal, Parseval, Riesz, Tight, General is reported.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FrameKind {
    NotAFrame,
    General,
    /// Tight with bound `a`.
    Tight(f64),
    Parseval,
    Riesz,
    Orthonormal,
}

impl FrameKind {
    pub fn name(&self) -> &'static str {
        match self {
            FrameKind::NotAFrame => "not_a_frame",
            FrameKind::General => "general",
            FrameKind::Tight(_) => "tight",
            FrameKind::Parseval => "parseval",
            FrameKind::Riesz => "riesz",
            FrameKind::Orthonormal => "orthonormal",
        }
    }

    pub fn is_frame(&self) -> bool {
        !matches!(self, FrameKind::NotAFrame)
    }

    pub fn is_parseval(&self) -> bool {
        matches!(self, FrameKind::Parseval | FrameKind::Orthonormal)
    }
}

/// Cached analysis data of a frame.
#[derive(Clone, Debug)]
pub struct AnalysisBundle {
    pub theta: ComplexMatrix,
    /// Frame operator, summed blockwise.
    pub s: ComplexMatrix,
    /// `None` when the family is not a frame.
    pub s_inv: Option<ComplexMatrix>,
    /// Extreme eigenvalues `(a, b)` of `S`.
    pub bounds: (f64, f64),
    /// `θ S^{-1} θ*`, or the range projection of `θ` when `S` is singular.
    pub projection: ComplexMatrix,
    pub kind: FrameKind,
    pub count: usize,
    pub dim_ho: usize,
    pub residuals: BTreeMap<String, f64>,
}

impl AnalysisBundle {
    pub fn dim_h(&self) -> usize {
        self.theta.cols()
    }

    pub fn dim_k(&self) -> usize {
        self.theta.rows()
    }

    /// `S^{-1}`, or `NotAFrame` when the family is not a frame.
    pub fn s_inverse(&self) -> Result<&ComplexMatrix> {
        self.s_inv.as_ref().ok_or(Error::NotAFrame {
            lower_bound: self.bounds.0,
        })
    }

    /// `I - P`.
    pub fn complement_projection(&self) -> ComplexMatrix {
        &ComplexMatrix::identity(self.dim_k()) - &self.projection
    }

    pub fn block(&self, j: usize) -> ComplexMatrix {
        self.theta
            .block(j * self.dim_ho, 0, self.dim_ho, self.dim_h())
    }
}

/// Computes `θ`, `S`, the bounds, `P` and the classification.
///
/// `NotAFrame` iff `a <= tol * b` (or `S = 0`); `Tight` iff `b - a <= tol * b`;
/// `Parseval` iff `||S - I|| <= tol`; `Riesz` iff `||P - I|| <= tol`.
pub fn analyze(frame: &OvFrame, tol: f64) -> Result<AnalysisBundle> {
    let theta = frame.theta();
    let s = frame.frame_operator().hermitian_part();
    let gram = &theta.adjoint() * &theta;
    let mut residuals = BTreeMap::new();
    residuals.insert("frame_operator".to_string(), (&s - &gram).norm());

    let eig = hermitian_eig(&s, f64::INFINITY)?;
    let (a, b) = (eig.min(), eig.max());
    let n = theta.rows();
    let is_frame = b > 0.0 && a > tol * b;

    let (s_inv, projection) = if is_frame {
        let s_inv = eig
            .map_spectrum(|x| num_complex::Complex64::new(1.0 / x, 0.0))
            .hermitian_part();
        let p = (&(&theta * &s_inv) * &theta.adjoint()).hermitian_part();
        (Some(s_inv), p)
    } else {
        (None, range_projection(&theta, tol))
    };
    residuals.insert("projection".to_string(), projection_residual(&projection));

    let kind = if !is_frame {
        FrameKind::NotAFrame
    } else {
        let parseval = (&s - &ComplexMatrix::identity(frame.dim_h())).norm() <= tol;
        let riesz = (&projection - &ComplexMatrix::identity(n)).norm() <= tol;
        let tight = b - a <= tol * b;
        match (parseval, riesz, tight) {
            (true, true, _) => FrameKind::Orthonormal,
            (true, false, _) => FrameKind::Parseval,
            (false, true, _) => FrameKind::Riesz,
            (false, false, true) => FrameKind::Tight(a),
            _ => FrameKind::General,
        }
    };

    Ok(AnalysisBundle {
        theta,
        s,
        s_inv,
        bounds: (a, b),
        projection,
        kind,
        count: frame.len(),
        dim_ho: frame.dim_ho(),
        residuals,
    })
}

/// Analyzes and rejects families that are not frames.
pub fn analyze_frame(frame: &OvFrame, tol: f64) -> Result<AnalysisBundle> {
    let bundle = analyze(frame, tol)?;
    if !bundle.kind.is_frame() {
        return Err(Error::NotAFrame {
            lower_bound: bundle.bounds.0,
        });
    }
    Ok(bundle)
}

/// Splits a stacked analysis operator back into its `count` blocks.
pub fn reconstruct(theta: &ComplexMatrix, dim_ho: usize, count: usize) -> Result<OvFrame> {
    if dim_ho == 0 || count == 0 || theta.rows() != dim_ho * count {
        return Err(Error::DimensionMismatch(format!(
            "analysis operator has {} rows, expected {count} blocks of {dim_ho}",
            theta.rows()
        )));
    }
    let ops = (0..count)
        .map(|j| theta.block(j * dim_ho, 0, dim_ho, theta.cols()))
        .collect();
    OvFrame::new(theta.cols(), dim_ho, ops)
}

/// `{A_j S^{-1/2}}`, the Parseval frame right-similar to `A`.
pub fn parsevalize(frame: &OvFrame, tol: f64) -> Result<OvFrame> {
    let bundle = analyze_frame(frame, tol)?;
    let root = psd_power(&bundle.s, -0.5, tol * bundle.bounds.1)?;
    let out = frame.right_multiply(&root)?;
    Ok(match frame.labels() {
        Some(l) => out.with_labels(l.to_vec())?,
        None => out,
    })
}

/// Dilation of a frame to a family of isometries with orthogonal ranges.
///
/// With `W = θ S^{-1/2}` (an isometry of `H` onto the range of `P`) and
/// `T = θ S^{-1/2} θ*`, every block factors as `A_j = V_j* T W`.
#[derive(Clone, Debug)]
pub struct Dilation {
    /// `V_j h = e_j ⊗ h`, each `(count·dim_ho) x dim_ho`.
    pub isometries: Vec<ComplexMatrix>,
    /// Positive, invertible on the range of `P`, zero on its complement.
    pub t: ComplexMatrix,
    /// `θ S^{-1/2}`.
    pub embedding: ComplexMatrix,
}

impl Dilation {
    /// `max_j ||A_j - V_j* T W||`.
    pub fn factorization_residual(&self, frame: &OvFrame) -> f64 {
        let tw = &self.t * &self.embedding;
        self.isometries
            .iter()
            .zip(frame.ops())
            .map(|(v, a)| (a - &(&v.adjoint() * &tw)).norm())
            .fold(0.0, f64::max)
    }
}

pub fn dilate(frame: &OvFrame, tol: f64) -> Result<Dilation> {
    let bundle = analyze_frame(frame, tol)?;
    let m = frame.dim_ho();
    let k = bundle.dim_k();
    let isometries = (0..frame.len())
        .map(|j| {
            let mut v = ComplexMatrix::zeros(k, m);
            v.set_block(j * m, 0, &ComplexMatrix::identity(m));
            v
        })
        .collect();
    let root = psd_power(&bundle.s, -0.5, tol * bundle.bounds.1)?;
    let embedding = &bundle.theta * &root;
    let t = (&embedding * &bundle.theta.adjoint()).hermitian_part();
    let dilation = Dilation {
        isometries,
        t,
        embedding,
    };
    ensure(
        "dilation factorization",
        dilation.factorization_residual(frame),
        1e-8 * bundle.bounds.1.sqrt().max(1.0),
    )?;
    Ok(dilation)
}

/// Frame with i.i.d. standard complex normal blocks drawn from `rng`.
pub fn random_frame_with<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    dim_h: usize,
    dim_ho: usize,
) -> OvFrame {
    let ops = (0..count)
        .map(|_| random_matrix(dim_ho, dim_h, rng))
        .collect();
    OvFrame::new(dim_h, dim_ho, ops).expect("shapes are consistent by construction")
}

/// Seeded random frame; a frame almost surely when `count·dim_ho >= dim_h`.
pub fn random_frame(seed: u64, count: usize, dim_h: usize, dim_ho: usize) -> OvFrame {
    random_frame_with(&mut seeded_rng(seed), count, dim_h, dim_ho)
}

/// Parseval frame whose frame projection is the given projection `P` on
/// `C^count ⊗ C^dim_ho`: the blocks are `L_j* W` with `W` an isometry onto the
/// range of `P`. The frame acts on `C^rank(P)`.
pub fn parseval_from_projection(p: &ComplexMatrix, dim_ho: usize, tol: f64) -> Result<OvFrame> {
    if !p.is_square() || dim_ho == 0 || !p.rows().is_multiple_of(dim_ho) {
        return Err(Error::DimensionMismatch(format!(
            "projection of size {}x{} is not compatible with dim_Ho = {dim_ho}",
            p.rows(),
            p.cols()
        )));
    }
    let residual = projection_residual(p);
    if residual > tol.max(1e-9) {
        return Err(Error::NotAProjection { residual });
    }
    let w = projection_isometry(p);
    if w.cols() == 0 {
        return Err(Error::NotAFrame { lower_bound: 0.0 });
    }
    reconstruct(&w, dim_ho, p.rows() / dim_ho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance, seeded_rng, DEFAULT_TOL};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn row(entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(1, entries.len(), entries)
    }

    pub(crate) fn fx1() -> OvFrame {
        OvFrame::new(
            2,
            1,
            vec![
                row(&[1.0, 0.0]),
                row(&[0.0, 1.0]),
                row(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            ],
        )
        .unwrap()
    }

    fn fx2() -> OvFrame {
        OvFrame::new(2, 2, vec![ComplexMatrix::identity(2)]).unwrap()
    }

    fn doubled_scalar() -> OvFrame {
        let h = row(&[FRAC_1_SQRT_2]);
        OvFrame::new(1, 1, vec![h.clone(), h]).unwrap()
    }

    #[test]
    fn analyze_fx1() {
        let b = analyze(&fx1(), DEFAULT_TOL).unwrap();
        let s = ComplexMatrix::from_real(2, 2, &[1.5, 0.5, 0.5, 1.5]);
        assert!(distance(&b.s, &s) < 1e-14);
        assert!((b.bounds.0 - 1.0).abs() < 1e-13);
        assert!((b.bounds.1 - 2.0).abs() < 1e-13);
        assert_eq!(b.kind, FrameKind::General);
        assert!(b.residuals["projection"] < 1e-12);
    }

    #[test]
    fn analyze_fx2_is_orthonormal() {
        let b = analyze(&fx2(), DEFAULT_TOL).unwrap();
        assert_eq!(b.kind, FrameKind::Orthonormal);
        assert!(distance(&b.projection, &ComplexMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn analyze_doubled_scalar_is_parseval() {
        let b = analyze(&doubled_scalar(), DEFAULT_TOL).unwrap();
        assert_eq!(b.kind, FrameKind::Parseval);
        let p = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(distance(&b.projection, &p) < 1e-14);
    }

    #[test]
    fn analyze_detects_tight_and_riesz_and_degenerate() {
        let tight = OvFrame::new(1, 1, vec![row(&[1.0]), row(&[1.0])]).unwrap();
        assert!(matches!(
            analyze(&tight, DEFAULT_TOL).unwrap().kind,
            FrameKind::Tight(a) if (a - 2.0).abs() < 1e-12
        ));
        let riesz = OvFrame::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(2.0)]).unwrap();
        assert_eq!(analyze(&riesz, DEFAULT_TOL).unwrap().kind, FrameKind::Riesz);
        let degenerate = OvFrame::new(2, 1, vec![row(&[1.0, 0.0]), row(&[2.0, 0.0])]).unwrap();
        let b = analyze(&degenerate, DEFAULT_TOL).unwrap();
        assert_eq!(b.kind, FrameKind::NotAFrame);
        assert!(projection_residual(&b.projection) < 1e-12);
        assert!(matches!(
            analyze_frame(&degenerate, DEFAULT_TOL),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn new_rejects_mismatched_block() {
        let err = OvFrame::new(2, 1, vec![row(&[1.0, 0.0]), row(&[1.0])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(ref s) if s.contains("block 1")));
    }

    #[test]
    fn reconstruct_examples() {
        let f = fx1();
        let back = reconstruct(&analyze(&f, DEFAULT_TOL).unwrap().theta, 1, 3).unwrap();
        assert_eq!(back, f);

        let sel = reconstruct(&ComplexMatrix::identity(4), 2, 2).unwrap();
        assert_eq!(sel.op(0), &ComplexMatrix::identity(4).block(0, 0, 2, 4));
        assert_eq!(sel.op(1), &ComplexMatrix::identity(4).block(2, 0, 2, 4));

        let r = random_frame(11, 4, 3, 2);
        let back = reconstruct(&analyze(&r, DEFAULT_TOL).unwrap().theta, 2, 4).unwrap();
        assert_eq!(back.distance(&r), 0.0);

        assert!(reconstruct(&ComplexMatrix::identity(3), 2, 2).is_err());
    }

    #[test]
    fn parsevalize_examples() {
        let p = parsevalize(&fx1(), DEFAULT_TOL).unwrap();
        let s = p.frame_operator();
        assert!(distance(&s, &ComplexMatrix::identity(2)) < 1e-10);
        assert!(analyze(&p, DEFAULT_TOL).unwrap().kind.is_parseval());

        let already = doubled_scalar();
        assert!(
            parsevalize(&already, DEFAULT_TOL)
                .unwrap()
                .distance(&already)
                < 1e-10
        );

        let two = OvFrame::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(2.0)]).unwrap();
        assert!(
            distance(
                parsevalize(&two, DEFAULT_TOL).unwrap().op(0),
                &ComplexMatrix::identity(2)
            ) < 1e-12
        );
    }

    #[test]
    fn dilate_examples() {
        let d = dilate(&fx2(), DEFAULT_TOL).unwrap();
        assert_eq!(d.isometries.len(), 1);
        assert!(distance(&d.isometries[0], &ComplexMatrix::identity(2)) < 1e-15);
        assert!(distance(&d.t, &ComplexMatrix::identity(2)) < 1e-13);

        let d = dilate(&doubled_scalar(), DEFAULT_TOL).unwrap();
        let p = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(distance(&d.t, &p) < 1e-13);

        // T = θ S^{-1/2} θ*, computed independently by hand from S^{-1/2}.
        let f = fx1();
        let d = dilate(&f, DEFAULT_TOL).unwrap();
        let eig = hermitian_eig(&d.t, DEFAULT_TOL).unwrap();
        let mut nonzero: Vec<f64> = eig
            .eigenvalues
            .iter()
            .copied()
            .filter(|x| x.abs() > 1e-9)
            .collect();
        nonzero.sort_by(f64::total_cmp);
        assert_eq!(nonzero.len(), 2);
        assert!((nonzero[0] - 1.0).abs() < 1e-12);
        assert!((nonzero[1] - 2f64.sqrt()).abs() < 1e-12);
        assert!(d.factorization_residual(&f) < 1e-12);

        // isometries have orthogonal ranges spanning the dilation space
        let f = random_frame(5, 3, 2, 2);
        let d = dilate(&f, DEFAULT_TOL).unwrap();
        let mut sum = ComplexMatrix::zeros(6, 6);
        for (i, vi) in d.isometries.iter().enumerate() {
            for (j, vj) in d.isometries.iter().enumerate() {
                let g = &vj.adjoint() * vi;
                let expect = if i == j {
                    ComplexMatrix::identity(2)
                } else {
                    ComplexMatrix::zeros(2, 2)
                };
                assert!(distance(&g, &expect) < 1e-15);
            }
            sum = &sum + &(vi * &vi.adjoint());
        }
        assert!(distance(&sum, &ComplexMatrix::identity(6)) < 1e-15);
    }

    #[test]
    fn vector_frame_quadratic_form() {
        let mut rng = seeded_rng(21);
        for seed in 0..5 {
            let f = random_frame(seed, 6, 4, 1);
            let s = f.frame_operator();
            for _ in 0..100 {
                let x = random_matrix(4, 1, &mut rng);
                let lhs = (&x.adjoint() * &(&s * &x))[(0, 0)].re;
                let rhs: f64 = f.ops().iter().map(|a| (a * &x)[(0, 0)].norm_sqr()).sum();
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn multiframe_unrolling_preserves_frame_operator() {
        let f = random_frame(8, 3, 3, 2);
        let mut vectors = Vec::new();
        for a in f.ops() {
            for m in 0..2 {
                vectors.push(a.block(m, 0, 1, 3));
            }
        }
        let v = OvFrame::new(3, 1, vectors).unwrap();
        assert!(distance(&v.frame_operator(), &f.frame_operator()) < 1e-12);
    }

    #[test]
    fn parseval_from_projection_realizes_projection() {
        let p = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let f = parseval_from_projection(&p, 1, DEFAULT_TOL).unwrap();
        let b = analyze(&f, DEFAULT_TOL).unwrap();
        assert!(b.kind.is_parseval());
        assert!(distance(&b.projection, &p) < 1e-13);
    }
}
