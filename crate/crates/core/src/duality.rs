//! Dual frames, the parametrization of duals, direct sums, disjointness and
//! strong complements.

use std::collections::BTreeMap;

use crate::calculus::FrameParameter;
use crate::error::{ensure, Error, Result};
use crate::frames::{analyze, analyze_frame, reconstruct, OvFrame};
use crate::linalg::{projection_isometry, range_isometry, ComplexMatrix};

fn check_same_shape(a: &OvFrame, b: &OvFrame) -> Result<()> {
    if a.len() != b.len() || a.dim_ho() != b.dim_ho() || a.dim_h() != b.dim_h() {
        return Err(Error::DimensionMismatch(format!(
            "dual pair must share shape: {} blocks of {}x{} vs {} blocks of {}x{}",
            a.len(),
            a.dim_ho(),
            a.dim_h(),
            b.len(),
            b.dim_ho(),
            b.dim_h()
        )));
    }
    Ok(())
}

/// `max(||θ_B* θ_A - I||, ||θ_A* θ_B - I||)`; symmetric in its arguments.
pub fn dual_residual(a: &OvFrame, b: &OvFrame) -> Result<f64> {
    check_same_shape(a, b)?;
    let (ta, tb) = (a.theta(), b.theta());
    let id = ComplexMatrix::identity(a.dim_h());
    let ab = (&(&tb.adjoint() * &ta) - &id).norm();
    let ba = (&(&ta.adjoint() * &tb) - &id).norm();
    Ok(ab.max(ba))
}

/// True iff `θ_B* θ_A = I` within `tol`.
pub fn is_dual(a: &OvFrame, b: &OvFrame, tol: f64) -> Result<bool> {
    Ok(dual_residual(a, b)? <= tol)
}

/// `{A_j S_A^{-1}}`.
pub fn canonical_dual(a: &OvFrame, tol: f64) -> Result<OvFrame> {
    let bundle = analyze_frame(a, tol)?;
    a.right_multiply(bundle.s_inverse()?)
}

/// Outcome of building a dual from a parameter.
#[derive(Clone, Debug)]
pub enum DualOutcome {
    Accepted(OvFrame),
    /// `residual = ||P_A M P_A - θ_A S_A^{-2} θ_A*||`, or the invertibility
    /// margin when the corner condition holds but `M*M` is singular on the
    /// range of `P_A`.
    Rejected {
        residual: f64,
    },
}

impl DualOutcome {
    pub fn frame(&self) -> Option<&OvFrame> {
        match self {
            DualOutcome::Accepted(f) => Some(f),
            DualOutcome::Rejected { .. } => None,
        }
    }
}

/// Dual of `A` with parameter `M`: accepted iff the compression of `M` to the
/// range of `P_A` equals `θ_A S_A^{-2} θ_A*`.
///
/// `M` must satisfy `M = M P_A`; otherwise `InvalidParameter` is returned.
pub fn dual_from_parameter(a: &OvFrame, m: &ComplexMatrix, tol: f64) -> Result<DualOutcome> {
    let bundle = analyze_frame(a, tol)?;
    let k = bundle.dim_k();
    if m.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "parameter must be {k}x{k}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let p = &bundle.projection;
    let support = (m - &(m * p)).norm();
    if support > tol * m.residual_scale() {
        return Err(Error::InvalidParameter {
            reason: "M differs from M P_A".into(),
            residual: support,
        });
    }
    let s_inv = bundle.s_inverse()?;
    let target = &(&(&bundle.theta * s_inv) * s_inv) * &bundle.theta.adjoint();
    let residual = (&(&(p * m) * p) - &target).norm();
    if residual > tol * target.residual_scale() {
        return Ok(DualOutcome::Rejected { residual });
    }
    let param = match FrameParameter::new(m.clone(), bundle, tol) {
        Ok(p) => p,
        Err(Error::InvalidParameter { residual, .. }) => {
            return Ok(DualOutcome::Rejected { residual })
        }
        Err(e) => return Err(e),
    };
    let dual = param.frame()?;
    ensure("dual from parameter", dual_residual(a, &dual)?, 1e-8)?;
    Ok(DualOutcome::Accepted(dual))
}

/// Relation between two frames sharing `|J|` and `H_o`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisjointnessKind {
    NotDisjoint,
    Disjoint,
    StronglyDisjoint,
    StronglyComplementary,
}

impl DisjointnessKind {
    pub fn name(&self) -> &'static str {
        match self {
            DisjointnessKind::NotDisjoint => "not_disjoint",
            DisjointnessKind::Disjoint => "disjoint",
            DisjointnessKind::StronglyDisjoint => "strongly_disjoint",
            DisjointnessKind::StronglyComplementary => "strongly_complementary",
        }
    }
}

#[derive(Clone, Debug)]
pub struct DisjointnessVerdict {
    pub kind: DisjointnessKind,
    /// `complement_sum = ||P_A + P_B - I||`, `projection_product = ||P_A P_B||`,
    /// `cross_gram = ||θ_A* θ_B|| / (||θ_A|| ||θ_B||)`, `direct_sum_lower_bound`
    /// the lower frame bound of the direct sum over its upper bound.
    pub residuals: BTreeMap<String, f64>,
}

/// `{[A_j | B_j]}` on `H_A ⊕ H_B` and the strongest relation that holds.
///
/// The direct sum is returned whenever it is a frame.
pub fn direct_sum(
    a: &OvFrame,
    b: &OvFrame,
    tol: f64,
) -> Result<(Option<OvFrame>, DisjointnessVerdict)> {
    if a.len() != b.len() || a.dim_ho() != b.dim_ho() {
        return Err(Error::DimensionMismatch(format!(
            "direct sum needs equal index sets and ranges: {} blocks into C^{} vs {} blocks into C^{}",
            a.len(),
            a.dim_ho(),
            b.len(),
            b.dim_ho()
        )));
    }
    let ba = analyze_frame(a, tol)?;
    let bb = analyze_frame(b, tol)?;
    let ops: Vec<ComplexMatrix> = a
        .ops()
        .iter()
        .zip(b.ops())
        .map(|(x, y)| ComplexMatrix::hstack(&[x.clone(), y.clone()]))
        .collect();
    let sum = OvFrame::new(a.dim_h() + b.dim_h(), a.dim_ho(), ops)?;
    let bs = analyze(&sum, tol)?;

    let k = ba.dim_k();
    let complement_sum = (&(&ba.projection + &bb.projection) - &ComplexMatrix::identity(k)).norm();
    let projection_product = (&ba.projection * &bb.projection).norm();
    let cross_gram = (&ba.theta.adjoint() * &bb.theta).norm()
        / (ba.theta.norm() * bb.theta.norm()).max(f64::MIN_POSITIVE);
    let lower = if bs.bounds.1 > 0.0 {
        bs.bounds.0.max(0.0) / bs.bounds.1
    } else {
        0.0
    };
    let mut residuals = BTreeMap::new();
    residuals.insert("complement_sum".to_string(), complement_sum);
    residuals.insert("projection_product".to_string(), projection_product);
    residuals.insert("cross_gram".to_string(), cross_gram);
    residuals.insert("direct_sum_lower_bound".to_string(), lower);

    let kind = if complement_sum <= tol {
        DisjointnessKind::StronglyComplementary
    } else if cross_gram <= tol {
        DisjointnessKind::StronglyDisjoint
    } else if bs.kind.is_frame() {
        DisjointnessKind::Disjoint
    } else {
        DisjointnessKind::NotDisjoint
    };

    if ba.kind.is_parseval() && bb.kind.is_parseval() && cross_gram <= tol {
        let id = ComplexMatrix::identity(sum.dim_h());
        ensure(
            "direct sum of orthogonal Parseval frames is Parseval",
            (&bs.s - &id).norm(),
            10.0 * tol.max(1e-9),
        )?;
    }
    let frame = bs.kind.is_frame().then_some(sum);
    Ok((frame, DisjointnessVerdict { kind, residuals }))
}

/// Strong complement `{L_j* T}` of `A`, realized on the range of `T`: the
/// blocks are the block rows of `T W_T`, with `W_T` an isometry onto that range.
///
/// `T` must be positive, supported under `P_A^⊥` and defaults to `P_A^⊥`, which
/// gives the Parseval complement.
pub fn strong_complement(a: &OvFrame, t: Option<&ComplexMatrix>, tol: f64) -> Result<OvFrame> {
    let bundle = analyze_frame(a, tol)?;
    let perp = bundle.complement_projection();
    let k = bundle.dim_k();
    if projection_isometry(&perp).cols() == 0 {
        return Err(Error::NoComplement);
    }
    let t = match t {
        Some(t) => {
            if t.shape() != (k, k) {
                return Err(Error::DimensionMismatch(format!(
                    "complement operator must be {k}x{k}, got {}x{}",
                    t.rows(),
                    t.cols()
                )));
            }
            let outside = (t - &(&(&perp * t) * &perp)).norm();
            if outside > tol * t.residual_scale() {
                return Err(Error::InvalidParameter {
                    reason: "T is not supported under the complement of P_A".into(),
                    residual: outside,
                });
            }
            let eig = crate::linalg::hermitian_eig(t, tol * t.residual_scale())?;
            if eig.min() < -tol * t.residual_scale() {
                return Err(Error::NotPositive {
                    min_eigenvalue: eig.min(),
                });
            }
            t.clone()
        }
        None => perp,
    };
    let w = range_isometry(&t, tol);
    if w.cols() == 0 {
        return Err(Error::NoComplement);
    }
    reconstruct(&(&t * &w), a.dim_ho(), a.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::{parsevalize, random_frame, FrameKind};
    use crate::linalg::{distance, seeded_random_matrix, DEFAULT_TOL};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn fx1() -> OvFrame {
        OvFrame::new(
            2,
            1,
            vec![
                ComplexMatrix::from_real(1, 2, &[1.0, 0.0]),
                ComplexMatrix::from_real(1, 2, &[0.0, 1.0]),
                ComplexMatrix::from_real(1, 2, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            ],
        )
        .unwrap()
    }

    fn fx2() -> OvFrame {
        OvFrame::new(2, 2, vec![ComplexMatrix::identity(2)]).unwrap()
    }

    fn doubled_scalar() -> OvFrame {
        let h = ComplexMatrix::from_real(1, 1, &[FRAC_1_SQRT_2]);
        OvFrame::new(1, 1, vec![h.clone(), h]).unwrap()
    }

    fn q1_frame() -> OvFrame {
        let q1 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p = ComplexMatrix::identity(4).kron(&q1);
        crate::frames::parseval_from_projection(&p, 2, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn is_dual_examples() {
        let a = random_frame(1, 4, 3, 2);
        let d = canonical_dual(&a, DEFAULT_TOL).unwrap();
        assert!(is_dual(&a, &d, DEFAULT_TOL).unwrap());
        assert_eq!(
            dual_residual(&a, &d).unwrap(),
            dual_residual(&d, &a).unwrap()
        );
        assert!(is_dual(&fx2(), &fx2(), DEFAULT_TOL).unwrap());

        // distinct Parseval frames are never dual to each other
        let pa = parsevalize(&a, DEFAULT_TOL).unwrap();
        let u = crate::linalg::random_unitary(8, &mut crate::linalg::seeded_rng(3));
        let p = analyze(&pa, DEFAULT_TOL).unwrap().projection;
        let pb = crate::calculus::phi_inverse(&pa, &(&u * &p), DEFAULT_TOL).unwrap();
        assert!(pa.distance(&pb) > 1e-3);
        assert!(!is_dual(&pa, &pb, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn canonical_dual_examples() {
        let p = doubled_scalar();
        assert!(canonical_dual(&p, DEFAULT_TOL).unwrap().distance(&p) < 1e-14);

        let inv = ComplexMatrix::from_real(2, 2, &[0.75, -0.25, -0.25, 0.75]);
        let d = canonical_dual(&fx1(), DEFAULT_TOL).unwrap();
        for (dj, aj) in d.ops().iter().zip(fx1().ops()) {
            assert!(distance(dj, &(aj * &inv)) < 1e-13);
        }
        let s_inv = analyze(&fx1(), DEFAULT_TOL).unwrap().s_inv.unwrap();
        assert!(distance(&d.frame_operator(), &s_inv) < 1e-13);

        let two = OvFrame::new(2, 2, vec![ComplexMatrix::identity(2).scale_real(2.0)]).unwrap();
        let d = canonical_dual(&two, DEFAULT_TOL).unwrap();
        assert!(distance(d.op(0), &ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn canonical_dual_is_an_involution() {
        let a = random_frame(2, 5, 3, 2);
        let dd = canonical_dual(&canonical_dual(&a, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
        assert!(dd.distance(&a) < 1e-9);
    }

    #[test]
    fn dual_from_parameter_examples() {
        let a = random_frame(4, 4, 3, 2);
        let b = analyze(&a, DEFAULT_TOL).unwrap();
        let s_inv = b.s_inv.clone().unwrap();
        let canonical_m = &(&(&b.theta * &s_inv) * &s_inv) * &b.theta.adjoint();
        let out = dual_from_parameter(&a, &canonical_m, DEFAULT_TOL).unwrap();
        let canon = canonical_dual(&a, DEFAULT_TOL).unwrap();
        assert!(out.frame().unwrap().distance(&canon) < 1e-10);

        // perturb the compressed corner
        let x = seeded_random_matrix(8, 8, 44);
        let pxp = &(&b.projection * &x) * &b.projection;
        let perturbed = &canonical_m + &pxp.scale_real(0.1);
        match dual_from_parameter(&a, &perturbed, DEFAULT_TOL).unwrap() {
            DualOutcome::Rejected { residual } => {
                assert!((residual - 0.1 * pxp.norm()).abs() < 1e-9)
            }
            DualOutcome::Accepted(_) => panic!("perturbed parameter accepted"),
        }
    }

    #[test]
    fn lower_triangular_left_factor_gives_alternate_duals() {
        let a = q1_frame();
        let p = analyze(&a, DEFAULT_TOL).unwrap().projection;
        for lambda in [1.0, -1.0, 3.0] {
            let r = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, lambda, 1.0]);
            let m = &ComplexMatrix::identity(4).kron(&r) * &p;
            let dual = dual_from_parameter(&a, &m, DEFAULT_TOL).unwrap();
            let dual = dual.frame().expect("accepted");
            assert!(is_dual(&a, dual, DEFAULT_TOL).unwrap());
            for (bj, aj) in dual.ops().iter().zip(a.ops()) {
                assert!(distance(bj, &(&r * aj)) < 1e-13);
            }
            assert!(dual.distance(&canonical_dual(&a, DEFAULT_TOL).unwrap()) > 0.5);
        }
    }

    #[test]
    fn right_similar_duals_coincide() {
        let a = random_frame(5, 3, 2, 2);
        let b1 = canonical_dual(&a, DEFAULT_TOL).unwrap();
        // B1 T is a dual of A only when θ_A* θ_B1 T = T = I
        let t = crate::linalg::seeded_random_matrix(2, 2, 50);
        let b2 = b1.right_multiply(&t).unwrap();
        assert!(!is_dual(&a, &b2, DEFAULT_TOL).unwrap());
        let b3 = b1.right_multiply(&ComplexMatrix::identity(2)).unwrap();
        assert!(is_dual(&a, &b3, DEFAULT_TOL).unwrap());
        assert!(b1.distance(&b3) < 1e-8);
    }

    #[test]
    fn riesz_frames_have_a_unique_dual() {
        let a = random_frame(6, 2, 4, 2);
        let b = analyze(&a, DEFAULT_TOL).unwrap();
        assert_eq!(b.kind, FrameKind::Riesz);
        let s_inv = b.s_inv.clone().unwrap();
        let canonical_m = &(&(&b.theta * &s_inv) * &s_inv) * &b.theta.adjoint();
        let x = seeded_random_matrix(4, 4, 61).scale_real(0.01);
        match dual_from_parameter(&a, &(&canonical_m + &x), DEFAULT_TOL).unwrap() {
            DualOutcome::Rejected { .. } => {}
            DualOutcome::Accepted(_) => panic!("Riesz frame accepted a second dual"),
        }
    }

    #[test]
    fn direct_sum_examples() {
        let (_, v) = direct_sum(&fx2(), &fx2(), DEFAULT_TOL).unwrap();
        assert_eq!(v.kind, DisjointnessKind::NotDisjoint);

        let a = parsevalize(&random_frame(7, 3, 2, 2), DEFAULT_TOL).unwrap();
        let c = strong_complement(&a, None, DEFAULT_TOL).unwrap();
        let (sum, v) = direct_sum(&a, &c, DEFAULT_TOL).unwrap();
        assert_eq!(v.kind, DisjointnessKind::StronglyComplementary);
        let sb = analyze(&sum.unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(sb.kind, FrameKind::Orthonormal);

        // block-diagonal projections P, Q with PQ = 0, P + Q != I
        let p = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let q = ComplexMatrix::diag_real(&[0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let fa = crate::frames::parseval_from_projection(&p, 2, DEFAULT_TOL).unwrap();
        let fb = crate::frames::parseval_from_projection(&q, 2, DEFAULT_TOL).unwrap();
        let (sum, v) = direct_sum(&fa, &fb, DEFAULT_TOL).unwrap();
        assert_eq!(v.kind, DisjointnessKind::StronglyDisjoint);
        assert!(analyze(&sum.unwrap(), DEFAULT_TOL)
            .unwrap()
            .kind
            .is_parseval());

        // generic vector frames in C^3 on a 1-dim space: disjoint but not orthogonal
        let ga = random_frame(8, 3, 1, 1);
        let gb = random_frame(9, 3, 1, 1);
        let (_, v) = direct_sum(&ga, &gb, DEFAULT_TOL).unwrap();
        assert_eq!(v.kind, DisjointnessKind::Disjoint);
    }

    #[test]
    fn strong_complement_examples() {
        assert!(matches!(
            strong_complement(&fx2(), None, DEFAULT_TOL),
            Err(Error::NoComplement)
        ));

        let a = doubled_scalar();
        let c = strong_complement(&a, None, DEFAULT_TOL).unwrap();
        let pa = analyze(&a, DEFAULT_TOL).unwrap().projection;
        let pc = analyze(&c, DEFAULT_TOL).unwrap().projection;
        assert!(distance(&pc, &(&ComplexMatrix::identity(2) - &pa)) < 1e-13);
        let (sum, _) = direct_sum(&a, &c, DEFAULT_TOL).unwrap();
        assert!(distance(&sum.unwrap().frame_operator(), &ComplexMatrix::identity(2)) < 1e-13);

        let perp = &ComplexMatrix::identity(2) - &pa;
        let scaled = strong_complement(&a, Some(&perp.scale_real(2.0)), DEFAULT_TOL).unwrap();
        assert!(
            distance(
                &scaled.frame_operator(),
                &ComplexMatrix::identity(1).scale_real(4.0)
            ) < 1e-12
        );
    }
}
