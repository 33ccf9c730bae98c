//! The parametrization `Φ_A(B) = θ_B S_A^{-1} θ_A*` of all frames by operators
//! `M` with `M = M P_A` and `M*M` invertible on the range of `P_A`, together
//! with right/left similarity and composition.

use std::collections::BTreeMap;

use crate::error::{ensure, Error, Result};
use crate::frames::{analyze_frame, reconstruct, AnalysisBundle, OvFrame};
use crate::linalg::{
    least_squares, min_eigenvalue_on_range, polar_partial_isometry, projection_isometry,
    singular_values, unitarity_residual, ComplexMatrix,
};

/// An element `M` of the parameter set of a base frame `A`.
#[derive(Clone, Debug)]
pub struct FrameParameter {
    pub m: ComplexMatrix,
    pub base: AnalysisBundle,
}

impl FrameParameter {
    /// Validates `M` against the base frame.
    pub fn new(m: ComplexMatrix, base: AnalysisBundle, tol: f64) -> Result<Self> {
        let p = Self { m, base };
        p.validate(tol)?;
        Ok(p)
    }

    /// Checks `M = M P_A` (relative to `max(1, ||M||)`) and that the smallest
    /// eigenvalue of `P_A M*M P_A` on the range of `P_A` exceeds `tol * ||M||^2`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let k = self.base.dim_k();
        if self.m.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "parameter must be {k}x{k}, got {}x{}",
                self.m.rows(),
                self.m.cols()
            )));
        }
        let p = &self.base.projection;
        let support = (&self.m - &(&self.m * p)).norm();
        if support > tol * self.m.residual_scale() {
            return Err(Error::InvalidParameter {
                reason: "M differs from M P_A".into(),
                residual: support,
            });
        }
        let gram = &self.m.adjoint() * &self.m;
        let min = min_eigenvalue_on_range(&gram, p, tol)?;
        let norm = self.m.norm();
        if min.partial_cmp(&(tol * norm * norm)) != Some(std::cmp::Ordering::Greater) || norm == 0.0
        {
            return Err(Error::InvalidParameter {
                reason: "M*M is not invertible on the range of P_A".into(),
                residual: min,
            });
        }
        Ok(())
    }

    /// `V_M = M (M*M)^{-1/2}`; implements the equivalence of `P_A` and `P_B`.
    pub fn partial_isometry(&self, tol: f64) -> ComplexMatrix {
        polar_partial_isometry(&self.m, tol)
    }

    /// Frame recovered from the parameter: blocks of `M θ_A`.
    pub fn frame(&self) -> Result<OvFrame> {
        reconstruct(
            &(&self.m * &self.base.theta),
            self.base.dim_ho,
            self.base.count,
        )
    }
}

fn same_shape(a: &OvFrame, b: &OvFrame) -> Result<()> {
    if a.len() != b.len() || a.dim_ho() != b.dim_ho() || a.dim_h() != b.dim_h() {
        return Err(Error::DimensionMismatch(format!(
            "frames differ in shape: {} blocks of {}x{} vs {} blocks of {}x{}",
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

/// `Φ_A(B) = θ_B S_A^{-1} θ_A*`.
pub fn phi(a: &OvFrame, b: &OvFrame, tol: f64) -> Result<FrameParameter> {
    same_shape(a, b)?;
    let base = analyze_frame(a, tol)?;
    analyze_frame(b, tol)?;
    let m = &(&b.theta() * base.s_inverse()?) * &base.theta.adjoint();
    FrameParameter::new(m, base, tol)
}

/// `Φ_A^{-1}(M)`: the frame whose blocks are the block rows of `M θ_A`.
pub fn phi_inverse(a: &OvFrame, m: &ComplexMatrix, tol: f64) -> Result<OvFrame> {
    let base = analyze_frame(a, tol)?;
    let param = FrameParameter::new(m.clone(), base, tol)?;
    param.frame()
}

/// Outcome of a similarity test.
#[derive(Clone, Debug)]
pub struct SimilarityReport {
    /// `T` with `B_j = A_j T`, when the frames are right-similar.
    pub right: Option<ComplexMatrix>,
    /// For left multiplication by `R`: whether `{R A_j}` is also right-similar to `A`.
    pub left_right_ok: bool,
    /// Named residuals. Names ending in `_min_singular` are lower bounds; the
    /// rest are relative residuals that vanish when the condition holds.
    pub diagnostics: BTreeMap<String, f64>,
}

/// Right similarity `B_j = A_j T`. Exists iff `P_A = P_B`, in which case
/// `T = S_A^{-1} θ_A* θ_B` is unique.
pub fn right_similarity(a: &OvFrame, b: &OvFrame, tol: f64) -> Result<SimilarityReport> {
    same_shape(a, b)?;
    let ba = analyze_frame(a, tol)?;
    let bb = analyze_frame(b, tol)?;
    let mut diagnostics = BTreeMap::new();
    let gap = (&ba.projection - &bb.projection).norm();
    diagnostics.insert("projection_distance".to_string(), gap);
    if gap > tol {
        return Ok(SimilarityReport {
            right: None,
            left_right_ok: false,
            diagnostics,
        });
    }
    let t = &(ba.s_inverse()? * &ba.theta.adjoint()) * &bb.theta;
    let recon = a
        .ops()
        .iter()
        .zip(b.ops())
        .map(|(aj, bj)| (bj - &(aj * &t)).norm() / bj.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    diagnostics.insert("reconstruction".to_string(), recon);
    let lsq = least_squares(&ba.theta, &bb.theta, tol)?;
    diagnostics.insert(
        "least_squares_agreement".to_string(),
        (&lsq - &t).norm() / t.norm().max(1.0),
    );
    if ba.kind.is_parseval() && bb.kind.is_parseval() {
        let u = unitarity_residual(&t);
        diagnostics.insert("unitarity".to_string(), u);
        ensure(
            "right similarity of Parseval frames is unitary",
            u,
            tol.max(1e-9) * 10.0,
        )?;
    }
    ensure(
        "right similarity reconstruction",
        recon,
        tol.max(1e-9) * 10.0,
    )?;
    Ok(SimilarityReport {
        right: Some(t),
        left_right_ok: true,
        diagnostics,
    })
}

fn check_invertible(r: &ComplexMatrix, dim_ho: usize, tol: f64) -> Result<()> {
    if r.shape() != (dim_ho, dim_ho) {
        return Err(Error::DimensionMismatch(format!(
            "left factor must be {dim_ho}x{dim_ho}, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    let sv = singular_values(r)?;
    let (max, min) = (sv[0], *sv.last().unwrap_or(&0.0));
    if min.partial_cmp(&(tol * max)) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::SingularR { min_singular: min });
    }
    Ok(())
}

/// Result of left multiplication by an invertible `R`.
#[derive(Clone, Debug)]
pub struct LeftProduct {
    pub frame: OvFrame,
    pub bundle: AnalysisBundle,
    pub diagnostics: BTreeMap<String, f64>,
}

/// `{R A_j}`. Asserts `θ_B = (I ⊗ R) θ_A`, `S_B = θ_A*(I ⊗ R*R)θ_A`, the bound
/// bracket `a/||R^{-1}||^2 <= S_B <= b ||R||^2` and `rank P_B = rank P_A`.
pub fn left_multiply(a: &OvFrame, r: &ComplexMatrix, tol: f64) -> Result<LeftProduct> {
    check_invertible(r, a.dim_ho(), tol)?;
    let ba = analyze_frame(a, tol)?;
    let ops = a.ops().iter().map(|aj| r * aj).collect();
    let frame = OvFrame::new(a.dim_h(), a.dim_ho(), ops)?;
    let bundle = analyze_frame(&frame, tol)?;

    let lifted = ComplexMatrix::identity(a.len()).kron(r);
    let scale = ba.bounds.1.max(1.0) * r.norm().powi(2).max(1.0);
    let mut diagnostics = BTreeMap::new();
    let theta_res = (&bundle.theta - &(&lifted * &ba.theta)).norm();
    let s_expected = &(&ba.theta.adjoint() * &(&lifted.adjoint() * &lifted)) * &ba.theta;
    let s_res = (&bundle.s - &s_expected).norm();
    let sv = singular_values(r)?;
    let (r_norm, r_inv_norm) = (sv[0], 1.0 / sv[sv.len() - 1]);
    let lower = ba.bounds.0 / (r_inv_norm * r_inv_norm);
    let upper = ba.bounds.1 * r_norm * r_norm;
    let bracket = (lower - bundle.bounds.0)
        .max(bundle.bounds.1 - upper)
        .max(0.0);
    let rank_a = projection_isometry(&ba.projection).cols();
    let rank_b = projection_isometry(&bundle.projection).cols();
    diagnostics.insert("theta".to_string(), theta_res);
    diagnostics.insert("frame_operator".to_string(), s_res);
    diagnostics.insert("bounds_bracket".to_string(), bracket);
    diagnostics.insert(
        "rank_difference".to_string(),
        rank_a.abs_diff(rank_b) as f64,
    );

    ensure("left product analysis operator", theta_res, 1e-9 * scale)?;
    ensure("left product frame operator", s_res, 1e-9 * scale)?;
    ensure("left product frame bounds", bracket, 1e-9 * scale)?;
    ensure(
        "left product projection rank",
        rank_a.abs_diff(rank_b) as f64,
        0.0,
    )?;
    Ok(LeftProduct {
        frame,
        bundle,
        diagnostics,
    })
}

/// Relative residuals of the conditions under which `{R A_j}` is also
/// right-similar to `A`.
///
/// Recorded conditions: `ii_corner` and `ii_min_singular` (compression of
/// `I ⊗ R` to the range of `P_A` is block upper triangular and invertible),
/// `iii_forward`/`iii_inverse` (`P_A^⊥ (I ⊗ R^{±1}) P_A = 0`),
/// `iv_forward`/`iv_inverse` (`R^{±1} A_i = A_i S^{-1} Σ_j A_j* R^{±1} A_j`),
/// and for unitary `R` also `vi_commutation` (`I ⊗ R` commutes with `P_A`)
/// and `vii_commutation` (`R` commutes with every `A_j S^{-1} A_i*`).
/// `left_right_ok` follows the two `iii` residuals.
pub fn left_right_compatible(a: &OvFrame, r: &ComplexMatrix, tol: f64) -> Result<SimilarityReport> {
    check_invertible(r, a.dim_ho(), tol)?;
    let ba = analyze_frame(a, tol)?;
    let s_inv = ba.s_inverse()?;
    let r_inv = least_squares(r, &ComplexMatrix::identity(r.rows()), 0.0)?;
    let n = a.len();
    let lifted = ComplexMatrix::identity(n).kron(r);
    let lifted_inv = ComplexMatrix::identity(n).kron(&r_inv);
    let p = &ba.projection;
    let p_perp = ba.complement_projection();
    let r_norm = r.norm();
    let r_inv_norm = r_inv.norm();
    let a_norm = a
        .ops()
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut d = BTreeMap::new();
    let corner = (&(&p_perp * &lifted) * p).norm() / r_norm;
    let corner_inv = (&(&p_perp * &lifted_inv) * p).norm() / r_inv_norm;
    let w = projection_isometry(p);
    let compressed = &(&w.adjoint() * &lifted) * &w;
    let min_sv = *singular_values(&compressed)?.last().unwrap_or(&0.0) / r_norm;
    d.insert("ii_corner".to_string(), corner);
    d.insert("ii_min_singular".to_string(), min_sv);
    d.insert("iii_forward".to_string(), corner);
    d.insert("iii_inverse".to_string(), corner_inv);

    let eq_residual = |x: &ComplexMatrix, x_norm: f64| -> f64 {
        let mut sum = ComplexMatrix::zeros(a.dim_h(), a.dim_h());
        for aj in a.ops() {
            sum = &sum + &(&(&aj.adjoint() * x) * aj);
        }
        let right = s_inv * &sum;
        a.ops()
            .iter()
            .map(|ai| (&(x * ai) - &(ai * &right)).norm())
            .fold(0.0, f64::max)
            / (x_norm * a_norm)
    };
    d.insert("iv_forward".to_string(), eq_residual(r, r_norm));
    d.insert("iv_inverse".to_string(), eq_residual(&r_inv, r_inv_norm));

    let unitary = unitarity_residual(r) <= tol;
    if unitary {
        let comm = (&(&lifted * p) - &(p * &lifted)).norm();
        d.insert("vi_commutation".to_string(), comm);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = f64::MIN_POSITIVE;
        for ai in a.ops() {
            for aj in a.ops() {
                let x = &(aj * s_inv) * &ai.adjoint();
                scale = scale.max(x.norm());
                worst = worst.max((&(r * &x) - &(&x * r)).norm());
            }
        }
        d.insert("vii_commutation".to_string(), worst / scale);
    }

    let left_right_ok = corner <= tol && corner_inv <= tol;
    let right = if left_right_ok {
        let b = OvFrame::new(
            a.dim_h(),
            a.dim_ho(),
            a.ops().iter().map(|x| r * x).collect(),
        )?;
        right_similarity(a, &b, tol)?.right
    } else {
        None
    };
    Ok(SimilarityReport {
        right,
        left_right_ok,
        diagnostics: d,
    })
}

impl SimilarityReport {
    /// Pass/fail of each recorded equivalent condition of left/right
    /// compatibility, at `tol`. `ii` needs both a vanishing corner and a
    /// compression bounded below.
    pub fn condition_verdicts(&self, tol: f64) -> BTreeMap<&'static str, bool> {
        let g = |k: &str| self.diagnostics.get(k).copied();
        let mut out = BTreeMap::new();
        if let (Some(c), Some(s)) = (g("ii_corner"), g("ii_min_singular")) {
            out.insert("ii", c <= tol && s > tol);
        }
        if let (Some(x), Some(y)) = (g("iii_forward"), g("iii_inverse")) {
            out.insert("iii", x <= tol && y <= tol);
        }
        if let (Some(x), Some(y)) = (g("iv_forward"), g("iv_inverse")) {
            out.insert("iv", x <= tol && y <= tol);
        }
        if let Some(x) = g("vi_commutation") {
            out.insert("vi", x <= tol);
        }
        if let Some(x) = g("vii_commutation") {
            out.insert("vii", x <= tol);
        }
        out
    }

    /// True when every recorded condition has the same verdict.
    pub fn conditions_agree(&self, tol: f64) -> bool {
        let v = self.condition_verdicts(tol);
        v.values().all(|&x| x) || v.values().all(|&x| !x)
    }
}

/// Composition `C_(j,m) = B_m A_j`, ordered with `j` outer and `m` inner so that
/// `θ_C = (I_J ⊗ θ_B) θ_A`.
pub fn compose(a: &OvFrame, b: &OvFrame, _tol: f64) -> Result<OvFrame> {
    if b.dim_h() != a.dim_ho() {
        return Err(Error::DimensionMismatch(format!(
            "inner frame acts on dimension {}, outer frame maps into {}",
            b.dim_h(),
            a.dim_ho()
        )));
    }
    let mut ops = Vec::with_capacity(a.len() * b.len());
    for aj in a.ops() {
        for bm in b.ops() {
            ops.push(bm * aj);
        }
    }
    let mut c = OvFrame::new(a.dim_h(), b.dim_ho(), ops)?;
    if let (Some(la), Some(lb)) = (a.labels(), b.labels()) {
        let labels = la
            .iter()
            .flat_map(|x| lb.iter().map(move |y| format!("({x},{y})")))
            .collect();
        c = c.with_labels(labels)?;
    }

    let theta_a = a.theta();
    let lifted = ComplexMatrix::identity(a.len()).kron(&b.theta());
    let theta_c = c.theta();
    let scale = theta_a.norm().max(1.0) * lifted.norm().max(1.0);
    ensure(
        "composed analysis operator",
        (&theta_c - &(&lifted * &theta_a)).norm(),
        1e-9 * scale,
    )?;
    let s_b = ComplexMatrix::identity(a.len()).kron(&b.frame_operator());
    let s_expected = &(&theta_a.adjoint() * &s_b) * &theta_a;
    ensure(
        "composed frame operator",
        (&c.frame_operator() - &s_expected).norm(),
        1e-9 * scale * scale,
    )?;
    Ok(c)
}

/// Vector frame `{B_m A_j}` obtained by composing with a frame of functionals
/// on `H_o`.
pub fn decompose_multiframe(a: &OvFrame, basis_rows: &OvFrame, tol: f64) -> Result<OvFrame> {
    if basis_rows.dim_ho() != 1 || basis_rows.dim_h() != a.dim_ho() {
        return Err(Error::DimensionMismatch(format!(
            "functionals must be 1x{}, got {}x{}",
            a.dim_ho(),
            basis_rows.dim_ho(),
            basis_rows.dim_h()
        )));
    }
    compose(a, basis_rows, tol)
}

/// Standard basis functionals `e_m*` on `C^n`.
pub fn standard_functionals(n: usize) -> OvFrame {
    let id = ComplexMatrix::identity(n);
    OvFrame::new(n, 1, (0..n).map(|m| id.block(m, 0, 1, n)).collect()).expect("positive dimension")
}
