//! Norm-continuous paths between frame generators of one representation.
//!
//! Parseval generators `A`, `B` are joined along a unitary geodesic in the
//! algebra `ℛ(G) ⊗ B(H_o)`: with `V_B = θ_B θ_A*` and a partial isometry `Z`
//! carrying `P_A^⊥` onto `P_B^⊥`, the operator `U = V_B + Z` is unitary and
//! `B(t) = L_e* exp(itH) P_A θ_A` with `H` the principal logarithm of `U`.
//! General generators first travel to their Parsevalizations along
//! `A S_A^{-u/2}`, `u ∈ [0, 1]`.
//!
//! Only the finite-multiplicity case is realized. Paths through Cuntz
//! isometries or along a diffuse center need `dim H_o = ∞` or a non-atomic
//! center, neither of which exists for matrices.

use crate::error::{Error, Result};
use crate::groups::{
    algebra_membership_residual, central_projections, generator_bound_ratio, intertwiner,
    orbit_blocks, orbit_frame_operator, parseval_generator_residual, random_algebra_projection,
    random_algebra_unitary, subrep_from_projection, FiniteGroup, GroupRep, ParametrizeOutcome,
};
use crate::linalg::{
    distance, hermitian_eig, seeded_rng, unitarity_residual, unitary_log, ComplexMatrix,
    EigDecomposition, C64,
};

/// Added to every step budget to absorb rounding.
const STEP_SLACK: f64 = 1e-9;
const ENDPOINT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub generator: ComplexMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathMeta {
    pub seed: u64,
    pub n_samples: usize,
    pub max_step: f64,
    /// Bound on `||dB/dt||`; adjacent samples may differ by at most
    /// `lipschitz * Δt`.
    pub lipschitz: f64,
    /// `||H||` of the Parseval leg.
    pub log_norm: f64,
    /// Samples are checked as Parseval generators when set, as generators otherwise.
    pub parseval: bool,
    /// `max_t ||V(t)* V(t) - P_A||` over the Parseval leg.
    pub initial_projection_drift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FramePath {
    pub samples: Vec<PathSample>,
    pub start: ComplexMatrix,
    pub end: ComplexMatrix,
    pub endpoint_ids: (String, String),
    pub meta: PathMeta,
}

impl FramePath {
    pub fn with_endpoint_ids(mut self, start: impl Into<String>, end: impl Into<String>) -> Self {
        self.endpoint_ids = (start.into(), end.into());
        self
    }
}

fn max_adjacent_step(samples: &[PathSample]) -> f64 {
    samples
        .windows(2)
        .map(|w| distance(&w[0].generator, &w[1].generator))
        .fold(0.0, f64::max)
}

fn check_shapes(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rep: &GroupRep,
    n_samples: usize,
) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::DimensionMismatch(
            "a path needs at least one step".into(),
        ));
    }
    if a.cols() != rep.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator has {} columns, representation has dimension {}",
            a.cols(),
            rep.dim()
        )));
    }
    if a.shape() != b.shape() {
        return Err(Error::NotSameRep(format!(
            "generators are {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `s ↦ L_e* exp(isH) θ_A` for a Parseval generator `A`.
struct Geodesic {
    eig: EigDecomposition,
    /// Rows of the eigenvector matrix in the identity block.
    q_e: ComplexMatrix,
    /// `Q* θ_A`.
    q_theta: ComplexMatrix,
    p_a: ComplexMatrix,
    log_norm: f64,
}

impl Geodesic {
    fn new(
        a: &ComplexMatrix,
        b: &ComplexMatrix,
        rep: &GroupRep,
        seed: u64,
        tol: f64,
    ) -> Result<Self> {
        for x in [a, b] {
            let residual = parseval_generator_residual(x, rep);
            if residual > tol {
                return Err(Error::NotParseval { residual });
            }
        }
        let group = rep.group();
        let mult = a.rows();
        let theta_a = ComplexMatrix::vstack(&orbit_blocks(a, rep));
        let theta_b = ComplexMatrix::vstack(&orbit_blocks(b, rep));
        let p_a = (&theta_a * &theta_a.adjoint()).hermitian_part();
        let p_b = (&theta_b * &theta_b.adjoint()).hermitian_part();
        let v_b = &theta_b * &theta_a.adjoint();
        let initial = distance(&(&v_b.adjoint() * &v_b), &p_a);
        let member = algebra_membership_residual(&v_b, group, mult)?;
        if initial > ENDPOINT_TOL || member > tol.max(1e-9) {
            return Err(Error::NotSameRep(format!(
                "θ_B θ_A* is not a partial isometry in the algebra (initial {initial:.3e}, membership {member:.3e})"
            )));
        }
        let ctx = central_projections(group, mult, seed, tol)
            .map_err(|e| Error::AlgebraFailure(format!("central decomposition: {e}")))?;
        let k = ctx.dim();
        let id = ComplexMatrix::identity(k);
        let z = intertwiner(&(&id - &p_a), &(&id - &p_b), &ctx, seed, tol)
            .map_err(|e| Error::AlgebraFailure(format!("complement intertwiner: {e}")))?;
        let u = &v_b + &z;
        let ures = unitarity_residual(&u);
        if ures > ENDPOINT_TOL {
            return Err(Error::AlgebraFailure(format!(
                "completed operator is not unitary (residual {ures:.3e})"
            )));
        }
        let h = unitary_log(&u, ENDPOINT_TOL)?;
        let log_norm = h.norm();
        let eig = hermitian_eig(&h, f64::INFINITY)?;
        let q = &eig.eigenvectors;
        let e = group.identity() * mult;
        let q_e = q.block(e, 0, mult, k);
        let q_theta = &q.adjoint() * &theta_a;
        Ok(Self {
            eig,
            q_e,
            q_theta,
            p_a,
            log_norm,
        })
    }

    fn phases(&self, s: f64) -> Vec<C64> {
        self.eig
            .eigenvalues
            .iter()
            .map(|&x| C64::from_polar(1.0, s * x))
            .collect()
    }

    fn generator_at(&self, s: f64) -> ComplexMatrix {
        let mut scaled = self.q_e.clone();
        for (j, ph) in self.phases(s).into_iter().enumerate() {
            for i in 0..scaled.rows() {
                scaled[(i, j)] *= ph;
            }
        }
        &scaled * &self.q_theta
    }

    /// `||V(s)* V(s) - P_A||` with `V(s) = exp(isH) P_A`.
    fn drift_at(&self, s: f64) -> f64 {
        let v = &self.eig.map_spectrum(|x| C64::from_polar(1.0, s * x)) * &self.p_a;
        distance(&(&v.adjoint() * &v), &self.p_a)
    }
}

fn grid(n_samples: usize) -> impl Iterator<Item = f64> {
    (0..=n_samples).map(move |i| i as f64 / n_samples as f64)
}

/// Geodesic path between two Parseval generators of `rep`.
pub fn connect_parseval(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rep: &GroupRep,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<FramePath> {
    check_shapes(a, b, rep, n_samples)?;
    let geo = Geodesic::new(a, b, rep, seed, tol)?;
    let mut samples = Vec::with_capacity(n_samples + 1);
    let mut drift: f64 = 0.0;
    for t in grid(n_samples) {
        drift = drift.max(geo.drift_at(t));
        let generator = if t == 0.0 {
            a.clone()
        } else {
            geo.generator_at(t)
        };
        samples.push(PathSample { t, generator });
    }
    let max_step = max_adjacent_step(&samples);
    Ok(FramePath {
        samples,
        start: a.clone(),
        end: b.clone(),
        endpoint_ids: ("start".into(), "end".into()),
        meta: PathMeta {
            seed,
            n_samples,
            max_step,
            lipschitz: geo.log_norm,
            log_norm: geo.log_norm,
            parseval: true,
            initial_projection_drift: drift,
        },
    })
}

/// `u ↦ A S^{-u/2}`, `u ∈ [0, 1]`, for a generator with orbit frame operator `S`.
struct PositiveLeg {
    a: ComplexMatrix,
    eig: EigDecomposition,
    /// Bound on the derivative in `u`.
    speed: f64,
}

impl PositiveLeg {
    fn new(a: &ComplexMatrix, rep: &GroupRep, tol: f64) -> Result<Self> {
        let ratio = generator_bound_ratio(a, rep);
        if ratio <= tol {
            return Err(Error::NotAFrame { lower_bound: ratio });
        }
        let eig = hermitian_eig(&orbit_frame_operator(a, rep), f64::INFINITY)?;
        let lo = eig.min();
        let log_norm = lo.ln().abs().max(eig.max().ln().abs());
        let speed = 0.5 * a.norm() * lo.powf(-0.5).max(1.0) * log_norm;
        Ok(Self {
            a: a.clone(),
            eig,
            speed,
        })
    }

    fn at(&self, u: f64) -> ComplexMatrix {
        &self.a * &self.eig.map_spectrum(|x| C64::new(x.powf(-0.5 * u), 0.0))
    }
}

/// Three-leg path between generators of `rep`: out to the Parsevalization of
/// `A` on `[0, 1/3]`, along the geodesic on `[1/3, 2/3]`, back from the
/// Parsevalization of `B` on `[2/3, 1]`.
pub fn connect_general(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rep: &GroupRep,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<FramePath> {
    check_shapes(a, b, rep, n_samples)?;
    let leg_a = PositiveLeg::new(a, rep, tol)?;
    let leg_b = PositiveLeg::new(b, rep, tol)?;
    let a_hat = leg_a.at(1.0);
    let b_hat = leg_b.at(1.0);
    let geo = Geodesic::new(&a_hat, &b_hat, rep, seed, tol)?;
    let mut samples = Vec::with_capacity(n_samples + 1);
    let mut drift: f64 = 0.0;
    for t in grid(n_samples) {
        let generator = if t == 0.0 {
            a.clone()
        } else if 3.0 * t <= 1.0 {
            leg_a.at(3.0 * t)
        } else if 3.0 * t <= 2.0 {
            let s = 3.0 * t - 1.0;
            drift = drift.max(geo.drift_at(s));
            geo.generator_at(s)
        } else {
            leg_b.at(3.0 * (1.0 - t))
        };
        samples.push(PathSample { t, generator });
    }
    let max_step = max_adjacent_step(&samples);
    let lipschitz = (3.0 * leg_a.speed)
        .max(3.0 * leg_b.speed)
        .max(3.0 * geo.log_norm);
    Ok(FramePath {
        samples,
        start: a.clone(),
        end: b.clone(),
        endpoint_ids: ("start".into(), "end".into()),
        meta: PathMeta {
            seed,
            n_samples,
            max_step,
            lipschitz,
            log_norm: geo.log_norm,
            parseval: false,
            initial_projection_drift: drift,
        },
    })
}

/// Outcome of re-checking a path; `ok` is the conjunction of all checks.
#[derive(Clone, Debug, PartialEq)]
pub struct PathReport {
    pub ok: bool,
    pub sample_count: usize,
    /// Indices of samples failing the (Parseval) generator check.
    pub generator_failures: Vec<usize>,
    pub max_parseval_residual: f64,
    pub min_bound_ratio: f64,
    /// `||samples[0] - start||`; must be exactly zero.
    pub start_residual: f64,
    pub end_residual: f64,
    /// Indices `i` with `t_{i+1} <= t_i`, or `t` outside `[0, 1]`.
    pub monotonicity_failures: Vec<usize>,
    pub max_step: f64,
    /// Indices `i` with `||B_{i+1} - B_i|| > L (t_{i+1} - t_i) + slack`.
    pub step_violations: Vec<usize>,
}

impl PathReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.generator_failures.is_empty() {
            out.push(format!(
                "generator check fails at samples {:?}",
                self.generator_failures
            ));
        }
        if self.start_residual != 0.0 {
            out.push(format!(
                "first sample differs from start by {:.3e}",
                self.start_residual
            ));
        }
        if self.end_residual > ENDPOINT_TOL {
            out.push(format!(
                "last sample differs from end by {:.3e}",
                self.end_residual
            ));
        }
        if !self.monotonicity_failures.is_empty() {
            out.push(format!(
                "t not increasing at {:?}",
                self.monotonicity_failures
            ));
        }
        if !self.step_violations.is_empty() {
            out.push(format!(
                "step budget exceeded at {:?}",
                self.step_violations
            ));
        }
        out
    }
}

pub fn verify_path(path: &FramePath, rep: &GroupRep, tol: f64) -> PathReport {
    let samples = &path.samples;
    let mut generator_failures = Vec::new();
    let mut max_parseval_residual: f64 = 0.0;
    let mut min_bound_ratio = f64::INFINITY;
    for (i, s) in samples.iter().enumerate() {
        if s.generator.cols() != rep.dim() {
            generator_failures.push(i);
            continue;
        }
        let pres = parseval_generator_residual(&s.generator, rep);
        let ratio = generator_bound_ratio(&s.generator, rep);
        max_parseval_residual = max_parseval_residual.max(pres);
        min_bound_ratio = min_bound_ratio.min(ratio);
        let pass = if path.meta.parseval {
            pres <= tol
        } else {
            ratio > tol
        };
        if !pass {
            generator_failures.push(i);
        }
    }
    let endpoint = |x: Option<&PathSample>, target: &ComplexMatrix| match x {
        Some(s) if s.generator.shape() == target.shape() => distance(&s.generator, target),
        _ => f64::INFINITY,
    };
    let start_residual = endpoint(samples.first(), &path.start);
    let end_residual = endpoint(samples.last(), &path.end) / path.end.residual_scale();

    let mut monotonicity_failures = Vec::new();
    if samples.first().map(|s| s.t) != Some(0.0) {
        monotonicity_failures.push(0);
    }
    for (i, w) in samples.windows(2).enumerate() {
        if w[1].t <= w[0].t || w[1].t > 1.0 {
            monotonicity_failures.push(i);
        }
    }
    if samples.last().map(|s| s.t) != Some(1.0) {
        monotonicity_failures.push(samples.len().saturating_sub(1));
    }

    let mut step_violations = Vec::new();
    let mut max_step: f64 = 0.0;
    for (i, w) in samples.windows(2).enumerate() {
        if w[0].generator.shape() != w[1].generator.shape() {
            step_violations.push(i);
            continue;
        }
        let step = distance(&w[0].generator, &w[1].generator);
        max_step = max_step.max(step);
        let budget = path.meta.lipschitz * (w[1].t - w[0].t).abs() + STEP_SLACK;
        if step > budget {
            step_violations.push(i);
        }
    }

    let mut report = PathReport {
        ok: false,
        sample_count: samples.len(),
        generator_failures,
        max_parseval_residual,
        min_bound_ratio,
        start_residual,
        end_residual,
        monotonicity_failures,
        max_step,
        step_violations,
    };
    report.ok = report.failures().is_empty() && !samples.is_empty();
    report
}

/// Seeded pair of Parseval generators for one subrepresentation of
/// `λ ⊗ I_mult` whose frame projections are distinct but equivalent.
///
/// `P_A` is a random projection in the algebra, `P_B = W P_A W*` for a random
/// unitary `W` in the algebra, and `B = L_e* V θ_A` for an intertwiner `V`
/// from `P_A` to `P_B`.
#[derive(Clone, Debug)]
pub struct GeneratorPair {
    pub rep: GroupRep,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

pub fn seeded_parseval_pair(
    group: &FiniteGroup,
    mult: usize,
    seed: u64,
    tol: f64,
) -> Result<GeneratorPair> {
    let mut rng = seeded_rng(seed);
    let p_a = random_algebra_projection(group, mult, &mut rng);
    let w = random_algebra_unitary(group, mult, &mut rng);
    let p_b = (&(&w * &p_a) * &w.adjoint()).hermitian_part();
    let sub = subrep_from_projection(group, mult, &p_a, tol)?;
    let ctx = central_projections(group, mult, seed, tol)?;
    let v = intertwiner(&p_a, &p_b, &ctx, seed, tol)?;
    match crate::groups::generator_parametrize(&sub.generator, &sub.rep, &v, tol)? {
        ParametrizeOutcome::Accepted { generator, .. } => Ok(GeneratorPair {
            rep: sub.rep,
            a: sub.generator,
            b: generator,
        }),
        ParametrizeOutcome::Rejected { residual } => Err(Error::NotInAlgebra { residual }),
    }
}

/// Seeded non-Parseval pair `R_1 A T_1`, `R_2 B T_2` from a Parseval pair, with
/// `R_i` invertible on `H_o` and `T_i = θ_A* (I + X_i* X_i) θ_A` positive
/// invertible in `π(G)'`.
pub fn seeded_general_pair(
    group: &FiniteGroup,
    mult: usize,
    seed: u64,
    tol: f64,
) -> Result<GeneratorPair> {
    let pair = seeded_parseval_pair(group, mult, seed, tol)?;
    let mut rng = seeded_rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let theta = ComplexMatrix::vstack(&orbit_blocks(&pair.a, &pair.rep));
    let k = theta.rows();
    let mut skew = |x: &ComplexMatrix| {
        let r = &ComplexMatrix::identity(mult)
            + &crate::linalg::random_matrix(mult, mult, &mut rng).scale_real(0.3);
        let y = crate::groups::random_algebra_element(group, mult, &mut rng).scale_real(0.3);
        let pos = &ComplexMatrix::identity(k) + &(&y.adjoint() * &y);
        let t = (&(&theta.adjoint() * &pos) * &theta).hermitian_part();
        &(&r * x) * &t
    };
    let a = skew(&pair.a);
    let b = skew(&pair.b);
    Ok(GeneratorPair {
        rep: pair.rep,
        a,
        b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::regular_reps;
    use crate::linalg::DEFAULT_TOL;

    fn z2_fixture() -> (GroupRep, ComplexMatrix, ComplexMatrix) {
        let (l, _) = regular_reps(&FiniteGroup::cyclic(2));
        (
            l,
            ComplexMatrix::from_real(1, 2, &[1.0, 0.0]),
            ComplexMatrix::from_real(1, 2, &[0.0, 1.0]),
        )
    }

    #[test]
    fn z2_path_matches_closed_form() {
        let (rep, a, b) = z2_fixture();
        let path = connect_parseval(&a, &b, &rep, 256, 0, DEFAULT_TOL).unwrap();
        for s in &path.samples {
            let w = C64::from_polar(1.0, std::f64::consts::PI * s.t);
            let one = C64::new(1.0, 0.0);
            let expect = ComplexMatrix::new(1, 2, vec![(one + w) * 0.5, (one - w) * 0.5]).unwrap();
            assert!(distance(&s.generator, &expect) < 1e-10, "t = {}", s.t);
        }
        let mid = &path.samples[128].generator;
        assert!((mid[(0, 0)].norm() - mid[(0, 1)].norm()).abs() < 1e-12);
        assert!((path.meta.log_norm - std::f64::consts::PI).abs() < 1e-10);
        let report = verify_path(&path, &rep, 1e-9);
        assert!(report.ok, "{:?}", report.failures());
        assert!(path.meta.initial_projection_drift < 1e-9);
    }

    #[test]
    fn identical_endpoints_give_a_constant_path() {
        let (rep, a, _) = z2_fixture();
        let path = connect_parseval(&a, &a, &rep, 16, 0, DEFAULT_TOL).unwrap();
        assert!(path.meta.max_step < 1e-12);
    }

    #[test]
    fn z3_equivalent_projections() {
        let g = FiniteGroup::cyclic(3);
        let pair = seeded_parseval_pair(&g, 2, 4, DEFAULT_TOL).unwrap();
        let path = connect_parseval(&pair.a, &pair.b, &pair.rep, 256, 4, DEFAULT_TOL).unwrap();
        let report = verify_path(&path, &pair.rep, DEFAULT_TOL);
        assert!(report.ok, "{:?}", report.failures());
        assert!(report.end_residual <= 1e-8);
        assert!(path.meta.max_step <= 0.05);
        assert!(path.meta.max_step * 256.0 <= std::f64::consts::PI * path.meta.log_norm + 0.01);
        assert!(path.meta.initial_projection_drift < 1e-9);
    }

    #[test]
    fn endpoints_do_not_depend_on_the_seed() {
        let g = FiniteGroup::symmetric3();
        let pair = seeded_parseval_pair(&g, 2, 1, DEFAULT_TOL).unwrap();
        let p1 = connect_parseval(&pair.a, &pair.b, &pair.rep, 32, 10, DEFAULT_TOL).unwrap();
        let p2 = connect_parseval(&pair.a, &pair.b, &pair.rep, 32, 11, DEFAULT_TOL).unwrap();
        assert_eq!(p1.samples[0], p2.samples[0]);
        let (e1, e2) = (&p1.samples[32].generator, &p2.samples[32].generator);
        assert!(distance(e1, &pair.b) < 1e-8 && distance(e2, &pair.b) < 1e-8);
    }

    #[test]
    fn non_parseval_inputs_are_rejected_by_the_parseval_path() {
        let (rep, a, b) = z2_fixture();
        let a2 = a.scale_real(2.0);
        assert!(matches!(
            connect_parseval(&a2, &b, &rep, 8, 0, DEFAULT_TOL),
            Err(Error::NotParseval { .. })
        ));
    }

    #[test]
    fn general_path_with_equal_endpoints() {
        let g = FiniteGroup::cyclic(3);
        let pair = seeded_general_pair(&g, 2, 2, DEFAULT_TOL).unwrap();
        let path = connect_general(&pair.a, &pair.a, &pair.rep, 30, 0, DEFAULT_TOL).unwrap();
        assert_eq!(path.samples[0].generator, pair.a);
        assert!(distance(&path.samples[30].generator, &pair.a) < 1e-12);
        // outward and return legs mirror each other
        assert!(distance(&path.samples[5].generator, &path.samples[25].generator) < 1e-10);
        assert!(verify_path(&path, &pair.rep, DEFAULT_TOL).ok);
    }

    #[test]
    fn general_path_from_parseval_to_positive_multiple() {
        let g = FiniteGroup::symmetric3();
        let pair = seeded_parseval_pair(&g, 2, 3, DEFAULT_TOL).unwrap();
        let theta = ComplexMatrix::vstack(&orbit_blocks(&pair.a, &pair.rep));
        let mut rng = seeded_rng(30);
        let y = crate::groups::random_algebra_element(&g, 2, &mut rng);
        let pos = &ComplexMatrix::identity(12) + &(&y.adjoint() * &y);
        let t = (&(&theta.adjoint() * &pos) * &theta).hermitian_part();
        let b = &pair.a * &t;
        let path = connect_general(&pair.a, &b, &pair.rep, 30, 0, DEFAULT_TOL).unwrap();
        // the first leg and the geodesic are constant
        for s in &path.samples[..=20] {
            assert!(distance(&s.generator, &pair.a) < 1e-9);
        }
        let report = verify_path(&path, &pair.rep, DEFAULT_TOL);
        assert!(report.ok, "{:?}", report.failures());
    }

    #[test]
    fn general_path_on_s3() {
        let g = FiniteGroup::symmetric3();
        let pair = seeded_general_pair(&g, 2, 5, DEFAULT_TOL).unwrap();
        assert!(parseval_generator_residual(&pair.a, &pair.rep) > 1e-3);
        let path = connect_general(&pair.a, &pair.b, &pair.rep, 300, 5, DEFAULT_TOL).unwrap();
        let report = verify_path(&path, &pair.rep, DEFAULT_TOL);
        assert!(report.ok, "{:?}", report.failures());
        assert_eq!(report.sample_count, 301);
    }

    #[test]
    fn injected_fault_is_located() {
        let (rep, a, b) = z2_fixture();
        let mut path = connect_parseval(&a, &b, &rep, 16, 0, DEFAULT_TOL).unwrap();
        path.samples[7].generator = ComplexMatrix::zeros(1, 2);
        let report = verify_path(&path, &rep, DEFAULT_TOL);
        assert!(!report.ok);
        assert_eq!(report.generator_failures, vec![7]);
    }

    #[test]
    fn shuffled_times_fail_monotonicity() {
        let (rep, a, b) = z2_fixture();
        let mut path = connect_parseval(&a, &b, &rep, 16, 0, DEFAULT_TOL).unwrap();
        let t3 = path.samples[3].t;
        path.samples[3].t = path.samples[9].t;
        path.samples[9].t = t3;
        let report = verify_path(&path, &rep, DEFAULT_TOL);
        assert!(!report.ok);
        assert!(!report.monotonicity_failures.is_empty());
    }
}
