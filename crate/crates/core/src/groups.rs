//! Finite groups, unitary representations, frame generators and the algebra
//! `ℛ(G) ⊗ B(H_o)` (the commutant of `λ ⊗ I`) with its central decomposition,
//! trace slice map and projection equivalence.
//!
//! Conventions: `λ_g χ_h = χ_{gh}` and `ρ_g χ_h = χ_{h g^{-1}}`, so that `λ` and
//! `ρ` commute exactly. Elements are indices `0..order`; group-indexed frames
//! are ordered by index. The analysis space is `C^|G| ⊗ C^mult` with the group
//! factor outermost, so `L_g` selects block row `g`.

use std::collections::BTreeMap;

use rand::Rng;

use crate::calculus::FrameParameter;
use crate::error::{ensure, Error, Result};
use crate::frames::{analyze, AnalysisBundle, OvFrame};
use crate::linalg::{
    complex_normal, hermitian_eig, least_squares, polar_partial_isometry, projection_isometry,
    projection_residual, random_matrix, range_isometry, seeded_rng, unitarity_residual,
    ComplexMatrix, C64,
};

const FULL_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 100_000;
const MAX_ATTEMPTS: usize = 10;

/// Group given by its Cayley table, `cayley[g][h] = g·h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    cayley: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates that the table is a Latin square with an identity and is
    /// associative (all triples up to order 64, a seeded sample above).
    pub fn new(cayley: Vec<Vec<usize>>, name: impl Into<String>) -> Result<Self> {
        let n = cayley.len();
        if n == 0 {
            return Err(Error::InvalidCayleyTable("empty table".into()));
        }
        for (g, row) in cayley.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {g} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if !is_permutation(row.iter().copied(), n) {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {g} is not a permutation of 0..{n}"
                )));
            }
        }
        for h in 0..n {
            if !is_permutation(cayley.iter().map(|row| row[h]), n) {
                return Err(Error::InvalidCayleyTable(format!(
                    "column {h} is not a permutation of 0..{n}"
                )));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| cayley[e][g] == g && cayley[g][e] == g))
            .ok_or_else(|| Error::InvalidCayleyTable("no two-sided identity".into()))?;
        let assoc =
            |a: usize, b: usize, c: usize| cayley[cayley[a][b]][c] == cayley[a][cayley[b][c]];
        if n <= FULL_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::InvalidCayleyTable(format!(
                                "not associative at ({a}, {b}, {c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut rng = seeded_rng(n as u64);
            for _ in 0..SAMPLED_TRIPLES {
                let (a, b, c) = (
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                    rng.random_range(0..n),
                );
                if !assoc(a, b, c) {
                    return Err(Error::InvalidCayleyTable(format!(
                        "not associative at ({a}, {b}, {c})"
                    )));
                }
            }
        }
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| cayley[g][h] == identity)
                    .expect("Latin square")
            })
            .collect();
        Ok(Self {
            name: name.into(),
            cayley,
            identity,
            inverse,
        })
    }

    /// `Z_n`, element `k` standing for the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::new(table, format!("Z{n}")).expect("cyclic table is valid")
    }

    /// Dihedral group of order `2n`: element `f·n + a` stands for `r^a s^f`, with
    /// `(r^a s^f)(r^b s^g) = r^{a + (-1)^f b} s^{f+g}`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0, "dihedral group of order 0");
        let idx = |a: usize, f: usize| f * n + a;
        let mut table = vec![vec![0; 2 * n]; 2 * n];
        for f in 0..2 {
            for a in 0..n {
                for g in 0..2 {
                    for b in 0..n {
                        let rot = if f == 0 { (a + b) % n } else { (a + n - b) % n };
                        table[idx(a, f)][idx(b, g)] = idx(rot, (f + g) % 2);
                    }
                }
            }
        }
        Self::new(table, format!("D{n}")).expect("dihedral table is valid")
    }

    /// Permutations of three points in lexicographic order, composed as maps:
    /// `(στ)(i) = σ(τ(i))`.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let find = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|s| {
                perms
                    .iter()
                    .map(|t| find([s[t[0]], s[t[1]], s[t[2]]]))
                    .collect()
            })
            .collect();
        Self::new(table, "S3").expect("S3 table is valid")
    }

    /// Quaternion group: element `2u + s` stands for `(-1)^s q_u` with
    /// `q_0..q_3 = 1, i, j, k`.
    pub fn quaternion() -> Self {
        // unit products q_a q_b = sign * q_c
        let unit: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let mut table = vec![vec![0; 8]; 8];
        for x in 0..8 {
            for y in 0..8 {
                let (c, s) = unit[x / 2][y / 2];
                table[x][y] = 2 * c + (s + x % 2 + y % 2) % 2;
            }
        }
        Self::new(table, "Q8").expect("quaternion table is valid")
    }

    /// Built-in fixture by name: `Z<n>`, `D<n>`, `S3`, `Q8`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "S3" => Some(Self::symmetric3()),
            "Q8" => Some(Self::quaternion()),
            _ => {
                let (head, tail) = (name.get(..1)?, name.get(1..)?);
                let n: usize = tail.parse().ok().filter(|&n| n > 0)?;
                match head {
                    "Z" => Some(Self::cyclic(n)),
                    "D" => Some(Self::dihedral(n)),
                    _ => None,
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.cayley.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.cayley[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn cayley(&self) -> &[Vec<usize>] {
        &self.cayley
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|g| (0..n).all(|h| self.mul(g, h) == self.mul(h, g)))
    }

    /// Conjugacy classes, each sorted, listed by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let n = self.order();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if seen[g] {
                continue;
            }
            let mut class: Vec<usize> = (0..n)
                .map(|h| self.mul(self.mul(h, g), self.inv(h)))
                .collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            classes.push(class);
        }
        classes
    }
}

fn is_permutation(items: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    for x in items {
        if x >= n || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// Unitary representation `g ↦ π_g` on `C^dim`.
#[derive(Clone, Debug)]
pub struct GroupRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
}

impl GroupRep {
    /// Checks `π_e = I`, unitarity and `π_g π_h = π_{gh}`, all within `tol`.
    pub fn new(group: FiniteGroup, matrices: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let dim = matrices[0].rows();
        for (g, m) in matrices.iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "matrix {g} is {}x{}, expected {dim}x{dim}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let rep = Self {
            group,
            dim,
            matrices,
        };
        let id = (&rep.matrices[rep.group.identity()] - &ComplexMatrix::identity(dim)).norm();
        if id > tol {
            return Err(Error::NotARepresentation {
                reason: "identity does not act trivially".into(),
                residual: id,
            });
        }
        let unit = rep
            .matrices
            .iter()
            .map(unitarity_residual)
            .fold(0.0, f64::max);
        if unit > tol {
            return Err(Error::NotARepresentation {
                reason: "matrices are not unitary".into(),
                residual: unit,
            });
        }
        let hom = rep.homomorphism_residual();
        if hom > tol {
            return Err(Error::NotARepresentation {
                reason: "matrices do not respect the group law".into(),
                residual: hom,
            });
        }
        Ok(rep)
    }

    /// `g ↦ I_dim`.
    pub fn trivial(group: FiniteGroup, dim: usize) -> Self {
        let matrices = vec![ComplexMatrix::identity(dim); group.order()];
        Self {
            group,
            dim,
            matrices,
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    /// `max_{g,h} ||π_g π_h - π_{gh}||`.
    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.group.order();
        let mut worst: f64 = 0.0;
        for g in 0..n {
            for h in 0..n {
                let prod = &self.matrices[g] * &self.matrices[h];
                worst = worst.max((&prod - &self.matrices[self.group.mul(g, h)]).norm());
            }
        }
        worst
    }

    /// `max_g ||T π_g - π_g T||`, relative to `max(1, ||T||)`.
    pub fn commutant_residual(&self, t: &ComplexMatrix) -> f64 {
        self.matrices
            .iter()
            .map(|p| (&(t * p) - &(p * t)).norm())
            .fold(0.0, f64::max)
            / t.residual_scale()
    }

    /// Distance from `T` to `span{π_g}`, which is `π(G)''` for a finite group,
    /// relative to `max(1, ||T||)`.
    pub fn double_commutant_residual(&self, t: &ComplexMatrix) -> Result<f64> {
        let d = self.dim;
        let n = self.group.order();
        let basis = ComplexMatrix::from_fn(d * d, n, |r, g| self.matrices[g][(r / d, r % d)]);
        let target = ComplexMatrix::from_fn(d * d, 1, |r, _| t[(r / d, r % d)]);
        let coeffs = least_squares(&basis, &target, 1e-12)?;
        let fitted = &basis * &coeffs;
        Ok((&fitted - &target).fro_norm() / t.residual_scale())
    }
}

/// Left and right regular representations as permutation matrices.
pub fn regular_reps(group: &FiniteGroup) -> (GroupRep, GroupRep) {
    let n = group.order();
    let one = C64::new(1.0, 0.0);
    let perm = |f: &dyn Fn(usize) -> usize| {
        let mut m = ComplexMatrix::zeros(n, n);
        for h in 0..n {
            m[(f(h), h)] = one;
        }
        m
    };
    let lambda = (0..n).map(|g| perm(&|h| group.mul(g, h))).collect();
    let rho = (0..n)
        .map(|g| perm(&|h| group.mul(h, group.inv(g))))
        .collect();
    (
        GroupRep {
            group: group.clone(),
            dim: n,
            matrices: lambda,
        },
        GroupRep {
            group: group.clone(),
            dim: n,
            matrices: rho,
        },
    )
}

/// `λ ⊗ I_mult`, the left regular representation with multiplicity.
pub fn tensor_rep(group: &FiniteGroup, mult: usize) -> GroupRep {
    assert!(mult > 0, "multiplicity must be positive");
    let (lambda, _) = regular_reps(group);
    let id = ComplexMatrix::identity(mult);
    GroupRep {
        group: group.clone(),
        dim: group.order() * mult,
        matrices: lambda.matrices.iter().map(|m| m.kron(&id)).collect(),
    }
}

/// `A π_{g^{-1}}` for every `g`, in index order.
pub fn orbit_blocks(a: &ComplexMatrix, rep: &GroupRep) -> Vec<ComplexMatrix> {
    let g = rep.group();
    (0..g.order()).map(|x| a * rep.matrix(g.inv(x))).collect()
}

/// Orbit frame operator `Σ_g π_g A*A π_{g^{-1}}`.
pub fn orbit_frame_operator(a: &ComplexMatrix, rep: &GroupRep) -> ComplexMatrix {
    let ata = &a.adjoint() * a;
    let g = rep.group();
    let mut s = ComplexMatrix::zeros(rep.dim(), rep.dim());
    for x in 0..g.order() {
        s = &s + &(&(rep.matrix(x) * &ata) * rep.matrix(g.inv(x)));
    }
    s.hermitian_part()
}

/// `||S - I||` for the orbit frame operator of `A`.
pub fn parseval_generator_residual(a: &ComplexMatrix, rep: &GroupRep) -> f64 {
    (&orbit_frame_operator(a, rep) - &ComplexMatrix::identity(rep.dim())).norm()
}

/// Lower over upper orbit frame bound; zero when `A` is not a generator.
pub fn generator_bound_ratio(a: &ComplexMatrix, rep: &GroupRep) -> f64 {
    let s = orbit_frame_operator(a, rep);
    match hermitian_eig(&s, f64::INFINITY) {
        Ok(e) if e.max() > 0.0 => e.min().max(0.0) / e.max(),
        _ => 0.0,
    }
}

/// True iff the orbit of `A` is a frame: lower bound above `tol` times upper.
pub fn is_frame_generator(a: &ComplexMatrix, rep: &GroupRep, tol: f64) -> bool {
    a.cols() == rep.dim() && generator_bound_ratio(a, rep) > tol
}

/// True iff the orbit of `A` is a Parseval frame within `tol`.
pub fn is_parseval_generator(a: &ComplexMatrix, rep: &GroupRep, tol: f64) -> bool {
    a.cols() == rep.dim() && parseval_generator_residual(a, rep) <= tol
}

/// Orbit frame of a generator with its analysis and the structural residuals
/// `intertwining` (`θ π_g = (λ_g ⊗ I) θ`), `frame_operator_commutant`
/// (`S ∈ π(G)'`) and `projection_commutation` (`P` commutes with `λ_g ⊗ I`).
#[derive(Clone, Debug)]
pub struct GeneratorOrbit {
    pub frame: OvFrame,
    pub bundle: AnalysisBundle,
    pub residuals: BTreeMap<String, f64>,
}

pub fn generator_orbit(a: &ComplexMatrix, rep: &GroupRep, tol: f64) -> Result<GeneratorOrbit> {
    if a.cols() != rep.dim() {
        return Err(Error::DimensionMismatch(format!(
            "generator has {} columns, representation has dimension {}",
            a.cols(),
            rep.dim()
        )));
    }
    let frame = OvFrame::new(rep.dim(), a.rows(), orbit_blocks(a, rep))?;
    let bundle = analyze(&frame, tol)?;
    if !bundle.kind.is_frame() {
        return Err(Error::NotAFrame {
            lower_bound: bundle.bounds.0,
        });
    }
    let lifted = tensor_rep(rep.group(), a.rows());
    let theta = &bundle.theta;
    let theta_scale = theta.norm().max(1.0);
    let mut intertwining: f64 = 0.0;
    let mut proj: f64 = 0.0;
    for g in 0..rep.group().order() {
        let l = lifted.matrix(g);
        intertwining = intertwining.max((&(theta * rep.matrix(g)) - &(l * theta)).norm());
        proj = proj.max((&(&bundle.projection * l) - &(l * &bundle.projection)).norm());
    }
    intertwining /= theta_scale;
    let s_comm = rep.commutant_residual(&bundle.s);
    let mut residuals = BTreeMap::new();
    residuals.insert("intertwining".to_string(), intertwining);
    residuals.insert("frame_operator_commutant".to_string(), s_comm);
    residuals.insert("projection_commutation".to_string(), proj);
    ensure(
        "orbit intertwines the regular representation",
        intertwining,
        1e-9,
    )?;
    ensure("orbit frame operator lies in the commutant", s_comm, 1e-9)?;
    ensure(
        "orbit frame projection commutes with the regular representation",
        proj,
        1e-9,
    )?;
    Ok(GeneratorOrbit {
        frame,
        bundle,
        residuals,
    })
}

/// `max_g ||M (λ_g ⊗ I) - (λ_g ⊗ I) M||`, relative to `||M||` (zero for `M = 0`).
pub fn algebra_membership_residual(
    m: &ComplexMatrix,
    group: &FiniteGroup,
    mult: usize,
) -> Result<f64> {
    let k = group.order() * mult;
    if m.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "operator must be {k}x{k}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let norm = m.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let lifted = tensor_rep(group, mult);
    Ok(lifted
        .matrices()
        .iter()
        .map(|l| (&(m * l) - &(l * m)).norm())
        .fold(0.0, f64::max)
        / norm)
}

/// True iff `M ∈ ℛ(G) ⊗ B(C^mult)`, tested as commutation with every `λ_g ⊗ I`.
pub fn rg_tensor_membership(
    m: &ComplexMatrix,
    group: &FiniteGroup,
    mult: usize,
    tol: f64,
) -> Result<bool> {
    Ok(algebra_membership_residual(m, group, mult)? <= tol)
}

/// The `(e, e)` block `L_e* Z L_e`; on the algebra this is `τ ⊗ id`.
pub fn slice_map(z: &ComplexMatrix, group: &FiniteGroup, mult: usize) -> Result<ComplexMatrix> {
    let k = group.order() * mult;
    if z.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "operator must be {k}x{k}, got {}x{}",
            z.rows(),
            z.cols()
        )));
    }
    let e = group.identity() * mult;
    Ok(z.block(e, e, mult, mult))
}

/// Prop-6.1-style local commutant test: `max_U ||(V U - U V) A*||`.
pub fn local_commutant_residual(
    v: &ComplexMatrix,
    a: &ComplexMatrix,
    system: &[ComplexMatrix],
) -> f64 {
    let a_adj = a.adjoint();
    system
        .iter()
        .map(|u| (&(&(v * u) - &(u * v)) * &a_adj).norm())
        .fold(0.0, f64::max)
}

pub fn local_commutant_check(
    v: &ComplexMatrix,
    a: &ComplexMatrix,
    system: &[ComplexMatrix],
    tol: f64,
) -> bool {
    local_commutant_residual(v, a, system) <= tol
}

/// Representation compressed to the range of an invariant projection, with
/// its Parseval generator `A = L_e* P W`.
#[derive(Clone, Debug)]
pub struct Subrepresentation {
    pub rep: GroupRep,
    pub generator: ComplexMatrix,
    /// Isometry onto the range of `P`; it is also the analysis operator of
    /// the generator's orbit.
    pub embedding: ComplexMatrix,
    /// `||P_A - P||` for the frame projection of the recomputed orbit.
    pub round_trip: f64,
}

pub fn subrep_from_projection(
    group: &FiniteGroup,
    mult: usize,
    p: &ComplexMatrix,
    tol: f64,
) -> Result<Subrepresentation> {
    let k = group.order() * mult;
    if p.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!(
            "projection must be {k}x{k}, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let pres = projection_residual(p);
    if pres > tol {
        return Err(Error::NotAProjection { residual: pres });
    }
    let inv = algebra_membership_residual(p, group, mult)?;
    if inv > tol {
        return Err(Error::NotInvariant { residual: inv });
    }
    let w = projection_isometry(p);
    if w.cols() == 0 {
        return Err(Error::NotAFrame { lower_bound: 0.0 });
    }
    let lifted = tensor_rep(group, mult);
    let w_adj = w.adjoint();
    let matrices = lifted
        .matrices()
        .iter()
        .map(|l| &(&w_adj * l) * &w)
        .collect();
    let rep = GroupRep::new(group.clone(), matrices, 1e-9_f64.max(tol))?;
    let e = group.identity() * mult;
    let generator = w.block(e, 0, mult, w.cols());
    let orbit = generator_orbit(&generator, &rep, tol)?;
    let round_trip = (&orbit.bundle.projection - p).norm();
    ensure("subrepresentation round trip", round_trip, 1e-8)?;
    Ok(Subrepresentation {
        rep,
        generator,
        embedding: w,
        round_trip,
    })
}

/// Result of testing whether a group-indexed Parseval frame is an orbit.
#[derive(Clone, Debug)]
pub enum GroupFrameOutcome {
    Accepted { rep: GroupRep, residual: f64 },
    Rejected { residual: f64 },
}

/// Group-indexed Parseval frame `{A_g}`: it is the orbit of `A_e` under some
/// representation iff `A_{gp} A_{gq}* = A_p A_q*` for all `p, q, g`. The
/// representation is then `π_g = θ* (λ_g ⊗ I) θ`.
pub fn group_frame_to_rep(
    frame: &OvFrame,
    group: &FiniteGroup,
    tol: f64,
) -> Result<GroupFrameOutcome> {
    let n = group.order();
    if frame.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "frame has {} blocks, group has order {n}",
            frame.len()
        )));
    }
    let bundle = analyze(frame, tol)?;
    if !bundle.kind.is_parseval() {
        let residual = (&bundle.s - &ComplexMatrix::identity(frame.dim_h())).norm();
        return Err(Error::NotParseval { residual });
    }
    let gram: Vec<Vec<ComplexMatrix>> = (0..n)
        .map(|p| {
            (0..n)
                .map(|q| frame.op(p) * &frame.op(q).adjoint())
                .collect()
        })
        .collect();
    let mut residual: f64 = 0.0;
    for g in 0..n {
        for p in 0..n {
            for q in 0..n {
                let d = &gram[group.mul(g, p)][group.mul(g, q)] - &gram[p][q];
                residual = residual.max(d.norm());
            }
        }
    }
    if residual > tol {
        return Ok(GroupFrameOutcome::Rejected { residual });
    }
    let lifted = tensor_rep(group, frame.dim_ho());
    let theta = &bundle.theta;
    let matrices = lifted
        .matrices()
        .iter()
        .map(|l| &(&theta.adjoint() * l) * theta)
        .collect();
    let rep = GroupRep::new(group.clone(), matrices, 1e-8_f64.max(10.0 * tol))?;
    let e = frame.op(group.identity());
    let recon = orbit_blocks(e, &rep)
        .iter()
        .zip(frame.ops())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    ensure(
        "recovered representation reproduces the frame",
        recon,
        1e-8_f64.max(10.0 * tol),
    )?;
    Ok(GroupFrameOutcome::Accepted { rep, residual })
}

/// Result of parametrizing a generator by an operator `M`.
#[derive(Clone, Debug)]
pub enum ParametrizeOutcome {
    Accepted {
        generator: ComplexMatrix,
        orbit: Box<GeneratorOrbit>,
        /// `||θ_B θ_A* - M||`, recorded when `A` is Parseval and `M` a partial
        /// isometry with initial projection `P_A`.
        parseval_recovery: Option<f64>,
    },
    /// `M` is not in `ℛ(G) ⊗ B(H_o)`; carries the membership residual.
    Rejected { residual: f64 },
}

/// `B = L_e* M θ_A` for `M ∈ ℛ(G) ⊗ B(H_o)` with `M = M P_A` and `M*M`
/// invertible on the range of `P_A`.
pub fn generator_parametrize(
    a: &ComplexMatrix,
    rep: &GroupRep,
    m: &ComplexMatrix,
    tol: f64,
) -> Result<ParametrizeOutcome> {
    let base = generator_orbit(a, rep, tol)?;
    let group = rep.group();
    let mult = a.rows();
    let residual = algebra_membership_residual(m, group, mult)?;
    if residual > tol {
        return Ok(ParametrizeOutcome::Rejected { residual });
    }
    let parseval_a = base.bundle.kind.is_parseval();
    let param = FrameParameter::new(m.clone(), base.bundle.clone(), tol)?;
    let mtheta = m * &param.base.theta;
    let e = group.identity() * mult;
    let generator = mtheta.block(e, 0, mult, mtheta.cols());
    let orbit = generator_orbit(&generator, rep, tol)?;
    let partial_isometry = (&(&m.adjoint() * m) - &base.bundle.projection).norm() <= tol;
    let parseval_recovery = if parseval_a && partial_isometry {
        let rec = (&(&orbit.bundle.theta * &base.bundle.theta.adjoint()) - m).norm();
        ensure("Parseval parameter recovery", rec, 1e-8)?;
        ensure(
            "Parseval parameter yields a Parseval generator",
            parseval_generator_residual(&generator, rep),
            1e-8,
        )?;
        Some(rec)
    } else {
        None
    };
    Ok(ParametrizeOutcome::Accepted {
        generator,
        orbit: Box::new(orbit),
        parseval_recovery,
    })
}

/// Minimal central projections of `ℛ(G) ⊗ B(C^mult)` with the data needed for
/// equivalence tests.
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    pub group: FiniteGroup,
    pub mult: usize,
    /// `λ_g ⊗ I_mult`, whose commutant is the algebra.
    pub generators: Vec<ComplexMatrix>,
    /// `F_k ⊗ I_mult`, mutually orthogonal and summing to the identity.
    pub central_projections: Vec<ComplexMatrix>,
    /// Rank of each `F_k` on `C^|G|`; equals `d_k^2`.
    pub block_ranks: Vec<usize>,
    /// Irreducible dimensions `d_k`.
    pub irrep_dims: Vec<usize>,
    /// Seed that produced the accepted decomposition.
    pub seed_used: u64,
}

fn perfect_square_root(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Central decomposition via the spectrum of a random central element.
///
/// The element is the Hermitian part of `Σ_C c_C K_C`, with `K_C` the class
/// sums of `λ` and `c_C` seeded complex normals; complex weights separate a
/// character from its conjugate. Eigenvalues are grouped when adjacent gaps are
/// below `1e-6 * ||X||`. A decomposition is accepted when the number of blocks
/// equals the number of conjugacy classes, every block rank is a perfect square
/// and the blocks are central; otherwise the next seed is tried.
pub fn central_projections(
    group: &FiniteGroup,
    mult: usize,
    seed: u64,
    tol: f64,
) -> Result<AlgebraContext> {
    assert!(mult > 0, "multiplicity must be positive");
    let (lambda, rho) = regular_reps(group);
    let n = group.order();
    let classes = group.conjugacy_classes();
    let class_sums: Vec<ComplexMatrix> = classes
        .iter()
        .map(|c| {
            c.iter().fold(ComplexMatrix::zeros(n, n), |acc, &g| {
                &acc + lambda.matrix(g)
            })
        })
        .collect();
    for attempt in 0..MAX_ATTEMPTS as u64 {
        let s = seed.wrapping_add(attempt);
        let mut rng = seeded_rng(s);
        let mut x = ComplexMatrix::zeros(n, n);
        for k in &class_sums {
            x = &x + &k.scale(complex_normal(&mut rng));
        }
        let x = x.hermitian_part();
        let eig = hermitian_eig(&x, f64::INFINITY)?;
        let gap = 1e-6 * x.norm().max(1.0);
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..n {
            if eig.eigenvalues[i] - eig.eigenvalues[i - 1] > gap {
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().expect("nonempty").push(i);
            }
        }
        if clusters.len() != classes.len() {
            continue;
        }
        let mut blocks: Vec<(usize, ComplexMatrix)> = clusters
            .iter()
            .map(|c| {
                let v = ComplexMatrix::from_fn(n, c.len(), |i, j| eig.eigenvectors[(i, c[j])]);
                (c.len(), (&v * &v.adjoint()).hermitian_part())
            })
            .collect();
        if blocks
            .iter()
            .any(|(r, _)| perfect_square_root(*r).is_none())
        {
            continue;
        }
        let central = blocks.iter().all(|(_, f)| {
            lambda
                .matrices()
                .iter()
                .chain(rho.matrices())
                .all(|u| (&(f * u) - &(u * f)).norm() <= 1e-9_f64.max(tol))
        });
        if !central {
            continue;
        }
        // stable order: by rank, ties kept in spectral order
        blocks.sort_by_key(|(r, _)| *r);
        let id = ComplexMatrix::identity(mult);
        let block_ranks: Vec<usize> = blocks.iter().map(|(r, _)| *r).collect();
        let irrep_dims = block_ranks
            .iter()
            .map(|&r| perfect_square_root(r).expect("checked"))
            .collect();
        let central_projections = blocks.iter().map(|(_, f)| f.kron(&id)).collect();
        let generators = lambda.matrices().iter().map(|l| l.kron(&id)).collect();
        return Ok(AlgebraContext {
            group: group.clone(),
            mult,
            generators,
            central_projections,
            block_ranks,
            irrep_dims,
            seed_used: s,
        });
    }
    Err(Error::DecompositionFailed {
        attempts: MAX_ATTEMPTS,
    })
}

impl AlgebraContext {
    pub fn dim(&self) -> usize {
        self.group.order() * self.mult
    }

    /// `round(tr(P F_k))` per central block.
    pub fn block_profile(&self, p: &ComplexMatrix) -> Vec<usize> {
        self.central_projections
            .iter()
            .map(|f| (p * f).trace().re.round().max(0.0) as usize)
            .collect()
    }

    /// Largest residual of the context invariants: orthogonality, completeness,
    /// and centrality against `λ_g ⊗ I` and `ρ_g ⊗ E_ab`.
    pub fn invariant_residual(&self) -> f64 {
        let k = self.dim();
        let mut worst: f64 = 0.0;
        let mut sum = ComplexMatrix::zeros(k, k);
        for (i, f) in self.central_projections.iter().enumerate() {
            sum = &sum + f;
            worst = worst.max(projection_residual(f));
            for g in self.central_projections.iter().skip(i + 1) {
                worst = worst.max((f * g).norm());
            }
        }
        worst = worst.max((&sum - &ComplexMatrix::identity(k)).norm());
        let (_, rho) = regular_reps(&self.group);
        let m = self.mult;
        for f in &self.central_projections {
            for l in &self.generators {
                worst = worst.max((&(f * l) - &(l * f)).norm());
            }
            for r in rho.matrices() {
                for a in 0..m {
                    for b in 0..m {
                        let mut e = ComplexMatrix::zeros(m, m);
                        e[(a, b)] = C64::new(1.0, 0.0);
                        let x = r.kron(&e);
                        worst = worst.max((&(f * &x) - &(&x * f)).norm());
                    }
                }
            }
        }
        worst
    }

    fn check_projection(&self, p: &ComplexMatrix, tol: f64) -> Result<()> {
        let k = self.dim();
        if p.shape() != (k, k) {
            return Err(Error::DimensionMismatch(format!(
                "projection must be {k}x{k}, got {}x{}",
                p.rows(),
                p.cols()
            )));
        }
        let pres = projection_residual(p);
        if pres > tol.max(1e-9) {
            return Err(Error::NotAProjection { residual: pres });
        }
        let mres = algebra_membership_residual(p, &self.group, self.mult)?;
        if mres > tol.max(1e-9) {
            return Err(Error::NotInAlgebra { residual: mres });
        }
        Ok(())
    }
}

/// `P ~ Q` in the algebra iff their ranks agree in every central block.
pub fn projections_equivalent(
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    ctx: &AlgebraContext,
    tol: f64,
) -> Result<bool> {
    ctx.check_projection(p, tol)?;
    ctx.check_projection(q, tol)?;
    Ok(ctx.block_profile(p) == ctx.block_profile(q))
}

/// Random element `Σ_g ρ_g ⊗ Y_g` of the algebra, `Y_g` standard complex normal.
pub fn random_algebra_element<R: Rng + ?Sized>(
    group: &FiniteGroup,
    mult: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let (_, rho) = regular_reps(group);
    let k = group.order() * mult;
    let mut x = ComplexMatrix::zeros(k, k);
    for r in rho.matrices() {
        x = &x + &r.kron(&random_matrix(mult, mult, rng));
    }
    x
}

/// Projection in the algebra: spectral projection of the Hermitian part of a
/// random algebra element onto eigenvalues above their mean. Nonzero unless the
/// element is scalar.
pub fn random_algebra_projection<R: Rng + ?Sized>(
    group: &FiniteGroup,
    mult: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let h = random_algebra_element(group, mult, rng).hermitian_part();
    let eig = hermitian_eig(&h, f64::INFINITY).expect("Hermitian by construction");
    let mean = eig.eigenvalues.iter().sum::<f64>() / eig.eigenvalues.len() as f64;
    let v = eig.select_vectors(|x| x > mean);
    (&v * &v.adjoint()).hermitian_part()
}

/// Unitary `exp(iK)` in the algebra, `K` the Hermitian part of a random element.
pub fn random_algebra_unitary<R: Rng + ?Sized>(
    group: &FiniteGroup,
    mult: usize,
    rng: &mut R,
) -> ComplexMatrix {
    let k = random_algebra_element(group, mult, rng).hermitian_part();
    let eig = hermitian_eig(&k, f64::INFINITY).expect("Hermitian by construction");
    eig.map_spectrum(|x| C64::from_polar(1.0, x))
}

/// Partial isometry `Z` in the algebra with `Z*Z = P` and `Z Z* = Q`, built as
/// the polar part of `Q X P` for a seeded random algebra element `X`.
pub fn intertwiner(
    p: &ComplexMatrix,
    q: &ComplexMatrix,
    ctx: &AlgebraContext,
    seed: u64,
    tol: f64,
) -> Result<ComplexMatrix> {
    if !projections_equivalent(p, q, ctx, tol)? {
        return Err(Error::NotEquivalent);
    }
    let rank = projection_isometry(p).cols();
    if rank == 0 {
        return Ok(ComplexMatrix::zeros(ctx.dim(), ctx.dim()));
    }
    for attempt in 0..MAX_ATTEMPTS as u64 {
        let mut rng = seeded_rng(seed.wrapping_add(attempt));
        let x = random_algebra_element(&ctx.group, ctx.mult, &mut rng);
        let y = &(q * &x) * p;
        if range_isometry(&y, tol).cols() < rank {
            continue;
        }
        let z = polar_partial_isometry(&y, tol);
        let init = (&(&z.adjoint() * &z) - p).norm();
        let fin = (&(&z * &z.adjoint()) - q).norm();
        let mem = algebra_membership_residual(&z, &ctx.group, ctx.mult)?;
        if init <= 1e-8 && fin <= 1e-8 && mem <= tol.max(1e-9) {
            return Ok(z);
        }
    }
    Err(Error::GenericityFailure {
        attempts: MAX_ATTEMPTS,
    })
}
