use proptest::prelude::*;

use ovf_core::calculus::{phi, phi_inverse};
use ovf_core::duality::{canonical_dual, dual_residual};
use ovf_core::frames::{analyze, parsevalize, random_frame};
use ovf_core::groups::{generator_orbit, tensor_rep, FiniteGroup};
use ovf_core::linalg::{
    distance, exp_i_hermitian, random_unitary, seeded_random_matrix, seeded_rng, unitary_log,
    ComplexMatrix,
};

const TOL: f64 = 1e-8;

/// `(count, dim_h, dim_ho)` with `count * dim_ho > dim_h`.
fn frame_shape() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..=5, 1usize..=3)
        .prop_flat_map(|(count, dim_ho)| (Just(count), 1usize..count * dim_ho, Just(dim_ho)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parsevalization_keeps_the_projection((count, dim_h, dim_ho) in frame_shape(), seed in any::<u64>()) {
        let f = random_frame(seed, count, dim_h, dim_ho);
        let p = parsevalize(&f, TOL).unwrap();
        let (bf, bp) = (analyze(&f, TOL).unwrap(), analyze(&p, TOL).unwrap());
        prop_assert!(bp.kind.is_parseval());
        prop_assert!(distance(&bf.projection, &bp.projection) < 1e-9);
    }

    #[test]
    fn parametrization_round_trips((count, dim_h, dim_ho) in frame_shape(), seed in any::<u64>()) {
        let a = random_frame(seed, count, dim_h, dim_ho);
        let b = random_frame(seed.wrapping_add(1), count, dim_h, dim_ho);
        let m = phi(&a, &b, TOL).unwrap();
        prop_assert!(phi_inverse(&a, &m.m, TOL).unwrap().distance(&b) < 1e-8);
    }

    #[test]
    fn canonical_dual_is_a_dual((count, dim_h, dim_ho) in frame_shape(), seed in any::<u64>()) {
        let a = random_frame(seed, count, dim_h, dim_ho);
        let d = canonical_dual(&a, TOL).unwrap();
        prop_assert!(dual_residual(&a, &d).unwrap() < 1e-9);
    }

    #[test]
    fn unitary_log_inverts_the_exponential(n in 1usize..=6, seed in any::<u64>()) {
        let u = random_unitary(n, &mut seeded_rng(seed));
        let h = unitary_log(&u, TOL).unwrap();
        prop_assert!(distance(&h, &h.adjoint()) < 1e-12);
        prop_assert!(h.norm() <= std::f64::consts::PI + 1e-9);
        prop_assert!(distance(&exp_i_hermitian(&h, 1.0, TOL).unwrap(), &u) < 1e-9);
    }

    #[test]
    fn orbit_frame_operator_commutes_with_the_representation(
        group in prop::sample::select(vec!["Z2", "Z3", "Z4", "S3", "D4", "Q8"]),
        mult in 1usize..=2,
        seed in any::<u64>(),
    ) {
        let g = FiniteGroup::by_name(group).unwrap();
        let rep = tensor_rep(&g, mult);
        let a = seeded_random_matrix(mult, rep.dim(), seed);
        let o = generator_orbit(&a, &rep, TOL).unwrap();
        prop_assert!(rep.commutant_residual(&o.bundle.s) < 1e-9);
        let id = ComplexMatrix::identity(rep.dim());
        prop_assert!(o.bundle.projection.norm() <= 1.0 + 1e-9 && distance(&o.bundle.projection, &id) < 1e-8);
    }
}
