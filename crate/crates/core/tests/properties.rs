use coordinate_bethe::ansatz::{a_coeff, r_plus, reflection, scattering};
use coordinate_bethe::basis::{binomial, SectorBasis};
use coordinate_bethe::dense::DenseMatrix;
use coordinate_bethe::hamiltonian::{assemble, sz_commutator_norm, ModelSpec, XxxBoundary};
use coordinate_bethe::oracle::dense_eigenvalues;
use coordinate_bethe::weyl::{coset_representative, SignedPermutation};
use coordinate_bethe::{c64, C64};
use proptest::prelude::*;

fn unit(k: f64) -> C64 {
    c64(k.cos(), k.sin())
}

fn signed_perm(n: usize) -> impl Strategy<Value = SignedPermutation> {
    (Just((1..=n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(prop::bool::ANY, n)).prop_map(
        |(perm, neg)| {
            let signs: Vec<i8> = neg.iter().map(|&b| if b { -1 } else { 1 }).collect();
            SignedPermutation::new(&perm, &signs).unwrap()
        },
    )
}

fn real_param() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64).prop_map(|x| c64(x, 0.0))
}

proptest! {
    #[test]
    fn scattering_is_unitary_on_the_unit_circle(k1 in 0.05..3.0f64, k2 in 0.05..3.0f64) {
        let (z1, z2) = (unit(k1), unit(k2));
        prop_assume!((2.0 * z1 - z1 * z2 - 1.0).norm() > 1e-3);
        prop_assume!((2.0 * z2 - z1 * z2 - 1.0).norm() > 1e-3);
        let s = scattering(z1, z2).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        prop_assert!((s * scattering(z2, z1).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn reflection_inverts_under_z_to_inverse(k in 0.05..3.0f64, kappa in -0.5..0.5f64, a in real_param(), b in real_param()) {
        let z = (C64::i() * c64(k, kappa)).exp();
        prop_assume!((1.0 - z + b - a).norm() > 1e-3 && (1.0 - 1.0 / z + b - a).norm() > 1e-3);
        let r = reflection(z, a, b).unwrap();
        prop_assert!((r * reflection(1.0 / z, a, b).unwrap() - 1.0).norm() < 1e-9);
        let ratio = r_plus(1.0 / z, a, b).unwrap() / r_plus(z, a, b).unwrap();
        prop_assert!((r - ratio).norm() < 1e-9 * ratio.norm().max(1.0));
        if kappa == 0.0 {
            prop_assert!((r.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn a_coefficient_ratio_is_scattering(k1 in 0.05..3.0f64, k2 in 0.05..3.0f64) {
        // a(z₁,z₂)/a(z₂,z₁) = -S(z₁,z₂) whenever both are finite
        let (z1, z2) = (unit(k1), unit(k2));
        prop_assume!((z1 * z2 - 1.0).norm() > 1e-3 && (2.0 * z1 - z1 * z2 - 1.0).norm() > 1e-3);
        prop_assume!((2.0 * z2 - z1 * z2 - 1.0).norm() > 1e-3);
        let lhs = a_coeff(z1, z2).unwrap() / a_coeff(z2, z1).unwrap();
        prop_assert!((lhs + scattering(z1, z2).unwrap()).norm() < 1e-9);
    }

    #[test]
    fn sector_rank_round_trips(length in 1usize..14, m_frac in 0.0..1.0f64) {
        let m = ((length as f64) * m_frac) as usize;
        let basis = SectorBasis::new(length, m).unwrap();
        prop_assert_eq!(basis.len() as u64, binomial(length, m));
        for (i, &mask) in basis.masks().iter().enumerate() {
            prop_assert_eq!(basis.rank_mask(mask), i);
            prop_assert_eq!(basis.index_of(&basis.config_of(i).unwrap()).unwrap(), i);
            prop_assert_eq!(mask.count_ones() as usize, m);
        }
    }

    #[test]
    fn compose_matches_sequential_application(g in signed_perm(4), h in signed_perm(4)) {
        let k = [c64(0.1, 0.0), c64(0.7, 0.2), c64(1.3, -0.1), c64(2.9, 0.0)];
        let gh = g.compose(&h).unwrap();
        prop_assert_eq!(gh.apply(&k).unwrap(), g.apply(&h.apply(&k).unwrap()).unwrap());
        prop_assert_eq!(g.compose(&g.inverse()).unwrap(), SignedPermutation::identity(4));
        prop_assert_eq!(g.inverse().inverse(), g);
    }

    #[test]
    fn coset_representative_is_class_invariant(g in signed_perm(4), h in signed_perm(4), m in 0usize..=4) {
        // rearranging and flipping the contents of slots 1..m keeps the coset
        let mut perm: Vec<usize> = h.perm().iter().take(m).map(|&p| p + 1).collect();
        let mut sorted = perm.clone();
        sorted.sort();
        let relabel: Vec<usize> = perm.iter().map(|p| sorted.binary_search(p).unwrap() + 1).collect();
        perm = relabel;
        perm.extend(m + 1..=4);
        let mut signs = h.signs()[..m].to_vec();
        signs.resize(4, 1);
        let stab = SignedPermutation::new(&perm, &signs).unwrap();
        let a = coset_representative(&g, m).unwrap();
        let b = coset_representative(&stab.compose(&g).unwrap(), m).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn diagonal_open_chain_conserves_magnetization(length in 2usize..7, a in real_param(), b in real_param(), g in real_param(), d in real_param()) {
        let h = assemble(&ModelSpec::xxx_open(length, XxxBoundary::diagonal(a, b, g, d))).unwrap();
        prop_assert!(sz_commutator_norm(&h, length).unwrap() < 1e-14);
        prop_assert!(h.is_hermitian(1e-14));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_sum_to_trace(n in 1usize..24, entries in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 24 * 24)) {
        let a = DenseMatrix::from_fn(n, n, |i, j| c64(entries[i * 24 + j].0, entries[i * 24 + j].1));
        let report = dense_eigenvalues(&a).unwrap();
        prop_assert!(report.all_converged());
        let sum: C64 = report.eigenvalues.iter().sum();
        prop_assert!((sum - a.trace()).norm() <= 1e-10 * a.inf_norm().max(1.0));
    }

    #[test]
    fn shifting_shifts_the_spectrum(n in 1usize..16, shift in (-3.0..3.0f64, -3.0..3.0f64), entries in prop::collection::vec(-1.0..1.0f64, 16 * 16)) {
        let a = DenseMatrix::from_fn(n, n, |i, j| c64(entries[i * 16 + j], 0.0));
        let s = c64(shift.0, shift.1);
        let mut b = a.clone();
        b.add_diagonal(s);
        let ea = dense_eigenvalues(&a).unwrap().eigenvalues;
        let eb = dense_eigenvalues(&b).unwrap().eigenvalues;
        let shifted: Vec<C64> = ea.iter().map(|x| x + s).collect();
        prop_assert!(coordinate_bethe::oracle::spectrum_distance(&shifted, &eb) < 1e-8);
    }
}
