mod common;

use common::*;
use diffmod::flags::{block_partition, find_sut_conjugation, verify_certificate};
use diffmod::harness::verify_rank_formulas;
use diffmod::json::{complex_from_json, complex_to_json, module_from_json, module_to_json};
use diffmod::module::{
    compress, cone, direct_sum, homology, is_acyclic, is_contractible, koszul,
    standard_form_matrix, suspension, tensor, Acyclicity, Contractibility, DiffModule, FreeComplex,
};
use diffmod::ring::{Ring, RingMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn instance() -> impl Strategy<Value = (u64, usize, u64)> {
    (
        prop::sample::select(PRIMES.to_vec()),
        0usize..=6,
        any::<u64>(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn conjugation_keeps_square_zero((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let u = random_invertible(d.ring(), p, s, &mut rng);
        let c = d.conjugate(&u).unwrap();
        prop_assert!(c.delta().mul(c.delta()).unwrap().is_zero());
        prop_assert!(DiffModule::new(c.delta().clone(), None).is_ok());
        prop_assert_eq!(field_homology(p, &c), field_homology(p, &d));
    }

    #[test]
    fn rank_parity((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let h = homology(&d, None).unwrap().field_dim().unwrap();
        prop_assert_eq!(h % 2, s % 2);
        prop_assert_eq!(h, field_homology(p, &d));
        let rep = verify_rank_formulas(&d, None).unwrap();
        prop_assert!(rep.holds(), "{}", rep.summary());
    }

    #[test]
    fn suspension_is_an_involution((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let sd = suspension(&d);
        prop_assert_eq!(&suspension(&sd), &d);
        prop_assert_eq!(homology(&sd, None).unwrap(), homology(&d, None).unwrap());
    }

    #[test]
    fn tensor_units((p, seed) in (prop::sample::select(PRIMES.to_vec()), any::<u64>()),
                    ranks in prop::collection::vec(0usize..=3, 1..=4),
                    s in 0usize..=4, lo in -2i64..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring = fp(p);
        let d = random_square_zero(p, s, &mut rng);
        let unit = FreeComplex::single(&ring, 0, 1);
        prop_assert_eq!(tensor(&unit, &d).unwrap().delta().clone(), d.delta().clone());
        let x = random_complex(p, &ranks, lo, &mut rng);
        let r = DiffModule::zero(&ring, 1);
        prop_assert_eq!(tensor(&x, &r).unwrap().delta().clone(), compress(&x).delta().clone());
    }

    #[test]
    fn cone_detects_quasi_isomorphisms((p, seed) in (prop::sample::select(PRIMES.to_vec()), any::<u64>()),
                                       s in 0usize..=4, t in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let e = random_square_zero(p, t, &mut rng);
        let phi = random_morphism(p, &d, &e, &mut rng);
        let c = cone(&phi, &d, &e).unwrap();
        let (hd, he, hc) = (field_homology(p, &d), field_homology(p, &e), field_homology(p, &c));
        let r = induced_rank(p, &phi, &d, &e);
        // the triangle D -> E -> cone gives a six-term exact hexagon
        prop_assert_eq!(hc, hd + he - 2 * r);
        let quasi_iso = r == hd && r == he;
        prop_assert_eq!(quasi_iso, is_acyclic(&c, None).unwrap() == Acyclicity::Yes);
    }

    #[test]
    fn cone_of_identity_is_acyclic((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let id = RingMatrix::identity(d.ring(), s);
        prop_assert_eq!(is_acyclic(&cone(&id, &d, &d).unwrap(), None).unwrap(), Acyclicity::Yes);
    }

    #[test]
    fn json_round_trip((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        prop_assert_eq!(&module_from_json(&module_to_json(&d)).unwrap(), &d);
        let x = random_complex(p, &[s.min(3), 2, s.min(2)], -1, &mut rng);
        let back = complex_from_json(&complex_to_json(&x)).unwrap();
        prop_assert_eq!(back.differentials(), x.differentials());
        prop_assert_eq!(back.lo(), x.lo());
    }

    #[test]
    fn contractible_implies_acyclic((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let acyclic = is_acyclic(&d, None).unwrap() == Acyclicity::Yes;
        match is_contractible(&d, None).unwrap() {
            Contractibility::Yes(b) => {
                prop_assert!(acyclic);
                let sf = b.conjugator.mul(d.delta()).unwrap().mul(&b.inverse).unwrap();
                prop_assert_eq!(sf, standard_form_matrix(d.ring(), s / 2));
            }
            Contractibility::No { .. } => prop_assert!(!acyclic),
        }
    }

    #[test]
    fn flag_certificates_verify((p, s, seed) in instance()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let cert = find_sut_conjugation(&d).unwrap();
        prop_assert!(verify_certificate(&d, &cert).is_ok());
        let a = cert.conjugate(d.delta()).unwrap();
        prop_assert!(a.is_strictly_upper_triangular());
        let sut = DiffModule::new(a.clone(), None).unwrap();
        prop_assert!(verify_certificate(&sut, &block_partition(&a).unwrap()).is_ok());
    }

    #[test]
    fn direct_sums_add_homology((p, seed) in (prop::sample::select(PRIMES.to_vec()), any::<u64>()),
                                s in 0usize..=4, t in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_square_zero(p, s, &mut rng);
        let e = random_square_zero(p, t, &mut rng);
        let sum = direct_sum(&d, &e).unwrap();
        prop_assert_eq!(field_homology(p, &sum), field_homology(p, &d) + field_homology(p, &e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn koszul_json_round_trip(n in 1usize..=3) {
        let r = Ring::from_notation("Q[x,y,z]").unwrap();
        let vars: Vec<_> = (0..n).map(|i| r.var(i)).collect();
        let d = koszul(&r, &vars).unwrap();
        prop_assert_eq!(&module_from_json(&module_to_json(&d)).unwrap(), &d);
    }

    #[test]
    fn integer_rank_formula(u0 in -6i64..=6, u1 in -6i64..=6, k in -5i64..=5) {
        // u v^T with v^T u = 0 squares to zero
        let (v0, v1) = (u1 * k, -u0 * k);
        let z = Ring::integers();
        let m = RingMatrix::from_i64(&z, &[&[u0 * v0, u0 * v1], &[u1 * v0, u1 * v1]]);
        let d = DiffModule::new(m, None).unwrap();
        let rep = verify_rank_formulas(&d, None).unwrap();
        prop_assert!(rep.holds(), "{}", rep.summary());
    }
}
