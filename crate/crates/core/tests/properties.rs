mod common;

use lfm_semigroup::domains::{contains, convexity_witness, DomainKind};
use lfm_semigroup::lfm::{canonical, LinearFractionalMap};
use lfm_semigroup::matalg::{c64, dist, jordan_form, norm, re, Mat3, Point};
use lfm_semigroup::model::{
    analytic_phi_t, classify, closed_form_phi_t, heisenberg, DwLocation, HeisenbergTranslation,
};
use lfm_semigroup::semigroup::Semigroup;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn ball_point() -> impl Strategy<Value = Point> {
    (0.0..1.0f64, 0.0..std::f64::consts::TAU, 0.0..std::f64::consts::TAU, 0.0..0.999f64).prop_map(
        |(a, p1, p2, r)| {
            let (c, s) = (a.sqrt(), (1.0 - a).sqrt());
            [c64(0.0, p1).exp() * (r * c), c64(0.0, p2).exp() * (r * s)]
        },
    )
}

fn well_conditioned(seed: u64) -> Mat3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = random_matrix(&mut rng);
        if condition(&m) < 1e3 {
            return m;
        }
    }
}

fn map_for(seed: u64, family: usize) -> LinearFractionalMap {
    random_ball_self_map(&mut ChaCha8Rng::seed_from_u64(seed), FAMILIES[family % 4])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_matrix_product(a in any::<u64>(), b in any::<u64>(), z in ball_point()) {
        let (f, g) = (LinearFractionalMap::from_mat3(&well_conditioned(a)).unwrap(),
                      LinearFractionalMap::from_mat3(&well_conditioned(b)).unwrap());
        let fg = f.compose(&g).unwrap();
        let product = canonical(&(f.raw_matrix() * g.raw_matrix())).unwrap();
        prop_assert!(fg.to_matrix().matrix().max_abs_diff(&product) < 1e-12 * product.frobenius_norm());
        if let (Ok(inner), Ok(direct)) = (g.eval(&z), fg.eval(&z)) {
            if let Ok(outer) = f.eval(&inner) {
                prop_assume!(norm(&outer) < 1e6);
                prop_assert!(dist(&outer, &direct) < 1e-8 * (1.0 + norm(&direct)));
            }
        }
    }

    #[test]
    fn inverse_undoes_map(a in any::<u64>()) {
        let f = LinearFractionalMap::from_mat3(&well_conditioned(a)).unwrap();
        let id = f.compose(&f.inverse().unwrap()).unwrap();
        prop_assert!(id.to_matrix().distance(&LinearFractionalMap::identity().to_matrix()) < 1e-10);
    }

    #[test]
    fn trace_and_determinant_from_blocks(a in any::<u64>()) {
        let m = well_conditioned(a);
        let jd = jordan_form(&m).unwrap();
        let tr: num_complex::Complex64 = jd.blocks.iter().map(|b| b.eigenvalue * b.size as f64).sum();
        let det: num_complex::Complex64 = jd.blocks.iter().map(|b| b.eigenvalue.powu(b.size as u32)).product();
        prop_assert!((tr - m.trace()).norm() < 1e-10 * (1.0 + m.frobenius_norm()));
        prop_assert!((det - m.det()).norm() < 1e-10 * (1.0 + m.frobenius_norm().powi(3)));
    }

    #[test]
    fn similarity_keeps_signature(seed in any::<u64>(), family in 0usize..4, p in any::<u64>()) {
        let phi = map_for(seed, family);
        let m = phi.raw_matrix();
        let q = well_conditioned(p);
        let conj = q * m * q.inverse().unwrap();
        let (a, b) = (jordan_form(&m).unwrap(), jordan_form(&conj).unwrap());
        prop_assert_eq!(a.blocks.len(), b.blocks.len());
        for x in &a.blocks {
            prop_assert!(b.blocks.iter().any(|y| y.size == x.size
                && (y.eigenvalue - x.eigenvalue).norm() < 1e-6 * x.eigenvalue.norm().max(1.0)));
        }
    }

    #[test]
    fn power_law_and_integer_consistency(seed in any::<u64>(), family in 0usize..4,
                                         t in 0.0..3.0f64, s in 0.0..3.0f64) {
        let phi = map_for(seed, family);
        let group = Semigroup::new(&phi).unwrap();
        let (mt, ms, mts) = (group.at(t).unwrap(), group.at(s).unwrap(), group.at(t + s).unwrap());
        let product = canonical(&(*mt.matrix.matrix() * *ms.matrix.matrix())).unwrap();
        prop_assert!(product.max_abs_diff(mts.matrix.matrix()) < 1e-9);
        let mut iterate = LinearFractionalMap::identity();
        for n in 1..=5u32 {
            iterate = iterate.compose(&phi).unwrap();
            let d = group.at(n as f64).unwrap().matrix.distance(&iterate.to_matrix());
            prop_assert!(d < 1e-8, "n = {}, d = {}", n, d);
        }
    }

    #[test]
    fn fractional_iterates_stay_in_ball(seed in any::<u64>(), family in 0usize..4,
                                        t in 0.0..5.0f64, z in ball_point()) {
        let phi = map_for(seed, family);
        let w = Semigroup::new(&phi).unwrap().at(t).unwrap().map.eval(&z).unwrap();
        prop_assert!(norm(&w) <= 1.0 + 1e-9);
    }

    #[test]
    fn classification_matches_family(seed in any::<u64>(), family in 0usize..4) {
        let phi = map_for(seed, family);
        let mc = classify(&phi).unwrap();
        let expected = match FAMILIES[family] {
            Family::Hyperbolic => (DwLocation::Boundary, 1),
            Family::Parabolic => (DwLocation::Boundary, 2),
            Family::Heisenberg => (DwLocation::Boundary, 3),
            Family::Interior => (DwLocation::Interior, 1),
        };
        prop_assert_eq!((mc.location, mc.multiplicity), expected);
        prop_assert!(mc.intertwining_residual(&phi, 100, seed) < 1e-9);
        let mut iterate = phi;
        let mut model = mc.phi_model;
        for _ in 2..=5 {
            iterate = iterate.compose(&phi).unwrap();
            model = model.compose(&mc.phi_model).unwrap();
            prop_assert!(lfm_semigroup::model::intertwining_residual(&mc.sigma, &iterate, &model, 50, seed) < 1e-9);
        }
    }

    #[test]
    fn classification_is_unitarily_invariant(seed in any::<u64>(), family in 0usize..4, u in any::<u64>()) {
        let phi = map_for(seed, family);
        let rot = random_unitary(&mut ChaCha8Rng::seed_from_u64(u));
        let rot_map = LinearFractionalMap::affine(rot, [re(0.0); 2]).unwrap();
        let conj = rot_map.compose(&phi).unwrap().compose(&rot_map.inverse().unwrap()).unwrap();
        let (a, b) = (classify(&phi).unwrap(), classify(&conj).unwrap());
        prop_assert_eq!((a.location, a.multiplicity, a.domain), (b.location, b.multiplicity, b.domain));
    }

    #[test]
    fn convex_combinations_stay_in_siegel(p in ball_point(), q in ball_point(), t in 0.0..=1.0f64) {
        let u = lfm_semigroup::domains::cayley(&p).unwrap();
        let w = lfm_semigroup::domains::cayley(&q).unwrap();
        prop_assert_eq!(convexity_witness(DomainKind::SiegelHalfSpace, &u, &w, t), Ok(true));
    }

    #[test]
    fn heisenberg_translations_preserve_siegel(p in ball_point(), b2r in -1.0..1.0f64, b2i in -1.0..1.0f64,
                                               extra in 0.0..2.0f64, b1i in -3.0..3.0f64) {
        let b2 = c64(b2r, b2i);
        let h = HeisenbergTranslation { b: [c64(b2.norm_sqr() + extra, b1i), b2] };
        let w = lfm_semigroup::domains::cayley(&p).unwrap();
        prop_assert!(contains(DomainKind::SiegelHalfSpace, &h.map().eval(&w).unwrap()));
        prop_assert_eq!(h.map(), heisenberg(h.b));
    }

    #[test]
    fn analytic_closed_form_agrees(z in ball_point(), t in 0.0..4.0f64) {
        let composed = analytic_phi_t(t, &z).unwrap();
        prop_assert!(dist(&closed_form_phi_t(t, &z).unwrap(), &composed) < 1e-9);
    }
}
