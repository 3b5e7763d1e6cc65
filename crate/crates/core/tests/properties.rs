use std::sync::Arc;

use parchain::chaincx::{
    chain_sum_injections, classify_morphism, homology, is_cofibrant, minimal_cofibrant_replacement, reassemble,
};
use parchain::decomp::{
    fitting_idempotent, fitting_power, indecomposable, split_by_idempotent, structure_decompose, EndRing,
    Indecomposability, Strategy as Search,
};
use parchain::functor::{kan_comparison, kan_extend_colim, local_homology, minimal_cover, minimal_resolution, radical};
use parchain::random::{random_chain_functor, random_cofibrant, random_dim1_poset, random_mat, random_poset, random_presented_functor};
use parchain::{ChainFunctor, ChainMap, Mat};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prime() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3), Just(5)]
}

fn matrix() -> impl Strategy<Value = Mat> {
    (prime(), 0usize..=8, 0usize..=8, any::<u64>()).prop_map(|(p, r, c, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_mat(&mut rng, p, r, c)
    })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.4)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in matrix()) {
        let kc = m.kernel_and_cokernel();
        prop_assert_eq!(m.rank() + kc.kernel.cols(), m.cols());
        prop_assert_eq!(m.rank() + kc.coker.rows(), m.rows());
        prop_assert!(m.mul(&kc.kernel).is_zero());
        prop_assert!(kc.coker.mul(&m).is_zero());
        prop_assert!(kc.coker.mul(&kc.section).is_identity());
    }

    #[test]
    fn rref_transform(m in matrix()) {
        let r = m.rref();
        prop_assert!(r.t.is_invertible());
        prop_assert_eq!(r.t.mul(&m), r.r.clone());
        prop_assert_eq!(r.rank(), m.rank());
    }

    #[test]
    fn solve_recovers_consistent_systems(m in matrix(), seed in any::<u64>()) {
        let x0 = random_mat(&mut rng(seed), m.p(), m.cols(), 2);
        let b = m.mul(&x0);
        let x = m.solve(&b).unwrap();
        prop_assert_eq!(m.mul(&x), b);
    }

    #[test]
    fn pullback_square_commutes(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let (a, b, c) = (r.gen_range(0..5), r.gen_range(0..5), r.gen_range(0..5));
        let f = random_mat(&mut r, p, c, a);
        let g = random_mat(&mut r, p, c, b);
        let pb = f.pullback(&g);
        prop_assert_eq!(f.mul(&pb.to_a), g.mul(&pb.to_b));
        prop_assert_eq!(pb.dim, a + b - f.hstack(&g).rank());
        let po = f.transpose().pushout(&g.transpose());
        prop_assert_eq!(po.from_a.mul(&f.transpose()), po.from_b.mul(&g.transpose()));
    }

    #[test]
    fn closure_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_poset(&mut r, 9, 0.35);
        let d = subset(&mut r, q.len());
        let e: Vec<usize> = (0..q.len()).filter(|x| d.contains(x) || r.gen_bool(0.3)).collect();
        let cd = q.closure(&d);
        prop_assert!(d.iter().all(|x| cd.contains(x)));
        prop_assert_eq!(q.closure(&cd), cd.clone());
        prop_assert!(q.is_closed(&cd));
        let ce = q.closure(&e);
        prop_assert!(cd.iter().all(|x| ce.contains(x)));
        let sup = q.suplim(&d);
        prop_assert!(sup.iter().all(|x| cd.contains(x)));
    }

    #[test]
    fn transfer_is_greatest_below_on_closed_sets(seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_dim1_poset(&mut r, 8);
        let d = q.closure(&subset(&mut r, q.len()));
        for z in 0..q.len() {
            if let Some(t) = q.transfer(&d, z).unwrap() {
                prop_assert!(d.contains(&t) && q.leq(t, z));
                prop_assert!(d.iter().filter(|&&a| q.leq(a, z)).all(|&a| q.leq(a, t)));
            } else {
                prop_assert!(d.iter().all(|&a| !q.leq(a, z)));
            }
        }
    }

    #[test]
    fn cover_is_minimal_epimorphism(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_poset(&mut r, 6, 0.4));
        let f = random_presented_functor(&mut r, q.clone(), p, 3, 2);
        let c = minimal_cover(&f);
        prop_assert!(c.map.is_epi() && c.map.is_natural(&c.free, &f));
        let h0: usize = (0..q.len()).map(|x| local_homology(&f, x).h0).sum();
        prop_assert_eq!(c.gens.len(), h0);
        let (rad, incl) = radical(&f);
        prop_assert!(incl.is_mono());
        for x in 0..q.len() {
            prop_assert_eq!(f.dim(x) - rad.dim(x), local_homology(&f, x).h0);
        }
    }

    #[test]
    fn resolutions_on_dimension_one_posets(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 6));
        let f = random_presented_functor(&mut r, q, p, 3, 2);
        let res = minimal_resolution(&f).unwrap();
        prop_assert!(res.d.is_mono());
        prop_assert!(res.p0.map.compose(&res.d).is_zero());
        for x in 0..f.poset().len() {
            prop_assert_eq!(res.p0.free.dim(x), f.dim(x) + res.p1.free.dim(x));
        }
    }

    #[test]
    fn kan_extension_restricts_back(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 7));
        let d = q.closure(&subset(&mut r, q.len()));
        prop_assume!(!d.is_empty());
        let sub = Arc::new(q.induced(&d));
        let f = random_presented_functor(&mut r, sub, p, 2, 1);
        let k = kan_extend_colim(&f, q.clone(), &d).unwrap();
        k.functor.check_functorial().unwrap();
        for (i, &x) in d.iter().enumerate() {
            prop_assert_eq!(k.functor.dim(x), f.dim(i));
        }
        let (tr, colim, cmp) = kan_comparison(&f, q, &d).unwrap();
        prop_assert!(cmp.is_iso() && cmp.is_natural(&tr, &colim.functor));
    }

    #[test]
    fn homology_of_sums_adds(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 5));
        let a = random_chain_functor(&mut r, q.clone(), p, 2);
        let b = random_chain_functor(&mut r, q.clone(), p, 2);
        let top = a.top().max(b.top());
        let (a, b) = (a.with_top(top), b.with_top(top));
        let s = ChainFunctor::direct_sum(q.clone(), p, &[a.clone(), b.clone()]);
        s.validate().unwrap();
        let (inj, proj) = chain_sum_injections(&[a.clone(), b.clone()]);
        prop_assert!(proj[0].compose(&inj[0]).is_identity() && proj[1].compose(&inj[0]).is_zero());
        for n in 0..=top {
            let (hs, ha, hb) = (homology(&s, n), homology(&a, n), homology(&b, n));
            for x in 0..q.len() {
                prop_assert_eq!(hs.functor.dim(x), ha.functor.dim(x) + hb.functor.dim(x));
            }
        }
    }

    #[test]
    fn identity_is_in_every_class(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 5));
        let x = random_chain_functor(&mut r, q, p, 2);
        let c = classify_morphism(&ChainMap::identity(&x), &x, &x);
        prop_assert!(c.weak_equivalence && c.fibration && c.cofibration);
    }

    #[test]
    fn cofibrant_replacement_is_trivial_fibration(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 5));
        let x = random_chain_functor(&mut r, q, p, 2);
        let fac = minimal_cofibrant_replacement(&x).unwrap();
        prop_assert!(is_cofibrant(&fac.complex));
        fac.complex.validate().unwrap();
        let c = classify_morphism(&fac.pi, &fac.complex, &x);
        prop_assert!(c.weak_equivalence && c.fibration);
    }

    #[test]
    fn end_ring_is_closed(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 5));
        let x = random_chain_functor(&mut r, q, p, 2);
        let ring = EndRing::new(&x);
        prop_assume!(ring.dim() > 0);
        let (i, j) = (r.gen_range(0..ring.dim()), r.gen_range(0..ring.dim()));
        let (a, b) = (ring.element(&unit(ring.dim(), i)), ring.element(&unit(ring.dim(), j)));
        let ab = a.compose(&b);
        prop_assert!(ring.contains(&ab));
        prop_assert_eq!(ring.coords(&ab), ring.structure_constants(i, j).to_vec());
        prop_assert!(ring.element(ring.identity_coords()).is_identity());
    }

    #[test]
    fn fitting_witnesses_split(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 5));
        let x = random_chain_functor(&mut r, q, p, 2);
        prop_assume!(!x.is_zero());
        let res = indecomposable(&x, Search::Fitting { budget: 8, seed }).unwrap();
        if let Indecomposability::Certain { indecomposable: false, witness: Some(phi) } = res {
            let e = fitting_idempotent(&fitting_power(&x, &phi));
            let s = split_by_idempotent(&x, &e).unwrap();
            prop_assert!(!s.x1.is_zero() && !s.x2.is_zero());
            prop_assert_eq!(s.x1.total_dim() + s.x2.total_dim(), x.total_dim());
            prop_assert!(s.r1.compose(&s.i1).is_identity() && s.r2.compose(&s.i2).is_identity());
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    (0..n).map(|k| u32::from(k == i)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn decompose_then_reassemble(seed in any::<u64>(), p in prime()) {
        let mut r = rng(seed);
        let q = Arc::new(random_dim1_poset(&mut r, 6));
        let (x, expected) = random_cofibrant(&mut r, q, p, 3, 4);
        let d = structure_decompose(&x).unwrap();
        let mut got: Vec<_> = d.summands.iter().map(|s| s.label.key()).collect();
        got.sort();
        prop_assert_eq!(got, expected);
        let (sum, iso) = reassemble(&d);
        prop_assert!(iso.is_iso() && iso.is_chain_map(&sum, &d.object));
    }
}
