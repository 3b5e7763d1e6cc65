//! Seeded random instances for tests, acceptance runs and benchmarks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chaincx::{chain_cokernel, ChainFunctor, ChainMap, SummandKind};
use crate::decomp::hom_space;
use crate::functor::{cokernel, from_generators, minimal_resolution, Morphism, VectFunctor};
use crate::linalg::Mat;
use crate::poset::FinPoset;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("e{i}")).collect()
}

/// A random poset on at most `max_n` elements; `density` is the chance of each relation `i < j`.
pub fn random_poset(rng: &mut impl Rng, max_n: usize, density: f64) -> FinPoset {
    let n = rng.gen_range(1..=max_n);
    let rel: Vec<(usize, usize)> =
        (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).filter(|_| rng.gen_bool(density)).collect();
    FinPoset::new(names(n), &rel).expect("relations follow index order")
}

/// A random poset of dimension at most one.
pub fn random_dim1_poset(rng: &mut impl Rng, max_n: usize) -> FinPoset {
    loop {
        let q = random_poset(rng, max_n, 0.35);
        if q.dimension().at_most_one() {
            return q;
        }
    }
}

/// A random convex, connected subset of `q`.
pub fn random_interval(rng: &mut impl Rng, q: &FinPoset) -> Vec<usize> {
    let mut s = vec![rng.gen_range(0..q.len())];
    let grow = rng.gen_range(0..q.len());
    for _ in 0..grow {
        let mut nbrs: Vec<usize> = s
            .iter()
            .flat_map(|&x| q.lower_covers(x).iter().chain(q.upper_covers(x)).copied())
            .filter(|y| !s.contains(y))
            .collect();
        nbrs.sort_unstable();
        nbrs.dedup();
        let Some(&y) = nbrs.choose(rng) else { break };
        s.push(y);
        s = convex_hull(q, &s);
    }
    s.sort_unstable();
    s
}

fn convex_hull(q: &FinPoset, s: &[usize]) -> Vec<usize> {
    (0..q.len()).filter(|&y| s.iter().any(|&a| q.leq(a, y)) && s.iter().any(|&b| q.leq(y, b))).collect()
}

/// `F` on a convex support with identity maps.
pub fn interval_module(q: Arc<FinPoset>, p: u32, support: &[usize]) -> VectFunctor {
    let dims: Vec<usize> = (0..q.len()).map(|x| usize::from(support.contains(&x))).collect();
    let maps = q
        .covers()
        .iter()
        .map(|&(y, x)| if dims[y] == 1 && dims[x] == 1 { Mat::identity(p, 1) } else { Mat::zeros(p, dims[x], dims[y]) })
        .collect();
    VectFunctor::new(q, p, dims, maps).expect("convex support")
}

pub fn random_mat(rng: &mut impl Rng, p: u32, r: usize, c: usize) -> Mat {
    Mat::from_vec(p, r, c, (0..r * c).map(|_| rng.gen_range(0..p)).collect())
}

pub fn random_invertible(rng: &mut impl Rng, p: u32, n: usize) -> Mat {
    loop {
        let m = random_mat(rng, p, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

/// The same complex in random coordinates.
pub fn random_conjugation(rng: &mut impl Rng, x: &ChainFunctor) -> ChainFunctor {
    let a: Vec<Vec<Mat>> = x
        .degrees()
        .iter()
        .map(|d| (0..x.poset().len()).map(|e| random_invertible(rng, x.p(), d.dim(e))).collect())
        .collect();
    x.conjugate(&a)
}

/// Expected summand label: kind, degree, sorted generators of the two terms.
pub type LabelKey = (SummandKind, usize, Vec<usize>, Vec<usize>);

/// A shuffled, re-coordinatized sum of spheres on resolved intervals and disks on
/// representables, with the multiset of its summand labels.
pub fn random_cofibrant(
    rng: &mut impl Rng,
    q: Arc<FinPoset>,
    p: u32,
    max_top: usize,
    max_dim: usize,
) -> (ChainFunctor, Vec<LabelKey>) {
    loop {
        let count = rng.gen_range(1..=4);
        let mut parts = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..count {
            if rng.gen_bool(0.5) {
                let support = random_interval(rng, &q);
                let res = minimal_resolution(&interval_module(q.clone(), p, &support)).expect("dimension at most one");
                let m_max = if res.p1.gens.is_empty() { max_top } else { max_top - 1 };
                let m = rng.gen_range(0..=m_max);
                parts.push(ChainFunctor::two_term(&res.p0.free, &res.p1.free, &res.d, m));
                let mut g0 = res.p0.gens.clone();
                let mut g1 = res.p1.gens.clone();
                g0.sort_unstable();
                g1.sort_unstable();
                labels.push((SummandKind::Sphere, m, g0, g1));
            } else {
                let z = rng.gen_range(0..q.len());
                let m = rng.gen_range(0..max_top);
                parts.push(ChainFunctor::disk(&VectFunctor::free(q.clone(), p, z, 1), m + 1));
                labels.push((SummandKind::Disk, m, vec![z], Vec::new()));
            }
        }
        parts.shuffle(rng);
        let x = ChainFunctor::direct_sum(q.clone(), p, &parts).trimmed();
        if (0..q.len()).any(|e| x.element_dims(e).iter().any(|&d| d > max_dim)) {
            continue;
        }
        labels.sort();
        return (random_conjugation(rng, &x), labels);
    }
}

/// A sum of spheres and disks on interval modules, not necessarily cofibrant.
pub fn random_interval_complex(rng: &mut impl Rng, q: Arc<FinPoset>, p: u32, top: usize, count: usize) -> ChainFunctor {
    let parts: Vec<ChainFunctor> = (0..count)
        .map(|_| {
            let i = interval_module(q.clone(), p, &random_interval(rng, &q));
            if top > 0 && rng.gen_bool(0.5) {
                ChainFunctor::disk(&i, rng.gen_range(1..=top))
            } else {
                ChainFunctor::sphere(&i, rng.gen_range(0..=top))
            }
        })
        .collect();
    ChainFunctor::direct_sum(q, p, &parts).with_top(top)
}

/// A random chain map, as a random combination of a hom-space basis.
pub fn random_chain_map(rng: &mut impl Rng, x: &ChainFunctor, y: &ChainFunctor) -> ChainMap {
    let mut acc = ChainMap::zero(x, y);
    for b in hom_space(x, y) {
        let c = rng.gen_range(0..x.p());
        if c != 0 {
            acc = acc.add(&b.scale(c));
        }
    }
    acc
}

/// The cokernel of a random map between two interval complexes, in random coordinates.
pub fn random_chain_functor(rng: &mut impl Rng, q: Arc<FinPoset>, p: u32, top: usize) -> ChainFunctor {
    let (na, nb) = (rng.gen_range(0..=2), rng.gen_range(1..=3));
    let a = random_interval_complex(rng, q.clone(), p, top, na);
    let b = random_interval_complex(rng, q, p, top, nb);
    let f = random_chain_map(rng, &a, &b);
    let (c, _) = chain_cokernel(&f, &b);
    random_conjugation(rng, &c)
}

/// The cokernel of a random map between free functors.
pub fn random_presented_functor(rng: &mut impl Rng, q: Arc<FinPoset>, p: u32, gens0: usize, gens1: usize) -> VectFunctor {
    let g0: Vec<usize> = (0..gens0).map(|_| rng.gen_range(0..q.len())).collect();
    let g1: Vec<usize> = (0..gens1).map(|_| rng.gen_range(0..q.len())).collect();
    let f0 = VectFunctor::free_sum(q, p, &g0);
    let vecs: Vec<Mat> = g1.iter().map(|&z| random_mat(rng, p, f0.dim(z), 1)).collect();
    let rel: Morphism = from_generators(&g1, &f0, &vecs);
    cokernel(&rel, &f0).functor
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let q = Arc::new(random_dim1_poset(&mut rng, 6));
            assert!(q.dimension().at_most_one());
            let s = random_interval(&mut rng, &q);
            assert_eq!(convex_hull(&q, &s), s);
            let (c, labels) = random_cofibrant(&mut rng, q.clone(), 3, 3, 4);
            assert!(!labels.is_empty());
            c.validate().unwrap();
            random_chain_functor(&mut rng, q.clone(), 2, 2).validate().unwrap();
            random_presented_functor(&mut rng, q, 2, 3, 2).check_functorial().unwrap();
        }
    }
}
