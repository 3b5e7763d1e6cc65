//! Functors valued in bounded non-negative chain complexes.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functor::{
    self, from_generators, generator_projection, generator_vector, is_projective, minimal_cover, minimal_resolution,
    same_poset, subfunctor, sum_injections, Morphism, VectFunctor,
};
use crate::linalg::Mat;
use crate::poset::FinPoset;

/// A functor `D → Ch(vect)`: one functor per degree `0..=top` and natural boundaries.
#[derive(Clone, Debug)]
pub struct ChainFunctor {
    degrees: Vec<VectFunctor>,
    /// `bd[n - 1]` is `∂_n: X_n → X_{n−1}`.
    bd: Vec<Morphism>,
}

/// A chain map, one natural transformation per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub degs: Vec<Morphism>,
}

impl ChainFunctor {
    /// Validates that boundaries are natural and square to zero.
    pub fn new(degrees: Vec<VectFunctor>, bd: Vec<Morphism>) -> Result<ChainFunctor> {
        let x = ChainFunctor::new_unchecked(degrees, bd)?;
        x.validate()?;
        Ok(x)
    }

    pub fn new_unchecked(degrees: Vec<VectFunctor>, bd: Vec<Morphism>) -> Result<ChainFunctor> {
        if degrees.is_empty() {
            return Err(Error::Shape("a chain functor needs degree 0".into()));
        }
        if bd.len() + 1 != degrees.len() {
            return Err(Error::Shape(format!("{} boundaries for top degree {}", bd.len(), degrees.len() - 1)));
        }
        let poset = degrees[0].poset().clone();
        let p = degrees[0].p();
        for d in &degrees {
            if !same_poset(d.poset(), &poset) {
                return Err(Error::Shape("degrees live on different posets".into()));
            }
            if d.p() != p {
                return Err(Error::FieldMismatch(d.p(), p));
            }
        }
        let degrees: Vec<VectFunctor> = degrees.into_iter().map(|d| d.with_poset(poset.clone())).collect();
        for (i, b) in bd.iter().enumerate() {
            let (src, tgt) = (&degrees[i + 1], &degrees[i]);
            if b.comps.len() != poset.len()
                || (0..poset.len()).any(|x| b.comps[x].shape() != (tgt.dim(x), src.dim(x)))
            {
                return Err(Error::Shape(format!("boundary in degree {} has the wrong shape", i + 1)));
            }
        }
        Ok(ChainFunctor { degrees, bd })
    }

    /// Builds from per-element data: `dims[x][n]`, `bds[x][n-1] = ∂_n(x)`, `maps[c][n]` per cover.
    pub fn from_parts(
        poset: Arc<FinPoset>,
        p: u32,
        top: usize,
        dims: &[Vec<usize>],
        bds: &[Vec<Mat>],
        maps: &[Vec<Mat>],
    ) -> Result<ChainFunctor> {
        let n = poset.len();
        let mut degrees = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let dk = (0..n).map(|x| dims[x][k]).collect();
            let mk = maps.iter().map(|m| m[k].clone()).collect();
            degrees.push(VectFunctor::new_unchecked(poset.clone(), p, dk, mk)?);
        }
        let bd = (1..=top).map(|k| Morphism { comps: (0..n).map(|x| bds[x][k - 1].clone()).collect() }).collect();
        let x = ChainFunctor::new_unchecked(degrees, bd)?;
        x.validate()?;
        Ok(x)
    }

    /// Checks ∂∂ = 0, that structure maps are chain maps, and functoriality.
    pub fn validate(&self) -> Result<()> {
        let poset = self.poset().clone();
        for n in 2..=self.top() {
            for x in 0..poset.len() {
                if !self.bd[n - 2].comps[x].mul(&self.bd[n - 1].comps[x]).is_zero() {
                    return Err(Error::NotChainComplex { element: poset.name(x).to_string(), degree: n });
                }
            }
        }
        for n in 1..=self.top() {
            let b = &self.bd[n - 1];
            let (src, tgt) = (&self.degrees[n], &self.degrees[n - 1]);
            for (c, &(y, x)) in poset.covers().iter().enumerate() {
                if tgt.maps()[c].mul(&b.comps[y]) != b.comps[x].mul(&src.maps()[c]) {
                    return Err(Error::NotChainMap {
                        y: poset.name(y).to_string(),
                        x: poset.name(x).to_string(),
                        degree: n,
                    });
                }
            }
        }
        for d in &self.degrees {
            d.check_functorial()?;
        }
        Ok(())
    }

    /// A functor placed in degree 0.
    pub fn from_vect(f: &VectFunctor) -> ChainFunctor {
        ChainFunctor { degrees: vec![f.clone()], bd: Vec::new() }
    }

    pub fn zero(poset: Arc<FinPoset>, p: u32) -> ChainFunctor {
        ChainFunctor { degrees: vec![VectFunctor::zero(poset, p)], bd: Vec::new() }
    }

    /// `S^n(A)`: `A` in degree `n`.
    pub fn sphere(a: &VectFunctor, n: usize) -> ChainFunctor {
        let z = VectFunctor::zero(a.poset().clone(), a.p());
        let mut degrees = vec![z.clone(); n];
        degrees.push(a.clone());
        let bd = (1..=n).map(|k| Morphism::zero(&degrees[k], &degrees[k - 1])).collect();
        ChainFunctor { degrees, bd }
    }

    /// `D^n(A)`: identity `A → A` in degrees `(n, n−1)`; `D^0 = S^0`.
    pub fn disk(a: &VectFunctor, n: usize) -> ChainFunctor {
        if n == 0 {
            return ChainFunctor::sphere(a, 0);
        }
        ChainFunctor::two_term(a, a, &Morphism::identity(a), n - 1)
    }

    /// `b → a` with `a` in degree `m` and `b` in degree `m + 1`.
    pub fn two_term(a: &VectFunctor, b: &VectFunctor, d: &Morphism, m: usize) -> ChainFunctor {
        let z = VectFunctor::zero(a.poset().clone(), a.p());
        let mut degrees = vec![z; m];
        degrees.push(a.clone());
        degrees.push(b.clone());
        let mut bd: Vec<Morphism> = (1..=m).map(|k| Morphism::zero(&degrees[k], &degrees[k - 1])).collect();
        bd.push(d.clone());
        ChainFunctor { degrees, bd }
    }

    /// Shift every degree up by one.
    pub fn suspension(&self) -> ChainFunctor {
        let z = VectFunctor::zero(self.poset().clone(), self.p());
        let mut degrees = vec![z];
        degrees.extend(self.degrees.iter().cloned());
        let mut bd = vec![Morphism::zero(&degrees[1], &degrees[0])];
        bd.extend(self.bd.iter().cloned());
        ChainFunctor { degrees, bd }
    }

    pub fn poset(&self) -> &Arc<FinPoset> {
        self.degrees[0].poset()
    }

    pub fn p(&self) -> u32 {
        self.degrees[0].p()
    }

    pub fn top(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn degree(&self, n: usize) -> &VectFunctor {
        &self.degrees[n]
    }

    pub fn degrees(&self) -> &[VectFunctor] {
        &self.degrees
    }

    /// `∂_n`, for `1 ≤ n ≤ top`.
    pub fn boundary(&self, n: usize) -> &Morphism {
        &self.bd[n - 1]
    }

    /// `∂_n` for any `n`, zero outside `1..=top`.
    pub fn boundary_or_zero(&self, n: usize) -> Morphism {
        let z = VectFunctor::zero(self.poset().clone(), self.p());
        match n {
            0 => Morphism::zero(&self.degrees[0], &z),
            n if n <= self.top() => self.bd[n - 1].clone(),
            n if n == self.top() + 1 => Morphism::zero(&z, &self.degrees[self.top()]),
            _ => Morphism::zero(&z, &z),
        }
    }

    /// Dimensions at an element, degree by degree.
    pub fn element_dims(&self, x: usize) -> Vec<usize> {
        self.degrees.iter().map(|d| d.dim(x)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.iter().map(VectFunctor::total_dim).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.degrees.iter().all(VectFunctor::is_zero)
    }

    /// Pads with zero degrees up to `top`, or drops trailing zero degrees down to it.
    pub fn with_top(&self, top: usize) -> ChainFunctor {
        let mut out = self.clone();
        while out.top() < top {
            let z = VectFunctor::zero(self.poset().clone(), self.p());
            out.bd.push(Morphism::zero(&z, &out.degrees[out.top()]));
            out.degrees.push(z);
        }
        while out.top() > top {
            assert!(out.degrees[out.top()].is_zero(), "cannot drop a nonzero degree");
            out.degrees.pop();
            out.bd.pop();
        }
        out
    }

    /// Drops trailing zero degrees.
    pub fn trimmed(&self) -> ChainFunctor {
        let mut top = self.top();
        while top > 0 && self.degrees[top].is_zero() {
            top -= 1;
        }
        self.with_top(top)
    }

    /// Direct sum of complexes on the same poset.
    pub fn direct_sum(poset: Arc<FinPoset>, p: u32, parts: &[ChainFunctor]) -> ChainFunctor {
        let top = parts.iter().map(ChainFunctor::top).max().unwrap_or(0);
        let parts: Vec<ChainFunctor> = parts.iter().map(|c| c.with_top(top)).collect();
        let n = poset.len();
        let degrees = (0..=top)
            .map(|k| {
                VectFunctor::direct_sum(poset.clone(), p, &parts.iter().map(|c| c.degrees[k].clone()).collect::<Vec<_>>())
            })
            .collect();
        let bd = (1..=top)
            .map(|k| Morphism::block_diag(p, &parts.iter().map(|c| c.bd[k - 1].clone()).collect::<Vec<_>>(), n))
            .collect();
        ChainFunctor { degrees, bd }
    }

    /// Re-coordinatizes by invertible matrices `a[n][x]`.
    pub fn conjugate(&self, a: &[Vec<Mat>]) -> ChainFunctor {
        let degrees: Vec<VectFunctor> = self.degrees.iter().zip(a).map(|(d, m)| d.conjugate(m)).collect();
        let bd = (1..=self.top())
            .map(|k| Morphism {
                comps: self.bd[k - 1]
                    .comps
                    .iter()
                    .enumerate()
                    .map(|(x, b)| a[k - 1][x].mul(b).mul(&a[k][x].inverse().expect("invertible")))
                    .collect(),
            })
            .collect();
        ChainFunctor { degrees, bd }
    }

    /// Restriction to a full subposet.
    pub fn restrict(&self, elements: &[usize]) -> ChainFunctor {
        let sub = Arc::new(self.poset().induced(elements));
        let degrees = self.degrees.iter().map(|d| d.restrict_to(sub.clone(), elements)).collect();
        let bd = self
            .bd
            .iter()
            .map(|b| Morphism { comps: elements.iter().map(|&e| b.comps[e].clone()).collect() })
            .collect();
        ChainFunctor { degrees, bd }
    }

    /// Degreewise subcomplex spanned by `bases[n][x]`, closed under structure maps and boundaries.
    pub fn subcomplex(&self, bases: Vec<Vec<Mat>>) -> (ChainFunctor, ChainMap) {
        let mut degrees = Vec::new();
        let mut incl = Vec::new();
        for (k, b) in bases.into_iter().enumerate() {
            let (f, i) = subfunctor(&self.degrees[k], b);
            degrees.push(f);
            incl.push(i);
        }
        let bd = (1..=self.top())
            .map(|k| Morphism {
                comps: (0..self.poset().len())
                    .map(|x| {
                        incl[k - 1].comps[x]
                            .solve(&self.bd[k - 1].comps[x].mul(&incl[k].comps[x]))
                            .expect("subcomplex closed under boundary")
                    })
                    .collect(),
            })
            .collect();
        (ChainFunctor { degrees, bd }, ChainMap { degs: incl })
    }
}

impl ChainMap {
    pub fn identity(x: &ChainFunctor) -> ChainMap {
        ChainMap { degs: x.degrees.iter().map(Morphism::identity).collect() }
    }

    pub fn zero(src: &ChainFunctor, tgt: &ChainFunctor) -> ChainMap {
        assert_eq!(src.top(), tgt.top(), "pad complexes to a common top degree first");
        ChainMap { degs: src.degrees.iter().zip(&tgt.degrees).map(|(s, t)| Morphism::zero(s, t)).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> ChainMap {
        ChainMap { degs: self.degs.iter().zip(&other.degs).map(|(a, b)| a.compose(b)).collect() }
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        ChainMap { degs: self.degs.iter().zip(&other.degs).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &ChainMap) -> ChainMap {
        ChainMap { degs: self.degs.iter().zip(&other.degs).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: u32) -> ChainMap {
        ChainMap { degs: self.degs.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.degs.iter().all(Morphism::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.degs.iter().all(Morphism::is_identity)
    }

    pub fn is_iso(&self) -> bool {
        self.degs.iter().all(Morphism::is_iso)
    }

    pub fn inverse(&self) -> Option<ChainMap> {
        self.degs.iter().map(Morphism::inverse).collect::<Option<Vec<_>>>().map(|degs| ChainMap { degs })
    }

    /// Whether every degree is natural and the boundaries commute.
    pub fn is_chain_map(&self, src: &ChainFunctor, tgt: &ChainFunctor) -> bool {
        if self.degs.len() != src.degrees.len() || src.top() != tgt.top() {
            return false;
        }
        if !self.degs.iter().zip(src.degrees.iter().zip(&tgt.degrees)).all(|(m, (s, t))| m.is_natural(s, t)) {
            return false;
        }
        (1..=src.top()).all(|k| tgt.bd[k - 1].compose(&self.degs[k]) == self.degs[k - 1].compose(&src.bd[k - 1]))
    }

    /// Extends with zero components up to `top`.
    pub fn padded(&self, src: &ChainFunctor, tgt: &ChainFunctor) -> ChainMap {
        let top = src.top().max(tgt.top());
        let (s, t) = (src.with_top(top), tgt.with_top(top));
        let mut degs = self.degs.clone();
        for k in degs.len()..=top {
            degs.push(Morphism::zero(&s.degrees[k], &t.degrees[k]));
        }
        ChainMap { degs }
    }
}

/// Block inclusions and projections of a direct sum of complexes with a common top degree.
pub fn chain_sum_injections(parts: &[ChainFunctor]) -> (Vec<ChainMap>, Vec<ChainMap>) {
    let Some(first) = parts.first() else { return (Vec::new(), Vec::new()) };
    let top = first.top();
    let mut inj = vec![ChainMap { degs: Vec::new() }; parts.len()];
    let mut proj = vec![ChainMap { degs: Vec::new() }; parts.len()];
    for k in 0..=top {
        let (i, p) = sum_injections(&parts.iter().map(|c| c.degrees[k].clone()).collect::<Vec<_>>());
        for (j, (a, b)) in i.into_iter().zip(p).enumerate() {
            inj[j].degs.push(a);
            proj[j].degs.push(b);
        }
    }
    (inj, proj)
}

/// Kernel of a chain map with its inclusion.
pub fn chain_kernel(phi: &ChainMap, src: &ChainFunctor) -> (ChainFunctor, ChainMap) {
    src.subcomplex(phi.degs.iter().map(|m| m.comps.iter().map(Mat::kernel).collect()).collect())
}

/// Cokernel of a chain map with its projection.
pub fn chain_cokernel(phi: &ChainMap, tgt: &ChainFunctor) -> (ChainFunctor, ChainMap) {
    let quots: Vec<functor::Quotient> =
        phi.degs.iter().zip(&tgt.degrees).map(|(m, t)| functor::cokernel(m, t)).collect();
    let bd = (1..=tgt.top())
        .map(|k| Morphism {
            comps: (0..tgt.poset().len())
                .map(|x| quots[k - 1].proj.comps[x].mul(&tgt.bd[k - 1].comps[x]).mul(&quots[k].sections[x]))
                .collect(),
        })
        .collect();
    let proj = ChainMap { degs: quots.iter().map(|q| q.proj.clone()).collect() };
    (ChainFunctor { degrees: quots.into_iter().map(|q| q.functor).collect(), bd }, proj)
}

/// Homology functor in one degree with the data to move between cycles and classes.
#[derive(Clone, Debug)]
pub struct Homology {
    pub functor: VectFunctor,
    /// Basis of the cycles inside `X_n(x)`.
    pub cycles: Vec<Mat>,
    /// Cycle coordinates to classes.
    pub proj: Vec<Mat>,
    /// Classes to cycle coordinates.
    pub section: Vec<Mat>,
}

impl Homology {
    /// Class of a cycle `v ∈ X_n(x)`.
    pub fn class_of(&self, x: usize, v: &Mat) -> Mat {
        self.proj[x].mul(&self.cycles[x].solve(v).expect("vector is a cycle"))
    }

    /// A representing cycle of a class.
    pub fn representative(&self, x: usize, h: &Mat) -> Mat {
        self.cycles[x].mul(&self.section[x]).mul(h)
    }

    /// The quotient from cycles, as a matrix out of `X_n(x)` defined on cycles.
    pub fn quotient_on_cycles(&self, x: usize) -> Mat {
        self.proj[x].clone()
    }
}

pub fn homology(x: &ChainFunctor, n: usize) -> Homology {
    let poset = x.poset().clone();
    let p = x.p();
    let xn = if n <= x.top() { x.degrees[n].clone() } else { VectFunctor::zero(poset.clone(), p) };
    let dn = x.boundary_or_zero(n);
    let dn1 = x.boundary_or_zero(n + 1);
    let m = poset.len();
    let cycles: Vec<Mat> = (0..m)
        .map(|e| if n <= x.top() { dn.comps[e].kernel() } else { Mat::zeros(p, 0, 0) })
        .collect();
    let kcs: Vec<_> = (0..m)
        .map(|e| {
            let b = if n < x.top() { dn1.comps[e].clone() } else { Mat::zeros(p, xn.dim(e), 0) };
            cycles[e].solve(&b).expect("boundaries are cycles").kernel_and_cokernel()
        })
        .collect();
    let dims = kcs.iter().map(|k| k.coker.rows()).collect();
    let maps = poset
        .covers()
        .iter()
        .enumerate()
        .map(|(c, &(y, z))| {
            let moved = xn.maps()[c].mul(&cycles[y]);
            let coords = cycles[z].solve(&moved).expect("structure maps preserve cycles");
            kcs[z].coker.mul(&coords).mul(&kcs[y].section)
        })
        .collect();
    let functor = VectFunctor::new_unchecked(poset, p, dims, maps).expect("homology shapes");
    Homology {
        functor,
        cycles,
        proj: kcs.iter().map(|k| k.coker.clone()).collect(),
        section: kcs.into_iter().map(|k| k.section).collect(),
    }
}

/// Map induced on `H_n` by a chain map.
pub fn homology_map(phi: &ChainMap, hs: &Homology, ht: &Homology, n: usize) -> Morphism {
    let m = hs.cycles.len();
    let comps = (0..m)
        .map(|x| {
            if hs.functor.dim(x) == 0 || ht.functor.dim(x) == 0 {
                return Mat::zeros(hs.functor.p(), ht.functor.dim(x), hs.functor.dim(x));
            }
            let reps = hs.cycles[x].mul(&hs.section[x]);
            let img = phi.degs[n].comps[x].mul(&reps);
            ht.class_of(x, &img)
        })
        .collect();
    Morphism { comps }
}

/// Model-structure classification of a chain map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MorphismClass {
    pub weak_equivalence: bool,
    pub fibration: bool,
    pub cofibration: bool,
}

pub fn classify_morphism(phi: &ChainMap, src: &ChainFunctor, tgt: &ChainFunctor) -> MorphismClass {
    let top = src.top().max(tgt.top());
    let (s, t) = (src.with_top(top), tgt.with_top(top));
    let phi = phi.padded(src, tgt);
    let weak_equivalence = (0..=top + 1).all(|n| {
        let (hs, ht) = (homology(&s, n), homology(&t, n));
        hs.functor.dims() == ht.functor.dims() && homology_map(&phi, &hs, &ht, n).is_iso()
    });
    let fibration = (1..=top).all(|n| phi.degs[n].is_epi());
    let cofibration = (0..=top).all(|n| {
        phi.degs[n].is_mono() && is_projective(&functor::cokernel(&phi.degs[n], &t.degrees[n]).functor).is_some()
    });
    MorphismClass { weak_equivalence, fibration, cofibration }
}

/// Whether every degree is a projective functor.
pub fn is_cofibrant(x: &ChainFunctor) -> bool {
    x.degrees.iter().all(|d| is_projective(d).is_some())
}

/// Minimal projective cover `⊕_n D^n(P_n) → X`.
#[derive(Clone, Debug)]
pub struct ChainCover {
    /// Generators of `P_n` per degree.
    pub gens: Vec<Vec<usize>>,
    pub complex: ChainFunctor,
    pub map: ChainMap,
}

pub fn minimal_projective_cover_ch(x: &ChainFunctor) -> ChainCover {
    let poset = x.poset().clone();
    let p = x.p();
    let top = x.top();
    let mut gens = Vec::new();
    let mut frees = Vec::new();
    let mut lifts = Vec::new();
    for n in 0..=top {
        let q = functor::cokernel(&x.boundary_or_zero(n + 1), &x.degrees[n]);
        let cov = minimal_cover(&q.functor);
        let vecs: Vec<Mat> = cov
            .gens
            .iter()
            .enumerate()
            .map(|(g, &z)| {
                let v = cov.map.comps[z].mul(&generator_vector(&poset, p, &cov.gens, g));
                q.sections[z].mul(&v)
            })
            .collect();
        lifts.push(from_generators(&cov.gens, &x.degrees[n], &vecs));
        gens.push(cov.gens.clone());
        frees.push(cov.free);
    }
    let parts: Vec<ChainFunctor> = frees.iter().enumerate().map(|(n, f)| ChainFunctor::disk(f, n).with_top(top)).collect();
    let complex = ChainFunctor::direct_sum(poset, p, &parts);
    let degs = (0..=top)
        .map(|k| {
            let mut blocks = Vec::new();
            for n in 0..=top {
                let m = if n == k {
                    lifts[n].clone()
                } else if n == k + 1 {
                    x.bd[k].compose(&lifts[n])
                } else {
                    Morphism::zero(&parts[n].degrees[k], &x.degrees[k])
                };
                blocks.push(m);
            }
            Morphism::hjoin(p, &x.degrees[k], &blocks)
        })
        .collect();
    ChainCover { gens, complex, map: ChainMap { degs } }
}

/// Iterated minimal covers of `x` until the kernel vanishes; the stages of the
/// minimal projective resolution, first to last.
pub fn minimal_resolution_ch(x: &ChainFunctor, max_len: usize) -> Result<Vec<ChainCover>> {
    let mut stages = Vec::new();
    let mut cur = x.clone();
    for _ in 0..=max_len {
        let cov = minimal_projective_cover_ch(&cur);
        let (k, _) = chain_kernel(&cov.map, &cov.complex);
        stages.push(cov);
        if k.is_zero() {
            return Ok(stages);
        }
        cur = k.trimmed();
    }
    Err(Error::NoTermination(max_len))
}

/// Projective dimension: length of the minimal projective resolution.
pub fn projective_dimension(x: &ChainFunctor, max_len: usize) -> Result<usize> {
    Ok(minimal_resolution_ch(x, max_len)?.len() - 1)
}

/// `X → C → Y` with `c` a cofibration and `π` a fibration and weak equivalence.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub complex: ChainFunctor,
    pub c: ChainMap,
    pub pi: ChainMap,
    /// Generators of the projective added in each degree.
    pub added: Vec<Vec<usize>>,
}

/// The staircase construction, degree by degree.
pub fn minimal_cofibrant_factorization(f: &ChainMap, x: &ChainFunctor, y: &ChainFunctor) -> Result<Factorization> {
    let poset = x.poset().clone();
    let p = x.p();
    let top = x.top().max(y.top());
    let (x, y) = (x.with_top(top), y.with_top(top));
    let f = f.padded(&x, &y);
    let n_el = poset.len();
    let zero_f = VectFunctor::zero(poset.clone(), p);
    let cap = top + n_el + 3;

    let mut w: Vec<VectFunctor> = Vec::new();
    let mut c_maps: Vec<Morphism> = Vec::new();
    let mut p_maps: Vec<Morphism> = Vec::new();
    let mut q_objs: Vec<VectFunctor> = Vec::new();
    let mut q_bases: Vec<Vec<Mat>> = Vec::new();
    let mut alphas: Vec<Morphism> = Vec::new();
    let mut qs: Vec<Morphism> = Vec::new();
    let mut added = Vec::new();

    let mut n = 0;
    loop {
        if n > cap {
            return Err(Error::NoTermination(cap));
        }
        let xn = if n <= top { x.degrees[n].clone() } else { zero_f.clone() };
        let yn = if n <= top { y.degrees[n].clone() } else { zero_f.clone() };
        let fn_ = if n <= top { f.degs[n].clone() } else { Morphism::zero(&xn, &yn) };
        let (qn, g, alpha, q) = if n == 0 {
            let ident: Vec<Mat> = (0..n_el).map(|e| Mat::identity(p, yn.dim(e))).collect();
            q_bases.push(ident);
            (yn.clone(), fn_.clone(), Morphism::zero(&yn, &zero_f), Morphism::identity(&yn))
        } else {
            let wp = &w[n - 1];
            let pp = &p_maps[n - 1];
            let dy = if n <= top { y.bd[n - 1].clone() } else { Morphism::zero(&yn, if n - 1 <= top { &y.degrees[n - 1] } else { &zero_f }) };
            // β_n: Y_n → Q_{n−1}, mediating (0, ∂_n).
            let beta = Morphism {
                comps: (0..n_el)
                    .map(|e| {
                        let wdim = if n >= 2 { w[n - 2].dim(e) } else { 0 };
                        let target = Mat::zeros(p, wdim, yn.dim(e)).vstack(&dy.comps[e]);
                        if n == 1 {
                            dy.comps[e].clone()
                        } else {
                            q_bases[n - 1][e].solve(&target).expect("(0, ∂) factors through the pullback")
                        }
                    })
                    .collect(),
            };
            let sum = VectFunctor::direct_sum(poset.clone(), p, &[wp.clone(), yn.clone()]);
            let bases: Vec<Mat> = (0..n_el).map(|e| pp.comps[e].pullback(&beta.comps[e])).map(|pb| pb.to_a.vstack(&pb.to_b)).collect();
            let (qn, incl) = subfunctor(&sum, bases.clone());
            let (_, projs) = sum_injections(&[wp.clone(), yn.clone()]);
            let alpha = projs[0].compose(&incl);
            let q = projs[1].compose(&incl);
            let dx = if n <= top { x.bd[n - 1].clone() } else { Morphism::zero(&xn, if n - 1 <= top { &x.degrees[n - 1] } else { &zero_f }) };
            let prev_c = c_maps[n - 1].compose(&dx);
            let g = Morphism {
                comps: (0..n_el)
                    .map(|e| bases[e].solve(&prev_c.comps[e].vstack(&fn_.comps[e])).expect("mediating map exists"))
                    .collect(),
            };
            q_bases.push(bases);
            (qn, g, alpha, q)
        };
        if n > top && qn.is_zero() {
            break;
        }
        // Minimal projective factorization of g: X_n → Q_n.
        let quot = functor::cokernel(&g, &qn);
        let cov = minimal_cover(&quot.functor);
        let vecs: Vec<Mat> = cov
            .gens
            .iter()
            .enumerate()
            .map(|(i, &z)| quot.sections[z].mul(&cov.map.comps[z].mul(&generator_vector(&poset, p, &cov.gens, i))))
            .collect();
        let lift = from_generators(&cov.gens, &qn, &vecs);
        let wn = VectFunctor::direct_sum(poset.clone(), p, &[xn.clone(), cov.free.clone()]);
        let (inj, _) = sum_injections(&[xn.clone(), cov.free.clone()]);
        let pn = Morphism::hjoin(p, &qn, &[g, lift]);
        added.push(cov.gens.clone());
        c_maps.push(inj[0].clone());
        p_maps.push(pn);
        w.push(wn);
        q_objs.push(qn);
        alphas.push(alpha);
        qs.push(q);
        n += 1;
    }
    let ctop = w.len() - 1;
    let bd: Vec<Morphism> = (1..=ctop).map(|k| alphas[k].compose(&p_maps[k])).collect();
    let complex = ChainFunctor::new_unchecked(w, bd)?;
    let pi_degs: Vec<Morphism> = (0..=ctop).map(|k| qs[k].compose(&p_maps[k])).collect();
    let final_top = ctop.max(top);
    let complex = complex.with_top(final_top);
    let (xp, yp) = (x.with_top(final_top), y.with_top(final_top));
    let c = ChainMap { degs: c_maps }.padded(&xp, &complex);
    let pi = ChainMap { degs: pi_degs }.padded(&complex, &yp);
    Ok(Factorization { complex: complex.trimmed(), c, pi, added })
}

/// Minimal cofibrant replacement `π: C → X`.
pub fn minimal_cofibrant_replacement(x: &ChainFunctor) -> Result<Factorization> {
    let zero = ChainFunctor::zero(x.poset().clone(), x.p()).with_top(x.top());
    let f = ChainMap::zero(&zero, x);
    minimal_cofibrant_factorization(&f, &zero, x)
}

/// Kind of an indecomposable cofibrant summand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SummandKind {
    Sphere,
    Disk,
}

/// Label of one summand.
#[derive(Clone, Debug)]
pub struct SummandLabel {
    pub kind: SummandKind,
    pub degree: usize,
    /// Generators of `P[n]_0` for a sphere, of `Y_n` for a disk.
    pub gens0: Vec<usize>,
    /// Generators of `P[n]_1` for a sphere; empty for a disk.
    pub gens1: Vec<usize>,
    /// The resolution mono `P[n]_1 → P[n]_0` for a sphere.
    pub resolution: Option<Morphism>,
}

impl SummandLabel {
    /// Comparable key: kind, degree and sorted generator lists.
    pub fn key(&self) -> (SummandKind, usize, Vec<usize>, Vec<usize>) {
        let mut g0 = self.gens0.clone();
        let mut g1 = self.gens1.clone();
        g0.sort_unstable();
        g1.sort_unstable();
        (self.kind, self.degree, g0, g1)
    }
}

/// One summand with its split mono into and split epi out of the decomposed object.
#[derive(Clone, Debug)]
pub struct Summand {
    pub label: SummandLabel,
    pub complex: ChainFunctor,
    pub iota: ChainMap,
    pub rho: ChainMap,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// The decomposed object, padded to the common top degree of all maps.
    pub object: ChainFunctor,
    pub summands: Vec<Summand>,
}

/// Splits a vector-space functor into summands with inclusions and retractions.
pub type Splitter<'a> = dyn Fn(&VectFunctor) -> Vec<(VectFunctor, Morphism, Morphism)> + 'a;

/// Sphere/disk decomposition of a cofibrant chain functor. `split` refines each
/// homology functor into summands; each becomes its own sphere.
pub fn structure_decompose_with(c: &ChainFunctor, split: &Splitter<'_>) -> Result<Decomposition> {
    let poset = c.poset().clone();
    let p = c.p();
    let top = c.top() + 1;
    let x0 = c.with_top(top);
    for n in 0..=x0.top() {
        if is_projective(&x0.degrees[n]).is_none() {
            return Err(Error::NotCofibrant(n));
        }
    }
    let n_el = poset.len();
    let mut resid = x0.clone();
    let mut k_into = ChainMap::identity(&x0);
    let mut r_from = ChainMap::identity(&x0);
    let mut summands = Vec::new();

    for m in 0..top {
        // Sphere step.
        let h = homology(&resid, m);
        if !h.functor.is_zero() {
            let pieces = split(&h.functor);
            let mut ress = Vec::new();
            for (hi, _, _) in &pieces {
                ress.push(minimal_resolution(hi).map_err(|_| Error::HomologyNotResolvable(m))?);
            }
            let p0s: Vec<VectFunctor> = ress.iter().map(|r| r.p0.free.clone()).collect();
            let p1s: Vec<VectFunctor> = ress.iter().map(|r| r.p1.free.clone()).collect();
            let gens0: Vec<usize> = ress.iter().flat_map(|r| r.p0.gens.iter().copied()).collect();
            let gens1: Vec<usize> = ress.iter().flat_map(|r| r.p1.gens.iter().copied()).collect();
            let p0 = VectFunctor::direct_sum(poset.clone(), p, &p0s);
            let p1 = VectFunctor::direct_sum(poset.clone(), p, &p1s);
            let d = Morphism::block_diag(p, &ress.iter().map(|r| r.d.clone()).collect::<Vec<_>>(), n_el);
            let aug_parts: Vec<Morphism> =
                pieces.iter().zip(&ress).map(|((_, j, _), r)| j.compose(&r.p0.map)).collect();
            let aug = Morphism::hjoin(p, &h.functor, &aug_parts);
            let rm = &resid.degrees[m];
            let rm1 = &resid.degrees[m + 1];
            let dm1 = &resid.bd[m];
            let q = Morphism { comps: (0..n_el).map(|x| h.proj[x].mul(&h.cycles[x].inverse().expect("all cycles"))).collect() };
            let s0 = from_generators(
                &gens0,
                rm,
                &(0..gens0.len())
                    .map(|g| {
                        let z = gens0[g];
                        let hv = aug.comps[z].mul(&generator_vector(&poset, p, &gens0, g));
                        q.comps[z].solve(&hv).expect("quotient is onto")
                    })
                    .collect::<Vec<_>>(),
            );
            let pres_m = is_projective(rm).ok_or(Error::NotCofibrant(m))?;
            let wm_inv = pres_m.witness.inverse().expect("presentation is an iso");
            let p0_map = from_generators(
                &pres_m.gens,
                &p0,
                &(0..pres_m.gens.len())
                    .map(|g| {
                        let z = pres_m.gens[g];
                        let v = pres_m.witness.comps[z].mul(&generator_vector(&poset, p, &pres_m.gens, g));
                        aug.comps[z].solve(&q.comps[z].mul(&v)).expect("cover is onto")
                    })
                    .collect::<Vec<_>>(),
            )
            .compose(&wm_inv);
            let s1 = from_generators(
                &gens1,
                rm1,
                &(0..gens1.len())
                    .map(|g| {
                        let z = gens1[g];
                        let v = s0.comps[z].mul(&d.comps[z]).mul(&generator_vector(&poset, p, &gens1, g));
                        dm1.comps[z].solve(&v).expect("lift along the boundary")
                    })
                    .collect::<Vec<_>>(),
            );
            let pres_m1 = is_projective(rm1).ok_or(Error::NotCofibrant(m + 1))?;
            let wm1_inv = pres_m1.witness.inverse().expect("presentation is an iso");
            let p1_map = from_generators(
                &pres_m1.gens,
                &p1,
                &(0..pres_m1.gens.len())
                    .map(|g| {
                        let z = pres_m1.gens[g];
                        let v = pres_m1.witness.comps[z].mul(&generator_vector(&poset, p, &pres_m1.gens, g));
                        d.comps[z].solve(&p0_map.comps[z].mul(&dm1.comps[z]).mul(&v)).expect("lift along d")
                    })
                    .collect::<Vec<_>>(),
            )
            .compose(&wm1_inv);
            let sphere = ChainFunctor::two_term(&p0, &p1, &d, m).with_top(top);
            let iota = place(&sphere, &resid, &[(m, s0), (m + 1, s1)]);
            let rho = place(&resid, &sphere, &[(m, p0_map), (m + 1, p1_map)]);
            let theta_inv = rho.compose(&iota).inverse().expect("ρι is an automorphism");
            let rho = theta_inv.compose(&rho);
            let parts: Vec<ChainFunctor> = ress
                .iter()
                .map(|r| ChainFunctor::two_term(&r.p0.free, &r.p1.free, &r.d, m).with_top(top))
                .collect();
            let (ins, prs) = chain_sum_injections(&parts);
            for (i, r) in ress.iter().enumerate() {
                summands.push(Summand {
                    label: SummandLabel {
                        kind: SummandKind::Sphere,
                        degree: m,
                        gens0: r.p0.gens.clone(),
                        gens1: r.p1.gens.clone(),
                        resolution: Some(r.d.clone()),
                    },
                    complex: parts[i].clone(),
                    iota: k_into.compose(&iota).compose(&ins[i]),
                    rho: prs[i].compose(&rho).compose(&r_from),
                });
            }
            split_off(&mut resid, &mut k_into, &mut r_from, &iota, &rho);
        }
        // Disk step.
        if !resid.degrees[m].is_zero() {
            let rm = resid.degrees[m].clone();
            let rm1 = resid.degrees[m + 1].clone();
            let dm1 = resid.bd[m].clone();
            let pres = is_projective(&rm).ok_or(Error::NotCofibrant(m))?;
            let w_inv = pres.witness.inverse().expect("presentation is an iso");
            let mut parts = Vec::new();
            let mut iotas = Vec::new();
            let mut rhos = Vec::new();
            for (g, &z) in pres.gens.iter().enumerate() {
                let v = pres.witness.comps[z].mul(&generator_vector(&poset, p, &pres.gens, g));
                let u = dm1.comps[z].solve(&v).map_err(|_| Error::NotCofibrant(m))?;
                let free = VectFunctor::free(poset.clone(), p, z, 1);
                let disk = ChainFunctor::disk(&free, m + 1).with_top(top);
                let i_top = from_generators(&[z], &rm1, &[u]);
                let i_bot = from_generators(&[z], &rm, &[v]);
                let pr = generator_projection(&pres.free, &pres.gens, g).compose(&w_inv);
                let iota = place(&disk, &resid, &[(m, i_bot), (m + 1, i_top)]);
                let rho = place(&resid, &disk, &[(m, pr.clone()), (m + 1, pr.compose(&dm1))]);
                parts.push(disk);
                iotas.push(iota);
                rhos.push(rho);
            }
            let block = ChainFunctor::direct_sum(poset.clone(), p, &parts);
            let iota = chain_hjoin(&block, &resid, &iotas);
            let rho = chain_vjoin(&resid, &block, &rhos);
            for (g, &z) in pres.gens.iter().enumerate() {
                summands.push(Summand {
                    label: SummandLabel { kind: SummandKind::Disk, degree: m, gens0: vec![z], gens1: Vec::new(), resolution: None },
                    complex: parts[g].clone(),
                    iota: k_into.compose(&iotas[g]),
                    rho: rhos[g].compose(&r_from),
                });
            }
            split_off(&mut resid, &mut k_into, &mut r_from, &iota, &rho);
        }
    }
    debug_assert!(resid.is_zero());
    Ok(Decomposition { object: x0, summands })
}

/// A chain map with the given nonzero degrees, zero elsewhere.
fn place(src: &ChainFunctor, tgt: &ChainFunctor, comps: &[(usize, Morphism)]) -> ChainMap {
    let mut m = ChainMap::zero(src, tgt);
    for (k, c) in comps {
        m.degs[*k] = c.clone();
    }
    m
}

/// `[f_1 … f_k]` out of a direct sum.
fn chain_hjoin(src: &ChainFunctor, tgt: &ChainFunctor, parts: &[ChainMap]) -> ChainMap {
    let p = tgt.p();
    let _ = src;
    ChainMap {
        degs: (0..=tgt.top())
            .map(|k| Morphism::hjoin(p, &tgt.degrees[k], &parts.iter().map(|m| m.degs[k].clone()).collect::<Vec<_>>()))
            .collect(),
    }
}

/// `[g_1; …; g_k]` into a direct sum.
fn chain_vjoin(src: &ChainFunctor, tgt: &ChainFunctor, parts: &[ChainMap]) -> ChainMap {
    let p = src.p();
    let _ = tgt;
    ChainMap {
        degs: (0..=src.top())
            .map(|k| Morphism::vjoin(p, &src.degrees[k], &parts.iter().map(|m| m.degs[k].clone()).collect::<Vec<_>>()))
            .collect(),
    }
}

/// Replaces `resid` by `ker ρ`, composing the running inclusion and retraction.
fn split_off(resid: &mut ChainFunctor, k_into: &mut ChainMap, r_from: &mut ChainMap, iota: &ChainMap, rho: &ChainMap) {
    let (next, k) = chain_kernel(rho, resid);
    let comp = ChainMap::identity(resid).sub(&iota.compose(rho));
    let r = ChainMap {
        degs: k
            .degs
            .iter()
            .zip(&comp.degs)
            .map(|(kd, cd)| Morphism {
                comps: kd.comps.iter().zip(&cd.comps).map(|(a, b)| a.solve(b).expect("complement lands in kernel")).collect(),
            })
            .collect(),
    };
    *k_into = k_into.compose(&k);
    *r_from = r.compose(r_from);
    *resid = next;
}

/// Direct sum of the summands with the isomorphism onto the decomposed object.
pub fn reassemble(d: &Decomposition) -> (ChainFunctor, ChainMap) {
    let poset = d.object.poset().clone();
    let p = d.object.p();
    let parts: Vec<ChainFunctor> = d.summands.iter().map(|s| s.complex.with_top(d.object.top())).collect();
    let sum = if parts.is_empty() {
        ChainFunctor::zero(poset, p).with_top(d.object.top())
    } else {
        ChainFunctor::direct_sum(poset, p, &parts)
    };
    let iotas: Vec<ChainMap> = d.summands.iter().map(|s| s.iota.clone()).collect();
    let iso = if iotas.is_empty() { ChainMap::zero(&sum, &d.object) } else { chain_hjoin(&sum, &d.object, &iotas) };
    (sum, iso)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shared(p: FinPoset) -> Arc<FinPoset> {
        Arc::new(p)
    }

    fn point() -> Arc<FinPoset> {
        shared(FinPoset::from_covers::<&str>(&["pt"], &[]).unwrap())
    }

    fn f1(q: &Arc<FinPoset>, p: u32) -> VectFunctor {
        VectFunctor::free(q.clone(), p, 0, 1)
    }

    fn unsplit(h: &VectFunctor) -> Vec<(VectFunctor, Morphism, Morphism)> {
        vec![(h.clone(), Morphism::identity(h), Morphism::identity(h))]
    }

    #[test]
    fn standard_complexes() {
        let q = point();
        let a = f1(&q, 2);
        assert_eq!(ChainFunctor::sphere(&a, 0).element_dims(0), vec![1]);
        let d1 = ChainFunctor::disk(&a, 1);
        assert_eq!(d1.element_dims(0), vec![1, 1]);
        assert!(d1.boundary(1).comps[0].is_identity());
        let s1 = ChainFunctor::sphere(&a, 0).suspension();
        assert_eq!(s1.element_dims(0), ChainFunctor::sphere(&a, 1).element_dims(0));
        for n in 1..4 {
            let mut dn = d1.clone();
            for _ in 1..n {
                dn = dn.suspension();
            }
            let direct = ChainFunctor::disk(&a, n);
            assert_eq!(dn.element_dims(0), direct.element_dims(0));
            assert!(dn.boundary(n).comps[0].is_identity());
        }
    }

    #[test]
    fn homology_of_standard_complexes() {
        let q = point();
        let a = VectFunctor::free(q.clone(), 3, 0, 2);
        let d2 = ChainFunctor::disk(&a, 2);
        for n in 0..4 {
            assert!(homology(&d2, n).functor.is_zero());
        }
        let s2 = ChainFunctor::sphere(&a, 2);
        for n in 0..4 {
            assert_eq!(homology(&s2, n).functor.dim(0), if n == 2 { 2 } else { 0 });
        }
    }

    #[test]
    fn validation_reports_element_and_degree() {
        let q = point();
        let a = f1(&q, 2);
        let one = Morphism::identity(&a);
        let bad = ChainFunctor::new(vec![a.clone(), a.clone(), a.clone()], vec![one.clone(), one]);
        assert!(matches!(bad, Err(Error::NotChainComplex { ref element, degree: 2 }) if element == "pt"));
    }

    #[test]
    fn classify_identity_and_inclusion_of_zero() {
        let q = shared(FinPoset::from_covers(&["a", "b"], &[("a", "b")]).unwrap());
        let x = ChainFunctor::disk(&VectFunctor::free(q.clone(), 2, 0, 1), 1);
        let c = classify_morphism(&ChainMap::identity(&x), &x, &x);
        assert!(c.weak_equivalence && c.fibration && c.cofibration);
        let z = ChainFunctor::zero(q, 2).with_top(1);
        let c = classify_morphism(&ChainMap::zero(&z, &x), &z, &x);
        assert!(c.cofibration);
    }

    #[test]
    fn sphere_cover_and_resolution() {
        let q = point();
        let a = f1(&q, 2);
        for n in 0..=5 {
            let s = ChainFunctor::sphere(&a, n);
            let cov = minimal_projective_cover_ch(&s);
            assert_eq!(cov.gens[n].len(), 1);
            let (k, _) = chain_kernel(&cov.map, &cov.complex);
            if n > 0 {
                assert_eq!(k.trimmed().element_dims(0), ChainFunctor::sphere(&a, n - 1).element_dims(0));
            }
            assert_eq!(projective_dimension(&s, 10).unwrap(), n);
        }
    }

    #[test]
    fn replacement_of_cofibrant_is_iso() {
        let q = point();
        let a = f1(&q, 5);
        let y = ChainFunctor::direct_sum(q.clone(), 5, &[ChainFunctor::disk(&a, 2), ChainFunctor::sphere(&a, 1)]);
        let fac = minimal_cofibrant_replacement(&y).unwrap();
        assert_eq!(fac.complex.total_dim(), y.total_dim());
        let c = fac.complex.with_top(y.top());
        assert!(fac.pi.padded(&c, &y).is_iso());
    }

    #[test]
    fn factorization_of_identity() {
        let q = shared(FinPoset::from_covers(&["a", "b"], &[("a", "b")]).unwrap());
        let a = VectFunctor::free(q.clone(), 2, 0, 1);
        let x = ChainFunctor::sphere(&a, 1);
        let fac = minimal_cofibrant_factorization(&ChainMap::identity(&x), &x, &x).unwrap();
        assert_eq!(fac.complex.total_dim(), x.total_dim());
        let c = fac.complex.with_top(x.top());
        assert!(fac.c.compose(&ChainMap::identity(&x)).is_chain_map(&x, &c));
        assert!(fac.pi.compose(&fac.c).is_identity());
    }

    #[test]
    fn decompose_small_sums() {
        let q = point();
        let a = f1(&q, 2);
        let x = ChainFunctor::direct_sum(q.clone(), 2, &[ChainFunctor::sphere(&a, 0), ChainFunctor::disk(&a, 1)]);
        let d = structure_decompose_with(&x, &unsplit).unwrap();
        assert_eq!(d.summands.len(), 2);
        let (sum, iso) = reassemble(&d);
        assert_eq!(sum.trimmed().element_dims(0), vec![2, 1]);
        assert!(iso.is_iso());
        assert!(iso.is_chain_map(&sum, &d.object));
        for s in &d.summands {
            let c = s.complex.with_top(d.object.top());
            assert!(s.rho.compose(&s.iota).is_identity());
            assert!(s.iota.is_chain_map(&c, &d.object));
        }
        let empty = Decomposition { object: ChainFunctor::zero(q, 2), summands: Vec::new() };
        assert!(reassemble(&empty).0.is_zero());
    }
}
