//! Vector-space valued functors on finite posets.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::poset::FinPoset;

/// A functor `D → vect` given by a dimension per element and a matrix per cover.
#[derive(Clone, Debug)]
pub struct VectFunctor {
    poset: Arc<FinPoset>,
    p: u32,
    dims: Vec<usize>,
    maps: Vec<Mat>,
}

/// A natural transformation, one matrix per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub comps: Vec<Mat>,
}

/// Whether two functors live on the same poset.
pub fn same_poset(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl VectFunctor {
    /// Validates shapes and functoriality.
    pub fn new(poset: Arc<FinPoset>, p: u32, dims: Vec<usize>, maps: Vec<Mat>) -> Result<VectFunctor> {
        let f = VectFunctor::new_unchecked(poset, p, dims, maps)?;
        f.check_functorial()?;
        Ok(f)
    }

    /// Validates shapes only.
    pub fn new_unchecked(poset: Arc<FinPoset>, p: u32, dims: Vec<usize>, maps: Vec<Mat>) -> Result<VectFunctor> {
        if dims.len() != poset.len() {
            return Err(Error::Shape(format!("{} dims for {} elements", dims.len(), poset.len())));
        }
        if maps.len() != poset.covers().len() {
            return Err(Error::Shape(format!("{} maps for {} covers", maps.len(), poset.covers().len())));
        }
        for (m, &(y, x)) in maps.iter().zip(poset.covers()) {
            if m.p() != p {
                return Err(Error::FieldMismatch(m.p(), p));
            }
            if m.shape() != (dims[x], dims[y]) {
                return Err(Error::Shape(format!(
                    "map {} -> {} is {}x{}, expected {}x{}",
                    poset.name(y),
                    poset.name(x),
                    m.rows(),
                    m.cols(),
                    dims[x],
                    dims[y]
                )));
            }
        }
        Ok(VectFunctor { poset, p, dims, maps })
    }

    pub fn zero(poset: Arc<FinPoset>, p: u32) -> VectFunctor {
        let dims = vec![0; poset.len()];
        let maps = poset.covers().iter().map(|_| Mat::zeros(p, 0, 0)).collect();
        VectFunctor { poset, p, dims, maps }
    }

    /// `F^d(z, −)`: `F^d` on the up-set of `z` with identity maps, zero elsewhere.
    pub fn free(poset: Arc<FinPoset>, p: u32, z: usize, d: usize) -> VectFunctor {
        VectFunctor::free_sum(poset, p, &vec![z; d])
    }

    /// `⊕_g F(z_g, −)`; the basis at `x` lists the generators below `x` in order.
    pub fn free_sum(poset: Arc<FinPoset>, p: u32, gens: &[usize]) -> VectFunctor {
        let n = poset.len();
        let present: Vec<Vec<usize>> =
            (0..n).map(|x| (0..gens.len()).filter(|&g| poset.leq(gens[g], x)).collect()).collect();
        let dims = present.iter().map(Vec::len).collect();
        let maps = poset
            .covers()
            .iter()
            .map(|&(y, x)| {
                let mut m = Mat::zeros(p, present[x].len(), present[y].len());
                for (j, g) in present[y].iter().enumerate() {
                    let i = present[x].iter().position(|h| h == g).expect("up-set is upward closed");
                    m.set(i, j, 1);
                }
                m
            })
            .collect();
        VectFunctor { poset, p, dims, maps }
    }

    pub fn poset(&self) -> &Arc<FinPoset> {
        &self.poset
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn maps(&self) -> &[Mat] {
        &self.maps
    }

    /// Structure map along the cover `y < x`.
    pub fn cover_map(&self, y: usize, x: usize) -> &Mat {
        &self.maps[self.poset.cover_index(y, x).expect("not a cover")]
    }

    /// Structure map `F(y ≤ x)` along any comparable pair.
    pub fn transition(&self, y: usize, x: usize) -> Mat {
        assert!(self.poset.leq(y, x), "transition along incomparable pair");
        if y == x {
            return Mat::identity(self.p, self.dims[x]);
        }
        let w = *self.poset.lower_covers(x).iter().find(|&&w| self.poset.leq(y, w)).expect("some cover lies above y");
        self.cover_map(w, x).mul(&self.transition(y, w))
    }

    /// Checks that all cover-path composites between the same endpoints agree.
    pub fn check_functorial(&self) -> Result<()> {
        if self.poset.dimension().at_most_one() {
            return Ok(());
        }
        let n = self.poset.len();
        for &x in self.poset.topo_order() {
            for y in 0..n {
                if !self.poset.lt(y, x) {
                    continue;
                }
                let reference = self.transition(y, x);
                for &w in self.poset.lower_covers(x) {
                    if self.poset.leq(y, w) && self.cover_map(w, x).mul(&self.transition(y, w)) != reference {
                        return Err(Error::NotFunctorial(format!(
                            "paths from `{}` to `{}` disagree",
                            self.poset.name(y),
                            self.poset.name(x)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Direct sum with block-diagonal structure maps.
    pub fn direct_sum(poset: Arc<FinPoset>, p: u32, parts: &[VectFunctor]) -> VectFunctor {
        let n = poset.len();
        let dims = (0..n).map(|x| parts.iter().map(|f| f.dims[x]).sum()).collect();
        let maps = (0..poset.covers().len())
            .map(|c| Mat::block_diag(p, &parts.iter().map(|f| f.maps[c].clone()).collect::<Vec<_>>()))
            .collect();
        VectFunctor { poset, p, dims, maps }
    }

    /// Restriction to the full subposet on `elements`.
    pub fn restrict(&self, elements: &[usize]) -> VectFunctor {
        let sub = Arc::new(self.poset.induced(elements));
        self.restrict_to(sub, elements)
    }

    /// Restriction onto a given induced poset whose element `i` is `elements[i]`.
    pub fn restrict_to(&self, sub: Arc<FinPoset>, elements: &[usize]) -> VectFunctor {
        let dims = elements.iter().map(|&e| self.dims[e]).collect();
        let maps = sub.covers().iter().map(|&(y, x)| self.transition(elements[y], elements[x])).collect();
        VectFunctor { poset: sub, p: self.p, dims, maps }
    }

    /// Re-coordinatizes every value by an invertible matrix `a[x]`: new maps are `a[x] F a[y]^{-1}`.
    pub fn conjugate(&self, a: &[Mat]) -> VectFunctor {
        let inv: Vec<Mat> = a.iter().map(|m| m.inverse().expect("change of basis must be invertible")).collect();
        let maps = self
            .poset
            .covers()
            .iter()
            .enumerate()
            .map(|(c, &(y, x))| a[x].mul(&self.maps[c]).mul(&inv[y]))
            .collect();
        VectFunctor { poset: self.poset.clone(), p: self.p, dims: self.dims.clone(), maps }
    }

    /// Same values on a structurally equal poset object.
    pub fn with_poset(&self, poset: Arc<FinPoset>) -> VectFunctor {
        assert!(same_poset(&self.poset, &poset));
        VectFunctor { poset, ..self.clone() }
    }
}

impl Morphism {
    pub fn identity(f: &VectFunctor) -> Morphism {
        Morphism { comps: f.dims.iter().map(|&d| Mat::identity(f.p, d)).collect() }
    }

    pub fn zero(src: &VectFunctor, tgt: &VectFunctor) -> Morphism {
        Morphism { comps: src.dims.iter().zip(&tgt.dims).map(|(&s, &t)| Mat::zeros(src.p, t, s)).collect() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        Morphism { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.mul(b)).collect() }
    }

    pub fn add(&self, other: &Morphism) -> Morphism {
        Morphism { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, other: &Morphism) -> Morphism {
        Morphism { comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, s: u32) -> Morphism {
        Morphism { comps: self.comps.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Mat::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.comps.iter().all(Mat::is_identity)
    }

    pub fn is_iso(&self) -> bool {
        self.comps.iter().all(Mat::is_invertible)
    }

    pub fn is_mono(&self) -> bool {
        self.comps.iter().all(Mat::is_injective)
    }

    pub fn is_epi(&self) -> bool {
        self.comps.iter().all(Mat::is_surjective)
    }

    /// Objectwise inverse.
    pub fn inverse(&self) -> Option<Morphism> {
        self.comps.iter().map(Mat::inverse).collect::<Option<Vec<_>>>().map(|comps| Morphism { comps })
    }

    /// Whether the components have the right shapes and commute with structure maps.
    pub fn is_natural(&self, src: &VectFunctor, tgt: &VectFunctor) -> bool {
        let n = src.poset.len();
        if self.comps.len() != n {
            return false;
        }
        if (0..n).any(|x| self.comps[x].shape() != (tgt.dims[x], src.dims[x])) {
            return false;
        }
        src.poset
            .covers()
            .iter()
            .enumerate()
            .all(|(c, &(y, x))| tgt.maps[c].mul(&self.comps[y]) == self.comps[x].mul(&src.maps[c]))
    }

    /// Block row `[a b …]` out of a direct sum.
    pub fn hjoin(p: u32, tgt: &VectFunctor, parts: &[Morphism]) -> Morphism {
        let n = tgt.dims.len();
        Morphism {
            comps: (0..n)
                .map(|x| Mat::hcat(p, tgt.dims[x], &parts.iter().map(|m| m.comps[x].clone()).collect::<Vec<_>>()))
                .collect(),
        }
    }

    /// Block column `[a; b; …]` into a direct sum.
    pub fn vjoin(p: u32, src: &VectFunctor, parts: &[Morphism]) -> Morphism {
        let n = src.dims.len();
        Morphism {
            comps: (0..n)
                .map(|x| Mat::vcat(p, src.dims[x], &parts.iter().map(|m| m.comps[x].clone()).collect::<Vec<_>>()))
                .collect(),
        }
    }

    pub fn block_diag(p: u32, parts: &[Morphism], n: usize) -> Morphism {
        Morphism {
            comps: (0..n)
                .map(|x| Mat::block_diag(p, &parts.iter().map(|m| m.comps[x].clone()).collect::<Vec<_>>()))
                .collect(),
        }
    }
}

/// Block inclusions and projections of a direct sum `⊕ parts`.
pub fn sum_injections(parts: &[VectFunctor]) -> (Vec<Morphism>, Vec<Morphism>) {
    let Some(first) = parts.first() else {
        return (Vec::new(), Vec::new());
    };
    let n = first.dims.len();
    let p = first.p;
    let totals: Vec<usize> = (0..n).map(|x| parts.iter().map(|f| f.dims[x]).sum()).collect();
    let mut offsets = vec![0usize; n];
    let mut inj = Vec::new();
    let mut proj = Vec::new();
    for f in parts {
        let mut i_comps = Vec::with_capacity(n);
        let mut p_comps = Vec::with_capacity(n);
        for x in 0..n {
            let mut i = Mat::zeros(p, totals[x], f.dims[x]);
            i.set_block(offsets[x], 0, &Mat::identity(p, f.dims[x]));
            p_comps.push(i.transpose());
            i_comps.push(i);
            offsets[x] += f.dims[x];
        }
        inj.push(Morphism { comps: i_comps });
        proj.push(Morphism { comps: p_comps });
    }
    (inj, proj)
}

/// A subfunctor spanned objectwise by the columns of `bases`, which must be closed
/// under the structure maps. Returns the subfunctor and its inclusion.
pub fn subfunctor(f: &VectFunctor, bases: Vec<Mat>) -> (VectFunctor, Morphism) {
    let dims = bases.iter().map(Mat::cols).collect();
    let maps = f
        .poset
        .covers()
        .iter()
        .enumerate()
        .map(|(c, &(y, x))| {
            bases[x].solve(&f.maps[c].mul(&bases[y])).expect("subspace is not closed under structure maps")
        })
        .collect();
    (VectFunctor { poset: f.poset.clone(), p: f.p, dims, maps }, Morphism { comps: bases })
}

/// A quotient functor with its projection and objectwise sections.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub functor: VectFunctor,
    pub proj: Morphism,
    pub sections: Vec<Mat>,
}

/// Quotient of `f` by the subfunctor spanned by `spans` (columns, not necessarily independent).
pub fn quotient(f: &VectFunctor, spans: &[Mat]) -> Quotient {
    let kcs: Vec<_> = spans.iter().map(Mat::kernel_and_cokernel).collect();
    let dims = kcs.iter().map(|k| k.coker.rows()).collect();
    let maps = f
        .poset
        .covers()
        .iter()
        .enumerate()
        .map(|(c, &(y, x))| kcs[x].coker.mul(&f.maps[c]).mul(&kcs[y].section))
        .collect();
    Quotient {
        functor: VectFunctor { poset: f.poset.clone(), p: f.p, dims, maps },
        proj: Morphism { comps: kcs.iter().map(|k| k.coker.clone()).collect() },
        sections: kcs.into_iter().map(|k| k.section).collect(),
    }
}

/// Kernel of a natural transformation with its inclusion.
pub fn kernel(phi: &Morphism, src: &VectFunctor) -> (VectFunctor, Morphism) {
    subfunctor(src, phi.comps.iter().map(Mat::kernel).collect())
}

/// Cokernel of a natural transformation.
pub fn cokernel(phi: &Morphism, tgt: &VectFunctor) -> Quotient {
    quotient(tgt, &phi.comps)
}

/// Image of a natural transformation with its inclusion into the target.
pub fn image(phi: &Morphism, tgt: &VectFunctor) -> (VectFunctor, Morphism) {
    subfunctor(tgt, phi.comps.iter().map(Mat::image).collect())
}

/// Colimit of `f` over a set `s` of elements, as a cokernel of the cover relations inside `s`.
#[derive(Clone, Debug)]
pub struct Colimit {
    pub elements: Vec<usize>,
    pub offsets: Vec<usize>,
    pub dim: usize,
    /// Projection `⊕_{s} F(s) → V`.
    pub proj: Mat,
    pub section: Mat,
}

impl Colimit {
    /// Cocone component at the `i`-th element of the indexing set.
    pub fn cocone(&self, f: &VectFunctor, i: usize) -> Mat {
        self.proj.block(0, self.dim, self.offsets[i], f.dims[self.elements[i]])
    }

    fn total(&self) -> usize {
        self.proj.cols()
    }
}

pub fn colim_over(f: &VectFunctor, s: &[usize]) -> Colimit {
    let p = f.p;
    let mut offsets = Vec::with_capacity(s.len());
    let mut total = 0;
    for &e in s {
        offsets.push(total);
        total += f.dims[e];
    }
    let pos = |e: usize| s.iter().position(|&a| a == e);
    let mut blocks = Vec::new();
    for (c, &(y, x)) in f.poset.covers().iter().enumerate() {
        let (Some(iy), Some(ix)) = (pos(y), pos(x)) else { continue };
        let mut col = Mat::zeros(p, total, f.dims[y]);
        col.set_block(offsets[iy], 0, &Mat::identity(p, f.dims[y]));
        col.set_block(offsets[ix], 0, &f.maps[c].neg());
        blocks.push(col);
    }
    let rel = Mat::hcat(p, total, &blocks);
    let kc = rel.kernel_and_cokernel();
    Colimit { elements: s.to_vec(), offsets, dim: kc.coker.rows(), proj: kc.coker, section: kc.section }
}

/// Left Kan extension of `f` along a full embedding of its poset into `ambient`,
/// computed valuewise as colimits over down-sets.
#[derive(Clone, Debug)]
pub struct KanExtension {
    pub functor: VectFunctor,
    /// `embedding[i]` is the ambient element of the `i`-th element of the source poset.
    pub embedding: Vec<usize>,
    pub colimits: Vec<Colimit>,
}

/// Checks that `embedding` is a full order embedding of `src` into `ambient`.
pub fn check_full_embedding(src: &FinPoset, ambient: &FinPoset, embedding: &[usize]) -> Result<()> {
    if embedding.len() != src.len() {
        return Err(Error::Shape("embedding length differs from poset size".into()));
    }
    for a in 0..src.len() {
        for b in 0..src.len() {
            if src.leq(a, b) != ambient.leq(embedding[a], embedding[b]) {
                return Err(Error::Invalid(format!(
                    "`{}` and `{}` are not ordered alike in the ambient poset",
                    src.name(a),
                    src.name(b)
                )));
            }
        }
    }
    Ok(())
}

pub fn kan_extend_colim(f: &VectFunctor, ambient: Arc<FinPoset>, embedding: &[usize]) -> Result<KanExtension> {
    check_full_embedding(&f.poset, &ambient, embedding)?;
    let n = ambient.len();
    let colimits: Vec<Colimit> = (0..n)
        .map(|x| {
            let s: Vec<usize> = (0..f.poset.len()).filter(|&i| ambient.leq(embedding[i], x)).collect();
            colim_over(f, &s)
        })
        .collect();
    let dims = colimits.iter().map(|c| c.dim).collect();
    let maps = ambient
        .covers()
        .iter()
        .map(|&(y, x)| {
            let (cy, cx) = (&colimits[y], &colimits[x]);
            let mut incl = Mat::zeros(f.p, cx.total(), cy.total());
            for (i, &e) in cy.elements.iter().enumerate() {
                let j = cx.elements.iter().position(|&a| a == e).expect("down-sets are nested");
                incl.set_block(cx.offsets[j], cy.offsets[i], &Mat::identity(f.p, f.dims[e]));
            }
            cx.proj.mul(&incl).mul(&cy.section)
        })
        .collect();
    let functor = VectFunctor { poset: ambient, p: f.p, dims, maps };
    Ok(KanExtension { functor, embedding: embedding.to_vec(), colimits })
}

impl KanExtension {
    /// Extends a natural transformation `φ: F → G` between functors on the source poset.
    pub fn extend_morphism(&self, other: &KanExtension, src: &VectFunctor, phi: &Morphism) -> Morphism {
        let p = src.p;
        let comps = self
            .colimits
            .iter()
            .zip(&other.colimits)
            .map(|(cs, ct)| {
                let mut blocks = Mat::zeros(p, ct.total(), cs.total());
                for (i, &e) in cs.elements.iter().enumerate() {
                    blocks.set_block(ct.offsets[i], cs.offsets[i], &phi.comps[e]);
                }
                ct.proj.mul(&blocks).mul(&cs.section)
            })
            .collect();
        Morphism { comps }
    }

    /// The mediating map into a functor `h` on the ambient poset whose restriction is the source.
    pub fn counit(&self, h: &VectFunctor) -> Morphism {
        let p = h.p;
        let comps = self
            .colimits
            .iter()
            .enumerate()
            .map(|(x, c)| {
                let blocks: Vec<Mat> = c.elements.iter().map(|&e| h.transition(self.embedding[e], x)).collect();
                Mat::hcat(p, h.dims[x], &blocks).mul(&c.section)
            })
            .collect();
        Morphism { comps }
    }
}

/// Kan extension through transfers: the value at `x` is `F(t(x))` for the greatest
/// source element `t(x)` below `x`.
pub fn kan_extend_transfer(f: &VectFunctor, ambient: Arc<FinPoset>, embedding: &[usize]) -> Result<(VectFunctor, Vec<Option<usize>>)> {
    check_full_embedding(&f.poset, &ambient, embedding)?;
    let n = ambient.len();
    let mut t = Vec::with_capacity(n);
    for x in 0..n {
        let img = ambient.transfer(embedding, x)?;
        t.push(img.map(|a| embedding.iter().position(|&e| e == a).expect("image of embedding")));
    }
    let dims = t.iter().map(|o| o.map_or(0, |i| f.dims[i])).collect();
    let maps = ambient
        .covers()
        .iter()
        .map(|&(y, x)| match (t[y], t[x]) {
            (Some(a), Some(b)) => f.transition(a, b),
            (None, Some(b)) => Mat::zeros(f.p, f.dims[b], 0),
            (_, None) => Mat::zeros(f.p, 0, t[y].map_or(0, |a| f.dims[a])),
        })
        .collect();
    Ok((VectFunctor { poset: ambient, p: f.p, dims, maps }, t))
}

/// Left Kan extension along a full embedding, through transfers when the image is
/// closed and the ambient poset has dimension at most one.
pub fn kan_extend(f: &VectFunctor, ambient: Arc<FinPoset>, embedding: &[usize]) -> Result<VectFunctor> {
    if ambient.dimension().at_most_one() && ambient.is_closed(embedding) {
        Ok(kan_extend_transfer(f, ambient, embedding)?.0)
    } else {
        Ok(kan_extend_colim(f, ambient, embedding)?.functor)
    }
}

/// Canonical comparison from the transfer path to the colimit path: at `x` the
/// cocone component of the colimit at `t(x)`.
pub fn kan_comparison(f: &VectFunctor, ambient: Arc<FinPoset>, embedding: &[usize]) -> Result<(VectFunctor, KanExtension, Morphism)> {
    let (tr, t) = kan_extend_transfer(f, ambient.clone(), embedding)?;
    let colim = kan_extend_colim(f, ambient, embedding)?;
    let comps = t
        .iter()
        .zip(&colim.colimits)
        .map(|(ti, c)| match ti {
            Some(i) => {
                let k = c.elements.iter().position(|e| e == i).expect("transfer lies in the down-set");
                c.cocone(f, k)
            }
            None => Mat::zeros(f.p, c.dim, 0),
        })
        .collect();
    Ok((tr, colim, Morphism { comps }))
}

/// Cokernel and kernel of the map from lower covers into `F(x)`.
#[derive(Clone, Debug)]
pub struct LocalHomology {
    pub lower: Vec<usize>,
    pub h0: usize,
    pub proj: Mat,
    pub section: Mat,
    pub h1: usize,
    /// Basis of the kernel inside `⊕_{y∈P(x)} F(y)`.
    pub h1_basis: Mat,
}

pub fn local_homology(f: &VectFunctor, x: usize) -> LocalHomology {
    let lower = f.poset.lower_covers(x).to_vec();
    let blocks: Vec<Mat> = lower.iter().map(|&y| f.cover_map(y, x).clone()).collect();
    let k = Mat::hcat(f.p, f.dims[x], &blocks);
    let kc = k.kernel_and_cokernel();
    LocalHomology {
        lower,
        h0: kc.coker.rows(),
        proj: kc.coker,
        section: kc.section,
        h1: kc.kernel.cols(),
        h1_basis: kc.kernel,
    }
}

/// Subfunctor of images from strictly smaller elements.
pub fn radical(f: &VectFunctor) -> (VectFunctor, Morphism) {
    let bases = (0..f.poset.len())
        .map(|x| {
            let blocks: Vec<Mat> = f.poset.lower_covers(x).iter().map(|&y| f.cover_map(y, x).clone()).collect();
            Mat::hcat(f.p, f.dims[x], &blocks).image()
        })
        .collect();
    subfunctor(f, bases)
}

/// A free functor `⊕_g F(z_g, −)` with an isomorphism onto a given functor.
#[derive(Clone, Debug)]
pub struct FreePresentation {
    pub gens: Vec<usize>,
    pub free: VectFunctor,
    pub witness: Morphism,
}

impl FreePresentation {
    /// `(element, multiplicity)` pairs in element order.
    pub fn multiplicities(&self) -> Vec<(usize, usize)> {
        multiplicities(&self.gens)
    }
}

pub fn multiplicities(gens: &[usize]) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    let mut sorted = gens.to_vec();
    sorted.sort_unstable();
    for z in sorted {
        match out.last_mut() {
            Some((e, m)) if *e == z => *m += 1,
            _ => out.push((z, 1)),
        }
    }
    out
}

/// Morphism out of `⊕_g F(z_g, −)` sending generator `g` to the vector `vecs[g] ∈ tgt(z_g)`.
pub fn from_generators(gens: &[usize], tgt: &VectFunctor, vecs: &[Mat]) -> Morphism {
    let poset = &tgt.poset;
    let comps = (0..poset.len())
        .map(|x| {
            let cols: Vec<Mat> = (0..gens.len())
                .filter(|&g| poset.leq(gens[g], x))
                .map(|g| tgt.transition(gens[g], x).mul(&vecs[g]))
                .collect();
            Mat::hcat(tgt.p, tgt.dims[x], &cols)
        })
        .collect();
    Morphism { comps }
}

/// Position of generator `g` in the basis of the free functor at `x`.
pub fn generator_position(poset: &FinPoset, gens: &[usize], g: usize, x: usize) -> Option<usize> {
    poset.leq(gens[g], x).then(|| (0..g).filter(|&h| poset.leq(gens[h], x)).count())
}

/// The vector of generator `g` in its home value.
pub fn generator_vector(poset: &FinPoset, p: u32, gens: &[usize], g: usize) -> Mat {
    let z = gens[g];
    let d = gens.iter().filter(|&&h| poset.leq(h, z)).count();
    Mat::unit(p, d, generator_position(poset, gens, g, z).expect("generator lives at its home"))
}

/// Coordinate projection of a free functor onto one generator, landing in `F(z_g, −)`.
pub fn generator_projection(free: &VectFunctor, gens: &[usize], g: usize) -> Morphism {
    let poset = &free.poset;
    let comps = (0..poset.len())
        .map(|x| match generator_position(poset, gens, g, x) {
            Some(i) => {
                let mut m = Mat::zeros(free.p, 1, free.dims[x]);
                m.set(0, i, 1);
                m
            }
            None => Mat::zeros(free.p, 0, free.dims[x]),
        })
        .collect();
    Morphism { comps }
}

/// Minimal projective cover `s: P → F`.
#[derive(Clone, Debug)]
pub struct Cover {
    pub gens: Vec<usize>,
    pub free: VectFunctor,
    pub map: Morphism,
}

pub fn minimal_cover(f: &VectFunctor) -> Cover {
    let mut gens = Vec::new();
    let mut vecs = Vec::new();
    for z in 0..f.poset.len() {
        let lh = local_homology(f, z);
        for j in 0..lh.h0 {
            gens.push(z);
            vecs.push(lh.section.block(0, f.dims[z], j, 1));
        }
    }
    let free = VectFunctor::free_sum(f.poset.clone(), f.p, &gens);
    let map = from_generators(&gens, f, &vecs);
    Cover { gens, free, map }
}

/// A free presentation when `f` is projective.
pub fn is_projective(f: &VectFunctor) -> Option<FreePresentation> {
    if f.poset.dimension().at_most_one() {
        if (0..f.poset.len()).any(|x| local_homology(f, x).h1 != 0) {
            return None;
        }
        let c = minimal_cover(f);
        debug_assert!(c.map.is_iso());
        return Some(FreePresentation { gens: c.gens, free: c.free, witness: c.map });
    }
    let c = minimal_cover(f);
    c.map.is_iso().then_some(FreePresentation { gens: c.gens, free: c.free, witness: c.map })
}

/// A projective resolution `0 → P1 → P0 → F → 0` of length at most one.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub p0: Cover,
    pub p1: FreePresentation,
    /// `P1 → P0`, through the free functor of `p1`.
    pub d: Morphism,
}

pub fn minimal_resolution(f: &VectFunctor) -> Result<Resolution> {
    let p0 = minimal_cover(f);
    let (k, incl) = kernel(&p0.map, &p0.free);
    let p1 = is_projective(&k).ok_or(Error::KernelNotProjective)?;
    let d = incl.compose(&p1.witness);
    Ok(Resolution { p0, p1, d })
}

/// Enlarges the union of the given element sets to its closure and Kan-extends
/// every functor onto it.
pub fn common_discretization(
    ambient: &Arc<FinPoset>,
    items: &[(Vec<usize>, VectFunctor)],
) -> Result<(Vec<usize>, Arc<FinPoset>, Vec<VectFunctor>)> {
    let mut union: Vec<usize> = items.iter().flat_map(|(s, _)| s.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let d = ambient.closure(&union);
    let sub = Arc::new(ambient.induced(&d));
    let mut out = Vec::with_capacity(items.len());
    for (s, f) in items {
        let emb: Vec<usize> = s.iter().map(|e| d.iter().position(|a| a == e).expect("support inside closure")).collect();
        out.push(kan_extend(f, sub.clone(), &emb)?);
    }
    Ok((d, sub, out))
}
