//! Interchange documents: posets, functors and chain functors keyed by name.

use std::collections::BTreeMap;
use std::sync::Arc;

use parchain::functor::same_poset;
use parchain::{ChainFunctor, Error, FinPoset, Mat, Morphism, Result, VectFunctor};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Document {
    pub field: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub posets: BTreeMap<String, PosetDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functors: BTreeMap<String, FunctorDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub chain_functors: BTreeMap<String, ChainDoc>,
    /// Default `A` and `B` for `glue`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gluing: Option<GluingDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PosetDoc {
    pub elements: Vec<String>,
    /// Cover pairs `[y, x]` with `y < x`.
    pub covers: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationDoc>,
}

/// Records that a poset is the realization of `base` over `support` with edge coordinates `coords`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RealizationDoc {
    pub base: String,
    pub support: Vec<String>,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapDoc {
    pub from: String,
    pub to: String,
    pub matrix: MatDoc,
}

/// Values and cover maps; absent maps are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DegreeDoc {
    /// Dimension per element, in the poset's element order.
    pub dims: Vec<usize>,
    #[serde(default)]
    pub maps: Vec<MapDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctorDoc {
    pub poset: String,
    #[serde(flatten)]
    pub body: DegreeDoc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryDoc {
    /// `∂_degree`, from degree `degree` to `degree - 1`.
    pub degree: usize,
    pub element: String,
    pub matrix: MatDoc,
}

/// Degrees from 0 upward; absent boundaries are zero.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainDoc {
    pub poset: String,
    pub degrees: Vec<DegreeDoc>,
    #[serde(default)]
    pub boundaries: Vec<BoundaryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GluingDoc {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}

pub fn mat_to_doc(m: &Mat) -> MatDoc {
    MatDoc { rows: m.rows(), cols: m.cols(), entries: m.to_rows().into_iter().map(|r| r.into_iter().map(i64::from).collect()).collect() }
}

pub fn mat_from_doc(p: u32, d: &MatDoc) -> Result<Mat> {
    Mat::from_rows(p, d.rows, d.cols, &d.entries)
}

pub fn poset_from_doc(name: &str, d: &PosetDoc) -> Result<FinPoset> {
    if d.elements.is_empty() {
        return Err(invalid(format!("poset `{name}` is empty")));
    }
    FinPoset::from_covers(&d.elements, &d.covers)
}

pub fn poset_to_doc(q: &FinPoset) -> PosetDoc {
    PosetDoc {
        elements: q.names().to_vec(),
        covers: q.covers().iter().map(|&(y, x)| (q.name(y).to_string(), q.name(x).to_string())).collect(),
        realization: None,
    }
}

fn degree_from_doc(q: &Arc<FinPoset>, p: u32, d: &DegreeDoc) -> Result<VectFunctor> {
    if d.dims.len() != q.len() {
        return Err(Error::Shape(format!("{} dimensions for {} elements", d.dims.len(), q.len())));
    }
    let mut maps: Vec<Mat> = q.covers().iter().map(|&(y, x)| Mat::zeros(p, d.dims[x], d.dims[y])).collect();
    for m in &d.maps {
        let (y, x) = (q.index_of(&m.from)?, q.index_of(&m.to)?);
        let c = q.cover_index(y, x).ok_or_else(|| invalid(format!("`{}` -> `{}` is not a cover", m.from, m.to)))?;
        let mat = mat_from_doc(p, &m.matrix)?;
        if mat.shape() != (d.dims[x], d.dims[y]) {
            return Err(Error::Shape(format!("map `{}` -> `{}` is {}x{}", m.from, m.to, mat.rows(), mat.cols())));
        }
        maps[c] = mat;
    }
    VectFunctor::new_unchecked(q.clone(), p, d.dims.clone(), maps)
}

fn degree_to_doc(f: &VectFunctor) -> DegreeDoc {
    let q = f.poset();
    let maps = q
        .covers()
        .iter()
        .zip(f.maps())
        .filter(|(_, m)| m.rows() > 0 && m.cols() > 0)
        .map(|(&(y, x), m)| MapDoc { from: q.name(y).to_string(), to: q.name(x).to_string(), matrix: mat_to_doc(m) })
        .collect();
    DegreeDoc { dims: f.dims().to_vec(), maps }
}

pub fn chain_to_doc(poset: &str, x: &ChainFunctor) -> ChainDoc {
    let q = x.poset();
    let mut boundaries = Vec::new();
    for n in 1..=x.top() {
        for (e, m) in x.boundary(n).comps.iter().enumerate() {
            if m.rows() > 0 && m.cols() > 0 {
                boundaries.push(BoundaryDoc { degree: n, element: q.name(e).to_string(), matrix: mat_to_doc(m) });
            }
        }
    }
    ChainDoc { poset: poset.to_string(), degrees: x.degrees().iter().map(degree_to_doc).collect(), boundaries }
}

/// Everything in a document, parsed but not yet validated.
pub struct Loaded {
    pub p: u32,
    pub posets: BTreeMap<String, Arc<FinPoset>>,
    pub functors: BTreeMap<String, (String, VectFunctor)>,
    pub chain_functors: BTreeMap<String, (String, ChainFunctor)>,
}

impl Loaded {
    pub fn poset(&self, name: &str) -> Result<&Arc<FinPoset>> {
        self.posets.get(name).ok_or_else(|| invalid(format!("no poset named `{name}`")))
    }
}

pub fn load(doc: &Document, p: u32) -> Result<Loaded> {
    let mut posets = BTreeMap::new();
    for (name, d) in &doc.posets {
        posets.insert(name.clone(), Arc::new(poset_from_doc(name, d)?));
    }
    let mut out = Loaded { p, posets, functors: BTreeMap::new(), chain_functors: BTreeMap::new() };
    for (name, d) in &doc.functors {
        let q = out.poset(&d.poset)?.clone();
        out.functors.insert(name.clone(), (d.poset.clone(), degree_from_doc(&q, p, &d.body)?));
    }
    for (name, d) in &doc.chain_functors {
        let q = out.poset(&d.poset)?.clone();
        if d.degrees.is_empty() {
            return Err(invalid(format!("chain functor `{name}` has no degrees")));
        }
        let degrees: Vec<VectFunctor> = d.degrees.iter().map(|g| degree_from_doc(&q, p, g)).collect::<Result<_>>()?;
        let mut bd: Vec<Morphism> = (1..degrees.len())
            .map(|n| Morphism {
                comps: (0..q.len()).map(|e| Mat::zeros(p, degrees[n - 1].dim(e), degrees[n].dim(e))).collect(),
            })
            .collect();
        for b in &d.boundaries {
            if b.degree == 0 || b.degree >= degrees.len() {
                return Err(invalid(format!("boundary degree {} outside 1..={}", b.degree, degrees.len() - 1)));
            }
            let e = q.index_of(&b.element)?;
            let m = mat_from_doc(p, &b.matrix)?;
            if m.shape() != bd[b.degree - 1].comps[e].shape() {
                return Err(Error::Shape(format!("boundary {} at `{}` is {}x{}", b.degree, b.element, m.rows(), m.cols())));
            }
            bd[b.degree - 1].comps[e] = m;
        }
        let x = ChainFunctor::new_unchecked(degrees, bd)?;
        if !same_poset(x.poset(), &q) {
            return Err(invalid(format!("chain functor `{name}` mixes posets")));
        }
        out.chain_functors.insert(name.clone(), (d.poset.clone(), x));
    }
    Ok(out)
}

/// A document carrying one chain functor together with its poset.
pub fn single_chain(p: u32, name: &str, poset_name: &str, x: &ChainFunctor) -> Document {
    let mut doc = Document { field: p, ..Default::default() };
    doc.posets.insert(poset_name.to_string(), poset_to_doc(x.poset()));
    doc.chain_functors.insert(name.to_string(), chain_to_doc(poset_name, x));
    doc
}
