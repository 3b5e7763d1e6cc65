//! Named example objects.

use std::sync::Arc;

use crate::chaincx::ChainFunctor;
use crate::error::{Error, Result};
use crate::functor::VectFunctor;
use crate::linalg::Mat;
use crate::poset::FinPoset;

/// A named bundle of posets and chain functors, with an optional gluing cover.
#[derive(Clone, Debug)]
pub struct Example {
    pub posets: Vec<(String, Arc<FinPoset>)>,
    pub chain_functors: Vec<(String, ChainFunctor)>,
    /// Element names of `A` and `B` for a gluing stage.
    pub gluing: Option<(Vec<String>, Vec<String>)>,
}

/// Zig-zag `a1 < a2 < a4 > a3`.
pub fn fig1_a() -> FinPoset {
    FinPoset::from_covers(&["a1", "a2", "a3", "a4"], &[("a1", "a2"), ("a2", "a4"), ("a3", "a4")]).expect("acyclic")
}

/// Fence: `b1, b2 < b3, b4`.
pub fn fig1_b() -> FinPoset {
    FinPoset::from_covers(&["b1", "b2", "b3", "b4"], &[("b1", "b3"), ("b1", "b4"), ("b2", "b3"), ("b2", "b4")])
        .expect("acyclic")
}

/// Diamond `c1 < c2, c3 < c4`, of dimension two.
pub fn fig1_c() -> FinPoset {
    FinPoset::from_covers(&["c1", "c2", "c3", "c4"], &[("c1", "c2"), ("c1", "c3"), ("c2", "c4"), ("c3", "c4")])
        .expect("acyclic")
}

const FIG2_ELEMENTS: [&str; 13] = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13"];

const FIG2_COVERS: [(&str, &str); 17] = [
    ("x2", "x1"),
    ("x2", "x4"),
    ("x1", "x3"),
    ("x4", "x3"),
    ("x6", "x3"),
    ("x3", "x5"),
    ("x6", "x7"),
    ("x7", "x5"),
    ("x8", "x6"),
    ("x8", "x9"),
    ("x9", "x7"),
    ("x7", "x10"),
    ("x9", "x11"),
    ("x11", "x10"),
    ("x10", "x12"),
    ("x11", "x13"),
    ("x13", "x12"),
];

/// The poset carrying the indecomposable complex.
pub fn fig2_poset() -> FinPoset {
    FinPoset::from_covers(&FIG2_ELEMENTS, &FIG2_COVERS).expect("acyclic")
}

/// The indecomposable chain functor of top degree 3 on 13 elements.
pub fn fig2(p: u32) -> Result<ChainFunctor> {
    let poset = Arc::new(fig2_poset());
    let m = |rows: &[&[i64]]| Mat::lit(p, rows);
    let dims_of = |name: &str| -> Vec<usize> {
        match name {
            "x2" => vec![1, 0, 0, 0],
            "x1" | "x4" => vec![1, 1, 0, 0],
            "x3" | "x5" => vec![1, 3, 1, 0],
            "x10" | "x13" => vec![0, 1, 1, 0],
            "x12" => vec![0, 1, 2, 1],
            _ => vec![0, 1, 0, 0],
        }
    };
    let dims: Vec<Vec<usize>> = (0..poset.len()).map(|x| dims_of(poset.name(x))).collect();
    let bds: Vec<Vec<Mat>> = (0..poset.len())
        .map(|x| {
            let d = &dims[x];
            let mut out: Vec<Mat> = (1..=3).map(|k| Mat::zeros(p, d[k - 1], d[k])).collect();
            match poset.name(x) {
                "x1" | "x4" => out[0] = Mat::identity(p, 1),
                "x3" | "x5" => {
                    out[0] = m(&[&[1, 0, 0]]);
                    out[1] = m(&[&[0], &[1], &[0]]);
                }
                "x10" | "x13" => out[1] = Mat::identity(p, 1),
                "x12" => {
                    out[1] = m(&[&[1, 0]]);
                    out[2] = m(&[&[0], &[1]]);
                }
                _ => {}
            }
            out
        })
        .collect();
    let maps: Vec<Vec<Mat>> = poset
        .covers()
        .iter()
        .map(|&(y, x)| {
            (0..=3)
                .map(|k| {
                    let (r, c) = (dims[x][k], dims[y][k]);
                    let special = match (poset.name(y), poset.name(x), k) {
                        ("x1", "x3", 1) => Some(m(&[&[1], &[0], &[0]])),
                        ("x4", "x3", 1) => Some(m(&[&[1], &[1], &[1]])),
                        ("x6", "x3", 1) | ("x7", "x5", 1) => Some(m(&[&[0], &[0], &[1]])),
                        ("x10", "x12", 2) => Some(m(&[&[1], &[0]])),
                        ("x13", "x12", 2) => Some(m(&[&[1], &[1]])),
                        _ => None,
                    };
                    special.unwrap_or_else(|| if r == c { Mat::identity(p, r) } else { Mat::zeros(p, r, c) })
                })
                .collect()
        })
        .collect();
    ChainFunctor::from_parts(poset, p, 3, &dims, &bds, &maps)
}

/// Gluing stages `(A, B)` building the indecomposable complex.
pub fn fig3_stage(stage: char) -> Result<(Vec<&'static str>, Vec<&'static str>)> {
    match stage {
        'a' => Ok((vec!["x2"], vec!["x1", "x2", "x3", "x4"])),
        'b' => Ok((vec!["x1", "x2", "x3", "x4"], vec!["x3", "x5", "x6", "x7", "x8", "x9"])),
        'c' => Ok((
            vec!["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9"],
            vec!["x6", "x7", "x8", "x9", "x10", "x11", "x12", "x13"],
        )),
        _ => Err(Error::UnknownExample(format!("fig3_{stage}"))),
    }
}

/// The chain on `0 < 1 < 2`.
pub fn chain3() -> FinPoset {
    FinPoset::from_covers(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).expect("acyclic")
}

/// The indecomposable object on `0 ≤ 1 ≤ 2` and its decomposable minimal cofibrant replacement.
pub fn triple_chain_pair(p: u32) -> Result<(ChainFunctor, ChainFunctor)> {
    let poset = Arc::new(chain3());
    let z = |r: usize, c: usize| Mat::zeros(p, r, c);
    let one = Mat::identity(p, 1);
    let left = ChainFunctor::from_parts(
        poset.clone(),
        p,
        1,
        &[vec![1, 0], vec![1, 1], vec![0, 1]],
        &[vec![z(1, 0)], vec![one.clone()], vec![z(0, 1)]],
        &[vec![one.clone(), z(1, 0)], vec![z(0, 1), one.clone()]],
    )?;
    let right = ChainFunctor::from_parts(
        poset,
        p,
        1,
        &[vec![1, 0], vec![1, 1], vec![1, 2]],
        &[vec![z(1, 0)], vec![one.clone()], vec![Mat::lit(p, &[&[1, 0]])]],
        &[vec![one.clone(), z(1, 0)], vec![one, Mat::lit(p, &[&[1], &[0]])]],
    )?;
    Ok((left, right))
}

/// A single point.
pub fn point() -> FinPoset {
    FinPoset::from_covers::<&str>(&["pt"], &[]).expect("one element")
}

fn point_field(p: u32) -> VectFunctor {
    VectFunctor::free(Arc::new(point()), p, 0, 1)
}

pub fn sphere(n: usize, p: u32) -> ChainFunctor {
    ChainFunctor::sphere(&point_field(p), n)
}

pub fn disk(n: usize, p: u32) -> ChainFunctor {
    ChainFunctor::disk(&point_field(p), n)
}

pub const NAMES: [&str; 12] = [
    "fig1_a",
    "fig1_b",
    "fig1_c",
    "fig2",
    "fig3_a",
    "fig3_b",
    "fig3_c",
    "triple_chain_pair",
    "triple_chain_pair.left",
    "triple_chain_pair.right",
    "sphere(n)",
    "disk(n)",
];

fn parse_arg(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?.trim().parse().ok()
}

/// Looks up an example by name over `F_p`.
pub fn builtin_example(name: &str, p: u32) -> Result<Example> {
    let poset_only = |n: &str, q: FinPoset| Example {
        posets: vec![(n.to_string(), Arc::new(q))],
        chain_functors: Vec::new(),
        gluing: None,
    };
    let single = |n: &str, c: ChainFunctor| Example {
        posets: vec![(format!("{n}.poset"), c.poset().clone())],
        chain_functors: vec![(n.to_string(), c)],
        gluing: None,
    };
    match name {
        "fig1_a" => Ok(poset_only(name, fig1_a())),
        "fig1_b" => Ok(poset_only(name, fig1_b())),
        "fig1_c" => Ok(poset_only(name, fig1_c())),
        "fig2" => Ok(single(name, fig2(p)?)),
        "fig3_a" | "fig3_b" | "fig3_c" => {
            let x = fig2(p)?;
            let (a, b) = fig3_stage(name.chars().last().expect("nonempty"))?;
            let mut d: Vec<usize> = x.poset().indices_of(&a)?;
            d.extend(x.poset().indices_of(&b)?);
            d.sort_unstable();
            d.dedup();
            let mut ex = single(name, x.restrict(&d));
            ex.gluing = Some((a.iter().map(|s| s.to_string()).collect(), b.iter().map(|s| s.to_string()).collect()));
            Ok(ex)
        }
        "triple_chain_pair" => {
            let (l, r) = triple_chain_pair(p)?;
            Ok(Example {
                posets: vec![("triple_chain_pair.poset".into(), l.poset().clone())],
                chain_functors: vec![("left".into(), l), ("right".into(), r)],
                gluing: None,
            })
        }
        "triple_chain_pair.left" => Ok(single("left", triple_chain_pair(p)?.0)),
        "triple_chain_pair.right" => Ok(single("right", triple_chain_pair(p)?.1)),
        _ => {
            if let Some(n) = parse_arg(name, "sphere") {
                Ok(single(name, sphere(n, p)))
            } else if let Some(n) = parse_arg(name, "disk") {
                Ok(single(name, disk(n, p)))
            } else {
                Err(Error::UnknownExample(name.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaincx::{classify_morphism, homology, ChainMap};
    use crate::poset::Dimension;

    #[test]
    fn fig1_dimensions() {
        assert_eq!(fig1_a().dimension(), Dimension::One);
        assert_eq!(fig1_b().dimension(), Dimension::One);
        assert_eq!(fig1_c().dimension(), Dimension::TwoPlus);
    }

    #[test]
    fn fig2_validates() {
        let x = fig2(2).unwrap();
        assert_eq!(x.poset().len(), 13);
        assert_eq!(x.poset().covers().len(), 17);
        let nodes: usize = (0..13).map(|e| x.element_dims(e).iter().filter(|&&d| d > 0).count()).sum();
        assert_eq!(nodes, 23);
        assert_eq!(x.poset().dimension(), Dimension::TwoPlus);
        assert!(fig2(3).is_ok());
    }

    #[test]
    fn triple_pair_shapes() {
        let (l, r) = triple_chain_pair(2).unwrap();
        assert_eq!((0..3).map(|e| l.element_dims(e)).collect::<Vec<_>>(), vec![vec![1, 0], vec![1, 1], vec![0, 1]]);
        assert_eq!((0..3).map(|e| r.degree(1).dim(e)).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!((0..3).map(|e| r.degree(0).dim(e)).collect::<Vec<_>>(), vec![1, 1, 1]);
        for n in 0..3 {
            assert_eq!(homology(&l, n).functor.dims(), homology(&r, n).functor.dims());
        }
        let id = ChainMap::identity(&r);
        assert!(classify_morphism(&id, &r, &r).weak_equivalence);
    }

    #[test]
    fn named_lookup() {
        for n in ["fig1_a", "fig2", "fig3_b", "triple_chain_pair", "sphere(3)", "disk(2)"] {
            assert!(builtin_example(n, 2).is_ok(), "{n}");
        }
        assert_eq!(builtin_example("sphere(3)", 2).unwrap().chain_functors[0].1.top(), 3);
        assert!(matches!(builtin_example("nope", 2), Err(Error::UnknownExample(_))));
        let s = builtin_example("fig3_a", 2).unwrap();
        assert_eq!(s.chain_functors[0].1.poset().len(), 4);
    }
}
