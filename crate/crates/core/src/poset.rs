//! Finite posets, their dimension class, closed subsets, realizations and transfers.

use std::collections::HashMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A finite poset stored through its Hasse diagram and its order relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    covers: Vec<(usize, usize)>,
    cover_index: HashMap<(usize, usize), usize>,
    leq: Vec<Vec<bool>>,
    lower: Vec<Vec<usize>>,
    upper: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

/// Dimension class of a poset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Dimension {
    Zero,
    One,
    TwoPlus,
}

impl Dimension {
    pub fn at_most_one(self) -> bool {
        self != Dimension::TwoPlus
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Zero => "0",
            Dimension::One => "1",
            Dimension::TwoPlus => ">=2",
        })
    }
}

impl FinPoset {
    /// Builds a poset from named elements and `(y, x)` pairs with `y < x`.
    /// Redundant pairs are dropped; a cycle is an error.
    pub fn from_covers<S: AsRef<str>>(names: &[S], covers: &[(S, S)]) -> Result<FinPoset> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateName(n.clone()));
            }
        }
        let mut rel = Vec::with_capacity(covers.len());
        for (y, x) in covers {
            let yi = *index.get(y.as_ref()).ok_or_else(|| Error::UnknownElement(y.as_ref().into()))?;
            let xi = *index.get(x.as_ref()).ok_or_else(|| Error::UnknownElement(x.as_ref().into()))?;
            rel.push((yi, xi));
        }
        FinPoset::new(names, &rel)
    }

    /// Builds a poset from element names and index pairs `(y, x)` meaning `y < x`.
    pub fn new(names: Vec<String>, relation: &[(usize, usize)]) -> Result<FinPoset> {
        let n = names.len();
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(y, x) in relation {
            if y >= n || x >= n {
                return Err(Error::Invalid(format!("relation index ({y}, {x}) out of range")));
            }
            if y == x {
                return Err(Error::CycleDetected(names[y].clone()));
            }
            succ[y].push(x);
            indeg[x] += 1;
        }
        // Kahn's algorithm, smallest index first for a deterministic linear extension.
        let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(&v) = ready.iter().next() {
            ready.remove(&v);
            topo.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.insert(w);
                }
            }
        }
        if topo.len() < n {
            let culprit = (0..n).find(|&i| indeg[i] > 0).expect("cycle member");
            return Err(Error::CycleDetected(names[culprit].clone()));
        }
        let mut leq = vec![vec![false; n]; n];
        for &v in topo.iter().rev() {
            leq[v][v] = true;
            for &w in &succ[v] {
                let row = leq[w].clone();
                for (dst, src) in leq[v].iter_mut().zip(row) {
                    *dst |= src;
                }
            }
        }
        let mut covers = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &(y, x) in relation {
            if !seen.insert((y, x)) {
                continue;
            }
            let between = (0..n).any(|w| w != y && w != x && leq[y][w] && leq[w][x]);
            if !between {
                covers.push((y, x));
            }
        }
        let mut lower = vec![Vec::new(); n];
        let mut upper = vec![Vec::new(); n];
        let mut cover_index = HashMap::new();
        for (i, &(y, x)) in covers.iter().enumerate() {
            lower[x].push(y);
            upper[y].push(x);
            cover_index.insert((y, x), i);
        }
        Ok(FinPoset { names, index, covers, cover_index, leq, lower, upper, topo })
    }

    /// Builds a poset from an explicit order test on `n` named elements.
    pub fn from_order(names: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<FinPoset> {
        let n = names.len();
        let mut rel = Vec::new();
        for y in 0..n {
            for x in 0..n {
                if y != x && leq(y, x) {
                    rel.push((y, x));
                }
            }
        }
        FinPoset::new(names, &rel)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn cover_index(&self, y: usize, x: usize) -> Option<usize> {
        self.cover_index.get(&(y, x)).copied()
    }

    #[inline]
    pub fn leq(&self, y: usize, x: usize) -> bool {
        self.leq[y][x]
    }

    #[inline]
    pub fn lt(&self, y: usize, x: usize) -> bool {
        y != x && self.leq[y][x]
    }

    pub fn comparable(&self, a: usize, b: usize) -> bool {
        self.leq[a][b] || self.leq[b][a]
    }

    /// Elements covered by `x`.
    pub fn lower_covers(&self, x: usize) -> &[usize] {
        &self.lower[x]
    }

    /// Elements covering `y`.
    pub fn upper_covers(&self, y: usize) -> &[usize] {
        &self.upper[y]
    }

    /// A linear extension: every element appears after all elements below it.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn down_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&d| self.leq[d][x]).collect()
    }

    pub fn up_set(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&u| self.leq[x][u]).collect()
    }

    pub fn dimension(&self) -> Dimension {
        let n = self.len();
        if self.covers.is_empty() {
            return Dimension::Zero;
        }
        for w in 0..n {
            for x in 0..n {
                if !self.lt(w, x) {
                    continue;
                }
                let interval: Vec<usize> = (0..n).filter(|&u| self.leq[w][u] && self.leq[u][x]).collect();
                for (i, &u) in interval.iter().enumerate() {
                    for &v in &interval[i + 1..] {
                        if !self.comparable(u, v) {
                            return Dimension::TwoPlus;
                        }
                    }
                }
            }
        }
        Dimension::One
    }

    /// Minimal elements of a set.
    pub fn minimal(&self, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&a| !set.iter().any(|&b| self.lt(b, a))).collect()
    }

    /// Maximal elements of a set.
    pub fn maximal(&self, set: &[usize]) -> Vec<usize> {
        set.iter().copied().filter(|&a| !set.iter().any(|&b| self.lt(a, b))).collect()
    }

    /// Minimal upper bounds of `d`; empty for empty `d`.
    pub fn suplim(&self, d: &[usize]) -> Vec<usize> {
        if d.is_empty() {
            return Vec::new();
        }
        let ub: Vec<usize> = (0..self.len()).filter(|&u| d.iter().all(|&a| self.leq[a][u])).collect();
        self.minimal(&ub)
    }

    /// Least closed superset of `d`.
    ///
    /// An element `s` lies in `suplim(U)` for some `U ⊆ D` exactly when it is a
    /// minimal upper bound of `D ∩ ↓s`, so each round only inspects one subset per
    /// candidate.
    pub fn closure(&self, d: &[usize]) -> Vec<usize> {
        let n = self.len();
        let mut inside = vec![false; n];
        for &a in d {
            inside[a] = true;
        }
        loop {
            let mut added = false;
            for s in 0..n {
                if inside[s] {
                    continue;
                }
                let below: Vec<usize> = (0..n).filter(|&a| inside[a] && self.leq[a][s]).collect();
                if below.is_empty() {
                    continue;
                }
                let dominated = (0..n).any(|t| self.lt(t, s) && below.iter().all(|&a| self.leq[a][t]));
                if !dominated {
                    inside[s] = true;
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
        (0..n).filter(|&a| inside[a]).collect()
    }

    pub fn is_closed(&self, d: &[usize]) -> bool {
        self.closure(d).len() == {
            let mut s = d.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len()
        }
    }

    /// Greatest element of `{d ∈ sub : d ≤ z}`, `None` when that set is empty.
    pub fn transfer(&self, sub: &[usize], z: usize) -> Result<Option<usize>> {
        let below: Vec<usize> = sub.iter().copied().filter(|&d| self.leq[d][z]).collect();
        greatest(&below, |a, b| self.leq[a][b]).map_err(|_| Error::TransferUndefined(self.names[z].clone()))
    }

    /// The induced full subposet on `elements`, in the given order.
    pub fn induced(&self, elements: &[usize]) -> FinPoset {
        let names = elements.iter().map(|&i| self.names[i].clone()).collect();
        FinPoset::from_order(names, |a, b| self.leq[elements[a]][elements[b]]).expect("suborder of a poset is a poset")
    }

    /// Resolves element names into indices.
    pub fn indices_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }
}

/// Greatest element of a finite set under `le`, `Ok(None)` when empty, `Err` when
/// nonempty without a greatest element.
fn greatest<T: Copy>(set: &[T], le: impl Fn(T, T) -> bool) -> std::result::Result<Option<T>, ()> {
    if set.is_empty() {
        return Ok(None);
    }
    set.iter().copied().find(|&g| set.iter().all(|&d| le(d, g))).map(Some).ok_or(())
}

/// A point of the realization of a base poset.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Vertex(usize),
    /// A point on the open segment of the cover `y < x`, at coordinate `t ∈ (−1, 0)`.
    Edge { x: usize, y: usize, t: Rational64 },
}

impl Point {
    /// Upper endpoint.
    pub fn pi0(&self) -> usize {
        match *self {
            Point::Vertex(q) => q,
            Point::Edge { x, .. } => x,
        }
    }

    /// Lower endpoint.
    pub fn pi_minus(&self) -> usize {
        match *self {
            Point::Vertex(q) => q,
            Point::Edge { y, .. } => y,
        }
    }

    /// Coordinate along the segment; vertices sit at 0.
    pub fn coord(&self) -> Rational64 {
        match self {
            Point::Vertex(_) => Rational64::zero(),
            Point::Edge { t, .. } => *t,
        }
    }
}

/// Formats a rational as `num/den`.
pub fn format_rational(t: &Rational64) -> String {
    format!("{}/{}", t.numer(), t.denom())
}

/// Parses `num/den` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("malformed rational `{s}`"));
    match s.split_once('/') {
        Some((a, b)) => {
            let num: i64 = a.trim().parse().map_err(|_| bad())?;
            let den: i64 = b.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(num, den))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Canonicalizes a coordinate into `(−1, 0)`: values in `(0, 1)` are shifted down by one.
pub fn canonical_coordinate(t: Rational64) -> Result<Rational64> {
    let one = Rational64::one();
    let t = if t > Rational64::zero() && t < one { t - one } else { t };
    if t > -one && t < Rational64::zero() {
        Ok(t)
    } else {
        Err(Error::BadCoordinate(format_rational(&t)))
    }
}

/// Order of the realization on symbolic points.
pub fn point_leq(base: &FinPoset, a: &Point, b: &Point) -> bool {
    if base.leq(a.pi0(), b.pi_minus()) {
        return true;
    }
    a.pi0() == b.pi0() && a.pi_minus() == b.pi_minus() && a.coord() <= b.coord()
}

/// The finite realization `𝒮(Q, D, V)` together with its base poset.
#[derive(Clone, Debug)]
pub struct RealizedPoset {
    base: FinPoset,
    support: Vec<usize>,
    coords: Vec<Rational64>,
    points: Vec<Point>,
    poset: FinPoset,
}

impl RealizedPoset {
    /// Realizes `Q` over the closed subset `d` with edge coordinates `v`.
    pub fn realize(base: &FinPoset, d: &[usize], v: &[Rational64]) -> Result<RealizedPoset> {
        if !base.dimension().at_most_one() {
            return Err(Error::DimensionTooHigh);
        }
        let mut support = d.to_vec();
        support.sort_unstable();
        support.dedup();
        let closed = base.closure(&support);
        if closed.len() != support.len() {
            let extra = closed.iter().find(|s| !support.contains(s)).expect("closure adds an element");
            return Err(Error::NotClosed(base.name(*extra).to_string()));
        }
        let mut coords = Vec::with_capacity(v.len());
        for &t in v {
            let one = Rational64::one();
            if !(t > -one && t < Rational64::zero()) {
                return Err(Error::BadCoordinate(format_rational(&t)));
            }
            coords.push(t);
        }
        coords.sort();
        coords.dedup();
        let mut points: Vec<Point> = support.iter().map(|&q| Point::Vertex(q)).collect();
        for &x in &support {
            for &y in base.lower_covers(x) {
                for &t in &coords {
                    points.push(Point::Edge { x, y, t });
                }
            }
        }
        let names = points.iter().map(|z| point_name(base, z)).collect();
        let poset = FinPoset::from_order(names, |a, b| point_leq(base, &points[a], &points[b]))?;
        Ok(RealizedPoset { base: base.clone(), support, coords, points, poset })
    }

    pub fn base(&self) -> &FinPoset {
        &self.base
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coords(&self) -> &[Rational64] {
        &self.coords
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// The materialized finite poset on the points.
    pub fn poset(&self) -> &FinPoset {
        &self.poset
    }

    pub fn position(&self, z: &Point) -> Option<usize> {
        self.points.iter().position(|w| w == z)
    }

    /// Checks that a symbolic point lies in the realization of the base.
    pub fn check_point(&self, z: &Point) -> Result<()> {
        match z {
            Point::Vertex(q) if *q < self.base.len() => Ok(()),
            Point::Edge { x, y, t } if *x < self.base.len() && self.base.cover_index(*y, *x).is_some() => {
                canonical_coordinate(*t).map(|_| ())
            }
            _ => Err(Error::BadPoint(format!("{z:?}"))),
        }
    }

    /// Transfer of `𝒮(Q, V) ⊂ 𝒮(Q)` in closed form.
    pub fn alpha_v(&self, z: &Point) -> Point {
        match z {
            Point::Vertex(_) => z.clone(),
            Point::Edge { x, y, t } => match self.coords.iter().filter(|&&v| v <= *t).max() {
                None => Point::Vertex(*y),
                Some(&v) => Point::Edge { x: *x, y: *y, t: v },
            },
        }
    }

    /// Transfer of a symbolic point into the realized points: the greatest point
    /// below `z`, `None` for the bottom.
    pub fn transfer_point(&self, z: &Point) -> Result<Option<usize>> {
        self.check_point(z)?;
        let w = self.alpha_v(z);
        if let Some(i) = self.position(&w) {
            return Ok(Some(i));
        }
        self.transfer_brute(&w)
    }

    /// Transfer by enumerating the points below `z`.
    pub fn transfer_brute(&self, z: &Point) -> Result<Option<usize>> {
        let below: Vec<usize> = (0..self.points.len()).filter(|&i| point_leq(&self.base, &self.points[i], z)).collect();
        greatest(&below, |a, b| self.poset.leq(a, b)).map_err(|_| Error::TransferUndefined(point_name(&self.base, z)))
    }

    /// Parses either a base element name or `(x,y,t)`.
    pub fn parse_point(&self, s: &str) -> Result<Point> {
        parse_point(&self.base, s)
    }
}

/// Display name of a realization point: vertices by base name, edges as `(x,y,t)`.
pub fn point_name(base: &FinPoset, z: &Point) -> String {
    match z {
        Point::Vertex(q) => base.name(*q).to_string(),
        Point::Edge { x, y, t } => format!("({},{},{})", base.name(*x), base.name(*y), format_rational(t)),
    }
}

/// Parses a base element name or an edge point `(x,y,t)`; `t` may be given in `(0,1)`.
pub fn parse_point(base: &FinPoset, s: &str) -> Result<Point> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::BadPoint(s.to_string()));
        }
        let x = base.index_of(parts[0])?;
        let y = base.index_of(parts[1])?;
        if base.cover_index(y, x).is_none() {
            return Err(Error::BadPoint(format!("`{}` is not covered by `{}`", parts[1], parts[0])));
        }
        let t = canonical_coordinate(parse_rational(parts[2])?)?;
        Ok(Point::Edge { x, y, t })
    } else {
        Ok(Point::Vertex(base.index_of(s)?))
    }
}
