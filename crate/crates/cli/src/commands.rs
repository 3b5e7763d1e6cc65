//! Subcommand implementations. Each returns a text report, a structured report and,
//! for commands that produce objects, a document to pass down a pipe.

use std::fmt::Write as _;

use num_rational::Rational64;
use parchain::builtin::builtin_example;
use parchain::chaincx::{
    homology, is_cofibrant, minimal_cofibrant_replacement, minimal_projective_cover_ch, minimal_resolution_ch,
    SummandKind,
};
use parchain::decomp::{gluing_check, indecomposable, structure_decompose, EndRing, Indecomposability, Strategy};
use parchain::functor::{generator_position, generator_vector, minimal_resolution, multiplicities, Morphism};
use parchain::poset::{format_rational, parse_rational, point_name, Dimension, RealizedPoset};
use parchain::{ChainFunctor, Error, FinPoset, Result};
use serde_json::{json, Value};

use crate::doc::{chain_to_doc, mat_to_doc, poset_to_doc, single_chain, Document, GluingDoc, Loaded, RealizationDoc};

pub struct Output {
    pub text: String,
    pub report: Value,
    pub doc: Option<Document>,
}

impl Output {
    fn report(text: String, report: Value) -> Output {
        Output { text, report, doc: None }
    }
}

/// The chain functor a command acts on, with its name and poset name.
pub struct Target {
    pub name: String,
    pub poset: String,
    pub x: ChainFunctor,
    /// Set when the target came from the `functors` table.
    pub from_functor: bool,
}

pub fn select(l: &Loaded, name: Option<&str>) -> Result<Target> {
    let pick_chain = |n: &str| {
        l.chain_functors
            .get(n)
            .map(|(q, x)| Target { name: n.to_string(), poset: q.clone(), x: x.clone(), from_functor: false })
    };
    let pick_functor = |n: &str| {
        l.functors.get(n).map(|(q, f)| Target {
            name: n.to_string(),
            poset: q.clone(),
            x: ChainFunctor::from_vect(f),
            from_functor: true,
        })
    };
    match name {
        Some(n) => pick_chain(n).or_else(|| pick_functor(n)).ok_or_else(|| Error::Invalid(format!("no object named `{n}`"))),
        None => {
            let mut all: Vec<&String> = l.chain_functors.keys().collect();
            if all.is_empty() {
                all = l.functors.keys().collect();
            }
            match all.as_slice() {
                [only] => pick_chain(only).or_else(|| pick_functor(only)).ok_or_else(|| Error::Invalid("empty".into())),
                [] => Err(Error::Invalid("document holds no functor or chain functor".into())),
                _ => Err(Error::Invalid(format!(
                    "document holds several objects ({}); choose one with --name",
                    all.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                ))),
            }
        }
    }
}

fn gens_table(q: &FinPoset, gens: &[usize]) -> Vec<Value> {
    multiplicities(gens).into_iter().map(|(z, m)| json!({"element": q.name(z), "multiplicity": m})).collect()
}

fn gens_text(q: &FinPoset, gens: &[usize]) -> String {
    if gens.is_empty() {
        return "0".into();
    }
    multiplicities(gens)
        .into_iter()
        .map(|(z, m)| if m == 1 { format!("F({})", q.name(z)) } else { format!("F({})^{m}", q.name(z)) })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn dimension_name(d: Dimension) -> &'static str {
    match d {
        Dimension::Zero => "0",
        Dimension::One => "1",
        Dimension::TwoPlus => ">=2",
    }
}

pub fn validate(l: &Loaded) -> Result<Output> {
    for f in l.functors.values() {
        f.1.check_functorial()?;
    }
    for x in l.chain_functors.values() {
        x.1.validate()?;
    }
    let text = format!(
        "valid: {} posets, {} functors, {} chain functors",
        l.posets.len(),
        l.functors.len(),
        l.chain_functors.len()
    );
    let report = json!({"valid": true, "posets": l.posets.len(), "functors": l.functors.len(), "chain_functors": l.chain_functors.len()});
    Ok(Output::report(text, report))
}

pub fn info(t: &Target) -> Result<Output> {
    let x = &t.x;
    x.validate()?;
    let q = x.poset();
    let mut text = String::new();
    let dim = dimension_name(q.dimension());
    writeln!(text, "{}: {} elements, {} covers, poset dimension {dim}, top degree {}", t.name, q.len(), q.covers().len(), x.top()).unwrap();
    writeln!(text, "{:<12} {:>16} {:>16}", "element", "dims (0..top)", "homology").unwrap();
    let hs: Vec<_> = (0..=x.top()).map(|n| homology(x, n)).collect();
    let mut rows = Vec::new();
    for e in 0..q.len() {
        let dims = x.element_dims(e);
        let h: Vec<usize> = hs.iter().map(|h| h.functor.dim(e)).collect();
        writeln!(text, "{:<12} {:>16} {:>16}", q.name(e), format!("{dims:?}"), format!("{h:?}")).unwrap();
        rows.push(json!({"element": q.name(e), "dims": dims, "homology": h}));
    }
    let cof = is_cofibrant(x);
    write!(text, "cofibrant: {cof}").unwrap();
    let report = json!({
        "name": t.name, "elements": q.len(), "covers": q.covers().len(), "poset_dimension": dim,
        "top": x.top(), "table": rows, "cofibrant": cof,
    });
    Ok(Output::report(text, report))
}

pub fn cover(t: &Target) -> Result<Output> {
    t.x.validate()?;
    let q = t.x.poset();
    let c = minimal_projective_cover_ch(&t.x);
    let mut text = format!("minimal projective cover of {}: sum of D^n(P_n)\n", t.name);
    let mut degrees = Vec::new();
    for (n, g) in c.gens.iter().enumerate() {
        writeln!(text, "  P_{n} = {}", gens_text(q, g)).unwrap();
        degrees.push(json!({"degree": n, "generators": gens_table(q, g)}));
    }
    Ok(Output::report(text.trim_end().to_string(), json!({"name": t.name, "cover": degrees})))
}

/// Matrix of a map between free functors in generator coordinates: column `j` is the
/// image of source generator `j` in terms of target generators.
fn presentation_matrix(q: &FinPoset, p: u32, gens0: &[usize], gens1: &[usize], d: &Morphism) -> Value {
    let mut m = parchain::Mat::zeros(p, gens0.len(), gens1.len());
    for (j, &z) in gens1.iter().enumerate() {
        let v = d.comps[z].mul(&generator_vector(q, p, gens1, j));
        for i in 0..gens0.len() {
            if let Some(pos) = generator_position(q, gens0, i, z) {
                m.set(i, j, v.get(pos, 0));
            }
        }
    }
    serde_json::to_value(mat_to_doc(&m)).expect("matrix serializes")
}

pub fn resolve(t: &Target, max_len: usize) -> Result<Output> {
    t.x.validate()?;
    let q = t.x.poset();
    if t.from_functor {
        let f = t.x.degree(0);
        let r = minimal_resolution(f)?;
        let text = format!(
            "minimal resolution of {}: 0 -> {} -> {} -> {} -> 0",
            t.name,
            gens_text(q, &r.p1.gens),
            gens_text(q, &r.p0.gens),
            t.name
        );
        let report = json!({
            "name": t.name,
            "p0": gens_table(q, &r.p0.gens),
            "p1": gens_table(q, &r.p1.gens),
            "matrix": presentation_matrix(q, f.p(), &r.p0.gens, &r.p1.gens, &r.d),
        });
        return Ok(Output::report(text, report));
    }
    let stages = minimal_resolution_ch(&t.x, max_len)?;
    let mut text = format!("minimal projective resolution of {} ({} stages, projective dimension {})\n", t.name, stages.len(), stages.len() - 1);
    let mut out = Vec::new();
    for (k, s) in stages.iter().enumerate() {
        let parts: Vec<String> =
            s.gens.iter().enumerate().filter(|(_, g)| !g.is_empty()).map(|(n, g)| format!("D^{n}({})", gens_text(q, g))).collect();
        writeln!(text, "  stage {k}: {}", if parts.is_empty() { "0".into() } else { parts.join(" + ") }).unwrap();
        let degs: Vec<Value> = s.gens.iter().enumerate().map(|(n, g)| json!({"degree": n, "generators": gens_table(q, g)})).collect();
        out.push(json!({"stage": k, "disks": degs}));
    }
    let report = json!({"name": t.name, "projective_dimension": stages.len() - 1, "stages": out});
    Ok(Output::report(text.trim_end().to_string(), report))
}

pub fn replace(t: &Target, p: u32) -> Result<Output> {
    t.x.validate()?;
    let q = t.x.poset();
    let fac = minimal_cofibrant_replacement(&t.x)?;
    let c = fac.complex;
    let mut text = format!("minimal cofibrant replacement of {}: top degree {}\n", t.name, c.top());
    let mut added = Vec::new();
    for (n, g) in fac.added.iter().enumerate() {
        writeln!(text, "  degree {n}: {}", gens_text(q, g)).unwrap();
        added.push(json!({"degree": n, "generators": gens_table(q, g)}));
    }
    let doc = single_chain(p, &t.name, &t.poset, &c);
    Ok(Output { text: text.trim_end().to_string(), report: json!({"name": t.name, "degrees": added}), doc: Some(doc) })
}

pub fn decompose(t: &Target) -> Result<Output> {
    t.x.validate()?;
    let q = t.x.poset();
    let p = t.x.p();
    let d = structure_decompose(&t.x)?;
    let mut text = format!("{} summands\n", d.summands.len());
    let mut rows = Vec::new();
    for s in &d.summands {
        let l = &s.label;
        let (kind, desc) = match l.kind {
            SummandKind::Sphere => ("sphere", format!("S^{}  P0 = {}  P1 = {}", l.degree, gens_text(q, &l.gens0), gens_text(q, &l.gens1))),
            SummandKind::Disk => ("disk", format!("D^{}  {}", l.degree + 1, gens_text(q, &l.gens0))),
        };
        writeln!(text, "  {desc}").unwrap();
        let mut row = json!({"kind": kind, "degree": l.degree, "generators": gens_table(q, &l.gens0)});
        if l.kind == SummandKind::Sphere {
            row["relations"] = Value::from(gens_table(q, &l.gens1));
            if let Some(r) = &l.resolution {
                row["resolution_matrix"] = presentation_matrix(q, p, &l.gens0, &l.gens1, r);
            }
        }
        rows.push(row);
    }
    Ok(Output::report(text.trim_end().to_string(), json!({"name": t.name, "summands": rows})))
}

pub fn endring(t: &Target) -> Result<Output> {
    t.x.validate()?;
    let ring = EndRing::new(&t.x);
    let d = ring.dim();
    let constants: Vec<Vec<Vec<u32>>> =
        (0..d).map(|i| (0..d).map(|j| ring.structure_constants(i, j).to_vec()).collect()).collect();
    let text = format!("End({}) has dimension {d} over F_{}\nidentity: {:?}", t.name, ring.p(), ring.identity_coords());
    let report = json!({"name": t.name, "dim": d, "identity": ring.identity_coords(), "structure_constants": constants});
    Ok(Output::report(text, report))
}

pub fn indec(t: &Target, strategy: Strategy) -> Result<Output> {
    t.x.validate()?;
    let res = indecomposable(&t.x, strategy)?;
    let (verdict, certainty, extra) = match &res {
        Indecomposability::Certain { indecomposable, .. } => {
            (if *indecomposable { "indecomposable" } else { "decomposable" }, "certain", String::new())
        }
        Indecomposability::Probable { indecomposable, trials } => {
            (if *indecomposable { "indecomposable" } else { "decomposable" }, "probable", format!(" ({trials} trials)"))
        }
    };
    let mut report = json!({"name": t.name, "indecomposable": res.is_indecomposable(), "certainty": certainty});
    if let Indecomposability::Probable { trials, .. } = res {
        report["trials"] = Value::from(trials);
    }
    if let Indecomposability::Certain { witness: Some(w), .. } = &res {
        let ring = EndRing::new(&t.x);
        report["witness"] = Value::from(ring.coords(w));
    }
    Ok(Output::report(format!("{verdict}: {certainty}{extra}"), report))
}

pub fn glue(t: &Target, a: &[String], b: &[String]) -> Result<Output> {
    t.x.validate()?;
    let q = t.x.poset();
    let (ai, bi) = (q.indices_of(a)?, q.indices_of(b)?);
    let r = gluing_check(&t.x, &ai, &bi)?;
    let mut text = String::new();
    writeln!(text, "gluing {} along A = {{{}}}, B = {{{}}}", t.name, a.join(", "), b.join(", ")).unwrap();
    writeln!(text, "  Kan extension of X_(A∩B) nonzero in degrees {:?}", r.extension_degrees).unwrap();
    writeln!(text, "  dim hom(coker β, X_B) = {}, through rad: {}", r.hom_coker_dim, r.hom_coker_rad_dim).unwrap();
    writeln!(text, "  dim ker(End X -> End X_A) = {}", r.restriction_kernel_dim).unwrap();
    writeln!(text, "  hom(coker β, X_B) = 0: {}", r.crit_hom_zero).unwrap();
    writeln!(text, "  rad criterion: {}", r.crit_rad_iso).unwrap();
    writeln!(text, "  restriction kernel nilpotent: {}", r.crit_kernel_nilpotent).unwrap();
    write!(text, "  restriction injective: {}", r.crit_restriction_injective).unwrap();
    let report = json!({
        "name": t.name, "a": a, "b": b,
        "b_elements": r.b_elements, "beta_cokernel_dims": r.beta_cokernel_dims,
        "extension_degrees": r.extension_degrees, "hom_coker_dim": r.hom_coker_dim,
        "hom_coker_rad_dim": r.hom_coker_rad_dim, "restriction_kernel_dim": r.restriction_kernel_dim,
        "crit_hom_zero": r.crit_hom_zero, "crit_rad_iso": r.crit_rad_iso,
        "crit_kernel_nilpotent": r.crit_kernel_nilpotent, "crit_restriction_injective": r.crit_restriction_injective,
    });
    Ok(Output::report(text, report))
}

fn parse_coords(v: &str) -> Result<Vec<Rational64>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse_rational).collect()
}

/// The realization described by a poset's realization block, or by flags over it.
fn realization(l: &Loaded, poset: &str, d: Option<&[String]>, v: Option<&str>, doc: &Document) -> Result<RealizedPoset> {
    if let Some(r) = doc.posets.get(poset).and_then(|pd| pd.realization.as_ref()) {
        if d.is_none() && v.is_none() {
            let base = l.poset(&r.base)?;
            let coords: Vec<Rational64> = r.coords.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?;
            return RealizedPoset::realize(base, &base.indices_of(&r.support)?, &coords);
        }
    }
    let base = l.poset(poset)?;
    let support = match d {
        Some(d) => base.indices_of(d)?,
        None => (0..base.len()).collect(),
    };
    RealizedPoset::realize(base, &support, &parse_coords(v.unwrap_or(""))?)
}

pub fn default_poset(l: &Loaded, name: Option<&str>) -> Result<String> {
    match name {
        Some(n) => l.poset(n).map(|_| n.to_string()),
        None => {
            let bases: Vec<&String> = l.posets.keys().collect();
            match bases.as_slice() {
                [only] => Ok((*only).clone()),
                [] => Err(Error::Invalid("document holds no poset".into())),
                _ => Err(Error::Invalid("document holds several posets; choose one with --poset".into())),
            }
        }
    }
}

pub fn realize(l: &Loaded, poset: &str, d: Option<&[String]>, v: &str, doc: &Document) -> Result<Output> {
    let r = realization(l, poset, d, Some(v), doc)?;
    let base = r.base();
    let mut pd = poset_to_doc(r.poset());
    pd.realization = Some(RealizationDoc {
        base: poset.to_string(),
        support: r.support().iter().map(|&s| base.name(s).to_string()).collect(),
        coords: r.coords().iter().map(format_rational).collect(),
    });
    let name = format!("{poset}.realized");
    let mut out = Document { field: l.p, ..Default::default() };
    out.posets.insert(poset.to_string(), doc.posets[poset].clone());
    out.posets.insert(name.clone(), pd);
    let text = format!("{name}: {} points, {} covers, dimension {}", r.points().len(), r.poset().covers().len(), dimension_name(r.poset().dimension()));
    let report = json!({"name": name, "points": r.points().len(), "covers": r.poset().covers().len()});
    Ok(Output { text, report, doc: Some(out) })
}

pub fn transfer(l: &Loaded, poset: &str, d: Option<&[String]>, v: Option<&str>, point: &str, doc: &Document) -> Result<Output> {
    let r = realization(l, poset, d, v, doc)?;
    let z = r.parse_point(point)?;
    let alpha = r.alpha_v(&z);
    let t = r.transfer_point(&z)?;
    let base = r.base();
    let target = t.map(|i| point_name(base, &r.points()[i]));
    let text = format!(
        "point {}: alpha_V = {}, transfer = {}",
        point_name(base, &z),
        point_name(base, &alpha),
        target.as_deref().unwrap_or("none (nothing below)")
    );
    let report = json!({"point": point_name(base, &z), "alpha_v": point_name(base, &alpha), "transfer": target});
    Ok(Output::report(text, report))
}

pub fn example(name: &str, p: u32) -> Result<Output> {
    let ex = builtin_example(name, p)?;
    let mut doc = Document { field: p, ..Default::default() };
    for (n, q) in &ex.posets {
        doc.posets.insert(n.clone(), poset_to_doc(q));
    }
    for (n, x) in &ex.chain_functors {
        let qname = ex
            .posets
            .iter()
            .find(|(_, q)| **q == **x.poset())
            .map(|(qn, _)| qn.clone())
            .expect("example posets cover their chain functors");
        doc.chain_functors.insert(n.clone(), chain_to_doc(&qname, x));
    }
    doc.gluing = ex.gluing.map(|(a, b)| GluingDoc { a, b });
    let report = json!({"example": name});
    Ok(Output { text: String::new(), report, doc: Some(doc) })
}
