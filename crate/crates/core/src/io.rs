//! Text formats, structured (JSON) output and SVG drawings of planar
//! partitions.

use std::fmt::{Display, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use serde_json::{json, Value};

use crate::counterexamples::CubicalConfigReport;
use crate::dual::DualComplex;
use crate::embed::{classify_projection, EmbeddingVerdict, Projection, VerdictKind};
use crate::error::{Error, Result};
use crate::model::{validate_in, BalanceReport, IntBox, Partition};
use crate::orient::Sign;
use crate::solver::{SolveResult, SolveStatus};
use crate::stab::{StabStatus, StabVerdict};

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, msg: msg.into() }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn ints(line: usize, l: &str) -> Result<Vec<i64>> {
    l.split_whitespace()
        .map(|t| t.parse::<i64>().map_err(|_| syntax(line, format!("expected integer, found {t:?}"))))
        .collect()
}

/// Partition file: `d n m`, then one line `lo_1 hi_1 ... lo_d hi_d` per
/// box. A non-cubic domain `[0, n_1] x ... x [0, n_d]` is written with the
/// header `d n_1 ... n_d m`.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    let h = ints(hl, header)?;
    let d = *h.first().ok_or_else(|| syntax(hl, "empty header"))?;
    if d < 1 || !(h.len() == 3 || h.len() == d as usize + 2) {
        return Err(syntax(hl, "header must be `d n m`"));
    }
    let d = d as usize;
    let m = *h.last().unwrap();
    if m < 0 {
        return Err(syntax(hl, "negative box count"));
    }
    let sides: Vec<i64> = if h.len() == 3 { vec![h[1]; d] } else { h[1..=d].to_vec() };
    if sides.iter().any(|&n| n < 1) {
        return Err(syntax(hl, "domain sides must be positive"));
    }
    let mut boxes = Vec::with_capacity(m as usize);
    for (ln, l) in lines {
        let v = ints(ln, l)?;
        if v.len() != 2 * d {
            return Err(syntax(ln, format!("expected {} integers, found {}", 2 * d, v.len())));
        }
        boxes.push(IntBox::from_interleaved(&v).map_err(|e| syntax(ln, e.to_string()))?);
    }
    if boxes.len() != m as usize {
        return Err(syntax(hl, format!("header announces {m} boxes, file has {}", boxes.len())));
    }
    validate_in(boxes, IntBox::new(vec![0; d], sides)?, false)
}

pub fn write_partition(p: &Partition) -> String {
    let dom = p.domain();
    let mut s = match p.outer() {
        Some(n) => format!("{} {} {}\n", p.dim(), n, p.len()),
        None => {
            let sides: Vec<String> = dom.sides().iter().map(i64::to_string).collect();
            format!("{} {} {}\n", p.dim(), sides.join(" "), p.len())
        }
    };
    for b in p.boxes() {
        push_ints(&mut s, &b.interleaved());
    }
    s
}

fn push_ints(s: &mut String, v: &[i64]) {
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x}");
    }
    s.push('\n');
}

/// Projection file: one line of `d` doubled coordinates per box.
pub fn parse_projection(text: &str, d: usize) -> Result<Projection> {
    let mut coords = Vec::new();
    for (ln, l) in content_lines(text) {
        let v = ints(ln, l)?;
        if v.len() != d {
            return Err(syntax(ln, format!("expected {d} coordinates, found {}", v.len())));
        }
        coords.push(v);
    }
    Ok(Projection::new(coords))
}

pub fn write_projection(proj: &Projection) -> String {
    let mut s = String::new();
    for c in &proj.coords {
        push_ints(&mut s, c);
    }
    s
}

/// One line of a dual dump: a simplex, and for top simplices the anchor
/// vertex and axis order of its seed chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLine {
    pub simplex: Vec<usize>,
    pub seed: Option<(Vec<i64>, Vec<usize>)>,
}

/// Simplices by dimension, then lexicographically. Top simplices carry
/// `| w_1 ... w_d perm` with the axis order written as 1-based digits.
pub fn dual_lines(dc: &DualComplex) -> Vec<DualLine> {
    let mut all: Vec<Vec<usize>> = dc.all_simplices().into_iter().collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.into_iter()
        .map(|s| {
            let seed = (s.len() == dc.dim() + 1)
                .then(|| dc.seed_of(&s).ok().map(|c| (c.anchor.clone(), c.order.clone())))
                .flatten();
            DualLine { simplex: s, seed }
        })
        .collect()
}

pub fn write_dual_lines(lines: &[DualLine]) -> String {
    let mut s = String::new();
    for l in lines {
        let _ = write!(s, "{}", l.simplex.len() - 1);
        for v in &l.simplex {
            let _ = write!(s, " {v}");
        }
        if let Some((w, perm)) = &l.seed {
            s.push_str(" |");
            for x in w {
                let _ = write!(s, " {x}");
            }
            s.push(' ');
            for a in perm {
                let _ = write!(s, "{}", a + 1);
            }
        }
        s.push('\n');
    }
    s
}

pub fn write_dual(dc: &DualComplex) -> String {
    write_dual_lines(&dual_lines(dc))
}

pub fn parse_dual(text: &str) -> Result<Vec<DualLine>> {
    let mut out = Vec::new();
    for (ln, l) in content_lines(text) {
        let (head, seed) = match l.split_once('|') {
            Some((h, t)) => (h, Some(t)),
            None => (l, None),
        };
        let v = ints(ln, head)?;
        let k = *v.first().ok_or_else(|| syntax(ln, "empty line"))?;
        if k < 0 || v.len() != k as usize + 2 {
            return Err(syntax(ln, "simplex line is `k v_0 ... v_k`"));
        }
        let simplex: Vec<usize> = v[1..].iter().map(|&x| x as usize).collect();
        let seed = match seed {
            None => None,
            Some(t) => {
                let toks: Vec<&str> = t.split_whitespace().collect();
                let (perm, w) = toks.split_last().ok_or_else(|| syntax(ln, "empty seed"))?;
                let w = ints(ln, &w.join(" "))?;
                let order = perm
                    .chars()
                    .map(|c| c.to_digit(10).filter(|&x| x >= 1).map(|x| x as usize - 1))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| syntax(ln, format!("bad permutation {perm:?}")))?;
                if order.len() != w.len() {
                    return Err(syntax(ln, "anchor and permutation lengths differ"));
                }
                Some((w, order))
            }
        };
        out.push(DualLine { simplex, seed });
    }
    Ok(out)
}

/// `p/q` with `q > 0` in lowest terms, also when `q = 1`.
pub fn fmt_ratio<T: Clone + Integer + Display>(r: &Ratio<T>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_ratio(s: &str) -> Result<Ratio<i64>> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().map_err(|_| bad())?, d.trim().parse::<i64>().map_err(|_| bad())?),
        None => (s.trim().parse::<i64>().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

pub fn sign_str(s: Sign) -> &'static str {
    match s.as_i8() {
        1 => "+1",
        -1 => "-1",
        _ => "0",
    }
}

fn kind_str(k: VerdictKind) -> &'static str {
    match k {
        VerdictKind::Embedding => "Embedding",
        VerdictKind::NotEmbedding => "NotEmbedding",
        VerdictKind::Unsupported => "Unsupported",
    }
}

pub fn verdict_json(v: &EmbeddingVerdict) -> Value {
    json!({
        "verdict": kind_str(v.kind),
        "violations": v.violations.iter()
            .map(|(s, sg)| json!({"simplex": s, "sign": sign_str(*sg)}))
            .collect::<Vec<_>>(),
    })
}

pub fn verdict_text(v: &EmbeddingVerdict) -> String {
    let mut s = format!("verdict: {}\n", kind_str(v.kind));
    for (simplex, sg) in &v.violations {
        let ids: Vec<String> = simplex.iter().map(usize::to_string).collect();
        let _ = writeln!(s, "violation: {} sign {}", ids.join(" "), sign_str(*sg));
    }
    s
}

pub fn balance_json(b: &BalanceReport) -> Value {
    json!({"balance": fmt_ratio(&b.value), "witness": b.witness})
}

pub fn solve_status_str(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Sat => "SAT",
        SolveStatus::Unsat => "UNSAT",
        SolveStatus::Timeout => "TIMEOUT",
    }
}

pub fn solve_json(r: &SolveResult) -> Value {
    json!({
        "status": solve_status_str(r.status),
        "complete": r.complete,
        "nodes": r.stats.nodes,
        "propagations": r.stats.propagations,
        "solutions": r.stats.solutions,
        "certificate": r.certificate.as_ref().map(|c| &c.coords),
    })
}

fn stab_status_str(s: StabStatus) -> &'static str {
    match s {
        StabStatus::Feasible => "Feasible",
        StabStatus::Infeasible => "Infeasible",
    }
}

fn ratios<T: Clone + Integer + Display>(v: &[Ratio<T>]) -> Vec<String> {
    v.iter().map(fmt_ratio).collect()
}

pub fn stab_json(v: &StabVerdict) -> Value {
    json!({
        "verdict": stab_status_str(v.status),
        "systems": v.systems_solved,
        "refuted_cases": v.refutations.len(),
        "witness": v.witness.as_ref().map(|w| json!({
            "coeffs": ratios(&w.coeffs),
            "points": w.points.iter().map(|p| ratios(p)).collect::<Vec<_>>(),
        })),
    })
}

pub fn stab_text(v: &StabVerdict) -> String {
    let mut s = format!("verdict: {}\nsystems: {}\n", stab_status_str(v.status), v.systems_solved);
    let _ = writeln!(s, "refuted_cases: {}", v.refutations.len());
    if let Some(w) = &v.witness {
        let _ = writeln!(s, "coeffs: {}", ratios(&w.coeffs).join(" "));
        for (i, p) in w.points.iter().enumerate() {
            let _ = writeln!(s, "point {i}: {}", ratios(p).join(" "));
        }
    }
    s
}

fn big_list(v: &[BigInt]) -> String {
    v.iter().map(BigInt::to_string).collect::<Vec<_>>().join(" ")
}

/// `key: value` certificate lines.
pub fn cubical_text(r: &CubicalConfigReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "d: {}", r.d);
    let _ = writeln!(s, "beta: {}", fmt_ratio(&r.beta));
    let _ = writeln!(s, "lambda: {}", r.lambda);
    let _ = writeln!(s, "a: {}", r.a);
    let _ = writeln!(s, "b: {}", r.b);
    for (i, c) in r.centers.iter().enumerate() {
        let _ = writeln!(s, "center {i}: {}", ratios(c).join(" "));
    }
    let _ = writeln!(s, "det_sign: {}", sign_str(r.det_sign));
    let _ = writeln!(s, "seed_orientation: {}", sign_str(r.seed_orientation));
    let _ = writeln!(s, "side_set: {}", big_list(&r.side_set));
    let _ = writeln!(s, "chain_holds: {}", r.chain_holds);
    let _ = writeln!(s, "coprime: {}", r.coprime);
    let _ = writeln!(s, "l0_bound: {}", r.l0_bound);
    let _ = writeln!(s, "materializable: {}", r.materializable);
    s
}

pub fn cubical_json(r: &CubicalConfigReport) -> Value {
    json!({
        "d": r.d,
        "beta": fmt_ratio(&r.beta),
        "lambda": r.lambda,
        "a": r.a.to_string(),
        "b": r.b.to_string(),
        "centers": r.centers.iter().map(|c| ratios(c)).collect::<Vec<_>>(),
        "det_sign": sign_str(r.det_sign),
        "seed_orientation": sign_str(r.seed_orientation),
        "side_set": r.side_set.iter().map(BigInt::to_string).collect::<Vec<_>>(),
        "chain_holds": r.chain_holds,
        "coprime": r.coprime,
        "l0_bound": r.l0_bound.to_string(),
        "materializable": r.materializable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    pub partition: bool,
    pub dual_edges: bool,
    pub dual_vertices: bool,
    pub seed_anchors: bool,
    pub violations: bool,
}

impl Default for Layers {
    fn default() -> Self {
        Layers { partition: true, dual_edges: true, dual_vertices: true, seed_anchors: false, violations: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderSpec {
    /// Drawing units per grid unit.
    pub scale: u32,
    pub layers: Layers,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { scale: 20, layers: Layers::default() }
    }
}

/// Half of an integer, printed exactly.
fn half(v: i64) -> String {
    if v % 2 == 0 {
        (v / 2).to_string()
    } else {
        format!("{}{}.5", if v < 0 { "-" } else { "" }, v.abs() / 2)
    }
}

/// Rectangles outlined; with a projection, dual vertices as dots, edges as
/// segments and violated triangles filled.
pub fn render_svg(p: &Partition, proj: Option<&Projection>, dc: &DualComplex, spec: &RenderSpec) -> Result<String> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    if spec.scale == 0 {
        return Err(Error::InvalidArgument("render scale must be positive".into()));
    }
    let sc = spec.scale as i64;
    let dom = p.domain();
    let (x0, y1) = (dom.lo()[0], dom.hi()[1]);
    let (w, h) = (dom.side(0) * sc, dom.side(1) * sc);
    // doubled point to doubled drawing coordinates, y pointing down
    let px = |c: &[i64]| ((c[0] - 2 * x0) * sc, (2 * y1 - c[1]) * sc);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    );
    s.push_str("<style>.box{fill:none;stroke:#333;stroke-width:1}.edge{stroke:#1565c0;stroke-width:1}.dot{fill:#1565c0}.anchor{fill:#2e7d32}.violation{fill:#e53935;fill-opacity:0.5;stroke:#b71c1c}</style>\n");
    if spec.layers.partition {
        for b in p.boxes() {
            let _ = writeln!(
                s,
                "<rect class=\"box\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>",
                (b.lo()[0] - x0) * sc,
                (y1 - b.hi()[1]) * sc,
                b.side(0) * sc,
                b.side(1) * sc
            );
        }
    }
    if let Some(proj) = proj {
        if proj.len() != p.len() {
            return Err(Error::DimensionMismatch { expected: p.len(), found: proj.len() });
        }
        if spec.layers.violations {
            let verdict = classify_projection(p, dc, proj)?;
            for (simplex, _) in &verdict.violations {
                let pts: Vec<String> = simplex
                    .iter()
                    .map(|&v| {
                        let (x, y) = px(&proj.coords[v]);
                        format!("{},{}", half(x), half(y))
                    })
                    .collect();
                let _ = writeln!(s, "<polygon class=\"violation\" points=\"{}\"/>", pts.join(" "));
            }
        }
        if spec.layers.dual_edges {
            for e in dc.simplices(1) {
                let (a, b) = (px(&proj.coords[e[0]]), px(&proj.coords[e[1]]));
                let _ = writeln!(
                    s,
                    "<line class=\"edge\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    half(a.0),
                    half(a.1),
                    half(b.0),
                    half(b.1)
                );
            }
        }
        if spec.layers.dual_vertices {
            for c in &proj.coords {
                let (x, y) = px(c);
                let _ = writeln!(s, "<circle class=\"dot\" cx=\"{}\" cy=\"{}\" r=\"2\"/>", half(x), half(y));
            }
        }
    }
    if spec.layers.seed_anchors {
        for (_, seed) in dc.top_simplices() {
            let a: Vec<i64> = seed.anchor.iter().map(|x| 2 * x).collect();
            let (x, y) = px(&a);
            let _ = writeln!(s, "<circle class=\"anchor\" cx=\"{}\" cy=\"{}\" r=\"1.5\"/>", half(x), half(y));
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::build_dual;
    use crate::embed::center_projection;

    #[test]
    fn partition_round_trip() {
        let f = "2 2 4\n0 1 0 1\n1 2 0 1\n0 1 1 2\n1 2 1 2\n";
        let p = parse_partition(f).unwrap();
        assert_eq!(write_partition(&p), f);
        assert_eq!(parse_partition("2 1 1\n0 1 0 1\n").unwrap().len(), 1);
        let commented = "# grid\n2 2 4\n0 1 0 1 # first\n1 2 0 1\n0 1 1 2\n1 2 1 2\n";
        assert_eq!(write_partition(&parse_partition(commented).unwrap()), f);
    }

    #[test]
    fn partition_errors() {
        assert!(matches!(parse_partition("2 2 2\n0 2 0 1\n0 1 0 2\n"), Err(Error::Overlap(..))));
        assert!(matches!(parse_partition("2 2 1\n0 2 x 2\n"), Err(Error::Syntax { line: 2, .. })));
        assert!(matches!(parse_partition("2 2 2\n0 2 0 2\n"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn non_cubic_header() {
        let f = "2 3 1 3\n0 1 0 1\n1 2 0 1\n2 3 0 1\n";
        assert_eq!(write_partition(&parse_partition(f).unwrap()), f);
    }

    #[test]
    fn dual_dump_round_trip() {
        let p = parse_partition("2 2 4\n0 1 0 1\n1 2 0 1\n0 1 1 2\n1 2 1 2\n").unwrap();
        let dc = build_dual(&p).unwrap();
        let text = write_dual(&dc);
        assert_eq!(write_dual_lines(&parse_dual(&text).unwrap()), text);
        assert_eq!(text.lines().filter(|l| l.contains('|')).count(), 2);
    }

    #[test]
    fn rationals() {
        assert_eq!(fmt_ratio(&Ratio::new(6, -4)), "-3/2");
        assert_eq!(fmt_ratio(&Ratio::from_integer(3)), "3/1");
        assert_eq!(parse_ratio("29/10").unwrap(), Ratio::new(29, 10));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert!(parse_ratio("1/0").is_err());
    }

    #[test]
    fn svg_counts() {
        let p = parse_partition("2 2 4\n0 1 0 1\n1 2 0 1\n0 1 1 2\n1 2 1 2\n").unwrap();
        let dc = build_dual(&p).unwrap();
        let proj = center_projection(&p);
        let svg = render_svg(&p, Some(&proj), &dc, &RenderSpec::default()).unwrap();
        assert_eq!(svg.matches("<rect").count(), 4);
        assert_eq!(svg.matches("<line").count(), 5);
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<polygon").count(), 0);
        let bare = render_svg(&p, None, &dc, &RenderSpec::default()).unwrap();
        assert_eq!(bare.matches("<line").count() + bare.matches("<circle").count(), 0);
        assert_eq!(svg, render_svg(&p, Some(&proj), &dc, &RenderSpec::default()).unwrap());
    }

    #[test]
    fn halves() {
        assert_eq!(half(7), "3.5");
        assert_eq!(half(-1), "-0.5");
        assert_eq!(half(-3), "-1.5");
        assert_eq!(half(4), "2");
    }
}
