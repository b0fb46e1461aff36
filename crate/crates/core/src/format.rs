//! Text formats.
//!
//! - `.lat`: `n=<count>`, `names=<a,b,…>`, `leq=<rows of 0/1, ';'-separated>`.
//! - `.qnt`: a `.lat` block plus `mult=<rows of comma-separated indices,
//!   ';'-separated>` and optionally `star=<indices>`.
//! - `.act`: `module=<lat>` and either `quantale=<qnt>`, `side=left|right`,
//!   `act=<rows>` for one action, or `left=<qnt>`, `right=<qnt>`,
//!   `left_act=<rows>`, `right_act=<rows>` for a bimodule. Row `m` lists
//!   `a·m` (left) or `m·a` (right) over the quantale elements.
//! - `.map`: `factors=<lat,lat,…>`, `codomain=<lat or qnt>`, then one line
//!   `i,j,k -> m` per tuple. A reference ending in `*` names the conjugate.
//! - `.elem`: one line `i,j,k -> e` per tuple of a tensor.
//!
//! `#` starts a comment. File references are relative to the referring file.
//! A context bundle is a directory holding `X.lat`, `Y.lat`, `A.qnt`,
//! `B.qnt`, `X.act`, `Y.act`, `pairXY.map` and `pairYX.map`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::lattice::FiniteSupLattice;
use crate::module::{Bimodule, ModuleAction, Side};
use crate::morita::MoritaContext;
use crate::quantale::Quantale;
use crate::tensor::{MultiTensorLattice, TupleSpace};

fn format_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Debug)]
enum Line<'a> {
    Key(&'a str, &'a str),
    Tuple(&'a str, &'a str),
}

/// Non-empty, non-comment lines with their 1-based numbers.
struct Doc<'a> {
    path: &'a Path,
    lines: Vec<(usize, Line<'a>)>,
}

impl<'a> Doc<'a> {
    fn parse(path: &'a Path, text: &'a str) -> Result<Self> {
        let mut lines = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let line = if let Some((lhs, rhs)) = content.split_once("->") {
                Line::Tuple(lhs.trim(), rhs.trim())
            } else if let Some((k, v)) = content.split_once('=') {
                Line::Key(k.trim(), v.trim())
            } else {
                return Err(format_err(path, i + 1, format!("expected `key=value`, got {content:?}")));
            };
            lines.push((i + 1, line));
        }
        Ok(Doc { path, lines })
    }

    fn get(&self, key: &str) -> Option<(usize, &'a str)> {
        self.lines.iter().find_map(|(n, l)| match l {
            Line::Key(k, v) if *k == key => Some((*n, *v)),
            _ => None,
        })
    }

    fn require(&self, key: &str) -> Result<(usize, &'a str)> {
        self.get(key)
            .ok_or_else(|| format_err(self.path, 0, format!("missing `{key}=`")))
    }

    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        format_err(self.path, line, message)
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for (n, l) in &self.lines {
            match l {
                Line::Key(k, _) if !allowed.contains(k) => {
                    return Err(self.err(*n, format!("unknown key `{k}`")))
                }
                Line::Key(k, _) if !seen.insert(*k) => {
                    return Err(self.err(*n, format!("duplicate key `{k}`")))
                }
                Line::Tuple(..) => return Err(self.err(*n, "unexpected tuple line")),
                _ => {}
            }
        }
        Ok(())
    }

    /// Resolve a file reference relative to this document.
    fn resolve(&self, reference: &str) -> PathBuf {
        self.path.parent().unwrap_or(Path::new(".")).join(reference)
    }
}

fn parse_index(doc: &Doc, line: usize, s: &str, bound: usize, what: &str) -> Result<usize> {
    let v: usize = s
        .trim()
        .parse()
        .map_err(|_| doc.err(line, format!("{what}: {s:?} is not an index")))?;
    if v >= bound {
        return Err(doc.err(line, format!("{what}: index {v} out of range (size {bound})")));
    }
    Ok(v)
}

/// `rows` of `cols` comma-separated indices below `bound`, rows `;`-separated.
fn parse_table(doc: &Doc, (line, s): (usize, &str), rows: usize, cols: usize, bound: usize, what: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != rows {
        return Err(doc.err(line, format!("{what}: expected {rows} rows, found {}", parts.len())));
    }
    let mut out = Vec::with_capacity(rows * cols);
    for (r, row) in parts.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != cols {
            return Err(doc.err(
                line,
                format!("{what}: row {r} has {} entries, expected {cols}", cells.len()),
            ));
        }
        for c in cells {
            out.push(parse_index(doc, line, c, bound, what)?);
        }
    }
    Ok(out)
}

fn table_string(table: &[usize], cols: usize) -> String {
    if cols == 0 {
        return String::new();
    }
    table
        .chunks(cols)
        .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

// ---- .lat -------------------------------------------------------------

fn lattice_block(doc: &Doc) -> Result<FiniteSupLattice> {
    let (nl, n) = doc.require("n")?;
    let n: usize = n.parse().map_err(|_| doc.err(nl, format!("n: {n:?} is not a count")))?;
    let (namel, names) = doc.require("names")?;
    let names: Vec<String> = names.split(',').map(|s| s.trim().to_string()).collect();
    if names.len() != n {
        return Err(doc.err(namel, format!("{} names for n={n}", names.len())));
    }
    let (ll, leq) = doc.require("leq")?;
    let rows: Vec<&str> = leq.split(';').collect();
    if rows.len() != n {
        return Err(doc.err(ll, format!("leq has {} rows for n={n}", rows.len())));
    }
    let mut matrix = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.trim();
        if row.chars().count() != n {
            return Err(doc.err(ll, format!("leq row {i} has length {}, expected {n}", row.chars().count())));
        }
        let mut bits = Vec::with_capacity(n);
        for c in row.chars() {
            bits.push(match c {
                '0' => false,
                '1' => true,
                other => return Err(doc.err(ll, format!("leq row {i}: unexpected {other:?}"))),
            });
        }
        matrix.push(bits);
    }
    FiniteSupLattice::from_leq(names, &matrix)
}

pub fn parse_lat(path: &Path, text: &str) -> Result<FiniteSupLattice> {
    let doc = Doc::parse(path, text)?;
    doc.check_keys(&["n", "names", "leq"])?;
    lattice_block(&doc)
}

pub fn read_lat(path: &Path) -> Result<FiniteSupLattice> {
    parse_lat(path, &read_text(path)?)
}

fn check_names(l: &FiniteSupLattice) -> Result<()> {
    for name in l.names() {
        if name.is_empty() || name.contains([',', ';', '#', '\n', '=']) || name.contains("->") {
            return Err(Error::ShapeMismatch(format!(
                "element name {name:?} cannot be written to a text file"
            )));
        }
    }
    Ok(())
}

/// The three `.lat` lines.
pub fn lat_to_string(l: &FiniteSupLattice) -> Result<String> {
    check_names(l)?;
    Ok(format!(
        "n={}\nnames={}\nleq={}\n",
        l.len(),
        l.names().join(","),
        l.leq_rows().join(";")
    ))
}

pub fn write_lat(path: &Path, l: &FiniteSupLattice) -> Result<()> {
    write_text(path, &lat_to_string(l)?)
}

// ---- .qnt -------------------------------------------------------------

pub fn parse_qnt(path: &Path, text: &str) -> Result<Quantale> {
    let doc = Doc::parse(path, text)?;
    doc.check_keys(&["n", "names", "leq", "mult", "star"])?;
    let carrier = Arc::new(lattice_block(&doc)?);
    let n = carrier.len();
    let mult = parse_table(&doc, doc.require("mult")?, n, n, n, "mult")?;
    let q = Quantale::new(carrier, mult)?;
    match doc.get("star") {
        None => Ok(q),
        Some(entry) => {
            let star = parse_table(&doc, entry, 1, n, n, "star")?;
            q.with_involution(star)
        }
    }
}

pub fn read_qnt(path: &Path) -> Result<Quantale> {
    parse_qnt(path, &read_text(path)?)
}

pub fn qnt_to_string(q: &Quantale) -> Result<String> {
    let mut s = lat_to_string(q.carrier())?;
    let _ = writeln!(s, "mult={}", table_string(q.table(), q.len()));
    if let Some(star) = q.involution() {
        let _ = writeln!(s, "star={}", table_string(star, star.len()));
    }
    Ok(s)
}

pub fn write_qnt(path: &Path, q: &Quantale) -> Result<()> {
    write_text(path, &qnt_to_string(q)?)
}

// ---- references -------------------------------------------------------

/// A lattice named by a `.lat` file, a `.qnt` file (its carrier), or either
/// followed by `*` for the conjugate.
pub fn read_lattice_ref(base: &Path, reference: &str) -> Result<FiniteSupLattice> {
    let (file, conjugate) = match reference.strip_suffix('*') {
        Some(f) => (f, true),
        None => (reference, false),
    };
    let path = base.parent().unwrap_or(Path::new(".")).join(file);
    let l = if file.ends_with(".qnt") {
        (*read_qnt(&path)?.carrier()).as_ref().clone()
    } else {
        read_lat(&path)?
    };
    Ok(if conjugate { l.conjugate() } else { l })
}

// ---- .act -------------------------------------------------------------

fn action_rows(doc: &Doc, key: &str, side: Side, q: &Arc<Quantale>, m: &Arc<FiniteSupLattice>) -> Result<ModuleAction> {
    let table = parse_table(doc, doc.require(key)?, m.len(), q.len(), m.len(), key)?;
    ModuleAction::new(side, q.clone(), m.clone(), table)
}

/// A single action; its module and quantale are loaded from the referenced files.
pub fn read_action(path: &Path) -> Result<ModuleAction> {
    let text = read_text(path)?;
    let doc = Doc::parse(path, &text)?;
    doc.check_keys(&["module", "quantale", "side", "act"])?;
    let (_, mref) = doc.require("module")?;
    let (_, qref) = doc.require("quantale")?;
    let m = Arc::new(read_lattice_ref(path, mref)?);
    let q = Arc::new(read_qnt(&doc.resolve(qref))?);
    let (sl, side) = doc.require("side")?;
    let side = match side {
        "left" => Side::Left,
        "right" => Side::Right,
        other => return Err(doc.err(sl, format!("side must be left or right, got {other:?}"))),
    };
    action_rows(&doc, "act", side, &q, &m)
}

/// A bimodule whose quantales are loaded from the referenced files.
pub fn read_bimodule(path: &Path) -> Result<Bimodule> {
    let text = read_text(path)?;
    let doc = Doc::parse(path, &text)?;
    let a = Arc::new(read_qnt(&doc.resolve(doc.require("left")?.1))?);
    let b = Arc::new(read_qnt(&doc.resolve(doc.require("right")?.1))?);
    bimodule_from_doc(&doc, path, &a, &b)
}

/// A bimodule over the given quantales; the quantale references in the file
/// are not reloaded.
pub fn read_bimodule_over(path: &Path, a: &Arc<Quantale>, b: &Arc<Quantale>) -> Result<Bimodule> {
    let text = read_text(path)?;
    let doc = Doc::parse(path, &text)?;
    bimodule_from_doc(&doc, path, a, b)
}

fn bimodule_from_doc(doc: &Doc, path: &Path, a: &Arc<Quantale>, b: &Arc<Quantale>) -> Result<Bimodule> {
    doc.check_keys(&["module", "left", "right", "left_act", "right_act"])?;
    let m = Arc::new(read_lattice_ref(path, doc.require("module")?.1)?);
    let left = action_rows(doc, "left_act", Side::Left, a, &m)?;
    let right = action_rows(doc, "right_act", Side::Right, b, &m)?;
    Bimodule::new(left, right)
}

pub fn action_to_string(act: &ModuleAction, module_ref: &str, quantale_ref: &str) -> String {
    format!(
        "module={module_ref}\nquantale={quantale_ref}\nside={}\nact={}\n",
        act.side(),
        table_string(act.table(), act.quantale().len())
    )
}

pub fn bimodule_to_string(x: &Bimodule, module_ref: &str, left_ref: &str, right_ref: &str) -> String {
    format!(
        "module={module_ref}\nleft={left_ref}\nright={right_ref}\nleft_act={}\nright_act={}\n",
        table_string(x.left().table(), x.left_quantale().len()),
        table_string(x.right().table(), x.right_quantale().len())
    )
}

// ---- .map and .elem ---------------------------------------------------

/// A table on the product of `factors`, as read from a `.map` file.
#[derive(Clone, Debug)]
pub struct MapFile {
    pub factors: Vec<Arc<FiniteSupLattice>>,
    pub codomain: Arc<FiniteSupLattice>,
    pub values: Vec<usize>,
}

fn tuple_lines(doc: &Doc, space: &TupleSpace, dims: &[usize], bound: usize, what: &str) -> Result<Vec<usize>> {
    let mut values: Vec<Option<usize>> = vec![None; space.len()];
    for (n, l) in &doc.lines {
        let Line::Tuple(lhs, rhs) = l else { continue };
        let coords: Vec<&str> = lhs.split(',').collect();
        if coords.len() != dims.len() {
            return Err(doc.err(*n, format!("expected {} coordinates", dims.len())));
        }
        let mut tuple = Vec::with_capacity(dims.len());
        for (c, &d) in coords.iter().zip(dims) {
            tuple.push(parse_index(doc, *n, c, d, "coordinate")?);
        }
        let v = parse_index(doc, *n, rhs, bound, what)?;
        let t = space.index(&tuple);
        if values[t].replace(v).is_some() {
            return Err(doc.err(*n, format!("tuple {lhs} listed twice")));
        }
    }
    values
        .into_iter()
        .enumerate()
        .map(|(t, v)| {
            v.ok_or_else(|| {
                let c: Vec<String> = space.coords(t).iter().map(|x| x.to_string()).collect();
                doc.err(0, format!("no value for tuple {}", c.join(",")))
            })
        })
        .collect()
}

pub fn read_map(path: &Path) -> Result<MapFile> {
    let text = read_text(path)?;
    let doc = Doc::parse(path, &text)?;
    for (n, l) in &doc.lines {
        if let Line::Key(k, _) = l {
            if *k != "factors" && *k != "codomain" {
                return Err(doc.err(*n, format!("unknown key `{k}`")));
            }
        }
    }
    let (fl, refs) = doc.require("factors")?;
    let refs: Vec<&str> = refs.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if refs.is_empty() {
        return Err(doc.err(fl, "no factors"));
    }
    let mut cache: Vec<(&str, Arc<FiniteSupLattice>)> = Vec::new();
    let mut factors = Vec::with_capacity(refs.len());
    for r in &refs {
        let l = match cache.iter().find(|(k, _)| k == r) {
            Some((_, l)) => l.clone(),
            None => {
                let l = Arc::new(read_lattice_ref(path, r)?);
                cache.push((r, l.clone()));
                l
            }
        };
        factors.push(l);
    }
    let codomain = Arc::new(read_lattice_ref(path, doc.require("codomain")?.1)?);
    let space = TupleSpace::of(&factors);
    let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
    let values = tuple_lines(&doc, &space, &dims, codomain.len(), "value")?;
    Ok(MapFile {
        factors,
        codomain,
        values,
    })
}

pub fn map_to_string(factor_refs: &[&str], codomain_ref: &str, dims: &[usize], values: &[usize]) -> String {
    let space = TupleSpace::new(dims.to_vec());
    let mut s = format!("factors={}\ncodomain={codomain_ref}\n", factor_refs.join(","));
    for (t, v) in values.iter().enumerate() {
        let c: Vec<String> = space.coords(t).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{} -> {v}", c.join(","));
    }
    s
}

pub fn write_map(path: &Path, factor_refs: &[&str], codomain_ref: &str, dims: &[usize], values: &[usize]) -> Result<()> {
    write_text(path, &map_to_string(factor_refs, codomain_ref, dims, values))
}

pub fn elem_to_string(t: &MultiTensorLattice) -> String {
    let space = t.space();
    let mut s = String::new();
    for i in 0..space.len() {
        let c: Vec<String> = space.coords(i).iter().map(|x| x.to_string()).collect();
        let _ = writeln!(s, "{} -> {}", c.join(","), t.elem_at(i));
    }
    s
}

pub fn write_elem(path: &Path, t: &MultiTensorLattice) -> Result<()> {
    write_text(path, &elem_to_string(t))
}

/// Read an `.elem` table for a product of the given sizes.
pub fn read_elem(path: &Path, dims: &[usize], tensor_size: usize) -> Result<Vec<usize>> {
    let text = read_text(path)?;
    let doc = Doc::parse(path, &text)?;
    if let Some((n, _)) = doc.lines.iter().find(|(_, l)| matches!(l, Line::Key(..))) {
        return Err(doc.err(*n, "unexpected key in an .elem file"));
    }
    tuple_lines(&doc, &TupleSpace::new(dims.to_vec()), dims, tensor_size, "element")
}

// ---- context bundles --------------------------------------------------

pub fn write_context_bundle(dir: &Path, ctx: &MoritaContext) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let (x, y) = (ctx.x().carrier(), ctx.y().carrier());
    write_lat(&dir.join("X.lat"), x)?;
    write_lat(&dir.join("Y.lat"), y)?;
    write_qnt(&dir.join("A.qnt"), ctx.a())?;
    write_qnt(&dir.join("B.qnt"), ctx.b())?;
    write_text(&dir.join("X.act"), &bimodule_to_string(ctx.x(), "X.lat", "A.qnt", "B.qnt"))?;
    write_text(&dir.join("Y.act"), &bimodule_to_string(ctx.y(), "Y.lat", "B.qnt", "A.qnt"))?;
    write_map(&dir.join("pairXY.map"), &["X.lat", "Y.lat"], "A.qnt", &[x.len(), y.len()], ctx.pair_xy_table())?;
    write_map(&dir.join("pairYX.map"), &["Y.lat", "X.lat"], "B.qnt", &[y.len(), x.len()], ctx.pair_yx_table())?;
    Ok(())
}

pub fn read_context_bundle(dir: &Path) -> Result<MoritaContext> {
    let a = Arc::new(read_qnt(&dir.join("A.qnt"))?);
    let b = Arc::new(read_qnt(&dir.join("B.qnt"))?);
    let x = read_bimodule_over(&dir.join("X.act"), &a, &b)?;
    let y = read_bimodule_over(&dir.join("Y.act"), &b, &a)?;
    let pxy = read_map(&dir.join("pairXY.map"))?;
    let pyx = read_map(&dir.join("pairYX.map"))?;
    let expect = |m: &MapFile, f: [&Arc<FiniteSupLattice>; 2], cod: &Arc<Quantale>, name: &str| {
        if m.factors.len() != 2 || m.factors[0] != *f[0] || m.factors[1] != *f[1] || m.codomain != *cod.carrier() {
            Err(Error::ShapeMismatch(format!("{name} does not match the bundle's lattices")))
        } else {
            Ok(())
        }
    };
    expect(&pxy, [x.carrier(), y.carrier()], &a, "pairXY.map")?;
    expect(&pyx, [y.carrier(), x.carrier()], &b, "pairYX.map")?;
    MoritaContext::new(x, y, pxy.values, pyx.values)
}
