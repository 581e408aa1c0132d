//! File formats: OFF meshes, complex JSON (maximal-simplex storage), triplet
//! and dense CSV matrices, metric reports and level logs.
//!
//! Every writer is deterministic: simplices and triplets are emitted in their
//! canonical sorted order and floats use 17 significant digits, so identical
//! inputs produce byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::coarsen::LevelRecord;
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;
use crate::numkernel::CooMatrix;
use crate::simplicial::{build_complex, SimplicialComplex};

/// Current complex JSON format version.
pub const COMPLEX_FORMAT_VERSION: u32 = 1;

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// On-disk form of a complex: maximal simplices only, closure is rebuilt on
/// load. Vertex indices are dense row indices.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct ComplexDocument {
    pub version: u32,
    pub vertex_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 3]>>,
    pub maximal_simplices: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
}

/// Densifies a complex into its document form (vertex ids become rows).
pub fn complex_to_document(complex: &SimplicialComplex) -> ComplexDocument {
    let to_rows = |vs: &[usize]| -> Vec<usize> {
        vs.iter().map(|&v| complex.vertex_row(v).expect("stored vertex")).collect()
    };
    let mut maximal: Vec<Vec<usize>> =
        complex.maximal_simplices().iter().map(|vs| to_rows(vs)).collect();
    maximal.sort();
    maximal.dedup();
    ComplexDocument {
        version: COMPLEX_FORMAT_VERSION,
        vertex_count: complex.num_vertices(),
        positions: complex.positions().map(<[[f64; 3]]>::to_vec),
        maximal_simplices: maximal,
        weights: None,
    }
}

/// Rebuilds the face closure described by a document.
pub fn document_to_complex(doc: &ComplexDocument) -> Result<SimplicialComplex> {
    if doc.version != COMPLEX_FORMAT_VERSION {
        return Err(Error::UnknownVersion(doc.version));
    }
    for s in &doc.maximal_simplices {
        for &v in s {
            if v >= doc.vertex_count {
                return Err(Error::InvalidComplex(format!(
                    "vertex index {v} >= vertex count {}",
                    doc.vertex_count
                )));
            }
        }
    }
    let mut complex = build_complex(&doc.maximal_simplices)?;
    if complex.num_vertices() != doc.vertex_count {
        return Err(Error::InvalidComplex(format!(
            "document lists {} vertices but simplices span {}",
            doc.vertex_count,
            complex.num_vertices()
        )));
    }
    if let Some(pos) = &doc.positions {
        complex.set_positions(pos.clone())?;
    }
    Ok(complex)
}

pub fn write_complex_json(path: &Path, complex: &SimplicialComplex) -> Result<()> {
    let doc = complex_to_document(complex);
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_complex_json(path: &Path) -> Result<SimplicialComplex> {
    let text = fs::read_to_string(path)?;
    let doc: ComplexDocument = serde_json::from_str(&text)?;
    document_to_complex(&doc)
}

/// Writes a triangle mesh as OFF. Positions print with 17 significant digits
/// so the round trip is exact.
pub fn write_off(path: &Path, complex: &SimplicialComplex) -> Result<()> {
    let positions = complex
        .positions()
        .ok_or_else(|| Error::InvalidComplex("OFF output needs vertex positions".into()))?;
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "OFF")?;
    writeln!(out, "{} {} 0", complex.num_vertices(), complex.num_simplices(2))?;
    for p in positions {
        writeln!(out, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]))?;
    }
    for s in complex.simplices(2) {
        let r: Vec<usize> =
            s.vertices().iter().map(|&v| complex.vertex_row(v).expect("stored vertex")).collect();
        writeln!(out, "3 {} {} {}", r[0], r[1], r[2])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads an OFF triangle mesh into a complex with positions. Faces close
/// under the usual subset rule.
pub fn read_off(path: &Path) -> Result<SimplicialComplex> {
    let text = fs::read_to_string(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (line_no, header) =
        lines.next().ok_or(Error::Parse { line: 1, msg: "empty OFF file".into() })?;
    if header != "OFF" {
        return Err(Error::Parse { line: line_no, msg: format!("expected OFF, got {header:?}") });
    }
    let (line_no, counts) =
        lines.next().ok_or(Error::Parse { line: line_no, msg: "missing counts".into() })?;
    let parts: Vec<&str> = counts.split_whitespace().collect();
    if parts.len() < 2 {
        return Err(Error::Parse { line: line_no, msg: "counts line needs nv nf [ne]".into() });
    }
    let nv: usize = parts[0]
        .parse()
        .map_err(|_| Error::Parse { line: line_no, msg: "bad vertex count".into() })?;
    let nf: usize = parts[1]
        .parse()
        .map_err(|_| Error::Parse { line: line_no, msg: "bad face count".into() })?;

    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) =
            lines.next().ok_or(Error::Parse { line: line_no, msg: "missing vertex line".into() })?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: ln, msg: "bad vertex coordinates".into() })?;
        if xs.len() != 3 {
            return Err(Error::Parse { line: ln, msg: format!("expected 3 coordinates, got {}", xs.len()) });
        }
        positions.push([xs[0], xs[1], xs[2]]);
    }
    let mut maximal: Vec<Vec<usize>> = Vec::with_capacity(nf.max(1));
    for _ in 0..nf {
        let (ln, l) =
            lines.next().ok_or(Error::Parse { line: line_no, msg: "missing face line".into() })?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: ln, msg: "bad face indices".into() })?;
        if ids.first() != Some(&3) || ids.len() != 4 {
            return Err(Error::Parse { line: ln, msg: "only triangle faces supported".into() });
        }
        for &v in &ids[1..] {
            if v >= nv {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("face index {v} out of range ({nv} vertices)"),
                });
            }
        }
        maximal.push(ids[1..].to_vec());
    }
    // Vertices not referenced by any face still count.
    let mut seen = vec![false; nv];
    for f in &maximal {
        for &v in f {
            seen[v] = true;
        }
    }
    for (v, &s) in seen.iter().enumerate() {
        if !s {
            maximal.push(vec![v]);
        }
    }
    let mut complex = build_complex(&maximal)?;
    complex.set_positions(positions)?;
    Ok(complex)
}

/// Writes `row,col,value` triplets with a header line.
pub fn write_matrix_triplets(path: &Path, m: &CooMatrix) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "row,col,value")?;
    for &(r, c, v) in m.triplets() {
        writeln!(out, "{r},{c},{}", fmt_f64(v))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a triplet CSV back; matrix dimensions must be supplied since the
/// format stores only structural nonzeros.
pub fn read_matrix_triplets(path: &Path, rows: usize, cols: usize) -> Result<CooMatrix> {
    let text = fs::read_to_string(path)?;
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line.trim() != "row,col,value" {
                return Err(Error::Parse { line: 1, msg: "expected header row,col,value".into() });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse { line: i + 1, msg: "expected row,col,value".into() });
        }
        let r: usize = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: "bad row index".into() })?;
        let c: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: "bad col index".into() })?;
        let v: f64 = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: i + 1, msg: "bad value".into() })?;
        entries.push((r, c, v));
    }
    CooMatrix::from_triplets(rows, cols, entries)
}

/// Writes a dense matrix as bare row-major CSV.
pub fn write_dense_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|c| fmt_f64(m[(r, c)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Fixed column order of the flat report CSV.
pub const REPORT_CSV_HEADER: &str =
    "k,band_lo,band_hi,reduction,l_comm,pi_orth,c_orth,subsp,theta,lambda_err,e_beta";

pub fn report_csv_row(r: &MetricsReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.k,
        r.band.0,
        r.band.1,
        fmt_f64(r.reduction),
        fmt_f64(r.l_comm),
        fmt_f64(r.pi_orth),
        fmt_f64(r.c_orth),
        fmt_f64(r.subsp),
        fmt_f64(r.theta),
        fmt_f64(r.lambda_err),
        r.e_beta
    )
}

/// Reports serialize as pretty JSON plus a flat CSV for table assembly.
pub fn write_reports(json_path: &Path, csv_path: &Path, reports: &[MetricsReport]) -> Result<()> {
    let mut text = serde_json::to_string_pretty(reports)?;
    text.push('\n');
    fs::write(json_path, text)?;
    let mut out = BufWriter::new(fs::File::create(csv_path)?);
    writeln!(out, "{REPORT_CSV_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", report_csv_row(r))?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_reports(json_path: &Path) -> Result<Vec<MetricsReport>> {
    let text = fs::read_to_string(json_path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Level log as line-delimited JSON records.
pub fn write_level_log(path: &Path, records: &[LevelRecord]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    for r in records {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    out.flush()?;
    Ok(())
}
