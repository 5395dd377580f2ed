//! Plain-text file formats consumed and produced by the CLI: availability
//! mask files, run-config files, and the coordinate-format dump of a sparse
//! system. All parsers accept arbitrary untrusted input and fail with
//! [`FormatError`] instead of panicking; they are fuzzed (see `fuzz/`).

use crate::error::{FormatError, SolveError};
use crate::grid::GridIndex;
use crate::linsolve::SparseSystem;
use std::collections::HashSet;
use std::fmt::Write as _;

/// Strips `#` comments and surrounding whitespace; `None` for blank lines.
fn significant(line: &str) -> Option<&str> {
    let line = match line.find('#') {
        Some(p) => &line[..p],
        None => line,
    };
    let line = line.trim();
    if line.is_empty() {
        None
    } else {
        Some(line)
    }
}

/// Parsed whitelist mask: one `i j [k]` index per line marked available.
/// Every index line must have the same dimension (2 or 3).
#[derive(Clone, Debug, Default)]
pub struct MaskFile {
    pub dim: usize,
    pub indices: HashSet<[i64; 3]>,
}

impl MaskFile {
    pub fn contains2(&self, idx: GridIndex<2>) -> bool {
        self.indices.contains(&[idx.0[0], idx.0[1], 0])
    }

    pub fn contains3(&self, idx: GridIndex<3>) -> bool {
        self.indices.contains(&idx.0)
    }
}

pub fn parse_mask_file(text: &str) -> Result<MaskFile, FormatError> {
    let mut mask = MaskFile::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let Some(body) = significant(raw) else {
            continue;
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(FormatError::parse(
                line,
                format!("expected 2 or 3 index components, got {}", fields.len()),
            ));
        }
        if mask.dim == 0 {
            mask.dim = fields.len();
        } else if mask.dim != fields.len() {
            return Err(FormatError::parse(
                line,
                format!("mixed dimensions: file is {}D", mask.dim),
            ));
        }
        let mut idx = [0i64; 3];
        for (a, f) in fields.iter().enumerate() {
            idx[a] = f
                .parse::<i64>()
                .map_err(|e| FormatError::parse(line, format!("bad index component {f:?}: {e}")))?;
        }
        mask.indices.insert(idx);
    }
    Ok(mask)
}

pub fn write_mask_file(mask: &MaskFile) -> String {
    let mut indices: Vec<&[i64; 3]> = mask.indices.iter().collect();
    indices.sort();
    let mut out = String::new();
    for idx in indices {
        for a in 0..mask.dim {
            if a > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", idx[a]);
        }
        out.push('\n');
    }
    out
}

/// Run configuration: `key = value` lines, `#` comments. Unknown keys are
/// rejected so typos fail loudly.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub meshes: Option<Vec<usize>>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub format: Option<OutputFormat>,
    pub out: Option<String>,
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, FormatError> {
    let mut cfg = RunConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let Some(body) = significant(raw) else {
            continue;
        };
        let Some((key, value)) = body.split_once('=') else {
            return Err(FormatError::parse(line, "expected `key = value`"));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "meshes" => {
                let mut meshes = Vec::new();
                for part in value.split(',') {
                    let n: usize = part.trim().parse().map_err(|e| {
                        FormatError::parse(line, format!("bad mesh size {part:?}: {e}"))
                    })?;
                    if n < 4 {
                        return Err(FormatError::parse(line, format!("mesh size {n} < 4")));
                    }
                    meshes.push(n);
                }
                if meshes.is_empty() {
                    return Err(FormatError::parse(line, "empty mesh list"));
                }
                cfg.meshes = Some(meshes);
            }
            "tol" => {
                let tol: f64 = value
                    .parse()
                    .map_err(|e| FormatError::parse(line, format!("bad tol {value:?}: {e}")))?;
                if tol.is_nan() || tol <= 0.0 {
                    return Err(FormatError::parse(line, format!("tol {tol} must be > 0")));
                }
                cfg.tol = Some(tol);
            }
            "max_iter" => {
                cfg.max_iter = Some(value.parse().map_err(|e| {
                    FormatError::parse(line, format!("bad max_iter {value:?}: {e}"))
                })?);
            }
            "format" => {
                cfg.format = Some(OutputFormat::parse(value).ok_or_else(|| {
                    FormatError::parse(line, format!("format {value:?} is not csv|json"))
                })?);
            }
            "out" => cfg.out = Some(value.to_string()),
            "threads" => {
                let t: usize = value
                    .parse()
                    .map_err(|e| FormatError::parse(line, format!("bad threads {value:?}: {e}")))?;
                if t == 0 {
                    return Err(FormatError::parse(line, "threads must be ≥ 1"));
                }
                cfg.threads = Some(t);
            }
            _ => return Err(FormatError::parse(line, format!("unknown key {key:?}"))),
        }
    }
    Ok(cfg)
}

/// Coordinate-format dump of a sparse system:
///
/// ```text
/// coo <n_unknowns> <nnz>
/// <row> <col> <value>     (nnz lines, 0-based indices)
/// rhs <row> <value>       (n_unknowns lines)
/// ```
pub fn write_coo_system(sys: &SparseSystem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "coo {} {}", sys.n_unknowns, sys.nnz());
    for r in 0..sys.n_unknowns {
        let (cols, vals) = sys.row(r);
        for (c, v) in cols.iter().zip(vals) {
            let _ = writeln!(out, "{r} {c} {v:e}");
        }
    }
    for (r, b) in sys.rhs.iter().enumerate() {
        let _ = writeln!(out, "rhs {r} {b:e}");
    }
    out
}

pub fn parse_coo_system(text: &str) -> Result<SparseSystem, FormatError> {
    let mut lines = text.lines().enumerate();
    let (header_line, header) = loop {
        match lines.next() {
            Some((lineno, raw)) => {
                if let Some(body) = significant(raw) {
                    break (lineno + 1, body);
                }
            }
            None => return Err(FormatError::parse(0, "missing `coo n nnz` header")),
        }
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 || fields[0] != "coo" {
        return Err(FormatError::parse(header_line, "expected `coo <n> <nnz>`"));
    }
    let n: usize = fields[1]
        .parse()
        .map_err(|e| FormatError::parse(header_line, format!("bad n: {e}")))?;
    let nnz: usize = fields[2]
        .parse()
        .map_err(|e| FormatError::parse(header_line, format!("bad nnz: {e}")))?;

    // grown incrementally so a hostile header cannot force a huge allocation
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut rhs_entries: Vec<(usize, f64)> = Vec::new();
    for (lineno, raw) in lines {
        let line = lineno + 1;
        let Some(body) = significant(raw) else {
            continue;
        };
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.first() == Some(&"rhs") {
            if fields.len() != 3 {
                return Err(FormatError::parse(line, "expected `rhs <row> <value>`"));
            }
            let r: usize = fields[1]
                .parse()
                .map_err(|e| FormatError::parse(line, format!("bad rhs row: {e}")))?;
            let v: f64 = fields[2]
                .parse()
                .map_err(|e| FormatError::parse(line, format!("bad rhs value: {e}")))?;
            if r >= n {
                return Err(FormatError::parse(line, format!("rhs row {r} ≥ n = {n}")));
            }
            if !v.is_finite() {
                return Err(FormatError::parse(line, "non-finite rhs value"));
            }
            rhs_entries.push((r, v));
        } else {
            if fields.len() != 3 {
                return Err(FormatError::parse(line, "expected `<row> <col> <value>`"));
            }
            let r: usize = fields[0]
                .parse()
                .map_err(|e| FormatError::parse(line, format!("bad row: {e}")))?;
            let c: usize = fields[1]
                .parse()
                .map_err(|e| FormatError::parse(line, format!("bad col: {e}")))?;
            let v: f64 = fields[2]
                .parse()
                .map_err(|e| FormatError::parse(line, format!("bad value: {e}")))?;
            if r >= n || c >= n {
                return Err(FormatError::parse(
                    line,
                    format!("entry ({r},{c}) ≥ n = {n}"),
                ));
            }
            if !v.is_finite() {
                return Err(FormatError::parse(line, "non-finite matrix value"));
            }
            if triplets.len() == nnz {
                return Err(FormatError::parse(line, format!("more than {nnz} entries")));
            }
            triplets.push((r, c, v));
        }
    }
    if triplets.len() != nnz {
        return Err(FormatError::parse(
            0,
            format!("expected {nnz} entries, found {}", triplets.len()),
        ));
    }
    if rhs_entries.len() != n {
        return Err(FormatError::parse(
            0,
            format!("expected {n} rhs lines, found {}", rhs_entries.len()),
        ));
    }
    let mut rhs = vec![f64::NAN; n];
    for (r, v) in rhs_entries {
        if !rhs[r].is_nan() {
            return Err(FormatError::parse(0, format!("duplicate rhs row {r}")));
        }
        rhs[r] = v;
    }
    SparseSystem::from_triplets(n, &triplets, rhs)
        .map_err(|e: SolveError| FormatError::parse(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip() {
        let text = "# available cells\n5 5\n6 5\n 6 6 # inline comment\n";
        let mask = parse_mask_file(text).unwrap();
        assert_eq!(mask.dim, 2);
        assert_eq!(mask.indices.len(), 3);
        assert!(mask.contains2(GridIndex([6, 6])));
        assert!(!mask.contains2(GridIndex([0, 0])));
        let again = parse_mask_file(&write_mask_file(&mask)).unwrap();
        assert_eq!(again.indices, mask.indices);
    }

    #[test]
    fn mask_rejects_mixed_dims_and_garbage() {
        assert!(parse_mask_file("1 2\n1 2 3\n").is_err());
        assert!(parse_mask_file("1\n").is_err());
        assert!(parse_mask_file("a b\n").is_err());
        assert!(parse_mask_file("").unwrap().indices.is_empty());
    }

    #[test]
    fn config_parses_all_keys() {
        let cfg = parse_config(
            "meshes = 10, 20, 40\ntol = 1e-10\nmax_iter = 500\nformat = json\nout = results.json\nthreads = 2\n",
        )
        .unwrap();
        assert_eq!(cfg.meshes, Some(vec![10, 20, 40]));
        assert_eq!(cfg.tol, Some(1e-10));
        assert_eq!(cfg.max_iter, Some(500));
        assert_eq!(cfg.format, Some(OutputFormat::Json));
        assert_eq!(cfg.out.as_deref(), Some("results.json"));
        assert_eq!(cfg.threads, Some(2));
    }

    #[test]
    fn config_rejects_invalid_values() {
        assert!(parse_config("meshes = 2\n").is_err()); // below minimum
        assert!(parse_config("tol = -1\n").is_err());
        assert!(parse_config("tol = 0\n").is_err());
        assert!(parse_config("format = yaml\n").is_err());
        assert!(parse_config("bogus = 1\n").is_err());
        assert!(parse_config("threads = 0\n").is_err());
        assert!(parse_config("justtext\n").is_err());
    }

    #[test]
    fn coo_round_trip() {
        let sys = SparseSystem::from_triplets(
            2,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 1, 3.5)],
            vec![1.0, -2.0],
        )
        .unwrap();
        let text = write_coo_system(&sys);
        let back = parse_coo_system(&text).unwrap();
        assert_eq!(back.n_unknowns, 2);
        assert_eq!(back.row(0), sys.row(0));
        assert_eq!(back.row(1), sys.row(1));
        assert_eq!(back.rhs, sys.rhs);
    }

    #[test]
    fn coo_rejects_malformed_input() {
        assert!(parse_coo_system("").is_err());
        assert!(parse_coo_system("coo 2 1\n0 0 1.0\n").is_err()); // missing rhs
        assert!(parse_coo_system("coo 2 1\n0 9 1.0\nrhs 0 0\nrhs 1 0\n").is_err());
        assert!(parse_coo_system("coo 1 0\nrhs 0 nan\n").is_err());
        assert!(parse_coo_system("coo 99999999999999999999 0\n").is_err());
        assert!(parse_coo_system("coo 1 0\nrhs 0 1\nrhs 0 1\n").is_err());
    }
}
