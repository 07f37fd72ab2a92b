//! Line-oriented coefficient archives.
//!
//! ```text
//! # qpdno coefficient archive
//! # algorithm tfe
//! # epsilon 2.0000000000000000e-2
//! # counts 64 64
//! # order 16
//! 0 1 1 -7.2426406871192857e0 0.0000000000000000e0
//! ...
//! ```
//!
//! One record `n p_1 … p_d re im` per nonzero coefficient. Seventeen
//! significant digits make the text round trip exact.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use qpdno::hops::{Algorithm, DnoExpansion};
use qpdno::{Complex64, SpectralGrid, SurfaceField};

use crate::config::Experiment;
use crate::study::expansion_for;
use crate::CliError;

const MAGIC: &str = "# qpdno coefficient archive";

/// An expansion read back from disk with the `ε` it was computed for.
#[derive(Debug, Clone)]
pub struct Archive {
    pub epsilon: f64,
    pub expansion: DnoExpansion,
}

pub fn write_archive<W: Write>(mut out: W, expansion: &DnoExpansion, epsilon: f64) -> Result<(), CliError> {
    let grid = expansion.grid();
    let counts: Vec<String> = grid.counts().iter().map(|c| c.to_string()).collect();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "# algorithm {}", expansion.algorithm)?;
    writeln!(out, "# epsilon {epsilon:.16e}")?;
    writeln!(out, "# counts {}", counts.join(" "))?;
    writeln!(out, "# order {}", expansion.order())?;
    let modes = grid.modes();
    for (n, nu) in expansion.corrections.iter().enumerate() {
        for (i, c) in nu.coefficients().iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let p: Vec<String> = modes.mode(i).iter().map(|v| v.to_string()).collect();
            writeln!(out, "{n} {} {:.16e} {:.16e}", p.join(" "), c.re, c.im)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_archive<R: BufRead>(input: R, grid: &Arc<SpectralGrid>) -> Result<Archive, CliError> {
    let bad = |line: usize, msg: &str| CliError::Parse(format!("archive line {line}: {msg}"));
    let mut algorithm = None;
    let mut epsilon = None;
    let mut order = None;
    let mut corrections: Vec<Vec<Complex64>> = Vec::new();
    let d = grid.modes().dim();
    for (ln, line) in input.lines().enumerate() {
        let line = line?;
        let ln = ln + 1;
        if ln == 1 && line.trim() != MAGIC {
            return Err(bad(ln, "not a coefficient archive"));
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut it = rest.split_whitespace();
            match it.next() {
                Some("algorithm") => {
                    algorithm = Some(it.next().unwrap_or("").parse::<Algorithm>().map_err(|e| bad(ln, &e.to_string()))?)
                }
                Some("epsilon") => epsilon = Some(it.next().unwrap_or("").parse::<f64>().map_err(|_| bad(ln, "bad epsilon"))?),
                Some("counts") => {
                    let counts: Vec<usize> = it.map(|v| v.parse().map_err(|_| bad(ln, "bad counts"))).collect::<Result<_, _>>()?;
                    if counts != grid.counts() {
                        return Err(bad(ln, &format!("archive counts {counts:?} differ from the grid {:?}", grid.counts())));
                    }
                }
                Some("order") => {
                    let n: usize = it.next().unwrap_or("").parse().map_err(|_| bad(ln, "bad order"))?;
                    order = Some(n);
                    corrections = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; n + 1];
                }
                _ => {}
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != d + 3 {
            return Err(bad(ln, &format!("expected {} fields, got {}", d + 3, fields.len())));
        }
        let n: usize = fields[0].parse().map_err(|_| bad(ln, "bad order"))?;
        let p: Vec<i64> = fields[1..=d].iter().map(|v| v.parse().map_err(|_| bad(ln, "bad mode"))).collect::<Result<_, _>>()?;
        let re: f64 = fields[d + 1].parse().map_err(|_| bad(ln, "bad real part"))?;
        let im: f64 = fields[d + 2].parse().map_err(|_| bad(ln, "bad imaginary part"))?;
        let slot = corrections.get_mut(n).ok_or_else(|| bad(ln, "order beyond the header"))?;
        let i = grid.modes().index_of(&p).ok_or_else(|| bad(ln, "mode outside the grid"))?;
        slot[i] = Complex64::new(re, im);
    }
    let (algorithm, epsilon) = match (algorithm, epsilon, order) {
        (Some(a), Some(e), Some(_)) => (a, e),
        _ => return Err(CliError::Parse("archive header is incomplete".into())),
    };
    let fields = corrections
        .into_iter()
        .map(|c| SurfaceField::from_coefficients(grid, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Archive { epsilon, expansion: DnoExpansion::from_corrections(algorithm, fields)? })
}

/// File name for the archive of `algorithm` at the `index`-th ε.
pub fn archive_name(algorithm: Algorithm, index: usize) -> String {
    format!("{}_eps{index}.coeffs", algorithm.tag())
}

/// Computes and writes one archive per configured ε.
pub fn dump_expansion(exp: &Experiment, algorithm: Algorithm, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    if !algorithm.supports(exp.lattice.depth()) {
        return Err(qpdno::Error::Unsupported(format!("{algorithm} is only available in infinite depth")).into());
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for (k, &eps) in exp.config.study.epsilons.iter().enumerate() {
        let (expansion, _) = expansion_for(exp, algorithm, eps)?;
        let path = dir.join(archive_name(algorithm, k));
        let file = std::fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        write_archive(std::io::BufWriter::new(file), &expansion, eps)?;
        paths.push(path);
    }
    Ok(paths)
}
