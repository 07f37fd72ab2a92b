//! Convergence studies: one expansion per (algorithm, ε), summed at every
//! truncation order and compared with the manufactured solution.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use qpdno::hops::{expand, Algorithm, DnoExpansion, PerturbationProblem};
use qpdno::mms::relative_error;
use qpdno::summation::{default_degrees, sum_expansion_with, Summation};
use qpdno::{Complex64, Error as NumError, SurfaceField};

use crate::config::Experiment;
use crate::CliError;

pub const CSV_HEADER: [&str; 7] = ["algorithm", "summation", "epsilon", "order", "error_rel", "pole_flag", "min_divisor"];

/// One `(algorithm, summation, ε, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub algorithm: Algorithm,
    pub summation: Summation,
    pub epsilon: f64,
    pub order: usize,
    /// `NaN` when the cell failed (Padé pole).
    pub error_rel: f64,
    pub pole_flag: bool,
    pub min_divisor: Option<f64>,
}

/// Orders flagged by the resolution monitor for one expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionNote {
    pub algorithm: String,
    pub epsilon: f64,
    pub under_resolved_orders: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub notes: Vec<ExpansionNote>,
}

/// Exact traces at `eps` and the expansion of the operator applied to the
/// exact Dirichlet data.
pub fn expansion_for(exp: &Experiment, algorithm: Algorithm, eps: f64) -> Result<(DnoExpansion, SurfaceField), CliError> {
    let g = exp.profile.scale(Complex64::new(eps, 0.0));
    let (xi, nu) = exp.solution.exact_traces(&g)?;
    let res = &exp.config.resolution;
    let problem = PerturbationProblem::new(exp.profile.clone(), xi, exp.config.study.order, res.a, res.n_y)?;
    Ok((expand(&problem, algorithm)?, nu))
}

/// Padé degrees for truncation order `n` under the config's split.
pub fn pade_degrees(exp: &Experiment, n: usize) -> (usize, usize) {
    match exp.config.study.pade_numerator {
        Some(l) => {
            let l = l.min(n);
            (l, n - l)
        }
        None => default_degrees(n),
    }
}

/// Rows for every summation and order of one expansion.
pub fn rows_for_expansion(
    exp: &Experiment,
    expansion: &DnoExpansion,
    exact: &SurfaceField,
    eps: f64,
) -> Result<Vec<StudyRow>, CliError> {
    let mut rows = Vec::new();
    for &summation in &exp.summations {
        for n in 0..=expansion.order() {
            let row = match sum_expansion_with(expansion, n, eps, summation, pade_degrees(exp, n)) {
                Ok(s) => StudyRow {
                    algorithm: expansion.algorithm,
                    summation,
                    epsilon: eps,
                    order: n,
                    error_rel: relative_error(exact, &s.field)?,
                    pole_flag: s.pole_flag,
                    min_divisor: s.min_divisor,
                },
                Err(NumError::Pole(_)) => StudyRow {
                    algorithm: expansion.algorithm,
                    summation,
                    epsilon: eps,
                    order: n,
                    error_rel: f64::NAN,
                    pole_flag: true,
                    min_divisor: Some(0.0),
                },
                Err(e) => return Err(e.into()),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Runs the full study. Rows are ordered by algorithm, ε, summation, order
/// regardless of how the work is scheduled.
pub fn run_convergence_study(exp: &Experiment) -> Result<StudyReport, CliError> {
    let cells: Vec<(Algorithm, f64)> = exp
        .algorithms
        .iter()
        .flat_map(|&a| exp.config.study.epsilons.iter().map(move |&e| (a, e)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(alg, eps)| {
            log::info!("expanding {alg} at epsilon = {eps}");
            let (expansion, exact) = expansion_for(exp, alg, eps)?;
            let note = ExpansionNote {
                algorithm: alg.tag().into(),
                epsilon: eps,
                under_resolved_orders: expansion.diagnostics.iter().filter(|d| d.under_resolved()).map(|d| d.order).collect(),
            };
            Ok((rows_for_expansion(exp, &expansion, &exact, eps)?, note))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (r, n) in results {
        rows.extend(r);
        notes.push(n);
    }
    Ok(StudyReport { rows, notes })
}

fn fmt_float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

/// Writes the result table.
pub fn write_csv<W: Write>(rows: &[StudyRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.tag().to_string(),
            r.summation.tag().to_string(),
            format!("{}", r.epsilon),
            r.order.to_string(),
            fmt_float(r.error_rel),
            r.pole_flag.to_string(),
            r.min_divisor.map(fmt_float).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(())
}

/// Parses a table written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<StudyRow>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |what: &str, v: &str| CliError::Parse(format!("bad {what} {v:?} in result table"));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != CSV_HEADER.len() {
            return Err(CliError::Parse(format!("expected {} columns, got {}", CSV_HEADER.len(), rec.len())));
        }
        let float = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(CSV_HEADER[i], &rec[i]));
        rows.push(StudyRow {
            algorithm: rec[0].parse().map_err(|_| bad("algorithm", &rec[0]))?,
            summation: rec[1].parse().map_err(|_| bad("summation", &rec[1]))?,
            epsilon: float(2)?,
            order: rec[3].parse().map_err(|_| bad("order", &rec[3]))?,
            error_rel: float(4)?,
            pole_flag: rec[5].parse().map_err(|_| bad("pole_flag", &rec[5]))?,
            min_divisor: if rec[6].is_empty() { None } else { Some(float(6)?) },
        });
    }
    Ok(rows)
}
