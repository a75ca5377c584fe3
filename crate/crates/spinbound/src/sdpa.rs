//! Deterministic sparse SDPA export/import and a file-based external solver
//! backend.
//!
//! The interchange problem is the SDPA primal
//!
//! ```text
//! minimize    c' x
//! subject to  X = sum_i x_i F_i - F_0,   X PSD (block diagonal),
//! ```
//!
//! which matches a relaxation `A0 + sum_i y_i A_i PSD` under `F_i = A_i`,
//! `F_0 = -A0`. Equality rows become an antisymmetric pair of rows in a
//! diagonal block, and extra inequality rows become 1x1 diagonal blocks.
//!
//! Export is byte-deterministic: a fixed header layout, entries sorted by
//! `(matrix, block, row, column)`, and values printed with 17 significant
//! digits so the round trip import -> export reproduces files exactly.

use std::fmt::Write as _;
use std::path::Path;
use std::process::Command;

use crate::error::{Error, Result};
use crate::expr::LinExpr;
use crate::sdp::Relaxation;

/// One nonzero of a constraint matrix. `matno` 0 addresses the constant
/// matrix `F_0`, `1..=nvars` the variable matrices; indices are 1-based with
/// `i <= j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdpaEntry {
    /// Matrix number (0 for the constant matrix).
    pub matno: usize,
    /// Block number, 1-based.
    pub blockno: usize,
    /// Row, 1-based.
    pub i: usize,
    /// Column, 1-based (`i <= j`).
    pub j: usize,
    /// Coefficient value.
    pub value: f64,
}

/// A semidefinite program in SDPA sparse form.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpaProblem {
    /// Number of scalar variables.
    pub nvars: usize,
    /// Block sizes; a negative size marks a diagonal block.
    pub block_sizes: Vec<i64>,
    /// Objective coefficients, one per variable.
    pub objective: Vec<f64>,
    /// All nonzeros, sorted by `(matno, blockno, i, j)`.
    pub entries: Vec<SdpaEntry>,
}

/// Normalize `-0.0` so formatting is sign-deterministic.
fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

fn entry_key(e: &SdpaEntry) -> (usize, usize, usize, usize) {
    (e.matno, e.blockno, e.i, e.j)
}

impl SdpaProblem {
    /// Validate counts, index ranges, ordering, and duplicate entries.
    pub fn validate(&self) -> Result<()> {
        if self.objective.len() != self.nvars {
            return Err(Error::SdpaFormat(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.nvars
            )));
        }
        if self.block_sizes.iter().any(|&s| s == 0) {
            return Err(Error::SdpaFormat("zero-sized block".into()));
        }
        let mut prev: Option<(usize, usize, usize, usize)> = None;
        for e in &self.entries {
            if e.matno > self.nvars {
                return Err(Error::SdpaFormat(format!(
                    "matrix number {} exceeds variable count {}",
                    e.matno, self.nvars
                )));
            }
            let Some(&size) = self.block_sizes.get(e.blockno.wrapping_sub(1)) else {
                return Err(Error::SdpaFormat(format!(
                    "block number {} out of range",
                    e.blockno
                )));
            };
            let dim = size.unsigned_abs() as usize;
            if e.i == 0 || e.j == 0 || e.i > e.j || e.j > dim {
                return Err(Error::SdpaFormat(format!(
                    "entry indices ({}, {}) invalid for block {} of size {}",
                    e.i, e.j, e.blockno, size
                )));
            }
            if size < 0 && e.i != e.j {
                return Err(Error::SdpaFormat(format!(
                    "off-diagonal entry ({}, {}) in diagonal block {}",
                    e.i, e.j, e.blockno
                )));
            }
            let key = entry_key(e);
            if let Some(p) = prev {
                if p >= key {
                    return Err(Error::SdpaFormat(format!(
                        "entries not strictly sorted at matrix {} block {} ({}, {})",
                        e.matno, e.blockno, e.i, e.j
                    )));
                }
            }
            prev = Some(key);
        }
        Ok(())
    }

    /// Render the problem in SDPA sparse format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.nvars);
        let _ = writeln!(out, "{}", self.block_sizes.len());
        let sizes: Vec<String> = self.block_sizes.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "{}", sizes.join(" "));
        let obj: Vec<String> = self
            .objective
            .iter()
            .map(|&v| format!("{:.16e}", clean(v)))
            .collect();
        let _ = writeln!(out, "{}", obj.join(" "));
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{} {} {} {} {:.16e}",
                e.matno,
                e.blockno,
                e.i,
                e.j,
                clean(e.value)
            );
        }
        out
    }

    /// Write the problem to a file.
    pub fn write_file(&self, path: &Path) -> Result<()> {
        self.validate()?;
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Parse a problem from SDPA sparse text. Comment lines (leading `*` or
    /// `"`) are skipped; header lines tolerate the `{ , }` punctuation the
    /// format allows.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .filter(|l| {
                let t = l.trim_start();
                !t.is_empty() && !t.starts_with('*') && !t.starts_with('"')
            })
            .peekable();
        let mut header = |what: &str| -> Result<Vec<String>> {
            let line = lines
                .next()
                .ok_or_else(|| Error::SdpaFormat(format!("missing {what} line")))?;
            Ok(line
                .replace(['{', '}', ',', '(', ')'], " ")
                .split_whitespace()
                .map(str::to_string)
                .collect())
        };
        let nvars_f = header("variable count")?;
        let nvars: usize = nvars_f
            .first()
            .ok_or_else(|| Error::SdpaFormat("empty variable count line".into()))?
            .parse()
            .map_err(|e| Error::SdpaFormat(format!("bad variable count: {e}")))?;
        let nblocks_f = header("block count")?;
        let nblocks: usize = nblocks_f
            .first()
            .ok_or_else(|| Error::SdpaFormat("empty block count line".into()))?
            .parse()
            .map_err(|e| Error::SdpaFormat(format!("bad block count: {e}")))?;
        let sizes_f = header("block sizes")?;
        if sizes_f.len() != nblocks {
            return Err(Error::SdpaFormat(format!(
                "expected {nblocks} block sizes, found {}",
                sizes_f.len()
            )));
        }
        let block_sizes: Vec<i64> = sizes_f
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|e| Error::SdpaFormat(format!("bad block size {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let obj_f = header("objective")?;
        if obj_f.len() != nvars {
            return Err(Error::SdpaFormat(format!(
                "expected {nvars} objective coefficients, found {}",
                obj_f.len()
            )));
        }
        let objective: Vec<f64> = obj_f
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|e| Error::SdpaFormat(format!("bad objective value {t:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let mut entries = Vec::new();
        for line in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 {
                return Err(Error::SdpaFormat(format!(
                    "entry line needs 5 fields, found {}: {line:?}",
                    toks.len()
                )));
            }
            let parse_idx = |t: &str| -> Result<usize> {
                t.parse()
                    .map_err(|e| Error::SdpaFormat(format!("bad index {t:?}: {e}")))
            };
            entries.push(SdpaEntry {
                matno: parse_idx(toks[0])?,
                blockno: parse_idx(toks[1])?,
                i: parse_idx(toks[2])?,
                j: parse_idx(toks[3])?,
                value: toks[4]
                    .parse()
                    .map_err(|e| Error::SdpaFormat(format!("bad value {:?}: {e}", toks[4])))?,
            });
        }
        let problem = SdpaProblem {
            nvars,
            block_sizes,
            objective,
            entries,
        };
        problem.validate()?;
        Ok(problem)
    }

    /// Read a problem from a file.
    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(&text)
    }
}

/// An SDPA problem exported from a relaxation, with bookkeeping the format
/// cannot carry.
#[derive(Clone, Debug)]
pub struct SdpaExport {
    /// The problem itself.
    pub problem: SdpaProblem,
    /// Affine objective constant the format drops; add it back to solved
    /// objective values.
    pub dropped_constant: f64,
}

/// Compile a relaxation (with an arbitrary objective expression and optional
/// extra `>= 0` rows) to SDPA sparse form.
///
/// Variable order is the relaxation's moment-variable order. Equality rows
/// become `+row` / `-row` pairs inside one diagonal block; inequality rows
/// become 1x1 diagonal blocks, matching the pure-SDP encoding of box
/// constraints.
pub fn export_problem(
    relax: &Relaxation,
    objective: &LinExpr,
    ineqs: &[LinExpr],
) -> Result<SdpaExport> {
    let nvars = relax.variables();
    let mut objective_vec = vec![0.0; nvars];
    for (id, c) in objective.terms() {
        objective_vec[id.index()] += c;
    }
    let mut block_sizes = Vec::new();
    let mut entries = Vec::new();
    let mut blockno = 0usize;

    for b in relax.blocks() {
        blockno += 1;
        block_sizes.push(b.dim() as i64);
        for (i, j, e) in b.upper_entries() {
            let c0 = e.constant_part();
            if c0 != 0.0 {
                // F_0 = -A0.
                entries.push(SdpaEntry {
                    matno: 0,
                    blockno,
                    i: i + 1,
                    j: j + 1,
                    value: -c0,
                });
            }
            for (id, c) in e.terms() {
                entries.push(SdpaEntry {
                    matno: id.index() + 1,
                    blockno,
                    i: i + 1,
                    j: j + 1,
                    value: *c,
                });
            }
        }
    }

    if !relax.equalities().is_empty() {
        blockno += 1;
        block_sizes.push(-2 * relax.equalities().len() as i64);
        for (row, e) in relax.equalities().iter().enumerate() {
            for (sign, offset) in [(1.0, 1), (-1.0, 2)] {
                let d = 2 * row + offset;
                let c0 = e.constant_part();
                if c0 != 0.0 {
                    entries.push(SdpaEntry {
                        matno: 0,
                        blockno,
                        i: d,
                        j: d,
                        value: -sign * c0,
                    });
                }
                for (id, c) in e.terms() {
                    entries.push(SdpaEntry {
                        matno: id.index() + 1,
                        blockno,
                        i: d,
                        j: d,
                        value: sign * c,
                    });
                }
            }
        }
    }

    for e in ineqs {
        blockno += 1;
        block_sizes.push(-1);
        let c0 = e.constant_part();
        if c0 != 0.0 {
            entries.push(SdpaEntry {
                matno: 0,
                blockno,
                i: 1,
                j: 1,
                value: -c0,
            });
        }
        for (id, c) in e.terms() {
            entries.push(SdpaEntry {
                matno: id.index() + 1,
                blockno,
                i: 1,
                j: 1,
                value: *c,
            });
        }
    }

    entries.sort_by_key(entry_key);
    let problem = SdpaProblem {
        nvars,
        block_sizes,
        objective: objective_vec,
        entries,
    };
    problem.validate()?;
    Ok(SdpaExport {
        problem,
        dropped_constant: objective.constant_part(),
    })
}

/// Output of a file-based external solver run.
#[derive(Clone, Debug)]
pub struct ExternalSolution {
    /// Reported primal objective (constant not included).
    pub objective_primal: f64,
    /// Reported dual objective.
    pub objective_dual: f64,
    /// Variable values in problem order.
    pub x: Vec<f64>,
}

/// Parse the `objValPrimal` / `objValDual` / `xVec` fields of an SDPA-style
/// result file.
pub fn parse_result(text: &str, nvars: usize) -> Result<ExternalSolution> {
    let scalar = |name: &str| -> Result<f64> {
        for line in text.lines() {
            let t = line.trim();
            if let Some(rest) = t.strip_prefix(name) {
                let rest = rest.trim_start().strip_prefix('=').map(str::trim).ok_or_else(
                    || Error::SdpaFormat(format!("malformed {name} line: {t:?}")),
                )?;
                return rest
                    .parse()
                    .map_err(|e| Error::SdpaFormat(format!("bad {name} value: {e}")));
            }
        }
        Err(Error::SdpaFormat(format!(
            "result file is missing {name}"
        )))
    };
    let objective_primal = scalar("objValPrimal")?;
    let objective_dual = scalar("objValDual")?;

    let marker = text
        .find("xVec")
        .ok_or_else(|| Error::SdpaFormat("result file is missing xVec".into()))?;
    let after = &text[marker..];
    let open = after
        .find('{')
        .ok_or_else(|| Error::SdpaFormat("xVec has no opening brace".into()))?;
    let close = after[open..]
        .find('}')
        .ok_or_else(|| Error::SdpaFormat("xVec has no closing brace".into()))?;
    let body = &after[open + 1..open + close];
    let x: Vec<f64> = body
        .split([',', ' ', '\n', '\t'])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|e| Error::SdpaFormat(format!("bad xVec value {t:?}: {e}")))
        })
        .collect::<Result<_>>()?;
    if x.len() != nvars {
        return Err(Error::SdpaFormat(format!(
            "xVec has {} values for {} variables",
            x.len(),
            nvars
        )));
    }
    Ok(ExternalSolution {
        objective_primal,
        objective_dual,
        x,
    })
}

/// Solve through an external SDPA-compatible binary: write the problem to
/// `dir`, run `command <problem> <result>`, parse the result file.
pub fn solve_external(
    problem: &SdpaProblem,
    command: &str,
    dir: &Path,
) -> Result<ExternalSolution> {
    let input = dir.join("problem.dat-s");
    let output = dir.join("problem.result");
    problem.write_file(&input)?;
    let status = Command::new(command)
        .arg(&input)
        .arg(&output)
        .status()
        .map_err(|e| Error::Solver(format!("external solver {command:?} unavailable: {e}")))?;
    if !status.success() {
        return Err(Error::Solver(format!(
            "external solver {command:?} exited with {status}"
        )));
    }
    let text = std::fs::read_to_string(&output)?;
    parse_result(&text, problem.nvars)
}
