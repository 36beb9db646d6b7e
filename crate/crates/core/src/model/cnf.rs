use std::fmt::Write as _;

use super::{syntax, tokens, Instance, ModelError};

/// A 2-CNF formula. Literals use DIMACS numbering: `+k` is variable `k - 1`,
/// `-k` its negation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: usize,
    pub clauses: Vec<[i64; 2]>,
}

impl Cnf {
    pub fn new(num_vars: usize) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn push(&mut self, a: i64, b: i64) {
        self.clauses.push([a, b]);
    }

    pub fn evaluate(&self, x: &[bool]) -> bool {
        let lit = |l: i64| x[(l.unsigned_abs() - 1) as usize] == (l > 0);
        self.clauses.iter().all(|&[a, b]| lit(a) || lit(b))
    }

    /// Parses a DIMACS `p cnf` file whose clauses all have exactly two
    /// literals.
    pub fn parse_dimacs(text: &str) -> Result<Self, ModelError> {
        let mut cnf: Option<Cnf> = None;
        let mut declared = 0usize;
        let mut pending: Vec<i64> = Vec::new();
        let mut pending_at = (0, 0);
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let trimmed = line.trim_start();
            if trimmed.starts_with('c') || trimmed.starts_with('%') {
                continue;
            }
            let toks = tokens(line);
            let Some(&(col, head)) = toks.first() else {
                continue;
            };
            if head == "p" {
                if cnf.is_some() {
                    return Err(syntax(line_no, col, "duplicate problem line"));
                }
                if toks.len() != 4 || toks[1].1 != "cnf" {
                    return Err(syntax(line_no, col, "expected `p cnf <vars> <clauses>`"));
                }
                let nv = toks[2]
                    .1
                    .parse()
                    .map_err(|_| syntax(line_no, toks[2].0, "bad variable count"))?;
                declared = toks[3]
                    .1
                    .parse()
                    .map_err(|_| syntax(line_no, toks[3].0, "bad clause count"))?;
                cnf = Some(Cnf::new(nv));
                continue;
            }
            let Some(f) = cnf.as_mut() else {
                return Err(syntax(line_no, col, "clause before problem line"));
            };
            for &(c, t) in &toks {
                let l: i64 = t
                    .parse()
                    .map_err(|_| syntax(line_no, c, format!("bad literal `{t}`")))?;
                if l == 0 {
                    if pending.len() != 2 {
                        return Err(syntax(
                            pending_at.0.max(line_no),
                            if pending.is_empty() { c } else { pending_at.1 },
                            format!("clause has {} literals, expected 2", pending.len()),
                        ));
                    }
                    f.push(pending[0], pending[1]);
                    pending.clear();
                    continue;
                }
                if l.unsigned_abs() as usize > f.num_vars {
                    return Err(ModelError::IndexOutOfRange {
                        line: line_no,
                        index: l.unsigned_abs() as usize,
                        n: f.num_vars,
                    });
                }
                if pending.is_empty() {
                    pending_at = (line_no, c);
                }
                pending.push(l);
            }
        }
        let f = cnf.ok_or_else(|| syntax(1, 1, "missing problem line"))?;
        if !pending.is_empty() {
            return Err(syntax(pending_at.0, pending_at.1, "unterminated clause"));
        }
        if f.clauses.len() != declared {
            return Err(syntax(
                text.lines().count().max(1),
                1,
                format!("declared {declared} clauses, found {}", f.clauses.len()),
            ));
        }
        Ok(f)
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for [a, b] in &self.clauses {
            writeln!(s, "{a} {b} 0").unwrap();
        }
        s
    }
}

/// Embeds a 2-CNF as a rational instance: clause `(l1 or l2)` forbids the
/// single basis state falsifying both literals.
///
/// Unit clauses (`x or x`), tautologies and other same-variable clauses are
/// rejected.
pub fn embed_cnf(cnf: &Cnf) -> Result<Instance, ModelError> {
    let mut inst = Instance::rational(cnf.num_vars);
    for (index, &[a, b]) in cnf.clauses.iter().enumerate() {
        for l in [a, b] {
            if l == 0 || l.unsigned_abs() as usize > cnf.num_vars {
                return Err(ModelError::Clause {
                    index,
                    message: format!("literal {l} out of range"),
                });
            }
        }
        if a.unsigned_abs() == b.unsigned_abs() {
            let message = if a == b {
                "unit clause"
            } else {
                "tautological clause"
            };
            return Err(ModelError::Clause {
                index,
                message: message.into(),
            });
        }
        let u = (a.unsigned_abs() - 1) as usize;
        let v = (b.unsigned_abs() - 1) as usize;
        // a positive literal is falsified by the value 0
        let ca = usize::from(a < 0);
        let cb = usize::from(b < 0);
        let mut eta = [0i64; 4];
        eta[2 * ca + cb] = 1;
        inst.add_int_constraint(u, v, eta)?;
    }
    Ok(inst)
}
