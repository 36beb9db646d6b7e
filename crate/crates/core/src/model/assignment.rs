use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{syntax, tokens, ModelError};
use crate::fieldarith::{
    level_spec, parse_level_spec, FieldElement, FieldError, NumberField, TowerLevel,
};

/// Entangled two-qubit state; `vector[2a + b]` is the amplitude of
/// `|a>_i |b>_j`.
#[derive(Clone, Debug)]
pub struct PairState {
    pub i: usize,
    pub j: usize,
    pub vector: [FieldElement; 4],
}

/// A satisfying state as a product of single-qubit vectors and entangled
/// pairs. Vectors need not be normalized.
#[derive(Clone, Debug)]
pub struct Assignment {
    singles: Vec<Option<[FieldElement; 2]>>,
    pair_of: Vec<Option<usize>>,
    pairs: Vec<PairState>,
}

fn common_level(v: &[FieldElement]) -> Result<Vec<FieldElement>, FieldError> {
    let mut top = v[0].level().clone();
    for x in &v[1..] {
        let (a, _) = FieldElement::unify(&FieldElement::zero(&top), x)?;
        top = a.level().clone();
    }
    v.iter()
        .map(|x| FieldElement::unify_into(&top, x))
        .collect()
}

impl Assignment {
    pub fn new(n: usize) -> Self {
        Assignment {
            singles: vec![None; n],
            pair_of: vec![None; n],
            pairs: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.singles.len()
    }

    pub fn single(&self, q: usize) -> Option<&[FieldElement; 2]> {
        self.singles[q].as_ref()
    }

    pub fn pair_of(&self, q: usize) -> Option<&PairState> {
        self.pair_of[q].map(|k| &self.pairs[k])
    }

    pub fn pairs(&self) -> &[PairState] {
        &self.pairs
    }

    pub fn is_covered(&self, q: usize) -> bool {
        self.singles[q].is_some() || self.pair_of[q].is_some()
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.n()).filter(|&q| !self.is_covered(q)).collect()
    }

    /// Sets the state of `q`, lifting both components to a common level.
    pub fn set_single(&mut self, q: usize, v: [FieldElement; 2]) -> Result<(), FieldError> {
        let w = common_level(&v)?;
        self.singles[q] = Some([w[0].clone(), w[1].clone()]);
        Ok(())
    }

    pub fn set_pair(&mut self, i: usize, j: usize, v: [FieldElement; 4]) -> Result<(), FieldError> {
        let w = common_level(&v)?;
        let k = self.pairs.len();
        self.pairs.push(PairState {
            i,
            j,
            vector: w.try_into().expect("four amplitudes"),
        });
        self.pair_of[i] = Some(k);
        self.pair_of[j] = Some(k);
        Ok(())
    }

    /// Replaces all single-qubit vectors through `f`.
    pub fn map_singles(
        &mut self,
        mut f: impl FnMut(usize, &[FieldElement; 2]) -> Result<[FieldElement; 2], FieldError>,
    ) -> Result<(), FieldError> {
        for q in 0..self.n() {
            if let Some(v) = &self.singles[q] {
                let w = f(q, v)?;
                self.set_single(q, w)?;
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in 0..self.n() {
            if let Some(v) = &self.singles[q] {
                writeln!(
                    s,
                    "qubit {q} {} {} {}",
                    level_spec(v[0].level()),
                    v[0].to_compact(),
                    v[1].to_compact()
                )
                .unwrap();
            } else if let Some(p) = self.pair_of(q) {
                if p.i.min(p.j) == q {
                    write!(
                        s,
                        "pair {} {} {}",
                        p.i,
                        p.j,
                        level_spec(p.vector[0].level())
                    )
                    .unwrap();
                    for c in &p.vector {
                        write!(s, " {}", c.to_compact()).unwrap();
                    }
                    s.push('\n');
                }
            }
        }
        s
    }

    /// Parses an assignment file; `Ok(None)` stands for `UNSAT`. Tower levels
    /// with the same spec are shared.
    pub fn parse(
        text: &str,
        field: &Arc<NumberField>,
        n: usize,
    ) -> Result<Option<Self>, ModelError> {
        let mut a = Assignment::new(n);
        let mut levels: HashMap<String, Arc<TowerLevel>> = HashMap::new();
        let mut unsat = false;
        let mut any = false;
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let toks = tokens(line);
            let Some(&(col, head)) = toks.first() else {
                continue;
            };
            if unsat {
                return Err(syntax(line_no, col, "content after UNSAT"));
            }
            let arity = match head {
                "UNSAT" if !any && toks.len() == 1 => {
                    unsat = true;
                    continue;
                }
                "qubit" => 1,
                "pair" => 2,
                other => return Err(syntax(line_no, col, format!("unknown keyword `{other}`"))),
            };
            any = true;
            let amps = 1 << arity;
            if toks.len() != 1 + arity + 1 + amps {
                return Err(syntax(
                    line_no,
                    col,
                    format!("`{head}` line needs {} fields", arity + 1 + amps),
                ));
            }
            let mut idx = Vec::with_capacity(arity);
            for &(c, t) in &toks[1..1 + arity] {
                let q: usize = t
                    .parse()
                    .map_err(|_| syntax(line_no, c, format!("bad qubit index `{t}`")))?;
                if q >= n {
                    return Err(ModelError::IndexOutOfRange {
                        line: line_no,
                        index: q,
                        n,
                    });
                }
                if a.is_covered(q) || idx.contains(&q) {
                    return Err(syntax(line_no, c, format!("qubit {q} assigned twice")));
                }
                idx.push(q);
            }
            let (sc, spec) = toks[1 + arity];
            let level = match levels.get(spec) {
                Some(l) => l.clone(),
                None => {
                    let l = parse_level_spec(field, spec)
                        .map_err(|e| syntax(line_no, sc, e.to_string()))?;
                    levels.insert(spec.to_string(), l.clone());
                    l
                }
            };
            let mut v = Vec::with_capacity(amps);
            for &(c, t) in &toks[2 + arity..] {
                v.push(
                    FieldElement::parse_compact(&level, t)
                        .map_err(|e| syntax(line_no, c, e.to_string()))?,
                );
            }
            let res = if arity == 1 {
                a.set_single(idx[0], [v[0].clone(), v[1].clone()])
            } else {
                a.set_pair(idx[0], idx[1], v.try_into().expect("four amplitudes"))
            };
            res.map_err(|e| syntax(line_no, col, e.to_string()))?;
        }
        if unsat {
            return Ok(None);
        }
        if !any {
            return Err(syntax(1, 1, "empty assignment"));
        }
        Ok(Some(a))
    }
}
