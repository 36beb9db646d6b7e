use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{syntax, tokens, ModelError};
use crate::fieldarith::{
    format_rational, parse_rational, FieldElement, NumberField, RationalBox, TowerLevel,
};

/// A rank-1 two-qubit constraint given by its row vector
/// `(e00, e01, e10, e11)`; the first index refers to qubit `u`. A product
/// state `a (x) b` satisfies it iff `sum e_xy a_x b_y = 0`.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub id: usize,
    pub u: usize,
    pub v: usize,
    pub eta: [FieldElement; 4],
}

#[derive(Clone, Debug)]
pub struct Instance {
    n: usize,
    constraints: Vec<Constraint>,
    field: Arc<NumberField>,
    base: Arc<TowerLevel>,
}

impl PartialEq for Instance {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n
            && *self.field == *o.field
            && self.constraints.len() == o.constraints.len()
            && self.constraints.iter().zip(&o.constraints).all(|(a, b)| {
                a.u == b.u
                    && a.v == b.v
                    && a.eta
                        .iter()
                        .zip(&b.eta)
                        .all(|(x, y)| x.den() == y.den() && x.num() == y.num())
            })
    }
}

impl Instance {
    pub fn new(field: Arc<NumberField>, n: usize) -> Self {
        let base = TowerLevel::base(field.clone());
        Instance {
            n,
            constraints: Vec::new(),
            field,
            base,
        }
    }

    /// An instance over `Q`.
    pub fn rational(n: usize) -> Self {
        Self::new(Arc::new(NumberField::rationals()), n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn base_level(&self) -> &Arc<TowerLevel> {
        &self.base
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, id: usize) -> &Constraint {
        &self.constraints[id]
    }

    pub fn int(&self, k: impl Into<BigInt>) -> FieldElement {
        FieldElement::from_int(&self.base, k)
    }

    pub fn add_constraint(
        &mut self,
        u: usize,
        v: usize,
        eta: [FieldElement; 4],
    ) -> Result<usize, ModelError> {
        for q in [u, v] {
            if q >= self.n {
                return Err(ModelError::QubitOutOfRange {
                    index: q,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(ModelError::SelfLoop(u));
        }
        let mut lifted = Vec::with_capacity(4);
        for e in eta {
            if e.level().depth() != 0 || !TowerLevel::same(e.level(), &self.base) {
                return Err(ModelError::NotBaseField);
            }
            lifted.push(
                e.lift_to(&self.base)
                    .map_err(|_| ModelError::NotBaseField)?,
            );
        }
        if lifted.iter().all(|e| e.is_zero()) {
            return Err(ModelError::ZeroConstraint);
        }
        let eta: [FieldElement; 4] = lifted.try_into().expect("four coefficients");
        let id = self.constraints.len();
        self.constraints.push(Constraint { id, u, v, eta });
        Ok(id)
    }

    /// Adds a constraint with integer coefficients.
    pub fn add_int_constraint(
        &mut self,
        u: usize,
        v: usize,
        eta: [i64; 4],
    ) -> Result<usize, ModelError> {
        let e = eta.map(|k| self.int(k));
        self.add_constraint(u, v, e)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut header = false;
        let mut poly: Option<Vec<BigInt>> = None;
        let mut bx: Option<RationalBox> = None;
        let mut inst: Option<Instance> = None;
        for (ln, line) in text.lines().enumerate() {
            let line_no = ln + 1;
            let toks = tokens(line);
            let Some(&(col, head)) = toks.first() else {
                continue;
            };
            if !header {
                if toks.len() != 2 || head != "q2sat" || toks[1].1 != "1" {
                    return Err(syntax(line_no, col, "expected header `q2sat 1`"));
                }
                header = true;
                continue;
            }
            match head {
                "field" => {
                    if inst.is_some() {
                        return Err(syntax(line_no, col, "field lines must precede `qubits`"));
                    }
                    let Some(&(c2, kind)) = toks.get(1) else {
                        return Err(syntax(line_no, col, "expected `field poly` or `field box`"));
                    };
                    match kind {
                        "poly" => {
                            if poly.is_some() {
                                return Err(syntax(line_no, col, "duplicate `field poly`"));
                            }
                            let mut cs = Vec::new();
                            for &(c, t) in &toks[2..] {
                                cs.push(t.parse::<BigInt>().map_err(|_| {
                                    syntax(line_no, c, format!("bad coefficient `{t}`"))
                                })?);
                            }
                            if cs.len() < 2 {
                                return Err(syntax(
                                    line_no,
                                    c2,
                                    "polynomial needs at least two coefficients",
                                ));
                            }
                            poly = Some(cs);
                        }
                        "box" => {
                            if toks.len() != 6 {
                                return Err(syntax(
                                    line_no,
                                    c2,
                                    "`field box` takes four rationals",
                                ));
                            }
                            let mut r: Vec<BigRational> = Vec::new();
                            for &(c, t) in &toks[2..] {
                                r.push(parse_rational(t).ok_or_else(|| {
                                    syntax(line_no, c, format!("bad rational `{t}`"))
                                })?);
                            }
                            bx = Some(RationalBox {
                                re_lo: r[0].clone(),
                                re_hi: r[1].clone(),
                                im_lo: r[2].clone(),
                                im_hi: r[3].clone(),
                            });
                        }
                        other => {
                            return Err(syntax(
                                line_no,
                                c2,
                                format!("unknown field line `{other}`"),
                            ))
                        }
                    }
                }
                "qubits" => {
                    if inst.is_some() {
                        return Err(syntax(line_no, col, "duplicate `qubits`"));
                    }
                    if toks.len() != 2 {
                        return Err(syntax(line_no, col, "expected `qubits <n>`"));
                    }
                    let n: usize = toks[1]
                        .1
                        .parse()
                        .map_err(|_| syntax(line_no, toks[1].0, "bad qubit count"))?;
                    let p = poly.take().ok_or_else(|| {
                        syntax(line_no, col, "missing `field poly` before `qubits`")
                    })?;
                    let field =
                        NumberField::new(p, bx.take()).map_err(|source| ModelError::Field {
                            line: line_no,
                            source,
                        })?;
                    inst = Some(Instance::new(Arc::new(field), n));
                }
                "constraint" => {
                    let Some(inst) = inst.as_mut() else {
                        return Err(syntax(line_no, col, "`constraint` before `qubits`"));
                    };
                    if toks.len() != 7 {
                        return Err(syntax(
                            line_no,
                            col,
                            "expected `constraint u v e00 e01 e10 e11`",
                        ));
                    }
                    let mut idx = [0usize; 2];
                    for (k, &(c, t)) in toks[1..3].iter().enumerate() {
                        idx[k] = t
                            .parse()
                            .map_err(|_| syntax(line_no, c, format!("bad qubit index `{t}`")))?;
                        if idx[k] >= inst.n {
                            return Err(ModelError::IndexOutOfRange {
                                line: line_no,
                                index: idx[k],
                                n: inst.n,
                            });
                        }
                    }
                    if idx[0] == idx[1] {
                        return Err(syntax(
                            line_no,
                            toks[2].0,
                            "constraint needs two distinct qubits",
                        ));
                    }
                    let mut eta = Vec::with_capacity(4);
                    for &(c, t) in &toks[3..] {
                        eta.push(
                            FieldElement::parse_compact(&inst.base, t)
                                .map_err(|e| syntax(line_no, c, e.to_string()))?,
                        );
                    }
                    let eta: [FieldElement; 4] = eta.try_into().expect("four coefficients");
                    inst.add_constraint(idx[0], idx[1], eta)
                        .map_err(|e| match e {
                            ModelError::ZeroConstraint => {
                                syntax(line_no, col, "constraint vector is zero")
                            }
                            other => other,
                        })?;
                }
                other => return Err(syntax(line_no, col, format!("unknown keyword `{other}`"))),
            }
        }
        if !header {
            return Err(syntax(1, 1, "empty input"));
        }
        inst.ok_or_else(|| syntax(text.lines().count().max(1), 1, "missing `qubits` line"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("q2sat 1\n");
        let p: Vec<String> = self.field.poly().iter().map(|c| c.to_string()).collect();
        writeln!(s, "field poly {}", p.join(" ")).unwrap();
        if let Some(b) = self.field.embedding() {
            writeln!(
                s,
                "field box {} {} {} {}",
                format_rational(&b.re_lo),
                format_rational(&b.re_hi),
                format_rational(&b.im_lo),
                format_rational(&b.im_hi)
            )
            .unwrap();
        }
        writeln!(s, "qubits {}", self.n).unwrap();
        for c in &self.constraints {
            write!(s, "constraint {} {}", c.u, c.v).unwrap();
            for e in &c.eta {
                write!(s, " {}", e.to_compact()).unwrap();
            }
            s.push('\n');
        }
        s
    }
}
