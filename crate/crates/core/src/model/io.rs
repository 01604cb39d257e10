//! Plain-text model serialisation.
//!
//! ```text
//! kind ising
//! num_vars 3
//! offset 0.25
//! aux 2
//! lin 0 -1
//! quad 0 1 0.5
//! ```
//!
//! `kind` is `qubo` or `ising`; `aux` lines (Ising only) mark auxiliary XOR
//! spins. Lines starting with `#` are comments. Coefficients use Rust's
//! shortest round-trip formatting, so floats survive a write/read cycle exactly.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{IsingModel, QuboModel, Vartype, XorIsing};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile<T> {
    Qubo(QuboModel<T>),
    Ising(XorIsing<T>),
}

impl<T: Scalar> ModelFile<T> {
    pub fn vartype(&self) -> Vartype {
        match self {
            ModelFile::Qubo(_) => Vartype::Binary,
            ModelFile::Ising(_) => Vartype::Spin,
        }
    }

    pub fn num_vars(&self) -> usize {
        match self {
            ModelFile::Qubo(q) => q.num_vars(),
            ModelFile::Ising(s) => s.model.num_vars(),
        }
    }

    pub fn energy(&self, state: &[i8]) -> T {
        match self {
            ModelFile::Qubo(q) => q.energy(state),
            ModelFile::Ising(s) => s.model.energy(state),
        }
    }
}

fn write_terms<T: Scalar, D: super::Domain>(out: &mut String, m: &super::QuadraticModel<T, D>) {
    for (i, c) in m.linear().iter().enumerate() {
        if !c.is_zero() {
            writeln!(out, "lin {i} {c}").unwrap();
        }
    }
    for (&(i, j), c) in m.quadratic() {
        if !c.is_zero() {
            writeln!(out, "quad {i} {j} {c}").unwrap();
        }
    }
}

pub fn write_model<T: Scalar>(model: &ModelFile<T>) -> String {
    let mut out = String::new();
    match model {
        ModelFile::Qubo(q) => {
            writeln!(out, "kind qubo\nnum_vars {}\noffset {}", q.num_vars(), q.offset()).unwrap();
            write_terms(&mut out, q);
        }
        ModelFile::Ising(s) => {
            writeln!(out, "kind ising\nnum_vars {}\noffset {}", s.model.num_vars(), s.model.offset()).unwrap();
            for a in &s.aux {
                writeln!(out, "aux {a}").unwrap();
            }
            write_terms(&mut out, &s.model);
        }
    }
    out
}

pub fn write_qubo<T: Scalar>(q: &QuboModel<T>) -> String {
    write_model(&ModelFile::Qubo(q.clone()))
}

pub fn write_ising<T: Scalar>(s: &IsingModel<T>) -> String {
    write_model(&ModelFile::Ising(XorIsing { model: s.clone(), aux: Vec::new() }))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn field<F: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<F> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse_err(line, format!("bad {what} `{tok}`")))
}

enum Term<T> {
    Lin(usize, T),
    Quad(usize, usize, T),
}

pub fn read_model<T: Scalar + FromStr>(text: &str) -> Result<ModelFile<T>> {
    let mut kind: Option<Vartype> = None;
    let mut num_vars: Option<usize> = None;
    let mut offset = T::zero();
    let mut aux = Vec::new();
    let mut terms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        match key {
            "kind" => {
                kind = Some(match toks.next() {
                    Some("qubo") => Vartype::Binary,
                    Some("ising") => Vartype::Spin,
                    other => return Err(parse_err(line_no, format!("unknown kind {other:?}"))),
                })
            }
            "num_vars" => num_vars = Some(field(toks.next(), line_no, "variable count")?),
            "offset" => offset = field(toks.next(), line_no, "offset")?,
            "aux" => aux.push(field::<usize>(toks.next(), line_no, "aux index")?),
            "lin" => {
                let i = field(toks.next(), line_no, "index")?;
                terms.push((line_no, Term::Lin(i, field(toks.next(), line_no, "coefficient")?)));
            }
            "quad" => {
                let i = field(toks.next(), line_no, "index")?;
                let j: usize = field(toks.next(), line_no, "index")?;
                if i == j {
                    return Err(parse_err(line_no, "quadratic term on a single variable"));
                }
                terms.push((line_no, Term::Quad(i, j, field(toks.next(), line_no, "coefficient")?)));
            }
            other => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(parse_err(line_no, "trailing tokens"));
        }
    }
    let kind = kind.ok_or_else(|| parse_err(0, "missing `kind` header"))?;
    let n = num_vars.ok_or_else(|| parse_err(0, "missing `num_vars` header"))?;
    let check = |line: usize, i: usize| {
        if i < n {
            Ok(())
        } else {
            Err(parse_err(line, format!("index {i} out of range for {n} variables")))
        }
    };
    macro_rules! fill {
        ($m:expr) => {{
            let mut m = $m;
            m.add_offset(offset);
            for (line, t) in terms {
                match t {
                    Term::Lin(i, c) => {
                        check(line, i)?;
                        m.add_linear(i, c);
                    }
                    Term::Quad(i, j, c) => {
                        check(line, i)?;
                        check(line, j)?;
                        m.add_quadratic(i, j, c);
                    }
                }
            }
            m
        }};
    }
    match kind {
        Vartype::Binary => {
            if !aux.is_empty() {
                return Err(parse_err(0, "aux spins only apply to Ising models"));
            }
            Ok(ModelFile::Qubo(fill!(QuboModel::<T>::new(n))))
        }
        Vartype::Spin => {
            for &a in &aux {
                check(0, a)?;
            }
            Ok(ModelFile::Ising(XorIsing { model: fill!(IsingModel::<T>::new(n)), aux }))
        }
    }
}
