//! Unit expressions, reduction to SI base dimensions, and unit checks over
//! component models.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::diag::{Code, Finding, Locus};
use crate::model::{ComponentModel, ElementKind, FieldType, Schema};

/// Exponents over (length, mass, time, current, temperature, amount,
/// luminous intensity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Dimension(pub [i32; 7]);

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension([0; 7]);

    pub const fn new(l: i32, m: i32, t: i32, i: i32, th: i32, n: i32, j: i32) -> Self {
        Dimension([l, m, t, i, th, n, j])
    }

    pub fn is_dimensionless(&self) -> bool {
        *self == Self::DIMENSIONLESS
    }
}

impl Add for Dimension {
    type Output = Dimension;
    fn add(self, rhs: Dimension) -> Dimension {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0).for_each(|(a, b)| *a += b);
        Dimension(out)
    }
}

impl Neg for Dimension {
    type Output = Dimension;
    fn neg(self) -> Dimension {
        Dimension(self.0.map(|e| -e))
    }
}

impl Sub for Dimension {
    type Output = Dimension;
    fn sub(self, rhs: Dimension) -> Dimension {
        self + -rhs
    }
}

impl Mul<i32> for Dimension {
    type Output = Dimension;
    fn mul(self, k: i32) -> Dimension {
        Dimension(self.0.map(|e| e * k))
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_dimensionless() {
            return f.write_str("1");
        }
        let symbols = ["L", "M", "T", "I", "Θ", "N", "J"];
        let parts: Vec<String> = symbols
            .iter()
            .zip(self.0)
            .filter(|(_, e)| *e != 0)
            .map(|(s, e)| if e == 1 { s.to_string() } else { format!("{s}^{e}") })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Registry of recognized unit atoms and their base dimensions.
pub const ATOMS: &[(&str, Dimension)] = &[
    ("m", Dimension::new(1, 0, 0, 0, 0, 0, 0)),
    ("kg", Dimension::new(0, 1, 0, 0, 0, 0, 0)),
    ("s", Dimension::new(0, 0, 1, 0, 0, 0, 0)),
    ("A", Dimension::new(0, 0, 0, 1, 0, 0, 0)),
    ("K", Dimension::new(0, 0, 0, 0, 1, 0, 0)),
    ("celsius", Dimension::new(0, 0, 0, 0, 1, 0, 0)),
    ("mol", Dimension::new(0, 0, 0, 0, 0, 1, 0)),
    ("cd", Dimension::new(0, 0, 0, 0, 0, 0, 1)),
    ("rad", Dimension::DIMENSIONLESS),
    ("sr", Dimension::DIMENSIONLESS),
    ("Hz", Dimension::new(0, 0, -1, 0, 0, 0, 0)),
    ("N", Dimension::new(1, 1, -2, 0, 0, 0, 0)),
    ("Pa", Dimension::new(-1, 1, -2, 0, 0, 0, 0)),
    ("J", Dimension::new(2, 1, -2, 0, 0, 0, 0)),
    ("W", Dimension::new(2, 1, -3, 0, 0, 0, 0)),
    ("V", Dimension::new(2, 1, -3, -1, 0, 0, 0)),
    ("ohm", Dimension::new(2, 1, -3, -2, 0, 0, 0)),
    ("C", Dimension::new(0, 0, 1, 1, 0, 0, 0)),
    ("T", Dimension::new(0, 1, -2, -1, 0, 0, 0)),
    ("lm", Dimension::new(0, 0, 0, 0, 0, 0, 1)),
    ("lx", Dimension::new(-2, 0, 0, 0, 0, 0, 1)),
    ("percent", Dimension::DIMENSIONLESS),
];

pub const DIMENSIONLESS: &str = "dimensionless";

pub fn atom_dimension(atom: &str) -> Option<Dimension> {
    ATOMS.iter().find(|(name, _)| *name == atom).map(|(_, d)| *d)
}

/// A product of unit atoms with nonzero integer exponents, kept in order of
/// first appearance. The empty product is `dimensionless`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UnitExpr {
    terms: Vec<(&'static str, i32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UnitError {
    #[error("unknown unit atom `{0}`")]
    UnknownAtom(String),
    #[error("malformed unit expression `{0}`")]
    MalformedExpression(String),
}

impl UnitExpr {
    pub fn dimensionless() -> Self {
        UnitExpr::default()
    }

    pub fn atom(name: &str) -> Result<Self, UnitError> {
        let mut out = UnitExpr::default();
        out.push(intern(name)?, 1);
        Ok(out)
    }

    pub fn terms(&self) -> &[(&'static str, i32)] {
        &self.terms
    }

    pub fn exponent(&self, atom: &str) -> i32 {
        self.terms.iter().find(|(a, _)| *a == atom).map_or(0, |(_, e)| *e)
    }

    fn push(&mut self, atom: &'static str, exponent: i32) {
        match self.terms.iter().position(|(a, _)| *a == atom) {
            Some(i) => {
                self.terms[i].1 += exponent;
                if self.terms[i].1 == 0 {
                    self.terms.remove(i);
                }
            }
            None if exponent != 0 => self.terms.push((atom, exponent)),
            None => {}
        }
    }

    pub fn powi(&self, k: i32) -> UnitExpr {
        let mut out = UnitExpr::default();
        for &(a, e) in &self.terms {
            out.push(a, e * k);
        }
        out
    }
}

impl Mul for &UnitExpr {
    type Output = UnitExpr;
    fn mul(self, rhs: &UnitExpr) -> UnitExpr {
        let mut out = self.clone();
        for &(a, e) in &rhs.terms {
            out.push(a, e);
        }
        out
    }
}

impl std::ops::Div for &UnitExpr {
    type Output = UnitExpr;
    fn div(self, rhs: &UnitExpr) -> UnitExpr {
        self * &rhs.powi(-1)
    }
}

impl fmt::Display for UnitExpr {
    /// Renders so that [`parse_unit`] reproduces the same term order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str(DIMENSIONLESS);
        }
        for (i, &(atom, exp)) in self.terms.iter().enumerate() {
            let (sep, shown) = match (i, exp) {
                (0, e) => ("", e),
                (_, e) if e > 0 => ("*", e),
                (_, e) => ("/", -e),
            };
            f.write_str(sep)?;
            f.write_str(atom)?;
            if shown != 1 {
                write!(f, "^{shown}")?;
            }
        }
        Ok(())
    }
}

fn intern(name: &str) -> Result<&'static str, UnitError> {
    ATOMS
        .iter()
        .find(|(a, _)| *a == name)
        .map(|(a, _)| *a)
        .ok_or_else(|| UnitError::UnknownAtom(name.to_string()))
}

/// Parses `atom (("*"|"/") atom)*` where each atom may carry `^<int>`.
/// Operators associate to the left.
pub fn parse_unit(text: &str) -> Result<UnitExpr, UnitError> {
    let malformed = || UnitError::MalformedExpression(text.to_string());
    if text == DIMENSIONLESS {
        return Ok(UnitExpr::dimensionless());
    }
    let bytes = text.as_bytes();
    let mut out = UnitExpr::default();
    let mut pos = 0;
    let mut sign = 1;
    loop {
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
            pos += 1;
        }
        if start == pos {
            return Err(malformed());
        }
        let name = &text[start..pos];
        if name == DIMENSIONLESS {
            // only valid as the whole expression
            return Err(malformed());
        }
        let atom = intern(name)?;
        let mut exponent = 1;
        if pos < bytes.len() && bytes[pos] == b'^' {
            pos += 1;
            let num_start = pos;
            if pos < bytes.len() && bytes[pos] == b'-' {
                pos += 1;
            }
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            exponent = text[num_start..pos].parse::<i32>().map_err(|_| malformed())?;
            if exponent == 0 {
                return Err(malformed());
            }
        }
        out.push(atom, sign * exponent);
        match bytes.get(pos) {
            None => return Ok(out),
            Some(b'*') => sign = 1,
            Some(b'/') => sign = -1,
            Some(_) => return Err(malformed()),
        }
        pos += 1;
    }
}

/// Sums atom dimensions weighted by their exponents.
pub fn dimension_of(unit: &UnitExpr) -> Dimension {
    unit.terms.iter().fold(Dimension::DIMENSIONLESS, |acc, &(atom, exp)| {
        acc + atom_dimension(atom).expect("atoms are interned from the registry") * exp
    })
}

/// One finding per numeric field or parameter without a unit, per unit that
/// does not parse, and per non-numeric field declaring a non-trivial unit.
pub fn check_units(model: &ComponentModel) -> Vec<Finding> {
    let mut out = Vec::new();
    for element in &model.elements {
        if element.kind != ElementKind::Parameter {
            continue;
        }
        if let Some(param) = &element.param {
            check_one(
                &element.name,
                param.ty.is_numeric(),
                param.unit.as_deref(),
                Locus::Unit { owner: element.name.clone() },
                &mut out,
            );
        }
    }
    for schema in &model.schemas {
        out.extend(check_schema_units(schema));
    }
    out
}

pub fn check_schema_units(schema: &Schema) -> Vec<Finding> {
    let mut out = Vec::new();
    for (section, record) in schema.sections() {
        for field in &record.fields {
            let field_path = if section.is_empty() { field.name.clone() } else { format!("{section}.{}", field.name) };
            let subject = format!("{}.{field_path}", schema.name());
            let numeric = field.field_type.is_numeric();
            if matches!(field.field_type, FieldType::Nested { .. }) && field.unit.is_none() {
                continue;
            }
            check_one(&subject, numeric, field.unit.as_deref(), Locus::Unit { owner: subject.clone() }, &mut out);
        }
    }
    out
}

fn check_one(subject: &str, numeric: bool, unit: Option<&str>, locus: Locus, out: &mut Vec<Finding>) {
    match unit {
        None if numeric => out.push(Finding::new(Code::E_MISSING_UNIT, subject, "numeric value declares no unit", locus)),
        None => {}
        Some(text) => match parse_unit(text) {
            Err(err) => out.push(Finding::new(Code::E_UNKNOWN_UNIT, subject, err.to_string(), locus)),
            Ok(_) if !numeric && text != DIMENSIONLESS => out.push(Finding::new(
                Code::E_NON_NUMERIC_UNIT,
                subject,
                format!("non-numeric value must be dimensionless, found `{text}`"),
                locus,
            )),
            Ok(_) => {}
        },
    }
}
