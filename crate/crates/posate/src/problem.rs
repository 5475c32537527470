//! Line-oriented problem files: variable declarations, cone kind and
//! generators, the target polynomial, and optional sections for
//! varieties, ideals, samples, faces, decompositions, witness settings,
//! and numeric options. Validation errors carry line numbers.

use crate::cone::{ConeKind, GeneratorSet};
use crate::poly::{Point, Polynomial, Rat};
use num::BigInt;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ProblemError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ProblemError> {
    Err(ProblemError {
        line,
        message: message.into(),
    })
}

/// Numeric knobs with their documented defaults.
#[derive(Debug, Clone, PartialEq)]
#[derive(Default)]
pub struct Options {
    pub max_degree: Option<u32>,
    pub basis_cap: Option<usize>,
    pub grid_density: Option<u32>,
    pub epsilon: Option<Rat>,
    pub assert_lci: bool,
}


/// Settings for derivative-functional refutation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WitnessSection {
    pub generator: Option<usize>,
    pub point: Option<Point>,
    pub assert_hypotheses: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub names: Vec<String>,
    pub kind: ConeKind,
    pub generators: Vec<Polynomial>,
    pub module_generators: Vec<Polynomial>,
    pub target: Polynomial,
    /// Variety generators plus the declared dimension of the variety.
    pub variety: Option<(Vec<Polynomial>, usize)>,
    /// Constraint-ideal generators.
    pub ideal: Vec<Polynomial>,
    pub samples: Vec<Point>,
    /// Indices of the generators cut to zero on the face.
    pub face_active: Vec<usize>,
    /// (weight, member) pairs of a declared decomposition.
    pub decomposition: Vec<(Polynomial, Polynomial)>,
    pub witness: WitnessSection,
    pub options: Options,
}

impl ProblemFile {
    pub fn generator_set(&self) -> Result<GeneratorSet, crate::cone::ConeError> {
        GeneratorSet::new(
            self.kind,
            self.generators.clone(),
            self.module_generators.clone(),
        )
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }
}

fn parse_rat(s: &str, line: usize) -> Result<Rat, ProblemError> {
    let int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| ProblemError {
            line,
            message: format!("bad rational `{s}`"),
        })
    };
    match s.split_once('/') {
        Some((p, q)) => Ok(Rat::new(int(p)?, int(q)?)),
        None => Ok(Rat::from_integer(int(s)?)),
    }
}

fn parse_point(s: &str, dim: usize, line: usize) -> Result<Point, ProblemError> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or(ProblemError {
            line,
            message: format!("expected a point `(a, b, …)`, got `{s}`"),
        })?;
    let coords: Vec<Rat> = inner
        .split(',')
        .map(|c| parse_rat(c, line))
        .collect::<Result<_, _>>()?;
    if coords.len() != dim {
        return err(line, format!("point has {} coordinates, expected {dim}", coords.len()));
    }
    Ok(Point::new(coords))
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Vars,
        Kind,
        Generators,
        ModuleGenerators,
        Target,
        Variety,
        Ideal,
        Samples,
        Face,
        Decomposition,
        Witness,
        Options,
    }
    let mut section = Section::None;
    let mut names: Vec<String> = Vec::new();
    let mut kind: Option<(ConeKind, usize)> = None;
    let mut generators: Vec<Polynomial> = Vec::new();
    let mut module_generators: Vec<Polynomial> = Vec::new();
    let mut target: Option<Polynomial> = None;
    let mut variety_gens: Vec<Polynomial> = Vec::new();
    let mut variety_dim: Option<usize> = None;
    let mut saw_variety = false;
    let mut ideal: Vec<Polynomial> = Vec::new();
    let mut samples: Vec<Point> = Vec::new();
    let mut face_active: Vec<usize> = Vec::new();
    let mut decomposition: Vec<(Polynomial, Polynomial)> = Vec::new();
    let mut witness = WitnessSection::default();
    let mut options = Options::default();

    let parse_poly = |s: &str, names: &[String], line: usize| {
        Polynomial::parse(s, names).map_err(|e| ProblemError {
            line,
            message: e.to_string(),
        })
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = match name {
                "vars" => Section::Vars,
                "kind" => Section::Kind,
                "generators" => Section::Generators,
                "module-generators" => Section::ModuleGenerators,
                "target" => Section::Target,
                "variety" => {
                    saw_variety = true;
                    Section::Variety
                }
                "ideal" => Section::Ideal,
                "samples" => Section::Samples,
                "face" => Section::Face,
                "decomposition" => Section::Decomposition,
                "witness" => Section::Witness,
                "options" => Section::Options,
                other => return err(line_no, format!("unknown section `[{other}]`")),
            };
            continue;
        }
        match section {
            Section::None => return err(line_no, "content before the first section header"),
            Section::Vars => {
                for tok in line.split_whitespace() {
                    if names.iter().any(|n| n == tok) {
                        return err(line_no, format!("duplicate variable `{tok}`"));
                    }
                    names.push(tok.to_string());
                }
            }
            Section::Kind => {
                if kind.is_some() {
                    return err(line_no, "duplicate cone kind");
                }
                let k = ConeKind::from_str(line)
                    .map_err(|e| ProblemError { line: line_no, message: e.to_string() })?;
                kind = Some((k, line_no));
            }
            Section::Generators => generators.push(parse_poly(line, &names, line_no)?),
            Section::ModuleGenerators => {
                module_generators.push(parse_poly(line, &names, line_no)?)
            }
            Section::Target => {
                if target.is_some() {
                    return err(line_no, "duplicate target");
                }
                target = Some(parse_poly(line, &names, line_no)?);
            }
            Section::Variety => {
                if let Some(v) = line.strip_prefix("dim") {
                    let v = v.trim_start().strip_prefix('=').map(str::trim).ok_or(
                        ProblemError {
                            line: line_no,
                            message: "expected `dim = <integer>`".into(),
                        },
                    )?;
                    variety_dim = Some(v.parse().map_err(|_| ProblemError {
                        line: line_no,
                        message: format!("bad variety dimension `{v}`"),
                    })?);
                } else {
                    variety_gens.push(parse_poly(line, &names, line_no)?);
                }
            }
            Section::Ideal => ideal.push(parse_poly(line, &names, line_no)?),
            Section::Samples => samples.push(parse_point(line, names.len(), line_no)?),
            Section::Face => {
                let v = line.strip_prefix("active").and_then(|l| {
                    l.trim_start().strip_prefix('=')
                });
                match v {
                    Some(rest) => {
                        for tok in rest.split_whitespace() {
                            let i: usize = tok.parse().map_err(|_| ProblemError {
                                line: line_no,
                                message: format!("bad generator index `{tok}`"),
                            })?;
                            face_active.push(i);
                        }
                    }
                    None => return err(line_no, "expected `active = <indices>`"),
                }
            }
            Section::Decomposition => {
                let (w, s) = line.split_once('|').ok_or(ProblemError {
                    line: line_no,
                    message: "expected `weight | member`".into(),
                })?;
                decomposition
                    .push((parse_poly(w, &names, line_no)?, parse_poly(s, &names, line_no)?));
            }
            Section::Witness => {
                let (k, v) = line.split_once('=').ok_or(ProblemError {
                    line: line_no,
                    message: "expected `key = value`".into(),
                })?;
                let v = v.trim();
                match k.trim() {
                    "generator" => {
                        witness.generator = Some(v.parse().map_err(|_| ProblemError {
                            line: line_no,
                            message: format!("bad generator index `{v}`"),
                        })?)
                    }
                    "point" => witness.point = Some(parse_point(v, names.len(), line_no)?),
                    "assert-hypotheses" => {
                        witness.assert_hypotheses = parse_bool(v, line_no)?
                    }
                    other => return err(line_no, format!("unknown witness key `{other}`")),
                }
            }
            Section::Options => {
                let (k, v) = line.split_once('=').ok_or(ProblemError {
                    line: line_no,
                    message: "expected `key = value`".into(),
                })?;
                let v = v.trim();
                let uint = |v: &str| -> Result<u64, ProblemError> {
                    v.parse().map_err(|_| ProblemError {
                        line: line_no,
                        message: format!("bad integer `{v}`"),
                    })
                };
                match k.trim() {
                    "max-degree" => options.max_degree = Some(uint(v)? as u32),
                    "basis-cap" => options.basis_cap = Some(uint(v)? as usize),
                    "grid-density" => options.grid_density = Some(uint(v)? as u32),
                    "epsilon" => options.epsilon = Some(parse_rat(v, line_no)?),
                    "assert-lci" => options.assert_lci = parse_bool(v, line_no)?,
                    other => return err(line_no, format!("unknown option `{other}`")),
                }
            }
        }
    }

    if names.is_empty() {
        return err(0, "missing [vars] section");
    }
    let (kind, kind_line) = kind.ok_or(ProblemError {
        line: 0,
        message: "missing [kind] section".into(),
    })?;
    if generators.is_empty() {
        return err(0, "missing [generators] section");
    }
    let target = target.ok_or(ProblemError {
        line: 0,
        message: "missing [target] section".into(),
    })?;
    if kind != ConeKind::SemiringModule && !module_generators.is_empty() {
        return err(kind_line, "module generators require the semiring-module kind");
    }
    for &i in &face_active {
        if i >= generators.len() {
            return err(0, format!("face index {i} out of range"));
        }
    }
    let variety = if saw_variety {
        if variety_gens.is_empty() {
            return err(0, "[variety] section lists no generators");
        }
        let d = variety_dim.ok_or(ProblemError {
            line: 0,
            message: "[variety] section is missing `dim = <integer>`".into(),
        })?;
        if d >= names.len() {
            return err(0, format!("declared variety dimension {d} is not below {}", names.len()));
        }
        Some((variety_gens, d))
    } else {
        None
    };
    Ok(ProblemFile {
        names,
        kind,
        generators,
        module_generators,
        target,
        variety,
        ideal,
        samples,
        face_active,
        decomposition,
        witness,
        options,
    })
}

fn parse_bool(v: &str, line: usize) -> Result<bool, ProblemError> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        other => err(line, format!("expected true/false, got `{other}`")),
    }
}

impl fmt::Display for ProblemFile {
    /// Canonical rendering; parsing it back yields an equal problem.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[vars]")?;
        writeln!(f, "{}", self.names.join(" "))?;
        writeln!(f, "\n[kind]\n{}", self.kind)?;
        writeln!(f, "\n[generators]")?;
        for g in &self.generators {
            writeln!(f, "{}", g.to_string_with(&self.names))?;
        }
        if !self.module_generators.is_empty() {
            writeln!(f, "\n[module-generators]")?;
            for g in &self.module_generators {
                writeln!(f, "{}", g.to_string_with(&self.names))?;
            }
        }
        writeln!(f, "\n[target]\n{}", self.target.to_string_with(&self.names))?;
        if let Some((gens, d)) = &self.variety {
            writeln!(f, "\n[variety]\ndim = {d}")?;
            for g in gens {
                writeln!(f, "{}", g.to_string_with(&self.names))?;
            }
        }
        if !self.ideal.is_empty() {
            writeln!(f, "\n[ideal]")?;
            for g in &self.ideal {
                writeln!(f, "{}", g.to_string_with(&self.names))?;
            }
        }
        if !self.samples.is_empty() {
            writeln!(f, "\n[samples]")?;
            for z in &self.samples {
                writeln!(f, "{z}")?;
            }
        }
        if !self.face_active.is_empty() {
            let idx: Vec<String> = self.face_active.iter().map(|i| i.to_string()).collect();
            writeln!(f, "\n[face]\nactive = {}", idx.join(" "))?;
        }
        if !self.decomposition.is_empty() {
            writeln!(f, "\n[decomposition]")?;
            for (w, s) in &self.decomposition {
                writeln!(
                    f,
                    "{} | {}",
                    w.to_string_with(&self.names),
                    s.to_string_with(&self.names)
                )?;
            }
        }
        if self.witness != WitnessSection::default() {
            writeln!(f, "\n[witness]")?;
            if let Some(g) = self.witness.generator {
                writeln!(f, "generator = {g}")?;
            }
            if let Some(p) = &self.witness.point {
                writeln!(f, "point = {p}")?;
            }
            if self.witness.assert_hypotheses {
                writeln!(f, "assert-hypotheses = true")?;
            }
        }
        if self.options != Options::default() {
            writeln!(f, "\n[options]")?;
            if let Some(v) = self.options.max_degree {
                writeln!(f, "max-degree = {v}")?;
            }
            if let Some(v) = self.options.basis_cap {
                writeln!(f, "basis-cap = {v}")?;
            }
            if let Some(v) = self.options.grid_density {
                writeln!(f, "grid-density = {v}")?;
            }
            if let Some(v) = &self.options.epsilon {
                writeln!(f, "epsilon = {v}")?;
            }
            if self.options.assert_lci {
                writeln!(f, "assert-lci = true")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    const SIMPLEX: &str = "\
[vars]
x1 x2

[kind]
semiring

[generators]
x1
x2
1 - x1 - x2

[target]
x1 + x1 x2

[samples]
(0, 3/4)

[face]
active = 0

[options]
max-degree = 4
";

    #[test]
    fn parse_simplex_file() {
        let p = parse_problem(SIMPLEX).unwrap();
        assert_eq!(p.names, vec!["x1", "x2"]);
        assert_eq!(p.kind, ConeKind::Semiring);
        assert_eq!(p.generators.len(), 3);
        assert_eq!(p.samples, vec![Point::new(vec![int(0), rat(3, 4)])]);
        assert_eq!(p.face_active, vec![0]);
        assert_eq!(p.options.max_degree, Some(4));
    }

    #[test]
    fn display_round_trips() {
        let p = parse_problem(SIMPLEX).unwrap();
        let q = parse_problem(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = SIMPLEX.replace("1 - x1 - x2", "1 - x1 - x3");
        let e = parse_problem(&bad).unwrap_err();
        assert_eq!(e.line, 10);
        assert!(e.message.contains("x3"));

        let e2 = parse_problem("[vars]\nx\n[what]\n").unwrap_err();
        assert_eq!(e2.line, 3);
    }

    #[test]
    fn missing_sections_rejected() {
        assert!(parse_problem("[vars]\nx\n").is_err());
        let no_target = "[vars]\nx\n[kind]\nsemiring\n[generators]\nx\n";
        let e = parse_problem(no_target).unwrap_err();
        assert!(e.message.contains("target"));
    }

    #[test]
    fn witness_and_variety_sections() {
        let text = "\
[vars]
x y

[kind]
quadratic-module

[generators]
x
y
1 - x - y

[target]
x y

[variety]
dim = 1
x

[witness]
generator = 0
point = (0, -1)
assert-hypotheses = true
";
        let p = parse_problem(text).unwrap();
        assert_eq!(p.witness.generator, Some(0));
        assert_eq!(p.witness.point, Some(Point::new(vec![int(0), int(-1)])));
        assert!(p.witness.assert_hypotheses);
        let (vg, d) = p.variety.unwrap();
        assert_eq!(vg.len(), 1);
        assert_eq!(d, 1);
    }
}
