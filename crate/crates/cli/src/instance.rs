//! Plain-text instance files.
//!
//! ```text
//! hopx-instance v1
//! # comments and blank lines are ignored
//! kind: quadratic
//! p: 2
//! sigma: 1
//! n: 2
//! seed: 7
//! m: 4
//! c:
//! 1.0000000000000000e0 -2.5000000000000000e-1
//! A:
//! 2.0000000000000000e0 0.0000000000000000e0
//! 0.0000000000000000e0 1.0000000000000000e0
//! b:
//! 1.0000000000000000e0 0.0000000000000000e0
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! `f64`. A block's values may span any number of lines. `quadratic` needs
//! `A` and `b`, `linear` needs `a` and `point` needs `b`; `l1` has no data.

use std::fmt::Write as _;
use std::path::Path;

use hopx_core::{CatalogFunction, L1Norm, LinearFunction, PointIndicator, QuadraticFunction, Vector};
use nalgebra::DMatrix;

use crate::error::CliError;

pub const HEADER: &str = "hopx-instance v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Quadratic,
    L1,
    Linear,
    Point,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Quadratic => "quadratic",
            Kind::L1 => "l1",
            Kind::Linear => "linear",
            Kind::Point => "point",
        }
    }

    fn from_name(s: &str) -> Option<Self> {
        [Kind::Quadratic, Kind::L1, Kind::Linear, Kind::Point]
            .into_iter()
            .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceData {
    Quadratic { a: DMatrix<f64>, b: Vector },
    L1,
    Linear { a: Vector },
    Point { b: Vector },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub p: f64,
    pub sigma: f64,
    pub c: Vector,
    pub seed: Option<u64>,
    pub m: Option<usize>,
    pub data: InstanceData,
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self.data {
            InstanceData::Quadratic { .. } => Kind::Quadratic,
            InstanceData::L1 => Kind::L1,
            InstanceData::Linear { .. } => Kind::Linear,
            InstanceData::Point { .. } => Kind::Point,
        }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn function(&self) -> Result<CatalogFunction, CliError> {
        Ok(match &self.data {
            InstanceData::Quadratic { a, b } => QuadraticFunction::new(a.clone(), b.clone())?.into(),
            InstanceData::L1 => L1Norm::new(self.n()).into(),
            InstanceData::Linear { a } => LinearFunction::new(a.clone())?.into(),
            InstanceData::Point { b } => PointIndicator::new(b.clone())?.into(),
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{HEADER}").unwrap();
        writeln!(s, "kind: {}", self.kind().name()).unwrap();
        writeln!(s, "p: {}", num(self.p)).unwrap();
        writeln!(s, "sigma: {}", num(self.sigma)).unwrap();
        writeln!(s, "n: {}", self.n()).unwrap();
        if let Some(seed) = self.seed {
            writeln!(s, "seed: {seed}").unwrap();
        }
        if let Some(m) = self.m {
            writeln!(s, "m: {m}").unwrap();
        }
        write_vector(&mut s, "c", &self.c);
        match &self.data {
            InstanceData::Quadratic { a, b } => {
                writeln!(s, "A:").unwrap();
                for row in a.row_iter() {
                    let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
                    writeln!(s, "{}", cells.join(" ")).unwrap();
                }
                write_vector(&mut s, "b", b);
            }
            InstanceData::L1 => {}
            InstanceData::Linear { a } => write_vector(&mut s, "a", a),
            InstanceData::Point { b } => write_vector(&mut s, "b", b),
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_text()).map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        Parser::default().run(text)
    }
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_vector(s: &mut String, label: &str, v: &Vector) {
    writeln!(s, "{label}:").unwrap();
    let cells: Vec<String> = v.iter().map(|&x| num(x)).collect();
    writeln!(s, "{}", cells.join(" ")).unwrap();
}

fn perr(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}

struct Block {
    label: String,
    start: usize,
    values: Vec<f64>,
}

#[derive(Default)]
struct Parser {
    kind: Option<Kind>,
    p: Option<f64>,
    sigma: Option<f64>,
    n: Option<usize>,
    seed: Option<u64>,
    m: Option<usize>,
    blocks: Vec<Block>,
}

impl Parser {
    fn expected_len(&self, label: &str, line: usize) -> Result<usize, CliError> {
        let n = self
            .n
            .ok_or_else(|| perr(line, format!("block '{label}:' before 'n:'")))?;
        Ok(if label == "A" { n * n } else { n })
    }

    fn run(mut self, text: &str) -> Result<Instance, CliError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            _ => return Err(perr(1, format!("expected header '{HEADER}'"))),
        }

        let mut open: Option<(Block, usize)> = None;
        let mut last_line = 1;
        for (no, raw) in lines {
            last_line = no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((mut block, want)) = open.take() {
                for tok in line.split_whitespace() {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| perr(no, format!("'{tok}' is not a number in block '{}:'", block.label)))?;
                    if !v.is_finite() {
                        return Err(perr(no, format!("non-finite value '{tok}'")));
                    }
                    block.values.push(v);
                }
                if block.values.len() > want {
                    return Err(perr(
                        no,
                        format!("block '{}:' has more than {want} values", block.label),
                    ));
                }
                if block.values.len() == want {
                    self.blocks.push(block);
                } else {
                    open = Some((block, want));
                }
                continue;
            }

            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| perr(no, format!("expected 'key: value', found '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "c" | "A" | "b" | "a" => {
                    if !value.is_empty() {
                        return Err(perr(no, format!("values of block '{key}:' start on the next line")));
                    }
                    if self.blocks.iter().any(|b| b.label == key) {
                        return Err(perr(no, format!("duplicate block '{key}:'")));
                    }
                    let want = self.expected_len(key, no)?;
                    let block = Block {
                        label: key.to_string(),
                        start: no,
                        values: Vec::with_capacity(want),
                    };
                    if want == 0 {
                        self.blocks.push(block);
                    } else {
                        open = Some((block, want));
                    }
                }
                "kind" => {
                    self.kind = Some(Kind::from_name(value).ok_or_else(|| perr(no, format!("unknown kind '{value}'")))?)
                }
                "p" => self.p = Some(parse_real(value, no)?),
                "sigma" => self.sigma = Some(parse_real(value, no)?),
                "n" => self.n = Some(value.parse().map_err(|_| perr(no, format!("bad n '{value}'")))?),
                "seed" => self.seed = Some(value.parse().map_err(|_| perr(no, format!("bad seed '{value}'")))?),
                "m" => self.m = Some(value.parse().map_err(|_| perr(no, format!("bad m '{value}'")))?),
                other => return Err(perr(no, format!("unknown key '{other}'"))),
            }
        }
        if let Some((block, want)) = open {
            return Err(perr(
                last_line,
                format!(
                    "block '{}:' starting at line {} has {} of {want} values",
                    block.label,
                    block.start,
                    block.values.len()
                ),
            ));
        }
        self.finish(last_line)
    }

    fn take(&mut self, label: &str, line: usize) -> Result<Vec<f64>, CliError> {
        let pos = self
            .blocks
            .iter()
            .position(|b| b.label == label)
            .ok_or_else(|| perr(line, format!("missing block '{label}:'")))?;
        Ok(self.blocks.remove(pos).values)
    }

    fn finish(mut self, line: usize) -> Result<Instance, CliError> {
        let kind = self.kind.ok_or_else(|| perr(line, "missing 'kind:'"))?;
        let p = self.p.ok_or_else(|| perr(line, "missing 'p:'"))?;
        let sigma = self.sigma.ok_or_else(|| perr(line, "missing 'sigma:'"))?;
        let n = self.n.ok_or_else(|| perr(line, "missing 'n:'"))?;
        if n == 0 {
            return Err(perr(line, "n must be >= 1"));
        }
        if !(p >= 1.0) || !(sigma > 0.0) {
            return Err(perr(
                line,
                format!("need p >= 1 and sigma > 0, got p = {p}, sigma = {sigma}"),
            ));
        }
        let c = Vector::from_vec(self.take("c", line)?);
        let data = match kind {
            Kind::Quadratic => {
                let a = DMatrix::from_row_slice(n, n, &self.take("A", line)?);
                InstanceData::Quadratic {
                    a,
                    b: Vector::from_vec(self.take("b", line)?),
                }
            }
            Kind::L1 => InstanceData::L1,
            Kind::Linear => InstanceData::Linear {
                a: Vector::from_vec(self.take("a", line)?),
            },
            Kind::Point => InstanceData::Point {
                b: Vector::from_vec(self.take("b", line)?),
            },
        };
        if let Some(extra) = self.blocks.first() {
            return Err(perr(
                extra.start,
                format!("block '{}:' does not belong to kind {}", extra.label, kind.name()),
            ));
        }
        Ok(Instance {
            p,
            sigma,
            c,
            seed: self.seed,
            m: self.m,
            data,
        })
    }
}

fn parse_real(value: &str, line: usize) -> Result<f64, CliError> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(perr(line, format!("'{value}' is not a finite number"))),
    }
}

/// Reads whitespace-separated numbers, e.g. a starting dual vector.
pub fn read_vector(path: &Path, n: usize) -> Result<Vector, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut values = Vec::with_capacity(n);
    for (i, line) in text.lines().enumerate() {
        for tok in line.split('#').next().unwrap_or("").split_whitespace() {
            values.push(parse_real(tok, i + 1)?);
        }
    }
    if values.len() != n {
        return Err(CliError::Usage(format!(
            "{} holds {} values, expected {n}",
            path.display(),
            values.len()
        )));
    }
    Ok(Vector::from_vec(values))
}
