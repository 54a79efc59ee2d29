//! Run configuration: a line-oriented `key = value` format with nested blocks.
//!
//! ```text
//! # comments run to the end of the line
//! forcing {
//!     family = plateau
//!     a = 2
//! }
//! mesh {
//!     kind = interval
//!     n = 256
//! }
//! ```
//!
//! Every statement sits on its own line: `key = value`, `name {` or `}`.
//! Unknown keys and blocks are rejected, and so are repeated keys.

use std::fmt::{self, Write as _};

use flatsol_core::families;
use flatsol_core::maxprinciple::{CompactSet, CompactShape, NdForcing};
use flatsol_core::{ForcingPiece, Mesh, PieceKind, PiecewiseForcing, ScalarField};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ConfigError { line: Some(line), message: message.into() }
    }

    pub fn new(message: impl Into<String>) -> Self {
        ConfigError { line: None, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Value { key: String, value: String, line: usize },
    Block { name: String, body: Block, line: usize },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub entries: Vec<Entry>,
}

/// Parses the raw syntax tree; no schema checks.
pub fn parse(text: &str) -> Result<Block> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut pos = 0;
    let block = parse_block(&lines, &mut pos, None)?;
    Ok(block)
}

fn parse_block(lines: &[(usize, &str)], pos: &mut usize, opened: Option<usize>) -> Result<Block> {
    let mut entries = Vec::new();
    while *pos < lines.len() {
        let (no, line) = lines[*pos];
        *pos += 1;
        if line == "}" {
            return match opened {
                Some(_) => Ok(Block { entries }),
                None => Err(ConfigError::at(no, "unmatched '}'")),
            };
        }
        if let Some(name) = line.strip_suffix('{') {
            let name = name.trim();
            if !is_ident(name) {
                return Err(ConfigError::at(no, format!("bad block name '{name}'")));
            }
            let body = parse_block(lines, pos, Some(no))?;
            entries.push(Entry::Block { name: name.to_string(), body, line: no });
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::at(no, format!("expected 'key = value', 'name {{' or '}}', got '{line}'")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !is_ident(key) {
            return Err(ConfigError::at(no, format!("bad key '{key}'")));
        }
        if value.is_empty() {
            return Err(ConfigError::at(no, format!("missing value for '{key}'")));
        }
        entries.push(Entry::Value { key: key.to_string(), value: value.to_string(), line: no });
    }
    match opened {
        Some(l) => Err(ConfigError::at(l, "block is never closed")),
        None => Ok(Block { entries }),
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Schema reader over one block: every entry must be consumed exactly once.
struct Fields<'a> {
    what: &'a str,
    entries: &'a [Entry],
    used: Vec<bool>,
}

impl<'a> Fields<'a> {
    fn new(what: &'a str, block: &'a Block) -> Result<Self> {
        let mut seen: Vec<&str> = Vec::new();
        for e in &block.entries {
            let (name, line) = match e {
                Entry::Value { key, line, .. } => (key.as_str(), *line),
                Entry::Block { name, line, .. } if name == "piece" => continue,
                Entry::Block { name, line, .. } => (name.as_str(), *line),
            };
            if seen.contains(&name) {
                return Err(ConfigError::at(line, format!("'{name}' given twice in {what}")));
            }
            seen.push(name);
        }
        Ok(Fields { what, entries: &block.entries, used: vec![false; block.entries.len()] })
    }

    fn raw(&mut self, key: &str) -> Option<(&'a str, usize)> {
        for (i, e) in self.entries.iter().enumerate() {
            if let Entry::Value { key: k, value, line } = e {
                if k == key {
                    self.used[i] = true;
                    return Some((value.as_str(), *line));
                }
            }
        }
        None
    }

    fn block(&mut self, name: &str) -> Option<(&'a Block, usize)> {
        self.blocks(name).into_iter().next()
    }

    fn blocks(&mut self, name: &str) -> Vec<(&'a Block, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.entries.iter().enumerate() {
            if let Entry::Block { name: n, body, line } = e {
                if n == name {
                    self.used[i] = true;
                    out.push((body, *line));
                }
            }
        }
        out
    }

    fn text(&mut self, key: &str) -> Option<&'a str> {
        self.raw(key).map(|(v, _)| v)
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => parse_number(v).map(Some).ok_or_else(|| ConfigError::at(line, format!("'{key}' needs a finite number, got '{v}'"))),
        }
    }

    fn numbers(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split_whitespace()
                .map(|t| parse_number(t).ok_or_else(|| ConfigError::at(line, format!("'{key}': '{t}' is not a finite number"))))
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>> {
        match self.raw(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| ConfigError::at(line, format!("'{key}' needs a non-negative integer, got '{v}'"))),
        }
    }

    fn finish(self) -> Result<()> {
        for (e, used) in self.entries.iter().zip(&self.used) {
            if !used {
                let (name, line) = match e {
                    Entry::Value { key, line, .. } => (key, *line),
                    Entry::Block { name, line, .. } => (name, *line),
                };
                return Err(ConfigError::at(line, format!("unknown key '{name}' in {}", self.what)));
            }
        }
        Ok(())
    }
}

fn required(f: &mut Fields, key: &str, shape: &str) -> Result<f64> {
    f.number(key)?.ok_or_else(|| ConfigError::new(format!("compact {shape} needs '{key}'")))
}

fn parse_number(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Named forcing families and their parameters with defaults.
const FAMILIES: &[(&str, &[(&str, f64)])] = &[
    ("zero", &[("lo", -1.0), ("hi", 1.0)]),
    ("plateau", &[("a", 2.0)]),
    ("plateau-unit", &[("a", 2.0)]),
    ("reversed-plateau", &[("a", 4.0)]),
    ("dead-band", &[("a", 2.0 + std::f64::consts::SQRT_2), ("b", 0.5)]),
    ("cubic-dead-core", &[("b", 0.5)]),
    ("affine", &[("a", 3.0)]),
    ("power-law", &[("radius", 1.0), ("r0", 0.5), ("f-plus", 1.0), ("c", 0.1), ("beta", 0.5)]),
];

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSpec {
    Family { name: String, params: Vec<(String, f64)> },
    Pieces { domain: (f64, f64), pieces: Vec<ForcingPiece> },
}

impl ForcingSpec {
    pub fn build(&self) -> flatsol_core::Result<PiecewiseForcing> {
        match self {
            ForcingSpec::Pieces { domain, pieces } => PiecewiseForcing::new(*domain, pieces.clone()),
            ForcingSpec::Family { name, params } => {
                let p = |k: &str| params.iter().find(|(n, _)| n == k).map(|(_, v)| *v).unwrap_or(f64::NAN);
                match name.as_str() {
                    "zero" => PiecewiseForcing::zero((p("lo"), p("hi"))),
                    "plateau" => families::plateau(p("a")),
                    "plateau-unit" => families::plateau_unit(p("a")),
                    "reversed-plateau" => families::reversed_plateau(p("a")),
                    "dead-band" => families::dead_band(p("a"), p("b")),
                    "cubic-dead-core" => families::cubic_dead_core(p("b")),
                    "affine" => families::affine(p("a")),
                    "power-law" => families::power_law(p("radius"), p("r0"), p("f-plus"), p("c"), p("beta")),
                    _ => unreachable!("family names are validated on parse"),
                }
            }
        }
    }

    fn read(block: &Block) -> Result<Self> {
        let mut f = Fields::new("forcing", block)?;
        let spec = if let Some(name) = f.text("family") {
            let Some((_, defaults)) = FAMILIES.iter().find(|(n, _)| *n == name) else {
                let known: Vec<&str> = FAMILIES.iter().map(|(n, _)| *n).collect();
                return Err(ConfigError::new(format!("unknown forcing family '{name}' (known: {})", known.join(", "))));
            };
            let mut params = Vec::new();
            for (k, d) in defaults.iter() {
                params.push((k.to_string(), f.number(k)?.unwrap_or(*d)));
            }
            ForcingSpec::Family { name: name.to_string(), params }
        } else {
            let domain = match f.numbers("domain")? {
                Some(v) if v.len() == 2 => (v[0], v[1]),
                Some(_) => return Err(ConfigError::new("forcing 'domain' takes two numbers")),
                None => return Err(ConfigError::new("forcing needs 'family' or 'domain' with 'piece' blocks")),
            };
            let mut pieces = Vec::new();
            for (b, line) in f.blocks("piece") {
                pieces.push(read_piece(b, line)?);
            }
            ForcingSpec::Pieces { domain, pieces }
        };
        f.finish()?;
        Ok(spec)
    }

    fn render(&self, out: &mut String) {
        out.push_str("forcing {\n");
        match self {
            ForcingSpec::Family { name, params } => {
                let _ = writeln!(out, "    family = {name}");
                for (k, v) in params {
                    let _ = writeln!(out, "    {k} = {}", num(*v));
                }
            }
            ForcingSpec::Pieces { domain, pieces } => {
                let _ = writeln!(out, "    domain = {} {}", num(domain.0), num(domain.1));
                for p in pieces {
                    out.push_str("    piece {\n");
                    let _ = writeln!(out, "        lo = {}", num(p.lo()));
                    let _ = writeln!(out, "        hi = {}", num(p.hi()));
                    match p.kind() {
                        PieceKind::Constant(v) => {
                            let _ = writeln!(out, "        constant = {}", num(*v));
                        }
                        PieceKind::Polynomial(c) => {
                            let cs: Vec<String> = c.iter().map(|v| num(*v)).collect();
                            let _ = writeln!(out, "        polynomial = {}", cs.join(" "));
                        }
                        PieceKind::PowerSingularity { coeff, beta, pole } => {
                            let _ = writeln!(out, "        power = {} {} {}", num(*coeff), num(*beta), num(*pole));
                        }
                    }
                    out.push_str("    }\n");
                }
            }
        }
        out.push_str("}\n");
    }
}

fn read_piece(block: &Block, line: usize) -> Result<ForcingPiece> {
    let mut f = Fields::new("piece", block)?;
    let lo = f.number("lo")?.ok_or_else(|| ConfigError::at(line, "piece needs 'lo'"))?;
    let hi = f.number("hi")?.ok_or_else(|| ConfigError::at(line, "piece needs 'hi'"))?;
    let constant = f.number("constant")?;
    let poly = f.numbers("polynomial")?;
    let power = f.numbers("power")?;
    f.finish()?;
    let piece = match (constant, poly, power) {
        (Some(c), None, None) => ForcingPiece::constant(lo, hi, c),
        (None, Some(c), None) if !c.is_empty() => ForcingPiece::polynomial(lo, hi, c),
        (None, None, Some(p)) if p.len() == 3 => ForcingPiece::power_singularity(lo, hi, p[0], p[1], p[2]),
        (None, None, Some(_)) => return Err(ConfigError::at(line, "'power' takes coeff, beta and pole")),
        _ => return Err(ConfigError::at(line, "piece needs exactly one of 'constant', 'polynomial' or 'power'")),
    };
    piece.map_err(|e| ConfigError::at(line, e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    Interval,
    Disk,
    Rectangle,
}

impl MeshKind {
    fn name(self) -> &'static str {
        match self {
            MeshKind::Interval => "interval",
            MeshKind::Disk => "disk",
            MeshKind::Rectangle => "rectangle",
        }
    }
}

/// Mesh block. Interval ends and the disk radius follow the forcing domain.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub kind: MeshKind,
    pub n: usize,
    pub dim: u32,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec { kind: MeshKind::Interval, n: 256, dim: 2, ny: 256, lx: 1.0, ly: 1.0 }
    }
}

impl MeshSpec {
    fn read(block: &Block) -> Result<Self> {
        let mut f = Fields::new("mesh", block)?;
        let d = MeshSpec::default();
        let kind = match f.text("kind").unwrap_or("interval") {
            "interval" => MeshKind::Interval,
            "disk" => MeshKind::Disk,
            "rectangle" => MeshKind::Rectangle,
            k => return Err(ConfigError::new(format!("unknown mesh kind '{k}' (interval, disk, rectangle)"))),
        };
        let n = f.count("n")?.unwrap_or(d.n);
        let dim = f.count("dim")?.unwrap_or(d.dim as usize);
        let ny = f.count("ny")?.unwrap_or(n);
        let lx = f.number("lx")?.unwrap_or(d.lx);
        let ly = f.number("ly")?.unwrap_or(d.ly);
        f.finish()?;
        Ok(MeshSpec { kind, n, dim: dim as u32, ny, lx, ly })
    }

    fn render(&self, out: &mut String) {
        out.push_str("mesh {\n");
        let _ = writeln!(out, "    kind = {}", self.kind.name());
        let _ = writeln!(out, "    n = {}", self.n);
        match self.kind {
            MeshKind::Interval => {}
            MeshKind::Disk => {
                let _ = writeln!(out, "    dim = {}", self.dim);
            }
            MeshKind::Rectangle => {
                let _ = writeln!(out, "    ny = {}", self.ny);
                let _ = writeln!(out, "    lx = {}", num(self.lx));
                let _ = writeln!(out, "    ly = {}", num(self.ly));
            }
        }
        out.push_str("}\n");
    }

    /// Builds the mesh; intervals span the forcing domain, disks its right end.
    pub fn build(&self, forcing: &PiecewiseForcing) -> flatsol_core::Result<Mesh> {
        let (lo, hi) = forcing.domain();
        match self.kind {
            MeshKind::Interval => Mesh::interval(lo, hi, self.n),
            MeshKind::Disk => Mesh::radial_disk(self.n, hi, self.dim),
            MeshKind::Rectangle => Mesh::rectangle(self.n, self.ny, self.lx, self.ly),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompactSpec {
    Ball { radius: f64 },
    Segment { lo: f64, hi: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
}

impl CompactSpec {
    fn read(block: &Block) -> Result<Self> {
        let mut f = Fields::new("compact", block)?;
        let shape = f.text("shape").ok_or_else(|| ConfigError::new("compact needs 'shape'"))?;
        let need = |f: &mut Fields, k: &str| required(f, k, shape);
        let spec = match shape {
            "ball" => CompactSpec::Ball { radius: need(&mut f, "radius")? },
            "segment" => CompactSpec::Segment { lo: need(&mut f, "lo")?, hi: need(&mut f, "hi")? },
            "rectangle" => CompactSpec::Rectangle { x0: need(&mut f, "x0")?, x1: need(&mut f, "x1")?, y0: need(&mut f, "y0")?, y1: need(&mut f, "y1")? },
            s => return Err(ConfigError::new(format!("unknown compact shape '{s}' (ball, segment, rectangle)"))),
        };
        f.finish()?;
        Ok(spec)
    }

    fn render(&self, out: &mut String) {
        out.push_str("compact {\n");
        match *self {
            CompactSpec::Ball { radius } => {
                let _ = writeln!(out, "    shape = ball\n    radius = {}", num(radius));
            }
            CompactSpec::Segment { lo, hi } => {
                let _ = writeln!(out, "    shape = segment\n    lo = {}\n    hi = {}", num(lo), num(hi));
            }
            CompactSpec::Rectangle { x0, x1, y0, y1 } => {
                let _ = writeln!(out, "    shape = rectangle\n    x0 = {}\n    x1 = {}\n    y0 = {}\n    y1 = {}", num(x0), num(x1), num(y0), num(y1));
            }
        }
        out.push_str("}\n");
    }

    pub fn build(&self, mesh: &Mesh) -> flatsol_core::Result<CompactSet> {
        let shape = match *self {
            CompactSpec::Ball { radius } => CompactShape::RadialBall { radius },
            CompactSpec::Segment { lo, hi } => CompactShape::Segment { lo, hi },
            CompactSpec::Rectangle { x0, x1, y0, y1 } => CompactShape::SubRectangle { x0, x1, y0, y1 },
        };
        CompactSet::new(mesh, shape)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemilinearSpec {
    pub lambda: f64,
    pub alpha: f64,
}

impl Default for SemilinearSpec {
    fn default() -> Self {
        SemilinearSpec { lambda: 0.0, alpha: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Initial {
    Zero,
    Phi1,
    Phi2,
}

impl Initial {
    fn name(self) -> &'static str {
        match self {
            Initial::Zero => "zero",
            Initial::Phi1 => "phi1",
            Initial::Phi2 => "phi2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicSpec {
    pub initial: Initial,
    pub dt: f64,
    pub theta: f64,
    pub horizon: f64,
    /// Horizon of the homogeneous decay run; zero skips it.
    pub decay_horizon: f64,
}

impl Default for ParabolicSpec {
    fn default() -> Self {
        ParabolicSpec { initial: Initial::Phi2, dt: 1e-4, theta: 0.5, horizon: 4.0, decay_horizon: 1.0 }
    }
}

/// Named numerical tolerances, overridable with `--tol NAME=VAL`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Bisection width for critical parameters.
    pub critical: f64,
    /// Relative tolerance on the fitted decay rate.
    pub decay_rate: f64,
    /// Chebyshev probes for the decay condition.
    pub probes: usize,
    /// Nodes used to classify exact solutions.
    pub classify_nodes: usize,
    /// Points written per exact solution curve.
    pub samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { critical: 1e-10, decay_rate: 0.02, probes: flatsol_core::solver1d::DECAY_PROBES, classify_nodes: 2048, samples: 400 }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 5] = ["critical", "decay-rate", "probes", "classify-nodes", "samples"];

    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let bad = || ConfigError::new(format!("tolerance '{name}' cannot take '{value}'"));
        let positive = |v: &str| parse_number(v).filter(|x| *x > 0.0).ok_or_else(bad);
        let count = |v: &str| v.parse::<usize>().ok().filter(|x| *x > 0).ok_or_else(bad);
        match name {
            "critical" => self.critical = positive(value)?,
            "decay-rate" => self.decay_rate = positive(value)?,
            "probes" => self.probes = count(value)?,
            "classify-nodes" => self.classify_nodes = count(value)?,
            "samples" => self.samples = count(value)?,
            _ => return Err(ConfigError::new(format!("unknown tolerance '{name}' (known: {})", Self::NAMES.join(", ")))),
        }
        Ok(())
    }

    fn read(block: &Block) -> Result<Self> {
        let mut t = Tolerances::default();
        let mut f = Fields::new("tol", block)?;
        for name in Self::NAMES {
            if let Some((v, line)) = f.raw(name) {
                t.set(name, v).map_err(|e| ConfigError::at(line, e.message))?;
            }
        }
        f.finish()?;
        Ok(t)
    }

    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("critical", num(self.critical)),
            ("decay-rate", num(self.decay_rate)),
            ("probes", self.probes.to_string()),
            ("classify-nodes", self.classify_nodes.to_string()),
            ("samples", self.samples.to_string()),
        ]
    }
}

/// A fully resolved run: every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub forcing: ForcingSpec,
    /// Split point of the one-dimensional conditions; inferred when absent.
    pub r0: Option<f64>,
    pub mesh: MeshSpec,
    pub compact: Option<CompactSpec>,
    pub rho: Option<f64>,
    /// Exponent of the N-d subsolution; scanned when absent.
    pub alpha: Option<f64>,
    pub semilinear: SemilinearSpec,
    pub parabolic: ParabolicSpec,
    pub tol: Tolerances,
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let tree = parse(text)?;
        let mut f = Fields::new("the top level", &tree)?;
        let forcing = match f.block("forcing") {
            Some((b, _)) => ForcingSpec::read(b)?,
            None => return Err(ConfigError::new("missing 'forcing' block")),
        };
        let r0 = f.number("r0")?;
        let rho = f.number("rho")?;
        let alpha = f.number("alpha")?;
        let mesh = match f.block("mesh") {
            Some((b, _)) => MeshSpec::read(b)?,
            None => MeshSpec::default(),
        };
        let compact = f.block("compact").map(|(b, _)| CompactSpec::read(b)).transpose()?;
        let semilinear = match f.block("semilinear") {
            Some((b, _)) => {
                let mut s = Fields::new("semilinear", b)?;
                let d = SemilinearSpec::default();
                let out = SemilinearSpec { lambda: s.number("lambda")?.unwrap_or(d.lambda), alpha: s.number("alpha")?.unwrap_or(d.alpha) };
                s.finish()?;
                out
            }
            None => SemilinearSpec::default(),
        };
        let parabolic = match f.block("parabolic") {
            Some((b, _)) => {
                let mut s = Fields::new("parabolic", b)?;
                let d = ParabolicSpec::default();
                let initial = match s.text("initial").unwrap_or("phi2") {
                    "zero" => Initial::Zero,
                    "phi1" => Initial::Phi1,
                    "phi2" => Initial::Phi2,
                    v => return Err(ConfigError::new(format!("unknown initial datum '{v}' (zero, phi1, phi2)"))),
                };
                let out = ParabolicSpec {
                    initial,
                    dt: s.number("dt")?.unwrap_or(d.dt),
                    theta: s.number("theta")?.unwrap_or(d.theta),
                    horizon: s.number("horizon")?.unwrap_or(d.horizon),
                    decay_horizon: s.number("decay-horizon")?.unwrap_or(d.decay_horizon),
                };
                s.finish()?;
                out
            }
            None => ParabolicSpec::default(),
        };
        let tol = match f.block("tol") {
            Some((b, _)) => Tolerances::read(b)?,
            None => Tolerances::default(),
        };
        f.finish()?;
        let cfg = RunConfig { forcing, r0, mesh, compact, rho, alpha, semilinear, parabolic, tol };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that hold before any solve.
    pub fn validate(&self) -> Result<()> {
        self.forcing.build().map_err(|e| ConfigError::new(format!("forcing: {e}")))?;
        if self.mesh.kind == MeshKind::Disk && !(1..=3).contains(&self.mesh.dim) {
            return Err(ConfigError::new("mesh dim must be 1, 2 or 3"));
        }
        if let Some(r) = self.rho {
            if !(r > 0.0) {
                return Err(ConfigError::new("rho must be positive"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 1.0) {
                return Err(ConfigError::new("alpha must exceed 1"));
            }
        }
        let s = &self.semilinear;
        if !(s.alpha > 0.0 && s.alpha < 1.0) || !(s.lambda >= 0.0) {
            return Err(ConfigError::new("semilinear needs 0 < alpha < 1 and lambda >= 0"));
        }
        let p = &self.parabolic;
        if !(p.dt > 0.0) || !(p.theta >= 0.5 && p.theta <= 1.0) || !(p.horizon > 0.0) || !(p.decay_horizon >= 0.0) {
            return Err(ConfigError::new("parabolic needs dt > 0, 1/2 <= theta <= 1, horizon > 0 and decay-horizon >= 0"));
        }
        Ok(())
    }

    /// Canonical text; parsing it gives back the same configuration.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.forcing.render(&mut out);
        for (k, v) in [("r0", self.r0), ("rho", self.rho), ("alpha", self.alpha)] {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {}", num(v));
            }
        }
        self.mesh.render(&mut out);
        if let Some(c) = &self.compact {
            c.render(&mut out);
        }
        let s = &self.semilinear;
        let _ = writeln!(out, "semilinear {{\n    lambda = {}\n    alpha = {}\n}}", num(s.lambda), num(s.alpha));
        let p = &self.parabolic;
        let _ = writeln!(
            out,
            "parabolic {{\n    initial = {}\n    dt = {}\n    theta = {}\n    horizon = {}\n    decay-horizon = {}\n}}",
            p.initial.name(),
            num(p.dt),
            num(p.theta),
            num(p.horizon),
            num(p.decay_horizon)
        );
        out.push_str("tol {\n");
        for (k, v) in self.tol.pairs() {
            let _ = writeln!(out, "    {k} = {v}");
        }
        out.push_str("}\n");
        out
    }

    pub fn forcing(&self) -> flatsol_core::Result<PiecewiseForcing> {
        self.forcing.build()
    }

    pub fn mesh(&self) -> flatsol_core::Result<Mesh> {
        self.mesh.build(&self.forcing()?)
    }

    /// The forcing on the mesh. Rectangles take the profile along `x`, stretched
    /// onto `(0, lx)` and constant in `y`.
    pub fn nd_forcing(&self, mesh: &Mesh) -> flatsol_core::Result<NdForcing> {
        let f = self.forcing()?;
        match *mesh {
            Mesh::Rectangle { lx, .. } => {
                let (lo, hi) = f.domain();
                let field = ScalarField::from_fn(*mesh, |p| f.eval(lo + (hi - lo) * p[0] / lx).unwrap_or(0.0)).with_dirichlet();
                Ok(NdForcing::Field(field))
            }
            _ => Ok(NdForcing::Profile(f)),
        }
    }
}

/// Shortest decimal that reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "
        # plateau with custom pieces
        forcing {
            domain = -2 2
            piece {
                lo = -2
                hi = -1
                constant = -1
            }
            piece {
                lo = -1
                hi = 1
                polynomial = 1 0 0.5
            }
            piece {
                lo = 1
                hi = 2
                constant = -1
            }
        }
        mesh {
            kind = disk
            n = 64
        }
        compact {
            shape = ball
            radius = 0.5
        }
        rho = 0.1
    ";

    #[test]
    fn parses_nested_pieces() {
        let c = RunConfig::from_text(SAMPLE).unwrap();
        match &c.forcing {
            ForcingSpec::Pieces { domain, pieces } => {
                assert_eq!(*domain, (-2.0, 2.0));
                assert_eq!(pieces.len(), 3);
                assert_eq!(pieces[1].kind(), &PieceKind::Polynomial(vec![1.0, 0.0, 0.5]));
            }
            f => panic!("{f:?}"),
        }
        assert_eq!(c.mesh.kind, MeshKind::Disk);
        assert_eq!(c.compact, Some(CompactSpec::Ball { radius: 0.5 }));
        assert_eq!(c.rho, Some(0.1));
    }

    #[test]
    fn render_round_trips() {
        let c = RunConfig::from_text(SAMPLE).unwrap();
        let again = RunConfig::from_text(&c.render()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.render(), again.render());
    }

    #[test]
    fn families_fill_defaults() {
        let c = RunConfig::from_text("forcing {\n family = dead-band\n b = 0.25\n}").unwrap();
        match c.forcing {
            ForcingSpec::Family { ref params, .. } => {
                assert_eq!(params[1], ("b".to_string(), 0.25));
                assert!((params[0].1 - 3.414213562373095).abs() < 1e-15);
            }
            ref f => panic!("{f:?}"),
        }
    }

    #[test]
    fn rejects_unknown_and_repeated_keys() {
        let e = RunConfig::from_text("forcing {\n family = plateau\n colour = red\n}").unwrap_err();
        assert!(e.message.contains("unknown key 'colour'"), "{e}");
        assert_eq!(e.line, Some(3));
        let e = RunConfig::from_text("forcing {\n family = plateau\n}\nrho = 1\nrho = 2").unwrap_err();
        assert!(e.message.contains("twice"), "{e}");
        let e = RunConfig::from_text("forcing {\n family = plateau\n}\nwidgets {\n}").unwrap_err();
        assert!(e.message.contains("unknown key 'widgets'"), "{e}");
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let e = parse("forcing {\n family = plateau\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse("}\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = parse("a = 1\njust words\n").unwrap_err();
        assert_eq!(e.line, Some(2));
    }

    #[test]
    fn validation_runs_before_solving() {
        let bad = "forcing {\n family = plateau\n}\nsemilinear {\n alpha = 1.5\n}";
        assert!(RunConfig::from_text(bad).is_err());
        let gap = "forcing {\n domain = 0 1\n piece {\n lo = 0\n hi = 0.5\n constant = 1\n }\n}";
        assert!(RunConfig::from_text(gap).unwrap_err().message.starts_with("forcing:"));
        assert!(RunConfig::from_text("forcing {\n family = nope\n}").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = Tolerances::default();
        t.set("critical", "1e-6").unwrap();
        assert_eq!(t.critical, 1e-6);
        assert!(t.set("probes", "0").is_err());
        assert!(t.set("speed", "1").is_err());
    }
}
