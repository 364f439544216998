//! Plain-text matrix files.
//!
//! ```text
//! # toepstab 0.1.0
//! # kind: toeplitz
//! # instance: prolate(n=3,omega=0.25)
//! # seed: none
//! # rng: ChaCha8Rng/rand_chacha-0.3
//! # epsilon: 1.1102230246251565e-16
//! 3
//! 5.0000000000000000e-1
//! 3.1830988618379069e-1
//! 0.0000000000000000e0
//! ```
//!
//! Entries are written with 17 significant digits, which round-trips every
//! finite f64. Readers also accept hexadecimal floats such as `0x1.8p-1`.
//! Toeplitz and vector files hold one entry per line; dense and triangular
//! files hold one row per line. A scaled factor appends the diagonal `d` as a
//! final row.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toepstab::{DenseMatrix, ToeplitzSpd, EPSILON, RNG_NAME};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Toeplitz,
    Dense,
    Upper,
    ScaledUpper,
    Vector,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::Toeplitz => "toeplitz",
            Kind::Dense => "dense",
            Kind::Upper => "upper",
            Kind::ScaledUpper => "scaled-upper",
            Kind::Vector => "vector",
        }
    }

    fn entries(self, n: usize) -> usize {
        match self {
            Kind::Toeplitz | Kind::Vector => n,
            Kind::Dense | Kind::Upper => n * n,
            Kind::ScaledUpper => n * n + n,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        [
            Kind::Toeplitz,
            Kind::Dense,
            Kind::Upper,
            Kind::ScaledUpper,
            Kind::Vector,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| format!("unknown kind '{s}'"))
    }
}

/// Provenance written above the data.
#[derive(Debug, Clone)]
pub struct Header {
    pub kind: Kind,
    pub instance: String,
    pub seed: Option<u64>,
}

impl Header {
    pub fn new(kind: Kind, instance: impl Into<String>, seed: Option<u64>) -> Self {
        Self {
            kind,
            instance: instance.into(),
            seed,
        }
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = provenance(self.seed);
        out.insert(1, format!("kind: {}", self.kind));
        out.insert(2, format!("instance: {}", self.instance));
        out
    }
}

/// Tool version, seed, RNG and unit roundoff, shared by every output format.
pub fn provenance(seed: Option<u64>) -> Vec<String> {
    vec![
        format!("toepstab {}", env!("CARGO_PKG_VERSION")),
        format!(
            "seed: {}",
            seed.map_or("none".to_string(), |s| s.to_string())
        ),
        format!("rng: {RNG_NAME}"),
        format!("epsilon: {EPSILON:e}"),
    ]
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Decimal or hexadecimal float.
pub fn parse_f64(tok: &str) -> Result<f64, String> {
    let (neg, body) = match tok.as_bytes().first() {
        Some(b'-') => (true, &tok[1..]),
        Some(b'+') => (false, &tok[1..]),
        _ => (false, tok),
    };
    let value = if body.starts_with("0x") || body.starts_with("0X") {
        hexf_parse::parse_hexf64(body, false).map_err(|e| format!("bad hex float '{tok}': {e}"))?
    } else {
        body.parse::<f64>()
            .map_err(|_| format!("bad number '{tok}'"))?
    };
    if !value.is_finite() {
        return Err(format!("non-finite entry '{tok}'"));
    }
    Ok(if neg { -value } else { value })
}

/// A parsed file: optional declared kind, order `n`, and the flat entries.
#[derive(Debug, Clone)]
pub struct RawFile {
    pub kind: Option<Kind>,
    pub n: usize,
    pub values: Vec<f64>,
    path: PathBuf,
}

impl RawFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> CliResult<Self> {
        let bad = |line: usize, msg: String| CliError::Format {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut kind = None;
        let mut n = None;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(k) = comment.trim().strip_prefix("kind:") {
                    kind = Some(k.trim().parse().map_err(|m| bad(line_no, m))?);
                }
                continue;
            }
            for tok in line.split_whitespace() {
                if n.is_none() {
                    let order = tok
                        .parse::<usize>()
                        .map_err(|_| bad(line_no, format!("expected order, found '{tok}'")))?;
                    n = Some(order);
                } else {
                    values.push(parse_f64(tok).map_err(|m| bad(line_no, m))?);
                }
            }
        }
        let n = n.ok_or_else(|| bad(text.lines().count().max(1), "missing order".into()))?;
        if n == 0 {
            return Err(bad(1, "order must be positive".into()));
        }
        Ok(Self {
            kind,
            n,
            values,
            path: path.to_path_buf(),
        })
    }

    /// Checks the entry count against `kind`, and the declared kind if any.
    pub fn expect(&self, kind: Kind) -> CliResult<()> {
        if let Some(declared) = self.kind {
            if declared != kind {
                return Err(self.format_error(format!("expected a {kind} file, found {declared}")));
            }
        }
        let want = kind.entries(self.n);
        if self.values.len() != want {
            return Err(self.format_error(format!(
                "{kind} of order {} needs {want} entries, found {}",
                self.n,
                self.values.len()
            )));
        }
        Ok(())
    }

    fn format_error(&self, msg: String) -> CliError {
        CliError::Format {
            path: self.path.clone(),
            line: 0,
            msg,
        }
    }

    pub fn into_toeplitz(self) -> CliResult<ToeplitzSpd> {
        self.expect(Kind::Toeplitz)?;
        ToeplitzSpd::new(self.values).map_err(|e| match e {
            toepstab::Error::NonPositiveDiagonal { .. } | toepstab::Error::Domain(_) => {
                CliError::NotSpd(e.to_string())
            }
            other => other.into(),
        })
    }

    pub fn into_dense(self) -> CliResult<DenseMatrix> {
        self.expect(Kind::Dense)?;
        Ok(DenseMatrix::new(self.n, self.n, self.values)?)
    }

    pub fn into_vector(self) -> CliResult<Vec<f64>> {
        self.expect(Kind::Vector)?;
        Ok(self.values)
    }
}

/// Renders a header, the order, then `rows` with entries separated by spaces.
pub fn render<'a>(header: &Header, n: usize, rows: impl IntoIterator<Item = &'a [f64]>) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str(&n.to_string());
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| format_f64(x)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn render_column(header: &Header, entries: &[f64]) -> String {
    render(header, entries.len(), entries.chunks(1))
}

pub fn render_matrix(header: &Header, m: &DenseMatrix) -> String {
    render(header, m.rows(), (0..m.rows()).map(|i| m.row(i)))
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}
