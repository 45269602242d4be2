//! Wigner and rectangular ensembles, the matrix-free Gram operator, and the
//! split of a matrix at an entry threshold `n^beta`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rng::{SeedInfo, UniformStream};
use crate::tail::TailLaw;
use crate::EnsembleKind;

/// Real symmetric `n x n` matrix whose entries on and above the diagonal are
/// i.i.d. draws, taken in row-major order over `i <= j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerSample {
    pub n: usize,
    pub entries: DenseMatrix,
    pub seed_info: Option<SeedInfo>,
}

/// `n x p` matrix of i.i.d. draws in row-major order, `p >= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct RectSample {
    pub n: usize,
    pub p: usize,
    pub entries: DenseMatrix,
    pub seed_info: Option<SeedInfo>,
}

pub fn generate_wigner<S: UniformStream + ?Sized>(law: &TailLaw, n: usize, stream: &mut S) -> Result<WignerSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("Wigner dimension must be at least 1".into()));
    }
    let seed_info = stream.seed_info();
    let mut sampler = law.sampler()?;
    let mut entries = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = sampler.draw(stream)?;
            entries[(i, j)] = d;
            entries[(j, i)] = d;
        }
    }
    Ok(WignerSample { n, entries, seed_info })
}

pub fn generate_covariance<S: UniformStream + ?Sized>(
    law: &TailLaw,
    n: usize,
    p: usize,
    stream: &mut S,
) -> Result<RectSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("row dimension must be at least 1".into()));
    }
    if p < n {
        return Err(Error::InvalidArgument(format!(
            "covariance ensemble needs p >= n, got n = {n}, p = {p}"
        )));
    }
    let seed_info = stream.seed_info();
    let mut sampler = law.sampler()?;
    let data = (0..n * p).map(|_| sampler.draw(stream)).collect::<Result<Vec<_>>>()?;
    Ok(RectSample {
        n,
        p,
        entries: DenseMatrix::from_row_major(n, p, data)?,
        seed_info,
    })
}

impl RectSample {
    /// `A A^T`, without the `1/p` factor.
    pub fn gram(&self) -> DenseMatrix {
        gram(&self.entries)
    }

    /// `(1/p) A A^T`.
    pub fn gram_scaled(&self) -> DenseMatrix {
        self.gram().scaled(1.0 / self.p as f64)
    }

    pub fn apply_gram(&self, v: &[f64]) -> Result<Vec<f64>> {
        apply_gram(&self.entries, v)
    }
}

/// `A A^T` for any rectangular `A`. Exactly symmetric.
pub fn gram(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut g = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = crate::matrix::dot(a.row(i), a.row(j));
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    g
}

/// `A (A^T v)` without forming `A A^T`.
pub fn apply_gram(a: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let w = a.matvec_transposed(v)?;
    a.matvec(&w)
}

/// Open interval of admissible truncation exponents,
/// `1/alpha < beta < 2 (8 - alpha) / (alpha (10 - alpha))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaWindow {
    pub lo: f64,
    pub hi: f64,
}

impl BetaWindow {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, beta: f64) -> bool {
        beta > self.lo && beta < self.hi
    }
}

/// Nonempty iff `0 < alpha < 6`.
pub fn beta_range(alpha: f64) -> Result<BetaWindow> {
    if !(alpha > 0.0 && alpha < 6.0) {
        return Err(Error::EmptyWindow(alpha));
    }
    Ok(BetaWindow {
        lo: 1.0 / alpha,
        hi: 2.0 * (8.0 - alpha) / (alpha * (10.0 - alpha)),
    })
}

/// `M = A1 + A2` with `A1` keeping the entries `|m_ij| <= n^beta`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationSplit {
    pub threshold: f64,
    pub beta: f64,
    pub low_part: DenseMatrix,
    pub high_part: DenseMatrix,
}

impl TruncationSplit {
    /// Nonzero entries of the high part as `(row, col, value)`, row-major.
    pub fn high_entries(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.high_part.rows() {
            for (j, &v) in self.high_part.row(i).iter().enumerate() {
                if v != 0.0 {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

pub fn truncation_split(m: &DenseMatrix, beta: f64, n: usize) -> TruncationSplit {
    let threshold = (n as f64).powf(beta);
    let low = DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let v = m[(i, j)];
        if v.abs() <= threshold {
            v
        } else {
            0.0
        }
    });
    let high = DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let v = m[(i, j)];
        if v.abs() <= threshold {
            0.0
        } else {
            v
        }
    });
    TruncationSplit {
        threshold,
        beta,
        low_part: low,
        high_part: high,
    }
}

const DUMP_MAGIC: &str = "heavy-rmt matrix v1";

/// Header of a matrix dump.
#[derive(Clone, Debug, PartialEq)]
pub struct DumpHeader {
    pub kind: EnsembleKind,
    pub n: usize,
    pub p: usize,
    pub alpha: f64,
    pub seed_info: Option<SeedInfo>,
}

/// Writes a plain-text header followed by the row-major little-endian `f64`
/// payload. Header lines are `key value`; the header ends with `end`.
pub fn write_dump(path: &Path, header: &DumpHeader, m: &DenseMatrix) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let kind = match header.kind {
        EnsembleKind::Wigner => "wigner",
        EnsembleKind::Covariance => "covariance",
    };
    let mut text = format!(
        "{DUMP_MAGIC}\nkind {kind}\nn {}\np {}\nalpha {}\n",
        header.n, header.p, header.alpha
    );
    if let Some(s) = header.seed_info {
        text.push_str(&format!("master_seed {}\nstream_id {}\n", s.master_seed, s.stream_id));
    }
    text.push_str(&format!("rows {}\ncols {}\nend\n", m.rows(), m.cols()));
    let io = |e| Error::io(path, e);
    w.write_all(text.as_bytes()).map_err(io)?;
    for x in m.as_slice() {
        w.write_all(&x.to_le_bytes()).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn read_dump(path: &Path) -> Result<(DumpHeader, DenseMatrix)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = BufReader::new(file);
    let bad = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut line = String::new();
    r.read_line(&mut line).map_err(|e| Error::io(path, e))?;
    if line.trim_end() != DUMP_MAGIC {
        return Err(bad(format!("unexpected magic line {:?}", line.trim_end())));
    }
    let mut kind = None;
    let (mut n, mut p, mut rows, mut cols) = (None, None, None, None);
    let mut alpha = None;
    let (mut master_seed, mut stream_id) = (None, None);
    loop {
        line.clear();
        if r.read_line(&mut line).map_err(|e| Error::io(path, e))? == 0 {
            return Err(bad("header not terminated".into()));
        }
        let l = line.trim_end();
        if l == "end" {
            break;
        }
        let (key, value) = l.split_once(' ').ok_or_else(|| bad(format!("malformed header line {l:?}")))?;
        let parse_usize = |v: &str| v.parse::<usize>().map_err(|e| bad(format!("{key}: {e}")));
        match key {
            "kind" => {
                kind = Some(match value {
                    "wigner" => EnsembleKind::Wigner,
                    "covariance" => EnsembleKind::Covariance,
                    other => return Err(bad(format!("unknown kind {other:?}"))),
                })
            }
            "n" => n = Some(parse_usize(value)?),
            "p" => p = Some(parse_usize(value)?),
            "rows" => rows = Some(parse_usize(value)?),
            "cols" => cols = Some(parse_usize(value)?),
            "alpha" => alpha = Some(value.parse::<f64>().map_err(|e| bad(format!("alpha: {e}")))?),
            "master_seed" => master_seed = Some(value.parse::<u64>().map_err(|e| bad(format!("{key}: {e}")))?),
            "stream_id" => stream_id = Some(value.parse::<u64>().map_err(|e| bad(format!("{key}: {e}")))?),
            other => return Err(bad(format!("unknown header key {other:?}"))),
        }
    }
    let missing = |k: &str| bad(format!("missing header key {k}"));
    let rows = rows.ok_or_else(|| missing("rows"))?;
    let cols = cols.ok_or_else(|| missing("cols"))?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    if bytes.len() != rows * cols * 8 {
        return Err(bad(format!("payload has {} bytes, expected {}", bytes.len(), rows * cols * 8)));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let header = DumpHeader {
        kind: kind.ok_or_else(|| missing("kind"))?,
        n: n.ok_or_else(|| missing("n"))?,
        p: p.ok_or_else(|| missing("p"))?,
        alpha: alpha.ok_or_else(|| missing("alpha"))?,
        seed_info: match (master_seed, stream_id) {
            (Some(master_seed), Some(stream_id)) => Some(SeedInfo { master_seed, stream_id }),
            _ => None,
        },
    };
    Ok((header, DenseMatrix::from_row_major(rows, cols, data)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{ScriptedStream, Stream};
    use crate::tail::{SlowlyVarying, Symmetry};

    fn one_sided(alpha: f64) -> TailLaw {
        TailLaw::new(alpha, SlowlyVarying::Unit, Symmetry::OneSided).unwrap()
    }

    #[test]
    fn wigner_fills_upper_triangle_row_major() {
        // Draws 1/u^2 for alpha = 0.5: u = 1, 1/2, 1/4 give 1, 4, 16.
        let mut s = ScriptedStream::new(vec![1.0, 0.5, 0.25], vec![]);
        let w = generate_wigner(&one_sided(0.5), 2, &mut s).unwrap();
        assert_eq!(w.entries, DenseMatrix::from_rows(&[vec![1.0, 4.0], vec![4.0, 16.0]]));
        assert_eq!(s.units_consumed(), 3);
        assert!(w.seed_info.is_none());
    }

    #[test]
    fn wigner_degenerate_sizes() {
        let mut s = ScriptedStream::new(vec![0.25], vec![]);
        let w = generate_wigner(&one_sided(2.0), 1, &mut s).unwrap();
        assert_eq!(w.entries, DenseMatrix::from_rows(&[vec![2.0]]));
        assert!(generate_wigner(&one_sided(2.0), 0, &mut s).is_err());
    }

    #[test]
    fn wigner_is_deterministic_and_symmetric() {
        let law = TailLaw::symmetric_pareto(1.3).unwrap();
        let a = generate_wigner(&law, 17, &mut Stream::new(9, 4)).unwrap();
        let b = generate_wigner(&law, 17, &mut Stream::new(9, 4)).unwrap();
        assert!(a.entries.as_slice().iter().zip(b.entries.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert!(a.entries.is_symmetric());
        assert_eq!(a.seed_info, Some(SeedInfo { master_seed: 9, stream_id: 4 }));
    }

    #[test]
    fn covariance_draw_accounting() {
        let mut s = ScriptedStream::new(vec![1.0, 0.25], vec![]);
        let r = generate_covariance(&one_sided(2.0), 1, 2, &mut s).unwrap();
        assert_eq!(r.entries, DenseMatrix::from_rows(&[vec![1.0, 2.0]]));

        let mut s = ScriptedStream::new(vec![1.0; 4], vec![]);
        generate_covariance(&one_sided(2.0), 2, 2, &mut s).unwrap();
        assert_eq!(s.units_consumed(), 4);

        assert!(generate_covariance(&one_sided(2.0), 3, 2, &mut s).is_err());
    }

    #[test]
    fn gram_examples() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert_eq!(gram(&a), DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 4.0]]));
        assert_eq!(apply_gram(&a, &[1.0, 1.0]).unwrap(), vec![1.0, 4.0]);
        assert_eq!(apply_gram(&a, &[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        assert!(apply_gram(&a, &[1.0]).is_err());

        let b = DenseMatrix::from_rows(&[vec![1.0, 1.0]]);
        assert_eq!(gram(&b), DenseMatrix::from_rows(&[vec![2.0]]));
    }

    #[test]
    fn gram_scaled_divides_by_p() {
        let law = TailLaw::symmetric_pareto(2.5).unwrap();
        let r = generate_covariance(&law, 3, 5, &mut Stream::new(1, 1)).unwrap();
        let g = r.gram();
        let gs = r.gram_scaled();
        for i in 0..3 {
            for j in 0..3 {
                assert!((gs[(i, j)] - g[(i, j)] / 5.0).abs() <= 1e-15 * g[(i, j)].abs());
            }
        }
    }

    #[test]
    fn beta_window_examples() {
        let w = beta_range(3.0).unwrap();
        assert!((w.lo - 1.0 / 3.0).abs() < 1e-15 && (w.hi - 10.0 / 21.0).abs() < 1e-15);
        let w = beta_range(2.0).unwrap();
        assert_eq!((w.lo, w.hi), (0.5, 0.75));
        assert!(matches!(beta_range(6.0), Err(Error::EmptyWindow(_))));
        assert!(beta_range(7.5).is_err());
        // Just below 6 the window is tiny but nonempty.
        let w = beta_range(5.999).unwrap();
        assert!(w.hi > w.lo);
    }

    #[test]
    fn truncation_examples() {
        let m = DenseMatrix::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]);
        let beta = 3f64.ln() / 2f64.ln();
        let s = truncation_split(&m, beta, 2);
        assert_eq!(s.low_part, DenseMatrix::zeros(2, 2));
        assert_eq!(s.high_part, m);
        assert_eq!(s.high_entries(), vec![(0, 1, 5.0), (1, 0, 5.0)]);

        let s = truncation_split(&m, 3.0, 2);
        assert_eq!(s.low_part, m);
        assert_eq!(s.high_part, DenseMatrix::zeros(2, 2));
    }

    #[test]
    fn dump_round_trip() {
        let law = TailLaw::symmetric_pareto(1.1).unwrap();
        let w = generate_wigner(&law, 6, &mut Stream::new(3, 8)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let header = DumpHeader {
            kind: EnsembleKind::Wigner,
            n: 6,
            p: 6,
            alpha: 1.1,
            seed_info: w.seed_info,
        };
        write_dump(&path, &header, &w.entries).unwrap();
        let (h, m) = read_dump(&path).unwrap();
        assert_eq!(h, header);
        assert_eq!(m, w.entries);
    }
}
