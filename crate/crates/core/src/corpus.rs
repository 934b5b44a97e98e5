//! Document-term matrix and class-label input, term weighting, and the
//! immutable [`Corpus`].
//!
//! The sparse matrix format is a header line
//! `<n_docs> <n_terms> <n_nonzeros>` followed by one line per document holding
//! space-separated `index value` pairs with 1-based term indices. A document
//! with no terms is an empty line.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::format::sig6;
use crate::sparse::SparseVector;

/// A parsed document-term matrix. Term indices are stored 0-based; rows are
/// sorted by term index.
#[derive(Debug, Clone, PartialEq)]
pub struct RawMatrix {
    pub n_docs: usize,
    pub n_terms: usize,
    pub rows: Vec<Vec<(u32, f64)>>,
}

impl RawMatrix {
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Number of documents with a nonzero entry for each term.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.n_terms];
        for row in &self.rows {
            for &(t, v) in row {
                if v != 0.0 {
                    df[t as usize] += 1;
                }
            }
        }
        df
    }
}

pub fn load_sparse_matrix(path: impl AsRef<Path>) -> Result<RawMatrix> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_sparse_matrix(BufReader::new(file))
}

pub fn parse_sparse_matrix(reader: impl BufRead) -> Result<RawMatrix> {
    let mut lines = reader.lines().enumerate();

    let (n_docs, n_terms, declared_nnz) = loop {
        let Some((i, line)) = lines.next() else {
            return Err(Error::parse(1, "missing header line"));
        };
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed: Option<Vec<usize>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[docs, terms, nnz]) => break (docs, terms, nnz),
            _ => {
                return Err(Error::parse(
                    i + 1,
                    format!("malformed header {line:?}: expected `<n_docs> <n_terms> <n_nonzeros>`"),
                ))
            }
        }
    };

    let mut rows = Vec::with_capacity(n_docs);
    let mut nnz = 0usize;
    let mut last_line = 1;
    for (i, line) in lines {
        let lineno = i + 1;
        last_line = lineno;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        if rows.len() == n_docs {
            if line.trim().is_empty() {
                continue;
            }
            return Err(Error::parse(lineno, format!("more than {n_docs} document rows")));
        }
        let row = parse_row(&line, n_terms, lineno)?;
        nnz += row.len();
        rows.push(row);
    }
    if rows.len() != n_docs {
        return Err(Error::parse(
            last_line,
            format!("header declares {n_docs} documents, found {}", rows.len()),
        ));
    }
    if nnz != declared_nnz {
        return Err(Error::parse(
            last_line,
            format!("header declares {declared_nnz} nonzeros, found {nnz}"),
        ));
    }
    Ok(RawMatrix {
        n_docs,
        n_terms,
        rows,
    })
}

fn parse_row(line: &str, n_terms: usize, lineno: usize) -> Result<Vec<(u32, f64)>> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if !tokens.len().is_multiple_of(2) {
        return Err(Error::parse(lineno, "odd number of tokens; expected `index value` pairs"));
    }
    let mut row = Vec::with_capacity(tokens.len() / 2);
    for pair in tokens.chunks_exact(2) {
        let index: usize = pair[0]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad term index {:?}", pair[0])))?;
        if index == 0 || index > n_terms {
            return Err(Error::parse(
                lineno,
                format!("term index {index} out of range 1..={n_terms}"),
            ));
        }
        let value: f64 = pair[1]
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad value {:?}", pair[1])))?;
        if !value.is_finite() {
            return Err(Error::parse(lineno, format!("non-finite value {value}")));
        }
        if value < 0.0 {
            return Err(Error::parse(lineno, format!("negative value {value} for term {index}")));
        }
        row.push(((index - 1) as u32, value));
    }
    row.sort_by_key(|&(t, _)| t);
    if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::parse(lineno, format!("duplicate term index {}", w[0].0 + 1)));
    }
    Ok(row)
}

/// Writes `matrix` in the sparse format, values at six significant digits.
pub fn write_sparse_matrix(matrix: &RawMatrix, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {} {}", matrix.n_docs, matrix.n_terms, matrix.nnz())?;
    for row in &matrix.rows {
        let line: Vec<String> = row
            .iter()
            .map(|&(t, v)| format!("{} {}", t + 1, sig6(v)))
            .collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Class labels mapped to contiguous ids in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    ids: Vec<usize>,
    names: Vec<String>,
}

impl Labels {
    pub fn from_names<S: AsRef<str>>(labels: &[S]) -> Self {
        let mut lookup: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        let ids = labels
            .iter()
            .map(|l| {
                let l = l.as_ref();
                *lookup.entry(l).or_insert_with(|| {
                    names.push(l.to_string());
                    names.len() - 1
                })
            })
            .collect();
        Labels { ids, names }
    }

    /// Builds labels from raw class ids, renumbering them by first appearance.
    pub fn from_ids(ids: &[usize]) -> Self {
        let names: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
        Self::from_names(&names)
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Number of distinct classes.
    pub fn q(&self) -> usize {
        self.names.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.q()];
        for &c in &self.ids {
            sizes[c] += 1;
        }
        sizes
    }

    /// Keeps the given positions (ascending) and renumbers the classes that
    /// survive.
    pub fn select(&self, keep: &[usize]) -> Labels {
        let names: Vec<&str> = keep.iter().map(|&i| self.names[self.ids[i]].as_str()).collect();
        Labels::from_names(&names)
    }
}

pub fn load_labels(path: impl AsRef<Path>, n: usize) -> Result<Labels> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_labels(BufReader::new(file), n)
}

/// Reads one label per line. Trailing blank lines are ignored; a blank line
/// before the last label is an error.
pub fn parse_labels(reader: impl BufRead, n: usize) -> Result<Labels> {
    let mut raw: Vec<(usize, String)> = Vec::with_capacity(n);
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(i + 1, e.to_string()))?;
        raw.push((i + 1, line.trim().to_string()));
    }
    while raw.last().is_some_and(|(_, l)| l.is_empty()) {
        raw.pop();
    }
    if let Some((lineno, _)) = raw.iter().find(|(_, l)| l.is_empty()) {
        return Err(Error::parse(*lineno, "empty label"));
    }
    if raw.len() != n {
        return Err(Error::parse(
            raw.len().max(1),
            format!("expected {n} labels, found {}", raw.len()),
        ));
    }
    let names: Vec<&str> = raw.iter().map(|(_, l)| l.as_str()).collect();
    Ok(Labels::from_names(&names))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    None,
    #[default]
    TfIdf,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Weighting::None),
            "tfidf" => Ok(Weighting::TfIdf),
            _ => Err(Error::InvalidInput(format!(
                "unknown weighting {s:?} (expected none or tfidf)"
            ))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Weighting::None => "none",
            Weighting::TfIdf => "tfidf",
        })
    }
}

/// An immutable set of unit-length document vectors, optionally labeled.
#[derive(Debug, Clone)]
pub struct Corpus {
    docs: Vec<SparseVector>,
    vocab_size: usize,
    labels: Option<Labels>,
    source_rows: Vec<usize>,
    dropped: Vec<usize>,
}

impl Corpus {
    /// Normalizes `vectors` to unit length and assembles a corpus, dropping
    /// all-zero vectors like [`build_corpus`] does.
    pub fn from_vectors(
        vectors: Vec<SparseVector>,
        vocab_size: usize,
        labels: Option<Labels>,
    ) -> Result<Corpus> {
        if let Some(l) = &labels {
            if l.len() != vectors.len() {
                return Err(Error::LengthMismatch {
                    expected: vectors.len(),
                    found: l.len(),
                });
            }
        }
        if let Some(v) = vectors.iter().find(|v| v.dim_hint() > vocab_size) {
            return Err(Error::InvalidInput(format!(
                "term index {} beyond vocabulary size {vocab_size}",
                v.dim_hint() - 1
            )));
        }
        let mut docs = Vec::with_capacity(vectors.len());
        let mut source_rows = Vec::with_capacity(vectors.len());
        let mut dropped = Vec::new();
        for (row, v) in vectors.iter().enumerate() {
            match v.normalized() {
                Some(unit) => {
                    docs.push(unit);
                    source_rows.push(row);
                }
                None => dropped.push(row),
            }
        }
        if docs.is_empty() || vocab_size == 0 {
            return Err(Error::EmptyCorpus);
        }
        if !dropped.is_empty() {
            log::warn!(
                "dropped {} all-zero document(s) (first at row {})",
                dropped.len(),
                dropped[0] + 1
            );
        }
        let labels = labels.map(|l| {
            if dropped.is_empty() {
                l
            } else {
                l.select(&source_rows)
            }
        });
        Ok(Corpus {
            docs,
            vocab_size,
            labels,
            source_rows,
            dropped,
        })
    }

    pub fn docs(&self) -> &[SparseVector] {
        &self.docs
    }

    pub fn doc(&self, i: usize) -> &SparseVector {
        &self.docs[i]
    }

    pub fn n(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn labels(&self) -> Option<&Labels> {
        self.labels.as_ref()
    }

    pub fn q(&self) -> Option<usize> {
        self.labels.as_ref().map(Labels::q)
    }

    /// Input row (0-based) of each stored document.
    pub fn source_rows(&self) -> &[usize] {
        &self.source_rows
    }

    /// Input rows (0-based) dropped because their vector was all-zero.
    pub fn dropped_rows(&self) -> &[usize] {
        &self.dropped
    }
}

/// Applies `weighting`, scales every document to unit length, and drops
/// documents left all-zero.
///
/// TF-IDF multiplies each raw value by `ln(n_docs / df_t)`, so a term present
/// in every document vanishes.
pub fn build_corpus(raw: &RawMatrix, labels: Option<Labels>, weighting: Weighting) -> Result<Corpus> {
    if raw.rows.len() != raw.n_docs {
        return Err(Error::LengthMismatch {
            expected: raw.n_docs,
            found: raw.rows.len(),
        });
    }
    let idf: Option<Vec<f64>> = match weighting {
        Weighting::None => None,
        Weighting::TfIdf => {
            let n = raw.n_docs as f64;
            Some(
                raw.document_frequencies()
                    .into_iter()
                    .map(|df| if df == 0 { 0.0 } else { (n / df as f64).ln() })
                    .collect(),
            )
        }
    };
    let vectors = raw
        .rows
        .iter()
        .map(|row| {
            SparseVector::from_pairs(row.iter().map(|&(t, v)| {
                let w = idf.as_ref().map_or(1.0, |idf| idf[t as usize]);
                (t, v * w)
            }))
        })
        .collect();
    Corpus::from_vectors(vectors, raw.n_terms, labels)
}
