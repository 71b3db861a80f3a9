//! Turning raw documents into embedding matrices.
//!
//! Three bag-of-words weightings (raw counts, term frequency, tf-idf) plus
//! dense document embeddings obtained by averaging pretrained word vectors.
//! All routes produce an [`EmbeddingMatrix`] whose rows line up with the
//! corpus documents.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use ndarray::{Array2, Axis};

use crate::error::{Error, Result};

/// One document: a stable id, its raw text, and an optional ground-truth label.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    pub text: String,
    pub label: Option<String>,
}

/// An ordered collection of documents with unique, non-empty ids.
///
/// Labels are all-or-none: either every document carries one or none does.
#[derive(Debug, Clone)]
pub struct Corpus {
    docs: Vec<Document>,
}

impl Corpus {
    pub fn new(docs: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        let labeled = docs.iter().filter(|d| d.label.is_some()).count();
        for doc in &docs {
            if doc.id.is_empty() {
                return Err(Error::InvalidParameter("empty doc id".into()));
            }
            if !seen.insert(doc.id.clone()) {
                return Err(Error::DuplicateDocId(doc.id.clone()));
            }
        }
        if labeled != 0 && labeled != docs.len() {
            let missing = docs
                .iter()
                .find(|d| d.label.is_none())
                .expect("some doc lacks a label");
            return Err(Error::MissingLabel(missing.id.clone()));
        }
        Ok(Corpus { docs })
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.docs.iter().map(|d| d.id.clone()).collect()
    }

    /// Ground-truth labels in document order, if the corpus carries them.
    pub fn labels(&self) -> Option<Vec<String>> {
        if self.docs.iter().all(|d| d.label.is_some()) && !self.docs.is_empty() {
            Some(
                self.docs
                    .iter()
                    .map(|d| d.label.clone().expect("checked above"))
                    .collect(),
            )
        } else {
            None
        }
    }
}

/// A dense n x m document-embedding matrix with row ids.
///
/// `normalized` records whether every row is known to have unit L2 norm.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    pub ids: Vec<String>,
    pub values: Array2<f64>,
    pub normalized: bool,
}

impl EmbeddingMatrix {
    pub fn new(ids: Vec<String>, values: Array2<f64>) -> Result<Self> {
        if ids.len() != values.nrows() {
            return Err(Error::LengthMismatch {
                left: ids.len(),
                right: values.nrows(),
            });
        }
        Ok(EmbeddingMatrix {
            ids,
            values,
            normalized: false,
        })
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn dims(&self) -> usize {
        self.values.ncols()
    }

    /// Rescale every row to unit L2 norm. A zero row cannot be normalized and
    /// is reported by index.
    pub fn l2_normalize(&self) -> Result<EmbeddingMatrix> {
        let mut values = self.values.clone();
        for (index, mut row) in values.axis_iter_mut(Axis(0)).enumerate() {
            let norm = row.dot(&row).sqrt();
            if norm <= 0.0 || !norm.is_finite() {
                return Err(Error::ZeroRow { index });
            }
            row.mapv_inplace(|v| v / norm);
        }
        Ok(EmbeddingMatrix {
            ids: self.ids.clone(),
            values,
            normalized: true,
        })
    }
}

/// Lowercase a text and split it on non-alphanumeric characters.
///
/// `"Dog dog, cat!"` becomes `["dog", "dog", "cat"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|ch: char| !ch.is_alphanumeric())
        .filter(|tok| !tok.is_empty())
        .map(str::to_string)
        .collect()
}

fn sorted_vocabulary(token_lists: &[Vec<String>]) -> BTreeMap<String, usize> {
    let mut vocab = BTreeMap::new();
    for tokens in token_lists {
        for tok in tokens {
            let next = vocab.len();
            vocab.entry(tok.clone()).or_insert(next);
        }
    }
    // BTreeMap iterates in sorted key order; re-number columns to match.
    vocab
        .keys()
        .cloned()
        .enumerate()
        .map(|(col, tok)| (tok, col))
        .collect()
}

/// Raw token counts over the sorted corpus vocabulary, one row per document.
pub fn count_matrix(corpus: &Corpus) -> Result<EmbeddingMatrix> {
    let token_lists: Vec<Vec<String>> = corpus.docs().iter().map(|d| tokenize(&d.text)).collect();
    let vocab = sorted_vocabulary(&token_lists);
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let mut values = Array2::zeros((corpus.len(), vocab.len()));
    for (row, tokens) in token_lists.iter().enumerate() {
        for tok in tokens {
            let col = vocab[tok];
            values[[row, col]] += 1.0;
        }
    }
    EmbeddingMatrix::new(corpus.ids(), values)
}

/// Term frequencies: each count row divided by its sum. Rows of documents
/// without tokens stay zero.
pub fn tf_matrix(corpus: &Corpus) -> Result<EmbeddingMatrix> {
    let counts = count_matrix(corpus)?;
    let mut values = counts.values;
    for mut row in values.axis_iter_mut(Axis(0)) {
        let total: f64 = row.sum();
        if total > 0.0 {
            row.mapv_inplace(|v| v / total);
        }
    }
    EmbeddingMatrix::new(counts.ids, values)
}

/// Smoothed tf-idf: term frequency times `ln((1 + n) / (1 + df)) + 1`, where
/// `df` counts the documents containing the term.
pub fn tfidf_matrix(corpus: &Corpus) -> Result<EmbeddingMatrix> {
    let tf = tf_matrix(corpus)?;
    let n = tf.rows() as f64;
    let mut values = tf.values;
    for col in 0..values.ncols() {
        let df = values.column(col).iter().filter(|&&v| v > 0.0).count() as f64;
        let idf = ((1.0 + n) / (1.0 + df)).ln() + 1.0;
        values.column_mut(col).mapv_inplace(|v| v * idf);
    }
    EmbeddingMatrix::new(tf.ids, values)
}

/// A table of pretrained word vectors with a uniform dimensionality.
#[derive(Debug, Clone)]
pub struct WordVectors {
    map: HashMap<String, Vec<f64>>,
    dims: usize,
}

impl WordVectors {
    pub fn new(map: HashMap<String, Vec<f64>>) -> Result<Self> {
        let mut dims = None;
        for (token, vector) in &map {
            match dims {
                None => dims = Some(vector.len()),
                Some(expected) if vector.len() != expected => {
                    return Err(Error::WordVectorDim {
                        token: token.clone(),
                        expected,
                        got: vector.len(),
                    });
                }
                _ => {}
            }
        }
        let dims = dims.ok_or_else(|| Error::InvalidParameter("empty word-vector table".into()))?;
        if dims == 0 {
            return Err(Error::InvalidParameter(
                "word vectors must have at least one dimension".into(),
            ));
        }
        Ok(WordVectors { map, dims })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.map.get(token).map(Vec::as_slice)
    }
}

/// Embed each document as the mean of its tokens' word vectors (token
/// occurrences count), then normalize rows to unit norm.
///
/// A document with no covered tokens, or whose token vectors average out to
/// zero, is rejected by id.
pub fn embed_documents(corpus: &Corpus, vectors: &WordVectors) -> Result<EmbeddingMatrix> {
    let dims = vectors.dims();
    let mut values = Array2::zeros((corpus.len(), dims));
    for (row, doc) in corpus.docs().iter().enumerate() {
        let mut sum = vec![0.0; dims];
        let mut covered = 0usize;
        for tok in tokenize(&doc.text) {
            if let Some(vector) = vectors.get(&tok) {
                for (acc, v) in sum.iter_mut().zip(vector) {
                    *acc += v;
                }
                covered += 1;
            }
        }
        if covered == 0 {
            return Err(Error::NoCoveredTokens {
                doc_id: doc.id.clone(),
            });
        }
        let mean: Vec<f64> = sum.iter().map(|v| v / covered as f64).collect();
        let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(Error::ZeroMeanVector {
                doc_id: doc.id.clone(),
            });
        }
        for (col, v) in mean.iter().enumerate() {
            values[[row, col]] = v / norm;
        }
    }
    Ok(EmbeddingMatrix {
        ids: corpus.ids(),
        values,
        normalized: true,
    })
}

/// Read a corpus from a CSV file with header `id,text` or `id,text,label`.
pub fn load_corpus_csv(path: &Path) -> Result<Corpus> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let fields: Vec<&str> = headers.iter().collect();
    let has_label = match fields.as_slice() {
        ["id", "text"] => false,
        ["id", "text", "label"] => true,
        _ => {
            return Err(Error::Malformed {
                path: display,
                msg: format!("expected header id,text[,label], got {}", fields.join(",")),
            });
        }
    };
    let mut docs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let id = record.get(0).unwrap_or("").to_string();
        let text = record.get(1).unwrap_or("").to_string();
        let label = if has_label {
            let value = record.get(2).unwrap_or("").to_string();
            if value.is_empty() {
                return Err(Error::MissingLabel(id));
            }
            Some(value)
        } else {
            None
        };
        docs.push(Document { id, text, label });
    }
    if docs.is_empty() {
        return Err(Error::Malformed {
            path: display,
            msg: "no documents".into(),
        });
    }
    Corpus::new(docs)
}

/// Read a label file with header `id,label`, mapping doc id to label.
pub fn load_labels_csv(path: &Path) -> Result<HashMap<String, String>> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let fields: Vec<&str> = reader.headers()?.iter().collect();
    if fields != ["id", "label"] {
        return Err(Error::Malformed {
            path: display,
            msg: format!("expected header id,label, got {}", fields.join(",")),
        });
    }
    let mut labels = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let id = record.get(0).unwrap_or("").to_string();
        let label = record.get(1).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(Error::MissingLabel(id));
        }
        if labels.insert(id.clone(), label).is_some() {
            return Err(Error::DuplicateDocId(id));
        }
    }
    Ok(labels)
}

/// Read a word-vector text file: one `token v1 v2 ... vm` line per token,
/// whitespace separated.
pub fn load_word_vectors(path: &Path) -> Result<WordVectors> {
    let display = path.display().to_string();
    let content = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let token = parts
            .next()
            .expect("non-empty line has a first field")
            .to_string();
        let vector: Vec<f64> = parts
            .map(|p| {
                p.parse::<f64>().map_err(|_| Error::Malformed {
                    path: display.clone(),
                    msg: format!("line {}: bad float {p:?}", lineno + 1),
                })
            })
            .collect::<Result<_>>()?;
        if vector.is_empty() {
            return Err(Error::Malformed {
                path: display,
                msg: format!("line {}: token {token:?} has no values", lineno + 1),
            });
        }
        map.insert(token, vector);
    }
    WordVectors::new(map)
}

/// Read a precomputed embedding matrix from a CSV file with header
/// `id,d0,d1,...`.
pub fn load_embedding_csv(path: &Path) -> Result<EmbeddingMatrix> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let fields: Vec<&str> = headers.iter().collect();
    if fields.first() != Some(&"id") || fields.len() < 2 {
        return Err(Error::Malformed {
            path: display,
            msg: format!(
                "expected header id,d0,d1,..., got {}",
                fields.join(",")
            ),
        });
    }
    for (i, field) in fields[1..].iter().enumerate() {
        if *field != format!("d{i}") {
            return Err(Error::Malformed {
                path: display,
                msg: format!("expected column d{i}, got {field}"),
            });
        }
    }
    let dims = fields.len() - 1;
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record?;
        ids.push(record.get(0).unwrap_or("").to_string());
        for value in record.iter().skip(1) {
            data.push(value.parse::<f64>().map_err(|_| Error::Malformed {
                path: display.clone(),
                msg: format!("bad float {value:?}"),
            })?);
        }
    }
    if ids.is_empty() {
        return Err(Error::Malformed {
            path: display,
            msg: "no rows".into(),
        });
    }
    let values = Array2::from_shape_vec((ids.len(), dims), data)
        .expect("row-major data matches shape");
    let mut seen = HashSet::new();
    for id in &ids {
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDocId(id.clone()));
        }
    }
    EmbeddingMatrix::new(ids, values)
}
