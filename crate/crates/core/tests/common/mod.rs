//! Dense reference implementations and synthetic corpora shared by the
//! integration tests. Nothing here calls into the sparse code paths it checks.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reviewclf::{Label, LabeledCorpus, ReviewRecord, TaskKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random token lists: up to `max_docs` documents over a pool of at most
/// `max_terms` distinct alphanumeric tokens. Some documents are empty.
pub fn random_token_lists(seed: u64, max_docs: usize, max_terms: usize) -> Vec<Vec<String>> {
    let mut r = rng(seed);
    let n_docs = r.gen_range(1..=max_docs);
    let n_terms = r.gen_range(1..=max_terms);
    let pool: Vec<String> = (0..n_terms).map(|i| format!("t{i:03}")).collect();
    (0..n_docs)
        .map(|_| {
            let len = if r.gen_bool(0.08) { 0 } else { r.gen_range(1..40) };
            // Zipf-ish: low ids are frequent.
            (0..len)
                .map(|_| {
                    let u: f64 = r.gen();
                    pool[((u * u) * n_terms as f64) as usize % n_terms].clone()
                })
                .collect()
        })
        .collect()
}

pub struct DenseFeatures {
    pub vocab: Vec<String>,
    pub counts: Vec<Vec<f64>>,
    pub idf: Vec<f64>,
    pub tfidf: Vec<Vec<f64>>,
}

/// Straight-line dense computation of vocabulary, counts, idf and tf-idf.
pub fn dense_features(docs: &[Vec<String>]) -> DenseFeatures {
    let mut vocab: Vec<String> = docs.iter().flatten().cloned().collect();
    vocab.sort();
    vocab.dedup();
    let v = vocab.len();

    let mut counts = vec![vec![0.0; v]; docs.len()];
    for (i, d) in docs.iter().enumerate() {
        for t in d {
            let j = vocab.iter().position(|w| w == t).unwrap();
            counts[i][j] += 1.0;
        }
    }

    let n = docs.len() as f64;
    let idf: Vec<f64> = (0..v)
        .map(|j| {
            let df = counts.iter().filter(|row| row[j] > 0.0).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect();

    let tfidf = counts
        .iter()
        .map(|row| {
            let len: f64 = row.iter().sum();
            if len == 0.0 {
                return vec![0.0; v];
            }
            let w: Vec<f64> = row.iter().zip(&idf).map(|(c, f)| c / len * f).collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            w.iter().map(|x| x / norm).collect()
        })
        .collect();

    DenseFeatures {
        vocab,
        counts,
        idf,
        tfidf,
    }
}

pub struct DenseNb {
    pub log_prior: Vec<f64>,
    pub log_likelihood: Vec<Vec<f64>>,
}

/// Multinomial NB parameters by direct summation. `y` holds class indices.
pub fn dense_nb(x: &[Vec<f64>], y: &[usize], k: usize, alpha: f64) -> DenseNb {
    let v = x.first().map_or(0, |r| r.len());
    let n = y.len() as f64;
    let mut log_prior = Vec::new();
    let mut log_likelihood = Vec::new();
    for c in 0..k {
        let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, &yc)| yc == c).map(|(r, _)| r).collect();
        log_prior.push((rows.len() as f64 / n).ln());
        let s: Vec<f64> = (0..v).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
        let total: f64 = s.iter().sum();
        log_likelihood.push(
            s.iter()
                .map(|&sj| ((sj + alpha) / (total + alpha * v as f64)).ln())
                .collect(),
        );
    }
    DenseNb {
        log_prior,
        log_likelihood,
    }
}

impl DenseNb {
    /// Argmax over classes by exhaustive score enumeration, lowest index on ties.
    pub fn predict(&self, row: &[f64]) -> usize {
        let scores: Vec<f64> = self
            .log_prior
            .iter()
            .zip(&self.log_likelihood)
            .map(|(lp, ll)| lp + row.iter().zip(ll).map(|(x, l)| x * l).sum::<f64>())
            .collect();
        let mut best = 0;
        for c in 1..scores.len() {
            if scores[c] > scores[best] {
                best = c;
            }
        }
        best
    }
}

fn words(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{}", to_letters(i))).collect()
}

fn to_letters(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            break;
        }
    }
    s
}

/// Two-class corpus that is linearly separable by construction: every
/// document carries at least one token from its class's private pool plus
/// shared filler tokens.
pub fn separable_corpus(seed: u64, n: usize) -> LabeledCorpus {
    let mut r = rng(seed);
    let pos = words("good", 15);
    let neg = words("bad", 15);
    let filler = words("meh", 40);
    let mut texts = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 0;
        let pool = if positive { &pos } else { &neg };
        let mut toks: Vec<&String> = (0..3).map(|_| pool.choose(&mut r).unwrap()).collect();
        toks.extend((0..5).map(|_| filler.choose(&mut r).unwrap()));
        toks.shuffle(&mut r);
        texts.push(toks.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(" "));
        labels.push(if positive { Label::Positive } else { Label::Negative });
    }
    LabeledCorpus::new(texts, labels, TaskKind::PosNeg).unwrap()
}

/// Star-rated reviews whose vocabulary overlaps between neighbouring ratings.
///
/// A review rated `s` draws sentiment tokens from group `s` with probability
/// 0.5 and from groups `s ± 1` otherwise (reflected at the ends), interleaved
/// with neutral tokens shared by every rating.
pub fn ordinal_records(seed: u64, n: usize) -> Vec<ReviewRecord> {
    let mut r = rng(seed);
    let groups: Vec<Vec<String>> = (1..=5).map(|g| words(&format!("lvl{g}w"), 12)).collect();
    let neutral = words("plain", 60);
    (0..n)
        .map(|i| {
            let stars = r.gen_range(1..=5u8);
            let mut toks: Vec<&str> = Vec::new();
            for _ in 0..6 {
                let u: f64 = r.gen();
                let g = if u < 0.5 {
                    stars as i32
                } else if u < 0.75 {
                    stars as i32 - 1
                } else {
                    stars as i32 + 1
                };
                let g = match g {
                    0 => 2,
                    6 => 4,
                    g => g,
                };
                toks.push(groups[(g - 1) as usize].choose(&mut r).unwrap());
            }
            for _ in 0..8 {
                toks.push(neutral.choose(&mut r).unwrap());
            }
            toks.shuffle(&mut r);
            ReviewRecord {
                text: toks.join(" "),
                stars,
                source_line: i + 1,
            }
        })
        .collect()
}

/// Render records as JSON lines.
pub fn to_jsonl(records: &[ReviewRecord]) -> String {
    records
        .iter()
        .map(|r| {
            serde_json::json!({"review_id": format!("r{}", r.source_line), "stars": r.stars, "text": r.text})
                .to_string()
                + "\n"
        })
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
