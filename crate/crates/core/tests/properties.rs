mod common;

use proptest::prelude::*;
use reviewclf::corpus::{load_data, load_records, map_label, parse_review_line, split_contiguous, OnError};
use reviewclf::features::{count_transform, fit_idf, fit_vocabulary, tfidf_transform, CsrMatrix};
use reviewclf::textproc::{is_word_char, remove_stopwords, tokenize, StopList};
use reviewclf::{Fraction, Label, TaskKind};

fn fraction() -> impl Strategy<Value = Fraction> {
    (1u64..1000, 1u64..1000).prop_filter_map("proper", |(a, b)| {
        let (n, d) = if a <= b { (a, b) } else { (b, a) };
        Fraction::new(n, d).ok()
    })
}

proptest! {
    #[test]
    fn tokens_are_two_plus_word_chars(text in "\\PC{0,80}") {
        for t in tokenize(&text) {
            prop_assert!(t.chars().count() >= 2);
            prop_assert!(t.chars().all(is_word_char));
        }
    }

    #[test]
    fn tokenize_is_stable_through_rejoin(text in "[a-zA-Z0-9 ,.!'_\\-éß]{0,80}") {
        let once = tokenize(&text);
        prop_assert_eq!(tokenize(&once.join(" ")), once);
    }

    #[test]
    fn punctuation_between_tokens_is_ignored(
        words in prop::collection::vec("[a-z0-9]{2,8}", 0..10),
        seps in prop::collection::vec("[ ,.;:!?()\"-]{1,3}", 10),
    ) {
        let plain = words.join(" ");
        let mut noisy = String::new();
        for (w, s) in words.iter().zip(&seps) {
            noisy.push_str(w);
            noisy.push_str(s);
        }
        prop_assert_eq!(tokenize(&noisy), tokenize(&plain));
    }

    #[test]
    fn stopword_removal_is_idempotent(words in prop::collection::vec("[a-z]{2,6}", 0..30)) {
        let sl = StopList::english();
        let once = remove_stopwords(words, &sl);
        prop_assert_eq!(remove_stopwords(once.clone(), &sl), once);
    }

    #[test]
    fn parse_ignores_other_fields(
        stars in 1u8..=5,
        text in "[a-z ]{0,20}",
        extra in prop::collection::btree_map("[a-z_]{1,8}", any::<i32>(), 0..5),
    ) {
        let mut obj = serde_json::Map::new();
        for (k, v) in &extra {
            if k != "text" && k != "stars" {
                obj.insert(k.clone(), (*v).into());
            }
        }
        obj.insert("stars".into(), stars.into());
        obj.insert("text".into(), text.clone().into());
        let with = parse_review_line(&serde_json::Value::Object(obj).to_string(), 3).unwrap();
        let bare = parse_review_line(&serde_json::json!({"stars": stars, "text": text}).to_string(), 3).unwrap();
        prop_assert_eq!(with, bare);
    }

    #[test]
    fn split_is_disjoint_exhaustive_ordered(n in 2usize..100_000, f in fraction()) {
        if let Ok((train, test)) = split_contiguous(n, f) {
            prop_assert_eq!(train.start, 0);
            prop_assert_eq!(train.end, test.start);
            prop_assert_eq!(test.end, n);
            prop_assert!(!train.is_empty() && !test.is_empty());
        } else {
            let cut = f.floor_mul(n);
            prop_assert!(cut == 0 || cut == n);
        }
    }

    #[test]
    fn line_partitions_recompose(
        stars in prop::collection::vec(0u8..=6, 1..40),
        cuts in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
    ) {
        let data: String = stars.iter().map(|s| format!("{{\"stars\": {s}, \"text\": \"x{s}\"}}\n")).collect();
        let n = stars.len();
        let mut bounds: Vec<usize> = cuts.iter().map(|i| i.index(n)).collect();
        bounds.push(0);
        bounds.push(n);
        bounds.sort();
        bounds.dedup();
        let whole = load_records(data.as_bytes(), 1, Some(n), OnError::Skip).unwrap();
        let mut pieces = Vec::new();
        let mut skipped = 0;
        for w in bounds.windows(2) {
            let part = load_records(data.as_bytes(), w[0] + 1, Some(w[1]), OnError::Skip).unwrap();
            skipped += part.skipped;
            pieces.extend(part.records);
        }
        prop_assert_eq!(pieces, whole.records);
        prop_assert_eq!(skipped, whole.skipped);
        let c = load_data(data.as_bytes(), 1, n, TaskKind::PosNeg, OnError::Skip).unwrap();
        prop_assert_eq!(c.len() + c.skipped, n);
    }

    #[test]
    fn vocabulary_ignores_document_order(seed in 0u64..10_000) {
        let mut docs = common::random_token_lists(seed, 20, 50);
        let a = fit_vocabulary(&docs);
        docs.reverse();
        prop_assert_eq!(fit_vocabulary(&docs), a);
    }

    #[test]
    fn scaling_a_count_row_leaves_weights_unchanged(seed in 0u64..10_000, k in 2u32..9) {
        let docs = common::random_token_lists(seed, 20, 60);
        let vocab = fit_vocabulary(&docs);
        let counts = count_transform(&docs, &vocab);
        let idf = fit_idf(&counts).unwrap();
        let w = tfidf_transform(&counts, &idf).unwrap();
        let scaled = counts.map_values(|c| c * k);
        let ws = tfidf_transform(&scaled, &idf).unwrap();
        for i in 0..w.n_rows() {
            let (ia, va) = w.row(i);
            let (ib, vb) = ws.row(i);
            prop_assert_eq!(ia, ib);
            for (a, b) in va.iter().zip(vb) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weight_rows_have_unit_norm(seed in 0u64..10_000) {
        let docs = common::random_token_lists(seed, 50, 200);
        let vocab = fit_vocabulary(&docs);
        let counts = count_transform(&docs, &vocab);
        let w = tfidf_transform(&counts, &fit_idf(&counts).unwrap()).unwrap();
        for (_, vals) in w.rows() {
            if !vals.is_empty() {
                let n = vals.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn posneg_mapping_is_monotone_and_total() {
    for a in 1..=5u8 {
        for task in [TaskKind::PosNeg, TaskKind::FiveStar] {
            assert_eq!(map_label(a, task).task_kind(), task);
        }
        for b in a..=5u8 {
            if map_label(a, TaskKind::PosNeg) == Label::Positive {
                assert_eq!(map_label(b, TaskKind::PosNeg), Label::Positive);
            }
        }
    }
}

#[test]
fn csr_rows_stay_sorted() {
    let docs = common::random_token_lists(3, 50, 200);
    let counts = count_transform(&docs, &fit_vocabulary(&docs));
    for (idx, vals) in counts.rows() {
        assert!(idx.windows(2).all(|w| w[0] < w[1]));
        assert!(vals.iter().all(|&c| c > 0));
        assert!(idx.iter().all(|&j| j < counts.n_cols()));
    }
    let empty: CsrMatrix<u32> = CsrMatrix::empty(0);
    assert_eq!(empty.n_rows(), 0);
}
