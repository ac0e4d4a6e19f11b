//! Synthetic data builders: noisy annotation sets for the reliability suite
//! and a vocabulary/corpus pair whose positive posts carry higher-scoring
//! words, for the arc evaluation experiments.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use anxlex_core::annotation::ResponseRecord;
use anxlex_core::seed::unit_rng;
use anxlex_core::{LabeledCorpus, Lexicon, Post};

/// Annotations of `n_terms` terms by `per_term` annotators each, where every
/// rating is clamp(round(true_score + gaussian noise)). Zero noise collapses
/// to perfectly consistent ratings.
pub fn noisy_annotations(
    n_terms: usize,
    per_term: usize,
    sigma: f64,
    seed: u64,
) -> Vec<ResponseRecord> {
    let mut rng = unit_rng(seed, 0);
    let normal = if sigma > 0.0 {
        Some(Normal::new(0.0, sigma).expect("valid sigma"))
    } else {
        None
    };
    let mut records = Vec::with_capacity(n_terms * per_term);
    for t in 0..n_terms {
        let true_score: f64 = rng.random_range(-3.0..=3.0);
        for a in 0..per_term {
            let noisy = match &normal {
                Some(dist) => true_score + dist.sample(&mut rng),
                None => true_score,
            };
            let rating = noisy.round().clamp(-3.0, 3.0) as i64;
            records.push(
                ResponseRecord::new(&format!("term{t:04}"), &format!("ann{a:03}"), rating)
                    .expect("rating clamped into range"),
            );
        }
    }
    records
}

/// A synthetic lexicon and binary corpus: anxious vocabulary scores high,
/// calm vocabulary low, and positive posts draw anxious words far more often
/// than negative posts do.
pub struct SyntheticWorld {
    pub lexicon: Lexicon,
    pub corpus: LabeledCorpus,
}

pub fn synthetic_world(seed: u64) -> SyntheticWorld {
    let mut rng = unit_rng(seed, 1);
    let n_anx = 300;
    let n_calm = 300;
    let n_neutral = 400;

    let mut entries: Vec<(String, f64)> = Vec::new();
    let mut anx_vocab = Vec::new();
    let mut calm_vocab = Vec::new();
    let mut neutral_vocab = Vec::new();
    for i in 0..n_anx {
        let word = format!("anx{i:03}");
        entries.push((word.clone(), rng.random_range(0.5..=3.0)));
        anx_vocab.push(word);
    }
    for i in 0..n_calm {
        let word = format!("calm{i:03}");
        entries.push((word.clone(), rng.random_range(-3.0..=-0.5)));
        calm_vocab.push(word);
    }
    for i in 0..n_neutral {
        let word = format!("neu{i:03}");
        entries.push((word.clone(), rng.random_range(-0.4..=0.4)));
        neutral_vocab.push(word);
    }
    let lexicon = Lexicon::from_entries("synthetic", entries).expect("unique vocabulary");

    let tokens_per_post = 8;
    let mut posts = Vec::new();
    for label in [1.0f64, 0.0] {
        for _ in 0..2000 {
            let mut words = Vec::with_capacity(tokens_per_post);
            for _ in 0..tokens_per_post {
                let r: f64 = rng.random_range(0.0..1.0);
                let pool = if label == 1.0 {
                    if r < 0.5 {
                        &anx_vocab
                    } else if r < 0.8 {
                        &neutral_vocab
                    } else {
                        &calm_vocab
                    }
                } else if r < 0.5 {
                    &calm_vocab
                } else if r < 0.8 {
                    &neutral_vocab
                } else {
                    &anx_vocab
                };
                words.push(pool[rng.random_range(0..pool.len())].as_str());
            }
            posts.push(Post::new(&words.join(" "), Some(label), None));
        }
    }
    let corpus = LabeledCorpus::from_posts(&posts).expect("both pools populated");
    SyntheticWorld { lexicon, corpus }
}
