//! The generative invariant registry. Each entry runs one module invariant
//! over freshly generated cases; the acceptance suite executes all of them.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::Rng;

use anxlex_core::analysis::{
    aoa_class_shares, aoa_distribution, correlation_matrix, join_lexicons, CorrelationMethod,
    AoaRecord, ScoreTable,
};
use anxlex_core::annotation::{aggregate, qc_filter, GoldItem, GoldSet, PipelineConfig, ResponseRecord};
use anxlex_core::arcs::{evaluate, gold_arc, predicted_arc, BinSpec, Post, TextStream};
use anxlex_core::lexicon::{AnxietyScore, ClassScheme, OrdinalClass};
use anxlex_core::reliability::{
    reliability_report, shclosep, shcmp, GroupedResponses,
};
use anxlex_core::sampler::{
    generate_stream, sample_burst, BurstSpec, LabeledCorpus, MixingMode, SamplerConfig,
};
use anxlex_core::seed::unit_rng;
use anxlex_core::stats::{pearson, ranks, rmse, spearman, PairedSeries};
use anxlex_core::{Error, Lexicon};

use super::fixtures;
use super::oracles;

/// One registered invariant.
pub struct Invariant {
    pub name: &'static str,
    /// Generated cases for a full run. Statistical suite-level trends use a
    /// smaller count of independent suites; everything else runs the full
    /// 10,000.
    pub default_cases: u32,
    pub run: fn(u32),
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    if let Err(e) = runner.run(&strategy, test) {
        panic!("invariant violated: {e}");
    }
}

fn score() -> impl Strategy<Value = f64> {
    -3.0..=3.0f64
}

// ---------------------------------------------------------------------------
// lexicon
// ---------------------------------------------------------------------------

fn bin_partition_monotone(cases: u32) {
    check(
        cases,
        (score(), score(), 1usize..=40),
        |(a, b, n_bins)| {
            let scheme = ClassScheme::<f64>::equal_width(n_bins).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let bin_lo = scheme.bin_for(AnxietyScore::new(lo).unwrap());
            let bin_hi = scheme.bin_for(AnxietyScore::new(hi).unwrap());
            prop_assert!(bin_lo < n_bins && bin_hi < n_bins);
            prop_assert!(bin_lo <= bin_hi, "bins not monotone: {lo}->{bin_lo}, {hi}->{bin_hi}");
            Ok(())
        },
    );
}

/// Interval-text oracle for the seven classes, mirrored boundaries.
fn class7_oracle(v: f64) -> OrdinalClass {
    if v >= 2.5 {
        OrdinalClass::HighAnxiety
    } else if v >= 1.5 {
        OrdinalClass::ModerateAnxiety
    } else if v >= 0.5 {
        OrdinalClass::SlightAnxiety
    } else if v > -0.5 {
        OrdinalClass::Neither
    } else if v > -1.5 {
        OrdinalClass::SlightCalmness
    } else if v > -2.5 {
        OrdinalClass::ModerateCalmness
    } else {
        OrdinalClass::HighCalmness
    }
}

fn class7_total_and_consistent(cases: u32) {
    check(cases, score(), |v| {
        let class = AnxietyScore::new(v).unwrap().class7();
        prop_assert_eq!(class, class7_oracle(v));
        Ok(())
    });
}

fn lexicon_strategy() -> impl Strategy<Value = Lexicon> {
    prop::collection::btree_map(0u32..5000, score(), 1..30).prop_map(|terms| {
        Lexicon::from_entries(
            "generated",
            terms.into_iter().map(|(i, v)| (format!("term{i}"), v)),
        )
        .unwrap()
    })
}

fn tsv_round_trip(cases: u32) {
    check(cases, lexicon_strategy(), |lexicon| {
        let mut buf = Vec::new();
        lexicon.write_tsv(&mut buf, &["generated".into()]).unwrap();
        let reread = Lexicon::from_tsv(buf.as_slice(), "generated").unwrap();
        prop_assert_eq!(lexicon, reread);
        Ok(())
    });
}

fn class_distribution_sums(cases: u32) {
    check(cases, lexicon_strategy(), |lexicon| {
        let dist = lexicon.class_distribution().unwrap();
        let count_total: usize = dist.rows.iter().map(|r| r.count).sum();
        let pct_total: f64 = dist.rows.iter().map(|r| r.percentage).sum();
        prop_assert_eq!(count_total, lexicon.len());
        prop_assert!((pct_total - 100.0).abs() < 1e-9);
        Ok(())
    });
}

// ---------------------------------------------------------------------------
// annotation
// ---------------------------------------------------------------------------

type RawResponses = Vec<(u8, u8, i8)>;

fn responses_strategy() -> impl Strategy<Value = Vec<ResponseRecord>> {
    prop::collection::vec((0u8..8, 0u8..6, -3i8..=3), 0..40).prop_map(|raw: RawResponses| {
        raw.into_iter()
            .map(|(t, a, r)| {
                ResponseRecord::new(&format!("term{t}"), &format!("ann{a}"), r as i64).unwrap()
            })
            .collect()
    })
}

fn golds_strategy() -> impl Strategy<Value = GoldSet> {
    prop::collection::btree_map(0u8..8, (-3i8..=3, any::<bool>()), 0..4).prop_map(|items| {
        let mut set = GoldSet::new();
        for (t, (expected, popup)) in items {
            set.insert(GoldItem::new(&format!("term{t}"), expected as i64, popup).unwrap())
                .unwrap();
        }
        set
    })
}

fn qc_config_strategy() -> impl Strategy<Value = PipelineConfig> {
    (0.1f64..=1.0, 0u8..=2, any::<bool>()).prop_map(|(threshold, tolerance, include)| {
        PipelineConfig {
            gold_accuracy_threshold: threshold,
            gold_tolerance: tolerance,
            include_golds_in_aggregation: include,
        }
    })
}

fn qc_idempotent(cases: u32) {
    check(
        cases,
        (responses_strategy(), golds_strategy(), qc_config_strategy()),
        |(responses, golds, cfg)| {
            let once = qc_filter(&responses, &golds, &cfg);
            let twice = qc_filter(&once.kept, &golds, &cfg);
            prop_assert_eq!(&once.kept, &twice.kept);
            Ok(())
        },
    );
}

fn aggregate_mean_bounds(cases: u32) {
    check(cases, responses_strategy(), |responses| {
        let (lexicon, _) = aggregate::<f64>(&responses, "t").unwrap();
        for entry in lexicon.iter() {
            let ratings: Vec<i8> = responses
                .iter()
                .filter(|r| r.term == entry.term())
                .map(|r| r.rating)
                .collect();
            let min = *ratings.iter().min().unwrap() as f64;
            let max = *ratings.iter().max().unwrap() as f64;
            let mean = entry.score().value();
            prop_assert!(mean >= min - 1e-12 && mean <= max + 1e-12);
        }
        Ok(())
    });
}

fn aggregate_permutation_invariant(cases: u32) {
    check(
        cases,
        (responses_strategy(), any::<u64>()),
        |(responses, shuffle_seed)| {
            let (expected, _) = aggregate::<f64>(&responses, "t").unwrap();
            let mut shuffled = responses;
            shuffled.shuffle(&mut unit_rng(shuffle_seed, 0));
            let (actual, _) = aggregate::<f64>(&shuffled, "t").unwrap();
            prop_assert_eq!(expected, actual);
            Ok(())
        },
    );
}

fn discard_completeness(cases: u32) {
    check(
        cases,
        (responses_strategy(), golds_strategy(), qc_config_strategy()),
        |(responses, golds, cfg)| {
            let outcome = qc_filter(&responses, &golds, &cfg);
            for stats in outcome.stats.iter().filter(|s| s.discarded) {
                prop_assert!(
                    outcome.kept.iter().all(|r| r.annotator != stats.annotator),
                    "response from discarded annotator {} survived",
                    stats.annotator
                );
            }
            Ok(())
        },
    );
}

// ---------------------------------------------------------------------------
// reliability
// ---------------------------------------------------------------------------

/// Grouped responses with at least two eligible terms. Two anchor terms with
/// constant, distinct ratings keep split-trial correlations well defined.
fn grouped_strategy() -> impl Strategy<Value = GroupedResponses> {
    prop::collection::vec(prop::collection::vec(-3i8..=3, 2..6), 0..5).prop_map(|terms| {
        let mut records = Vec::new();
        for (t, ratings) in terms.iter().enumerate() {
            for (a, &r) in ratings.iter().enumerate() {
                records.push(
                    ResponseRecord::new(&format!("term{t}"), &format!("ann{a}"), r as i64)
                        .unwrap(),
                );
            }
        }
        for (term, rating) in [("anchorlow", -2i64), ("anchorhigh", 2)] {
            for a in 0..3 {
                records.push(ResponseRecord::new(term, &format!("ann{a}"), rating).unwrap());
            }
        }
        GroupedResponses::from_records(&records)
    })
}

fn shclosep_monotone(cases: u32) {
    check(
        cases,
        (grouped_strategy(), 0.05f64..3.0, 0.0f64..3.0, any::<u64>()),
        |(grouped, t1, dt, seed)| {
            let t2 = t1 + dt;
            let lo = shclosep::<f64>(&grouped, t1, 8, seed).unwrap();
            let hi = shclosep::<f64>(&grouped, t2, 8, seed).unwrap();
            prop_assert!(lo <= hi, "SHCloseP({t1})={lo} > SHCloseP({t2})={hi}");
            Ok(())
        },
    );
}

fn shcmp_nested_coarsening(cases: u32) {
    check(
        cases,
        (grouped_strategy(), 1usize..=6, 2usize..=4, any::<u64>()),
        |(grouped, n, mult, seed)| {
            let coarse = ClassScheme::equal_width(n).unwrap();
            let fine = ClassScheme::equal_width(n * mult).unwrap();
            let c = shcmp::<f64>(&grouped, &coarse, 8, seed).unwrap();
            let f = shcmp::<f64>(&grouped, &fine, 8, seed).unwrap();
            prop_assert!(
                c >= f,
                "SHCMP({n} bins)={c} < SHCMP({} bins)={f} despite nesting",
                n * mult
            );
            Ok(())
        },
    );
}

fn reliability_determinism(cases: u32) {
    // trial counts both below and above the internal parallel cutoff
    let trials = prop_oneof![9 => 4usize..=10, 1 => Just(40usize)];
    check(
        cases,
        (grouped_strategy(), trials, any::<u64>()),
        |(grouped, n_trials, seed)| {
            let a = reliability_report::<f64>(&grouped, &[2, 7], &[0.5], n_trials, seed).unwrap();
            let b = reliability_report::<f64>(&grouped, &[2, 7], &[0.5], n_trials, seed).unwrap();
            prop_assert_eq!(a.shr_spearman.to_bits(), b.shr_spearman.to_bits());
            prop_assert_eq!(a.shr_pearson.to_bits(), b.shr_pearson.to_bits());
            for (ra, rb) in a.scheme_rows.iter().zip(&b.scheme_rows) {
                prop_assert_eq!(ra.shcmp.to_bits(), rb.shcmp.to_bits());
                prop_assert_eq!(ra.shclosep.to_bits(), rb.shclosep.to_bits());
            }
            prop_assert_eq!(
                a.custom_thresholds[0].shclosep.to_bits(),
                b.custom_thresholds[0].shclosep.to_bits()
            );
            Ok(())
        },
    );
}

fn boundary_closeness_beats_class_match(cases: u32) {
    // Ratings straddling a 3-bin boundary: for every trial seed, closeness at
    // the bin width must exceed the class-match rate.
    check(cases, any::<u64>(), |seed| {
        let mut records = Vec::new();
        for t in 0..12 {
            records.push(ResponseRecord::new(&format!("edge{t}"), "a", 0).unwrap());
            records.push(ResponseRecord::new(&format!("edge{t}"), "b", 1).unwrap());
        }
        for t in 0..4 {
            let r = (t % 7) as i64 - 3;
            records.push(ResponseRecord::new(&format!("stable{t}"), "a", r).unwrap());
            records.push(ResponseRecord::new(&format!("stable{t}"), "b", r).unwrap());
        }
        let grouped = GroupedResponses::from_records(&records);
        let scheme = ClassScheme::equal_width(3).unwrap();
        let cmp = shcmp::<f64>(&grouped, &scheme, 10, seed).unwrap();
        let close = shclosep::<f64>(&grouped, scheme.bin_width(), 10, seed).unwrap();
        prop_assert!(close > cmp, "close {close} <= cmp {cmp} at seed {seed}");
        Ok(())
    });
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

/// Values from a quarter-unit grid so that cubing stays exact and introduces
/// no new ties.
fn grid_series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=15)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-12i32..=12, n),
                prop::collection::vec(-12i32..=12, n),
            )
        })
        .prop_map(|(xs, ys)| {
            (
                xs.into_iter().map(|k| k as f64 / 4.0).collect(),
                ys.into_iter().map(|k| k as f64 / 4.0).collect(),
            )
        })
}

fn not_all_equal(values: &[f64]) -> bool {
    values.iter().any(|&v| v != values[0])
}

fn spearman_monotone_invariant(cases: u32) {
    check(cases, grid_series(), |(xs, ys)| {
        prop_assume!(not_all_equal(&xs) && not_all_equal(&ys));
        let base = spearman(&PairedSeries::new(xs.clone(), ys.clone()).unwrap()).unwrap();
        let cubed: Vec<f64> = xs.iter().map(|&x| x * x * x).collect();
        let transformed =
            spearman(&PairedSeries::new(cubed, ys.clone()).unwrap()).unwrap();
        prop_assert_eq!(base, transformed);
        let negated: Vec<f64> = xs.iter().map(|&x| -x).collect();
        let flipped = spearman(&PairedSeries::new(negated, ys).unwrap()).unwrap();
        prop_assert_eq!(base, -flipped);
        Ok(())
    });
}

fn pearson_affine_invariant(cases: u32) {
    check(
        cases,
        (grid_series(), 0.1f64..=8.0, -5.0f64..=5.0),
        |((xs, ys), a, b)| {
            prop_assume!(not_all_equal(&xs) && not_all_equal(&ys));
            let base = pearson(&PairedSeries::new(xs.clone(), ys.clone()).unwrap()).unwrap();
            let mapped: Vec<f64> = xs.iter().map(|&x| a * x + b).collect();
            let transformed = pearson(&PairedSeries::new(mapped, ys).unwrap()).unwrap();
            prop_assert!(
                (base - transformed).abs() < 1e-9,
                "affine transform moved r from {base} to {transformed}"
            );
            Ok(())
        },
    );
}

fn correlation_bounded(cases: u32) {
    check(cases, grid_series(), |(xs, ys)| {
        prop_assume!(not_all_equal(&xs) && not_all_equal(&ys));
        let series = PairedSeries::new(xs, ys).unwrap();
        let rho = spearman(&series).unwrap();
        let r = pearson(&series).unwrap();
        prop_assert!(rho.abs() <= 1.0 + 1e-12);
        prop_assert!(r.abs() <= 1.0 + 1e-12);
        Ok(())
    });
}

fn float_series() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=20)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(-100.0f64..=100.0, n),
                prop::collection::vec(-100.0f64..=100.0, n),
            )
        })
}

fn stats_oracle_equivalence(cases: u32) {
    check(cases, float_series(), |(xs, ys)| {
        let r = ranks(&xs).unwrap();
        let r_oracle = oracles::ranks_bruteforce(&xs);
        for (a, b) in r.iter().zip(&r_oracle) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assume!(not_all_equal(&xs) && not_all_equal(&ys));
        let series = PairedSeries::new(xs.clone(), ys.clone()).unwrap();
        prop_assert!((pearson(&series).unwrap() - oracles::pearson_direct(&xs, &ys)).abs() < 1e-9);
        prop_assert!(
            (spearman(&series).unwrap() - oracles::spearman_direct(&xs, &ys)).abs() < 1e-9
        );
        prop_assert!((rmse(&series).unwrap() - oracles::rmse_direct(&xs, &ys)).abs() < 1e-9);
        Ok(())
    });
}

// ---------------------------------------------------------------------------
// arcs
// ---------------------------------------------------------------------------

fn arc_vocab_lexicon() -> Lexicon {
    // seven scored words; w7..w9 stay out of the lexicon
    Lexicon::from_entries(
        "vocab",
        (0..7).map(|i| (format!("w{i}"), i as f64 - 3.0)),
    )
    .unwrap()
}

fn arc_stream_strategy(min_len: usize, max_len: usize) -> impl Strategy<Value = TextStream<f64>> {
    prop::collection::vec(
        (prop::collection::vec(0u8..10, 1..5), prop::bool::ANY),
        min_len..=max_len,
    )
    .prop_map(|posts| {
        let posts = posts
            .into_iter()
            .map(|(words, label)| {
                let text: Vec<String> = words.iter().map(|w| format!("w{w}")).collect();
                Post::new(&text.join(" "), Some(if label { 1.0 } else { 0.0 }), None)
            })
            .collect();
        TextStream::new("generated", posts)
    })
}

fn arc_window_structure(cases: u32) {
    check(
        cases,
        arc_stream_strategy(1, 40).prop_flat_map(|stream| {
            let len = stream.len();
            (Just(stream), 1..=len)
        }),
        |(stream, k)| {
            let rolling = gold_arc(&stream, &BinSpec::rolling(k).unwrap()).unwrap();
            prop_assert_eq!(rolling.len(), stream.len() - k + 1);
            let partition = gold_arc(&stream, &BinSpec::non_overlapping(k).unwrap()).unwrap();
            prop_assert_eq!(partition.len(), stream.len() / k);
            // non-overlapping bins cover each in-scope post exactly once
            let covered: usize = partition.points.iter().map(|p| p.coverage).sum();
            prop_assert_eq!(covered, (stream.len() / k) * k);
            Ok(())
        },
    );
}

fn arc_within_bin_reorder(cases: u32) {
    check(
        cases,
        (arc_stream_strategy(4, 24), 1usize..=4, any::<u64>()),
        |(stream, k, seed)| {
            prop_assume!(stream.len() >= k);
            let spec = BinSpec::non_overlapping(k).unwrap();
            let lexicon = arc_vocab_lexicon();
            let base = predicted_arc(&stream, &lexicon, &spec).unwrap();

            // shuffle the posts of one bin in place
            let mut rng = unit_rng(seed, 0);
            let n_bins = stream.len() / k;
            let bin = rng.random_range(0..n_bins);
            let mut posts = stream.posts().to_vec();
            posts[bin * k..(bin + 1) * k].shuffle(&mut rng);
            let shuffled = TextStream::new("shuffled", posts);
            let reordered = predicted_arc(&shuffled, &lexicon, &spec).unwrap();

            prop_assert_eq!(base.len(), reordered.len());
            for (a, b) in base.points.iter().zip(&reordered.points) {
                prop_assert_eq!(a.bin_start, b.bin_start);
                prop_assert_eq!(a.coverage, b.coverage);
                prop_assert!((a.mean - b.mean).abs() < 1e-9);
            }
            Ok(())
        },
    );
}

fn arc_scaling_invariance(cases: u32) {
    check(
        cases,
        (arc_stream_strategy(6, 24), 0.05f64..=1.0),
        |(stream, c)| {
            let spec = BinSpec::non_overlapping(2).unwrap();
            let lexicon = arc_vocab_lexicon();
            let scaled_lexicon = Lexicon::from_entries(
                "scaled",
                lexicon.iter().map(|e| (e.term().to_string(), e.score().value() * c)),
            )
            .unwrap();
            let base = predicted_arc(&stream, &lexicon, &spec).unwrap();
            let scaled = predicted_arc(&stream, &scaled_lexicon, &spec).unwrap();
            prop_assert_eq!(base.len(), scaled.len());
            for (a, b) in base.points.iter().zip(&scaled.points) {
                prop_assert!((a.mean * c - b.mean).abs() < 1e-9);
            }
            // Rank equality under scaling presumes distinct bin means: an
            // exact tie between pooled means may round apart once every
            // token score is scaled, which legitimately moves midranks.
            let mut means = base.means();
            means.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if means.windows(2).any(|w| w[0] == w[1]) {
                return Ok(());
            }
            let gold = gold_arc(&stream, &spec).unwrap();
            match (evaluate(&base, &gold, &spec), evaluate(&scaled, &gold, &spec)) {
                (Ok(a), Ok(b)) => {
                    prop_assert!((a.spearman - b.spearman).abs() < 1e-9);
                    prop_assert!((a.rmse - b.rmse).abs() < 1e-9);
                }
                (Err(_), Err(_)) => {}
                (a, b) => {
                    return Err(TestCaseError::fail(format!(
                        "evaluation diverged under scaling: {a:?} vs {b:?}"
                    )))
                }
            }
            Ok(())
        },
    );
}

fn arc_gold_zero_stream(cases: u32) {
    check(
        cases,
        (arc_stream_strategy(2, 30), 1usize..=5),
        |(stream, k)| {
            prop_assume!(stream.len() >= k);
            let zeroed: Vec<Post<f64>> = stream
                .posts()
                .iter()
                .map(|p| Post::new(p.text(), Some(0.0), None))
                .collect();
            let stream = TextStream::new("zero", zeroed);
            let arc = gold_arc(&stream, &BinSpec::rolling(k).unwrap()).unwrap();
            prop_assert!(arc.points.iter().all(|p| p.mean == 0.0));
            Ok(())
        },
    );
}

fn arc_rho_trend_small_suites(cases: u32) {
    // Suite-level statistical trend: mean correlation over a 20-stream suite
    // is non-decreasing in the bin size. Each case is one full suite.
    check(cases, any::<u64>(), |seed| {
        let world = fixtures::synthetic_world(seed);
        let cfg = SamplerConfig {
            total_length: 1500,
            n_streams: 20,
            burst_len_min: 50,
            burst_len_max: 300,
            master_seed: seed,
            ..SamplerConfig::default()
        };
        let mut means = Vec::new();
        for k in [1usize, 10, 100] {
            let spec = BinSpec::rolling(k).unwrap();
            let mut total = 0.0;
            for index in 0..cfg.n_streams {
                let sampled = generate_stream::<f64>(&world.corpus, &cfg, index).unwrap();
                let gold = gold_arc(&sampled.stream, &spec).unwrap();
                let predicted = predicted_arc(&sampled.stream, &world.lexicon, &spec).unwrap();
                total += evaluate(&predicted, &gold, &spec).unwrap().spearman;
            }
            means.push(total / cfg.n_streams as f64);
        }
        prop_assert!(
            means[0] < means[1] && means[1] < means[2],
            "mean rho not increasing over k=1,10,100: {means:?}"
        );
        Ok(())
    });
}

// ---------------------------------------------------------------------------
// sampler
// ---------------------------------------------------------------------------

fn tiny_corpus() -> LabeledCorpus<f64> {
    let mut posts = Vec::new();
    for i in 0..6 {
        posts.push(Post::new(&format!("anxious w{i}"), Some(1.0), None));
        posts.push(Post::new(&format!("calm w{i}"), Some(0.0), None));
    }
    LabeledCorpus::from_posts(&posts).unwrap()
}

fn sampler_exact_length(cases: u32) {
    check(
        cases,
        (10usize..=400, 5usize..=40, 0usize..=60, any::<u64>(), any::<bool>()),
        |(total, burst_min, burst_extra, seed, bernoulli)| {
            prop_assume!(total >= burst_min);
            let cfg = SamplerConfig {
                total_length: total,
                n_streams: 1,
                burst_len_min: burst_min,
                burst_len_max: burst_min + burst_extra,
                mixing: if bernoulli {
                    MixingMode::Bernoulli
                } else {
                    MixingMode::Exact
                },
                master_seed: seed,
            };
            let sampled = generate_stream::<f64>(&tiny_corpus(), &cfg, 0).unwrap();
            prop_assert_eq!(sampled.stream.len(), total);
            prop_assert!(sampled
                .stream
                .posts()
                .iter()
                .all(|p| p.gold_label().is_some()));
            let burst_total: usize = sampled.bursts.iter().map(|b| b.emitted_length).sum();
            prop_assert_eq!(burst_total, total);
            Ok(())
        },
    );
}

fn sampler_burst_concentration(cases: u32) {
    // 10,000 seeded bursts of 200-400 posts: the positive fraction stays
    // within 0.1 of the slope's proportion at least 99% of the time under
    // Bernoulli mixing, and always under exact mixing.
    let corpus = tiny_corpus();
    for mixing in [MixingMode::Exact, MixingMode::Bernoulli] {
        let mut within = 0u32;
        for case in 0..cases {
            let mut rng = unit_rng(811, case as u64);
            let slope: f64 = rng.random_range(-90.0..=90.0);
            let length: usize = rng.random_range(200..=400);
            let p = anxlex_core::sampler::slope_to_proportion(slope).unwrap();
            let burst =
                sample_burst(&corpus, &BurstSpec::new(slope, length).unwrap(), mixing, &mut rng)
                    .unwrap();
            let positives = burst
                .iter()
                .filter(|post| post.gold_label() == Some(1.0))
                .count();
            let fraction = positives as f64 / length as f64;
            if (fraction - p).abs() < 0.1 {
                within += 1;
            } else if mixing == MixingMode::Exact {
                panic!("exact mixing burst strayed: |{fraction} - {p}| >= 0.1");
            }
        }
        let rate = within as f64 / cases as f64;
        assert!(
            rate >= 0.99,
            "only {rate:.4} of {mixing:?} bursts landed within 0.1 of the target"
        );
    }
}

fn sampler_replacement_fills(cases: u32) {
    check(cases, (50usize..=300, any::<u64>()), |(total, seed)| {
        let posts = vec![
            Post::new("only anxious", Some(1.0), None),
            Post::new("only calm", Some(0.0), None),
        ];
        let corpus = LabeledCorpus::from_posts(&posts).unwrap();
        let cfg = SamplerConfig {
            total_length: total,
            n_streams: 1,
            burst_len_min: 10,
            burst_len_max: 50,
            master_seed: seed,
            ..SamplerConfig::default()
        };
        prop_assert_eq!(generate_stream::<f64>(&corpus, &cfg, 0).unwrap().stream.len(), total);
        Ok(())
    });
}

fn sampler_suite_determinism(cases: u32) {
    check(cases, (any::<u64>(), 0usize..4), |(seed, index)| {
        let corpus = tiny_corpus();
        let cfg = SamplerConfig {
            total_length: 150,
            n_streams: 4,
            burst_len_min: 20,
            burst_len_max: 60,
            master_seed: seed,
            ..SamplerConfig::default()
        };
        let a = generate_stream::<f64>(&corpus, &cfg, index).unwrap();
        let b = generate_stream::<f64>(&corpus, &cfg, index).unwrap();
        prop_assert_eq!(a.stream, b.stream);
        Ok(())
    });
}

// ---------------------------------------------------------------------------
// analysis
// ---------------------------------------------------------------------------

/// 2-4 resources over a shared vocabulary; two anchor terms with distinct
/// values in every resource keep the join non-empty and columns non-constant.
fn tables_strategy() -> impl Strategy<Value = Vec<ScoreTable<f64>>> {
    prop::collection::vec(
        prop::collection::btree_map(0u8..10, -3.0f64..=3.0, 0..8),
        2..=4,
    )
    .prop_map(|tables| {
        tables
            .into_iter()
            .enumerate()
            .map(|(i, terms)| {
                let mut pairs: Vec<(String, f64)> = terms
                    .into_iter()
                    .map(|(t, v)| (format!("term{t}"), v))
                    .collect();
                pairs.push(("anchorlow".into(), -2.0));
                pairs.push(("anchorhigh".into(), 2.0));
                ScoreTable::from_pairs(&format!("res{i}"), pairs)
            })
            .collect()
    })
}

fn matrix_symmetric_unit_diagonal(cases: u32) {
    check(
        cases,
        (tables_strategy(), any::<bool>()),
        |(tables, use_pearson)| {
            let join = join_lexicons(&tables).unwrap();
            let method = if use_pearson {
                CorrelationMethod::Pearson
            } else {
                CorrelationMethod::Spearman
            };
            let matrix = correlation_matrix(&join, method).unwrap();
            let k = tables.len();
            for i in 0..k {
                prop_assert_eq!(matrix.get(i, i), 1.0);
                for j in 0..k {
                    prop_assert_eq!(matrix.get(i, j), matrix.get(j, i));
                    prop_assert!(matrix.get(i, j).abs() <= 1.0 + 1e-12);
                }
            }
            Ok(())
        },
    );
}

fn join_size_bound(cases: u32) {
    check(cases, tables_strategy(), |tables| {
        let min_len = tables.iter().map(|t| t.len()).min().unwrap();
        match join_lexicons(&tables) {
            Ok(join) => prop_assert!(join.len() <= min_len),
            Err(Error::EmptyJoin) => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
        Ok(())
    });
}

fn matrix_term_order_invariance(cases: u32) {
    check(
        cases,
        (tables_strategy(), any::<u64>()),
        |(tables, seed)| {
            let join_a = join_lexicons(&tables).unwrap();
            let reshuffled: Vec<ScoreTable<f64>> = tables
                .iter()
                .enumerate()
                .map(|(i, _)| {
                    // rebuild each table with pairs inserted in shuffled order
                    let join_col: Vec<(String, f64)> = join_a
                        .rows
                        .iter()
                        .map(|r| (r.term.clone(), r.values[i]))
                        .collect();
                    let mut pairs = join_col;
                    pairs.shuffle(&mut unit_rng(seed, i as u64));
                    ScoreTable::from_pairs(&format!("res{i}"), pairs)
                })
                .collect();
            let join_b = join_lexicons(&reshuffled).unwrap();
            let ma = correlation_matrix(&join_a, CorrelationMethod::Spearman).unwrap();
            let mb = correlation_matrix(&join_b, CorrelationMethod::Spearman).unwrap();
            for i in 0..tables.len() {
                for j in 0..tables.len() {
                    prop_assert_eq!(ma.get(i, j).to_bits(), mb.get(i, j).to_bits());
                }
            }
            Ok(())
        },
    );
}

fn aoa_totals(cases: u32) {
    let lexicon_and_aoa = (
        prop::collection::btree_map(0u32..40, -3.0f64..=3.0, 1..25),
        prop::collection::btree_map(0u32..40, 0.5f64..=15.0, 1..25),
    );
    check(cases, lexicon_and_aoa, |(terms, ages)| {
        let mut entries: Vec<(String, f64)> = terms
            .into_iter()
            .map(|(t, v)| (format!("term{t}"), v))
            .collect();
        entries.push(("anchor".into(), 1.0));
        let lexicon = Lexicon::from_entries("lex", entries).unwrap();
        let mut records: Vec<AoaRecord> = ages
            .into_iter()
            .map(|(t, age)| AoaRecord::new(&format!("term{t}"), age).unwrap())
            .collect();
        records.push(AoaRecord::new("anchor", 5.0).unwrap());

        let dist = aoa_distribution(&lexicon, &records).unwrap();
        let grand: f64 = dist
            .rows
            .iter()
            .flat_map(|r| r.class_percentages.iter())
            .sum();
        prop_assert!((grand - 100.0).abs() < 1e-9, "grand total {grand}");

        for row in aoa_class_shares(&lexicon, &records).unwrap() {
            let total: f64 = row.class_shares.iter().sum();
            prop_assert!((total - 100.0).abs() < 1e-9, "row total {total}");
        }
        Ok(())
    });
}

/// Every registered invariant, in module order.
pub fn registry() -> Vec<Invariant> {
    fn entry(name: &'static str, default_cases: u32, run: fn(u32)) -> Invariant {
        Invariant {
            name,
            default_cases,
            run,
        }
    }
    vec![
        entry("lexicon/bin-partition-monotone", 10_000, bin_partition_monotone),
        entry("lexicon/class7-total-and-consistent", 10_000, class7_total_and_consistent),
        entry("lexicon/tsv-round-trip", 10_000, tsv_round_trip),
        entry("lexicon/class-distribution-sums", 10_000, class_distribution_sums),
        entry("annotation/qc-idempotent", 10_000, qc_idempotent),
        entry("annotation/aggregate-mean-bounds", 10_000, aggregate_mean_bounds),
        entry("annotation/permutation-invariance", 10_000, aggregate_permutation_invariant),
        entry("annotation/discard-completeness", 10_000, discard_completeness),
        entry("reliability/shclosep-monotone", 10_000, shclosep_monotone),
        entry("reliability/shcmp-nested-coarsening", 10_000, shcmp_nested_coarsening),
        entry("reliability/report-determinism", 10_000, reliability_determinism),
        entry(
            "reliability/boundary-closeness-beats-class-match",
            10_000,
            boundary_closeness_beats_class_match,
        ),
        entry("stats/spearman-monotone-invariant", 10_000, spearman_monotone_invariant),
        entry("stats/pearson-affine-invariant", 10_000, pearson_affine_invariant),
        entry("stats/correlation-bounded", 10_000, correlation_bounded),
        entry("stats/oracle-equivalence", 10_000, stats_oracle_equivalence),
        entry("arcs/window-structure", 10_000, arc_window_structure),
        entry("arcs/within-bin-reorder", 10_000, arc_within_bin_reorder),
        entry("arcs/scaling-invariance", 10_000, arc_scaling_invariance),
        entry("arcs/gold-zero-stream", 10_000, arc_gold_zero_stream),
        entry("arcs/rho-trend-small-suites", 25, arc_rho_trend_small_suites),
        entry("sampler/exact-length", 10_000, sampler_exact_length),
        entry("sampler/burst-concentration", 10_000, sampler_burst_concentration),
        entry("sampler/replacement-fills", 10_000, sampler_replacement_fills),
        entry("sampler/suite-determinism", 10_000, sampler_suite_determinism),
        entry("analysis/matrix-symmetric-unit-diagonal", 10_000, matrix_symmetric_unit_diagonal),
        entry("analysis/join-size-bound", 10_000, join_size_bound),
        entry("analysis/matrix-term-order-invariance", 10_000, matrix_term_order_invariance),
        entry("analysis/aoa-totals", 10_000, aoa_totals),
    ]
}
