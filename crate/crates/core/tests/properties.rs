
use std::sync::OnceLock;

use oracles::{movies, random_chart, random_movie_chart, random_table, rng};
use proptest::prelude::*;
use xnli_core::dataset::typical_values;
use xnli_core::provenance::{build_trace_with, select_sample, StepOp};
use xnli_core::*;

fn fixture() -> &'static Dataset {
    static DS: OnceLock<Dataset> = OnceLock::new();
    DS.get_or_init(movies)
}

const PHRASES: &[&str] = &[
    "show", "average", "Worldwide Gross", "budget", "by", "genre", "rating", "more than", "less than",
    "100M", "after", "2005", "drama", "super hero", "movies", "low", "high", "in a bar chart",
    "how many", "correlated", "and", "gros", "budgte", "total", "between", "5", "and", "8", ",", "?",
    "IMDB Rating", "release year", "trend", "histogram", "of", "in each", "at least", "box office",
];

fn query() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(PHRASES), 1..9).prop_map(|w| w.join(" "))
}

const QUERIES: &[&str] = &[
    "show average Worldwide Gross by Genre",
    "How are Production Budget and IMDB Rating correlated?",
    "show budget less than 100M and Gross more than 100M, group by genre",
    "How many movies in each Genre whose Worldwide Gross is over 100M",
    "show the trend of Worldwide Gross over Release Year",
    "show a histogram of Running Time",
    "show IMDB Rating and Worldwide Gross for Drama movies",
];

const NOISE: &[&str] = &["please", "could", "you", "me", "i", "want", "to", "see", "the"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reload_is_deterministic(seed in any::<u64>()) {
        let ds = random_table(&mut rng(seed), 40);
        let mut csv = String::from("k,a,b,year\n");
        for row in ds.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|v| if v.is_null() { String::new() } else { v.to_string() })
                .collect();
            csv.push_str(&cells.join(","));
            csv.push('\n');
        }
        let a = load_csv(csv.as_bytes(), "t").unwrap();
        let b = load_csv(csv.as_bytes(), "t").unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.id(), b.id());
        prop_assert_eq!(a.rows(), ds.rows());
    }

    #[test]
    fn typical_values_extend_as_k_grows(seed in any::<u64>(), k in 0usize..6) {
        let ds = random_table(&mut rng(seed), 60);
        for attr in ["k", "a", "year"] {
            let short = typical_values(&ds, attr, k).unwrap();
            let long = typical_values(&ds, attr, k + 1).unwrap();
            prop_assert!(long.starts_with(&short));
        }
    }

    #[test]
    fn counts_chain_and_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ds = random_table(&mut r, 120);
        let spec = random_chart(&mut r, &ds);
        let trace = xnli_core::build_trace(&spec, &ds).unwrap();
        prop_assert_eq!(trace.steps[0].input_count, ds.row_count());
        for w in trace.steps.windows(2) {
            prop_assert_eq!(w[1].input_count, w[0].output_count);
            if w[1].op == StepOp::Filter {
                prop_assert!(w[1].output_count <= w[1].input_count);
            }
        }
        let exec = provenance::execute(&spec, &ds).unwrap();
        if let Some(i) = exec.table.columns.iter().position(|c| c == "count") {
            let total: f64 = exec.table.rows.iter().filter_map(|row| row[i].as_number()).sum();
            prop_assert_eq!(total as usize, exec.survivors().len());
        }
    }

    #[test]
    fn samples_are_sound(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let ds = random_table(&mut r, 80);
        let spec = random_chart(&mut r, &ds);
        let sample = select_sample(&spec, &ds, n).unwrap();
        prop_assert!(sample.row_ids.len() <= n.min(ds.row_count()));
        prop_assert!(sample.row_ids.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(sample.row_ids.iter().all(|&id| id < ds.row_count()));
        let trace = build_trace_with(&spec, &ds, n).unwrap();
        let exec = provenance::execute(&spec, &ds).unwrap();
        let mut filter = 0;
        for step in &trace.steps {
            for row in &step.sample.rows {
                prop_assert!(sample.row_ids.contains(&row.id));
            }
            if step.op == StepOp::Filter {
                for row in &step.sample.rows {
                    prop_assert!(exec.alive[filter].contains(&row.id));
                    let kept = exec.alive[filter + 1].contains(&row.id);
                    prop_assert_eq!(kept, row.status == provenance::RowStatus::Kept);
                }
                filter += 1;
            }
        }
    }

    #[test]
    fn spans_are_valid(q in query()) {
        let Ok(interp) = interpret(&q, fixture(), &PreferenceStore::new()) else { return Ok(()) };
        let check = |s: &Span| s.start < s.end && s.end <= q.len() && q.is_char_boundary(s.start) && q.is_char_boundary(s.end);
        for r in &interp.attribute_refs {
            prop_assert!(r.spans.iter().all(check));
            prop_assert!(r.fuzzy.iter().all(|f| check(&f.span)));
        }
        for t in &interp.tasks {
            prop_assert!(t.spans.iter().all(check));
        }
        prop_assert!(interp.unparsed_keywords.iter().all(check));
        prop_assert!(interp.encoding_intent.spans.iter().all(check));
    }

    #[test]
    fn interpretation_roundtrips_through_json(q in query()) {
        let Ok(interp) = interpret(&q, fixture(), &PreferenceStore::new()) else { return Ok(()) };
        let json = serde_json::to_string(&interp).unwrap();
        prop_assert_eq!(serde_json::from_str::<Interpretation>(&json).unwrap(), interp);
    }

    #[test]
    fn noise_words_do_not_change_the_chart(
        q in prop::sample::select(QUERIES),
        noise in prop::collection::vec(prop::sample::select(NOISE), 1..4),
    ) {
        let ds = fixture();
        let prefs = PreferenceStore::new();
        let plain = synthesize(&interpret(q, ds, &prefs).unwrap(), ds).unwrap();
        let noisy = format!("{} {q}", noise.join(" "));
        let spec = synthesize(&interpret(&noisy, ds, &prefs).unwrap(), ds).unwrap();
        prop_assert_eq!(spec, plain);
    }

    #[test]
    fn preferences_only_touch_ambiguous_words(q in query(), pick in any::<bool>()) {
        let ds = fixture();
        let Ok(plain) = explain(&q, ds, &PreferenceStore::new()) else { return Ok(()) };
        if plain.interp.attribute_refs.iter().any(|r| r.inference == Inference::Ambiguous) {
            return Ok(());
        }
        let mut prefs = PreferenceStore::new();
        prefs.set("rating", if pick { "IMDB Rating" } else { "Content Rating" });
        prefs.set("gross", "Worldwide Gross");
        prop_assert_eq!(explain(&q, ds, &prefs).unwrap(), plain);
    }

    #[test]
    fn charts_roundtrip_through_vega_lite(seed in any::<u64>()) {
        let spec = random_movie_chart(&mut rng(seed), fixture());
        let vl = spec.to_vega_lite();
        prop_assert_eq!(ChartSpec::from_vega_lite(&vl).unwrap().conform(fixture()).unwrap(), spec.clone());
        let json = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(serde_json::from_str::<ChartSpec>(&json).unwrap().conform(fixture()).unwrap(), spec);
    }

    #[test]
    fn adjustments_are_local(seed in any::<u64>(), mark in prop::sample::select(Mark::ALL.to_vec())) {
        let ds = fixture();
        let spec = random_movie_chart(&mut rng(seed), ds);
        if let Ok(after) = apply_adjustment(&spec, &Adjustment::ChangeMark { mark }, ds, None) {
            prop_assert_eq!(after.mark, mark);
            prop_assert_eq!(&after.encodings, &spec.encodings);
            prop_assert_eq!(&after.transforms, &spec.transforms);
        }
        let add = Adjustment::AddFilter {
            field: "IMDB Rating".into(),
            operator: FilterOp::Gte,
            operands: vec![Value::Number(6.0)],
        };
        let after = apply_adjustment(&spec, &add, ds, None).unwrap();
        prop_assert_eq!(after.filters().count(), spec.filters().count() + 1);
        prop_assert_eq!(&after.encodings, &spec.encodings);
        prop_assert_eq!(after.mark, spec.mark);
        if spec.filters().count() > 0 {
            let after = apply_adjustment(&spec, &Adjustment::RemoveFilter { index: 0 }, ds, None).unwrap();
            let rest: Vec<_> = spec.filters().skip(1).cloned().collect();
            prop_assert_eq!(after.filters().cloned().collect::<Vec<_>>(), rest);
            prop_assert_eq!(&after.encodings, &spec.encodings);
        }
        let swap = Adjustment::SwapChannels { a: Channel::X, b: Channel::Y };
        let after = apply_adjustment(&spec, &swap, ds, None).unwrap();
        prop_assert_eq!(after.encodings.get(&Channel::X), spec.encodings.get(&Channel::Y));
        prop_assert_eq!(after.encodings.get(&Channel::Y), spec.encodings.get(&Channel::X));
        prop_assert_eq!(&after.transforms, &spec.transforms);
    }
}
