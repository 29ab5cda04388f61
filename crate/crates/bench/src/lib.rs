//! Fixtures shared by the benchmarks.

use xnli_core::{load_csv, Dataset};

pub const QUERIES: &[&str] = &[
    "show low budget and high gross movies, group by genre",
    "show budget less than 100M and Gross more than 100M, group by genre",
    "How many movies in each Genre whose Worldwide Gross is over 100M and Production Budget is under 100M",
    "show the rating and box office",
];

pub fn movies() -> Dataset {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/movies.csv");
    load_csv(std::fs::File::open(path).expect("movies fixture"), "movies").expect("movies fixture parses")
}

/// A deterministic synthetic movies-like table with `rows` rows.
pub fn synthetic(rows: usize) -> Dataset {
    const GENRES: &[&str] = &["Action", "Drama", "Comedy", "Horror", "Adventure", "Thriller Suspense"];
    let headers = ["Title", "Worldwide Gross", "Production Budget", "Release Year", "Genre", "IMDB Rating"];
    let data = (0..rows)
        .map(|i| {
            let h = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 20;
            vec![
                format!("Movie {i}"),
                (h % 900_000_000 + 1_000_000).to_string(),
                (h % 250_000_000 + 500_000).to_string(),
                (1980 + h % 40).to_string(),
                GENRES[(h % GENRES.len() as u64) as usize].to_string(),
                format!("{:.1}", 1.0 + (h % 90) as f64 / 10.0),
            ]
        })
        .collect();
    Dataset::from_rows("synthetic", headers.iter().map(|h| h.to_string()).collect(), data).expect("synthetic table")
}
