//! Compare the bagged embedding classifier with lexicon counting on a planted corpus.
//!
//! Usage: cargo run --release --example planted_demo -- [runs] [seed]

use std::time::Instant;

use lex2sent::bagging::{BaggingConfig, GridSpec};
use lex2sent::eval::{compare_methods, CountingMethod, Lex2SentMethod, Method, RunConfig};
use lex2sent::ingest::{DEFAULT_AMPLIFIERS, DEFAULT_NEGATIONS};
use lex2sent::synthetic::{generate, PlantedConfig};

fn main() -> lex2sent::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let runs = args.first().copied().unwrap_or(1) as usize;
    let seed = args.get(1).copied().unwrap_or(0);
    let planted = generate(&PlantedConfig { seed, ..Default::default() })?;
    let corpus = planted.preprocessed();
    let words = |l: &[&str]| l.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let counting = CountingMethod::new(planted.lexicon.clone(), words(&DEFAULT_AMPLIFIERS), words(&DEFAULT_NEGATIONS));
    let grid = GridSpec { epochs: vec![10, 15], windows: vec![5, 10], dims: vec![50, 100] };
    let lex2sent = Lex2SentMethod::new(&planted.lexicon, BaggingConfig { grid, ..Default::default() })?;
    let start = Instant::now();
    let methods: [&dyn Method; 2] = [&lex2sent, &counting];
    let (table, _) = compare_methods(&corpus, &methods, &RunConfig { runs, master_seed: seed, ..Default::default() })?;
    print!("{}", table.to_text());
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
