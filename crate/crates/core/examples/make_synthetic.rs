//! Write a planted-sentiment dataset (`reviews.jsonl`, `lexicon.tsv`).
//!
//! Usage: cargo run --example make_synthetic -- <dir> [documents] [seed]

use lex2sent::synthetic::{generate, PlantedConfig};

fn main() -> lex2sent::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "data/synthetic".into());
    let documents = args.next().and_then(|a| a.parse().ok()).unwrap_or(600);
    let seed = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let planted = generate(&PlantedConfig { documents, seed, ..Default::default() })?;
    planted.write(&dir)?;
    println!("wrote {documents} documents and {} lexicon entries to {dir}", planted.lexicon.len());
    Ok(())
}
