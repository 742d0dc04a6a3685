use std::path::PathBuf;

use sabrcal::dataset::{generate_subset, generate_test_set, SubsetSpec};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() < 3 {
        eprintln!("usage: gencorpus <subset 1|2|3> <out.csv> [--test-set N]");
        std::process::exit(2);
    }
    let id: u8 = args[1].parse().expect("subset id");
    let out = PathBuf::from(&args[2]);
    let spec = SubsetSpec::desk(id, id as u64).expect("spec");
    let start = std::time::Instant::now();
    let stats = if args.len() > 4 && args[3] == "--test-set" {
        let n: u64 = args[4].parse().expect("surface count");
        generate_test_set(&spec, n, &out).expect("generate")
    } else {
        generate_subset(&spec, &out).expect("generate")
    };
    eprintln!(
        "subset {id}: {} rows, {} dropped, {} sanity-dropped, {} failed surfaces, {:.2}% drop, {:.0}s",
        stats.n_rows,
        stats.n_dropped,
        stats.n_sanity_dropped,
        stats.n_failed_surfaces,
        100.0 * stats.drop_fraction(),
        start.elapsed().as_secs_f64()
    );
    for f in &stats.failures {
        eprintln!("  {f}");
    }
}
