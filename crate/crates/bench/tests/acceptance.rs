use darcyflow_bench::acceptance;

/// Runs every acceptance criterion, or only those whose numbers are given as
/// arguments, printing one verdict line per criterion followed by its checks.
/// Failures make the process exit nonzero only when `ACCEPTANCE_STRICT=1`.
fn main() {
    let ids: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).filter(|id| (1..=9).contains(id)).collect();
    let ids = if ids.is_empty() { (1..=9).collect() } else { ids };
    let mut failed = 0;
    for id in ids {
        let start = std::time::Instant::now();
        let outcome = acceptance::run(id);
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{verdict} {} {} ({:.1}s)", outcome.id, outcome.title, start.elapsed().as_secs_f64());
        for line in &outcome.details {
            println!("    {line}");
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("{failed} acceptance criteria failed");
    if failed > 0 && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
