fn main() {
    // COHERENT_AMP_THREADS is accepted for forward compatibility; the current
    // implementation is sequential, so any valid value behaves identically.
    if let Ok(v) = std::env::var("COHERENT_AMP_THREADS") {
        if v.parse::<usize>().map(|n| n == 0).unwrap_or(true) {
            eprintln!("warning: ignoring invalid COHERENT_AMP_THREADS value \"{v}\"");
        }
    }
    std::process::exit(coherent_amp::cli::run(std::env::args()));
}
