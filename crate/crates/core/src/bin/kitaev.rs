fn main() { std::process::exit(kitaev_core::cli::run(std::env::args().collect())); }
