fn main() {
    std::process::exit(cocycle::cli::run(std::env::args()));
}
