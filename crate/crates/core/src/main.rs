fn main() {
    std::process::exit(designcoded::cli::run(std::env::args()));
}
