fn main() {
    std::process::exit(decision_regions::cli::run());
}
