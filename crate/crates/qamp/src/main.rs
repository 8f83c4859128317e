fn main() {
    std::process::exit(qamp::cli::run());
}
