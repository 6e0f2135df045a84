fn main() {
    std::process::exit(hardy_triple::cli::run_from_env());
}
