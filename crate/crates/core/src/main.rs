fn main() {
    std::process::exit(missing_sums::cli::run(std::env::args_os()));
}
