fn main() {
    std::process::exit(mcgap::cli::run(std::env::args_os()));
}
