fn main() {
    std::process::exit(capkc::cli::run(std::env::args_os()));
}
