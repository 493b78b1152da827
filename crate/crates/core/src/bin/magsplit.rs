fn main() {
    std::process::exit(magsplit::cli::run(std::env::args_os()));
}
