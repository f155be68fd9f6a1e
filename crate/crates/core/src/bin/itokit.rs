fn main() {
    std::process::exit(itokit::cli::run(std::env::args_os()));
}
