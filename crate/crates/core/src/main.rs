fn main() {
    std::process::exit(bridgecut::cli::run(std::env::args_os()));
}
