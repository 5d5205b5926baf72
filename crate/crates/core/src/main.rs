fn main() {
    std::process::exit(refgame::cli::run_cli(std::env::args_os()));
}
