fn main() {
    std::process::exit(lex2sent::cli::run_cli(std::env::args_os()));
}
