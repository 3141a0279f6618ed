fn main() {
    std::process::exit(freeprob_cli::run(std::env::args_os()));
}
