fn main() {
    std::process::exit(fpe_cli::run(std::env::args_os()));
}
