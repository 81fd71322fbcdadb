fn main() {
    std::process::exit(windfit_cli::run(std::env::args_os()));
}
