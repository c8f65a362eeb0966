fn main() {
    std::process::exit(mueg::cli::run_from_args(std::env::args_os()));
}
