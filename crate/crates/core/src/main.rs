fn main() {
    std::process::exit(lfm_semigroup::cli::run(std::env::args_os()));
}
