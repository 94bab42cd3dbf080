fn main() {
    std::process::exit(rlnd::cli::run(std::env::args_os()));
}
