fn main() {
    std::process::exit(srlab::cli::run(std::env::args_os()));
}
