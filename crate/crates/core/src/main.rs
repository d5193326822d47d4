fn main() {
    std::process::exit(gmmce::cli::run(std::env::args_os()));
}
