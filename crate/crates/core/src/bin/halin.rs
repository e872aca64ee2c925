fn main() {
    std::process::exit(halin::cli::run(std::env::args_os()));
}
