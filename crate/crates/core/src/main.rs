fn main() {
    std::process::exit(espart::cli::run(std::env::args_os()));
}
