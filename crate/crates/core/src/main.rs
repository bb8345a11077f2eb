fn main() {
    std::process::exit(faultsim::cli::run(std::env::args_os()));
}
