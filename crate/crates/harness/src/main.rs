fn main() {
    std::process::exit(imcmc_harness::cli::run(std::env::args_os()));
}
