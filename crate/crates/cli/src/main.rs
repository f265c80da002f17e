fn main() {
    std::process::exit(ctmc_cli::run(std::env::args_os()));
}
