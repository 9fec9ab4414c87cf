fn main() {
    std::process::exit(lambda_sim::cli::run(std::env::args_os()));
}
