fn main() {
    std::process::exit(qkd_witness::cli::run_from(std::env::args_os()));
}
