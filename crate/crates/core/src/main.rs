fn main() {
    std::process::exit(coarse_clt::cli::cli_main(std::env::args_os()));
}
