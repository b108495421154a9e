fn main() {
    std::process::exit(higgs_core::cli::cli_main(std::env::args_os()));
}
