fn main() {
    std::process::exit(fastescape::cli::run_command(std::env::args_os()));
}
