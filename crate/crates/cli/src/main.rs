fn main() {
    std::process::exit(ptqkd_cli::main_with(std::env::args_os()));
}
