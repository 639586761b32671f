fn main() {
    std::process::exit(elldyn_cli::main_with_args(std::env::args_os()));
}
