fn main() {
    std::process::exit(ivf_cli::main_with_args(std::env::args_os()));
}
