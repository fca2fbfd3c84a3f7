fn main() {
    std::process::exit(halfspace_bubbles::cli::main_with_args(std::env::args_os()));
}
