fn main() {
    std::process::exit(thresholdlab_cli::main_with(std::env::args_os()));
}
