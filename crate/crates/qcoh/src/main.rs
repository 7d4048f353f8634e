fn main() {
    std::process::exit(qcoh::cli::main_with(std::env::args_os()));
}
