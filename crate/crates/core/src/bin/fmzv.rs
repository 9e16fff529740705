fn main() {
    std::process::exit(fmzv::cli::main_with(std::env::args_os()));
}
