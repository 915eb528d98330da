fn main() {
    std::process::exit(freqaug::cli::main_with(std::env::args_os()));
}
