fn main() {
    std::process::exit(kblock::cli::run(std::env::args_os()));
}
