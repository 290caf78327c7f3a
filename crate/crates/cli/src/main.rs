fn main() {
    std::process::exit(binsc_cli::run(std::env::args_os()));
}
