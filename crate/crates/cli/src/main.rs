fn main() {
    std::process::exit(birkdist_cli::app::main_from(std::env::args_os()));
}
