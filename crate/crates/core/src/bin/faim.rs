fn main() {
    std::process::exit(faim_core::cli::main(std::env::args_os()));
}
