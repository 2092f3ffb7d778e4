fn main() {
    std::process::exit(sda::cli::main(std::env::args_os()));
}
