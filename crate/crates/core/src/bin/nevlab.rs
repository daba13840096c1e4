fn main() {
    std::process::exit(nevlab::cli::main());
}
