fn main() {
    std::process::exit(cavity_entangle::cli::main_with_args(std::env::args().skip(1)));
}
