fn main() {
    std::process::exit(freeform::cli::main());
}
