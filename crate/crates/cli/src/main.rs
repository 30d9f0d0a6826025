fn main() {
    std::process::exit(poslab_cli::run(std::env::args_os()));
}
