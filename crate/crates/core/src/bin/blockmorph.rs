fn main() {
    std::process::exit(blockmorph::cli::run(std::env::args_os()));
}
