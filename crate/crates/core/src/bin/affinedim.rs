fn main() {
    std::process::exit(affinedim::cli::run(std::env::args_os()));
}
