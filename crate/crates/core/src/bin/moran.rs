fn main() {
    std::process::exit(moran_spectral::cli::run(std::env::args_os()));
}
