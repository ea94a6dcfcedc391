fn main() {
    std::process::exit(kacsphere::cli::run(std::env::args_os()));
}
