fn main() {
    std::process::exit(parabolic_lie::cli::run(std::env::args_os()));
}
