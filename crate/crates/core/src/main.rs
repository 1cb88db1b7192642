fn main() {
    std::process::exit(convex_sumset::cli::run(std::env::args_os()));
}
