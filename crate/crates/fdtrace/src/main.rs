fn main() {
    std::process::exit(fdtrace::cli::run());
}
