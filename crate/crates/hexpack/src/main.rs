fn main() -> std::process::ExitCode {
    hexpack::cli::main()
}
