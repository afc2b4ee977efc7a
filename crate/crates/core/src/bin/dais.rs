fn main() -> std::process::ExitCode {
    dais_core::cli::main()
}
