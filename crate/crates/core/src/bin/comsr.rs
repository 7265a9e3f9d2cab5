fn main() -> std::process::ExitCode {
    comsr::cli::main()
}
