fn main() -> std::process::ExitCode {
    syndemic::cli::main()
}
