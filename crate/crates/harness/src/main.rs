fn main() -> std::process::ExitCode {
    qd_harness::cli::main()
}
