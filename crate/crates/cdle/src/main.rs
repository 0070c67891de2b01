use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<_> = std::env::args_os().collect();
    let code = catch_unwind(AssertUnwindSafe(|| {
        cdle::with_big_stack(move || {
            let stdout = std::io::stdout();
            let stderr = std::io::stderr();
            cdle::cli::run(args, &mut stdout.lock(), &mut stderr.lock())
        })
    }))
    .unwrap_or(cdle::cli::EXIT_INTERNAL);
    ExitCode::from(code as u8)
}
