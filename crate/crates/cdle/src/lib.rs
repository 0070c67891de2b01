//! File-system front end for the `cdle-core` kernel: module search roots,
//! the bundled derivation corpus, and the `cdle` command line.

pub mod cli;
pub mod corpus;
pub mod loader;

pub use loader::FsLoader;

/// Run `f` on a thread with a large stack. Checking the corpus recurses
/// deeply through encoded types and their erasures.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(512 << 20)
        .spawn(f)
        .expect("spawn checker thread")
        .join()
        .unwrap_or_else(|e| std::panic::resume_unwind(e))
}
