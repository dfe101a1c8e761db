pub mod bench;
pub mod emulate;
pub mod gen;
pub mod image;
pub mod report;
