pub mod cli;
pub mod geometry;
pub mod lagrange;
pub mod oracle;
pub mod recovery;
pub mod roots;
pub mod triangulate;
