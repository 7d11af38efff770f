pub mod ball;
pub mod cmfield;
pub mod hermitian;
pub mod hodge;
pub mod io;
pub mod isometry;
pub mod kahler;
pub mod lattice;
pub mod numeric;
pub mod par;
