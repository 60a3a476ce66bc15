pub mod algebra;
pub mod berezin;
pub mod certify;
pub mod cli;
pub mod diffop;
pub mod io;
pub mod lie;
pub mod linsys;
pub mod quantize;
pub mod starprod;
