pub mod axial;
pub mod channels;
pub mod gateset;
pub mod hull;
pub mod io;
pub mod linalg;
pub mod mixing;
pub mod sampling;
pub mod savings;
pub mod seed;
