pub mod expr;
pub mod fredholm;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod pie;
pub mod quadrature;
pub mod verify;
