pub mod bounds;
pub mod channels;
pub mod codec;
pub mod codes;
pub mod css;
pub mod error;
pub mod gf2;
pub mod qstate;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
