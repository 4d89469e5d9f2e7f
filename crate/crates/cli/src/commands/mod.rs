pub mod compute;
pub mod index;
pub mod verify;
