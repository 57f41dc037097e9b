pub mod compare;
pub mod estimate;
pub mod health;
pub mod simulate;
pub mod sweep;
