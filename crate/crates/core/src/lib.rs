pub mod pairing;
pub mod policy;
pub mod tree;
pub mod abe;
pub mod container;
pub mod bench;
pub mod fsutil;
pub mod health;
