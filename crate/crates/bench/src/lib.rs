pub use tcalg;
