//! Doctest shim for the guide in `book/`.
