#pragma once

#include <stdexcept>
#include <string>

namespace eaten {

// Base of every error thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/rank disagreement between operands.
struct DimensionError : Error {
  using Error::Error;
};

// Non-finite value produced or encountered where a finite one is required.
struct NumericError : Error {
  using Error::Error;
};

// Character outside the vocabulary, or an invalid token index.
struct VocabError : Error {
  using Error::Error;
};

// Target strings do not fit the decoding-step budget of a decoder.
struct CapacityError : Error {
  using Error::Error;
};

// Invalid or inconsistent configuration.
struct ConfigError : Error {
  using Error::Error;
};

// Prediction/gold maps disagree with the entity schema.
struct SchemaError : Error {
  using Error::Error;
};

// Rendered text does not fit its slot or the image.
struct LayoutError : Error {
  using Error::Error;
};

// Dataset generation cannot satisfy its constraints.
struct GenerationError : Error {
  using Error::Error;
};

// File read/write failure.
struct IoError : Error {
  using Error::Error;
};

}  // namespace eaten
