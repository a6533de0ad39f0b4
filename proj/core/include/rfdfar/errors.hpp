#pragma once

#include <stdexcept>

namespace rfdfar {

/// Total power below the noise floor it is supposed to contain.
class InconsistentMeasurement : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Wavelet coefficient layout does not match its declared shape.
class CorruptDecomposition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training table cannot support the requested classifier.
class InvalidTrainingSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rfdfar
