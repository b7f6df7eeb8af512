#pragma once

#include <stdexcept>
#include <string>

namespace vasc {

/// An input file or input combination violates the documented contract
/// (missing file, undecodable image, dimension mismatch, bad manifest).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A configuration value is out of its documented range.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vasc
