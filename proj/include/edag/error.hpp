#pragma once

#include <stdexcept>
#include <string>

namespace edag {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edag
