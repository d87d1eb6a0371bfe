// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wpdyn {

/// Invalid parameters, grids, or configuration. The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical blow-up or solver failure. The CLI maps this to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& msg) {
  if (!ok) throw validation_error(msg);
}
}  // namespace detail

}  // namespace wpdyn
