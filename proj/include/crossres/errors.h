#ifndef CROSSRES_ERRORS_H_
#define CROSSRES_ERRORS_H_

#include <stdexcept>
#include <string>

namespace crossres {

// Bad or insufficient input data. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace crossres

#endif  // CROSSRES_ERRORS_H_
