#pragma once

#include <stdexcept>
#include <string>

namespace toklab {

// Base for every error raised by the library. The CLI maps these to exit
// code 2 (data error); std::invalid_argument signals a contract violation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& path)
      : Error("cannot read or write '" + path + "'"), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

}  // namespace toklab
