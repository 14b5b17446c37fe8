#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace dqdmp {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A unit quaternion / unit dual quaternion constraint does not hold.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// A twist was passed to an operation expecting the other frame.
class FrameMismatch : public Error {
 public:
  using Error::Error;
};

/// Bad numeric parameter (non-positive gain, dt <= 0, too few samples, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input document. `line()` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Coordinate frame a velocity is expressed in.
enum class Frame { Body, Inertial };

inline const char* to_string(Frame f) {
  return f == Frame::Body ? "body" : "inertial";
}

}  // namespace dqdmp
