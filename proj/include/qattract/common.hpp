#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace qattract {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// State of the planar system: position, velocity and time.
struct PhaseState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

enum class ErrorCode {
  InvalidArgument,
  NoTransversalRoot,
  WrongNonlinearity,
  MissingEvent,
  NewtonDiverged,
  SmallDivisorOverflow,
  DegenerateQ,
  SignChange,
  GammaTooSmall,
  GammaBelowThreshold,
  BracketFailure,
  NoValidB,
  EmptySet,
  ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// Text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

/// Integer power with exact repeated multiplication.
inline double ipow(double x, int n) {
  double r = 1.0;
  double b = x;
  unsigned k = n < 0 ? static_cast<unsigned>(-n) : static_cast<unsigned>(n);
  while (k) {
    if (k & 1u) r *= b;
    b *= b;
    k >>= 1u;
  }
  return n < 0 ? 1.0 / r : r;
}

}  // namespace qattract
