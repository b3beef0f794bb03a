#pragma once

#include <Eigen/Core>

#include <numbers>
#include <stdexcept>
#include <string>

namespace cvembem {

using Point = Eigen::Vector2d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Raised when a numerical precondition fails at run time (degenerate
/// element, singular block, broken boundary loop, ...).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Selects the OpenMP kernel or the serial reference loop for the
/// assembly routines. Both produce identical results.
enum class Execution { Serial, Parallel };

/// Caps the OpenMP thread count. Reads CVEMBEM_THREADS when `requested` is 0.
/// Returns the number of threads that will be used.
int configure_threads(int requested = 0);

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

} // namespace cvembem
