#pragma once

#include <ddmlab/la/vector.hpp>

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace ddm {

/// Outcome of an iterative solve. residual_history[0] = ||b - A x0||_2 and the history has
/// iterations + 1 entries.
struct SolveReport {
  std::size_t iterations = 0;
  bool converged = false;
  bool diverged = false;
  bool breakdown = false;
  std::vector<double> residual_history;
  double rtol = 0.0;
  double final_relative_residual = 0.0;
  std::map<std::string, double> timings; ///< seconds per phase
  std::string message;
};

template <Scalar T>
struct SolveResult {
  Vector<T> x;
  SolveReport report;
};

/// Called with (iteration k, iterate x_k) for k = 0, 1, ...
template <Scalar T>
using IterateObserver = std::function<void(std::size_t, const Vector<T>&)>;

} // namespace ddm
