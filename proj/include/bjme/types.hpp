#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace bjme {

using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major storage: per-respondent and per-item updates touch whole rows.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Lower clamp applied to category probabilities before log() and before
// dividing by them in gradient weights.
inline constexpr double kProbFloor = 1e-10;

}  // namespace bjme

namespace bjme {

// How block sweeps are executed. `serial` is the plain reference loop kept
// for testing and benchmarking; `parallel` distributes equal-sized blocks of
// rows (or items) over OpenMP threads. Both produce bit-identical results.
enum class Execution { serial, parallel };

}  // namespace bjme
