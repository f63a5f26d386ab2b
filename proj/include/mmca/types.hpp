#ifndef MMCA_TYPES_HPP
#define MMCA_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mmca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ============================================================================
// Errors
// ============================================================================

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};

// A variable with fewer than two distinct observed categories.
struct DegenerateVariableError : Error {
  using Error::Error;
};

// A category that is never observed (zero count) where a positive count is
// required, e.g. for MCA column weights or null-model main effects.
struct DegenerateCategoryError : Error {
  using Error::Error;
};

struct ShapeError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

struct WeightError : Error {
  using Error::Error;
};

struct RankError : Error {
  using Error::Error;
};

struct FoldError : Error {
  using Error::Error;
};

// Categorical data handed to an operation that requires full observation.
struct MissingDataError : Error {
  using Error::Error;
};

// ============================================================================
// BlockShape
// ============================================================================

/// Column-block structure of a super indicator matrix: one block per
/// categorical variable, block j spanning size(j) >= 2 columns.
class BlockShape {
 public:
  BlockShape() = default;

  explicit BlockShape(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    offsets_.reserve(sizes_.size() + 1);
    offsets_.push_back(0);
    for (int k : sizes_) {
      if (k < 2) throw ShapeError("block size must be >= 2, got " + std::to_string(k));
      offsets_.push_back(offsets_.back() + k);
    }
  }

  int variables() const { return static_cast<int>(sizes_.size()); }
  int total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  int size(int j) const { return sizes_[static_cast<size_t>(j)]; }
  int offset(int j) const { return offsets_[static_cast<size_t>(j)]; }
  const std::vector<int>& sizes() const { return sizes_; }

  // Maximum interaction dimensionality min(n-1, K-J).
  int max_rank(int n) const { return std::min(n - 1, total() - variables()); }

  // Variable owning column k.
  int block_of(int col) const {
    for (int j = 0; j < variables(); ++j)
      if (col < offsets_[static_cast<size_t>(j) + 1]) return j;
    throw ShapeError("column index out of range");
  }

  bool operator==(const BlockShape& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_{0};
};

}  // namespace mmca

#endif  // MMCA_TYPES_HPP
