#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace qattract {

using LatticePoint = std::vector<int>;

int l1_norm(std::span<const int> nu);

/// True when the first nonzero component is positive. Exactly one of nu, -nu
/// is positive for nu != 0.
bool is_positive(std::span<const int> nu);

LatticePoint negate(std::span<const int> nu);

/// All nu in Z^d with |nu|_1 <= n in graded lexicographic order: shells of
/// increasing |nu|_1, lexicographic inside a shell.
std::vector<LatticePoint> enumerate_lattice(int dim, int n);

/// Truncated Fourier lattice {nu : |nu|_1 <= N} with a fixed ordering.
class FourierLattice {
 public:
  FourierLattice(int dim, int n);

  int dim() const { return dim_; }
  int truncation() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<LatticePoint>& points() const { return points_; }
  const LatticePoint& operator[](std::size_t i) const { return points_[i]; }

  std::optional<std::size_t> index_of(std::span<const int> nu) const;
  std::size_t zero_index() const { return 0; }
  /// Index of -points()[i].
  std::size_t mirror(std::size_t i) const { return mirror_[i]; }
  /// Indices of the positive half, in lattice order.
  const std::vector<std::size_t>& positive() const { return positive_; }

 private:
  int dim_;
  int n_;
  std::vector<LatticePoint> points_;
  std::map<LatticePoint, std::size_t> index_;
  std::vector<std::size_t> mirror_;
  std::vector<std::size_t> positive_;
};

}  // namespace qattract
