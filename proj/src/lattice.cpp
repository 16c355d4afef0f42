#include "qattract/lattice.hpp"

#include <algorithm>
#include <cstdlib>

#include "qattract/common.hpp"

namespace qattract {

int l1_norm(std::span<const int> nu) {
  int s = 0;
  for (int v : nu) s += std::abs(v);
  return s;
}

bool is_positive(std::span<const int> nu) {
  for (int v : nu) {
    if (v != 0) return v > 0;
  }
  return false;
}

LatticePoint negate(std::span<const int> nu) {
  LatticePoint out(nu.begin(), nu.end());
  for (int& v : out) v = -v;
  return out;
}

namespace {

// Appends every point of Z^dim with |nu|_1 == shell, lexicographically.
void fill_shell(int dim, int shell, LatticePoint& prefix, std::vector<LatticePoint>& out) {
  const int used = l1_norm(prefix);
  const int left = shell - used;
  if (static_cast<int>(prefix.size()) == dim - 1) {
    if (left == 0) {
      prefix.push_back(0);
      out.push_back(prefix);
      prefix.pop_back();
    } else {
      prefix.push_back(-left);
      out.push_back(prefix);
      prefix.back() = left;
      out.push_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int v = -left; v <= left; ++v) {
    prefix.push_back(v);
    fill_shell(dim, shell, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<LatticePoint> enumerate_lattice(int dim, int n) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "lattice dimension must be >= 1");
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "lattice radius must be >= 0");
  std::vector<LatticePoint> out;
  for (int shell = 0; shell <= n; ++shell) {
    LatticePoint prefix;
    fill_shell(dim, shell, prefix, out);
  }
  return out;
}

FourierLattice::FourierLattice(int dim, int n)
    : dim_(dim), n_(n), points_(enumerate_lattice(dim, n)) {
  for (std::size_t i = 0; i < points_.size(); ++i) index_.emplace(points_[i], i);
  mirror_.resize(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    mirror_[i] = index_.at(negate(points_[i]));
    if (is_positive(points_[i])) positive_.push_back(i);
  }
}

std::optional<std::size_t> FourierLattice::index_of(std::span<const int> nu) const {
  if (static_cast<int>(nu.size()) != dim_) return std::nullopt;
  auto it = index_.find(LatticePoint(nu.begin(), nu.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace qattract
