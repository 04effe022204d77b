// SPDX-License-Identifier: Apache-2.0
#include "umimc/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace umimc {

namespace {

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("multi-index dimension mismatch: " + a.str() +
                                " vs " + b.str());
  }
}

}  // namespace

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : MultiIndex(std::vector<int>(components)) {}

MultiIndex::MultiIndex(std::vector<int> components) : c_(std::move(components)) {
  if (c_.empty()) throw std::invalid_argument("multi-index needs dimension >= 1");
  for (int v : c_) {
    if (v < 0) throw std::invalid_argument("multi-index components must be >= 0");
  }
}

MultiIndex MultiIndex::zeros(std::size_t dim) { return constant(dim, 0); }

MultiIndex MultiIndex::constant(std::size_t dim, int value) {
  return MultiIndex(std::vector<int>(dim, value));
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  std::vector<int> c(dim, 0);
  c.at(axis) = 1;
  return MultiIndex(std::move(c));
}

int MultiIndex::l1() const { return std::accumulate(c_.begin(), c_.end(), 0); }

int MultiIndex::sup() const { return c_.empty() ? 0 : *std::max_element(c_.begin(), c_.end()); }

bool MultiIndex::is_origin() const {
  return std::all_of(c_.begin(), c_.end(), [](int v) { return v == 0; });
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (i) os << ',';
    os << c_[i];
  }
  os << ')';
  return os.str();
}

std::size_t MultiIndexHash::operator()(const MultiIndex& a) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ull;
  for (int v : a.components()) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

bool partial_le(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (a[i] > b[i]) return false;
  }
  return true;
}

MultiIndex join(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  std::vector<int> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = std::max(a[i], b[i]);
  return MultiIndex(std::move(c));
}

MultiIndex meet(const MultiIndex& a, const MultiIndex& b) {
  require_same_dim(a, b);
  std::vector<int> c(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) c[i] = std::min(a[i], b[i]);
  return MultiIndex(std::move(c));
}

std::vector<SignedCorner> signed_corners(const MultiIndex& alpha) {
  const std::size_t d = alpha.dim();
  // Only axes with a positive component can be stepped down.
  std::vector<std::size_t> movable;
  for (std::size_t i = 0; i < d; ++i) {
    if (alpha[i] > 0) movable.push_back(i);
  }
  const std::size_t count = std::size_t{1} << movable.size();
  std::vector<SignedCorner> out;
  out.reserve(count);
  std::vector<int> c(alpha.components().begin(), alpha.components().end());
  for (std::size_t mask = 0; mask < count; ++mask) {
    int sign = 1;
    for (std::size_t j = 0; j < movable.size(); ++j) {
      const bool down = (mask >> j) & 1u;
      c[movable[j]] = alpha[movable[j]] - (down ? 1 : 0);
      if (down) sign = -sign;
    }
    out.push_back({MultiIndex(c), sign});
  }
  return out;
}

IndexBox::IndexBox(MultiIndex lower, MultiIndex upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (!partial_le(lower_, upper_)) {
    throw std::invalid_argument("index box requires lower <= upper: " + lower_.str() +
                                " vs " + upper_.str());
  }
  size_ = 1;
  for (std::size_t i = 0; i < lower_.dim(); ++i) {
    size_ *= static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
  }
}

IndexBox::IndexBox(MultiIndex upper)
    : IndexBox(MultiIndex::zeros(upper.dim()), upper) {}

bool IndexBox::contains(const MultiIndex& a) const {
  return a.dim() == dim() && partial_le(lower_, a) && partial_le(a, upper_);
}

std::size_t IndexBox::offset(const MultiIndex& a) const {
  if (!contains(a)) throw std::out_of_range(a.str() + " is outside the index box");
  std::size_t off = 0;
  std::size_t stride = 1;
  for (std::size_t i = 0; i < dim(); ++i) {
    off += static_cast<std::size_t>(a[i] - lower_[i]) * stride;
    stride *= static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
  }
  return off;
}

MultiIndex IndexBox::at(std::size_t offset) const {
  if (offset >= size_) throw std::out_of_range("index box offset out of range");
  std::vector<int> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto extent = static_cast<std::size_t>(upper_[i] - lower_[i] + 1);
    c[i] = lower_[i] + static_cast<int>(offset % extent);
    offset /= extent;
  }
  return MultiIndex(std::move(c));
}

std::vector<MultiIndex> IndexBox::enumerate() const {
  std::vector<MultiIndex> out;
  out.reserve(size_);
  for (std::size_t k = 0; k < size_; ++k) out.push_back(at(k));
  return out;
}

double telescope_corner_sum(int k, int n, std::size_t dim,
                            const std::function<double(const MultiIndex&)>& values) {
  if (n <= k || k < 0) throw std::invalid_argument("telescope_corner_sum requires n > k >= 0");
  double total = 0.0;
  std::vector<int> c(dim);
  for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
    int at_k = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      const bool low = (mask >> i) & 1u;
      c[i] = low ? k : n;
      at_k += low ? 1 : 0;
    }
    total += ((at_k % 2) ? -1.0 : 1.0) * values(MultiIndex(c));
  }
  return total;
}

double mixed_difference(const MultiIndex& alpha,
                        const std::function<double(const MultiIndex&)>& values) {
  double total = 0.0;
  for (const auto& corner : signed_corners(alpha)) total += corner.sign * values(corner.index);
  return total;
}

}  // namespace umimc
