#include "tau/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "tau/error.hpp"

namespace tau {

GridFunction::GridFunction(GridPtr grid, std::vector<cplx> values, std::string label)
    : grid_(std::move(grid)), values_(std::move(values)), valid_(values_.size(), 1), label_(std::move(label)) {
  if (!grid_ || values_.size() != grid_->size()) throw Error(ErrorKind::GridMismatch, "value count differs from grid size");
}

GridFunction::GridFunction(GridPtr grid, std::vector<cplx> values, std::vector<std::uint8_t> valid, std::string label)
    : grid_(std::move(grid)), values_(std::move(values)), valid_(std::move(valid)), label_(std::move(label)) {
  if (!grid_ || values_.size() != grid_->size() || valid_.size() != values_.size()) {
    throw Error(ErrorKind::GridMismatch, "value or mask count differs from grid size");
  }
}

GridFunction GridFunction::sample(GridPtr grid, const std::function<cplx(double)>& f, std::string label) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->point(i));
  return GridFunction(std::move(grid), std::move(v), std::move(label));
}

GridFunction GridFunction::sample_real(GridPtr grid, const std::function<double(double)>& f, std::string label) {
  return sample(std::move(grid), [&f](double x) { return cplx(f(x), 0.0); }, std::move(label));
}

GridFunction GridFunction::constant(GridPtr grid, cplx c, std::string label) {
  const auto n = grid->size();
  return GridFunction(std::move(grid), std::vector<cplx>(n, c), std::move(label));
}

GridFunction GridFunction::invalid(GridPtr grid, std::string label) {
  const auto n = grid->size();
  return GridFunction(std::move(grid), std::vector<cplx>(n), std::vector<std::uint8_t>(n, 0), std::move(label));
}

std::size_t GridFunction::valid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

double GridFunction::sup_abs() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (valid_[i]) s = std::max(s, std::abs(values_[i]));
  return s;
}

double GridFunction::max_imag() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i)
    if (valid_[i]) s = std::max(s, std::abs(values_[i].imag()));
  return s;
}

void GridFunction::require_same(const GridFunction& o) const {
  if (grid_ != o.grid_) throw Error(ErrorKind::GridMismatch, "operands live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same(o);
  for (std::size_t i = 0; i < size(); ++i) {
    values_[i] += o.values_[i];
    valid_[i] &= o.valid_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same(o);
  for (std::size_t i = 0; i < size(); ++i) {
    values_[i] -= o.values_[i];
    valid_[i] &= o.valid_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator*=(const GridFunction& o) {
  require_same(o);
  for (std::size_t i = 0; i < size(); ++i) {
    values_[i] *= o.values_[i];
    valid_[i] &= o.valid_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator/=(const GridFunction& o) {
  require_same(o);
  for (std::size_t i = 0; i < size(); ++i) {
    if (o.values_[i] == cplx(0.0)) {
      valid_[i] = 0;
      values_[i] = 0.0;
      continue;
    }
    values_[i] /= o.values_[i];
    valid_[i] &= o.valid_[i];
  }
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridFunction& GridFunction::operator+=(cplx s) {
  for (auto& v : values_) v += s;
  return *this;
}

GridFunction GridFunction::map(const std::function<cplx(cplx)>& fn) const {
  GridFunction out = *this;
  for (std::size_t i = 0; i < size(); ++i)
    if (valid_[i]) out.values_[i] = fn(values_[i]);
  return out;
}

GridFunction GridFunction::conj() const {
  return map([](cplx z) { return std::conj(z); });
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(GridFunction a, const GridFunction& b) { return a *= b; }
GridFunction operator/(GridFunction a, const GridFunction& b) { return a /= b; }
GridFunction operator*(GridFunction a, cplx s) { return a *= s; }
GridFunction operator*(cplx s, GridFunction a) { return a *= s; }
GridFunction operator+(GridFunction a, cplx s) { return a += s; }
GridFunction operator-(GridFunction a) { return a *= cplx(-1.0); }

GridFunction identity(GridPtr grid) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid->point(i);
  return GridFunction(std::move(grid), std::move(v), "x");
}

GridFunction deltas(GridPtr grid) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = grid->delta(i);
  return GridFunction(std::move(grid), std::move(v), "delta");
}

}  // namespace tau
