#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tau/orbit_grid.hpp"

namespace tau {

using cplx = std::complex<double>;
using GridPtr = std::shared_ptr<const OrbitGrid>;

/// Samples on an orbit grid with a validity mask. Invalid entries are
/// outside the reliable window and carry no meaning.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(GridPtr grid, std::vector<cplx> values, std::string label = {});
  GridFunction(GridPtr grid, std::vector<cplx> values, std::vector<std::uint8_t> valid, std::string label = {});

  static GridFunction sample(GridPtr grid, const std::function<cplx(double)>& f, std::string label = {});
  static GridFunction sample_real(GridPtr grid, const std::function<double(double)>& f, std::string label = {});
  static GridFunction constant(GridPtr grid, cplx c, std::string label = {});
  static GridFunction invalid(GridPtr grid, std::string label = {});

  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const OrbitGrid& grid() const { return *grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  cplx operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  bool valid(std::size_t i) const { return valid_[i] != 0; }
  void set(std::size_t i, cplx v) {
    values_[i] = v;
    valid_[i] = 1;
  }
  void invalidate(std::size_t i) { valid_[i] = 0; }
  std::size_t valid_count() const;

  const std::vector<cplx>& values() const noexcept { return values_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return valid_; }
  const std::string& label() const noexcept { return label_; }
  void set_label(std::string l) { label_ = std::move(l); }

  /// Largest |value| over the valid window (0 when empty).
  double sup_abs() const;
  /// Largest |imag| over the valid window.
  double max_imag() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(const GridFunction& o);
  /// Division marks entries with a zero denominator invalid.
  GridFunction& operator/=(const GridFunction& o);
  GridFunction& operator*=(cplx s);
  GridFunction& operator+=(cplx s);

  GridFunction map(const std::function<cplx(cplx)>& fn) const;
  GridFunction conj() const;

 private:
  void require_same(const GridFunction& o) const;

  GridPtr grid_;
  std::vector<cplx> values_;
  std::vector<std::uint8_t> valid_;
  std::string label_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, const GridFunction& b);
GridFunction operator/(GridFunction a, const GridFunction& b);
GridFunction operator*(GridFunction a, cplx s);
GridFunction operator*(cplx s, GridFunction a);
GridFunction operator+(GridFunction a, cplx s);
GridFunction operator-(GridFunction a);

/// Grid points as a function (the identity).
GridFunction identity(GridPtr grid);
/// Delta_n as a function.
GridFunction deltas(GridPtr grid);

}  // namespace tau
