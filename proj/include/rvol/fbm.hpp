#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvol/rng.hpp"

namespace rvol {

struct CholeskyError : std::runtime_error {
  CholeskyError(int pivot, const std::string& msg)
      : std::runtime_error(msg), pivot_index(pivot) {}
  int pivot_index;
};

struct FbmGridOptions {
  double jitter = 0.0;  // added to the covariance diagonal; off by default
  int max_n = 4096;     // guard against accidental O(n^3) blowups
};

// Equidistant fBm simulation grid: times t_i = (i+1)*dt for grid index
// i = 0..n-1, together with the lower-triangular Cholesky factor L of the
// covariance matrix Cov[W_i, W_j] = (t_i^2H + t_j^2H - |t_i - t_j|^2H) / 2.
// The factor is computed once at construction and the grid is immutable
// afterwards, so it can be shared freely across threads.
class FbmGrid {
 public:
  using Options = FbmGridOptions;

  static FbmGrid build(double hurst, int n, double dt,
                       Options opts = Options());

  double hurst() const { return hurst_; }
  int size() const { return n_; }
  double dt() const { return dt_; }
  double time_at(int i) const { return dt_ * static_cast<double>(i + 1); }

  // Covariance entry from the closed form (not from the factor).
  double covariance(int i, int j) const;

  // L(i, j) for j <= i.
  double chol(int i, int j) const { return chol_[row_offset(i) + j]; }

  // Row i of L, entries 0..i.
  std::span<const double> chol_row(int i) const {
    return {chol_.data() + row_offset(i), static_cast<std::size_t>(i) + 1};
  }

 private:
  FbmGrid() = default;
  static std::size_t offset_of(int i) {
    return static_cast<std::size_t>(i) * (static_cast<std::size_t>(i) + 1) / 2;
  }
  std::size_t row_offset(int i) const { return offset_of(i); }

  double hurst_ = 0.0;
  double dt_ = 0.0;
  int n_ = 0;
  std::vector<double> chol_;  // packed row-major lower triangle
};

// A sampled path together with the standard-normal innovations that produced
// it: values = L * innovations, exactly.
struct FbmPath {
  const FbmGrid* grid = nullptr;
  std::vector<double> values;
  std::vector<double> innovations;
};

FbmGrid build_grid(double hurst, int n, double dt,
                   FbmGridOptions opts = FbmGridOptions());

// Deterministic in the seed; innovations are drawn from
// GaussianStream(seed) in index order.
FbmPath sample_path(const FbmGrid& grid, std::uint64_t seed);

// Conditional continuation machinery. Conditioning on the first `observed`
// grid points (equivalently, on their innovations) splits every later value
// into a deterministic part sum_{p < observed} L(j,p) x_p, computed once
// here, plus an independent fresh-innovation part. `horizon` bounds the grid
// indices this conditioner can produce (observed <= j < horizon).
class FbmConditioner {
 public:
  FbmConditioner(const FbmPath& path, int observed, int horizon);

  int observed() const { return observed_; }
  int horizon() const { return horizon_; }

  double conditional_mean(int j) const;  // E[W_j | first `observed` points]
  double conditional_var(int j) const;   // Var[W_j | ...]

  // Fills out[0..m) with conditional samples of W at grid indices
  // observed..observed+m-1, drawing m fresh innovations from `g` (in index
  // order). `fresh` is caller scratch of length >= m.
  void continue_with(GaussianStream& g, std::span<double> out,
                     std::span<double> fresh) const;

  // Same, with all fresh innovations forced to zero: returns exactly the
  // deterministic parts.
  void deterministic_part(std::span<double> out) const;

 private:
  const FbmGrid* grid_;
  int observed_;
  int horizon_;
  std::vector<double> det_;  // det_[j - observed_]
};

// Convenience: values at grid indices observed..target-1, conditionally on
// path.innovations[0..observed). One-shot; callers that re-condition
// repeatedly should hold an FbmConditioner instead.
std::vector<double> continue_path(const FbmPath& path, int observed, int target,
                                  std::uint64_t seed);

// Debug dump, columns index,t,value.
void write_path_csv(const FbmPath& path, const std::string& file);

}  // namespace rvol
