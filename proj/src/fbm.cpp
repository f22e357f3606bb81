#include "rvol/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "rvol/parallel.hpp"

namespace rvol {

namespace {

// Dot product with four independent accumulators: fixed summation order (so
// results are reproducible) while still letting the compiler vectorize.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double FbmGrid::covariance(int i, int j) const {
  const double two_h = 2.0 * hurst_;
  const double ti = time_at(i);
  const double tj = time_at(j);
  return 0.5 * (std::pow(ti, two_h) + std::pow(tj, two_h) -
                std::pow(std::fabs(ti - tj), two_h));
}

FbmGrid FbmGrid::build(double hurst, int n, double dt, Options opts) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::invalid_argument("FbmGrid: hurst must be in (0, 1)");
  if (n < 1) throw std::invalid_argument("FbmGrid: n must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("FbmGrid: dt must be > 0");
  if (n > opts.max_n)
    throw std::invalid_argument("FbmGrid: n = " + std::to_string(n) +
                                " exceeds the configured cap " +
                                std::to_string(opts.max_n));

  FbmGrid g;
  g.hurst_ = hurst;
  g.dt_ = dt;
  g.n_ = n;
  g.chol_.resize(offset_of(n));

  // Fill the lower triangle of the covariance. Row times are precomputed as
  // powers once; off-diagonal entries need |t_i - t_j|^2H = ((i-j)*dt)^2H,
  // also a function of the index distance only.
  const double two_h = 2.0 * hurst;
  std::vector<double> tpow(static_cast<std::size_t>(n) + 1);
  tpow[0] = 0.0;
  for (int k = 1; k <= n; ++k)
    tpow[k] = std::pow(dt * static_cast<double>(k), two_h);

  double* m = g.chol_.data();
  for (int i = 0; i < n; ++i) {
    double* row = m + offset_of(i);
    for (int j = 0; j <= i; ++j)
      row[j] = 0.5 * (tpow[i + 1] + tpow[j + 1] - tpow[i - j]);
    if (opts.jitter > 0.0) row[i] += opts.jitter;
  }

  // In-place Cholesky on the packed triangle, no pivoting. A nonpositive
  // pivot is reported, not regularized. Tiled right-looking layout: the
  // unblocked version streams the whole factor once per row, which is
  // memory-bound beyond a few thousand points; blocking keeps the trailing
  // update in cache and lets it run on several threads. The update for each
  // entry accumulates in a fixed k-block order, so the factor is
  // bit-identical for any thread count.
  const int nb = 160;            // panel width
  const int tile_cols = 320;     // trailing-update column tile
  auto row_of = [m](int r) { return m + offset_of(r); };

  for (int k0 = 0; k0 < n; k0 += nb) {
    const int kend = std::min(n, k0 + nb);

    // Diagonal block, unblocked.
    for (int i = k0; i < kend; ++i) {
      double* row_i = row_of(i);
      for (int j = k0; j < i; ++j) {
        const double* row_j = row_of(j);
        row_i[j] = (row_i[j] - dot(row_i + k0, row_j + k0,
                                   static_cast<std::size_t>(j - k0))) /
                   row_j[j];
      }
      const double pivot = row_i[i] - dot(row_i + k0, row_i + k0,
                                          static_cast<std::size_t>(i - k0));
      if (!(pivot > 0.0))
        throw CholeskyError(
            i, "FbmGrid: Cholesky pivot " + std::to_string(i) +
                   " is not positive (" + std::to_string(pivot) +
                   "); covariance numerically not positive definite for H = " +
                   std::to_string(hurst) + ", n = " + std::to_string(n));
      row_i[i] = std::sqrt(pivot);
    }
    if (kend == n) break;

    const int rows_below = n - kend;
    const int workers = rows_below > 512 ? 0 : 1;  // 0 = hardware default

    // Panel solve: rows below the diagonal block against its triangle.
    parallel_for(static_cast<std::size_t>(rows_below), workers,
                 [&](std::size_t r) {
                   const int i = kend + static_cast<int>(r);
                   double* row_i = row_of(i);
                   for (int j = k0; j < kend; ++j) {
                     const double* row_j = row_of(j);
                     row_i[j] =
                         (row_i[j] - dot(row_i + k0, row_j + k0,
                                         static_cast<std::size_t>(j - k0))) /
                         row_j[j];
                   }
                 });

    // Trailing update A[i][c] -= L[i][k-panel] . L[c][k-panel] for
    // kend <= c <= i < n, column tiles kept hot across the row sweep.
    const std::size_t panel = static_cast<std::size_t>(kend - k0);
    for (int c0 = kend; c0 < n; c0 += tile_cols) {
      const int cend = std::min(n, c0 + tile_cols);
      const std::size_t sweep = static_cast<std::size_t>(n - c0);
      parallel_for(sweep, workers, [&](std::size_t r) {
        const int i = c0 + static_cast<int>(r);
        double* row_i = row_of(i);
        const double* seg_i = row_i + k0;
        const int chi = std::min(cend - 1, i);
        for (int c = c0; c <= chi; ++c)
          row_i[c] -= dot(seg_i, row_of(c) + k0, panel);
      });
    }
  }
  return g;
}

FbmGrid build_grid(double hurst, int n, double dt, FbmGridOptions opts) {
  return FbmGrid::build(hurst, n, dt, opts);
}

FbmPath sample_path(const FbmGrid& grid, std::uint64_t seed) {
  const int n = grid.size();
  FbmPath path;
  path.grid = &grid;
  path.innovations.resize(n);
  path.values.resize(n);

  GaussianStream g(seed);
  g.fill(path.innovations.data(), path.innovations.size());
  for (int i = 0; i < n; ++i) {
    const auto row = grid.chol_row(i);
    path.values[i] = dot(row.data(), path.innovations.data(), row.size());
  }
  return path;
}

FbmConditioner::FbmConditioner(const FbmPath& path, int observed, int horizon)
    : grid_(path.grid), observed_(observed), horizon_(horizon) {
  if (grid_ == nullptr)
    throw std::invalid_argument("FbmConditioner: path has no grid");
  if (observed < 0 || horizon > grid_->size() || observed >= horizon)
    throw std::out_of_range(
        "FbmConditioner: need 0 <= observed < horizon <= n, got observed = " +
        std::to_string(observed) + ", horizon = " + std::to_string(horizon) +
        ", n = " + std::to_string(grid_->size()));
  if (static_cast<int>(path.innovations.size()) < observed)
    throw std::invalid_argument(
        "FbmConditioner: path innovations shorter than observed prefix");

  det_.resize(static_cast<std::size_t>(horizon - observed));
  for (int j = observed; j < horizon; ++j) {
    const auto row = grid_->chol_row(j);
    det_[j - observed] = dot(row.data(), path.innovations.data(),
                             static_cast<std::size_t>(observed));
  }
}

double FbmConditioner::conditional_mean(int j) const {
  if (j < observed_ || j >= horizon_)
    throw std::out_of_range("FbmConditioner: index outside conditioned range");
  return det_[j - observed_];
}

double FbmConditioner::conditional_var(int j) const {
  if (j < observed_ || j >= horizon_)
    throw std::out_of_range("FbmConditioner: index outside conditioned range");
  const auto row = grid_->chol_row(j);
  double s = 0.0;
  for (int p = observed_; p <= j; ++p) s += row[p] * row[p];
  return s;
}

void FbmConditioner::continue_with(GaussianStream& g, std::span<double> out,
                                   std::span<double> fresh) const {
  const std::size_t m = out.size();
  if (m > det_.size() || fresh.size() < m)
    throw std::out_of_range("FbmConditioner: output exceeds horizon");
  for (std::size_t p = 0; p < m; ++p) fresh[p] = g.next();
  for (std::size_t k = 0; k < m; ++k) {
    const int j = observed_ + static_cast<int>(k);
    const auto row = grid_->chol_row(j);
    out[k] = det_[k] + dot(row.data() + observed_, fresh.data(), k + 1);
  }
}

void FbmConditioner::deterministic_part(std::span<double> out) const {
  if (out.size() > det_.size())
    throw std::out_of_range("FbmConditioner: output exceeds horizon");
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = det_[k];
}

std::vector<double> continue_path(const FbmPath& path, int observed, int target,
                                  std::uint64_t seed) {
  FbmConditioner cond(path, observed, target);
  std::vector<double> out(static_cast<std::size_t>(target - observed));
  std::vector<double> fresh(out.size());
  GaussianStream g(seed);
  cond.continue_with(g, out, fresh);
  return out;
}

void write_path_csv(const FbmPath& path, const std::string& file) {
  if (path.grid == nullptr)
    throw std::invalid_argument("write_path_csv: path has no grid");
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write '" + file + "'");
  out << "index,t,value\n";
  out.precision(17);
  for (std::size_t i = 0; i < path.values.size(); ++i)
    out << i << "," << path.grid->time_at(static_cast<int>(i)) << ","
        << path.values[i] << "\n";
}

}  // namespace rvol
