#pragma once

// Periodic grids, discrete Fourier transforms and the spectral operators
// every other module builds on.
//
// Normalization: for a box [0,L)^dim sampled with N points per axis,
//
//   f^(m) = (L/N)^dim * sum_x f(x) e^{-i xi.x},   xi = 2 pi m / L,
//   f(x)  = L^{-dim}  * sum_m f^(m) e^{+i xi.x},
//
// so that ||f||_{L2}^2 = L^{-dim} sum_m |f^(m)|^2 and f^(0) = int f dx.
//
// The Nyquist index m_j = -N/2 carries a wavenumber for |xi|-multipliers
// (fractional derivatives, Sobolev weights) but is treated as having zero
// derivative in odd operators (gradient, divergence, and everything in the
// linear dynamics), which keeps real fields real.

#include "nlcl/detail/fft.hpp"
#include "nlcl/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace nlcl {

using complex = std::complex<double>;

struct GridSpec {
  int dim = 1;
  int points_per_axis = 16;
  double period = 2.0 * std::numbers::pi;

  std::size_t total_points() const {
    std::size_t n = 1;
    for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(points_per_axis);
    return n;
  }

  double spacing() const { return period / points_per_axis; }
  double volume() const { return std::pow(period, dim); }
  /// Quadrature weight of one grid cell, (L/N)^dim.
  double cell_volume() const { return std::pow(spacing(), dim); }

  void validate() const {
    if (dim < 1 || dim > 3) throw InputError("grid dim must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
    if (points_per_axis < 2 || points_per_axis % 2 != 0)
      throw InputError("points_per_axis must be a positive even integer (got " +
                       std::to_string(points_per_axis) + ")");
    if (!(period > 0.0) || !std::isfinite(period)) throw InputError("grid period must be positive and finite");
  }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Integer wave index, physical wavevector and squared magnitude of one mode.
/// Unused axes (j >= dim) hold zero.
struct WaveVector {
  std::array<int, 3> m{0, 0, 0};
  std::array<double, 3> xi{0.0, 0.0, 0.0};
  double k2 = 0.0;
};

/// Per-grid table of wavevectors in flat storage order.
class WaveTable {
public:
  explicit WaveTable(const GridSpec& grid) : grid_(grid) {
    grid.validate();
    const int n = grid.points_per_axis;
    const std::size_t total = grid.total_points();
    const double base = 2.0 * std::numbers::pi / grid.period;
    waves_.resize(total);
    derivative_xi_.resize(total);
    derivative_k2_.resize(total);
    alias_free_.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat) {
      WaveVector w;
      std::array<double, 3> xd{0.0, 0.0, 0.0};
      bool keep = true;
      std::size_t rest = flat;
      for (int d = grid.dim - 1; d >= 0; --d) {
        const int i = static_cast<int>(rest % static_cast<std::size_t>(n));
        rest /= static_cast<std::size_t>(n);
        const int m = i < n / 2 ? i : i - n;
        w.m[static_cast<std::size_t>(d)] = m;
        w.xi[static_cast<std::size_t>(d)] = base * m;
        xd[static_cast<std::size_t>(d)] = (m == -n / 2) ? 0.0 : base * m;
        if (3 * std::abs(m) > n) keep = false;
      }
      w.k2 = w.xi[0] * w.xi[0] + w.xi[1] * w.xi[1] + w.xi[2] * w.xi[2];
      waves_[flat] = w;
      derivative_xi_[flat] = xd;
      derivative_k2_[flat] = xd[0] * xd[0] + xd[1] * xd[1] + xd[2] * xd[2];
      alias_free_[flat] = keep;
    }
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return waves_.size(); }
  const WaveVector& operator[](std::size_t flat) const { return waves_[flat]; }
  /// Wavevector used by odd-order operators (Nyquist components zeroed).
  const std::array<double, 3>& derivative_xi(std::size_t flat) const { return derivative_xi_[flat]; }
  double derivative_k2(std::size_t flat) const { return derivative_k2_[flat]; }
  /// True when every |m_j| <= N/3 (survives the 2/3-rule).
  bool alias_free(std::size_t flat) const { return alias_free_[flat]; }

private:
  GridSpec grid_;
  std::vector<WaveVector> waves_;
  std::vector<std::array<double, 3>> derivative_xi_;
  std::vector<double> derivative_k2_;
  std::vector<bool> alias_free_;
};

inline std::shared_ptr<const WaveTable> wave_table(const GridSpec& grid) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const WaveTable>> cache;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(grid.dim, grid.points_per_axis, grid.period);
  auto& slot = cache[key];
  if (!slot) slot = std::make_shared<const WaveTable>(grid);
  return slot;
}

namespace detail {

template <typename T>
class FieldStorage {
public:
  FieldStorage() = default;
  FieldStorage(const GridSpec& grid, int components)
      : grid_(grid), components_(components),
        data_(static_cast<std::size_t>(components) * grid.total_points(), T{}) {
    grid.validate();
    if (components < 1) throw InputError("field needs at least one component");
  }
  FieldStorage(const GridSpec& grid, int components, std::vector<T> data)
      : grid_(grid), components_(components), data_(std::move(data)) {
    grid.validate();
    if (components < 1) throw InputError("field needs at least one component");
    if (data_.size() != static_cast<std::size_t>(components) * grid.total_points())
      throw InputError("sample count " + std::to_string(data_.size()) + " does not match " +
                       std::to_string(components) + " x " + std::to_string(grid.total_points()));
  }

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  std::size_t point_count() const { return grid_.total_points(); }

  std::span<T> component(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * point_count(), point_count()};
  }
  std::span<const T> component(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * point_count(), point_count()};
  }
  T& at(int c, std::size_t p) { return data_[static_cast<std::size_t>(c) * point_count() + p]; }
  const T& at(int c, std::size_t p) const { return data_[static_cast<std::size_t>(c) * point_count() + p]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const FieldStorage&, const FieldStorage&) = default;

protected:
  GridSpec grid_{};
  int components_ = 0;
  std::vector<T> data_;
};

}  // namespace detail

/// Sampled real field with one or more components, component-major storage.
class RealField : public detail::FieldStorage<double> {
public:
  using FieldStorage::FieldStorage;

  /// Physical coordinate of grid point `flat` along `axis`.
  double coordinate(std::size_t flat, int axis) const {
    const auto n = static_cast<std::size_t>(grid_.points_per_axis);
    for (int d = grid_.dim - 1; d > axis; --d) flat /= n;
    return static_cast<double>(flat % n) * grid_.spacing();
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }
};

/// Fourier coefficients of a (possibly multi-component) field.
class SpectralField : public detail::FieldStorage<complex> {
public:
  using FieldStorage::FieldStorage;

  /// Flat storage index of wave index m (each |m_j| <= N/2).
  std::size_t index_of(std::array<int, 3> m) const {
    const int n = grid_.points_per_axis;
    std::size_t flat = 0;
    for (int d = 0; d < grid_.dim; ++d) {
      const int i = ((m[static_cast<std::size_t>(d)] % n) + n) % n;
      flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    }
    return flat;
  }

  /// Flat index of -m.
  std::size_t conjugate_index(std::size_t flat) const {
    const auto n = static_cast<std::size_t>(grid_.points_per_axis);
    std::size_t out = 0;
    std::size_t stride = 1;
    for (int d = grid_.dim - 1; d >= 0; --d) {
      const std::size_t i = flat % n;
      flat /= n;
      out += ((n - i) % n) * stride;
      stride *= n;
    }
    return out;
  }

  SpectralField& operator+=(const SpectralField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SpectralField& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (!(a == b)) throw InputError(std::string(where) + ": grid mismatch");
}

/// Forward transform with the (L/N)^dim normalization described above.
inline SpectralField forward_transform(const RealField& f) {
  if (!f.all_finite()) throw InputError("forward_transform: non-finite sample in input field");
  const GridSpec& g = f.grid();
  SpectralField out(g, f.components());
  const double scale = g.cell_volume();
  for (int c = 0; c < f.components(); ++c) {
    auto src = f.component(c);
    auto dst = out.component(c);
    std::transform(src.begin(), src.end(), dst.begin(), [](double v) { return complex(v, 0.0); });
    detail::fft_inplace(dst, g.dim, g.points_per_axis, FFTW_FORWARD);
    for (auto& v : dst) v *= scale;
  }
  return out;
}

/// Inverse transform; the imaginary residue of the synthesis is discarded.
inline RealField inverse_transform(const SpectralField& fh) {
  const GridSpec& g = fh.grid();
  RealField out(g, fh.components());
  const double scale = 1.0 / g.volume();
  std::vector<complex> buf(fh.point_count());
  for (int c = 0; c < fh.components(); ++c) {
    auto src = fh.component(c);
    std::copy(src.begin(), src.end(), buf.begin());
    detail::fft_inplace(buf, g.dim, g.points_per_axis, FFTW_BACKWARD);
    auto dst = out.component(c);
    for (std::size_t p = 0; p < buf.size(); ++p) dst[p] = buf[p].real() * scale;
  }
  return out;
}

/// Lambda^s: multiplies mode m by |xi|^s. The zero mode is annihilated for s > 0.
inline SpectralField fractional_derivative(const SpectralField& fh, double s) {
  if (!std::isfinite(s) || s < 0.0) throw InputError("fractional_derivative: exponent must be finite and >= 0");
  if (s == 0.0) return fh;
  const auto table = wave_table(fh.grid());
  SpectralField out = fh;
  const bool square = (s == 2.0);
  for (std::size_t p = 0; p < fh.point_count(); ++p) {
    const double k2 = (*table)[p].k2;
    const double w = square ? k2 : (k2 == 0.0 ? 0.0 : std::pow(k2, 0.5 * s));
    for (int c = 0; c < fh.components(); ++c) out.at(c, p) *= w;
  }
  return out;
}

/// Spectral gradient: output component c*dim + j holds d_j of input component c.
inline SpectralField gradient(const SpectralField& fh) {
  const GridSpec& g = fh.grid();
  const auto table = wave_table(g);
  SpectralField out(g, fh.components() * g.dim);
  for (int c = 0; c < fh.components(); ++c)
    for (int j = 0; j < g.dim; ++j)
      for (std::size_t p = 0; p < fh.point_count(); ++p)
        out.at(c * g.dim + j, p) = complex(0.0, table->derivative_xi(p)[static_cast<std::size_t>(j)]) * fh.at(c, p);
  return out;
}

/// Divergence of a vector field whose first `dim` components are the active axes.
inline SpectralField divergence(const SpectralField& fh) {
  const GridSpec& g = fh.grid();
  if (fh.components() < g.dim) throw InputError("divergence: field has fewer components than grid dimensions");
  const auto table = wave_table(g);
  SpectralField out(g, 1);
  for (std::size_t p = 0; p < fh.point_count(); ++p) {
    complex acc{0.0, 0.0};
    for (int j = 0; j < g.dim; ++j)
      acc += complex(0.0, table->derivative_xi(p)[static_cast<std::size_t>(j)]) * fh.at(j, p);
    out.at(0, p) = acc;
  }
  return out;
}

/// Laplacian consistent with divergence(gradient(.)).
inline SpectralField laplacian(const SpectralField& fh) {
  const auto table = wave_table(fh.grid());
  SpectralField out = fh;
  for (std::size_t p = 0; p < fh.point_count(); ++p) {
    const double w = -table->derivative_k2(p);
    for (int c = 0; c < fh.components(); ++c) out.at(c, p) *= w;
  }
  return out;
}

enum class NormOrder { homogeneous, inhomogeneous };

/// Sobolev norms through Parseval.
///
/// homogeneous:   ||grad^k f||_{L2} = (L^{-dim} sum |xi|^{2k} |f^|^2)^{1/2}
/// inhomogeneous: ||grad^k f||_{H^{M-k}} = (sum_{j=k,k+1,..,M} ||grad^j f||_{L2}^2)^{1/2}
///                with M = `upper`; without `upper` this is ||f||_{H^k}.
/// Components are summed.
inline double sobolev_norm(const SpectralField& fh, double k, NormOrder order = NormOrder::homogeneous,
                           std::optional<int> upper = std::nullopt) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InputError("sobolev_norm: order must be finite and >= 0");
  double lo = k;
  double hi = k;
  if (order == NormOrder::inhomogeneous) {
    if (upper) {
      hi = static_cast<double>(*upper);
    } else {
      lo = 0.0;
    }
  }
  const auto table = wave_table(fh.grid());
  double sum = 0.0;
  for (std::size_t p = 0; p < fh.point_count(); ++p) {
    const double k2 = (*table)[p].k2;
    double weight = 0.0;
    for (double j = lo; j <= hi + 1e-12; j += 1.0) weight += (j == 0.0) ? 1.0 : (k2 == 0.0 ? 0.0 : std::pow(k2, j));
    if (weight == 0.0) continue;
    double amp = 0.0;
    for (int c = 0; c < fh.components(); ++c) amp += std::norm(fh.at(c, p));
    sum += weight * amp;
  }
  return std::sqrt(sum / fh.grid().volume());
}

/// Squared L2 norm from the coefficients (Parseval).
inline double l2_norm_squared(const SpectralField& fh) {
  double sum = 0.0;
  for (const auto& v : fh.data()) sum += std::norm(v);
  return sum / fh.grid().volume();
}

/// L^p norm of the pointwise Euclidean magnitude, rectangle rule; p = infinity gives the max.
inline double lp_norm(const RealField& f, double p) {
  if (!(p >= 1.0)) throw InputError("lp_norm: p must be >= 1");
  const std::size_t n = f.point_count();
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < f.components(); ++c) s += f.at(c, i) * f.at(c, i);
      m = std::max(m, std::sqrt(s));
    }
    return m;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) s += f.at(c, i) * f.at(c, i);
    sum += (p == 2.0) ? s : std::pow(std::sqrt(s), p);
  }
  return std::pow(sum * f.grid().cell_volume(), 1.0 / p);
}

/// 2/3-rule: zero every mode with some |m_j| > N/3.
inline SpectralField dealias(SpectralField fh) {
  const auto table = wave_table(fh.grid());
  for (std::size_t p = 0; p < fh.point_count(); ++p)
    if (!table->alias_free(p))
      for (int c = 0; c < fh.components(); ++c) fh.at(c, p) = complex{0.0, 0.0};
  return fh;
}

/// Pointwise product in physical space followed by 2/3-rule truncation.
/// Either both fields have the same component count (componentwise product)
/// or one of them is scalar and multiplies every component of the other.
inline SpectralField dealiased_product(const SpectralField& fh, const SpectralField& gh) {
  require_same_grid(fh.grid(), gh.grid(), "dealiased_product");
  const int cf = fh.components();
  const int cg = gh.components();
  if (cf != cg && cf != 1 && cg != 1)
    throw InputError("dealiased_product: incompatible component counts");
  const RealField f = inverse_transform(fh);
  const RealField g = inverse_transform(gh);
  const int cout = std::max(cf, cg);
  RealField prod(fh.grid(), cout);
  for (int c = 0; c < cout; ++c) {
    auto a = f.component(cf == 1 ? 0 : c);
    auto b = g.component(cg == 1 ? 0 : c);
    auto o = prod.component(c);
    for (std::size_t p = 0; p < o.size(); ++p) o[p] = a[p] * b[p];
  }
  return dealias(forward_transform(prod));
}

/// Largest |f^(-m) - conj f^(m)| over all modes.
inline double conjugate_symmetry_defect(const SpectralField& fh) {
  double worst = 0.0;
  for (int c = 0; c < fh.components(); ++c)
    for (std::size_t p = 0; p < fh.point_count(); ++p)
      worst = std::max(worst, std::abs(fh.at(c, fh.conjugate_index(p)) - std::conj(fh.at(c, p))));
  return worst;
}

}  // namespace nlcl
