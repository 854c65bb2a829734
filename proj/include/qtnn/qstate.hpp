#pragma once

// Two-qubit states. Basis ordering is (|00>, |01>, |10>, |11>) with qubit A the
// left factor, so index = 2 * bit_A + bit_B everywhere in the library.

#include "qtnn/errors.hpp"
#include "qtnn/linalg.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace qtnn {

/// Unit-norm amplitudes (a00, a01, a10, a11). Only `normalize` creates them.
class Amplitudes {
 public:
  const Vec4& vec() const noexcept { return v_; }
  cplx operator[](int i) const { return v_(i); }
  cplx a00() const { return v_(0); }
  cplx a01() const { return v_(1); }
  cplx a10() const { return v_(2); }
  cplx a11() const { return v_(3); }

 private:
  explicit Amplitudes(const Vec4& v) : v_(v) {}
  Vec4 v_;

  friend Amplitudes normalize(const std::array<cplx, 4>& raw);
};

/// Scales `raw` to unit norm. The global phase is kept as given.
inline Amplitudes normalize(const std::array<cplx, 4>& raw) {
  Vec4 v;
  for (int i = 0; i < 4; ++i) v(i) = raw[i];
  const real n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw InvalidState("cannot normalize an all-zero or non-finite amplitude vector");
  return Amplitudes(v / n);
}

inline Amplitudes normalize_vector(const Vec4& raw) {
  return normalize(std::array<cplx, 4>{raw(0), raw(1), raw(2), raw(3)});
}

/// Validated 4x4 density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static constexpr real HERMITIAN_TOL = 1e-12;
  static constexpr real TRACE_TOL = 1e-12;
  static constexpr real PSD_TOL = -1e-10;

  /// Throws InvalidState if `rho` violates an invariant. `tol_scale` loosens the
  /// Hermiticity and trace checks for matrices that went through long products.
  static DensityMatrix from_matrix(const Mat4& rho, real tol_scale = 1.0) {
    if (!rho.allFinite()) throw InvalidState("density matrix has non-finite entries");
    if (max_abs(rho - rho.adjoint()) > HERMITIAN_TOL * tol_scale)
      throw InvalidState("density matrix is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > TRACE_TOL * tol_scale)
      throw InvalidState("density matrix trace differs from 1");
    const Mat4 h = hermitian_part(rho);
    if (hermitian_eigenvalues(h).minCoeff() < PSD_TOL)
      throw InvalidState("density matrix is not positive semidefinite");
    return DensityMatrix(h);
  }

  const Mat4& matrix() const noexcept { return rho_; }
  cplx operator()(int i, int j) const { return rho_(i, j); }

 private:
  explicit DensityMatrix(const Mat4& rho) : rho_(rho) {}
  Mat4 rho_;
};

inline DensityMatrix density_from_pure(const Amplitudes& psi) {
  const Mat4 rho = psi.vec() * psi.vec().adjoint();
  return DensityMatrix::from_matrix(hermitian_part(rho));
}

/// Mixed-state encoding: the average of |psi(theta_k)><psi(theta_k)| over a
/// uniform grid of `grid_size` phases in [0, 2 pi).
inline DensityMatrix phase_average(const std::function<Amplitudes(real)>& family, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("phase_average needs grid_size >= 2");
  Mat4 acc = Mat4::Zero();
  for (int k = 0; k < grid_size; ++k) {
    const real theta = 2.0 * PI * static_cast<real>(k) / static_cast<real>(grid_size);
    const Vec4& v = family(theta).vec();
    acc += v * v.adjoint();
  }
  acc /= static_cast<real>(grid_size);
  return DensityMatrix::from_matrix(hermitian_part(acc));
}

/// Expectation of an observable, discarding the imaginary round-off.
inline real expectation(const DensityMatrix& rho, const Mat4& observable) {
  return (rho.matrix() * observable).trace().real();
}

/// <sigma_zA sigma_zB>, the classical correlation of the state.
inline real zz_correlation(const DensityMatrix& rho) {
  // sigma_z (x) sigma_z is diagonal (+1, -1, -1, +1).
  const Mat4& m = rho.matrix();
  return (m(0, 0) - m(1, 1) - m(2, 2) + m(3, 3)).real();
}

/// Dominant eigenvector when `rho` has rank one (second eigenvalue below `tol`).
inline std::optional<Amplitudes> as_pure(const DensityMatrix& rho, real tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(rho.matrix());
  const auto& ev = es.eigenvalues();  // ascending
  if (ev(2) > tol) return std::nullopt;
  return normalize_vector(es.eigenvectors().col(3));
}

// ---------------------------------------------------------------------------
// catalog

struct CatalogParams {
  real gamma = 0.5;  // C = |0>(|0> + gamma|1>)
  real delta = 0.0;  // Bell = |00> + e^{i delta}|11>
};

struct CatalogEntry {
  std::string name;
  DensityMatrix state;
  std::optional<Amplitudes> pure;
  std::map<std::string, real> params;
};

namespace detail {

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

inline CatalogEntry pure_entry(std::string name, const std::array<cplx, 4>& raw,
                               std::map<std::string, real> params = {}) {
  const Amplitudes a = normalize(raw);
  return CatalogEntry{std::move(name), density_from_pure(a), a, std::move(params)};
}

}  // namespace detail

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"bell", "epr", "flat",        "C", "P",
                                                 "M",    "ket00", "ket10_09_11", "P2"};
  return names;
}

/// Canonical spelling of a catalog name (lookup is case-insensitive).
inline std::string canonical_name(const std::string& name) {
  const std::string key = detail::lower(name);
  for (const auto& n : catalog_names())
    if (detail::lower(n) == key) return n;
  throw CatalogError("unknown state '" + name + "'");
}

inline CatalogEntry catalog_entry(const std::string& name, const CatalogParams& p = {}) {
  const std::string n = canonical_name(name);
  if (n == "bell")
    return detail::pure_entry(n, {1.0, 0.0, 0.0, std::polar(1.0, p.delta)}, {{"delta", p.delta}});
  if (n == "epr") return detail::pure_entry(n, {0.0, 1.0, 1.0, 0.0});
  if (n == "flat") return detail::pure_entry(n, {1.0, 1.0, 1.0, 1.0});
  if (n == "C") return detail::pure_entry(n, {1.0, p.gamma, 0.0, 0.0}, {{"gamma", p.gamma}});
  if (n == "P") return detail::pure_entry(n, {0.0, 1.0, 1.0, 1.0});
  if (n == "ket00") return detail::pure_entry(n, {1.0, 0.0, 0.0, 0.0});
  if (n == "ket10_09_11") return detail::pure_entry(n, {0.0, 0.0, 1.0, 0.9});
  if (n == "P2") return detail::pure_entry(n, {1.0, 0.0, 1.0, 1.0});
  // M: the Bell family with its relative phase integrated out
  const DensityMatrix m = phase_average(
      [](real theta) { return normalize({1.0, 0.0, 0.0, std::polar(1.0, theta)}); }, 16);
  return CatalogEntry{n, m, std::nullopt, {}};
}

inline DensityMatrix catalog(const std::string& name, const CatalogParams& p = {}) {
  return catalog_entry(name, p).state;
}

// ---------------------------------------------------------------------------
// plain-text matrix dump: 4 rows, 4 space-separated "re,im" entries per row

inline void write_matrix(std::ostream& os, const Mat4& m) {
  std::ostringstream line;
  line << std::setprecision(17);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (j) line << ' ';
      line << m(i, j).real() << ',' << m(i, j).imag();
    }
    line << '\n';
  }
  os << line.str();
}

inline Mat4 read_matrix(std::istream& is) {
  Mat4 m;
  std::string row;
  int i = 0;
  int lineno = 0;
  while (i < 4 && std::getline(is, row)) {
    ++lineno;
    if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream rs(row);
    std::string tok;
    int j = 0;
    while (rs >> tok) {
      if (j >= 4) throw ConfigError("more than 4 entries in matrix row", lineno);
      const auto comma = tok.find(',');
      if (comma == std::string::npos) throw ConfigError("matrix entry '" + tok + "' is not re,im", lineno);
      try {
        m(i, j) = cplx(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
      } catch (const std::exception&) {
        throw ConfigError("cannot parse matrix entry '" + tok + "'", lineno);
      }
      ++j;
    }
    if (j != 4) throw ConfigError("matrix row has " + std::to_string(j) + " entries, expected 4", lineno);
    ++i;
  }
  if (i != 4) throw ConfigError("matrix dump has fewer than 4 rows");
  return m;
}

}  // namespace qtnn
