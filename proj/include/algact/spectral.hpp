#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "algact/groupring.hpp"

namespace algact {

inline constexpr double kWindowMassFraction = 1e-6;
inline constexpr double kSingularTolerance = 1e-9;

// Default grid side: 2048 for Z^1, 256 for Z^2, 64 beyond.
int default_grid(int rank);

// Samples of the Fourier symbol value(theta) = sum_g f(g) exp(2 pi i g.theta)
// at theta = j / L, j in {0..L-1}^d, in row-major order (first coordinate
// slowest).
struct SymbolGrid {
  GroupSpec spec = GroupSpec::free_abelian(1);
  int L = 0;
  int rows = 0;
  int cols = 0;
  std::vector<Eigen::MatrixXcd> values;

  std::size_t points() const { return values.size(); }
  // theta_i = index_i / L.
  std::array<int, kMaxRank> multi_index(std::size_t flat) const;
};

// Throws DomainError when L <= 2 * support radius (aliasing).
SymbolGrid build_symbol(const RingMatrix& f, int L);

// lambda(f) on l2(G)^n for a finite group: entry [(g,j),(x,l)] = f_jl(g x^-1),
// row index g*m + j, column index x*n + l.
struct RegularRep {
  GroupSpec spec;
  int rows = 0;
  int cols = 0;
  Eigen::MatrixXd matrix;
};

RegularRep regular_rep(const RingMatrix& f);

struct InjectivityReport {
  int grid = 0;                 // L (Z^d) or order (finite)
  double min_singular = 0.0;
  double zero_fraction = 0.0;   // at L
  double zero_fraction_refined = 0.0;  // at 2L
  int kernel_dim = -1;          // finite backend only
  bool injective = false;
  bool positive_dim_warning = false;
};

// Z^d: injective when no grid point has sigma_min < tol, or when the
// fraction of such points shrinks from L to 2L and stays below 1/2. In
// d >= 2 a growing count of dips is flagged as a possibly
// positive-dimensional zero set. Finite groups: exact kernel dimension.
InjectivityReport injectivity_report(const RingMatrix& f, int L, double tol = kSingularTolerance);

struct ApproxInverse {
  double k = 0.0;
  RingMatrix xi;                  // n x m, truncated to the window
  int window = 0;
  double residual_left = 0.0;     // |xi_k f - delta_1 (x) id|_2 on the grid
  double residual_right = 0.0;    // |f xi_k - delta_1 (x) id|_2 on the grid
  double residual_left_truncated = 0.0;  // same, with the windowed xi
  double op_norm_bound = 0.0;     // max over the grid of |xi_k^ f^|
  double truncation_mass = 0.0;   // discarded share of |xi_k|_2^2
};

// Functional calculus on lambda(f) for a fixed f: the per-point singular
// value decomposition is computed once and reused for every cutoff k.
class SpectralCalculus {
 public:
  // L is ignored for finite groups.
  SpectralCalculus(const RingMatrix& f, int L);

  const RingMatrix& f() const { return f_; }
  bool finite() const { return f_.spec().is_finite(); }
  int grid() const { return L_; }
  double min_singular() const;

  // xi_k = phi_k(|lambda(f)|) v^*, phi_k(s) = 1[s >= 1/k] / s; k = +inf
  // gives the pseudo-inverse. window: max-norm radius of the kept part of
  // xi_k; when absent the smallest radius discarding at most 1e-6 of the
  // l2 mass is used (capped at (L-1)/2). An explicit window discarding more
  // throws WindowTooSmall when strict.
  ApproxInverse approximate_inverse(double k, std::optional<int> window = std::nullopt,
                                    bool strict = true) const;

  // r(xi_k) alpha = alpha xi_k (untruncated), alpha with n components. The
  // result has m components; coefficients below `drop` in absolute value
  // are omitted.
  VectorOverG apply(double k, const VectorOverG& alpha, double drop = 1e-13) const;
  double apply_norm(double k, const VectorOverG& alpha) const;

 private:
  std::vector<std::complex<double>> phi(double k, std::size_t point) const;

  RingMatrix f_;
  int L_ = 0;
  int d_ = 0;
  SymbolGrid grid_;
  std::vector<Eigen::MatrixXcd> u_, v_;
  std::vector<Eigen::VectorXd> s_;
  // Finite backend.
  Eigen::MatrixXd mu_, mv_;
  Eigen::VectorXd ms_;
};

ApproxInverse approximate_inverse(const RingMatrix& f, double k, int L,
                                  std::optional<int> window = std::nullopt);

struct FormalInverse {
  RingMatrix xi;
  int window = 0;
  double residual = 0.0;         // |xi f - delta_1 (x) id|_2 with the windowed xi
  double truncation_mass = 0.0;
};

// Inverse DFT of the inverse symbol, truncated to the window. Throws
// DomainError when the symbol is singular at a grid point.
FormalInverse l2_formal_inverse(const RingMatrix& f, int L, std::optional<int> window = std::nullopt);

struct DivergenceRow {
  double k = 0.0;
  double norm = 0.0;  // |r(xi_k) alpha|_2
};

std::vector<DivergenceRow> membership_divergence(const SpectralCalculus& calc, const VectorOverG& alpha,
                                                 const std::vector<double>& k_list);

}  // namespace algact
