#include "algact/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "algact/parallel.hpp"

namespace algact {

namespace {

constexpr double kCutoffSlack = 1e-12;
constexpr double kRelativeDrop = 1e-15;

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

std::size_t grid_points(int L, int d) {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(L);
  return n;
}

// (1 / L^d) sum_j data[j] exp(-2 pi i x.j / L), in place.
void inverse_dft(std::vector<std::complex<double>>& data, int L, int d) {
  const std::size_t n = data.size();
  fftw_complex* buf = fftw_alloc_complex(n);
  std::copy(data.begin(), data.end(), reinterpret_cast<std::complex<double>*>(buf));
  {
    std::vector<int> dims(d, L);
    std::lock_guard lock(fftw_mutex());
    fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / static_cast<double>(n);
  const auto* out = reinterpret_cast<const std::complex<double>*>(buf);
  for (std::size_t i = 0; i < n; ++i) data[i] = out[i] * scale;
  fftw_free(buf);
}

// Group element for a grid index, using centered representatives.
Element centered(std::size_t flat, int L, int d) {
  Element g;
  for (int i = d - 1; i >= 0; --i) {
    const int x = static_cast<int>(flat % L);
    flat /= L;
    g.c[i] = x <= (L - 1) / 2 ? x : x - L;
  }
  return g;
}

int radius_of(const Element& g, int d) {
  int r = 0;
  for (int i = 0; i < d; ++i) r = std::max(r, std::abs(g.c[i]));
  return r;
}

double spectral_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double cutoff_of(double k) { return std::isinf(k) ? 0.0 : (1.0 / k) * (1.0 - kCutoffSlack); }

bool keep_singular(double s, double k) { return s > 0.0 && s >= cutoff_of(k); }

struct SvdTriple {
  Eigen::MatrixXcd u, v;
  Eigen::VectorXd s;
};

SvdTriple svd_of(const Eigen::MatrixXcd& a) {
  SvdTriple out;
  if (a.rows() == 1 && a.cols() == 1) {
    const std::complex<double> z = a(0, 0);
    const double r = std::abs(z);
    out.s = Eigen::VectorXd::Constant(1, r);
    out.u = Eigen::MatrixXcd::Constant(1, 1, r > 0.0 ? z / r : std::complex<double>(1.0));
    out.v = Eigen::MatrixXcd::Constant(1, 1, 1.0);
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.u = svd.matrixU();
  out.v = svd.matrixV();
  out.s = svd.singularValues();
  return out;
}

double sigma_min_of(const Eigen::MatrixXcd& a) {
  if (a.cols() > a.rows()) return 0.0;
  if (a.size() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

RingMatrix identity_like(const GroupSpec& spec, int n) { return RingMatrix::identity(spec, n); }

}  // namespace

int default_grid(int rank) {
  if (rank <= 1) return 2048;
  if (rank == 2) return 256;
  return 64;
}

std::array<int, kMaxRank> SymbolGrid::multi_index(std::size_t flat) const {
  std::array<int, kMaxRank> idx{};
  for (int i = spec.rank() - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % L);
    flat /= L;
  }
  return idx;
}

SymbolGrid build_symbol(const RingMatrix& f, int L) {
  if (f.spec().is_finite()) throw BackendMismatch("build_symbol requires a Z^d backend");
  const int d = f.spec().rank();
  const int radius = support_radius(f);
  if (L < 1 || L < 2 * radius + 1) {
    throw DomainError("grid size " + std::to_string(L) + " aliases a support of radius " + std::to_string(radius));
  }
  std::vector<std::complex<double>> twiddle(L);
  for (int t = 0; t < L; ++t) twiddle[t] = std::polar(1.0, 2.0 * std::numbers::pi * t / L);

  struct Term {
    int row, col;
    Element g;
    double c;
  };
  std::vector<Term> terms;
  for (int i = 0; i < f.rows(); ++i)
    for (int j = 0; j < f.cols(); ++j)
      for (const auto& [g, c] : f.at(i, j).terms()) terms.push_back({i, j, g, c});

  SymbolGrid grid;
  grid.spec = f.spec();
  grid.L = L;
  grid.rows = f.rows();
  grid.cols = f.cols();
  grid.values.resize(grid_points(L, d));
  parallel_for(grid.values.size(), [&](std::size_t p) {
    const auto idx = grid.multi_index(p);
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(f.rows(), f.cols());
    for (const auto& t : terms) {
      long long phase = 0;
      for (int i = 0; i < d; ++i) phase += static_cast<long long>(t.g.c[i]) * idx[i];
      phase %= L;
      if (phase < 0) phase += L;
      v(t.row, t.col) += t.c * twiddle[phase];
    }
    grid.values[p] = std::move(v);
  });
  return grid;
}

RegularRep regular_rep(const RingMatrix& f) {
  const GroupSpec& spec = f.spec();
  if (!spec.is_finite()) throw BackendMismatch("regular_rep requires a finite group");
  const int N = spec.order();
  const int m = f.rows(), n = f.cols();
  RegularRep rep{spec, m, n, Eigen::MatrixXd::Zero(N * m, N * n)};
  for (int g = 0; g < N; ++g) {
    for (int x = 0; x < N; ++x) {
      const Element h = spec.multiply(Element::index(g), spec.inverse(Element::index(x)));
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < n; ++l) rep.matrix(g * m + j, x * n + l) = f.at(j, l).coeff(h);
    }
  }
  return rep;
}

InjectivityReport injectivity_report(const RingMatrix& f, int L, double tol) {
  InjectivityReport rep;
  if (f.spec().is_finite()) {
    const RegularRep r = regular_rep(f);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r.matrix);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > tol) ++rank;
    rep.grid = f.spec().order();
    rep.kernel_dim = static_cast<int>(r.matrix.cols()) - rank;
    rep.min_singular = r.matrix.cols() > r.matrix.rows() || s.size() == 0 ? 0.0 : s(s.size() - 1);
    rep.zero_fraction = static_cast<double>(rep.kernel_dim) / r.matrix.cols();
    rep.zero_fraction_refined = rep.zero_fraction;
    rep.injective = rep.kernel_dim == 0;
    return rep;
  }
  auto count_dips = [&](int grid_size, double& min_sigma) {
    const SymbolGrid g = build_symbol(f, grid_size);
    std::vector<double> sig(g.points());
    parallel_for(g.points(), [&](std::size_t p) { sig[p] = sigma_min_of(g.values[p]); });
    min_sigma = *std::min_element(sig.begin(), sig.end());
    return std::count_if(sig.begin(), sig.end(), [&](double s) { return s < tol; });
  };
  const int d = f.spec().rank();
  double min1 = 0.0, min2 = 0.0;
  const auto c1 = count_dips(L, min1);
  const auto c2 = count_dips(2 * L, min2);
  rep.grid = L;
  rep.min_singular = std::min(min1, min2);
  rep.zero_fraction = static_cast<double>(c1) / grid_points(L, d);
  rep.zero_fraction_refined = static_cast<double>(c2) / grid_points(2 * L, d);
  rep.injective = c1 == 0 ||
                  (rep.zero_fraction_refined < rep.zero_fraction && rep.zero_fraction_refined < 0.5);
  rep.positive_dim_warning = d >= 2 && c1 > 0 && c2 > c1;
  return rep;
}

SpectralCalculus::SpectralCalculus(const RingMatrix& f, int L) : f_(f) {
  if (f.spec().is_finite()) {
    const RegularRep r = regular_rep(f);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(r.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    mu_ = svd.matrixU();
    mv_ = svd.matrixV();
    ms_ = svd.singularValues();
    L_ = f.spec().order();
    return;
  }
  d_ = f.spec().rank();
  L_ = L;
  grid_ = build_symbol(f, L);
  const std::size_t n = grid_.points();
  u_.resize(n);
  v_.resize(n);
  s_.resize(n);
  parallel_for(n, [&](std::size_t p) {
    SvdTriple t = svd_of(grid_.values[p]);
    u_[p] = std::move(t.u);
    v_[p] = std::move(t.v);
    s_[p] = std::move(t.s);
  });
}

double SpectralCalculus::min_singular() const {
  if (finite()) {
    if (mv_.rows() > mu_.rows() || ms_.size() == 0) return 0.0;
    return ms_(ms_.size() - 1);
  }
  if (f_.cols() > f_.rows()) return 0.0;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : s_) m = std::min(m, s(s.size() - 1));
  return m;
}

std::vector<std::complex<double>> SpectralCalculus::phi(double k, std::size_t point) const {
  const auto& s = s_[point];
  std::vector<std::complex<double>> out(s.size(), 0.0);
  for (int i = 0; i < s.size(); ++i)
    if (keep_singular(s(i), k)) out[i] = 1.0 / s(i);
  return out;
}

ApproxInverse SpectralCalculus::approximate_inverse(double k, std::optional<int> window, bool strict) const {
  if (!(k > 0.0)) throw DomainError("cutoff k must be positive");
  const GroupSpec& spec = f_.spec();
  const int m = f_.rows(), n = f_.cols();
  ApproxInverse out{k, RingMatrix(spec, n, m)};

  if (finite()) {
    const int N = spec.order();
    Eigen::VectorXd ph = Eigen::VectorXd::Zero(ms_.size());
    for (int i = 0; i < ms_.size(); ++i)
      if (keep_singular(ms_(i), k)) ph(i) = 1.0 / ms_(i);
    const Eigen::MatrixXd big = mv_ * ph.asDiagonal() * mu_.transpose();  // (N n) x (N m)
    const int e = spec.identity().idx();
    double max_abs = big.cwiseAbs().maxCoeff();
    for (int g = 0; g < N; ++g)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
          const double c = big(g * n + i, e * m + j);
          if (std::abs(c) > kRelativeDrop * max_abs) out.xi.at(i, j).set(Element::index(g), c);
        }
    const RegularRep r = regular_rep(f_);
    const Eigen::MatrixXd prod = big * r.matrix;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(prod);
    out.op_norm_bound = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    out.residual_left = l2_norm(mat_product(out.xi, f_) - identity_like(spec, n));
    out.residual_right = l2_norm(mat_product(f_, out.xi) - identity_like(spec, m));
    out.residual_left_truncated = out.residual_left;
    return out;
  }

  const std::size_t P = grid_.points();
  std::vector<Eigen::MatrixXcd> xs(P);
  std::vector<double> left(P), right(P), opn(P);
  parallel_for(P, [&](std::size_t p) {
    const auto ph = phi(k, p);
    Eigen::MatrixXcd x = v_[p] * Eigen::Map<const Eigen::VectorXcd>(ph.data(), ph.size()).asDiagonal() *
                         u_[p].adjoint();
    const Eigen::MatrixXcd& a = grid_.values[p];
    const Eigen::MatrixXcd xa = x * a;
    const Eigen::MatrixXcd ax = a * x;
    left[p] = (xa - Eigen::MatrixXcd::Identity(n, n)).squaredNorm();
    right[p] = (ax - Eigen::MatrixXcd::Identity(m, m)).squaredNorm();
    opn[p] = spectral_norm(xa);
    xs[p] = std::move(x);
  });
  double sl = 0.0, sr = 0.0, on = 0.0;
  for (std::size_t p = 0; p < P; ++p) {
    sl += left[p];
    sr += right[p];
    on = std::max(on, opn[p]);
  }
  out.residual_left = std::sqrt(sl / P);
  out.residual_right = std::sqrt(sr / P);
  out.op_norm_bound = on;

  // Real-space coefficients of every entry.
  std::vector<std::vector<double>> coeffs(static_cast<std::size_t>(n) * m);
  double max_abs = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      std::vector<std::complex<double>> buf(P);
      for (std::size_t p = 0; p < P; ++p) buf[p] = xs[p](i, j);
      inverse_dft(buf, L_, d_);
      auto& c = coeffs[i * m + j];
      c.resize(P);
      for (std::size_t p = 0; p < P; ++p) {
        c[p] = buf[p].real();
        max_abs = std::max(max_abs, std::abs(c[p]));
      }
    }
  const int max_radius = (L_ - 1) / 2;
  std::vector<double> by_radius(L_ / 2 + 1, 0.0);
  double total = 0.0;
  for (const auto& c : coeffs)
    for (std::size_t p = 0; p < P; ++p) {
      by_radius[radius_of(centered(p, L_, d_), d_)] += c[p] * c[p];
      total += c[p] * c[p];
    }
  auto discarded_beyond = [&](int w) {
    double kept = 0.0;
    for (int r = 0; r <= w && r < static_cast<int>(by_radius.size()); ++r) kept += by_radius[r];
    return total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
  };
  int w = 0;
  if (window) {
    w = *window;
    if (w < 0) throw DomainError("window must be nonnegative");
    w = std::min(w, max_radius);
    if (strict && discarded_beyond(w) > kWindowMassFraction) {
      throw WindowTooSmall("window " + std::to_string(*window) + " discards " +
                           std::to_string(discarded_beyond(w)) + " of the l2 mass of xi_k");
    }
  } else {
    while (w < max_radius && discarded_beyond(w) > kWindowMassFraction) ++w;
  }
  out.window = w;
  double dropped = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const auto& c = coeffs[i * m + j];
      for (std::size_t p = 0; p < P; ++p) {
        const Element g = centered(p, L_, d_);
        if (radius_of(g, d_) > w) continue;
        if (std::abs(c[p]) > kRelativeDrop * max_abs) {
          out.xi.at(i, j).set(g, c[p]);
        } else {
          dropped += c[p] * c[p];
        }
      }
    }
  out.truncation_mass = discarded_beyond(w) + (total > 0.0 ? dropped / total : 0.0);
  out.residual_left_truncated = l2_norm(mat_product(out.xi, f_) - identity_like(spec, n));
  return out;
}

VectorOverG SpectralCalculus::apply(double k, const VectorOverG& alpha, double drop) const {
  require_same(f_.spec(), alpha.spec());
  const int m = f_.rows(), n = f_.cols();
  if (alpha.components() != n) throw DimensionMismatch("alpha needs one component per column of f");
  if (finite()) {
    const ApproxInverse ai = approximate_inverse(k);
    VectorOverG beta = right_apply(ai.xi, alpha);
    for (int l = 0; l < beta.components(); ++l) {
      RingElement kept(beta.spec());
      for (const auto& [g, c] : beta[l].terms())
        if (std::abs(c) > drop) kept.set(g, c);
      beta[l] = kept;
    }
    return beta;
  }
  RingMatrix arow(f_.spec(), 1, n);
  for (int l = 0; l < n; ++l) arow.at(0, l) = alpha[l];
  const SymbolGrid ag = build_symbol(arow, L_);
  const std::size_t P = grid_.points();
  std::vector<Eigen::RowVectorXcd> bh(P);
  parallel_for(P, [&](std::size_t p) {
    const auto ph = phi(k, p);
    const Eigen::MatrixXcd x = v_[p] * Eigen::Map<const Eigen::VectorXcd>(ph.data(), ph.size()).asDiagonal() *
                               u_[p].adjoint();
    bh[p] = ag.values[p] * x;
  });
  VectorOverG beta(f_.spec(), m);
  for (int j = 0; j < m; ++j) {
    std::vector<std::complex<double>> buf(P);
    for (std::size_t p = 0; p < P; ++p) buf[p] = bh[p](j);
    inverse_dft(buf, L_, d_);
    for (std::size_t p = 0; p < P; ++p) {
      const double c = buf[p].real();
      if (std::abs(c) > drop) beta[j].set(centered(p, L_, d_), c);
    }
  }
  return beta;
}

double SpectralCalculus::apply_norm(double k, const VectorOverG& alpha) const {
  if (finite()) return l2_norm(apply(k, alpha, 0.0));
  require_same(f_.spec(), alpha.spec());
  const int n = f_.cols();
  if (alpha.components() != n) throw DimensionMismatch("alpha needs one component per column of f");
  RingMatrix arow(f_.spec(), 1, n);
  for (int l = 0; l < n; ++l) arow.at(0, l) = alpha[l];
  const SymbolGrid ag = build_symbol(arow, L_);
  const std::size_t P = grid_.points();
  std::vector<double> sq(P);
  parallel_for(P, [&](std::size_t p) {
    const auto ph = phi(k, p);
    const Eigen::MatrixXcd x = v_[p] * Eigen::Map<const Eigen::VectorXcd>(ph.data(), ph.size()).asDiagonal() *
                               u_[p].adjoint();
    sq[p] = (ag.values[p] * x).squaredNorm();
  });
  double s = 0.0;
  for (double v : sq) s += v;
  return std::sqrt(s / P);
}

ApproxInverse approximate_inverse(const RingMatrix& f, double k, int L, std::optional<int> window) {
  return SpectralCalculus(f, L).approximate_inverse(k, window);
}

FormalInverse l2_formal_inverse(const RingMatrix& f, int L, std::optional<int> window) {
  if (f.rows() != f.cols()) throw DimensionMismatch("l2_formal_inverse needs a square matrix");
  const SpectralCalculus calc(f, L);
  if (!(calc.min_singular() > kSingularTolerance)) {
    throw DomainError("symbol is singular at a grid point; no l2 formal inverse");
  }
  const ApproxInverse ai = calc.approximate_inverse(std::numeric_limits<double>::infinity(), window);
  return FormalInverse{ai.xi, ai.window, ai.residual_left_truncated, ai.truncation_mass};
}

std::vector<DivergenceRow> membership_divergence(const SpectralCalculus& calc, const VectorOverG& alpha,
                                                 const std::vector<double>& k_list) {
  std::vector<DivergenceRow> rows;
  for (double k : k_list) rows.push_back({k, calc.apply_norm(k, alpha)});
  return rows;
}

}  // namespace algact
