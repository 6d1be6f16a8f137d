#include "linconvex/families.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

namespace linconvex {

namespace {

constexpr double kTinyChart = 1e-14;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from a 64-bit word; platform independent.
double unit(std::uint64_t bits) { return double(bits >> 11) * 0x1.0p-53; }

double seeded_unit(std::uint64_t seed, std::uint64_t salt) {
  return unit(splitmix(seed * 0x9e3779b97f4a7c15ULL + salt));
}

// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed, std::uint64_t salt) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::mt19937_64 rng(splitmix(seed ^ (salt * 0xd1342543de82ef95ULL)));
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

// Root of x^(d+1) = x + 1; generates the d-dimensional Kronecker sequence.
double kronecker_base(int d) {
  double x = 2.0;
  for (int it = 0; it < 100; ++it) x = std::pow(1.0 + x, 1.0 / (d + 1));
  return x;
}

double frac(double v) { return v - std::floor(v); }

// Normalizes v[0..n) and flips it so the first nonzero entry is positive.
// Entries below kTinyChart after scaling are snapped to zero. Returns the
// applied scale (signed), zero when v vanishes.
double canonicalize(double* v, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += v[i] * v[i];
  s = std::sqrt(s);
  if (s == 0 || !std::isfinite(s)) return 0;
  double sign = 0;
  for (int i = 0; i < n; ++i) {
    if (std::abs(v[i]) > kTinyChart * s) {
      sign = v[i] > 0 ? 1 : -1;
      break;
    }
  }
  double k = sign / s;
  for (int i = 0; i < n; ++i) {
    v[i] *= k;
    if (std::abs(v[i]) <= kTinyChart) v[i] = 0;
  }
  return k;
}

// Range of u . y over the box, u given on `axes`.
std::pair<double, double> support(const BoundingBox& box, const double* u, const int* axes, int m) {
  double mid = 0, half = 0;
  for (int j = 0; j < m; ++j) {
    int a = axes[j];
    mid += u[j] * 0.5 * (box.lo()[a] + box.hi()[a]);
    half += std::abs(u[j]) * 0.5 * box.extent(a);
  }
  return {mid - half, mid + half};
}

// Stratified sample of stratum s out of n over [lo, hi], jitter in [0, 1).
double stratum(double lo, double hi, std::size_t s, std::size_t n, double jitter) {
  return lo + (hi - lo) * (double(s) + jitter) / double(n);
}

int nominal_codim(const Family& w) {
  switch (w.kind()) {
    case FamilyKind::AllHyperplanes: return 1;
    case FamilyKind::ParallelLines3D: return 2;
    case FamilyKind::PencilLines3D: return 2;
    case FamilyKind::SkewOperator: return w.dim() == 1 ? 1 : 2;
    case FamilyKind::ParallelCodim2: return 2;
    case FamilyKind::Pullback: return 1;
  }
  return 1;
}

// Builds the canonical sample, checks the element exists and records whether
// its codimension dropped. False when the chart point names no flat.
bool finish(const Family& w, const ChartCoords& c, ParamSample& out) {
  try {
    out = w.canonical(c);
    AffineSubspace s = w.element(out);
    out.degenerate = s.codim() < nominal_codim(w);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DegenerateParams) return false;
    throw;
  }
}

std::vector<Eigen::VectorXd> orthonormal_complement(const std::vector<Eigen::VectorXd>& span,
                                                    int dim) {
  std::vector<Eigen::VectorXd> basis;
  for (const auto& v : span) {
    Eigen::VectorXd w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= w.dot(b) * b;
    if (w.norm() > 1e-10 * std::max(1.0, v.norm())) basis.push_back(w.normalized());
  }
  std::size_t taken = basis.size();
  for (int axis = 0; axis < dim && int(basis.size()) < dim; ++axis) {
    Eigen::VectorXd w = Eigen::VectorXd::Unit(dim, axis);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= w.dot(b) * b;
    if (w.norm() > 1e-6) basis.push_back(w.normalized());
  }
  return {basis.begin() + std::ptrdiff_t(taken), basis.end()};
}

void check_dim(const Family& w, int n) {
  if (w.dim() != n)
    throw Error(ErrorCode::DimMismatch, w.name() + " lives in dimension " +
                                            std::to_string(w.dim()) + ", got " +
                                            std::to_string(n));
}

}  // namespace

//---------------------------------------------------------------------------//
std::array<double, kMaxChart> hemisphere_point(int m, std::size_t i, std::size_t count,
                                               std::uint64_t seed, bool exact, bool axes_first) {
  std::array<double, kMaxChart> p{};
  if (m < 0 || m + 1 > kMaxChart)
    throw Error(ErrorCode::InvalidArgument, "hemisphere dimension out of range");
  if (m == 0) {
    p[0] = 1;
    return p;
  }
  if (axes_first && m >= 2 && count > std::size_t(m + 1)) {
    if (i <= std::size_t(m)) {
      p[i] = 1;
      return p;
    }
    i -= std::size_t(m + 1);
    count -= std::size_t(m + 1);
  }
  const double pi = std::numbers::pi;
  if (m == 1) {
    double phase = exact ? 0.0 : seeded_unit(seed, 11);
    double theta = pi * (double(i) + phase) / double(count);
    p[0] = std::cos(theta);
    p[1] = std::sin(theta);
  } else if (m == 2) {
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double phase = exact ? 0.0 : seeded_unit(seed, 13);
    double a = (double(i) + 0.5) / double(count);
    double r = std::sqrt(std::max(0.0, 1.0 - a * a));
    double phi = 2 * pi * frac(double(i) * g + phase);
    p[0] = a;
    p[1] = r * std::cos(phi);
    p[2] = r * std::sin(phi);
  } else {
    double base = kronecker_base(m + 1);
    double len = 0;
    for (int j = 0; j <= m; ++j) {
      double alpha = frac(std::pow(base, -(j + 1)));
      double shift = exact ? 0.5 : seeded_unit(seed, 17 + j);
      double u = frac(shift + double(i) * alpha);
      u = std::clamp(u, 1e-12, 1 - 1e-12);
      p[j] = std::sqrt(2.0) * boost::math::erf_inv(2 * u - 1);
      len += p[j] * p[j];
    }
    if (len == 0) p[0] = 1;
  }
  canonicalize(p.data(), m + 1);
  return p;
}

std::size_t spread_index(std::size_t j, std::size_t count) {
  if (count <= 2) return j % std::max<std::size_t>(count, 1);
  std::size_t step = std::max<std::size_t>(1, std::size_t(0.6180339887498949 * double(count)));
  while (std::gcd(step, count) != 1) ++step;
  return static_cast<std::size_t>((unsigned __int128)(j % count) * step % count);
}

//---------------------------------------------------------------------------//
// Family
//---------------------------------------------------------------------------//
Family Family::all_hyperplanes(int n) {
  if (n < 2 || n > kMaxDim) throw Error(ErrorCode::DimMismatch, "AllHyperplanes needs 2 <= n <= 4");
  Family f;
  f.kind_ = FamilyKind::AllHyperplanes;
  f.dim_ = n;
  return f;
}

Family Family::parallel_lines_3d() {
  Family f;
  f.kind_ = FamilyKind::ParallelLines3D;
  f.dim_ = 3;
  f.axis_ = 2;
  return f;
}

Family Family::pencil_lines_3d() {
  Family f;
  f.kind_ = FamilyKind::PencilLines3D;
  f.dim_ = 3;
  f.axis_ = 2;
  return f;
}

Family Family::skew_operator(const Eigen::MatrixXd& a) {
  int n = int(a.rows()) - 1;
  if (a.rows() != a.cols() || n < 2 || n > kMaxDim)
    throw Error(ErrorCode::DimMismatch, "SkewOperator needs an (n+1)x(n+1) matrix, 2 <= n <= 4");
  if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "SkewOperator matrix is not skew-symmetric");
  Family f;
  f.kind_ = FamilyKind::SkewOperator;
  f.dim_ = n;
  f.skew_ = a;
  return f;
}

Family Family::parallel_codim2(int n, int axis) {
  if (n < 2 || n > kMaxDim) throw Error(ErrorCode::DimMismatch, "ParallelCodim2 needs 2 <= n <= 4");
  if (axis < 0 || axis >= n) throw Error(ErrorCode::IndexOutOfRange, "slice axis out of range");
  Family f;
  f.kind_ = FamilyKind::ParallelCodim2;
  f.dim_ = n;
  f.axis_ = axis;
  return f;
}

Family Family::pullback_lines(int n, int axis_a, int axis_b) {
  if (n < 2 || n > kMaxDim) throw Error(ErrorCode::DimMismatch, "Pullback needs 2 <= n <= 4");
  if (axis_a < 0 || axis_b < 0 || axis_a >= n || axis_b >= n || axis_a == axis_b)
    throw Error(ErrorCode::IndexOutOfRange, "projection axes invalid");
  Family f;
  f.kind_ = FamilyKind::Pullback;
  f.dim_ = n;
  f.axis_ = axis_a;
  f.axis_b_ = axis_b;
  return f;
}

Family Family::parse(const std::string& text, int n) {
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "bad family argument '" + item + "'");
      }
    }
  }
  auto need_args = [&](std::size_t k) {
    if (args.size() != k)
      throw Error(ErrorCode::ParseError, head + " takes " + std::to_string(k) + " arguments");
  };
  if (head == "AllHyperplanes" || head == "lines2d") {
    need_args(0);
    return all_hyperplanes(n);
  }
  if (head == "ParallelLines3D") {
    need_args(0);
    check_dim(parallel_lines_3d(), n);
    return parallel_lines_3d();
  }
  if (head == "PencilLines3D") {
    need_args(0);
    check_dim(pencil_lines_3d(), n);
    return pencil_lines_3d();
  }
  if (head == "ParallelCodim2") {
    if (args.empty()) return parallel_codim2(n, n - 1);
    need_args(1);
    return parallel_codim2(n, int(args[0]));
  }
  if (head == "Pullback") {
    if (args.empty()) return pullback_lines(n, 0, 1);
    need_args(2);
    return pullback_lines(n, int(args[0]), int(args[1]));
  }
  if (head == "SkewOperator") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
    if (!args.empty()) {
      need_args(std::size_t(n * (n + 1) / 2));
      std::size_t k = 0;
      for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
          a(i, j) = args[k++];
          a(j, i) = -a(i, j);
        }
    }
    return skew_operator(a);
  }
  throw Error(ErrorCode::ParseError, "unknown family '" + text + "'");
}

std::string Family::name() const {
  switch (kind_) {
    case FamilyKind::AllHyperplanes: return "AllHyperplanes";
    case FamilyKind::ParallelLines3D: return "ParallelLines3D";
    case FamilyKind::PencilLines3D: return "PencilLines3D";
    case FamilyKind::SkewOperator: return "SkewOperator";
    case FamilyKind::ParallelCodim2: return "ParallelCodim2";
    case FamilyKind::Pullback: return "Pullback";
  }
  return "?";
}

int Family::chart_size() const {
  switch (kind_) {
    case FamilyKind::AllHyperplanes: return dim_ + 1;
    case FamilyKind::ParallelLines3D: return 4;
    case FamilyKind::PencilLines3D: return 4;
    case FamilyKind::SkewOperator: return dim_ + 1;
    case FamilyKind::ParallelCodim2: return dim_ + 1;
    case FamilyKind::Pullback: return 3;
  }
  return 0;
}

ParamSample Family::canonical(const ChartCoords& c, bool degenerate) const {
  ParamSample p;
  p.size = chart_size();
  p.degenerate = degenerate;
  for (int i = 0; i < p.size; ++i) p.coords[i] = c[i];
  double* v = p.coords.data();
  double k = 0;
  switch (kind_) {
    case FamilyKind::AllHyperplanes:
    case FamilyKind::Pullback: {
      int m = p.size - 1;
      k = canonicalize(v, m);
      v[m] *= k;
      break;
    }
    case FamilyKind::ParallelLines3D:
      k = canonicalize(v, 3);
      break;
    case FamilyKind::PencilLines3D:
    case FamilyKind::SkewOperator:
      k = canonicalize(v, p.size);
      break;
    case FamilyKind::ParallelCodim2: {
      int m = dim_ - 1;
      k = canonicalize(v + 1, m);
      v[1 + m] *= k;
      break;
    }
  }
  if (k == 0) throw Error(ErrorCode::DegenerateParams, name() + ": projective factor vanishes");
  return p;
}

AffineSubspace Family::element(const ParamSample& p) const {
  if (p.size != chart_size())
    throw Error(ErrorCode::DimMismatch, name() + ": chart point has wrong length");
  const auto& v = p.coords;
  std::array<Coord, 2> rows{};
  std::array<double, 2> rhs{};
  std::size_t count = 0;
  switch (kind_) {
    case FamilyKind::AllHyperplanes:
      for (int i = 0; i < dim_; ++i) rows[0][i] = v[i];
      rhs[0] = v[dim_];
      count = 1;
      break;
    case FamilyKind::ParallelLines3D:
      // x3 = d, a x1 + b x2 + c = 0.
      if (v[0] == 0 && v[1] == 0)
        throw Error(ErrorCode::DegenerateParams, "ParallelLines3D needs (a, b) != 0");
      rows[0] = {0, 0, 1, 0};
      rhs[0] = v[3];
      rows[1] = {v[0], v[1], 0, 0};
      rhs[1] = -v[2];
      count = 2;
      break;
    case FamilyKind::PencilLines3D:
      rows[0] = {v[0], v[1], v[2], 0};
      rhs[0] = -v[3];
      rows[1] = {-v[1], v[0], 0, 0};
      rhs[1] = 0;
      count = 2;
      break;
    case FamilyKind::SkewOperator: {
      Eigen::VectorXd x(dim_ + 1);
      for (int i = 0; i <= dim_; ++i) x[i] = v[i];
      Eigen::VectorXd ax = skew_ * x;
      for (int i = 0; i < dim_; ++i) {
        rows[0][i] = x[i];
        rows[1][i] = ax[i];
      }
      rhs[0] = -x[dim_];
      rhs[1] = -ax[dim_];
      count = 2;
      break;
    }
    case FamilyKind::ParallelCodim2: {
      rows[0][axis_] = 1;
      rhs[0] = v[0];
      int j = 1;
      for (int i = 0; i < dim_; ++i)
        if (i != axis_) rows[1][i] = v[j++];
      rhs[1] = v[dim_];
      count = 2;
      break;
    }
    case FamilyKind::Pullback:
      rows[0][axis_] = v[0];
      rows[0][axis_b_] = v[1];
      rhs[0] = v[2];
      count = 1;
      break;
  }
  return AffineSubspace::from_equations(dim_, std::span<const Coord>(rows.data(), count),
                                        std::span<const double>(rhs.data(), count));
}

nlohmann::json Family::descriptor() const {
  nlohmann::json params = {{"n", dim_}};
  if (kind_ == FamilyKind::ParallelCodim2) params["axis"] = axis_;
  if (kind_ == FamilyKind::Pullback) params["axes"] = {axis_, axis_b_};
  if (kind_ == FamilyKind::SkewOperator) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < skew_.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < skew_.cols(); ++j) row.push_back(skew_(i, j));
      rows.push_back(row);
    }
    params["matrix"] = rows;
  }
  return {{"variant", name()}, {"params", params}};
}

bool Family::operator==(const Family& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_ || axis_ != o.axis_ || axis_b_ != o.axis_b_) return false;
  if (kind_ != FamilyKind::SkewOperator) return true;
  return skew_ == o.skew_;
}

//---------------------------------------------------------------------------//
// sample_params
//---------------------------------------------------------------------------//
std::vector<ParamSample> sample_params(const Family& w, std::size_t budget, const BoundingBox& box,
                                       std::uint64_t seed) {
  if (budget < 1) throw Error(ErrorCode::InvalidArgument, "budget must be at least 1");
  check_dim(w, box.dim());
  const int n = w.dim();
  std::vector<ParamSample> out;
  out.reserve(budget + budget / 4 + 8);
  auto perm = permutation(budget, seed, 1);
  auto jitter = [&](std::size_t i, std::uint64_t salt) { return seeded_unit(seed, salt * 1000003 + i); };
  ParamSample s;

  switch (w.kind()) {
    case FamilyKind::AllHyperplanes:
    case FamilyKind::Pullback: {
      std::array<int, kMaxDim> axes{0, 1, 2, 3};
      int m = n;
      if (w.kind() == FamilyKind::Pullback) {
        axes[0] = w.axis();
        axes[1] = w.axis_b();
        m = 2;
      }
      for (std::size_t i = 0; i < budget; ++i) {
        auto u = hemisphere_point(m - 1, i, budget, seed, false, false);
        auto [lo, hi] = support(box, u.data(), axes.data(), m);
        ChartCoords c{};
        for (int j = 0; j < m; ++j) c[j] = u[j];
        c[m] = stratum(lo, hi, perm[i], budget, jitter(i, 2));
        if (finish(w, c, s)) out.push_back(s);
      }
      break;
    }
    case FamilyKind::ParallelLines3D: {
      // (a:b:c) near-uniform on the RP^2 hemisphere; d stratified over the x3 range.
      for (std::size_t i = 0; i < budget; ++i) {
        auto u = hemisphere_point(2, i, budget, seed, false, false);
        double d = stratum(box.lo()[2], box.hi()[2], perm[i], budget, jitter(i, 2));
        ChartCoords c{u[0], u[1], u[2], d};
        if (finish(w, c, s)) out.push_back(s);
      }
      break;
    }
    case FamilyKind::PencilLines3D: {
      for (std::size_t i = 0; i < budget; ++i) {
        auto u = hemisphere_point(3, i, budget, seed, false, false);
        ChartCoords c{u[0], u[1], u[2], u[3]};
        if (finish(w, c, s)) out.push_back(s);
      }
      // Planes x3 = t perpendicular to the axis.
      std::size_t extra = std::size_t(std::ceil(std::sqrt(double(budget))));
      for (std::size_t j = 0; j < extra; ++j) {
        double t = stratum(box.lo()[2], box.hi()[2], j, extra, jitter(j, 3));
        ChartCoords c{0, 0, 1, -t};
        if (finish(w, c, s)) out.push_back(s);
      }
      break;
    }
    case FamilyKind::SkewOperator: {
      for (std::size_t i = 0; i < budget; ++i) {
        auto u = hemisphere_point(n, i, budget, seed, false, false);
        ChartCoords c{};
        for (int j = 0; j <= n; ++j) c[j] = u[j];
        if (finish(w, c, s)) out.push_back(s);
      }
      // Kernel directions of A, where the element is a hyperplane.
      Eigen::FullPivLU<Eigen::MatrixXd> lu(w.skew());
      lu.setThreshold(1e-12);
      Eigen::MatrixXd ker = lu.kernel();
      if (ker.cols() > 0 && ker.norm() > 0) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(ker);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n + 1, ker.cols());
        int r = int(ker.cols());
        std::size_t extra = r == 1 ? 1 : std::size_t(std::ceil(std::sqrt(double(budget))));
        for (std::size_t j = 0; j < extra; ++j) {
          auto u = hemisphere_point(r - 1, j, extra, seed ^ 0x5a5a, false, false);
          Eigen::VectorXd p = Eigen::VectorXd::Zero(n + 1);
          for (int k = 0; k < r; ++k) p += u[k] * q.col(k);
          ChartCoords c{};
          for (int k = 0; k <= n; ++k) c[k] = p[k];
          if (finish(w, c, s)) {
            s.degenerate = true;
            out.push_back(s);
          }
        }
      }
      break;
    }
    case FamilyKind::ParallelCodim2: {
      const int k = w.axis();
      std::array<int, kMaxDim> axes{};
      int m = 0;
      for (int i = 0; i < n; ++i)
        if (i != k) axes[m++] = i;
      auto perm_t = permutation(budget, seed, 2);
      for (std::size_t i = 0; i < budget; ++i) {
        auto u = hemisphere_point(m - 1, i, budget, seed, false, false);
        auto [lo, hi] = support(box, u.data(), axes.data(), m);
        ChartCoords c{};
        c[0] = stratum(box.lo()[k], box.hi()[k], perm[i], budget, jitter(i, 2));
        for (int j = 0; j < m; ++j) c[1 + j] = u[j];
        c[1 + m] = stratum(lo, hi, perm_t[i], budget, jitter(i, 4));
        if (finish(w, c, s)) out.push_back(s);
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

//---------------------------------------------------------------------------//
// ThroughPoint
//---------------------------------------------------------------------------//
ThroughPoint::ThroughPoint(const Family& w, const Coord& x, std::size_t budget, std::uint64_t seed)
    : family_(&w), x_(x), budget_(std::max<std::size_t>(budget, 1)), seed_(seed) {
  const int n = w.dim();
  switch (w.kind()) {
    case FamilyKind::AllHyperplanes:
    case FamilyKind::ParallelLines3D:
    case FamilyKind::Pullback:
      size_ = budget_;
      break;
    case FamilyKind::PencilLines3D: {
      double scale = std::max({1.0, std::abs(x[0]), std::abs(x[1])});
      on_axis_ = std::hypot(x[0], x[1]) <= 1e-12 * scale;
      if (on_axis_ && budget_ > 1) {
        planes_ = std::size_t(std::ceil(std::sqrt(double(budget_ - 1))));
        per_plane_ = (budget_ - 1 + planes_ - 1) / planes_;
        size_ = 1 + planes_ * per_plane_;
      } else {
        size_ = budget_;
      }
      break;
    }
    case FamilyKind::SkewOperator: {
      Eigen::VectorXd xh(n + 1);
      for (int i = 0; i < n; ++i) xh[i] = x[i];
      xh[n] = 1;
      Eigen::VectorXd ax = w.skew() * xh;
      basis_ = orthonormal_complement({xh, ax}, n + 1);
      size_ = basis_.size() <= 1 ? basis_.size() : budget_;
      break;
    }
    case FamilyKind::ParallelCodim2:
      size_ = n == 2 ? 1 : budget_;
      break;
  }
}

bool ThroughPoint::at(std::size_t i, ParamSample& out) const {
  const Family& w = *family_;
  const int n = w.dim();
  const double pi = std::numbers::pi;
  ChartCoords c{};
  switch (w.kind()) {
    case FamilyKind::AllHyperplanes: {
      auto u = hemisphere_point(n - 1, i, size_, seed_, true, true);
      double t = 0;
      for (int j = 0; j < n; ++j) {
        c[j] = u[j];
        t += u[j] * x_[j];
      }
      c[n] = t;
      break;
    }
    case FamilyKind::Pullback: {
      auto u = hemisphere_point(1, i, size_, seed_, true, true);
      c = {u[0], u[1], u[0] * x_[w.axis()] + u[1] * x_[w.axis_b()]};
      break;
    }
    case FamilyKind::ParallelLines3D: {
      // Lines in the slice x3 = x3(x), direction angle pi i / B.
      double theta = pi * double(i) / double(size_);
      double a = -std::sin(theta), b = std::cos(theta);
      c = {a, b, -(a * x_[0] + b * x_[1]), x_[2]};
      break;
    }
    case FamilyKind::PencilLines3D: {
      if (i == 0) {
        c = {0, 0, 1, -x_[2]};
        break;
      }
      double alpha, psi;
      if (on_axis_) {
        std::size_t j = (i - 1) % planes_, l = (i - 1) / planes_;
        alpha = pi * double(j) / double(planes_);
        psi = pi * double(l + 1) / double(per_plane_ + 1);
      } else {
        alpha = std::atan2(x_[1], x_[0]);
        psi = pi * double(i) / double(size_);
      }
      // In the pencil plane at angle alpha, with coordinates (r, x3), take the
      // line through x with normal (-sin psi, cos psi); psi in (0, pi) keeps
      // the radial component nonzero.
      double ca = std::cos(alpha), sa = std::sin(alpha);
      double r0 = ca * x_[0] + sa * x_[1];
      double sr = -std::sin(psi), sz = std::cos(psi);
      c = {sr * ca, sr * sa, sz, -(sr * r0 + sz * x_[2])};
      break;
    }
    case FamilyKind::SkewOperator: {
      if (basis_.empty()) return false;
      int r = int(basis_.size());
      auto u = hemisphere_point(r - 1, i, size_, seed_, r == 2, true);
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n + 1);
      for (int k = 0; k < r; ++k) p += u[k] * basis_[k];
      for (int k = 0; k <= n; ++k) c[k] = p[k];
      break;
    }
    case FamilyKind::ParallelCodim2: {
      const int k = w.axis();
      int m = n - 1;
      auto u = hemisphere_point(m - 1, i, size_, seed_, m == 2, true);
      c[0] = x_[k];
      double t = 0;
      int j = 0;
      for (int a = 0; a < n; ++a)
        if (a != k) {
          c[1 + j] = u[j];
          t += u[j] * x_[a];
          ++j;
        }
      c[1 + m] = t;
      break;
    }
  }
  return finish(w, c, out);
}

std::vector<ParamSample> elements_through(const Family& w, const Coord& x, std::size_t budget,
                                          std::uint64_t seed) {
  ThroughPoint tp(w, x, budget, seed);
  std::vector<ParamSample> out;
  out.reserve(tp.size());
  ParamSample s;
  for (std::size_t i = 0; i < tp.size(); ++i)
    if (tp.at(i, s)) out.push_back(s);
  if (out.empty())
    throw Error(ErrorCode::EmptyThroughSet, w.name() + " has no element through the point");
  return out;
}

}  // namespace linconvex
