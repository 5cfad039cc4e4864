#include "dpplab/estimator.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dpplab/exact.hpp"
#include "json.hpp"

namespace dpp {

int vech_length(int d) { return d * (d + 1) / 2; }

int vech_index(int i, int j, int d) {
  if (j > i) std::swap(i, j);  // lower triangle
  // column-major: columns 1..j-1 contribute (d - c + 1) entries each
  return (j - 1) * d - (j - 1) * (j - 2) / 2 + (i - j);
}

Vector vech(const Matrix& M) {
  const int d = static_cast<int>(M.rows());
  Vector v(vech_length(d));
  int h = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) v[h++] = M(i, j);
  return v;
}

// ---------------------------------------------------------------------------
// Sample moments

namespace {

// Histogram + superset-sum path for d <= 20: count subset occurrences, then
// F[m] = sum over supersets of m of the counts, in O(2^d d + T).
MomentVector moments_by_histogram(const SampleMatrix& X, int pivot) {
  const int d = X.d;
  const long T = X.rows();
  std::vector<std::int64_t> f(std::size_t{1} << d, 0);
  for (long t = 0; t < T; ++t) {
    std::uint32_t m = 0;
    const std::uint8_t* row = &X.data[static_cast<std::size_t>(t) * d];
    for (int i = 0; i < d; ++i) m |= static_cast<std::uint32_t>(row[i]) << i;
    ++f[m];
  }
  for (int b = 0; b < d; ++b)
    for (std::uint32_t m = 0; m < (1u << d); ++m)
      if (!(m & (1u << b))) f[m] += f[m | (1u << b)];

  const double invT = 1.0 / static_cast<double>(T);
  auto freq = [&](std::uint32_t mask) { return static_cast<double>(f[mask]) * invT; };

  Vector v(MomentVector::length(d));
  int h = 0;
  for (int i = 0; i < d; ++i) v[h++] = freq(1u << i);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) v[h++] = freq((1u << i) | (1u << j));
  const std::uint32_t pm = 1u << (pivot - 1);
  for (int i = 0; i < d; ++i) {
    if (i == pivot - 1) continue;
    for (int j = i + 1; j < d; ++j) {
      if (j == pivot - 1) continue;
      v[h++] = freq(pm | (1u << i) | (1u << j));
    }
  }
  return MomentVector(d, pivot, std::move(v));
}

MomentVector moments_direct(const SampleMatrix& X, int pivot) {
  const int d = X.d;
  const long T = X.rows();
  std::vector<std::int64_t> marg(static_cast<std::size_t>(d), 0);
  std::vector<std::int64_t> pairs(static_cast<std::size_t>(d) * d, 0);
  std::vector<std::int64_t> triples(static_cast<std::size_t>(d) * d, 0);
  for (long t = 0; t < T; ++t) {
    const std::uint8_t* row = &X.data[static_cast<std::size_t>(t) * d];
    for (int i = 0; i < d; ++i) {
      if (!row[i]) continue;
      ++marg[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < d; ++j)
        if (row[j]) ++pairs[static_cast<std::size_t>(i) * d + j];
    }
    if (row[pivot - 1]) {
      for (int i = 0; i < d; ++i) {
        if (i == pivot - 1 || !row[i]) continue;
        for (int j = i + 1; j < d; ++j)
          if (j != pivot - 1 && row[j]) ++triples[static_cast<std::size_t>(i) * d + j];
      }
    }
  }
  const double invT = 1.0 / static_cast<double>(T);
  Vector v(MomentVector::length(d));
  int h = 0;
  for (int i = 0; i < d; ++i) v[h++] = static_cast<double>(marg[static_cast<std::size_t>(i)]) * invT;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      v[h++] = static_cast<double>(pairs[static_cast<std::size_t>(i) * d + j]) * invT;
  for (int i = 0; i < d; ++i) {
    if (i == pivot - 1) continue;
    for (int j = i + 1; j < d; ++j) {
      if (j == pivot - 1) continue;
      v[h++] = static_cast<double>(triples[static_cast<std::size_t>(i) * d + j]) * invT;
    }
  }
  return MomentVector(d, pivot, std::move(v));
}

}  // namespace

MomentVector sample_moments(const SampleMatrix& X, int pivot) {
  if (X.d < 2) raise(errc::invalid_input, "need d >= 2");
  if (X.rows() < 1) raise(errc::empty_sample, "no observations");
  if (pivot < 1 || pivot > X.d) raise(errc::invalid_input, "pivot out of range");
  return X.d <= 20 ? moments_by_histogram(X, pivot) : moments_direct(X, pivot);
}

int auto_pivot(const SampleMatrix& X) {
  if (X.rows() < 1) raise(errc::empty_sample, "no observations");
  const int d = X.d;
  const MomentVector pi = sample_moments(X, 1);
  int best = 1;
  double best_score = -1.0;
  for (int i = 1; i <= d; ++i) {
    double score = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= d; ++j) {
      if (j == i) continue;
      const double cov =
          pi.pair(std::min(i, j), std::max(i, j)) - pi.marginal(i) * pi.marginal(j);
      score = std::min(score, std::abs(cov));
    }
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Closed-form recovery

namespace {

int sgn(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

EstimatedKernel recover_impl(const MomentVector& pi, Regime regime) {
  const int d = pi.dim();
  const int p = pi.pivot();
  EstimatedKernel est;
  est.pivot = p;
  est.regime = regime;
  est.kernel = Matrix::Zero(d, d);

  for (int i = 1; i <= d; ++i) est.kernel(i - 1, i - 1) = pi.marginal(i);

  // amplitudes |K_ij| = sqrt(K_ii K_jj - P[X_i = X_j = 1]); the squared
  // amplitude is kept as computed so the sign arguments below do not pick up
  // sqrt roundoff
  Matrix amp = Matrix::Zero(d, d);
  Matrix amp2 = Matrix::Zero(d, d);
  for (int i = 1; i <= d; ++i) {
    for (int j = i + 1; j <= d; ++j) {
      double arg = pi.marginal(i) * pi.marginal(j) - pi.pair(i, j);
      if (arg < 0.0) {
        if (regime == Regime::strict) {
          std::ostringstream os;
          os << "negative covariance argument " << arg << " at (" << i << "," << j
             << "); sample too small or model misspecified";
          raise(errc::negative_cov_argument, os.str());
        }
        est.clip_events.push_back({i, j, arg});
        arg = 0.0;
      }
      amp2(i - 1, j - 1) = amp2(j - 1, i - 1) = arg;
      amp(i - 1, j - 1) = amp(j - 1, i - 1) = std::sqrt(arg);
    }
  }

  // pivot row is positive by the identification normalization
  for (int j = 1; j <= d; ++j) {
    if (j == p) continue;
    const int a = std::min(p, j), b = std::max(p, j);
    est.kernel(p - 1, j - 1) = est.kernel(j - 1, p - 1) = amp(a - 1, b - 1);
    SignRecord rec;
    rec.i = a;
    rec.j = b;
    rec.amplitude = amp(a - 1, b - 1);
    rec.sign_argument = std::numeric_limits<double>::quiet_NaN();
    rec.sign = amp(a - 1, b - 1) > 0.0 ? 1 : 0;
    est.sign_diagnostics.push_back(rec);
  }

  // remaining signs from the pivot-anchored threewise identity
  for (int i = 1; i <= d; ++i) {
    if (i == p) continue;
    for (int j = i + 1; j <= d; ++j) {
      if (j == p) continue;
      const double a_ij = amp(i - 1, j - 1);
      const double arg = pi.triple(i, j) -
                         pi.marginal(p) * pi.marginal(i) * pi.marginal(j) +
                         pi.marginal(p) * amp2(i - 1, j - 1) +
                         pi.marginal(i) * amp2(p - 1, j - 1) +
                         pi.marginal(j) * amp2(p - 1, i - 1);
      int s = sgn(arg);
      if (s == 0 && regime == Regime::strict)
        raise(errc::zero_sign_argument, "sign argument is exactly zero at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
      if (a_ij == 0.0) s = 0;
      est.kernel(i - 1, j - 1) = est.kernel(j - 1, i - 1) = s * a_ij;
      est.sign_diagnostics.push_back({i, j, a_ij, arg, s});
    }
  }

  std::sort(est.sign_diagnostics.begin(), est.sign_diagnostics.end(),
            [](const SignRecord& a, const SignRecord& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  return est;
}

}  // namespace

EstimatedKernel recover_from_moments(const MomentVector& pi) {
  return recover_impl(pi, Regime::strict);
}

EstimatedKernel recover_robust(const MomentVector& pi) {
  return recover_impl(pi, Regime::robust);
}

EstimatedKernel estimate(const SampleMatrix& X, int pivot, Regime regime) {
  return recover_impl(sample_moments(X, pivot), regime);
}

Matrix kernel_from_moments_raw(const Vector& values, int d, int pivot, Regime regime) {
  return recover_impl(MomentVector(d, pivot, values, /*validate=*/false), regime).kernel;
}

std::vector<Matrix> estimated_identified_set(const EstimatedKernel& est, int enum_limit) {
  const int d = static_cast<int>(est.kernel.rows());
  if (d > enum_limit)
    raise(errc::refuse_large_d, "identified set has 2^(d-1) elements; d = " + std::to_string(d));
  std::vector<Matrix> out;
  out.reserve(std::size_t{1} << (d - 1));
  for (std::uint32_t m = 0; m < (1u << (d - 1)); ++m)
    out.push_back(d_conjugate_matrix(est.kernel, SignPattern::from_mask(d, m)));
  return out;
}

std::optional<SignPattern> d_similarity_between(const Matrix& A, const Matrix& B, double tol) {
  if (A.rows() != B.rows() || A.cols() != B.cols() || A.rows() != A.cols())
    raise(errc::invalid_input, "dimension mismatch");
  const int d = static_cast<int>(A.rows());
  std::vector<int> signs(static_cast<std::size_t>(d), 1);
  for (int j = 2; j <= d; ++j) {
    const double prod = A(0, j - 1) * B(0, j - 1);
    // Entries are resolved at scale tol, so their product is meaningful at
    // scale tol^2; below that the propagated sign is undefined.
    if (std::abs(prod) < tol * tol)
      raise(errc::ambiguous_sign,
            "row-1 product at column " + std::to_string(j) + " is too close to zero");
    signs[static_cast<std::size_t>(j) - 1] = prod > 0.0 ? 1 : -1;
  }
  SignPattern D{std::move(signs)};
  const Matrix diff = d_conjugate_matrix(A, D) - B;
  if (diff.cwiseAbs().maxCoeff() <= tol) return D;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Delta-method covariance

Matrix moment_jacobian(const Vector& values, int d, int pivot, double fd_step) {
  const int m = static_cast<int>(values.size());
  Matrix J(vech_length(d), m);
  Vector work = values;
  for (int h = 0; h < m; ++h) {
    const double step = fd_step * std::max(std::abs(values[h]), 1e-2);
    work[h] = values[h] + step;
    const Vector up = vech(kernel_from_moments_raw(work, d, pivot, Regime::strict));
    work[h] = values[h] - step;
    const Vector dn = vech(kernel_from_moments_raw(work, d, pivot, Regime::strict));
    work[h] = values[h];
    J.col(h) = (up - dn) / (2.0 * step);
  }
  return J;
}

AsymptoticCovariance asymptotic_covariance(const MomentVector& pi_hat, long T, double fd_step,
                                           double deriv_guard) {
  if (T < 1) raise(errc::invalid_input, "T must be >= 1");
  const int d = pi_hat.dim();
  const EstimatedKernel est = recover_from_moments(pi_hat);
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      if (std::abs(est.kernel(i - 1, j - 1)) <= deriv_guard)
        raise(errc::derivative_guard, "amplitude at (" + std::to_string(i) + "," +
                                          std::to_string(j) +
                                          ") is below the differentiability guard");

  // Moment covariance under the plug-in kernel: the product of two inclusion
  // indicators is the indicator of the union, so
  // Cov(g_h, g_l) = det K_{A_h u A_l} - pi_h pi_l.
  const auto keys = pi_hat.keys();
  const int m = static_cast<int>(keys.size());
  const int p = pi_hat.pivot();
  auto key_members = [&](const MomentKey& k) {
    std::vector<int> v;
    if (k.kind == MomentKey::Kind::marginal) {
      v = {k.i};
    } else if (k.kind == MomentKey::Kind::pair) {
      v = {k.i, k.j};
    } else {
      v = {p, k.i, k.j};
    }
    return v;
  };
  Matrix Cpi(m, m);
  for (int h = 0; h < m; ++h) {
    for (int l = h; l < m; ++l) {
      std::vector<int> u = key_members(keys[static_cast<std::size_t>(h)]);
      for (int x : key_members(keys[static_cast<std::size_t>(l)]))
        if (std::find(u.begin(), u.end(), x) == u.end()) u.push_back(x);
      const double pu = principal_minor(est.kernel, SubsetIndex(std::move(u)));
      const double c = pu - pi_hat.values()[h] * pi_hat.values()[l];
      Cpi(h, l) = Cpi(l, h) = c;
    }
  }

  const Matrix J = moment_jacobian(pi_hat.values(), d, p, fd_step);
  Matrix cov = J * Cpi * J.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {d, std::move(cov)};
}

CorrelationKernel project_to_valid(const Matrix& estimate, double margin) {
  if (estimate.rows() != estimate.cols())
    raise(errc::invalid_input, "estimate must be square");
  const Matrix S = 0.5 * (estimate + estimate.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  Vector lam = es.eigenvalues();
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    lam[k] = std::min(std::max(lam[k], margin), 1.0 - margin);
  Matrix K = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  return validate_kernel(0.5 * (K + K.transpose()));
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json matrix_to_json(const Matrix& M) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(M.rows()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) rows[i].push_back(M(i, j));
  return nlohmann::json(rows);
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Matrix M(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return M;
}

}  // namespace

std::string EstimatedKernel::to_json_string() const {
  nlohmann::json j;
  j["d"] = static_cast<int>(kernel.rows());
  j["pivot"] = pivot;
  j["regime"] = regime_name(regime);
  j["estimate"] = matrix_to_json(kernel);
  nlohmann::json sd = nlohmann::json::array();
  for (const auto& r : sign_diagnostics) {
    nlohmann::json e = {{"i", r.i}, {"j", r.j}, {"amplitude", r.amplitude}, {"sign", r.sign}};
    if (std::isnan(r.sign_argument))
      e["sign_argument"] = nullptr;
    else
      e["sign_argument"] = r.sign_argument;
    sd.push_back(std::move(e));
  }
  j["sign_diagnostics"] = std::move(sd);
  nlohmann::json ce = nlohmann::json::array();
  for (const auto& r : clip_events)
    ce.push_back({{"i", r.i}, {"j", r.j}, {"cov_argument", r.cov_argument}});
  j["clip_events"] = std::move(ce);
  return j.dump(2);
}

EstimatedKernel EstimatedKernel::from_json_string(const std::string& text) {
  EstimatedKernel est;
  try {
    const auto j = nlohmann::json::parse(text);
    est.pivot = j.at("pivot").get<int>();
    est.regime = j.at("regime").get<std::string>() == "robust" ? Regime::robust : Regime::strict;
    est.kernel = matrix_from_json(j.at("estimate"));
    for (const auto& e : j.at("sign_diagnostics")) {
      SignRecord r;
      r.i = e.at("i").get<int>();
      r.j = e.at("j").get<int>();
      r.amplitude = e.at("amplitude").get<double>();
      r.sign = e.at("sign").get<int>();
      r.sign_argument = e.at("sign_argument").is_null()
                            ? std::numeric_limits<double>::quiet_NaN()
                            : e.at("sign_argument").get<double>();
      est.sign_diagnostics.push_back(r);
    }
    for (const auto& e : j.at("clip_events"))
      est.clip_events.push_back(
          {e.at("i").get<int>(), e.at("j").get<int>(), e.at("cov_argument").get<double>()});
  } catch (const nlohmann::json::exception& e) {
    raise(errc::io_error, std::string("bad estimate JSON: ") + e.what());
  }
  return est;
}

std::string moments_to_csv(const MomentVector& pi) {
  std::ostringstream os;
  os << "kind,i,j,k,value\n";
  const auto keys = pi.keys();
  for (std::size_t h = 0; h < keys.size(); ++h) {
    const auto& k = keys[h];
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", pi.values()[static_cast<Eigen::Index>(h)]);
    switch (k.kind) {
      case MomentKey::Kind::marginal:
        os << "marginal," << k.i << ",,," << buf << '\n';
        break;
      case MomentKey::Kind::pair:
        os << "pair," << k.i << ',' << k.j << ",," << buf << '\n';
        break;
      case MomentKey::Kind::triple:
        os << "triple," << pi.pivot() << ',' << k.i << ',' << k.j << ',' << buf << '\n';
        break;
    }
  }
  return os.str();
}

MomentVector moments_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  struct Entry {
    std::string kind;
    int i = 0, j = 0, k = 0;
    double value = 0.0;
  };
  std::vector<Entry> entries;
  long lineno = 0;
  int pivot = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line.rfind("kind,", 0) == 0) continue;
    std::istringstream ls(line);
    Entry e;
    std::string tok;
    std::getline(ls, e.kind, ',');
    std::getline(ls, tok, ',');
    e.i = tok.empty() ? 0 : std::stoi(tok);
    std::getline(ls, tok, ',');
    e.j = tok.empty() ? 0 : std::stoi(tok);
    std::getline(ls, tok, ',');
    e.k = tok.empty() ? 0 : std::stoi(tok);
    if (!std::getline(ls, tok, ','))
      raise(errc::io_error, "moments CSV line " + std::to_string(lineno) + ": missing value");
    e.value = std::stod(tok);
    if (e.kind == "triple") pivot = e.i;
    entries.push_back(e);
  }
  int d = 0;
  for (const auto& e : entries)
    if (e.kind == "marginal") d = std::max(d, e.i);
  if (pivot < 1) pivot = 1;  // d = 2 has no triple rows to name the pivot
  if (d < 2) raise(errc::io_error, "moments CSV incomplete");
  if (static_cast<int>(entries.size()) != MomentVector::length(d))
    raise(errc::io_error, "moments CSV has wrong entry count");
  Vector v(MomentVector::length(d));
  int h = 0;
  for (const auto& e : entries) v[h++] = e.value;
  return MomentVector(d, pivot, std::move(v));
}

}  // namespace dpp
