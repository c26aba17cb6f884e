#pragma once

// Dataset ingestion (UCI breast cancer, Pima diabetes, Movielens 100k),
// rating-set manipulation and synthetic quadratic problems.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jfw/errors.hpp"
#include "jfw/linalg.hpp"
#include "jfw/objectives.hpp"
#include "jfw/oracles.hpp"

namespace jfw {

struct TabularDataset {
  DenseMatrix features;
  DenseVector targets;
  std::vector<std::string> feature_names;
  std::vector<std::string> notes;  // preprocessing log

  Eigen::Index samples() const { return features.rows(); }
  Eigen::Index dims() const { return features.cols(); }
};

struct Rating {
  int user = 0;  // 0-based
  int item = 0;  // 0-based
  double rating = 0.0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct RatingDataset {
  std::vector<Rating> triples;
  int n_users = 0;
  int n_items = 0;
  double max_rating = 0.0;

  double density() const {
    return static_cast<double>(triples.size()) / (static_cast<double>(n_users) * n_items);
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] inline void parse_fail(const std::string& path, std::size_t line, const std::string& why) {
  throw Error(ErrorKind::ParseError, path + ":" + std::to_string(line) + ": " + why);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// UCI `breast-cancer-wisconsin.data`: id, nine features in 1..10, class 2|4.
/// Missing `?` entries take their column median; features are divided by 10;
/// class 2 maps to -1 and class 4 to +1.
inline TabularDataset load_breast_cancer(const std::string& path) {
  constexpr int kFeatures = 9;
  const auto lines = detail::read_lines(path);
  std::vector<std::array<double, kFeatures>> rows;
  std::vector<std::array<bool, kFeatures>> missing;
  std::vector<double> labels;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto text = detail::trim(lines[ln]);
    if (text.empty()) continue;
    const auto fields = detail::split(text, ',');
    if (fields.size() != 11) {
      detail::parse_fail(path, ln + 1, "expected 11 fields, got " + std::to_string(fields.size()));
    }
    std::array<double, kFeatures> row{};
    std::array<bool, kFeatures> miss{};
    for (int j = 0; j < kFeatures; ++j) {
      const auto f = fields[j + 1];
      if (f == "?") {
        miss[j] = true;
        continue;
      }
      if (!detail::parse_double(f, row[j])) {
        detail::parse_fail(path, ln + 1, "bad feature '" + std::string(f) + "'");
      }
    }
    std::int64_t cls = 0;
    if (!detail::parse_int(fields[10], cls) || (cls != 2 && cls != 4)) {
      detail::parse_fail(path, ln + 1, "class must be 2 or 4");
    }
    rows.push_back(row);
    missing.push_back(miss);
    labels.push_back(cls == 2 ? -1.0 : 1.0);
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, path + " has no records");

  TabularDataset ds;
  ds.features.resize(static_cast<Eigen::Index>(rows.size()), kFeatures);
  ds.targets = Eigen::Map<const DenseVector>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  std::size_t imputed = 0;
  for (int j = 0; j < kFeatures; ++j) {
    std::vector<double> present;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!missing[i][j]) present.push_back(rows[i][j]);
    }
    if (present.empty()) {
      throw Error(ErrorKind::ParseError,
                  path + ": feature column " + std::to_string(j + 1) + " has no observed values");
    }
    const double med = detail::median(present);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double v = missing[i][j] ? med : rows[i][j];
      imputed += missing[i][j] ? 1 : 0;
      ds.features(static_cast<Eigen::Index>(i), j) = v / 10.0;
    }
  }
  ds.feature_names = {"clump_thickness", "cell_size",   "cell_shape",
                      "adhesion",        "epithelial",  "bare_nuclei",
                      "chromatin",       "nucleoli",    "mitoses"};
  ds.notes.push_back("rows=" + std::to_string(rows.size()));
  ds.notes.push_back("median-imputed entries=" + std::to_string(imputed));
  return ds;
}

/// Pima diabetes CSV: eight numeric features and a 0/1 outcome. A first line
/// whose leading field is not numeric is treated as a header. Columns are
/// standardized to zero mean and unit (population) variance unless disabled.
inline TabularDataset load_pima(const std::string& path, bool standardize = true) {
  constexpr int kFeatures = 8;
  const auto lines = detail::read_lines(path);
  std::vector<std::array<double, kFeatures>> rows;
  std::vector<double> outcome;
  std::vector<std::string> names = {"pregnancies", "glucose", "blood_pressure", "skin_thickness",
                                    "insulin",     "bmi",     "pedigree",       "age"};
  bool first = true;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto text = detail::trim(lines[ln]);
    if (text.empty()) continue;
    const auto fields = detail::split(text, ',');
    if (first) {
      first = false;
      double probe = 0.0;
      if (!detail::parse_double(fields.front(), probe)) {
        if (fields.size() == kFeatures + 1) {
          for (int j = 0; j < kFeatures; ++j) names[j] = std::string(fields[j]);
        }
        continue;
      }
    }
    if (fields.size() != kFeatures + 1) {
      detail::parse_fail(path, ln + 1, "expected 9 fields, got " + std::to_string(fields.size()));
    }
    std::array<double, kFeatures> row{};
    for (int j = 0; j < kFeatures; ++j) {
      if (!detail::parse_double(fields[j], row[j])) {
        detail::parse_fail(path, ln + 1, "bad value '" + std::string(fields[j]) + "'");
      }
    }
    double y = 0.0;
    if (!detail::parse_double(fields[kFeatures], y) || (y != 0.0 && y != 1.0)) {
      detail::parse_fail(path, ln + 1, "outcome must be 0 or 1");
    }
    rows.push_back(row);
    outcome.push_back(y);
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyDataset, path + " has no records");

  TabularDataset ds;
  const auto m = static_cast<Eigen::Index>(rows.size());
  ds.features.resize(m, kFeatures);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (int j = 0; j < kFeatures; ++j) ds.features(i, j) = rows[static_cast<std::size_t>(i)][j];
  }
  ds.targets = Eigen::Map<const DenseVector>(outcome.data(), m);
  ds.feature_names = std::move(names);
  ds.notes.push_back("rows=" + std::to_string(rows.size()));
  if (standardize) {
    for (int j = 0; j < kFeatures; ++j) {
      auto col = ds.features.col(j);
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(m));
      if (sd > 0.0) {
        col /= sd;
      } else {
        col.setZero();
      }
    }
    ds.notes.push_back("standardized=true");
  }
  return ds;
}

/// Movielens `u.data`: user \t item \t rating \t timestamp, ids 1-based.
inline RatingDataset load_movielens(const std::string& path) {
  const auto lines = detail::read_lines(path);
  RatingDataset ds;
  std::set<std::pair<int, int>> seen;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto text = detail::trim(lines[ln]);
    if (text.empty()) continue;
    const auto fields = detail::split(text, '\t');
    if (fields.size() != 4) {
      detail::parse_fail(path, ln + 1, "expected 4 tab-separated fields");
    }
    std::int64_t user = 0;
    std::int64_t item = 0;
    std::int64_t ts = 0;
    double rating = 0.0;
    if (!detail::parse_int(fields[0], user) || !detail::parse_int(fields[1], item) ||
        !detail::parse_double(fields[2], rating) || !detail::parse_int(fields[3], ts)) {
      detail::parse_fail(path, ln + 1, "non-numeric field");
    }
    if (user < 1 || item < 1) detail::parse_fail(path, ln + 1, "ids must be 1-based");
    Rating r{static_cast<int>(user - 1), static_cast<int>(item - 1), rating, ts};
    if (!seen.emplace(r.user, r.item).second) {
      throw Error(ErrorKind::DuplicateRating, path + ":" + std::to_string(ln + 1) + ": user " +
                                                  std::to_string(user) + " rated item " +
                                                  std::to_string(item) + " twice");
    }
    ds.n_users = std::max(ds.n_users, r.user + 1);
    ds.n_items = std::max(ds.n_items, r.item + 1);
    ds.max_rating = ds.triples.empty() ? rating : std::max(ds.max_rating, rating);
    ds.triples.push_back(r);
  }
  if (ds.triples.empty()) throw Error(ErrorKind::EmptyDataset, path + " has no ratings");
  return ds;
}

/// Writes `u.data` format; load_movielens reads it back unchanged.
inline void write_movielens(const RatingDataset& ds, std::ostream& out) {
  for (const auto& r : ds.triples) {
    std::ostringstream rating;
    rating.precision(17);
    rating << r.rating;
    out << (r.user + 1) << '\t' << (r.item + 1) << '\t' << rating.str() << '\t' << r.timestamp << '\n';
  }
}

struct OutlierInjection {
  RatingDataset data;
  std::vector<std::size_t> modified;  // indices into data.triples, ascending
};

/// Sets a seeded uniform subset of round(fraction * count) observed ratings
/// to max_rating.
inline OutlierInjection inject_outliers(const RatingDataset& ds, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorKind::ConfigError, "outlier fraction must lie in [0, 1]");
  }
  OutlierInjection out{ds, {}};
  const std::size_t n = ds.triples.size();
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  out.modified.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.modified.begin(), out.modified.end());
  for (const auto i : out.modified) out.data.triples[i].rating = ds.max_rating;
  return out;
}

/// Seeded uniform split; the first round(train_fraction * count) shuffled
/// triples go to the training half. Both halves keep the original order and
/// the full matrix shape.
inline std::pair<RatingDataset, RatingDataset> train_test_split(const RatingDataset& ds,
                                                                double train_fraction,
                                                                std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigError, "train fraction must lie in (0, 1)");
  }
  const std::size_t n = ds.triples.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;

  RatingDataset train{{}, ds.n_users, ds.n_items, ds.max_rating};
  RatingDataset test{{}, ds.n_users, ds.n_items, ds.max_rating};
  for (std::size_t i = 0; i < n; ++i) (in_train[i] ? train : test).triples.push_back(ds.triples[i]);
  return {std::move(train), std::move(test)};
}

/// Rating matrix with items as rows and users as columns.
inline MatrixCompletionObjective completion_objective(const RatingDataset& ds, double delta) {
  std::vector<Observation> obs;
  obs.reserve(ds.triples.size());
  for (const auto& r : ds.triples) obs.push_back({r.item, r.user, r.rating});
  return {std::move(obs), ds.n_items, ds.n_users, delta};
}

struct SyntheticProblem {
  QuadraticObjective objective;
  ConstraintSet set;
  DenseVector optimum;
  double f_star = 0.0;
  double smoothness = 0.0;  // L
  double diam = 0.0;        // D
  DenseVector center;       // unconstrained minimizer
};

/// f(x) = 0.5 (x - c)^T A (x - c) over an L2 ball, A with eigenvalues
/// log-spaced in [1, condition] (d = 1 uses `condition`). The unconstrained
/// minimizer c sits inside the ball when `interior`, otherwise outside, in
/// which case x* = (A + mu I)^{-1} A c with |x*| = radius is found by
/// bisection on mu.
inline SyntheticProblem synth_quadratic(int d, double condition, double radius, bool interior,
                                        std::uint64_t seed) {
  if (d < 1) throw Error(ErrorKind::ConfigError, "dimension must be >= 1");
  if (!(condition >= 1.0)) throw Error(ErrorKind::ConfigError, "condition must be >= 1");
  if (!(radius > 0.0)) throw Error(ErrorKind::ConfigError, "radius must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  DenseMatrix gauss(d, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < d; ++i) gauss(i, j) = normal(rng);
  }
  const DenseMatrix basis = Eigen::HouseholderQR<DenseMatrix>(gauss).householderQ();
  DenseVector eig(d);
  for (int i = 0; i < d; ++i) {
    eig[i] = d == 1 ? condition : std::pow(condition, static_cast<double>(i) / (d - 1));
  }
  DenseMatrix a = basis * eig.asDiagonal() * basis.transpose();
  a = 0.5 * (a + a.transpose()).eval();

  DenseVector dir(d);
  for (int i = 0; i < d; ++i) dir[i] = normal(rng);
  dir.normalize();
  const double scale = interior ? 0.2 + 0.6 * unif(rng) : 1.5 + 1.5 * unif(rng);
  const DenseVector center = radius * scale * dir;

  DenseVector optimum = center;
  if (!interior) {
    // |x(mu)| is decreasing in mu; x(0) = c lies outside the ball.
    const DenseVector rhs = basis.transpose() * (a * center);
    auto point = [&](double mu) -> DenseVector {
      return basis * (rhs.array() / (eig.array() + mu)).matrix();
    };
    double lo = 0.0;
    double hi = eig.maxCoeff() * center.norm() / radius;
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (point(mid).norm() > radius ? lo : hi) = mid;
    }
    optimum = point(hi);
    optimum *= radius / optimum.norm();
  }

  QuadraticObjective obj(a, -(a * center), 0.5 * center.dot(a * center));
  const double f_star = interior ? 0.0 : obj.value(optimum);
  ConstraintSet set{SetKind::L2Ball, radius};
  return {std::move(obj), set, std::move(optimum), f_star, eig.maxCoeff(), diameter(set), center};
}

}  // namespace jfw
