#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vardom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kTol = 1e-9;      // default membership tolerance
inline constexpr double kUnitTol = 1e-12; // unit-norm tolerance for directions

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimMismatch : Error {
  using Error::Error;
};
struct InvariantError : Error {
  using Error::Error;
};
// Certified preconditions of a harness do not hold on the given data.
struct HypothesisError : Error {
  using Error::Error;
};
struct CapExceeded : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};

enum class Norm { Euclidean, Max, Sum };

inline double norm_of(const Vec& v, Norm n) {
  switch (n) {
    case Norm::Euclidean: return v.norm();
    case Norm::Max: return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
    case Norm::Sum: return v.lpNorm<1>();
  }
  return v.norm();
}

// Dual pairing norm: max <-> sum, euclidean self-dual.
inline Norm dual_norm(Norm n) {
  if (n == Norm::Max) return Norm::Sum;
  if (n == Norm::Sum) return Norm::Max;
  return Norm::Euclidean;
}

inline bool is_unit(const Vec& v, Norm n, double tol = kUnitTol) {
  return std::abs(norm_of(v, n) - 1.0) <= tol;
}

inline std::string norm_name(Norm n) {
  switch (n) {
    case Norm::Euclidean: return "euclidean";
    case Norm::Max: return "max";
    case Norm::Sum: return "sum";
  }
  return "euclidean";
}

inline Norm norm_from_name(const std::string& s) {
  if (s == "euclidean") return Norm::Euclidean;
  if (s == "max") return Norm::Max;
  if (s == "sum") return Norm::Sum;
  throw SchemaError("unknown norm: " + s);
}

// Lexicographic comparison with tolerance, used for deterministic tie-breaking.
inline bool lex_less(const Vec& a, const Vec& b, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < a.size() && i < b.size(); ++i) {
    if (a[i] < b[i] - tol) return true;
    if (a[i] > b[i] + tol) return false;
  }
  return a.size() < b.size();
}

inline Vec make_vec(std::initializer_list<double> vals) {
  Vec v(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

// Splittable counter-based RNG (splitmix64). Forking never advances the
// parent stream, so parallel batch generation stays reproducible.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  SplitRng fork(std::uint64_t tag) const {
    std::uint64_t z = state_ ^ (0xA0761D6478BD642FULL * (tag + 1));
    z = (z ^ (z >> 33)) * 0xE7037ED1A0B428DBULL;
    return SplitRng(z ^ (z >> 29));
  }

  // uniform in [0,1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // inclusive bounds
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  Vec vector(int dim, double lo, double hi) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  Vec unit_vector(int dim, Norm n) {
    for (;;) {
      Vec v = vector(dim, -1.0, 1.0);
      double len = norm_of(v, n);
      if (len > 1e-3) return Vec(v / len);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace vardom
