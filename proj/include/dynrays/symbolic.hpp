#ifndef DYNRAYS_SYMBOLIC_HPP
#define DYNRAYS_SYMBOLIC_HPP

// Exact symbolic coordinates of rays: external angles (rationals mod 1 and
// their base-D digit expansions) and exponential addresses (eventually
// periodic integer sequences), together with the shift dynamics on them.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dynrays/error.hpp"
#include "dynrays/rational.hpp"

namespace dynrays {

/// Eventually periodic sequence `pre[0] pre[1] ... (per[0] ... per[k])^inf`,
/// always stored in canonical form: shortest period, shortest preperiod.
/// Two sequences are equal as infinite words iff their canonical forms are
/// equal, which is what makes exact cycle detection possible.
template <class T>
class EventuallyPeriodic {
 public:
  EventuallyPeriodic() : per_{T{0}} {}
  EventuallyPeriodic(std::vector<T> pre, std::vector<T> per) : pre_(std::move(pre)), per_(std::move(per)) {
    if (per_.empty()) throw ConfigError("eventually periodic sequence needs a nonempty period");
    canonicalize();
  }

  const std::vector<T>& preperiod() const { return pre_; }
  const std::vector<T>& period() const { return per_; }
  std::size_t preperiod_length() const { return pre_.size(); }
  std::size_t period_length() const { return per_.size(); }
  bool is_periodic() const { return pre_.empty(); }

  T at(std::size_t i) const {
    if (i < pre_.size()) return pre_[i];
    return per_[(i - pre_.size()) % per_.size()];
  }
  T first() const { return at(0); }

  /// Left shift: drops the first entry.
  EventuallyPeriodic shifted() const {
    EventuallyPeriodic r = *this;
    if (!r.pre_.empty()) {
      r.pre_.erase(r.pre_.begin());
    } else {
      std::rotate(r.per_.begin(), r.per_.begin() + 1, r.per_.end());
    }
    return r;
  }

  /// The sequence `j s0 s1 ...`.
  EventuallyPeriodic prepended(T j) const {
    std::vector<T> pre;
    pre.reserve(pre_.size() + 1);
    pre.push_back(j);
    pre.insert(pre.end(), pre_.begin(), pre_.end());
    return EventuallyPeriodic(std::move(pre), per_);
  }

  /// The first n entries.
  std::vector<T> prefix(std::size_t n) const {
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
    return out;
  }

  friend bool operator==(const EventuallyPeriodic&, const EventuallyPeriodic&) = default;
  friend auto operator<=>(const EventuallyPeriodic& a, const EventuallyPeriodic& b) {
    if (auto c = a.pre_ <=> b.pre_; c != 0) return c;
    return a.per_ <=> b.per_;
  }

 private:
  void canonicalize() {
    // Shortest period: smallest divisor q of |per| with per q-periodic.
    const std::size_t n = per_.size();
    for (std::size_t q = 1; q < n; ++q) {
      if (n % q != 0) continue;
      bool ok = true;
      for (std::size_t i = q; i < n && ok; ++i) ok = per_[i] == per_[i - q];
      if (ok) {
        per_.resize(q);
        break;
      }
    }
    // Absorb preperiod entries that already continue the cycle backwards.
    while (!pre_.empty() && pre_.back() == per_.back()) {
      std::rotate(per_.rbegin(), per_.rbegin() + 1, per_.rend());
      pre_.pop_back();
    }
  }

  std::vector<T> pre_;
  std::vector<T> per_;
};

namespace detail {

inline std::size_t lcm_size(std::size_t a, std::size_t b) { return a / std::gcd(a, b) * b; }

template <class T>
std::string format_sequence(const EventuallyPeriodic<T>& s) {
  std::ostringstream os;
  for (const T& d : s.preperiod()) os << d << ' ';
  os << '[';
  for (std::size_t i = 0; i < s.period().size(); ++i) os << (i ? " " : "") << s.period()[i];
  os << ']';
  return os.str();
}

template <class T>
EventuallyPeriodic<T> parse_sequence(std::string_view text) {
  const auto open = text.find('[');
  const auto close = text.find(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open)
    throw ParseError("sequence needs a bracketed period, e.g. \"1 0 [0 1]\": '" + std::string(text) + "'");
  if (text.find_first_not_of(" \t", close + 1) != std::string_view::npos)
    throw ParseError("trailing characters after period: '" + std::string(text) + "'");
  auto read = [&](std::string_view part) {
    std::vector<T> out;
    std::string buf(part);
    for (char& ch : buf)
      if (ch == ',') ch = ' ';
    std::istringstream is(buf);
    long long v = 0;
    while (is >> v) out.push_back(static_cast<T>(v));
    if (!is.eof()) throw ParseError("bad integer in sequence: '" + std::string(text) + "'");
    return out;
  };
  auto pre = read(text.substr(0, open));
  auto per = read(text.substr(open + 1, close - open - 1));
  if (per.empty()) throw ParseError("empty period in '" + std::string(text) + "'");
  return EventuallyPeriodic<T>(std::move(pre), std::move(per));
}

}  // namespace detail

/// Element of Sigma_D: a base-D digit sequence.
class DigitSequence {
 public:
  DigitSequence() = default;
  DigitSequence(int base, std::vector<int> pre, std::vector<int> per) : base_(base), seq_(std::move(pre), std::move(per)) {
    if (base_ < 2) throw ConfigError("digit base must be >= 2");
    for (std::size_t i = 0; i < seq_.preperiod_length() + seq_.period_length(); ++i) {
      const int d = seq_.at(i);
      if (d < 0 || d >= base_) throw ConfigError("digit " + std::to_string(d) + " outside [0, D-1]");
    }
  }

  int base() const { return base_; }
  const EventuallyPeriodic<int>& seq() const { return seq_; }
  const std::vector<int>& preperiod() const { return seq_.preperiod(); }
  const std::vector<int>& period() const { return seq_.period(); }
  int at(std::size_t i) const { return seq_.at(i); }
  int first() const { return seq_.first(); }
  bool is_periodic() const { return seq_.is_periodic(); }

  DigitSequence shifted() const { return DigitSequence(base_, seq_.shifted()); }
  DigitSequence prepended(int digit) const {
    if (digit < 0 || digit >= base_) throw ConfigError("digit outside [0, D-1]");
    return DigitSequence(base_, seq_.prepended(digit));
  }

  /// Projection to R/Z as a double in [0, 1).
  double to_double() const {
    const auto& per = seq_.period();
    double num = 0.0;
    for (int d : per) num = num * base_ + d;
    double v = num / (std::pow(static_cast<double>(base_), static_cast<double>(per.size())) - 1.0);
    const auto& pre = seq_.preperiod();
    for (auto it = pre.rbegin(); it != pre.rend(); ++it) v = (*it + v) / base_;
    return v >= 1.0 ? v - 1.0 : v;
  }

  std::string str() const { return detail::format_sequence(seq_); }

  friend bool operator==(const DigitSequence&, const DigitSequence&) = default;
  friend auto operator<=>(const DigitSequence& a, const DigitSequence& b) {
    if (auto c = a.base_ <=> b.base_; c != 0) return c;
    return a.seq_ <=> b.seq_;
  }

  static DigitSequence parse(std::string_view text, int base) {
    auto s = detail::parse_sequence<int>(text);
    return DigitSequence(base, s.preperiod(), s.period());
  }

 private:
  DigitSequence(int base, EventuallyPeriodic<int> s) : base_(base), seq_(std::move(s)) {}

  int base_ = 2;
  EventuallyPeriodic<int> seq_;
};

/// Address of an exponential dynamic ray: an eventually periodic (hence
/// bounded) integer sequence.
class ExpAddress {
 public:
  ExpAddress() = default;
  ExpAddress(std::vector<long> pre, std::vector<long> per) : seq_(std::move(pre), std::move(per)) {}
  explicit ExpAddress(EventuallyPeriodic<long> s) : seq_(std::move(s)) {}

  /// The constant address `k k k ...`.
  static ExpAddress constant(long k) { return ExpAddress({}, {k}); }

  const EventuallyPeriodic<long>& seq() const { return seq_; }
  const std::vector<long>& preperiod() const { return seq_.preperiod(); }
  const std::vector<long>& period() const { return seq_.period(); }
  long at(std::size_t i) const { return seq_.at(i); }
  long first() const { return seq_.first(); }
  bool is_periodic() const { return seq_.is_periodic(); }

  ExpAddress shifted() const { return ExpAddress(seq_.shifted()); }
  ExpAddress prepended(long j) const { return ExpAddress(seq_.prepended(j)); }
  std::vector<long> prefix(std::size_t n) const { return seq_.prefix(n); }

  /// sup |s_i| over the whole sequence (raw integer norm).
  long sup_norm() const {
    long m = 0;
    for (long v : seq_.preperiod()) m = std::max(m, std::labs(v));
    for (long v : seq_.period()) m = std::max(m, std::labs(v));
    return m;
  }
  /// sup |s_i| / 2pi, the normalization used when comparing with imaginary parts.
  double sup_norm_normalized() const { return static_cast<double>(sup_norm()) / (2.0 * std::numbers::pi); }

  std::string str() const { return detail::format_sequence(seq_); }

  friend bool operator==(const ExpAddress&, const ExpAddress&) = default;
  friend auto operator<=>(const ExpAddress& a, const ExpAddress& b) { return a.seq_ <=> b.seq_; }

  static ExpAddress parse(std::string_view text) { return ExpAddress(detail::parse_sequence<long>(text)); }

 private:
  EventuallyPeriodic<long> seq_;
};

/// Rational external angle in R/Z together with the degree D it lives under.
class PolyAngle {
 public:
  PolyAngle() = default;
  PolyAngle(std::int64_t num, std::int64_t den, int base) : base_(base) {
    if (base < 2) throw ConfigError("angle base must be >= 2");
    if (den <= 0) throw ParseError("angle denominator must be positive");
    std::int64_t n = num % den;
    if (n < 0) n += den;
    value_ = Rational(n, den);
  }
  PolyAngle(const Rational& r, int base) : PolyAngle(r.num(), r.den(), base) {}

  std::int64_t numerator() const { return value_.num(); }
  std::int64_t denominator() const { return value_.den(); }
  int base() const { return base_; }
  const Rational& value() const { return value_; }
  double to_double() const { return value_.to_double(); }

  /// Multiplication by D mod 1 (the shift on the digit model).
  PolyAngle times_base() const {
    const __int128 n = static_cast<__int128>(value_.num()) * base_ % value_.den();
    return PolyAngle(static_cast<std::int64_t>(n), value_.den(), base_);
  }

  /// True when the denominator divides a power of D, i.e. the angle has two expansions.
  bool is_base_adic() const {
    std::int64_t q = value_.den();
    std::int64_t g = 0;
    while (q > 1 && (g = std::gcd(q, static_cast<std::int64_t>(base_))) > 1) q /= g;
    return q == 1;
  }

  /// Base-D expansion; for D-adic angles the expansion ending in 0s.
  DigitSequence digits() const {
    std::map<std::int64_t, std::size_t> seen;
    std::vector<int> ds;
    std::int64_t x = value_.num();
    const std::int64_t q = value_.den();
    while (!seen.contains(x)) {
      seen[x] = ds.size();
      const __int128 dx = static_cast<__int128>(x) * base_;
      ds.push_back(static_cast<int>(dx / q));
      x = static_cast<std::int64_t>(dx % q);
    }
    const std::size_t start = seen[x];
    return DigitSequence(base_, std::vector<int>(ds.begin(), ds.begin() + start),
                         std::vector<int>(ds.begin() + start, ds.end()));
  }

  /// Exact value of a digit sequence; throws NumericalError if it does not fit 64 bits.
  static PolyAngle from_digits(const DigitSequence& s) {
    const int D = s.base();
    // value = (head (D^Q - 1) + block) / (D^P (D^Q - 1)), formed in 128 bits.
    __int128 head = 0, dp = 1, block = 0, dq = 1;
    constexpr __int128 cap = static_cast<__int128>(1) << 62;
    for (int d : s.preperiod()) {
      head = head * D + d;
      dp *= D;
      if (dp > cap) throw NumericalError("preperiod too long for exact angle");
    }
    for (int d : s.period()) {
      block = block * D + d;
      dq *= D;
      if (dq > cap) throw NumericalError("period too long for exact angle");
    }
    if (dp > cap / dq * 2) throw NumericalError("digit sequence too long for exact angle");
    Rational v = Rational::from_wide(head * (dq - 1) + block, dp * (dq - 1));
    if (v >= Rational(1)) v -= Rational(1);
    return PolyAngle(v, D);
  }

  /// Preperiod and period lengths of the expansion.
  std::pair<std::size_t, std::size_t> preperiod_period() const {
    const auto d = digits();
    return {d.preperiod().size(), d.period().size()};
  }

  std::string str() const { return std::to_string(value_.num()) + "/" + std::to_string(value_.den()); }

  friend bool operator==(const PolyAngle&, const PolyAngle&) = default;
  friend auto operator<=>(const PolyAngle& a, const PolyAngle& b) {
    if (auto c = a.base_ <=> b.base_; c != 0) return c;
    return a.value_ <=> b.value_;
  }

  /// Parses "p/q" (or an integer, meaning p/1).
  static PolyAngle parse(std::string_view text, int base) {
    const std::string s(text);
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      const long long p = std::stoll(s.substr(0, slash), &used);
      if (used != (slash == std::string::npos ? s.size() : slash)) throw ParseError("");
      long long q = 1;
      if (slash != std::string::npos) {
        const std::string qs = s.substr(slash + 1);
        q = std::stoll(qs, &used);
        if (used != qs.size()) throw ParseError("");
      }
      if (q <= 0) throw ParseError("");
      return PolyAngle(p, q, base);
    } catch (const std::logic_error&) {
      throw ParseError("malformed angle '" + s + "' (expected p/q with q > 0)");
    } catch (const ParseError&) {
      throw ParseError("malformed angle '" + s + "' (expected p/q with q > 0)");
    }
  }

 private:
  Rational value_{0};
  int base_ = 2;
};

// ---------------------------------------------------------------------------
// Operations

inline DigitSequence shift(const DigitSequence& s) { return s.shifted(); }
inline ExpAddress shift(const ExpAddress& s) { return s.shifted(); }
inline PolyAngle shift(const PolyAngle& a) { return a.times_base(); }

/// |s - s'|_D = sum_i |s_i - s'_i| / D^{i+1}, exact.
inline Rational sigma_d_metric(const DigitSequence& a, const DigitSequence& b) {
  if (a.base() != b.base()) throw ConfigError("sigma_d_metric: base mismatch");
  const std::int64_t D = a.base();
  const std::size_t P = std::max(a.preperiod().size(), b.preperiod().size());
  const std::size_t Q = detail::lcm_size(a.period().size(), b.period().size());
  // Preperiodic part as a single fraction over D^P.
  __int128 head = 0;
  __int128 dp = 1;
  for (std::size_t i = 0; i < P; ++i) {
    head = head * D + std::abs(a.at(i) - b.at(i));
    dp *= D;
    if (dp > INT64_MAX) throw NumericalError("sigma_d_metric: preperiod too long for exact evaluation");
  }
  __int128 block = 0;
  __int128 dq = 1;
  for (std::size_t i = 0; i < Q; ++i) {
    block = block * D + std::abs(a.at(P + i) - b.at(P + i));
    dq *= D;
    if (dq > INT64_MAX) throw NumericalError("sigma_d_metric: period too long for exact evaluation");
  }
  // head / D^P + block / (D^P (D^Q - 1))
  return Rational::from_wide(head, dp) + Rational::from_wide(block, dp * (dq - 1));
}

/// Distance in R/Z: min(|a - b|, 1 - |a - b|).
inline Rational circle_distance(const PolyAngle& a, const PolyAngle& b) {
  const Rational d = (a.value() - b.value()).abs();
  const Rational e = Rational(1) - d;
  return d < e ? d : e;
}

/// Distance in R/Z between two projected angles.
inline double circle_distance(double a, double b) {
  double d = std::fabs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

/// The D preimages (s + j)/D, j = 0..D-1.
inline std::vector<PolyAngle> preimages(const PolyAngle& s) {
  std::vector<PolyAngle> out;
  const int D = s.base();
  for (int j = 0; j < D; ++j) out.emplace_back(Rational(j) / Rational(D) + s.value() / Rational(D), D);
  return out;
}

inline std::vector<DigitSequence> preimages(const DigitSequence& s) {
  std::vector<DigitSequence> out;
  for (int j = 0; j < s.base(); ++j) out.push_back(s.prepended(j));
  return out;
}

/// The sequences j s for j in [j_min, j_max].
inline std::vector<ExpAddress> preimages(const ExpAddress& s, long j_min, long j_max) {
  if (j_max < j_min) throw ConfigError("preimages: empty window");
  std::vector<ExpAddress> out;
  for (long j = j_min; j <= j_max; ++j) out.push_back(s.prepended(j));
  return out;
}

/// F(t) = e^t - 1, returning +inf past the double range.
inline double exp_growth(double t) { return t > 709.0 ? std::numeric_limits<double>::infinity() : std::expm1(t); }

/// Checks |s_k| <= A F^k(x), F(t) = e^t - 1, for the listed entries. The
/// list holds s_k for k = first_index, first_index + 1, ...; the default
/// starts at k = 1 because s_0 only selects the starting strip. The bound is
/// non-strict so that the zero sequence passes with x = 0.
inline bool is_exponentially_bounded(std::span<const double> prefix, double A, double x, int first_index = 1) {
  if (A < 1.0 / (2.0 * std::numbers::pi)) throw ConfigError("growth constant A must be >= 1/(2 pi)");
  if (x < 0.0) throw ConfigError("growth offset x must be >= 0");
  if (first_index < 0) throw ConfigError("first_index must be >= 0");
  double fk = x;
  for (int k = 0; k < first_index; ++k) fk = exp_growth(fk);
  for (double s : prefix) {
    if (!(std::fabs(s) <= A * fk)) return false;
    fk = exp_growth(fk);
  }
  return true;
}

/// Minimal potential of a ray address.
struct MinimalPotential {
  double value = 0.0;
};

/// Eventually periodic addresses are bounded, so their minimal potential is 0.
inline MinimalPotential minimal_potential(const ExpAddress&) { return {0.0}; }

/// Finite-prefix estimate of inf{t : limsup |s_k| / F^k(t) = 0}: the least t
/// (by bisection) for which |s_k| <= F^k(t) holds on the second half of the
/// prefix. Meant for synthetic fast-growing test sequences.
inline MinimalPotential minimal_potential_estimate(std::span<const double> prefix, double t_max = 50.0) {
  if (prefix.empty()) return {0.0};
  const std::size_t from = prefix.size() / 2;
  auto dominated = [&](double t) {
    double fk = t;
    for (std::size_t k = 0; k < prefix.size(); ++k) {
      if (k >= from && std::fabs(prefix[k]) > fk) return false;
      fk = exp_growth(fk);
    }
    return true;
  };
  if (!dominated(t_max)) return {std::numeric_limits<double>::infinity()};
  double lo = 0.0;
  double hi = t_max;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (dominated(mid) ? hi : lo) = mid;
  }
  return {hi};
}

/// True iff |s_i - s'_i| <= 1 for every i.
inline bool adjacency_compatible(const ExpAddress& a, const ExpAddress& b) {
  const std::size_t n = std::max(a.preperiod().size(), b.preperiod().size()) +
                        detail::lcm_size(a.period().size(), b.period().size());
  for (std::size_t i = 0; i < n; ++i)
    if (std::labs(a.at(i) - b.at(i)) > 1) return false;
  return true;
}

template <class T>
struct Cycle {
  std::size_t period = 0;
  std::vector<T> representatives;  // the last `period` history entries, oldest first
};

/// Reports the eventual cycle of a history if its last min(W, size) entries
/// repeat with some period p (at least two full repeats). Exact equality only.
template <class T>
std::optional<Cycle<T>> detect_cycle(std::span<const T> history, std::size_t window = 64) {
  const std::size_t n = history.size();
  const std::size_t w = std::min(window, n);
  for (std::size_t p = 1; 2 * p <= w; ++p) {
    bool ok = true;
    for (std::size_t i = n - w + p; i < n && ok; ++i) ok = history[i] == history[i - p];
    if (ok) return Cycle<T>{p, std::vector<T>(history.end() - static_cast<std::ptrdiff_t>(p), history.end())};
  }
  return std::nullopt;
}

template <class T>
std::optional<Cycle<T>> detect_cycle(const std::vector<T>& history, std::size_t window = 64) {
  return detect_cycle(std::span<const T>(history), window);
}

}  // namespace dynrays

#endif  // DYNRAYS_SYMBOLIC_HPP
