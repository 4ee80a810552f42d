#include "infolearn/rng.hpp"

#include <algorithm>
#include <cmath>

#include "infolearn/errors.hpp"

namespace infolearn {

namespace {

constexpr unsigned __int128 kPcgMultiplier =
    (static_cast<unsigned __int128>(0x2360ED051FC65DA4ULL) << 64) | 0x4385DF649FCCF645ULL;

inline std::uint64_t rotr64(std::uint64_t v, unsigned rot) {
  return (v >> rot) | (v << ((64u - rot) & 63u));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t Rng::hash_seed(std::uint64_t master_seed, std::string_view tag, std::uint64_t index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a64(tag));
  h = splitmix64(h ^ index);
  return h;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  state_ = 0;
  inc_ = (static_cast<unsigned __int128>(stream) << 1) | 1u;
  step();
  state_ += seed;
  step();
}

Rng Rng::derive(std::uint64_t master_seed, std::string_view tag, std::uint64_t index) {
  const std::uint64_t seed = hash_seed(master_seed, tag, index);
  return Rng(seed, splitmix64(seed ^ 0x5851f42d4c957f2dULL));
}

void Rng::step() { state_ = state_ * kPcgMultiplier + inc_; }

Rng::result_type Rng::operator()() {
  step();
  const auto hi = static_cast<std::uint64_t>(state_ >> 64);
  const auto lo = static_cast<std::uint64_t>(state_);
  return rotr64(hi ^ lo, static_cast<unsigned>(hi >> 58));
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw DomainError("Rng::below: n must be positive");
  // Lemire's nearly-divisionless rejection.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double Rng::rademacher() { return ((*this)() >> 63) ? 1.0 : -1.0; }

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw DomainError("gamma shape must be positive and finite");
  if (shape < 1.0) {
    return log_gamma_variate(shape + 1.0) + std::log(uniform_pos()) / shape;
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double Rng::gamma_variate(double shape) { return std::exp(log_gamma_variate(shape)); }

void Rng::dirichlet(double alpha, std::span<double> out) {
  if (out.empty()) throw DomainError("dirichlet dimension must be positive");
  double max_log = -std::numeric_limits<double>::infinity();
  for (double& v : out) {
    v = log_gamma_variate(alpha);
    max_log = std::max(max_log, v);
  }
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - max_log);
    total += v;
  }
  for (double& v : out) v /= total;
}

std::vector<double> Rng::dirichlet(double alpha, std::size_t dim) {
  std::vector<double> out(dim);
  dirichlet(alpha, out);
  return out;
}

void Rng::multinomial(std::uint64_t trials, std::span<const double> probs, std::span<std::uint64_t> counts) {
  if (probs.size() != counts.size()) throw ShapeError("multinomial: probs/counts size mismatch");
  if (probs.empty()) throw DomainError("multinomial: empty probability vector");
  std::vector<double> cumulative(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) throw DomainError("multinomial: negative probability");
    acc += probs[i];
    cumulative[i] = acc;
  }
  std::fill(counts.begin(), counts.end(), 0);
  for (std::uint64_t k = 0; k < trials; ++k) {
    const double u = uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
    if (idx >= probs.size()) {
      // u rounded up to the total; take the last cell with positive mass.
      idx = probs.size() - 1;
      while (probs[idx] == 0.0 && idx > 0) --idx;
    }
    ++counts[idx];
  }
}

}  // namespace infolearn
