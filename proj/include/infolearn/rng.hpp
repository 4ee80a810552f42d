#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace infolearn {

/// PCG64 (XSL-RR 128/64) generator.
///
/// Streams: every (seed, stream) pair selects an independent sequence. Objects
/// that need their own randomness get a generator from `Rng::derive`, which
/// hashes (master seed, purpose tag, index) into a seed and a stream id, so a
/// result never depends on how many draws some other object consumed.
///
/// All distribution samplers below are implemented here rather than taken from
/// <random>, whose distributions are implementation-defined. Output is
/// therefore bit-reproducible for a fixed seed on any conforming platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL, std::uint64_t stream = 0xda3e39cb94b95bdbULL);

  /// Child generator for (master, tag, index).
  static Rng derive(std::uint64_t master_seed, std::string_view tag, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1]; safe to take the log of.
  double uniform_pos();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  /// +1 or -1 with probability 1/2 each.
  double rademacher();

  /// log of a Gamma(shape, 1) variate. For shape < 1 uses the boost
  /// G(a) = G(a + 1) * U^(1/a) carried in log space so that tiny shapes
  /// (a << 1) do not underflow to zero.
  double log_gamma_variate(double shape);
  double gamma_variate(double shape);

  /// Symmetric Dirichlet(alpha, ..., alpha) of dimension `out.size()`.
  void dirichlet(double alpha, std::span<double> out);
  std::vector<double> dirichlet(double alpha, std::size_t dim);

  /// Multinomial(trials, probs). `probs` must sum to 1 (checked loosely by the
  /// caller); counts are written to `counts`.
  void multinomial(std::uint64_t trials, std::span<const double> probs, std::span<std::uint64_t> counts);

  /// Stream-split seed: splitmix64 over (master, fnv1a(tag), index).
  static std::uint64_t hash_seed(std::uint64_t master_seed, std::string_view tag, std::uint64_t index);

 private:
  void step();

  unsigned __int128 state_;
  unsigned __int128 inc_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace infolearn
