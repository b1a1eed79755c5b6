#pragma once

#include <cstdint>

namespace vppsim {

/// Deterministic splitmix64 stream. Every stochastic actor (one per PEM
/// device) owns its own stream, derived from the master seed and a stable
/// stream id, so the draw sequence an actor sees is independent of the
/// order actors are stepped in. That is what makes parallel fleet stepping
/// observably identical to sequential stepping.
class RngStream {
 public:
  RngStream() : state_(0x853c49e6748fea9bULL) {}
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  /// Stream keyed by (master_seed, stream_id); stable across runs.
  static RngStream substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    RngStream r;
    r.state_ = scramble(master_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return scramble(state_);
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace vppsim
