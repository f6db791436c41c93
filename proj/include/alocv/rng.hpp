#pragma once

#include <cstdint>
#include <random>

namespace alocv {

/// splitmix64 step; used to expand user seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic derived seed for substream `index` of `master`.
inline std::uint64_t splitmix64_combine(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL * (index + 0x632be59bd9b4e019ULL));
  return splitmix64(s);
}

/// Independent substream for (master, stream_id).
///
/// Stream derivation is index based: the pair is mixed through splitmix64 to
/// fill the full mt19937_64 seed sequence, so substreams are decorrelated even
/// for adjacent ids and results do not depend on scheduling order.
inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t stream_id) {
  std::uint64_t s = master ^ (0x517cc1b727220a95ULL * (stream_id + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s))};
  return std::mt19937_64(seq);
}

}  // namespace alocv
