#include "infochain/peer_selection.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "infochain/error.hpp"
#include "infochain/keccak.hpp"

namespace infochain {

std::uint64_t SplitMix64::next() {
  ++draws_;
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t SelectionSeed::derive() const {
  std::array<std::uint8_t, 64> words{};
  for (int i = 0; i < 8; ++i) {
    words[31 - i] = static_cast<std::uint8_t>(block_timestamp >> (8 * i));
    words[63 - i] = static_cast<std::uint8_t>(difficulty >> (8 * i));
  }
  const Digest256 digest = keccak256(words);
  std::uint64_t v = 0;
  for (std::size_t i = 24; i < 32; ++i) v = (v << 8) | digest[i];
  return v;
}

std::uint64_t stream_seed(std::uint64_t base, std::size_t agent, std::size_t question) {
  SplitMix64 mix(base ^ ((static_cast<std::uint64_t>(agent) << 32) | static_cast<std::uint32_t>(question)));
  return mix.next();
}

namespace {

void check_k(std::size_t n, std::size_t k) {
  if (k == 0) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (k > n) throw Error(Errc::KTooLarge, fmt::format("k = {} exceeds {} candidates", k, n));
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SplitMix64& rng) {
  check_k(n, k);
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> out;
  out.reserve(k);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t remaining = n - t;
    const std::size_t r = static_cast<std::size_t>(rng.next() % remaining);
    out.push_back(pool[r]);
    std::swap(pool[r], pool[remaining - 1]);
  }
  return out;
}

RejectionSample sample_indices_rejection(std::size_t n, std::size_t k, SplitMix64& rng,
                                         std::uint64_t draw_cap) {
  check_k(n, k);
  RejectionSample out;
  out.indices.reserve(k);
  while (out.indices.size() < k) {
    if (out.draws_used >= draw_cap) {
      throw Error(Errc::DrawBudgetExceeded,
                  fmt::format("{} draws produced only {} of {} peers", out.draws_used,
                              out.indices.size(), k));
    }
    ++out.draws_used;
    const std::size_t r = static_cast<std::size_t>(rng.next() % n);
    if (std::find(out.indices.begin(), out.indices.end(), r) == out.indices.end()) {
      out.indices.push_back(r);
    }
  }
  return out;
}

std::vector<AgentId> sample_peers(std::span<const AgentId> candidates, std::size_t k,
                                  const SelectionSeed& seed) {
  SplitMix64 rng(seed.derive());
  std::vector<AgentId> out;
  for (std::size_t i : sample_indices(candidates.size(), k, rng)) out.push_back(candidates[i]);
  return out;
}

RejectionPeers sample_peers_rejection(std::span<const AgentId> candidates, std::size_t k,
                                      const SelectionSeed& seed, std::uint64_t draw_cap) {
  SplitMix64 rng(seed.derive());
  RejectionSample s = sample_indices_rejection(candidates.size(), k, rng, draw_cap);
  RejectionPeers out;
  out.draws_used = s.draws_used;
  for (std::size_t i : s.indices) out.peers.push_back(candidates[i]);
  return out;
}

std::vector<GoldenSampleVector> read_sample_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::vector<GoldenSampleVector> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw Error(Errc::ParseError, "missing ':' in " + line);
    std::istringstream head(line.substr(0, colon));
    std::istringstream tail(line.substr(colon + 1));
    GoldenSampleVector v;
    if (!(head >> v.seed.block_timestamp >> v.seed.difficulty >> v.candidates >> v.k)) {
      throw Error(Errc::ParseError, "malformed sample vector: " + line);
    }
    std::size_t idx = 0;
    while (tail >> idx) v.indices.push_back(idx);
    if (v.indices.size() != v.k) throw Error(Errc::ParseError, "index count != k: " + line);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace infochain
