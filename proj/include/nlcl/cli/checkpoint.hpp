#pragma once

// Binary checkpoint, all integers and floats little-endian:
//
//   "NLCL"           4 bytes
//   version          u32 (= 1)
//   dim              u32
//   points_per_axis  u32
//   period           f64
//   time             f64
//   params hash      u64
//   w0               3 x f64
//   payload          7 components (rho, u1, u2, u3, n1, n2, n3), each
//                    N^dim spectral coefficients as (re, im) f64 pairs
//                    in flat row-major mode order
//
// The payload is the integrator's own state, so resuming is bit-exact.

#include "nlcl/error.hpp"
#include "nlcl/state.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

namespace nlcl::cli {

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 4 + 4 * 3 + 8 * 3 + 8 * 3;

struct Checkpoint {
  SpectralState state;
  std::uint64_t params_hash = 0;
};

namespace detail {

inline void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}
inline void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
inline std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}
inline double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace detail

inline std::vector<unsigned char> encode_checkpoint(const SpectralState& s, std::uint64_t params_hash) {
  const GridSpec& g = s.grid();
  if (s.fields.components() != 7) throw CheckpointError("checkpoint: expected a 7-component state");
  std::vector<unsigned char> out;
  out.reserve(kCheckpointHeaderBytes + s.fields.data().size() * 16);
  for (char ch : {'N', 'L', 'C', 'L'}) out.push_back(static_cast<unsigned char>(ch));
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(g.dim));
  detail::put_u32(out, static_cast<std::uint32_t>(g.points_per_axis));
  detail::put_f64(out, g.period);
  detail::put_f64(out, s.time);
  detail::put_u64(out, params_hash);
  for (double w : s.w0) detail::put_f64(out, w);
  for (const complex& v : s.fields.data()) {
    detail::put_f64(out, v.real());
    detail::put_f64(out, v.imag());
  }
  return out;
}

inline Checkpoint decode_checkpoint(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kCheckpointHeaderBytes)
    throw CheckpointError("checkpoint: truncated header (" + std::to_string(bytes.size()) + " of " +
                          std::to_string(kCheckpointHeaderBytes) + " bytes)");
  if (std::memcmp(bytes.data(), "NLCL", 4) != 0) throw CheckpointError("checkpoint: bad magic (not an NLCL file)");
  const unsigned char* p = bytes.data() + 4;
  const std::uint32_t version = detail::get_u32(p);
  if (version != kCheckpointVersion)
    throw CheckpointError("checkpoint: unsupported version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  GridSpec g;
  g.dim = static_cast<int>(detail::get_u32(p + 4));
  g.points_per_axis = static_cast<int>(detail::get_u32(p + 8));
  g.period = detail::get_f64(p + 12);
  try {
    g.validate();
  } catch (const InputError& e) {
    throw CheckpointError(std::string("checkpoint: invalid grid: ") + e.what());
  }
  Checkpoint c;
  c.state.time = detail::get_f64(p + 20);
  c.params_hash = detail::get_u64(p + 28);
  for (std::size_t i = 0; i < 3; ++i) c.state.w0[i] = detail::get_f64(p + 36 + 8 * i);

  const std::size_t expected = 7 * g.total_points() * 16;
  const std::size_t actual = bytes.size() - kCheckpointHeaderBytes;
  if (actual != expected)
    throw CheckpointError("checkpoint: payload length mismatch (expected " + std::to_string(expected) +
                          " bytes, found " + std::to_string(actual) + ")");
  c.state.fields = SpectralField(g, 7);
  const unsigned char* q = bytes.data() + kCheckpointHeaderBytes;
  for (auto& v : c.state.fields.data()) {
    v = complex(detail::get_f64(q), detail::get_f64(q + 8));
    q += 16;
  }
  return c;
}

inline void save_checkpoint(const SpectralState& s, const std::string& path, std::uint64_t params_hash = 0) {
  const auto bytes = encode_checkpoint(s, params_hash);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("checkpoint: cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("checkpoint: write to '" + path + "' failed");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint: cannot open '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

}  // namespace nlcl::cli
