#include "cygnet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "cygnet/error.hpp"

namespace cygnet {

namespace {

constexpr char kMagic[4] = {'C', 'Y', 'G', '1'};
constexpr char kTrailerMagic[4] = {'C', 'F', 'G', '1'};

template <class U>
U to_little(U value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    unsigned char bytes[sizeof(U)];
    std::memcpy(bytes, &value, sizeof(U));
    for (std::size_t i = 0; i < sizeof(U) / 2; ++i) std::swap(bytes[i], bytes[sizeof(U) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(U));
    return value;
  }
}

void put_u32(std::ostream& out, std::uint32_t v) {
  v = to_little(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated checkpoint");
  return to_little(v);
}

float get_f32(std::istream& in) { return std::bit_cast<float>(get_u32(in)); }

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams<float>& params,
                      const std::string& provenance) {
  out.write(kMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(params.num_entities));
  put_u32(out, static_cast<std::uint32_t>(params.num_relations));
  put_u32(out, static_cast<std::uint32_t>(params.num_snapshots));
  put_u32(out, static_cast<std::uint32_t>(params.dim));
  put_f32(out, params.mask_magnitude);
  put_f32(out, params.alpha);
  params.for_each_tensor([&](const char*, const Matrix<float>& m) {
    for (float f : m.flat()) put_f32(out, f);
  });
  if (!provenance.empty()) {
    out.write(kTrailerMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(provenance.size()));
    out.write(provenance.data(), static_cast<std::streamsize>(provenance.size()));
  }
  if (!out) throw Error("checkpoint write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const auto n = static_cast<std::int32_t>(get_u32(in));
  const auto r = static_cast<std::int32_t>(get_u32(in));
  const auto t = static_cast<std::int32_t>(get_u32(in));
  const auto d = static_cast<std::int32_t>(get_u32(in));
  if (n <= 0 || r <= 0 || d <= 0 || t < 0) throw FormatError("invalid checkpoint header");

  Checkpoint ckpt;
  ckpt.params = ModelParams<float>(n, r, t, d);
  ckpt.params.mask_magnitude = get_f32(in);
  ckpt.params.alpha = get_f32(in);
  ckpt.params.for_each_tensor([&](const char*, Matrix<float>& m) {
    for (float& f : m.flat()) f = get_f32(in);
  });

  char trailer[4];
  if (in.read(trailer, 4)) {
    if (std::memcmp(trailer, kTrailerMagic, 4) != 0) throw FormatError("unknown checkpoint trailer");
    const auto len = get_u32(in);
    ckpt.provenance.resize(len);
    if (!in.read(ckpt.provenance.data(), len)) throw FormatError("truncated checkpoint trailer");
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_checkpoint(out, params, provenance);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in);
}

}  // namespace cygnet
