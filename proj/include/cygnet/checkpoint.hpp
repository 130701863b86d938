// Checkpoint file layout (all little-endian):
//
//   "CYG1"
//   int32 N, int32 R_aug, int32 T, int32 d
//   float32 mask_magnitude, float32 alpha
//   float32 arrays, row-major: entity_emb (N×d), relation_emb (R_aug×d),
//     time_unit (d), copy_weight (N×3d), copy_bias (N), gen_weight (N×3d),
//     gen_bias (N)
//
// Optionally followed by a provenance trailer:
//
//   "CFG1", uint32 byte length, UTF-8 text of `key = value` lines
//
// Readers that only need the parameters can stop after gen_bias.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "cygnet/model.hpp"

namespace cygnet {

struct Checkpoint {
  ModelParams<float> params;
  std::string provenance;  // empty when the file has no trailer
};

void write_checkpoint(std::ostream& out, const ModelParams<float>& params,
                      const std::string& provenance = {});
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const ModelParams<float>& params,
                     const std::string& provenance = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace cygnet
