#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "storn/data.hpp"
#include "storn/storn.hpp"

namespace storn {

// Binary layout, little-endian:
//
//   magic    8 bytes  "STRNCKPT"
//   version  u32      1
//   header   u32 length + UTF-8 JSON (model spec, epsilon values, data kind,
//            standardisation statistics, channel names)
//   params   parameter container (see params_io.hpp)
inline constexpr char kCheckpointMagic[8] = {'S', 'T', 'R', 'N', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  StornModel model;
  FeatureKind kind = FeatureKind::binary;
  std::optional<ChannelStats> standardization;
  std::vector<std::string> channel_names;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ck);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace storn
