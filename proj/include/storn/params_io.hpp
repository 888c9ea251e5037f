#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "storn/tensor.hpp"

namespace storn {

/// Ordered name -> tensor list, the unit of parameter serialisation.
using NamedTensors = std::vector<std::pair<std::string, Tensor>>;

// Binary layout, all integers and doubles little-endian:
//
//   magic    8 bytes  "STORNPRM"
//   version  u32      1
//   count    u32
//   count x entry:
//     name_len u32, name bytes (UTF-8)
//     rank     u32, rank x u64 extents
//     product(extents) x f64, row-major
inline constexpr char kParamMagic[8] = {'S', 'T', 'O', 'R', 'N', 'P', 'R', 'M'};
inline constexpr std::uint32_t kParamVersion = 1;

void write_params(std::ostream& out, const NamedTensors& params);
NamedTensors read_params(std::istream& in);

void save_params(const std::filesystem::path& path, const NamedTensors& params);
NamedTensors load_params(const std::filesystem::path& path);

/// Looks up `name`, throwing ParseError when absent.
const Tensor& find_param(const NamedTensors& params, const std::string& name);

namespace io {
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_string(std::ostream& out, const std::string& s);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::string read_string(std::istream& in, std::size_t max_len = 1u << 24);
}  // namespace io

}  // namespace storn
