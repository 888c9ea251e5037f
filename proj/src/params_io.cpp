#include "storn/params_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "storn/errors.hpp"

namespace storn {

namespace io {

namespace {

template <class U>
void write_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class U>
U read_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw ParseError("unexpected end of parameter stream");
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_u32(std::ostream& out, std::uint32_t v) { write_le(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { write_le(out, v); }
void write_f64(std::ostream& out, double v) { write_le(out, std::bit_cast<std::uint64_t>(v)); }

void write_string(std::ostream& out, const std::string& s) {
  write_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t read_u32(std::istream& in) { return read_le<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return read_le<std::uint64_t>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(read_le<std::uint64_t>(in)); }

std::string read_string(std::istream& in, std::size_t max_len) {
  const std::uint32_t n = read_u32(in);
  if (n > max_len) throw ParseError("string of length " + std::to_string(n) + " exceeds limit");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw ParseError("unexpected end of parameter stream");
  return s;
}

}  // namespace io

void write_params(std::ostream& out, const NamedTensors& params) {
  out.write(kParamMagic, sizeof(kParamMagic));
  io::write_u32(out, kParamVersion);
  io::write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    io::write_string(out, name);
    io::write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto e : t.shape()) io::write_u64(out, e);
    for (double v : t.data()) io::write_f64(out, v);
  }
  if (!out) throw ParseError("failed writing parameter stream");
}

NamedTensors read_params(std::istream& in) {
  char magic[sizeof(kParamMagic)];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + sizeof(magic), kParamMagic)) {
    throw ParseError("not a parameter container (bad magic)");
  }
  const auto version = io::read_u32(in);
  if (version != kParamVersion) {
    throw ParseError("unsupported parameter container version " + std::to_string(version));
  }
  const auto count = io::read_u32(in);
  NamedTensors params;
  params.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = io::read_string(in, 4096);
    const auto rank = io::read_u32(in);
    if (rank > 8) throw ParseError("parameter '" + name + "' has implausible rank " + std::to_string(rank));
    Shape shape(rank);
    for (auto& e : shape) e = io::read_u64(in);
    const std::size_t n = shape_size(shape);
    if (n > (std::size_t{1} << 32)) throw ParseError("parameter '" + name + "' is implausibly large");
    std::vector<double> data(n);
    for (auto& v : data) v = io::read_f64(in);
    params.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
  }
  return params;
}

void save_params(const std::filesystem::path& path, const NamedTensors& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
  write_params(out, params);
}

NamedTensors load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return read_params(in);
}

const Tensor& find_param(const NamedTensors& params, const std::string& name) {
  for (const auto& [n, t] : params)
    if (n == name) return t;
  throw ParseError("parameter '" + name + "' missing from container");
}

}  // namespace storn
