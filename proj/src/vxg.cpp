#include "linconvex/vxg.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

namespace linconvex {

namespace {

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string vxg_header(const GridSpec& spec) {
  std::string h = "VXG1 " + std::to_string(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) h += " " + std::to_string(spec.res()[i]);
  for (int i = 0; i < spec.dim(); ++i) h += " " + real(spec.box().lo()[i]);
  for (int i = 0; i < spec.dim(); ++i) h += " " + real(spec.box().hi()[i]);
  return h;
}

std::string vxg_payload(const VoxelGrid& g) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::size_t n = g.spec().cell_count();
  std::size_t bytes = (n + 7) / 8;
  std::string out(2 * bytes, '0');
  for (std::size_t b = 0; b < bytes; ++b) {
    unsigned v = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      std::size_t idx = 8 * b + k;
      v = (v << 1) | ((idx < n && g.test(idx)) ? 1u : 0u);
    }
    out[2 * b] = kHex[v >> 4];
    out[2 * b + 1] = kHex[v & 15];
  }
  return out;
}

void write_vxg(std::ostream& out, const VoxelGrid& g) {
  out << vxg_header(g.spec()) << '\n' << vxg_payload(g) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "failed writing VXG1 stream");
}

VoxelGrid read_vxg(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "missing VXG1 header");
  std::istringstream hs(line);
  std::string magic;
  int n = 0;
  hs >> magic >> n;
  if (magic != "VXG1") throw Error(ErrorCode::ParseError, "not a VXG1 file");
  if (!hs || n < 2 || n > kMaxDim) throw Error(ErrorCode::ParseError, "bad VXG1 dimension");
  CellIndex res{};
  Coord lo{}, hi{};
  for (int i = 0; i < n; ++i) hs >> res[i];
  for (int i = 0; i < n; ++i) hs >> lo[i];
  for (int i = 0; i < n; ++i) hs >> hi[i];
  std::string extra;
  if (!hs || (hs >> extra)) throw Error(ErrorCode::ParseError, "malformed VXG1 header");
  GridSpec spec(BoundingBox(n, lo, hi), res);

  std::string payload;
  if (!std::getline(in, payload)) throw Error(ErrorCode::ParseError, "missing VXG1 payload");
  std::size_t cells = spec.cell_count();
  if (payload.size() != 2 * ((cells + 7) / 8))
    throw Error(ErrorCode::ParseError, "VXG1 payload length does not match the header");
  VoxelGrid g(spec);
  for (std::size_t b = 0; b < payload.size() / 2; ++b) {
    int hi4 = hex_value(payload[2 * b]), lo4 = hex_value(payload[2 * b + 1]);
    if (hi4 < 0 || lo4 < 0) throw Error(ErrorCode::ParseError, "non-hex character in payload");
    unsigned v = unsigned(hi4 << 4 | lo4);
    for (std::size_t k = 0; k < 8; ++k) {
      std::size_t idx = 8 * b + k;
      bool bit = (v >> (7 - k)) & 1u;
      if (idx < cells)
        g.set(idx, bit);
      else if (bit)
        throw Error(ErrorCode::ParseError, "padding bits must be zero");
    }
  }
  return g;
}

void save_vxg(const std::string& path, const VoxelGrid& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  write_vxg(out, g);
}

VoxelGrid load_vxg(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_vxg(in);
}

std::string grid_sha(const VoxelGrid& g) {
  std::string payload = vxg_payload(g);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned len = 0;
  if (EVP_Digest(payload.data(), payload.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::IoError, "SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

}  // namespace linconvex
