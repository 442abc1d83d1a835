#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dps {

struct storage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row spill format, bit-exact: per row a header (element key of u, term
// count; 8-byte little-endian each), then term triples sorted by element
// key: key as 8-byte little-endian, numerator as zigzag varint, denominator
// as unsigned varint.
namespace spill {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}
inline void put_signed_varint(std::string& out, std::int64_t v) {
  put_varint(out, (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63));
}

struct Reader {
  const std::uint8_t* p;
  const std::uint8_t* end;

  bool done() const { return p >= end; }
  std::uint64_t u64() {
    if (p + 8 > end) throw storage_error("spill: truncated u64");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    p += 8;
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    for (;;) {
      if (p >= end) throw storage_error("spill: truncated varint");
      std::uint8_t b = *p++;
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if (!(b & 0x80)) return v;
      shift += 7;
    }
  }
  std::int64_t signed_varint() {
    std::uint64_t u = varint();
    return static_cast<std::int64_t>((u >> 1) ^ (~(u & 1) + 1));
  }
};

struct Term {
  std::uint64_t key;
  std::int64_t num;
  std::int64_t den;
};

inline void write_row(std::string& out, std::uint64_t u_key, const std::vector<Term>& terms) {
  put_u64(out, u_key);
  put_u64(out, terms.size());
  for (const auto& t : terms) {
    put_u64(out, t.key);
    put_signed_varint(out, t.num);
    put_varint(out, static_cast<std::uint64_t>(t.den));
  }
}

struct Row {
  std::uint64_t u_key;
  std::vector<Term> terms;
};

inline bool read_row(Reader& r, Row& row) {
  if (r.done()) return false;
  row.u_key = r.u64();
  std::uint64_t n = r.u64();
  row.terms.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    row.terms[i].key = r.u64();
    row.terms[i].num = r.signed_varint();
    row.terms[i].den = static_cast<std::int64_t>(r.varint());
  }
  return true;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw storage_error("spill: cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void dump(const std::filesystem::path& path, const std::string& data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw storage_error("spill: cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw storage_error("spill: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace spill

// Checkpoint manifest for resumable runs.
struct CheckpointManifest {
  nlohmann::json point;
  std::vector<int> word;
  std::int64_t q = 2;
  std::uint64_t completed_rows = 0;
  std::int64_t block_pass = 0;

  nlohmann::json to_json() const {
    return {{"point", point},
            {"word", word},
            {"q", q},
            {"completed_rows", completed_rows},
            {"block_pass", block_pass}};
  }
  static CheckpointManifest from_json(const nlohmann::json& j) {
    CheckpointManifest m;
    m.point = j.at("point");
    m.word = j.at("word").get<std::vector<int>>();
    m.q = j.at("q").get<std::int64_t>();
    m.completed_rows = j.at("completed_rows").get<std::uint64_t>();
    m.block_pass = j.at("block_pass").get<std::int64_t>();
    return m;
  }
  void save(const std::filesystem::path& path) const { spill::dump(path, to_json().dump(2)); }
  static std::optional<CheckpointManifest> load(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return std::nullopt;
    return from_json(nlohmann::json::parse(spill::slurp(path)));
  }
};

}  // namespace dps
