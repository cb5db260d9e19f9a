#pragma once

#include "zsk/errors.hpp"
#include "zsk/factor.hpp"
#include "zsk/group.hpp"
#include "zsk/sequence.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace zsk {

// On-disk A(G) up to a length cap. Layout (little-endian):
//   "ZSKA" | u32 version | u32 len + group spec | u32 cap | u64 count |
//   count x (u32 length, length x u32 element index)
struct AtomFile {
  std::string group_spec;
  std::uint32_t cap = 0;
  std::vector<std::vector<std::uint32_t>> atoms;
};

inline constexpr std::uint32_t kAtomFileVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& os, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
}

template <class T>
bool get(std::istream& is, T& v) {
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    int c = is.get();
    if (c == EOF) return false;
    acc |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  v = static_cast<T>(acc);
  return true;
}

}  // namespace detail

inline void write_atom_file(const std::filesystem::path& path, const AtomFile& f) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write atom cache " + tmp.string());
    os.write("ZSKA", 4);
    detail::put<std::uint32_t>(os, kAtomFileVersion);
    detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(f.group_spec.size()));
    os.write(f.group_spec.data(), static_cast<std::streamsize>(f.group_spec.size()));
    detail::put<std::uint32_t>(os, f.cap);
    detail::put<std::uint64_t>(os, f.atoms.size());
    for (const auto& a : f.atoms) {
      detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(a.size()));
      for (auto x : a) detail::put<std::uint32_t>(os, x);
    }
  }
  std::filesystem::rename(tmp, path);
}

// Returns nothing if the file is missing, truncated or from another version.
inline std::optional<AtomFile> read_atom_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "ZSKA") return std::nullopt;
  std::uint32_t version = 0, len = 0;
  if (!detail::get(is, version) || version != kAtomFileVersion) return std::nullopt;
  if (!detail::get(is, len) || len > 4096) return std::nullopt;
  AtomFile f;
  f.group_spec.resize(len);
  if (!is.read(f.group_spec.data(), len)) return std::nullopt;
  std::uint64_t count = 0;
  if (!detail::get(is, f.cap) || !detail::get(is, count)) return std::nullopt;
  f.atoms.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1 << 20)));
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t n = 0;
    if (!detail::get(is, n)) return std::nullopt;
    std::vector<std::uint32_t> a(n);
    for (auto& x : a)
      if (!detail::get(is, x)) return std::nullopt;
    f.atoms.push_back(std::move(a));
  }
  return f;
}

inline std::filesystem::path default_cache_dir() {
  if (const char* env = std::getenv("ZS_CACHE_DIR"); env && *env) return env;
  if (const char* home = std::getenv("HOME"); home && *home)
    return std::filesystem::path(home) / ".cache" / "zsk";
  return std::filesystem::temp_directory_path() / "zsk-cache";
}

inline std::filesystem::path atom_cache_path(const std::filesystem::path& dir, const Group& g, std::uint32_t cap) {
  std::string name = "atoms_" + g.spec() + "_cap" + std::to_string(cap) + ".bin";
  for (auto& c : name)
    if (c == ',') c = '-';
  return dir / name;
}

// A(G) restricted to |A| <= cap. Uses the cache directory when given; the
// cache only saves time, results are identical without it.
inline std::vector<Sequence> atoms_of_group(const Group& g, std::uint32_t cap,
                                            const std::optional<std::filesystem::path>& cache_dir = std::nullopt) {
  if (g.order() > 64) throw GuardExceeded("atoms_of_group: order above 64");
  std::optional<std::filesystem::path> path;
  if (cache_dir) path = atom_cache_path(*cache_dir, g, cap);
  if (path)
    if (auto f = read_atom_file(*path); f && f->group_spec == g.spec() && f->cap == cap) {
      std::vector<Sequence> out;
      for (const auto& a : f->atoms) {
        Sequence s(g);
        for (auto x : a) s.push_index(x);
        out.push_back(std::move(s));
      }
      return out;
    }
  std::vector<Sequence> out;
  for_each_minimal_divisor(full_sequence(g, static_cast<std::uint32_t>(g.exponent())), cap, [&](const Sequence& t) {
    out.push_back(t);
    return true;
  });
  if (path) {
    AtomFile f{g.spec(), cap, {}};
    for (const auto& s : out) {
      std::vector<std::uint32_t> a;
      for (auto x : s.indices()) a.push_back(static_cast<std::uint32_t>(x));
      f.atoms.push_back(std::move(a));
    }
    write_atom_file(*path, f);
  }
  return out;
}

}  // namespace zsk
