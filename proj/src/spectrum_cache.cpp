#include "lde/spectrum_cache.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "spectrum cache assumes a little-endian host");

namespace lde {

namespace {

constexpr char kMagic[8] = {'S', 'P', 'N', 'S', 'P', 'E', 'C', '1'};

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

const char* mode_tag(SolverMode m) {
  return m == SolverMode::dense_full ? "dense" : "krylov";
}

}  // namespace

SpectrumCache::SpectrumCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path SpectrumCache::path_for(int L, double theta, SolverMode mode) const {
  std::uint64_t bits;
  std::memcpy(&bits, &theta, sizeof(bits));
  char name[96];
  std::snprintf(name, sizeof(name), "chain_L%d_theta%016llx_%s.spnspec", L,
                static_cast<unsigned long long>(bits), mode_tag(mode));
  return dir_ / name;
}

void SpectrumCache::store(int L, double theta, SolverMode mode,
                          const std::vector<Entry>& entries) const {
  const auto path = path_for(L, theta, mode);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("spectrum cache: cannot open " + tmp);
    os.write(kMagic, sizeof(kMagic));
    put(os, static_cast<std::int32_t>(L));
    put(os, theta);
    put(os, static_cast<std::int32_t>(entries.size()));
    for (const auto& e : entries) {
      put(os, static_cast<std::int32_t>(e.sz_total));
      put(os, static_cast<std::int64_t>(e.dim));
      put(os, static_cast<std::int32_t>(e.eigenvalues.size()));
      const std::uint8_t hv = e.eigenvectors.size() > 0 ? 1 : 0;
      put(os, hv);
      os.write(reinterpret_cast<const char*>(e.eigenvalues.data()),
               static_cast<std::streamsize>(sizeof(double) * e.eigenvalues.size()));
      if (hv)
        os.write(reinterpret_cast<const char*>(e.eigenvectors.data()),
                 static_cast<std::streamsize>(sizeof(double) * e.eigenvectors.size()));
    }
    if (!os) throw std::runtime_error("spectrum cache: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<std::vector<SpectrumCache::Entry>> SpectrumCache::load(int L, double theta,
                                                                     SolverMode mode) const {
  const auto path = path_for(L, theta, mode);
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) return std::nullopt;
  std::int32_t fl = 0, count = 0;
  double fth = 0;
  if (!get(is, fl) || !get(is, fth) || !get(is, count)) return std::nullopt;
  // exact key match only
  std::uint64_t a, b;
  std::memcpy(&a, &fth, sizeof(a));
  std::memcpy(&b, &theta, sizeof(b));
  if (fl != L || a != b || count < 0) return std::nullopt;

  std::vector<Entry> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int32_t i = 0; i < count; ++i) {
    Entry e;
    std::int32_t sz = 0, ne = 0;
    std::int64_t dim = 0;
    std::uint8_t hv = 0;
    if (!get(is, sz) || !get(is, dim) || !get(is, ne) || !get(is, hv)) return std::nullopt;
    e.sz_total = sz;
    e.dim = dim;
    e.eigenvalues.resize(ne);
    is.read(reinterpret_cast<char*>(e.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double) * ne));
    if (hv) {
      e.eigenvectors.resize(dim, ne);
      is.read(reinterpret_cast<char*>(e.eigenvectors.data()),
              static_cast<std::streamsize>(sizeof(double) * dim * ne));
    }
    if (!is) return std::nullopt;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace lde
