#include "fairsmile/ensemble_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fairsmile {

static_assert(std::endian::native == std::endian::little,
              "ensemble files are written in native little-endian order");

namespace {

template <class T>
void put(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("corrupt ensemble file: truncated header");
  return v;
}

void get_array(std::istream& in, std::vector<double>& v, std::size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error("corrupt ensemble file: truncated data");
}

}  // namespace

void write_ensemble(std::ostream& out, const PathEnsemble& e) {
  validate(e);
  out.write(kEnsembleMagic, sizeof kEnsembleMagic);
  put(out, kEnsembleVersion);
  put(out, static_cast<std::uint64_t>(e.n_paths));
  put(out, static_cast<std::uint64_t>(e.n_steps));
  put(out, e.step_days);
  put(out, e.seed);
  put(out, static_cast<std::uint32_t>(e.model_tag.size()));
  out.write(e.model_tag.data(), static_cast<std::streamsize>(e.model_tag.size()));
  const std::uint8_t has_pre = e.pre_vol.empty() ? 0 : 1;
  put(out, has_pre);
  put(out, e.vol_floor_hits);
  out.write(reinterpret_cast<const char*>(e.returns.data()),
            static_cast<std::streamsize>(e.returns.size() * sizeof(double)));
  if (has_pre) {
    out.write(reinterpret_cast<const char*>(e.pre_vol.data()),
              static_cast<std::streamsize>(e.pre_vol.size() * sizeof(double)));
  }
  if (!out) throw Error("failed to write ensemble");
}

void write_ensemble(const std::filesystem::path& path, const PathEnsemble& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_ensemble(out, e);
}

PathEnsemble read_ensemble(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kEnsembleMagic, sizeof magic) != 0) {
    throw Error("corrupt ensemble file: bad magic");
  }
  if (get<std::uint32_t>(in) != kEnsembleVersion) {
    throw Error("corrupt ensemble file: unsupported version");
  }
  PathEnsemble e;
  e.n_paths = get<std::uint64_t>(in);
  e.n_steps = get<std::uint64_t>(in);
  e.step_days = get<double>(in);
  e.seed = get<std::uint64_t>(in);
  const auto tag_len = get<std::uint32_t>(in);
  if (tag_len > 4096) throw Error("corrupt ensemble file: tag too long");
  e.model_tag.resize(tag_len);
  in.read(e.model_tag.data(), tag_len);
  const auto has_pre = get<std::uint8_t>(in);
  e.vol_floor_hits = get<std::uint64_t>(in);
  if (e.n_paths == 0 || e.n_steps == 0 || e.n_paths > (std::uint64_t{1} << 40) / e.n_steps) {
    throw Error("corrupt ensemble file: bad shape");
  }
  get_array(in, e.returns, e.n_paths * e.n_steps);
  if (has_pre) get_array(in, e.pre_vol, e.n_paths);
  validate(e);
  return e;
}

PathEnsemble read_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_ensemble(in);
}

void write_ensemble_csv(const std::filesystem::path& path, const PathEnsemble& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  for (std::size_t t = 0; t < e.n_steps; ++t) out << (t ? ",step_" : "step_") << (t + 1);
  out << '\n';
  char buf[32];
  for (std::size_t p = 0; p < e.n_paths; ++p) {
    const auto row = e.row(p);
    for (std::size_t t = 0; t < e.n_steps; ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", row[t]);
      if (t) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace fairsmile
